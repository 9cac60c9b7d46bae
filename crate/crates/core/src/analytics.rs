//! Closed-form expressions for the detector and the age.

use serde::Serialize;

use crate::detector::map_threshold;
use crate::error::{Error, Result};
use crate::params::{positive_rate, SimParams};
use crate::scalar::Real;

fn nonneg_time<F: Real>(name: &'static str, value: F) -> Result<()> {
    if value >= F::zero() && value.is_finite() {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("must be finite and >= 0, got {value}"),
        ))
    }
}

/// Density of `z` while the sensor works: `(lambda+nu) e^{-(lambda+nu) z}`.
pub fn pdf_z_given_r2<F: Real>(z: F, lambda: F, nu: F) -> Result<F> {
    positive_rate("lambda", lambda)?;
    positive_rate("nu", nu)?;
    nonneg_time("z", z)?;
    let a = lambda + nu;
    Ok(a * (-a * z).exp())
}

/// Density of `z` during recovery: the working-state density convolved with
/// a uniform on `[0, r]`.
pub fn pdf_z_given_r3<F: Real>(z: F, lambda: F, nu: F, r: F) -> Result<F> {
    positive_rate("lambda", lambda)?;
    positive_rate("nu", nu)?;
    positive_rate("r", r)?;
    nonneg_time("z", z)?;
    let a = lambda + nu;
    Ok(if z < r {
        -(-a * z).exp_m1() / r
    } else {
        (-a * z).exp() * (a * r).exp_m1() / r
    })
}

/// Long-run fraction of time the sensor is down, `r nu / (1 + r nu)`.
pub fn prior_failed<F: Real>(nu: F, r: F) -> F {
    let rn = r * nu;
    rn / (F::one() + rn)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClosedFormError<F> {
    pub error_rate: F,
    /// The MAP rule never declares a failure (`tau >= r`); the error is
    /// then the time fraction spent failed.
    pub degenerate: bool,
}

/// Error probability of the MAP detector.
pub fn error_rate_closed_form<F: Real>(lambda: F, nu: F, r: F) -> Result<ClosedFormError<F>> {
    nonneg_time("r", r)?;
    let tau = map_threshold(lambda, nu)?;
    if tau >= r {
        return Ok(ClosedFormError {
            error_rate: prior_failed(nu, r),
            degenerate: true,
        });
    }
    let two = F::lit(2.0);
    let rn = F::one() + r * nu;
    let frac = nu / (lambda + two * nu);
    let false_alarm = frac / rn;
    let missed = nu / rn * ((lambda / nu + two).ln() + frac - F::one()) / (lambda + nu);
    Ok(ClosedFormError {
        error_rate: false_alarm + missed,
        degenerate: false,
    })
}

/// Average age of an M/M/1 FCFS queue, `(1 + 1/rho + rho^2/(1-rho)) / mu`.
pub fn aoi_mm1<F: Real>(rho: F, mu: F) -> Result<F> {
    positive_rate("mu", mu)?;
    if !(rho > F::zero() && rho < F::one()) {
        return Err(Error::Domain(format!("rho must lie in (0, 1), got {rho}")));
    }
    Ok((F::one() + rho.recip() + rho * rho / (F::one() - rho)) / mu)
}

/// Average age with failures:
/// `aoi_mm1 + (r^2/2 + r/mu + 1/mu^2) nu / (1 + r nu)`.
pub fn mean_aoi_closed_form<F: Real>(lambda: F, mu: F, nu: F, r: F) -> Result<F> {
    positive_rate("lambda", lambda)?;
    positive_rate("nu", nu)?;
    nonneg_time("r", r)?;
    let base = aoi_mm1(lambda / mu, mu)?;
    let excess = r * r / F::lit(2.0) + r / mu + (mu * mu).recip();
    Ok(base + excess * nu / (F::one() + r * nu))
}

/// Expected average age in each region of a period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionMeans<F> {
    pub r1: F,
    pub r2: F,
    pub r3: F,
}

pub fn region_means_closed_form<F: Real>(lambda: F, mu: F, nu: F, r: F) -> Result<RegionMeans<F>> {
    positive_rate("nu", nu)?;
    nonneg_time("r", r)?;
    let r2 = aoi_mm1(lambda / mu, mu)?;
    let half = F::lit(0.5);
    Ok(RegionMeans {
        r1: r2 + r + half / mu,
        r2,
        r3: r2 + half * r,
    })
}

/// Every closed form for one parameter set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalyticReport<F> {
    pub tau: F,
    pub degenerate: bool,
    pub error_rate: F,
    pub aoi_mm1: F,
    pub mean_aoi: F,
    pub prior_s1: F,
    pub regions: RegionMeans<F>,
}

impl<F: Real> AnalyticReport<F> {
    pub fn evaluate(params: &SimParams<F>) -> Result<Self> {
        params.validate_for_analysis()?;
        let (lambda, mu, nu, r) = (params.lambda, params.mu, params.nu, params.r);
        let err = error_rate_closed_form(lambda, nu, r)?;
        Ok(AnalyticReport {
            tau: map_threshold(lambda, nu)?,
            degenerate: err.degenerate,
            error_rate: err.error_rate,
            aoi_mm1: aoi_mm1(params.rho(), mu)?,
            mean_aoi: mean_aoi_closed_form(lambda, mu, nu, r)?,
            prior_s1: prior_failed(nu, r),
            regions: region_means_closed_form(lambda, mu, nu, r)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r2_density_values() {
        assert_eq!(pdf_z_given_r2(0.0, 0.5, 0.005).unwrap(), 0.505);
        // 0.505 * exp(-0.505 * 9.16), evaluated independently.
        let v = pdf_z_given_r2(9.16f64, 0.5, 0.005).unwrap();
        assert!((v - 4.946_886_700_303_817e-3).abs() < 1e-15);
        assert!(pdf_z_given_r2(1.0, 0.0, 0.005).is_err());
        assert!(pdf_z_given_r2(-1.0, 0.5, 0.005).is_err());
    }

    #[test]
    fn r3_density_is_continuous_at_r() {
        let (l, n, r) = (0.5, 0.005, 20.0_f64);
        assert_eq!(pdf_z_given_r3(0.0, l, n, r).unwrap(), 0.0);
        let below = pdf_z_given_r3(r - 1e-12, l, n, r).unwrap();
        let at = pdf_z_given_r3(r, l, n, r).unwrap();
        let expected = (1.0 - (-(l + n) * r).exp()) / r;
        assert!((at - expected).abs() < 1e-15);
        assert!((below - at).abs() < 1e-12);
        assert!(pdf_z_given_r3(1.0, l, n, 0.0).is_err());
    }

    #[test]
    fn error_rate_at_defaults() {
        let e = error_rate_closed_form(0.5f64, 0.005, 20.0).unwrap();
        assert!(!e.degenerate);
        // mpmath, 30 digits: 0.0416289182113795776873268404703
        assert!((e.error_rate - 0.041_628_918_211_379_58).abs() < 1e-15);
        assert!((e.error_rate - 0.04163).abs() < 1e-4);
    }

    #[test]
    fn error_rate_degenerate_is_prior() {
        let e = error_rate_closed_form(0.1f64, 0.005, 20.0).unwrap();
        assert!(e.degenerate);
        assert!((e.error_rate - 0.1 / 1.1).abs() < 1e-15);
        let e = error_rate_closed_form(0.5, 0.005, 0.0).unwrap();
        assert!(e.degenerate);
        assert_eq!(e.error_rate, 0.0);
    }

    #[test]
    fn error_rate_decreases_with_recovery_and_rho() {
        let mut prev = f64::INFINITY;
        for r in [10.0, 15.0, 20.0, 40.0, 80.0] {
            let e = error_rate_closed_form(0.5, 0.005, r).unwrap();
            assert!(!e.degenerate);
            assert!(e.error_rate < prev);
            prev = e.error_rate;
        }
        let low = error_rate_closed_form(0.2, 0.005, 20.0).unwrap().error_rate;
        let high = error_rate_closed_form(0.8, 0.005, 20.0).unwrap().error_rate;
        assert!(high < low);
    }

    #[test]
    fn error_rate_strictly_decreasing_in_lambda() {
        let values: Vec<f64> = (1..=9)
            .map(|k| {
                error_rate_closed_form(0.1 * k as f64, 0.005, 20.0)
                    .unwrap()
                    .error_rate
            })
            .collect();
        assert!(values.windows(2).all(|w| w[1] < w[0]), "{values:?}");
    }

    #[test]
    fn mm1_age() {
        assert_eq!(aoi_mm1(0.5, 1.0).unwrap(), 3.5);
        assert!((aoi_mm1(0.5f64, 4.0).unwrap() - 3.5 / 4.0).abs() < 1e-15);
        assert!(matches!(aoi_mm1(1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(aoi_mm1(0.0, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn mean_age_with_failures() {
        let m: f64 = mean_aoi_closed_form(0.5, 1.0, 0.005, 20.0).unwrap();
        // 3.5 + 221 * 0.005 / 1.1
        assert!((m - 4.504_545_454_545_454).abs() < 1e-12);
        let tiny = mean_aoi_closed_form(0.5, 1.0, 1e-300, 20.0).unwrap();
        assert_eq!(tiny, 3.5);
        let m: f64 = mean_aoi_closed_form(0.5, 2.0, 0.3, 0.0).unwrap();
        assert!((m - (aoi_mm1(0.25, 2.0).unwrap() + 0.3 / 4.0)).abs() < 1e-15);
        assert!(mean_aoi_closed_form(1.0, 1.0, 0.005, 20.0).is_err());
    }

    #[test]
    fn region_means() {
        let m = region_means_closed_form(0.5, 1.0, 0.005, 20.0).unwrap();
        assert_eq!((m.r1, m.r2, m.r3), (24.0, 3.5, 13.5));
        let m = region_means_closed_form(0.3f64, 2.0, 0.01, 0.0).unwrap();
        assert!((m.r1 - m.r2 - 0.25).abs() < 1e-15);
        for r in [1.0f64, 7.0, 33.0] {
            let m = region_means_closed_form(0.3, 1.0, 0.01, r).unwrap();
            assert!((m.r3 - m.r2 - r / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn report_at_defaults() {
        let rep = AnalyticReport::evaluate(&SimParams::<f64>::default()).unwrap();
        assert!((rep.tau - 9.16).abs() < 0.005);
        assert!((rep.prior_s1 - 0.1 / 1.1).abs() < 1e-15);
        assert!(!rep.degenerate);
        let rep32 = AnalyticReport::evaluate(&SimParams::<f32>::default()).unwrap();
        assert!((rep32.mean_aoi - 4.504_545).abs() < 1e-4);
    }
}
