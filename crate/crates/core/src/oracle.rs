//! Brute-force checks of the closed forms.
//!
//! The error probability is recomputed by numerically integrating the
//! conditional densities of `z`, with the recovery-state density itself
//! obtained by numerically convolving the working-state density with the
//! uniform recovery offset. Nothing here calls into [`crate::analytics`]
//! except to produce the values being compared.

use serde::Serialize;

use crate::analytics::{error_rate_closed_form, AnalyticReport};
use crate::detector::{DecisionRule, ErrorScope};
use crate::error::{Error, Result};
use crate::params::SimParams;
use crate::quadrature::{integrate, integrate_to_infinity};
use crate::sim::simulate;
use crate::stats::{ks_exponential, Bootstrap, KsTest};
use crate::summary::{summarize, MetricsSummary};
use crate::timeline::Timeline;

/// Absolute tolerance of every oracle integral.
pub const QUADRATURE_TOL: f64 = 1e-10;

pub const BOOTSTRAP_RESAMPLES: usize = 1000;

/// Smallest run accepted by [`monte_carlo_cross_check`].
pub const MIN_CROSS_CHECK_PERIODS: u64 = 10_000;

pub const AGREEMENT_LAMBDAS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];
pub const AGREEMENT_NUS: [f64; 5] = [0.001, 0.005, 0.01, 0.02, 0.05];
pub const AGREEMENT_RECOVERIES: [f64; 3] = [5.0, 20.0, 50.0];

fn check_inputs(lambda: f64, nu: f64, r: f64, tau: f64) -> Result<()> {
    for (name, v) in [("lambda", lambda), ("nu", nu), ("r", r)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::param(
                name,
                format!("must be finite and > 0, got {v}"),
            ));
        }
    }
    if tau.is_nan() || tau < 0.0 {
        return Err(Error::param("tau", format!("must be >= 0, got {tau}")));
    }
    Ok(())
}

/// `P(z <= tau | recovering)` where `z = z_f + u`, `z_f` has the working
/// density and `u` is uniform on `[0, r]`.
fn recovering_cdf(lambda: f64, nu: f64, r: f64, tau: f64) -> Result<f64> {
    let a = lambda + nu;
    let working = |z: f64| a * (-a * z).exp();
    let density = |z: f64| -> f64 {
        let upper = z.min(r);
        integrate(|u| working(z - u) / r, 0.0, upper, 1e-3 * QUADRATURE_TOL).unwrap_or(f64::NAN)
    };
    // Split at the kink of the density.
    let kink = tau.min(r);
    let below = integrate(density, 0.0, kink, 0.5 * QUADRATURE_TOL)?;
    // Beyond r the density is a smooth decaying tail; integrating the two
    // infinite tails keeps wide ranges from being under-sampled.
    let above = if tau > r {
        integrate_to_infinity(density, r, 0.25 * QUADRATURE_TOL)?
            - integrate_to_infinity(density, tau, 0.25 * QUADRATURE_TOL)?
    } else {
        0.0
    };
    Ok(below + above)
}

/// Error probability of the rule "declare failure once `z > tau`" under the
/// model's state priors, for any `tau >= 0`.
pub fn quadrature_error_rate(lambda: f64, nu: f64, r: f64, tau: f64) -> Result<f64> {
    check_inputs(lambda, nu, r, tau)?;
    let a = lambda + nu;
    let p_fail = r * nu / (1.0 + r * nu);
    let p_work = 1.0 / (1.0 + r * nu);
    let false_alarm = integrate_to_infinity(|z| a * (-a * z).exp(), tau, 0.5 * QUADRATURE_TOL)?;
    let missed = recovering_cdf(lambda, nu, r, tau)?;
    Ok(p_work * false_alarm + p_fail * missed)
}

/// Grid point with the smallest [`quadrature_error_rate`]; ties go to the
/// earliest point.
pub fn scan_optimal_threshold(lambda: f64, nu: f64, r: f64, grid: &[f64]) -> Result<f64> {
    let mut best: Option<(f64, f64)> = None;
    for &tau in grid {
        let e = quadrature_error_rate(lambda, nu, r, tau)?;
        if best.is_none_or(|(_, be)| e < be) {
            best = Some((tau, e));
        }
    }
    best.map(|(tau, _)| tau)
        .ok_or_else(|| Error::param("grid", "must not be empty"))
}

/// `start, start + step, ...` up to `stop` inclusive (with a small slack for
/// accumulated rounding).
pub fn linear_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=count).map(|i| start + step * i as f64).collect()
}

/// Minimiser of a unimodal `f` on `[lo, hi]` by golden-section search.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Root of `f` on `[lo, hi]` by bisection; `f(lo)` and `f(hi)` must differ
/// in sign.
pub fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    if flo.signum() == f(hi).signum() {
        return Err(Error::param("bracket", "no sign change"));
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bootstrap whose resampling stream is tied to, but distinct from, the
/// simulation seed.
pub fn bootstrap_for(master_seed: u64, resamples: usize) -> Bootstrap {
    Bootstrap::new(resamples, master_seed ^ 0xB007_57A9)
}

/// Simulation versus closed forms for one configuration.
#[derive(Debug, Clone, Serialize)]
pub struct CrossCheckReport {
    pub params: SimParams<f64>,
    pub tau: f64,
    pub analytic: AnalyticReport<f64>,
    /// Error of the rule actually used, by quadrature.
    pub analytic_error_at_tau: f64,
    pub empirical: MetricsSummary,
    /// `(empirical - analytic) / analytic`.
    pub aoi_relative_deviation: f64,
    pub error_relative_deviation: f64,
    pub distributions: DistributionChecks,
}

/// Simulates `params` and compares age and detection error against the
/// closed forms, with bootstrap half-widths over periods.
pub fn monte_carlo_cross_check(
    params: &SimParams<f64>,
    rule: &DecisionRule<f64>,
) -> Result<CrossCheckReport> {
    params.validate_for_analysis()?;
    if params.periods < MIN_CROSS_CHECK_PERIODS {
        return Err(Error::param(
            "periods",
            format!("cross-check needs at least {MIN_CROSS_CHECK_PERIODS}"),
        ));
    }
    let analytic = AnalyticReport::evaluate(params)?;
    let analytic_error_at_tau = if rule.degenerate {
        analytic.prior_s1
    } else {
        quadrature_error_rate(params.lambda, params.nu, params.r, rule.tau)?
    };
    let timeline = simulate(params)?;
    let bootstrap = bootstrap_for(params.master_seed, BOOTSTRAP_RESAMPLES);
    let empirical = summarize(&timeline, rule, ErrorScope::default(), Some(bootstrap))?;
    let distributions = distribution_checks(&timeline, params);
    Ok(CrossCheckReport {
        params: *params,
        tau: rule.tau,
        aoi_relative_deviation: (empirical.aoi - analytic.mean_aoi) / analytic.mean_aoi,
        error_relative_deviation: (empirical.error_rate - analytic_error_at_tau)
            / analytic_error_at_tau,
        analytic,
        analytic_error_at_tau,
        empirical,
        distributions,
    })
}

/// Deliveries skipped at the start of each period before sampling an
/// inter-arrival gap. Each period restarts from an empty queue, so the
/// first departures are not yet Poisson.
pub const STEADY_STATE_WARMUP: usize = 20;

/// One steady-state inter-arrival gap per period: the gap after delivery
/// number `warmup`, from periods that delivered at least `warmup + 2`
/// packets. Gaps from distinct periods are independent.
pub fn steady_state_gaps(timeline: &Timeline<f64>, warmup: usize) -> Vec<f64> {
    timeline
        .periods()
        .iter()
        .filter_map(|p| p.arrivals.get(warmup..warmup + 2).map(|w| w[1] - w[0]))
        .collect()
}

/// KS tests of the simulated time-to-failure against `Exp(nu)` and of
/// steady-state inter-arrival gaps against `Exp(lambda)`.
#[derive(Debug, Clone, Serialize)]
pub struct DistributionChecks {
    pub time_to_failure: KsTest,
    pub steady_interarrival: KsTest,
}

pub fn distribution_checks(
    timeline: &Timeline<f64>,
    params: &SimParams<f64>,
) -> DistributionChecks {
    let ttf: Vec<f64> = timeline
        .periods()
        .iter()
        .map(|p| p.time_to_failure())
        .collect();
    DistributionChecks {
        time_to_failure: ks_exponential(&ttf, params.nu),
        steady_interarrival: ks_exponential(
            &steady_state_gaps(timeline, STEADY_STATE_WARMUP),
            params.lambda,
        ),
    }
}

/// One cell of the closed-form versus quadrature comparison.
#[derive(Debug, Clone, Serialize)]
pub struct AgreementRow {
    pub lambda: f64,
    pub nu: f64,
    pub r: f64,
    pub closed_form: f64,
    pub quadrature: f64,
    pub abs_diff: f64,
}

/// Closed-form error against quadrature on the fixed agreement grid,
/// restricted to non-degenerate cells.
pub fn formula_agreement() -> Result<Vec<AgreementRow>> {
    let mut rows = Vec::new();
    for &lambda in &AGREEMENT_LAMBDAS {
        for &nu in &AGREEMENT_NUS {
            for &r in &AGREEMENT_RECOVERIES {
                let closed = error_rate_closed_form(lambda, nu, r)?;
                if closed.degenerate {
                    continue;
                }
                let tau = crate::detector::map_threshold(lambda, nu)?;
                let quad = quadrature_error_rate(lambda, nu, r, tau)?;
                rows.push(AgreementRow {
                    lambda,
                    nu,
                    r,
                    closed_form: closed.error_rate,
                    quadrature: quad,
                    abs_diff: (closed.error_rate - quad).abs(),
                });
            }
        }
    }
    Ok(rows)
}

/// Everything the `validate` command reports.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub agreement: Vec<AgreementRow>,
    pub max_abs_diff: f64,
    pub scanned_threshold: f64,
    pub map_threshold: f64,
    pub cross_check: CrossCheckReport,
}

pub fn validation_report(params: &SimParams<f64>) -> Result<ValidationReport> {
    let agreement = formula_agreement()?;
    let max_abs_diff = agreement.iter().map(|r| r.abs_diff).fold(0.0, f64::max);
    let rule = DecisionRule::map(params.lambda, params.nu, params.r)?;
    let grid = linear_grid(0.0, 2.0 * params.r, 0.02);
    let scanned_threshold = scan_optimal_threshold(params.lambda, params.nu, params.r, &grid)?;
    let cross_check = monte_carlo_cross_check(params, &rule)?;
    Ok(ValidationReport {
        agreement,
        max_abs_diff,
        scanned_threshold,
        map_threshold: rule.tau,
        cross_check,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_thresholds() {
        let (l, n, r) = (0.5, 0.005, 20.0);
        let always_alarm = quadrature_error_rate(l, n, r, 0.0).unwrap();
        assert!((always_alarm - 1.0 / (1.0 + r * n)).abs() < 1e-10);
        let never_alarm = quadrature_error_rate(l, n, r, 1e4).unwrap();
        assert!((never_alarm - r * n / (1.0 + r * n)).abs() < 1e-10);
    }

    #[test]
    fn matches_closed_form_at_defaults() {
        let tau = crate::detector::map_threshold(0.5, 0.005).unwrap();
        let q = quadrature_error_rate(0.5, 0.005, 20.0, tau).unwrap();
        // mpmath: 0.0416289182113795776873268404703
        assert!((q - 0.041_628_918_211_379_58).abs() < 1e-9);
    }

    #[test]
    fn threshold_is_a_local_minimum() {
        let tau = crate::detector::map_threshold(0.5, 0.005).unwrap();
        let at = quadrature_error_rate(0.5, 0.005, 20.0, tau).unwrap();
        for d in [-2.0, 2.0] {
            assert!(at <= quadrature_error_rate(0.5, 0.005, 20.0, tau + d).unwrap());
        }
        assert_eq!(
            scan_optimal_threshold(0.5, 0.005, 20.0, &[tau]).unwrap(),
            tau
        );
        assert!(scan_optimal_threshold(0.5, 0.005, 20.0, &[]).is_err());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(quadrature_error_rate(0.0, 0.005, 20.0, 1.0).is_err());
        assert!(quadrature_error_rate(0.5, 0.005, 20.0, -1.0).is_err());
    }

    #[test]
    fn grid_includes_endpoint() {
        let g = linear_grid(0.0, 40.0, 0.02);
        assert_eq!(g.len(), 2001);
        assert!((g[2000] - 40.0).abs() < 1e-9);
        assert_eq!(linear_grid(0.05, 0.95, 0.05).len(), 19);
    }

    #[test]
    fn helpers() {
        let x = golden_section_min(|x| (x - 1.25) * (x - 1.25), 0.0, 3.0, 1e-9);
        assert!((x - 1.25).abs() < 1e-8);
        let root = bisect_root(|x| x * x - 2.0, 0.0, 2.0, 1e-12).unwrap();
        assert!((root - 2f64.sqrt()).abs() < 1e-11);
        assert!(bisect_root(|x| x * x + 1.0, 0.0, 2.0, 1e-12).is_err());
    }

    #[test]
    fn small_runs_are_refused() {
        let params = SimParams::default().with_periods(100);
        let rule = DecisionRule::map(0.5, 0.005, 20.0).unwrap();
        assert!(monte_carlo_cross_check(&params, &rule).is_err());
    }
}
