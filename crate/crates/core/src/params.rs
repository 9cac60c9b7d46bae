use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Model parameters for one simulated configuration.
///
/// Rates are per second, durations in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimParams<F> {
    /// Update generation rate.
    pub lambda: F,
    /// Queue service rate.
    pub mu: F,
    /// Failure hazard rate; the mean time to failure is `1 / nu`.
    pub nu: F,
    /// Deterministic recovery duration.
    pub r: F,
    pub periods: u64,
    pub master_seed: u64,
    /// Resample a period until at least one update is delivered before the
    /// failure.
    #[serde(default)]
    pub enforce_assumption3: bool,
}

impl<F: Real> Default for SimParams<F> {
    /// `lambda = 1/2`, `mu = 1`, `nu = 1/200`, `r = 20`, `10^5` periods.
    fn default() -> Self {
        SimParams {
            lambda: F::lit(0.5),
            mu: F::one(),
            nu: F::lit(0.005),
            r: F::lit(20.0),
            periods: 100_000,
            master_seed: 0x05EE_DA01,
            enforce_assumption3: false,
        }
    }
}

impl<F: Real> SimParams<F> {
    pub fn rho(&self) -> F {
        self.lambda / self.mu
    }

    pub fn expected_time_to_failure(&self) -> F {
        self.nu.recip()
    }

    pub fn is_stable(&self) -> bool {
        self.rho() < F::one()
    }

    pub fn with_rates(mut self, lambda: F, mu: F) -> Self {
        self.lambda = lambda;
        self.mu = mu;
        self
    }

    pub fn with_nu(mut self, nu: F) -> Self {
        self.nu = nu;
        self
    }

    pub fn with_recovery(mut self, r: F) -> Self {
        self.r = r;
        self
    }

    pub fn with_periods(mut self, periods: u64) -> Self {
        self.periods = periods;
        self
    }

    pub fn with_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn with_assumption3(mut self, enforce: bool) -> Self {
        self.enforce_assumption3 = enforce;
        self
    }

    /// Checks the constraints needed to simulate. A saturated queue
    /// (`rho >= 1`) is allowed here and reported on the resulting timeline.
    pub fn validate(&self) -> Result<()> {
        positive_rate("lambda", self.lambda)?;
        positive_rate("mu", self.mu)?;
        positive_rate("nu", self.nu)?;
        if !self.r.is_finite() || self.r < F::zero() {
            return Err(Error::param(
                "r",
                format!("must be finite and >= 0, got {}", self.r),
            ));
        }
        if self.periods == 0 {
            return Err(Error::param("periods", "must be >= 1"));
        }
        Ok(())
    }

    /// As [`validate`](Self::validate), and additionally requires a stable
    /// queue, which the closed forms and the detector assume.
    pub fn validate_for_analysis(&self) -> Result<()> {
        self.validate()?;
        if !self.is_stable() {
            return Err(Error::param(
                "rho",
                format!("lambda/mu must be < 1, got {}", self.rho()),
            ));
        }
        Ok(())
    }
}

pub(crate) fn positive_rate<F: Real>(name: &'static str, value: F) -> Result<()> {
    if value > F::zero() && value.is_finite() {
        Ok(())
    } else {
        Err(Error::param(
            name,
            format!("must be finite and > 0, got {value}"),
        ))
    }
}
