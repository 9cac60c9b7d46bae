use std::fmt;

use anyhow::{bail, Context};
use serde::{Deserialize, Serialize};

use sensor_aoi::detector::ErrorScope;
use sensor_aoi::oracle::{bootstrap_for, quadrature_error_rate};
use sensor_aoi::sim::simulate;
use sensor_aoi::summary::{summarize, MetricsSummary};
use sensor_aoi::{AnalyticReport, DecisionRule, SimParams};

use crate::grid::Grid;

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVar {
    /// Utilisation `lambda / mu`, with `mu` held fixed.
    #[serde(rename = "rho")]
    Rho,
    /// Mean time to failure, applied as `nu = 1 / E[T]`.
    #[serde(rename = "expected_T")]
    ExpectedT,
    /// Detector threshold in seconds, replacing the MAP threshold.
    #[serde(rename = "threshold")]
    Threshold,
}

impl SweepVar {
    pub fn name(self) -> &'static str {
        match self {
            SweepVar::Rho => "rho",
            SweepVar::ExpectedT => "expected_T",
            SweepVar::Threshold => "threshold",
        }
    }

    pub fn default_grid(self) -> Grid {
        let (start, stop, step) = match self {
            SweepVar::Rho => (0.05, 0.95, 0.05),
            SweepVar::ExpectedT => (20.0, 400.0, 20.0),
            SweepVar::Threshold => (1.0, 20.0, 1.0),
        };
        Grid { start, stop, step }
    }
}

impl fmt::Display for SweepVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A sweep is fully determined by this record, which is written next to
/// every CSV so its rows can be regenerated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVar,
    pub grid: Grid,
    /// Parameters not overridden by the swept variable.
    pub fixed: SimParams,
    pub simulate: bool,
    pub error_scope: ErrorScope,
    /// Bootstrap resamples for the CI columns; 0 leaves them empty.
    pub bootstrap: usize,
}

impl SweepSpec {
    pub fn new(variable: SweepVar, grid: Grid, fixed: SimParams) -> Self {
        SweepSpec {
            variable,
            grid,
            fixed,
            simulate: true,
            error_scope: ErrorScope::default(),
            bootstrap: sensor_aoi::oracle::BOOTSTRAP_RESAMPLES,
        }
    }

    pub fn analytic_only(mut self) -> Self {
        self.simulate = false;
        self
    }

    pub fn with_bootstrap(mut self, resamples: usize) -> Self {
        self.bootstrap = resamples;
        self
    }

    pub fn with_scope(mut self, scope: ErrorScope) -> Self {
        self.error_scope = scope;
        self
    }

    /// Parameters at one grid value.
    pub fn params_at(&self, value: f64) -> SimParams {
        match self.variable {
            SweepVar::Rho => self.fixed.with_rates(value * self.fixed.mu, self.fixed.mu),
            SweepVar::ExpectedT => self.fixed.with_nu(1.0 / value),
            SweepVar::Threshold => self.fixed,
        }
    }

    pub fn validate(&self) -> anyhow::Result<()> {
        // Grids read back from a config record skip the parser's checks.
        let grid = Grid::new(self.grid.start, self.grid.stop, self.grid.step)?;
        for v in grid.values() {
            match self.variable {
                SweepVar::Rho if v <= 0.0 || v >= 1.0 => {
                    bail!("swept rho must lie in (0, 1), grid contains {v}")
                }
                SweepVar::ExpectedT if v <= 0.0 => {
                    bail!("swept expected_T must be > 0, grid contains {v}")
                }
                SweepVar::Threshold if v < 0.0 => {
                    bail!("swept threshold must be >= 0, grid contains {v}")
                }
                _ => {}
            }
            self.params_at(v)
                .validate_for_analysis()
                .with_context(|| format!("at {} = {v}", self.variable))?;
        }
        Ok(())
    }
}

/// One line of a sweep CSV. Empirical fields are `None` when the sweep did
/// not simulate, and the CI fields are `None` when no bootstrap ran.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub swept_var: SweepVar,
    pub swept_value: f64,
    pub aoi_analytic: f64,
    pub aoi_empirical: Option<f64>,
    pub aoi_ci: Option<f64>,
    pub err_analytic: f64,
    pub err_empirical: Option<f64>,
    pub err_ci: Option<f64>,
    pub fp_rate: Option<f64>,
    pub fn_rate: Option<f64>,
    pub seed: u64,
}

impl ResultRow {
    fn analytic(spec: &SweepSpec, value: f64, aoi: f64, err: f64) -> Self {
        ResultRow {
            swept_var: spec.variable,
            swept_value: value,
            aoi_analytic: aoi,
            aoi_empirical: None,
            aoi_ci: None,
            err_analytic: err,
            err_empirical: None,
            err_ci: None,
            fp_rate: None,
            fn_rate: None,
            seed: spec.fixed.master_seed,
        }
    }

    fn with_empirical(mut self, m: &MetricsSummary) -> Self {
        self.aoi_empirical = Some(m.aoi);
        self.aoi_ci = m.aoi_ci;
        self.err_empirical = Some(m.error_rate);
        self.err_ci = m.error_ci;
        self.fp_rate = Some(m.false_positive_rate);
        self.fn_rate = Some(m.false_negative_rate);
        self
    }
}

fn summary(
    spec: &SweepSpec,
    timeline: &sensor_aoi::Timeline,
    rule: &DecisionRule,
) -> anyhow::Result<MetricsSummary> {
    let bootstrap =
        (spec.bootstrap > 0).then(|| bootstrap_for(spec.fixed.master_seed, spec.bootstrap));
    Ok(summarize(timeline, rule, spec.error_scope, bootstrap)?)
}

/// Evaluates every grid point in grid order.
///
/// Points run one after another; each simulation is already parallel over
/// periods, and holding one timeline at a time bounds memory.
pub fn run_sweep(spec: &SweepSpec) -> anyhow::Result<Vec<ResultRow>> {
    spec.validate()?;
    let values = spec.grid.values();
    if spec.variable == SweepVar::Threshold {
        return threshold_sweep(spec, &values);
    }
    let mut rows = Vec::with_capacity(values.len());
    for v in values {
        let params = spec.params_at(v);
        let analytic = AnalyticReport::evaluate(&params)?;
        let row = ResultRow::analytic(spec, v, analytic.mean_aoi, analytic.error_rate);
        let row = if spec.simulate {
            let rule = DecisionRule::map(params.lambda, params.nu, params.r)?;
            let timeline = simulate(&params)?;
            row.with_empirical(&summary(spec, &timeline, &rule)?)
        } else {
            row
        };
        rows.push(row);
    }
    Ok(rows)
}

/// All thresholds are scored on one shared simulation.
fn threshold_sweep(spec: &SweepSpec, taus: &[f64]) -> anyhow::Result<Vec<ResultRow>> {
    let params = spec.fixed;
    let analytic = AnalyticReport::evaluate(&params)?;
    let timeline = if spec.simulate {
        Some(simulate(&params)?)
    } else {
        None
    };
    taus.iter()
        .map(|&tau| {
            let err = quadrature_error_rate(params.lambda, params.nu, params.r, tau)?;
            let row = ResultRow::analytic(spec, tau, analytic.mean_aoi, err);
            match &timeline {
                Some(tl) => {
                    let rule = DecisionRule::threshold(tau)?;
                    Ok(row.with_empirical(&summary(spec, tl, &rule)?))
                }
                None => Ok(row),
            }
        })
        .collect()
}

/// Grid point with the smallest value of `key`, ignoring missing values;
/// ties go to the earliest row.
pub fn argmin_by(
    rows: &[ResultRow],
    key: impl Fn(&ResultRow) -> Option<f64>,
) -> Option<&ResultRow> {
    rows.iter()
        .filter_map(|r| key(r).map(|k| (r, k)))
        .fold(None, |best: Option<(&ResultRow, f64)>, (r, k)| match best {
            Some((_, bk)) if bk <= k => best,
            _ => Some((r, k)),
        })
        .map(|(r, _)| r)
}
