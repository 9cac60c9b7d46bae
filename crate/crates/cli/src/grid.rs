use std::fmt;
use std::str::FromStr;

use anyhow::{bail, Context};
use sensor_aoi::oracle::linear_grid;
use serde::{Deserialize, Serialize};

/// Inclusive arithmetic grid written `start:stop:step`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Grid {
    pub fn new(start: f64, stop: f64, step: f64) -> anyhow::Result<Self> {
        if !(start.is_finite() && stop.is_finite() && step.is_finite()) {
            bail!("grid bounds must be finite");
        }
        if start >= stop {
            bail!("grid start ({start}) must be below stop ({stop})");
        }
        if step <= 0.0 {
            bail!("grid step must be > 0, got {step}");
        }
        Ok(Grid { start, stop, step })
    }

    pub fn values(&self) -> Vec<f64> {
        linear_grid(self.start, self.stop, self.step)
    }
}

impl FromStr for Grid {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> anyhow::Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts[..] else {
            bail!("expected start:stop:step, got {s:?}");
        };
        let num = |p: &str| -> anyhow::Result<f64> {
            p.trim()
                .parse()
                .with_context(|| format!("bad grid number {p:?}"))
        };
        Grid::new(num(start)?, num(stop)?, num(step)?)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.step)
    }
}
