//! Event traces on an absolute clock.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Failure status of the sensor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SensorState {
    /// Operational (`s0`).
    Working,
    /// Failed and recovering (`s1`).
    Failed,
}

/// One failure-to-failure cycle: the first post-recovery generation up to
/// the end of the following recovery.
///
/// Delivered packets always form a prefix of `generations`, so arrivals are
/// stored alongside and paired on access.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodTrace<T> {
    pub start_time: T,
    pub failure_time: T,
    pub recovery_end: T,
    /// Generation (departure from the sensor) times, starting at `start_time`.
    pub generations: Vec<T>,
    /// Arrival times at the monitor of the delivered prefix of `generations`.
    pub arrivals: Vec<T>,
    pub discarded_count: usize,
}

impl<T: Scalar> PeriodTrace<T> {
    /// `(generation, arrival)` pairs of delivered packets in arrival order.
    pub fn deliveries(&self) -> impl ExactSizeIterator<Item = (&T, &T)> + '_ {
        self.generations.iter().zip(self.arrivals.iter())
    }

    pub fn delivered_count(&self) -> usize {
        self.arrivals.len()
    }

    pub fn first_arrival(&self) -> Option<&T> {
        self.arrivals.first()
    }

    pub fn duration(&self) -> T {
        self.recovery_end.clone() - self.start_time.clone()
    }

    pub fn time_to_failure(&self) -> T {
        self.failure_time.clone() - self.start_time.clone()
    }

    /// End of region R1: the first arrival, or the failure if nothing was
    /// delivered.
    pub fn r1_end(&self) -> &T {
        self.first_arrival().unwrap_or(&self.failure_time)
    }

    /// The same period translated by `offset`.
    pub fn shifted(&self, offset: &T) -> Self {
        let add = |x: &T| x.clone() + offset.clone();
        PeriodTrace {
            start_time: add(&self.start_time),
            failure_time: add(&self.failure_time),
            recovery_end: add(&self.recovery_end),
            generations: self.generations.iter().map(add).collect(),
            arrivals: self.arrivals.iter().map(add).collect(),
            discarded_count: self.discarded_count,
        }
    }
}

/// Concatenated periods with abutting boundaries.
#[derive(Debug, Clone, PartialEq)]
pub struct Timeline<T> {
    periods: Vec<PeriodTrace<T>>,
    /// Set when the queue was simulated with `rho >= 1`.
    pub unstable_queue: bool,
}

impl<T: Scalar> Timeline<T> {
    /// Builds a timeline, checking that every period starts where the
    /// previous recovery ended.
    pub fn new(periods: Vec<PeriodTrace<T>>) -> Result<Self> {
        if periods.is_empty() {
            return Err(Error::param(
                "periods",
                "timeline needs at least one period",
            ));
        }
        for pair in periods.windows(2) {
            if pair[1].start_time != pair[0].recovery_end {
                return Err(Error::param(
                    "periods",
                    "each period must start at the previous recovery end",
                ));
            }
        }
        Ok(Timeline {
            periods,
            unstable_queue: false,
        })
    }

    pub fn periods(&self) -> &[PeriodTrace<T>] {
        &self.periods
    }

    pub fn start_time(&self) -> &T {
        &self.periods[0].start_time
    }

    pub fn end_time(&self) -> &T {
        &self.periods[self.periods.len() - 1].recovery_end
    }

    pub fn total_time(&self) -> T {
        self.end_time().clone() - self.start_time().clone()
    }

    /// All `(generation, arrival)` pairs in arrival order.
    pub fn all_arrivals(&self) -> impl Iterator<Item = (&T, &T)> + '_ {
        self.periods.iter().flat_map(PeriodTrace::deliveries)
    }

    pub fn delivery_count(&self) -> usize {
        self.periods.iter().map(PeriodTrace::delivered_count).sum()
    }

    pub fn first_arrival(&self) -> Option<&T> {
        self.periods.iter().find_map(PeriodTrace::first_arrival)
    }

    /// Half-open `[failure, recovery_end)` intervals during which the sensor
    /// is down.
    pub fn failure_intervals(&self) -> impl Iterator<Item = (&T, &T)> + '_ {
        self.periods
            .iter()
            .map(|p| (&p.failure_time, &p.recovery_end))
    }

    /// True sensor state at `t`. Times outside the timeline count as working.
    pub fn true_state(&self, t: &T) -> SensorState {
        let idx = self.periods.partition_point(|p| p.recovery_end <= *t);
        match self.periods.get(idx) {
            Some(p) if p.failure_time <= *t && *t >= p.start_time => SensorState::Failed,
            _ => SensorState::Working,
        }
    }

    /// Translates every event by `offset`.
    pub fn shifted(&self, offset: &T) -> Self {
        Timeline {
            periods: self.periods.iter().map(|p| p.shifted(offset)).collect(),
            unstable_queue: self.unstable_queue,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn period(start: f64, fail: f64, end: f64, gens: &[f64], arr: &[f64]) -> PeriodTrace<f64> {
        PeriodTrace {
            start_time: start,
            failure_time: fail,
            recovery_end: end,
            generations: gens.to_vec(),
            arrivals: arr.to_vec(),
            discarded_count: gens.len() - arr.len(),
        }
    }

    #[test]
    fn rejects_gaps_between_periods() {
        let a = period(0.0, 5.0, 7.0, &[0.0], &[1.0]);
        let b = period(7.5, 9.0, 11.0, &[7.5], &[]);
        assert!(Timeline::new(vec![a, b]).is_err());
        assert!(Timeline::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn true_state_is_failed_on_half_open_recovery() {
        let a = period(0.0, 5.0, 7.0, &[0.0, 1.0], &[2.0]);
        let b = period(7.0, 9.0, 11.0, &[7.0], &[]);
        let tl = Timeline::new(vec![a, b]).unwrap();
        assert_eq!(tl.true_state(&4.9), SensorState::Working);
        assert_eq!(tl.true_state(&5.0), SensorState::Failed);
        assert_eq!(tl.true_state(&6.99), SensorState::Failed);
        assert_eq!(tl.true_state(&7.0), SensorState::Working);
        assert_eq!(tl.true_state(&10.0), SensorState::Failed);
        assert_eq!(tl.true_state(&11.0), SensorState::Working);
        assert_eq!(tl.total_time(), 11.0);
        assert_eq!(tl.first_arrival(), Some(&2.0));
        assert_eq!(tl.delivery_count(), 1);
        assert_eq!(tl.periods()[1].r1_end(), &9.0);
    }
}
