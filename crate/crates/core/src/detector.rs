//! MAP estimate of the sensor's failure status from update timings.
//!
//! The monitor only sees arrival times. Its statistic is the time since the
//! last arrival, `z(t)`, and the optimal rule declares a failure once `z(t)`
//! exceeds `tau = ln(lambda/nu + 2) / (lambda + nu)`, unless `tau >= r`, in
//! which case it always declares the sensor working.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::positive_rate;
use crate::scalar::{Real, Scalar};
use crate::timeline::{PeriodTrace, SensorState, Timeline};

/// MAP threshold `ln(lambda/nu + 2) / (lambda + nu)`.
pub fn map_threshold<F: Real>(lambda: F, nu: F) -> Result<F> {
    positive_rate("lambda", lambda)?;
    positive_rate("nu", nu)?;
    Ok((lambda / nu + F::lit(2.0)).ln() / (lambda + nu))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionRule<T> {
    pub tau: T,
    /// The rule never declares a failure.
    pub degenerate: bool,
}

impl<T: Scalar> DecisionRule<T> {
    /// Threshold rule with the degenerate case resolved against `r`.
    pub fn new(tau: T, r: &T) -> Result<Self> {
        if tau < T::zero() {
            return Err(Error::param("tau", "must be >= 0"));
        }
        let degenerate = tau >= *r;
        Ok(DecisionRule { tau, degenerate })
    }

    /// Plain `z > tau` rule without the degenerate fallback, for threshold
    /// sweeps.
    pub fn threshold(tau: T) -> Result<Self> {
        if tau < T::zero() {
            return Err(Error::param("tau", "must be >= 0"));
        }
        Ok(DecisionRule {
            tau,
            degenerate: false,
        })
    }
}

impl<F: Real> DecisionRule<F> {
    /// The MAP rule for the given model parameters.
    pub fn map(lambda: F, nu: F, r: F) -> Result<Self> {
        DecisionRule::new(map_threshold(lambda, nu)?, &r)
    }
}

/// Estimated state given the time `z` since the last update.
pub fn decide<T: Scalar>(z: &T, rule: &DecisionRule<T>) -> Result<SensorState> {
    if *z < T::zero() {
        return Err(Error::param("z", "elapsed time must be >= 0"));
    }
    Ok(if rule.degenerate || *z <= rule.tau {
        SensorState::Working
    } else {
        SensorState::Failed
    })
}

/// Constant-state stretch `[start, end)` of the estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct StateInterval<T> {
    pub start: T,
    pub end: T,
    pub state: SensorState,
}

/// Piecewise-constant estimate `ŝ(t)` from the first arrival to the end of
/// the timeline.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTrajectory<T> {
    pub intervals: Vec<StateInterval<T>>,
}

impl<T: Scalar> StateTrajectory<T> {
    pub fn state_at(&self, t: &T) -> Option<SensorState> {
        let i = self.intervals.partition_point(|iv| iv.end <= *t);
        self.intervals
            .get(i)
            .filter(|iv| iv.start <= *t)
            .map(|iv| iv.state)
    }
}

/// Time since the last arrival at or before `t`; `None` before the first.
pub fn elapsed_since_update<T: Scalar>(timeline: &Timeline<T>, t: &T) -> Option<T> {
    // Arrivals are globally increasing, so scan periods back to front.
    let periods = timeline.periods();
    let upto = periods.partition_point(|p| p.start_time <= *t);
    periods[..upto].iter().rev().find_map(|p| {
        let k = p.arrivals.partition_point(|a| a <= t);
        (k > 0).then(|| t.clone() - p.arrivals[k - 1].clone())
    })
}

/// Sorted, disjoint `(start, end)` stretches where the estimate is `Failed`,
/// plus the measurement span.
pub(crate) struct Alarms<T> {
    pub intervals: Vec<(T, T)>,
    pub start: T,
    pub end: T,
}

impl<T: Scalar> Alarms<T> {
    pub fn build(timeline: &Timeline<T>, rule: &DecisionRule<T>) -> Result<Self> {
        let start = timeline
            .first_arrival()
            .ok_or(Error::EmptyEstimate)?
            .clone();
        let end = timeline.end_time().clone();
        let mut intervals = Vec::new();
        if !rule.degenerate {
            let mut arrivals = timeline.all_arrivals().map(|(_, a)| a).peekable();
            while let Some(a) = arrivals.next() {
                let next = arrivals.peek().copied().unwrap_or(&end);
                let alarm = a.clone() + rule.tau.clone();
                if *next > alarm {
                    intervals.push((alarm, next.clone()));
                }
            }
        }
        Ok(Alarms {
            intervals,
            start,
            end,
        })
    }

    /// Length of alarm time inside `[from, to]`.
    pub fn measure_within(&self, from: &T, to: &T) -> T {
        let mut total = T::zero();
        let first = self.intervals.partition_point(|(_, e)| e <= from);
        for (s, e) in &self.intervals[first..] {
            if s >= to {
                break;
            }
            let lo = s.clone().max_of(from.clone());
            let hi = e.clone().min_of(to.clone());
            if hi > lo {
                total = total + (hi - lo);
            }
        }
        total
    }
}

/// The estimate `ŝ(t)` as an ordered interval list. It switches to `Failed`
/// at `a_k + tau` when no update arrives by then and back at the next
/// arrival.
pub fn estimated_state_trajectory<T: Scalar>(
    timeline: &Timeline<T>,
    rule: &DecisionRule<T>,
) -> Result<StateTrajectory<T>> {
    let alarms = Alarms::build(timeline, rule)?;
    let mut intervals = Vec::with_capacity(2 * alarms.intervals.len() + 1);
    let mut cursor = alarms.start.clone();
    for (s, e) in &alarms.intervals {
        if *s > cursor {
            intervals.push(StateInterval {
                start: cursor.clone(),
                end: s.clone(),
                state: SensorState::Working,
            });
        }
        intervals.push(StateInterval {
            start: s.clone(),
            end: e.clone(),
            state: SensorState::Failed,
        });
        cursor = e.clone();
    }
    if alarms.end > cursor {
        intervals.push(StateInterval {
            start: cursor,
            end: alarms.end.clone(),
            state: SensorState::Working,
        });
    }
    Ok(StateTrajectory { intervals })
}

/// Time the estimate disagrees with the true state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorBreakdown<T> {
    pub error_rate: T,
    /// Declared failed while working.
    pub false_positive_time: T,
    /// Declared working while failed.
    pub false_negative_time: T,
    pub measured_time: T,
}

/// Which stretches of the measured span are scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ErrorScope {
    /// Everything from the first arrival to the end of the timeline.
    FullSpan,
    /// As `FullSpan` but without region R1 of each period (first
    /// generation after recovery until its arrival). The detector's
    /// closed-form error is derived over R2 and R3 only; in R1 the monitor
    /// still sees the silence of the preceding recovery and alarms.
    #[default]
    ExcludeR1,
}

/// Mismatch between `ŝ(t)` and the true state, integrated exactly over the
/// first arrival to the end of the timeline.
pub fn empirical_error_rate<T: Scalar>(
    timeline: &Timeline<T>,
    rule: &DecisionRule<T>,
) -> Result<ErrorBreakdown<T>> {
    empirical_error_rate_in(timeline, rule, ErrorScope::FullSpan)
}

/// [`empirical_error_rate`] restricted to `scope`.
pub fn empirical_error_rate_in<T: Scalar>(
    timeline: &Timeline<T>,
    rule: &DecisionRule<T>,
    scope: ErrorScope,
) -> Result<ErrorBreakdown<T>> {
    let alarms = Alarms::build(timeline, rule)?;
    let mut total = PeriodMismatch::zero();
    for p in timeline.periods() {
        total.accumulate(&period_mismatch(&alarms, p));
    }
    total.breakdown(scope)
}

/// Scored time of one period, with R1 kept separate.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodMismatch<T> {
    pub measured: T,
    pub false_positive: T,
    pub false_negative: T,
    pub r1_time: T,
    pub r1_false_positive: T,
}

impl<T: Scalar> PeriodMismatch<T> {
    pub fn zero() -> Self {
        PeriodMismatch {
            measured: T::zero(),
            false_positive: T::zero(),
            false_negative: T::zero(),
            r1_time: T::zero(),
            r1_false_positive: T::zero(),
        }
    }

    pub fn accumulate(&mut self, other: &Self) {
        self.measured = self.measured.clone() + other.measured.clone();
        self.false_positive = self.false_positive.clone() + other.false_positive.clone();
        self.false_negative = self.false_negative.clone() + other.false_negative.clone();
        self.r1_time = self.r1_time.clone() + other.r1_time.clone();
        self.r1_false_positive = self.r1_false_positive.clone() + other.r1_false_positive.clone();
    }

    /// `(measured, false positive, false negative)` within `scope`.
    pub fn scoped(&self, scope: ErrorScope) -> (T, T, T) {
        match scope {
            ErrorScope::FullSpan => (
                self.measured.clone(),
                self.false_positive.clone(),
                self.false_negative.clone(),
            ),
            ErrorScope::ExcludeR1 => (
                self.measured.clone() - self.r1_time.clone(),
                self.false_positive.clone() - self.r1_false_positive.clone(),
                self.false_negative.clone(),
            ),
        }
    }

    pub fn breakdown(&self, scope: ErrorScope) -> Result<ErrorBreakdown<T>> {
        let (measured, fp, fn_) = self.scoped(scope);
        if measured <= T::zero() {
            return Err(Error::ZeroSpan);
        }
        Ok(ErrorBreakdown {
            error_rate: (fp.clone() + fn_.clone()) / measured.clone(),
            false_positive_time: fp,
            false_negative_time: fn_,
            measured_time: measured,
        })
    }
}

pub(crate) fn period_mismatch<T: Scalar>(
    alarms: &Alarms<T>,
    period: &PeriodTrace<T>,
) -> PeriodMismatch<T> {
    let clip = |t: &T| t.clone().max_of(alarms.start.clone());
    let lo = clip(&period.start_time);
    let r1_end = clip(period.r1_end());
    let fail = clip(&period.failure_time);
    let hi = clip(&period.recovery_end);
    let r1_false_positive = alarms.measure_within(&lo, &r1_end);
    let false_positive = r1_false_positive.clone() + alarms.measure_within(&r1_end, &fail);
    let false_negative = (hi.clone() - fail.clone()) - alarms.measure_within(&fail, &hi);
    PeriodMismatch {
        measured: hi - lo.clone(),
        false_positive,
        false_negative,
        r1_time: r1_end - lo,
        r1_false_positive,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn timeline(arrivals: &[f64], fail: f64, end: f64) -> Timeline<f64> {
        Timeline::new(vec![PeriodTrace {
            start_time: 0.0,
            failure_time: fail,
            recovery_end: end,
            generations: arrivals.iter().map(|a| a * 0.5).collect(),
            arrivals: arrivals.to_vec(),
            discarded_count: 0,
        }])
        .unwrap()
    }

    #[test]
    fn threshold_values() {
        let tau: f64 = map_threshold(0.5, 0.005).unwrap();
        assert!((tau - 9.16).abs() < 0.005);
        let e = std::f64::consts::E;
        let tau: f64 = map_threshold(e - 2.0, 1.0).unwrap();
        assert!((tau - 1.0 / (e - 1.0)).abs() < 1e-12);
        let scaled: f64 = map_threshold(0.5 * 3.0, 0.005 * 3.0).unwrap();
        assert!((scaled - map_threshold(0.5, 0.005).unwrap() / 3.0).abs() < 1e-12);
        assert!(map_threshold(0.0, 0.1).is_err());
        assert!(map_threshold(0.1, -1.0).is_err());
    }

    #[test]
    fn decisions() {
        let rule = DecisionRule::new(9.16, &20.0).unwrap();
        assert!(!rule.degenerate);
        assert_eq!(decide(&0.0, &rule).unwrap(), SensorState::Working);
        assert_eq!(decide(&9.16, &rule).unwrap(), SensorState::Working);
        assert_eq!(decide(&9.161, &rule).unwrap(), SensorState::Failed);
        assert!(decide(&-1.0, &rule).is_err());

        let rule = DecisionRule::new(9.16, &5.0).unwrap();
        assert!(rule.degenerate);
        for z in [0.0, 9.0, 1e6] {
            assert_eq!(decide(&z, &rule).unwrap(), SensorState::Working);
        }
        assert!(DecisionRule::map(0.5, 0.005, 9.0).unwrap().degenerate);
    }

    #[test]
    fn short_gap_never_alarms() {
        let tau = 4.0;
        let tl = timeline(&[0.0, 0.5 * tau], 10.0, 10.0);
        let rule = DecisionRule::threshold(tau).unwrap();
        let est = estimated_state_trajectory(&tl, &rule).unwrap();
        assert_eq!(est.state_at(&1.9), Some(SensorState::Working));
        assert_eq!(est.state_at(&(0.5 * tau)), Some(SensorState::Working));
    }

    #[test]
    fn long_gap_alarms_between_threshold_and_next_arrival() {
        let tau = 4.0;
        let tl = timeline(&[0.0, 2.0 * tau], 20.0, 20.0);
        let rule = DecisionRule::threshold(tau).unwrap();
        let est = estimated_state_trajectory(&tl, &rule).unwrap();
        let failed: Vec<_> = est
            .intervals
            .iter()
            .filter(|iv| iv.state == SensorState::Failed)
            .map(|iv| (iv.start, iv.end))
            .collect();
        // Second stretch: the last arrival at 8 is followed by nothing until 20.
        assert_eq!(failed, vec![(tau, 2.0 * tau), (12.0, 20.0)]);
    }

    #[test]
    fn degenerate_rule_is_always_working() {
        let tl = timeline(&[0.0, 50.0], 60.0, 80.0);
        let rule = DecisionRule::new(9.16, &5.0).unwrap();
        let est = estimated_state_trajectory(&tl, &rule).unwrap();
        assert_eq!(est.intervals.len(), 1);
        assert_eq!(est.intervals[0].state, SensorState::Working);
        let err = empirical_error_rate(&tl, &rule).unwrap();
        assert_eq!(err.false_negative_time, 20.0);
        assert_eq!(err.error_rate, 20.0 / 80.0);
    }

    #[test]
    fn missed_failure_after_last_arrival() {
        // Last arrival at 3.4, failure at 5, recovery ends at 25.
        let tl = timeline(&[2.0, 2.4, 3.4], 5.0, 25.0);
        let rule = DecisionRule::new(9.16, &20.0).unwrap();
        let err = empirical_error_rate(&tl, &rule).unwrap();
        assert!((err.false_negative_time - 7.56).abs() < 1e-12);
        assert_eq!(err.false_positive_time, 0.0);
        assert_eq!(err.measured_time, 23.0);
    }

    #[test]
    fn false_positive_from_long_working_gap() {
        let tl = timeline(&[0.0, 15.0], 16.0, 16.0);
        let rule = DecisionRule::threshold(9.16).unwrap();
        let err = empirical_error_rate(&tl, &rule).unwrap();
        assert!((err.false_positive_time - (15.0 - 9.16)).abs() < 1e-12);
        assert_eq!(err.false_negative_time, 0.0);
    }

    #[test]
    fn r1_alarm_is_excluded_by_scope() {
        // Recovery ends at 25; the next period's first packet arrives at 26.
        let periods = vec![
            PeriodTrace {
                start_time: 0.0,
                failure_time: 5.0,
                recovery_end: 25.0,
                generations: vec![0.0, 1.0, 2.0],
                arrivals: vec![2.0, 2.4, 3.4],
                discarded_count: 0,
            },
            PeriodTrace {
                start_time: 25.0,
                failure_time: 30.0,
                recovery_end: 32.0,
                generations: vec![25.0],
                arrivals: vec![26.0],
                discarded_count: 0,
            },
        ];
        let tl = Timeline::new(periods).unwrap();
        let rule = DecisionRule::new(4.0f64, &20.0).unwrap();
        let full = empirical_error_rate(&tl, &rule).unwrap();
        let scoped = empirical_error_rate_in(&tl, &rule, ErrorScope::ExcludeR1).unwrap();
        // Alarm from 7.4 to 26: R3 part [7.4, 25) is correct, R1 part [25, 26) is a false alarm.
        assert!((full.false_positive_time - 1.0).abs() < 1e-12);
        assert_eq!(scoped.false_positive_time, 0.0);
        assert_eq!(full.measured_time - scoped.measured_time, 1.0);
        assert_eq!(full.false_negative_time, scoped.false_negative_time);
    }

    #[test]
    fn elapsed_time_statistic() {
        let tl = timeline(&[2.0, 2.4, 3.4], 5.0, 25.0);
        assert_eq!(elapsed_since_update(&tl, &1.0), None);
        assert_eq!(elapsed_since_update(&tl, &2.0), Some(0.0));
        assert!((elapsed_since_update(&tl, &10.0).unwrap() - 6.6).abs() < 1e-12);
    }

    #[test]
    fn empty_timeline_has_no_estimate() {
        let tl = timeline(&[], 5.0, 7.0);
        let rule = DecisionRule::threshold(1.0).unwrap();
        assert_eq!(
            estimated_state_trajectory(&tl, &rule).unwrap_err(),
            Error::EmptyEstimate
        );
    }
}
