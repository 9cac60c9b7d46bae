//! Period-by-period generation of sensor/queue/monitor traces.
//!
//! Each period draws from its own random stream: a ChaCha8 generator keyed
//! by `master_seed` (expanded with [`SeedableRng::seed_from_u64`]) with the
//! period index as its stream id. A period is therefore a pure function of
//! `(params, master_seed, index)` and serial and parallel runs agree bit for
//! bit. Periods are generated starting at time zero and translated onto the
//! absolute clock afterwards.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::params::SimParams;
use crate::scalar::{Real, Scalar};
use crate::timeline::{PeriodTrace, Timeline};

/// Maximum number of generated updates per period, across resampling
/// attempts.
pub const EVENT_LIMIT: u64 = 1_000_000_000;

/// Source of the three random quantities driving a period.
pub trait DrawSource<T> {
    /// Time from the start of the period to the failure.
    fn time_to_failure(&mut self) -> T;
    /// Gap to the next update generation; `None` stops generation.
    fn generation_gap(&mut self) -> Option<T>;
    fn service_time(&mut self) -> T;
}

/// Exponential draws from a random stream.
pub struct ExpDraws<'a, F, R> {
    lambda: F,
    mu: F,
    nu: F,
    rng: &'a mut R,
}

impl<'a, F: Real, R: Rng> ExpDraws<'a, F, R> {
    pub fn new(params: &SimParams<F>, rng: &'a mut R) -> Self {
        ExpDraws {
            lambda: params.lambda,
            mu: params.mu,
            nu: params.nu,
            rng,
        }
    }

    fn exp(&mut self, rate: F) -> F {
        let unit: f64 = self.rng.sample(Exp1);
        F::lit(unit) / rate
    }
}

impl<F: Real, R: Rng> DrawSource<F> for ExpDraws<'_, F, R> {
    fn time_to_failure(&mut self) -> F {
        self.exp(self.nu)
    }

    fn generation_gap(&mut self) -> Option<F> {
        Some(self.exp(self.lambda))
    }

    fn service_time(&mut self) -> F {
        self.exp(self.mu)
    }
}

/// Pre-recorded draws, consumed in order. Generation stops when `gaps` runs
/// out.
#[derive(Debug, Clone)]
pub struct FixedDraws<T> {
    failures: std::vec::IntoIter<T>,
    gaps: std::vec::IntoIter<T>,
    services: std::vec::IntoIter<T>,
}

impl<T> FixedDraws<T> {
    pub fn new(failures: Vec<T>, gaps: Vec<T>, services: Vec<T>) -> Self {
        FixedDraws {
            failures: failures.into_iter(),
            gaps: gaps.into_iter(),
            services: services.into_iter(),
        }
    }
}

impl<T: Scalar> DrawSource<T> for FixedDraws<T> {
    fn time_to_failure(&mut self) -> T {
        self.failures
            .next()
            .expect("fixed draws: out of failure times")
    }

    fn generation_gap(&mut self) -> Option<T> {
        self.gaps.next()
    }

    fn service_time(&mut self) -> T {
        self.services
            .next()
            .expect("fixed draws: out of service times")
    }
}

/// Builds one period from `draws`.
///
/// Updates are generated from `start` until the next one would fall after
/// the failure. Service runs FCFS; a packet is delivered iff its service
/// completes no later than the failure, so whatever is queued or in service
/// at the failure is discarded. With `require_delivery` the whole period is
/// redrawn until at least one packet gets through.
pub fn period_from_draws<T: Scalar, D: DrawSource<T>>(
    start: &T,
    recovery: &T,
    draws: &mut D,
    require_delivery: bool,
    event_limit: u64,
) -> Result<PeriodTrace<T>> {
    let mut events = 0u64;
    loop {
        let failure_time = start.clone() + draws.time_to_failure();
        let mut generations = vec![start.clone()];
        events += 1;
        while let Some(gap) = draws.generation_gap() {
            let next = generations[generations.len() - 1].clone() + gap;
            if next > failure_time {
                break;
            }
            events += 1;
            if events > event_limit {
                return Err(Error::EventLimit { limit: event_limit });
            }
            generations.push(next);
        }

        // a_k = max(d_k, a_{k-1}) + S_k, stopping at the first packet cut off
        // by the failure.
        let mut arrivals: Vec<T> = Vec::new();
        for d in &generations {
            let begin = match arrivals.last() {
                Some(prev) => d.clone().max_of(prev.clone()),
                None => d.clone(),
            };
            let a = begin + draws.service_time();
            if a > failure_time {
                break;
            }
            arrivals.push(a);
        }
        if require_delivery && arrivals.is_empty() {
            if events > event_limit {
                return Err(Error::EventLimit { limit: event_limit });
            }
            continue;
        }

        let recovery_end = failure_time.clone() + recovery.clone();
        let discarded_count = generations.len() - arrivals.len();
        return Ok(PeriodTrace {
            start_time: start.clone(),
            failure_time,
            recovery_end,
            generations,
            arrivals,
            discarded_count,
        });
    }
}

/// Independent random stream for period `index`.
pub fn period_stream(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Generates one period starting at `start` from `stream`.
pub fn generate_period<F: Real, R: Rng>(
    params: &SimParams<F>,
    stream: &mut R,
    start: F,
) -> Result<PeriodTrace<F>> {
    params.validate()?;
    let mut draws = ExpDraws::new(params, stream);
    period_from_draws(
        &start,
        &params.r,
        &mut draws,
        params.enforce_assumption3,
        EVENT_LIMIT,
    )
}

fn relative_period<F: Real>(params: &SimParams<F>, index: u64) -> Result<PeriodTrace<F>> {
    let mut rng = period_stream(params.master_seed, index);
    generate_period(params, &mut rng, F::zero())
}

/// Simulates `params.periods` consecutive periods starting at time zero.
///
/// Periods are generated in parallel. A queue with `rho >= 1` is simulated
/// but flagged through [`Timeline::unstable_queue`].
pub fn simulate<F: Real>(params: &SimParams<F>) -> Result<Timeline<F>> {
    params.validate()?;
    let relative = (0..params.periods)
        .into_par_iter()
        .map(|p| relative_period(params, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(place(relative, !params.is_stable()))
}

/// Serial reference for [`simulate`].
pub fn simulate_serial<F: Real>(params: &SimParams<F>) -> Result<Timeline<F>> {
    params.validate()?;
    let relative = (0..params.periods)
        .map(|p| relative_period(params, p))
        .collect::<Result<Vec<_>>>()?;
    Ok(place(relative, !params.is_stable()))
}

fn place<F: Real>(relative: Vec<PeriodTrace<F>>, unstable: bool) -> Timeline<F> {
    let mut offset = F::zero();
    let periods: Vec<_> = relative
        .into_iter()
        .map(|p| {
            let placed = if offset == F::zero() {
                p
            } else {
                p.shifted(&offset)
            };
            offset = placed.recovery_end;
            placed
        })
        .collect();
    let mut timeline = Timeline::new(periods).expect("placed periods abut");
    timeline.unstable_queue = unstable;
    timeline
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn hand_worked_period() {
        let mut draws = FixedDraws::new(vec![5.0], vec![1.0, 0.5, 10.0], vec![2.0, 0.4, 1.0]);
        let p = period_from_draws(&0.0, &2.0, &mut draws, false, EVENT_LIMIT).unwrap();
        assert_eq!(p.generations, vec![0.0, 1.0, 1.5]);
        assert_eq!(p.arrivals, vec![2.0, 2.4, 3.4]);
        assert_eq!(p.discarded_count, 0);
        assert_eq!(p.failure_time, 5.0);
        assert_eq!(p.recovery_end, 7.0);
    }

    #[test]
    fn failure_before_first_service_completes() {
        let mut draws = FixedDraws::new(vec![2.0], vec![], vec![3.0]);
        let p = period_from_draws(&0.0, &1.0, &mut draws, false, EVENT_LIMIT).unwrap();
        assert!(p.arrivals.is_empty());
        assert_eq!(p.discarded_count, 1);
        assert_eq!(p.recovery_end, 3.0);
    }

    #[test]
    fn assumption3_redraws_the_period() {
        let mut draws = FixedDraws::new(vec![2.0, 6.0], vec![10.0, 10.0], vec![3.0, 3.0]);
        let p = period_from_draws(&0.0, &1.0, &mut draws, true, EVENT_LIMIT).unwrap();
        assert_eq!(p.arrivals, vec![3.0]);
        assert_eq!(p.failure_time, 6.0);
        assert_eq!(p.recovery_end, 7.0);
    }

    #[test]
    fn event_limit_is_an_error() {
        let mut draws = FixedDraws::new(vec![100.0], vec![1.0; 50], vec![0.5; 51]);
        let err = period_from_draws(&0.0, &1.0, &mut draws, false, 10).unwrap_err();
        assert_eq!(err, Error::EventLimit { limit: 10 });
    }

    #[test]
    fn generation_exactly_at_failure_is_kept_but_not_delivered() {
        let mut draws = FixedDraws::new(vec![2.0], vec![2.0, 1.0], vec![1.0, 1.0]);
        let p = period_from_draws(&0.0, &1.0, &mut draws, false, EVENT_LIMIT).unwrap();
        assert_eq!(p.generations, vec![0.0, 2.0]);
        assert_eq!(p.arrivals, vec![1.0]);
        assert_eq!(p.discarded_count, 1);
    }

    #[test]
    fn rational_period_has_exact_durations() {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let mut draws = FixedDraws::new(
            vec![q(17, 3)],
            vec![q(1, 7), q(40, 1)],
            vec![q(2, 5), q(1, 9)],
        );
        let start = q(11, 13);
        let r = q(5, 2);
        let p = period_from_draws(&start, &r, &mut draws, false, EVENT_LIMIT).unwrap();
        assert_eq!(p.recovery_end.clone() - p.failure_time.clone(), r);
        assert_eq!(p.duration(), q(17, 3) + r);
    }

    #[test]
    fn one_period_timeline_starts_at_zero() {
        let params = SimParams::<f64>::default().with_periods(1);
        let tl = simulate(&params).unwrap();
        assert_eq!(tl.periods().len(), 1);
        assert_eq!(*tl.start_time(), 0.0);
        assert!(!tl.unstable_queue);
    }

    #[test]
    fn saturated_queue_is_flagged() {
        let params = SimParams::<f64>::default()
            .with_rates(1.5, 1.0)
            .with_periods(5);
        assert!(simulate(&params).unwrap().unstable_queue);
    }

    #[test]
    fn f32_simulation_runs() {
        let params = SimParams::<f32>::default().with_periods(50);
        let tl = simulate(&params).unwrap();
        assert_eq!(tl.periods().len(), 50);
        assert!(tl.delivery_count() > 0);
    }
}
