//! Per-period statistics and the aggregate metrics of a run.

use serde::Serialize;

use crate::aoi::{age_trajectory, region_pieces, time_average_aoi, RegionAverages};
use crate::detector::{period_mismatch, Alarms, DecisionRule, ErrorScope, PeriodMismatch};
use crate::error::Result;
use crate::scalar::Scalar;
use crate::stats::Bootstrap;
use crate::timeline::Timeline;

/// Contribution of one period to the measured span. Periods that end before
/// the first arrival contribute zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodStats<T> {
    pub aoi_area: T,
    pub regions: RegionAverages<T>,
    pub mismatch: PeriodMismatch<T>,
}

pub fn period_stats<T: Scalar>(
    timeline: &Timeline<T>,
    rule: &DecisionRule<T>,
) -> Result<Vec<PeriodStats<T>>> {
    let traj = age_trajectory(timeline)?;
    let alarms = Alarms::build(timeline, rule)?;
    let mut out: Vec<PeriodStats<T>> = timeline
        .periods()
        .iter()
        .map(|p| PeriodStats {
            aoi_area: T::zero(),
            regions: RegionAverages::default(),
            mismatch: period_mismatch(&alarms, p),
        })
        .collect();
    for (i, region, lo, hi) in
        region_pieces(timeline, traj.measurement_start(), traj.measurement_end())
    {
        let area = traj.integral(&lo, &hi);
        let stats = &mut out[i];
        stats.aoi_area = stats.aoi_area.clone() + area.clone();
        stats.regions.add(region, area, hi - lo);
    }
    Ok(out)
}

/// Region time-averages in seconds; `None` where a region was never
/// observed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionSummary {
    pub avg_r1: Option<f64>,
    pub avg_r2: Option<f64>,
    pub avg_r3: Option<f64>,
    pub time_r1: f64,
    pub time_r2: f64,
    pub time_r3: f64,
}

/// Aggregate metrics of one simulated configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsSummary {
    pub periods: usize,
    pub deliveries: usize,
    pub periods_without_delivery: usize,
    pub unstable_queue: bool,
    /// First arrival to end of timeline.
    pub measured_time: f64,
    pub aoi: f64,
    pub regions: RegionSummary,
    pub error_scope: ErrorScope,
    /// Detection error within `error_scope`.
    pub error_rate: f64,
    pub false_positive_rate: f64,
    pub false_negative_rate: f64,
    /// Detection error over the whole measured span, R1 included.
    pub error_rate_full_span: f64,
    /// 95% bootstrap half-widths over periods, when requested.
    pub aoi_ci: Option<f64>,
    pub error_ci: Option<f64>,
}

/// Time-average age and detection error over the measured span.
pub fn summarize<T: Scalar>(
    timeline: &Timeline<T>,
    rule: &DecisionRule<T>,
    scope: ErrorScope,
    bootstrap: Option<Bootstrap>,
) -> Result<MetricsSummary> {
    let traj = age_trajectory(timeline)?;
    let aoi = time_average_aoi(&traj)?.to_f64_lossy();
    let stats = period_stats(timeline, rule)?;

    let mut regions = RegionAverages::<T>::default();
    let mut mismatch = PeriodMismatch::zero();
    for s in &stats {
        regions.merge(&s.regions);
        mismatch.accumulate(&s.mismatch);
    }
    let scoped = mismatch.breakdown(scope)?;
    let full = mismatch.breakdown(ErrorScope::FullSpan)?;
    let scoped_time = scoped.measured_time.to_f64_lossy();

    let (aoi_ci, error_ci) = match bootstrap {
        Some(b) => {
            let (numerators, denominators): (Vec<[f64; 2]>, Vec<[f64; 2]>) = stats
                .iter()
                .map(|s| {
                    let (measured, fp, fn_) = s.mismatch.scoped(scope);
                    (
                        [s.aoi_area.to_f64_lossy(), (fp + fn_).to_f64_lossy()],
                        [s.mismatch.measured.to_f64_lossy(), measured.to_f64_lossy()],
                    )
                })
                .unzip();
            let [a, e] = b.ratio_half_widths(&numerators, &denominators);
            (Some(a), Some(e))
        }
        None => (None, None),
    };

    let f = |x: Option<T>| x.map(|v| v.to_f64_lossy());
    Ok(MetricsSummary {
        periods: timeline.periods().len(),
        deliveries: timeline.delivery_count(),
        periods_without_delivery: timeline
            .periods()
            .iter()
            .filter(|p| p.arrivals.is_empty())
            .count(),
        unstable_queue: timeline.unstable_queue,
        measured_time: traj.span().to_f64_lossy(),
        aoi,
        regions: RegionSummary {
            avg_r1: f(regions.avg_r1()),
            avg_r2: f(regions.avg_r2()),
            avg_r3: f(regions.avg_r3()),
            time_r1: regions.time_r1.to_f64_lossy(),
            time_r2: regions.time_r2.to_f64_lossy(),
            time_r3: regions.time_r3.to_f64_lossy(),
        },
        error_scope: scope,
        error_rate: scoped.error_rate.to_f64_lossy(),
        false_positive_rate: scoped.false_positive_time.to_f64_lossy() / scoped_time,
        false_negative_rate: scoped.false_negative_time.to_f64_lossy() / scoped_time,
        error_rate_full_span: full.error_rate.to_f64_lossy(),
        aoi_ci,
        error_ci,
    })
}
