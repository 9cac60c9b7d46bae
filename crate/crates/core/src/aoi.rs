//! Exact Age of Information along a simulated timeline.
//!
//! The age is a saw-tooth: slope one between arrivals, dropping at each
//! arrival to that packet's system time `a - d`. Time averages are computed
//! segment by segment as trapezoid areas, so they are exact in whatever
//! scalar the timeline carries.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::timeline::Timeline;

/// Piecewise-linear age process over `[measurement_start, measurement_end]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AoiTrajectory<T> {
    /// `(time, age)` at the start of each unit-slope segment, in time order.
    /// Every arrival starts a segment; extra points may split a segment
    /// without changing the age.
    breakpoints: Vec<(T, T)>,
    measurement_end: T,
}

/// One unit-slope piece of a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct AgeSegment<T> {
    pub start: T,
    pub end: T,
    pub start_age: T,
}

impl<T: Scalar> AgeSegment<T> {
    pub fn len(&self) -> T {
        self.end.clone() - self.start.clone()
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn end_age(&self) -> T {
        self.start_age.clone() + self.len()
    }

    /// `len * (start_age + end_age) / 2`.
    pub fn area(&self) -> T {
        trapezoid(&self.start_age, &self.len())
    }
}

fn trapezoid<T: Scalar>(start_age: &T, len: &T) -> T {
    len.clone() * (start_age.clone() + len.half())
}

/// Builds the age process of `timeline` from its first arrival to the end of
/// its last period.
pub fn age_trajectory<T: Scalar>(timeline: &Timeline<T>) -> Result<AoiTrajectory<T>> {
    let breakpoints: Vec<(T, T)> = timeline
        .all_arrivals()
        .map(|(d, a)| (a.clone(), a.clone() - d.clone()))
        .collect();
    if breakpoints.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    Ok(AoiTrajectory {
        breakpoints,
        measurement_end: timeline.end_time().clone(),
    })
}

impl<T: Scalar> AoiTrajectory<T> {
    pub fn measurement_start(&self) -> &T {
        &self.breakpoints[0].0
    }

    pub fn measurement_end(&self) -> &T {
        &self.measurement_end
    }

    pub fn span(&self) -> T {
        self.measurement_end.clone() - self.measurement_start().clone()
    }

    pub fn breakpoints(&self) -> &[(T, T)] {
        &self.breakpoints
    }

    pub fn segments(&self) -> impl Iterator<Item = AgeSegment<T>> + '_ {
        self.breakpoints
            .iter()
            .enumerate()
            .map(move |(i, (t, age))| {
                let end = self
                    .breakpoints
                    .get(i + 1)
                    .map_or(&self.measurement_end, |next| &next.0);
                AgeSegment {
                    start: t.clone(),
                    end: end.clone(),
                    start_age: age.clone(),
                }
            })
    }

    /// Index of the segment containing `t`.
    fn segment_index(&self, t: &T) -> usize {
        self.breakpoints
            .partition_point(|(s, _)| s <= t)
            .saturating_sub(1)
    }

    /// Age at `t`, right-continuous at arrivals. `None` outside the span.
    pub fn age_at(&self, t: &T) -> Option<T> {
        if t < self.measurement_start() || *t > self.measurement_end {
            return None;
        }
        let (s, age) = &self.breakpoints[self.segment_index(t)];
        Some(age.clone() + (t.clone() - s.clone()))
    }

    /// Exact integral of the age over `[from, to]`, clipped to the span.
    pub fn integral(&self, from: &T, to: &T) -> T {
        let lo = from.clone().max_of(self.measurement_start().clone());
        let hi = to.clone().min_of(self.measurement_end.clone());
        let mut total = T::zero();
        if hi <= lo {
            return total;
        }
        let mut i = self.segment_index(&lo);
        while i < self.breakpoints.len() && self.breakpoints[i].0 < hi {
            let (s, age) = &self.breakpoints[i];
            let seg_end = self
                .breakpoints
                .get(i + 1)
                .map_or(&self.measurement_end, |next| &next.0);
            let a = s.clone().max_of(lo.clone());
            let b = seg_end.clone().min_of(hi.clone());
            if b > a {
                let age_a = age.clone() + (a.clone() - s.clone());
                total = total + trapezoid(&age_a, &(b - a));
            }
            i += 1;
        }
        total
    }

    /// Same trajectory with extra segment boundaries at `cuts` (those strictly
    /// inside the span and not already breakpoints).
    pub fn refined(&self, cuts: &[T]) -> Self {
        let mut points = self.breakpoints.clone();
        for c in cuts {
            if c > self.measurement_start()
                && *c < self.measurement_end
                && !self.breakpoints.iter().any(|(s, _)| s == c)
            {
                let age = self.age_at(c).expect("cut inside span");
                points.push((c.clone(), age));
            }
        }
        points.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("comparable times"));
        points.dedup_by(|x, y| x.0 == y.0);
        AoiTrajectory {
            breakpoints: points,
            measurement_end: self.measurement_end.clone(),
        }
    }
}

/// Time-average age over the trajectory's span.
pub fn time_average_aoi<T: Scalar>(traj: &AoiTrajectory<T>) -> Result<T> {
    let span = traj.span();
    if span <= T::zero() {
        return Err(Error::ZeroSpan);
    }
    let area = traj.segments().fold(T::zero(), |acc, seg| acc + seg.area());
    Ok(area / span)
}

/// Which part of a period a stretch of time belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Region {
    /// First post-recovery generation until its arrival.
    R1,
    /// First arrival until the failure.
    R2,
    /// Failure until the end of the recovery.
    R3,
}

/// Accumulated age area and duration per region.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionAverages<T> {
    pub area_r1: T,
    pub area_r2: T,
    pub area_r3: T,
    pub time_r1: T,
    pub time_r2: T,
    pub time_r3: T,
}

impl<T: Scalar> Default for RegionAverages<T> {
    fn default() -> Self {
        RegionAverages {
            area_r1: T::zero(),
            area_r2: T::zero(),
            area_r3: T::zero(),
            time_r1: T::zero(),
            time_r2: T::zero(),
            time_r3: T::zero(),
        }
    }
}

fn ratio<T: Scalar>(area: &T, time: &T) -> Option<T> {
    (*time > T::zero()).then(|| area.clone() / time.clone())
}

impl<T: Scalar> RegionAverages<T> {
    pub fn add(&mut self, region: Region, area: T, time: T) {
        let (a, t) = match region {
            Region::R1 => (&mut self.area_r1, &mut self.time_r1),
            Region::R2 => (&mut self.area_r2, &mut self.time_r2),
            Region::R3 => (&mut self.area_r3, &mut self.time_r3),
        };
        *a = a.clone() + area;
        *t = t.clone() + time;
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(Region::R1, other.area_r1.clone(), other.time_r1.clone());
        self.add(Region::R2, other.area_r2.clone(), other.time_r2.clone());
        self.add(Region::R3, other.area_r3.clone(), other.time_r3.clone());
    }

    pub fn avg_r1(&self) -> Option<T> {
        ratio(&self.area_r1, &self.time_r1)
    }

    pub fn avg_r2(&self) -> Option<T> {
        ratio(&self.area_r2, &self.time_r2)
    }

    pub fn avg_r3(&self) -> Option<T> {
        ratio(&self.area_r3, &self.time_r3)
    }

    pub fn total_time(&self) -> T {
        self.time_r1.clone() + self.time_r2.clone() + self.time_r3.clone()
    }

    /// Duration-weighted combination of the three region averages.
    pub fn combined(&self) -> Option<T> {
        let area = self.area_r1.clone() + self.area_r2.clone() + self.area_r3.clone();
        ratio(&area, &self.total_time())
    }
}

/// Region pieces of every period, clipped to `[from, to]`.
///
/// A period without deliveries has no R2; its pre-failure stretch is tagged
/// R1.
pub(crate) fn region_pieces<'a, T: Scalar>(
    timeline: &'a Timeline<T>,
    from: &'a T,
    to: &'a T,
) -> impl Iterator<Item = (usize, Region, T, T)> + 'a {
    timeline
        .periods()
        .iter()
        .enumerate()
        .flat_map(move |(i, p)| {
            let r1_end = p.r1_end().clone();
            [
                (Region::R1, p.start_time.clone(), r1_end.clone()),
                (Region::R2, r1_end, p.failure_time.clone()),
                (Region::R3, p.failure_time.clone(), p.recovery_end.clone()),
            ]
            .into_iter()
            .filter_map(move |(region, lo, hi)| {
                let lo = lo.max_of(from.clone());
                let hi = hi.min_of(to.clone());
                (hi > lo).then_some((i, region, lo, hi))
            })
        })
}

/// Per-region age areas and durations over the measured span.
pub fn region_average_aoi<T: Scalar>(timeline: &Timeline<T>) -> Result<RegionAverages<T>> {
    let traj = age_trajectory(timeline)?;
    let mut out = RegionAverages::default();
    for (_, region, lo, hi) in
        region_pieces(timeline, traj.measurement_start(), traj.measurement_end())
    {
        let area = traj.integral(&lo, &hi);
        out.add(region, area, hi - lo);
    }
    Ok(out)
}
