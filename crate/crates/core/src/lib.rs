//! Simulation and analysis of a status-update sensor that fails and
//! recovers while streaming updates through an M/M/1 FCFS queue.
//!
//! The monitor has two goals: keep the Age of Information low, and tell
//! from update timings alone whether the sensor is down. This crate
//! generates exact event traces ([`sim`]), integrates the age process
//! exactly ([`aoi`]), runs the MAP failure detector ([`detector`]),
//! evaluates the closed forms ([`analytics`]) and cross-checks them
//! numerically ([`oracle`]).
//!
//! Everything that only adds, subtracts and compares times is generic over
//! [`Scalar`], so traces can be built with exact rationals; sampling and
//! closed forms are generic over [`Real`]. The aliases below fix the scalar
//! for the common cases.

pub mod analytics;
pub mod aoi;
pub mod detector;
pub mod error;
pub mod oracle;
pub mod params;
pub mod quadrature;
pub mod queue;
pub mod scalar;
pub mod sim;
pub mod stats;
pub mod summary;
pub mod timeline;

pub use error::{Error, Result};
pub use scalar::{Real, Scalar};
pub use timeline::SensorState;

/// Exact rational time.
pub type Exact = num_rational::BigRational;

pub type SimParams = params::SimParams<f64>;
pub type SimParams32 = params::SimParams<f32>;

pub type PeriodTrace = timeline::PeriodTrace<f64>;
pub type Timeline = timeline::Timeline<f64>;
pub type Timeline32 = timeline::Timeline<f32>;
pub type ExactTimeline = timeline::Timeline<Exact>;

pub type AoiTrajectory = aoi::AoiTrajectory<f64>;
pub type RegionAverages = aoi::RegionAverages<f64>;
pub type DecisionRule = detector::DecisionRule<f64>;
pub type ErrorBreakdown = detector::ErrorBreakdown<f64>;
pub type StateTrajectory = detector::StateTrajectory<f64>;
pub type AnalyticReport = analytics::AnalyticReport<f64>;

pub use summary::MetricsSummary;
