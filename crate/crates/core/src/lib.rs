//! Topological feature tracking for time-varying scalar fields.
//!
//! The pipeline computes a persistence diagram per timestep ([`persistence`]),
//! matches consecutive diagrams under a geometrically lifted Wasserstein
//! metric ([`metric`], [`assignment`]) and chains the matchings into
//! trajectories with merge and split events ([`tracking`]).
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the type
//! aliases below fix the scalar to `f64`, which is what the command-line
//! front end uses.

pub mod assignment;
pub mod grid;
pub mod metric;
pub mod parallel;
pub mod persistence;
pub mod scalar;
pub mod synthetic;
pub mod tracking;

pub use scalar::Scalar;

pub type Grid = grid::Grid<f64>;
pub type ScalarField = grid::ScalarField<f64>;
pub type TimeSeries = grid::TimeSeries<f64>;
pub type PersistencePair = persistence::PersistencePair<f64>;
pub type PersistenceDiagram = persistence::PersistenceDiagram<f64>;
pub type MetricParams = metric::MetricParams<f64>;
pub type MatchPoint = metric::MatchPoint<f64>;
pub type AssignmentResult = assignment::AssignmentResult<f64>;
pub type Trajectory = tracking::Trajectory<f64>;
pub type TrackingResult = tracking::TrackingResult<f64>;

pub type ScalarFieldF32 = grid::ScalarField<f32>;
pub type PersistenceDiagramF32 = persistence::PersistenceDiagram<f32>;
pub type MetricParamsF32 = metric::MetricParams<f32>;
