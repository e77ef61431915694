//! Trajectory-level evaluation: geometry-aware lumen distance, navigation
//! safety score, jerk index, and scripted baseline controllers.

mod baselines;
mod log;
pub(crate) mod report;

pub use baselines::{
    near_wall_steps, scripted_band_follower, scripted_lumen_follower, scripted_oracle,
};
pub use log::{LogHeader, StepRecord, TrajectoryLog};
pub use report::{
    aggregate, completion_fraction, d_geo, evaluate, jerk_index, path_length, s_nav,
    MetricsReport, MetricsSummary, PathPenaltyMode,
};
