//! Perception: the depth-estimator surrogate (calibrated degradation of
//! ground-truth depth), depth-quality metrics, navigation-point extraction,
//! and observation encoding.

mod calibrate;
mod degrade;
mod navpoint;
mod observation;
mod quality;

pub use calibrate::{calibrate_profile, measure_profile, CalibrationOptions, CalibrationOutcome};
pub use degrade::{degrade_depth, DegradationProfile, SeedPolicy};
pub use navpoint::{
    extract_navigation_point, extract_navigation_point_ordered, LevelOrdering, NavigationTarget,
    DEFAULT_LEVEL, DEFAULT_N_LEVELS, MIN_COMPONENT_PIXELS,
};
pub use observation::{encode_observation, Observation, ObservationEncoding};
pub use quality::{abs_rel, delta1};
