//! The navigation MDP environment: tip kinematics with gated forward
//! motion, the follow-the-leader body, per-step perception, the five-term
//! reward, and episode logging.

mod action;
mod episode;
mod ftl;
mod reward;

pub use action::Action;
pub use episode::{DoneReason, Episode, EpisodeConfig, ForwardMode, StepInfo, StepOutcome};
pub use ftl::{ftl_body, ftl_body_with_tip, TipTrace};
pub use reward::{
    is_success, reward_direction, reward_distance, reward_stability, reward_step, reward_success,
    RewardBreakdown, RewardParams, RewardTerms,
};
