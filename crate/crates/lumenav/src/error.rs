//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("need at least 4 control points, got {0}")]
    TooFewControlPoints(usize),
    #[error("control points ({points}) and radii ({radii}) counts differ")]
    LengthMismatch { points: usize, radii: usize },
    #[error("radius at control point {index} must be positive, got {radius}")]
    NonPositiveRadius { index: usize, radius: f64 },
    #[error("consecutive control points at index {0} coincide")]
    DuplicateControlPoint(usize),
    #[error("arclength {s} outside [0, {total}]")]
    ArclengthOutOfRange { s: f64, total: f64 },
    #[error("degenerate tangent at arclength {s}")]
    DegenerateTangent { s: f64 },
    #[error("environment violates traversability: min radius {min_radius} <= 2 x tip radius {tip_radius}")]
    NotTraversable { min_radius: f64, tip_radius: f64 },
    #[error("failed to generate a valid environment for seed {seed} after {attempts} attempts")]
    GenerationFailed { seed: u64, attempts: usize },
}

#[derive(Debug, Error)]
pub enum RenderError {
    #[error("camera pose is outside the lumen (wall distance {wall_distance} mm)")]
    PoseOutsideLumen { wall_distance: f64 },
    #[error("invalid camera intrinsics: {0}")]
    BadIntrinsics(String),
    #[error("dataset export needs count >= 1")]
    EmptyDataset,
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed {format} data: {reason}")]
    MalformedImage { format: &'static str, reason: String },
}

#[derive(Debug, Error)]
pub enum PerceptionError {
    #[error("depth images have mismatched dimensions ({0}x{1} vs {2}x{3})")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("no jointly valid pixels")]
    NoValidPixels,
    #[error("navigation target is invalid")]
    InvalidTarget,
    #[error("quantile level {level} outside 1..={n_levels}")]
    BadLevel { level: usize, n_levels: usize },
    #[error("depth map has no valid pixels")]
    EmptyDepth,
    #[error("calibration target abs_rel {0} is not achievable (must be <= 0.6)")]
    UnreachableTarget(f64),
}

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("step() called after the episode finished ({reason})")]
    EpisodeOver { reason: String },
    #[error("invalid episode config: {0}")]
    BadConfig(String),
    #[error("render: {0}")]
    Render(#[from] RenderError),
}

#[derive(Debug, Error)]
pub enum RlError {
    #[error("sequence lengths differ: rewards {rewards}, values {values}, dones {dones}")]
    LengthMismatch {
        rewards: usize,
        values: usize,
        dones: usize,
    },
    #[error("non-finite {quantity} during update {update}")]
    NonFinite { quantity: String, update: usize },
    #[error("rollout buffer not finalized; compute advantages first")]
    BufferNotReady,
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("environment: {0}")]
    Env(#[from] EnvError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("trajectory log is empty")]
    EmptyLog,
    #[error("jerk index needs at least 4 samples, got {0}")]
    TooFewSamples(usize),
    #[error("no logs to aggregate")]
    NoLogs,
    #[error("malformed log record at line {line}: {reason}")]
    MalformedLog { line: usize, reason: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
