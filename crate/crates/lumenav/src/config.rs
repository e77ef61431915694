//! Run configuration: one JSON tree covering camera, episode, degradation,
//! and PPO settings, hashed so every output artifact can carry the exact
//! configuration it was produced under.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::env::EpisodeConfig;
use crate::perception::DegradationProfile;
use crate::rl::PpoConfig;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub episode: EpisodeConfig,
    pub degradation: DegradationProfile,
    pub ppo: PpoConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            episode: EpisodeConfig::default(),
            degradation: DegradationProfile::zero_noise(),
            ppo: PpoConfig::default(),
        }
    }
}

impl RunConfig {
    /// The desk-scale training preset: 48x48 camera, the thick far-counted
    /// quantile band, and a 2500-step horizon.
    pub fn desk_training() -> Self {
        use crate::perception::LevelOrdering;
        use crate::render::CameraIntrinsics;
        let mut cfg = RunConfig::default();
        cfg.episode.camera = CameraIntrinsics {
            width: 48,
            height: 48,
            vertical_fov_deg: 120.0,
            far_clip: 300.0,
        };
        cfg.episode.extraction_level = 2;
        cfg.episode.extraction_levels = 5;
        cfg.episode.extraction_ordering = LevelOrdering::FarFirst;
        cfg.episode.horizon = 2500;
        cfg
    }

    pub fn from_json(json: &str) -> Result<RunConfig, serde_json::Error> {
        serde_json::from_str(json)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// First 16 hex chars of the SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        config_hash_of(&canonical)
    }

    pub fn validate(&self) -> Result<(), crate::error::EnvError> {
        self.episode.validate()?;
        self.ppo
            .validate()
            .map_err(|e| crate::error::EnvError::BadConfig(e.to_string()))?;
        Ok(())
    }
}

/// Stable short hash of any serialized configuration text.
pub fn config_hash_of(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    hex::encode(&digest[..8])
}
