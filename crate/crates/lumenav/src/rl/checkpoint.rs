//! Versioned JSON checkpoints: network weights, optimizer moments, config
//! hash, and the deterministic RNG bookkeeping (master seed + counters).

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::adam::Adam;
use super::buffer::PpoConfig;
use super::policy::{PolicyNetwork, ValueNetwork};
use crate::error::RlError;

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub config_hash: String,
    pub ppo: PpoConfig,
    pub policy: PolicyNetwork,
    pub value: ValueNetwork,
    pub optimizer: Adam,
    /// Master seed; together with the counters below this reconstructs
    /// every derived RNG stream.
    pub seed: u64,
    pub steps_done: usize,
    pub updates_done: usize,
}

impl Checkpoint {
    pub fn save(&self, path: &Path) -> Result<(), RlError> {
        let json = serde_json::to_string(self)
            .map_err(|e| RlError::Checkpoint(format!("serialize: {e}")))?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Checkpoint, RlError> {
        let bytes = std::fs::read(path)?;
        let ck: Checkpoint = serde_json::from_slice(&bytes)
            .map_err(|e| RlError::Checkpoint(format!("parse: {e}")))?;
        if ck.version != CHECKPOINT_VERSION {
            return Err(RlError::Checkpoint(format!(
                "unsupported checkpoint version {}",
                ck.version
            )));
        }
        Ok(ck)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn roundtrip_preserves_outputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let policy = PolicyNetwork::new(4, 3, &mut rng);
        let value = ValueNetwork::new(4, &mut rng);
        let ck = Checkpoint {
            version: CHECKPOINT_VERSION,
            config_hash: "h".into(),
            ppo: PpoConfig::default(),
            policy: policy.clone(),
            value: value.clone(),
            optimizer: Adam::new(policy.param_count() + value.net.param_count(), 3e-4),
            seed: 5,
            steps_done: 123,
            updates_done: 4,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.json");
        ck.save(&path).unwrap();
        let back = Checkpoint::load(&path).unwrap();
        let obs = [0.3, -0.1, 0.8, 0.0];
        assert_eq!(policy.forward(&obs), back.policy.forward(&obs));
        assert_eq!(value.value(&obs), back.value.value(&obs));
        assert_eq!(back.steps_done, 123);
    }

    #[test]
    fn version_mismatch_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let policy = PolicyNetwork::new(4, 3, &mut rng);
        let value = ValueNetwork::new(4, &mut rng);
        let mut ck = Checkpoint {
            version: 99,
            config_hash: String::new(),
            ppo: PpoConfig::default(),
            policy: policy.clone(),
            value,
            optimizer: Adam::new(1, 3e-4),
            seed: 0,
            steps_done: 0,
            updates_done: 0,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.json");
        ck.version = 99;
        ck.save(&path).unwrap();
        assert!(Checkpoint::load(&path).is_err());
    }
}
