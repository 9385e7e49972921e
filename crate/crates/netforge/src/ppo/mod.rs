//! From-scratch PPO: one multi-task policy over all four contexts, plus the
//! attack driver that extracts adversarial circuits from a trained policy.

mod adam;
mod attack;
mod buffer;
mod net;
mod train;
mod update;

pub use adam::Adam;
pub use attack::{attack, AttackHit, AttackReport, EpisodeRecord};
pub use buffer::{gae, rollout, GaeResult, RolloutBuffer};
pub use net::{Categorical, Mlp};
pub use train::{
    evaluate_policy, train, Checkpoint, LogRow, TrainConfig, TrainLog, TrainOutcome,
    CHECKPOINT_VERSION,
};
pub use update::{clipped_surrogate, ppo_update, LossStats, UpdateStats};

use crate::env::EnvError;
use crate::features::{Observation, OBSERVATION_DIM};
use crate::techmap::ActionId;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PpoError {
    #[error("non-finite value during training: {0}")]
    NonFinite(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("bad configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("checkpoint encoding: {0}")]
    Serde(#[from] serde_json::Error),
}

/// Policy and value networks: 17 -> 64 -> 64 -> 11 and 17 -> 64 -> 64 -> 1,
/// tanh hidden activations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyParams {
    pub policy: Mlp,
    pub value: Mlp,
}

impl PolicyParams {
    pub fn new(seed: u64) -> PolicyParams {
        Self::with_shape(
            seed,
            &[OBSERVATION_DIM, 64, 64, ActionId::COUNT],
            &[OBSERVATION_DIM, 64, 64, 1],
        )
    }

    /// Arbitrary layer sizes, for gradient checks on tiny nets.
    pub fn with_shape(seed: u64, policy_sizes: &[usize], value_sizes: &[usize]) -> PolicyParams {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let policy = Mlp::new(policy_sizes, &mut rng, 0.01);
        let value = Mlp::new(value_sizes, &mut rng, 1.0);
        PolicyParams { policy, value }
    }

    pub fn param_count(&self) -> usize {
        self.policy.param_count() + self.value.param_count()
    }

    pub fn flatten(&self) -> Vec<f64> {
        let mut flat = Vec::with_capacity(self.param_count());
        self.policy.flatten_into(&mut flat);
        self.value.flatten_into(&mut flat);
        flat
    }

    pub fn load_flat(&mut self, flat: &[f64]) {
        let used = self.policy.load_from(flat);
        self.value.load_from(&flat[used..]);
    }
}

/// Action distribution and value estimate for one observation.
pub fn forward(params: &PolicyParams, obs: &Observation) -> Result<(Categorical, f64), PpoError> {
    forward_slice(params, obs.as_slice())
}

pub(crate) fn forward_slice(
    params: &PolicyParams,
    x: &[f64],
) -> Result<(Categorical, f64), PpoError> {
    debug_assert_eq!(x.len(), params.policy.sizes[0]);
    let logits = params.policy.forward(x);
    let value = params.value.forward(x).output()[0];
    if logits.output().iter().any(|l| !l.is_finite()) || !value.is_finite() {
        return Err(PpoError::NonFinite("network emitted a non-finite output".into()));
    }
    Ok((Categorical::from_logits(logits.output()), value))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_shapes_and_determinism() {
        let params = PolicyParams::new(3);
        let obs = Observation([0.25; OBSERVATION_DIM]);
        let (d1, v1) = forward(&params, &obs).unwrap();
        let (d2, v2) = forward(&params, &obs).unwrap();
        assert_eq!(d1.probs.len(), ActionId::COUNT);
        assert_eq!(d1.logits, d2.logits);
        assert_eq!(v1, v2);
        let total: f64 = d1.probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
    }

    #[test]
    fn non_finite_parameters_are_reported() {
        let mut params = PolicyParams::new(3);
        params.policy.weights[0][0] = f64::NAN;
        let obs = Observation([0.25; OBSERVATION_DIM]);
        assert!(matches!(forward(&params, &obs), Err(PpoError::NonFinite(_))));
    }

    #[test]
    fn flat_round_trip() {
        let params = PolicyParams::new(11);
        let flat = params.flatten();
        let mut other = PolicyParams::new(12);
        other.load_flat(&flat);
        assert_eq!(other, params);
    }
}
