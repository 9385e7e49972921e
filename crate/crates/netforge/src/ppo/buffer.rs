//! Rollout storage and generalized advantage estimation.

use super::{forward, PolicyParams, PpoError};
use crate::env::CircuitEnv;
use crate::features::Observation;
use crate::oracles::Context;
use crate::techmap::ActionId;
use rand_chacha::ChaCha8Rng;

/// Fixed-size on-policy storage; episodes may span buffer boundaries, the
/// tail is bootstrapped with the value estimate of the carried observation.
#[derive(Debug, Clone)]
pub struct RolloutBuffer {
    pub observations: Vec<Observation>,
    pub actions: Vec<usize>,
    pub log_probs: Vec<f64>,
    pub rewards: Vec<f64>,
    pub values: Vec<f64>,
    pub dones: Vec<bool>,
    pub bootstrap_value: f64,
    /// (context, oracle value) per episode finished inside this rollout
    pub terminals: Vec<(Context, f64)>,
    /// environment failures recorded and resampled
    pub faults: Vec<String>,
}

impl RolloutBuffer {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn mean_reward(&self) -> f64 {
        if self.rewards.is_empty() {
            0.0
        } else {
            self.rewards.iter().sum::<f64>() / self.rewards.len() as f64
        }
    }
}

/// Collect exactly `steps` transitions with the current stochastic policy.
/// `carry` holds the live observation of an episode spanning rollouts.
pub fn rollout(
    env: &mut CircuitEnv,
    params: &PolicyParams,
    steps: usize,
    rng: &mut ChaCha8Rng,
    carry: &mut Option<Observation>,
) -> Result<RolloutBuffer, PpoError> {
    let mut buffer = RolloutBuffer {
        observations: Vec::with_capacity(steps),
        actions: Vec::with_capacity(steps),
        log_probs: Vec::with_capacity(steps),
        rewards: Vec::with_capacity(steps),
        values: Vec::with_capacity(steps),
        dones: Vec::with_capacity(steps),
        bootstrap_value: 0.0,
        terminals: Vec::new(),
        faults: Vec::new(),
    };

    while buffer.len() < steps {
        let obs = match carry.take() {
            Some(o) => o,
            None => env.reset(None).map_err(PpoError::Env)?,
        };
        let (dist, value) = forward(params, &obs)?;
        let action_idx = dist.sample(rng);
        let action = ActionId::from_index(action_idx).expect("policy emits valid actions");
        match env.step(action) {
            Ok(tr) => {
                buffer.observations.push(obs);
                buffer.actions.push(action_idx);
                buffer.log_probs.push(dist.log_probs[action_idx]);
                buffer.rewards.push(tr.reward);
                buffer.values.push(value);
                buffer.dones.push(tr.done);
                if tr.done {
                    if let Some(v) = tr.oracle_value {
                        let (context, _) = env.episode_context().expect("episode just stepped");
                        buffer.terminals.push((context, v));
                    }
                    *carry = None;
                } else {
                    *carry = Some(tr.next_observation);
                }
            }
            Err(e) => {
                // abandon the episode: close the partial trajectory so
                // advantages cannot flow across the resample boundary
                buffer.faults.push(e.to_string());
                if let Some(last) = buffer.dones.last_mut() {
                    *last = true;
                }
                *carry = None;
            }
        }
    }

    buffer.bootstrap_value = match (buffer.dones.last(), carry.as_ref()) {
        (Some(false), Some(obs)) => forward(params, obs)?.1,
        _ => 0.0,
    };
    Ok(buffer)
}

#[derive(Debug, Clone)]
pub struct GaeResult {
    /// normalized to zero mean, unit variance
    pub advantages: Vec<f64>,
    pub advantages_raw: Vec<f64>,
    pub returns: Vec<f64>,
}

/// Standard recursive GAE with bootstrap on truncation.
pub fn gae(buffer: &RolloutBuffer, gamma: f64, lambda: f64) -> GaeResult {
    let n = buffer.len();
    let mut advantages_raw = vec![0.0; n];
    let mut next_advantage = 0.0;
    for t in (0..n).rev() {
        let not_done = if buffer.dones[t] { 0.0 } else { 1.0 };
        let next_value =
            if t + 1 < n { buffer.values[t + 1] } else { buffer.bootstrap_value };
        let delta = buffer.rewards[t] + gamma * not_done * next_value - buffer.values[t];
        next_advantage = delta + gamma * lambda * not_done * next_advantage;
        advantages_raw[t] = next_advantage;
    }
    let returns: Vec<f64> =
        advantages_raw.iter().zip(&buffer.values).map(|(a, v)| a + v).collect();

    let mean = advantages_raw.iter().sum::<f64>() / n.max(1) as f64;
    let var = advantages_raw.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / n.max(1) as f64;
    let std = var.sqrt();
    let advantages = advantages_raw.iter().map(|a| (a - mean) / (std + 1e-8)).collect();
    GaeResult { advantages, advantages_raw, returns }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_step_buffer(reward: f64, value: f64) -> RolloutBuffer {
        RolloutBuffer {
            observations: vec![Observation([0.0; 17])],
            actions: vec![0],
            log_probs: vec![0.0],
            rewards: vec![reward],
            values: vec![value],
            dones: vec![true],
            bootstrap_value: 0.0,
            terminals: vec![],
            faults: vec![],
        }
    }

    #[test]
    fn single_terminal_step_advantage_is_r_minus_v() {
        let buffer = one_step_buffer(2.0, 0.5);
        let g = gae(&buffer, 0.99, 0.95);
        assert!((g.advantages_raw[0] - 1.5).abs() < 1e-12);
        assert!((g.returns[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_zero_is_one_step_td() {
        let buffer = RolloutBuffer {
            observations: vec![Observation([0.0; 17]); 3],
            actions: vec![0; 3],
            log_probs: vec![0.0; 3],
            rewards: vec![1.0, 0.0, 2.0],
            values: vec![0.5, 0.25, 0.125],
            dones: vec![false, false, true],
            bootstrap_value: 0.0,
            terminals: vec![],
            faults: vec![],
        };
        let g = gae(&buffer, 0.9, 0.0);
        let expect0 = 1.0 + 0.9 * 0.25 - 0.5;
        let expect1 = 0.0 + 0.9 * 0.125 - 0.25;
        let expect2 = 2.0 - 0.125;
        assert!((g.advantages_raw[0] - expect0).abs() < 1e-12);
        assert!((g.advantages_raw[1] - expect1).abs() < 1e-12);
        assert!((g.advantages_raw[2] - expect2).abs() < 1e-12);
    }

    #[test]
    fn lambda_one_gamma_one_is_monte_carlo() {
        let buffer = RolloutBuffer {
            observations: vec![Observation([0.0; 17]); 3],
            actions: vec![0; 3],
            log_probs: vec![0.0; 3],
            rewards: vec![1.0, 2.0, 3.0],
            values: vec![0.1, 0.2, 0.3],
            dones: vec![false, false, true],
            bootstrap_value: 0.0,
            terminals: vec![],
            faults: vec![],
        };
        let g = gae(&buffer, 1.0, 1.0);
        assert!((g.advantages_raw[0] - (6.0 - 0.1)).abs() < 1e-12);
        assert!((g.advantages_raw[1] - (5.0 - 0.2)).abs() < 1e-12);
        assert!((g.advantages_raw[2] - (3.0 - 0.3)).abs() < 1e-12);
    }

    #[test]
    fn normalized_advantages_are_standardized() {
        let buffer = RolloutBuffer {
            observations: vec![Observation([0.0; 17]); 4],
            actions: vec![0; 4],
            log_probs: vec![0.0; 4],
            rewards: vec![1.0, -1.0, 0.5, 2.0],
            values: vec![0.0; 4],
            dones: vec![true; 4],
            bootstrap_value: 0.0,
            terminals: vec![],
            faults: vec![],
        };
        let g = gae(&buffer, 0.99, 0.95);
        let mean: f64 = g.advantages.iter().sum::<f64>() / 4.0;
        let var: f64 = g.advantages.iter().map(|a| (a - mean) * (a - mean)).sum::<f64>() / 4.0;
        assert!(mean.abs() < 1e-9);
        assert!((var - 1.0).abs() < 1e-6);
    }
}
