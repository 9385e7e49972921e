//! Clipped-surrogate PPO update with analytic gradients.

use super::adam::Adam;
use super::buffer::{gae, GaeResult, RolloutBuffer};
use super::net::Categorical;
use super::train::TrainConfig;
use super::{PolicyParams, PpoError};
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;

/// The clipped objective for one sample (before negation into a loss).
pub fn clipped_surrogate(ratio: f64, advantage: f64, clip: f64) -> f64 {
    let unclipped = ratio * advantage;
    let clipped = ratio.clamp(1.0 - clip, 1.0 + clip) * advantage;
    unclipped.min(clipped)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LossStats {
    pub total: f64,
    pub policy: f64,
    pub value: f64,
    pub entropy: f64,
}

/// Total loss and flat gradients over one minibatch. The flat layout is the
/// policy parameters followed by the value parameters.
pub(crate) fn minibatch_loss(
    params: &PolicyParams,
    buffer: &RolloutBuffer,
    estimates: &GaeResult,
    indices: &[usize],
    config: &TrainConfig,
    grads: &mut [f64],
) -> LossStats {
    let n = indices.len() as f64;
    let policy_params = params.policy.param_count();
    let input_dim = params.policy.sizes[0];
    let mut stats = LossStats::default();

    for &i in indices {
        let obs = &buffer.observations[i].as_slice()[..input_dim];
        let action = buffer.actions[i];
        let advantage = estimates.advantages[i];
        let ret = estimates.returns[i];

        // policy head
        let cache = params.policy.forward(obs);
        let dist = Categorical::from_logits(cache.output());
        let log_prob = dist.log_probs[action];
        let ratio = (log_prob - buffer.log_probs[i]).exp();
        let surrogate = clipped_surrogate(ratio, advantage, config.clip_ratio);
        stats.policy += -surrogate / n;
        let entropy = dist.entropy();
        stats.entropy += entropy / n;

        // d(-surrogate)/d(log_prob): the clipped branch is flat
        let unclipped = ratio * advantage;
        let clipped = ratio.clamp(1.0 - config.clip_ratio, 1.0 + config.clip_ratio) * advantage;
        let d_logp = if unclipped <= clipped { -unclipped } else { 0.0 } / n;

        let mut d_logits = vec![0.0; dist.probs.len()];
        for (k, p) in dist.probs.iter().enumerate() {
            let one_hot = if k == action { 1.0 } else { 0.0 };
            d_logits[k] += d_logp * (one_hot - p);
            // entropy term: d(-c_e H)/d(logit_k) = c_e p_k (log p_k + H)
            d_logits[k] += config.entropy_coef * p * (dist.log_probs[k] + entropy) / n;
        }
        params.policy.backward(&cache, &d_logits, &mut grads[..policy_params]);

        // value head
        let vcache = params.value.forward(obs);
        let v = vcache.output()[0];
        stats.value += (v - ret) * (v - ret) / n;
        let d_v = config.value_coef * 2.0 * (v - ret) / n;
        params.value.backward(&vcache, &[d_v], &mut grads[policy_params..]);
    }

    stats.total = stats.policy + config.value_coef * stats.value - config.entropy_coef * stats.entropy;
    stats
}

fn global_norm(grads: &[f64]) -> f64 {
    grads.iter().map(|g| g * g).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, Default)]
pub struct UpdateStats {
    pub loss: LossStats,
    pub grad_norm: f64,
    pub minibatches: usize,
}

/// Run `update_epochs` of shuffled minibatch updates over one buffer.
/// Adam moments persist across calls; non-finite losses abort.
pub fn ppo_update(
    params: &mut PolicyParams,
    adam: &mut Adam,
    buffer: &RolloutBuffer,
    config: &TrainConfig,
    rng: &mut ChaCha8Rng,
) -> Result<UpdateStats, PpoError> {
    let estimates = gae(buffer, config.gamma, config.gae_lambda);
    let total_params = params.param_count();
    let mut stats = UpdateStats::default();

    for _ in 0..config.update_epochs {
        let mut order: Vec<usize> = (0..buffer.len()).collect();
        order.shuffle(rng);
        for chunk in order.chunks(config.minibatch_size.max(1)) {
            let mut grads = vec![0.0; total_params];
            let loss = minibatch_loss(params, buffer, &estimates, chunk, config, &mut grads);
            if !loss.total.is_finite() {
                return Err(PpoError::NonFinite(format!(
                    "loss diverged: policy {} value {}",
                    loss.policy, loss.value
                )));
            }
            let norm = global_norm(&grads);
            if norm > config.max_grad_norm && norm > 0.0 {
                let scale = config.max_grad_norm / norm;
                grads.iter_mut().for_each(|g| *g *= scale);
            }
            let mut flat = params.flatten();
            adam.step(&mut flat, &grads);
            if flat.iter().any(|p| !p.is_finite()) {
                return Err(PpoError::NonFinite("parameters diverged".into()));
            }
            params.load_flat(&flat);
            stats.loss = loss;
            stats.grad_norm = norm;
            stats.minibatches += 1;
        }
    }
    Ok(stats)
}
