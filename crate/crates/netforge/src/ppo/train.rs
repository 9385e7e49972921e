//! Training loop, logs, and resumable checkpoints.

use super::adam::Adam;
use super::buffer::rollout;
use super::update::ppo_update;
use super::{PolicyParams, PpoError};
use crate::env::{is_success, CircuitEnv};
use crate::features::Observation;
use crate::oracles::Context;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub gamma: f64,
    pub gae_lambda: f64,
    pub clip_ratio: f64,
    pub learning_rate: f64,
    pub update_epochs: usize,
    pub minibatch_size: usize,
    pub entropy_coef: f64,
    pub value_coef: f64,
    pub max_grad_norm: f64,
    pub total_steps: u64,
    pub seed: u64,
    /// J, the rollout length
    pub rollout_steps: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            gamma: 0.99,
            gae_lambda: 0.95,
            clip_ratio: 0.2,
            learning_rate: 3e-4,
            update_epochs: 10,
            minibatch_size: 8,
            entropy_coef: 0.0,
            value_coef: 0.5,
            max_grad_norm: 0.5,
            total_steps: 2000,
            seed: 0,
            rollout_steps: 32,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), PpoError> {
        let mut problems = Vec::new();
        if !(0.0..1.0).contains(&self.clip_ratio) || self.clip_ratio == 0.0 {
            problems.push("clip_ratio must be in (0, 1)".to_string());
        }
        if self.rollout_steps == 0 {
            problems.push("rollout_steps must be positive".to_string());
        }
        if self.minibatch_size == 0 || self.rollout_steps % self.minibatch_size != 0 {
            problems.push(format!(
                "minibatch_size {} must divide rollout_steps {}",
                self.minibatch_size, self.rollout_steps
            ));
        }
        if self.learning_rate <= 0.0 {
            problems.push("learning_rate must be positive".to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(PpoError::Config(problems.join("; ")))
        }
    }
}

/// One row per rollout phase.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogRow {
    pub step: u64,
    pub mean_reward: f64,
    /// per-context success rate over episodes finished in this rollout;
    /// absent when the rollout saw no episode of that context
    pub success_rates: [Option<f64>; 4],
    pub oracle_calls: u64,
    pub cumulative_successes: u64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct TrainLog {
    pub rows: Vec<LogRow>,
}

impl TrainLog {
    pub fn reward_curve_csv(&self) -> String {
        let mut out = String::from(
            "step,mean_reward,success_piracy,success_trojan_loc,success_reverse_eng,success_obfuscation,oracle_calls\n",
        );
        for row in &self.rows {
            let rate = |i: usize| {
                row.success_rates[i].map(|r| format!("{r:.6}")).unwrap_or_default()
            };
            out.push_str(&format!(
                "{},{:.6},{},{},{},{},{}\n",
                row.step,
                row.mean_reward,
                rate(0),
                rate(1),
                rate(2),
                rate(3),
                row.oracle_calls
            ));
        }
        out
    }

    pub fn success_vs_queries_csv(&self) -> String {
        let mut out = String::from("oracle_calls,successful_episodes\n");
        for row in &self.rows {
            out.push_str(&format!("{},{}\n", row.oracle_calls, row.cumulative_successes));
        }
        out
    }
}

/// Everything needed to resume: parameters, optimizer moments, config, seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub step: u64,
    pub seed: u64,
    pub config: TrainConfig,
    pub params: PolicyParams,
    pub adam: Adam,
}

impl Checkpoint {
    pub fn to_json(&self) -> Result<String, PpoError> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Checkpoint, PpoError> {
        let ck: Checkpoint = serde_json::from_str(text)?;
        if ck.version != CHECKPOINT_VERSION {
            return Err(PpoError::Config(format!("unsupported checkpoint version {}", ck.version)));
        }
        Ok(ck)
    }
}

#[derive(Debug)]
pub struct TrainOutcome {
    pub params: PolicyParams,
    pub log: TrainLog,
    pub step: u64,
    pub checkpoint: Checkpoint,
    /// set when training stopped early on a non-finite loss; the returned
    /// parameters are the last good ones
    pub aborted: Option<String>,
}

/// Alternate rollouts and PPO updates until `total_steps` environment
/// steps. Deterministic for a fixed (seed, config, pools) in this
/// single-worker implementation.
pub fn train(
    env: &mut CircuitEnv,
    config: &TrainConfig,
    resume: Option<Checkpoint>,
) -> Result<TrainOutcome, PpoError> {
    config.validate()?;
    let (mut params, mut adam, start_step) = match resume {
        Some(ck) => (ck.params, ck.adam, ck.step),
        None => {
            let params = PolicyParams::new(config.seed);
            let adam = Adam::new(config.learning_rate, params.param_count());
            (params, adam, 0)
        }
    };

    let mut action_rng = ChaCha8Rng::seed_from_u64(config.seed);
    action_rng.set_stream(1);
    let mut shuffle_rng = ChaCha8Rng::seed_from_u64(config.seed);
    shuffle_rng.set_stream(2);

    let mut log = TrainLog::default();
    let mut carry: Option<Observation> = None;
    let mut step = start_step;
    let mut cumulative_successes = 0u64;
    let mut aborted = None;
    let mut last_good = Checkpoint {
        version: CHECKPOINT_VERSION,
        step,
        seed: config.seed,
        config: config.clone(),
        params: params.clone(),
        adam: adam.clone(),
    };

    while step < start_step + config.total_steps {
        let buffer = rollout(env, &params, config.rollout_steps, &mut action_rng, &mut carry)?;
        step += buffer.len() as u64;

        let mut rates: [Option<f64>; 4] = [None; 4];
        let mut counts = [0u64; 4];
        let mut wins = [0u64; 4];
        for (context, value) in &buffer.terminals {
            counts[context.index()] += 1;
            if is_success(*context, *value) {
                wins[context.index()] += 1;
                cumulative_successes += 1;
            }
        }
        for i in 0..4 {
            if counts[i] > 0 {
                rates[i] = Some(wins[i] as f64 / counts[i] as f64);
            }
        }
        log.rows.push(LogRow {
            step,
            mean_reward: buffer.mean_reward(),
            success_rates: rates,
            oracle_calls: env.oracle_calls(),
            cumulative_successes,
        });

        match ppo_update(&mut params, &mut adam, &buffer, config, &mut shuffle_rng) {
            Ok(_) => {
                last_good = Checkpoint {
                    version: CHECKPOINT_VERSION,
                    step,
                    seed: config.seed,
                    config: config.clone(),
                    params: params.clone(),
                    adam: adam.clone(),
                };
            }
            Err(PpoError::NonFinite(msg)) => {
                aborted = Some(msg);
                params = last_good.params.clone();
                break;
            }
            Err(e) => return Err(e),
        }
    }

    Ok(TrainOutcome { params, log, step, checkpoint: last_good, aborted })
}

/// Success-episode rate of a policy over `episodes` fresh episodes;
/// `uniform_random` replaces the policy with the uniform distribution.
pub fn evaluate_policy(
    env: &mut CircuitEnv,
    params: &PolicyParams,
    episodes: usize,
    seed: u64,
    uniform_random: bool,
    context: Option<Context>,
) -> Result<f64, PpoError> {
    use crate::techmap::ActionId;
    use rand::Rng;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(3);
    let mut wins = 0usize;
    for _ in 0..episodes {
        let mut obs = env.reset(context)?;
        loop {
            let action = if uniform_random {
                ActionId::from_index(rng.gen_range(0..ActionId::COUNT)).unwrap()
            } else {
                let (dist, _) = super::forward(params, &obs)?;
                ActionId::from_index(dist.sample(&mut rng)).unwrap()
            };
            let tr = env.step(action)?;
            if tr.done {
                let (ctx, _) = env.episode_context().expect("episode active");
                if is_success(ctx, tr.oracle_value.expect("terminal step scored")) {
                    wins += 1;
                }
                break;
            }
            obs = tr.next_observation;
        }
    }
    Ok(wins as f64 / episodes.max(1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::env::{EnvConfig, Instance};

    fn tiny_env(seed: u64) -> CircuitEnv {
        let instances = vec![
            Instance::Piracy { circuit: corpus::full_adder() },
            Instance::Piracy { circuit: corpus::c17() },
        ];
        CircuitEnv::new(instances, EnvConfig { seed, ..EnvConfig::default() }).unwrap()
    }

    #[test]
    fn zero_steps_returns_initial_params() {
        let mut env = tiny_env(0);
        let config = TrainConfig { total_steps: 0, ..TrainConfig::default() };
        let outcome = train(&mut env, &config, None).unwrap();
        assert_eq!(outcome.params, PolicyParams::new(config.seed));
        assert_eq!(outcome.step, 0);
        assert!(outcome.log.rows.is_empty());
    }

    #[test]
    fn log_rows_match_rollout_phases() {
        let mut env = tiny_env(1);
        let config = TrainConfig { total_steps: 96, ..TrainConfig::default() };
        let outcome = train(&mut env, &config, None).unwrap();
        assert_eq!(outcome.log.rows.len(), 3);
        assert_eq!(outcome.step, 96);
        assert!(outcome.aborted.is_none());
        let csv = outcome.log.reward_curve_csv();
        assert_eq!(csv.lines().count(), 4); // header + 3 rows
    }

    #[test]
    fn config_validation_reports_all_problems() {
        let config = TrainConfig {
            clip_ratio: 0.0,
            minibatch_size: 5,
            learning_rate: -1.0,
            ..TrainConfig::default()
        };
        match config.validate() {
            Err(PpoError::Config(msg)) => {
                assert!(msg.contains("clip_ratio"));
                assert!(msg.contains("minibatch_size"));
                assert!(msg.contains("learning_rate"));
            }
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn checkpoints_resume_monotonically() {
        let mut env = tiny_env(2);
        let config = TrainConfig { total_steps: 64, ..TrainConfig::default() };
        let first = train(&mut env, &config, None).unwrap();
        assert_eq!(first.checkpoint.step, 64);

        let text = first.checkpoint.to_json().unwrap();
        let restored = Checkpoint::from_json(&text).unwrap();
        let mut env2 = tiny_env(3);
        let resumed = train(&mut env2, &config, Some(restored)).unwrap();
        assert_eq!(resumed.step, 128);
    }

    #[test]
    fn training_is_bit_reproducible() {
        let run = |seed: u64| {
            let mut env = tiny_env(seed);
            let config = TrainConfig { total_steps: 64, seed, ..TrainConfig::default() };
            let outcome = train(&mut env, &config, None).unwrap();
            (
                outcome.checkpoint.to_json().unwrap(),
                outcome.log.reward_curve_csv(),
            )
        };
        let (ck1, log1) = run(7);
        let (ck2, log2) = run(7);
        assert_eq!(ck1, ck2);
        assert_eq!(log1, log2);
    }
}
