//! The contextual MDP: states are circuits, actions are allowlist
//! strategies, transitions are the deterministic synthesis recipe, and the
//! reward is the context's classifier score granted at episode end.
//!
//! Ground-truth node labels ride through transforms as cell provenance
//! tags: new cells inherit the majority tag of the cone they replace, and
//! the remaining untagged cells adopt their first tagged consumer. Key bits
//! need no migration; key gates are re-located through their named
//! `keyinput` nets.

use crate::features::{extract_features, make_observation, FeatureVector, Observation};
use crate::netlist::{CellId, Netlist};
use crate::oracles::{
    key_gate_cells, piracy_score, re_accuracy, trojan_loc_score, AdapterClient, Context,
    GroundTruthMetric, KeyGateRef, KeyOracle, NodeOracle, OracleError, OracleScore,
};
use crate::techmap::{apply_action, ActionId, TechmapError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("no circuits registered for context {0}")]
    EmptyPool(Context),
    #[error("no active episode; call reset first")]
    NoEpisode,
    #[error("episode is done; call reset")]
    EpisodeDone,
    #[error("setting cannot change during an active episode")]
    EpisodeActive,
    #[error("transformed circuit failed validation: {0}")]
    Validation(String),
    #[error(transparent)]
    Techmap(#[from] TechmapError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// One attackable circuit with its context-specific ground truth and the
/// (frozen) surrogate model that judges it.
#[derive(Debug, Clone)]
pub enum Instance {
    Piracy { circuit: Netlist },
    TrojanLoc { circuit: Netlist, oracle: Arc<NodeOracle> },
    ReverseEng { circuit: Netlist, oracle: Arc<NodeOracle> },
    Obfuscation { circuit: Netlist, key: Vec<bool>, oracle: Arc<KeyOracle> },
}

impl Instance {
    pub fn circuit(&self) -> &Netlist {
        match self {
            Instance::Piracy { circuit }
            | Instance::TrojanLoc { circuit, .. }
            | Instance::ReverseEng { circuit, .. }
            | Instance::Obfuscation { circuit, .. } => circuit,
        }
    }

    pub fn context(&self) -> Context {
        match self {
            Instance::Piracy { .. } => Context::Piracy,
            Instance::TrojanLoc { .. } => Context::TrojanLoc,
            Instance::ReverseEng { .. } => Context::ReverseEng,
            Instance::Obfuscation { .. } => Context::Obfuscation,
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnvConfig {
    pub seed: u64,
    /// reward scale for the piracy branch
    pub alpha: f64,
    /// discount carried to the trainer
    pub gamma: f64,
    /// piracy decision threshold
    pub tau: f64,
    /// evaluate the oracle at every step instead of only at episode end
    pub dense_rewards: bool,
    /// episode length per context, in `Context::ALL` order
    pub horizons: [usize; 4],
    /// forward the zero-cost flag to the transforms
    pub zero_cost: bool,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            seed: 0,
            alpha: 1.0,
            gamma: 0.99,
            tau: crate::oracles::DEFAULT_TAU,
            dense_rewards: false,
            horizons: [5, 1, 1, 5],
            zero_cost: false,
        }
    }
}

/// One environment step.
#[derive(Debug, Clone)]
pub struct Transition {
    pub observation: Observation,
    pub action: ActionId,
    pub reward: f64,
    pub next_observation: Observation,
    pub done: bool,
    pub features: FeatureVector,
    /// classifier value, present on evaluated steps (terminal, or all in
    /// dense mode)
    pub oracle_value: Option<f64>,
}

struct EpisodeState {
    context: Context,
    instance: usize,
    horizon: usize,
    step: usize,
    initial_features: FeatureVector,
    current: Netlist,
    obs: Observation,
    done: bool,
}

enum ContextOracle {
    Builtin,
    External(AdapterClient),
}

/// Episodic attack environment over per-context circuit pools.
pub struct CircuitEnv {
    pools: BTreeMap<Context, Vec<Instance>>,
    oracles: BTreeMap<Context, ContextOracle>,
    cfg: EnvConfig,
    rng: ChaCha8Rng,
    episode: Option<EpisodeState>,
    oracle_calls: u64,
}

impl CircuitEnv {
    pub fn new(instances: Vec<Instance>, cfg: EnvConfig) -> Result<Self, EnvError> {
        let mut pools: BTreeMap<Context, Vec<Instance>> = BTreeMap::new();
        for instance in instances {
            pools.entry(instance.context()).or_default().push(instance);
        }
        if pools.is_empty() {
            return Err(EnvError::EmptyPool(Context::Piracy));
        }
        let oracles = pools.keys().map(|c| (*c, ContextOracle::Builtin)).collect();
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Ok(CircuitEnv { pools, oracles, cfg, rng, episode: None, oracle_calls: 0 })
    }

    pub fn attach_external(&mut self, context: Context, client: AdapterClient) {
        self.oracles.insert(context, ContextOracle::External(client));
    }

    pub fn config(&self) -> &EnvConfig {
        &self.cfg
    }

    /// Contexts with a nonempty pool, in fixed order.
    pub fn contexts(&self) -> Vec<Context> {
        self.pools.keys().copied().collect()
    }

    pub fn pool(&self, context: Context) -> &[Instance] {
        self.pools.get(&context).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Classifier invocations so far (the query budget spent).
    pub fn oracle_calls(&self) -> u64 {
        self.oracle_calls
    }

    /// Switch between sparse and dense reward evaluation. Rejected while an
    /// episode is in flight.
    pub fn set_dense_rewards(&mut self, dense: bool) -> Result<(), EnvError> {
        if self.episode.as_ref().map(|e| !e.done).unwrap_or(false) {
            return Err(EnvError::EpisodeActive);
        }
        self.cfg.dense_rewards = dense;
        Ok(())
    }

    fn horizon(&self, context: Context) -> usize {
        self.cfg.horizons[context.index()].max(1)
    }

    /// Start an episode on a seeded-uniform (context, circuit) pick.
    pub fn reset(&mut self, context: Option<Context>) -> Result<Observation, EnvError> {
        let context = match context {
            Some(c) => c,
            None => {
                let available = self.contexts();
                available[self.rng.gen_range(0..available.len())]
            }
        };
        let pool = self.pools.get(&context).ok_or(EnvError::EmptyPool(context))?;
        if pool.is_empty() {
            return Err(EnvError::EmptyPool(context));
        }
        let instance = self.rng.gen_range(0..pool.len());
        let circuit = pool[instance].circuit().clone();
        let features = extract_features(&circuit);
        let obs = make_observation(&features, &features, context);
        self.episode = Some(EpisodeState {
            context,
            instance,
            horizon: self.horizon(context),
            step: 0,
            initial_features: features,
            current: circuit,
            obs,
            done: false,
        });
        Ok(obs)
    }

    /// Current episode context/instance, for logging.
    pub fn episode_context(&self) -> Option<(Context, usize)> {
        self.episode.as_ref().map(|e| (e.context, e.instance))
    }

    pub fn step(&mut self, action: ActionId) -> Result<Transition, EnvError> {
        let episode = self.episode.as_ref().ok_or(EnvError::NoEpisode)?;
        if episode.done {
            return Err(EnvError::EpisodeDone);
        }
        let (context, instance_idx) = (episode.context, episode.instance);
        let next = apply_action(&episode.current, action, self.cfg.zero_cost)?;
        let diagnostics = next.validate();
        if !diagnostics.is_empty() {
            return Err(EnvError::Validation(
                diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "),
            ));
        }

        let step = episode.step + 1;
        let done = step >= episode.horizon;
        let (reward, oracle_value) = if done || self.cfg.dense_rewards {
            let score = self.score_netlist(context, instance_idx, &next)?;
            (reward_for(context, score.value, self.cfg.alpha), Some(score.value))
        } else {
            (0.0, None)
        };

        let episode = self.episode.as_mut().expect("episode checked above");
        let features = extract_features(&next);
        let next_obs = make_observation(&features, &episode.initial_features, context);
        let transition = Transition {
            observation: episode.obs,
            action,
            reward,
            next_observation: next_obs,
            done,
            features,
            oracle_value,
        };
        episode.current = next;
        episode.obs = next_obs;
        episode.step = step;
        episode.done = done;
        Ok(transition)
    }

    /// Final circuit of a finished episode.
    pub fn final_circuit(&self) -> Option<&Netlist> {
        self.episode.as_ref().filter(|e| e.done).map(|e| &e.current)
    }

    /// Score a candidate against one pool instance's oracle. Counts one
    /// classifier call.
    pub fn score_netlist(
        &mut self,
        context: Context,
        instance_idx: usize,
        candidate: &Netlist,
    ) -> Result<OracleScore, EnvError> {
        self.oracle_calls += 1;
        let instance = &self.pools[&context][instance_idx];
        match self.oracles.get_mut(&context).expect("oracle per pooled context") {
            ContextOracle::Builtin => Ok(builtin_score(instance, candidate, self.cfg.tau)?),
            ContextOracle::External(client) => {
                let blif = crate::netlist::write_blif(candidate);
                let (reference, truth, key_gates) = match instance {
                    Instance::Piracy { circuit } => {
                        (Some(crate::netlist::write_blif(circuit)), None, None)
                    }
                    Instance::TrojanLoc { .. } | Instance::ReverseEng { .. } => {
                        let truth = truth_from_tags(candidate)
                            .into_iter()
                            .map(|(c, l)| (c.0.to_string(), l))
                            .collect();
                        (None, Some(truth), None)
                    }
                    Instance::Obfuscation { key, .. } => {
                        let gates = key_gate_cells(candidate)
                            .into_iter()
                            .filter_map(|(i, cell)| {
                                key.get(i).map(|bit| KeyGateRef { cell: cell.0, bit: *bit as u8 })
                            })
                            .collect();
                        (None, None, Some(gates))
                    }
                };
                Ok(client.query(context, blif, reference, truth, key_gates)?)
            }
        }
    }
}

fn builtin_score(
    instance: &Instance,
    candidate: &Netlist,
    tau: f64,
) -> Result<OracleScore, OracleError> {
    match instance {
        Instance::Piracy { circuit } => Ok(piracy_score(candidate, circuit, tau)),
        Instance::TrojanLoc { oracle, .. } => {
            let truth = truth_from_tags(candidate);
            trojan_loc_score(candidate, &truth, oracle)
        }
        Instance::ReverseEng { oracle, .. } => {
            let truth = truth_from_tags(candidate);
            re_accuracy(candidate, &truth, oracle)
        }
        Instance::Obfuscation { key, oracle, .. } => {
            let gates = key_gate_cells(candidate);
            if gates.is_empty() {
                return Err(OracleError::EmptyTruth);
            }
            let ids: Vec<CellId> = gates.iter().map(|(_, c)| *c).collect();
            let predicted = oracle.predict(candidate, &ids);
            let mut correct = 0usize;
            let mut per_node = BTreeMap::new();
            for ((key_index, cell), bit) in gates.iter().zip(&predicted) {
                let truth_bit = key.get(*key_index).copied().unwrap_or(false);
                if truth_bit == *bit {
                    correct += 1;
                }
                per_node.insert(cell.0, if *bit { "1".to_string() } else { "0".to_string() });
            }
            Ok(OracleScore {
                context: Context::Obfuscation,
                value: correct as f64 / gates.len() as f64,
                per_node: Some(per_node),
                metric: GroundTruthMetric::Kpa,
            })
        }
    }
}

/// Context-selected terminal reward from the classifier value.
pub fn reward_for(context: Context, oracle_value: f64, alpha: f64) -> f64 {
    match context {
        Context::Piracy => {
            if oracle_value < 0.0 {
                alpha
            } else {
                0.0
            }
        }
        Context::TrojanLoc | Context::ReverseEng => 1.0 - oracle_value,
        Context::Obfuscation => (-5.0 * (0.5 - oracle_value).abs()).exp(),
    }
}

/// Success predicates over oracle values.
pub fn is_success(context: Context, oracle_value: f64) -> bool {
    match context {
        Context::Piracy => oracle_value < 0.0,
        Context::TrojanLoc => oracle_value < 0.5,
        Context::ReverseEng => oracle_value <= 0.25,
        Context::Obfuscation => (0.50..=0.55).contains(&oracle_value),
    }
}

/// Ground-truth labels from cell provenance tags. Untagged cells adopt
/// their first tagged consumer (buffers and inverters inserted by the
/// mapper); anything still untagged falls back to the majority label.
pub fn truth_from_tags(netlist: &Netlist) -> BTreeMap<CellId, String> {
    let mut labels: Vec<Option<String>> = netlist.cells().iter().map(|c| c.tag.clone()).collect();
    let consumers = netlist.consumer_map();
    for _ in 0..netlist.cells().len() {
        let mut changed = false;
        for i in (0..labels.len()).rev() {
            if labels[i].is_some() {
                continue;
            }
            let output = netlist.cells()[i].output;
            if let Some(cs) = consumers.get(&output) {
                if let Some(tag) = cs.iter().find_map(|c| labels[c.0 as usize].clone()) {
                    labels[i] = Some(tag);
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let majority = {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for l in labels.iter().flatten() {
            *counts.entry(l.as_str()).or_insert(0) += 1;
        }
        counts
            .iter()
            .max_by_key(|(_, c)| **c)
            .map(|(l, _)| l.to_string())
            .unwrap_or_else(|| "FREE".to_string())
    };
    labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| (CellId(i as u32), l.unwrap_or_else(|| majority.clone())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::oracles::{gen_trojan, train_node_oracle, DEFAULT_WL_DEPTH};

    fn piracy_env(seed: u64) -> CircuitEnv {
        let instances = vec![
            Instance::Piracy { circuit: corpus::full_adder() },
            Instance::Piracy { circuit: corpus::c17() },
        ];
        CircuitEnv::new(instances, EnvConfig { seed, ..EnvConfig::default() }).unwrap()
    }

    #[test]
    fn reset_is_seed_deterministic() {
        let mut a = piracy_env(5);
        let mut b = piracy_env(5);
        for _ in 0..5 {
            let oa = a.reset(None).unwrap();
            let ob = b.reset(None).unwrap();
            assert_eq!(oa.0, ob.0);
            assert_eq!(a.episode_context(), b.episode_context());
        }
    }

    #[test]
    fn piracy_context_bits() {
        let mut env = piracy_env(1);
        let obs = env.reset(Some(Context::Piracy)).unwrap();
        assert_eq!(&obs.0[..4], &[1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn single_instance_pool_always_chosen() {
        let instances = vec![Instance::Piracy { circuit: corpus::c17() }];
        let mut env = CircuitEnv::new(instances, EnvConfig::default()).unwrap();
        for _ in 0..4 {
            env.reset(None).unwrap();
            assert_eq!(env.episode_context(), Some((Context::Piracy, 0)));
        }
    }

    #[test]
    fn sparse_rewards_are_zero_until_terminal() {
        let mut env = piracy_env(2);
        env.reset(Some(Context::Piracy)).unwrap();
        for t in 1..=5 {
            let tr = env.step(ActionId::A2).unwrap();
            if t < 5 {
                assert_eq!(tr.reward, 0.0);
                assert!(!tr.done);
                assert!(tr.oracle_value.is_none());
            } else {
                assert!(tr.done);
                assert!(tr.oracle_value.is_some());
            }
        }
        assert_eq!(env.oracle_calls(), 1);
        assert!(matches!(env.step(ActionId::Noop), Err(EnvError::EpisodeDone)));
    }

    #[test]
    fn noop_episode_gets_zero_piracy_reward() {
        let mut env = piracy_env(3);
        env.reset(Some(Context::Piracy)).unwrap();
        let mut last = None;
        for _ in 0..5 {
            last = Some(env.step(ActionId::Noop).unwrap());
        }
        let last = last.unwrap();
        assert!(last.done);
        assert_eq!(last.reward, 0.0);
        // identity candidate scores 1 - tau, well above the threshold
        assert!((last.oracle_value.unwrap() - 0.15).abs() < 1e-12);
    }

    #[test]
    fn dense_mode_calls_oracle_every_step() {
        let mut env = piracy_env(4);
        env.set_dense_rewards(true).unwrap();
        env.reset(Some(Context::Piracy)).unwrap();
        for _ in 0..5 {
            let tr = env.step(ActionId::A1).unwrap();
            assert!(tr.oracle_value.is_some());
        }
        assert_eq!(env.oracle_calls(), 5);
    }

    #[test]
    fn dense_toggle_rejected_mid_episode() {
        let mut env = piracy_env(4);
        env.reset(Some(Context::Piracy)).unwrap();
        env.step(ActionId::A1).unwrap();
        assert!(matches!(env.set_dense_rewards(true), Err(EnvError::EpisodeActive)));
    }

    #[test]
    fn trojan_episode_is_one_step() {
        let host = corpus::parity_chain(8);
        let (infested, truth) = gen_trojan(&host, 4, 1).unwrap();
        let oracle = train_node_oracle(&[(&infested, &truth)], DEFAULT_WL_DEPTH).unwrap();
        let instances = vec![Instance::TrojanLoc { circuit: infested, oracle: Arc::new(oracle) }];
        let mut env = CircuitEnv::new(instances, EnvConfig::default()).unwrap();
        env.reset(Some(Context::TrojanLoc)).unwrap();
        let tr = env.step(ActionId::A3).unwrap();
        assert!(tr.done);
        let value = tr.oracle_value.unwrap();
        assert!((0.0..=1.0).contains(&value));
        assert!((tr.reward - (1.0 - value)).abs() < 1e-12);
    }

    #[test]
    fn reward_equations() {
        // trojan / reverse-eng linear branch
        assert_eq!(reward_for(Context::TrojanLoc, 1.0, 1.0), 0.0);
        assert!((reward_for(Context::TrojanLoc, 0.4, 1.0) - 0.6).abs() < 1e-12);
        // obfuscation exponential branch
        assert!((reward_for(Context::Obfuscation, 0.5, 1.0) - 1.0).abs() < 1e-12);
        assert!((reward_for(Context::Obfuscation, 1.0, 1.0) - (-2.5f64).exp()).abs() < 1e-12);
        assert!((reward_for(Context::Obfuscation, 0.55, 1.0) - (-0.25f64).exp()).abs() < 1e-12);
        // piracy branch
        assert_eq!(reward_for(Context::Piracy, -0.2, 1.0), 1.0);
        assert_eq!(reward_for(Context::Piracy, 0.0, 1.0), 0.0);
        assert_eq!(reward_for(Context::Piracy, 0.2, 1.0), 0.0);
    }

    #[test]
    fn success_predicates() {
        assert!(!is_success(Context::TrojanLoc, 0.5));
        assert!(is_success(Context::TrojanLoc, 0.49));
        assert!(is_success(Context::ReverseEng, 0.25));
        assert!(!is_success(Context::ReverseEng, 0.26));
        assert!(!is_success(Context::Obfuscation, 0.56));
        assert!(is_success(Context::Obfuscation, 0.5));
        assert!(is_success(Context::Piracy, -0.01));
        assert!(!is_success(Context::Piracy, 0.0));
    }

    #[test]
    fn tags_migrate_through_actions() {
        let host = corpus::parity_chain(8);
        let (infested, _truth) = gen_trojan(&host, 3, 2).unwrap();
        let transformed = apply_action(&infested, ActionId::A4, false).unwrap();
        let migrated = truth_from_tags(&transformed);
        assert_eq!(migrated.len(), transformed.cells().len());
        let ht = migrated.values().filter(|v| *v == "HT").count();
        assert!(ht > 0, "trojan labels must survive resynthesis");
        assert!(migrated.values().any(|v| v == "FREE"));
    }
}
