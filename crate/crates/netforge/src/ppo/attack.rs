//! Attack driver: run stochastic episodes from one circuit and keep every
//! distinct successful adversarial result.

use super::{forward, PolicyParams, PpoError};
use crate::aig::{check_equivalence, EquivBudget, EquivalenceVerdict};
use crate::env::{is_success, CircuitEnv, EnvConfig, Instance};
use crate::netlist::{write_blif, Netlist};
use crate::oracles::{Context, OracleScore};
use crate::techmap::ActionId;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

#[derive(Debug, Clone)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub actions: Vec<ActionId>,
    pub oracle_value: f64,
    pub success: bool,
    pub equivalence: EquivalenceVerdict,
}

#[derive(Debug, Clone)]
pub struct AttackHit {
    pub episode: usize,
    pub circuit: Netlist,
    pub score: OracleScore,
    pub verdict: EquivalenceVerdict,
}

#[derive(Debug, Clone)]
pub struct AttackReport {
    pub context: Context,
    pub episodes: Vec<EpisodeRecord>,
    pub hits: Vec<AttackHit>,
    pub oracle_calls: u64,
}

/// Run `budget` stochastic episodes against one instance. Every distinct
/// final circuit that satisfies the context's success predicate is returned
/// with its equivalence verdict; duplicates (by serialized netlist) are
/// dropped.
pub fn attack(
    params: &PolicyParams,
    instance: Instance,
    budget: usize,
    seed: u64,
    env_cfg: EnvConfig,
) -> Result<AttackReport, PpoError> {
    let context = instance.context();
    let original = instance.circuit().clone();
    let mut env = CircuitEnv::new(vec![instance], EnvConfig { seed, ..env_cfg })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(4);

    let mut episodes = Vec::with_capacity(budget);
    let mut hits = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let equiv_budget = EquivBudget::default();

    for episode in 0..budget {
        let mut obs = env.reset(Some(context))?;
        let mut actions = Vec::new();
        let value;
        loop {
            let (dist, _) = forward(params, &obs)?;
            let action = ActionId::from_index(dist.sample(&mut rng)).unwrap();
            actions.push(action);
            let tr = env.step(action)?;
            if tr.done {
                value = tr.oracle_value.expect("terminal step scored");
                break;
            }
            obs = tr.next_observation;
        }
        let final_circuit = env.final_circuit().expect("episode finished").clone();
        let verdict = check_equivalence(&original, &final_circuit, &equiv_budget)
            .map_err(|e| PpoError::Config(format!("equivalence audit failed: {e}")))?;
        let success = is_success(context, value);
        episodes.push(EpisodeRecord {
            episode,
            actions,
            oracle_value: value,
            success,
            equivalence: verdict.clone(),
        });
        if success && seen.insert(write_blif(&final_circuit)) {
            let score = env.score_netlist(context, 0, &final_circuit)?;
            hits.push(AttackHit { episode, circuit: final_circuit, score, verdict });
        }
    }
    Ok(AttackReport { context, episodes, hits, oracle_calls: env.oracle_calls() })
}
