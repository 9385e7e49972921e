//! Scratch calibration probe (not part of the test suite): measures
//! per-context attackability of the demo pools under every action.

use netforge::corpus;
use netforge::env::{is_success, CircuitEnv, EnvConfig, Instance};
use netforge::oracles::Context;
use netforge::techmap::ActionId;

fn main() {
    // per-circuit piracy outcome per final action
    println!("== piracy: score after a single action (tau 0.85)");
    for circuit in corpus::piracy_pool() {
        let mut env = CircuitEnv::new(
            vec![Instance::Piracy { circuit: circuit.clone() }],
            EnvConfig::default(),
        )
        .unwrap();
        let mut row = format!("{:<12}", circuit.name);
        let mut kill = 0;
        for action in ActionId::ALL.iter().take(10) {
            env.reset(Some(Context::Piracy)).unwrap();
            let mut tr = None;
            for _ in 0..5 {
                tr = Some(env.step(*action).unwrap());
            }
            let v = tr.unwrap().oracle_value.unwrap();
            let s = is_success(Context::Piracy, v);
            if s {
                kill += 1;
            }
            row.push_str(&format!(" {}{:+.2}", if s { '*' } else { ' ' }, v));
        }
        println!("{row}  killers={kill}/10");
    }

    // uniform-random baseline on the piracy pool
    for seed in [1u64, 2, 3] {
        let instances: Vec<Instance> =
            corpus::piracy_pool().into_iter().map(|c| Instance::Piracy { circuit: c }).collect();
        let mut env = CircuitEnv::new(instances, EnvConfig { seed, ..Default::default() }).unwrap();
        let params = netforge::ppo::PolicyParams::new(seed);
        let rate =
            netforge::ppo::evaluate_policy(&mut env, &params, 100, seed, true, Some(Context::Piracy))
                .unwrap();
        println!("uniform-random piracy baseline (seed {seed}): {rate:.2}");
    }

    println!("\n== trojan: ts score per action (success < 0.5)");
    for (idx, inst) in corpus::trojan_pool(40).into_iter().enumerate() {
        let mut env = CircuitEnv::new(vec![inst], EnvConfig::default()).unwrap();
        let mut row = format!("trojan[{idx}]");
        for action in ActionId::ALL {
            env.reset(Some(Context::TrojanLoc)).unwrap();
            let tr = env.step(action).unwrap();
            let v = tr.oracle_value.unwrap();
            row.push_str(&format!(
                " {}{:.2}",
                if is_success(Context::TrojanLoc, v) { '*' } else { ' ' },
                v
            ));
        }
        println!("{row}");
    }

    println!("\n== reverse-eng: accuracy per action (success <= 0.25)");
    for (idx, inst) in corpus::reverse_eng_pool(41).into_iter().enumerate() {
        let mut env = CircuitEnv::new(vec![inst], EnvConfig::default()).unwrap();
        let mut row = format!("re[{idx}]");
        for action in ActionId::ALL {
            env.reset(Some(Context::ReverseEng)).unwrap();
            let tr = env.step(action).unwrap();
            let v = tr.oracle_value.unwrap();
            row.push_str(&format!(
                " {}{:.2}",
                if is_success(Context::ReverseEng, v) { '*' } else { ' ' },
                v
            ));
        }
        println!("{row}");
    }

    println!("\n== obfuscation: kpa after random 5-action episodes (success in [0.5,0.55])");
    for (idx, inst) in corpus::obfuscation_pool(42).into_iter().enumerate() {
        let mut env =
            CircuitEnv::new(vec![inst], EnvConfig { seed: idx as u64, ..Default::default() })
                .unwrap();
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(idx as u64);
        let mut wins = 0;
        let mut values = Vec::new();
        for _ in 0..50 {
            env.reset(Some(Context::Obfuscation)).unwrap();
            let mut v = 0.0;
            for _ in 0..5 {
                let a = ActionId::from_index(rng.gen_range(0..ActionId::COUNT)).unwrap();
                let tr = env.step(a).unwrap();
                if let Some(val) = tr.oracle_value {
                    v = val;
                }
            }
            if is_success(Context::Obfuscation, v) {
                wins += 1;
            }
            values.push(v);
        }
        let mean: f64 = values.iter().sum::<f64>() / values.len() as f64;
        println!("obf[{idx}]: wins {wins}/50, mean kpa {mean:.3}");
    }
    pair_separation();
    weight_sweep();
    trojan_sweep();
}

#[allow(dead_code)]
fn weight_sweep() {
    use netforge::oracles::{cosine_similarity, wl_profile};
    use netforge::techmap::apply_action;
    println!("\n== piracy weight sweep (single-action kill fractions per pool circuit)");
    let pools = corpus::piracy_pool();
    for weights in [[4u64, 2, 1], [6, 2, 1], [8, 2, 1], [8, 3, 1], [12, 4, 1], [16, 4, 1]] {
        let mut per_circuit = Vec::new();
        let mut total_kill = 0usize;
        for circuit in &pools {
            let orig = wl_profile(circuit, &weights);
            let mut kills = 0;
            for action in ActionId::ALL.iter().take(10) {
                let mut cur = circuit.clone();
                for _ in 0..5 {
                    cur = apply_action(&cur, *action, false).unwrap();
                }
                let sim = cosine_similarity(&wl_profile(&cur, &weights), &orig);
                if sim - 0.85 < 0.0 {
                    kills += 1;
                }
            }
            per_circuit.push(kills);
            total_kill += kills;
        }
        // corpus pair separation under these weights
        let corpus20 = corpus::acceptance_corpus();
        let mut below = 0;
        let mut total = 0;
        for i in 0..corpus20.len() {
            for j in (i + 1)..corpus20.len() {
                let s = cosine_similarity(
                    &wl_profile(&corpus20[i], &weights),
                    &wl_profile(&corpus20[j], &weights),
                ) - 0.85;
                total += 1;
                if s < 0.0 {
                    below += 1;
                }
            }
        }
        println!(
            "weights {:?}: kills {:?} mean {:.2}, pairs below {}/{}",
            weights,
            per_circuit,
            total_kill as f64 / 100.0,
            below,
            total
        );
    }
}

#[allow(dead_code)]
fn trojan_sweep() {
    use netforge::oracles::{gen_trojan, train_node_oracle, trojan_loc_score, DEFAULT_WL_DEPTH};
    use netforge::env::truth_from_tags;
    use netforge::techmap::apply_action;
    println!("\n== trojan host sweep: min ts score over 10 actions");
    let hosts: Vec<(&str, netforge::netlist::Netlist)> = vec![
        ("parity8", corpus::parity_chain(8)),
        ("mux4", corpus::mux4()),
        ("c17", corpus::c17()),
        ("majority3", corpus::majority3()),
        ("and_chain8", corpus::and_chain(8)),
    ];
    for (name, host) in hosts {
        for width in [3usize, 4] {
            for seed in [1u64, 2, 3, 4] {
                if width > host.inputs().len() {
                    continue;
                }
                let (infested, truth) = gen_trojan(&host, width, seed).unwrap();
                let model = train_node_oracle(&[(&infested, &truth)], DEFAULT_WL_DEPTH).unwrap();
                let mut min_v: f64 = 1.0;
                let mut wins = 0;
                for action in ActionId::ALL.iter().take(10) {
                    let t = apply_action(&infested, *action, false).unwrap();
                    let tr = truth_from_tags(&t);
                    let v = trojan_loc_score(&t, &tr, &model).unwrap().value;
                    min_v = min_v.min(v);
                    if v < 0.5 {
                        wins += 1;
                    }
                }
                print!(" {name}/w{width}/s{seed}:{min_v:.2}({wins})");
            }
        }
        println!();
    }
}

#[allow(dead_code)]
fn pair_separation() {
    // criterion-9 style: fraction of distinct corpus pairs scoring below 0
    let corpus = netforge::corpus::acceptance_corpus();
    let mut total = 0;
    let mut below = 0;
    let mut worst: Vec<(String, String, f64)> = Vec::new();
    for i in 0..corpus.len() {
        for j in (i + 1)..corpus.len() {
            let s = netforge::oracles::piracy_score(&corpus[i], &corpus[j], 0.85);
            total += 1;
            if s.value < 0.0 {
                below += 1;
            } else {
                worst.push((corpus[i].name.clone(), corpus[j].name.clone(), s.value));
            }
        }
    }
    println!("\n== piracy pair separation: {below}/{total} pairs below 0");
    for (a, b, v) in worst {
        println!("  flagged pair {a} vs {b}: {v:+.3}");
    }
}
