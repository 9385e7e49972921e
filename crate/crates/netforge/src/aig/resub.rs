//! Resubstitution: re-express a node as a function of up to two existing
//! divisor nodes. Candidates are screened by global simulation signatures
//! and confirmed exactly on the cone's truth tables before replacement.

use super::refactor::{apply_plans, collect_mffc, Expr, Plan, MAX_CONE_LEAVES};
use super::simulate::node_words;
use super::{Aig, Lit};
use crate::truth::TruthTable;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet, HashMap};

const SIG_WORDS: usize = 4;
const SIG_SEED: u64 = 0x5245_5355;
const MAX_DIVISORS: usize = 16;

type Signature = [u64; SIG_WORDS];

fn signatures(aig: &Aig) -> Vec<Signature> {
    let mut rng = ChaCha8Rng::seed_from_u64(SIG_SEED);
    let mut sigs = vec![[0u64; SIG_WORDS]; aig.len()];
    for w in 0..SIG_WORDS {
        let input_words: Vec<u64> = (0..aig.num_inputs()).map(|_| rng.next_u64()).collect();
        let words = node_words(aig, &input_words);
        for (n, word) in words.iter().enumerate() {
            sigs[n][w] = *word;
        }
    }
    sigs
}

fn sig_of(sigs: &[Signature], lit: Lit) -> Signature {
    let mut s = sigs[lit.node()];
    if lit.is_complemented() {
        for w in &mut s {
            *w = !*w;
        }
    }
    s
}

/// Cut of the cone above `root`: expand AND leaves (largest index first)
/// while the leaf count stays within the cone limit.
fn compute_cut(aig: &Aig, root: usize) -> Vec<usize> {
    let (a, b) = aig.fanins(root).expect("cut roots are AND nodes");
    let mut leaves: BTreeSet<usize> = [a.node(), b.node()].into_iter().collect();
    loop {
        let candidate = leaves.iter().rev().copied().find(|n| aig.is_and(*n));
        let Some(n) = candidate else { break };
        let (fa, fb) = aig.fanins(n).unwrap();
        let mut next = leaves.clone();
        next.remove(&n);
        next.insert(fa.node());
        next.insert(fb.node());
        if next.len() > MAX_CONE_LEAVES {
            break;
        }
        leaves = next;
    }
    leaves.into_iter().collect()
}

/// Nodes of `node`'s transitive fanin down to `leaves`, ascending; `None`
/// when the support escapes the leaf set.
fn cone_within(aig: &Aig, node: usize, leaves: &BTreeSet<usize>) -> Option<Vec<usize>> {
    let mut cone = BTreeSet::new();
    let mut stack = vec![node];
    while let Some(n) = stack.pop() {
        if leaves.contains(&n) || cone.contains(&n) {
            continue;
        }
        if !aig.is_and(n) {
            return None; // reached a PI or constant outside the cut
        }
        cone.insert(n);
        let (a, b) = aig.fanins(n).unwrap();
        stack.push(a.node());
        stack.push(b.node());
    }
    Some(cone.into_iter().collect())
}

fn table_of(
    aig: &Aig,
    node: usize,
    leaves: &[usize],
    cache: &mut HashMap<usize, TruthTable>,
) -> TruthTable {
    if let Some(t) = cache.get(&node) {
        return *t;
    }
    let (a, b) = aig.fanins(node).expect("tables are computed inside the cone");
    let ta = {
        let t = table_of(aig, a.node(), leaves, cache);
        if a.is_complemented() {
            t.not()
        } else {
            t
        }
    };
    let tb = {
        let t = table_of(aig, b.node(), leaves, cache);
        if b.is_complemented() {
            t.not()
        } else {
            t
        }
    };
    let t = ta.and(&tb);
    cache.insert(node, t);
    t
}

/// Resubstitute nodes with functions of existing divisors. Non-zero-cost
/// mode requires a net node-count reduction per replacement.
pub fn resub(aig: &Aig, zero_cost: bool) -> Aig {
    let fanout = aig.fanout_counts();
    let sigs = signatures(aig);
    let mut plans: BTreeMap<usize, Plan> = BTreeMap::new();
    let mut claimed: BTreeSet<usize> = BTreeSet::new();
    let mut protected: BTreeSet<usize> = BTreeSet::new();

    for root in (1 + aig.num_inputs()..aig.len()).rev() {
        if !aig.is_and(root) || fanout[root] == 0 || claimed.contains(&root) {
            continue;
        }
        let mut mffc = collect_mffc(aig, &fanout, root);
        mffc.sort_unstable();
        if mffc.iter().any(|n| claimed.contains(n) || protected.contains(n)) {
            continue;
        }
        let mffc_set: BTreeSet<usize> = mffc.iter().copied().collect();

        let cut = compute_cut(aig, root);
        let cut_set: BTreeSet<usize> = cut.iter().copied().collect();
        if cut.iter().any(|n| claimed.contains(n)) {
            continue;
        }
        let Some(root_cone) = cone_within(aig, root, &cut_set) else { continue };

        let nvars = cut.len();
        let mut cache: HashMap<usize, TruthTable> = HashMap::new();
        for (i, leaf) in cut.iter().enumerate() {
            cache.insert(*leaf, TruthTable::var(i, nvars));
        }
        let target = table_of(aig, root, &cut, &mut cache);
        let target_sig = sig_of(&sigs, Lit::new(root, false));

        // divisors: cut leaves plus earlier nodes expressible over the cut,
        // skipping anything that must survive only inside this root's MFFC
        let mut divisors: Vec<usize> = Vec::new();
        for leaf in &cut {
            divisors.push(*leaf);
        }
        for d in (1 + aig.num_inputs()..root).rev() {
            if divisors.len() >= MAX_DIVISORS + cut.len() {
                break;
            }
            if !aig.is_and(d) || mffc_set.contains(&d) || claimed.contains(&d) || cut_set.contains(&d) {
                continue;
            }
            if fanout[d] == 0 {
                continue;
            }
            match cone_within(aig, d, &cut_set) {
                Some(cone) if cone.iter().all(|n| !claimed.contains(n)) => {
                    // skip divisors that are interior to this root's cone;
                    // they vanish only if inside the MFFC, which is excluded
                    divisors.push(d);
                    let _ = &root_cone;
                }
                _ => continue,
            }
        }

        // constant target folds without divisors
        let mut chosen: Option<(Vec<Lit>, Expr, bool, usize)> = None; // (leaves, expr, compl, added)
        if target.is_zero() || target.is_ones() {
            chosen = Some((Vec::new(), Expr::Const(target.is_ones()), false, 0));
        }

        // single divisor
        if chosen.is_none() {
            'single: for d in &divisors {
                if *d == root {
                    continue;
                }
                let d_sig = sig_of(&sigs, Lit::new(*d, false));
                let matches_pos = d_sig == target_sig;
                let matches_neg = d_sig.iter().zip(&target_sig).all(|(a, b)| *a == !*b);
                if !matches_pos && !matches_neg {
                    continue;
                }
                let t = table_of(aig, *d, &cut, &mut cache);
                for compl in [false, true] {
                    let cand = if compl { t.not() } else { t };
                    if cand == target {
                        chosen = Some((
                            vec![Lit::new(*d, false)],
                            Expr::Leaf(0, compl),
                            false,
                            0,
                        ));
                        break 'single;
                    }
                }
            }
        }

        // two divisors through an AND (covers OR via output complement)
        if chosen.is_none() && mffc.len() >= 2 - usize::from(zero_cost) {
            'pairs: for i in 0..divisors.len() {
                for j in (i + 1)..divisors.len() {
                    let (d1, d2) = (divisors[i], divisors[j]);
                    let s1 = sig_of(&sigs, Lit::new(d1, false));
                    let s2 = sig_of(&sigs, Lit::new(d2, false));
                    for (c1, c2, co) in [(false, false, false), (true, false, false), (false, true, false), (true, true, false), (false, false, true), (true, false, true), (false, true, true), (true, true, true)] {
                        let mut ok = true;
                        for w in 0..SIG_WORDS {
                            let a = if c1 { !s1[w] } else { s1[w] };
                            let b = if c2 { !s2[w] } else { s2[w] };
                            let v = if co { !(a & b) } else { a & b };
                            if v != target_sig[w] {
                                ok = false;
                                break;
                            }
                        }
                        if !ok {
                            continue;
                        }
                        let t1 = table_of(aig, d1, &cut, &mut cache);
                        let t2 = table_of(aig, d2, &cut, &mut cache);
                        let a = if c1 { t1.not() } else { t1 };
                        let b = if c2 { t2.not() } else { t2 };
                        let v = if co { a.and(&b).not() } else { a.and(&b) };
                        if v == target {
                            let expr = Expr::And(
                                Box::new(Expr::Leaf(0, c1)),
                                Box::new(Expr::Leaf(1, c2)),
                            );
                            chosen = Some((
                                vec![Lit::new(d1, false), Lit::new(d2, false)],
                                expr,
                                co,
                                1,
                            ));
                            break 'pairs;
                        }
                    }
                }
            }
        }

        let Some((leaves, expr, complemented, added)) = chosen else { continue };
        let accept = if zero_cost { mffc.len() >= added } else { mffc.len() > added };
        if !accept {
            continue;
        }

        claimed.extend(mffc.iter().copied());
        protected.extend(leaves.iter().map(|l| l.node()));
        plans.insert(root, Plan { leaves, expr, complemented, tag: super::balance::majority_tag(aig, &mffc) });
    }

    if plans.is_empty() {
        return super::rewrite::compact(aig);
    }
    apply_plans(aig, &plans)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::{
        aig_to_netlist, check_equivalence, netlist_to_aig, EquivBudget,
    };
    use crate::corpus;

    fn assert_equiv(a: &Aig, b: &Aig, name: &str) {
        let an = aig_to_netlist(a, name);
        let bn = aig_to_netlist(b, name);
        let verdict = check_equivalence(&an, &bn, &EquivBudget::default()).unwrap();
        assert!(verdict.holds(), "{name}: {verdict:?}");
    }

    #[test]
    fn duplicate_cone_collapses_to_existing_node() {
        // f = (a b) c, g = a (b c): same function, different structure
        let mut aig = Aig::new(["a", "b", "c"]);
        let a = aig.input_lit(0);
        let b = aig.input_lit(1);
        let c = aig.input_lit(2);
        let ab = aig.and(a, b, None);
        let f = aig.and(ab, c, None);
        let bc = aig.and(b, c, None);
        let g = aig.and(a, bc, None);
        aig.add_output("f", f);
        aig.add_output("g", g);
        assert_eq!(aig.node_count(), 4);

        let rs = resub(&aig, false);
        assert!(rs.node_count() < 4, "node count should strictly drop");
        assert_equiv(&aig, &rs, "dup-cone");
    }

    #[test]
    fn no_divisors_means_no_change() {
        let mut aig = Aig::new(["a", "b"]);
        let a = aig.input_lit(0);
        let b = aig.input_lit(1);
        let y = aig.and(a, b, None);
        aig.add_output("y", y);
        let rs = resub(&aig, false);
        assert_eq!(rs.node_count(), 1);
        assert_eq!(rs.fanins(3), aig.fanins(3));
    }

    #[test]
    fn random_aigs_stay_equivalent() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4242);
        for case in 0..10 {
            let mut aig = Aig::new((0..8).map(|i| format!("x{i}")));
            let mut pool: Vec<Lit> = (0..8).map(|i| aig.input_lit(i)).collect();
            for _ in 0..30 {
                let a = pool[rng.gen_range(0..pool.len())];
                let b = pool[rng.gen_range(0..pool.len())];
                let lit = aig.and(
                    a.with_complement(a.is_complemented() ^ rng.gen_bool(0.5)),
                    b.with_complement(b.is_complemented() ^ rng.gen_bool(0.5)),
                    None,
                );
                pool.push(lit);
            }
            for (i, lit) in pool.iter().rev().take(3).enumerate() {
                aig.add_output(format!("y{i}"), *lit);
            }
            let rs = resub(&aig, false);
            assert!(rs.node_count() <= aig.node_count());
            assert_equiv(&aig, &rs, &format!("case {case}"));
        }
    }

    #[test]
    fn corpus_equivalence() {
        for n in [corpus::full_adder(), corpus::c17(), corpus::majority3(), corpus::mux4()] {
            let aig = netlist_to_aig(&n).unwrap();
            let rs = resub(&aig, false);
            assert_equiv(&aig, &rs, &n.name);
        }
    }
}
