//! Cone refactoring: collapse maximal fanout-free cones (up to 8 leaves) to
//! truth tables and re-synthesize an algebraically factored form, accepting
//! it when strictly smaller (or also at equal size with `zero_cost`).

use super::balance::majority_tag;
use super::{Aig, Lit};
use crate::truth::{Cube, TruthTable};
use std::collections::{BTreeMap, BTreeSet, HashMap};

pub(crate) const MAX_CONE_LEAVES: usize = 8;

/// Factored expression over cone leaves.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Expr {
    Const(bool),
    /// leaf index, complemented
    Leaf(usize, bool),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub(crate) fn gate_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Leaf(..) => 0,
            Expr::And(a, b) | Expr::Or(a, b) => 1 + a.gate_count() + b.gate_count(),
        }
    }

    pub(crate) fn build(&self, aig: &mut Aig, leaves: &[Lit], tag: Option<&str>) -> Lit {
        match self {
            Expr::Const(true) => Lit::TRUE,
            Expr::Const(false) => Lit::FALSE,
            Expr::Leaf(i, c) => leaves[*i].with_complement(leaves[*i].is_complemented() ^ c),
            Expr::And(a, b) => {
                let x = a.build(aig, leaves, tag);
                let y = b.build(aig, leaves, tag);
                aig.and(x, y, tag)
            }
            Expr::Or(a, b) => {
                let x = a.build(aig, leaves, tag);
                let y = b.build(aig, leaves, tag);
                aig.or(x, y, tag)
            }
        }
    }
}

fn and_expr(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(true), x) | (x, Expr::Const(true)) => x,
        (Expr::Const(false), _) | (_, Expr::Const(false)) => Expr::Const(false),
        (a, b) => Expr::And(Box::new(a), Box::new(b)),
    }
}

fn or_expr(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(false), x) | (x, Expr::Const(false)) => x,
        (Expr::Const(true), _) | (_, Expr::Const(true)) => Expr::Const(true),
        (a, b) => Expr::Or(Box::new(a), Box::new(b)),
    }
}

fn cube_expr(cube: &Cube) -> Expr {
    let mut acc = Expr::Const(true);
    for v in 0..8 {
        if cube.pos & (1 << v) != 0 {
            acc = and_expr(acc, Expr::Leaf(v, false));
        } else if cube.neg & (1 << v) != 0 {
            acc = and_expr(acc, Expr::Leaf(v, true));
        }
    }
    acc
}

/// Algebraic factoring by most-common-literal division.
pub(crate) fn factor(cubes: &[Cube]) -> Expr {
    if cubes.is_empty() {
        return Expr::Const(false);
    }
    if cubes.len() == 1 {
        return cube_expr(&cubes[0]);
    }
    // most frequent literal; ties favor the lowest variable, positive phase
    let mut best: Option<(usize, bool, usize)> = None; // (var, positive, count)
    for v in 0..8usize {
        for positive in [true, false] {
            let mask = 1u8 << v;
            let count = cubes
                .iter()
                .filter(|c| if positive { c.pos & mask != 0 } else { c.neg & mask != 0 })
                .count();
            if count >= 2 && best.map(|(_, _, c)| count > c).unwrap_or(true) {
                best = Some((v, positive, count));
            }
        }
    }
    if let Some((v, positive, _)) = best {
        let mask = 1u8 << v;
        let mut quotient = Vec::new();
        let mut remainder = Vec::new();
        for c in cubes {
            let hit = if positive { c.pos & mask != 0 } else { c.neg & mask != 0 };
            if hit {
                let mut q = *c;
                if positive {
                    q.pos &= !mask;
                } else {
                    q.neg &= !mask;
                }
                quotient.push(q);
            } else {
                remainder.push(*c);
            }
        }
        let lit = Expr::Leaf(v, !positive);
        let head = and_expr(lit, factor(&quotient));
        return or_expr(head, factor(&remainder));
    }
    // no shared literal: plain OR of cube products
    let mut acc = Expr::Const(false);
    for c in cubes {
        acc = or_expr(acc, cube_expr(c));
    }
    acc
}

/// One accepted replacement: the root node is re-expressed over `leaves`.
pub(crate) struct Plan {
    pub leaves: Vec<Lit>,
    pub expr: Expr,
    pub complemented: bool,
    pub tag: Option<String>,
}

/// Nodes whose every fanout path stays inside the cone rooted at `root`.
pub(crate) fn collect_mffc(aig: &Aig, fanout: &[u32], root: usize) -> Vec<usize> {
    let mut counts = fanout.to_vec();
    let mut mffc = vec![root];
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        let (a, b) = aig.fanins(n).expect("MFFC members are AND nodes");
        for f in [a, b] {
            let fnode = f.node();
            if aig.is_and(fnode) {
                counts[fnode] -= 1;
                if counts[fnode] == 0 {
                    mffc.push(fnode);
                    stack.push(fnode);
                }
            }
        }
    }
    mffc
}

/// Leaf literals referenced by the cone from outside it, ordered by node.
fn cone_leaves(aig: &Aig, mffc: &[usize]) -> Vec<usize> {
    let inside: BTreeSet<usize> = mffc.iter().copied().collect();
    let mut leaves = BTreeSet::new();
    for n in mffc {
        let (a, b) = aig.fanins(*n).unwrap();
        for f in [a, b] {
            if !inside.contains(&f.node()) {
                leaves.insert(f.node());
            }
        }
    }
    leaves.into_iter().collect()
}

/// Truth table of `root` over the given leaf nodes, by propagation through
/// the cone (every non-leaf fanin must be in `tables`).
fn cone_tables(aig: &Aig, nodes_ascending: &[usize], leaves: &[usize]) -> HashMap<usize, TruthTable> {
    let nvars = leaves.len();
    let mut tables: HashMap<usize, TruthTable> = HashMap::new();
    for (i, leaf) in leaves.iter().enumerate() {
        tables.insert(*leaf, TruthTable::var(i, nvars));
    }
    for n in nodes_ascending {
        if tables.contains_key(n) {
            continue;
        }
        let (a, b) = aig.fanins(*n).unwrap();
        let ta = {
            let t = tables[&a.node()];
            if a.is_complemented() {
                t.not()
            } else {
                t
            }
        };
        let tb = {
            let t = tables[&b.node()];
            if b.is_complemented() {
                t.not()
            } else {
                t
            }
        };
        tables.insert(*n, ta.and(&tb));
    }
    tables
}

/// Rebuild the AIG applying the given root replacements.
pub(crate) fn apply_plans(aig: &Aig, plans: &BTreeMap<usize, Plan>) -> Aig {
    let mut out = Aig::new(aig.input_names().iter().cloned());
    let mut memo: HashMap<usize, Lit> = HashMap::new();
    for n in 0..=aig.num_inputs() {
        memo.insert(n, Lit::new(n, false));
    }

    fn copy(
        aig: &Aig,
        plans: &BTreeMap<usize, Plan>,
        out: &mut Aig,
        memo: &mut HashMap<usize, Lit>,
        old: Lit,
    ) -> Lit {
        if let Some(m) = memo.get(&old.node()) {
            return m.with_complement(m.is_complemented() ^ old.is_complemented());
        }
        let node = old.node();
        let mapped = if let Some(plan) = plans.get(&node) {
            let leaves: Vec<Lit> =
                plan.leaves.iter().map(|l| copy(aig, plans, out, memo, *l)).collect();
            let lit = plan.expr.build(out, &leaves, plan.tag.as_deref());
            lit.with_complement(lit.is_complemented() ^ plan.complemented)
        } else {
            let (a, b) = aig.fanins(node).expect("non-plan nodes are copied structurally");
            let na = copy(aig, plans, out, memo, a);
            let nb = copy(aig, plans, out, memo, b);
            out.and(na, nb, aig.tag(node))
        };
        memo.insert(node, mapped);
        mapped.with_complement(mapped.is_complemented() ^ old.is_complemented())
    }

    let outputs: Vec<(String, Lit)> = aig
        .outputs()
        .iter()
        .map(|(name, lit)| (name.clone(), copy(aig, plans, &mut out, &mut memo, *lit)))
        .collect();
    for (name, lit) in outputs {
        out.add_output(name, lit);
    }
    out
}

/// Refactor fanout-free cones through ISOP factoring.
pub fn refactor(aig: &Aig, zero_cost: bool) -> Aig {
    let fanout = aig.fanout_counts();
    let mut plans: BTreeMap<usize, Plan> = BTreeMap::new();
    let mut claimed: BTreeSet<usize> = BTreeSet::new();
    let mut protected: BTreeSet<usize> = BTreeSet::new();

    for root in (1 + aig.num_inputs()..aig.len()).rev() {
        if !aig.is_and(root) || fanout[root] == 0 || claimed.contains(&root) {
            continue;
        }
        let mut mffc = collect_mffc(aig, &fanout, root);
        mffc.sort_unstable();
        if mffc.len() < 2 {
            continue;
        }
        if mffc.iter().any(|n| claimed.contains(n) || protected.contains(n)) {
            continue;
        }
        let leaves = cone_leaves(aig, &mffc);
        if leaves.len() > MAX_CONE_LEAVES || leaves.iter().any(|n| claimed.contains(n)) {
            continue;
        }

        let tables = cone_tables(aig, &mffc, &leaves);
        let f = tables[&root];
        let direct = factor(&f.isop());
        let inverse = factor(&f.not().isop());
        let (expr, complemented) = if inverse.gate_count() < direct.gate_count() {
            (inverse, true)
        } else {
            (direct, false)
        };
        let cost = expr.gate_count();
        let accept = if zero_cost { cost <= mffc.len() } else { cost < mffc.len() };
        if !accept {
            continue;
        }

        claimed.extend(mffc.iter().copied());
        protected.extend(leaves.iter().copied());
        plans.insert(
            root,
            Plan {
                leaves: leaves.iter().map(|n| Lit::new(*n, false)).collect(),
                expr,
                complemented,
                tag: majority_tag(aig, &mffc),
            },
        );
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
    fn factors_common_literal() {
        // a b + a c: direct construction uses 3 AND nodes, factored a (b + c) uses 2
        let mut aig = Aig::new(["a", "b", "c"]);
        let a = aig.input_lit(0);
        let b = aig.input_lit(1);
        let c = aig.input_lit(2);
        let ab = aig.and(a, b, None);
        let ac = aig.and(a, c, None);
        let y = aig.or(ab, ac, None);
        aig.add_output("y", y);
        assert_eq!(aig.node_count(), 3);

        let rf = refactor(&aig, false);
        assert_eq!(rf.node_count(), 2);
        assert_equiv(&aig, &rf, "ab+ac");
    }

    #[test]
    fn minimal_cone_unchanged() {
        // single AND: nothing to refactor in non-zero-cost mode
        let mut aig = Aig::new(["a", "b"]);
        let a = aig.input_lit(0);
        let b = aig.input_lit(1);
        let y = aig.and(a, b, None);
        aig.add_output("y", y);
        let rf = refactor(&aig, false);
        assert_eq!(rf.node_count(), 1);
        assert_eq!(rf.fanins(3), aig.fanins(3));
    }

    #[test]
    fn corpus_equivalence() {
        for n in [corpus::full_adder(), corpus::c17(), corpus::majority3(), corpus::mux4()] {
            let aig = netlist_to_aig(&n).unwrap();
            let rf = refactor(&aig, false);
            assert!(rf.node_count() <= aig.node_count(), "{}", n.name);
            assert_equiv(&aig, &rf, &n.name);
        }
    }

    #[test]
    fn random_cones_stay_equivalent() {
        // 100 random 6-input cones
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for case in 0..100 {
            let mut aig = Aig::new((0..6).map(|i| format!("x{i}")));
            let mut pool: Vec<Lit> = (0..6).map(|i| aig.input_lit(i)).collect();
            for _ in 0..12 {
                let a = pool[rng.gen_range(0..pool.len())];
                let b = pool[rng.gen_range(0..pool.len())];
                let c1 = rng.gen_bool(0.5);
                let c2 = rng.gen_bool(0.5);
                let lit = aig.and(a.with_complement(a.is_complemented() ^ c1), b.with_complement(b.is_complemented() ^ c2), None);
                pool.push(lit);
            }
            let out = *pool.last().unwrap();
            aig.add_output("y", out);
            let rf = refactor(&aig, false);
            assert_equiv(&aig, &rf, &format!("case {case}"));
        }
    }
}
