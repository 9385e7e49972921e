//! Depth balancing: every maximal AND tree is rebuilt as a minimum-depth
//! binary decomposition.

use super::{Aig, Lit};
use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

struct Builder {
    out: Aig,
    levels: Vec<u32>,
}

impl Builder {
    fn new(aig: &Aig) -> Self {
        let out = Aig::new(aig.input_names().iter().cloned());
        let levels = vec![0u32; out.len()];
        Builder { out, levels }
    }

    fn and(&mut self, a: Lit, b: Lit, tag: Option<&str>) -> Lit {
        let lit = self.out.and(a, b, tag);
        while self.levels.len() < self.out.len() {
            let node = self.levels.len();
            let (fa, fb) = self.out.fanins(node).expect("new nodes are ANDs");
            let lv = 1 + self.levels[fa.node()].max(self.levels[fb.node()]);
            self.levels.push(lv);
        }
        lit
    }

    fn level(&self, l: Lit) -> u32 {
        self.levels[l.node()]
    }
}

/// Rebuild the AIG with each maximal AND tree balanced.
///
/// A tree edge is an uncomplemented fanin to a single-fanout AND node; the
/// tree's leaves are combined smallest-level-first, which is depth-optimal
/// for the given leaf levels. Node count never increases for pure trees
/// (shared structure is stopped at, so it is never duplicated).
pub fn balance(aig: &Aig) -> Aig {
    let fanout = aig.fanout_counts();
    let mut b = Builder::new(aig);
    let mut memo: HashMap<usize, Lit> = HashMap::new();

    fn build(
        aig: &Aig,
        fanout: &[u32],
        b: &mut Builder,
        memo: &mut HashMap<usize, Lit>,
        old: Lit,
    ) -> Lit {
        let node = old.node();
        if let Some(mapped) = memo.get(&node) {
            return mapped.with_complement(mapped.is_complemented() ^ old.is_complemented());
        }
        if !aig.is_and(node) {
            let mapped = Lit::new(node, false);
            memo.insert(node, mapped);
            return mapped.with_complement(old.is_complemented());
        }

        // collect the maximal AND tree rooted here
        let mut leaves: Vec<Lit> = Vec::new();
        let mut tree_nodes: Vec<usize> = Vec::new();
        let mut stack = vec![Lit::new(node, false)];
        while let Some(l) = stack.pop() {
            let expandable = !l.is_complemented()
                && aig.is_and(l.node())
                && (l.node() == node || fanout[l.node()] == 1);
            if expandable {
                tree_nodes.push(l.node());
                let (fa, fb) = aig.fanins(l.node()).unwrap();
                stack.push(fb);
                stack.push(fa);
            } else {
                leaves.push(l);
            }
        }

        let tag = majority_tag(aig, &tree_nodes);

        // combine mapped leaves two-lowest-levels-first (depth optimal)
        let mut heap: BinaryHeap<Reverse<(u32, Lit)>> = BinaryHeap::new();
        for leaf in leaves {
            let mapped = build(aig, fanout, b, memo, leaf);
            heap.push(Reverse((b.level(mapped), mapped)));
        }
        let mut result = Lit::TRUE;
        loop {
            match (heap.pop(), heap.pop()) {
                (Some(Reverse((_, x))), Some(Reverse((_, y)))) => {
                    let combined = b.and(x, y, tag.as_deref());
                    heap.push(Reverse((b.level(combined), combined)));
                }
                (Some(Reverse((_, x))), None) => {
                    result = x;
                    break;
                }
                _ => break,
            }
        }
        memo.insert(node, result);
        result.with_complement(result.is_complemented() ^ old.is_complemented())
    }

    let mut new_outputs = Vec::new();
    for (name, lit) in aig.outputs() {
        let mapped = build(aig, &fanout, &mut b, &mut memo, *lit);
        new_outputs.push((name.clone(), mapped));
    }
    for (name, lit) in new_outputs {
        b.out.add_output(name, lit);
    }
    b.out
}

pub(crate) fn majority_tag(aig: &Aig, nodes: &[usize]) -> Option<String> {
    let mut counts: std::collections::BTreeMap<&str, usize> = std::collections::BTreeMap::new();
    for n in nodes {
        if let Some(t) = aig.tag(*n) {
            *counts.entry(t).or_insert(0) += 1;
        }
    }
    // sorted iteration, so ties resolve to the lexicographically smallest label
    counts.iter().max_by_key(|(_, c)| **c).map(|(t, _)| t.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::{
        aig_to_netlist, check_equivalence, netlist_to_aig, EquivBudget, EquivalenceVerdict,
    };
    use crate::corpus;

    fn assert_equiv(a: &crate::netlist::Netlist, b: &Aig) {
        let bn = aig_to_netlist(b, a.name.clone());
        let verdict = check_equivalence(a, &bn, &EquivBudget::default()).unwrap();
        assert_eq!(verdict, EquivalenceVerdict::EquivalentExhaustive);
    }

    #[test]
    fn left_chain_becomes_log_depth() {
        let chain = corpus::and_chain(8);
        let aig = netlist_to_aig(&chain).unwrap();
        assert_eq!(aig.node_count(), 7);
        assert_eq!(*aig.levels().iter().max().unwrap(), 7);

        let balanced = balance(&aig);
        assert_eq!(balanced.node_count(), 7);
        assert_eq!(*balanced.levels().iter().max().unwrap(), 3);
        assert_equiv(&chain, &balanced);
    }

    #[test]
    fn balance_is_a_fixpoint() {
        let aig = netlist_to_aig(&corpus::and_chain(8)).unwrap();
        let once = balance(&aig);
        let twice = balance(&once);
        assert_eq!(once.node_count(), twice.node_count());
        assert_eq!(once.levels(), twice.levels());
        for n in 0..once.len() {
            assert_eq!(once.fanins(n), twice.fanins(n));
        }
    }

    #[test]
    fn full_adder_stays_equivalent() {
        let fa = corpus::full_adder();
        let aig = netlist_to_aig(&fa).unwrap();
        let balanced = balance(&aig);
        assert_equiv(&fa, &balanced);
    }

    #[test]
    fn shared_nodes_not_duplicated() {
        let fa = corpus::full_adder();
        let aig = netlist_to_aig(&fa).unwrap();
        let balanced = balance(&aig);
        assert!(balanced.node_count() <= aig.node_count());
        assert!(balanced.strash_is_consistent());
    }
}
