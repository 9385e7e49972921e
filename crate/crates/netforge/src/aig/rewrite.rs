//! Local rewriting: two-level AND rules applied during a strashed rebuild.
//!
//! The rule set (idempotence, contradiction, subsumption, resolution,
//! substitution and fanin sharing) never adds more than one node per rebuilt
//! node and never increases depth, so with dead-node collection the result
//! is never larger than the input. The zero-cost variant additionally
//! reassociates single-fanout AND chains at equal size to perturb structure.

use super::{Aig, Lit};

/// Rewrite the AIG. `zero_cost = false` guarantees the node count does not
/// increase; `zero_cost = true` additionally admits equal-size
/// reassociations.
pub fn rewrite(aig: &Aig, zero_cost: bool) -> Aig {
    let mut cur = rewrite_pass(aig);
    for _ in 0..3 {
        let next = rewrite_pass(&cur);
        let stable = next.node_count() == cur.node_count();
        cur = next;
        if stable {
            break;
        }
    }
    if zero_cost {
        cur = reassociate_pass(&cur);
    }
    cur
}

fn map_lit(map: &[Lit], old: Lit) -> Lit {
    let m = map[old.node()];
    m.with_complement(m.is_complemented() ^ old.is_complemented())
}

fn live_set(aig: &Aig) -> Vec<bool> {
    let mut live = vec![false; aig.len()];
    let mut stack: Vec<usize> = aig.outputs().iter().map(|(_, l)| l.node()).collect();
    while let Some(n) = stack.pop() {
        if live[n] {
            continue;
        }
        live[n] = true;
        if let Some((a, b)) = aig.fanins(n) {
            stack.push(a.node());
            stack.push(b.node());
        }
    }
    live
}

fn rewrite_pass(aig: &Aig) -> Aig {
    let live = live_set(aig);
    let mut out = Aig::new(aig.input_names().iter().cloned());
    let mut map: Vec<Lit> = vec![Lit::FALSE; aig.len()];
    for n in 0..=aig.num_inputs() {
        map[n] = Lit::new(n, false);
    }
    for node in 0..aig.len() {
        if !live[node] {
            continue;
        }
        if let Some((a, b)) = aig.fanins(node) {
            let na = map_lit(&map, a);
            let nb = map_lit(&map, b);
            map[node] = smart_and(&mut out, na, nb, aig.tag(node));
        }
    }
    let outputs: Vec<(String, Lit)> =
        aig.outputs().iter().map(|(n, l)| (n.clone(), map_lit(&map, *l))).collect();
    for (name, lit) in outputs {
        out.add_output(name, lit);
    }
    compact(&out)
}

/// Plain rebuild keeping only output-reachable nodes.
pub(crate) fn compact(aig: &Aig) -> Aig {
    let live = live_set(aig);
    let mut out = Aig::new(aig.input_names().iter().cloned());
    let mut map: Vec<Lit> = vec![Lit::FALSE; aig.len()];
    for n in 0..=aig.num_inputs() {
        map[n] = Lit::new(n, false);
    }
    for node in 0..aig.len() {
        if !live[node] {
            continue;
        }
        if let Some((a, b)) = aig.fanins(node) {
            let na = map_lit(&map, a);
            let nb = map_lit(&map, b);
            map[node] = out.and(na, nb, aig.tag(node));
        }
    }
    let outputs: Vec<(String, Lit)> =
        aig.outputs().iter().map(|(n, l)| (n.clone(), map_lit(&map, *l))).collect();
    for (name, lit) in outputs {
        out.add_output(name, lit);
    }
    out
}

/// AND constructor with the two-level rule set.
pub(crate) fn smart_and(g: &mut Aig, a: Lit, b: Lit, tag: Option<&str>) -> Lit {
    if a == b || b == Lit::TRUE {
        return a;
    }
    if a == Lit::TRUE {
        return b;
    }
    if a == !b || a == Lit::FALSE || b == Lit::FALSE {
        return Lit::FALSE;
    }
    if let Some(lit) = try_rules(g, a, b, tag) {
        return lit;
    }
    g.and(a, b, tag)
}

fn try_rules(g: &mut Aig, a: Lit, b: Lit, tag: Option<&str>) -> Option<Lit> {
    for (x, y) in [(a, b), (b, a)] {
        let xn = x.node();
        if !g.is_and(xn) {
            continue;
        }
        let (x1, x2) = g.fanins(xn).unwrap();
        if !x.is_complemented() {
            // (x1 x2) y
            if y == x1 || y == x2 {
                return Some(x); // absorption
            }
            if y == !x1 || y == !x2 {
                return Some(Lit::FALSE); // contradiction
            }
            if g.is_and(y.node()) && !y.is_complemented() {
                let (y1, y2) = g.fanins(y.node()).unwrap();
                if x1 == !y1 || x1 == !y2 || x2 == !y1 || x2 == !y2 {
                    return Some(Lit::FALSE); // cross contradiction
                }
                // fanin sharing: (x1 x2)(x1 y2) = (x1 x2) y2
                if x1 == y1 || x2 == y1 {
                    return Some(smart_and(g, x, y2, tag));
                }
                if x1 == y2 || x2 == y2 {
                    return Some(smart_and(g, x, y1, tag));
                }
            }
        } else {
            // ~(x1 x2) y
            if y == !x1 || y == !x2 {
                return Some(y); // subsumption
            }
            if y == x1 {
                return Some(smart_and(g, !x2, y, tag)); // substitution
            }
            if y == x2 {
                return Some(smart_and(g, !x1, y, tag));
            }
            if g.is_and(y.node()) && y.is_complemented() {
                let (y1, y2) = g.fanins(y.node()).unwrap();
                // resolution: ~(x1 x2) ~(~x1 x2) = ~x2
                if (x1 == !y1 && x2 == y2) || (x1 == !y2 && x2 == y1) {
                    return Some(!x2);
                }
                if (x2 == !y1 && x1 == y2) || (x2 == !y2 && x1 == y1) {
                    return Some(!x1);
                }
            }
            if g.is_and(y.node()) && !y.is_complemented() {
                let (y1, y2) = g.fanins(y.node()).unwrap();
                // subsumption: y is already inside ~(x1 x2)
                if y1 == !x1 || y1 == !x2 || y2 == !x1 || y2 == !x2 {
                    return Some(y);
                }
                // substitution: ~(x1 x2)(x1 y2) = ~x2 (x1 y2)
                if y1 == x1 || y2 == x1 {
                    return Some(smart_and(g, !x2, y, tag));
                }
                if y1 == x2 || y2 == x2 {
                    return Some(smart_and(g, !x1, y, tag));
                }
            }
        }
    }
    None
}

/// Equal-size structural jitter: rotate left-deep single-fanout AND chains
/// ((x1 x2) y -> x1 (x2 y)). Never changes the node count.
fn reassociate_pass(aig: &Aig) -> Aig {
    let fanout = aig.fanout_counts();
    let live = live_set(aig);
    let mut out = Aig::new(aig.input_names().iter().cloned());
    let mut map: Vec<Lit> = vec![Lit::FALSE; aig.len()];
    for n in 0..=aig.num_inputs() {
        map[n] = Lit::new(n, false);
    }
    for node in 0..aig.len() {
        if !live[node] {
            continue;
        }
        if let Some((a, b)) = aig.fanins(node) {
            let tag = aig.tag(node);
            let rotated = if !a.is_complemented()
                && aig.is_and(a.node())
                && fanout[a.node()] == 1
                && !(!b.is_complemented() && aig.is_and(b.node()))
            {
                let (a1, a2) = aig.fanins(a.node()).unwrap();
                let inner = out.and(map_lit(&map, a2), map_lit(&map, b), tag);
                Some(out.and(map_lit(&map, a1), inner, tag))
            } else {
                None
            };
            map[node] = rotated.unwrap_or_else(|| {
                let na = map_lit(&map, a);
                let nb = map_lit(&map, b);
                out.and(na, nb, tag)
            });
        }
    }
    let outputs: Vec<(String, Lit)> =
        aig.outputs().iter().map(|(n, l)| (n.clone(), map_lit(&map, *l))).collect();
    for (name, lit) in outputs {
        out.add_output(name, lit);
    }
    let result = compact(&out);
    // rotation plus strashing can only shrink; keep the contract tight anyway
    debug_assert!(result.node_count() <= aig.node_count());
    result
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
    fn absorption_collapses_redundant_chain() {
        let mut aig = Aig::new(["a", "b"]);
        let a = aig.input_lit(0);
        let b = aig.input_lit(1);
        let ab = aig.and(a, b, None);
        let redundant = aig.and(ab, a, None); // (a b) a
        aig.add_output("y", redundant);
        assert_eq!(aig.node_count(), 2);

        let rw = rewrite(&aig, false);
        assert_eq!(rw.node_count(), 1);
        assert_equiv(&aig, &rw, "absorb");
    }

    #[test]
    fn shared_fanin_shrinks() {
        // (a b)(a c) -> (a b) c: at most 3 nodes and equivalent
        let mut aig = Aig::new(["a", "b", "c"]);
        let a = aig.input_lit(0);
        let b = aig.input_lit(1);
        let c = aig.input_lit(2);
        let ab = aig.and(a, b, None);
        let ac = aig.and(a, c, None);
        let top = aig.and(ab, ac, None);
        aig.add_output("y", top);
        assert_eq!(aig.node_count(), 3);

        let rw = rewrite(&aig, false);
        assert!(rw.node_count() <= 3);
        assert_equiv(&aig, &rw, "share");
        assert_eq!(rw.node_count(), 2);
    }

    #[test]
    fn never_grows() {
        for n in [corpus::full_adder(), corpus::c17(), corpus::majority3(), corpus::mux4()] {
            let aig = netlist_to_aig(&n).unwrap();
            let rw = rewrite(&aig, false);
            assert!(rw.node_count() <= aig.node_count(), "{}", n.name);
            assert_equiv(&aig, &rw, &n.name);
        }
    }

    #[test]
    fn zero_cost_keeps_size_and_function() {
        let aig = netlist_to_aig(&corpus::full_adder()).unwrap();
        let plain = rewrite(&aig, false);
        let zc = rewrite(&aig, true);
        assert_eq!(plain.node_count(), zc.node_count());
        assert_equiv(&plain, &zc, "zero-cost");
    }

    #[test]
    fn deterministic() {
        let aig = netlist_to_aig(&corpus::mux4()).unwrap();
        let r1 = rewrite(&aig, false);
        let r2 = rewrite(&aig, false);
        assert_eq!(r1.len(), r2.len());
        for n in 0..r1.len() {
            assert_eq!(r1.fanins(n), r2.fanins(n));
        }
    }
}
