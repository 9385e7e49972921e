//! Weisfeiler-Lehman refinement over netlist graphs.
//!
//! Node labels start from the gate kind and refine by hashing the sorted
//! fanin and fanout label multisets, with boundary markers for primary
//! inputs and outputs. Labels never see net or cell names, so isomorphic
//! netlists refine identically on every platform.

use crate::netlist::{Netlist};
use std::collections::BTreeMap;

const PI_MARKER: u64 = 0x5049;
const PO_MARKER: u64 = 0x504f;

fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

fn hash_parts(kind: u64, fanin: &[u64], fanout: &[u64]) -> u64 {
    let mut bytes = Vec::with_capacity(8 * (2 + fanin.len() + fanout.len()));
    bytes.extend_from_slice(&kind.to_le_bytes());
    bytes.push(0xFE);
    for l in fanin {
        bytes.extend_from_slice(&l.to_le_bytes());
    }
    bytes.push(0xFD);
    for l in fanout {
        bytes.extend_from_slice(&l.to_le_bytes());
    }
    fnv1a(bytes)
}

/// Per-depth node labels: `labels[d][cell]` is the label of `cell` after
/// `d` refinement rounds, for `d` in `0..=iterations`.
pub fn wl_node_labels(netlist: &Netlist, iterations: usize) -> Vec<Vec<u64>> {
    let n = netlist.cells().len();
    let driver = netlist.driver_map();
    let consumers = netlist.consumer_map();
    let po_count: BTreeMap<crate::netlist::NetId, usize> = {
        let mut m = BTreeMap::new();
        for po in netlist.outputs() {
            *m.entry(*po).or_insert(0) += 1;
        }
        m
    };

    let mut all = Vec::with_capacity(iterations + 1);
    let base: Vec<u64> = netlist
        .cells()
        .iter()
        .map(|c| fnv1a(c.gate.kind.name().bytes()))
        .collect();
    all.push(base);

    for _ in 0..iterations {
        let prev = all.last().unwrap();
        let mut next = Vec::with_capacity(n);
        for (i, cell) in netlist.cells().iter().enumerate() {
            let mut fanin: Vec<u64> = cell
                .inputs
                .iter()
                .map(|net| match driver.get(net) {
                    Some(d) => prev[d.0 as usize],
                    None => PI_MARKER,
                })
                .collect();
            fanin.sort_unstable();
            let mut fanout: Vec<u64> = consumers
                .get(&cell.output)
                .map(|cs| cs.iter().map(|c| prev[c.0 as usize]).collect())
                .unwrap_or_default();
            for _ in 0..po_count.get(&cell.output).copied().unwrap_or(0) {
                fanout.push(PO_MARKER);
            }
            fanout.sort_unstable();
            next.push(hash_parts(prev[i], &fanin, &fanout));
        }
        all.push(next);
    }
    all
}

/// Histogram of final-iteration labels; total count equals the cell count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WlSignature {
    pub histogram: BTreeMap<u64, u64>,
}

pub fn wl_signature(netlist: &Netlist, iterations: usize) -> WlSignature {
    let labels = wl_node_labels(netlist, iterations);
    let mut histogram = BTreeMap::new();
    for l in labels.last().unwrap() {
        *histogram.entry(*l).or_insert(0u64) += 1;
    }
    WlSignature { histogram }
}

/// Multi-resolution signature: every refinement depth contributes its
/// labels, weighted by `weights[d]` (heavier shallow depths make the
/// similarity robust against local restructuring, the way pooled embeddings
/// are). Keys mix the depth into the label so depths never collide.
pub fn wl_profile(netlist: &Netlist, weights: &[u64]) -> WlSignature {
    assert!(!weights.is_empty());
    let labels = wl_node_labels(netlist, weights.len() - 1);
    let mut histogram = BTreeMap::new();
    for (d, per_depth) in labels.iter().enumerate() {
        if weights[d] == 0 {
            continue;
        }
        for l in per_depth {
            let key = hash_parts(d as u64 + 0x6465_7074, &[*l], &[]);
            *histogram.entry(key).or_insert(0u64) += weights[d];
        }
    }
    WlSignature { histogram }
}

/// Cosine between two label histograms; 0 for disjoint label sets,
/// 1 for identical ones. Empty histograms compare as 1 to themselves.
pub fn cosine_similarity(a: &WlSignature, b: &WlSignature) -> f64 {
    if a.histogram.is_empty() && b.histogram.is_empty() {
        return 1.0;
    }
    let dot: f64 = a
        .histogram
        .iter()
        .filter_map(|(k, va)| b.histogram.get(k).map(|vb| (*va as f64) * (*vb as f64)))
        .sum();
    let norm = |s: &WlSignature| -> f64 {
        s.histogram.values().map(|v| (*v as f64) * (*v as f64)).sum::<f64>().sqrt()
    };
    let denominator = norm(a) * norm(b);
    if denominator == 0.0 {
        return 0.0;
    }
    dot / denominator
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::features::extract_features;
    use crate::netlist::{parse_blif, write_blif};

    /// Rename every net; the structure is untouched.
    fn renamed(netlist: &crate::netlist::Netlist) -> crate::netlist::Netlist {
        let mut text = write_blif(netlist);
        for (i, name) in ["a", "b", "cin", "sum", "cout", "s1", "c1", "c2"].iter().enumerate() {
            text = text.replace(&format!(" {name}\n"), &format!(" zz{i}\n"));
            text = text.replace(&format!(" {name} "), &format!(" zz{i} "));
        }
        parse_blif(&text).unwrap()
    }

    #[test]
    fn isomorphic_netlists_have_identical_signatures() {
        let fa = corpus::full_adder();
        let fb = renamed(&fa);
        assert_eq!(wl_signature(&fa, 2), wl_signature(&fb, 2));
        assert!((cosine_similarity(&wl_signature(&fa, 2), &wl_signature(&fb, 2)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn different_circuits_have_different_histograms() {
        let fa = wl_signature(&corpus::full_adder(), 2);
        let c17 = wl_signature(&corpus::c17(), 2);
        assert_ne!(fa, c17);
        assert!(cosine_similarity(&fa, &c17) < 0.5);
    }

    #[test]
    fn depth_zero_matches_feature_gate_counts() {
        let n = corpus::full_adder();
        let sig = wl_signature(&n, 0);
        let feats = extract_features(&n);
        let total: u64 = sig.histogram.values().sum();
        assert_eq!(total, feats.gates());
        // 3 distinct kinds: XOR, AND, OR
        assert_eq!(sig.histogram.len(), 3);
        let mut counts: Vec<u64> = sig.histogram.values().copied().collect();
        counts.sort_unstable();
        assert_eq!(counts, vec![1, 2, 2]);
    }

    #[test]
    fn refinement_distinguishes_position() {
        // both XOR cells share a depth-0 label but split at depth 2
        let n = corpus::full_adder();
        let labels = wl_node_labels(&n, 2);
        assert_eq!(labels[0][0], labels[0][1]);
        assert_ne!(labels[2][0], labels[2][1]);
    }
}
