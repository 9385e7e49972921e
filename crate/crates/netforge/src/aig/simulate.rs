//! Bit-parallel AIG simulation, 64 vectors per machine word.

use super::{Aig, AigError, Lit, NodeKind};

/// Evaluate all nodes on one word of input patterns.
/// `input_words[i]` holds 64 packed values for input `i`.
/// Returns one word per node (constant node = all zeros).
pub(crate) fn node_words(aig: &Aig, input_words: &[u64]) -> Vec<u64> {
    debug_assert_eq!(input_words.len(), aig.num_inputs());
    let mut w = vec![0u64; aig.len()];
    let mut next_input = 0usize;
    for node in 0..aig.len() {
        match aig.kinds[node] {
            NodeKind::Const => w[node] = 0,
            NodeKind::Input => {
                w[node] = input_words[next_input];
                next_input += 1;
            }
            NodeKind::And(a, b) => {
                let av = w[a.node()] ^ if a.is_complemented() { !0 } else { 0 };
                let bv = w[b.node()] ^ if b.is_complemented() { !0 } else { 0 };
                w[node] = av & bv;
            }
        }
    }
    w
}

fn lit_word(words: &[u64], lit: Lit) -> u64 {
    words[lit.node()] ^ if lit.is_complemented() { !0 } else { 0 }
}

/// One word of packed patterns per input -> one word per output.
pub fn simulate_words(aig: &Aig, input_words: &[u64]) -> Result<Vec<u64>, AigError> {
    if input_words.len() != aig.num_inputs() {
        return Err(AigError::ArityMismatch {
            expected: aig.num_inputs(),
            got: input_words.len(),
        });
    }
    let w = node_words(aig, input_words);
    Ok(aig.outputs().iter().map(|(_, lit)| lit_word(&w, *lit)).collect())
}

/// Evaluate a list of input assignments; deterministic, order-preserving.
/// Each assignment must supply one value per primary input.
pub fn simulate(aig: &Aig, vectors: &[Vec<bool>]) -> Result<Vec<Vec<bool>>, AigError> {
    for v in vectors {
        if v.len() != aig.num_inputs() {
            return Err(AigError::ArityMismatch { expected: aig.num_inputs(), got: v.len() });
        }
    }
    let mut results = Vec::with_capacity(vectors.len());
    for chunk in vectors.chunks(64) {
        let mut input_words = vec![0u64; aig.num_inputs()];
        for (bit, v) in chunk.iter().enumerate() {
            for (i, val) in v.iter().enumerate() {
                if *val {
                    input_words[i] |= 1u64 << bit;
                }
            }
        }
        let out_words = simulate_words(aig, &input_words)?;
        for bit in 0..chunk.len() {
            results.push(out_words.iter().map(|w| (w >> bit) & 1 == 1).collect());
        }
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::netlist_to_aig;
    use crate::corpus;

    #[test]
    fn and2_truth() {
        let mut aig = Aig::new(["a", "b"]);
        let a = aig.input_lit(0);
        let b = aig.input_lit(1);
        let y = aig.and(a, b, None);
        aig.add_output("y", y);
        let out = simulate(&aig, &[vec![true, true], vec![true, false]]).unwrap();
        assert_eq!(out, vec![vec![true], vec![false]]);
    }

    #[test]
    fn full_adder_matches_arithmetic() {
        let aig = netlist_to_aig(&corpus::full_adder()).unwrap();
        for v in 0..8usize {
            let bits: Vec<bool> = (0..3).map(|i| (v >> i) & 1 == 1).collect();
            let expected_sum = bits.iter().filter(|b| **b).count();
            let out = simulate(&aig, &[bits]).unwrap();
            // outputs: sum, cout
            assert_eq!(out[0][0], expected_sum % 2 == 1);
            assert_eq!(out[0][1], expected_sum >= 2);
        }
    }

    #[test]
    fn packed_matches_scalar() {
        let aig = netlist_to_aig(&corpus::c17()).unwrap();
        let vectors: Vec<Vec<bool>> =
            (0..64).map(|v| (0..5).map(|i| (v >> i) & 1 == 1).collect()).collect();
        let packed = simulate(&aig, &vectors).unwrap();
        for (i, v) in vectors.iter().enumerate() {
            let single = simulate(&aig, std::slice::from_ref(v)).unwrap();
            assert_eq!(single[0], packed[i]);
        }
    }

    #[test]
    fn arity_checked() {
        let aig = netlist_to_aig(&corpus::c17()).unwrap();
        assert!(matches!(
            simulate(&aig, &[vec![true; 4]]),
            Err(AigError::ArityMismatch { expected: 5, got: 4 })
        ));
    }
}
