//! Combinational equivalence checking by exhaustive or seeded random
//! simulation. Registers are cut to pseudo-ports before comparison.

use super::{netlist_to_aig, simulate_words, Aig, AigError};
use crate::netlist::{cut_registers, Netlist};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivBudget {
    /// Exhaustive enumeration up to this many primary inputs.
    pub max_exhaustive_inputs: usize,
    /// Random vectors used beyond the exhaustive bound.
    pub n_random: usize,
    pub seed: u64,
}

impl Default for EquivBudget {
    fn default() -> Self {
        EquivBudget { max_exhaustive_inputs: 12, n_random: 4096, seed: 0x4e46_4f52 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum EquivalenceVerdict {
    /// All `2^k` input vectors agree.
    EquivalentExhaustive,
    /// A replayable assignment (input name, value) on which outputs differ.
    NotEquivalent { counterexample: Vec<(String, bool)> },
    /// No difference found over `n_vectors` seeded random vectors.
    Unfalsified { n_vectors: usize, seed: u64 },
}

impl EquivalenceVerdict {
    pub fn holds(&self) -> bool {
        !matches!(self, EquivalenceVerdict::NotEquivalent { .. })
    }
}

struct Miter {
    aig_a: Aig,
    aig_b: Aig,
    /// input order taken from `a`; position of each input in `b`
    b_input_perm: Vec<usize>,
    /// for each output of `a`, the matching output index of `b`
    b_output_perm: Vec<usize>,
    input_names: Vec<String>,
}

fn build_miter(a: &Netlist, b: &Netlist) -> Result<Miter, AigError> {
    let (a_cut, _) = cut_registers(a);
    let (b_cut, _) = cut_registers(b);
    let aig_a = netlist_to_aig(&a_cut)?;
    let aig_b = netlist_to_aig(&b_cut)?;

    let names_a: Vec<String> = aig_a.input_names().to_vec();
    let mut b_input_perm = Vec::with_capacity(names_a.len());
    for name in &names_a {
        match aig_b.input_names().iter().position(|n| n == name) {
            Some(i) => b_input_perm.push(i),
            None => {
                return Err(AigError::PortMismatch(format!("input `{name}` missing in `{}`", b.name)))
            }
        }
    }
    if aig_b.num_inputs() != names_a.len() {
        return Err(AigError::PortMismatch(format!(
            "`{}` has {} inputs, `{}` has {}",
            a.name,
            names_a.len(),
            b.name,
            aig_b.num_inputs()
        )));
    }

    let mut b_output_perm = Vec::with_capacity(aig_a.outputs().len());
    for (name, _) in aig_a.outputs() {
        match aig_b.outputs().iter().position(|(n, _)| n == name) {
            Some(i) => b_output_perm.push(i),
            None => {
                return Err(AigError::PortMismatch(format!("output `{name}` missing in `{}`", b.name)))
            }
        }
    }
    if aig_b.outputs().len() != aig_a.outputs().len() {
        return Err(AigError::PortMismatch(format!(
            "`{}` has {} outputs, `{}` has {}",
            a.name,
            aig_a.outputs().len(),
            b.name,
            aig_b.outputs().len()
        )));
    }

    Ok(Miter { aig_a, aig_b, b_input_perm, b_output_perm, input_names: names_a })
}

impl Miter {
    /// Compare one word of packed vectors; on mismatch return the first
    /// differing bit position.
    fn compare_words(&self, words_a: &[u64]) -> Result<Option<usize>, AigError> {
        let mut words_b = vec![0u64; words_a.len()];
        for (i, w) in words_a.iter().enumerate() {
            words_b[self.b_input_perm[i]] = *w;
        }
        let out_a = simulate_words(&self.aig_a, words_a)?;
        let out_b = simulate_words(&self.aig_b, &words_b)?;
        let mut diff = 0u64;
        for (i, wa) in out_a.iter().enumerate() {
            diff |= wa ^ out_b[self.b_output_perm[i]];
        }
        Ok(if diff == 0 { None } else { Some(diff.trailing_zeros() as usize) })
    }
}

/// Check combinational equivalence of two netlists with matching port names.
///
/// Exhaustive over all `2^k` vectors when `k <= max_exhaustive_inputs`,
/// otherwise `n_random` seeded vectors. Counterexamples are the first found
/// in enumeration order, not minimized.
pub fn check_equivalence(
    a: &Netlist,
    b: &Netlist,
    budget: &EquivBudget,
) -> Result<EquivalenceVerdict, AigError> {
    let miter = build_miter(a, b)?;
    let k = miter.input_names.len();

    let counterexample = |assignment: &[bool]| -> EquivalenceVerdict {
        EquivalenceVerdict::NotEquivalent {
            counterexample: miter
                .input_names
                .iter()
                .cloned()
                .zip(assignment.iter().copied())
                .collect(),
        }
    };

    if k <= budget.max_exhaustive_inputs {
        let total: u64 = 1u64 << k;
        let mut base = 0u64;
        while base < total {
            // pack vectors base..base+64 columnwise: bit j of word i = input i of vector base+j
            let mut words = vec![0u64; k];
            let block = (total - base).min(64);
            for j in 0..block {
                let v = base + j;
                for (i, w) in words.iter_mut().enumerate() {
                    if (v >> i) & 1 == 1 {
                        *w |= 1u64 << j;
                    }
                }
            }
            if let Some(bit) = miter.compare_words(&words)? {
                if (bit as u64) < block {
                    let v = base + bit as u64;
                    let assignment: Vec<bool> = (0..k).map(|i| (v >> i) & 1 == 1).collect();
                    return Ok(counterexample(&assignment));
                }
            }
            base += 64;
        }
        return Ok(EquivalenceVerdict::EquivalentExhaustive);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(budget.seed);
    let mut done = 0usize;
    while done < budget.n_random {
        let block = (budget.n_random - done).min(64);
        let mask = if block == 64 { !0u64 } else { (1u64 << block) - 1 };
        let words: Vec<u64> = (0..k).map(|_| rng.next_u64() & mask).collect();
        if let Some(bit) = miter.compare_words(&words)? {
            if bit < block {
                let assignment: Vec<bool> =
                    (0..k).map(|i| (words[i] >> bit) & 1 == 1).collect();
                return Ok(counterexample(&assignment));
            }
        }
        done += block;
    }
    Ok(EquivalenceVerdict::Unfalsified { n_vectors: budget.n_random, seed: budget.seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::netlist::{parse_blif, write_blif, GateKind};

    #[test]
    fn identical_circuits_are_equivalent() {
        let fa = corpus::full_adder();
        let verdict = check_equivalence(&fa, &fa.clone(), &EquivBudget::default()).unwrap();
        assert_eq!(verdict, EquivalenceVerdict::EquivalentExhaustive);
    }

    #[test]
    fn xor_to_xnor_flip_is_caught() {
        let fa = corpus::full_adder();
        let mut text = write_blif(&fa);
        // flip the second XOR (sum gate) into an XNOR
        text = text.replacen(".names s1 cin sum\n10 1\n01 1\n", ".names s1 cin sum\n00 1\n11 1\n", 1);
        let flipped = parse_blif(&text).unwrap();
        assert!(flipped.cells().iter().any(|c| c.gate.kind == GateKind::Xnor));
        match check_equivalence(&fa, &flipped, &EquivBudget::default()).unwrap() {
            EquivalenceVerdict::NotEquivalent { counterexample } => {
                assert_eq!(counterexample.len(), 3);
                // replay the counterexample on both circuits
                let assignment: Vec<bool> = counterexample.iter().map(|(_, v)| *v).collect();
                let a = crate::netlist::eval_netlist(&fa, &assignment).unwrap();
                let b = crate::netlist::eval_netlist(&flipped, &assignment).unwrap();
                assert_ne!(a, b);
            }
            other => panic!("expected NotEquivalent, got {other:?}"),
        }
    }

    #[test]
    fn wide_circuit_is_unfalsified() {
        // 20 inputs: beyond the exhaustive bound
        let chain = corpus::and_chain(20);
        let verdict = check_equivalence(&chain, &chain.clone(), &EquivBudget::default()).unwrap();
        assert_eq!(
            verdict,
            EquivalenceVerdict::Unfalsified { n_vectors: 4096, seed: EquivBudget::default().seed }
        );
    }

    #[test]
    fn port_mismatch_is_an_error() {
        let fa = corpus::full_adder();
        let c17 = corpus::c17();
        assert!(matches!(
            check_equivalence(&fa, &c17, &EquivBudget::default()),
            Err(AigError::PortMismatch(_))
        ));
    }

    #[test]
    fn sequential_circuits_compare_after_cut() {
        let seq = corpus::sequential_toggle();
        let verdict = check_equivalence(&seq, &seq.clone(), &EquivBudget::default()).unwrap();
        assert_eq!(verdict, EquivalenceVerdict::EquivalentExhaustive);
    }
}
