//! The 13-entry circuit state vector and the agent observation.
//!
//! Feature order is fixed: inputs, outputs, gates, wires, then per-kind gate
//! counts AND/OR/NAND/NOR/INV/BUF/XOR/XNOR and a catch-all `other` bucket
//! (registers, constants, unrecognized cells). Wide gates count under their
//! base kind regardless of fan-in; wires are distinct nets, fanout counted
//! once.

use crate::netlist::{GateKind, Netlist};
use crate::oracles::Context;

pub const FEATURE_COUNT: usize = 13;
pub const OBSERVATION_DIM: usize = 4 + FEATURE_COUNT;

/// Column names, in vector order; also the CSV header.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "inputs", "outputs", "gates", "wires", "and", "or", "nand", "nor", "inv", "buf", "xor",
    "xnor", "other",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureVector(pub [u64; FEATURE_COUNT]);

impl FeatureVector {
    pub fn gates(&self) -> u64 {
        self.0[2]
    }

    pub fn csv_header() -> String {
        FEATURE_NAMES.join(",")
    }

    pub fn csv_row(&self) -> String {
        self.0.iter().map(u64::to_string).collect::<Vec<_>>().join(",")
    }
}

/// Count the state features of a netlist. Pseudo-ports do not exist here:
/// the netlist is the uncut circuit, registers land in `other`.
pub fn extract_features(netlist: &Netlist) -> FeatureVector {
    let mut v = [0u64; FEATURE_COUNT];
    v[0] = netlist.inputs().len() as u64;
    v[1] = netlist.outputs().len() as u64;
    v[2] = netlist.cells().len() as u64;
    v[3] = netlist.net_count() as u64;
    for cell in netlist.cells() {
        let idx = match cell.gate.kind {
            GateKind::And => 4,
            GateKind::Or => 5,
            GateKind::Nand => 6,
            GateKind::Nor => 7,
            GateKind::Inv => 8,
            GateKind::Buf => 9,
            GateKind::Xor => 10,
            GateKind::Xnor => 11,
            GateKind::Dff | GateKind::Const0 | GateKind::Const1 | GateKind::Other => 12,
        };
        v[idx] += 1;
    }
    FeatureVector(v)
}

/// Agent observation: 4 context bits followed by the 13 normalized counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation(pub [f64; OBSERVATION_DIM]);

impl Observation {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Normalize features against the episode's initial circuit: each count
/// becomes `log1p(count) / log1p(reference gates)`, clamped to `[0, 4]`,
/// with the context one-hot prepended. Dimension is always 17.
pub fn make_observation(
    features: &FeatureVector,
    reference: &FeatureVector,
    context: Context,
) -> Observation {
    assert!(reference.gates() >= 1, "reference circuit must have at least one gate");
    let scale = (reference.gates() as f64).ln_1p();
    let mut obs = [0.0f64; OBSERVATION_DIM];
    let one_hot = context.one_hot();
    obs[..4].copy_from_slice(&one_hot);
    for (i, count) in features.0.iter().enumerate() {
        obs[4 + i] = ((*count as f64).ln_1p() / scale).clamp(0.0, 4.0);
    }
    Observation(obs)
}
