//! Black-box classifier boundary: built-in surrogate oracles for the four
//! attack contexts, toy dataset generators, and the line-delimited adapter
//! protocol for plugging in external classifiers.
//!
//! The surrogates are Weisfeiler-Lehman refinement models: nearest labeled
//! centroid in refinement space, realized as majority tables per refinement
//! depth with deepest-match lookup. They are deterministic, isomorphism
//! invariant, and bound the distinguishing power of message-passing
//! classifiers, so evading them exercises the same structural mechanics.

mod generators;
mod protocol;
mod surrogate;
mod wl;

pub use generators::{
    gen_obfuscated, gen_re_blocks, gen_trojan, key_gate_cells, tie_key_inputs, ReBlockKind,
    KEY_INPUT_PREFIX,
};
pub use protocol::{
    serve_protocol, AdapterClient, AdapterRequest, AdapterResponse, FaultMode, KeyGateRef,
    ServeMode, DEFAULT_TIMEOUT,
};
pub use surrogate::{
    key_prediction_accuracy, piracy_score, re_accuracy, train_key_oracle, train_node_oracle,
    trojan_loc_score, KeyOracle, NodeOracle, DEFAULT_TAU, DEFAULT_WL_DEPTH, FREE_LABEL, HT_LABEL,
    PIRACY_PROFILE_WEIGHTS,
};
pub use wl::{cosine_similarity, wl_node_labels, wl_profile, wl_signature, WlSignature};

use thiserror::Error;

/// Target-classifier context, one-hot encoded 1000/0100/0010/0001.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Context {
    Piracy,
    TrojanLoc,
    ReverseEng,
    Obfuscation,
}

impl Context {
    pub const ALL: [Context; 4] = [
        Context::Piracy,
        Context::TrojanLoc,
        Context::ReverseEng,
        Context::Obfuscation,
    ];

    pub fn one_hot(self) -> [f64; 4] {
        let mut v = [0.0; 4];
        v[self.index()] = 1.0;
        v
    }

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|c| *c == self).unwrap()
    }

    pub fn name(self) -> &'static str {
        match self {
            Context::Piracy => "piracy",
            Context::TrojanLoc => "trojan_loc",
            Context::ReverseEng => "reverse_eng",
            Context::Obfuscation => "obfuscation",
        }
    }

    pub fn parse(s: &str) -> Option<Context> {
        Self::ALL.iter().copied().find(|c| c.name() == s)
    }

    pub fn metric(self) -> GroundTruthMetric {
        match self {
            Context::Piracy => GroundTruthMetric::Similarity,
            Context::TrojanLoc => GroundTruthMetric::TsScore,
            Context::ReverseEng => GroundTruthMetric::Accuracy,
            Context::Obfuscation => GroundTruthMetric::Kpa,
        }
    }
}

impl std::fmt::Display for Context {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Which ground-truth quantity a score value measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroundTruthMetric {
    /// similarity in [-1, 1]; positive means flagged pirated
    Similarity,
    /// mean of true-positive and true-negative rates, [0, 1]
    TsScore,
    /// node classification accuracy, [0, 1]
    Accuracy,
    /// key prediction accuracy, [0, 1]
    Kpa,
}

impl GroundTruthMetric {
    pub fn range(self) -> (f64, f64) {
        match self {
            GroundTruthMetric::Similarity => (-1.0, 1.0),
            _ => (0.0, 1.0),
        }
    }
}

/// One classifier verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleScore {
    pub context: Context,
    pub value: f64,
    /// cell id -> predicted label or bit, when the oracle is node-level
    pub per_node: Option<std::collections::BTreeMap<u32, String>>,
    pub metric: GroundTruthMetric,
}

impl OracleScore {
    pub fn check_range(&self) -> Result<(), OracleError> {
        let (lo, hi) = self.metric.range();
        if !self.value.is_finite() || self.value < lo || self.value > hi {
            return Err(OracleError::OutOfRange {
                metric: self.metric,
                value: self.value,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("empty ground truth")]
    EmptyTruth,
    #[error("empty dataset")]
    EmptyDataset,
    #[error("cell {0} not found or not a key gate")]
    BadKeyGate(u32),
    #[error("trigger width {width} exceeds {pis} primary inputs")]
    TriggerTooWide { width: usize, pis: usize },
    #[error("need {wanted} lockable nets but only {available} are eligible")]
    InsufficientNets { wanted: usize, available: usize },
    #[error("unsupported block width {0} (expected 2, 4 or 8)")]
    BadWidth(usize),
    #[error("no block kinds requested")]
    NoKinds,
    #[error("{metric:?} value {value} is out of range")]
    OutOfRange { metric: GroundTruthMetric, value: f64 },
    #[error("adapter protocol violation: {0}")]
    Protocol(String),
    #[error("adapter timed out after {0:?}")]
    Timeout(std::time::Duration),
    #[error(transparent)]
    Netlist(#[from] crate::netlist::NetlistError),
    #[error("adapter i/o: {0}")]
    Io(#[from] std::io::Error),
}
