//! And-inverter graphs: the functional core behind every transform.
//!
//! An [`Aig`] is an array of 2-input AND nodes with complemented edges and
//! structural hashing. Node 0 is the constant-false node, nodes `1..=k` are
//! the primary inputs, and AND nodes only reference earlier nodes, so the
//! array is always topologically ordered and acyclic by construction.
//!
//! Submodules implement the four functionality-preserving transforms
//! ([`balance`], [`rewrite`], [`refactor`], [`resub`]), bit-parallel
//! [`simulate`], and [`check_equivalence`].

mod balance;
mod equiv;
mod refactor;
mod resub;
mod rewrite;
mod simulate;

pub use balance::balance;
pub(crate) use balance::majority_tag;
pub use equiv::{check_equivalence, EquivBudget, EquivalenceVerdict};
pub use refactor::refactor;
pub use resub::resub;
pub use rewrite::rewrite;
pub use simulate::{simulate, simulate_words};

use crate::netlist::{GateKind, Netlist};
use std::collections::HashMap;
use thiserror::Error;

/// Edge literal: node index with a complement bit in the LSB.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub const FALSE: Lit = Lit(0);
    pub const TRUE: Lit = Lit(1);

    pub fn new(node: usize, complemented: bool) -> Lit {
        Lit((node as u32) << 1 | complemented as u32)
    }

    pub fn node(self) -> usize {
        (self.0 >> 1) as usize
    }

    pub fn is_complemented(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn complement(self) -> Lit {
        Lit(self.0 ^ 1)
    }

    pub fn with_complement(self, c: bool) -> Lit {
        Lit(self.0 & !1 | c as u32)
    }

    pub fn positive(self) -> Lit {
        Lit(self.0 & !1)
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        self.complement()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeKind {
    Const,
    Input,
    And(Lit, Lit),
}

#[derive(Debug, Error)]
pub enum AigError {
    #[error("netlist contains registers; cut the register boundary first")]
    RegisterBoundary,
    #[error("OTHER cell without a registered function table")]
    MissingFunction,
    #[error("simulation arity mismatch: expected {expected} inputs, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("primary port mismatch: {0}")]
    PortMismatch(String),
    #[error("netlist is invalid: {0}")]
    InvalidNetlist(String),
}

/// Structurally hashed and-inverter graph.
#[derive(Debug, Clone)]
pub struct Aig {
    kinds: Vec<NodeKind>,
    tags: Vec<Option<String>>,
    input_names: Vec<String>,
    outputs: Vec<(String, Lit)>,
    strash: HashMap<(Lit, Lit), usize>,
}

impl Aig {
    pub fn new<S: Into<String>>(input_names: impl IntoIterator<Item = S>) -> Self {
        let mut aig = Aig {
            kinds: vec![NodeKind::Const],
            tags: vec![None],
            input_names: Vec::new(),
            outputs: Vec::new(),
            strash: HashMap::new(),
        };
        for name in input_names {
            aig.kinds.push(NodeKind::Input);
            aig.tags.push(None);
            aig.input_names.push(name.into());
        }
        aig
    }

    pub fn num_inputs(&self) -> usize {
        self.input_names.len()
    }

    pub fn input_names(&self) -> &[String] {
        &self.input_names
    }

    pub fn input_lit(&self, idx: usize) -> Lit {
        assert!(idx < self.num_inputs());
        Lit::new(1 + idx, false)
    }

    pub fn outputs(&self) -> &[(String, Lit)] {
        &self.outputs
    }

    pub fn add_output(&mut self, name: impl Into<String>, lit: Lit) {
        self.outputs.push((name.into(), lit));
    }

    /// Total node array length (constant + inputs + ANDs).
    pub fn len(&self) -> usize {
        self.kinds.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of AND nodes.
    pub fn node_count(&self) -> usize {
        self.kinds.len() - 1 - self.num_inputs()
    }

    pub fn is_and(&self, node: usize) -> bool {
        matches!(self.kinds[node], NodeKind::And(..))
    }

    pub fn is_input(&self, node: usize) -> bool {
        matches!(self.kinds[node], NodeKind::Input)
    }

    pub fn fanins(&self, node: usize) -> Option<(Lit, Lit)> {
        match self.kinds[node] {
            NodeKind::And(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn tag(&self, node: usize) -> Option<&str> {
        self.tags[node].as_deref()
    }

    pub fn set_tag(&mut self, node: usize, tag: Option<String>) {
        self.tags[node] = tag;
    }

    /// AND with constant folding, one-level simplification and structural
    /// hashing. New nodes get `tag`; on a strash hit the existing node and
    /// its tag are kept.
    pub fn and(&mut self, a: Lit, b: Lit, tag: Option<&str>) -> Lit {
        debug_assert!(a.node() < self.len() && b.node() < self.len());
        if a == Lit::FALSE || b == Lit::FALSE || a == !b {
            return Lit::FALSE;
        }
        if a == Lit::TRUE {
            return b;
        }
        if b == Lit::TRUE || a == b {
            return a;
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        if let Some(&node) = self.strash.get(&(a, b)) {
            return Lit::new(node, false);
        }
        let node = self.kinds.len();
        self.kinds.push(NodeKind::And(a, b));
        self.tags.push(tag.map(str::to_string));
        self.strash.insert((a, b), node);
        Lit::new(node, false)
    }

    pub fn or(&mut self, a: Lit, b: Lit, tag: Option<&str>) -> Lit {
        !self.and(!a, !b, tag)
    }

    pub fn xor(&mut self, a: Lit, b: Lit, tag: Option<&str>) -> Lit {
        // ~(a b) & ~(~a ~b): three AND nodes after strashing, with the
        // positive-phase node computing XOR (keeps remapping phase-stable)
        let both = self.and(a, b, tag);
        let neither = self.and(!a, !b, tag);
        self.and(!both, !neither, tag)
    }

    /// Depth of each node (inputs and constant at 0).
    pub fn levels(&self) -> Vec<u32> {
        let mut lv = vec![0u32; self.len()];
        for node in 0..self.len() {
            if let NodeKind::And(a, b) = self.kinds[node] {
                lv[node] = 1 + lv[a.node()].max(lv[b.node()]);
            }
        }
        lv
    }

    /// Fanout count per node, counting output references.
    pub fn fanout_counts(&self) -> Vec<u32> {
        let mut fo = vec![0u32; self.len()];
        for node in 0..self.len() {
            if let NodeKind::And(a, b) = self.kinds[node] {
                fo[a.node()] += 1;
                fo[b.node()] += 1;
            }
        }
        for (_, lit) in &self.outputs {
            fo[lit.node()] += 1;
        }
        fo
    }

    /// Structural-hash health: every live AND signature appears once.
    pub fn strash_is_consistent(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        for node in 0..self.len() {
            if let NodeKind::And(a, b) = self.kinds[node] {
                if !seen.insert((a, b)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Convert a register-free, validated netlist to an AIG with the same
/// Boolean function per output. Gates expand to their standard AND/INV
/// decompositions (XOR becomes 3 AND nodes); OTHER cells expand through
/// their truth table's irredundant cover.
pub fn netlist_to_aig(netlist: &Netlist) -> Result<Aig, AigError> {
    let diags = netlist.validate();
    if !diags.is_empty() {
        return Err(AigError::InvalidNetlist(
            diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "),
        ));
    }
    if netlist.cells().iter().any(|c| c.gate.kind == GateKind::Dff) {
        return Err(AigError::RegisterBoundary);
    }

    let input_names: Vec<String> =
        netlist.inputs().iter().map(|n| netlist.net_name(*n).to_string()).collect();
    let mut aig = Aig::new(input_names);

    let mut net_lit: HashMap<crate::netlist::NetId, Lit> = HashMap::new();
    for (i, pi) in netlist.inputs().iter().enumerate() {
        net_lit.insert(*pi, aig.input_lit(i));
    }

    for cell_id in netlist.topo_order() {
        let cell = netlist.cell(cell_id);
        let tag = cell.tag.as_deref();
        let ins: Vec<Lit> = cell.inputs.iter().map(|n| net_lit[n]).collect();
        let fold_and = |aig: &mut Aig, lits: &[Lit]| {
            let mut acc = Lit::TRUE;
            for l in lits {
                acc = aig.and(acc, *l, tag);
            }
            acc
        };
        let out = match cell.gate.kind {
            GateKind::And => fold_and(&mut aig, &ins),
            GateKind::Nand => !fold_and(&mut aig, &ins),
            GateKind::Or => {
                let neg: Vec<Lit> = ins.iter().map(|l| !*l).collect();
                !fold_and(&mut aig, &neg)
            }
            GateKind::Nor => {
                let neg: Vec<Lit> = ins.iter().map(|l| !*l).collect();
                fold_and(&mut aig, &neg)
            }
            GateKind::Xor => aig.xor(ins[0], ins[1], tag),
            GateKind::Xnor => !aig.xor(ins[0], ins[1], tag),
            GateKind::Inv => !ins[0],
            GateKind::Buf => ins[0],
            GateKind::Const0 => Lit::FALSE,
            GateKind::Const1 => Lit::TRUE,
            GateKind::Other => {
                let table = cell.function.as_ref().ok_or(AigError::MissingFunction)?;
                let mut acc = Lit::FALSE;
                for cube in table.isop() {
                    let mut term = Lit::TRUE;
                    for (v, lit) in ins.iter().enumerate() {
                        if cube.pos & (1 << v) != 0 {
                            term = aig.and(term, *lit, tag);
                        } else if cube.neg & (1 << v) != 0 {
                            term = aig.and(term, !*lit, tag);
                        }
                    }
                    acc = aig.or(acc, term, tag);
                }
                acc
            }
            GateKind::Dff => unreachable!("registers rejected above"),
        };
        net_lit.insert(cell.output, out);
    }

    for po in netlist.outputs() {
        let lit = *net_lit.get(po).ok_or_else(|| {
            AigError::InvalidNetlist(format!("output `{}` undriven", netlist.net_name(*po)))
        })?;
        aig.add_output(netlist.net_name(*po).to_string(), lit);
    }
    Ok(aig)
}

/// Serialize an AIG back to a raw AND2/INV netlist (with BUF/CONST cells only
/// where a named port needs a stand-in driver). Port names are preserved.
pub fn aig_to_netlist(aig: &Aig, name: impl Into<String>) -> Netlist {
    let mut n = Netlist::new(name.into());
    let mut net_of: HashMap<Lit, crate::netlist::NetId> = HashMap::new();

    for (i, pi_name) in aig.input_names().iter().enumerate() {
        let id = n.intern_net(pi_name);
        n.push_input(id);
        net_of.insert(aig.input_lit(i), id);
    }

    // materialize every AND node reachable from the outputs
    let mut live = vec![false; aig.len()];
    let mut stack: Vec<usize> = aig.outputs().iter().map(|(_, l)| l.node()).collect();
    while let Some(node) = stack.pop() {
        if live[node] {
            continue;
        }
        live[node] = true;
        if let Some((a, b)) = aig.fanins(node) {
            stack.push(a.node());
            stack.push(b.node());
        }
    }

    fn lit_net(
        n: &mut Netlist,
        net_of: &mut HashMap<Lit, crate::netlist::NetId>,
        lit: Lit,
        tag: Option<String>,
    ) -> crate::netlist::NetId {
        if let Some(id) = net_of.get(&lit) {
            return *id;
        }
        // only complements of already-materialized literals reach here
        let base = net_of[&lit.positive()];
        let id = n.fresh_net();
        n.add_gate(GateKind::Inv, vec![base], id, tag).unwrap();
        net_of.insert(lit, id);
        id
    }

    for node in 0..aig.len() {
        if !live[node] {
            continue;
        }
        if let Some((a, b)) = aig.fanins(node) {
            let tag = aig.tag(node).map(str::to_string);
            let an = lit_net(&mut n, &mut net_of, a, tag.clone());
            let bn = lit_net(&mut n, &mut net_of, b, tag.clone());
            let out = n.fresh_net();
            n.add_gate(GateKind::And, vec![an, bn], out, tag).unwrap();
            net_of.insert(Lit::new(node, false), out);
        }
    }

    for (po_name, lit) in aig.outputs() {
        let id = n.intern_net(po_name);
        n.push_output(id);
        if *lit == Lit::FALSE || *lit == Lit::TRUE {
            let kind = if *lit == Lit::TRUE { GateKind::Const1 } else { GateKind::Const0 };
            n.add_cell(crate::netlist::Cell {
                gate: crate::netlist::GateType::new(kind, 0).unwrap(),
                inputs: vec![],
                output: id,
                tag: None,
                function: None,
            });
            continue;
        }
        let tag = aig.tag(lit.node()).map(str::to_string);
        let src = lit_net(&mut n, &mut net_of, *lit, tag.clone());
        if src != id {
            n.add_gate(GateKind::Buf, vec![src], id, tag).unwrap();
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::netlist::eval_netlist;

    #[test]
    fn inverter_makes_no_and_nodes() {
        let mut n = Netlist::new("inv");
        let a = n.intern_net("a");
        let y = n.intern_net("y");
        n.push_input(a);
        n.push_output(y);
        n.add_gate(GateKind::Inv, vec![a], y, None).unwrap();
        let aig = netlist_to_aig(&n).unwrap();
        assert_eq!(aig.node_count(), 0);
        assert!(aig.outputs()[0].1.is_complemented());
    }

    #[test]
    fn xor_is_three_ands() {
        let mut n = Netlist::new("x");
        let a = n.intern_net("a");
        let b = n.intern_net("b");
        let y = n.intern_net("y");
        n.push_input(a);
        n.push_input(b);
        n.push_output(y);
        n.add_gate(GateKind::Xor, vec![a, b], y, None).unwrap();
        let aig = netlist_to_aig(&n).unwrap();
        assert_eq!(aig.node_count(), 3);
    }

    #[test]
    fn full_adder_matches_netlist_evaluation() {
        let n = corpus::full_adder();
        let aig = netlist_to_aig(&n).unwrap();
        for v in 0..8u32 {
            let assignment: Vec<bool> = (0..3).map(|i| (v >> i) & 1 == 1).collect();
            let aig_out = simulate(&aig, &[assignment.clone()]).unwrap();
            let net_out = eval_netlist(&n, &assignment).unwrap();
            assert_eq!(aig_out[0], net_out, "vector {v:03b}");
        }
    }

    #[test]
    fn registers_are_rejected() {
        let n = corpus::sequential_toggle();
        assert!(matches!(netlist_to_aig(&n), Err(AigError::RegisterBoundary)));
    }

    #[test]
    fn round_trip_through_raw_netlist() {
        let n = corpus::full_adder();
        let aig = netlist_to_aig(&n).unwrap();
        let raw = aig_to_netlist(&aig, "fa_raw");
        assert!(raw.validate().is_empty());
        let verdict = check_equivalence(&n, &raw, &EquivBudget::default()).unwrap();
        assert_eq!(verdict, EquivalenceVerdict::EquivalentExhaustive);
    }

    #[test]
    fn strash_deduplicates() {
        let mut aig = Aig::new(["a", "b"]);
        let a = aig.input_lit(0);
        let b = aig.input_lit(1);
        let x = aig.and(a, b, None);
        let y = aig.and(b, a, None);
        assert_eq!(x, y);
        assert_eq!(aig.node_count(), 1);
        assert!(aig.strash_is_consistent());
    }
}
