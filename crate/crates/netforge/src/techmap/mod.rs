//! Agent actions: standard-cell selection strategies realized as
//! unmap -> `rewrite -> balance -> refactor` -> constrained mapping.
//!
//! Each non-noop action picks one allowlist row over six cell classes
//! (AND2/OR2, NAND2/NOR2, wide AND/OR, wide NAND/NOR, XOR/XNOR, INV/BUF).
//! [`map`] covers the AIG greedily: XOR/XNOR cones are pattern-matched
//! (falling back to the classic 4-NAND / 4-NOR realizations), same-kind
//! trees collapse into wide cells up to `max_wide_fanin`, and everything
//! else lands in the universal basis of the row. Wider cells win ties.

use crate::aig::{balance, netlist_to_aig, refactor, rewrite, Aig, AigError, Lit};
use crate::netlist::{
    cut_registers, restore_registers, GateKind, GateType, NetId, Netlist, NetlistError,
};
use std::collections::{BTreeSet, HashMap};
use thiserror::Error;

/// The eleven agent actions: ten allowlist rows plus no-op.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionId {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
    Noop,
}

impl ActionId {
    pub const ALL: [ActionId; 11] = [
        ActionId::A1,
        ActionId::A2,
        ActionId::A3,
        ActionId::A4,
        ActionId::A5,
        ActionId::A6,
        ActionId::A7,
        ActionId::A8,
        ActionId::A9,
        ActionId::A10,
        ActionId::Noop,
    ];

    pub const COUNT: usize = 11;

    pub fn index(self) -> usize {
        Self::ALL.iter().position(|a| *a == self).unwrap()
    }

    pub fn from_index(i: usize) -> Option<ActionId> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            ActionId::A1 => "a1",
            ActionId::A2 => "a2",
            ActionId::A3 => "a3",
            ActionId::A4 => "a4",
            ActionId::A5 => "a5",
            ActionId::A6 => "a6",
            ActionId::A7 => "a7",
            ActionId::A8 => "a8",
            ActionId::A9 => "a9",
            ActionId::A10 => "a10",
            ActionId::Noop => "noop",
        }
    }

    pub fn parse(s: &str) -> Option<ActionId> {
        Self::ALL.iter().copied().find(|a| a.name() == s.to_ascii_lowercase())
    }
}

impl std::fmt::Display for ActionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// The six allowlist columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CellClass {
    And2Or2,
    Nand2Nor2,
    WideAndOr,
    WideNandNor,
    XorXnor,
    InvBuf,
}

#[derive(Debug, Error)]
pub enum TechmapError {
    #[error("noop has no cell library")]
    NoopLibrary,
    #[error("cell library must always allow INV/BUF")]
    MissingInvBuf,
    #[error("cell library lacks a universal basis (NAND2/NOR2 or AND2/OR2)")]
    NoUniversalBasis,
    #[error(transparent)]
    Aig(#[from] AigError),
    #[error(transparent)]
    Netlist(#[from] NetlistError),
}

/// Allowed-cell set induced by one action row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellLibrary {
    allowed: BTreeSet<CellClass>,
    pub max_wide_fanin: usize,
}

impl CellLibrary {
    pub fn new(classes: impl IntoIterator<Item = CellClass>) -> Result<Self, TechmapError> {
        let allowed: BTreeSet<CellClass> = classes.into_iter().collect();
        if !allowed.contains(&CellClass::InvBuf) {
            return Err(TechmapError::MissingInvBuf);
        }
        if !allowed.contains(&CellClass::Nand2Nor2) && !allowed.contains(&CellClass::And2Or2) {
            return Err(TechmapError::NoUniversalBasis);
        }
        Ok(CellLibrary { allowed, max_wide_fanin: GateType::MAX_FAN_IN })
    }

    pub fn has(&self, class: CellClass) -> bool {
        self.allowed.contains(&class)
    }

    /// Whether a logic cell of this kind and fan-in may appear in mapped
    /// output. Registers and constants sit outside the allowlist columns.
    pub fn allows(&self, kind: GateKind, fan_in: usize) -> bool {
        match kind {
            GateKind::Inv | GateKind::Buf => self.has(CellClass::InvBuf),
            GateKind::And | GateKind::Or => {
                if fan_in <= 2 {
                    self.has(CellClass::And2Or2)
                } else {
                    fan_in <= self.max_wide_fanin && self.has(CellClass::WideAndOr)
                }
            }
            GateKind::Nand | GateKind::Nor => {
                if fan_in <= 2 {
                    self.has(CellClass::Nand2Nor2)
                } else {
                    fan_in <= self.max_wide_fanin && self.has(CellClass::WideNandNor)
                }
            }
            GateKind::Xor | GateKind::Xnor => self.has(CellClass::XorXnor),
            GateKind::Const0 | GateKind::Const1 | GateKind::Dff => true,
            GateKind::Other => false,
        }
    }
}

/// Exact transcription of the ten allowlist rows.
pub fn library_for_action(action: ActionId) -> Result<CellLibrary, TechmapError> {
    use CellClass::*;
    let classes: &[CellClass] = match action {
        ActionId::A1 => &[And2Or2, Nand2Nor2, XorXnor, InvBuf],
        ActionId::A2 => &[And2Or2, Nand2Nor2, WideAndOr, WideNandNor, XorXnor, InvBuf],
        ActionId::A3 => &[Nand2Nor2, InvBuf],
        ActionId::A4 => &[Nand2Nor2, WideNandNor, InvBuf],
        ActionId::A5 => &[Nand2Nor2, XorXnor, InvBuf],
        ActionId::A6 => &[Nand2Nor2, WideNandNor, XorXnor, InvBuf],
        ActionId::A7 => &[And2Or2, XorXnor, InvBuf],
        ActionId::A8 => &[And2Or2, WideAndOr, XorXnor, InvBuf],
        ActionId::A9 => &[And2Or2, InvBuf],
        ActionId::A10 => &[And2Or2, WideAndOr, InvBuf],
        ActionId::Noop => return Err(TechmapError::NoopLibrary),
    };
    CellLibrary::new(classes.iter().copied())
}

struct Mapper<'a> {
    aig: &'a Aig,
    lib: &'a CellLibrary,
    fanout: Vec<u32>,
    out: Netlist,
    memo: HashMap<Lit, NetId>,
}

impl<'a> Mapper<'a> {
    fn new(aig: &'a Aig, lib: &'a CellLibrary, name: String) -> Self {
        let mut out = Netlist::new(name);
        let mut memo = HashMap::new();
        for (i, pi) in aig.input_names().iter().enumerate() {
            let id = out.intern_net(pi);
            out.push_input(id);
            memo.insert(aig.input_lit(i), id);
        }
        Mapper { aig, lib, fanout: aig.fanout_counts(), out, memo }
    }

    fn emit(&mut self, kind: GateKind, inputs: Vec<NetId>, tag: Option<String>) -> NetId {
        let net = self.out.fresh_net();
        self.out.add_gate(kind, inputs, net, tag).expect("mapper emits valid arities");
        net
    }

    fn node_tag(&self, nodes: &[usize]) -> Option<String> {
        crate::aig::majority_tag(self.aig, nodes)
    }

    fn invert(&mut self, lit: Lit) -> NetId {
        let base = self.memo[&!lit];
        let tag = self.aig.tag(lit.node()).map(str::to_string);
        let net = self.emit(GateKind::Inv, vec![base], tag);
        self.memo.insert(lit, net);
        net
    }

    fn net_for(&mut self, lit: Lit) -> NetId {
        if let Some(net) = self.memo.get(&lit) {
            return *net;
        }
        if self.memo.contains_key(&!lit) {
            return self.invert(lit);
        }
        if lit.node() == Lit::FALSE.node() {
            let kind = if lit.is_complemented() { GateKind::Const1 } else { GateKind::Const0 };
            let net = self.emit(kind, vec![], None);
            self.memo.insert(lit, net);
            return net;
        }
        if self.aig.is_input(lit.node()) {
            // positive phase was seeded; only complements reach here
            return self.invert(lit);
        }

        if let Some(net) = self.try_xor(lit) {
            return net;
        }
        if let Some(net) = self.try_wide(lit) {
            return net;
        }
        self.two_input(lit)
    }

    /// XOR/XNOR cone: `~(p q) & ~(~p ~q)` crossings compute `p ^ q`.
    /// Shared internal nodes are allowed; any other consumer materializes
    /// them separately, the way cut-based covering duplicates logic.
    fn try_xor(&mut self, lit: Lit) -> Option<NetId> {
        let node = lit.node();
        let (a, b) = self.aig.fanins(node)?;
        if !a.is_complemented() || !b.is_complemented() {
            return None;
        }
        let (x1, x2) = (a.node(), b.node());
        if !self.aig.is_and(x1) || !self.aig.is_and(x2) {
            return None;
        }
        let (p, q) = self.aig.fanins(x1)?;
        let (r, s) = self.aig.fanins(x2)?;
        if !((r == !p && s == !q) || (r == !q && s == !p)) {
            return None;
        }
        // lit computes u ^ v ^ parity over the base variables
        let parity = p.is_complemented() ^ q.is_complemented() ^ lit.is_complemented();
        let tag = self.node_tag(&[node, x1, x2]);
        let u = self.net_for(p.positive());
        let v = self.net_for(q.positive());

        let net = if self.lib.has(CellClass::XorXnor) {
            let kind = if parity { GateKind::Xnor } else { GateKind::Xor };
            self.emit(kind, vec![u, v], tag)
        } else if self.lib.has(CellClass::Nand2Nor2) {
            if parity {
                // classic 4-NOR XNOR
                let n1 = self.emit(GateKind::Nor, vec![u, v], tag.clone());
                let n2 = self.emit(GateKind::Nor, vec![u, n1], tag.clone());
                let n3 = self.emit(GateKind::Nor, vec![n1, v], tag.clone());
                self.emit(GateKind::Nor, vec![n2, n3], tag)
            } else {
                // classic 4-NAND XOR
                let n1 = self.emit(GateKind::Nand, vec![u, v], tag.clone());
                let n2 = self.emit(GateKind::Nand, vec![u, n1], tag.clone());
                let n3 = self.emit(GateKind::Nand, vec![n1, v], tag.clone());
                self.emit(GateKind::Nand, vec![n2, n3], tag)
            }
        } else {
            // AND/OR/INV realization
            let nu = self.net_for(!p.positive());
            let nv = self.net_for(!q.positive());
            let (l, r) = if parity {
                (
                    self.emit(GateKind::And, vec![u, v], tag.clone()),
                    self.emit(GateKind::And, vec![nu, nv], tag.clone()),
                )
            } else {
                (
                    self.emit(GateKind::And, vec![u, nv], tag.clone()),
                    self.emit(GateKind::And, vec![nu, v], tag.clone()),
                )
            };
            self.emit(GateKind::Or, vec![l, r], tag)
        };
        self.memo.insert(lit, net);
        Some(net)
    }

    /// Maximal same-kind tree cover into wide cells (3..=max_wide_fanin).
    fn try_wide(&mut self, lit: Lit) -> Option<NetId> {
        let node = lit.node();
        if !self.aig.is_and(node) {
            return None;
        }
        let (leaves, members) = self.collect_tree(node);
        if leaves.len() < 3 || leaves.len() > self.lib.max_wide_fanin {
            return None;
        }
        let all_complemented = leaves.iter().all(|l| l.is_complemented());
        let neg = lit.is_complemented();
        let tag = self.node_tag(&members);

        // priority: complement-absorbing wide cell, then same-polarity wide
        // cell, then wide cell plus INV
        let plan: Option<(GateKind, bool, bool)> = if !neg {
            if all_complemented && self.lib.has(CellClass::WideNandNor) {
                Some((GateKind::Nor, true, false))
            } else if all_complemented && self.lib.has(CellClass::WideAndOr) {
                Some((GateKind::Or, true, true))
            } else if self.lib.has(CellClass::WideAndOr) {
                Some((GateKind::And, false, false))
            } else if self.lib.has(CellClass::WideNandNor) {
                Some((GateKind::Nand, false, true))
            } else {
                None
            }
        } else if all_complemented && self.lib.has(CellClass::WideAndOr) {
            Some((GateKind::Or, true, false))
        } else if all_complemented && self.lib.has(CellClass::WideNandNor) {
            Some((GateKind::Nor, true, true))
        } else if self.lib.has(CellClass::WideNandNor) {
            Some((GateKind::Nand, false, false))
        } else if self.lib.has(CellClass::WideAndOr) {
            Some((GateKind::And, false, true))
        } else {
            None
        };
        let (kind, use_bases, invert_after) = plan?;

        let input_nets: Vec<NetId> = leaves
            .iter()
            .map(|l| if use_bases { self.net_for(!*l) } else { self.net_for(*l) })
            .collect();
        let mut net = self.emit(kind, input_nets, tag.clone());
        if invert_after {
            // memo the pre-inversion phase too so the INV is shared
            self.memo.insert(!lit, net);
            net = self.emit(GateKind::Inv, vec![net], tag);
        }
        self.memo.insert(lit, net);
        Some(net)
    }

    fn collect_tree(&self, root: usize) -> (Vec<Lit>, Vec<usize>) {
        let mut leaves = Vec::new();
        let mut members = Vec::new();
        let mut stack = vec![Lit::new(root, false)];
        while let Some(l) = stack.pop() {
            let expandable = !l.is_complemented()
                && self.aig.is_and(l.node())
                && (l.node() == root || self.fanout[l.node()] == 1)
                && leaves.len() + stack.len() < self.lib.max_wide_fanin;
            if expandable {
                members.push(l.node());
                let (a, b) = self.aig.fanins(l.node()).unwrap();
                stack.push(b);
                stack.push(a);
            } else {
                leaves.push(l);
            }
        }
        (leaves, members)
    }

    fn two_input(&mut self, lit: Lit) -> NetId {
        let node = lit.node();
        let (a, b) = self.aig.fanins(node).expect("two_input maps AND nodes");
        let tag = self.node_tag(&[node]);
        let both_complemented = a.is_complemented() && b.is_complemented();
        let neg = lit.is_complemented();

        let net = if !neg {
            if both_complemented && self.lib.has(CellClass::Nand2Nor2) {
                let u = self.net_for(!a);
                let v = self.net_for(!b);
                self.emit(GateKind::Nor, vec![u, v], tag)
            } else if self.lib.has(CellClass::And2Or2) {
                let u = self.net_for(a);
                let v = self.net_for(b);
                self.emit(GateKind::And, vec![u, v], tag)
            } else {
                let u = self.net_for(a);
                let v = self.net_for(b);
                let n = self.emit(GateKind::Nand, vec![u, v], tag.clone());
                self.memo.insert(!lit, n);
                self.emit(GateKind::Inv, vec![n], tag)
            }
        } else if both_complemented && self.lib.has(CellClass::And2Or2) {
            let u = self.net_for(!a);
            let v = self.net_for(!b);
            self.emit(GateKind::Or, vec![u, v], tag)
        } else if self.lib.has(CellClass::Nand2Nor2) {
            let u = self.net_for(a);
            let v = self.net_for(b);
            self.emit(GateKind::Nand, vec![u, v], tag)
        } else {
            let u = self.net_for(a);
            let v = self.net_for(b);
            let n = self.emit(GateKind::And, vec![u, v], tag.clone());
            self.memo.insert(!lit, n);
            self.emit(GateKind::Inv, vec![n], tag)
        };
        self.memo.insert(lit, net);
        net
    }

    fn finish(mut self) -> Netlist {
        let outputs: Vec<(String, Lit)> = self.aig.outputs().to_vec();
        let mut claimed: BTreeSet<NetId> = BTreeSet::new();
        for (po_name, lit) in outputs {
            let net = self.net_for(lit);
            let is_pi = self.out.is_input(net);
            let name_matches = self.out.net_name(net) == po_name;
            if name_matches && !claimed.contains(&net) {
                self.out.push_output(net);
                claimed.insert(net);
                continue;
            }
            if !is_pi && !claimed.contains(&net) && self.out.find_net(&po_name).is_none() {
                self.out.rename_net(net, &po_name);
                self.out.push_output(net);
                claimed.insert(net);
                continue;
            }
            // name preservation needs a stand-in driver
            let tag = self.aig.tag(lit.node()).map(str::to_string);
            let po_net = self.out.intern_net(&po_name);
            self.out.add_gate(GateKind::Buf, vec![net], po_net, tag).expect("buf arity");
            self.out.push_output(po_net);
            claimed.insert(po_net);
        }
        self.out
    }
}

/// Cover an AIG with cells from the library. The output is functionally
/// equivalent, contains only allowed cells, and preserves port names.
pub fn map(aig: &Aig, library: &CellLibrary) -> Netlist {
    map_named(aig, library, "mapped".to_string())
}

pub fn map_named(aig: &Aig, library: &CellLibrary, name: String) -> Netlist {
    Mapper::new(aig, library, name).finish()
}

/// Apply one agent action: NOOP returns the input unchanged; any other
/// action runs the fixed `rewrite -> balance -> refactor` recipe on the
/// register-cut AIG and remaps under the action's allowlist.
pub fn apply_action(
    netlist: &Netlist,
    action: ActionId,
    zero_cost: bool,
) -> Result<Netlist, TechmapError> {
    if action == ActionId::Noop {
        return Ok(netlist.clone());
    }
    let library = library_for_action(action)?;
    let (cut, registers) = cut_registers(netlist);
    let aig = netlist_to_aig(&cut)?;
    let aig = rewrite(&aig, zero_cost);
    let aig = balance(&aig);
    let aig = refactor(&aig, zero_cost);
    let mapped = map_named(&aig, &library, netlist.name.clone());
    let restored = restore_registers(&mapped, &registers)?;
    debug_assert!(restored.validate().is_empty());
    Ok(restored)
}

/// Cells of `netlist` that the action's allowlist prohibits.
pub fn allowlist_violations(
    netlist: &Netlist,
    action: ActionId,
) -> Result<Vec<String>, TechmapError> {
    let library = library_for_action(action)?;
    let mut violations = Vec::new();
    for (i, cell) in netlist.cells().iter().enumerate() {
        if !library.allows(cell.gate.kind, cell.gate.fan_in) {
            violations.push(format!(
                "cell g{i} is {}{} which row {} prohibits",
                cell.gate.kind, cell.gate.fan_in, action
            ));
        }
    }
    Ok(violations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::{check_equivalence, EquivBudget, EquivalenceVerdict};
    use crate::corpus;
    use crate::netlist::write_blif;

    fn kinds(n: &Netlist) -> Vec<(GateKind, usize)> {
        n.cells().iter().map(|c| (c.gate.kind, c.gate.fan_in)).collect()
    }

    fn xor2_netlist() -> Netlist {
        let mut n = Netlist::new("xor2");
        let a = n.intern_net("a");
        let b = n.intern_net("b");
        let y = n.intern_net("y");
        n.push_input(a);
        n.push_input(b);
        n.push_output(y);
        n.add_gate(GateKind::Xor, vec![a, b], y, None).unwrap();
        n
    }

    #[test]
    fn table_rows_match_allowlist_columns() {
        let a1 = library_for_action(ActionId::A1).unwrap();
        assert!(a1.allows(GateKind::And, 2) && a1.allows(GateKind::Xor, 2));
        assert!(!a1.allows(GateKind::And, 3) && !a1.allows(GateKind::Nand, 3));

        let a3 = library_for_action(ActionId::A3).unwrap();
        assert!(a3.allows(GateKind::Nand, 2) && a3.allows(GateKind::Nor, 2));
        assert!(!a3.allows(GateKind::And, 2) && !a3.allows(GateKind::Xor, 2));
        assert!(a3.allows(GateKind::Inv, 1) && a3.allows(GateKind::Buf, 1));

        let a10 = library_for_action(ActionId::A10).unwrap();
        assert!(a10.allows(GateKind::And, 2) && a10.allows(GateKind::Or, 5));
        assert!(!a10.allows(GateKind::Nand, 2) && !a10.allows(GateKind::Xor, 2));

        for action in ActionId::ALL.iter().take(10) {
            let lib = library_for_action(*action).unwrap();
            assert!(lib.allows(GateKind::Inv, 1));
        }
        assert!(matches!(library_for_action(ActionId::Noop), Err(TechmapError::NoopLibrary)));
    }

    #[test]
    fn xor_under_a3_is_four_nands() {
        let n = xor2_netlist();
        let mapped = apply_action(&n, ActionId::A3, false).unwrap();
        let ks = kinds(&mapped);
        assert_eq!(ks.iter().filter(|(k, _)| *k == GateKind::Nand).count(), 4);
        assert!(ks.iter().all(|(k, _)| matches!(
            k,
            GateKind::Nand | GateKind::Nor | GateKind::Inv | GateKind::Buf
        )));
        let verdict = check_equivalence(&n, &mapped, &EquivBudget::default()).unwrap();
        assert_eq!(verdict, EquivalenceVerdict::EquivalentExhaustive);
    }

    #[test]
    fn xor_under_a5_is_one_xor_cell() {
        let n = xor2_netlist();
        let mapped = apply_action(&n, ActionId::A5, false).unwrap();
        let xor_cells = mapped
            .cells()
            .iter()
            .filter(|c| matches!(c.gate.kind, GateKind::Xor | GateKind::Xnor))
            .count();
        assert_eq!(xor_cells, 1);
        let verdict = check_equivalence(&n, &mapped, &EquivBudget::default()).unwrap();
        assert_eq!(verdict, EquivalenceVerdict::EquivalentExhaustive);
    }

    #[test]
    fn wide_and_collapses_under_a2_but_not_a1() {
        let chain = corpus::and_chain(8);
        let wide = apply_action(&chain, ActionId::A2, false).unwrap();
        assert!(kinds(&wide).contains(&(GateKind::And, 8)), "{:?}", kinds(&wide));
        let verdict = check_equivalence(&chain, &wide, &EquivBudget::default()).unwrap();
        assert_eq!(verdict, EquivalenceVerdict::EquivalentExhaustive);

        let narrow = apply_action(&chain, ActionId::A1, false).unwrap();
        assert!(narrow.cells().iter().all(|c| c.gate.fan_in <= 2));
        assert_eq!(narrow.cells().iter().filter(|c| c.gate.kind == GateKind::And).count(), 7);
        let verdict = check_equivalence(&chain, &narrow, &EquivBudget::default()).unwrap();
        assert_eq!(verdict, EquivalenceVerdict::EquivalentExhaustive);
    }

    #[test]
    fn noop_is_identity() {
        let fa = corpus::full_adder();
        let same = apply_action(&fa, ActionId::Noop, false).unwrap();
        assert_eq!(write_blif(&fa), write_blif(&same));
    }

    #[test]
    fn full_adder_under_a3_is_clean_and_equivalent() {
        let fa = corpus::full_adder();
        let mapped = apply_action(&fa, ActionId::A3, false).unwrap();
        assert!(allowlist_violations(&mapped, ActionId::A3).unwrap().is_empty());
        let verdict = check_equivalence(&fa, &mapped, &EquivBudget::default()).unwrap();
        assert_eq!(verdict, EquivalenceVerdict::EquivalentExhaustive);
    }

    #[test]
    fn composition_respects_last_allowlist() {
        let fa = corpus::full_adder();
        let first = apply_action(&fa, ActionId::A3, false).unwrap();
        let second = apply_action(&first, ActionId::A7, false).unwrap();
        assert!(allowlist_violations(&second, ActionId::A7).unwrap().is_empty());
        assert!(!second
            .cells()
            .iter()
            .any(|c| matches!(c.gate.kind, GateKind::Nand | GateKind::Nor)));
        let verdict = check_equivalence(&fa, &second, &EquivBudget::default()).unwrap();
        assert_eq!(verdict, EquivalenceVerdict::EquivalentExhaustive);
    }

    #[test]
    fn apply_action_is_deterministic() {
        let fa = corpus::full_adder();
        let one = apply_action(&fa, ActionId::A4, false).unwrap();
        let two = apply_action(&fa, ActionId::A4, false).unwrap();
        assert_eq!(write_blif(&one), write_blif(&two));
    }

    #[test]
    fn sequential_circuits_keep_registers() {
        let seq = corpus::sequential_toggle();
        let mapped = apply_action(&seq, ActionId::A3, false).unwrap();
        assert_eq!(mapped.cells().iter().filter(|c| c.gate.kind == GateKind::Dff).count(), 1);
        let verdict = check_equivalence(&seq, &mapped, &EquivBudget::default()).unwrap();
        assert_eq!(verdict, EquivalenceVerdict::EquivalentExhaustive);
    }

    #[test]
    fn all_actions_on_corpus_are_sound() {
        for circuit in [corpus::full_adder(), corpus::c17(), corpus::mux4(), corpus::majority3()] {
            for action in ActionId::ALL {
                let mapped = apply_action(&circuit, action, false).unwrap();
                assert!(mapped.validate().is_empty(), "{} {}", circuit.name, action);
                if action != ActionId::Noop {
                    assert!(
                        allowlist_violations(&mapped, action).unwrap().is_empty(),
                        "{} {}",
                        circuit.name,
                        action
                    );
                }
                let verdict =
                    check_equivalence(&circuit, &mapped, &EquivBudget::default()).unwrap();
                assert_eq!(
                    verdict,
                    EquivalenceVerdict::EquivalentExhaustive,
                    "{} {}",
                    circuit.name,
                    action
                );
            }
        }
    }
}
