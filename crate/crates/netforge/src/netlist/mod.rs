//! Gate-level netlists: the canonical structural representation.
//!
//! A [`Netlist`] is a named circuit of typed cells connected by named nets,
//! with ordered primary inputs and outputs. Every net has exactly one driver
//! (a primary input or one cell output), the combinational core is acyclic,
//! and every referenced net is driven; [`Netlist::validate`] reports each
//! violation as a [`Diagnostic`].
//!
//! Sequential circuits are handled by cutting the register boundary:
//! [`cut_registers`] turns DFF outputs into pseudo primary inputs and DFF
//! inputs into pseudo primary outputs, and [`restore_registers`] undoes the
//! cut by net name after transformation.

mod blif;
mod verilog;

pub use blif::{parse_blif, write_blif};
pub use verilog::parse_structural_verilog;

use crate::truth::TruthTable;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

/// Reserved prefix for nets invented by transforms and generators.
/// Source netlists must not use it, so fresh names can never collide.
pub const FRESH_NET_PREFIX: &str = "nfw_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NetId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(pub u32);

impl fmt::Display for NetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GateKind {
    And,
    Or,
    Nand,
    Nor,
    Xor,
    Xnor,
    Inv,
    Buf,
    Const0,
    Const1,
    Dff,
    Other,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Or => "OR",
            GateKind::Nand => "NAND",
            GateKind::Nor => "NOR",
            GateKind::Xor => "XOR",
            GateKind::Xnor => "XNOR",
            GateKind::Inv => "INV",
            GateKind::Buf => "BUF",
            GateKind::Const0 => "CONST0",
            GateKind::Const1 => "CONST1",
            GateKind::Dff => "DFF",
            GateKind::Other => "OTHER",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid gate: {0}")]
pub struct GateTypeError(String);

/// A gate kind together with its fan-in.
///
/// Fan-in rules: INV/BUF/DFF take 1 input, XOR/XNOR exactly 2,
/// AND/OR/NAND/NOR between 2 and 8, constants 0, OTHER 1 to 8.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GateType {
    pub kind: GateKind,
    pub fan_in: usize,
}

impl GateType {
    pub const MAX_FAN_IN: usize = 8;

    pub fn new(kind: GateKind, fan_in: usize) -> Result<Self, GateTypeError> {
        let ok = match kind {
            GateKind::Inv | GateKind::Buf | GateKind::Dff => fan_in == 1,
            GateKind::Xor | GateKind::Xnor => fan_in == 2,
            GateKind::And | GateKind::Or | GateKind::Nand | GateKind::Nor => {
                (2..=Self::MAX_FAN_IN).contains(&fan_in)
            }
            GateKind::Const0 | GateKind::Const1 => fan_in == 0,
            GateKind::Other => (1..=Self::MAX_FAN_IN).contains(&fan_in),
        };
        if ok {
            Ok(GateType { kind, fan_in })
        } else {
            Err(GateTypeError(format!("{} cannot have fan-in {}", kind, fan_in)))
        }
    }

    /// The Boolean function of one logic gate, inputs in cell order.
    /// `None` for DFF and OTHER (OTHER carries its own table on the cell).
    pub fn function(&self) -> Option<TruthTable> {
        let n = self.fan_in;
        let all = |f: fn(&TruthTable, &TruthTable) -> TruthTable, init: TruthTable| {
            let mut acc = init;
            for v in 0..n {
                acc = f(&acc, &TruthTable::var(v, n));
            }
            acc
        };
        let and = TruthTable::and;
        let or = TruthTable::or;
        Some(match self.kind {
            GateKind::And => all(and, TruthTable::ones(n)),
            GateKind::Nand => all(and, TruthTable::ones(n)).not(),
            GateKind::Or => all(or, TruthTable::zero(n)),
            GateKind::Nor => all(or, TruthTable::zero(n)).not(),
            GateKind::Xor => TruthTable::var(0, 2).xor(&TruthTable::var(1, 2)),
            GateKind::Xnor => TruthTable::var(0, 2).xor(&TruthTable::var(1, 2)).not(),
            GateKind::Inv => TruthTable::var(0, 1).not(),
            GateKind::Buf => TruthTable::var(0, 1),
            GateKind::Const0 => TruthTable::zero(0),
            GateKind::Const1 => TruthTable::ones(0),
            GateKind::Dff | GateKind::Other => return None,
        })
    }
}

/// One gate instance. `function` is present exactly for OTHER cells;
/// `tag` is an optional provenance label that rides through transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub gate: GateType,
    pub inputs: Vec<NetId>,
    pub output: NetId,
    pub tag: Option<String>,
    pub function: Option<TruthTable>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum DesignRule {
    MultipleDrivers,
    UndrivenNet,
    CombinationalCycle,
    ArityMismatch,
    DuplicatePort,
    MissingFunction,
}

impl fmt::Display for DesignRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DesignRule::MultipleDrivers => "multiple-drivers",
            DesignRule::UndrivenNet => "undriven-net",
            DesignRule::CombinationalCycle => "combinational-cycle",
            DesignRule::ArityMismatch => "arity-mismatch",
            DesignRule::DuplicatePort => "duplicate-port",
            DesignRule::MissingFunction => "missing-function",
        };
        f.write_str(s)
    }
}

/// One design-rule violation: the rule plus the offending nets/cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub rule: DesignRule,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.rule, self.message)
    }
}

#[derive(Debug, Error)]
pub enum NetlistError {
    #[error("syntax error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unsupported construct `{construct}` at line {line}")]
    Unsupported { line: usize, construct: String },
    #[error("netlist `{name}` violates design rules: {}", summarize(.diagnostics))]
    Invalid { name: String, diagnostics: Vec<Diagnostic> },
    #[error(transparent)]
    Gate(#[from] GateTypeError),
    #[error("{0}")]
    Other(String),
}

fn summarize(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ")
}

/// A named gate-level circuit. Treated as immutable once built; transforms
/// and generators construct new values.
#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    pub name: String,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
    cells: Vec<Cell>,
    net_names: Vec<String>,
    net_index: HashMap<String, NetId>,
}

impl Netlist {
    pub fn new(name: impl Into<String>) -> Self {
        Netlist {
            name: name.into(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            cells: Vec::new(),
            net_names: Vec::new(),
            net_index: HashMap::new(),
        }
    }

    pub fn inputs(&self) -> &[NetId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NetId] {
        &self.outputs
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, id: CellId) -> &Cell {
        &self.cells[id.0 as usize]
    }

    pub(crate) fn cell_mut(&mut self, id: CellId) -> &mut Cell {
        &mut self.cells[id.0 as usize]
    }

    pub(crate) fn remove_input(&mut self, net: NetId) {
        self.inputs.retain(|n| *n != net);
    }

    pub fn cell_ids(&self) -> impl Iterator<Item = CellId> {
        (0..self.cells.len() as u32).map(CellId)
    }

    pub fn net_count(&self) -> usize {
        self.net_names.len()
    }

    pub fn net_name(&self, id: NetId) -> &str {
        &self.net_names[id.0 as usize]
    }

    pub fn find_net(&self, name: &str) -> Option<NetId> {
        self.net_index.get(name).copied()
    }

    pub fn is_input(&self, id: NetId) -> bool {
        self.inputs.contains(&id)
    }

    /// Get or create the net with this name.
    pub fn intern_net(&mut self, name: &str) -> NetId {
        if let Some(id) = self.net_index.get(name) {
            return *id;
        }
        let id = NetId(self.net_names.len() as u32);
        self.net_names.push(name.to_string());
        self.net_index.insert(name.to_string(), id);
        id
    }

    /// A new net with a reserved-prefix name guaranteed not to collide.
    pub fn fresh_net(&mut self) -> NetId {
        let mut k = self.net_names.len();
        loop {
            let name = format!("{FRESH_NET_PREFIX}{k}");
            if !self.net_index.contains_key(&name) {
                return self.intern_net(&name);
            }
            k += 1;
        }
    }

    pub fn push_input(&mut self, net: NetId) {
        self.inputs.push(net);
    }

    pub fn push_output(&mut self, net: NetId) {
        self.outputs.push(net);
    }

    pub fn add_cell(&mut self, cell: Cell) -> CellId {
        let id = CellId(self.cells.len() as u32);
        self.cells.push(cell);
        id
    }

    /// Convenience constructor for plain logic cells.
    pub fn add_gate(
        &mut self,
        kind: GateKind,
        inputs: Vec<NetId>,
        output: NetId,
        tag: Option<String>,
    ) -> Result<CellId, GateTypeError> {
        let gate = GateType::new(kind, inputs.len())?;
        Ok(self.add_cell(Cell { gate, inputs, output, tag, function: None }))
    }

    /// Rename an internal net. The old name stays reserved in the index so a
    /// later fresh/intern cannot reuse it.
    pub fn rename_net(&mut self, id: NetId, name: &str) {
        assert!(!self.net_index.contains_key(name), "net name `{name}` already taken");
        self.net_index.remove(&self.net_names[id.0 as usize]);
        self.net_names[id.0 as usize] = name.to_string();
        self.net_index.insert(name.to_string(), id);
    }

    /// Driving cell per net, if any.
    pub fn driver_map(&self) -> HashMap<NetId, CellId> {
        let mut m = HashMap::new();
        for (i, c) in self.cells.iter().enumerate() {
            m.entry(c.output).or_insert(CellId(i as u32));
        }
        m
    }

    /// Cells consuming each net, in cell-id order.
    pub fn consumer_map(&self) -> HashMap<NetId, Vec<CellId>> {
        let mut m: HashMap<NetId, Vec<CellId>> = HashMap::new();
        for (i, c) in self.cells.iter().enumerate() {
            for input in &c.inputs {
                m.entry(*input).or_default().push(CellId(i as u32));
            }
        }
        m
    }

    /// All design-rule violations; empty iff the netlist is well-formed.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();

        // port uniqueness
        for (ports, which) in [(&self.inputs, "input"), (&self.outputs, "output")] {
            let mut seen = std::collections::HashSet::new();
            for p in ports.iter() {
                if !seen.insert(*p) {
                    diags.push(Diagnostic {
                        rule: DesignRule::DuplicatePort,
                        message: format!("net `{}` listed twice as {which}", self.net_name(*p)),
                    });
                }
            }
        }

        // arity and function tables
        for (i, c) in self.cells.iter().enumerate() {
            if GateType::new(c.gate.kind, c.gate.fan_in).is_err() || c.inputs.len() != c.gate.fan_in
            {
                diags.push(Diagnostic {
                    rule: DesignRule::ArityMismatch,
                    message: format!(
                        "cell g{i} ({}) declares fan-in {} but has {} inputs",
                        c.gate.kind,
                        c.gate.fan_in,
                        c.inputs.len()
                    ),
                });
            }
            match c.gate.kind {
                GateKind::Other => {
                    let ok = c.function.map(|f| f.nvars() == c.gate.fan_in).unwrap_or(false);
                    if !ok {
                        diags.push(Diagnostic {
                            rule: DesignRule::MissingFunction,
                            message: format!("OTHER cell g{i} has no function table of matching arity"),
                        });
                    }
                }
                _ => {
                    if c.function.is_some() {
                        diags.push(Diagnostic {
                            rule: DesignRule::MissingFunction,
                            message: format!("cell g{i} ({}) carries a spurious function table", c.gate.kind),
                        });
                    }
                }
            }
        }

        // single-driver rule: drivers are primary inputs and cell outputs
        let mut driver_count: HashMap<NetId, usize> = HashMap::new();
        for pi in &self.inputs {
            *driver_count.entry(*pi).or_insert(0) += 1;
        }
        for c in &self.cells {
            *driver_count.entry(c.output).or_insert(0) += 1;
        }
        for (net, n) in driver_count.iter() {
            if *n > 1 {
                diags.push(Diagnostic {
                    rule: DesignRule::MultipleDrivers,
                    message: format!("net `{}` has {n} drivers", self.net_name(*net)),
                });
            }
        }

        // every consumed net and every primary output must be driven
        let check_driven = |net: NetId, what: String, diags: &mut Vec<Diagnostic>| {
            if !driver_count.contains_key(&net) {
                diags.push(Diagnostic {
                    rule: DesignRule::UndrivenNet,
                    message: format!("{what} `{}` has no driver", self.net_name(net)),
                });
            }
        };
        for (i, c) in self.cells.iter().enumerate() {
            for input in &c.inputs {
                check_driven(*input, format!("input of cell g{i}"), &mut diags);
            }
        }
        for po in &self.outputs {
            check_driven(*po, "primary output".to_string(), &mut diags);
        }

        // combinational cycles (DFFs break paths)
        if let Some(cycle_net) = self.find_combinational_cycle() {
            diags.push(Diagnostic {
                rule: DesignRule::CombinationalCycle,
                message: format!("combinational cycle through net `{}`", self.net_name(cycle_net)),
            });
        }

        diags.sort_by(|a, b| (a.rule, &a.message).cmp(&(b.rule, &b.message)));
        diags
    }

    fn find_combinational_cycle(&self) -> Option<NetId> {
        let driver = self.driver_map();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.cells.len()];
        for start in 0..self.cells.len() {
            if state[start] != 0 {
                continue;
            }
            // iterative DFS over cells via their input drivers
            let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
            state[start] = 1;
            while let Some((cell, edge)) = stack.pop() {
                if self.cells[cell].gate.kind == GateKind::Dff {
                    state[cell] = 2;
                    continue;
                }
                if edge < self.cells[cell].inputs.len() {
                    stack.push((cell, edge + 1));
                    let net = self.cells[cell].inputs[edge];
                    if let Some(dep) = driver.get(&net) {
                        let dep = dep.0 as usize;
                        if self.cells[dep].gate.kind == GateKind::Dff {
                            continue;
                        }
                        match state[dep] {
                            0 => {
                                state[dep] = 1;
                                stack.push((dep, 0));
                            }
                            1 => return Some(net),
                            _ => {}
                        }
                    }
                } else {
                    state[cell] = 2;
                }
            }
        }
        None
    }

    /// Cells in topological order (combinational; DFFs come last).
    /// Requires a cycle-free netlist.
    pub fn topo_order(&self) -> Vec<CellId> {
        let driver = self.driver_map();
        let mut order = Vec::with_capacity(self.cells.len());
        let mut state = vec![0u8; self.cells.len()];
        for start in 0..self.cells.len() {
            if state[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            state[start] = 1;
            while let Some((cell, edge)) = stack.pop() {
                let is_dff = self.cells[cell].gate.kind == GateKind::Dff;
                if !is_dff && edge < self.cells[cell].inputs.len() {
                    stack.push((cell, edge + 1));
                    let net = self.cells[cell].inputs[edge];
                    if let Some(dep) = driver.get(&net) {
                        if state[dep.0 as usize] == 0 {
                            state[dep.0 as usize] = 1;
                            stack.push((dep.0 as usize, 0));
                        }
                    }
                } else {
                    state[cell] = 2;
                    order.push(CellId(cell as u32));
                }
            }
        }
        order
    }
}

/// Evaluate a register-free netlist on one input assignment (in primary
/// input order) directly from the cell semantics. Returns one value per
/// primary output. This interpreter is independent of the AIG path and
/// serves as its reference.
pub fn eval_netlist(netlist: &Netlist, assignment: &[bool]) -> Result<Vec<bool>, NetlistError> {
    if assignment.len() != netlist.inputs().len() {
        return Err(NetlistError::Other(format!(
            "assignment has {} values for {} inputs",
            assignment.len(),
            netlist.inputs().len()
        )));
    }
    let mut values: HashMap<NetId, bool> = HashMap::new();
    for (net, v) in netlist.inputs().iter().zip(assignment) {
        values.insert(*net, *v);
    }
    for id in netlist.topo_order() {
        let cell = netlist.cell(id);
        if cell.gate.kind == GateKind::Dff {
            return Err(NetlistError::Other("eval_netlist is combinational only".into()));
        }
        let mut idx = 0usize;
        for (v, net) in cell.inputs.iter().enumerate() {
            let val = *values
                .get(net)
                .ok_or_else(|| NetlistError::Other(format!("net `{}` unset", netlist.net_name(*net))))?;
            if val {
                idx |= 1 << v;
            }
        }
        let out = match cell.gate.kind {
            GateKind::Other => cell.function.as_ref().expect("validated").bit(idx),
            _ => cell.gate.function().expect("logic gate").bit(idx),
        };
        values.insert(cell.output, out);
    }
    netlist
        .outputs()
        .iter()
        .map(|po| {
            values
                .get(po)
                .copied()
                .ok_or_else(|| NetlistError::Other(format!("output `{}` unset", netlist.net_name(*po))))
        })
        .collect()
}

/// Record of one cut register, by net name so the cut survives transforms.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisterCut {
    pub data_net: String,
    pub state_net: String,
    pub tag: Option<String>,
}

/// Replace every DFF by a pseudo primary input (its output net) and a pseudo
/// primary output (its data net). Port order: original ports first, pseudo
/// ports appended in cell order.
pub fn cut_registers(netlist: &Netlist) -> (Netlist, Vec<RegisterCut>) {
    let mut out = Netlist::new(netlist.name.clone());
    for id in 0..netlist.net_count() {
        out.intern_net(netlist.net_name(NetId(id as u32)));
    }
    out.inputs = netlist.inputs.clone();
    out.outputs = netlist.outputs.clone();
    let mut cuts = Vec::new();
    for c in netlist.cells() {
        if c.gate.kind == GateKind::Dff {
            cuts.push(RegisterCut {
                data_net: netlist.net_name(c.inputs[0]).to_string(),
                state_net: netlist.net_name(c.output).to_string(),
                tag: c.tag.clone(),
            });
            out.inputs.push(c.output);
            out.outputs.push(c.inputs[0]);
        } else {
            out.cells.push(c.clone());
        }
    }
    (out, cuts)
}

/// Undo [`cut_registers`] on a (possibly transformed) netlist: pseudo ports
/// are matched by net name and replaced by DFF cells.
pub fn restore_registers(netlist: &Netlist, cuts: &[RegisterCut]) -> Result<Netlist, NetlistError> {
    let mut out = netlist.clone();
    for cut in cuts {
        let d = out.find_net(&cut.data_net).ok_or_else(|| {
            NetlistError::Other(format!("register data net `{}` lost in transform", cut.data_net))
        })?;
        let q = out.find_net(&cut.state_net).ok_or_else(|| {
            NetlistError::Other(format!("register state net `{}` lost in transform", cut.state_net))
        })?;
        out.inputs.retain(|n| *n != q);
        out.outputs.retain(|n| *n != d);
        out.add_cell(Cell {
            gate: GateType::new(GateKind::Dff, 1).unwrap(),
            inputs: vec![d],
            output: q,
            tag: cut.tag.clone(),
            function: None,
        });
    }
    Ok(out)
}
