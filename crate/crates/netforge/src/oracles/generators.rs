//! Desk-scale dataset generators: Trojan insertion, XOR/XNOR logic locking,
//! and labeled arithmetic/control block circuits. All generators are
//! seeded-deterministic and tag every cell with its ground-truth label so
//! the labels can ride through transforms.

use super::{OracleError};
use crate::netlist::{Cell, CellId, GateKind, GateType, NetId, Netlist};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;

pub const KEY_INPUT_PREFIX: &str = "keyinput";

fn truth_from_tags(netlist: &Netlist) -> BTreeMap<CellId, String> {
    netlist
        .cell_ids()
        .map(|id| {
            let tag = netlist.cell(id).tag.clone().unwrap_or_else(|| "FREE".to_string());
            (id, tag)
        })
        .collect()
}

/// Insert a comparator-triggered Trojan: an AND tree over `trigger_width`
/// seeded-polarity literals gates an XOR payload on one cell-driven output.
/// Host cells are labeled FREE, inserted cells HT; the infested circuit
/// differs from the host exactly when the trigger fires, and never on the
/// all-zero trigger assignment.
pub fn gen_trojan(
    host: &Netlist,
    trigger_width: usize,
    seed: u64,
) -> Result<(Netlist, BTreeMap<CellId, String>), OracleError> {
    let pis = host.inputs().len();
    if trigger_width == 0 || trigger_width > pis {
        return Err(OracleError::TriggerTooWide { width: trigger_width, pis });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut out = host.clone();
    for i in 0..out.cells().len() {
        out.cell_mut(CellId(i as u32)).tag = Some("FREE".to_string());
    }

    // payload target: a cell-driven primary output
    let driver = out.driver_map();
    let candidates: Vec<NetId> =
        out.outputs().iter().copied().filter(|po| driver.contains_key(po)).collect();
    if candidates.is_empty() {
        return Err(OracleError::Protocol("host has no cell-driven output to payload".into()));
    }
    let payload_net = candidates[rng.gen_range(0..candidates.len())];

    // trigger literals over sampled inputs with seeded polarity
    let mut input_ids: Vec<NetId> = out.inputs().to_vec();
    input_ids.shuffle(&mut rng);
    let trigger_inputs: Vec<NetId> = input_ids.into_iter().take(trigger_width).collect();
    let mut polarity: Vec<bool> = (0..trigger_width).map(|_| rng.gen_bool(0.5)).collect();
    if polarity.iter().all(|p| !*p) {
        // the all-zero assignment must stay silent
        polarity[0] = true;
    }

    let ht = Some("HT".to_string());
    let mut literals: Vec<NetId> = Vec::with_capacity(trigger_width);
    for (net, pol) in trigger_inputs.iter().zip(&polarity) {
        if *pol {
            literals.push(*net);
        } else {
            let inv = out.fresh_net();
            out.add_gate(GateKind::Inv, vec![*net], inv, ht.clone()).unwrap();
            literals.push(inv);
        }
    }
    while literals.len() > 1 {
        let mut next = Vec::with_capacity(literals.len().div_ceil(2));
        let mut iter = literals.chunks(2);
        for pair in &mut iter {
            if pair.len() == 2 {
                let t = out.fresh_net();
                out.add_gate(GateKind::And, vec![pair[0], pair[1]], t, ht.clone()).unwrap();
                next.push(t);
            } else {
                next.push(pair[0]);
            }
        }
        literals = next;
    }
    let trigger = literals[0];

    // splice the payload XOR in front of the chosen output
    let payload_driver = driver[&payload_net];
    let detached = out.fresh_net();
    out.cell_mut(payload_driver).output = detached;
    out.add_gate(GateKind::Xor, vec![detached, trigger], payload_net, ht).unwrap();

    debug_assert!(out.validate().is_empty());
    let truth = truth_from_tags(&out);
    Ok((out, truth))
}

/// Nets whose flip is observable at some output, i.e. live locking sites.
fn observable_nets(netlist: &Netlist, rng: &mut ChaCha8Rng) -> Vec<NetId> {
    let order = netlist.topo_order();
    let k = netlist.inputs().len();
    let vectors: Vec<Vec<bool>> = if k <= 12 {
        (0..(1usize << k)).map(|v| (0..k).map(|i| (v >> i) & 1 == 1).collect()).collect()
    } else {
        (0..256).map(|_| (0..k).map(|_| rng.gen_bool(0.5)).collect()).collect()
    };

    let eval_flipped = |target: Option<NetId>, assignment: &[bool]| -> Vec<bool> {
        let mut values: std::collections::HashMap<NetId, bool> = std::collections::HashMap::new();
        for (net, v) in netlist.inputs().iter().zip(assignment) {
            values.insert(*net, *v);
        }
        for id in &order {
            let cell = netlist.cell(*id);
            let mut idx = 0usize;
            for (vpos, net) in cell.inputs.iter().enumerate() {
                if values[net] {
                    idx |= 1 << vpos;
                }
            }
            let outv = match cell.gate.kind {
                GateKind::Other => cell.function.as_ref().unwrap().bit(idx),
                _ => cell.gate.function().unwrap().bit(idx),
            };
            values.insert(cell.output, outv);
            if target == Some(cell.output) {
                let v = values.get_mut(&cell.output).unwrap();
                *v = !*v;
            }
        }
        netlist.outputs().iter().map(|po| values[po]).collect()
    };

    let mut eligible = Vec::new();
    let mut candidates: Vec<NetId> = netlist.cells().iter().map(|c| c.output).collect();
    candidates.sort_unstable();
    candidates.dedup();
    for net in candidates {
        let observable = vectors.iter().any(|v| eval_flipped(Some(net), v) != eval_flipped(None, v));
        if observable {
            eligible.push(net);
        }
    }
    eligible
}

/// XOR/XNOR logic locking: each sampled live net gets a key gate fed by a
/// fresh `keyinput<i>` primary input; bit 0 inserts XOR, bit 1 XNOR, so the
/// circuit is transparent exactly under the true key.
pub fn gen_obfuscated(
    netlist: &Netlist,
    n_keys: usize,
    seed: u64,
) -> Result<(Netlist, Vec<bool>), OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if n_keys == 0 {
        return Ok((netlist.clone(), Vec::new()));
    }
    let eligible = observable_nets(netlist, &mut rng);
    if eligible.len() < n_keys {
        return Err(OracleError::InsufficientNets { wanted: n_keys, available: eligible.len() });
    }
    let mut sites = eligible;
    sites.shuffle(&mut rng);
    sites.truncate(n_keys);
    sites.sort_unstable();

    let mut out = netlist.clone();
    let mut key = Vec::with_capacity(n_keys);
    for (i, net) in sites.iter().enumerate() {
        let bit = rng.gen_bool(0.5);
        key.push(bit);
        let key_net = out.intern_net(&format!("{KEY_INPUT_PREFIX}{i}"));
        out.push_input(key_net);
        let driver = out.driver_map()[net];
        let detached = out.fresh_net();
        out.cell_mut(driver).output = detached;
        let kind = if bit { GateKind::Xnor } else { GateKind::Xor };
        let tag = out.cell(driver).tag.clone();
        out.add_gate(kind, vec![detached, key_net], *net, tag).unwrap();
    }
    debug_assert!(out.validate().is_empty());
    Ok((out, key))
}

/// Key gates of a locked netlist: for each `keyinput<i>` primary input, the
/// lowest-id cell consuming it. Works on transformed circuits too, where
/// the consuming cell need not be XOR/XNOR anymore.
pub fn key_gate_cells(netlist: &Netlist) -> Vec<(usize, CellId)> {
    let consumers = netlist.consumer_map();
    let mut gates = Vec::new();
    for pi in netlist.inputs() {
        let name = netlist.net_name(*pi);
        if let Some(index) = name.strip_prefix(KEY_INPUT_PREFIX).and_then(|s| s.parse::<usize>().ok())
        {
            if let Some(cells) = consumers.get(pi) {
                if let Some(first) = cells.iter().min() {
                    gates.push((index, *first));
                }
            }
        }
    }
    gates.sort_unstable();
    gates
}

/// Tie the key inputs of a locked netlist to constant bits, removing them
/// from the primary inputs; with the true key the result is equivalent to
/// the original circuit.
pub fn tie_key_inputs(netlist: &Netlist, key: &[bool]) -> Netlist {
    let mut out = netlist.clone();
    let mut tied: Vec<(NetId, bool)> = Vec::new();
    for pi in netlist.inputs() {
        let name = netlist.net_name(*pi);
        if let Some(index) = name.strip_prefix(KEY_INPUT_PREFIX).and_then(|s| s.parse::<usize>().ok())
        {
            if let Some(bit) = key.get(index) {
                tied.push((*pi, *bit));
            }
        }
    }
    for (net, bit) in &tied {
        out.remove_input(*net);
        let kind = if *bit { GateKind::Const1 } else { GateKind::Const0 };
        out.add_cell(Cell {
            gate: GateType::new(kind, 0).unwrap(),
            inputs: vec![],
            output: *net,
            tag: None,
            function: None,
        });
    }
    out
}

/// Kinds of labeled blocks for the reverse-engineering dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ReBlockKind {
    Add,
    Sub,
    Cmp,
    Mul,
    Ctrl,
}

impl ReBlockKind {
    pub const ALL: [ReBlockKind; 5] =
        [ReBlockKind::Add, ReBlockKind::Sub, ReBlockKind::Cmp, ReBlockKind::Mul, ReBlockKind::Ctrl];

    pub fn label(self) -> &'static str {
        match self {
            ReBlockKind::Add => "ADD",
            ReBlockKind::Sub => "SUB",
            ReBlockKind::Cmp => "CMP",
            ReBlockKind::Mul => "MUL",
            ReBlockKind::Ctrl => "CTRL",
        }
    }

    pub fn parse(s: &str) -> Option<ReBlockKind> {
        match s.to_ascii_lowercase().as_str() {
            "add" => Some(ReBlockKind::Add),
            "sub" => Some(ReBlockKind::Sub),
            "cmp" => Some(ReBlockKind::Cmp),
            "mul" => Some(ReBlockKind::Mul),
            "ctrl" => Some(ReBlockKind::Ctrl),
            _ => None,
        }
    }
}

struct BlockBuilder {
    netlist: Netlist,
    a: Vec<NetId>,
    b: Vec<NetId>,
}

impl BlockBuilder {
    fn gate(&mut self, kind: GateKind, inputs: Vec<NetId>, tag: &str) -> NetId {
        let out = self.netlist.fresh_net();
        self.netlist.add_gate(kind, inputs, out, Some(tag.to_string())).unwrap();
        out
    }

    fn full_adder(&mut self, x: NetId, y: NetId, c: NetId, tag: &str) -> (NetId, NetId) {
        let s1 = self.gate(GateKind::Xor, vec![x, y], tag);
        let sum = self.gate(GateKind::Xor, vec![s1, c], tag);
        let c1 = self.gate(GateKind::And, vec![x, y], tag);
        let c2 = self.gate(GateKind::And, vec![s1, c], tag);
        let cout = self.gate(GateKind::Or, vec![c1, c2], tag);
        (sum, cout)
    }

    fn half_adder(&mut self, x: NetId, y: NetId, tag: &str) -> (NetId, NetId) {
        let sum = self.gate(GateKind::Xor, vec![x, y], tag);
        let cout = self.gate(GateKind::And, vec![x, y], tag);
        (sum, cout)
    }

    fn expose(&mut self, net: NetId, name: &str) {
        self.netlist.rename_net(net, name);
        self.netlist.push_output(net);
    }

    fn adder(&mut self, width: usize, prefix: &str) {
        let tag = "ADD";
        let (mut sum, mut carry) = {
            let (a0, b0) = (self.a[0], self.b[0]);
            self.half_adder(a0, b0, tag)
        };
        self.expose(sum, &format!("{prefix}_s0"));
        for i in 1..width {
            let (ai, bi) = (self.a[i], self.b[i]);
            let (s, c) = self.full_adder(ai, bi, carry, tag);
            sum = s;
            carry = c;
            self.expose(sum, &format!("{prefix}_s{i}"));
        }
        self.expose(carry, &format!("{prefix}_cout"));
    }

    fn subtractor(&mut self, width: usize, prefix: &str) {
        let tag = "SUB";
        // a - b = a + ~b + 1
        let d0 = {
            let (a0, b0) = (self.a[0], self.b[0]);
            self.gate(GateKind::Xor, vec![a0, b0], tag)
        };
        self.expose(d0, &format!("{prefix}_d0"));
        let (a0, b0) = (self.a[0], self.b[0]);
        let nb0 = self.gate(GateKind::Inv, vec![b0], tag);
        let mut carry = self.gate(GateKind::Or, vec![a0, nb0], tag);
        for i in 1..width {
            let (ai, bi) = (self.a[i], self.b[i]);
            let nbi = self.gate(GateKind::Inv, vec![bi], tag);
            let (d, c) = self.full_adder(ai, nbi, carry, tag);
            carry = c;
            self.expose(d, &format!("{prefix}_d{i}"));
        }
        self.expose(carry, &format!("{prefix}_bout"));
    }

    fn comparator(&mut self, width: usize, prefix: &str) {
        let tag = "CMP";
        let mut bits = Vec::with_capacity(width);
        for i in 0..width {
            let (ai, bi) = (self.a[i], self.b[i]);
            bits.push(self.gate(GateKind::Xnor, vec![ai, bi], tag));
        }
        let mut acc = bits[0];
        for bit in bits.into_iter().skip(1) {
            acc = self.gate(GateKind::And, vec![acc, bit], tag);
        }
        self.expose(acc, &format!("{prefix}_eq"));
    }

    fn multiplier(&mut self, width: usize, prefix: &str) {
        let tag = "MUL";
        // array multiplier: ripple-add each shifted partial-product row
        let mut acc: Vec<Option<NetId>> = vec![None; 2 * width];
        for j in 0..width {
            let row: Vec<NetId> = (0..width)
                .map(|i| {
                    let (ai, bj) = (self.a[i], self.b[j]);
                    self.gate(GateKind::And, vec![ai, bj], tag)
                })
                .collect();
            let mut carry: Option<NetId> = None;
            for (i, bit) in row.into_iter().enumerate() {
                let pos = i + j;
                let mut addends: Vec<NetId> = vec![bit];
                if let Some(existing) = acc[pos] {
                    addends.push(existing);
                }
                if let Some(c) = carry.take() {
                    addends.push(c);
                }
                let (sum, c) = match addends.len() {
                    1 => (addends[0], None),
                    2 => {
                        let (s, c) = self.half_adder(addends[0], addends[1], tag);
                        (s, Some(c))
                    }
                    _ => {
                        let (s, c) = self.full_adder(addends[0], addends[1], addends[2], tag);
                        (s, Some(c))
                    }
                };
                acc[pos] = Some(sum);
                carry = c;
            }
            if let Some(mut c) = carry {
                let mut pos = j + width;
                while let Some(existing) = acc[pos] {
                    let (s, c2) = self.half_adder(existing, c, tag);
                    acc[pos] = Some(s);
                    c = c2;
                    pos += 1;
                }
                acc[pos] = Some(c);
            }
        }
        for (i, bit) in acc.into_iter().enumerate() {
            if let Some(net) = bit {
                self.expose(net, &format!("{prefix}_p{i}"));
            }
        }
    }

    fn control(&mut self, width: usize, prefix: &str, rng: &mut ChaCha8Rng) {
        let tag = "CTRL";
        // 4-way mux over a seeded permutation of operand bits
        let mut data = vec![self.a[0], self.a[width - 1], self.b[0], self.b[width - 1]];
        data.shuffle(rng);
        let s0 = self.a[width / 2];
        let s1 = self.b[width / 2];
        let ns0 = self.gate(GateKind::Inv, vec![s0], tag);
        let ns1 = self.gate(GateKind::Inv, vec![s1], tag);
        let sel = [[ns0, ns1], [s0, ns1], [ns0, s1], [s0, s1]];
        let mut terms = Vec::new();
        for (d, pair) in data.iter().zip(sel.iter()) {
            let g = self.gate(GateKind::And, vec![pair[0], pair[1]], tag);
            terms.push(self.gate(GateKind::And, vec![g, *d], tag));
        }
        let o1 = self.gate(GateKind::Or, vec![terms[0], terms[1]], tag);
        let o2 = self.gate(GateKind::Or, vec![terms[2], terms[3]], tag);
        let y = self.gate(GateKind::Or, vec![o1, o2], tag);
        self.expose(y, &format!("{prefix}_y"));
    }
}

/// Build a circuit of labeled blocks over shared operand inputs. `widths`
/// has either one entry (applied to every block) or one entry per kind;
/// widths are restricted to 2, 4 or 8 at desk scale. Every cell carries its
/// block label as both tag and truth entry.
pub fn gen_re_blocks(
    widths: &[usize],
    kinds: &[ReBlockKind],
    seed: u64,
) -> Result<(Netlist, BTreeMap<CellId, String>), OracleError> {
    if kinds.is_empty() {
        return Err(OracleError::NoKinds);
    }
    let widths: Vec<usize> = if widths.len() == 1 {
        vec![widths[0]; kinds.len()]
    } else if widths.len() == kinds.len() {
        widths.to_vec()
    } else {
        return Err(OracleError::BadWidth(0));
    };
    for w in &widths {
        if ![2, 4, 8].contains(w) {
            return Err(OracleError::BadWidth(*w));
        }
    }
    let max_width = *widths.iter().max().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut netlist = Netlist::new(format!(
        "re_{}",
        kinds.iter().map(|k| k.label().to_ascii_lowercase()).collect::<Vec<_>>().join("_")
    ));
    let a: Vec<NetId> = (0..max_width).map(|i| netlist.intern_net(&format!("a{i}"))).collect();
    let b: Vec<NetId> = (0..max_width).map(|i| netlist.intern_net(&format!("b{i}"))).collect();
    for net in a.iter().chain(&b) {
        netlist.push_input(*net);
    }

    let mut builder = BlockBuilder { netlist, a, b };
    for (i, (kind, width)) in kinds.iter().zip(&widths).enumerate() {
        let prefix = format!("{}{}", kind.label().to_ascii_lowercase(), i);
        match kind {
            ReBlockKind::Add => builder.adder(*width, &prefix),
            ReBlockKind::Sub => builder.subtractor(*width, &prefix),
            ReBlockKind::Cmp => builder.comparator(*width, &prefix),
            ReBlockKind::Mul => builder.multiplier(*width, &prefix),
            ReBlockKind::Ctrl => builder.control(*width, &prefix, &mut rng),
        }
    }
    let out = builder.netlist;
    debug_assert!(out.validate().is_empty());
    let truth = truth_from_tags(&out);
    Ok((out, truth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aig::{check_equivalence, EquivBudget, EquivalenceVerdict};
    use crate::corpus;
    use crate::netlist::eval_netlist;
    use crate::netlist::write_blif;

    #[test]
    fn trojan_flips_exactly_the_trigger_class() {
        let host = corpus::parity_chain(8); // 8 inputs, 1 output
        let (infested, truth) = gen_trojan(&host, 4, 3).unwrap();
        assert!(infested.validate().is_empty());

        let mut differing = 0usize;
        for v in 0..(1usize << 8) {
            let bits: Vec<bool> = (0..8).map(|i| (v >> i) & 1 == 1).collect();
            let original = eval_netlist(&host, &bits).unwrap();
            let modified: Vec<bool> = infested
                .outputs()
                .iter()
                .zip(eval_netlist(&infested, &bits).unwrap())
                .filter(|(po, _)| host.outputs().iter().any(|hpo| host.net_name(*hpo) == infested.net_name(**po)))
                .map(|(_, v)| v)
                .collect();
            if original != modified {
                differing += 1;
            }
        }
        assert_eq!(differing, 1 << (8 - 4), "exactly one trigger class fires");

        // all-zero assignment is silent
        let zeros = vec![false; 8];
        assert_eq!(eval_netlist(&host, &zeros).unwrap(), eval_netlist(&infested, &zeros).unwrap());

        // HT label count = trigger cells + payload XOR
        let ht = truth.values().filter(|v| *v == "HT").count();
        let inv_count = infested.cells().iter().filter(|c| c.gate.kind == GateKind::Inv && c.tag.as_deref() == Some("HT")).count();
        assert_eq!(ht, (4 - 1) + inv_count + 1);
    }

    #[test]
    fn trojan_width_checked() {
        let host = corpus::full_adder();
        assert!(matches!(
            gen_trojan(&host, 9, 1),
            Err(OracleError::TriggerTooWide { .. })
        ));
    }

    #[test]
    fn locking_is_transparent_under_true_key() {
        let c17 = corpus::c17();
        let (obf, key) = gen_obfuscated(&c17, 4, 7).unwrap();
        assert_eq!(key.len(), 4);
        assert_eq!(obf.inputs().len(), 9);

        let tied = tie_key_inputs(&obf, &key);
        let verdict = check_equivalence(&c17, &tied, &EquivBudget::default()).unwrap();
        assert_eq!(verdict, EquivalenceVerdict::EquivalentExhaustive);
    }

    #[test]
    fn wrong_key_breaks_function() {
        let c17 = corpus::c17();
        let (obf, key) = gen_obfuscated(&c17, 4, 7).unwrap();
        let mut wrong = key.clone();
        wrong[0] = !wrong[0];
        let tied = tie_key_inputs(&obf, &wrong);
        let verdict = check_equivalence(&c17, &tied, &EquivBudget::default()).unwrap();
        assert!(matches!(verdict, EquivalenceVerdict::NotEquivalent { .. }));
    }

    #[test]
    fn zero_keys_is_identity() {
        let c17 = corpus::c17();
        let (obf, key) = gen_obfuscated(&c17, 0, 7).unwrap();
        assert!(key.is_empty());
        assert_eq!(write_blif(&obf), write_blif(&c17));
    }

    #[test]
    fn key_gates_are_locatable() {
        let (obf, key) = gen_obfuscated(&corpus::c17(), 4, 9).unwrap();
        let gates = key_gate_cells(&obf);
        assert_eq!(gates.len(), key.len());
        for (i, cell) in &gates {
            let kind = obf.cell(*cell).gate.kind;
            let expected = if key[*i] { GateKind::Xnor } else { GateKind::Xor };
            assert_eq!(kind, expected);
        }
    }

    #[test]
    fn adder_block_matches_arithmetic() {
        let (n, truth) = gen_re_blocks(&[2], &[ReBlockKind::Add], 5).unwrap();
        assert!(truth.values().all(|v| v == "ADD"));
        // inputs a0 a1 b0 b1 -> outputs s0 s1 cout
        for v in 0..16usize {
            let bits: Vec<bool> = (0..4).map(|i| (v >> i) & 1 == 1).collect();
            let a = (v & 1) + (((v >> 1) & 1) << 1);
            let b = ((v >> 2) & 1) + (((v >> 3) & 1) << 1);
            let out = eval_netlist(&n, &bits).unwrap();
            let got = (out[0] as usize) + ((out[1] as usize) << 1) + ((out[2] as usize) << 2);
            assert_eq!(got, a + b, "a={a} b={b}");
        }
    }

    #[test]
    fn subtractor_matches_arithmetic() {
        let (n, _) = gen_re_blocks(&[2], &[ReBlockKind::Sub], 5).unwrap();
        for v in 0..16usize {
            let bits: Vec<bool> = (0..4).map(|i| (v >> i) & 1 == 1).collect();
            let a = (v & 1) + (((v >> 1) & 1) << 1);
            let b = ((v >> 2) & 1) + (((v >> 3) & 1) << 1);
            let out = eval_netlist(&n, &bits).unwrap();
            let diff = (out[0] as usize) + ((out[1] as usize) << 1);
            assert_eq!(diff, (a.wrapping_sub(b)) & 3, "a={a} b={b}");
        }
    }

    #[test]
    fn multiplier_matches_arithmetic() {
        let (n, _) = gen_re_blocks(&[2], &[ReBlockKind::Mul], 5).unwrap();
        for v in 0..16usize {
            let bits: Vec<bool> = (0..4).map(|i| (v >> i) & 1 == 1).collect();
            let a = (v & 1) + (((v >> 1) & 1) << 1);
            let b = ((v >> 2) & 1) + (((v >> 3) & 1) << 1);
            let out = eval_netlist(&n, &bits).unwrap();
            let p: usize = out.iter().enumerate().map(|(i, bit)| (*bit as usize) << i).sum();
            assert_eq!(p, a * b, "a={a} b={b}");
        }
    }

    #[test]
    fn combo_has_expected_label_classes() {
        let (n, truth) = gen_re_blocks(&[2], &[ReBlockKind::Add, ReBlockKind::Mul], 5).unwrap();
        let classes: std::collections::BTreeSet<&str> =
            truth.values().map(String::as_str).collect();
        assert_eq!(classes.len(), 2);
        assert!(classes.contains("ADD") && classes.contains("MUL"));
        assert!(n.validate().is_empty());
    }

    #[test]
    fn generators_are_seed_deterministic() {
        let (x, _) = gen_re_blocks(&[2], &ReBlockKind::ALL, 9).unwrap();
        let (y, _) = gen_re_blocks(&[2], &ReBlockKind::ALL, 9).unwrap();
        assert_eq!(write_blif(&x), write_blif(&y));

        let (t1, _) = gen_trojan(&corpus::c17(), 3, 5).unwrap();
        let (t2, _) = gen_trojan(&corpus::c17(), 3, 5).unwrap();
        assert_eq!(write_blif(&t1), write_blif(&t2));

        let (o1, k1) = gen_obfuscated(&corpus::c17(), 4, 5).unwrap();
        let (o2, k2) = gen_obfuscated(&corpus::c17(), 4, 5).unwrap();
        assert_eq!(write_blif(&o1), write_blif(&o2));
        assert_eq!(k1, k2);
    }
}
