//! Small hand-checkable circuits and the desk-scale pools used by tests,
//! the demo configuration, and the acceptance suite.

use crate::env::Instance;
use crate::netlist::{GateKind, Netlist};
use crate::oracles::{
    gen_obfuscated, gen_re_blocks, gen_trojan, key_gate_cells, train_key_oracle,
    train_node_oracle, ReBlockKind, DEFAULT_WL_DEPTH,
};
use std::sync::Arc;

/// Textbook full adder: sum = a^b^cin, cout = ab + cin(a^b).
/// 2 XOR, 2 AND, 1 OR over nets a b cin s1 c1 c2 sum cout.
pub const FULL_ADDER_BLIF: &str = "\
.model full_adder
.inputs a b cin
.outputs sum cout
.names a b s1
10 1
01 1
.names s1 cin sum
10 1
01 1
.names a b c1
11 1
.names s1 cin c2
11 1
.names c1 c2 cout
1- 1
-1 1
.end
";

/// ISCAS-85 c17: five inputs, two outputs, six NAND2 gates.
pub const C17_VERILOG: &str = "\
module c17 (n1, n2, n3, n6, n7, n22, n23);
  input n1, n2, n3, n6, n7;
  output n22, n23;
  wire n10, n11, n16, n19;
  nand g10 (n10, n1, n3);
  nand g11 (n11, n3, n6);
  nand g16 (n16, n2, n11);
  nand g19 (n19, n11, n7);
  nand g22 (n22, n10, n16);
  nand g23 (n23, n16, n19);
endmodule
";

pub fn full_adder() -> Netlist {
    let mut n = Netlist::new("full_adder");
    let a = n.intern_net("a");
    let b = n.intern_net("b");
    let cin = n.intern_net("cin");
    n.push_input(a);
    n.push_input(b);
    n.push_input(cin);
    let sum = n.intern_net("sum");
    let cout = n.intern_net("cout");
    n.push_output(sum);
    n.push_output(cout);
    let s1 = n.intern_net("s1");
    let c1 = n.intern_net("c1");
    let c2 = n.intern_net("c2");
    n.add_gate(GateKind::Xor, vec![a, b], s1, None).unwrap();
    n.add_gate(GateKind::Xor, vec![s1, cin], sum, None).unwrap();
    n.add_gate(GateKind::And, vec![a, b], c1, None).unwrap();
    n.add_gate(GateKind::And, vec![s1, cin], c2, None).unwrap();
    n.add_gate(GateKind::Or, vec![c1, c2], cout, None).unwrap();
    n
}

pub fn c17() -> Netlist {
    crate::netlist::parse_structural_verilog(C17_VERILOG).expect("embedded c17 parses")
}

/// Left-leaning AND chain over `width` inputs: width-1 gates, depth width-1.
pub fn and_chain(width: usize) -> Netlist {
    assert!(width >= 2);
    let mut n = Netlist::new(format!("and_chain_{width}"));
    let ins: Vec<_> = (0..width).map(|i| n.intern_net(&format!("x{i}"))).collect();
    for i in &ins {
        n.push_input(*i);
    }
    let y = n.intern_net("y");
    n.push_output(y);
    let mut acc = ins[0];
    for (k, i) in ins.iter().enumerate().skip(1) {
        let out = if k == width - 1 { y } else { n.intern_net(&format!("t{k}")) };
        n.add_gate(GateKind::And, vec![acc, *i], out, None).unwrap();
        acc = out;
    }
    n
}

/// XOR chain (odd parity) over `width` inputs.
pub fn parity_chain(width: usize) -> Netlist {
    assert!(width >= 2);
    let mut n = Netlist::new(format!("parity_{width}"));
    let ins: Vec<_> = (0..width).map(|i| n.intern_net(&format!("x{i}"))).collect();
    for i in &ins {
        n.push_input(*i);
    }
    let y = n.intern_net("y");
    n.push_output(y);
    let mut acc = ins[0];
    for (k, i) in ins.iter().enumerate().skip(1) {
        let out = if k == width - 1 { y } else { n.intern_net(&format!("t{k}")) };
        n.add_gate(GateKind::Xor, vec![acc, *i], out, None).unwrap();
        acc = out;
    }
    n
}

/// Majority-of-three out of AND/OR gates.
pub fn majority3() -> Netlist {
    let mut n = Netlist::new("majority3");
    let a = n.intern_net("a");
    let b = n.intern_net("b");
    let c = n.intern_net("c");
    n.push_input(a);
    n.push_input(b);
    n.push_input(c);
    let y = n.intern_net("y");
    n.push_output(y);
    let ab = n.intern_net("ab");
    let ac = n.intern_net("ac");
    let bc = n.intern_net("bc");
    let t = n.intern_net("t");
    n.add_gate(GateKind::And, vec![a, b], ab, None).unwrap();
    n.add_gate(GateKind::And, vec![a, c], ac, None).unwrap();
    n.add_gate(GateKind::And, vec![b, c], bc, None).unwrap();
    n.add_gate(GateKind::Or, vec![ab, ac], t, None).unwrap();
    n.add_gate(GateKind::Or, vec![t, bc], y, None).unwrap();
    n
}

/// And-or-invert: y = ~(ab + cd).
pub fn aoi22() -> Netlist {
    let mut n = Netlist::new("aoi22");
    let ins: Vec<_> = ["a", "b", "c", "d"].iter().map(|x| n.intern_net(x)).collect();
    for i in &ins {
        n.push_input(*i);
    }
    let y = n.intern_net("y");
    n.push_output(y);
    let ab = n.intern_net("ab");
    let cd = n.intern_net("cd");
    n.add_gate(GateKind::And, vec![ins[0], ins[1]], ab, None).unwrap();
    n.add_gate(GateKind::And, vec![ins[2], ins[3]], cd, None).unwrap();
    n.add_gate(GateKind::Nor, vec![ab, cd], y, None).unwrap();
    n
}

/// Left-leaning OR chain over `width` inputs.
pub fn or_chain(width: usize) -> Netlist {
    assert!(width >= 2);
    let mut n = Netlist::new(format!("or_chain_{width}"));
    let ins: Vec<_> = (0..width).map(|i| n.intern_net(&format!("x{i}"))).collect();
    for i in &ins {
        n.push_input(*i);
    }
    let y = n.intern_net("y");
    n.push_output(y);
    let mut acc = ins[0];
    for (k, i) in ins.iter().enumerate().skip(1) {
        let out = if k == width - 1 { y } else { n.intern_net(&format!("t{k}")) };
        n.add_gate(GateKind::Or, vec![acc, *i], out, None).unwrap();
        acc = out;
    }
    n
}

/// 4-way mux from inverters, ANDs and ORs; 4 data inputs, 2 selects.
pub fn mux4() -> Netlist {
    let mut n = Netlist::new("mux4");
    let d: Vec<_> = (0..4).map(|i| n.intern_net(&format!("d{i}"))).collect();
    let s0 = n.intern_net("s0");
    let s1 = n.intern_net("s1");
    for i in &d {
        n.push_input(*i);
    }
    n.push_input(s0);
    n.push_input(s1);
    let y = n.intern_net("y");
    n.push_output(y);
    let ns0 = n.intern_net("ns0");
    let ns1 = n.intern_net("ns1");
    n.add_gate(GateKind::Inv, vec![s0], ns0, None).unwrap();
    n.add_gate(GateKind::Inv, vec![s1], ns1, None).unwrap();
    let sel = [[ns0, ns1], [s0, ns1], [ns0, s1], [s0, s1]];
    let mut terms = Vec::new();
    for (i, pair) in sel.iter().enumerate() {
        let g = n.intern_net(&format!("gate{i}"));
        let t = n.intern_net(&format!("term{i}"));
        n.add_gate(GateKind::And, vec![pair[0], pair[1]], g, None).unwrap();
        n.add_gate(GateKind::And, vec![g, d[i]], t, None).unwrap();
        terms.push(t);
    }
    let o1 = n.intern_net("o1");
    let o2 = n.intern_net("o2");
    n.add_gate(GateKind::Or, vec![terms[0], terms[1]], o1, None).unwrap();
    n.add_gate(GateKind::Or, vec![terms[2], terms[3]], o2, None).unwrap();
    n.add_gate(GateKind::Or, vec![o1, o2], y, None).unwrap();
    n
}

/// 2-to-4 decoder built from NOR/AND/INV.
pub fn decoder2() -> Netlist {
    let mut n = Netlist::new("decoder2");
    let a = n.intern_net("a");
    let b = n.intern_net("b");
    n.push_input(a);
    n.push_input(b);
    let outs: Vec<_> = (0..4).map(|i| n.intern_net(&format!("y{i}"))).collect();
    for o in &outs {
        n.push_output(*o);
    }
    let na = n.intern_net("na");
    let nb = n.intern_net("nb");
    n.add_gate(GateKind::Inv, vec![a], na, None).unwrap();
    n.add_gate(GateKind::Inv, vec![b], nb, None).unwrap();
    n.add_gate(GateKind::Nor, vec![a, b], outs[0], None).unwrap();
    n.add_gate(GateKind::And, vec![a, nb], outs[1], None).unwrap();
    n.add_gate(GateKind::And, vec![na, b], outs[2], None).unwrap();
    n.add_gate(GateKind::And, vec![a, b], outs[3], None).unwrap();
    n
}

fn re_block(widths: &[usize], kinds: &[ReBlockKind], seed: u64, name: &str) -> Netlist {
    let (mut n, _) = gen_re_blocks(widths, kinds, seed).expect("desk-scale block generation");
    n.name = name.to_string();
    n
}

/// Ten structurally varied circuits for the piracy pool: native bases range
/// from XOR/AND/OR through NAND-only, so no single remap strategy works on
/// all of them.
pub fn piracy_pool() -> Vec<Netlist> {
    vec![
        full_adder(),
        c17(),
        re_block(&[2], &[ReBlockKind::Add], 101, "add2"),
        re_block(&[2], &[ReBlockKind::Mul], 102, "mul2"),
        majority3(),
        mux4(),
        parity_chain(6),
        and_chain(8),
        decoder2(),
        re_block(&[4], &[ReBlockKind::Cmp], 103, "cmp4"),
    ]
}

/// The 20-circuit corpus (all at most 12 primary inputs) exercised by the
/// acceptance suite: hand circuits, generated arithmetic, one obfuscated
/// and one Trojan-infested instance, and a registered circuit.
pub fn acceptance_corpus() -> Vec<Netlist> {
    let mut corpus = vec![
        full_adder(),
        c17(),
        majority3(),
        mux4(),
        decoder2(),
        and_chain(8),
        parity_chain(6),
        re_block(&[2], &[ReBlockKind::Add], 201, "add2"),
        re_block(&[4], &[ReBlockKind::Add], 202, "add4"),
        re_block(&[2], &[ReBlockKind::Sub], 203, "sub2"),
        re_block(&[4], &[ReBlockKind::Cmp], 204, "cmp4"),
        re_block(&[2], &[ReBlockKind::Mul], 205, "mul2"),
        re_block(&[4], &[ReBlockKind::Mul], 206, "mul4"),
        aoi22(),
        or_chain(6),
    ];
    let (obf_c17, _) = gen_obfuscated(&c17(), 4, 211).expect("c17 locks");
    let mut obf_c17 = obf_c17;
    obf_c17.name = "c17_locked".into();
    corpus.push(obf_c17);
    let (obf_mux, _) = gen_obfuscated(&mux4(), 4, 212).expect("mux4 locks");
    let mut obf_mux = obf_mux;
    obf_mux.name = "mux4_locked".into();
    corpus.push(obf_mux);
    let (troj_parity, _) = gen_trojan(&parity_chain(8), 4, 213).expect("parity hosts a trigger");
    let mut troj_parity = troj_parity;
    troj_parity.name = "parity8_trojan".into();
    corpus.push(troj_parity);
    let (troj_c17, _) = gen_trojan(&c17(), 3, 215).expect("c17 hosts a trigger");
    let mut troj_c17 = troj_c17;
    troj_c17.name = "c17_trojan".into();
    corpus.push(troj_c17);
    corpus.push(sequential_toggle());
    assert_eq!(corpus.len(), 20);
    corpus
}

/// Trojan-localization pool: five infested instances, each judged by a
/// surrogate trained on itself (the per-circuit regime).
pub fn trojan_pool(seed: u64) -> Vec<Instance> {
    let hosts: Vec<(Netlist, usize)> = vec![
        (parity_chain(8), 4),
        (re_block(&[4], &[ReBlockKind::Add], seed ^ 1, "add4h"), 3),
        (mux4(), 3),
        (re_block(&[4], &[ReBlockKind::Cmp], seed ^ 2, "cmp4h"), 4),
        (c17(), 3),
    ];
    hosts
        .into_iter()
        .enumerate()
        .map(|(i, (host, width))| {
            let (circuit, truth) =
                gen_trojan(&host, width, seed.wrapping_add(i as u64)).expect("pool trojan");
            let oracle = train_node_oracle(&[(&circuit, &truth)], DEFAULT_WL_DEPTH)
                .expect("self-trained localization oracle");
            Instance::TrojanLoc { circuit, oracle: Arc::new(oracle) }
        })
        .collect()
}

/// Reverse-engineering pool: five block circuits, one shared oracle
/// trained over the whole pool.
pub fn reverse_eng_pool(seed: u64) -> Vec<Instance> {
    let specs: Vec<(Vec<usize>, Vec<ReBlockKind>)> = vec![
        (vec![2], ReBlockKind::ALL.to_vec()),
        (vec![2], ReBlockKind::ALL.to_vec()),
        (vec![2], vec![ReBlockKind::Add, ReBlockKind::Sub, ReBlockKind::Cmp, ReBlockKind::Mul]),
        (vec![4], ReBlockKind::ALL.to_vec()),
        (vec![2], vec![ReBlockKind::Mul, ReBlockKind::Add, ReBlockKind::Cmp, ReBlockKind::Ctrl]),
    ];
    let labeled: Vec<_> = specs
        .into_iter()
        .enumerate()
        .map(|(i, (widths, kinds))| {
            gen_re_blocks(&widths, &kinds, seed.wrapping_add(i as u64)).expect("pool blocks")
        })
        .collect();
    let dataset: Vec<_> = labeled.iter().map(|(n, t)| (n, t)).collect();
    let oracle =
        Arc::new(train_node_oracle(&dataset, DEFAULT_WL_DEPTH).expect("pool-trained oracle"));
    labeled
        .into_iter()
        .map(|(circuit, _)| Instance::ReverseEng { circuit, oracle: oracle.clone() })
        .collect()
}

/// Obfuscation pool: five locked instances (even key counts, so a key
/// prediction accuracy of exactly one half is representable), one oracle
/// trained over the pool.
pub fn obfuscation_pool(seed: u64) -> Vec<Instance> {
    let bases: Vec<(Netlist, usize)> = vec![
        (c17(), 4),
        (re_block(&[2], &[ReBlockKind::Add], seed ^ 3, "add2o"), 6),
        (mux4(), 6),
        (re_block(&[2], &[ReBlockKind::Mul], seed ^ 4, "mul2o"), 6),
        (majority3(), 4),
    ];
    let locked: Vec<(Netlist, Vec<bool>)> = bases
        .into_iter()
        .enumerate()
        .map(|(i, (base, keys))| {
            gen_obfuscated(&base, keys, seed.wrapping_add(i as u64)).expect("pool locking")
        })
        .collect();
    let dataset: Vec<(&Netlist, Vec<(crate::netlist::CellId, bool)>)> = locked
        .iter()
        .map(|(n, key)| {
            let gates = key_gate_cells(n)
                .into_iter()
                .map(|(i, cell)| (cell, key[i]))
                .collect::<Vec<_>>();
            (n, gates)
        })
        .collect();
    let dataset_refs: Vec<(&Netlist, &[(crate::netlist::CellId, bool)])> =
        dataset.iter().map(|(n, g)| (*n, g.as_slice())).collect();
    let oracle =
        Arc::new(train_key_oracle(&dataset_refs, DEFAULT_WL_DEPTH).expect("pool key oracle"));
    locked
        .into_iter()
        .map(|(circuit, key)| Instance::Obfuscation { circuit, key, oracle: oracle.clone() })
        .collect()
}

/// All four context pools for the multi-task demo and acceptance runs.
pub fn demo_pools(seed: u64) -> Vec<Instance> {
    let mut instances: Vec<Instance> =
        piracy_pool().into_iter().map(|circuit| Instance::Piracy { circuit }).collect();
    instances.extend(trojan_pool(seed));
    instances.extend(reverse_eng_pool(seed.wrapping_add(1000)));
    instances.extend(obfuscation_pool(seed.wrapping_add(2000)));
    instances
}

/// One registered stage around c17-style NAND logic, to exercise the
/// register cut in the transform stack.
pub fn sequential_toggle() -> Netlist {
    let mut n = Netlist::new("seq_toggle");
    let en = n.intern_net("en");
    let d_in = n.intern_net("d_in");
    n.push_input(en);
    n.push_input(d_in);
    let y = n.intern_net("y");
    n.push_output(y);
    let q = n.intern_net("q");
    let nxt = n.intern_net("nxt");
    let t1 = n.intern_net("t1");
    n.add_gate(GateKind::Xor, vec![q, en], t1, None).unwrap();
    n.add_gate(GateKind::And, vec![t1, d_in], nxt, None).unwrap();
    n.add_gate(GateKind::Dff, vec![nxt], q, None).unwrap();
    n.add_gate(GateKind::Nand, vec![q, d_in], y, None).unwrap();
    n
}
