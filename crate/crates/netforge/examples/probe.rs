fn main() {
    let fa = netforge::corpus::full_adder();
    for action in [netforge::techmap::ActionId::A1, netforge::techmap::ActionId::A2] {
        let mapped = netforge::techmap::apply_action(&fa, action, false).unwrap();
        println!("== {action}:\n{}", netforge::netlist::write_blif(&mapped));
    }
    let aig = netforge::aig::netlist_to_aig(&fa).unwrap();
    println!("fa aig nodes: {}", aig.node_count());
    let rw = netforge::aig::rewrite(&aig, false);
    println!("after rewrite: {}", rw.node_count());
    let bal = netforge::aig::balance(&rw);
    println!("after balance: {}", bal.node_count());
    let rf = netforge::aig::refactor(&bal, false);
    println!("after refactor: {}", rf.node_count());
}
