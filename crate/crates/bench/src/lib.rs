//! Synthetic workloads for the solver benchmarks.

use std::collections::BTreeMap;

use mdlconf_core::constraints::generate;
use mdlconf_core::derivation::derive_interfaces;
use mdlconf_core::{ConstraintSet, Label, ServiceStub, Topology};

/// A pipeline of `n` identical relay services: each takes `request` and
/// answers `response` on output 1, so flow tails chain end to end.
pub fn relay_chain(n: usize) -> ConstraintSet {
    let mut services = BTreeMap::new();
    let mut topo = String::new();
    for i in 0..n {
        let name = format!("R{i}");
        let stub = mdlconf_core::derivation::parse_stub(&format!(
            "service {name}\nin 1 request(title: string)\nsalvo 1 request(title: string) from request\n"
        ))
        .expect("valid stub");
        let d = derive_interfaces(&stub);
        services.insert(Label::new(name.clone()).unwrap(), d);
        if i > 0 {
            topo.push_str(&format!("channel R{}.out1 -> {name}.in1\n", i - 1));
        }
    }
    let top: Topology = mdlconf_core::constraints::load_topology(&topo).expect("valid topology");
    generate(&top, &services).expect("all ports exist")
}

pub fn stub(text: &str) -> ServiceStub {
    mdlconf_core::derivation::parse_stub(text).expect("valid stub")
}
