//! Binding metrics on the load-balancer pattern: a balancer declares a weak
//! requirement with arity 0, so nothing forces any binding - the metric
//! decides. Maximizing bindings connects the balancer to every backend;
//! minimizing cross-node bindings leaves optional links alone.
//!
//! ```bash
//! cargo run -p microplan --example binding_metrics
//! ```

use std::collections::BTreeMap;

use microplan::binding::{self, BindingMetric, PlacedInstance};
use microplan::model::{Arity, MicroserviceType, Universe};
use microplan::solver::{solve, Budget};

fn main() {
    let balancer = MicroserviceType {
        name: "Balancer".into(),
        provides: BTreeMap::new(),
        strong_requires: BTreeMap::new(),
        weak_requires: [("svc".to_string(), 0)].into(),
        conflicts: Default::default(),
        resources: [("CPU".to_string(), 1)].into(),
    };
    let service = MicroserviceType {
        name: "Service".into(),
        provides: [("svc".to_string(), Arity::Infinite)].into(),
        strong_requires: BTreeMap::new(),
        weak_requires: BTreeMap::new(),
        conflicts: Default::default(),
        resources: [("CPU".to_string(), 1)].into(),
    };
    let universe = Universe::new([balancer, service]).unwrap();

    for backends in [1u64, 3, 5] {
        let mut instances = vec![PlacedInstance {
            id: "Balancer#1".into(),
            type_name: "Balancer".into(),
            node: "n1".into(),
        }];
        for k in 1..=backends {
            instances.push(PlacedInstance {
                id: format!("Service#{k}"),
                type_name: "Service".into(),
                // Spread the backends over two nodes so min-cross has
                // something to think about.
                node: if k % 2 == 0 { "n2".into() } else { "n1".into() },
            });
        }

        println!("{backends} backend(s):");
        for metric in [
            BindingMetric::None,
            BindingMetric::MinimizeCrossNode,
            BindingMetric::MaximizeBindings,
        ] {
            let (model, vars) = binding::encode(&instances, &universe, &metric).unwrap();
            let out = solve(&model, &Budget::unlimited()).unwrap();
            let plan = binding::extract_binding_plan(
                out.assignment.as_ref().unwrap(),
                &vars,
                &instances,
                &universe,
            )
            .unwrap();
            println!("  metric {metric}: {} binding(s)", plan.bindings.len());
        }
    }
}
