//! The bin-packing gadget: items become types whose size is their resource
//! demand, bins become unit-cost nodes, and a weightless dummy target strongly
//! requires every item, so minimizing node cost is minimizing bins.
//!
//! ```bash
//! cargo run -p microplan --example gadget_binpack
//! ```

use microplan::generate::binpack_problem;
use microplan::verifier::brute_force_oracle_with_bounds;
use microplan::{planner, Configuration, PlanOptions};

fn main() {
    for (sizes, capacity) in [
        (vec![3u64, 3, 3], 6),
        (vec![5, 4, 3, 2, 1], 8),
        (vec![7, 7, 7], 7),
    ] {
        let problem = binpack_problem(&sizes, capacity).unwrap();
        let outcome = planner::plan(
            &problem.universe,
            &problem.pool,
            &Configuration::empty(),
            &problem.target,
            &PlanOptions {
                bounds: problem.bounds.clone(),
                ..Default::default()
            },
        )
        .unwrap();
        let bins = outcome.summary.as_ref().map(|s| s.cost);
        println!(
            "sizes {sizes:?} into capacity {capacity}: {} bin(s)",
            bins.map(|b| b.to_string()).unwrap_or_else(|| "-".into())
        );

        // The oracle agrees (caps keep its enumeration tiny).
        let caps: std::collections::BTreeMap<String, u64> = problem
            .universe
            .types()
            .map(|t| (t.name.clone(), 1))
            .collect();
        let oracle = brute_force_oracle_with_bounds(
            &problem.universe,
            &problem.pool,
            &problem.target,
            sizes.len() + 1,
            Some(&caps),
        )
        .unwrap()
        .map(|r| r.cost);
        assert_eq!(bins, oracle);
    }
}
