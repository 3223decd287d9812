//! The number-partition gadget: a universe whose weighted binding metric
//! scores an element `k` as `+k` when set A claims it and `-k` when set B
//! does. A split summing to zero exists exactly when the multiset can be
//! partitioned evenly - which is why weighted binding metrics make the
//! binding stage NP-hard.
//!
//! ```bash
//! cargo run -p microplan --example gadget_partition
//! ```

use microplan::generate::{partition_min_abs_objective, partition_problem};
use microplan::{planner, Configuration, PlanOptions};

fn main() {
    for elements in [vec![1u64, 2, 3], vec![1, 1, 1], vec![3, 5, 8, 9, 13]] {
        let best = partition_min_abs_objective(&elements).unwrap();
        // Independent check: enumerate all complete splits.
        let mut enumerated = i64::MAX;
        for mask in 0..(1u32 << elements.len()) {
            let sum: i64 = elements
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    if mask & (1 << i) != 0 {
                        *v as i64
                    } else {
                        -(*v as i64)
                    }
                })
                .sum();
            enumerated = enumerated.min(sum.abs());
        }
        assert_eq!(best as i64, enumerated);
        println!(
            "{elements:?}: minimal |A - B| = {best} {}",
            if best == 0 { "(even split exists)" } else { "" }
        );
    }

    // The gadget is an ordinary problem file set; the full planner deploys
    // every singleton once on the single arena node.
    let problem = partition_problem(&[1, 2, 3]).unwrap();
    let outcome = planner::plan(
        &problem.universe,
        &problem.pool,
        &Configuration::empty(),
        &problem.target,
        &PlanOptions {
            metric: problem.metric.clone(),
            bounds: problem.bounds.clone(),
            ..Default::default()
        },
    )
    .unwrap();
    let summary = outcome.summary.expect("gadget is solvable");
    println!(
        "planned: {} instance types deployed at cost {}",
        summary.instance_counts.len(),
        summary.cost
    );
}
