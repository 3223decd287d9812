//! Reconfigure a running deployment instead of rebuilding it: instances whose
//! type, node, and strong bindings already fit the optimal target stay up.
//!
//! The fixture starts with one instance of each type and a receiver that
//! still needs two more analyzer bindings; the plan adds one attachment
//! analyzer, two analyzers, and the two missing bindings - nothing is torn
//! down.
//!
//! ```bash
//! cargo run -p microplan --example plan_incremental
//! ```

use microplan::{fixtures, planner, PlanMode, PlanOptions};

fn main() {
    let problem = fixtures::fig1_mini();

    println!("initially deployed:");
    for (id, info) in problem.initial.instances() {
        println!("  {id}: {} on {}", info.type_name, info.node);
    }

    for mode in [PlanMode::Scratch, PlanMode::Incremental] {
        let options = PlanOptions {
            mode,
            ..Default::default()
        };
        let outcome = planner::plan(
            &problem.universe,
            &problem.pool,
            &problem.initial,
            &problem.target,
            &options,
        )
        .expect("fixture inputs are valid");
        let summary = outcome.summary.expect("solvable");
        let plan = outcome.plan.expect("plan present");
        println!();
        println!("{mode:?} mode: cost {}, {} actions", summary.cost, plan.len());
        for (step, action) in plan.actions.iter().enumerate() {
            println!("  {:>2}. {action}", step + 1);
        }
    }
}
