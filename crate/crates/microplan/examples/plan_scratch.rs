//! Plan a deployment from nothing: the solver picks instance counts and
//! placements of minimal node cost, the binding stage wires them, and the
//! synthesizer orders the actions so every intermediate state is safe.
//!
//! ```bash
//! cargo run -p microplan --example plan_scratch
//! ```

use microplan::{fixtures, planner, Configuration, PlanMode, PlanOptions};

fn main() {
    let problem = fixtures::fig1_mini();
    let options = PlanOptions {
        mode: PlanMode::Scratch,
        ..Default::default()
    };

    let outcome = planner::plan(
        &problem.universe,
        &problem.pool,
        &Configuration::empty(),
        &problem.target,
        &options,
    )
    .expect("fixture inputs are valid");

    let summary = outcome.summary.expect("the fixture is solvable");
    println!("target: {}", problem.target);
    println!("optimal cost: {}", summary.cost);
    for (ty, count) in &summary.instance_counts {
        println!("  {count} x {ty}");
    }
    println!("used nodes:");
    for ((ty, node), count) in &summary.placement {
        println!("  {node}: {count} x {ty}");
    }

    println!("plan ({} actions):", summary.action_count);
    for (step, action) in outcome.plan.expect("plan present").actions.iter().enumerate() {
        println!("  {:>2}. {action}", step + 1);
    }
}
