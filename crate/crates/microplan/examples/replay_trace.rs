//! Replay plans against the transition semantics. Every synthesized plan must
//! keep intermediate configurations provisionally correct and end correct;
//! the replay also catches hand-written plans that break the rules.
//!
//! ```bash
//! cargo run -p microplan --example replay_trace
//! ```

use microplan::model::{Action, Configuration};
use microplan::verifier::{run_plan, TraceVerdict};
use microplan::{fixtures, planner, PlanMode, PlanOptions};

fn main() {
    let problem = fixtures::fig1_mini();
    let outcome = planner::plan(
        &problem.universe,
        &problem.pool,
        &Configuration::empty(),
        &problem.target,
        &PlanOptions {
            mode: PlanMode::Scratch,
            ..Default::default()
        },
    )
    .expect("fixture inputs are valid");
    let plan = outcome.plan.expect("solvable");

    let trace = run_plan(&Configuration::empty(), &plan, &problem.universe, &problem.pool);
    println!("synthesized plan: {:?}", trace.verdict);
    for (index, step) in trace.steps.iter().enumerate() {
        println!(
            "  step {:>2}: {} -> {} instances, {} bindings",
            index + 1,
            step.action,
            step.config.instance_count(),
            step.config.binding_count(),
        );
    }

    // Now sabotage it: drop the final bind actions. The end state leaves the
    // receiver's weak arity unmet, which only full correctness catches.
    let mut broken = plan.clone();
    while matches!(broken.actions.last(), Some(Action::Bind { .. })) {
        broken.actions.pop();
    }
    let trace = run_plan(&Configuration::empty(), &broken, &problem.universe, &problem.pool);
    match &trace.verdict {
        TraceVerdict::ViolationAt { step, finding } => {
            println!("sabotaged plan rejected at step {step}: {finding}");
        }
        other => println!("unexpected verdict: {other:?}"),
    }

    // A bind on a strong port is rejected outright: strong ports are bound
    // only at instance creation.
    let mut illegal = plan.clone();
    illegal.actions.push(Action::Bind {
        interface: "AA".into(),
        requirer: "MessageAnalyzer#1".into(),
        provider: "AttachmentAnalyzer#1".into(),
    });
    let trace = run_plan(&Configuration::empty(), &illegal, &problem.universe, &problem.pool);
    match &trace.verdict {
        TraceVerdict::ViolationAt { step, finding } => {
            println!("illegal bind rejected at step {step}: {finding}");
        }
        other => println!("unexpected verdict: {other:?}"),
    }
}
