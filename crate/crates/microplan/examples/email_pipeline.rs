//! The desk-scale case study: an email processing pipeline of twelve services
//! plus one load balancer each, deployed over 120 nodes of three kinds. The
//! demand parameter sets the offered load (thousands of simultaneous
//! requests); each balancer's replica floor is ceil(demand / capacity) of its
//! service.
//!
//! Demand 0 degenerates to the pure bind-whatever-exists balancer pattern
//! (weak arity 0), demand 10 is the shipped fixture, and demand 30 forces
//! real horizontal scaling - it is also combinatorially nastier (the optimal
//! cost is only reachable by zero-slack node sets), so it runs under a time
//! limit and may come back feasible-but-unproven.
//!
//! ```bash
//! cargo run --release -p microplan --example email_pipeline
//! ```

use std::time::{Duration, Instant};

use microplan::binding::BindingMetric;
use microplan::{fixtures, planner, Configuration, PlanMode, PlanOptions, PlanStatus};

fn main() {
    for (demand, time_limit) in [(0u64, None), (10, None), (30, Some(30))] {
        let problem = fixtures::email_pipeline(demand);
        let options = PlanOptions {
            mode: PlanMode::Scratch,
            metric: BindingMetric::MaximizeBindings,
            time_limit: time_limit.map(Duration::from_secs),
            ..Default::default()
        };
        let start = Instant::now();
        let outcome = planner::plan(
            &problem.universe,
            &problem.pool,
            &Configuration::empty(),
            &problem.target,
            &options,
        )
        .expect("fixture inputs are valid");
        let elapsed = start.elapsed();

        match outcome.status {
            PlanStatus::Optimal | PlanStatus::FeasibleUnproven => {}
            other => {
                println!("demand {demand}K: {other:?} after {elapsed:.2?}");
                continue;
            }
        }
        let summary = outcome.summary.expect("plan produced");
        let total: u64 = summary.instance_counts.values().sum();
        println!(
            "demand {demand}K: {total} instances on {} nodes, cost {}, {} actions, {elapsed:.2?} ({:?})",
            summary.used_nodes.len(),
            summary.cost,
            summary.action_count,
            outcome.status,
        );
        let mut by_kind: std::collections::BTreeMap<&str, usize> = Default::default();
        for node in &summary.used_nodes {
            let kind = node.split('#').next().unwrap_or(node);
            *by_kind.entry(kind).or_default() += 1;
        }
        for (kind, count) in by_kind {
            println!("  {count} x {kind}");
        }
        let replicas: Vec<String> = summary
            .instance_counts
            .iter()
            .filter(|(ty, n)| !ty.ends_with("Balancer") && **n > 1)
            .map(|(ty, n)| format!("{ty} x{n}"))
            .collect();
        if !replicas.is_empty() {
            println!("  scaled out: {}", replicas.join(", "));
        }
    }
}
