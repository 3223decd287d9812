//! Cross-check the optimizer against the exhaustive oracle. The oracle
//! enumerates instance multisets, placements, and binding sets straight from
//! the definitions - no solver, no encoders - so agreement is meaningful.
//!
//! ```bash
//! cargo run -p microplan --example oracle_check
//! ```

use microplan::verifier::brute_force_oracle;
use microplan::{fixtures, generate, planner, Configuration, PlanOptions};

fn main() {
    let problem = fixtures::fig1_mini();
    let outcome = planner::plan(
        &problem.universe,
        &problem.pool,
        &Configuration::empty(),
        &problem.target,
        &PlanOptions::default(),
    )
    .expect("valid inputs");
    let solver_cost = outcome.summary.expect("solvable").cost;

    let oracle = brute_force_oracle(&problem.universe, &problem.pool, &problem.target, 8)
        .expect("within budget")
        .expect("solvable");
    println!("running example: solver {} vs oracle {}", solver_cost, oracle.cost);
    assert_eq!(solver_cost, oracle.cost);

    // A few random universes, same drill.
    let mut agreements = 0;
    for seed in 0..10 {
        let random = generate::random_problem(seed, 3, 4);
        let caps: std::collections::BTreeMap<String, u64> = random
            .universe
            .types()
            .map(|t| (t.name.clone(), 2))
            .collect();
        let options = PlanOptions {
            bounds: caps.clone(),
            ..Default::default()
        };
        let outcome = planner::plan(
            &random.universe,
            &random.pool,
            &Configuration::empty(),
            &random.target,
            &options,
        )
        .expect("valid inputs");
        let oracle = brute_force_oracle_bounded(&random, &caps);
        let solver_cost = outcome.summary.map(|s| s.cost);
        println!("seed {seed}: solver {solver_cost:?} vs oracle {oracle:?}");
        assert_eq!(solver_cost, oracle);
        agreements += 1;
    }
    println!("{agreements}/10 random instances agree");
}

fn brute_force_oracle_bounded(
    problem: &generate::GeneratedProblem,
    caps: &std::collections::BTreeMap<String, u64>,
) -> Option<u64> {
    microplan::verifier::brute_force_oracle_with_bounds(
        &problem.universe,
        &problem.pool,
        &problem.target,
        8,
        Some(caps),
    )
    .expect("within budget")
    .map(|r| r.cost)
}
