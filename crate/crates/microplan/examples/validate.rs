//! Validate problem inputs: universe well-formedness and configuration
//! correctness levels.
//!
//! ```bash
//! cargo run -p microplan --example validate
//! ```

use microplan::fixtures;
use microplan::model::Verdict;

fn main() {
    let problem = fixtures::fig1_mini();

    match problem.universe.check_well_formed() {
        Ok(()) => println!(
            "universe: well-formed ({} types over interfaces {:?})",
            problem.universe.len(),
            problem.universe.interfaces()
        ),
        Err(e) => println!("universe: {e}"),
    }

    let report = problem
        .initial
        .check_correct(&problem.universe, &problem.pool)
        .expect("fixture references are consistent");
    match report.verdict() {
        Verdict::Correct => println!("initial configuration: correct"),
        Verdict::ProvisionallyCorrectOnly => {
            println!("initial configuration: provisionally correct only");
            for violation in &report.violations {
                println!("  pending: {violation}");
            }
        }
        Verdict::Invalid => {
            println!("initial configuration: invalid");
            for violation in &report.violations {
                println!("  violation: {violation}");
            }
        }
    }

    // A deliberately broken pool: the receiver's node vanishes.
    let tiny_pool = microplan::NodePool::new(
        problem
            .pool
            .nodes()
            .filter(|n| n.name != "large#1")
            .cloned()
            .collect::<Vec<_>>(),
    )
    .unwrap();
    match problem.initial.check_correct(&problem.universe, &tiny_pool) {
        Err(e) => println!("with large#1 removed: rejected as expected: {e}"),
        Ok(_) => unreachable!("the initial configuration references large#1"),
    }
}
