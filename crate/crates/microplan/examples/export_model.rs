//! Export the placement-stage constraint model as text, for cross-checking
//! with external solvers. The dump re-parses to an equivalent model.
//!
//! ```bash
//! cargo run -p microplan --example export_model
//! ```

use std::collections::BTreeMap;

use microplan::placement::{derive_bounds, encode};
use microplan::solver::{export_model, parse_model};
use microplan::fixtures;

fn main() {
    let problem = fixtures::fig1_mini();
    let bounds = derive_bounds(&problem.universe, &problem.pool, &BTreeMap::new()).unwrap();
    let (model, _) = encode(&problem.universe, &problem.pool, &problem.target, &bounds).unwrap();

    let text = export_model(&model);
    print!("{text}");

    let parsed = parse_model(&text).expect("the dump re-parses");
    assert_eq!(parsed, model);
    eprintln!("---");
    eprintln!(
        "{} lines; re-parsed model is identical",
        text.lines().count()
    );
}
