//! A self-contained exact optimizer over bounded integer variables.
//!
//! The model shape is exactly what the two encoding stages need: linear
//! constraints over integer variables with finite nonnegative domains,
//! guard-style implications, product upper bounds (`x <= a*b` or
//! `x <= a*(b-1)`), and a linear objective. [`solve`] runs depth-first
//! branch-and-bound with bounds-consistency propagation; [`evaluate`] checks
//! an assignment literally and is the test oracle for the search;
//! [`export_model`] emits a line-oriented textual dump that [`parse_model`]
//! reads back.
//!
//! No floating point anywhere; all arithmetic is exact.

mod export;
mod search;

pub use export::{export_model, parse_model};
pub use search::{propagate_root, solve};

use std::fmt;
use std::time::Duration;

/// Handle to a model variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub usize);

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// A variable definition: diagnostic name and inclusive domain `[lo, hi]`
/// with `lo >= 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDef {
    pub name: String,
    pub lo: i64,
    pub hi: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

/// `sum(coef * var) <relation> constant`. No variable may appear twice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearConstraint {
    pub terms: Vec<(i64, VarId)>,
    pub relation: Relation,
    pub constant: i64,
}

impl LinearConstraint {
    pub fn new(terms: Vec<(i64, VarId)>, relation: Relation, constant: i64) -> Self {
        LinearConstraint {
            terms,
            relation,
            constant,
        }
    }
}

/// Sense of an implication guard.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GuardSense {
    /// Fires when the guard variable is 0.
    IsZero,
    /// Fires when the guard variable is >= 1.
    IsPositive,
}

/// `guard <sense> => consequence`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Implication {
    pub guard: VarId,
    pub sense: GuardSense,
    pub consequence: LinearConstraint,
}

/// `bounded <= factor_a * (factor_b + offset)` with `offset` in `{0, -1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductBound {
    pub bounded: VarId,
    pub factor_a: VarId,
    pub factor_b: VarId,
    pub offset: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Linear objective; an empty term list makes every solution equally good.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Objective {
    pub sense: Sense,
    pub terms: Vec<(i64, VarId)>,
}

impl Default for Objective {
    fn default() -> Self {
        Objective {
            sense: Sense::Minimize,
            terms: Vec::new(),
        }
    }
}

/// A complete constraint model.
#[derive(Debug, Clone, Default)]
pub struct Model {
    vars: Vec<VarDef>,
    pub linear: Vec<LinearConstraint>,
    pub implications: Vec<Implication>,
    pub product_bounds: Vec<ProductBound>,
    pub objective: Objective,
    /// Variables the search should try high-first regardless of the
    /// objective sense. Pure search guidance (useful for packing-shaped
    /// variables); never affects which assignments are feasible or optimal.
    prefer_high: std::collections::BTreeSet<usize>,
}

/// Model equality is semantic: two models are equal when they admit the same
/// assignments with the same objective. Search guidance is excluded, so a
/// re-parsed export compares equal to its source.
impl PartialEq for Model {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars
            && self.linear == other.linear
            && self.implications == other.implications
            && self.product_bounds == other.product_bounds
            && self.objective == other.objective
    }
}

impl Eq for Model {}

impl Model {
    pub fn new() -> Self {
        Model::default()
    }

    /// Adds a variable with inclusive domain `[lo, hi]`.
    pub fn add_var(&mut self, name: impl Into<String>, lo: i64, hi: i64) -> VarId {
        let id = VarId(self.vars.len());
        self.vars.push(VarDef {
            name: name.into(),
            lo,
            hi,
        });
        id
    }

    pub fn add_linear(&mut self, constraint: LinearConstraint) {
        self.linear.push(constraint);
    }

    pub fn add_implication(&mut self, implication: Implication) {
        self.implications.push(implication);
    }

    pub fn add_product_bound(&mut self, bound: ProductBound) {
        self.product_bounds.push(bound);
    }

    pub fn set_objective(&mut self, objective: Objective) {
        self.objective = objective;
    }

    /// Marks a variable for high-first value branching.
    pub fn set_prefer_high(&mut self, var: VarId) {
        self.prefer_high.insert(var.0);
    }

    pub fn prefers_high(&self, var: VarId) -> bool {
        self.prefer_high.contains(&var.0)
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var(&self, id: VarId) -> &VarDef {
        &self.vars[id.0]
    }

    pub fn vars(&self) -> &[VarDef] {
        &self.vars
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.vars.iter().position(|v| v.name == name).map(VarId)
    }

    /// Structural well-formedness: valid domains, valid variable references,
    /// no duplicate variables within a constraint, offsets in range, and
    /// unique whitespace-free names (required by the export format).
    pub fn validate(&self) -> Result<(), SolverError> {
        let n = self.vars.len();
        let mut seen = std::collections::BTreeSet::new();
        for (i, v) in self.vars.iter().enumerate() {
            if v.lo < 0 || v.lo > v.hi {
                return Err(SolverError::BadDomain {
                    var: VarId(i),
                    lo: v.lo,
                    hi: v.hi,
                });
            }
            if v.name.is_empty() || v.name.chars().any(char::is_whitespace) {
                return Err(SolverError::BadName(v.name.clone()));
            }
            if !seen.insert(v.name.as_str()) {
                return Err(SolverError::BadName(v.name.clone()));
            }
        }
        let check_lin = |c: &LinearConstraint| -> Result<(), SolverError> {
            let mut vars_seen = std::collections::BTreeSet::new();
            for (_, var) in &c.terms {
                if var.0 >= n {
                    return Err(SolverError::UnknownVar(*var));
                }
                if !vars_seen.insert(var.0) {
                    return Err(SolverError::DuplicateTerm(*var));
                }
            }
            Ok(())
        };
        for c in &self.linear {
            check_lin(c)?;
        }
        for imp in &self.implications {
            if imp.guard.0 >= n {
                return Err(SolverError::UnknownVar(imp.guard));
            }
            check_lin(&imp.consequence)?;
        }
        for p in &self.product_bounds {
            for var in [p.bounded, p.factor_a, p.factor_b] {
                if var.0 >= n {
                    return Err(SolverError::UnknownVar(var));
                }
            }
            if p.offset != 0 && p.offset != -1 {
                return Err(SolverError::BadOffset(p.offset));
            }
        }
        for (_, var) in &self.objective.terms {
            if var.0 >= n {
                return Err(SolverError::UnknownVar(*var));
            }
        }
        Ok(())
    }
}

/// A total assignment of values to model variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    values: Vec<i64>,
}

impl Assignment {
    pub fn new(values: Vec<i64>) -> Self {
        Assignment { values }
    }

    pub fn get(&self, var: VarId) -> i64 {
        self.values[var.0]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// Search completed; the assignment is proven optimal.
    Optimal,
    /// The time budget expired with an incumbent in hand.
    FeasibleUnproven,
    /// Search completed with no solution.
    Unsat,
    /// The time budget expired before any solution was found.
    TimeoutNoSolution,
}

/// Result of a solve call. `assignment` and `objective_value` are present for
/// `Optimal` and `FeasibleUnproven`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub assignment: Option<Assignment>,
    pub objective_value: Option<i64>,
    /// Number of search nodes explored (diagnostic).
    pub nodes: u64,
}

/// Search budget. The search itself is deterministic; the seed is recorded so
/// callers can thread one budget through reproducible pipelines. A node limit
/// bounds the search deterministically (unlike wall-clock time) and counts as
/// an expired budget when hit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Budget {
    pub time_limit: Option<Duration>,
    pub max_nodes: Option<u64>,
    pub seed: u64,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn with_time_limit(limit: Duration) -> Self {
        Budget {
            time_limit: Some(limit),
            ..Budget::default()
        }
    }

    pub fn with_max_nodes(max_nodes: u64) -> Self {
        Budget {
            max_nodes: Some(max_nodes),
            ..Budget::default()
        }
    }
}

/// Literal check of an assignment against a model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Evaluation {
    pub satisfied: bool,
    pub objective_value: i64,
}

/// Checks every constraint of `model` under `assignment` by direct
/// arithmetic, including domain membership and product bounds by direct
/// multiplication. The assignment must be total.
pub fn evaluate(model: &Model, assignment: &Assignment) -> Result<Evaluation, SolverError> {
    model.validate()?;
    if assignment.len() != model.num_vars() {
        return Err(SolverError::PartialAssignment {
            expected: model.num_vars(),
            given: assignment.len(),
        });
    }

    let lin_value = |c: &LinearConstraint| -> i128 {
        c.terms
            .iter()
            .map(|(coef, var)| *coef as i128 * assignment.get(*var) as i128)
            .sum()
    };
    let lin_holds = |c: &LinearConstraint| -> bool {
        let value = lin_value(c);
        let constant = c.constant as i128;
        match c.relation {
            Relation::Le => value <= constant,
            Relation::Ge => value >= constant,
            Relation::Eq => value == constant,
        }
    };

    let mut satisfied = true;
    for (i, def) in model.vars().iter().enumerate() {
        let value = assignment.get(VarId(i));
        if value < def.lo || value > def.hi {
            satisfied = false;
        }
    }
    satisfied &= model.linear.iter().all(lin_holds);
    for imp in &model.implications {
        let guard = assignment.get(imp.guard);
        let fires = match imp.sense {
            GuardSense::IsZero => guard == 0,
            GuardSense::IsPositive => guard > 0,
        };
        if fires && !lin_holds(&imp.consequence) {
            satisfied = false;
        }
    }
    for p in &model.product_bounds {
        let bounded = assignment.get(p.bounded) as i128;
        let product =
            assignment.get(p.factor_a) as i128 * (assignment.get(p.factor_b) as i128 + p.offset as i128);
        if bounded > product {
            satisfied = false;
        }
    }

    let objective_value: i128 = model
        .objective
        .terms
        .iter()
        .map(|(w, var)| *w as i128 * assignment.get(*var) as i128)
        .sum();
    Ok(Evaluation {
        satisfied,
        objective_value: objective_value as i64,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("variable {var} has malformed domain [{lo}, {hi}]")]
    BadDomain { var: VarId, lo: i64, hi: i64 },
    #[error("variable name {0:?} is empty, duplicated, or contains whitespace")]
    BadName(String),
    #[error("constraint references unknown variable {0}")]
    UnknownVar(VarId),
    #[error("variable {0} appears twice in one constraint")]
    DuplicateTerm(VarId),
    #[error("product bound offset {0} is not 0 or -1")]
    BadOffset(i64),
    #[error("assignment covers {given} of {expected} variables")]
    PartialAssignment { expected: usize, given: usize },
    #[error("model export parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive enumeration oracle for small models. Independent of the
    /// branch-and-bound search path.
    pub(crate) fn enumerate_best(model: &Model) -> Option<(Vec<i64>, i64)> {
        fn rec(
            model: &Model,
            values: &mut Vec<i64>,
            best: &mut Option<(Vec<i64>, i64)>,
        ) {
            if values.len() == model.num_vars() {
                let assignment = Assignment::new(values.clone());
                let eval = evaluate(model, &assignment).expect("total assignment");
                if eval.satisfied {
                    let better = match (&best, model.objective.sense) {
                        (None, _) => true,
                        (Some((_, b)), Sense::Minimize) => eval.objective_value < *b,
                        (Some((_, b)), Sense::Maximize) => eval.objective_value > *b,
                    };
                    if better {
                        *best = Some((values.clone(), eval.objective_value));
                    }
                }
                return;
            }
            let def = &model.vars()[values.len()];
            for v in def.lo..=def.hi {
                values.push(v);
                rec(model, values, best);
                values.pop();
            }
        }
        let mut best = None;
        rec(model, &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn evaluate_checks_constraints_literally() {
        let mut m = Model::new();
        let x = m.add_var("x", 0, 1);
        let y = m.add_var("y", 0, 5);
        m.add_implication(Implication {
            guard: x,
            sense: GuardSense::IsZero,
            consequence: LinearConstraint::new(vec![(1, y)], Relation::Le, 0),
        });
        m.add_linear(LinearConstraint::new(vec![(1, y)], Relation::Ge, 3));

        let bad = Assignment::new(vec![0, 3]);
        assert!(!evaluate(&m, &bad).unwrap().satisfied);
        let good = Assignment::new(vec![1, 3]);
        assert!(evaluate(&m, &good).unwrap().satisfied);
    }

    #[test]
    fn evaluate_rejects_partial_assignments() {
        let mut m = Model::new();
        m.add_var("x", 0, 1);
        assert!(matches!(
            evaluate(&m, &Assignment::new(vec![])),
            Err(SolverError::PartialAssignment { .. })
        ));
    }

    #[test]
    fn validate_rejects_malformed_models() {
        let mut m = Model::new();
        m.add_var("x", 3, 2);
        assert!(matches!(m.validate(), Err(SolverError::BadDomain { .. })));

        let mut m = Model::new();
        let x = m.add_var("x", 0, 2);
        m.add_linear(LinearConstraint::new(vec![(1, x), (2, x)], Relation::Le, 1));
        assert!(matches!(m.validate(), Err(SolverError::DuplicateTerm(_))));

        let mut m = Model::new();
        m.add_var("bad name", 0, 1);
        assert!(matches!(m.validate(), Err(SolverError::BadName(_))));
    }
}
