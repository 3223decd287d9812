//! Depth-first branch-and-bound with bounds-consistency propagation.
//!
//! Branching is smallest-domain-first with ties broken by lowest variable id;
//! values are tried ascending under minimization and descending under
//! maximization (the first branch fixes the bound value, the second excludes
//! it). An incumbent installs an objective cut that prunes the rest of the
//! search; an exhausted search proves optimality or unsatisfiability. The
//! search is single-threaded and bit-reproducible for a given model.

use std::time::Instant;

use super::{
    Assignment, Budget, GuardSense, LinearConstraint, Model, Relation, SolveOutcome, SolveStatus,
    SolverError,
};

/// Solves `model` within `budget`.
pub fn solve(model: &Model, budget: &Budget) -> Result<SolveOutcome, SolverError> {
    model.validate()?;
    let deadline = budget.time_limit.map(|limit| Instant::now() + limit);
    let mut engine = Engine::new(model);
    let timed_out = engine.run(deadline, budget.max_nodes);

    let status = match (&engine.incumbent, timed_out) {
        (Some(_), false) => SolveStatus::Optimal,
        (Some(_), true) => SolveStatus::FeasibleUnproven,
        (None, false) => SolveStatus::Unsat,
        (None, true) => SolveStatus::TimeoutNoSolution,
    };
    let (assignment, objective_value) = match engine.incumbent {
        Some((values, objective)) => (Some(Assignment::new(values)), Some(objective)),
        None => (None, None),
    };
    Ok(SolveOutcome {
        status,
        assignment,
        objective_value,
        nodes: engine.nodes,
    })
}

/// Propagates the root node to fixpoint without searching. Returns the
/// tightened `(lo, hi)` domain per variable, or `None` when the model is
/// already infeasible at the root. Useful for presolve bounds: any feasible
/// objective value lies within the propagated objective-variable bounds.
pub fn propagate_root(model: &Model) -> Result<Option<Vec<(i64, i64)>>, SolverError> {
    model.validate()?;
    let mut engine = Engine::new(model);
    if !engine.propagate_all() {
        return Ok(None);
    }
    Ok(Some(
        engine.lo.iter().copied().zip(engine.hi.iter().copied()).collect(),
    ))
}

/// Dense index of a propagator: linear constraints, then implications, then
/// product bounds, then the objective cut.
type PropIdx = usize;

struct Frame {
    var: usize,
    pivot: i64,
    /// True when this frame branches high-first.
    descending: bool,
    trail_mark: usize,
    second_branch_taken: bool,
}

struct Engine<'m> {
    model: &'m Model,
    lo: Vec<i64>,
    hi: Vec<i64>,
    /// Saved `(var, old_lo, old_hi)` triples, undone on backtrack.
    trail: Vec<(usize, i64, i64)>,
    /// Propagators to rerun, LIFO.
    queue: Vec<PropIdx>,
    in_queue: Vec<bool>,
    /// For each variable, the propagators that mention it.
    watchers: Vec<Vec<PropIdx>>,
    frames: Vec<Frame>,
    incumbent: Option<(Vec<i64>, i64)>,
    /// Objective cut from the incumbent: minimize keeps `obj <= bound`,
    /// maximize keeps `obj >= bound`.
    obj_bound: Option<i64>,
    minimize: bool,
    nodes: u64,
    num_props: usize,
}

const OBJ_CUT: usize = usize::MAX;

impl<'m> Engine<'m> {
    fn new(model: &'m Model) -> Self {
        let n = model.num_vars();
        let lo: Vec<i64> = model.vars().iter().map(|v| v.lo).collect();
        let hi: Vec<i64> = model.vars().iter().map(|v| v.hi).collect();

        let num_props = model.linear.len() + model.implications.len() + model.product_bounds.len();
        let mut watchers: Vec<Vec<PropIdx>> = vec![Vec::new(); n];
        let register = |var: usize, prop: PropIdx, watchers: &mut Vec<Vec<PropIdx>>| {
            if watchers[var].last() != Some(&prop) {
                watchers[var].push(prop);
            }
        };
        for (i, c) in model.linear.iter().enumerate() {
            for (_, v) in &c.terms {
                register(v.0, i, &mut watchers);
            }
        }
        let base = model.linear.len();
        for (i, imp) in model.implications.iter().enumerate() {
            register(imp.guard.0, base + i, &mut watchers);
            for (_, v) in &imp.consequence.terms {
                register(v.0, base + i, &mut watchers);
            }
        }
        let base = base + model.implications.len();
        for (i, p) in model.product_bounds.iter().enumerate() {
            register(p.bounded.0, base + i, &mut watchers);
            register(p.factor_a.0, base + i, &mut watchers);
            register(p.factor_b.0, base + i, &mut watchers);
        }

        Engine {
            model,
            lo,
            hi,
            trail: Vec::new(),
            queue: Vec::new(),
            in_queue: vec![false; num_props + 1],
            watchers,
            frames: Vec::new(),
            incumbent: None,
            obj_bound: None,
            minimize: matches!(model.objective.sense, super::Sense::Minimize),
            nodes: 0,
            num_props,
        }
    }

    /// Returns true if the search stopped on the budget (time or nodes).
    fn run(&mut self, deadline: Option<Instant>, max_nodes: Option<u64>) -> bool {
        let mut conflict = !self.propagate_all();
        loop {
            self.nodes += 1;
            if let Some(max_nodes) = max_nodes {
                if self.nodes > max_nodes {
                    return true;
                }
            }
            if self.nodes & 0x3ff == 1 {
                if let Some(deadline) = deadline {
                    if Instant::now() >= deadline {
                        return true;
                    }
                }
            }

            if conflict {
                if !self.backtrack() {
                    return false;
                }
                conflict = !self.propagate();
                continue;
            }

            match self.select_var() {
                None => {
                    self.record_incumbent();
                    conflict = true;
                }
                Some(var) => {
                    // Values are tried ascending under minimization and
                    // descending under maximization, unless the model marks
                    // the variable high-first.
                    let descending =
                        !self.minimize || self.model.prefers_high(super::VarId(var));
                    let pivot = if descending { self.hi[var] } else { self.lo[var] };
                    self.frames.push(Frame {
                        var,
                        pivot,
                        descending,
                        trail_mark: self.trail.len(),
                        second_branch_taken: false,
                    });
                    let ok = if descending {
                        self.set_lo(var, pivot)
                    } else {
                        self.set_hi(var, pivot)
                    };
                    conflict = !ok || !self.propagate();
                }
            }
        }
    }

    /// Unwinds to the deepest frame with an untried branch and applies it.
    /// Returns false when the search tree is exhausted.
    fn backtrack(&mut self) -> bool {
        self.clear_queue();
        loop {
            let Some(frame) = self.frames.last_mut() else {
                return false;
            };
            if frame.second_branch_taken {
                let mark = frame.trail_mark;
                self.frames.pop();
                self.undo_to(mark);
                continue;
            }
            frame.second_branch_taken = true;
            let (var, pivot, descending, mark) =
                (frame.var, frame.pivot, frame.descending, frame.trail_mark);
            self.undo_to(mark);
            let ok = if descending {
                self.set_hi(var, pivot - 1)
            } else {
                self.set_lo(var, pivot + 1)
            };
            if ok {
                return true;
            }
            self.clear_queue();
        }
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (var, old_lo, old_hi) = self.trail.pop().expect("mark within trail");
            self.lo[var] = old_lo;
            self.hi[var] = old_hi;
        }
    }

    fn clear_queue(&mut self) {
        for prop in self.queue.drain(..) {
            let slot = if prop == OBJ_CUT { self.num_props } else { prop };
            self.in_queue[slot] = false;
        }
    }

    /// Smallest domain first, ties broken by lowest variable id.
    fn select_var(&self) -> Option<usize> {
        let mut best: Option<(i64, usize)> = None;
        for var in 0..self.lo.len() {
            let width = self.hi[var] - self.lo[var];
            if width > 0 && best.is_none_or(|(w, _)| width < w) {
                best = Some((width, var));
                if width == 1 {
                    break;
                }
            }
        }
        best.map(|(_, var)| var)
    }

    fn record_incumbent(&mut self) {
        let values = self.lo.clone();
        let objective: i128 = self
            .model
            .objective
            .terms
            .iter()
            .map(|(w, v)| *w as i128 * values[v.0] as i128)
            .sum();
        let objective = objective as i64;
        let better = match (&self.incumbent, self.minimize) {
            (None, _) => true,
            (Some((_, best)), true) => objective < *best,
            (Some((_, best)), false) => objective > *best,
        };
        if better {
            self.incumbent = Some((values, objective));
            self.obj_bound = Some(if self.minimize {
                objective - 1
            } else {
                objective + 1
            });
        }
    }

    fn enqueue(&mut self, prop: PropIdx) {
        let slot = if prop == OBJ_CUT { self.num_props } else { prop };
        if !self.in_queue[slot] {
            self.in_queue[slot] = true;
            self.queue.push(prop);
        }
    }

    fn enqueue_watchers(&mut self, var: usize) {
        for i in 0..self.watchers[var].len() {
            let prop = self.watchers[var][i];
            self.enqueue(prop);
        }
        if self
            .model
            .objective
            .terms
            .iter()
            .any(|(_, v)| v.0 == var)
        {
            self.enqueue(OBJ_CUT);
        }
    }

    fn set_lo(&mut self, var: usize, value: i64) -> bool {
        if value <= self.lo[var] {
            return true;
        }
        self.trail.push((var, self.lo[var], self.hi[var]));
        self.lo[var] = value;
        if value > self.hi[var] {
            return false;
        }
        self.enqueue_watchers(var);
        true
    }

    fn set_hi(&mut self, var: usize, value: i64) -> bool {
        if value >= self.hi[var] {
            return true;
        }
        self.trail.push((var, self.lo[var], self.hi[var]));
        self.hi[var] = value;
        if value < self.lo[var] {
            return false;
        }
        self.enqueue_watchers(var);
        true
    }

    /// Seeds the queue with every propagator and runs to fixpoint.
    fn propagate_all(&mut self) -> bool {
        for i in 0..self.num_props {
            self.enqueue(i);
        }
        self.propagate()
    }

    /// Runs queued propagators to fixpoint. Returns false on conflict.
    fn propagate(&mut self) -> bool {
        if self.obj_bound.is_some() {
            self.enqueue(OBJ_CUT);
        }
        let model = self.model;
        while let Some(prop) = self.queue.pop() {
            let slot = if prop == OBJ_CUT { self.num_props } else { prop };
            self.in_queue[slot] = false;
            let ok = if prop == OBJ_CUT {
                self.propagate_obj_cut()
            } else if prop < model.linear.len() {
                self.propagate_linear(&model.linear[prop])
            } else if prop < model.linear.len() + model.implications.len() {
                self.propagate_implication(&model.implications[prop - model.linear.len()])
            } else {
                let idx = prop - model.linear.len() - model.implications.len();
                self.propagate_product(&model.product_bounds[idx])
            };
            if !ok {
                return false;
            }
        }
        true
    }

    fn term_bounds(&self, coef: i64, var: usize) -> (i128, i128) {
        let a = coef as i128 * self.lo[var] as i128;
        let b = coef as i128 * self.hi[var] as i128;
        (a.min(b), a.max(b))
    }

    fn propagate_obj_cut(&mut self) -> bool {
        let Some(bound) = self.obj_bound else {
            return true;
        };
        let model = self.model;
        let relation = if self.minimize { Relation::Le } else { Relation::Ge };
        self.propagate_linear_parts(&model.objective.terms, relation, bound)
    }

    fn propagate_linear(&mut self, c: &LinearConstraint) -> bool {
        self.propagate_linear_parts(&c.terms, c.relation, c.constant)
    }

    fn propagate_linear_parts(
        &mut self,
        terms: &[(i64, super::VarId)],
        relation: Relation,
        constant: i64,
    ) -> bool {
        let constant = constant as i128;
        if matches!(relation, Relation::Le | Relation::Eq) {
            let sum_min: i128 = terms.iter().map(|(w, v)| self.term_bounds(*w, v.0).0).sum();
            if sum_min > constant {
                return false;
            }
            for (coef, var) in terms {
                let (term_min, _) = self.term_bounds(*coef, var.0);
                let budget = constant - (sum_min - term_min);
                // coef * x <= budget
                if *coef > 0 {
                    if !self.set_hi(var.0, clamp(div_floor(budget, *coef as i128))) {
                        return false;
                    }
                } else if *coef < 0
                    && !self.set_lo(var.0, clamp(div_ceil(budget, *coef as i128))) {
                        return false;
                    }
            }
        }
        if matches!(relation, Relation::Ge | Relation::Eq) {
            let sum_max: i128 = terms.iter().map(|(w, v)| self.term_bounds(*w, v.0).1).sum();
            if sum_max < constant {
                return false;
            }
            for (coef, var) in terms {
                let (_, term_max) = self.term_bounds(*coef, var.0);
                let need = constant - (sum_max - term_max);
                // coef * x >= need
                if *coef > 0 {
                    if !self.set_lo(var.0, clamp(div_ceil(need, *coef as i128))) {
                        return false;
                    }
                } else if *coef < 0
                    && !self.set_hi(var.0, clamp(div_floor(need, *coef as i128))) {
                        return false;
                    }
            }
        }
        true
    }

    /// True when no completion of the current domains can satisfy `c`.
    fn linear_refuted(&self, c: &LinearConstraint) -> bool {
        let constant = c.constant as i128;
        match c.relation {
            Relation::Le => {
                let sum_min: i128 =
                    c.terms.iter().map(|(w, v)| self.term_bounds(*w, v.0).0).sum();
                sum_min > constant
            }
            Relation::Ge => {
                let sum_max: i128 =
                    c.terms.iter().map(|(w, v)| self.term_bounds(*w, v.0).1).sum();
                sum_max < constant
            }
            Relation::Eq => {
                let sum_min: i128 =
                    c.terms.iter().map(|(w, v)| self.term_bounds(*w, v.0).0).sum();
                let sum_max: i128 =
                    c.terms.iter().map(|(w, v)| self.term_bounds(*w, v.0).1).sum();
                sum_min > constant || sum_max < constant
            }
        }
    }

    fn propagate_implication(&mut self, imp: &super::Implication) -> bool {
        let guard = imp.guard.0;
        match imp.sense {
            GuardSense::IsZero => {
                if self.lo[guard] == 0 && self.hi[guard] == 0 {
                    return self.propagate_linear(&imp.consequence);
                }
                // Guard still free: if the consequence is already impossible,
                // the guard cannot be zero.
                if self.lo[guard] == 0 && self.linear_refuted(&imp.consequence) {
                    return self.set_lo(guard, 1);
                }
            }
            GuardSense::IsPositive => {
                if self.lo[guard] >= 1 {
                    return self.propagate_linear(&imp.consequence);
                }
                if self.hi[guard] >= 1 && self.linear_refuted(&imp.consequence) {
                    return self.set_hi(guard, 0);
                }
            }
        }
        true
    }

    fn propagate_product(&mut self, p: &super::ProductBound) -> bool {
        let (bounded, a, b) = (p.bounded.0, p.factor_a.0, p.factor_b.0);
        let (alo, ahi) = (self.lo[a] as i128, self.hi[a] as i128);
        let (blo, bhi) = (
            self.lo[b] as i128 + p.offset as i128,
            self.hi[b] as i128 + p.offset as i128,
        );
        let corners = [alo * blo, alo * bhi, ahi * blo, ahi * bhi];
        let product_max = *corners.iter().max().expect("nonempty");
        if !self.set_hi(bounded, clamp(product_max)) {
            return false;
        }
        // A positive lower bound forces both factors positive.
        let need = self.lo[bounded] as i128;
        if need >= 1 {
            if ahi <= 0 || bhi <= 0 {
                return false;
            }
            if !self.set_lo(a, clamp(div_ceil(need, bhi))) {
                return false;
            }
            if !self.set_lo(b, clamp(div_ceil(need, ahi) - p.offset as i128)) {
                return false;
            }
        }
        true
    }
}

fn clamp(x: i128) -> i64 {
    x.clamp(i64::MIN as i128 + 1, i64::MAX as i128 - 1) as i64
}

fn div_floor(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn div_ceil(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) == (b < 0)) {
        q + 1
    } else {
        q
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::enumerate_best;
    use super::super::*;
    use proptest::prelude::*;
    use std::time::Duration;

    fn outcome(model: &Model) -> SolveOutcome {
        solve(model, &Budget::unlimited()).expect("well-formed model")
    }

    #[test]
    fn minimizes_a_small_linear_model() {
        let mut m = Model::new();
        let x = m.add_var("x", 0, 2);
        let y = m.add_var("y", 0, 2);
        m.add_linear(LinearConstraint::new(vec![(1, x), (1, y)], Relation::Ge, 3));
        m.set_objective(Objective {
            sense: Sense::Minimize,
            terms: vec![(2, x), (1, y)],
        });
        let out = outcome(&m);
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.objective_value, Some(4));
        let a = out.assignment.unwrap();
        assert_eq!((a.get(x), a.get(y)), (1, 2));
    }

    #[test]
    fn contradictory_bounds_are_unsat() {
        let mut m = Model::new();
        let x = m.add_var("x", 0, 5);
        m.add_linear(LinearConstraint::new(vec![(1, x)], Relation::Ge, 1));
        m.add_linear(LinearConstraint::new(vec![(1, x)], Relation::Le, 0));
        assert_eq!(outcome(&m).status, SolveStatus::Unsat);
    }

    #[test]
    fn implication_guard_is_forced_by_modus_tollens() {
        let mut m = Model::new();
        let x = m.add_var("x", 0, 1);
        let y = m.add_var("y", 0, 5);
        m.add_implication(Implication {
            guard: x,
            sense: GuardSense::IsZero,
            consequence: LinearConstraint::new(vec![(1, y)], Relation::Le, 0),
        });
        m.add_linear(LinearConstraint::new(vec![(1, y)], Relation::Ge, 3));
        let out = outcome(&m);
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.assignment.unwrap().get(x), 1);
    }

    #[test]
    fn product_bound_caps_the_bounded_variable() {
        let mut m = Model::new();
        let b = m.add_var("b", 0, 100);
        let x = m.add_var("x", 0, 3);
        let y = m.add_var("y", 0, 3);
        m.add_product_bound(ProductBound {
            bounded: b,
            factor_a: x,
            factor_b: y,
            offset: 0,
        });
        m.add_linear(LinearConstraint::new(vec![(1, b)], Relation::Ge, 7));
        m.set_objective(Objective {
            sense: Sense::Minimize,
            terms: vec![(1, x), (1, y)],
        });
        let out = outcome(&m);
        assert_eq!(out.status, SolveStatus::Optimal);
        let a = out.assignment.unwrap();
        assert!(a.get(x) * a.get(y) >= 7);
        assert_eq!(out.objective_value, Some(6));
    }

    #[test]
    fn same_type_product_uses_offset() {
        // b <= x * (x - 1): with x in [0,3], b >= 5 forces x = 3.
        let mut m = Model::new();
        let b = m.add_var("b", 0, 100);
        let x = m.add_var("x", 0, 3);
        m.add_product_bound(ProductBound {
            bounded: b,
            factor_a: x,
            factor_b: x,
            offset: -1,
        });
        m.add_linear(LinearConstraint::new(vec![(1, b)], Relation::Ge, 5));
        let out = outcome(&m);
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.assignment.unwrap().get(x), 3);
    }

    #[test]
    fn optimal_assignments_evaluate_satisfied() {
        let mut m = Model::new();
        let x = m.add_var("x", 0, 4);
        let y = m.add_var("y", 0, 4);
        let z = m.add_var("z", 0, 1);
        m.add_linear(LinearConstraint::new(vec![(2, x), (3, y)], Relation::Ge, 7));
        m.add_implication(Implication {
            guard: z,
            sense: GuardSense::IsPositive,
            consequence: LinearConstraint::new(vec![(1, x)], Relation::Le, 1),
        });
        m.set_objective(Objective {
            sense: Sense::Minimize,
            terms: vec![(5, x), (4, y), (1, z)],
        });
        let out = outcome(&m);
        assert_eq!(out.status, SolveStatus::Optimal);
        let eval = evaluate(&m, out.assignment.as_ref().unwrap()).unwrap();
        assert!(eval.satisfied);
        assert_eq!(Some(eval.objective_value), out.objective_value);
    }

    #[test]
    fn zero_time_budget_times_out_with_nothing() {
        let mut m = Model::new();
        let x = m.add_var("x", 0, 4);
        m.add_linear(LinearConstraint::new(vec![(1, x)], Relation::Ge, 1));
        let out = solve(&m, &Budget::with_time_limit(Duration::ZERO)).unwrap();
        assert_eq!(out.status, SolveStatus::TimeoutNoSolution);
        assert!(out.assignment.is_none());
    }

    #[test]
    fn empty_model_is_trivially_optimal() {
        let out = outcome(&Model::new());
        assert_eq!(out.status, SolveStatus::Optimal);
        assert_eq!(out.objective_value, Some(0));
    }

    /// Random small model generator for the enumeration cross-check.
    fn arb_model() -> impl Strategy<Value = Model> {
        let var_count = 1..=5usize;
        var_count.prop_flat_map(|n| {
            let domains = proptest::collection::vec((0i64..=2, 0i64..=4), n);
            let linear = proptest::collection::vec(
                (
                    proptest::collection::vec((-3i64..=3, 0..n), 1..=3),
                    0..3usize,
                    -6i64..=8,
                ),
                0..=3,
            );
            let imps = proptest::collection::vec(
                (0..n, proptest::bool::ANY, proptest::collection::vec((-2i64..=2, 0..n), 1..=2), -3i64..=4),
                0..=2,
            );
            let prods = proptest::collection::vec((0..n, 0..n, 0..n, proptest::bool::ANY), 0..=2);
            let objective = (
                proptest::bool::ANY,
                proptest::collection::vec((-3i64..=3, 0..n), 0..=n),
            );
            (domains, linear, imps, prods, objective).prop_map(
                |(domains, linear, imps, prods, (maximize, obj_terms))| {
                    let mut m = Model::new();
                    let vars: Vec<VarId> = domains
                        .iter()
                        .enumerate()
                        .map(|(i, (lo, extra))| m.add_var(format!("x{i}"), *lo, lo + extra))
                        .collect();
                    let dedup = |terms: Vec<(i64, usize)>| -> Vec<(i64, VarId)> {
                        let mut seen = std::collections::BTreeSet::new();
                        terms
                            .into_iter()
                            .filter(|(_, v)| seen.insert(*v))
                            .map(|(w, v)| (w, vars[v]))
                            .collect()
                    };
                    for (terms, rel, constant) in linear {
                        let relation = [Relation::Le, Relation::Ge, Relation::Eq][rel];
                        m.add_linear(LinearConstraint::new(dedup(terms), relation, constant));
                    }
                    for (guard, positive, terms, constant) in imps {
                        let sense = if positive {
                            GuardSense::IsPositive
                        } else {
                            GuardSense::IsZero
                        };
                        m.add_implication(Implication {
                            guard: vars[guard],
                            sense,
                            consequence: LinearConstraint::new(dedup(terms), Relation::Le, constant),
                        });
                    }
                    for (bounded, a, b, with_offset) in prods {
                        m.add_product_bound(ProductBound {
                            bounded: vars[bounded],
                            factor_a: vars[a],
                            factor_b: vars[b],
                            offset: if with_offset { -1 } else { 0 },
                        });
                    }
                    m.set_objective(Objective {
                        sense: if maximize { Sense::Maximize } else { Sense::Minimize },
                        terms: dedup(obj_terms),
                    });
                    m
                },
            )
        })
    }

    proptest! {
        /// The search agrees with exhaustive enumeration on small models.
        #[test]
        fn matches_exhaustive_enumeration(model in arb_model()) {
            let out = outcome(&model);
            match enumerate_best(&model) {
                None => prop_assert_eq!(out.status, SolveStatus::Unsat),
                Some((_, best)) => {
                    prop_assert_eq!(out.status, SolveStatus::Optimal);
                    prop_assert_eq!(out.objective_value, Some(best));
                    let eval = evaluate(&model, out.assignment.as_ref().unwrap()).unwrap();
                    prop_assert!(eval.satisfied);
                }
            }
        }

        /// Identical model and budget produce identical outcomes.
        #[test]
        fn search_is_deterministic(model in arb_model()) {
            let a = outcome(&model);
            let b = outcome(&model);
            prop_assert_eq!(a, b);
        }

        /// Adding a constraint never improves the optimum.
        #[test]
        fn objective_is_monotone_under_constraints(
            model in arb_model(),
            coef in 1i64..=2,
            var_pick in 0..8usize,
            constant in 0i64..=3,
        ) {
            let before = outcome(&model);
            if model.num_vars() == 0 {
                return Ok(());
            }
            let mut tightened = model.clone();
            let var = VarId(var_pick % model.num_vars());
            tightened.add_linear(LinearConstraint::new(vec![(coef, var)], Relation::Le, constant));
            let after = outcome(&tightened);
            if before.status == SolveStatus::Optimal && after.status == SolveStatus::Optimal {
                let (b, a) = (before.objective_value.unwrap(), after.objective_value.unwrap());
                match model.objective.sense {
                    Sense::Minimize => prop_assert!(a >= b),
                    Sense::Maximize => prop_assert!(a <= b),
                }
            }
        }
    }
}
