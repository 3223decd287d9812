//! End-to-end planning pipeline: placement solve, binding solve, plan
//! synthesis, and a mandatory replay self-check.
//!
//! Incremental mode adds two refinements around the same stages. First, after
//! the optimal cost is known, the placement model is re-solved with the cost
//! pinned and a secondary objective that maximizes per-(type, node) overlap
//! with the initial configuration, so equal-cost optima that allow reuse are
//! preferred. Second, instances kept by the reuse matching have immutable
//! strong bindings, so the binding stage is solved with those variables
//! pinned to the deployed reality; if that system is unsatisfiable the
//! pipeline falls back to an unpinned solve and a smaller (possibly empty)
//! matching.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use crate::binding::{self, BindingMetric, PlacedInstance};
use crate::model::{
    Configuration, DeploymentPlan, InstanceId, NodeName, NodePool, TypeName, Universe,
};
use crate::placement;
use crate::solver::{
    solve, Assignment, Budget, LinearConstraint, Objective, Relation, Sense, SolveStatus,
};
use crate::synthesis::{self, ReuseMatching};
use crate::verifier;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlanMode {
    /// Tear everything down, rebuild the target from nothing.
    Scratch,
    /// Reuse deployed instances whose type, node, and strong bindings fit.
    #[default]
    Incremental,
}

#[derive(Debug, Clone, Default)]
pub struct PlanOptions {
    pub mode: PlanMode,
    pub metric: BindingMetric,
    /// Per-type instance bound overrides; required for types that consume no
    /// resources.
    pub bounds: BTreeMap<TypeName, u64>,
    pub time_limit: Option<Duration>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanStatus {
    /// The emitted plan reaches a proven cost-optimal configuration.
    Optimal,
    /// The time budget expired; the emitted plan is feasible but the cost is
    /// not proven optimal.
    FeasibleUnproven,
    /// Proven: no deployment of the target exists.
    Infeasible,
    /// The time budget expired before any solution was found.
    Timeout,
}

#[derive(Debug, Clone)]
pub struct PlanSummary {
    pub instance_counts: BTreeMap<TypeName, u64>,
    pub placement: BTreeMap<(TypeName, NodeName), u64>,
    pub used_nodes: BTreeSet<NodeName>,
    pub cost: u64,
    pub action_count: usize,
    /// Search nodes spent across all solver calls (diagnostic).
    pub solver_nodes: u64,
}

#[derive(Debug, Clone)]
pub struct PlanOutcome {
    pub status: PlanStatus,
    pub plan: Option<DeploymentPlan>,
    pub summary: Option<PlanSummary>,
}

/// The root-bound probe is capped at a fixed number of search nodes so it
/// stays deterministic and cheap whether or not a wall-clock limit is set.
const PROBE_NODE_BUDGET: u64 = 2_000_000;

/// Computes a deployment plan for `target` from `initial`.
///
/// Returns `Err` only for invalid inputs or internal coherence failures;
/// "no plan exists" and "ran out of time" are statuses, not errors. A
/// returned plan has always been replayed through the verifier: every
/// intermediate configuration provisionally correct, the final one correct
/// and containing the target.
pub fn plan(
    universe: &Universe,
    pool: &NodePool,
    initial: &Configuration,
    target: &str,
    options: &PlanOptions,
) -> Result<PlanOutcome, PlanError> {
    universe
        .check_well_formed()
        .map_err(|e| PlanError::Input(e.to_string()))?;
    if universe.get(target).is_none() {
        return Err(PlanError::Input(format!(
            "target type {target} is not in the universe"
        )));
    }
    let initial_report = initial
        .check_provisional(universe, pool)
        .map_err(|e| PlanError::Input(e.to_string()))?;
    if !initial_report.is_provisionally_correct() {
        return Err(PlanError::Input(format!(
            "initial configuration is not provisionally correct: {}",
            initial_report.violations[0]
        )));
    }
    if let BindingMetric::Weighted { weights, .. } = &options.metric {
        let interfaces = universe.interfaces();
        for (interface, _, _) in weights.keys() {
            if !interfaces.contains(interface) {
                return Err(PlanError::Input(format!(
                    "weighted metric references unknown interface {interface}"
                )));
            }
        }
    }

    let clock = Clock::start(options.time_limit);
    let mut solver_nodes = 0u64;

    let bounds = placement::derive_bounds(universe, pool, &options.bounds)
        .map_err(|e| PlanError::Input(e.to_string()))?;
    let (model, vars) = placement::encode(universe, pool, target, &bounds)
        .map_err(|e| PlanError::Input(e.to_string()))?;

    // Root-bound probe: the root-propagated lower bound on the cost is often
    // tight (the pricing cuts see the whole demand). Any solution found with
    // the cost capped at that bound is globally optimal, and such a capped
    // search is far smaller than the open one. An unsat or timed-out probe
    // just falls through to the plain solve.
    let root = crate::solver::propagate_root(&model)
        .map_err(|e| PlanError::Internal(e.to_string()))?;
    let Some(root_domains) = root else {
        return Ok(PlanOutcome {
            status: PlanStatus::Infeasible,
            plan: None,
            summary: None,
        });
    };
    let cost_floor = root_domains[vars.total_cost.0].0;
    let run_probe = |cap: i64, nodes_spent: &mut u64| -> Result<crate::solver::SolveOutcome, PlanError> {
        let mut capped = model.clone();
        capped.add_linear(LinearConstraint::new(
            vec![(1, vars.total_cost)],
            Relation::Le,
            cap,
        ));
        // Near the cost floor, node capacity is tight, so stuffing extra
        // instances is impossible and the placement subproblem is pure
        // packing; fill-first value order finds packings fast. The open
        // solve below keeps the default ascending order.
        for var in vars.inst_at.values() {
            capped.set_prefer_high(*var);
        }
        let mut budget = clock.budget(0.2, options.seed);
        budget.max_nodes = Some(PROBE_NODE_BUDGET);
        let out = solve(&capped, &budget).map_err(|e| PlanError::Internal(e.to_string()))?;
        *nodes_spent += out.nodes;
        Ok(out)
    };

    // Exact probe: a search completed under a cap covering every possibly
    // cheaper solution proves global optimality of whatever it found.
    let mut probe = match run_probe(cost_floor, &mut solver_nodes)? {
        out if out.status == SolveStatus::Optimal => Some(out),
        _ => None,
    };
    // Relaxed probe: widen the cap by one cheap node. Plans at zero-slack
    // optima are often only findable through this window, and the proof
    // argument is the same: the cap still covers everything cheaper.
    let mut warm: Option<crate::solver::SolveOutcome> = None;
    if probe.is_none() {
        let slack = pool.nodes().map(|n| n.cost).filter(|c| *c > 0).min();
        if let Some(slack) = slack {
            let out = run_probe(cost_floor.saturating_add(slack as i64), &mut solver_nodes)?;
            match out.status {
                SolveStatus::Optimal => probe = Some(out),
                SolveStatus::FeasibleUnproven => warm = Some(out),
                _ => {}
            }
        }
    }

    let first = match probe {
        Some(out) => out,
        None => {
            // Open solve, warm-started with the best probe incumbent as an
            // upper bound when one exists. The bound keeps the incumbent's
            // own value reachable, so it cannot cut the optimum.
            let mut open_model;
            let open_ref = if let Some(warm) = &warm {
                open_model = model.clone();
                open_model.add_linear(LinearConstraint::new(
                    vec![(1, vars.total_cost)],
                    Relation::Le,
                    warm.objective_value.expect("incumbent has a value"),
                ));
                &open_model
            } else {
                &model
            };
            let mut out = solve(open_ref, &clock.budget(0.6, options.seed))
                .map_err(|e| PlanError::Internal(e.to_string()))?;
            solver_nodes += out.nodes;
            // Never end with less than the probe's incumbent in hand.
            if out.assignment.is_none() {
                if let Some(warm) = warm {
                    out = crate::solver::SolveOutcome {
                        status: SolveStatus::FeasibleUnproven,
                        ..warm
                    };
                }
            }
            out
        }
    };
    let mut proven = true;
    let assignment = match first.status {
        SolveStatus::Unsat => {
            return Ok(PlanOutcome {
                status: PlanStatus::Infeasible,
                plan: None,
                summary: None,
            });
        }
        SolveStatus::TimeoutNoSolution => {
            return Ok(PlanOutcome {
                status: PlanStatus::Timeout,
                plan: None,
                summary: None,
            });
        }
        SolveStatus::FeasibleUnproven => {
            proven = false;
            first.assignment.expect("feasible outcome has assignment")
        }
        SolveStatus::Optimal => first.assignment.expect("optimal outcome has assignment"),
    };
    let cost_bound = first.objective_value.expect("solution has a value");

    // Incremental: among placements of the same cost, prefer those that line
    // up with what is already deployed.
    let assignment = if options.mode == PlanMode::Incremental && !initial.is_empty() {
        match maximize_reuse(
            universe, pool, target, &bounds, initial, cost_bound, &clock, options.seed,
        )? {
            Some((reuse_assignment, nodes)) => {
                solver_nodes += nodes;
                reuse_assignment
            }
            None => assignment,
        }
    } else {
        assignment
    };

    let instance_plan = placement::extract_plan(&assignment, &vars)
        .map_err(|e| PlanError::Internal(e.to_string()))?;
    instance_plan
        .verify(universe, pool, target)
        .map_err(PlanError::Internal)?;

    let instances = binding::materialize_instances(&instance_plan);

    // Solve the binding stage, pinning kept instances' strong bindings in
    // incremental mode.
    let tentative = if options.mode == PlanMode::Incremental {
        tentative_keeps(initial, &instances, universe)
    } else {
        ReuseMatching::default()
    };
    let mut binding_solution = solve_bindings(
        &instances,
        universe,
        &options.metric,
        initial,
        &tentative,
        &clock,
        options.seed,
    )?;
    if binding_solution.is_none() && !tentative.kept.is_empty() {
        // Pinned system unsatisfiable; replan the bindings freely.
        binding_solution = solve_bindings(
            &instances,
            universe,
            &options.metric,
            initial,
            &ReuseMatching::default(),
            &clock,
            options.seed,
        )?;
    }
    let Some((binding_assignment, binding_vars, binding_nodes, binding_proven)) = binding_solution
    else {
        return Ok(PlanOutcome {
            status: PlanStatus::Timeout,
            plan: None,
            summary: None,
        });
    };
    solver_nodes += binding_nodes;
    proven &= binding_proven;

    let binding_plan =
        binding::extract_binding_plan(&binding_assignment, &binding_vars, &instances, universe)
            .map_err(|e| PlanError::Internal(e.to_string()))?;
    let target_config = synthesis::assemble_target(&instances, &binding_plan, universe, pool)
        .map_err(|e| PlanError::Internal(e.to_string()))?;

    let plan = match options.mode {
        PlanMode::Scratch => synthesis::synthesize_scratch(initial, &target_config, universe, pool),
        PlanMode::Incremental => {
            synthesis::synthesize_incremental(initial, &target_config, universe, pool)
        }
    }
    .map_err(|e| PlanError::Internal(e.to_string()))?;

    // Mandatory self-check: replay through the verifier before reporting.
    let trace = verifier::run_plan(initial, &plan, universe, pool);
    if !trace.is_valid() {
        return Err(PlanError::Internal(format!(
            "synthesized plan fails replay: {:?}",
            trace.verdict
        )));
    }
    let output = verifier::check_problem_output(&trace, target, pool)
        .map_err(|e| PlanError::Internal(e.to_string()))?;
    if !output.has_target {
        return Err(PlanError::Internal(
            "replayed plan does not deploy the target".to_string(),
        ));
    }
    if output.final_cost != instance_plan.cost {
        return Err(PlanError::Internal(format!(
            "final configuration costs {} but the placement stage promised {}",
            output.final_cost, instance_plan.cost
        )));
    }

    let summary = PlanSummary {
        instance_counts: instance_plan.total.clone(),
        placement: instance_plan.placement.clone(),
        used_nodes: instance_plan.used_nodes.clone(),
        cost: instance_plan.cost,
        action_count: plan.len(),
        solver_nodes,
    };
    Ok(PlanOutcome {
        status: if proven {
            PlanStatus::Optimal
        } else {
            PlanStatus::FeasibleUnproven
        },
        plan: Some(plan),
        summary: Some(summary),
    })
}

/// Re-solves the placement model with the cost pinned to `cost_bound` and a
/// secondary objective: maximize the number of instances that can stay where
/// they are, counted per (type, node) against the initial configuration.
#[allow(clippy::too_many_arguments)]
fn maximize_reuse(
    universe: &Universe,
    pool: &NodePool,
    target: &str,
    bounds: &placement::InstanceBounds,
    initial: &Configuration,
    cost_bound: i64,
    clock: &Clock,
    seed: u64,
) -> Result<Option<(Assignment, u64)>, PlanError> {
    let (mut model, vars) = placement::encode(universe, pool, target, bounds)
        .map_err(|e| PlanError::Internal(e.to_string()))?;
    model.add_linear(LinearConstraint::new(
        vec![(1, vars.total_cost)],
        Relation::Le,
        cost_bound,
    ));

    let mut deployed: BTreeMap<(TypeName, NodeName), u64> = BTreeMap::new();
    for (_, info) in initial.instances() {
        *deployed
            .entry((info.type_name.clone(), info.node.clone()))
            .or_default() += 1;
    }
    let mut reuse_terms = Vec::new();
    for (key, count) in &deployed {
        let Some(inst_at) = vars.inst_at.get(key) else {
            continue;
        };
        let reuse = model.add_var(format!("reuse({},{})", key.0, key.1), 0, *count as i64);
        model.add_linear(LinearConstraint::new(
            vec![(1, reuse), (-1, *inst_at)],
            Relation::Le,
            0,
        ));
        reuse_terms.push((1, reuse));
    }
    if reuse_terms.is_empty() {
        return Ok(None);
    }
    model.set_objective(Objective {
        sense: Sense::Maximize,
        terms: reuse_terms,
    });

    let mut budget = clock.budget(0.5, seed);
    budget.max_nodes = Some(PROBE_NODE_BUDGET);
    let out = solve(&model, &budget).map_err(|e| PlanError::Internal(e.to_string()))?;
    match out.status {
        SolveStatus::Optimal | SolveStatus::FeasibleUnproven => {
            // Strip the reuse variables: the placement dictionary only reads
            // the prefix created by the encoder.
            Ok(Some((
                out.assignment.expect("solution has assignment"),
                out.nodes,
            )))
        }
        // The original placement stays in effect; reuse is best-effort.
        _ => Ok(None),
    }
}

/// Picks the initial instances worth keeping before the binding stage runs:
/// per (type, node) quota from the placement, providers before requirers, and
/// only instances whose strong providers are themselves kept. Returns the
/// target-slot assignment for those instances.
fn tentative_keeps(
    initial: &Configuration,
    slots: &[PlacedInstance],
    universe: &Universe,
) -> ReuseMatching {
    let mut slot_queues: BTreeMap<(&str, &str), Vec<&PlacedInstance>> = BTreeMap::new();
    for slot in slots {
        slot_queues
            .entry((slot.type_name.as_str(), slot.node.as_str()))
            .or_default()
            .push(slot);
    }

    let mut kept_instances: BTreeSet<&InstanceId> = BTreeSet::new();
    let mut kept: BTreeMap<InstanceId, InstanceId> = BTreeMap::new();

    // Creation order puts strong providers first, so the closure check only
    // needs to look backwards.
    let Ok(order) = creation_order_of(initial, universe) else {
        return ReuseMatching::default();
    };
    for z_id in &order {
        let info = initial.instance(z_id).expect("ordered over instances");
        let closed = initial.bindings().all(|b| {
            if b.requirer != *z_id {
                return true;
            }
            let strong = universe
                .get(&info.type_name)
                .map(|t| t.strong_requires.contains_key(&b.interface))
                .unwrap_or(false);
            !strong || kept_instances.contains(&b.provider)
        });
        if !closed {
            continue;
        }
        if let Some(queue) = slot_queues.get_mut(&(info.type_name.as_str(), info.node.as_str())) {
            if let Some(slot) = queue.first().copied() {
                queue.remove(0);
                kept_instances.insert(z_id);
                kept.insert(slot.id.clone(), z_id.clone());
            }
        }
    }
    ReuseMatching { kept }
}

fn creation_order_of(
    config: &Configuration,
    universe: &Universe,
) -> Result<Vec<InstanceId>, ()> {
    // Strong providers first; mirrors the synthesis ordering.
    let mut pending: BTreeMap<&str, usize> = BTreeMap::new();
    let mut dependents: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (id, _) in config.instances() {
        pending.insert(id.as_str(), 0);
    }
    for b in config.bindings() {
        let strong = config
            .instance(&b.requirer)
            .and_then(|i| universe.get(&i.type_name))
            .map(|t| t.strong_requires.contains_key(&b.interface))
            .unwrap_or(false);
        if strong {
            *pending.get_mut(b.requirer.as_str()).ok_or(())? += 1;
            dependents
                .entry(b.provider.as_str())
                .or_default()
                .push(b.requirer.as_str());
        }
    }
    let mut ready: BTreeSet<&str> = pending
        .iter()
        .filter(|(_, c)| **c == 0)
        .map(|(id, _)| *id)
        .collect();
    let mut order = Vec::new();
    while let Some(id) = ready.pop_first() {
        order.push(id.to_string());
        for dep in dependents.remove(id).unwrap_or_default() {
            let c = pending.get_mut(dep).ok_or(())?;
            *c -= 1;
            if *c == 0 {
                ready.insert(dep);
            }
        }
    }
    if order.len() != config.instance_count() {
        return Err(());
    }
    Ok(order)
}

type BindingSolution = Option<(Assignment, binding::BindingVars, u64, bool)>;

/// One binding-stage solve. With a nonempty matching, every strong-interface
/// variable of a kept slot is pinned to the deployed instance's actual
/// bindings (strong ports cannot be rewired). Returns `None` when the pinned
/// system is unsatisfiable or the budget expires with nothing.
fn solve_bindings(
    instances: &[PlacedInstance],
    universe: &Universe,
    metric: &BindingMetric,
    initial: &Configuration,
    matching: &ReuseMatching,
    clock: &Clock,
    seed: u64,
) -> Result<BindingSolution, PlanError> {
    let (mut model, vars) = binding::encode(instances, universe, metric)
        .map_err(|e| PlanError::Input(e.to_string()))?;

    if !matching.kept.is_empty() {
        let slot_types: BTreeMap<&str, &str> = instances
            .iter()
            .map(|s| (s.id.as_str(), s.type_name.as_str()))
            .collect();
        for ((interface, requirer_slot, provider_slot), var) in &vars.b {
            let Some(z) = matching.kept.get(requirer_slot) else {
                continue;
            };
            let strong = universe
                .get(slot_types[requirer_slot.as_str()])
                .map(|t| t.strong_requires.contains_key(interface))
                .unwrap_or(false);
            if !strong {
                continue;
            }
            // The provider slot must map back to the instance the deployed
            // requirer is actually bound to.
            let bound = matching
                .kept
                .get(provider_slot)
                .map(|z2| {
                    initial.has_binding(&crate::model::Binding::new(
                        interface.clone(),
                        z.clone(),
                        (*z2).clone(),
                    ))
                })
                .unwrap_or(false);
            model.add_linear(LinearConstraint::new(
                vec![(1, *var)],
                Relation::Eq,
                i64::from(bound),
            ));
        }
    }

    let out = solve(&model, &clock.budget(1.0, seed))
        .map_err(|e| PlanError::Internal(e.to_string()))?;
    match out.status {
        SolveStatus::Optimal => Ok(Some((
            out.assignment.expect("optimal has assignment"),
            vars,
            out.nodes,
            true,
        ))),
        SolveStatus::FeasibleUnproven => Ok(Some((
            out.assignment.expect("feasible has assignment"),
            vars,
            out.nodes,
            false,
        ))),
        SolveStatus::Unsat | SolveStatus::TimeoutNoSolution => Ok(None),
    }
}

/// Remaining-time bookkeeping for budget splits across solver calls.
struct Clock {
    deadline: Option<Instant>,
}

impl Clock {
    fn start(limit: Option<Duration>) -> Self {
        Clock {
            deadline: limit.map(|l| Instant::now() + l),
        }
    }

    /// A budget worth `fraction` of the remaining time (all of it for 1.0).
    fn budget(&self, fraction: f64, seed: u64) -> Budget {
        let time_limit = self.deadline.map(|deadline| {
            let remaining = deadline.saturating_duration_since(Instant::now());
            if fraction >= 1.0 {
                remaining
            } else {
                remaining.mul_f64(fraction)
            }
        });
        Budget {
            time_limit,
            max_nodes: None,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::model::Action;

    #[test]
    fn running_example_scratch_plan() {
        let problem = fixtures::fig1_mini();
        let options = PlanOptions {
            mode: PlanMode::Scratch,
            ..Default::default()
        };
        let outcome = plan(
            &problem.universe,
            &problem.pool,
            &Configuration::empty(),
            &problem.target,
            &options,
        )
        .unwrap();
        assert_eq!(outcome.status, PlanStatus::Optimal);
        let summary = outcome.summary.unwrap();
        assert_eq!(summary.cost, 498);
        assert_eq!(summary.instance_counts["MessageReceiver"], 1);
        assert_eq!(summary.instance_counts["MessageAnalyzer"], 3);
        assert_eq!(summary.instance_counts["AttachmentAnalyzer"], 2);
        assert_eq!(outcome.plan.unwrap().len(), 9);
    }

    #[test]
    fn running_example_incremental_matches_the_narrated_plan() {
        let problem = fixtures::fig1_mini();
        let options = PlanOptions {
            mode: PlanMode::Incremental,
            ..Default::default()
        };
        let outcome = plan(
            &problem.universe,
            &problem.pool,
            &problem.initial,
            &problem.target,
            &options,
        )
        .unwrap();
        assert_eq!(outcome.status, PlanStatus::Optimal);
        let plan = outcome.plan.unwrap();
        let kinds: Vec<&str> = plan
            .actions
            .iter()
            .map(|a| match a {
                Action::New { type_name, .. } => type_name.as_str(),
                Action::Bind { .. } => "bind",
                Action::Unbind { .. } => "unbind",
                Action::Del { .. } => "del",
            })
            .collect();
        assert_eq!(
            kinds,
            vec![
                "AttachmentAnalyzer",
                "MessageAnalyzer",
                "MessageAnalyzer",
                "bind",
                "bind",
            ],
            "full plan: {:#?}",
            plan.actions
        );
        assert_eq!(outcome.summary.unwrap().cost, 498);
    }

    #[test]
    fn incremental_replay_lands_exactly_on_the_target_shape() {
        // The replayed final configuration equals the computed target up to
        // instance renaming: same (type, node) multiset, same per-interface
        // binding counts.
        let problem = fixtures::fig1_mini();
        let outcome = plan(
            &problem.universe,
            &problem.pool,
            &problem.initial,
            &problem.target,
            &PlanOptions::default(),
        )
        .unwrap();
        let deployment = outcome.plan.unwrap();
        let trace = crate::verifier::run_plan(
            &problem.initial,
            &deployment,
            &problem.universe,
            &problem.pool,
        );
        assert!(trace.is_valid());

        let summary = outcome.summary.unwrap();
        let mut by_placement: BTreeMap<(String, String), u64> = BTreeMap::new();
        for (_, info) in trace.final_config.instances() {
            *by_placement
                .entry((info.type_name.clone(), info.node.clone()))
                .or_default() += 1;
        }
        assert_eq!(by_placement, summary.placement);
        // All six bindings of the running example's correct configuration.
        assert_eq!(trace.final_config.binding_count(), 6);
    }

    #[test]
    fn infeasible_targets_answer_no() {
        let text = r#"[
            {"name": "Needy", "strong": {"void": 1}, "resources": {"CPU": 1}}
        ]"#;
        let universe = crate::format::parse_universe(text).unwrap();
        let problem = fixtures::fig1_mini();
        let outcome = plan(
            &universe,
            &problem.pool,
            &Configuration::empty(),
            "Needy",
            &PlanOptions::default(),
        )
        .unwrap();
        assert_eq!(outcome.status, PlanStatus::Infeasible);
        assert!(outcome.plan.is_none());
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let problem = fixtures::fig1_mini();
        let err = plan(
            &problem.universe,
            &problem.pool,
            &Configuration::empty(),
            "Ghost",
            &PlanOptions::default(),
        )
        .unwrap_err();
        assert!(matches!(err, PlanError::Input(_)));
    }

    #[test]
    fn zero_budget_times_out() {
        let problem = fixtures::fig1_mini();
        let options = PlanOptions {
            time_limit: Some(Duration::ZERO),
            ..Default::default()
        };
        let outcome = plan(
            &problem.universe,
            &problem.pool,
            &Configuration::empty(),
            &problem.target,
            &options,
        )
        .unwrap();
        assert_eq!(outcome.status, PlanStatus::Timeout);
    }
}
