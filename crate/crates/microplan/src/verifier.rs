//! Plan replay against the transition semantics, final-output checks, and the
//! exhaustive brute-force oracle used by the acceptance tests.
//!
//! [`run_plan`] is the arbiter of plan validity: it folds the actions over
//! the initial configuration, demanding provisional correctness after every
//! step and full correctness at the end. The oracle shares no code with the
//! solver or the encoders; it enumerates configurations directly from the
//! definitions and exists to catch them lying.

use std::collections::BTreeMap;

use crate::model::{
    Action, ActionError, Binding, Configuration, CorrectnessReport, DeploymentPlan, InstanceInfo,
    NodePool, TypeName, Universe, Violation,
};

/// Why a replay failed at some point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finding {
    ActionRejected(ActionError),
    Violation(Violation),
    /// A configuration referenced a type or node outside the problem input.
    InvalidReference(String),
}

impl std::fmt::Display for Finding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Finding::ActionRejected(e) => write!(f, "action rejected: {e}"),
            Finding::Violation(v) => write!(f, "{v}"),
            Finding::InvalidReference(m) => write!(f, "invalid reference: {m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceVerdict {
    Valid,
    /// The starting configuration already fails: not provisionally correct,
    /// or (for an empty plan) not correct.
    InvalidInitial(Finding),
    /// Step `step` (0-based index into the plan) was rejected or produced a
    /// configuration violating its required correctness level.
    ViolationAt { step: usize, finding: Finding },
}

/// One successfully applied step: the action, the configuration it produced,
/// and the correctness report for that configuration (provisional for
/// intermediate steps, full for the last).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanStep {
    pub action: Action,
    pub config: Configuration,
    pub report: CorrectnessReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanTrace {
    pub steps: Vec<PlanStep>,
    pub verdict: TraceVerdict,
    /// The configuration after the last successfully applied step.
    pub final_config: Configuration,
}

impl PlanTrace {
    pub fn is_valid(&self) -> bool {
        self.verdict == TraceVerdict::Valid
    }
}

/// Replays `plan` from `initial`, checking provisional correctness after
/// every action and full correctness at the end. Total: every failure is a
/// verdict, never an error.
pub fn run_plan(
    initial: &Configuration,
    plan: &DeploymentPlan,
    universe: &Universe,
    pool: &NodePool,
) -> PlanTrace {
    let fail_initial = |finding: Finding, config: &Configuration| PlanTrace {
        steps: Vec::new(),
        verdict: TraceVerdict::InvalidInitial(finding),
        final_config: config.clone(),
    };

    match initial.check_provisional(universe, pool) {
        Err(e) => return fail_initial(Finding::InvalidReference(e.to_string()), initial),
        Ok(report) => {
            if !report.is_provisionally_correct() {
                let first = report
                    .violations
                    .iter()
                    .find(|v| !v.is_weak_or_conflict())
                    .expect("not provisionally correct implies such a violation");
                return fail_initial(Finding::Violation(first.clone()), initial);
            }
        }
    }

    let mut steps = Vec::with_capacity(plan.len());
    let mut current = initial.clone();
    for (index, action) in plan.actions.iter().enumerate() {
        let next = match current.apply(action, universe) {
            Ok(next) => next,
            Err(e) => {
                return PlanTrace {
                    steps,
                    verdict: TraceVerdict::ViolationAt {
                        step: index,
                        finding: Finding::ActionRejected(e),
                    },
                    final_config: current,
                };
            }
        };
        let last = index + 1 == plan.len();
        let report = if last {
            next.check_correct(universe, pool)
        } else {
            next.check_provisional(universe, pool)
        };
        let report = match report {
            Ok(report) => report,
            Err(e) => {
                return PlanTrace {
                    steps,
                    verdict: TraceVerdict::ViolationAt {
                        step: index,
                        finding: Finding::InvalidReference(e.to_string()),
                    },
                    final_config: next,
                };
            }
        };
        let failing = if last {
            report.violations.first()
        } else {
            report.violations.iter().find(|v| !v.is_weak_or_conflict())
        };
        if let Some(violation) = failing.cloned() {
            return PlanTrace {
                steps,
                verdict: TraceVerdict::ViolationAt {
                    step: index,
                    finding: Finding::Violation(violation),
                },
                final_config: next,
            };
        }
        steps.push(PlanStep {
            action: action.clone(),
            config: next.clone(),
            report,
        });
        current = next;
    }

    // An empty plan must already satisfy full correctness.
    if plan.is_empty() {
        match current.check_correct(universe, pool) {
            Err(e) => return fail_initial(Finding::InvalidReference(e.to_string()), &current),
            Ok(report) => {
                if let Some(v) = report.violations.first() {
                    return fail_initial(Finding::Violation(v.clone()), &current);
                }
            }
        }
    }

    PlanTrace {
        steps,
        verdict: TraceVerdict::Valid,
        final_config: current,
    }
}

/// Final answers of a planning run, per the problem statement: is the target
/// deployed, and what does the final configuration cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProblemOutput {
    pub has_target: bool,
    pub final_cost: u64,
}

/// Confirms a valid trace deploys the target and prices its final
/// configuration.
pub fn check_problem_output(
    trace: &PlanTrace,
    target: &str,
    pool: &NodePool,
) -> Result<ProblemOutput, VerifierError> {
    if !trace.is_valid() {
        return Err(VerifierError::InvalidTrace);
    }
    let has_target = trace
        .final_config
        .instances()
        .any(|(_, info)| info.type_name == target);
    let final_cost = trace
        .final_config
        .cost(pool)
        .map_err(|e| VerifierError::BadConfiguration(e.to_string()))?;
    Ok(ProblemOutput {
        has_target,
        final_cost,
    })
}

/// A cost-minimal correct configuration found by exhaustive enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub cost: u64,
    pub witness: Configuration,
}

const ORACLE_WORK_BUDGET: u64 = 50_000_000;

/// Exhaustively enumerates instance multisets up to `cap` total instances,
/// all placements onto the pool, and minimal binding sets, keeping correct
/// configurations that contain the target. Completely independent of the
/// solver and the encoders.
///
/// Returns the minimal cost with a witness, `None` when no correct
/// configuration exists within `cap`, or an error if the search budget is
/// exhausted - never a wrong answer.
pub fn brute_force_oracle(
    universe: &Universe,
    pool: &NodePool,
    target: &str,
    cap: usize,
) -> Result<Option<OracleResult>, VerifierError> {
    brute_force_oracle_with_bounds(universe, pool, target, cap, None)
}

/// Like [`brute_force_oracle`], additionally honoring per-type instance
/// bounds. Cross-checks against the optimizer compare over the same bounded
/// space the optimizer searched; types absent from the map are only limited
/// by `cap`.
pub fn brute_force_oracle_with_bounds(
    universe: &Universe,
    pool: &NodePool,
    target: &str,
    cap: usize,
    per_type: Option<&BTreeMap<TypeName, u64>>,
) -> Result<Option<OracleResult>, VerifierError> {
    if universe.get(target).is_none() {
        return Err(VerifierError::BadConfiguration(format!(
            "unknown target type {target}"
        )));
    }
    let types: Vec<&crate::model::MicroserviceType> = universe.types().collect();
    let nodes: Vec<&crate::model::Node> = pool.nodes().collect();
    let type_caps: Vec<usize> = types
        .iter()
        .map(|ty| {
            per_type
                .and_then(|m| m.get(&ty.name))
                .map(|n| (*n).min(cap as u64) as usize)
                .unwrap_or(cap)
        })
        .collect();
    let mut search = OracleSearch {
        universe,
        pool,
        target,
        types,
        nodes,
        type_caps,
        work: 0,
        best: None,
    };
    let mut counts = vec![0usize; search.types.len()];
    search.enumerate_counts(0, cap, &mut counts)?;
    Ok(search.best.take())
}

struct OracleSearch<'a> {
    universe: &'a Universe,
    pool: &'a NodePool,
    target: &'a str,
    types: Vec<&'a crate::model::MicroserviceType>,
    nodes: Vec<&'a crate::model::Node>,
    type_caps: Vec<usize>,
    work: u64,
    best: Option<OracleResult>,
}

impl<'a> OracleSearch<'a> {
    fn spend(&mut self) -> Result<(), VerifierError> {
        self.work += 1;
        if self.work > ORACLE_WORK_BUDGET {
            return Err(VerifierError::OracleBudgetExhausted);
        }
        Ok(())
    }

    fn enumerate_counts(
        &mut self,
        index: usize,
        remaining: usize,
        counts: &mut Vec<usize>,
    ) -> Result<(), VerifierError> {
        if index == self.types.len() {
            let target_index = self
                .types
                .iter()
                .position(|t| t.name == self.target)
                .expect("target checked");
            if counts[target_index] == 0 {
                return Ok(());
            }
            if !self.conflicts_hold(counts) {
                return Ok(());
            }
            let mut placement: Vec<Vec<usize>> = vec![vec![0; self.nodes.len()]; self.types.len()];
            let mut load: Vec<BTreeMap<&str, u64>> = vec![BTreeMap::new(); self.nodes.len()];
            return self.enumerate_placements(0, counts, &mut placement, &mut load);
        }
        for count in 0..=remaining.min(self.type_caps[index]) {
            counts[index] = count;
            self.enumerate_counts(index + 1, remaining - count, counts)?;
        }
        counts[index] = 0;
        Ok(())
    }

    /// Conflict rules depend only on which types are deployed.
    fn conflicts_hold(&self, counts: &[usize]) -> bool {
        for (i, ty) in self.types.iter().enumerate() {
            if counts[i] == 0 {
                continue;
            }
            for p in &ty.conflicts {
                for (j, other) in self.types.iter().enumerate() {
                    if counts[j] == 0 || !other.provides.contains_key(p) {
                        continue;
                    }
                    if i != j {
                        return false;
                    }
                    if counts[i] > 1 {
                        return false;
                    }
                }
                if ty.provides.contains_key(p) && counts[i] > 1 {
                    return false;
                }
            }
        }
        true
    }

    /// Distributes counts[type_index..] over nodes, pruning on resources.
    fn enumerate_placements(
        &mut self,
        type_index: usize,
        counts: &[usize],
        placement: &mut Vec<Vec<usize>>,
        load: &mut Vec<BTreeMap<&'a str, u64>>,
    ) -> Result<(), VerifierError> {
        self.spend()?;
        if type_index == self.types.len() {
            let cost: u64 = self
                .nodes
                .iter()
                .enumerate()
                .filter(|(n, _)| (0..self.types.len()).any(|t| placement[t][*n] > 0))
                .map(|(_, node)| node.cost)
                .sum();
            if let Some(best) = &self.best {
                if cost >= best.cost {
                    return Ok(());
                }
            }
            return self.search_bindings(counts, placement, cost);
        }
        self.place_type(type_index, 0, counts[type_index], counts, placement, load)
    }

    fn place_type(
        &mut self,
        type_index: usize,
        node_index: usize,
        remaining: usize,
        counts: &[usize],
        placement: &mut Vec<Vec<usize>>,
        load: &mut Vec<BTreeMap<&'a str, u64>>,
    ) -> Result<(), VerifierError> {
        if remaining == 0 {
            return self.enumerate_placements(type_index + 1, counts, placement, load);
        }
        if node_index == self.nodes.len() {
            return Ok(());
        }
        let ty = self.types[type_index];
        let node = self.nodes[node_index];
        let mut here = 0usize;
        loop {
            // here instances of ty on this node so far accounted in load.
            self.place_type(type_index, node_index + 1, remaining - here, counts, placement, load)?;
            if here == remaining {
                break;
            }
            // Try one more on this node.
            let mut fits = true;
            for (r, amount) in &ty.resources {
                let used = load[node_index].get(r.as_str()).copied().unwrap_or(0);
                if used + amount > node.capacity(r) {
                    fits = false;
                    break;
                }
            }
            if !fits {
                break;
            }
            here += 1;
            placement[type_index][node_index] += 1;
            for (r, amount) in &ty.resources {
                *load[node_index].entry(r.as_str()).or_default() += amount;
            }
        }
        // Undo this node's contribution.
        if here > 0 {
            placement[type_index][node_index] -= here;
            for (r, amount) in &ty.resources {
                *load[node_index].get_mut(r.as_str()).expect("added above") -=
                    amount * here as u64;
            }
        }
        Ok(())
    }

    /// Tries to satisfy every requirement with exactly its arity in distinct
    /// providers, respecting provider capacities. Minimal binding sets
    /// dominate: extra bindings only ever consume capacity.
    fn search_bindings(
        &mut self,
        counts: &[usize],
        placement: &[Vec<usize>],
        cost: u64,
    ) -> Result<(), VerifierError> {
        // Materialize instance list.
        let mut instances: Vec<(String, usize)> = Vec::new(); // (id, type index)
        let mut infos: Vec<(String, InstanceInfo)> = Vec::new();
        for (t, ty) in self.types.iter().enumerate() {
            let mut k = 0;
            for (n, node) in self.nodes.iter().enumerate() {
                for _ in 0..placement[t][n] {
                    k += 1;
                    let id = format!("{}@{k}", ty.name);
                    instances.push((id.clone(), t));
                    infos.push((
                        id,
                        InstanceInfo {
                            type_name: ty.name.clone(),
                            node: node.name.clone(),
                        },
                    ));
                }
            }
            debug_assert_eq!(k, counts[t]);
        }

        // Requirement slots: (requirer index, interface, arity).
        let mut slots: Vec<(usize, &str, usize)> = Vec::new();
        for (i, (_, t)) in instances.iter().enumerate() {
            let ty = self.types[*t];
            for (p, arity) in ty.strong_requires.iter().chain(ty.weak_requires.iter()) {
                if *arity > 0 {
                    slots.push((i, p.as_str(), *arity as usize));
                }
            }
        }
        // Remaining capacity per (provider index, interface).
        let mut capacity: BTreeMap<(usize, &str), Option<u64>> = BTreeMap::new();
        for (j, (_, t)) in instances.iter().enumerate() {
            let ty = self.types[*t];
            for (p, arity) in &ty.provides {
                let cap = match arity {
                    crate::model::Arity::Finite(n) => Some(*n),
                    crate::model::Arity::Infinite => None,
                };
                capacity.insert((j, p.as_str()), cap);
            }
        }

        let mut bindings: Vec<Binding> = Vec::new();
        if self.assign_slot(0, &slots, &instances, &mut capacity, &mut bindings)? {
            let config = Configuration::from_parts(infos, bindings.iter().cloned())
                .expect("oracle-built configurations are structurally sound");
            let report = config
                .check_correct(self.universe, self.pool)
                .map_err(|e| VerifierError::BadConfiguration(e.to_string()))?;
            if report.is_correct() {
                let better = self.best.as_ref().is_none_or(|b| cost < b.cost);
                if better {
                    self.best = Some(OracleResult {
                        cost,
                        witness: config,
                    });
                }
            }
        }
        Ok(())
    }

    fn assign_slot(
        &mut self,
        slot: usize,
        slots: &[(usize, &'a str, usize)],
        instances: &[(String, usize)],
        capacity: &mut BTreeMap<(usize, &'a str), Option<u64>>,
        bindings: &mut Vec<Binding>,
    ) -> Result<bool, VerifierError> {
        self.spend()?;
        let Some(&(requirer, interface, arity)) = slots.get(slot) else {
            return Ok(true);
        };
        let candidates: Vec<usize> = (0..instances.len())
            .filter(|j| *j != requirer)
            .filter(|j| match capacity.get(&(*j, interface)) {
                Some(Some(remaining)) => *remaining > 0,
                Some(None) => true,
                None => false,
            })
            .collect();
        if candidates.len() < arity {
            return Ok(false);
        }
        let mut chosen = vec![0usize; arity];
        self.choose_providers(
            slot, slots, instances, capacity, bindings, &candidates, 0, 0, &mut chosen,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn choose_providers(
        &mut self,
        slot: usize,
        slots: &[(usize, &'a str, usize)],
        instances: &[(String, usize)],
        capacity: &mut BTreeMap<(usize, &'a str), Option<u64>>,
        bindings: &mut Vec<Binding>,
        candidates: &[usize],
        from: usize,
        picked: usize,
        chosen: &mut Vec<usize>,
    ) -> Result<bool, VerifierError> {
        let (requirer, interface, arity) = slots[slot];
        if picked == arity {
            return self.assign_slot(slot + 1, slots, instances, capacity, bindings);
        }
        self.spend()?;
        for (pos, &candidate) in candidates.iter().enumerate().skip(from) {
            if candidates.len() - pos < arity - picked {
                break;
            }
            let available = match capacity.get(&(candidate, interface)) {
                Some(Some(remaining)) => *remaining > 0,
                Some(None) => true,
                None => false,
            };
            if !available {
                continue;
            }
            chosen[picked] = candidate;
            if let Some(Some(remaining)) = capacity.get_mut(&(candidate, interface)) {
                *remaining -= 1;
            }
            bindings.push(Binding::new(
                interface.to_string(),
                instances[requirer].0.clone(),
                instances[candidate].0.clone(),
            ));
            let found = self.choose_providers(
                slot, slots, instances, capacity, bindings, candidates, pos + 1, picked + 1,
                chosen,
            )?;
            if found {
                // Keep the chosen bindings; the full assignment lives in
                // `bindings` when the last slot succeeds.
                return Ok(true);
            }
            bindings.pop();
            if let Some(Some(remaining)) = capacity.get_mut(&(candidate, interface)) {
                *remaining += 1;
            }
        }
        Ok(false)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifierError {
    #[error("trace is not valid")]
    InvalidTrace,
    #[error("bad configuration: {0}")]
    BadConfiguration(String),
    #[error("oracle search budget exhausted; raise the budget or lower the cap")]
    OracleBudgetExhausted,
}
