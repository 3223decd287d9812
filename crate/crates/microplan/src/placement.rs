//! First optimization stage: decide how many instances of each type to
//! create, where to place them, and how many bindings each (interface,
//! requirer type, provider type) triple needs, minimizing the summed cost of
//! used nodes.
//!
//! The encoding works on aggregate per-type counts. `bind` variables exist
//! only for pairs where the requirer type actually requires the interface and
//! the provider type actually provides it; every other combination is
//! identically zero and omitted, which keeps the model proportional to the
//! dependency graph.

use std::collections::{BTreeMap, BTreeSet};

use crate::model::{Arity, InterfaceName, NodeName, NodePool, TypeName, Universe};
use crate::solver::{
    Assignment, GuardSense, Implication, LinearConstraint, Model, Objective, ProductBound,
    Relation, Sense, VarId,
};

/// Per-type maximum instance counts; they make the search space finite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceBounds {
    bounds: BTreeMap<TypeName, u64>,
}

impl InstanceBounds {
    pub fn get(&self, type_name: &str) -> u64 {
        self.bounds.get(type_name).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TypeName, &u64)> {
        self.bounds.iter()
    }
}

/// Computes a sound per-type instance bound from node capacities: for each
/// node, the number of instances that fit past the node's most constraining
/// resource, summed over the pool. Types that consume nothing cannot be
/// bounded this way and must come with an explicit override.
pub fn derive_bounds(
    universe: &Universe,
    pool: &NodePool,
    overrides: &BTreeMap<TypeName, u64>,
) -> Result<InstanceBounds, PlacementError> {
    let mut bounds = BTreeMap::new();
    for ty in universe.types() {
        if let Some(bound) = overrides.get(&ty.name) {
            bounds.insert(ty.name.clone(), *bound);
            continue;
        }
        let consuming: Vec<(&str, u64)> = ty
            .resources
            .iter()
            .filter(|(_, amount)| **amount > 0)
            .map(|(r, amount)| (r.as_str(), *amount))
            .collect();
        if consuming.is_empty() {
            return Err(PlacementError::UnboundedType(ty.name.clone()));
        }
        let bound: u64 = pool
            .nodes()
            .map(|node| {
                consuming
                    .iter()
                    .map(|(r, amount)| node.capacity(r) / amount)
                    .min()
                    .unwrap_or(0)
            })
            .sum();
        bounds.insert(ty.name.clone(), bound);
    }
    Ok(InstanceBounds { bounds })
}

/// Variable dictionary of an encoded placement model, used to decode solver
/// assignments. Node costs are captured so the dictionary is self-contained.
#[derive(Debug, Clone)]
pub struct PlacementVars {
    pub inst: BTreeMap<TypeName, VarId>,
    pub inst_at: BTreeMap<(TypeName, NodeName), VarId>,
    pub bind: BTreeMap<(InterfaceName, TypeName, TypeName), VarId>,
    pub used: BTreeMap<NodeName, VarId>,
    pub total_cost: VarId,
    node_costs: BTreeMap<NodeName, u64>,
}

/// Decoded solution of the placement stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstancePlan {
    /// Instances to create per type (zero entries omitted).
    pub total: BTreeMap<TypeName, u64>,
    /// Instances per (type, node) (zero entries omitted).
    pub placement: BTreeMap<(TypeName, NodeName), u64>,
    /// Bindings to establish per (interface, requirer type, provider type).
    pub aggregate_bindings: BTreeMap<(InterfaceName, TypeName, TypeName), u64>,
    pub used_nodes: BTreeSet<NodeName>,
    pub cost: u64,
}

/// Encodes the placement constraint system for `target` over `universe` and
/// `pool`. The universe is re-verified; callers should have run
/// [`Universe::check_well_formed`] already.
pub fn encode(
    universe: &Universe,
    pool: &NodePool,
    target: &str,
    bounds: &InstanceBounds,
) -> Result<(Model, PlacementVars), PlacementError> {
    universe.check_well_formed().map_err(PlacementError::Model)?;
    if universe.get(target).is_none() {
        return Err(PlacementError::UnknownTarget(target.to_string()));
    }

    let interfaces = universe.interfaces();
    let mut model = Model::new();

    let mut inst = BTreeMap::new();
    for ty in universe.types() {
        let bound = bounds.get(&ty.name);
        let var = model.add_var(format!("inst({})", ty.name), 0, bound as i64);
        inst.insert(ty.name.clone(), var);
    }

    let mut inst_at = BTreeMap::new();
    for ty in universe.types() {
        for node in pool.nodes() {
            let fit = per_node_fit(ty, node, bounds.get(&ty.name));
            let var = model.add_var(format!("inst({},{})", ty.name, node.name), 0, fit as i64);
            inst_at.insert((ty.name.clone(), node.name.clone()), var);
        }
    }

    // bind(p, T, T') only where T requires p and T' provides p.
    let mut bind = BTreeMap::new();
    for p in &interfaces {
        for requirer in universe.types() {
            let req_arity = requirer
                .strong_requires
                .get(p)
                .or_else(|| requirer.weak_requires.get(p));
            if req_arity.is_none() {
                continue;
            }
            for provider in universe.types() {
                let Some(prov_arity) = provider.provides.get(p) else {
                    continue;
                };
                let pairs = if requirer.name == provider.name {
                    bounds.get(&requirer.name).saturating_mul(bounds.get(&requirer.name).saturating_sub(1))
                } else {
                    bounds.get(&requirer.name).saturating_mul(bounds.get(&provider.name))
                };
                let cap = match prov_arity {
                    Arity::Finite(a) => pairs.min(a.saturating_mul(bounds.get(&provider.name))),
                    Arity::Infinite => pairs,
                };
                let var = model.add_var(
                    format!("bind({},{},{})", p, requirer.name, provider.name),
                    0,
                    cap as i64,
                );
                bind.insert((p.clone(), requirer.name.clone(), provider.name.clone()), var);
            }
        }
    }

    let mut used = BTreeMap::new();
    for node in pool.nodes() {
        let var = model.add_var(format!("used({})", node.name), 0, 1);
        used.insert(node.name.clone(), var);
    }

    let pool_cost: u64 = pool.nodes().map(|n| n.cost).sum();
    let total_cost = model.add_var("total_cost", 0, pool_cost as i64);

    // Required arities are covered by enough aggregate bindings, strong and
    // weak alike.
    for p in &interfaces {
        for ty in universe.types() {
            let arities = ty
                .strong_requires
                .get(p)
                .into_iter()
                .chain(ty.weak_requires.get(p));
            for arity in arities {
                let mut terms = vec![(-(*arity as i64), inst[&ty.name])];
                for provider in universe.types() {
                    if let Some(var) = bind.get(&(p.clone(), ty.name.clone(), provider.name.clone()))
                    {
                        terms.push((1, *var));
                    }
                }
                model.add_linear(LinearConstraint::new(terms, Relation::Ge, 0));
            }
        }
    }

    // Finite provider capacities bound the incoming aggregate; unbounded
    // providers only need one live instance to absorb any demand.
    for p in &interfaces {
        for ty in universe.types() {
            match ty.provides.get(p) {
                Some(Arity::Finite(capacity)) => {
                    let mut terms = vec![(*capacity as i64, inst[&ty.name])];
                    for requirer in universe.types() {
                        if let Some(var) =
                            bind.get(&(p.clone(), requirer.name.clone(), ty.name.clone()))
                        {
                            terms.push((-1, *var));
                        }
                    }
                    model.add_linear(LinearConstraint::new(terms, Relation::Ge, 0));
                }
                Some(Arity::Infinite) => {
                    let mut terms = Vec::new();
                    for requirer in universe.types() {
                        if let Some(var) =
                            bind.get(&(p.clone(), requirer.name.clone(), ty.name.clone()))
                        {
                            terms.push((1, *var));
                        }
                    }
                    model.add_implication(Implication {
                        guard: inst[&ty.name],
                        sense: GuardSense::IsZero,
                        consequence: LinearConstraint::new(terms, Relation::Le, 0),
                    });
                }
                None => {}
            }
        }
    }

    // At least one instance of the target.
    model.add_linear(LinearConstraint::new(
        vec![(1, inst[target])],
        Relation::Ge,
        1,
    ));

    // Conflicts: a deployed conflict-holder excludes every other provider
    // type; a type providing its own conflicting interface is singleton.
    for p in &interfaces {
        for ty in universe.types() {
            if !ty.conflicts.contains(p) {
                continue;
            }
            for other in universe.types() {
                if other.name != ty.name && other.provides.contains_key(p) {
                    model.add_implication(Implication {
                        guard: inst[&ty.name],
                        sense: GuardSense::IsPositive,
                        consequence: LinearConstraint::new(
                            vec![(1, inst[&other.name])],
                            Relation::Le,
                            0,
                        ),
                    });
                }
            }
            if ty.provides.contains_key(p) {
                model.add_linear(LinearConstraint::new(
                    vec![(1, inst[&ty.name])],
                    Relation::Le,
                    1,
                ));
            }
        }
    }

    // Enough distinct instance pairs to carry the aggregate bindings.
    for ((_, requirer, provider), var) in &bind {
        if requirer == provider {
            model.add_product_bound(ProductBound {
                bounded: *var,
                factor_a: inst[requirer],
                factor_b: inst[requirer],
                offset: -1,
            });
        } else {
            model.add_product_bound(ProductBound {
                bounded: *var,
                factor_a: inst[requirer],
                factor_b: inst[provider],
                offset: 0,
            });
        }
    }

    // Redundant provider floors: a deployed requirer binds its arity in
    // *distinct* provider instances (never itself), so those instances must
    // exist. Dividing the requirement constraints by the pair bounds gives
    // exactly this; stating it linearly lets propagation derive instance
    // floors without fixing any variable.
    for p in &interfaces {
        for ty in universe.types() {
            let arity = ty
                .strong_requires
                .get(p)
                .or_else(|| ty.weak_requires.get(p))
                .copied()
                .unwrap_or(0);
            if arity == 0 {
                continue;
            }
            let terms: Vec<(i64, VarId)> = universe
                .types()
                .filter(|provider| provider.provides.contains_key(p))
                .map(|provider| (1, inst[&provider.name]))
                .collect();
            let own = i64::from(ty.provides.contains_key(p));
            model.add_implication(Implication {
                guard: inst[&ty.name],
                sense: GuardSense::IsPositive,
                consequence: LinearConstraint::new(terms, Relation::Ge, arity as i64 + own),
            });
        }
    }

    // Totals match per-node placements.
    for ty in universe.types() {
        let mut terms = vec![(1, inst[&ty.name])];
        for node in pool.nodes() {
            terms.push((-1, inst_at[&(ty.name.clone(), node.name.clone())]));
        }
        model.add_linear(LinearConstraint::new(terms, Relation::Eq, 0));
    }

    // Node resources cover the hosted instances.
    let mut consumed_resources: BTreeSet<&str> = BTreeSet::new();
    for ty in universe.types() {
        for (r, amount) in &ty.resources {
            if *amount > 0 {
                consumed_resources.insert(r.as_str());
            }
        }
    }
    for r in &consumed_resources {
        for node in pool.nodes() {
            let mut terms = Vec::new();
            for ty in universe.types() {
                let demand = ty.resource(r);
                if demand > 0 {
                    terms.push((demand as i64, inst_at[&(ty.name.clone(), node.name.clone())]));
                }
            }
            model.add_linear(LinearConstraint::new(
                terms,
                Relation::Le,
                node.capacity(r) as i64,
            ));
        }
    }

    // used(o) reified against the node's instance count, one implication per
    // direction.
    for node in pool.nodes() {
        let sum_terms: Vec<(i64, VarId)> = universe
            .types()
            .map(|ty| (1, inst_at[&(ty.name.clone(), node.name.clone())]))
            .collect();
        model.add_implication(Implication {
            guard: used[&node.name],
            sense: GuardSense::IsZero,
            consequence: LinearConstraint::new(sum_terms.clone(), Relation::Le, 0),
        });
        model.add_implication(Implication {
            guard: used[&node.name],
            sense: GuardSense::IsPositive,
            consequence: LinearConstraint::new(sum_terms, Relation::Ge, 1),
        });
    }

    // total_cost ties the objective to the used nodes.
    {
        let mut terms = vec![(-1, total_cost)];
        for node in pool.nodes() {
            terms.push((node.cost as i64, used[&node.name]));
        }
        model.add_linear(LinearConstraint::new(terms, Relation::Eq, 0));
    }

    // Redundant pricing cuts: any node set whose capacity covers the total
    // demand of resource r costs at least (cheapest cost per unit) * demand.
    // They do not change the solution set but let the search bound the
    // objective from instance counts alone.
    for r in &consumed_resources {
        let Some((num, den)) = pool
            .nodes()
            .filter(|n| n.capacity(r) > 0)
            .map(|n| (n.cost, n.capacity(r)))
            .min_by(|a, b| (a.0 as u128 * b.1 as u128).cmp(&(b.0 as u128 * a.1 as u128)))
        else {
            continue;
        };
        if num == 0 {
            continue;
        }
        let mut terms = vec![(den as i64, total_cost)];
        for ty in universe.types() {
            let demand = ty.resource(r);
            if demand > 0 {
                terms.push((-((num * demand) as i64), inst[&ty.name]));
            }
        }
        model.add_linear(LinearConstraint::new(terms, Relation::Ge, 0));
    }

    model.set_objective(Objective {
        sense: Sense::Minimize,
        terms: vec![(1, total_cost)],
    });

    let node_costs = pool.nodes().map(|n| (n.name.clone(), n.cost)).collect();
    Ok((
        model,
        PlacementVars {
            inst,
            inst_at,
            bind,
            used,
            total_cost,
            node_costs,
        },
    ))
}

/// How many instances of `ty` fit on `node` past its most constraining
/// resource; types that consume nothing are limited only by their bound.
fn per_node_fit(ty: &crate::model::MicroserviceType, node: &crate::model::Node, bound: u64) -> u64 {
    let mut fit = bound;
    for (r, amount) in &ty.resources {
        if *amount > 0 {
            fit = fit.min(node.capacity(r) / amount);
        }
    }
    fit
}

/// Reads a satisfying assignment back into an [`InstancePlan`], validating the
/// plan's internal coherence. A failure here indicates an encoder or solver
/// bug, not bad input.
pub fn extract_plan(
    assignment: &Assignment,
    vars: &PlacementVars,
) -> Result<InstancePlan, PlacementError> {
    let mut total = BTreeMap::new();
    for (ty, var) in &vars.inst {
        let count = assignment.get(*var);
        if count < 0 {
            return Err(PlacementError::Incoherent("negative instance count"));
        }
        if count > 0 {
            total.insert(ty.clone(), count as u64);
        }
    }
    let mut placement = BTreeMap::new();
    let mut per_type_sums: BTreeMap<&TypeName, u64> = BTreeMap::new();
    let mut used_nodes = BTreeSet::new();
    for ((ty, node), var) in &vars.inst_at {
        let count = assignment.get(*var);
        if count > 0 {
            placement.insert((ty.clone(), node.clone()), count as u64);
            *per_type_sums.entry(ty).or_default() += count as u64;
            used_nodes.insert(node.clone());
        }
    }
    for (ty, var) in &vars.inst {
        let declared = assignment.get(*var) as u64;
        let placed = per_type_sums.get(ty).copied().unwrap_or(0);
        if declared != placed {
            return Err(PlacementError::Incoherent(
                "per-type total does not match the sum of placements",
            ));
        }
    }
    let mut aggregate_bindings = BTreeMap::new();
    for (key, var) in &vars.bind {
        let count = assignment.get(*var);
        if count > 0 {
            aggregate_bindings.insert(key.clone(), count as u64);
        }
    }
    for (node, var) in &vars.used {
        let flagged = assignment.get(*var) == 1;
        if flagged != used_nodes.contains(node) {
            return Err(PlacementError::Incoherent(
                "used flag disagrees with placements",
            ));
        }
    }
    let cost: u64 = used_nodes.iter().map(|n| vars.node_costs[n]).sum();
    if cost as i64 != assignment.get(vars.total_cost) {
        return Err(PlacementError::Incoherent("cost variable mismatch"));
    }
    Ok(InstancePlan {
        total,
        placement,
        aggregate_bindings,
        used_nodes,
        cost,
    })
}

impl InstancePlan {
    /// Re-checks the full placement constraint system arithmetically, straight
    /// from the decoded maps and independent of the solver's bookkeeping.
    pub fn verify(
        &self,
        universe: &Universe,
        pool: &NodePool,
        target: &str,
    ) -> Result<(), String> {
        let count = |ty: &str| self.total.get(ty).copied().unwrap_or(0);
        let agg = |p: &str, requirer: &str, provider: &str| {
            self.aggregate_bindings
                .get(&(p.to_string(), requirer.to_string(), provider.to_string()))
                .copied()
                .unwrap_or(0)
        };

        if count(target) < 1 {
            return Err(format!("no instance of target {target}"));
        }

        for ty in universe.types() {
            for (reqs, label) in [(&ty.strong_requires, "strong"), (&ty.weak_requires, "weak")] {
                for (p, arity) in reqs {
                    let incoming: u64 = universe
                        .types()
                        .map(|prov| agg(p, &ty.name, &prov.name))
                        .sum();
                    if arity * count(&ty.name) > incoming {
                        return Err(format!(
                            "{label} requirement {p} of {} undercovered: {} needed, {} bound",
                            ty.name,
                            arity * count(&ty.name),
                            incoming
                        ));
                    }
                }
            }
        }

        for ((p, requirer, provider), bound_count) in &self.aggregate_bindings {
            let req_ty = universe.get(requirer).ok_or("unknown requirer type")?;
            let prov_ty = universe.get(provider).ok_or("unknown provider type")?;
            if !req_ty.requires(p) || !prov_ty.provides.contains_key(p) {
                return Err(format!("binding {p} between {requirer} and {provider} is illegal"));
            }
            let pairs = if requirer == provider {
                count(requirer) * count(requirer).saturating_sub(1)
            } else {
                count(requirer) * count(provider)
            };
            if *bound_count > pairs {
                return Err(format!(
                    "{bound_count} bindings on {p} between {requirer} and {provider} exceed {pairs} distinct pairs"
                ));
            }
        }

        for ty in universe.types() {
            for (p, arity) in &ty.provides {
                let incoming: u64 = universe
                    .types()
                    .map(|req| agg(p, &req.name, &ty.name))
                    .sum();
                match arity {
                    Arity::Finite(capacity) => {
                        if incoming > capacity * count(&ty.name) {
                            return Err(format!(
                                "provider {} capacity on {p} exceeded in aggregate",
                                ty.name
                            ));
                        }
                    }
                    Arity::Infinite => {
                        if incoming > 0 && count(&ty.name) == 0 {
                            return Err(format!(
                                "bindings into undeployed unbounded provider {}",
                                ty.name
                            ));
                        }
                    }
                }
            }
            // No bindings into interfaces the type does not provide.
            for other in universe.types() {
                for p in universe.interfaces() {
                    if !ty.provides.contains_key(&p) && agg(&p, &other.name, &ty.name) > 0 {
                        return Err(format!("bindings into unprovided interface {p} of {}", ty.name));
                    }
                }
            }
            for p in &ty.conflicts {
                if count(&ty.name) > 0 {
                    for other in universe.types() {
                        if other.name != ty.name
                            && other.provides.contains_key(p)
                            && count(&other.name) > 0
                        {
                            return Err(format!(
                                "conflict on {p}: {} deployed alongside provider {}",
                                ty.name, other.name
                            ));
                        }
                    }
                }
                if ty.provides.contains_key(p) && count(&ty.name) > 1 {
                    return Err(format!("self-conflicting type {} deployed twice", ty.name));
                }
            }
        }

        for (ty_name, total) in &self.total {
            let placed: u64 = self
                .placement
                .iter()
                .filter(|((t, _), _)| t == ty_name)
                .map(|(_, c)| c)
                .sum();
            if placed != *total {
                return Err(format!("type {ty_name}: total {total} but {placed} placed"));
            }
        }

        for node in pool.nodes() {
            let mut demand: BTreeMap<&str, u64> = BTreeMap::new();
            for ((ty_name, node_name), c) in &self.placement {
                if node_name == &node.name {
                    let ty = universe.get(ty_name).ok_or("unknown placed type")?;
                    for (r, amount) in &ty.resources {
                        *demand.entry(r).or_default() += amount * c;
                    }
                }
            }
            for (r, required) in demand {
                if required > node.capacity(r) {
                    return Err(format!("node {} overloaded on {r}", node.name));
                }
            }
        }

        let recomputed: BTreeSet<NodeName> = self
            .placement
            .keys()
            .map(|(_, node)| node.clone())
            .collect();
        if recomputed != self.used_nodes {
            return Err("used node set disagrees with placements".to_string());
        }
        let cost: u64 = self
            .used_nodes
            .iter()
            .map(|n| pool.get(n).map(|n| n.cost).unwrap_or(0))
            .sum();
        if cost != self.cost {
            return Err("plan cost disagrees with node costs".to_string());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlacementError {
    #[error("type {0} consumes no resources; pass an explicit instance bound for it")]
    UnboundedType(TypeName),
    #[error("target type {0} is not in the universe")]
    UnknownTarget(TypeName),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error("incoherent solver assignment: {0}")]
    Incoherent(&'static str),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MicroserviceType, Node};
    use crate::solver::{solve, Budget, SolveStatus};

    fn ty(name: &str) -> MicroserviceType {
        MicroserviceType {
            name: name.to_string(),
            provides: BTreeMap::new(),
            strong_requires: BTreeMap::new(),
            weak_requires: BTreeMap::new(),
            conflicts: BTreeSet::new(),
            resources: BTreeMap::new(),
        }
    }

    fn mini_universe() -> Universe {
        let mut mr = ty("MessageReceiver");
        mr.weak_requires.insert("MA".into(), 3);
        mr.resources = [("CPU".into(), 2), ("RAM".into(), 4)].into();
        let mut ma = ty("MessageAnalyzer");
        ma.provides.insert("MA".into(), Arity::Infinite);
        ma.strong_requires.insert("AA".into(), 1);
        ma.resources = [("CPU".into(), 2), ("RAM".into(), 3)].into();
        let mut aa = ty("AttachmentAnalyzer");
        aa.provides.insert("AA".into(), Arity::Finite(2));
        aa.resources = [("CPU".into(), 1), ("RAM".into(), 2)].into();
        Universe::new([mr, ma, aa]).unwrap()
    }

    fn mini_pool() -> NodePool {
        let mut nodes = Vec::new();
        for i in 1..=4 {
            nodes.push(Node {
                name: format!("large#{i}"),
                resources: [("CPU".into(), 2), ("RAM".into(), 4)].into(),
                cost: 100,
            });
        }
        for i in 1..=4 {
            nodes.push(Node {
                name: format!("xlarge#{i}"),
                resources: [("CPU".into(), 4), ("RAM".into(), 8)].into(),
                cost: 199,
            });
        }
        NodePool::new(nodes).unwrap()
    }

    #[test]
    fn bounds_sum_per_node_fits() {
        let mut t = ty("CpuOnly");
        t.resources.insert("CPU".into(), 2);
        let mut target = ty("T");
        target.resources.insert("CPU".into(), 1);
        let u = Universe::new([t, target]).unwrap();
        let bounds = derive_bounds(&u, &mini_pool(), &BTreeMap::new()).unwrap();
        // 4 large nodes fit 1 each, 4 xlarge fit 2 each.
        assert_eq!(bounds.get("CpuOnly"), 12);
    }

    #[test]
    fn zero_consumption_needs_override() {
        let u = Universe::new([ty("Free")]).unwrap();
        assert_eq!(
            derive_bounds(&u, &mini_pool(), &BTreeMap::new()).unwrap_err(),
            PlacementError::UnboundedType("Free".into())
        );
        let overrides = [("Free".to_string(), 5)].into();
        let bounds = derive_bounds(&u, &mini_pool(), &overrides).unwrap();
        assert_eq!(bounds.get("Free"), 5);
    }

    #[test]
    fn override_replaces_computed_bound() {
        let u = mini_universe();
        let overrides = [("MessageAnalyzer".to_string(), 5)].into();
        let bounds = derive_bounds(&u, &mini_pool(), &overrides).unwrap();
        assert_eq!(bounds.get("MessageAnalyzer"), 5);
        assert_eq!(bounds.get("AttachmentAnalyzer"), 24);
    }

    fn solve_mini() -> (InstancePlan, Universe, NodePool) {
        let (u, pool) = (mini_universe(), mini_pool());
        let bounds = derive_bounds(&u, &pool, &BTreeMap::new()).unwrap();
        let (model, vars) = encode(&u, &pool, "MessageReceiver", &bounds).unwrap();
        let out = solve(&model, &Budget::unlimited()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        // The literal evaluator agrees with the search.
        let eval = crate::solver::evaluate(&model, out.assignment.as_ref().unwrap()).unwrap();
        assert!(eval.satisfied);
        assert_eq!(eval.objective_value, 498);
        let plan = extract_plan(out.assignment.as_ref().unwrap(), &vars).unwrap();
        (plan, u, pool)
    }

    #[test]
    fn running_example_counts_and_cost() {
        let (plan, u, pool) = solve_mini();
        assert_eq!(plan.total.get("MessageReceiver"), Some(&1));
        assert_eq!(plan.total.get("MessageAnalyzer"), Some(&3));
        assert_eq!(plan.total.get("AttachmentAnalyzer"), Some(&2));
        assert_eq!(plan.cost, 498);
        let larges = plan.used_nodes.iter().filter(|n| n.starts_with("large")).count();
        let xlarges = plan.used_nodes.iter().filter(|n| n.starts_with("xlarge")).count();
        assert_eq!((larges, xlarges), (1, 2));
        plan.verify(&u, &pool, "MessageReceiver").unwrap();
    }

    #[test]
    fn unprovidable_requirement_is_unsat() {
        let mut t = ty("Needy");
        t.strong_requires.insert("missing".into(), 1);
        t.resources.insert("CPU".into(), 1);
        let u = Universe::new([t]).unwrap();
        let pool = mini_pool();
        let bounds = derive_bounds(&u, &pool, &BTreeMap::new()).unwrap();
        let (model, _) = encode(&u, &pool, "Needy", &bounds).unwrap();
        let out = solve(&model, &Budget::unlimited()).unwrap();
        assert_eq!(out.status, SolveStatus::Unsat);
    }

    #[test]
    fn conflicting_weak_requirement_is_unsat() {
        // The target's weak requirement can only be covered by a provider it
        // excludes through a conflict, so coverage and exclusion cannot both
        // hold.
        let mut t = ty("Target");
        t.conflicts.insert("p".into());
        t.weak_requires.insert("q".into(), 1);
        t.resources.insert("CPU".into(), 1);
        let mut prov = ty("Provider");
        prov.provides.insert("p".into(), Arity::Infinite);
        prov.provides.insert("q".into(), Arity::Infinite);
        prov.resources.insert("CPU".into(), 1);
        let u = Universe::new([t, prov]).unwrap();
        let pool = mini_pool();
        let bounds = derive_bounds(&u, &pool, &BTreeMap::new()).unwrap();
        let (model, _) = encode(&u, &pool, "Target", &bounds).unwrap();
        let out = solve(&model, &Budget::unlimited()).unwrap();
        assert_eq!(out.status, SolveStatus::Unsat);
    }

    #[test]
    fn lone_target_takes_cheapest_adequate_node() {
        let mut t = ty("Solo");
        t.resources.insert("CPU".into(), 1);
        let u = Universe::new([t]).unwrap();
        let pool = mini_pool();
        let bounds = derive_bounds(&u, &pool, &BTreeMap::new()).unwrap();
        let (model, vars) = encode(&u, &pool, "Solo", &bounds).unwrap();
        let out = solve(&model, &Budget::unlimited()).unwrap();
        assert_eq!(out.status, SolveStatus::Optimal);
        let plan = extract_plan(out.assignment.as_ref().unwrap(), &vars).unwrap();
        assert_eq!(plan.total.get("Solo"), Some(&1));
        assert_eq!(plan.cost, 100);
    }

    /// Golden snapshot of the running example's exported model: the line
    /// count is the emitted variables and constraints plus two header lines
    /// and the objective. Frozen at the first verified build; a change here
    /// means the encoding changed.
    #[test]
    fn export_line_count_matches_the_encoding() {
        let (u, pool) = (mini_universe(), mini_pool());
        let bounds = derive_bounds(&u, &pool, &BTreeMap::new()).unwrap();
        let (model, _) = encode(&u, &pool, "MessageReceiver", &bounds).unwrap();
        let text = crate::solver::export_model(&model);
        let expected = 2
            + model.num_vars()
            + model.linear.len()
            + model.implications.len()
            + model.product_bounds.len()
            + 1;
        assert_eq!(text.lines().count(), expected);
        assert_eq!(text.lines().count(), 88);
        assert_eq!(
            (model.num_vars(), model.linear.len(), model.implications.len(), model.product_bounds.len()),
            (38, 26, 19, 2)
        );
        // The dump re-parses to an equivalent model.
        let parsed = crate::solver::parse_model(&text).unwrap();
        assert_eq!(parsed, model);
    }

    #[test]
    fn removing_a_node_never_lowers_cost() {
        let (u, pool) = (mini_universe(), mini_pool());
        let bounds = derive_bounds(&u, &pool, &BTreeMap::new()).unwrap();
        let (model, _) = encode(&u, &pool, "MessageReceiver", &bounds).unwrap();
        let full = solve(&model, &Budget::unlimited()).unwrap();

        let reduced = NodePool::new(
            pool.nodes()
                .filter(|n| n.name != "xlarge#1")
                .cloned()
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let bounds = derive_bounds(&u, &reduced, &BTreeMap::new()).unwrap();
        let (model, _) = encode(&u, &reduced, "MessageReceiver", &bounds).unwrap();
        let out = solve(&model, &Budget::unlimited()).unwrap();
        assert!(out.objective_value.unwrap() >= full.objective_value.unwrap());
    }

    #[test]
    fn raising_provided_arity_never_raises_cost() {
        let (u, pool) = (mini_universe(), mini_pool());
        let bounds = derive_bounds(&u, &pool, &BTreeMap::new()).unwrap();
        let (model, _) = encode(&u, &pool, "MessageReceiver", &bounds).unwrap();
        let base = solve(&model, &Budget::unlimited()).unwrap();

        let mut roomier: Vec<MicroserviceType> = u.types().cloned().collect();
        for ty in &mut roomier {
            if ty.name == "AttachmentAnalyzer" {
                ty.provides.insert("AA".into(), Arity::Finite(3));
            }
        }
        let u2 = Universe::new(roomier).unwrap();
        let bounds = derive_bounds(&u2, &pool, &BTreeMap::new()).unwrap();
        let (model, _) = encode(&u2, &pool, "MessageReceiver", &bounds).unwrap();
        let out = solve(&model, &Budget::unlimited()).unwrap();
        assert!(out.objective_value.unwrap() <= base.objective_value.unwrap());
    }
}
