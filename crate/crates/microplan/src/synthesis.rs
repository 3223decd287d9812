//! Third stage: turn the placement and binding solutions into an ordered
//! deployment plan whose every intermediate configuration stays provisionally
//! correct.
//!
//! Two modes exist. Scratch mode unbinds every weak binding, deletes the
//! initial instances in reverse creation order, then builds the target from
//! nothing. Incremental mode first matches deployed instances against target
//! slots — same type, same node, same strong-binding shape — and only tears
//! down the surplus, reconciling weak bindings at the end.

use std::collections::{BTreeMap, BTreeSet};

use crate::binding::{BindingPlan, PlacedInstance};
use crate::model::{
    Action, Binding, Configuration, DeploymentPlan, InstanceId, InstanceInfo, ModelError,
    NodePool, Universe,
};

/// Builds the target configuration from materialized instances and a binding
/// plan, and verifies it is fully correct. A failure here means an upstream
/// stage produced incoherent output.
pub fn assemble_target(
    instances: &[PlacedInstance],
    plan: &BindingPlan,
    universe: &Universe,
    pool: &NodePool,
) -> Result<Configuration, SynthesisError> {
    let config = Configuration::from_parts(
        instances.iter().map(|i| {
            (
                i.id.clone(),
                InstanceInfo {
                    type_name: i.type_name.clone(),
                    node: i.node.clone(),
                },
            )
        }),
        plan.bindings.iter().cloned(),
    )
    .map_err(SynthesisError::Model)?;
    let report = config
        .check_correct(universe, pool)
        .map_err(SynthesisError::Model)?;
    if !report.is_correct() {
        return Err(SynthesisError::IncoherentTarget {
            first_violation: report.violations[0].to_string(),
        });
    }
    Ok(config)
}

/// Canonical creation order: strong-binding providers before their requirers,
/// ties resolved by instance id. Deletion uses the exact reverse, so an
/// instance is only ever deleted once nothing left depends on it strongly.
fn creation_order(
    config: &Configuration,
    universe: &Universe,
) -> Result<Vec<InstanceId>, SynthesisError> {
    let mut pending: BTreeMap<&str, usize> = BTreeMap::new();
    let mut dependents: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for (id, _) in config.instances() {
        pending.insert(id.as_str(), 0);
    }
    for b in config.bindings() {
        if is_strong(b, config, universe) {
            *pending.get_mut(b.requirer.as_str()).expect("requirer exists") += 1;
            dependents
                .entry(b.provider.as_str())
                .or_default()
                .push(b.requirer.as_str());
        }
    }
    let mut ready: BTreeSet<&str> = pending
        .iter()
        .filter(|(_, count)| **count == 0)
        .map(|(id, _)| *id)
        .collect();
    let mut order = Vec::with_capacity(config.instance_count());
    while let Some(id) = ready.pop_first() {
        order.push(id.to_string());
        for dependent in dependents.remove(id).unwrap_or_default() {
            let count = pending.get_mut(dependent).expect("instance exists");
            *count -= 1;
            if *count == 0 {
                ready.insert(dependent);
            }
        }
    }
    if order.len() != config.instance_count() {
        return Err(SynthesisError::StrongBindingCycle);
    }
    Ok(order)
}

fn is_strong(b: &Binding, config: &Configuration, universe: &Universe) -> bool {
    let info = config.instance(&b.requirer).expect("binding endpoints exist");
    universe
        .get(&info.type_name)
        .map(|ty| ty.strong_requires.contains_key(&b.interface))
        .unwrap_or(false)
}

/// Groups an instance's strong bindings (under a final-id rename) into the
/// map shape the `new` action takes, covering every strong port of the type.
fn strong_bindings_for(
    id: &str,
    config: &Configuration,
    universe: &Universe,
    rename: &dyn Fn(&str) -> InstanceId,
) -> BTreeMap<String, BTreeSet<InstanceId>> {
    let info = config.instance(id).expect("instance exists");
    let ty = universe.get(&info.type_name).expect("type exists");
    let mut out: BTreeMap<String, BTreeSet<InstanceId>> = ty
        .strong_requires
        .keys()
        .map(|p| (p.clone(), BTreeSet::new()))
        .collect();
    for b in config.bindings() {
        if b.requirer == id {
            if let Some(providers) = out.get_mut(&b.interface) {
                providers.insert(rename(&b.provider));
            }
        }
    }
    out
}

/// Emits the proof-shaped plan: full teardown of `initial`, then buildup of
/// `target` from nothing. The plan length is always
/// `|initial weak bindings| + |initial instances| + |target instances| +
/// |target weak bindings|`.
pub fn synthesize_scratch(
    initial: &Configuration,
    target: &Configuration,
    universe: &Universe,
    pool: &NodePool,
) -> Result<DeploymentPlan, SynthesisError> {
    require_provisional(initial, universe, pool)?;
    let mut actions = Vec::new();

    for b in initial.bindings() {
        if !is_strong(b, initial, universe) {
            actions.push(Action::Unbind {
                interface: b.interface.clone(),
                requirer: b.requirer.clone(),
                provider: b.provider.clone(),
            });
        }
    }
    let order = creation_order(initial, universe)?;
    for id in order.iter().rev() {
        actions.push(Action::Del { instance: id.clone() });
    }

    for id in creation_order(target, universe)? {
        let info = target.instance(&id).expect("ordered over instances");
        actions.push(Action::New {
            instance: id.clone(),
            type_name: info.type_name.clone(),
            node: info.node.clone(),
            strong_bindings: strong_bindings_for(&id, target, universe, &|p| p.to_string()),
        });
    }
    let mut weak: Vec<Action> = target
        .bindings()
        .filter(|b| !is_strong(b, target, universe))
        .map(|b| Action::Bind {
            interface: b.interface.clone(),
            requirer: b.requirer.clone(),
            provider: b.provider.clone(),
        })
        .collect();
    weak.sort_by_key(bind_key);
    actions.extend(weak);
    Ok(DeploymentPlan { actions })
}

fn bind_key(a: &Action) -> (String, String, String) {
    match a {
        Action::Bind {
            interface,
            requirer,
            provider,
        } => (interface.clone(), requirer.clone(), provider.clone()),
        _ => unreachable!("sorted list holds only binds"),
    }
}

/// A reuse matching: which target instance is realized by which already
/// deployed instance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReuseMatching {
    /// target instance id -> initial instance id
    pub kept: BTreeMap<InstanceId, InstanceId>,
}

impl ReuseMatching {
    pub fn kept_initial_ids(&self) -> BTreeSet<InstanceId> {
        self.kept.values().cloned().collect()
    }
}

/// Matches initial instances onto target instances: a pair must agree on type
/// and node, and the initial instance's strong bindings must map exactly onto
/// the target instance's strong bindings under the matching built so far.
/// Strong ports cannot be rewired after creation, so anything looser would
/// produce invalid plans.
///
/// Deterministic: target instances are visited in creation order, candidates
/// in id order, with an identical id preferred.
pub fn compute_matching(
    initial: &Configuration,
    target: &Configuration,
    universe: &Universe,
) -> Result<ReuseMatching, SynthesisError> {
    let strong_out = |config: &Configuration, id: &str| -> BTreeSet<(String, String)> {
        config
            .bindings()
            .filter(|b| b.requirer == id && is_strong(b, config, universe))
            .map(|b| (b.interface.clone(), b.provider.clone()))
            .collect()
    };

    let mut kept: BTreeMap<InstanceId, InstanceId> = BTreeMap::new();
    let mut used_initial: BTreeSet<InstanceId> = BTreeSet::new();

    for t_id in creation_order(target, universe)? {
        let t_info = target.instance(&t_id).expect("ordered over instances");
        let t_strong = strong_out(target, &t_id);
        // The target's strong providers, translated to initial ids; bail if
        // any provider is itself unmatched.
        let expected: Option<BTreeSet<(String, String)>> = t_strong
            .iter()
            .map(|(p, prov)| kept.get(prov).map(|z| (p.clone(), z.clone())))
            .collect();
        let Some(expected) = expected else {
            continue;
        };
        let mut candidates: Vec<&InstanceId> = initial
            .instances()
            .filter(|(z_id, z_info)| {
                !used_initial.contains(*z_id)
                    && z_info.type_name == t_info.type_name
                    && z_info.node == t_info.node
            })
            .map(|(z_id, _)| z_id)
            .collect();
        candidates.sort_by_key(|z| (**z != t_id, (*z).clone()));
        for z_id in candidates {
            if strong_out(initial, z_id) == expected {
                kept.insert(t_id.clone(), z_id.clone());
                used_initial.insert(z_id.clone());
                break;
            }
        }
    }
    Ok(ReuseMatching { kept })
}

/// Synthesizes a plan that reuses matching deployed instances: surplus
/// instances are unbound and deleted, missing instances created in strong
/// dependency order, and weak bindings reconciled to match the target exactly
/// (up to the identity renaming induced by the matching).
pub fn synthesize_incremental(
    initial: &Configuration,
    target: &Configuration,
    universe: &Universe,
    pool: &NodePool,
) -> Result<DeploymentPlan, SynthesisError> {
    require_provisional(initial, universe, pool)?;
    let matching = compute_matching(initial, target, universe)?;
    synthesize_with_matching(initial, target, &matching, universe)
}

/// The incremental emitter, explicit about the matching in use.
pub fn synthesize_with_matching(
    initial: &Configuration,
    target: &Configuration,
    matching: &ReuseMatching,
    universe: &Universe,
) -> Result<DeploymentPlan, SynthesisError> {
    let kept_initial = matching.kept_initial_ids();
    let inverse: BTreeMap<&InstanceId, &InstanceId> =
        matching.kept.iter().map(|(t, z)| (z, t)).collect();

    // Final ids: matched targets keep the deployed instance's id; new
    // instances take their slot id unless a kept instance already owns it.
    let mut final_ids: BTreeMap<InstanceId, InstanceId> = matching.kept.clone();
    let mut taken: BTreeSet<InstanceId> = kept_initial.clone();
    for (t_id, t_info) in target.instances() {
        if final_ids.contains_key(t_id) {
            continue;
        }
        let id = if taken.contains(t_id) {
            let mut k = 1u64;
            loop {
                let candidate = format!("{}#{k}", t_info.type_name);
                if !taken.contains(&candidate) {
                    break candidate;
                }
                k += 1;
            }
        } else {
            t_id.clone()
        };
        taken.insert(id.clone());
        final_ids.insert(t_id.clone(), id);
    }
    let rename = |t_id: &str| -> InstanceId { final_ids[t_id].clone() };

    // A weak binding survives when both endpoints are kept and the target
    // holds the corresponding binding.
    let survives = |b: &Binding| -> bool {
        let (Some(t1), Some(t2)) = (inverse.get(&b.requirer), inverse.get(&b.provider)) else {
            return false;
        };
        target.has_binding(&Binding::new(
            b.interface.clone(),
            (*t1).clone(),
            (*t2).clone(),
        ))
    };

    let mut actions = Vec::new();
    for b in initial.bindings() {
        if !is_strong(b, initial, universe) && !survives(b) {
            actions.push(Action::Unbind {
                interface: b.interface.clone(),
                requirer: b.requirer.clone(),
                provider: b.provider.clone(),
            });
        }
    }

    let order = creation_order(initial, universe)?;
    for id in order.iter().rev() {
        if !kept_initial.contains(id) {
            actions.push(Action::Del { instance: id.clone() });
        }
    }

    // Buildup: create unmatched slots, then add the weak bindings that do not
    // already exist among kept instances.
    for t_id in creation_order(target, universe)? {
        if matching.kept.contains_key(&t_id) {
            continue;
        }
        let info = target.instance(&t_id).expect("ordered over instances");
        actions.push(Action::New {
            instance: rename(&t_id),
            type_name: info.type_name.clone(),
            node: info.node.clone(),
            strong_bindings: strong_bindings_for(&t_id, target, universe, &rename),
        });
    }
    let mut weak: Vec<Action> = target
        .bindings()
        .filter(|b| !is_strong(b, target, universe))
        .filter(|b| {
            // Skip bindings that survived the teardown.
            let (Some(z1), Some(z2)) = (matching.kept.get(&b.requirer), matching.kept.get(&b.provider))
            else {
                return true;
            };
            !initial.has_binding(&Binding::new(b.interface.clone(), z1.clone(), z2.clone()))
        })
        .map(|b| Action::Bind {
            interface: b.interface.clone(),
            requirer: rename(&b.requirer),
            provider: rename(&b.provider),
        })
        .collect();
    weak.sort_by_key(bind_key);
    actions.extend(weak);

    Ok(DeploymentPlan { actions })
}

fn require_provisional(
    initial: &Configuration,
    universe: &Universe,
    pool: &NodePool,
) -> Result<(), SynthesisError> {
    let report = initial
        .check_provisional(universe, pool)
        .map_err(SynthesisError::Model)?;
    if !report.is_provisionally_correct() {
        return Err(SynthesisError::InitialNotProvisional {
            first_violation: report.violations[0].to_string(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("assembled target configuration is not correct: {first_violation}")]
    IncoherentTarget { first_violation: String },
    #[error("initial configuration is not provisionally correct: {first_violation}")]
    InitialNotProvisional { first_violation: String },
    #[error("strong bindings form a cycle; the universe cannot be well-formed")]
    StrongBindingCycle,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::binding::{self, BindingMetric};
    use crate::model::{Arity, MicroserviceType, Node};
    use crate::placement::{derive_bounds, encode as encode_placement, extract_plan};
    use crate::solver::{solve, Budget};

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

    fn inst(type_name: &str, node: &str) -> InstanceInfo {
        InstanceInfo {
            type_name: type_name.into(),
            node: node.into(),
        }
    }

    fn mini_initial() -> Configuration {
        Configuration::from_parts(
            [
                ("mr".to_string(), inst("MessageReceiver", "large#1")),
                ("ma".to_string(), inst("MessageAnalyzer", "xlarge#1")),
                ("aa".to_string(), inst("AttachmentAnalyzer", "xlarge#1")),
            ],
            [Binding::new("MA", "mr", "ma"), Binding::new("AA", "ma", "aa")],
        )
        .unwrap()
    }

    fn mini_target() -> Configuration {
        let (u, pool) = (mini_universe(), mini_pool());
        let bounds = derive_bounds(&u, &pool, &BTreeMap::new()).unwrap();
        let (model, vars) = encode_placement(&u, &pool, "MessageReceiver", &bounds).unwrap();
        let out = solve(&model, &Budget::unlimited()).unwrap();
        let plan = extract_plan(out.assignment.as_ref().unwrap(), &vars).unwrap();
        let instances = binding::materialize_instances(&plan);
        let (model, vars) = binding::encode(&instances, &u, &BindingMetric::None).unwrap();
        let out = solve(&model, &Budget::unlimited()).unwrap();
        let bplan =
            binding::extract_binding_plan(out.assignment.as_ref().unwrap(), &vars, &instances, &u)
                .unwrap();
        assemble_target(&instances, &bplan, &u, &pool).unwrap()
    }

    #[test]
    fn assemble_validates_correctness() {
        let target = mini_target();
        assert_eq!(target.instance_count(), 6);
    }

    #[test]
    fn assemble_rejects_corrupted_binding_plans() {
        let (u, pool) = (mini_universe(), mini_pool());
        let target = mini_target();
        let instances: Vec<PlacedInstance> = target
            .instances()
            .map(|(id, info)| PlacedInstance {
                id: id.clone(),
                type_name: info.type_name.clone(),
                node: info.node.clone(),
            })
            .collect();
        // Drop one of the receiver's bindings: its weak arity 3 goes unmet.
        let mut bindings: BTreeSet<Binding> = target.bindings().cloned().collect();
        let dropped = bindings
            .iter()
            .find(|b| b.interface == "MA")
            .cloned()
            .unwrap();
        bindings.remove(&dropped);
        let err = assemble_target(&instances, &BindingPlan { bindings }, &u, &pool).unwrap_err();
        assert!(matches!(err, SynthesisError::IncoherentTarget { .. }));
    }

    #[test]
    fn scratch_from_empty_is_pure_buildup() {
        let (u, pool) = (mini_universe(), mini_pool());
        let target = mini_target();
        let plan = synthesize_scratch(&Configuration::empty(), &target, &u, &pool).unwrap();
        assert_eq!(plan.len(), 9);
        let kinds: Vec<&str> = plan
            .actions
            .iter()
            .map(|a| match a {
                Action::New { type_name, .. } => type_name.as_str(),
                Action::Bind { .. } => "bind",
                _ => panic!("unexpected action in pure buildup"),
            })
            .collect();
        assert_eq!(
            kinds,
            vec![
                "AttachmentAnalyzer",
                "AttachmentAnalyzer",
                "MessageAnalyzer",
                "MessageAnalyzer",
                "MessageAnalyzer",
                "MessageReceiver",
                "bind",
                "bind",
                "bind",
            ]
        );
    }

    #[test]
    fn scratch_teardown_deletes_dependents_first() {
        let (u, pool) = (mini_universe(), mini_pool());
        let target = mini_target();
        let plan = synthesize_scratch(&mini_initial(), &target, &u, &pool).unwrap();
        // 1 weak unbind + 3 deletes + 6 creates + 3 binds.
        assert_eq!(plan.len(), 13);
        assert_eq!(
            plan.actions[0],
            Action::Unbind {
                interface: "MA".into(),
                requirer: "mr".into(),
                provider: "ma".into(),
            }
        );
        assert_eq!(plan.actions[1], Action::Del { instance: "mr".into() });
        assert_eq!(plan.actions[2], Action::Del { instance: "ma".into() });
        assert_eq!(plan.actions[3], Action::Del { instance: "aa".into() });
    }

    #[test]
    fn scratch_rebuilds_even_when_already_at_target() {
        let (u, pool) = (mini_universe(), mini_pool());
        let target = mini_target();
        let plan = synthesize_scratch(&target, &target, &u, &pool).unwrap();
        assert_eq!(plan.len(), 3 + 6 + 6 + 3);
    }

    #[test]
    fn incremental_is_empty_when_already_at_target() {
        let (u, pool) = (mini_universe(), mini_pool());
        let target = mini_target();
        let plan = synthesize_incremental(&target, &target, &u, &pool).unwrap();
        assert!(plan.is_empty(), "got {:?}", plan.actions);
    }

    #[test]
    fn incremental_deletes_surplus_with_its_unbinds() {
        let (u, pool) = (mini_universe(), mini_pool());
        let target = mini_target();
        // Add one surplus analyzer bound to an existing attachment analyzer
        // with spare capacity.
        let spare_provider = target
            .instances()
            .filter(|(_, info)| info.type_name == "AttachmentAnalyzer")
            .map(|(id, _)| id.clone())
            .find(|id| {
                target
                    .bindings()
                    .filter(|b| &b.provider == id)
                    .count()
                    < 2
            })
            .expect("capacity 2 x 2 attachment analyzers, 3 analyzers: one has slack");
        let free_node = (1..=4)
            .map(|i| format!("xlarge#{i}"))
            .find(|n| !target.used_nodes().contains(n))
            .expect("target uses only two xlarge nodes");
        let initial = target
            .apply(
                &Action::New {
                    instance: "extra".into(),
                    type_name: "MessageAnalyzer".into(),
                    node: free_node,
                    strong_bindings: [("AA".to_string(), [spare_provider].into())].into(),
                },
                &u,
            )
            .unwrap();
        let plan = synthesize_incremental(&initial, &target, &u, &pool).unwrap();
        assert_eq!(
            plan.actions,
            vec![Action::Del { instance: "extra".into() }]
        );
    }

    #[test]
    fn incremental_never_deletes_and_recreates_a_match() {
        let (u, pool) = (mini_universe(), mini_pool());
        let target = mini_target();
        let plan = synthesize_incremental(&mini_initial(), &target, &u, &pool).unwrap();
        for pair in plan.actions.windows(2) {
            if let (Action::Del { instance }, Action::New { type_name, node, .. }) =
                (&pair[0], &pair[1])
            {
                let deleted = mini_initial();
                let info = deleted.instance(instance).unwrap();
                assert!(
                    info.type_name != *type_name || info.node != *node,
                    "deleted and recreated an identical (type, node) pair"
                );
            }
        }
    }

    #[test]
    fn matching_requires_strong_shape_agreement() {
        let (u, _pool) = (mini_universe(), mini_pool());
        // Two attachment analyzers and two analyzers on one node; the initial
        // analyzers are both bound to aa1, the target splits them.
        let initial = Configuration::from_parts(
            [
                ("m1".to_string(), inst("MessageAnalyzer", "xlarge#1")),
                ("m2".to_string(), inst("MessageAnalyzer", "xlarge#1")),
                ("a1".to_string(), inst("AttachmentAnalyzer", "xlarge#1")),
                ("a2".to_string(), inst("AttachmentAnalyzer", "xlarge#1")),
            ],
            [
                Binding::new("AA", "m1", "a1"),
                Binding::new("AA", "m2", "a1"),
            ],
        )
        .unwrap();
        let target = Configuration::from_parts(
            [
                ("t1".to_string(), inst("MessageAnalyzer", "xlarge#1")),
                ("t2".to_string(), inst("MessageAnalyzer", "xlarge#1")),
                ("u1".to_string(), inst("AttachmentAnalyzer", "xlarge#1")),
                ("u2".to_string(), inst("AttachmentAnalyzer", "xlarge#1")),
            ],
            [
                Binding::new("AA", "t1", "u1"),
                Binding::new("AA", "t2", "u2"),
            ],
        )
        .unwrap();
        let matching = compute_matching(&initial, &target, &u).unwrap();
        // Both attachment analyzers match; only one analyzer can (the one
        // whose provider maps to a1's match).
        assert_eq!(matching.kept.len(), 3);
        let kept_analyzers = matching
            .kept
            .iter()
            .filter(|(t, _)| t.starts_with('t'))
            .count();
        assert_eq!(kept_analyzers, 1);
    }
}
