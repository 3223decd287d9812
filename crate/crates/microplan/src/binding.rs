//! Second optimization stage: materialize named instances from an
//! [`InstancePlan`](crate::placement::InstancePlan) and decide the concrete
//! binding matrix between them, optionally under a binding metric.
//!
//! Binding variables are 0/1 and exist only for ordered pairs where the
//! requirer's type requires the interface and the provider's type provides
//! it; everything else is identically zero and omitted.
//!
//! The stage re-derives bindings from the per-instance arities rather than
//! forcing the placement stage's aggregate binding counts: the aggregates
//! only exist to guarantee this stage is satisfiable, and insisting on them
//! can clash with per-instance capacity splits.

use std::collections::BTreeMap;
use std::fmt;

use crate::model::{Arity, Binding, InstanceId, InterfaceName, NodeName, TypeName, Universe};
use crate::placement::InstancePlan;
use crate::solver::{Assignment, LinearConstraint, Model, Objective, Relation, Sense, VarId};

/// One instance slot produced by the placement stage: `TypeName#k` with `k`
/// counting from 1, assigned to nodes in ascending node-name order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedInstance {
    pub id: InstanceId,
    pub type_name: TypeName,
    pub node: NodeName,
}

/// Expands an instance plan into named instances with deterministic ids and
/// node assignments, so repeated runs and golden tests agree.
pub fn materialize_instances(plan: &InstancePlan) -> Vec<PlacedInstance> {
    let mut out = Vec::new();
    for (type_name, total) in &plan.total {
        let mut k = 0u64;
        for ((ty, node), count) in &plan.placement {
            if ty != type_name {
                continue;
            }
            for _ in 0..*count {
                k += 1;
                out.push(PlacedInstance {
                    id: format!("{type_name}#{k}"),
                    type_name: type_name.clone(),
                    node: node.clone(),
                });
            }
        }
        debug_assert_eq!(k, *total, "plan invariant: totals match placements");
    }
    out
}

/// Objective for the binding stage.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum BindingMetric {
    /// Any feasible binding matrix.
    #[default]
    None,
    /// Prefer co-located pairs: minimize the number of bindings whose
    /// endpoints sit on different nodes.
    MinimizeCrossNode,
    /// Saturate: maximize the total number of bindings.
    MaximizeBindings,
    /// Linear objective with per-(interface, requirer type, provider type)
    /// weights; pairs without a weight count as zero.
    Weighted {
        weights: BTreeMap<(InterfaceName, TypeName, TypeName), i64>,
        sense: Sense,
    },
}

impl fmt::Display for BindingMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BindingMetric::None => write!(f, "none"),
            BindingMetric::MinimizeCrossNode => write!(f, "min-cross"),
            BindingMetric::MaximizeBindings => write!(f, "max-bind"),
            BindingMetric::Weighted { .. } => write!(f, "weighted"),
        }
    }
}

/// Variable dictionary of an encoded binding model: one 0/1 variable per
/// admissible (interface, requirer instance, provider instance) triple.
#[derive(Debug, Clone)]
pub struct BindingVars {
    pub b: BTreeMap<(InterfaceName, InstanceId, InstanceId), VarId>,
}

/// The concrete bindings to establish.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BindingPlan {
    pub bindings: std::collections::BTreeSet<Binding>,
}

/// Encodes the per-instance binding problem over `instances`.
///
/// Every instance's provided capacity bounds its incoming bindings; every
/// required interface (strong and weak) bounds its outgoing bindings from
/// below. The metric only shapes the objective, never feasibility.
pub fn encode(
    instances: &[PlacedInstance],
    universe: &Universe,
    metric: &BindingMetric,
) -> Result<(Model, BindingVars), BindingError> {
    for inst in instances {
        if universe.get(&inst.type_name).is_none() {
            return Err(BindingError::UnknownType(inst.type_name.clone()));
        }
    }

    let interfaces = universe.interfaces();
    let mut model = Model::new();
    let mut b = BTreeMap::new();

    for p in &interfaces {
        for requirer in instances {
            let req_ty = universe.get(&requirer.type_name).expect("checked above");
            if !req_ty.requires(p) {
                continue;
            }
            for provider in instances {
                if provider.id == requirer.id {
                    continue;
                }
                let prov_ty = universe.get(&provider.type_name).expect("checked above");
                if !prov_ty.provides.contains_key(p) {
                    continue;
                }
                let var = model.add_var(format!("b({},{},{})", p, requirer.id, provider.id), 0, 1);
                b.insert((p.clone(), requirer.id.clone(), provider.id.clone()), var);
            }
        }
    }

    // Incoming bindings per provider instance and interface stay within the
    // provided capacity.
    for provider in instances {
        let prov_ty = universe.get(&provider.type_name).expect("checked above");
        for p in &interfaces {
            let terms: Vec<(i64, VarId)> = instances
                .iter()
                .filter_map(|requirer| {
                    b.get(&(p.clone(), requirer.id.clone(), provider.id.clone()))
                        .map(|var| (1, *var))
                })
                .collect();
            if terms.is_empty() {
                continue;
            }
            match prov_ty.provided_arity(p) {
                Some(Arity::Infinite) => {}
                Some(Arity::Finite(capacity)) => {
                    model.add_linear(LinearConstraint::new(terms, Relation::Le, capacity as i64));
                }
                // limProv is 0 outside the provided domain; such variables do
                // not exist, so nothing to constrain.
                None => unreachable!("variables exist only for provided interfaces"),
            }
        }
    }

    // Outgoing bindings per requirer instance meet the required arities.
    for requirer in instances {
        let req_ty = universe.get(&requirer.type_name).expect("checked above");
        for (p, arity) in req_ty.strong_requires.iter().chain(&req_ty.weak_requires) {
            let terms: Vec<(i64, VarId)> = instances
                .iter()
                .filter_map(|provider| {
                    b.get(&(p.clone(), requirer.id.clone(), provider.id.clone()))
                        .map(|var| (1, *var))
                })
                .collect();
            model.add_linear(LinearConstraint::new(terms, Relation::Ge, *arity as i64));
        }
    }

    let node_of: BTreeMap<&str, &str> = instances
        .iter()
        .map(|i| (i.id.as_str(), i.node.as_str()))
        .collect();
    let type_of: BTreeMap<&str, &str> = instances
        .iter()
        .map(|i| (i.id.as_str(), i.type_name.as_str()))
        .collect();
    let objective = match metric {
        BindingMetric::None => Objective::default(),
        BindingMetric::MinimizeCrossNode => Objective {
            sense: Sense::Minimize,
            terms: b
                .iter()
                .filter(|((_, req, prov), _)| node_of[req.as_str()] != node_of[prov.as_str()])
                .map(|(_, var)| (1, *var))
                .collect(),
        },
        BindingMetric::MaximizeBindings => Objective {
            sense: Sense::Maximize,
            terms: b.values().map(|var| (1, *var)).collect(),
        },
        BindingMetric::Weighted { weights, sense } => Objective {
            sense: *sense,
            terms: b
                .iter()
                .filter_map(|((p, req, prov), var)| {
                    let key = (
                        p.clone(),
                        type_of[req.as_str()].to_string(),
                        type_of[prov.as_str()].to_string(),
                    );
                    weights.get(&key).map(|w| (*w, *var))
                })
                .filter(|(w, _)| *w != 0)
                .collect(),
        },
    };
    model.set_objective(objective);

    Ok((model, BindingVars { b }))
}

/// Collects the `b = 1` triples of a satisfying assignment, re-validating the
/// binding side conditions. A failure indicates an encoder or solver bug.
pub fn extract_binding_plan(
    assignment: &Assignment,
    vars: &BindingVars,
    instances: &[PlacedInstance],
    universe: &Universe,
) -> Result<BindingPlan, BindingError> {
    let type_of: BTreeMap<&str, &str> = instances
        .iter()
        .map(|i| (i.id.as_str(), i.type_name.as_str()))
        .collect();
    let mut bindings = std::collections::BTreeSet::new();
    for ((p, requirer, provider), var) in &vars.b {
        match assignment.get(*var) {
            0 => continue,
            1 => {
                if requirer == provider {
                    return Err(BindingError::Incoherent("self-binding"));
                }
                let req_ty = universe
                    .get(type_of[requirer.as_str()])
                    .ok_or(BindingError::Incoherent("unknown requirer type"))?;
                let prov_ty = universe
                    .get(type_of[provider.as_str()])
                    .ok_or(BindingError::Incoherent("unknown provider type"))?;
                if !req_ty.requires(p) || !prov_ty.provides.contains_key(p) {
                    return Err(BindingError::Incoherent("binding side condition violated"));
                }
                bindings.insert(Binding::new(p.clone(), requirer.clone(), provider.clone()));
            }
            _ => return Err(BindingError::Incoherent("non-boolean binding variable")),
        }
    }
    Ok(BindingPlan { bindings })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BindingError {
    #[error("instance references unknown type {0}")]
    UnknownType(TypeName),
    #[error("incoherent solver assignment: {0}")]
    Incoherent(&'static str),
}
