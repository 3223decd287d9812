//! Problem generators: two reduction gadgets that stress the optimizer shapes
//! (bin packing into the placement stage, number partitioning into the
//! weighted binding metric) and a seeded random generator for property tests.

use std::collections::BTreeMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::binding::{self, BindingMetric, PlacedInstance};
use crate::model::{Arity, MicroserviceType, Node, NodePool, TypeName, Universe};
use crate::solver::{self, LinearConstraint, Relation, Sense};

/// A generated problem: inputs plus the options a planning run needs.
#[derive(Debug, Clone)]
pub struct GeneratedProblem {
    pub universe: Universe,
    pub pool: NodePool,
    pub target: TypeName,
    pub metric: BindingMetric,
    /// Instance-bound overrides required by zero-consumption types.
    pub bounds: BTreeMap<TypeName, u64>,
}

/// Encodes a number-partition question over the binding metric: one singleton
/// type per element providing `p` and `q` with capacity 1, two set types that
/// weakly require `p` with arity 0 and provide `q`, and a collector that
/// strongly requires one `q` from everyone, forcing full deployment. The
/// weighted metric scores a connection between set A and element k as `+k`
/// and between set B and element k as `-k`; an assignment summing to zero is
/// a perfect split.
pub fn partition_problem(elements: &[u64]) -> Result<GeneratedProblem, GenerateError> {
    if elements.is_empty() {
        return Err(GenerateError::EmptyElements);
    }
    let n = elements.len() as u64;
    let mut types = Vec::new();
    let singleton = |name: &str,
                     provides: BTreeMap<String, Arity>,
                     strong: BTreeMap<String, u64>,
                     weak: BTreeMap<String, u64>| {
        let marker = format!("only_{name}");
        let mut provides = provides;
        provides.insert(marker.clone(), Arity::Infinite);
        MicroserviceType {
            name: name.to_string(),
            provides,
            strong_requires: strong,
            weak_requires: weak,
            conflicts: [marker].into(),
            resources: [("unit".to_string(), 1)].into(),
        }
    };

    let mut weights: BTreeMap<(String, String, String), i64> = BTreeMap::new();
    for (index, value) in elements.iter().enumerate() {
        let name = format!("Item{}", index + 1);
        types.push(singleton(
            &name,
            [
                ("p".to_string(), Arity::Finite(1)),
                ("q".to_string(), Arity::Finite(1)),
            ]
            .into(),
            BTreeMap::new(),
            BTreeMap::new(),
        ));
        weights.insert(
            ("p".to_string(), "SetA".to_string(), name.clone()),
            *value as i64,
        );
        weights.insert(
            ("p".to_string(), "SetB".to_string(), name),
            -(*value as i64),
        );
    }
    for set in ["SetA", "SetB"] {
        types.push(singleton(
            set,
            [("q".to_string(), Arity::Finite(1))].into(),
            BTreeMap::new(),
            [("p".to_string(), 0)].into(),
        ));
    }
    types.push(singleton(
        "Collector",
        BTreeMap::new(),
        [("q".to_string(), n + 2)].into(),
        BTreeMap::new(),
    ));

    let universe = Universe::new(types).expect("gadget types are valid");
    let pool = NodePool::new([Node {
        name: "arena".to_string(),
        resources: [("unit".to_string(), n + 3)].into(),
        cost: 1,
    }])
    .expect("single node");

    Ok(GeneratedProblem {
        universe,
        pool,
        target: "Collector".to_string(),
        metric: BindingMetric::Weighted {
            weights,
            sense: Sense::Minimize,
        },
        bounds: BTreeMap::new(),
    })
}

/// Evaluates the partition gadget: the minimum of |weighted objective| over
/// all complete assignments of elements to the two sets. Each element's `p`
/// capacity of 1 keeps the sets exclusive; an explicit coverage constraint
/// per element makes the assignment total, matching the enumeration the
/// gadget encodes.
pub fn partition_min_abs_objective(elements: &[u64]) -> Result<u64, GenerateError> {
    let problem = partition_problem(elements)?;
    let u = &problem.universe;
    let instances: Vec<PlacedInstance> = u
        .types()
        .map(|ty| PlacedInstance {
            id: format!("{}#1", ty.name),
            type_name: ty.name.clone(),
            node: "arena".to_string(),
        })
        .collect();

    let solve_side = |clamp: Relation| -> Result<Option<u64>, GenerateError> {
        let (mut model, vars) = binding::encode(&instances, u, &problem.metric)
            .map_err(|e| GenerateError::Internal(e.to_string()))?;
        for (index, _) in elements.iter().enumerate() {
            let item = format!("Item{}#1", index + 1);
            let terms: Vec<(i64, solver::VarId)> = ["SetA#1", "SetB#1"]
                .iter()
                .filter_map(|set| {
                    vars.b
                        .get(&("p".to_string(), set.to_string(), item.clone()))
                        .map(|v| (1, *v))
                })
                .collect();
            model.add_linear(LinearConstraint::new(terms, Relation::Ge, 1));
        }
        let objective_terms = model.objective.terms.clone();
        model.add_linear(LinearConstraint::new(objective_terms.clone(), clamp, 0));
        model.set_objective(solver::Objective {
            sense: match clamp {
                Relation::Ge => Sense::Minimize,
                _ => Sense::Maximize,
            },
            terms: objective_terms,
        });
        let out = solver::solve(&model, &solver::Budget::unlimited())
            .map_err(|e| GenerateError::Internal(e.to_string()))?;
        Ok(out.objective_value.map(|v| v.unsigned_abs()))
    };

    let nonnegative = solve_side(Relation::Ge)?;
    let nonpositive = solve_side(Relation::Le)?;
    [nonnegative, nonpositive]
        .into_iter()
        .flatten()
        .min()
        .ok_or(GenerateError::Internal(
            "both clamped sides infeasible".to_string(),
        ))
}

/// Encodes bin packing: one type per item whose size is its resource demand,
/// uniform unit-cost nodes of the bin capacity, and a weightless dummy target
/// that strongly requires every item once. Minimizing node cost is minimizing
/// bins. The dummy consumes nothing, so the returned bounds pin it to one
/// instance.
pub fn binpack_problem(sizes: &[u64], capacity: u64) -> Result<GeneratedProblem, GenerateError> {
    if sizes.is_empty() {
        return Err(GenerateError::EmptyElements);
    }
    if capacity == 0 {
        return Err(GenerateError::ZeroCapacity);
    }
    let mut types = Vec::new();
    let mut packer_needs = BTreeMap::new();
    for (index, size) in sizes.iter().enumerate() {
        let interface = format!("item_{}", index + 1);
        types.push(MicroserviceType {
            name: format!("Item{}", index + 1),
            provides: [(interface.clone(), Arity::Infinite)].into(),
            strong_requires: BTreeMap::new(),
            weak_requires: BTreeMap::new(),
            conflicts: Default::default(),
            resources: [("size".to_string(), *size)].into(),
        });
        packer_needs.insert(interface, 1);
    }
    types.push(MicroserviceType {
        name: "Packer".to_string(),
        provides: BTreeMap::new(),
        strong_requires: packer_needs,
        weak_requires: BTreeMap::new(),
        conflicts: Default::default(),
        resources: BTreeMap::new(),
    });
    let universe = Universe::new(types).expect("gadget types are valid");
    let nodes: Vec<Node> = (1..=sizes.len())
        .map(|k| Node {
            name: format!("bin#{k}"),
            resources: [("size".to_string(), capacity)].into(),
            cost: 1,
        })
        .collect();
    let pool = NodePool::new(nodes).expect("bin names are unique");
    Ok(GeneratedProblem {
        universe,
        pool,
        target: "Packer".to_string(),
        metric: BindingMetric::None,
        bounds: [("Packer".to_string(), 1)].into(),
    })
}

/// Seeded random instances for property tests: strong dependencies only point
/// at types created earlier, so the universe is always well-formed; every
/// type consumes at least one unit of the first resource, so bounds derive
/// without overrides. Solvability is likely but not guaranteed.
pub fn random_problem(seed: u64, max_types: usize, max_nodes: usize) -> GeneratedProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_types = rng.random_range(2..=max_types.max(2));
    let n_nodes = rng.random_range(1..=max_nodes.max(1));
    let n_ifaces = rng.random_range(2..=4);
    let ifaces: Vec<String> = (0..n_ifaces).map(|i| format!("p{i}")).collect();

    let mut types: Vec<MicroserviceType> = Vec::new();
    let mut providable: Vec<String> = Vec::new();
    // Interfaces someone already strongly requires; later types must not
    // provide them, or the strong dependency graph could close a cycle.
    let mut locked: std::collections::BTreeSet<String> = Default::default();
    for index in 0..n_types {
        let mut provides = BTreeMap::new();
        for iface in &ifaces {
            if !locked.contains(iface) && rng.random_bool(0.5) {
                let arity = if rng.random_bool(0.25) {
                    Arity::Infinite
                } else {
                    Arity::Finite(rng.random_range(1..=3))
                };
                provides.insert(iface.clone(), arity);
            }
        }
        let mut strong_requires = BTreeMap::new();
        for iface in &providable {
            if !provides.contains_key(iface) && rng.random_bool(0.35) {
                strong_requires.insert(iface.clone(), rng.random_range(1..=2));
            }
        }
        locked.extend(strong_requires.keys().cloned());
        let mut weak_requires = BTreeMap::new();
        for iface in &ifaces {
            if !strong_requires.contains_key(iface) && rng.random_bool(0.3) {
                weak_requires.insert(iface.clone(), rng.random_range(0..=2));
            }
        }
        let mut conflicts = std::collections::BTreeSet::new();
        if rng.random_bool(0.1) {
            let candidates: Vec<&String> = ifaces
                .iter()
                .filter(|i| !strong_requires.contains_key(*i) && !weak_requires.contains_key(*i))
                .collect();
            if !candidates.is_empty() {
                conflicts.insert(candidates[rng.random_range(0..candidates.len())].clone());
            }
        }
        let mut resources = BTreeMap::new();
        resources.insert("r0".to_string(), rng.random_range(1..=3));
        if rng.random_bool(0.5) {
            resources.insert("r1".to_string(), rng.random_range(0..=2));
        }
        // New provided interfaces become available to later types only after
        // the type is pushed, keeping the strong graph acyclic.
        for iface in provides.keys() {
            if !providable.contains(iface) {
                providable.push(iface.clone());
            }
        }
        types.push(MicroserviceType {
            name: format!("t{index}"),
            provides,
            strong_requires,
            weak_requires,
            conflicts,
            resources,
        });
    }
    let target = format!("t{}", rng.random_range(0..n_types));
    let universe = Universe::new(types).expect("generated types are valid");
    debug_assert!(universe.check_well_formed().is_ok());

    let nodes: Vec<Node> = (0..n_nodes)
        .map(|k| {
            let mut resources = BTreeMap::new();
            resources.insert("r0".to_string(), rng.random_range(2..=8));
            if rng.random_bool(0.7) {
                resources.insert("r1".to_string(), rng.random_range(0..=6));
            }
            Node {
                name: format!("n{k}"),
                resources,
                cost: rng.random_range(1..=100),
            }
        })
        .collect();
    let pool = NodePool::new(nodes).expect("generated nodes are valid");

    GeneratedProblem {
        universe,
        pool,
        target,
        metric: BindingMetric::None,
        bounds: BTreeMap::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenerateError {
    #[error("the element set must be non-empty")]
    EmptyElements,
    #[error("bin capacity must be >= 1")]
    ZeroCapacity,
    #[error("internal: {0}")]
    Internal(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_gadget_shape() {
        let problem = partition_problem(&[1, 2, 3]).unwrap();
        assert_eq!(problem.universe.len(), 6);
        problem.universe.check_well_formed().unwrap();
        let collector = problem.universe.get("Collector").unwrap();
        assert_eq!(collector.strong_requires["q"], 5);
    }

    #[test]
    fn partition_even_split_reaches_zero() {
        // {1,2} vs {3}.
        assert_eq!(partition_min_abs_objective(&[1, 2, 3]).unwrap(), 0);
    }

    #[test]
    fn partition_odd_total_bottoms_at_one() {
        assert_eq!(partition_min_abs_objective(&[1, 1, 1]).unwrap(), 1);
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert_eq!(
            partition_problem(&[]).unwrap_err(),
            GenerateError::EmptyElements
        );
        assert_eq!(
            binpack_problem(&[], 5).unwrap_err(),
            GenerateError::EmptyElements
        );
        assert_eq!(
            binpack_problem(&[3], 0).unwrap_err(),
            GenerateError::ZeroCapacity
        );
    }

    #[test]
    fn binpack_gadget_shape() {
        let problem = binpack_problem(&[3, 3, 3], 6).unwrap();
        assert_eq!(problem.universe.len(), 4);
        assert_eq!(problem.pool.len(), 3);
        assert_eq!(problem.bounds["Packer"], 1);
    }

    #[test]
    fn random_problems_are_reproducible_and_well_formed() {
        for seed in 0..20 {
            let a = random_problem(seed, 4, 6);
            let b = random_problem(seed, 4, 6);
            assert_eq!(a.universe, b.universe);
            assert_eq!(a.pool, b.pool);
            assert_eq!(a.target, b.target);
            a.universe.check_well_formed().unwrap();
        }
    }
}
