//! JSON file formats for universes, node pools, configurations, deployment
//! plans, and weighted binding metrics.
//!
//! Universe files are arrays of type objects. Port maps accept either
//! `{"iface": arity}` or a bare list `["iface"]`; omitted arities default to
//! unbounded for provided interfaces and 1 for required ones. A provided
//! arity may be the string `"inf"`. Node entries carry an optional `count`
//! that expands `name` into `name#1 .. name#k`.
//!
//! Plan files embed a hash of the universe they were computed against so a
//! later `check` run can detect mismatched inputs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::binding::BindingMetric;
use crate::model::{
    Action, Arity, Binding, Configuration, DeploymentPlan, InstanceInfo, MicroserviceType, Node,
    NodePool, Universe,
};
use crate::solver::Sense;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum ArityJson {
    Number(u64),
    Word(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum PortsJson {
    Map(BTreeMap<String, ArityJson>),
    List(Vec<String>),
}

impl Default for PortsJson {
    fn default() -> Self {
        PortsJson::List(Vec::new())
    }
}

#[derive(Debug, Clone, Deserialize)]
struct TypeJson {
    name: String,
    #[serde(default)]
    provides: PortsJson,
    #[serde(default)]
    strong: PortsJson,
    #[serde(default)]
    weak: PortsJson,
    #[serde(default)]
    conflicts: Vec<String>,
    #[serde(default)]
    resources: BTreeMap<String, u64>,
}

fn provides_from(ports: PortsJson) -> Result<BTreeMap<String, Arity>, FormatError> {
    match ports {
        PortsJson::List(names) => Ok(names.into_iter().map(|n| (n, Arity::Infinite)).collect()),
        PortsJson::Map(map) => map
            .into_iter()
            .map(|(name, arity)| {
                let arity = match arity {
                    ArityJson::Number(n) => Arity::Finite(n),
                    ArityJson::Word(w) if w == "inf" => Arity::Infinite,
                    ArityJson::Word(w) => {
                        return Err(FormatError::BadArity {
                            interface: name.clone(),
                            got: w,
                        })
                    }
                };
                Ok((name, arity))
            })
            .collect(),
    }
}

fn requires_from(ports: PortsJson) -> Result<BTreeMap<String, u64>, FormatError> {
    match ports {
        PortsJson::List(names) => Ok(names.into_iter().map(|n| (n, 1)).collect()),
        PortsJson::Map(map) => map
            .into_iter()
            .map(|(name, arity)| match arity {
                ArityJson::Number(n) => Ok((name, n)),
                ArityJson::Word(w) => Err(FormatError::BadArity {
                    interface: name.clone(),
                    got: w,
                }),
            })
            .collect(),
    }
}

pub fn parse_universe(text: &str) -> Result<Universe, FormatError> {
    let entries: Vec<TypeJson> = serde_json::from_str(text)?;
    let mut types = Vec::with_capacity(entries.len());
    for entry in entries {
        types.push(MicroserviceType {
            name: entry.name,
            provides: provides_from(entry.provides)?,
            strong_requires: requires_from(entry.strong)?,
            weak_requires: requires_from(entry.weak)?,
            conflicts: entry.conflicts.into_iter().collect(),
            resources: entry.resources,
        });
    }
    Universe::new(types).map_err(FormatError::Model)
}

#[derive(Debug, Clone, Serialize)]
struct TypeJsonOut<'a> {
    name: &'a str,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    provides: BTreeMap<&'a str, ArityJson>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    strong: BTreeMap<&'a str, u64>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    weak: BTreeMap<&'a str, u64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    conflicts: Vec<&'a str>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    resources: BTreeMap<&'a str, u64>,
}

pub fn serialize_universe(universe: &Universe) -> String {
    let entries: Vec<TypeJsonOut> = universe
        .types()
        .map(|ty| TypeJsonOut {
            name: &ty.name,
            provides: ty
                .provides
                .iter()
                .map(|(p, a)| {
                    let arity = match a {
                        Arity::Finite(n) => ArityJson::Number(*n),
                        Arity::Infinite => ArityJson::Word("inf".to_string()),
                    };
                    (p.as_str(), arity)
                })
                .collect(),
            strong: ty.strong_requires.iter().map(|(p, a)| (p.as_str(), *a)).collect(),
            weak: ty.weak_requires.iter().map(|(p, a)| (p.as_str(), *a)).collect(),
            conflicts: ty.conflicts.iter().map(|s| s.as_str()).collect(),
            resources: ty.resources.iter().map(|(r, a)| (r.as_str(), *a)).collect(),
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("serialization cannot fail")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct NodeJson {
    name: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    resources: BTreeMap<String, u64>,
    cost: u64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    count: u64,
}

fn one() -> u64 {
    1
}

fn is_one(n: &u64) -> bool {
    *n == 1
}

pub fn parse_nodes(text: &str) -> Result<NodePool, FormatError> {
    let entries: Vec<NodeJson> = serde_json::from_str(text)?;
    let mut nodes = Vec::new();
    for entry in entries {
        if entry.count == 0 {
            return Err(FormatError::ZeroCount(entry.name));
        }
        if entry.count == 1 {
            nodes.push(Node {
                name: entry.name,
                resources: entry.resources,
                cost: entry.cost,
            });
        } else {
            for k in 1..=entry.count {
                nodes.push(Node {
                    name: format!("{}#{k}", entry.name),
                    resources: entry.resources.clone(),
                    cost: entry.cost,
                });
            }
        }
    }
    NodePool::new(nodes).map_err(FormatError::Model)
}

pub fn serialize_nodes(pool: &NodePool) -> String {
    let entries: Vec<NodeJson> = pool
        .nodes()
        .map(|n| NodeJson {
            name: n.name.clone(),
            resources: n.resources.clone(),
            cost: n.cost,
            count: 1,
        })
        .collect();
    serde_json::to_string_pretty(&entries).expect("serialization cannot fail")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct InstanceJson {
    id: String,
    #[serde(rename = "type")]
    type_name: String,
    node: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct BindingJson {
    interface: String,
    requirer: String,
    provider: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ConfigurationJson {
    #[serde(default)]
    instances: Vec<InstanceJson>,
    #[serde(default)]
    bindings: Vec<BindingJson>,
}

pub fn parse_configuration(text: &str) -> Result<Configuration, FormatError> {
    let parsed: ConfigurationJson = serde_json::from_str(text)?;
    Configuration::from_parts(
        parsed.instances.into_iter().map(|i| {
            (
                i.id,
                InstanceInfo {
                    type_name: i.type_name,
                    node: i.node,
                },
            )
        }),
        parsed
            .bindings
            .into_iter()
            .map(|b| Binding::new(b.interface, b.requirer, b.provider)),
    )
    .map_err(FormatError::Model)
}

pub fn serialize_configuration(config: &Configuration) -> String {
    let parsed = ConfigurationJson {
        instances: config
            .instances()
            .map(|(id, info)| InstanceJson {
                id: id.clone(),
                type_name: info.type_name.clone(),
                node: info.node.clone(),
            })
            .collect(),
        bindings: config
            .bindings()
            .map(|b| BindingJson {
                interface: b.interface.clone(),
                requirer: b.requirer.clone(),
                provider: b.provider.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&parsed).expect("serialization cannot fail")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum ActionJson {
    New {
        id: String,
        #[serde(rename = "type")]
        type_name: String,
        node: String,
        #[serde(default)]
        strong_bindings: BTreeMap<String, BTreeSet<String>>,
    },
    Bind {
        interface: String,
        requirer: String,
        provider: String,
    },
    Unbind {
        interface: String,
        requirer: String,
        provider: String,
    },
    Del {
        id: String,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PlanJson {
    universe_hash: String,
    actions: Vec<ActionJson>,
}

/// A stable fingerprint of a universe, embedded in plan files so `check`
/// can reject plans replayed against different inputs.
pub fn universe_hash(universe: &Universe) -> String {
    // FNV-1a, 64 bit, over the canonical serialized form.
    let mut hash: u64 = 0xcbf29ce484222325;
    for byte in serialize_universe(universe).bytes() {
        hash ^= byte as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    format!("{hash:016x}")
}

pub fn serialize_plan(plan: &DeploymentPlan, universe: &Universe) -> String {
    let actions = plan
        .actions
        .iter()
        .map(|a| match a {
            Action::New {
                instance,
                type_name,
                node,
                strong_bindings,
            } => ActionJson::New {
                id: instance.clone(),
                type_name: type_name.clone(),
                node: node.clone(),
                strong_bindings: strong_bindings.clone(),
            },
            Action::Bind {
                interface,
                requirer,
                provider,
            } => ActionJson::Bind {
                interface: interface.clone(),
                requirer: requirer.clone(),
                provider: provider.clone(),
            },
            Action::Unbind {
                interface,
                requirer,
                provider,
            } => ActionJson::Unbind {
                interface: interface.clone(),
                requirer: requirer.clone(),
                provider: provider.clone(),
            },
            Action::Del { instance } => ActionJson::Del {
                id: instance.clone(),
            },
        })
        .collect();
    let plan = PlanJson {
        universe_hash: universe_hash(universe),
        actions,
    };
    serde_json::to_string_pretty(&plan).expect("serialization cannot fail")
}

/// Parses a plan file, verifying it was computed against `universe`.
pub fn parse_plan(text: &str, universe: &Universe) -> Result<DeploymentPlan, FormatError> {
    let parsed: PlanJson = serde_json::from_str(text)?;
    let expected = universe_hash(universe);
    if parsed.universe_hash != expected {
        return Err(FormatError::UniverseHashMismatch {
            expected,
            found: parsed.universe_hash,
        });
    }
    let actions = parsed
        .actions
        .into_iter()
        .map(|a| match a {
            ActionJson::New {
                id,
                type_name,
                node,
                strong_bindings,
            } => Action::New {
                instance: id,
                type_name,
                node,
                strong_bindings,
            },
            ActionJson::Bind {
                interface,
                requirer,
                provider,
            } => Action::Bind {
                interface,
                requirer,
                provider,
            },
            ActionJson::Unbind {
                interface,
                requirer,
                provider,
            } => Action::Unbind {
                interface,
                requirer,
                provider,
            },
            ActionJson::Del { id } => Action::Del { instance: id },
        })
        .collect();
    Ok(DeploymentPlan { actions })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct WeightJson {
    interface: String,
    requirer: String,
    provider: String,
    weight: i64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MetricJson {
    sense: String,
    weights: Vec<WeightJson>,
}

/// Parses a weighted-metric file: `{"sense": "minimize" | "maximize",
/// "weights": [{"interface", "requirer", "provider", "weight"}]}`.
pub fn parse_metric_file(text: &str) -> Result<BindingMetric, FormatError> {
    let parsed: MetricJson = serde_json::from_str(text)?;
    let sense = match parsed.sense.as_str() {
        "minimize" => Sense::Minimize,
        "maximize" => Sense::Maximize,
        other => {
            return Err(FormatError::BadSense(other.to_string()));
        }
    };
    let weights = parsed
        .weights
        .into_iter()
        .map(|w| ((w.interface, w.requirer, w.provider), w.weight))
        .collect();
    Ok(BindingMetric::Weighted { weights, sense })
}

pub fn serialize_metric(metric: &BindingMetric) -> Result<String, FormatError> {
    let BindingMetric::Weighted { weights, sense } = metric else {
        return Err(FormatError::NotWeighted);
    };
    let parsed = MetricJson {
        sense: match sense {
            Sense::Minimize => "minimize".to_string(),
            Sense::Maximize => "maximize".to_string(),
        },
        weights: weights
            .iter()
            .map(|((interface, requirer, provider), weight)| WeightJson {
                interface: interface.clone(),
                requirer: requirer.clone(),
                provider: provider.clone(),
                weight: *weight,
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&parsed).expect("serialization cannot fail"))
}

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Model(#[from] crate::model::ModelError),
    #[error("interface {interface}: arity must be a number or \"inf\", got {got:?}")]
    BadArity { interface: String, got: String },
    #[error("node {0}: count must be >= 1")]
    ZeroCount(String),
    #[error("plan was computed for a different universe (hash {found}, expected {expected})")]
    UniverseHashMismatch { expected: String, found: String },
    #[error("metric sense must be \"minimize\" or \"maximize\", got {0:?}")]
    BadSense(String),
    #[error("only weighted metrics have a file form")]
    NotWeighted,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn arity_defaults_apply() {
        let text = r#"[
            {"name": "A", "provides": ["p"], "weak": ["q"], "resources": {"cpu": 1}},
            {"name": "B", "provides": {"q": 2}, "strong": {"p": 1}, "resources": {"cpu": 1}}
        ]"#;
        let u = parse_universe(text).unwrap();
        assert_eq!(u.get("A").unwrap().provides["p"], Arity::Infinite);
        assert_eq!(u.get("A").unwrap().weak_requires["q"], 1);
        assert_eq!(u.get("B").unwrap().provides["q"], Arity::Finite(2));
    }

    #[test]
    fn node_count_expands_names() {
        let text = r#"[
            {"name": "large", "resources": {"cpu": 2}, "cost": 100, "count": 3},
            {"name": "single", "resources": {"cpu": 1}, "cost": 7}
        ]"#;
        let pool = parse_nodes(text).unwrap();
        let names: Vec<&str> = pool.nodes().map(|n| n.name.as_str()).collect();
        assert_eq!(names, vec!["large#1", "large#2", "large#3", "single"]);
    }

    #[test]
    fn plan_hash_mismatch_is_detected() {
        let u1 = parse_universe(r#"[{"name": "A", "resources": {"cpu": 1}}]"#).unwrap();
        let u2 = parse_universe(r#"[{"name": "B", "resources": {"cpu": 1}}]"#).unwrap();
        let plan = DeploymentPlan::default();
        let text = serialize_plan(&plan, &u1);
        assert!(parse_plan(&text, &u1).is_ok());
        assert!(matches!(
            parse_plan(&text, &u2),
            Err(FormatError::UniverseHashMismatch { .. })
        ));
    }

    fn ident() -> impl Strategy<Value = String> {
        "[a-z][a-z0-9_]{0,6}".prop_map(|s| s)
    }

    fn arb_universe() -> impl Strategy<Value = Universe> {
        let arb_type = (
            ident(),
            proptest::collection::btree_map(ident(), proptest::option::of(1u64..5), 0..3),
            proptest::collection::btree_map(ident(), 1u64..3, 0..2),
            proptest::collection::btree_map(ident(), 0u64..3, 0..2),
            proptest::collection::btree_map(ident(), 0u64..9, 0..3),
        );
        proptest::collection::btree_map(ident(), arb_type, 0..4).prop_map(|types| {
            let mut out = Vec::new();
            for (name, (_, provides, strong, weak, resources)) in types {
                let provides = provides
                    .into_iter()
                    .map(|(p, a)| (p, a.map(Arity::Finite).unwrap_or(Arity::Infinite)))
                    .collect();
                // Keep the required-port domains disjoint.
                let weak: BTreeMap<String, u64> = weak
                    .into_iter()
                    .filter(|(p, _)| !strong.contains_key(p))
                    .collect();
                out.push(MicroserviceType {
                    name,
                    provides,
                    strong_requires: strong,
                    weak_requires: weak,
                    conflicts: BTreeSet::new(),
                    resources,
                });
            }
            Universe::new(out).expect("generated types are valid")
        })
    }

    proptest! {
        #[test]
        fn universe_round_trips(u in arb_universe()) {
            let text = serialize_universe(&u);
            let parsed = parse_universe(&text).unwrap();
            prop_assert_eq!(parsed, u);
        }

        #[test]
        fn nodes_round_trip(
            entries in proptest::collection::btree_map(
                ident(),
                (proptest::collection::btree_map(ident(), 0u64..9, 0..3), 0u64..999),
                0..5,
            )
        ) {
            let pool = NodePool::new(entries.into_iter().map(|(name, (resources, cost))| Node {
                name,
                resources,
                cost,
            })).unwrap();
            let text = serialize_nodes(&pool);
            let parsed = parse_nodes(&text).unwrap();
            prop_assert_eq!(parsed, pool);
        }
    }

    #[test]
    fn configuration_and_plan_round_trip() {
        let u = parse_universe(
            r#"[
                {"name": "A", "weak": {"p": 1}, "resources": {"cpu": 1}},
                {"name": "B", "provides": {"p": 2}, "resources": {"cpu": 1}}
            ]"#,
        )
        .unwrap();
        let config = Configuration::from_parts(
            [
                (
                    "a1".to_string(),
                    InstanceInfo {
                        type_name: "A".into(),
                        node: "n1".into(),
                    },
                ),
                (
                    "b1".to_string(),
                    InstanceInfo {
                        type_name: "B".into(),
                        node: "n1".into(),
                    },
                ),
            ],
            [Binding::new("p", "a1", "b1")],
        )
        .unwrap();
        let parsed = parse_configuration(&serialize_configuration(&config)).unwrap();
        assert_eq!(parsed, config);

        let plan = DeploymentPlan {
            actions: vec![
                Action::New {
                    instance: "b1".into(),
                    type_name: "B".into(),
                    node: "n1".into(),
                    strong_bindings: BTreeMap::new(),
                },
                Action::New {
                    instance: "a1".into(),
                    type_name: "A".into(),
                    node: "n1".into(),
                    strong_bindings: BTreeMap::new(),
                },
                Action::Bind {
                    interface: "p".into(),
                    requirer: "a1".into(),
                    provider: "b1".into(),
                },
                Action::Unbind {
                    interface: "p".into(),
                    requirer: "a1".into(),
                    provider: "b1".into(),
                },
                Action::Del { instance: "a1".into() },
            ],
        };
        let text = serialize_plan(&plan, &u);
        let parsed = parse_plan(&text, &u).unwrap();
        assert_eq!(parsed, plan);
    }

    #[test]
    fn weighted_metric_round_trips() {
        let metric = BindingMetric::Weighted {
            weights: [
                (("p".to_string(), "A".to_string(), "B".to_string()), 3),
                (("p".to_string(), "A".to_string(), "C".to_string()), -2),
            ]
            .into(),
            sense: Sense::Minimize,
        };
        let text = serialize_metric(&metric).unwrap();
        let parsed = parse_metric_file(&text).unwrap();
        assert_eq!(parsed, metric);
    }
}
