//! The formal deployment model: microservice types, nodes, configurations,
//! reconfiguration actions, and the correctness checks over them.
//!
//! A [`MicroserviceType`] declares provided interfaces (with a capacity on
//! incoming bindings), strong required interfaces (must be bound at creation),
//! weak required interfaces (may be bound later, must hold in the final
//! configuration), conflicting interfaces, and resource consumption. A
//! [`Configuration`] is the runtime state: instances, their types and hosting
//! nodes, and the bindings between them. [`Configuration::apply`] implements
//! the four-action transition semantics (`bind`, `unbind`, `new`, `del`).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub type InterfaceName = String;
pub type TypeName = String;
pub type NodeName = String;
pub type InstanceId = String;
pub type ResourceName = String;

/// Capacity of a provided interface: how many distinct requirers may bind to
/// one instance's port.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Arity {
    Finite(u64),
    Infinite,
}

impl Arity {
    pub fn is_finite(self) -> bool {
        matches!(self, Arity::Finite(_))
    }

    /// Capacity as a count, treating `Infinite` as `limit`.
    pub fn capped(self, limit: u64) -> u64 {
        match self {
            Arity::Finite(n) => n.min(limit),
            Arity::Infinite => limit,
        }
    }
}

impl fmt::Display for Arity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arity::Finite(n) => write!(f, "{n}"),
            Arity::Infinite => write!(f, "inf"),
        }
    }
}

/// A microservice template: what it offers, what it needs, what it excludes,
/// and what it consumes.
///
/// Absent resource keys mean consumption 0, so sparse maps behave as total
/// functions over resource kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MicroserviceType {
    pub name: TypeName,
    /// Provided interfaces with the maximum number of incoming bindings each
    /// instance accepts.
    pub provides: BTreeMap<InterfaceName, Arity>,
    /// Interfaces that must be bound when an instance is created, with the
    /// minimum number of distinct providers (>= 1).
    pub strong_requires: BTreeMap<InterfaceName, u64>,
    /// Interfaces that may be bound after creation, with the minimum number of
    /// distinct providers required in a correct configuration (0 is legal).
    pub weak_requires: BTreeMap<InterfaceName, u64>,
    /// Interfaces no *other* instance may provide while an instance of this
    /// type is deployed.
    pub conflicts: BTreeSet<InterfaceName>,
    /// Resource consumption per resource kind; absent kinds consume 0.
    pub resources: BTreeMap<ResourceName, u64>,
}

impl MicroserviceType {
    /// Consumption of resource `r` (0 when absent).
    pub fn resource(&self, r: &str) -> u64 {
        self.resources.get(r).copied().unwrap_or(0)
    }

    /// True if `p` is required, strongly or weakly.
    pub fn requires(&self, p: &str) -> bool {
        self.strong_requires.contains_key(p) || self.weak_requires.contains_key(p)
    }

    pub fn provided_arity(&self, p: &str) -> Option<Arity> {
        self.provides.get(p).copied()
    }

    fn validate(&self) -> Result<(), ModelError> {
        if self.name.is_empty() {
            return Err(ModelError::EmptyName);
        }
        for (p, arity) in &self.provides {
            if *arity == Arity::Finite(0) {
                return Err(ModelError::BadArity {
                    type_name: self.name.clone(),
                    interface: p.clone(),
                    reason: "provided arity must be >= 1 or infinite",
                });
            }
        }
        for (p, arity) in &self.strong_requires {
            if *arity == 0 {
                return Err(ModelError::BadArity {
                    type_name: self.name.clone(),
                    interface: p.clone(),
                    reason: "strong required arity must be >= 1",
                });
            }
            if self.weak_requires.contains_key(p) || self.conflicts.contains(p) {
                return Err(ModelError::OverlappingPorts {
                    type_name: self.name.clone(),
                    interface: p.clone(),
                });
            }
        }
        for p in self.weak_requires.keys() {
            if self.conflicts.contains(p) {
                return Err(ModelError::OverlappingPorts {
                    type_name: self.name.clone(),
                    interface: p.clone(),
                });
            }
        }
        Ok(())
    }
}

/// A computation unit with per-resource capacities and a cost, paid once if it
/// hosts at least one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub name: NodeName,
    pub resources: BTreeMap<ResourceName, u64>,
    pub cost: u64,
}

impl Node {
    /// Capacity for resource `r` (0 when absent).
    pub fn capacity(&self, r: &str) -> u64 {
        self.resources.get(r).copied().unwrap_or(0)
    }
}

/// The pool of available nodes, keyed by unique name.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NodePool {
    nodes: BTreeMap<NodeName, Node>,
}

impl NodePool {
    pub fn new(nodes: impl IntoIterator<Item = Node>) -> Result<Self, ModelError> {
        let mut map = BTreeMap::new();
        for node in nodes {
            if node.name.is_empty() {
                return Err(ModelError::EmptyName);
            }
            let name = node.name.clone();
            if map.insert(name.clone(), node).is_some() {
                return Err(ModelError::DuplicateNode(name));
            }
        }
        Ok(NodePool { nodes: map })
    }

    pub fn get(&self, name: &str) -> Option<&Node> {
        self.nodes.get(name)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> {
        self.nodes.values()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// A finite set of microservice types, keyed by unique name.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Universe {
    types: BTreeMap<TypeName, MicroserviceType>,
}

impl Universe {
    pub fn new(types: impl IntoIterator<Item = MicroserviceType>) -> Result<Self, ModelError> {
        let mut map = BTreeMap::new();
        for ty in types {
            ty.validate()?;
            let name = ty.name.clone();
            if map.insert(name.clone(), ty).is_some() {
                return Err(ModelError::DuplicateType(name));
            }
        }
        Ok(Universe { types: map })
    }

    pub fn get(&self, name: &str) -> Option<&MicroserviceType> {
        self.types.get(name)
    }

    pub fn types(&self) -> impl Iterator<Item = &MicroserviceType> {
        self.types.values()
    }

    pub fn len(&self) -> usize {
        self.types.len()
    }

    pub fn is_empty(&self) -> bool {
        self.types.is_empty()
    }

    /// Every interface mentioned by any type: provided, required (strong or
    /// weak), or conflicting.
    pub fn interfaces(&self) -> BTreeSet<InterfaceName> {
        let mut out = BTreeSet::new();
        for ty in self.types.values() {
            out.extend(ty.provides.keys().cloned());
            out.extend(ty.strong_requires.keys().cloned());
            out.extend(ty.weak_requires.keys().cloned());
            out.extend(ty.conflicts.iter().cloned());
        }
        out
    }

    /// Checks that the strong dependency graph is acyclic. The graph has an
    /// edge from `T` to `T'` whenever `T` strongly requires an interface that
    /// `T'` provides. Cycles through weak requirements remain deployable and
    /// are not reported.
    ///
    /// On failure returns one concrete cycle as an ordered list of type names.
    pub fn check_well_formed(&self) -> Result<(), ModelError> {
        // Edge list T -> successors, deterministic order.
        let mut succs: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
        for ty in self.types.values() {
            let mut out = Vec::new();
            for other in self.types.values() {
                if ty
                    .strong_requires
                    .keys()
                    .any(|p| other.provides.contains_key(p))
                {
                    out.push(other.name.as_str());
                }
            }
            succs.insert(ty.name.as_str(), out);
        }

        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            InProgress,
            Done,
        }
        let mut marks: BTreeMap<&str, Mark> = BTreeMap::new();
        let mut stack: Vec<&str> = Vec::new();

        fn visit<'a>(
            node: &'a str,
            succs: &BTreeMap<&'a str, Vec<&'a str>>,
            marks: &mut BTreeMap<&'a str, Mark>,
            stack: &mut Vec<&'a str>,
        ) -> Option<Vec<String>> {
            match marks.get(node) {
                Some(Mark::Done) => return None,
                Some(Mark::InProgress) => {
                    let start = stack.iter().position(|n| *n == node).unwrap();
                    return Some(stack[start..].iter().map(|s| s.to_string()).collect());
                }
                None => {}
            }
            marks.insert(node, Mark::InProgress);
            stack.push(node);
            for next in &succs[node] {
                if let Some(cycle) = visit(next, succs, marks, stack) {
                    return Some(cycle);
                }
            }
            stack.pop();
            marks.insert(node, Mark::Done);
            None
        }

        for name in self.types.keys() {
            if let Some(cycle) = visit(name.as_str(), &succs, &mut marks, &mut stack) {
                return Err(ModelError::StrongCycle { cycle });
            }
        }
        Ok(())
    }
}

/// A directed binding: `requirer` consumes interface `interface` provided by
/// `provider`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binding {
    pub interface: InterfaceName,
    pub requirer: InstanceId,
    pub provider: InstanceId,
}

impl Binding {
    pub fn new(
        interface: impl Into<InterfaceName>,
        requirer: impl Into<InstanceId>,
        provider: impl Into<InstanceId>,
    ) -> Self {
        Binding {
            interface: interface.into(),
            requirer: requirer.into(),
            provider: provider.into(),
        }
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.interface, self.requirer, self.provider)
    }
}

/// Type and placement of one deployed instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceInfo {
    pub type_name: TypeName,
    pub node: NodeName,
}

/// The runtime state of a deployment: instances with their types and hosting
/// nodes, plus the current bindings.
///
/// Values are immutable: [`Configuration::apply`] returns a new configuration
/// and never mutates its input.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Configuration {
    instances: BTreeMap<InstanceId, InstanceInfo>,
    bindings: BTreeSet<Binding>,
}

impl Configuration {
    pub fn empty() -> Self {
        Configuration::default()
    }

    /// Builds a configuration from explicit parts, checking the structural
    /// invariants: bindings reference existing, distinct instances.
    pub fn from_parts(
        instances: impl IntoIterator<Item = (InstanceId, InstanceInfo)>,
        bindings: impl IntoIterator<Item = Binding>,
    ) -> Result<Self, ModelError> {
        let mut inst_map = BTreeMap::new();
        for (id, info) in instances {
            if id.is_empty() {
                return Err(ModelError::EmptyName);
            }
            if inst_map.insert(id.clone(), info).is_some() {
                return Err(ModelError::DuplicateInstance(id));
            }
        }
        let mut set = BTreeSet::new();
        for b in bindings {
            if b.requirer == b.provider {
                return Err(ModelError::SelfBinding(b));
            }
            if !inst_map.contains_key(&b.requirer) {
                return Err(ModelError::UnknownInstance(b.requirer));
            }
            if !inst_map.contains_key(&b.provider) {
                return Err(ModelError::UnknownInstance(b.provider));
            }
            set.insert(b);
        }
        Ok(Configuration {
            instances: inst_map,
            bindings: set,
        })
    }

    pub fn instances(&self) -> impl Iterator<Item = (&InstanceId, &InstanceInfo)> {
        self.instances.iter()
    }

    pub fn instance(&self, id: &str) -> Option<&InstanceInfo> {
        self.instances.get(id)
    }

    pub fn contains_instance(&self, id: &str) -> bool {
        self.instances.contains_key(id)
    }

    pub fn bindings(&self) -> impl Iterator<Item = &Binding> {
        self.bindings.iter()
    }

    pub fn has_binding(&self, b: &Binding) -> bool {
        self.bindings.contains(b)
    }

    pub fn instance_count(&self) -> usize {
        self.instances.len()
    }

    pub fn binding_count(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// Cross-validates the configuration against a universe and node pool:
    /// every instance type and hosting node must exist, and every binding must
    /// satisfy the side condition (the interface is required by the requirer's
    /// type and provided by the provider's type).
    pub fn validate(&self, universe: &Universe, pool: &NodePool) -> Result<(), ModelError> {
        for (id, info) in &self.instances {
            if universe.get(&info.type_name).is_none() {
                return Err(ModelError::UnknownType {
                    instance: id.clone(),
                    type_name: info.type_name.clone(),
                });
            }
            if pool.get(&info.node).is_none() {
                return Err(ModelError::UnknownNode {
                    instance: id.clone(),
                    node: info.node.clone(),
                });
            }
        }
        for b in &self.bindings {
            let req_ty = universe
                .get(&self.instances[&b.requirer].type_name)
                .expect("validated above");
            let prov_ty = universe
                .get(&self.instances[&b.provider].type_name)
                .expect("validated above");
            if !req_ty.requires(&b.interface) || !prov_ty.provides.contains_key(&b.interface) {
                return Err(ModelError::IllegalBinding(b.clone()));
            }
        }
        Ok(())
    }

    /// The distinct nodes hosting at least one instance.
    pub fn used_nodes(&self) -> BTreeSet<NodeName> {
        self.instances.values().map(|i| i.node.clone()).collect()
    }

    /// Total cost of the configuration: the sum of costs of the distinct used
    /// nodes, each counted once regardless of how many instances it hosts.
    pub fn cost(&self, pool: &NodePool) -> Result<u64, ModelError> {
        let mut total = 0u64;
        for name in self.used_nodes() {
            let node = pool.get(&name).ok_or(ModelError::UnknownNode {
                instance: String::new(),
                node: name.clone(),
            })?;
            total += node.cost;
        }
        Ok(total)
    }

    fn outgoing(&self, id: &str, interface: &str) -> usize {
        self.bindings
            .iter()
            .filter(|b| b.requirer == id && b.interface == interface)
            .count()
    }

    fn incoming(&self, id: &str, interface: &str) -> usize {
        self.bindings
            .iter()
            .filter(|b| b.provider == id && b.interface == interface)
            .count()
    }

    /// Provisional correctness: node resources respected, strong requirement
    /// arities met, provided capacities not exceeded. Required of every
    /// intermediate state of a deployment plan.
    pub fn check_provisional(
        &self,
        universe: &Universe,
        pool: &NodePool,
    ) -> Result<CorrectnessReport, ModelError> {
        self.validate(universe, pool)?;
        let mut violations = Vec::new();

        // Per-node resource sums.
        let mut hosted: BTreeMap<&str, Vec<&MicroserviceType>> = BTreeMap::new();
        for info in self.instances.values() {
            hosted
                .entry(info.node.as_str())
                .or_default()
                .push(universe.get(&info.type_name).expect("validated"));
        }
        for (node_name, types) in &hosted {
            let node = pool.get(node_name).expect("validated");
            let mut demand: BTreeMap<&str, u64> = BTreeMap::new();
            for ty in types {
                for (r, amount) in &ty.resources {
                    *demand.entry(r.as_str()).or_default() += amount;
                }
            }
            for (r, required) in demand {
                let capacity = node.capacity(r);
                if required > capacity {
                    violations.push(Violation::NodeOverload {
                        node: node_name.to_string(),
                        resource: r.to_string(),
                        capacity,
                        required,
                    });
                }
            }
        }

        for (id, info) in &self.instances {
            let ty = universe.get(&info.type_name).expect("validated");
            for (p, required) in &ty.strong_requires {
                let found = self.outgoing(id, p) as u64;
                if found < *required {
                    violations.push(Violation::UnmetStrong {
                        instance: id.clone(),
                        interface: p.clone(),
                        required: *required,
                        found,
                    });
                }
            }
            for (p, arity) in &ty.provides {
                if let Arity::Finite(capacity) = arity {
                    let found = self.incoming(id, p) as u64;
                    if found > *capacity {
                        violations.push(Violation::CapacityExceeded {
                            provider: id.clone(),
                            interface: p.clone(),
                            capacity: *capacity,
                            found,
                        });
                    }
                }
            }
        }

        Ok(CorrectnessReport { violations })
    }

    /// Full correctness: provisional correctness plus weak requirement arities
    /// met and no conflict violated. Required of the final state of a plan.
    ///
    /// An instance providing an interface it also conflicts with is permitted
    /// on its own; only *other* providers of the interface violate the
    /// conflict.
    pub fn check_correct(
        &self,
        universe: &Universe,
        pool: &NodePool,
    ) -> Result<CorrectnessReport, ModelError> {
        let mut report = self.check_provisional(universe, pool)?;

        for (id, info) in &self.instances {
            let ty = universe.get(&info.type_name).expect("validated");
            for (p, required) in &ty.weak_requires {
                let found = self.outgoing(id, p) as u64;
                if found < *required {
                    report.violations.push(Violation::UnmetWeak {
                        instance: id.clone(),
                        interface: p.clone(),
                        required: *required,
                        found,
                    });
                }
            }
            for p in &ty.conflicts {
                for (other_id, other_info) in &self.instances {
                    if other_id == id {
                        continue;
                    }
                    let other_ty = universe.get(&other_info.type_name).expect("validated");
                    if other_ty.provides.contains_key(p) {
                        report.violations.push(Violation::ConflictViolated {
                            holder: id.clone(),
                            interface: p.clone(),
                            provider: other_id.clone(),
                        });
                    }
                }
            }
        }

        Ok(report)
    }

    /// Applies one action, returning the successor configuration. The input is
    /// never mutated. Every side condition of the transition rules is checked
    /// and reported as a distinct error.
    pub fn apply(&self, action: &Action, universe: &Universe) -> Result<Configuration, ActionError> {
        match action {
            Action::Bind {
                interface,
                requirer,
                provider,
            } => {
                let binding = Binding::new(interface.clone(), requirer.clone(), provider.clone());
                self.check_weak_endpoints(interface, requirer, provider, universe)?;
                if self.bindings.contains(&binding) {
                    return Err(ActionError::DuplicateBinding(binding));
                }
                let mut next = self.clone();
                next.bindings.insert(binding);
                Ok(next)
            }
            Action::Unbind {
                interface,
                requirer,
                provider,
            } => {
                let binding = Binding::new(interface.clone(), requirer.clone(), provider.clone());
                self.check_weak_endpoints(interface, requirer, provider, universe)?;
                if !self.bindings.contains(&binding) {
                    return Err(ActionError::BindingNotFound(binding));
                }
                let mut next = self.clone();
                next.bindings.remove(&binding);
                Ok(next)
            }
            Action::New {
                instance,
                type_name,
                node,
                strong_bindings,
            } => {
                if self.instances.contains_key(instance) {
                    return Err(ActionError::InstanceExists(instance.clone()));
                }
                let ty = universe
                    .get(type_name)
                    .ok_or_else(|| ActionError::UnknownType(type_name.clone()))?;
                // The map must cover exactly the strong required interfaces.
                let expected: BTreeSet<&InterfaceName> = ty.strong_requires.keys().collect();
                let given: BTreeSet<&InterfaceName> = strong_bindings.keys().collect();
                if expected != given {
                    return Err(ActionError::StrongPortsMismatch {
                        instance: instance.clone(),
                        expected: expected.into_iter().cloned().collect(),
                        given: given.into_iter().cloned().collect(),
                    });
                }
                for (p, providers) in strong_bindings {
                    let required = ty.strong_requires[p];
                    if (providers.len() as u64) < required {
                        return Err(ActionError::InsufficientStrongBindings {
                            instance: instance.clone(),
                            interface: p.clone(),
                            required,
                            given: providers.len() as u64,
                        });
                    }
                    for z in providers {
                        if z == instance {
                            return Err(ActionError::SelfBinding(instance.clone()));
                        }
                        let info = self.instances.get(z).ok_or_else(|| {
                            ActionError::UnknownInstance(z.clone())
                        })?;
                        let prov_ty = universe
                            .get(&info.type_name)
                            .ok_or_else(|| ActionError::UnknownType(info.type_name.clone()))?;
                        if !prov_ty.provides.contains_key(p) {
                            return Err(ActionError::NotProvided {
                                instance: z.clone(),
                                interface: p.clone(),
                            });
                        }
                    }
                }
                let mut next = self.clone();
                next.instances.insert(
                    instance.clone(),
                    InstanceInfo {
                        type_name: type_name.clone(),
                        node: node.clone(),
                    },
                );
                for (p, providers) in strong_bindings {
                    for z in providers {
                        next.bindings
                            .insert(Binding::new(p.clone(), instance.clone(), z.clone()));
                    }
                }
                Ok(next)
            }
            Action::Del { instance } => {
                if !self.instances.contains_key(instance) {
                    return Err(ActionError::UnknownInstance(instance.clone()));
                }
                let mut next = self.clone();
                next.instances.remove(instance);
                next.bindings
                    .retain(|b| b.requirer != *instance && b.provider != *instance);
                Ok(next)
            }
        }
    }

    /// Side conditions shared by `bind` and `unbind`: distinct, existing
    /// endpoints; the interface is a *weak* requirement of the requirer and is
    /// provided by the provider. Strong ports are bound only at creation.
    fn check_weak_endpoints(
        &self,
        interface: &str,
        requirer: &str,
        provider: &str,
        universe: &Universe,
    ) -> Result<(), ActionError> {
        if requirer == provider {
            return Err(ActionError::SelfBinding(requirer.to_string()));
        }
        let req_info = self
            .instances
            .get(requirer)
            .ok_or_else(|| ActionError::UnknownInstance(requirer.to_string()))?;
        let prov_info = self
            .instances
            .get(provider)
            .ok_or_else(|| ActionError::UnknownInstance(provider.to_string()))?;
        let req_ty = universe
            .get(&req_info.type_name)
            .ok_or_else(|| ActionError::UnknownType(req_info.type_name.clone()))?;
        let prov_ty = universe
            .get(&prov_info.type_name)
            .ok_or_else(|| ActionError::UnknownType(prov_info.type_name.clone()))?;
        if !req_ty.weak_requires.contains_key(interface) {
            return Err(ActionError::NotWeakRequirement {
                instance: requirer.to_string(),
                interface: interface.to_string(),
            });
        }
        if !prov_ty.provides.contains_key(interface) {
            return Err(ActionError::NotProvided {
                instance: provider.to_string(),
                interface: interface.to_string(),
            });
        }
        Ok(())
    }
}

/// One reconfiguration step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Action {
    /// Add a binding on a weak required port.
    Bind {
        interface: InterfaceName,
        requirer: InstanceId,
        provider: InstanceId,
    },
    /// Remove a binding on a weak required port.
    Unbind {
        interface: InterfaceName,
        requirer: InstanceId,
        provider: InstanceId,
    },
    /// Create an instance, binding every strong required port at once.
    New {
        instance: InstanceId,
        type_name: TypeName,
        node: NodeName,
        /// For each strong required interface, the providers to bind. Must
        /// cover exactly the type's strong ports, with at least the required
        /// arity each.
        strong_bindings: BTreeMap<InterfaceName, BTreeSet<InstanceId>>,
    },
    /// Remove an instance and every binding involving it.
    Del { instance: InstanceId },
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Bind {
                interface,
                requirer,
                provider,
            } => write!(f, "bind({interface}, {requirer}, {provider})"),
            Action::Unbind {
                interface,
                requirer,
                provider,
            } => write!(f, "unbind({interface}, {requirer}, {provider})"),
            Action::New {
                instance,
                type_name,
                node,
                strong_bindings,
            } => {
                write!(f, "new({instance}, {type_name}, {node}")?;
                for (p, providers) in strong_bindings {
                    let list: Vec<&str> = providers.iter().map(|s| s.as_str()).collect();
                    write!(f, ", {p} -> {{{}}}", list.join(", "))?;
                }
                write!(f, ")")
            }
            Action::Del { instance } => write!(f, "del({instance})"),
        }
    }
}

/// An ordered sequence of actions. Validity against the transition semantics
/// is checked by replay (`verifier::run_plan`), not by construction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DeploymentPlan {
    pub actions: Vec<Action>,
}

impl DeploymentPlan {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

/// A structured correctness finding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    NodeOverload {
        node: NodeName,
        resource: ResourceName,
        capacity: u64,
        required: u64,
    },
    UnmetStrong {
        instance: InstanceId,
        interface: InterfaceName,
        required: u64,
        found: u64,
    },
    UnmetWeak {
        instance: InstanceId,
        interface: InterfaceName,
        required: u64,
        found: u64,
    },
    CapacityExceeded {
        provider: InstanceId,
        interface: InterfaceName,
        capacity: u64,
        found: u64,
    },
    ConflictViolated {
        holder: InstanceId,
        interface: InterfaceName,
        provider: InstanceId,
    },
}

impl Violation {
    /// Violations that only matter for full correctness, not for the
    /// provisional correctness required of intermediate states.
    pub fn is_weak_or_conflict(&self) -> bool {
        matches!(
            self,
            Violation::UnmetWeak { .. } | Violation::ConflictViolated { .. }
        )
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NodeOverload {
                node,
                resource,
                capacity,
                required,
            } => write!(
                f,
                "node {node} overloaded on {resource}: capacity {capacity}, required {required}"
            ),
            Violation::UnmetStrong {
                instance,
                interface,
                required,
                found,
            } => write!(
                f,
                "instance {instance} strong requirement {interface} unmet: needs {required}, has {found}"
            ),
            Violation::UnmetWeak {
                instance,
                interface,
                required,
                found,
            } => write!(
                f,
                "instance {instance} weak requirement {interface} unmet: needs {required}, has {found}"
            ),
            Violation::CapacityExceeded {
                provider,
                interface,
                capacity,
                found,
            } => write!(
                f,
                "provider {provider} capacity exceeded on {interface}: allows {capacity}, has {found}"
            ),
            Violation::ConflictViolated {
                holder,
                interface,
                provider,
            } => write!(
                f,
                "instance {holder} conflicts on {interface}, provided by {provider}"
            ),
        }
    }
}

/// Outcome of a correctness check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Correct,
    ProvisionallyCorrectOnly,
    Invalid,
}

/// All violations found by a check; never fails fast, so callers can explain
/// infeasibility in full.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CorrectnessReport {
    pub violations: Vec<Violation>,
}

impl CorrectnessReport {
    /// `Correct` iff no violations; `ProvisionallyCorrectOnly` iff every
    /// violation concerns only weak requirements or conflicts.
    pub fn verdict(&self) -> Verdict {
        if self.violations.is_empty() {
            Verdict::Correct
        } else if self.violations.iter().all(Violation::is_weak_or_conflict) {
            Verdict::ProvisionallyCorrectOnly
        } else {
            Verdict::Invalid
        }
    }

    pub fn is_correct(&self) -> bool {
        self.violations.is_empty()
    }

    /// True when no violation breaks provisional correctness.
    pub fn is_provisionally_correct(&self) -> bool {
        self.violations.iter().all(Violation::is_weak_or_conflict)
    }
}

/// Input and structural errors over model values.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("names must be non-empty")]
    EmptyName,
    #[error("duplicate type name: {0}")]
    DuplicateType(TypeName),
    #[error("duplicate node name: {0}")]
    DuplicateNode(NodeName),
    #[error("duplicate instance id: {0}")]
    DuplicateInstance(InstanceId),
    #[error("type {type_name}: interface {interface}: {reason}")]
    BadArity {
        type_name: TypeName,
        interface: InterfaceName,
        reason: &'static str,
    },
    #[error("type {type_name}: interface {interface} appears in more than one of strong/weak/conflicts")]
    OverlappingPorts {
        type_name: TypeName,
        interface: InterfaceName,
    },
    #[error("strong dependency cycle: {}", cycle.join(" -> "))]
    StrongCycle { cycle: Vec<TypeName> },
    #[error("instance {instance} references unknown type {type_name}")]
    UnknownType {
        instance: InstanceId,
        type_name: TypeName,
    },
    #[error("instance {instance} references unknown node {node}")]
    UnknownNode { instance: InstanceId, node: NodeName },
    #[error("unknown instance in binding: {0}")]
    UnknownInstance(InstanceId),
    #[error("binding {0} violates the interface side condition")]
    IllegalBinding(Binding),
    #[error("self-binding {0}")]
    SelfBinding(Binding),
}

/// Rejections of the four transition rules.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ActionError {
    #[error("unknown instance {0}")]
    UnknownInstance(InstanceId),
    #[error("instance id {0} is already live")]
    InstanceExists(InstanceId),
    #[error("unknown type {0}")]
    UnknownType(TypeName),
    #[error("binding already present: {0}")]
    DuplicateBinding(Binding),
    #[error("binding not present: {0}")]
    BindingNotFound(Binding),
    #[error("{interface} is not a weak requirement of {instance}; strong ports are bound only at creation")]
    NotWeakRequirement {
        instance: InstanceId,
        interface: InterfaceName,
    },
    #[error("{instance} does not provide {interface}")]
    NotProvided {
        instance: InstanceId,
        interface: InterfaceName,
    },
    #[error("instance {instance}: strong bindings must cover exactly the strong ports (expected {expected:?}, given {given:?})")]
    StrongPortsMismatch {
        instance: InstanceId,
        expected: BTreeSet<InterfaceName>,
        given: BTreeSet<InterfaceName>,
    },
    #[error("instance {instance}: strong port {interface} needs {required} providers, given {given}")]
    InsufficientStrongBindings {
        instance: InstanceId,
        interface: InterfaceName,
        required: u64,
        given: u64,
    },
    #[error("instance {0} cannot bind to itself")]
    SelfBinding(InstanceId),
}

#[cfg(test)]
mod tests {
    use super::*;

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

    /// The running-example universe: a receiver weakly requiring three
    /// analyzers, analyzers strongly requiring one attachment analyzer with
    /// capacity two.
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

    /// Initial state of the running example: one instance of each type, the
    /// receiver bound to a single analyzer.
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

    /// The full (correct) configuration of the running example: three
    /// analyzers and two attachment analyzers.
    fn mini_full() -> Configuration {
        Configuration::from_parts(
            [
                ("mr".to_string(), inst("MessageReceiver", "large#1")),
                ("ma1".to_string(), inst("MessageAnalyzer", "xlarge#1")),
                ("ma2".to_string(), inst("MessageAnalyzer", "xlarge#2")),
                ("ma3".to_string(), inst("MessageAnalyzer", "xlarge#2")),
                ("aa1".to_string(), inst("AttachmentAnalyzer", "xlarge#1")),
                ("aa2".to_string(), inst("AttachmentAnalyzer", "xlarge#1")),
            ],
            [
                Binding::new("MA", "mr", "ma1"),
                Binding::new("MA", "mr", "ma2"),
                Binding::new("MA", "mr", "ma3"),
                Binding::new("AA", "ma1", "aa1"),
                Binding::new("AA", "ma2", "aa1"),
                Binding::new("AA", "ma3", "aa2"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn interfaces_of_mini_universe() {
        let interfaces = mini_universe().interfaces();
        let expected: BTreeSet<String> = ["MA".to_string(), "AA".to_string()].into();
        assert_eq!(interfaces, expected);
    }

    #[test]
    fn interfaces_of_empty_universe() {
        assert!(Universe::default().interfaces().is_empty());
    }

    #[test]
    fn conflicts_contribute_to_interfaces() {
        let mut t = ty("Loner");
        t.conflicts.insert("p".into());
        let u = Universe::new([t]).unwrap();
        assert_eq!(u.interfaces(), ["p".to_string()].into());
    }

    #[test]
    fn mini_universe_is_well_formed() {
        mini_universe().check_well_formed().unwrap();
    }

    #[test]
    fn strong_cycle_is_reported() {
        let mut a = ty("A");
        a.strong_requires.insert("p".into(), 1);
        a.provides.insert("q".into(), Arity::Infinite);
        let mut b = ty("B");
        b.provides.insert("p".into(), Arity::Infinite);
        b.strong_requires.insert("q".into(), 1);
        let u = Universe::new([a, b]).unwrap();
        match u.check_well_formed() {
            Err(ModelError::StrongCycle { cycle }) => {
                assert_eq!(cycle.len(), 2);
                assert!(cycle.contains(&"A".to_string()));
                assert!(cycle.contains(&"B".to_string()));
            }
            other => panic!("expected a cycle, got {other:?}"),
        }
    }

    #[test]
    fn weak_edge_breaks_the_cycle() {
        let mut a = ty("A");
        a.weak_requires.insert("p".into(), 1);
        a.provides.insert("q".into(), Arity::Infinite);
        let mut b = ty("B");
        b.provides.insert("p".into(), Arity::Infinite);
        b.strong_requires.insert("q".into(), 1);
        let u = Universe::new([a, b]).unwrap();
        u.check_well_formed().unwrap();
    }

    #[test]
    fn duplicate_type_names_rejected() {
        assert_eq!(
            Universe::new([ty("A"), ty("A")]).unwrap_err(),
            ModelError::DuplicateType("A".into())
        );
    }

    #[test]
    fn overlapping_ports_rejected() {
        let mut t = ty("T");
        t.strong_requires.insert("p".into(), 1);
        t.weak_requires.insert("p".into(), 0);
        assert!(matches!(
            Universe::new([t]),
            Err(ModelError::OverlappingPorts { .. })
        ));
    }

    #[test]
    fn initial_configuration_is_provisionally_correct_only() {
        let (u, pool) = (mini_universe(), mini_pool());
        let initial = mini_initial();
        let provisional = initial.check_provisional(&u, &pool).unwrap();
        assert_eq!(provisional.verdict(), Verdict::Correct);

        let full = initial.check_correct(&u, &pool).unwrap();
        assert_eq!(full.verdict(), Verdict::ProvisionallyCorrectOnly);
        assert_eq!(
            full.violations,
            vec![Violation::UnmetWeak {
                instance: "mr".into(),
                interface: "MA".into(),
                required: 3,
                found: 1,
            }]
        );
    }

    #[test]
    fn full_configuration_is_correct() {
        let (u, pool) = (mini_universe(), mini_pool());
        let report = mini_full().check_correct(&u, &pool).unwrap();
        assert_eq!(report.verdict(), Verdict::Correct);
    }

    #[test]
    fn node_overload_is_reported() {
        let mut t = ty("Fat");
        t.resources.insert("RAM".into(), 4);
        let u = Universe::new([t]).unwrap();
        let pool = NodePool::new([Node {
            name: "small".into(),
            resources: [("RAM".into(), 4)].into(),
            cost: 1,
        }])
        .unwrap();
        let config = Configuration::from_parts(
            [
                ("a".to_string(), inst("Fat", "small")),
                ("b".to_string(), inst("Fat", "small")),
            ],
            [],
        )
        .unwrap();
        let report = config.check_provisional(&u, &pool).unwrap();
        assert_eq!(
            report.violations,
            vec![Violation::NodeOverload {
                node: "small".into(),
                resource: "RAM".into(),
                capacity: 4,
                required: 8,
            }]
        );
        assert_eq!(report.verdict(), Verdict::Invalid);
    }

    #[test]
    fn conflict_with_distinct_provider_is_reported() {
        let mut grump = ty("Grump");
        grump.conflicts.insert("p".into());
        let mut prov = ty("Provider");
        prov.provides.insert("p".into(), Arity::Infinite);
        let u = Universe::new([grump, prov]).unwrap();
        let pool = NodePool::new([Node {
            name: "n".into(),
            resources: BTreeMap::new(),
            cost: 1,
        }])
        .unwrap();
        let config = Configuration::from_parts(
            [
                ("g".to_string(), inst("Grump", "n")),
                ("p1".to_string(), inst("Provider", "n")),
            ],
            [],
        )
        .unwrap();
        let report = config.check_correct(&u, &pool).unwrap();
        assert_eq!(
            report.violations,
            vec![Violation::ConflictViolated {
                holder: "g".into(),
                interface: "p".into(),
                provider: "p1".into(),
            }]
        );
        assert_eq!(report.verdict(), Verdict::ProvisionallyCorrectOnly);
    }

    #[test]
    fn self_conflicting_provider_alone_is_correct() {
        let mut t = ty("Solo");
        t.provides.insert("p".into(), Arity::Infinite);
        t.conflicts.insert("p".into());
        let u = Universe::new([t]).unwrap();
        let pool = NodePool::new([Node {
            name: "n".into(),
            resources: BTreeMap::new(),
            cost: 1,
        }])
        .unwrap();
        let config =
            Configuration::from_parts([("s".to_string(), inst("Solo", "n"))], []).unwrap();
        assert_eq!(
            config.check_correct(&u, &pool).unwrap().verdict(),
            Verdict::Correct
        );
    }

    #[test]
    fn new_action_places_instance_with_strong_bindings() {
        let u = mini_universe();
        let base = Configuration::from_parts(
            [("aa".to_string(), inst("AttachmentAnalyzer", "xlarge#1"))],
            [],
        )
        .unwrap();
        let action = Action::New {
            instance: "ma".into(),
            type_name: "MessageAnalyzer".into(),
            node: "xlarge#1".into(),
            strong_bindings: [("AA".to_string(), ["aa".to_string()].into())].into(),
        };
        let next = base.apply(&action, &u).unwrap();
        assert!(next.contains_instance("ma"));
        assert!(next.has_binding(&Binding::new("AA", "ma", "aa")));
        // The input configuration is untouched.
        assert_eq!(base.instance_count(), 1);
        assert_eq!(base.binding_count(), 0);
    }

    #[test]
    fn bind_on_strong_port_is_rejected() {
        let u = mini_universe();
        let config = mini_initial();
        let action = Action::Bind {
            interface: "AA".into(),
            requirer: "ma".into(),
            provider: "aa".into(),
        };
        assert_eq!(
            config.apply(&action, &u).unwrap_err(),
            ActionError::NotWeakRequirement {
                instance: "ma".into(),
                interface: "AA".into(),
            }
        );
    }

    #[test]
    fn del_removes_incident_bindings() {
        let u = mini_universe();
        let next = mini_initial()
            .apply(&Action::Del { instance: "ma".into() }, &u)
            .unwrap();
        assert_eq!(next.instance_count(), 2);
        assert_eq!(next.binding_count(), 0);
    }

    #[test]
    fn bind_then_unbind_is_identity() {
        let u = mini_universe();
        let full = mini_full();
        let start = full
            .apply(
                &Action::Unbind {
                    interface: "MA".into(),
                    requirer: "mr".into(),
                    provider: "ma3".into(),
                },
                &u,
            )
            .unwrap();
        let bound = start
            .apply(
                &Action::Bind {
                    interface: "MA".into(),
                    requirer: "mr".into(),
                    provider: "ma3".into(),
                },
                &u,
            )
            .unwrap();
        let unbound = bound
            .apply(
                &Action::Unbind {
                    interface: "MA".into(),
                    requirer: "mr".into(),
                    provider: "ma3".into(),
                },
                &u,
            )
            .unwrap();
        assert_eq!(start, unbound);
    }

    #[test]
    fn new_then_del_is_identity() {
        let u = mini_universe();
        let base = mini_initial();
        let created = base
            .apply(
                &Action::New {
                    instance: "aa2".into(),
                    type_name: "AttachmentAnalyzer".into(),
                    node: "xlarge#2".into(),
                    strong_bindings: BTreeMap::new(),
                },
                &u,
            )
            .unwrap();
        let deleted = created
            .apply(&Action::Del { instance: "aa2".into() }, &u)
            .unwrap();
        assert_eq!(base, deleted);
    }

    #[test]
    fn duplicate_bind_and_missing_unbind_are_rejected() {
        let u = mini_universe();
        let config = mini_initial();
        let bind = Action::Bind {
            interface: "MA".into(),
            requirer: "mr".into(),
            provider: "ma".into(),
        };
        assert!(matches!(
            config.apply(&bind, &u),
            Err(ActionError::DuplicateBinding(_))
        ));
        let config2 = config
            .apply(
                &Action::Unbind {
                    interface: "MA".into(),
                    requirer: "mr".into(),
                    provider: "ma".into(),
                },
                &u,
            )
            .unwrap();
        assert!(matches!(
            config2.apply(
                &Action::Unbind {
                    interface: "MA".into(),
                    requirer: "mr".into(),
                    provider: "ma".into(),
                },
                &u
            ),
            Err(ActionError::BindingNotFound(_))
        ));
    }

    #[test]
    fn new_rejects_live_id_and_undercovered_ports() {
        let u = mini_universe();
        let config = mini_initial();
        assert_eq!(
            config
                .apply(
                    &Action::New {
                        instance: "ma".into(),
                        type_name: "MessageAnalyzer".into(),
                        node: "xlarge#2".into(),
                        strong_bindings: [("AA".to_string(), ["aa".to_string()].into())].into(),
                    },
                    &u
                )
                .unwrap_err(),
            ActionError::InstanceExists("ma".into())
        );
        assert!(matches!(
            config.apply(
                &Action::New {
                    instance: "ma2".into(),
                    type_name: "MessageAnalyzer".into(),
                    node: "xlarge#2".into(),
                    strong_bindings: BTreeMap::new(),
                },
                &u
            ),
            Err(ActionError::StrongPortsMismatch { .. })
        ));
    }

    #[test]
    fn instance_id_reusable_after_del() {
        let u = mini_universe();
        let config = mini_initial();
        let deleted = config
            .apply(&Action::Del { instance: "mr".into() }, &u)
            .unwrap();
        let recreated = deleted.apply(
            &Action::New {
                instance: "mr".into(),
                type_name: "MessageReceiver".into(),
                node: "large#2".into(),
                strong_bindings: BTreeMap::new(),
            },
            &u,
        );
        assert!(recreated.is_ok());
    }

    #[test]
    fn cost_counts_each_used_node_once() {
        let pool = mini_pool();
        assert_eq!(Configuration::empty().cost(&pool).unwrap(), 0);
        assert_eq!(mini_initial().cost(&pool).unwrap(), 299);
        // Three nodes in the full configuration: one large, two xlarge.
        assert_eq!(mini_full().cost(&pool).unwrap(), 498);
    }

    #[test]
    fn correct_refines_provisional() {
        let (u, pool) = (mini_universe(), mini_pool());
        for config in [mini_initial(), mini_full(), Configuration::empty()] {
            let correct = config.check_correct(&u, &pool).unwrap();
            if correct.verdict() == Verdict::Correct {
                let provisional = config.check_provisional(&u, &pool).unwrap();
                assert!(provisional.violations.is_empty());
            }
        }
    }

    #[test]
    fn dangling_references_are_input_errors() {
        let (u, pool) = (mini_universe(), mini_pool());
        let bad_type =
            Configuration::from_parts([("x".to_string(), inst("Ghost", "large#1"))], []).unwrap();
        assert!(matches!(
            bad_type.check_provisional(&u, &pool),
            Err(ModelError::UnknownType { .. })
        ));
        let bad_node =
            Configuration::from_parts([("x".to_string(), inst("MessageReceiver", "nope"))], [])
                .unwrap();
        assert!(matches!(
            bad_node.check_provisional(&u, &pool),
            Err(ModelError::UnknownNode { .. })
        ));
    }
}
