//! Cost-optimal deployment planning for microservice architectures.
//!
//! Given a universe of microservice types, a pool of resource-bounded nodes,
//! an initial configuration, and a target type, `microplan` synthesizes a
//! step-by-step deployment plan whose final configuration contains the target,
//! is correct, and has minimal total node cost. Every plan is replayed against
//! the reconfiguration semantics before it is reported.
//!
//! The pipeline has three stages:
//!
//! 1. [`placement`] decides how many instances of each type to create, where
//!    to put them, and how many bindings each pair of types needs, minimizing
//!    the summed cost of used nodes.
//! 2. [`binding`] materializes named instances and solves the per-instance
//!    binding problem, optionally under a binding metric.
//! 3. [`synthesis`] orders the create/bind/unbind/delete actions so that every
//!    intermediate configuration stays provisionally correct.
//!
//! Both optimization stages run on the self-contained exact integer solver in
//! [`solver`]; [`verifier`] replays plans and provides an exhaustive
//! brute-force oracle for testing. [`planner`] ties the stages together, and
//! [`cli`] exposes the `validate`, `plan`, `check`, and `gen` commands.
//!
//! See the `examples/` directory for a runnable tour: start with
//! `plan_scratch`, then `plan_incremental`.

pub mod binding;
pub mod cli;
pub mod fixtures;
pub mod format;
pub mod generate;
pub mod model;
pub mod placement;
pub mod planner;
pub mod solver;
pub mod synthesis;
pub mod verifier;

pub use model::{
    Action, Arity, Binding, Configuration, CorrectnessReport, DeploymentPlan, MicroserviceType,
    Node, NodePool, Universe, Verdict, Violation,
};
pub use planner::{PlanMode, PlanOptions, PlanOutcome, PlanStatus};
