//! Shipped problem fixtures.
//!
//! `fig1_mini` is the small running example used throughout the tests: a
//! message receiver that weakly requires three analyzers, analyzers that
//! strongly require an attachment analyzer with capacity two, and a pool of
//! four large plus four xlarge nodes.
//!
//! `email_pipeline` is the desk-scale stress fixture: twelve services wired
//! into an email processing pipeline, one load balancer per service, and 120
//! nodes of three kinds. Service capacities model the maximum simultaneous
//! load each instance absorbs (in thousands of requests); the `demand`
//! parameter sets the offered load and thereby the per-balancer replica
//! floors, computed as ceil(demand / capacity). The shipped JSON files pin
//! demand = 10.

use std::collections::BTreeMap;

use crate::format;
use crate::model::{Arity, Configuration, MicroserviceType, Node, NodePool, TypeName, Universe};

/// A ready-to-plan problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub universe: Universe,
    pub pool: NodePool,
    pub initial: Configuration,
    pub target: TypeName,
}

const FIG1_UNIVERSE: &str = include_str!("../fixtures/fig1-mini/universe.json");
const FIG1_NODES: &str = include_str!("../fixtures/fig1-mini/nodes.json");
const FIG1_INITIAL: &str = include_str!("../fixtures/fig1-mini/initial.json");

/// The running example, loaded from the shipped files. The initial
/// configuration is only provisionally correct: the receiver has one analyzer
/// binding where its weak arity demands three.
pub fn fig1_mini() -> Problem {
    let universe = format::parse_universe(FIG1_UNIVERSE).expect("shipped fixture parses");
    let pool = format::parse_nodes(FIG1_NODES).expect("shipped fixture parses");
    let initial = format::parse_configuration(FIG1_INITIAL).expect("shipped fixture parses");
    Problem {
        universe,
        pool,
        initial,
        target: "MessageReceiver".to_string(),
    }
}

const EMAIL_UNIVERSE: &str = include_str!("../fixtures/email-pipeline/universe.json");
const EMAIL_NODES: &str = include_str!("../fixtures/email-pipeline/nodes.json");

/// The shipped email-pipeline fixture (demand 10).
pub fn email_pipeline_shipped() -> Problem {
    let universe = format::parse_universe(EMAIL_UNIVERSE).expect("shipped fixture parses");
    let pool = format::parse_nodes(EMAIL_NODES).expect("shipped fixture parses");
    Problem {
        universe,
        pool,
        initial: Configuration::empty(),
        target: EMAIL_TARGET.to_string(),
    }
}

pub const EMAIL_TARGET: &str = "MessageReceiverBalancer";

/// One service row: type name, interface, capacity (None = unbounded), cpu,
/// ram, and strong dependencies on other services' balancer interfaces.
type ServiceRow = (
    &'static str,
    &'static str,
    Option<u64>,
    u64,
    u64,
    &'static [&'static str],
);

const EMAIL_SERVICES: &[ServiceRow] = &[
    ("MessageReceiver", "recv", None, 2, 4, &["lb_parse"]),
    (
        "MessageParser",
        "parse",
        Some(40),
        2,
        4,
        &["lb_header", "lb_link", "lb_text", "lb_attach"],
    ),
    ("HeaderAnalyser", "header", Some(40), 1, 2, &["lb_analyse"]),
    ("LinkAnalyser", "link", Some(40), 1, 2, &["lb_analyse"]),
    (
        "TextAnalyser",
        "text",
        Some(15),
        2,
        4,
        &["lb_sentiment", "lb_analyse"],
    ),
    ("SentimentAnalyser", "sentiment", Some(15), 2, 4, &[]),
    (
        "AttachmentsManager",
        "attach",
        Some(30),
        2,
        4,
        &["lb_virus", "lb_image"],
    ),
    ("VirusScanner", "virus", Some(13), 2, 4, &[]),
    (
        "ImageAnalyser",
        "image",
        Some(30),
        2,
        4,
        &["lb_nsfw", "lb_recognize"],
    ),
    ("NSFWDetector", "nsfw", Some(13), 2, 4, &[]),
    ("ImageRecognizer", "recognize", Some(13), 2, 4, &[]),
    ("MessageAnalyser", "analyse", Some(70), 2, 4, &[]),
];

/// Builds the email pipeline for an offered load of `demand` thousand
/// simultaneous requests. Each service gets a load balancer that weakly
/// requires the service's interface with arity ceil(demand / capacity) - the
/// replica floor needed to absorb the load. Demand 0 degenerates to the pure
/// bind-whatever-exists balancer (weak arity 0).
pub fn email_pipeline(demand: u64) -> Problem {
    let mut types = Vec::new();
    for (name, interface, capacity, cpu, ram, deps) in EMAIL_SERVICES {
        let mut provides = BTreeMap::new();
        provides.insert(
            interface.to_string(),
            match capacity {
                Some(n) => Arity::Finite(*n),
                None => Arity::Infinite,
            },
        );
        let strong_requires = deps.iter().map(|d| (d.to_string(), 1)).collect();
        types.push(MicroserviceType {
            name: name.to_string(),
            provides,
            strong_requires,
            weak_requires: BTreeMap::new(),
            conflicts: Default::default(),
            resources: [("CPU".to_string(), *cpu), ("RAM".to_string(), *ram)].into(),
        });

        let replicas = match capacity {
            Some(cap) => demand.div_ceil(*cap),
            None => u64::from(demand > 0),
        };
        types.push(MicroserviceType {
            name: format!("{name}Balancer"),
            provides: [(format!("lb_{interface}"), Arity::Infinite)].into(),
            strong_requires: BTreeMap::new(),
            weak_requires: [(interface.to_string(), replicas)].into(),
            conflicts: Default::default(),
            resources: [("CPU".to_string(), 1), ("RAM".to_string(), 1)].into(),
        });
    }
    let universe = Universe::new(types).expect("fixture types are valid");

    let kinds = [
        ("c4_large", 2u64, 4u64, 100u64),
        ("c4_xlarge", 4, 8, 199),
        ("c4_2xlarge", 8, 16, 398),
    ];
    let mut nodes = Vec::new();
    for (kind, cpu, ram, cost) in kinds {
        for k in 1..=40 {
            nodes.push(Node {
                name: format!("{kind}#{k}"),
                resources: [("CPU".to_string(), cpu), ("RAM".to_string(), ram)].into(),
                cost,
            });
        }
    }
    let pool = NodePool::new(nodes).expect("fixture nodes are valid");

    Problem {
        universe,
        pool,
        initial: Configuration::empty(),
        target: EMAIL_TARGET.to_string(),
    }
}
