//! Gateway placement toolkit for wireless mesh networks.
//!
//! Nodes of a planar unit-disk mesh are scored with a Coulomb-style force
//! metric — node degree as charge, inverse-square falloff with distance —
//! and the gateway is the force argmax. A deterministic flow-level
//! throughput simulator and force–throughput correlation reports validate
//! the placement.
//!
//! The pipeline, module by module:
//!
//! * [`topology`] — generate, persist, and query grid and random unit-disk
//!   topologies.
//! * [`force`] — pairwise and cumulative forces, ranking, gateway
//!   selection, centrality baselines.
//! * [`routing`] — deterministic shortest-hop trees toward a gateway.
//! * [`simulator`] — constant-rate flows with bottleneck proportional
//!   sharing per link.
//! * [`experiment`] — per-gateway sweeps, Pearson/Spearman statistics,
//!   CSV reports, seeded batch ensembles.

pub mod error;
pub mod experiment;
pub mod force;
pub mod routing;
pub mod simulator;
pub mod topology;

pub use error::{Error, Result};
pub use experiment::{
    batch_random, correlate, emit_csv, sweep, BatchConfig, BatchRun, BatchSweep, CorrValue,
    CorrelationReport, SweepMeta, SweepReport, SweepRow,
};
pub use force::{
    baseline_score, node_force, pairwise_force, rank_by_force, select_gateway, BaselineMetric,
    Charge, ForceParams, ScoreReport,
};
pub use routing::{build_routing_tree, RoutingTree};
pub use simulator::{
    flow_throughput, offered_loads, simulate_gateway, FlowStat, LinkLoad, SimReport, TrafficSpec,
};
pub use topology::{
    generate_grid, generate_random, GenKind, GenSpec, NodeId, Position, Topology,
    DEFAULT_MAX_ATTEMPTS, GENERATOR_ID,
};
