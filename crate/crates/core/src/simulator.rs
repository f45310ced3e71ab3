//! Deterministic flow-level throughput model.
//!
//! Every non-gateway node offers one constant-rate flow toward the gateway
//! along its shortest-hop path. Offered loads are aggregated per link and a
//! flow's delivered rate is throttled by the worst capacity/load ratio on
//! its path (bottleneck proportional share). There is no packet-level
//! machinery and no randomness: identical inputs give bit-identical reports.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::routing::{build_routing_tree, RoutingTree};
use crate::topology::{NodeId, Topology};

/// Traffic model parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrafficSpec {
    /// Offered rate per source, Mbit/s.
    pub rate_mbps: f64,
    /// Capacity of every link, Mbit/s.
    pub capacity_mbps: f64,
    /// Nominal packet size in bytes. Reporting metadata only; the fluid
    /// model never looks at it.
    pub packet_size: u32,
}

impl Default for TrafficSpec {
    fn default() -> Self {
        Self {
            rate_mbps: 1.0,
            capacity_mbps: 5.0,
            packet_size: 1024,
        }
    }
}

impl TrafficSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate_mbps.is_finite() && self.rate_mbps > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "offered rate must be positive and finite, got {}",
                self.rate_mbps
            )));
        }
        if !(self.capacity_mbps.is_finite() && self.capacity_mbps > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "link capacity must be positive and finite, got {}",
                self.capacity_mbps
            )));
        }
        if self.packet_size == 0 {
            return Err(Error::InvalidSpec(
                "packet size must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

/// Offered Mbit/s per undirected link. Keys are normalized `(low, high)`
/// node pairs and every keyed pair is a real edge of the topology.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkLoad {
    loads: BTreeMap<(NodeId, NodeId), f64>,
}

impl LinkLoad {
    fn key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
        (a.min(b), a.max(b))
    }

    pub fn load(&self, a: NodeId, b: NodeId) -> Option<f64> {
        self.loads.get(&Self::key(a, b)).copied()
    }

    pub fn len(&self) -> usize {
        self.loads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.loads.is_empty()
    }

    /// Loaded links in ascending key order.
    pub fn entries(&self) -> impl Iterator<Item = ((NodeId, NodeId), f64)> + '_ {
        self.loads.iter().map(|(&k, &v)| (k, v))
    }
}

/// Aggregates offered traffic over the routing tree: each non-gateway
/// source adds its rate to every link on its path. Loads are accumulated
/// as integer flow counts and scaled once, so they are exact multiples of
/// the rate.
pub fn offered_loads(t: &Topology, tree: &RoutingTree, spec: &TrafficSpec) -> Result<LinkLoad> {
    spec.validate()?;
    if tree.node_count() != t.node_count() {
        return Err(Error::Internal(format!(
            "routing tree covers {} nodes but the topology has {}",
            tree.node_count(),
            t.node_count()
        )));
    }
    let mut counts: BTreeMap<(NodeId, NodeId), u64> = BTreeMap::new();
    for src in t.node_ids() {
        if src == tree.gateway() {
            continue;
        }
        let path = tree.path_to_gateway(src)?;
        for pair in path.windows(2) {
            *counts.entry(LinkLoad::key(pair[0], pair[1])).or_insert(0) += 1;
        }
    }
    let loads = counts
        .into_iter()
        .map(|(k, c)| (k, c as f64 * spec.rate_mbps))
        .collect();
    Ok(LinkLoad { loads })
}

/// Delivered rate for one flow: `rate · min over path links of
/// min(1, capacity/load)`. A flow over an unsaturated path delivers its
/// full offered rate exactly.
pub fn flow_throughput(path: &[NodeId], loads: &LinkLoad, spec: &TrafficSpec) -> Result<f64> {
    spec.validate()?;
    let mut share = 1.0_f64;
    for pair in path.windows(2) {
        let load = loads.load(pair[0], pair[1]).ok_or_else(|| {
            Error::Internal(format!(
                "path edge ({}, {}) carries no offered load",
                pair[0], pair[1]
            ))
        })?;
        share = share.min((spec.capacity_mbps / load).min(1.0));
    }
    Ok(spec.rate_mbps * share)
}

/// One flow's outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowStat {
    pub source: NodeId,
    pub offered: f64,
    pub delivered: f64,
}

/// Throughput report for one gateway choice.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub gateway: NodeId,
    /// Per-source flows in ascending source id order.
    pub flows: Vec<FlowStat>,
    /// Mean delivered rate over all `N−1` flows; `None` when the topology
    /// is a single node and there are no flows at all.
    pub average_throughput: Option<f64>,
}

/// Routes every node toward `gw`, aggregates loads once, and evaluates all
/// flows. Fully deterministic.
pub fn simulate_gateway(t: &Topology, gw: NodeId, spec: &TrafficSpec) -> Result<SimReport> {
    spec.validate()?;
    let tree = build_routing_tree(t, gw)?;
    let loads = offered_loads(t, &tree, spec)?;
    let mut flows = Vec::with_capacity(t.node_count().saturating_sub(1));
    for src in t.node_ids() {
        if src == gw {
            continue;
        }
        let path = tree.path_to_gateway(src)?;
        let delivered = flow_throughput(&path, &loads, spec)?;
        flows.push(FlowStat {
            source: src,
            offered: spec.rate_mbps,
            delivered,
        });
    }
    let average_throughput = if flows.is_empty() {
        None
    } else {
        Some(flows.iter().map(|f| f.delivered).sum::<f64>() / flows.len() as f64)
    };
    Ok(SimReport {
        gateway: gw,
        flows,
        average_throughput,
    })
}
