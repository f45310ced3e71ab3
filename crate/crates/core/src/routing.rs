//! Deterministic shortest-hop routes from every node to a gateway.
//!
//! Stands in for a proactive link-state protocol at steady state on a static
//! topology, where routes are hop-count shortest paths. Ties between equal
//! hop-count predecessors go to the lowest node id so routes are identical
//! across runs and implementations.

use crate::error::{Error, Result};
use crate::topology::{NodeId, Topology};

/// Shortest-hop tree rooted at a gateway. The gateway's next hop is itself
/// and its hop count is zero; following `next_hop` from any node reaches the
/// gateway in exactly `hops` steps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutingTree {
    gateway: NodeId,
    next_hop: Vec<NodeId>,
    hops: Vec<u32>,
}

impl RoutingTree {
    pub fn gateway(&self) -> NodeId {
        self.gateway
    }

    pub fn node_count(&self) -> usize {
        self.next_hop.len()
    }

    pub fn hops(&self, i: NodeId) -> Result<u32> {
        self.check_node(i)?;
        Ok(self.hops[i.0])
    }

    pub fn next_hop(&self, i: NodeId) -> Result<NodeId> {
        self.check_node(i)?;
        Ok(self.next_hop[i.0])
    }

    /// The unique next-hop walk from `src`; first element `src`, last the
    /// gateway, `hops(src) + 1` entries in total.
    pub fn path_to_gateway(&self, src: NodeId) -> Result<Vec<NodeId>> {
        self.check_node(src)?;
        let mut path = Vec::with_capacity(self.hops[src.0] as usize + 1);
        let mut cur = src;
        path.push(cur);
        while cur != self.gateway {
            cur = self.next_hop[cur.0];
            path.push(cur);
        }
        Ok(path)
    }

    fn check_node(&self, i: NodeId) -> Result<()> {
        if i.0 < self.node_count() {
            Ok(())
        } else {
            Err(Error::UnknownNode {
                id: i,
                count: self.node_count(),
            })
        }
    }
}

/// Breadth-first shortest-hop tree toward `gw`. When several predecessors
/// offer the same hop count, the lowest id wins.
pub fn build_routing_tree(t: &Topology, gw: NodeId) -> Result<RoutingTree> {
    let n = t.node_count();
    if gw.0 >= n {
        return Err(Error::UnknownNode { id: gw, count: n });
    }
    let hops_opt = t.hop_counts(gw)?;
    if let Some(u) = hops_opt.iter().position(Option::is_none) {
        return Err(Error::Disconnected {
            unreachable: NodeId(u),
        });
    }
    let hops: Vec<u32> = hops_opt.into_iter().map(Option::unwrap).collect();

    let mut next_hop = Vec::with_capacity(n);
    for i in 0..n {
        if i == gw.0 {
            next_hop.push(gw);
            continue;
        }
        // Neighbors come back in ascending id order, so the first one a hop
        // closer is the lowest-id predecessor.
        let parent = t
            .neighbors(NodeId(i))?
            .into_iter()
            .find(|j| hops[j.0] + 1 == hops[i])
            .ok_or_else(|| Error::Internal(format!("node {i} has no predecessor toward {gw}")))?;
        next_hop.push(parent);
    }
    Ok(RoutingTree {
        gateway: gw,
        next_hop,
        hops,
    })
}
