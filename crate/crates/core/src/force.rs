//! Coulomb-style node scoring: pairwise forces with node degree as charge,
//! per-node accumulation over in-radius neighbors, ranking, and gateway
//! selection, plus classical centrality baselines for comparison.

use crate::error::{Error, Result};
use crate::topology::{NodeId, Topology};

/// A node's charge: its degree in the unit-disk graph, nothing else.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Charge(pub usize);

impl From<usize> for Charge {
    fn from(q: usize) -> Self {
        Charge(q)
    }
}

/// Parameters of the force accumulation.
///
/// `force_radius = None` reuses the topology's coverage radius, so one
/// radius serves both link connectivity and force accumulation by default.
#[derive(Debug, Clone, Copy)]
pub struct ForceParams {
    /// Coupling constant. Rescales reported magnitudes only; the ranking is
    /// computed on k-free sums and provably never depends on it.
    pub k: f64,
    /// Accumulation radius in meters; pairs farther apart contribute
    /// exactly zero.
    pub force_radius: Option<f64>,
}

impl Default for ForceParams {
    fn default() -> Self {
        Self {
            k: 1.0,
            force_radius: None,
        }
    }
}

impl ForceParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "coupling k must be positive and finite, got {}",
                self.k
            )));
        }
        if let Some(r) = self.force_radius {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::InvalidSpec(format!(
                    "force_radius must be positive and finite, got {r}"
                )));
            }
        }
        Ok(())
    }

    pub fn radius_for(&self, t: &Topology) -> f64 {
        self.force_radius.unwrap_or_else(|| t.coverage_radius())
    }
}

/// Scores for every node plus the ordering they induce: descending score,
/// ties broken by ascending node id.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreReport {
    /// Score per node, indexed by node id.
    pub scores: Vec<f64>,
    /// All node ids, best first.
    pub ranking: Vec<NodeId>,
}

/// Interaction force between two charged nodes at separation `r`:
/// `k · |q1·q2| / r²`. Symmetric in the charges and strictly decreasing
/// in `r`.
pub fn pairwise_force(q1: Charge, q2: Charge, r: f64, k: f64) -> Result<f64> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "coupling k must be positive and finite, got {k}"
        )));
    }
    if r <= 0.0 || r.is_nan() {
        return Err(Error::NonPositiveDistance { r });
    }
    Ok(k * (q1.0 as f64 * q2.0 as f64) / (r * r))
}

/// Cumulative force on node `i`: the sum of pairwise forces against every
/// other node within the force radius. Terms are added in ascending
/// neighbor id order so results are bit-reproducible; an isolated node
/// gets exactly zero.
pub fn node_force(t: &Topology, i: NodeId, p: &ForceParams) -> Result<f64> {
    p.validate()?;
    if i.index() >= t.node_count() {
        return Err(Error::UnknownNode {
            id: i,
            count: t.node_count(),
        });
    }
    let charges = unit_disk_charges(t);
    Ok(p.k * raw_force_sum(t, i.index(), p.radius_for(t), &charges))
}

/// Scores every node and ranks them by descending force.
///
/// The ordering is computed on the k-free sums and the coupling is applied
/// once at the end, so the returned permutation is identical for every
/// positive `k` down to the last bit.
pub fn rank_by_force(t: &Topology, p: &ForceParams) -> Result<ScoreReport> {
    p.validate()?;
    let radius = p.radius_for(t);
    let charges = unit_disk_charges(t);
    let raw: Vec<f64> = (0..t.node_count())
        .map(|i| raw_force_sum(t, i, radius, &charges))
        .collect();
    let ranking = rank_descending(&raw);
    let scores = raw.iter().map(|s| p.k * s).collect();
    Ok(ScoreReport { scores, ranking })
}

/// The gateway pick: the node with the highest cumulative force.
pub fn select_gateway(t: &Topology, p: &ForceParams) -> Result<NodeId> {
    Ok(rank_by_force(t, p)?.ranking[0])
}

/// Classical centrality scorers sharing the [`ScoreReport`] contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMetric {
    Degree,
    /// `(N−1) / Σ hop_distance`; requires a connected topology.
    Closeness,
}

pub fn baseline_score(t: &Topology, metric: BaselineMetric) -> Result<ScoreReport> {
    let scores: Vec<f64> = match metric {
        BaselineMetric::Degree => t
            .node_ids()
            .map(|i| t.degree(i).map(|d| d as f64))
            .collect::<Result<_>>()?,
        BaselineMetric::Closeness => closeness_scores(t)?,
    };
    let ranking = rank_descending(&scores);
    Ok(ScoreReport { scores, ranking })
}

fn closeness_scores(t: &Topology) -> Result<Vec<f64>> {
    let n = t.node_count();
    let mut scores = Vec::with_capacity(n);
    for i in t.node_ids() {
        let hops = t.hop_counts(i)?;
        if let Some(u) = hops.iter().position(Option::is_none) {
            return Err(Error::Disconnected {
                unreachable: NodeId(u),
            });
        }
        let total: u64 = hops.iter().map(|h| u64::from(h.unwrap())).sum();
        scores.push(if total == 0 {
            0.0 // singleton
        } else {
            (n - 1) as f64 / total as f64
        });
    }
    Ok(scores)
}

/// Degree of every node under the topology's own coverage radius.
fn unit_disk_charges(t: &Topology) -> Vec<usize> {
    t.node_ids()
        .map(|i| t.degree(i).expect("ids come from the topology"))
        .collect()
}

/// k-free cumulative sum for one node, ascending neighbor id order.
fn raw_force_sum(t: &Topology, i: usize, radius: f64, charges: &[usize]) -> f64 {
    let positions = t.positions();
    let qi = charges[i] as f64;
    let mut sum = 0.0;
    for j in 0..positions.len() {
        if j == i {
            continue;
        }
        let r = positions[i].distance(&positions[j]);
        if r <= radius {
            sum += qi * charges[j] as f64 / (r * r);
        }
    }
    sum
}

fn rank_descending(scores: &[f64]) -> Vec<NodeId> {
    let mut ids: Vec<usize> = (0..scores.len()).collect();
    ids.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    ids.into_iter().map(NodeId).collect()
}
