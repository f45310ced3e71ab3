//! Planar unit-disk mesh topologies: generation, validation, persistence,
//! and queries.
//!
//! A topology is an ordered set of node positions on a square area plus a
//! coverage radius. Two nodes share a wireless link exactly when their
//! Euclidean distance is at most the coverage radius; adjacency is always
//! derived from positions, never stored, so it cannot drift out of sync.

use std::collections::VecDeque;
use std::fmt;
use std::fs;
use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Identity of the position generator, recorded in experiment metadata so
/// CSV outputs stay traceable to the stream that produced them. Seeding goes
/// through `seed_from_u64`; coordinates are drawn as 53-bit uniforms from the
/// raw ChaCha8 output, x before y, node 0 first.
pub const GENERATOR_ID: &str = "rand_chacha-0.3/chacha8/u53";

/// Redraw budget for random generation before giving up on connectivity.
pub const DEFAULT_MAX_ATTEMPTS: usize = 1000;

/// Dense node identifier, valid in `[0, node_count)`. Grid nodes are
/// numbered row-major from the origin corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A point in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Straight-line distance to another position.
    ///
    /// Written as `sqrt(dx² + dy²)` on purpose: every step is correctly
    /// rounded IEEE arithmetic, so results are identical across platforms.
    pub fn distance(&self, other: &Position) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy).sqrt()
    }
}

/// An immutable unit-disk mesh: node positions, the square area that
/// contains them, and the coverage radius that induces links.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    area_side: f64,
    coverage_radius: f64,
    positions: Vec<Position>,
}

impl Topology {
    /// Validates and builds a topology. Rejects empty node lists, coincident
    /// nodes, and positions outside `[0, area_side]²`.
    pub fn new(area_side: f64, coverage_radius: f64, positions: Vec<Position>) -> Result<Self> {
        if !(area_side.is_finite() && area_side > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "area_side must be a positive finite length, got {area_side}"
            )));
        }
        if !(coverage_radius.is_finite() && coverage_radius > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "coverage_radius must be a positive finite length, got {coverage_radius}"
            )));
        }
        if positions.is_empty() {
            return Err(Error::EmptyTopology);
        }
        for (i, p) in positions.iter().enumerate() {
            let in_bounds = p.x.is_finite()
                && p.y.is_finite()
                && (0.0..=area_side).contains(&p.x)
                && (0.0..=area_side).contains(&p.y);
            if !in_bounds {
                return Err(Error::OutOfBounds {
                    node: NodeId(i),
                    x: p.x,
                    y: p.y,
                    area_side,
                });
            }
        }
        if let Some((a, b)) = find_coincident(&positions) {
            return Err(Error::CoincidentNodes { a, b });
        }
        Ok(Self {
            area_side,
            coverage_radius,
            positions,
        })
    }

    pub fn node_count(&self) -> usize {
        self.positions.len()
    }

    pub fn area_side(&self) -> f64 {
        self.area_side
    }

    pub fn coverage_radius(&self) -> f64 {
        self.coverage_radius
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count()).map(NodeId)
    }

    pub fn positions(&self) -> &[Position] {
        &self.positions
    }

    pub fn position(&self, i: NodeId) -> Result<Position> {
        self.check_node(i)?;
        Ok(self.positions[i.0])
    }

    pub fn distance(&self, i: NodeId, j: NodeId) -> Result<f64> {
        self.check_node(i)?;
        self.check_node(j)?;
        Ok(self.positions[i.0].distance(&self.positions[j.0]))
    }

    /// True when `i` and `j` are distinct and within the coverage radius.
    pub fn is_edge(&self, i: NodeId, j: NodeId) -> Result<bool> {
        self.check_node(i)?;
        self.check_node(j)?;
        Ok(i != j && self.positions[i.0].distance(&self.positions[j.0]) <= self.coverage_radius)
    }

    /// Neighbors of `i` in ascending id order.
    pub fn neighbors(&self, i: NodeId) -> Result<Vec<NodeId>> {
        self.check_node(i)?;
        Ok(self.neighbors_unchecked(i.0))
    }

    pub fn degree(&self, i: NodeId) -> Result<usize> {
        Ok(self.neighbors(i)?.len())
    }

    /// All links as `(i, j)` pairs with `i < j`, ascending.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let n = self.node_count();
        let mut out = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.positions[i].distance(&self.positions[j]) <= self.coverage_radius {
                    out.push((NodeId(i), NodeId(j)));
                }
            }
        }
        out
    }

    /// True when a breadth-first search from node 0 reaches every node.
    pub fn is_connected(&self) -> bool {
        self.hop_counts(NodeId(0))
            .expect("node 0 exists in a non-empty topology")
            .iter()
            .all(Option::is_some)
    }

    /// Hop count from `src` to every node; `None` marks unreachable nodes.
    /// Neighbors are scanned in ascending id order.
    pub(crate) fn hop_counts(&self, src: NodeId) -> Result<Vec<Option<u32>>> {
        self.check_node(src)?;
        let n = self.node_count();
        let mut hops: Vec<Option<u32>> = vec![None; n];
        hops[src.0] = Some(0);
        let mut queue = VecDeque::from([src.0]);
        while let Some(u) = queue.pop_front() {
            let next = hops[u].expect("queued nodes have hop counts") + 1;
            for v in self.neighbors_unchecked(u) {
                if hops[v.0].is_none() {
                    hops[v.0] = Some(next);
                    queue.push_back(v.0);
                }
            }
        }
        Ok(hops)
    }

    /// First node a BFS from node 0 fails to reach, if any.
    pub(crate) fn first_unreachable(&self) -> Option<NodeId> {
        self.hop_counts(NodeId(0))
            .expect("node 0 exists in a non-empty topology")
            .iter()
            .position(Option::is_none)
            .map(NodeId)
    }

    fn neighbors_unchecked(&self, i: usize) -> Vec<NodeId> {
        let p = self.positions[i];
        (0..self.node_count())
            .filter(|&j| j != i && p.distance(&self.positions[j]) <= self.coverage_radius)
            .map(NodeId)
            .collect()
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

    /// Writes the topology as pretty-printed JSON (see the file schema on
    /// [`Topology::load`]). Positions serialize with exact round-trip
    /// decimal text.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(&TopologyFile::from(self))
            .map_err(|e| Error::Internal(format!("topology serialization failed: {e}")))?;
        text.push('\n');
        fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })
    }

    /// Reads a topology from a JSON file of the form
    /// `{"area_side": .., "coverage_radius": .., "nodes": [{"id", "x", "y"}, ..]}`
    /// with ids dense and ascending. All construction invariants are
    /// re-validated, so hand-edited files cannot smuggle in coincident or
    /// out-of-bounds nodes.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        let file: TopologyFile = serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_owned(),
            detail: e.to_string(),
        })?;
        file.into_topology()
    }

    /// Canonical single-line JSON form; the digest input for [`Self::sha256_hex`].
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&TopologyFile::from(self))
            .expect("validated topologies always serialize")
    }

    /// Digest of the canonical JSON form, independent of file whitespace.
    pub fn sha256_hex(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

fn find_coincident(positions: &[Position]) -> Option<(NodeId, NodeId)> {
    let mut order: Vec<usize> = (0..positions.len()).collect();
    order.sort_by(|&a, &b| {
        positions[a]
            .x
            .total_cmp(&positions[b].x)
            .then(positions[a].y.total_cmp(&positions[b].y))
    });
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        if positions[a].x == positions[b].x && positions[a].y == positions[b].y {
            return Some((NodeId(a.min(b)), NodeId(a.max(b))));
        }
    }
    None
}

#[derive(Serialize, Deserialize)]
struct TopologyFile {
    area_side: f64,
    coverage_radius: f64,
    nodes: Vec<NodeRecord>,
}

#[derive(Serialize, Deserialize)]
struct NodeRecord {
    id: usize,
    x: f64,
    y: f64,
}

impl From<&Topology> for TopologyFile {
    fn from(t: &Topology) -> Self {
        Self {
            area_side: t.area_side,
            coverage_radius: t.coverage_radius,
            nodes: t
                .positions
                .iter()
                .enumerate()
                .map(|(id, p)| NodeRecord { id, x: p.x, y: p.y })
                .collect(),
        }
    }
}

impl TopologyFile {
    fn into_topology(self) -> Result<Topology> {
        for (i, rec) in self.nodes.iter().enumerate() {
            if rec.id != i {
                return Err(Error::InvalidIds(format!(
                    "ids must be dense and ascending; expected {i} at index {i}, found {}",
                    rec.id
                )));
            }
        }
        let positions = self.nodes.iter().map(|r| Position::new(r.x, r.y)).collect();
        Topology::new(self.area_side, self.coverage_radius, positions)
    }
}

/// Declarative description of a topology to generate.
#[derive(Debug, Clone)]
pub struct GenSpec {
    pub kind: GenKind,
    pub area_side: f64,
    pub coverage_radius: f64,
}

#[derive(Debug, Clone)]
pub enum GenKind {
    /// `rows × cols` lattice with the given spacing, anchored at the origin.
    Grid {
        rows: usize,
        cols: usize,
        spacing: f64,
    },
    /// `n` positions drawn uniformly over the area, redrawn until connected.
    Random { n: usize, seed: u64 },
}

impl GenSpec {
    pub fn grid(
        rows: usize,
        cols: usize,
        spacing: f64,
        area_side: f64,
        coverage_radius: f64,
    ) -> Self {
        Self {
            kind: GenKind::Grid {
                rows,
                cols,
                spacing,
            },
            area_side,
            coverage_radius,
        }
    }

    pub fn random(n: usize, seed: u64, area_side: f64, coverage_radius: f64) -> Self {
        Self {
            kind: GenKind::Random { n, seed },
            area_side,
            coverage_radius,
        }
    }

    pub fn generate(&self) -> Result<Topology> {
        match self.kind {
            GenKind::Grid {
                rows,
                cols,
                spacing,
            } => generate_grid(rows, cols, spacing, self.area_side, self.coverage_radius),
            GenKind::Random { n, seed } => generate_random(
                n,
                seed,
                self.area_side,
                self.coverage_radius,
                DEFAULT_MAX_ATTEMPTS,
            ),
        }
    }
}

/// Deterministic grid: node `row·cols + col` sits at `(col·spacing, row·spacing)`.
pub fn generate_grid(
    rows: usize,
    cols: usize,
    spacing: f64,
    area_side: f64,
    coverage_radius: f64,
) -> Result<Topology> {
    if rows < 1 || cols < 1 {
        return Err(Error::InvalidSpec(format!(
            "grid needs at least one row and one column, got {rows}x{cols}"
        )));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "grid spacing must be a positive finite length, got {spacing}"
        )));
    }
    let width = (cols - 1) as f64 * spacing;
    let height = (rows - 1) as f64 * spacing;
    if width > area_side || height > area_side {
        return Err(Error::InvalidSpec(format!(
            "grid footprint {width} m x {height} m exceeds the {area_side} m area side"
        )));
    }
    let mut positions = Vec::with_capacity(rows * cols);
    for row in 0..rows {
        for col in 0..cols {
            positions.push(Position::new(col as f64 * spacing, row as f64 * spacing));
        }
    }
    Topology::new(area_side, coverage_radius, positions)
}

/// Uniform random topology, redrawn whole until connected so the result
/// stays uniform conditional on connectivity. Fully reproducible from the
/// seed; see [`GENERATOR_ID`] for the stream identity.
pub fn generate_random(
    n: usize,
    seed: u64,
    area_side: f64,
    coverage_radius: f64,
    max_attempts: usize,
) -> Result<Topology> {
    if n < 1 {
        return Err(Error::InvalidSpec(format!(
            "random generation needs at least one node, got {n}"
        )));
    }
    if max_attempts < 1 {
        return Err(Error::InvalidSpec(
            "max_attempts must be at least 1".to_string(),
        ));
    }
    for attempt in 0..max_attempts {
        let mut rng = ChaCha8Rng::seed_from_u64(attempt_seed(seed, attempt));
        let positions: Vec<Position> = (0..n)
            .map(|_| {
                let x = unit_f64(&mut rng) * area_side;
                let y = unit_f64(&mut rng) * area_side;
                Position::new(x, y)
            })
            .collect();
        let topology = match Topology::new(area_side, coverage_radius, positions) {
            Ok(t) => t,
            // Coincident draws are measure-zero; redraw rather than fail.
            Err(Error::CoincidentNodes { .. }) => continue,
            Err(e) => return Err(e),
        };
        if topology.is_connected() {
            return Ok(topology);
        }
    }
    Err(Error::GenerationFailed {
        seed,
        radius: coverage_radius,
        attempts: max_attempts,
    })
}

/// 53-bit uniform in `[0, 1)` taken directly from the raw 64-bit stream.
fn unit_f64(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Stream seed for the k-th redraw. Attempts advance by a 64-bit odd
/// constant so retry streams do not collide with neighboring base seeds.
fn attempt_seed(seed: u64, attempt: usize) -> u64 {
    seed.wrapping_add((attempt as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}
