//! The validation loop: sweep every candidate gateway, pair force scores
//! with simulated average throughput, compute correlation statistics, and
//! emit CSV reports.

use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::force::{rank_by_force, ForceParams};
use crate::simulator::{simulate_gateway, TrafficSpec};
use crate::topology::{generate_random, NodeId, Topology, DEFAULT_MAX_ATTEMPTS, GENERATOR_ID};

/// One sweep row: everything known about a candidate gateway.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub node: NodeId,
    pub force: f64,
    pub degree: usize,
    /// `None` only for the degenerate single-node sweep.
    pub avg_throughput: Option<f64>,
    /// 1 = highest force; ties get average ranks, so values may be
    /// fractional.
    pub force_rank: f64,
    pub throughput_rank: Option<f64>,
}

/// Provenance recorded with every sweep so CSVs are reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepMeta {
    pub topology_sha256: String,
    /// Seed of the generating stream when known; `None` for loaded files.
    pub seed: Option<u64>,
    pub rng: &'static str,
    pub k: f64,
    pub force_radius: f64,
    pub rate_mbps: f64,
    pub capacity_mbps: f64,
    pub packet_size: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    /// Exactly one row per node, ascending node id.
    pub rows: Vec<SweepRow>,
    pub meta: SweepMeta,
}

/// A correlation statistic that is explicitly undefined when either
/// variable has zero variance, rather than silently NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CorrValue {
    Defined(f64),
    Undefined,
}

impl CorrValue {
    pub fn value(&self) -> Option<f64> {
        match self {
            CorrValue::Defined(v) => Some(*v),
            CorrValue::Undefined => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, CorrValue::Defined(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationReport {
    pub pearson: CorrValue,
    pub spearman: CorrValue,
    pub n: usize,
}

impl CorrelationReport {
    pub fn undefined(n: usize) -> Self {
        Self {
            pearson: CorrValue::Undefined,
            spearman: CorrValue::Undefined,
            n,
        }
    }
}

/// Treats every node in turn as the gateway and records its force score
/// next to the simulated average throughput. Rows come back in node id
/// order regardless of how the per-gateway simulations were scheduled.
pub fn sweep(t: &Topology, p: &ForceParams, spec: &TrafficSpec) -> Result<SweepReport> {
    p.validate()?;
    spec.validate()?;
    if let Some(u) = t.first_unreachable() {
        return Err(Error::Disconnected { unreachable: u });
    }

    let force_report = rank_by_force(t, p)?;
    let sims: Vec<Result<Option<f64>>> = t
        .node_ids()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|gw| simulate_gateway(t, gw, spec).map(|r| r.average_throughput))
        .collect();
    let mut throughputs = Vec::with_capacity(t.node_count());
    for s in sims {
        throughputs.push(s?);
    }

    let n = t.node_count();
    let force_ranks = descending_ranks(&force_report.scores);
    let throughput_ranks: Option<Vec<f64>> = if throughputs.iter().all(Option::is_some) {
        let vals: Vec<f64> = throughputs.iter().map(|v| v.unwrap()).collect();
        Some(descending_ranks(&vals))
    } else {
        None
    };

    let rows = (0..n)
        .map(|i| SweepRow {
            node: NodeId(i),
            force: force_report.scores[i],
            degree: t.degree(NodeId(i)).expect("ids come from the topology"),
            avg_throughput: throughputs[i],
            force_rank: force_ranks[i],
            throughput_rank: throughput_ranks.as_ref().map(|r| r[i]),
        })
        .collect();

    Ok(SweepReport {
        rows,
        meta: SweepMeta {
            topology_sha256: t.sha256_hex(),
            seed: None,
            rng: GENERATOR_ID,
            k: p.k,
            force_radius: p.radius_for(t),
            rate_mbps: spec.rate_mbps,
            capacity_mbps: spec.capacity_mbps,
            packet_size: spec.packet_size,
        },
    })
}

/// Pearson on the raw (force, throughput) pairs and Spearman via the
/// average-rank transform. Either statistic degrades to `Undefined` when a
/// variable has zero variance.
pub fn correlate(report: &SweepReport) -> Result<CorrelationReport> {
    let pairs: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter_map(|r| r.avg_throughput.map(|a| (r.force, a)))
        .collect();
    let n = pairs.len();
    if n < 2 {
        return Err(Error::InsufficientSamples { n });
    }
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    Ok(CorrelationReport {
        pearson: pearson(&xs, &ys),
        spearman: spearman(&xs, &ys),
        n,
    })
}

/// Pearson correlation, `Undefined` when either input is constant.
pub fn pearson(xs: &[f64], ys: &[f64]) -> CorrValue {
    debug_assert_eq!(xs.len(), ys.len());
    if all_equal(xs) || all_equal(ys) {
        return CorrValue::Undefined;
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        cov += dx * dy;
        vx += dx * dx;
        vy += dy * dy;
    }
    CorrValue::Defined((cov / (vx.sqrt() * vy.sqrt())).clamp(-1.0, 1.0))
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> CorrValue {
    if all_equal(xs) || all_equal(ys) {
        return CorrValue::Undefined;
    }
    pearson(&average_ranks(xs), &average_ranks(ys))
}

/// Ascending 1-based ranks; tied values share the average of the positions
/// they occupy. Inputs must be finite.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // Positions start+1 ..= end share their mean rank.
        let avg = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = avg;
        }
        start = end;
    }
    ranks
}

/// 1 = largest value; fractional on ties.
fn descending_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len() as f64;
    average_ranks(values)
        .into_iter()
        .map(|r| n + 1.0 - r)
        .collect()
}

fn all_equal(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[0] == w[1])
}

/// Nine significant digits, scientific notation; the CSV number format.
pub fn format_sig9(x: f64) -> String {
    format!("{x:.8e}")
}

fn format_corr(v: &CorrValue) -> String {
    match v {
        CorrValue::Defined(x) => format_sig9(*x),
        CorrValue::Undefined => "undefined".to_string(),
    }
}

fn format_rank(r: f64) -> String {
    format!("{r}")
}

/// Renders the sweep CSV: `#`-prefixed metadata lines, a header, then one
/// row per node. Byte-identical across runs for identical inputs.
pub fn csv_string(report: &SweepReport, corr: &CorrelationReport) -> String {
    let m = &report.meta;
    let mut out = String::new();
    out.push_str(&format!("# rng={}\n", m.rng));
    out.push_str(&match m.seed {
        Some(s) => format!("# seed={s}\n"),
        None => "# seed=none\n".to_string(),
    });
    out.push_str(&format!("# k={}\n", m.k));
    out.push_str(&format!("# force_radius={}\n", m.force_radius));
    out.push_str(&format!("# rate_mbps={}\n", m.rate_mbps));
    out.push_str(&format!("# capacity_mbps={}\n", m.capacity_mbps));
    out.push_str(&format!("# packet_size={}\n", m.packet_size));
    out.push_str(&format!("# topology_sha256={}\n", m.topology_sha256));
    out.push_str(&format!("# pearson={}\n", format_corr(&corr.pearson)));
    out.push_str(&format!("# spearman={}\n", format_corr(&corr.spearman)));
    out.push_str("node_id,force,degree,avg_throughput_mbps,force_rank,throughput_rank\n");
    for r in &report.rows {
        let avg = r
            .avg_throughput
            .map(format_sig9)
            .unwrap_or_else(|| "undefined".to_string());
        let trank = r
            .throughput_rank
            .map(format_rank)
            .unwrap_or_else(|| "undefined".to_string());
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.node,
            format_sig9(r.force),
            r.degree,
            avg,
            format_rank(r.force_rank),
            trank
        ));
    }
    out
}

pub fn emit_csv(
    report: &SweepReport,
    corr: &CorrelationReport,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, csv_string(report, corr)).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

/// Configuration for a seeded ensemble of random-topology sweeps.
#[derive(Debug, Clone)]
pub struct BatchConfig {
    pub n_topologies: usize,
    pub base_seed: u64,
    pub n_nodes: usize,
    pub area_side: f64,
    pub coverage_radius: f64,
    pub force: ForceParams,
    pub traffic: TrafficSpec,
}

impl Default for BatchConfig {
    fn default() -> Self {
        Self {
            n_topologies: 10,
            base_seed: 1000,
            n_nodes: 25,
            area_side: 1000.0,
            coverage_radius: 275.0,
            force: ForceParams::default(),
            traffic: TrafficSpec::default(),
        }
    }
}

/// One seed's outcome within a batch.
#[derive(Debug)]
pub struct BatchRun {
    pub seed: u64,
    pub result: Result<BatchSweep>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchSweep {
    pub report: SweepReport,
    pub correlation: CorrelationReport,
}

/// Sweeps an ensemble of seeded random topologies with seeds `base_seed,
/// base_seed+1, ...`. A seed whose generation or sweep fails is recorded in
/// its slot without aborting the rest.
pub fn batch_random(cfg: &BatchConfig) -> Result<Vec<BatchRun>> {
    if cfg.n_topologies < 1 {
        return Err(Error::InvalidSpec(
            "batch needs at least one topology".to_string(),
        ));
    }
    cfg.force.validate()?;
    cfg.traffic.validate()?;
    let seeds: Vec<u64> = (0..cfg.n_topologies as u64)
        .map(|i| cfg.base_seed.wrapping_add(i))
        .collect();
    let runs = seeds
        .into_par_iter()
        .map(|seed| {
            let result = generate_random(
                cfg.n_nodes,
                seed,
                cfg.area_side,
                cfg.coverage_radius,
                DEFAULT_MAX_ATTEMPTS,
            )
            .and_then(|t| {
                let mut report = sweep(&t, &cfg.force, &cfg.traffic)?;
                report.meta.seed = Some(seed);
                let correlation = correlate(&report)?;
                Ok(BatchSweep {
                    report,
                    correlation,
                })
            });
            BatchRun { seed, result }
        })
        .collect();
    Ok(runs)
}
