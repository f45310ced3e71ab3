//! Command-line front door for the gateway placement toolkit.
//!
//! Subcommands chain through the topology JSON schema: `gen-grid` and
//! `gen-random` write topology files; `score`, `route`, `simulate`,
//! `sweep`, and `batch` consume them. Human-readable tables go to stdout,
//! machine output goes only to `--out`/`--out-dir` paths, and diagnostics
//! go to stderr.
//!
//! Exit codes: 0 ok, 1 i/o, 2 validation, 3 generation, 4 disconnected
//! topology.

use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand, ValueEnum};

use meshforce::experiment::{
    batch_random, correlate, emit_csv, format_sig9, sweep, BatchConfig, CorrValue,
    CorrelationReport, SweepReport,
};
use meshforce::force::{baseline_score, rank_by_force, BaselineMetric, ForceParams};
use meshforce::routing::build_routing_tree;
use meshforce::simulator::{simulate_gateway, TrafficSpec};
use meshforce::topology::{generate_grid, generate_random, NodeId, Topology, DEFAULT_MAX_ATTEMPTS};
use meshforce::Error;

#[derive(Parser)]
#[command(
    name = "meshforce",
    version,
    about = "Gateway placement for wireless mesh networks: Coulomb-force scoring \
             with a flow-level throughput validator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a rows x cols grid topology and write it as JSON.
    GenGrid {
        /// Grid rows.
        #[arg(long, default_value_t = 5)]
        rows: usize,
        /// Grid columns.
        #[arg(long, default_value_t = 5)]
        cols: usize,
        /// Distance between neighboring grid nodes, meters.
        #[arg(long, default_value_t = 250.0)]
        spacing: f64,
        /// Side of the square deployment area, meters.
        #[arg(long, default_value_t = 1000.0)]
        area: f64,
        /// Coverage radius inducing links, meters.
        #[arg(long, default_value_t = 262.5)]
        radius: f64,
        /// Output topology file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a connected uniform-random topology and write it as JSON.
    GenRandom {
        /// Number of nodes.
        #[arg(long, default_value_t = 25)]
        n: usize,
        /// Side of the square deployment area, meters.
        #[arg(long, default_value_t = 1000.0)]
        area: f64,
        /// Coverage radius inducing links, meters.
        #[arg(long, default_value_t = 275.0)]
        radius: f64,
        /// RNG seed; equal seeds reproduce the topology bit for bit.
        #[arg(long)]
        seed: u64,
        /// Output topology file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Score and rank all nodes of a topology.
    Score {
        /// Topology file to score.
        #[arg(long)]
        topology: PathBuf,
        /// Force coupling constant (force metric only).
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Force accumulation radius, meters (force metric only;
        /// default: the topology's coverage radius).
        #[arg(long)]
        force_radius: Option<f64>,
        /// Scoring metric.
        #[arg(long, value_enum, default_value_t = Metric::Force)]
        metric: Metric,
    },
    /// Print the shortest-hop routing table toward a gateway.
    Route {
        /// Topology file.
        #[arg(long)]
        topology: PathBuf,
        /// Gateway node id.
        #[arg(long)]
        gateway: usize,
    },
    /// Simulate constant-rate flows toward one gateway.
    Simulate {
        /// Topology file.
        #[arg(long)]
        topology: PathBuf,
        /// Gateway node id.
        #[arg(long)]
        gateway: usize,
        /// Offered rate per source, Mbit/s.
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        /// Link capacity, Mbit/s.
        #[arg(long, default_value_t = 5.0)]
        capacity: f64,
        /// Nominal packet size, bytes (report metadata only).
        #[arg(long, default_value_t = 1024)]
        packet_size: u32,
    },
    /// Treat every node as the gateway, simulate each, and write the
    /// force-vs-throughput CSV.
    Sweep {
        /// Topology file.
        #[arg(long)]
        topology: PathBuf,
        /// Force coupling constant.
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Force accumulation radius, meters (default: coverage radius).
        #[arg(long)]
        force_radius: Option<f64>,
        /// Offered rate per source, Mbit/s.
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        /// Link capacity, Mbit/s.
        #[arg(long, default_value_t = 5.0)]
        capacity: f64,
        /// Nominal packet size, bytes (report metadata only).
        #[arg(long, default_value_t = 1024)]
        packet_size: u32,
        /// Worker thread cap; 0 means all available parallelism.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Output CSV file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep an ensemble of seeded random topologies and write one CSV per
    /// seed.
    Batch {
        /// Number of topologies in the ensemble.
        #[arg(long)]
        n_topologies: usize,
        /// First seed; later topologies use base_seed+1, base_seed+2, ...
        #[arg(long)]
        base_seed: u64,
        /// Nodes per topology.
        #[arg(long, default_value_t = 25)]
        n: usize,
        /// Side of the square deployment area, meters.
        #[arg(long, default_value_t = 1000.0)]
        area: f64,
        /// Coverage radius inducing links, meters.
        #[arg(long, default_value_t = 275.0)]
        radius: f64,
        /// Force coupling constant.
        #[arg(long, default_value_t = 1.0)]
        k: f64,
        /// Force accumulation radius, meters (default: coverage radius).
        #[arg(long)]
        force_radius: Option<f64>,
        /// Offered rate per source, Mbit/s.
        #[arg(long, default_value_t = 1.0)]
        rate: f64,
        /// Link capacity, Mbit/s.
        #[arg(long, default_value_t = 5.0)]
        capacity: f64,
        /// Nominal packet size, bytes (report metadata only).
        #[arg(long, default_value_t = 1024)]
        packet_size: u32,
        /// Worker thread cap; 0 means all available parallelism.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Directory receiving one sweep CSV per seed.
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Metric {
    Force,
    Degree,
    Closeness,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e}");
        process::exit(exit_code(&e));
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } | Error::Internal(_) => 1,
        Error::GenerationFailed { .. } => 3,
        Error::Disconnected { .. } => 4,
        _ => 2,
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::GenGrid {
            rows,
            cols,
            spacing,
            area,
            radius,
            out,
        } => {
            let t = generate_grid(rows, cols, spacing, area, radius)?;
            t.save(&out)?;
            println!(
                "wrote {}-node grid topology ({rows}x{cols}, spacing {spacing} m) to {}",
                t.node_count(),
                out.display()
            );
            Ok(())
        }
        Command::GenRandom {
            n,
            area,
            radius,
            seed,
            out,
        } => {
            let t = generate_random(n, seed, area, radius, DEFAULT_MAX_ATTEMPTS)?;
            t.save(&out)?;
            println!(
                "wrote {}-node connected random topology (seed {seed}) to {}",
                t.node_count(),
                out.display()
            );
            Ok(())
        }
        Command::Score {
            topology,
            k,
            force_radius,
            metric,
        } => {
            let t = Topology::load(&topology)?;
            let report = match metric {
                Metric::Force => {
                    let p = ForceParams { k, force_radius };
                    rank_by_force(&t, &p)?
                }
                Metric::Degree => baseline_score(&t, BaselineMetric::Degree)?,
                Metric::Closeness => baseline_score(&t, BaselineMetric::Closeness)?,
            };
            println!(
                "node scores for {} ({} nodes, metric {:?})",
                topology.display(),
                t.node_count(),
                metric
            );
            println!(
                "{:>5}  {:>5}  {:>15}  {:>6}",
                "rank", "node", "score", "degree"
            );
            for (pos, &id) in report.ranking.iter().enumerate() {
                println!(
                    "{:>5}  {:>5}  {:>15}  {:>6}",
                    pos + 1,
                    id,
                    format_sig9(report.scores[id.index()]),
                    t.degree(id)?
                );
            }
            Ok(())
        }
        Command::Route { topology, gateway } => {
            let t = Topology::load(&topology)?;
            let tree = build_routing_tree(&t, NodeId(gateway))?;
            println!(
                "shortest-hop routes toward gateway {gateway} ({} nodes)",
                t.node_count()
            );
            println!("{:>5}  {:>5}  {:>8}", "node", "hops", "next_hop");
            for i in t.node_ids() {
                println!("{:>5}  {:>5}  {:>8}", i, tree.hops(i)?, tree.next_hop(i)?);
            }
            Ok(())
        }
        Command::Simulate {
            topology,
            gateway,
            rate,
            capacity,
            packet_size,
        } => {
            let t = Topology::load(&topology)?;
            let spec = TrafficSpec {
                rate_mbps: rate,
                capacity_mbps: capacity,
                packet_size,
            };
            let report = simulate_gateway(&t, NodeId(gateway), &spec)?;
            println!(
                "flow throughput with gateway {gateway} (rate {rate} Mbit/s, capacity {capacity} Mbit/s)"
            );
            println!(
                "{:>6}  {:>15}  {:>15}",
                "source", "offered_mbps", "delivered_mbps"
            );
            for f in &report.flows {
                println!(
                    "{:>6}  {:>15}  {:>15}",
                    f.source,
                    format_sig9(f.offered),
                    format_sig9(f.delivered)
                );
            }
            match report.average_throughput {
                Some(avg) => println!("average_throughput_mbps: {}", format_sig9(avg)),
                None => println!("average_throughput_mbps: undefined (no flows)"),
            }
            Ok(())
        }
        Command::Sweep {
            topology,
            k,
            force_radius,
            rate,
            capacity,
            packet_size,
            threads,
            out,
        } => {
            let t = Topology::load(&topology)?;
            let p = ForceParams { k, force_radius };
            let spec = TrafficSpec {
                rate_mbps: rate,
                capacity_mbps: capacity,
                packet_size,
            };
            let report = with_thread_cap(threads, || sweep(&t, &p, &spec))?;
            let corr = sweep_correlation(&report)?;
            emit_csv(&report, &corr, &out)?;
            print_sweep(&report, &corr, &out);
            Ok(())
        }
        Command::Batch {
            n_topologies,
            base_seed,
            n,
            area,
            radius,
            k,
            force_radius,
            rate,
            capacity,
            packet_size,
            threads,
            out_dir,
        } => {
            std::fs::create_dir_all(&out_dir).map_err(|source| Error::Io {
                path: out_dir.clone(),
                source,
            })?;
            let cfg = BatchConfig {
                n_topologies,
                base_seed,
                n_nodes: n,
                area_side: area,
                coverage_radius: radius,
                force: ForceParams { k, force_radius },
                traffic: TrafficSpec {
                    rate_mbps: rate,
                    capacity_mbps: capacity,
                    packet_size,
                },
            };
            let runs = with_thread_cap(threads, || batch_random(&cfg))?;
            let mut failures = 0usize;
            for run in &runs {
                match &run.result {
                    Ok(bs) => {
                        let path = out_dir.join(format!("sweep_{}.csv", run.seed));
                        emit_csv(&bs.report, &bs.correlation, &path)?;
                        println!(
                            "seed {}: pearson={} spearman={} n={} csv={}",
                            run.seed,
                            corr_text(&bs.correlation.pearson),
                            corr_text(&bs.correlation.spearman),
                            bs.correlation.n,
                            path.display()
                        );
                    }
                    Err(e) => {
                        failures += 1;
                        eprintln!("seed {}: {e}", run.seed);
                    }
                }
            }
            println!(
                "batch complete: {} succeeded, {} failed",
                runs.len() - failures,
                failures
            );
            Ok(())
        }
    }
}

/// Runs `f` inside a rayon pool capped at `threads` workers; 0 keeps the
/// default pool sized to the available parallelism.
fn with_thread_cap<T>(
    threads: usize,
    f: impl FnOnce() -> Result<T, Error> + Send,
) -> Result<T, Error>
where
    T: Send,
{
    if threads == 0 {
        f()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool construction failed: {e}")))?;
        pool.install(f)
    }
}

/// Correlation for a sweep; the degenerate single-node sweep has no flows
/// and gets explicit undefined markers instead of an error.
fn sweep_correlation(report: &SweepReport) -> Result<CorrelationReport, Error> {
    if report.rows.len() < 2 {
        return Ok(CorrelationReport::undefined(0));
    }
    correlate(report)
}

fn corr_text(v: &CorrValue) -> String {
    match v {
        CorrValue::Defined(x) => format_sig9(*x),
        CorrValue::Undefined => "undefined".to_string(),
    }
}

fn print_sweep(report: &SweepReport, corr: &CorrelationReport, out: &std::path::Path) {
    println!(
        "sweep of {} candidate gateways (k={}, force_radius={}, rate={} Mbit/s, capacity={} Mbit/s)",
        report.rows.len(),
        report.meta.k,
        report.meta.force_radius,
        report.meta.rate_mbps,
        report.meta.capacity_mbps
    );
    println!(
        "{:>5}  {:>15}  {:>6}  {:>15}  {:>10}  {:>10}",
        "node", "force", "degree", "avg_mbps", "force_rank", "thr_rank"
    );
    for r in &report.rows {
        println!(
            "{:>5}  {:>15}  {:>6}  {:>15}  {:>10}  {:>10}",
            r.node,
            format_sig9(r.force),
            r.degree,
            r.avg_throughput
                .map(format_sig9)
                .unwrap_or_else(|| "undefined".to_string()),
            r.force_rank,
            r.throughput_rank
                .map(|t| t.to_string())
                .unwrap_or_else(|| "undefined".to_string())
        );
    }
    println!("csv written to {}", out.display());
    if !corr.spearman.is_defined() {
        if report.rows.len() < 2 {
            eprintln!("warning: fewer than two candidate gateways; correlation is undefined");
        } else {
            eprintln!(
                "warning: throughput variance is zero (unsaturated traffic); correlation is \
                 undefined — increase --rate or decrease --capacity"
            );
        }
    }
    // Keep this line last: scripts scrape it.
    println!(
        "correlation: pearson={} spearman={} n={}",
        corr_text(&corr.pearson),
        corr_text(&corr.spearman),
        corr.n
    );
}
