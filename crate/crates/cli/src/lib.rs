//! Census commands: graph generation, per-graph enumeration, oracle
//! verification and timing reports.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use mdcensus::fatgraph::fatten;
use mdcensus::multigraph::{generate, MultiGraph};
use mdcensus::oracle::{cross_check, CrossCheckReport, OracleError};
use mdcensus::search::{enumerate, Statistics, Variant};
use mdcensus::tri::{decomposition_to_triangulation, triangulation_to_decomposition};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// One emitted decomposition, written as a JSON line.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensusRecord {
    /// Position of the graph in the input file (0-based, blank lines skipped).
    pub graph_index: usize,
    pub graph: String,
    pub variant: String,
    pub decomposition: String,
    pub gluing_table: String,
    pub vertices: usize,
    pub edges: usize,
    pub orientable: bool,
    /// True when the triangulation is a one-vertex 3-manifold. Always true for
    /// the unstarred variants.
    pub one_vertex_manifold: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatsRow {
    pub graph_index: usize,
    pub solutions: u64,
    pub nodes: u64,
    pub prune_budget: u64,
    pub prune_orient: u64,
    pub prune_canon: u64,
    pub prune_vertex: u64,
    pub cpu_seconds: f64,
}

impl StatsRow {
    fn new(graph_index: usize, s: &Statistics, cpu_seconds: f64) -> Self {
        Self {
            graph_index,
            solutions: s.solutions,
            nodes: s.nodes,
            prune_budget: s.prune_budget,
            prune_orient: s.prune_orient,
            prune_canon: s.prune_canon,
            prune_vertex: s.prune_vertex,
            cpu_seconds,
        }
    }
}

/// CPU time consumed by the calling thread.
pub fn thread_cpu_seconds() -> f64 {
    let mut ts = libc::timespec { tv_sec: 0, tv_nsec: 0 };
    // SAFETY: `ts` is a valid, writable timespec.
    let rc = unsafe { libc::clock_gettime(libc::CLOCK_THREAD_CPUTIME_ID, &mut ts) };
    if rc != 0 {
        return 0.0;
    }
    ts.tv_sec as f64 + ts.tv_nsec as f64 * 1e-9
}

pub struct GraphFile {
    pub graphs: Vec<(usize, MultiGraph)>,
    /// Unreadable lines, as "line N: reason".
    pub errors: Vec<String>,
}

/// Reads one graph per non-blank line. A bad line keeps its index so later
/// graphs stay aligned with generator order.
pub fn read_graphs(path: &Path) -> Result<GraphFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut graphs = Vec::new();
    let mut errors = Vec::new();
    let lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    for (index, (line_no, line)) in lines.enumerate() {
        match line.trim().parse::<MultiGraph>() {
            Ok(g) if g.is_four_regular() && g.is_connected() => graphs.push((index, g)),
            Ok(_) => errors.push(format!("line {}: not a connected 4-regular multigraph", line_no + 1)),
            Err(e) => errors.push(format!("line {}: {e}", line_no + 1)),
        }
    }
    Ok(GraphFile { graphs, errors })
}

fn create(path: &Path) -> Result<BufWriter<fs::File>> {
    let file = fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

/// Writes every connected 4-regular multigraph on `n` nodes, one per line.
pub fn cmd_gen_graphs(n: usize, out: &Path) -> Result<usize> {
    let graphs = generate(n);
    let mut w = create(out)?;
    for g in &graphs {
        writeln!(w, "{g}").with_context(|| format!("writing {}", out.display()))?;
    }
    w.flush().with_context(|| format!("writing {}", out.display()))?;
    Ok(graphs.len())
}

#[derive(Clone, Debug)]
pub struct EnumerateOptions {
    pub graphs: PathBuf,
    pub variant: Variant,
    pub out: PathBuf,
    pub stats: PathBuf,
    pub workers: usize,
    pub min_walk: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct EnumerateSummary {
    pub graphs: usize,
    pub records: usize,
    pub errors: Vec<String>,
}

fn census_graph(index: usize, g: &MultiGraph, opts: &EnumerateOptions) -> Result<(Vec<CensusRecord>, StatsRow)> {
    let fg = fatten(g)?;
    let mut cfg = opts.variant.config();
    if let Some(k) = opts.min_walk {
        cfg.min_walk_external = k;
    }
    let start = thread_cpu_seconds();
    let (found, stats) = enumerate(&fg, &cfg)?;
    let cpu = thread_cpu_seconds() - start;
    let graph = g.to_text();
    let mut records = Vec::with_capacity(found.len());
    for d in found {
        let tri = decomposition_to_triangulation(&d, &fg)?;
        let (_, back) = triangulation_to_decomposition(&tri)?;
        if back.canonical() != d.canonical() {
            bail!("graph {index}: {d} does not survive the round trip through its triangulation");
        }
        records.push(CensusRecord {
            graph_index: index,
            graph: graph.clone(),
            variant: opts.variant.name().to_string(),
            decomposition: d.to_string(),
            gluing_table: tri.to_text(),
            vertices: tri.vertex_classes().len(),
            edges: tri.edge_classes().len(),
            orientable: tri.is_orientable(),
            one_vertex_manifold: tri.is_one_vertex_3manifold(),
        });
    }
    Ok((records, StatsRow::new(index, &stats, cpu)))
}

/// Enumerates every graph of the input file on a pool of `workers` threads.
/// Records are sorted by (graph index, decomposition text) and stats rows by
/// graph index, so output does not depend on scheduling.
pub fn cmd_enumerate(opts: &EnumerateOptions) -> Result<EnumerateSummary> {
    let input = read_graphs(&opts.graphs)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.workers.max(1)).build()?;
    let results: Vec<Result<(Vec<CensusRecord>, StatsRow)>> =
        pool.install(|| input.graphs.par_iter().map(|(i, g)| census_graph(*i, g, opts)).collect());
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for r in results {
        let (rec, row) = r?;
        records.extend(rec);
        rows.push(row);
    }
    records.sort_by(|a, b| (a.graph_index, &a.decomposition).cmp(&(b.graph_index, &b.decomposition)));
    rows.sort_by_key(|r| r.graph_index);

    let mut w = create(&opts.out)?;
    for r in &records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush().with_context(|| format!("writing {}", opts.out.display()))?;
    write_stats(&opts.stats, &rows)?;
    Ok(EnumerateSummary { graphs: rows.len(), records: records.len(), errors: input.errors })
}

pub fn write_stats(path: &Path, rows: &[StatsRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_stats(path: &Path) -> Result<Vec<StatsRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    r.deserialize().map(|row| row.with_context(|| format!("parsing {}", path.display()))).collect()
}

pub fn read_records(path: &Path) -> Result<Vec<CensusRecord>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).context("parsing census record"))
        .collect()
}

#[derive(Debug, Default)]
pub struct VerifyReport {
    pub checked: usize,
    pub diffs: Vec<CrossCheckReport>,
    /// Graphs beyond the oracle budget, with the refusal message.
    pub refused: Vec<(usize, String)>,
    pub errors: Vec<String>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.diffs.is_empty()
    }
}

/// Cross-checks the md variant against the gluing oracle on every graph.
pub fn cmd_verify(graphs: &Path, budget: u128) -> Result<VerifyReport> {
    let input = read_graphs(graphs)?;
    let mut report = VerifyReport { errors: input.errors, ..VerifyReport::default() };
    for (index, g) in &input.graphs {
        match cross_check(g, &Variant::Md.config(), budget) {
            Ok(r) => {
                report.checked += 1;
                if !r.is_empty() {
                    report.diffs.push(r);
                }
            }
            Err(e @ OracleError::TooLarge { .. }) => report.refused.push((*index, e.to_string())),
            Err(e) => return Err(e.into()),
        }
    }
    Ok(report)
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let rank = (q * (sorted.len() - 1) as f64).round() as usize;
    sorted[rank]
}

/// Rows ordered slowest first, ties by graph index.
pub fn slowest(rows: &[StatsRow], k: usize) -> Vec<StatsRow> {
    let mut sorted = rows.to_vec();
    sorted.sort_by(|a, b| b.cpu_seconds.total_cmp(&a.cpu_seconds).then(a.graph_index.cmp(&b.graph_index)));
    sorted.truncate(k);
    sorted
}

/// Share of the total time spent in the slowest `percent`% of graphs
/// (at least one graph).
pub fn slow_share(rows: &[StatsRow], percent: f64) -> f64 {
    let total: f64 = rows.iter().map(|r| r.cpu_seconds).sum();
    if rows.is_empty() || total <= 0.0 {
        return 0.0;
    }
    let count = ((rows.len() as f64 * percent / 100.0).ceil() as usize).clamp(1, rows.len());
    slowest(rows, count).iter().map(|r| r.cpu_seconds).sum::<f64>() / total
}

/// Summary of one or more stats files, with a per-graph ratio table when
/// exactly two are given.
pub fn cmd_report(paths: &[PathBuf], top: usize, slow_percent: f64) -> Result<String> {
    let mut out = String::new();
    let mut tables = Vec::new();
    for path in paths {
        let rows = read_stats(path)?;
        let mut times: Vec<f64> = rows.iter().map(|r| r.cpu_seconds).collect();
        times.sort_by(f64::total_cmp);
        let total: f64 = times.iter().sum();
        let solutions: u64 = rows.iter().map(|r| r.solutions).sum();
        let nodes: u64 = rows.iter().map(|r| r.nodes).sum();
        writeln!(out, "{}", path.display())?;
        writeln!(out, "  graphs {}  solutions {}  nodes {}", rows.len(), solutions, nodes)?;
        writeln!(out, "  total cpu {total:.6} s")?;
        writeln!(
            out,
            "  per graph: min {:.6}  median {:.6}  p90 {:.6}  max {:.6}",
            times.first().copied().unwrap_or(0.0),
            percentile(&times, 0.5),
            percentile(&times, 0.9),
            times.last().copied().unwrap_or(0.0)
        )?;
        writeln!(
            out,
            "  slowest {slow_percent}% of graphs: {:.1}% of total time",
            100.0 * slow_share(&rows, slow_percent)
        )?;
        writeln!(out, "  top {top}:")?;
        for r in slowest(&rows, top) {
            writeln!(out, "    graph {:>6}  {:.6} s  {} solutions", r.graph_index, r.cpu_seconds, r.solutions)?;
        }
        tables.push(rows);
    }
    if let [a, b] = tables.as_slice() {
        writeln!(out, "graph  {}  {}  ratio", paths[0].display(), paths[1].display())?;
        for ra in a {
            if let Some(rb) = b.iter().find(|r| r.graph_index == ra.graph_index) {
                let ratio = if rb.cpu_seconds > 0.0 { ra.cpu_seconds / rb.cpu_seconds } else { f64::INFINITY };
                writeln!(out, "{}  {:.6}  {:.6}  {:.3}", ra.graph_index, ra.cpu_seconds, rb.cpu_seconds, ratio)?;
            }
        }
    }
    Ok(out)
}
