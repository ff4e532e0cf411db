//! Acceptance checks, one line per criterion. Exits nonzero if any fails.

use std::collections::BTreeSet;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use itertools::Itertools;
use mdcensus::decomp::{is_non_reversing, validate, Layout, OrderedDecomposition};
use mdcensus::fatgraph::{fatten, FatGraph, SignedRelabelling};
use mdcensus::multigraph::{generate, MultiGraph};
use mdcensus::oracle::cross_check;
use mdcensus::search::{enumerate, graph_relabellings, orbit_minimum, Canonicity, SearchConfig, Statistics, Variant};
use mdcensus::tri::{decomposition_to_triangulation, triangulation_to_decomposition, TetEdge, Triangulation};
use mdcensus_cli::{cmd_enumerate, cmd_gen_graphs, read_stats, EnumerateOptions};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn corpus(max_n: usize) -> Vec<MultiGraph> {
    (1..=max_n).flat_map(generate).collect()
}

fn run(fg: &FatGraph, cfg: SearchConfig) -> Result<(BTreeSet<String>, Statistics), String> {
    let (found, stats) = enumerate(fg, &cfg).map_err(|e| e.to_string())?;
    let set: BTreeSet<String> = found.iter().map(ToString::to_string).collect();
    ensure!(set.len() == found.len(), "duplicate decomposition in output");
    Ok((set, stats))
}

fn triangulation(fg: &FatGraph, d: &str) -> Triangulation {
    decomposition_to_triangulation(&d.parse().unwrap(), fg).unwrap()
}

fn golden_example() -> Check {
    let g: MultiGraph = "2; 0-0,0-1,0-1,1-1".parse().unwrap();
    let fg = fatten(&g).unwrap();
    let target: OrderedDecomposition = "(1) (1,2,4,-2,3,-4,-3,-1,3,-2) (4)".parse().unwrap();
    let mut group = graph_relabellings(&fg).unwrap();
    group.push(SignedRelabelling::identity(&fg));
    let want = OrderedDecomposition::from_label_walks(orbit_minimum(&target.label_walks(), &group));
    let (found, _) = run(&fg, SearchConfig { min_walk_external: 1, ..SearchConfig::default() })?;
    ensure!(found.contains(&want.to_string()), "{want} not emitted");
    let tri = decomposition_to_triangulation(&want, &fg).unwrap();
    let shape = (tri.size(), tri.vertex_classes().len(), tri.edge_classes().len(), tri.euler_characteristic());
    ensure!(shape == (2, 1, 3, 0), "(n, k, e, chi) = {shape:?}");
    ensure!(tri.vertex_links().iter().all(|l| l.is_sphere()), "a vertex link is not a sphere");
    Ok(())
}

fn oracle_equivalence() -> Check {
    for g in corpus(3) {
        let report = cross_check(&g, &Variant::Md.config(), u128::MAX).map_err(|e| e.to_string())?;
        ensure!(report.is_empty(), "{report}");
    }
    Ok(())
}

fn variant_coherence() -> Check {
    for g in corpus(3) {
        let fg = fatten(&g).unwrap();
        let keep = |set: &BTreeSet<String>, f: &dyn Fn(&Triangulation) -> bool| -> BTreeSet<String> {
            set.iter().filter(|d| f(&triangulation(&fg, d))).cloned().collect()
        };
        let (md, _) = run(&fg, Variant::Md.config())?;
        let (star, _) = run(&fg, Variant::MdStar.config())?;
        let (md_o, _) = run(&fg, Variant::MdO.config())?;
        ensure!(keep(&star, &|t| t.is_one_vertex_3manifold()) == md, "{g}: md-star filtered differs from md");
        ensure!(keep(&md, &|t| t.is_orientable()) == md_o, "{g}: md-o differs from orientable md");
        let every_arc = SearchConfig { canonicity: Canonicity::EveryArc, ..Variant::Md.config() };
        ensure!(run(&fg, every_arc)?.0 == md, "{g}: canonicity granularity changes output");
    }
    Ok(())
}

fn prune_soundness() -> Check {
    for g in corpus(3) {
        let fg = fatten(&g).unwrap();
        for base in [Variant::Md.config(), Variant::MdO.config()] {
            let (reference, on) = run(&fg, base)?;
            let switched = [
                ("budget", SearchConfig { arc_budget_prune: false, ..base }),
                ("degree-3", SearchConfig { use_degree3_preenumeration: false, ..base }),
                ("orientable", SearchConfig { orientable_prune: false, ..base }),
                ("one-vertex", SearchConfig { track_one_vertex: false, ..base }),
            ];
            for (name, cfg) in switched {
                let (set, off) = run(&fg, cfg)?;
                ensure!(set == reference, "{g}: disabling {name} changes output");
                ensure!(on.nodes <= off.nodes, "{g}: {name} on expands {} > {} nodes", on.nodes, off.nodes);
            }
        }
    }
    Ok(())
}

fn structural_invariants() -> Check {
    let mut seen = 0;
    for g in corpus(4) {
        let fg = fatten(&g).unwrap();
        let n = g.order();
        for d in enumerate(&fg, &Variant::Md.config()).unwrap().0 {
            seen += 1;
            validate(&d, &fg).map_err(|e| format!("{g}: {d}: {e}"))?;
            ensure!(d.walks().len() == n + 1, "{g}: {d}: walk count");
            let tri = decomposition_to_triangulation(&d, &fg).unwrap();
            let classes = tri.edge_classes();
            ensure!(classes.len() == n + tri.vertex_classes().len(), "{g}: {d}: edge count");
            let layout = Layout::resolve(&d, &fg).unwrap();
            for (w, walk) in d.walks().iter().enumerate() {
                let first = layout.walk(w)[0];
                let edge = TetEdge { tet: first.from.tet, vertices: FatGraph::internal_arc_edge(first.before, first.from) };
                let class = classes.iter().find(|c| c.members.contains(&edge)).unwrap();
                ensure!(walk.external_length() == class.degree(), "{g}: {d}: walk {w} length");
                ensure!(is_non_reversing(&d, &fg, w).unwrap() == !class.reversed, "{g}: {d}: walk {w} marking");
            }
        }
    }
    ensure!(seen > 0, "no decompositions emitted");
    Ok(())
}

fn round_trips() -> Check {
    for g in corpus(4) {
        let fg = fatten(&g).unwrap();
        for d in enumerate(&fg, &Variant::MdStar.config()).unwrap().0 {
            let tri = decomposition_to_triangulation(&d, &fg).unwrap();
            let (_, back) = triangulation_to_decomposition(&tri).unwrap();
            ensure!(back.canonical() == d.canonical(), "{g}: {d} came back as {}", back.canonical());
            let text = tri.to_text();
            let parsed: Triangulation = text.parse().map_err(|e| format!("{e}"))?;
            ensure!(parsed.to_text() == text && parsed == tri, "{g}: gluing table text does not round trip");
        }
    }
    Ok(())
}

/// Upper-triangular adjacency with loop counts on the diagonal.
type Matrix = Vec<Vec<u8>>;

fn code(m: &Matrix, perm: &[usize]) -> Vec<u8> {
    let n = m.len();
    let mut c = Vec::new();
    for i in 0..n {
        for j in i..n {
            c.push(m[perm[i].min(perm[j])][perm[i].max(perm[j])]);
        }
    }
    c
}

fn brute_force_classes(n: usize) -> BTreeSet<Vec<u8>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let mut classes = BTreeSet::new();
    let mut m = vec![vec![0u8; n]; n];
    fn fill(k: usize, pairs: &[(usize, usize)], m: &mut Matrix, out: &mut BTreeSet<Vec<u8>>) {
        let n = m.len();
        let degree = |m: &Matrix, v: usize| -> u8 { (0..n).map(|u| if u == v { 2 * m[v][v] } else { m[u.min(v)][u.max(v)] }).sum() };
        if k == pairs.len() {
            if (0..n).all(|v| degree(m, v) == 4) {
                let mut seen = vec![false; n];
                let mut stack = vec![0];
                seen[0] = true;
                while let Some(u) = stack.pop() {
                    for v in 0..n {
                        if !seen[v] && m[u.min(v)][u.max(v)] > 0 {
                            seen[v] = true;
                            stack.push(v);
                        }
                    }
                }
                if seen.iter().all(|&s| s) {
                    out.insert((0..n).permutations(n).map(|p| code(m, &p)).min().unwrap());
                }
            }
            return;
        }
        let (i, j) = pairs[k];
        for c in 0..=4u8 {
            m[i][j] = c;
            if degree(m, i) > 4 || degree(m, j) > 4 {
                break;
            }
            fill(k + 1, pairs, m, out);
        }
        m[i][j] = 0;
    }
    fill(0, &pairs, &mut m, &mut classes);
    classes
}

fn generator_check() -> Check {
    ensure!(generate(1).len() == 1, "generate(1) = {}", generate(1).len());
    ensure!(generate(2).len() == 2, "generate(2) = {}", generate(2).len());
    for n in 1..=5 {
        let graphs = generate(n);
        let mut got = BTreeSet::new();
        for g in &graphs {
            let mut m = vec![vec![0u8; n]; n];
            for &(u, v) in g.arcs() {
                m[u.min(v)][u.max(v)] += 1;
            }
            got.insert((0..n).permutations(n).map(|p| code(&m, &p)).min().unwrap());
        }
        ensure!(got.len() == graphs.len(), "generate({n}) has isomorphic duplicates");
        ensure!(got == brute_force_classes(n), "generate({n}) differs from brute force");
    }
    let ten = generate(10).len();
    ensure!(ten == 48432, "generate(10) = {ten}");
    Ok(())
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut graphs = String::new();
    for n in 1..=4 {
        let path = dir.path().join(format!("g{n}.txt"));
        cmd_gen_graphs(n, &path).map_err(|e| e.to_string())?;
        graphs.push_str(&fs::read_to_string(&path).unwrap());
    }
    let input = dir.path().join("graphs.txt");
    fs::write(&input, graphs).unwrap();
    for variant in [Variant::Md, Variant::MdStar] {
        let mut outputs = Vec::new();
        for workers in [1, 8] {
            let opts = EnumerateOptions {
                graphs: input.clone(),
                variant,
                out: dir.path().join(format!("{}-{workers}.jsonl", variant.name())),
                stats: dir.path().join(format!("{}-{workers}.csv", variant.name())),
                workers,
                min_walk: None,
            };
            cmd_enumerate(&opts).map_err(|e| e.to_string())?;
            let counts: Vec<(usize, u64)> =
                read_stats(&opts.stats).unwrap().iter().map(|r| (r.graph_index, r.solutions)).collect();
            outputs.push((fs::read(&opts.out).unwrap(), counts));
        }
        ensure!(outputs[0].0 == outputs[1].0, "{}: output differs between 1 and 8 workers", variant.name());
        ensure!(outputs[0].1 == outputs[1].1, "{}: solution counts differ between 1 and 8 workers", variant.name());
    }
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("golden example", golden_example),
        ("oracle equivalence", oracle_equivalence),
        ("variant coherence", variant_coherence),
        ("prune soundness", prune_soundness),
        ("structural invariants", structural_invariants),
        ("round trips", round_trips),
        ("generator check", generator_check),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".to_string()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(()) => println!("[PASS] {} {name} ({secs:.1} s)", i + 1),
            Err(e) => {
                failed += 1;
                println!("[FAIL] {} {name} ({secs:.1} s): {e}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
