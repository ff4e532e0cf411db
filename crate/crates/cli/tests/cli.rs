use std::fs;
use std::process::Command;

use mdcensus::search::Variant;
use mdcensus_cli::*;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mdcensus"))
}

fn census(dir: &TempDir, graphs: &str, variant: Variant, workers: usize) -> (Vec<CensusRecord>, Vec<StatsRow>) {
    let out = dir.path().join(format!("{}-{workers}.jsonl", variant.name()));
    let stats = dir.path().join(format!("{}-{workers}.csv", variant.name()));
    let opts = EnumerateOptions {
        graphs: dir.path().join(graphs),
        variant,
        out: out.clone(),
        stats: stats.clone(),
        workers,
        min_walk: None,
    };
    cmd_enumerate(&opts).unwrap();
    (read_records(&out).unwrap(), read_stats(&stats).unwrap())
}

#[test]
fn gen_graphs_writes_one_graph_per_line() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("g.txt");
    assert_eq!(cmd_gen_graphs(4, &path).unwrap(), 10);
    let file = read_graphs(&path).unwrap();
    assert_eq!(file.graphs.len(), 10);
    assert!(file.errors.is_empty());
}

#[test]
fn records_match_stats_and_are_sorted() {
    let dir = TempDir::new().unwrap();
    cmd_gen_graphs(3, &dir.path().join("g.txt")).unwrap();
    let (records, stats) = census(&dir, "g.txt", Variant::Md, 2);
    let per_graph: Vec<u64> = stats.iter().map(|r| r.solutions).collect();
    assert_eq!(per_graph, vec![1, 0, 0, 6]);
    for (i, row) in stats.iter().enumerate() {
        assert_eq!(row.graph_index, i);
        let n = records.iter().filter(|r| r.graph_index == i).count() as u64;
        assert_eq!(n, row.solutions);
    }
    let keys: Vec<_> = records.iter().map(|r| (r.graph_index, r.decomposition.clone())).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(records.iter().all(|r| r.vertices == 1 && r.one_vertex_manifold && r.variant == "md"));
}

#[test]
fn star_variant_flags_survivors() {
    let dir = TempDir::new().unwrap();
    cmd_gen_graphs(2, &dir.path().join("g.txt")).unwrap();
    let (md, _) = census(&dir, "g.txt", Variant::Md, 1);
    let (star, _) = census(&dir, "g.txt", Variant::MdStar, 1);
    let survivors: Vec<_> = star.iter().filter(|r| r.one_vertex_manifold).map(|r| &r.decomposition).collect();
    let expected: Vec<_> = md.iter().map(|r| &r.decomposition).collect();
    assert_eq!(survivors, expected);
}

#[test]
fn bad_graph_lines_are_reported_and_skipped() {
    let dir = TempDir::new().unwrap();
    let text = "1; 0-0,0-0\n\nnot a graph\n2; 0-0,0-1\n2; 0-1,0-1,0-1,0-1\n";
    fs::write(dir.path().join("g.txt"), text).unwrap();
    let file = read_graphs(&dir.path().join("g.txt")).unwrap();
    assert_eq!(file.graphs.iter().map(|(i, _)| *i).collect::<Vec<_>>(), vec![0, 3]);
    assert_eq!(file.errors.len(), 2);
    assert!(file.errors[0].starts_with("line 3:"));
    assert!(file.errors[1].starts_with("line 4:"));
    let (_, stats) = census(&dir, "g.txt", Variant::Md, 1);
    assert_eq!(stats.iter().map(|r| r.graph_index).collect::<Vec<_>>(), vec![0, 3]);
}

#[test]
fn report_of_a_single_row_is_that_row() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("s.csv");
    let row = StatsRow {
        graph_index: 7,
        solutions: 3,
        nodes: 100,
        prune_budget: 1,
        prune_orient: 2,
        prune_canon: 3,
        prune_vertex: 4,
        cpu_seconds: 1.5,
    };
    write_stats(&path, std::slice::from_ref(&row)).unwrap();
    assert_eq!(read_stats(&path).unwrap(), vec![row.clone()]);
    let text = cmd_report(&[path], 5, 10.0).unwrap();
    assert!(text.contains("graphs 1  solutions 3  nodes 100"));
    assert!(text.contains("total cpu 1.500000 s"));
    assert!(text.contains("min 1.500000  median 1.500000  p90 1.500000  max 1.500000"));
    assert!(text.contains("100.0% of total time"));
    assert_eq!(slowest(std::slice::from_ref(&row), 5), vec![row]);
}

#[test]
fn slowest_is_stable_under_row_order() {
    let row = |i, t| StatsRow {
        graph_index: i,
        solutions: 0,
        nodes: 0,
        prune_budget: 0,
        prune_orient: 0,
        prune_canon: 0,
        prune_vertex: 0,
        cpu_seconds: t,
    };
    let rows = vec![row(0, 1.0), row(1, 3.0), row(2, 3.0), row(3, 2.0)];
    let mut shuffled = rows.clone();
    shuffled.reverse();
    let order = |r: Vec<StatsRow>| r.into_iter().map(|r| r.graph_index).collect::<Vec<_>>();
    assert_eq!(order(slowest(&rows, 3)), vec![1, 2, 3]);
    assert_eq!(order(slowest(&shuffled, 3)), vec![1, 2, 3]);
    assert!((slow_share(&rows, 25.0) - 3.0 / 9.0).abs() < 1e-12);
}

#[test]
fn binary_runs_end_to_end() {
    let dir = TempDir::new().unwrap();
    let g = dir.path().join("g.txt");
    let run = |args: &[&str]| bin().args(args).current_dir(dir.path()).output().unwrap();
    assert!(run(&["gen-graphs", "2", "-o", "g.txt"]).status.success());
    assert!(g.exists());
    let out = run(&["enumerate", "-g", "g.txt", "--variant", "md-o", "-o", "o.jsonl", "--stats", "s.csv", "-j", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let verify = run(&["verify", "-g", "g.txt"]);
    assert!(verify.status.success());
    assert!(String::from_utf8_lossy(&verify.stdout).contains("0 with differences"));
    let refused = run(&["verify", "-g", "g.txt", "--budget", "1"]);
    assert!(refused.status.success());
    assert!(String::from_utf8_lossy(&refused.stdout).contains("refused"));
    let report = run(&["report", "s.csv", "s.csv"]);
    assert!(report.status.success());
    assert!(String::from_utf8_lossy(&report.stdout).contains("ratio"));
    assert!(!run(&["enumerate", "-g", "missing.txt", "-o", "o", "--stats", "s"]).status.success());
    assert!(!run(&["enumerate", "-g", "g.txt", "--variant", "bogus", "-o", "o", "--stats", "s"]).status.success());
}
