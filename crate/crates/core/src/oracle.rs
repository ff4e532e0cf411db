//! Brute-force face gluing enumeration, used to cross-check the search.
//!
//! Each face pair of the face pairing graph can be glued by one of six
//! vertex bijections. The oracle tries all of them, optionally pruning
//! branches that already contain a reversed edge or a closed vertex link.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::decomp::OrderedDecomposition;
use crate::fatgraph::{fatten, FatGraph, FatGraphError, SignedRelabelling};
use crate::multigraph::MultiGraph;
use crate::search::{
    enumerate, graph_relabellings, orbit_minimum, walk_tetrahedra, FrontierTracker, GlueOutcome, SearchConfig,
    SearchError,
};
use crate::tri::{edge_index, triangulation_to_decomposition, Perm4, Triangulation, EDGE_VERTICES};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("{choices} gluing choices exceed the budget of {budget}")]
    TooLarge { choices: u128, budget: u128 },
    #[error(transparent)]
    Graph(#[from] FatGraphError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleFilter {
    All,
    OneVertexManifold,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleMode {
    /// Every combination, filtered at the end.
    Naive,
    /// Under [`OracleFilter::OneVertexManifold`], abandons a partial gluing
    /// once it has a reversed edge or a closed vertex link.
    Pruned,
}

/// One bijection index (0..6) per face pair, in arc order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GluingChoice(pub Vec<u8>);

/// The `index`-th bijection from face `src` onto face `dst`: permutations of
/// the sorted vertices of `dst` in lexicographic order, applied to the sorted
/// vertices of `src`.
pub fn face_bijection(src: u8, dst: u8, index: u8) -> Perm4 {
    const ORDERS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    let sv: Vec<u8> = (0..4).filter(|&v| v != src).collect();
    let dv: Vec<u8> = (0..4).filter(|&v| v != dst).collect();
    let o = ORDERS[index as usize];
    Perm4::from_partial(&[(sv[0], dv[o[0]]), (sv[1], dv[o[1]]), (sv[2], dv[o[2]])]).expect("bijection")
}

pub fn triangulation_of(fg: &FatGraph, choice: &GluingChoice) -> Triangulation {
    let mut tri = Triangulation::new(fg.tet_count());
    for (arc, [a, b]) in fg.arc_nodes().iter().enumerate() {
        let perm = face_bijection(a.face, b.face, choice.0[arc]);
        tri.glue(a.tet, a.face, b.tet, perm).expect("each face is paired once");
    }
    tri
}

fn accepts(filter: OracleFilter, tri: &Triangulation) -> bool {
    match filter {
        OracleFilter::All => true,
        OracleFilter::OneVertexManifold => tri.is_one_vertex_3manifold(),
    }
}

/// Union-find with parity over tetrahedron edges, with an undo journal.
struct EdgeParity {
    parent: Vec<usize>,
    parity: Vec<bool>,
    journal: Vec<usize>,
}

impl EdgeParity {
    fn new(edges: usize) -> Self {
        Self { parent: (0..edges).collect(), parity: vec![false; edges], journal: Vec::new() }
    }

    fn find(&self, mut x: usize) -> (usize, bool) {
        let mut p = false;
        while self.parent[x] != x {
            p ^= self.parity[x];
            x = self.parent[x];
        }
        (x, p)
    }

    /// Identifies two edges, reversed relative to each other when `flip`.
    /// Returns false on a parity conflict.
    fn union(&mut self, a: usize, b: usize, flip: bool) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == flip;
        }
        self.parent[ra] = rb;
        self.parity[ra] = pa ^ pb ^ flip;
        self.journal.push(ra);
        true
    }

    fn rollback(&mut self, mark: usize) {
        while self.journal.len() > mark {
            let x = self.journal.pop().expect("non-empty");
            self.parent[x] = x;
            self.parity[x] = false;
        }
    }
}

/// All gluing choices whose triangulation passes `filter`, sorted.
pub fn enumerate_gluings(fg: &FatGraph, filter: OracleFilter, mode: OracleMode) -> Vec<GluingChoice> {
    let order: Vec<usize> = (0..fg.arc_nodes().len()).collect();
    enumerate_gluings_in_order(fg, filter, mode, &order)
}

/// As [`enumerate_gluings`], assigning face pairs in the given order.
pub fn enumerate_gluings_in_order(
    fg: &FatGraph,
    filter: OracleFilter,
    mode: OracleMode,
    order: &[usize],
) -> Vec<GluingChoice> {
    let arcs = fg.arc_nodes().len();
    assert_eq!(order.len(), arcs, "order must list every face pair");
    let mut out = Vec::new();
    let mut choice = vec![0u8; arcs];
    match mode {
        OracleMode::Naive => loop {
            let c = GluingChoice(choice.clone());
            if accepts(filter, &triangulation_of(fg, &c)) {
                out.push(c);
            }
            // Odometer over `order`.
            let mut i = 0;
            while i < arcs && choice[order[i]] == 5 {
                choice[order[i]] = 0;
                i += 1;
            }
            if i == arcs {
                break;
            }
            choice[order[i]] += 1;
        },
        OracleMode::Pruned => {
            let mut pruner = Pruner {
                fg,
                filter,
                order,
                edges: EdgeParity::new(6 * fg.tet_count()),
                frontier: (filter == OracleFilter::OneVertexManifold).then(|| FrontierTracker::new(fg.tet_count())),
            };
            pruner.descend(0, &mut choice, &mut out);
        }
    }
    out.sort();
    out
}

struct Pruner<'a> {
    fg: &'a FatGraph,
    filter: OracleFilter,
    order: &'a [usize],
    edges: EdgeParity,
    frontier: Option<FrontierTracker>,
}

impl Pruner<'_> {
    fn descend(&mut self, depth: usize, choice: &mut Vec<u8>, out: &mut Vec<GluingChoice>) {
        if depth == self.order.len() {
            let c = GluingChoice(choice.clone());
            if accepts(self.filter, &triangulation_of(self.fg, &c)) {
                out.push(c);
            }
            return;
        }
        let arc = self.order[depth];
        let [a, b] = self.fg.arc_nodes()[arc];
        for index in 0..6u8 {
            let perm = face_bijection(a.face, b.face, index);
            let edge_mark = self.edges.journal.len();
            let vertex_mark = self.frontier.as_ref().map_or(0, FrontierTracker::mark);
            let mut alive = true;
            if self.filter == OracleFilter::OneVertexManifold {
                for [x, y] in EDGE_VERTICES.iter().filter(|e| !e.contains(&a.face)) {
                    let (px, py) = (perm.apply(*x), perm.apply(*y));
                    let e1 = 6 * a.tet + edge_index(*x, *y);
                    let e2 = 6 * b.tet + edge_index(px, py);
                    alive &= self.edges.union(e1, e2, px > py);
                }
            }
            if let Some(ft) = self.frontier.as_mut() {
                for v in (0..4u8).filter(|&v| v != a.face) {
                    let outcome = ft.glue(FrontierTracker::vertex(a.tet, v), FrontierTracker::vertex(b.tet, perm.apply(v)));
                    alive &= outcome != GlueOutcome::ClosedEarly;
                }
            }
            if alive {
                choice[arc] = index;
                self.descend(depth + 1, choice, out);
            }
            self.edges.rollback(edge_mark);
            if let Some(ft) = self.frontier.as_mut() {
                ft.rollback(vertex_mark);
            }
        }
        choice[arc] = 0;
    }
}

/// Labelled triangulations of `g` passing `filter`, in gluing choice order.
pub fn enumerate_triangulations(g: &MultiGraph, filter: OracleFilter) -> Result<Vec<Triangulation>, OracleError> {
    let fg = fatten(g)?;
    Ok(enumerate_gluings(&fg, filter, OracleMode::Pruned)
        .iter()
        .map(|c| triangulation_of(&fg, c))
        .collect())
}

/// Differences between the search output and the oracle, both reduced to
/// canonical decomposition text.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CrossCheckReport {
    pub graph: String,
    pub search: usize,
    pub oracle_gluings: usize,
    pub oracle: usize,
    pub only_in_search: Vec<String>,
    pub only_in_oracle: Vec<String>,
}

impl CrossCheckReport {
    pub fn is_empty(&self) -> bool {
        self.only_in_search.is_empty() && self.only_in_oracle.is_empty()
    }
}

impl std::fmt::Display for CrossCheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: search {} oracle {} ({} gluings)",
            self.graph, self.search, self.oracle, self.oracle_gluings
        )?;
        for d in &self.only_in_search {
            write!(f, "\n  search only: {d}")?;
        }
        for d in &self.only_in_oracle {
            write!(f, "\n  oracle only: {d}")?;
        }
        Ok(())
    }
}

/// Whether a decomposition of a one-vertex 3-manifold meets the walk
/// constraints of `cfg`.
fn meets_walk_constraints(fg: &FatGraph, cfg: &SearchConfig, tri: &Triangulation, d: &OrderedDecomposition) -> bool {
    d.walks().iter().all(|w| {
        let ext = w.ext();
        ext.len() >= cfg.min_walk_external
            && !(cfg.reject_three_tet_degree3 && ext.len() == 3 && walk_tetrahedra(fg, ext) == 3)
            && !(cfg.orientable_only && w.uses_triple_both_ways())
    }) && (!cfg.orientable_only || tri.is_orientable())
}

/// Compares `search::enumerate` on `g` against every gluing of its faces that
/// gives a one-vertex 3-manifold meeting the same constraints. Refuses graphs
/// with more than `budget` gluing choices.
pub fn cross_check(g: &MultiGraph, cfg: &SearchConfig, budget: u128) -> Result<CrossCheckReport, OracleError> {
    let fg = fatten(g)?;
    let choices = 6u128.checked_pow(fg.arc_nodes().len() as u32).unwrap_or(u128::MAX);
    if choices > budget {
        return Err(OracleError::TooLarge { choices, budget });
    }
    let mut relabellings = graph_relabellings(&fg)?;
    relabellings.push(SignedRelabelling::identity(&fg));

    let (found, _) = enumerate(&fg, cfg)?;
    let search: BTreeSet<String> = found
        .iter()
        .filter(|d| {
            cfg.require_one_vertex
                || crate::tri::decomposition_to_triangulation(d, &fg).is_ok_and(|t| t.is_one_vertex_3manifold())
        })
        .map(ToString::to_string)
        .collect();

    let gluings = enumerate_gluings(&fg, OracleFilter::OneVertexManifold, OracleMode::Pruned);
    let mut oracle = BTreeSet::new();
    for c in &gluings {
        let tri = triangulation_of(&fg, c);
        let (fg2, d) = triangulation_to_decomposition(&tri).expect("closed triangulation");
        debug_assert_eq!(fg2.triples(), fg.triples());
        if meets_walk_constraints(&fg, cfg, &tri, &d) {
            let min = orbit_minimum(&d.label_walks(), &relabellings);
            oracle.insert(OrderedDecomposition::from_label_walks(min).to_string());
        }
    }
    Ok(CrossCheckReport {
        graph: g.to_text(),
        search: search.len(),
        oracle_gluings: gluings.len(),
        oracle: oracle.len(),
        only_in_search: search.difference(&oracle).cloned().collect(),
        only_in_oracle: oracle.difference(&search).cloned().collect(),
    })
}
