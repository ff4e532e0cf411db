//! Backtracking enumeration of ordered decompositions.
//!
//! Walks are built one external arc at a time. A new walk starts at the lowest
//! label with an unused member, traversed forwards; after each external arc
//! the search tries every unused internal arc at the head node, first closing
//! the walk if that arc returns to the walk's start and then extending through
//! the triple met at its far end.

mod canon;
mod degree3;
mod frontier;

use thiserror::Error;

pub use canon::{
    canonicalize_decomposition, canonicalize_walk, decomposition_less, is_canonical_walk, orbit_minimum, relabel,
    survives_automorphisms,
};
pub use degree3::{closed_three_walks, is_closed_walk, pre_enumerate_degree3_walks, walk_tetrahedra};
pub use frontier::{FrontierTracker, GlueOutcome};

use crate::decomp::{all_non_reversing, Layout, OrderedDecomposition, SignedLabel};
use crate::fatgraph::{lift_automorphisms, FatGraph, FatGraphError, FatNode, SignedRelabelling};
use crate::multigraph::automorphisms;
use crate::tri::decomposition_to_triangulation;
use degree3::ends;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Canonicity {
    /// Test partial decompositions for automorphic images after every arc.
    EveryArc,
    /// Test only when a walk is completed.
    WalkComplete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SearchConfig {
    pub min_walk_external: usize,
    /// Emit only orientable triangulations with no walk crossing a triple in
    /// both directions.
    pub orientable_only: bool,
    /// Prune as soon as a vertex link closes before the end.
    pub track_one_vertex: bool,
    /// Emit only one-vertex triangulations.
    pub require_one_vertex: bool,
    pub canonicity: Canonicity,
    /// Place degree-three walks up front and require four externals from
    /// every walk built by the main search.
    pub use_degree3_preenumeration: bool,
    /// Prune when too few external arcs remain for the walks still needed.
    pub arc_budget_prune: bool,
    /// Under `orientable_only`, reject a triple crossed both ways as soon as
    /// the second crossing is added rather than when the walk closes.
    pub orientable_prune: bool,
    /// Reject degree-three walks whose internal arcs lie in three distinct
    /// tetrahedra.
    pub reject_three_tet_degree3: bool,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            min_walk_external: 3,
            orientable_only: false,
            track_one_vertex: true,
            require_one_vertex: true,
            canonicity: Canonicity::WalkComplete,
            use_degree3_preenumeration: true,
            arc_budget_prune: true,
            orientable_prune: true,
            reject_three_tet_degree3: true,
        }
    }
}

impl SearchConfig {
    /// Every decomposition of a one-vertex triangulation, with no minimality
    /// filters.
    pub fn exhaustive() -> Self {
        Self {
            min_walk_external: 1,
            use_degree3_preenumeration: false,
            reject_three_tet_degree3: false,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<(), SearchError> {
        if self.min_walk_external == 0 {
            return Err(SearchError::MinWalk);
        }
        Ok(())
    }

    fn preenumerates(&self) -> bool {
        self.use_degree3_preenumeration && self.min_walk_external == 3
    }

    /// Least number of externals on a walk built by the main search.
    fn walk_budget(&self) -> usize {
        if self.preenumerates() {
            4
        } else {
            self.min_walk_external
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Md,
    MdStar,
    MdO,
    MdStarO,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Md, Variant::MdStar, Variant::MdO, Variant::MdStarO];

    /// The starred variants skip the one-vertex test entirely; their output
    /// still has to be filtered afterwards.
    pub fn config(self) -> SearchConfig {
        let base = SearchConfig::default();
        match self {
            Variant::Md => base,
            Variant::MdStar => SearchConfig { track_one_vertex: false, require_one_vertex: false, ..base },
            Variant::MdO => SearchConfig { orientable_only: true, ..base },
            Variant::MdStarO => {
                SearchConfig { orientable_only: true, track_one_vertex: false, require_one_vertex: false, ..base }
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Md => "md",
            Variant::MdStar => "md-star",
            Variant::MdO => "md-o",
            Variant::MdStarO => "md-star-o",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown variant {s:?}"))
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("min_walk_external must be at least 1")]
    MinWalk,
    #[error(transparent)]
    Automorphism(#[from] FatGraphError),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Statistics {
    /// External arcs added to a walk.
    pub nodes: u64,
    pub prune_budget: u64,
    pub prune_orient: u64,
    pub prune_canon: u64,
    pub prune_vertex: u64,
    pub solutions: u64,
    /// Complete decompositions discarded by the marking test.
    pub rejected_reversing: u64,
}

/// True iff `unused` external arcs cannot supply `walks_remaining` walks of at
/// least `budget` externals each.
pub fn prune_arc_budget(unused: usize, walks_remaining: usize, budget: usize) -> bool {
    if walks_remaining == 0 {
        unused > 0
    } else {
        unused < budget * walks_remaining
    }
}

/// True iff adding `candidate` to `walk` would cross its triple both ways.
pub fn orientable_prune(walk: &[SignedLabel], candidate: SignedLabel) -> bool {
    walk.contains(&candidate.reversed())
}

/// Non-identity relabellings induced by the automorphisms of the underlying
/// face pairing graph.
pub fn graph_relabellings(fg: &FatGraph) -> Result<Vec<SignedRelabelling>, FatGraphError> {
    let autos = automorphisms(&fg.underlying());
    let mut lifted = lift_automorphisms(fg, &autos)?;
    lifted.retain(|r| !r.is_identity());
    Ok(lifted)
}

/// Runs the search, passing each emitted decomposition to `emit` in a
/// deterministic order.
pub fn enumerate_with(
    fg: &FatGraph,
    cfg: &SearchConfig,
    mut emit: impl FnMut(OrderedDecomposition),
) -> Result<Statistics, SearchError> {
    cfg.check()?;
    let mut state = SearchState::new(fg, *cfg)?;
    state.run(&mut emit);
    Ok(state.stats)
}

/// Collects the output of [`enumerate_with`].
pub fn enumerate(fg: &FatGraph, cfg: &SearchConfig) -> Result<(Vec<OrderedDecomposition>, Statistics), SearchError> {
    let mut out = Vec::new();
    let stats = enumerate_with(fg, cfg, |d| out.push(d))?;
    Ok((out, stats))
}

type Emit<'e> = &'e mut dyn FnMut(OrderedDecomposition);

struct SearchState<'a> {
    fg: &'a FatGraph,
    cfg: SearchConfig,
    n: usize,
    budget: usize,
    relabellings: Vec<SignedRelabelling>,
    member_used: Vec<u8>,
    internal_used: Vec<bool>,
    unused: usize,
    preplaced: Vec<Vec<SignedLabel>>,
    walks: Vec<Vec<SignedLabel>>,
    cur: Vec<SignedLabel>,
    frontier: Option<FrontierTracker>,
    stats: Statistics,
}

#[inline]
fn internal_key(a: FatNode, b: FatNode) -> usize {
    16 * a.tet + 4 * a.face.min(b.face) as usize + a.face.max(b.face) as usize
}

impl<'a> SearchState<'a> {
    fn new(fg: &'a FatGraph, cfg: SearchConfig) -> Result<Self, SearchError> {
        let n = fg.tet_count();
        Ok(Self {
            fg,
            cfg,
            n,
            budget: cfg.walk_budget(),
            relabellings: graph_relabellings(fg)?,
            member_used: vec![0; fg.triples().len()],
            internal_used: vec![false; 16 * n],
            unused: 6 * n,
            preplaced: Vec::new(),
            walks: Vec::new(),
            cur: Vec::new(),
            frontier: cfg.track_one_vertex.then(|| FrontierTracker::new(n)),
            stats: Statistics::default(),
        })
    }

    fn run(&mut self, emit: Emit) {
        if self.n == 0 {
            return;
        }
        if self.cfg.preenumerates() {
            let mut walks = if self.cfg.reject_three_tet_degree3 {
                pre_enumerate_degree3_walks(self.fg)
            } else {
                closed_three_walks(self.fg)
            };
            if self.cfg.orientable_only {
                walks.retain(|w| !w.iter().any(|&x| orientable_prune(w, x)));
            }
            self.place_subsets(&walks, 0, emit);
        } else {
            self.start_walk(emit);
        }
    }

    fn mark(&self) -> usize {
        self.frontier.as_ref().map_or(0, FrontierTracker::mark)
    }

    fn rollback(&mut self, mark: usize) {
        if let Some(ft) = self.frontier.as_mut() {
            ft.rollback(mark);
        }
    }

    /// Identifies the vertex pair carried by one member arc. Returns false if
    /// a vertex link closed early.
    fn glue(&mut self, from: FatNode, to: FatNode, before: FatNode, after: FatNode) -> bool {
        match self.frontier.as_mut() {
            None => true,
            Some(ft) => {
                let a = FrontierTracker::vertex(from.tet, before.face);
                let b = FrontierTracker::vertex(to.tet, after.face);
                ft.glue(a, b) != GlueOutcome::ClosedEarly
            }
        }
    }

    fn lowest_open_label(&self) -> Option<usize> {
        self.member_used.iter().position(|&c| c < 3).map(|i| i + 1)
    }

    fn completed(&self) -> usize {
        self.preplaced.len() + self.walks.len()
    }

    /// Automorphism test on the walks whose first label is below `threshold`;
    /// every later walk of any completion starts at or above it.
    fn canon_ok(&self, threshold: usize) -> bool {
        if self.relabellings.is_empty() {
            return true;
        }
        let mut known: Vec<Vec<SignedLabel>> = self
            .preplaced
            .iter()
            .chain(&self.walks)
            .filter(|w| w[0].label() < threshold)
            .cloned()
            .collect();
        if known.is_empty() {
            return true;
        }
        known.sort();
        survives_automorphisms(&known, &self.relabellings)
    }

    fn place_subsets(&mut self, walks: &[Vec<SignedLabel>], from: usize, emit: Emit) {
        self.start_walk(emit);
        for j in from..walks.len() {
            let w = &walks[j];
            let fits = w.iter().enumerate().all(|(i, &x)| {
                let (_, to) = ends(self.fg, x);
                let (next, _) = ends(self.fg, w[(i + 1) % w.len()]);
                let uses = w.iter().filter(|y| y.label() == x.label()).count();
                !self.internal_used[internal_key(to, next)] && self.member_used[x.label() - 1] as usize + uses <= 3
            });
            if !fits || self.completed() > self.n {
                continue;
            }
            let mark = self.mark();
            let mut alive = true;
            for (i, &x) in w.iter().enumerate() {
                let m = w.len();
                let (from_node, to) = ends(self.fg, x);
                let (_, before) = ends(self.fg, w[(i + m - 1) % m]);
                let (after, _) = ends(self.fg, w[(i + 1) % m]);
                self.internal_used[internal_key(to, after)] = true;
                self.member_used[x.label() - 1] += 1;
                self.unused -= 1;
                alive &= self.glue(from_node, to, before, after);
            }
            if alive {
                self.preplaced.push(w.clone());
                self.place_subsets(walks, j + 1, emit);
                self.preplaced.pop();
            } else {
                self.stats.prune_vertex += 1;
            }
            for (i, &x) in w.iter().enumerate() {
                let (_, to) = ends(self.fg, x);
                let (after, _) = ends(self.fg, w[(i + 1) % w.len()]);
                self.internal_used[internal_key(to, after)] = false;
                self.member_used[x.label() - 1] -= 1;
                self.unused += 1;
            }
            self.rollback(mark);
        }
    }

    fn start_walk(&mut self, emit: Emit) {
        let k = self.completed();
        if self.unused == 0 {
            if k == self.n + 1 {
                self.finish(emit);
            }
            return;
        }
        if k > self.n {
            return;
        }
        if self.cfg.arc_budget_prune && prune_arc_budget(self.unused, self.n + 1 - k, self.budget) {
            self.stats.prune_budget += 1;
            return;
        }
        let label = self.lowest_open_label().expect("unused arcs remain");
        if !self.canon_ok(label) {
            self.stats.prune_canon += 1;
            return;
        }
        self.push(SignedLabel::new(label, true));
        self.extend(emit);
        self.pop();
    }

    fn push(&mut self, x: SignedLabel) {
        self.member_used[x.label() - 1] += 1;
        self.unused -= 1;
        self.cur.push(x);
        self.stats.nodes += 1;
    }

    fn pop(&mut self) {
        let x = self.cur.pop().expect("non-empty walk");
        self.member_used[x.label() - 1] -= 1;
        self.unused += 1;
    }

    fn extend(&mut self, emit: Emit) {
        let k = self.completed();
        if self.cfg.arc_budget_prune && self.unused < self.budget * (self.n - k) {
            self.stats.prune_budget += 1;
            return;
        }
        if self.cfg.canonicity == Canonicity::EveryArc {
            let threshold = self.cur[0].label().min(self.lowest_open_label().unwrap_or(usize::MAX));
            if !self.canon_ok(threshold) {
                self.stats.prune_canon += 1;
                return;
            }
        }
        let p = self.cur.len() - 1;
        let (from_p, head) = ends(self.fg, self.cur[p]);
        let (start, _) = ends(self.fg, self.cur[0]);
        for face in (0..4u8).filter(|&f| f != head.face) {
            let next = FatNode::new(head.tet, face);
            let key = internal_key(head, next);
            if self.internal_used[key] {
                continue;
            }
            self.internal_used[key] = true;
            let mark = self.mark();
            let alive = p == 0 || {
                let (_, before) = ends(self.fg, self.cur[p - 1]);
                self.glue(from_p, head, before, next)
            };
            if !alive {
                self.stats.prune_vertex += 1;
            } else {
                if next == start {
                    self.close(head, emit);
                }
                let (label, is_tail) = self.fg.triple_at(next);
                if self.member_used[label - 1] < 3 {
                    let x = SignedLabel::new(label, is_tail);
                    if self.cfg.orientable_only && self.cfg.orientable_prune && orientable_prune(&self.cur, x) {
                        self.stats.prune_orient += 1;
                    } else {
                        self.push(x);
                        self.extend(emit);
                        self.pop();
                    }
                }
            }
            self.rollback(mark);
            self.internal_used[key] = false;
        }
    }

    /// Closes the current walk through the internal arc from `head` back to
    /// its first external.
    fn close(&mut self, head: FatNode, emit: Emit) {
        let mark = self.mark();
        let (from0, to0) = ends(self.fg, self.cur[0]);
        let after0 = match self.cur.get(1) {
            Some(&x) => ends(self.fg, x).0,
            None => from0,
        };
        if self.glue(from0, to0, head, after0) {
            self.walk_complete(emit);
        } else {
            self.stats.prune_vertex += 1;
        }
        self.rollback(mark);
    }

    fn walk_complete(&mut self, emit: Emit) {
        let m = self.cur.len();
        if m < self.cfg.min_walk_external || (m == 3 && self.cfg.preenumerates()) {
            return;
        }
        if !is_canonical_walk(&self.cur) {
            return;
        }
        if self.walks.last().is_some_and(|prev| self.cur < *prev) {
            return;
        }
        if self.cfg.orientable_only
            && !self.cfg.orientable_prune
            && self.cur.iter().any(|&x| orientable_prune(&self.cur, x))
        {
            return;
        }
        if m == 3 && self.cfg.reject_three_tet_degree3 && walk_tetrahedra(self.fg, &self.cur) == 3 {
            return;
        }
        let walk = std::mem::take(&mut self.cur);
        self.walks.push(walk);
        self.start_walk(emit);
        self.cur = self.walks.pop().expect("walk pushed above");
    }

    fn finish(&mut self, emit: Emit) {
        let all: Vec<Vec<SignedLabel>> = self.preplaced.iter().chain(&self.walks).cloned().collect();
        let walks = canonicalize_decomposition(&all);
        if !self.relabellings.is_empty() && !survives_automorphisms(&walks, &self.relabellings) {
            self.stats.prune_canon += 1;
            return;
        }
        let d = OrderedDecomposition::from_label_walks(walks);
        let layout = Layout::resolve(&d, self.fg).expect("search builds valid decompositions");
        if !all_non_reversing(&layout) {
            self.stats.rejected_reversing += 1;
            return;
        }
        if self.cfg.require_one_vertex || self.cfg.orientable_only {
            let tri = decomposition_to_triangulation(&d, self.fg).expect("valid decompositions reconstruct");
            if self.cfg.require_one_vertex && tri.vertex_classes().len() != 1 {
                debug_assert!(!self.cfg.track_one_vertex, "frontier tracking missed a vertex");
                return;
            }
            if self.cfg.orientable_only && !tri.is_orientable() {
                return;
            }
        }
        self.stats.solutions += 1;
        emit(d);
    }
}
