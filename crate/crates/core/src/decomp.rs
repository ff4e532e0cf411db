//! Ordered decompositions of a fattened face pairing graph.
//!
//! A decomposition is a set of closed walks alternating between external and
//! internal arcs that together use every arc exactly once. Only the external
//! arcs are stored, as signed triple labels: `+l` when the walk crosses triple
//! `l` from its tail to its head and `-l` otherwise. The internal arc between
//! two consecutive externals is the unique K4 arc joining the head node of the
//! first to the tail node of the second.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::fatgraph::{FatGraph, FatNode};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DecompError {
    #[error("walk {walk} is empty")]
    EmptyWalk { walk: usize },
    #[error("walk {walk} position {pos}: label {label} does not exist")]
    UnknownLabel { walk: usize, pos: usize, label: i32 },
    #[error("walk {walk} position {pos}: no internal arc joins this external to the next")]
    NotAlternating { walk: usize, pos: usize },
    #[error("walk {walk} position {pos}: internal arc used twice")]
    InternalReused { walk: usize, pos: usize },
    #[error("walk {walk}: triple {label} used more than three times")]
    MemberReused { walk: usize, label: usize },
    #[error("triple {label} is used {used} times, expected 3")]
    NotPartition { label: usize, used: usize },
    #[error("walk index {walk} out of range")]
    NoSuchWalk { walk: usize },
    #[error("malformed decomposition text: {0}")]
    Parse(String),
}

/// A triple label with a traversal direction. Ordered by label first, with the
/// forward direction before the backward one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedLabel(i32);

impl SignedLabel {
    pub fn new(label: usize, forward: bool) -> Self {
        let l = label as i32;
        SignedLabel(if forward { l } else { -l })
    }

    pub fn from_raw(raw: i32) -> Option<Self> {
        (raw != 0).then_some(SignedLabel(raw))
    }

    #[inline]
    pub fn raw(self) -> i32 {
        self.0
    }

    #[inline]
    pub fn label(self) -> usize {
        self.0.unsigned_abs() as usize
    }

    #[inline]
    pub fn is_forward(self) -> bool {
        self.0 > 0
    }

    #[inline]
    pub fn reversed(self) -> Self {
        SignedLabel(-self.0)
    }
}

impl Ord for SignedLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.label()
            .cmp(&other.label())
            .then_with(|| other.is_forward().cmp(&self.is_forward()))
    }
}

impl PartialOrd for SignedLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SignedLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One closed walk. `slots[i]` is the member (0..3) of triple `ext[i]` used.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Walk {
    ext: Vec<SignedLabel>,
    slots: Vec<u8>,
}

impl Walk {
    pub fn new(ext: Vec<SignedLabel>, slots: Vec<u8>) -> Self {
        assert_eq!(ext.len(), slots.len());
        Self { ext, slots }
    }

    pub fn ext(&self) -> &[SignedLabel] {
        &self.ext
    }

    pub fn slots(&self) -> &[u8] {
        &self.slots
    }

    /// Number of external arcs, which is the degree of the edge this walk
    /// represents.
    pub fn external_length(&self) -> usize {
        self.ext.len()
    }

    /// True when some triple is crossed in both directions by this walk.
    pub fn uses_triple_both_ways(&self) -> bool {
        self.ext.iter().any(|x| self.ext.contains(&x.reversed()))
    }
}

impl Ord for Walk {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ext.cmp(&other.ext).then_with(|| self.slots.cmp(&other.slots))
    }
}

impl PartialOrd for Walk {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Walk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, x) in self.ext.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrderedDecomposition {
    walks: Vec<Walk>,
}

impl OrderedDecomposition {
    pub fn new(walks: Vec<Walk>) -> Self {
        Self { walks }
    }

    /// Builds walks from signed labels, numbering the members of each triple
    /// in order of first appearance.
    pub fn from_label_walks(walks: Vec<Vec<SignedLabel>>) -> Self {
        let mut used: Vec<u8> = Vec::new();
        let walks = walks
            .into_iter()
            .map(|ext| {
                let slots = ext
                    .iter()
                    .map(|x| {
                        let l = x.label();
                        if used.len() < l {
                            used.resize(l, 0);
                        }
                        used[l - 1] += 1;
                        used[l - 1] - 1
                    })
                    .collect();
                Walk { ext, slots }
            })
            .collect();
        Self { walks }
    }

    pub fn walks(&self) -> &[Walk] {
        &self.walks
    }

    pub fn label_walks(&self) -> Vec<Vec<SignedLabel>> {
        self.walks.iter().map(|w| w.ext.clone()).collect()
    }

    /// Canonical representative under walk rotation, reversal and reordering;
    /// member slots are renumbered by first appearance.
    pub fn canonical(&self) -> Self {
        let mut walks: Vec<Vec<SignedLabel>> =
            self.walks.iter().map(|w| crate::search::canonicalize_walk(&w.ext)).collect();
        walks.sort();
        Self::from_label_walks(walks)
    }

    pub fn total_external(&self) -> usize {
        self.walks.iter().map(Walk::external_length).sum()
    }
}

impl fmt::Display for OrderedDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, w) in self.walks.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{w}")?;
        }
        Ok(())
    }
}

impl FromStr for OrderedDecomposition {
    type Err = DecompError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut walks = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| DecompError::Parse(format!("expected '(' at {rest:?}")))?;
            let close = body
                .find(')')
                .ok_or_else(|| DecompError::Parse("unclosed walk".into()))?;
            let ext = body[..close]
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<i32>()
                        .ok()
                        .and_then(SignedLabel::from_raw)
                        .ok_or_else(|| DecompError::Parse(format!("bad label {t:?}")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            walks.push(ext);
            rest = body[close + 1..].trim_start();
        }
        Ok(Self::from_label_walks(walks))
    }
}

/// One external arc occurrence, with the nodes it is traversed between and
/// the far ends of the internal arcs on either side of it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Occurrence {
    pub walk: usize,
    pub pos: usize,
    pub label: usize,
    pub slot: u8,
    pub from: FatNode,
    pub to: FatNode,
    /// Internal arc `{before, from}` precedes this external.
    pub before: FatNode,
    /// Internal arc `{to, after}` follows this external.
    pub after: FatNode,
}

/// A validated decomposition with every implied internal arc resolved.
#[derive(Clone, Debug)]
pub struct Layout {
    occurrences: Vec<Occurrence>,
    walk_start: Vec<usize>,
    // Occurrence paired with internal arc {node, other face} at each node.
    paired: Vec<[usize; 4]>,
}

const NONE: usize = usize::MAX;

impl Layout {
    pub fn resolve(d: &OrderedDecomposition, fg: &FatGraph) -> Result<Self, DecompError> {
        let label_count = fg.triples().len();
        let mut occurrences = Vec::with_capacity(d.total_external());
        let mut walk_start = Vec::with_capacity(d.walks.len() + 1);
        let mut internal_used = vec![false; 16 * fg.tet_count()];
        let mut member_used = vec![0usize; label_count];
        let ends = |x: SignedLabel| {
            let t = fg.triple(x.label());
            if x.is_forward() {
                (t.tail, t.head)
            } else {
                (t.head, t.tail)
            }
        };
        for (wi, walk) in d.walks.iter().enumerate() {
            walk_start.push(occurrences.len());
            let m = walk.ext.len();
            if m == 0 {
                return Err(DecompError::EmptyWalk { walk: wi });
            }
            for (pos, x) in walk.ext.iter().enumerate() {
                if x.label() == 0 || x.label() > label_count {
                    return Err(DecompError::UnknownLabel { walk: wi, pos, label: x.raw() });
                }
            }
            for pos in 0..m {
                let x = walk.ext[pos];
                let (from, to) = ends(x);
                let (_, prev_to) = ends(walk.ext[(pos + m - 1) % m]);
                let (next_from, _) = ends(walk.ext[(pos + 1) % m]);
                if to.tet != next_from.tet || to == next_from {
                    return Err(DecompError::NotAlternating { walk: wi, pos });
                }
                let key = 16 * to.tet + 4 * to.face.min(next_from.face) as usize + to.face.max(next_from.face) as usize;
                if std::mem::replace(&mut internal_used[key], true) {
                    return Err(DecompError::InternalReused { walk: wi, pos });
                }
                let count = &mut member_used[x.label() - 1];
                *count += 1;
                if *count > 3 {
                    return Err(DecompError::MemberReused { walk: wi, label: x.label() });
                }
                occurrences.push(Occurrence {
                    walk: wi,
                    pos,
                    label: x.label(),
                    slot: walk.slots[pos],
                    from,
                    to,
                    before: prev_to,
                    after: next_from,
                });
            }
        }
        walk_start.push(occurrences.len());
        if let Some(i) = member_used.iter().position(|&c| c != 3) {
            return Err(DecompError::NotPartition { label: i + 1, used: member_used[i] });
        }
        let mut paired = vec![[NONE; 4]; fg.node_count()];
        for (i, o) in occurrences.iter().enumerate() {
            paired[o.from.index()][o.before.face as usize] = i;
            paired[o.to.index()][o.after.face as usize] = i;
        }
        Ok(Self { occurrences, walk_start, paired })
    }

    pub fn occurrences(&self) -> &[Occurrence] {
        &self.occurrences
    }

    pub fn walk(&self, walk: usize) -> &[Occurrence] {
        &self.occurrences[self.walk_start[walk]..self.walk_start[walk + 1]]
    }

    pub fn walk_count(&self) -> usize {
        self.walk_start.len() - 1
    }

    /// The far face of the internal arc paired with occurrence `occ` at `node`.
    fn partner_face(&self, occ: usize, node: FatNode) -> u8 {
        let o = &self.occurrences[occ];
        if o.from == node {
            o.before.face
        } else {
            debug_assert_eq!(o.to, node);
            o.after.face
        }
    }

    /// The occurrence paired with internal arc `{node, other_face}` at `node`.
    fn paired_with(&self, node: FatNode, other_face: u8) -> usize {
        self.paired[node.index()][other_face as usize]
    }

    /// Occurrence index of member `slot` of triple `label`.
    fn member(&self, label: usize, slot: u8) -> Option<usize> {
        self.occurrences.iter().position(|o| o.label == label && o.slot == slot)
    }

    /// Distinct tetrahedra met by the internal arcs of a walk.
    pub fn walk_tetrahedra(&self, walk: usize) -> usize {
        let mut tets: Vec<usize> = self.walk(walk).iter().map(|o| o.from.tet).collect();
        tets.sort_unstable();
        tets.dedup();
        tets.len()
    }
}

pub fn validate(d: &OrderedDecomposition, fg: &FatGraph) -> Result<(), DecompError> {
    Layout::resolve(d, fg).map(|_| ())
}

pub fn is_valid(d: &OrderedDecomposition, fg: &FatGraph) -> bool {
    validate(d, fg).is_ok()
}

pub fn external_length(w: &Walk) -> usize {
    w.external_length()
}

/// Result of marking one walk: for each of its externals, the distinct
/// parallel members marked "above" it, in marking order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Marking {
    pub walk: usize,
    /// `above[pos]` holds (label, slot) pairs.
    pub above: Vec<Vec<(usize, u8)>>,
    pub steps: usize,
}

impl Marking {
    pub fn has_double_mark(&self) -> bool {
        self.above.iter().any(|a| a.len() > 1)
    }
}

/// Marks the externals of walk `walk_index`.
///
/// Starting from the walk's first external `e_s` and the lowest-slot parallel
/// member `e_S != e_s`, each step moves to the next external `e_b`, follows the
/// above-mark across the shared tetrahedron, and marks the parallel member
/// `e_D` of `e_b` it lands on. Stops when `e_s` would be re-marked by a member
/// already marked above it.
pub fn mark(d: &OrderedDecomposition, fg: &FatGraph, walk_index: usize) -> Result<Marking, DecompError> {
    let layout = Layout::resolve(d, fg)?;
    mark_resolved(&layout, walk_index)
}

pub fn mark_resolved(layout: &Layout, walk_index: usize) -> Result<Marking, DecompError> {
    if walk_index >= layout.walk_count() {
        return Err(DecompError::NoSuchWalk { walk: walk_index });
    }
    let walk = layout.walk(walk_index);
    let m = walk.len();
    let first = walk[0];
    let start_above = (0..3u8)
        .filter(|&s| s != first.slot)
        .find_map(|s| layout.member(first.label, s))
        .expect("every triple has three members");
    let key = |occ: usize| {
        let o = &layout.occurrences[occ];
        (o.label, o.slot)
    };
    let mut above: Vec<Vec<(usize, u8)>> = vec![Vec::new(); m];
    above[0].push(key(start_above));
    let (mut a, mut above_a) = (0usize, start_above);
    let mut steps = 0;
    loop {
        steps += 1;
        let b = (a + 1) % m;
        let i = walk[a].to;
        let j = walk[b].from;
        let k = layout.partner_face(above_a, i);
        let d_occ = layout.paired_with(j, k);
        let mark = key(d_occ);
        if b == 0 && above[0].contains(&mark) {
            break;
        }
        if !above[b].contains(&mark) {
            above[b].push(mark);
        }
        a = b;
        above_a = d_occ;
        // Each external can hold at most two distinct marks.
        assert!(steps <= 2 * m + 1, "marking failed to terminate");
    }
    Ok(Marking { walk: walk_index, above, steps })
}

/// True iff no external of the walk receives two distinct above-marks, i.e.
/// the corresponding edge is not identified with itself in reverse.
pub fn is_non_reversing(d: &OrderedDecomposition, fg: &FatGraph, walk_index: usize) -> Result<bool, DecompError> {
    Ok(!mark(d, fg, walk_index)?.has_double_mark())
}

pub fn all_non_reversing(layout: &Layout) -> bool {
    (0..layout.walk_count()).all(|w| !mark_resolved(layout, w).expect("walk exists").has_double_mark())
}
