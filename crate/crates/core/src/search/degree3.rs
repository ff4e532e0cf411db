use crate::decomp::SignedLabel;
use crate::fatgraph::{FatGraph, FatNode};

use super::canon::is_canonical_walk;

pub(crate) fn ends(fg: &FatGraph, x: SignedLabel) -> (FatNode, FatNode) {
    let t = fg.triple(x.label());
    if x.is_forward() {
        (t.tail, t.head)
    } else {
        (t.head, t.tail)
    }
}

/// True when `walk` is a closed alternating walk that uses no internal arc
/// twice and no triple more than three times.
pub fn is_closed_walk(fg: &FatGraph, walk: &[SignedLabel]) -> bool {
    let m = walk.len();
    let mut internals = Vec::with_capacity(m);
    for i in 0..m {
        let (_, to) = ends(fg, walk[i]);
        let (next, _) = ends(fg, walk[(i + 1) % m]);
        if to.tet != next.tet || to == next {
            return false;
        }
        let key = (to.tet, to.face.min(next.face), to.face.max(next.face));
        if internals.contains(&key) {
            return false;
        }
        internals.push(key);
    }
    walk.iter().all(|x| walk.iter().filter(|y| y.label() == x.label()).count() <= 3)
}

/// Number of distinct tetrahedra holding the internal arcs of a walk.
pub fn walk_tetrahedra(fg: &FatGraph, walk: &[SignedLabel]) -> usize {
    let mut tets: Vec<usize> = walk.iter().map(|&x| ends(fg, x).0.tet).collect();
    tets.sort_unstable();
    tets.dedup();
    tets.len()
}

/// Every canonical closed walk with three externals, sorted.
pub fn closed_three_walks(fg: &FatGraph) -> Vec<Vec<SignedLabel>> {
    let labels: Vec<SignedLabel> = (1..=fg.triples().len())
        .flat_map(|l| [SignedLabel::new(l, true), SignedLabel::new(l, false)])
        .collect();
    let mut out = Vec::new();
    for &a in &labels {
        for &b in &labels {
            for &c in &labels {
                let w = vec![a, b, c];
                if is_canonical_walk(&w) && is_closed_walk(fg, &w) {
                    out.push(w);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Closed three-external walks whose internal arcs do not lie in three
/// distinct tetrahedra, so that two of them share a K4. These are the only
/// degree-three edges a search with the three-tetrahedron filter can build.
pub fn pre_enumerate_degree3_walks(fg: &FatGraph) -> Vec<Vec<SignedLabel>> {
    closed_three_walks(fg)
        .into_iter()
        .filter(|w| walk_tetrahedra(fg, w) < 3)
        .collect()
}
