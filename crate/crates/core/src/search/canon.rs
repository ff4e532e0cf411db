//! Canonical forms of walks and decompositions under rotation, reversal,
//! reordering and face pairing graph automorphisms.

use crate::decomp::SignedLabel;
use crate::fatgraph::SignedRelabelling;

fn reversed(walk: &[SignedLabel]) -> Vec<SignedLabel> {
    walk.iter().rev().map(|x| x.reversed()).collect()
}

fn min_rotation(walk: &[SignedLabel]) -> Vec<SignedLabel> {
    let m = walk.len();
    let mut best: Option<Vec<SignedLabel>> = None;
    for r in 0..m {
        let cand: Vec<SignedLabel> = walk[r..].iter().chain(&walk[..r]).copied().collect();
        if best.as_ref().is_none_or(|b| cand < *b) {
            best = Some(cand);
        }
    }
    best.unwrap_or_default()
}

/// Least rotation of the walk or of its reversal.
pub fn canonicalize_walk(walk: &[SignedLabel]) -> Vec<SignedLabel> {
    let forward = min_rotation(walk);
    let backward = min_rotation(&reversed(walk));
    forward.min(backward)
}

pub fn is_canonical_walk(walk: &[SignedLabel]) -> bool {
    canonicalize_walk(walk) == walk
}

/// Canonical walks, sorted.
pub fn canonicalize_decomposition(walks: &[Vec<SignedLabel>]) -> Vec<Vec<SignedLabel>> {
    let mut out: Vec<_> = walks.iter().map(|w| canonicalize_walk(w)).collect();
    out.sort();
    out
}

/// Canonical form of the image of `walks` under `r`.
pub fn relabel(r: &SignedRelabelling, walks: &[Vec<SignedLabel>]) -> Vec<Vec<SignedLabel>> {
    let images: Vec<Vec<SignedLabel>> = walks.iter().map(|w| w.iter().map(|&x| r.apply(x)).collect()).collect();
    canonicalize_decomposition(&images)
}

/// Lexicographic comparison of sorted canonical walk lists.
pub fn decomposition_less(a: &[Vec<SignedLabel>], b: &[Vec<SignedLabel>]) -> bool {
    a < b
}

/// True unless some relabelling maps `known` (sorted and canonical) to a
/// strictly smaller walk list.
///
/// When `known` holds exactly the walks of a partial decomposition whose
/// least label is below every label still in use, a failure here means no
/// completion can be the least member of its orbit.
pub fn survives_automorphisms(known: &[Vec<SignedLabel>], relabellings: &[SignedRelabelling]) -> bool {
    relabellings
        .iter()
        .filter(|r| !r.is_identity())
        .all(|r| !decomposition_less(&relabel(r, known), known))
}

/// The least image of a decomposition under the given relabellings, which
/// should include the identity.
pub fn orbit_minimum(walks: &[Vec<SignedLabel>], relabellings: &[SignedRelabelling]) -> Vec<Vec<SignedLabel>> {
    let mut best = canonicalize_decomposition(walks);
    for r in relabellings {
        let image = relabel(r, walks);
        if image < best {
            best = image;
        }
    }
    best
}
