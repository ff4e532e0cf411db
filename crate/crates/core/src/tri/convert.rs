use super::{Perm4, TriError, Triangulation};
use crate::decomp::{Layout, OrderedDecomposition, SignedLabel};
use crate::fatgraph::{FatGraph, FatNode};

/// Builds the triangulation described by a decomposition.
///
/// An external arc traversed from node `A` to node `B`, preceded by the
/// internal arc `{P, A}` and followed by `{B, Q}`, identifies vertex
/// `face(P)` of `tet(A)` with vertex `face(Q)` of `tet(B)`. The three members
/// of a triple give the vertex map of one face gluing.
pub fn decomposition_to_triangulation(d: &OrderedDecomposition, fg: &FatGraph) -> Result<Triangulation, TriError> {
    let layout = Layout::resolve(d, fg)?;
    let mut pairs: Vec<Vec<(u8, u8)>> = vec![Vec::with_capacity(3); fg.triples().len()];
    for o in layout.occurrences() {
        let triple = fg.triple(o.label);
        let pair = if o.from == triple.tail {
            (o.before.face, o.after.face)
        } else {
            (o.after.face, o.before.face)
        };
        pairs[o.label - 1].push(pair);
    }
    let mut tri = Triangulation::new(fg.tet_count());
    for t in fg.triples() {
        let p = &pairs[t.label - 1];
        let bad = || TriError::InconsistentTriple { label: t.label };
        let perm = Perm4::from_partial(&[p[0], p[1], p[2]]).ok_or_else(bad)?;
        if perm.apply(t.tail.face) != t.head.face {
            return Err(bad());
        }
        tri.glue(t.tail.tet, t.tail.face, t.head.tet, perm)?;
    }
    Ok(tri)
}

/// Reads off the fattened face pairing graph of a closed triangulation and
/// the decomposition whose walks trace the faces around each edge.
pub fn triangulation_to_decomposition(t: &Triangulation) -> Result<(FatGraph, OrderedDecomposition), TriError> {
    t.check()?;
    if let Some((tet, face)) = t.first_unglued() {
        return Err(TriError::NotClosed { tet, face });
    }
    let n = t.size();
    let mut arc_nodes = Vec::with_capacity(2 * n);
    for tet in 0..n {
        for face in 0..4u8 {
            let g = t.gluing(tet, face).expect("closed");
            let partner = FatNode::new(g.tet, g.perm.apply(face));
            let here = FatNode::new(tet, face);
            if here < partner {
                arc_nodes.push([here, partner]);
            }
        }
    }
    let fg = FatGraph::from_pairs(n, arc_nodes).expect("a closed triangulation pairs every face once");

    // Internal arc {(tet, p), (tet, q)} traversed from p to q.
    let mut used = vec![false; 16 * n];
    let key = |tet: usize, p: u8, q: u8| 16 * tet + 4 * p.min(q) as usize + p.max(q) as usize;
    let mut walks = Vec::new();
    for tet in 0..n {
        for p in 0..4u8 {
            for q in p + 1..4 {
                if used[key(tet, p, q)] {
                    continue;
                }
                let mut walk = Vec::new();
                let (mut i, mut a, mut b) = (tet, p, q);
                loop {
                    let k = key(i, a, b);
                    assert!(!used[k], "internal arc visited twice");
                    used[k] = true;
                    let (label, is_tail) = fg.triple_at(FatNode::new(i, b));
                    walk.push(SignedLabel::new(label, is_tail));
                    let g = t.gluing(i, b).expect("closed");
                    (i, a, b) = (g.tet, g.perm.apply(b), g.perm.apply(a));
                    if (i, a, b) == (tet, p, q) {
                        break;
                    }
                }
                walks.push(walk);
            }
        }
    }
    Ok((fg, OrderedDecomposition::from_label_walks(walks)))
}
