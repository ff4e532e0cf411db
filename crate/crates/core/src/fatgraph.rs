//! Fattened face pairing graphs.
//!
//! Every tetrahedron becomes a K4 whose nodes are its four faces, and every
//! face identification becomes a triple of parallel external arcs between the
//! two face nodes. Triples carry a label in `1..=2n` and an orientation
//! (a designated tail node).

use std::fmt::Write as _;

use thiserror::Error;

use crate::decomp::SignedLabel;
use crate::multigraph::{ArcAutomorphism, MultiGraph};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FatGraphError {
    #[error("face pairing graph is not 4-regular: {0}")]
    NotFourRegular(#[from] crate::multigraph::GraphError),
    #[error("face {face} of tetrahedron {tet} is paired {count} times")]
    BadPairing { tet: usize, face: u8, count: usize },
    #[error("automorphism {index} is inconsistent with the fattened graph")]
    InconsistentAutomorphism { index: usize },
}

/// Face `face` of tetrahedron `tet`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FatNode {
    pub tet: usize,
    pub face: u8,
}

impl FatNode {
    pub fn new(tet: usize, face: u8) -> Self {
        Self { tet, face }
    }

    #[inline]
    pub fn index(self) -> usize {
        4 * self.tet + self.face as usize
    }

    pub fn from_index(index: usize) -> Self {
        Self { tet: index / 4, face: (index % 4) as u8 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Triple {
    pub label: usize,
    pub tail: FatNode,
    pub head: FatNode,
    /// Index of the face pair (multigraph arc) this triple came from.
    pub arc: usize,
}

impl Triple {
    pub fn is_loop(&self) -> bool {
        self.tail.tet == self.head.tet
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FatGraph {
    tet_count: usize,
    /// Endpoint slots of each source arc, slot 0 first.
    arc_nodes: Vec<[FatNode; 2]>,
    /// Indexed by `label - 1`.
    triples: Vec<Triple>,
    /// For each node index: (label, node is the tail of its triple).
    at_node: Vec<(usize, bool)>,
}

impl FatGraph {
    /// Builds the labelled fattened graph from face pairs, one per arc.
    pub fn from_pairs(tet_count: usize, arc_nodes: Vec<[FatNode; 2]>) -> Result<Self, FatGraphError> {
        let mut count = vec![0usize; 4 * tet_count];
        for pair in &arc_nodes {
            for node in pair {
                if node.tet >= tet_count || node.face > 3 {
                    return Err(FatGraphError::BadPairing { tet: node.tet, face: node.face, count: 0 });
                }
                count[node.index()] += 1;
            }
        }
        if let Some(bad) = count.iter().position(|&c| c != 1) {
            let node = FatNode::from_index(bad);
            return Err(FatGraphError::BadPairing { tet: node.tet, face: node.face, count: count[bad] });
        }
        let mut fg = Self { tet_count, arc_nodes, triples: Vec::new(), at_node: Vec::new() };
        fg.assign_labels();
        Ok(fg)
    }

    // Labels 1..=2n in order of sorted endpoint pairs; the smaller endpoint is
    // the tail.
    fn assign_labels(&mut self) {
        let mut order: Vec<(FatNode, FatNode, usize)> = self
            .arc_nodes
            .iter()
            .enumerate()
            .map(|(arc, [a, b])| (*a.min(b), *a.max(b), arc))
            .collect();
        order.sort_unstable();
        self.triples = order
            .into_iter()
            .enumerate()
            .map(|(i, (tail, head, arc))| Triple { label: i + 1, tail, head, arc })
            .collect();
        self.at_node = vec![(0, false); 4 * self.tet_count];
        for t in &self.triples {
            self.at_node[t.tail.index()] = (t.label, true);
            self.at_node[t.head.index()] = (t.label, false);
        }
    }

    /// Reapplies the deterministic labelling and orientation.
    pub fn default_labelling(&self) -> FatGraph {
        let mut fg = self.clone();
        fg.assign_labels();
        fg
    }

    pub fn tet_count(&self) -> usize {
        self.tet_count
    }

    pub fn node_count(&self) -> usize {
        4 * self.tet_count
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn triple(&self, label: usize) -> &Triple {
        &self.triples[label - 1]
    }

    pub fn arc_nodes(&self) -> &[[FatNode; 2]] {
        &self.arc_nodes
    }

    /// Label of the triple meeting `node`, and whether `node` is its tail.
    #[inline]
    pub fn triple_at(&self, node: FatNode) -> (usize, bool) {
        self.at_node[node.index()]
    }

    pub fn label_of_arc(&self, arc: usize) -> usize {
        self.triples.iter().find(|t| t.arc == arc).map(|t| t.label).expect("arc exists")
    }

    /// The 6n internal arcs, each as the two faces of one tetrahedron.
    pub fn internal_arcs(&self) -> impl Iterator<Item = (FatNode, FatNode)> + '_ {
        (0..self.tet_count).flat_map(|tet| {
            (0..4u8).flat_map(move |a| (a + 1..4).map(move |b| (FatNode::new(tet, a), FatNode::new(tet, b))))
        })
    }

    /// The tetrahedron edge represented by an internal arc: the two vertices
    /// not named by the arc's faces.
    pub fn internal_arc_edge(a: FatNode, b: FatNode) -> [u8; 2] {
        let mut rest = (0..4u8).filter(|&v| v != a.face && v != b.face);
        [rest.next().unwrap(), rest.next().unwrap()]
    }

    /// Collapses each K4 back to a node and each triple back to an arc.
    pub fn underlying(&self) -> MultiGraph {
        let arcs = self.arc_nodes.iter().map(|[a, b]| (a.tet, b.tet)).collect();
        MultiGraph::from_arcs(self.tet_count, arcs).expect("endpoints in range")
    }

    /// Debug dump: one line per triple, then one line per node with its three
    /// internal neighbours.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for t in &self.triples {
            let _ = writeln!(out, "{}: ({},{})->({},{})", t.label, t.tail.tet, t.tail.face, t.head.tet, t.head.face);
        }
        for idx in 0..self.node_count() {
            let node = FatNode::from_index(idx);
            let nbrs: Vec<String> = (0..4u8)
                .filter(|&f| f != node.face)
                .map(|f| format!("({},{})", node.tet, f))
                .collect();
            let _ = writeln!(out, "({},{}): {}", node.tet, node.face, nbrs.join(" "));
        }
        out
    }
}

/// Fattens a 4-regular multigraph. Faces of each node are handed out in arc
/// order, slot 0 before slot 1, so a loop joins two distinct faces.
pub fn fatten(g: &MultiGraph) -> Result<FatGraph, FatGraphError> {
    g.check_four_regular()?;
    let mut next_face = vec![0u8; g.order()];
    let arc_nodes = g
        .arcs()
        .iter()
        .map(|&(u, v)| {
            let mut take = |node: usize| {
                let f = next_face[node];
                next_face[node] += 1;
                FatNode::new(node, f)
            };
            let a = take(u);
            let b = take(v);
            [a, b]
        })
        .collect();
    FatGraph::from_pairs(g.order(), arc_nodes)
}

/// A face pairing graph automorphism acting on triple labels, triple
/// orientations and fattened nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedRelabelling {
    /// `label_map[l - 1]` is the image of label `l`.
    pub label_map: Vec<usize>,
    /// Set when the image traversal of label `l` runs against the image
    /// triple's orientation.
    pub sign_flip: Vec<bool>,
    /// Image of each node index.
    pub node_map: Vec<FatNode>,
}

impl SignedRelabelling {
    pub fn identity(fg: &FatGraph) -> Self {
        Self {
            label_map: (1..=fg.triples().len()).collect(),
            sign_flip: vec![false; fg.triples().len()],
            node_map: (0..fg.node_count()).map(FatNode::from_index).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.label_map.iter().enumerate().all(|(i, &l)| l == i + 1)
            && self.sign_flip.iter().all(|f| !f)
            && self.node_map.iter().enumerate().all(|(i, n)| n.index() == i)
    }

    /// Image of a signed label.
    #[inline]
    pub fn apply(&self, signed: SignedLabel) -> SignedLabel {
        let l = signed.label();
        SignedLabel::new(self.label_map[l - 1], signed.is_forward() ^ self.sign_flip[l - 1])
    }
}

/// Lifts arc automorphisms of the underlying graph of `fg` (as built by
/// [`fatten`]) to signed relabellings, one per automorphism.
pub fn lift_automorphisms(
    fg: &FatGraph,
    autos: &[ArcAutomorphism],
) -> Result<Vec<SignedRelabelling>, FatGraphError> {
    let arcs = fg.arc_nodes();
    autos
        .iter()
        .enumerate()
        .map(|(index, aut)| {
            let bad = FatGraphError::InconsistentAutomorphism { index };
            if aut.arc_map.len() != arcs.len() || aut.node_map.len() != fg.tet_count() {
                return Err(bad);
            }
            let mut node_map = vec![FatNode::new(usize::MAX, 0); fg.node_count()];
            for (a, nodes) in arcs.iter().enumerate() {
                let b = *aut.arc_map.get(a).ok_or(FatGraphError::InconsistentAutomorphism { index })?;
                if b >= arcs.len() {
                    return Err(FatGraphError::InconsistentAutomorphism { index });
                }
                for slot in 0..2 {
                    let image = arcs[b][slot ^ usize::from(aut.endpoint_flip[a])];
                    if aut.node_map[nodes[slot].tet] != image.tet {
                        return Err(FatGraphError::InconsistentAutomorphism { index });
                    }
                    node_map[nodes[slot].index()] = image;
                }
            }
            let mut label_map = vec![0; fg.triples().len()];
            let mut sign_flip = vec![false; fg.triples().len()];
            for t in fg.triples() {
                let image_tail = node_map[t.tail.index()];
                let (image_label, is_tail) = fg.triple_at(image_tail);
                label_map[t.label - 1] = image_label;
                sign_flip[t.label - 1] = !is_tail;
            }
            Ok(SignedRelabelling { label_map, sign_flip, node_map })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multigraph::automorphisms;

    fn two_loops() -> MultiGraph {
        "1; 0-0,0-0".parse().unwrap()
    }

    fn double_with_loops() -> MultiGraph {
        "2; 0-0,0-1,0-1,1-1".parse().unwrap()
    }

    #[test]
    fn counts_follow_the_construction() {
        let fg = fatten(&double_with_loops()).unwrap();
        assert_eq!(fg.node_count(), 8);
        assert_eq!(fg.internal_arcs().count(), 12);
        assert_eq!(fg.triples().len(), 4);
        let fg1 = fatten(&two_loops()).unwrap();
        assert_eq!(fg1.node_count(), 4);
        assert_eq!(fg1.internal_arcs().count(), 6);
        assert!(fg1.triples().iter().all(|t| t.is_loop() && t.tail != t.head));
    }

    #[test]
    fn every_node_meets_three_internal_and_one_triple() {
        let fg = fatten(&double_with_loops()).unwrap();
        for idx in 0..fg.node_count() {
            let node = FatNode::from_index(idx);
            let internal = fg.internal_arcs().filter(|(a, b)| *a == node || *b == node).count();
            let triples = fg.triples().iter().filter(|t| t.tail == node || t.head == node).count();
            assert_eq!(internal, 3);
            assert_eq!(3 * triples + internal, 6);
        }
    }

    #[test]
    fn internal_arcs_biject_with_tetrahedron_edges() {
        let fg = fatten(&double_with_loops()).unwrap();
        let mut edges: Vec<_> = fg.internal_arcs().map(|(a, b)| (a.tet, FatGraph::internal_arc_edge(a, b))).collect();
        let total = edges.len();
        edges.sort_unstable();
        edges.dedup();
        assert_eq!(edges.len(), total);
        assert_eq!(total, 6 * fg.tet_count());
    }

    #[test]
    fn labelling_is_deterministic() {
        let fg = fatten(&two_loops()).unwrap();
        let labels: Vec<_> = fg.triples().iter().map(|t| t.label).collect();
        assert_eq!(labels, vec![1, 2]);
        assert_eq!(fg.default_labelling(), fg);
        assert_eq!(fg.default_labelling().default_labelling(), fg);
        let fg2 = fatten(&double_with_loops()).unwrap();
        let mut labels: Vec<_> = fg2.triples().iter().map(|t| t.label).collect();
        labels.dedup();
        assert_eq!(labels, vec![1, 2, 3, 4]);
        for t in fg2.triples() {
            assert!(t.tail < t.head);
        }
    }

    #[test]
    fn forgetting_recovers_the_graph() {
        for g in crate::multigraph::generate(3) {
            let fg = fatten(&g).unwrap();
            assert!(fg.underlying().is_isomorphic(&g));
        }
    }

    #[test]
    fn rejects_irregular_input() {
        let g = MultiGraph::from_arcs(2, vec![(0, 1), (0, 0), (1, 1)]).unwrap();
        assert!(matches!(fatten(&g), Err(FatGraphError::NotFourRegular(_))));
    }

    #[test]
    fn lifting_identity_and_loop_flip() {
        let g = two_loops();
        let fg = fatten(&g).unwrap();
        let autos = automorphisms(&g);
        let lifted = lift_automorphisms(&fg, &autos).unwrap();
        assert_eq!(lifted.len(), autos.len());
        let id = lift_automorphisms(&fg, &[ArcAutomorphism::identity(&g)]).unwrap();
        assert!(id[0].is_identity());

        // Flip only loop 0: its label is kept and its sign is reversed. Traced
        // by hand: slot 0 of arc 0 is face 0, slot 1 is face 1; the flip sends
        // the tail (face 0) to face 1, the head of the same triple.
        let flip = ArcAutomorphism { node_map: vec![0], arc_map: vec![0, 1], endpoint_flip: vec![true, false] };
        let r = &lift_automorphisms(&fg, &[flip]).unwrap()[0];
        let l = fg.label_of_arc(0);
        assert_eq!(r.label_map[l - 1], l);
        assert!(r.sign_flip[l - 1]);
        assert_eq!(r.apply(SignedLabel::new(l, true)), SignedLabel::new(l, false));
        let other = SignedLabel::new(fg.label_of_arc(1), true);
        assert_eq!(r.apply(other), other);
    }

    #[test]
    fn rejects_inconsistent_automorphism() {
        let g = double_with_loops();
        let fg = fatten(&g).unwrap();
        let bogus = ArcAutomorphism { node_map: vec![1, 0], arc_map: vec![0, 1, 2, 3], endpoint_flip: vec![false; 4] };
        assert_eq!(
            lift_automorphisms(&fg, &[bogus]),
            Err(FatGraphError::InconsistentAutomorphism { index: 0 })
        );
    }

    #[test]
    fn dump_format() {
        let fg = fatten(&two_loops()).unwrap();
        let dump = fg.dump();
        assert!(dump.starts_with("1: (0,0)->(0,1)\n2: (0,2)->(0,3)\n"));
        assert!(dump.contains("(0,0): (0,1) (0,2) (0,3)\n"));
    }
}
