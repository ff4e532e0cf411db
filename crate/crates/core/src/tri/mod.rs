//! Triangulations as gluing tables, with the combinatorial checks needed to
//! recognise closed 3-manifold triangulations.
//!
//! Tetrahedron vertices are `0..4` and face `f` is the face opposite vertex
//! `f`. A gluing of face `f` of tetrahedron `t` is stored as the partner
//! tetrahedron together with a [`Perm4`] that sends `f` to the partner face
//! and each vertex of face `f` to the vertex it is identified with.

mod convert;
mod perm;

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use convert::{decomposition_to_triangulation, triangulation_to_decomposition};
pub use perm::Perm4;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TriError {
    #[error("tetrahedron {tet} is out of range")]
    TetOutOfRange { tet: usize },
    #[error("face {face} of tetrahedron {tet} is already glued")]
    AlreadyGlued { tet: usize, face: u8 },
    #[error("face {face} of tetrahedron {tet} cannot be glued to itself")]
    SelfGluing { tet: usize, face: u8 },
    #[error("gluing of face {face} of tetrahedron {tet} is not matched by its partner")]
    NotInvolutive { tet: usize, face: u8 },
    #[error("face {face} of tetrahedron {tet} is unglued")]
    NotClosed { tet: usize, face: u8 },
    #[error("triple {label} gives an inconsistent vertex correspondence")]
    InconsistentTriple { label: usize },
    #[error("malformed gluing table line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Decomposition(#[from] crate::decomp::DecompError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gluing {
    pub tet: usize,
    pub perm: Perm4,
}

/// The six edges of a tetrahedron, by vertex pair.
pub const EDGE_VERTICES: [[u8; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

pub fn edge_index(a: u8, b: u8) -> usize {
    let (a, b) = (a.min(b), a.max(b));
    EDGE_VERTICES
        .iter()
        .position(|e| *e == [a, b])
        .expect("distinct vertices")
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Triangulation {
    gluings: Vec<[Option<Gluing>; 4]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TetEdge {
    pub tet: usize,
    pub vertices: [u8; 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeClass {
    pub members: Vec<TetEdge>,
    pub reversed: bool,
}

impl EdgeClass {
    pub fn degree(&self) -> usize {
        self.members.len()
    }

    pub fn distinct_tets(&self) -> usize {
        let mut tets: Vec<_> = self.members.iter().map(|e| e.tet).collect();
        tets.sort_unstable();
        tets.dedup();
        tets.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexClass {
    /// (tetrahedron, vertex) pairs.
    pub members: Vec<(usize, u8)>,
}

/// One connected component of the vertex links, i.e. the link of one vertex
/// of the triangulation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkComponent {
    pub vertex_class: usize,
    pub triangles: usize,
    pub edges: usize,
    pub vertices: usize,
    pub closed: bool,
}

impl LinkComponent {
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices as i64 - self.edges as i64 + self.triangles as i64
    }

    pub fn is_sphere(&self) -> bool {
        self.closed && self.euler_characteristic() == 2
    }

    pub fn is_disc(&self) -> bool {
        !self.closed && self.euler_characteristic() == 1
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl Triangulation {
    /// `n` tetrahedra with no gluings.
    pub fn new(n: usize) -> Self {
        Self { gluings: vec![[None; 4]; n] }
    }

    pub fn size(&self) -> usize {
        self.gluings.len()
    }

    pub fn gluing(&self, tet: usize, face: u8) -> Option<Gluing> {
        self.gluings[tet][face as usize]
    }

    /// Glues face `face` of `tet` to face `perm(face)` of `other`, and records
    /// the inverse gluing on the partner.
    pub fn glue(&mut self, tet: usize, face: u8, other: usize, perm: Perm4) -> Result<(), TriError> {
        let n = self.size();
        for t in [tet, other] {
            if t >= n {
                return Err(TriError::TetOutOfRange { tet: t });
            }
        }
        let other_face = perm.apply(face);
        if tet == other && face == other_face {
            return Err(TriError::SelfGluing { tet, face });
        }
        if self.gluings[tet][face as usize].is_some() {
            return Err(TriError::AlreadyGlued { tet, face });
        }
        if self.gluings[other][other_face as usize].is_some() {
            return Err(TriError::AlreadyGlued { tet: other, face: other_face });
        }
        self.gluings[tet][face as usize] = Some(Gluing { tet: other, perm });
        self.gluings[other][other_face as usize] = Some(Gluing { tet, perm: perm.inverse() });
        Ok(())
    }

    pub fn unglue(&mut self, tet: usize, face: u8) {
        if let Some(g) = self.gluings[tet][face as usize].take() {
            self.gluings[g.tet][g.perm.apply(face) as usize] = None;
        }
    }

    /// Checks that every gluing is matched by the inverse gluing.
    pub fn check(&self) -> Result<(), TriError> {
        for (tet, faces) in self.gluings.iter().enumerate() {
            for face in 0..4u8 {
                let Some(g) = faces[face as usize] else { continue };
                if g.tet >= self.size() {
                    return Err(TriError::TetOutOfRange { tet: g.tet });
                }
                let back = self.gluings[g.tet][g.perm.apply(face) as usize];
                let ok = back == Some(Gluing { tet, perm: g.perm.inverse() });
                if !ok || (g.tet == tet && g.perm.apply(face) == face) {
                    return Err(TriError::NotInvolutive { tet, face });
                }
            }
        }
        Ok(())
    }

    pub fn is_closed(&self) -> bool {
        self.gluings.iter().all(|f| f.iter().all(Option::is_some))
    }

    pub fn first_unglued(&self) -> Option<(usize, u8)> {
        (0..self.size())
            .flat_map(|t| (0..4u8).map(move |f| (t, f)))
            .find(|&(t, f)| self.gluings[t][f as usize].is_none())
    }

    /// Number of glued face pairs.
    pub fn gluing_count(&self) -> usize {
        self.gluings.iter().flatten().filter(|g| g.is_some()).count() / 2
    }

    pub fn is_connected(&self) -> bool {
        let n = self.size();
        if n == 0 {
            return true;
        }
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(t) = queue.pop_front() {
            for g in self.gluings[t].iter().flatten() {
                if !seen[g.tet] {
                    seen[g.tet] = true;
                    queue.push_back(g.tet);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    pub fn edge_classes(&self) -> Vec<EdgeClass> {
        let n = self.size();
        // Orientation of each tetrahedron edge relative to its class root;
        // tetrahedron edges are oriented from the smaller vertex.
        let mut parity: Vec<Option<bool>> = vec![None; 6 * n];
        let mut classes = Vec::new();
        for start in 0..6 * n {
            if parity[start].is_some() {
                continue;
            }
            parity[start] = Some(false);
            let mut members = Vec::new();
            let mut reversed = false;
            let mut queue = VecDeque::from([start]);
            while let Some(idx) = queue.pop_front() {
                let (tet, [a, b]) = (idx / 6, EDGE_VERTICES[idx % 6]);
                members.push(TetEdge { tet, vertices: [a, b] });
                let p = parity[idx].unwrap();
                for face in (0..4u8).filter(|&f| f != a && f != b) {
                    let Some(g) = self.gluings[tet][face as usize] else { continue };
                    let (ia, ib) = (g.perm.apply(a), g.perm.apply(b));
                    let target = 6 * g.tet + edge_index(ia, ib);
                    let q = p ^ (ia > ib);
                    match parity[target] {
                        None => {
                            parity[target] = Some(q);
                            queue.push_back(target);
                        }
                        Some(existing) => reversed |= existing != q,
                    }
                }
            }
            members.sort_unstable();
            classes.push(EdgeClass { members, reversed });
        }
        classes
    }

    fn vertex_union_find(&self) -> UnionFind {
        let mut uf = UnionFind::new(4 * self.size());
        for (tet, faces) in self.gluings.iter().enumerate() {
            for face in 0..4u8 {
                let Some(g) = faces[face as usize] else { continue };
                for v in (0..4u8).filter(|&v| v != face) {
                    uf.union(4 * tet + v as usize, 4 * g.tet + g.perm.apply(v) as usize);
                }
            }
        }
        uf
    }

    pub fn vertex_classes(&self) -> Vec<VertexClass> {
        let mut uf = self.vertex_union_find();
        let mut roots: Vec<usize> = Vec::new();
        let mut classes: Vec<VertexClass> = Vec::new();
        for idx in 0..4 * self.size() {
            let r = uf.find(idx);
            let member = (idx / 4, (idx % 4) as u8);
            match roots.iter().position(|&x| x == r) {
                Some(c) => classes[c].members.push(member),
                None => {
                    roots.push(r);
                    classes.push(VertexClass { members: vec![member] });
                }
            }
        }
        classes
    }

    /// The link of every vertex, one component per vertex class, in the order
    /// of [`Triangulation::vertex_classes`].
    pub fn vertex_links(&self) -> Vec<LinkComponent> {
        let n = self.size();
        let mut vuf = self.vertex_union_find();
        let mut roots: Vec<usize> = Vec::new();
        let mut class_of = vec![0; 4 * n];
        for idx in 0..4 * n {
            let r = vuf.find(idx);
            class_of[idx] = match roots.iter().position(|&x| x == r) {
                Some(c) => c,
                None => {
                    roots.push(r);
                    roots.len() - 1
                }
            };
        }
        let mut comps: Vec<LinkComponent> = (0..roots.len())
            .map(|c| LinkComponent { vertex_class: c, triangles: 0, edges: 0, vertices: 0, closed: true })
            .collect();
        // Corners of link triangles: (tet, vertex, toward-vertex).
        let corner = |t: usize, v: u8, w: u8| 16 * t + 4 * v as usize + w as usize;
        let mut cuf = UnionFind::new(16 * n);
        for tet in 0..n {
            for v in 0..4u8 {
                let c = &mut comps[class_of[4 * tet + v as usize]];
                c.triangles += 1;
                for face in (0..4u8).filter(|&f| f != v) {
                    match self.gluings[tet][face as usize] {
                        // Each glued side is seen twice, once from each side.
                        Some(_) => c.edges += 1,
                        None => {
                            c.edges += 2;
                            c.closed = false;
                        }
                    }
                }
            }
            for face in 0..4u8 {
                let Some(g) = self.gluings[tet][face as usize] else { continue };
                for v in (0..4u8).filter(|&v| v != face) {
                    for w in (0..4u8).filter(|&w| w != face && w != v) {
                        cuf.union(
                            corner(tet, v, w),
                            corner(g.tet, g.perm.apply(v), g.perm.apply(w)),
                        );
                    }
                }
            }
        }
        for c in comps.iter_mut() {
            c.edges /= 2;
        }
        let mut seen = vec![false; 16 * n];
        for tet in 0..n {
            for v in 0..4u8 {
                for w in (0..4u8).filter(|&w| w != v) {
                    let r = cuf.find(corner(tet, v, w));
                    if !seen[r] {
                        seen[r] = true;
                        comps[class_of[4 * tet + v as usize]].vertices += 1;
                    }
                }
            }
        }
        comps
    }

    /// V - E + F - T over the cell structure of the triangulation.
    pub fn euler_characteristic(&self) -> i64 {
        let n = self.size() as i64;
        let faces = 4 * n - self.gluing_count() as i64;
        self.vertex_classes().len() as i64 - self.edge_classes().len() as i64 + faces - n
    }

    pub fn is_orientable(&self) -> bool {
        let n = self.size();
        if n == 0 {
            return true;
        }
        let mut orient: Vec<i32> = vec![0; n];
        for start in 0..n {
            if orient[start] != 0 {
                continue;
            }
            orient[start] = 1;
            let mut queue = VecDeque::from([start]);
            while let Some(t) = queue.pop_front() {
                for g in self.gluings[t].iter().flatten() {
                    let want = -g.perm.sign() * orient[t];
                    if orient[g.tet] == 0 {
                        orient[g.tet] = want;
                        queue.push_back(g.tet);
                    } else if orient[g.tet] != want {
                        return false;
                    }
                }
            }
        }
        true
    }

    pub fn has_reversed_edge(&self) -> bool {
        self.edge_classes().iter().any(|e| e.reversed)
    }

    /// Closed 3-manifold test: closed, connected, every vertex link a
    /// 2-sphere, and no edge identified with itself in reverse.
    pub fn is_3manifold(&self) -> bool {
        self.is_closed()
            && self.is_connected()
            && !self.has_reversed_edge()
            && self.vertex_links().iter().all(LinkComponent::is_sphere)
    }

    /// Like [`Triangulation::is_3manifold`] but also accepts boundary, where
    /// vertex links may be discs.
    pub fn is_3manifold_with_boundary(&self) -> bool {
        self.is_connected()
            && !self.has_reversed_edge()
            && self.vertex_links().iter().all(|l| l.is_sphere() || l.is_disc())
    }

    pub fn is_one_vertex_3manifold(&self) -> bool {
        self.is_3manifold() && self.vertex_classes().len() == 1
    }

    /// Combinatorial isomorphism (relabelling tetrahedra and their vertices).
    /// Only exact for connected triangulations.
    pub fn is_isomorphic(&self, other: &Triangulation) -> bool {
        let n = self.size();
        if n != other.size() || self.gluing_count() != other.gluing_count() {
            return false;
        }
        if n == 0 {
            return true;
        }
        for start in 0..n {
            for p in Perm4::all() {
                if self.extend_isomorphism(other, start, p) {
                    return true;
                }
            }
        }
        false
    }

    fn extend_isomorphism(&self, other: &Triangulation, image0: usize, p0: Perm4) -> bool {
        let n = self.size();
        let mut map: Vec<Option<(usize, Perm4)>> = vec![None; n];
        let mut used = vec![false; n];
        map[0] = Some((image0, p0));
        used[image0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(t) = queue.pop_front() {
            let (it, pt) = map[t].unwrap();
            for face in 0..4u8 {
                let here = self.gluings[t][face as usize];
                let there = other.gluings[it][pt.apply(face) as usize];
                match (here, there) {
                    (None, None) => {}
                    (Some(g), Some(h)) => {
                        // Vertex map on g.tet forced by commuting with the gluings.
                        let pu = h.perm.compose(pt).compose(g.perm.inverse());
                        match map[g.tet] {
                            Some((iu, existing)) => {
                                if iu != h.tet || existing != pu {
                                    return false;
                                }
                            }
                            None => {
                                if used[h.tet] {
                                    return false;
                                }
                                used[h.tet] = true;
                                map[g.tet] = Some((h.tet, pu));
                                queue.push_back(g.tet);
                            }
                        }
                    }
                    _ => return false,
                }
            }
        }
        map.iter().all(Option::is_some)
    }

    /// One line per tetrahedron; see [`Triangulation::from_text`].
    pub fn to_text(&self) -> String {
        let lines: Vec<String> = self
            .gluings
            .iter()
            .map(|faces| {
                (0..4u8)
                    .map(|face| match faces[face as usize] {
                        None => "-".to_string(),
                        Some(g) => {
                            let word: String = (0..4u8)
                                .filter(|&v| v != face)
                                .map(|v| char::from(b'0' + g.perm.apply(v)))
                                .collect();
                            format!("({}, {}, {})", g.tet, g.perm.apply(face), word)
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        lines.join("\n")
    }

    /// Parses the gluing table format: one line per tetrahedron holding four
    /// entries for faces 0..4, each either `-` or `(j, g, p)` where `p` lists
    /// the images of the face's three vertices in increasing order.
    pub fn from_text(text: &str) -> Result<Self, TriError> {
        let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
        let mut tri = Triangulation::new(lines.len());
        let mut entries = Vec::new();
        for (line_no, line) in lines.iter().enumerate() {
            let err = |reason: &str| TriError::Parse { line: line_no + 1, reason: reason.to_string() };
            let mut rest = line.trim();
            let mut face = 0u8;
            while !rest.is_empty() {
                if face > 3 {
                    return Err(err("more than four entries"));
                }
                if let Some(r) = rest.strip_prefix('-') {
                    rest = r.trim_start();
                } else if rest.starts_with('(') {
                    let close = rest.find(')').ok_or_else(|| err("unclosed '('"))?;
                    let parts: Vec<&str> = rest[1..close].split(',').map(str::trim).collect();
                    if parts.len() != 3 {
                        return Err(err("entry needs three fields"));
                    }
                    let other: usize = parts[0].parse().map_err(|_| err("bad tetrahedron"))?;
                    let other_face: u8 = parts[1].parse().map_err(|_| err("bad face"))?;
                    let word: Vec<u8> = parts[2].bytes().map(|b| b.wrapping_sub(b'0')).collect();
                    if word.len() != 3 || other_face > 3 {
                        return Err(err("bad vertex word"));
                    }
                    let verts: Vec<u8> = (0..4u8).filter(|&v| v != face).collect();
                    let pairs = [(verts[0], word[0]), (verts[1], word[1]), (verts[2], word[2])];
                    let perm = Perm4::from_partial(&pairs)
                        .filter(|p| p.apply(face) == other_face)
                        .ok_or_else(|| err("vertex word is not a bijection onto the partner face"))?;
                    entries.push((line_no, face, other, perm));
                    rest = rest[close + 1..].trim_start();
                } else {
                    return Err(err("expected '-' or '('"));
                }
                face += 1;
            }
            if face != 4 {
                return Err(err("expected four entries"));
            }
        }
        let written: Vec<(usize, u8)> = entries.iter().map(|&(t, f, _, _)| (t, f)).collect();
        for (tet, face, other, perm) in entries {
            if other >= tri.size() {
                return Err(TriError::Parse { line: tet + 1, reason: format!("tetrahedron {other} out of range") });
            }
            match tri.gluings[tet][face as usize] {
                Some(existing) if existing == (Gluing { tet: other, perm }) => {}
                Some(_) => return Err(TriError::NotInvolutive { tet, face }),
                None => tri.glue(tet, face, other, perm).map_err(|_| TriError::NotInvolutive { tet, face })?,
            }
        }
        // A gluing implied by its partner must also be written out.
        if let Some((tet, face)) = (0..tri.size())
            .flat_map(|t| (0..4u8).map(move |f| (t, f)))
            .find(|&(t, f)| tri.gluings[t][f as usize].is_some() && !written.contains(&(t, f)))
        {
            return Err(TriError::NotInvolutive { tet, face });
        }
        tri.check()?;
        Ok(tri)
    }
}

impl fmt::Display for Triangulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Triangulation {
    type Err = TriError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_text(s)
    }
}
