//! Connected 4-regular multigraphs: the face pairing graphs of closed
//! triangulations.
//!
//! Loops and parallel arcs are allowed. Every arc has a stable index and two
//! endpoint slots (slot 0 is the first stored endpoint), so that a loop can be
//! flipped by an automorphism and so that fattening can attach each endpoint
//! slot to its own tetrahedron face.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("arc {arc} references node {node} but the graph has {order} nodes")]
    NodeOutOfRange { arc: usize, node: usize, order: usize },
    #[error("node {node} has degree {degree}, expected 4")]
    NotFourRegular { node: usize, degree: usize },
    #[error("malformed graph text: {0}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiGraph {
    order: usize,
    arcs: Vec<(usize, usize)>,
}

impl MultiGraph {
    /// Builds a graph without checking regularity. Endpoints are range-checked.
    pub fn from_arcs(order: usize, arcs: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        for (i, &(u, v)) in arcs.iter().enumerate() {
            for node in [u, v] {
                if node >= order {
                    return Err(GraphError::NodeOutOfRange { arc: i, node, order });
                }
            }
        }
        Ok(Self { order, arcs })
    }

    /// Builds a 4-regular multigraph, rejecting any other degree sequence.
    pub fn new(order: usize, arcs: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let g = Self::from_arcs(order, arcs)?;
        g.check_four_regular()?;
        Ok(g)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn arcs(&self) -> &[(usize, usize)] {
        &self.arcs
    }

    pub fn degree(&self, node: usize) -> usize {
        self.arcs
            .iter()
            .map(|&(u, v)| usize::from(u == node) + usize::from(v == node))
            .sum()
    }

    pub fn check_four_regular(&self) -> Result<(), GraphError> {
        for node in 0..self.order {
            let degree = self.degree(node);
            if degree != 4 {
                return Err(GraphError::NotFourRegular { node, degree });
            }
        }
        Ok(())
    }

    pub fn is_four_regular(&self) -> bool {
        self.check_four_regular().is_ok()
    }

    /// Symmetric multiplicity matrix; the diagonal holds loop counts.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let mut adj = vec![vec![0u8; self.order]; self.order];
        for &(u, v) in &self.arcs {
            if u == v {
                adj[u][u] += 1;
            } else {
                adj[u][v] += 1;
                adj[v][u] += 1;
            }
        }
        adj
    }

    fn from_adjacency(adj: &[Vec<u8>]) -> Self {
        let n = adj.len();
        let mut arcs = Vec::new();
        for u in 0..n {
            for _ in 0..adj[u][u] {
                arcs.push((u, u));
            }
            for v in u + 1..n {
                for _ in 0..adj[u][v] {
                    arcs.push((u, v));
                }
            }
        }
        arcs.sort_unstable();
        Self { order: n, arcs }
    }

    pub fn is_connected(&self) -> bool {
        if self.order == 0 {
            return true;
        }
        let mut seen = vec![false; self.order];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(a, b) in &self.arcs {
                let other = if a == u {
                    b
                } else if b == u {
                    a
                } else {
                    continue;
                };
                if !seen[other] {
                    seen[other] = true;
                    stack.push(other);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Relabels nodes so that old node `perm[p]` becomes node `p`. Arcs come
    /// out sorted.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut inverse = vec![0; self.order];
        for (p, &old) in perm.iter().enumerate() {
            inverse[old] = p;
        }
        let mut arcs: Vec<_> = self
            .arcs
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (inverse[u], inverse[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        arcs.sort_unstable();
        Self { order: self.order, arcs }
    }

    /// Isomorphism-invariant byte string: the node count followed by the
    /// lexicographically greatest column code over all node orderings.
    pub fn canonical_form(&self) -> Vec<u8> {
        let (code, _) = max_code(&self.adjacency());
        let mut out = Vec::with_capacity(code.len() + 1);
        out.push(self.order as u8);
        out.extend(code);
        out
    }

    /// The labelling whose column code is the canonical one.
    pub fn canonical_relabelling(&self) -> Self {
        let (_, perm) = max_code(&self.adjacency());
        self.relabel(&perm)
    }

    pub fn is_isomorphic(&self, other: &Self) -> bool {
        self.order == other.order
            && self.arcs.len() == other.arcs.len()
            && self.canonical_form() == other.canonical_form()
    }

    /// Text form `n; u-v,u-v,...` with arcs sorted and loops written `u-u`.
    pub fn to_text(&self) -> String {
        let mut arcs: Vec<_> = self.arcs.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        arcs.sort_unstable();
        let body: Vec<String> = arcs.iter().map(|(u, v)| format!("{u}-{v}")).collect();
        format!("{}; {}", self.order, body.join(","))
    }
}

impl fmt::Display for MultiGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for MultiGraph {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (order, body) = s
            .split_once(';')
            .ok_or_else(|| GraphError::Parse(format!("missing ';' in {s:?}")))?;
        let order: usize = order
            .trim()
            .parse()
            .map_err(|_| GraphError::Parse(format!("bad node count {order:?}")))?;
        let mut arcs = Vec::new();
        for item in body.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (u, v) = item
                .split_once('-')
                .ok_or_else(|| GraphError::Parse(format!("bad arc {item:?}")))?;
            let parse = |t: &str| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|_| GraphError::Parse(format!("bad arc {item:?}")))
            };
            let (u, v) = (parse(u)?, parse(v)?);
            arcs.push((u.min(v), u.max(v)));
        }
        arcs.sort_unstable();
        MultiGraph::new(order, arcs)
    }
}

// ---------------------------------------------------------------------------
// Canonical column code.
//
// For a node ordering p_0, p_1, ..., column k of the code is
// (A[p_0][p_k], ..., A[p_{k-1}][p_k], L[p_k]). The code of the first k nodes is
// a prefix of the full code, which is what makes orderly generation work.

fn push_column(adj: &[Vec<u8>], order: &[usize], node: usize, out: &mut Vec<u8>) {
    for &prev in order {
        out.push(adj[prev][node]);
    }
    out.push(adj[node][node]);
}

struct CodeSearch<'a> {
    adj: &'a [Vec<u8>],
    best: Vec<u8>,
    best_order: Vec<usize>,
    order: Vec<usize>,
    code: Vec<u8>,
    used: Vec<bool>,
    // Set when only checking whether `best` (the identity code) is maximal.
    abort_on_greater: bool,
    found_greater: bool,
}

impl CodeSearch<'_> {
    fn run(&mut self) {
        let n = self.adj.len();
        if self.found_greater {
            return;
        }
        if self.order.len() == n {
            if self.best.is_empty() || self.code > self.best {
                self.best = self.code.clone();
                self.best_order = self.order.clone();
            }
            return;
        }
        // Try candidates giving the largest next column first.
        let mut candidates: Vec<(Vec<u8>, usize)> = (0..n)
            .filter(|&v| !self.used[v])
            .map(|v| {
                let mut col = Vec::with_capacity(self.order.len() + 1);
                push_column(self.adj, &self.order, v, &mut col);
                (col, v)
            })
            .collect();
        candidates.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (col, v) in candidates {
            let start = self.code.len();
            self.code.extend_from_slice(&col);
            let cmp = if self.best.is_empty() {
                std::cmp::Ordering::Greater
            } else {
                self.code[..].cmp(&self.best[..self.code.len()])
            };
            if cmp == std::cmp::Ordering::Greater && self.abort_on_greater {
                self.found_greater = true;
                self.code.truncate(start);
                return;
            }
            if cmp != std::cmp::Ordering::Less {
                self.used[v] = true;
                self.order.push(v);
                self.run();
                self.order.pop();
                self.used[v] = false;
            }
            self.code.truncate(start);
            if self.found_greater {
                return;
            }
        }
    }
}

fn identity_code(adj: &[Vec<u8>]) -> Vec<u8> {
    let mut code = Vec::new();
    let mut order = Vec::new();
    for v in 0..adj.len() {
        push_column(adj, &order, v, &mut code);
        order.push(v);
    }
    code
}

/// Maximum column code and a node ordering attaining it.
fn max_code(adj: &[Vec<u8>]) -> (Vec<u8>, Vec<usize>) {
    let n = adj.len();
    let mut search = CodeSearch {
        adj,
        best: Vec::new(),
        best_order: Vec::new(),
        order: Vec::with_capacity(n),
        code: Vec::new(),
        used: vec![false; n],
        abort_on_greater: false,
        found_greater: false,
    };
    search.run();
    (search.best, search.best_order)
}

/// True iff the identity ordering already attains the maximum code.
fn is_max_code(adj: &[Vec<u8>]) -> bool {
    let n = adj.len();
    let mut search = CodeSearch {
        adj,
        best: identity_code(adj),
        best_order: (0..n).collect(),
        order: Vec::with_capacity(n),
        code: Vec::new(),
        used: vec![false; n],
        abort_on_greater: true,
        found_greater: false,
    };
    search.run();
    !search.found_greater
}

// ---------------------------------------------------------------------------
// Automorphisms.

/// An automorphism acting on nodes, arcs and arc endpoint slots.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ArcAutomorphism {
    pub node_map: Vec<usize>,
    pub arc_map: Vec<usize>,
    /// `endpoint_flip[a]` is set when slot 0 of arc `a` maps to slot 1 of
    /// `arc_map[a]`.
    pub endpoint_flip: Vec<bool>,
}

impl ArcAutomorphism {
    pub fn identity(g: &MultiGraph) -> Self {
        Self {
            node_map: (0..g.order()).collect(),
            arc_map: (0..g.arcs().len()).collect(),
            endpoint_flip: vec![false; g.arcs().len()],
        }
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &Self) -> Self {
        Self {
            node_map: first.node_map.iter().map(|&v| self.node_map[v]).collect(),
            arc_map: first.arc_map.iter().map(|&a| self.arc_map[a]).collect(),
            endpoint_flip: first
                .arc_map
                .iter()
                .zip(&first.endpoint_flip)
                .map(|(&a, &f)| f ^ self.endpoint_flip[a])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        let mut node_map = vec![0; self.node_map.len()];
        for (v, &w) in self.node_map.iter().enumerate() {
            node_map[w] = v;
        }
        let mut arc_map = vec![0; self.arc_map.len()];
        let mut endpoint_flip = vec![false; self.arc_map.len()];
        for (a, &b) in self.arc_map.iter().enumerate() {
            arc_map[b] = a;
            endpoint_flip[b] = self.endpoint_flip[a];
        }
        Self { node_map, arc_map, endpoint_flip }
    }

    /// Checks that the map really is an automorphism of `g`.
    pub fn is_valid_for(&self, g: &MultiGraph) -> bool {
        let arcs = g.arcs();
        if self.node_map.len() != g.order() || self.arc_map.len() != arcs.len() {
            return false;
        }
        let mut hit = vec![false; arcs.len()];
        for (a, &(u, v)) in arcs.iter().enumerate() {
            let b = self.arc_map[a];
            if b >= arcs.len() || hit[b] {
                return false;
            }
            hit[b] = true;
            let (x, y) = arcs[b];
            let (iu, iv) = if self.endpoint_flip[a] { (y, x) } else { (x, y) };
            if self.node_map[u] != iu || self.node_map[v] != iv {
                return false;
            }
        }
        true
    }
}

/// The full arc-level automorphism group: node automorphisms, every matching
/// of parallel arcs, and both orientations of every loop.
pub fn automorphisms(g: &MultiGraph) -> Vec<ArcAutomorphism> {
    let adj = g.adjacency();
    let n = g.order();
    let mut node_maps = Vec::new();
    let mut image = vec![usize::MAX; n];
    let mut taken = vec![false; n];
    node_automorphisms(&adj, 0, &mut image, &mut taken, &mut node_maps);

    // Group arcs into classes keyed by their (sorted) endpoints.
    let arcs = g.arcs();
    let key = |&(u, v): &(usize, usize)| (u.min(v), u.max(v));
    let mut result = Vec::new();
    for node_map in node_maps {
        // For each arc class, the list of arcs in the image class.
        let mut per_arc_choices: Vec<(usize, Vec<usize>)> = Vec::new();
        let mut classes: Vec<((usize, usize), Vec<usize>)> = Vec::new();
        for (a, arc) in arcs.iter().enumerate() {
            let k = key(arc);
            match classes.iter_mut().find(|(c, _)| *c == k) {
                Some((_, members)) => members.push(a),
                None => classes.push((k, vec![a])),
            }
        }
        for (k, members) in &classes {
            let (iu, iv) = (node_map[k.0], node_map[k.1]);
            let target_key = (iu.min(iv), iu.max(iv));
            let targets: Vec<usize> = (0..arcs.len()).filter(|&b| key(&arcs[b]) == target_key).collect();
            per_arc_choices.push((members.len(), targets));
        }
        let mut partial: Vec<(Vec<usize>, Vec<usize>)> = vec![(Vec::new(), Vec::new())];
        for ((_, members), (_, targets)) in classes.iter().zip(&per_arc_choices) {
            let perms = permutations(targets);
            let mut next = Vec::new();
            for (srcs, dsts) in &partial {
                for p in &perms {
                    let mut s = srcs.clone();
                    let mut d = dsts.clone();
                    s.extend(members.iter().copied());
                    d.extend(p.iter().copied());
                    next.push((s, d));
                }
            }
            partial = next;
        }
        for (srcs, dsts) in partial {
            let mut arc_map = vec![0; arcs.len()];
            for (&s, &d) in srcs.iter().zip(&dsts) {
                arc_map[s] = d;
            }
            // Endpoint flips are forced for non-loops and free for loops.
            let loops: Vec<usize> = (0..arcs.len()).filter(|&a| arcs[a].0 == arcs[a].1).collect();
            let mut base_flip = vec![false; arcs.len()];
            for (a, &(u, _)) in arcs.iter().enumerate() {
                let (x, _) = arcs[arc_map[a]];
                base_flip[a] = node_map[u] != x;
            }
            for mask in 0u32..(1 << loops.len()) {
                let mut flip = base_flip.clone();
                for (i, &a) in loops.iter().enumerate() {
                    flip[a] = mask >> i & 1 == 1;
                }
                result.push(ArcAutomorphism {
                    node_map: node_map.clone(),
                    arc_map: arc_map.clone(),
                    endpoint_flip: flip,
                });
            }
        }
    }
    result
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

fn node_automorphisms(
    adj: &[Vec<u8>],
    next: usize,
    image: &mut Vec<usize>,
    taken: &mut Vec<bool>,
    out: &mut Vec<Vec<usize>>,
) {
    let n = adj.len();
    if next == n {
        out.push(image.clone());
        return;
    }
    for cand in 0..n {
        if taken[cand] {
            continue;
        }
        let ok = adj[next][next] == adj[cand][cand]
            && (0..next).all(|prev| adj[prev][next] == adj[image[prev]][cand]);
        if ok {
            image[next] = cand;
            taken[cand] = true;
            node_automorphisms(adj, next + 1, image, taken, out);
            taken[cand] = false;
            image[next] = usize::MAX;
        }
    }
}

// ---------------------------------------------------------------------------
// Orderly generation.

struct Orderly<'a, F: FnMut(MultiGraph)> {
    n: usize,
    adj: Vec<Vec<u8>>,
    deg: Vec<u8>,
    connected_only: bool,
    emit: &'a mut F,
}

impl<F: FnMut(MultiGraph)> Orderly<'_, F> {
    fn add_node(&mut self, k: usize) {
        if k == self.n {
            (self.emit)(MultiGraph::from_adjacency(&self.adj));
            return;
        }
        self.fill(k, 0, 0);
    }

    // Chooses multiplicities A[i][k] for i = row, then loops on k.
    fn fill(&mut self, k: usize, row: usize, deg_k: u8) {
        if row == k {
            for loops in 0..=(4 - deg_k) / 2 {
                self.adj[k][k] = loops;
                self.deg[k] = deg_k + 2 * loops;
                if self.viable(k) && is_max_code(&self.prefix(k + 1)) {
                    self.add_node(k + 1);
                }
            }
            self.adj[k][k] = 0;
            self.deg[k] = 0;
            return;
        }
        let room = (4 - self.deg[row]).min(4 - deg_k);
        for m in 0..=room {
            self.adj[row][k] = m;
            self.adj[k][row] = m;
            self.deg[row] += m;
            self.fill(k, row + 1, deg_k + m);
            self.deg[row] -= m;
        }
        self.adj[row][k] = 0;
        self.adj[k][row] = 0;
    }

    fn prefix(&self, m: usize) -> Vec<Vec<u8>> {
        self.adj[..m].iter().map(|r| r[..m].to_vec()).collect()
    }

    // Can nodes 0..=k still be completed to a (connected) 4-regular graph?
    fn viable(&self, k: usize) -> bool {
        let remaining = self.n - k - 1;
        let deficiency: usize = (0..=k).map(|i| usize::from(4 - self.deg[i])).sum();
        if deficiency > 4 * remaining || (remaining == 0 && deficiency != 0) {
            return false;
        }
        if !self.connected_only {
            return true;
        }
        // Every component of the prefix must be able to reach a later node,
        // unless the prefix is already the whole graph.
        let mut comp = vec![usize::MAX; k + 1];
        let mut components = 0;
        for start in 0..=k {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = components;
            let mut open = 0usize;
            while let Some(u) = stack.pop() {
                open += usize::from(4 - self.deg[u]);
                for v in 0..=k {
                    if v != u && self.adj[u][v] > 0 && comp[v] == usize::MAX {
                        comp[v] = components;
                        stack.push(v);
                    }
                }
            }
            if open == 0 && (remaining > 0 || start != 0) {
                return false;
            }
            components += 1;
        }
        remaining > 0 || components == 1
    }
}

/// Every 4-regular multigraph on `n` nodes (connected or not), one per
/// isomorphism class, in canonical labelling and deterministic order.
pub fn generate_all(n: usize) -> Vec<MultiGraph> {
    run_orderly(n, false)
}

/// Every connected 4-regular multigraph on `n` nodes, one per isomorphism
/// class, in canonical labelling and deterministic order.
pub fn generate(n: usize) -> Vec<MultiGraph> {
    run_orderly(n, true)
}

/// Streams `generate(n)` without collecting it.
pub fn generate_with(n: usize, mut emit: impl FnMut(MultiGraph)) {
    if n == 0 {
        return;
    }
    let mut orderly = Orderly {
        n,
        adj: vec![vec![0; n]; n],
        deg: vec![0; n],
        connected_only: true,
        emit: &mut emit,
    };
    orderly.add_node(0);
}

fn run_orderly(n: usize, connected_only: bool) -> Vec<MultiGraph> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut emit = |g: MultiGraph| out.push(g);
    let mut orderly = Orderly {
        n,
        adj: vec![vec![0; n]; n],
        deg: vec![0; n],
        connected_only,
        emit: &mut emit,
    };
    orderly.add_node(0);
    out
}
