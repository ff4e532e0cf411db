//! Incremental one-vertex test: a union-find over tetrahedron vertices that
//! tracks how many frontier edges each partial vertex link still has.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GlueOutcome {
    /// Two different links were joined.
    Merged,
    /// Two frontier edges of one link were identified; the link stays open
    /// or closes exactly on the final gluing.
    Ok,
    /// A link became a closed surface while gluings remain.
    ClosedEarly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Op {
    Same { root: u32 },
    Union { child: u32, root: u32, root_count: u32, root_size: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontierTracker {
    parent: Vec<u32>,
    size: Vec<u32>,
    frontier: Vec<u32>,
    glued: usize,
    total: usize,
    journal: Vec<Op>,
}

impl FrontierTracker {
    /// Tracker for `tet_count` tetrahedra; a complete triangulation performs
    /// `6 * tet_count` vertex identifications.
    pub fn new(tet_count: usize) -> Self {
        let v = 4 * tet_count;
        Self {
            parent: (0..v as u32).collect(),
            size: vec![1; v],
            frontier: vec![3; v],
            glued: 0,
            total: 6 * tet_count,
            journal: Vec::new(),
        }
    }

    #[inline]
    pub fn vertex(tet: usize, v: u8) -> usize {
        4 * tet + v as usize
    }

    pub fn find(&self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            x = self.parent[x] as usize;
        }
        x
    }

    /// Frontier edges remaining on the link containing `x`.
    pub fn frontier_edges(&self, x: usize) -> u32 {
        self.frontier[self.find(x)]
    }

    pub fn gluings(&self) -> usize {
        self.glued
    }

    /// Identifies two tetrahedron vertices across one member arc.
    pub fn glue(&mut self, a: usize, b: usize) -> GlueOutcome {
        let (ra, rb) = (self.find(a), self.find(b));
        self.glued += 1;
        let (root, outcome) = if ra == rb {
            debug_assert!(self.frontier[ra] >= 2, "identifying edges of a closed link");
            self.frontier[ra] -= 2;
            self.journal.push(Op::Same { root: ra as u32 });
            (ra, GlueOutcome::Ok)
        } else {
            let (child, root) = if self.size[ra] < self.size[rb] { (ra, rb) } else { (rb, ra) };
            self.journal.push(Op::Union {
                child: child as u32,
                root: root as u32,
                root_count: self.frontier[root],
                root_size: self.size[root],
            });
            self.parent[child] = root as u32;
            self.size[root] += self.size[child];
            self.frontier[root] = self.frontier[root] + self.frontier[child] - 2;
            (root, GlueOutcome::Merged)
        };
        if self.frontier[root] == 0 && self.glued < self.total {
            GlueOutcome::ClosedEarly
        } else {
            outcome
        }
    }

    pub fn mark(&self) -> usize {
        self.journal.len()
    }

    /// Undoes every gluing made since `mark`.
    pub fn rollback(&mut self, mark: usize) {
        while self.journal.len() > mark {
            match self.journal.pop().expect("non-empty journal") {
                Op::Same { root } => self.frontier[root as usize] += 2,
                Op::Union { child, root, root_count, root_size } => {
                    self.parent[child as usize] = child;
                    self.frontier[root as usize] = root_count;
                    self.size[root as usize] = root_size;
                }
            }
            self.glued -= 1;
        }
    }
}
