use std::fmt;

/// A permutation of the four vertices {0, 1, 2, 3} of a tetrahedron.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm4([u8; 4]);

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    /// Returns `None` unless `images` is a permutation of 0..4.
    pub fn from_images(images: [u8; 4]) -> Option<Self> {
        let mut seen = [false; 4];
        for &i in &images {
            if i > 3 || seen[i as usize] {
                return None;
            }
            seen[i as usize] = true;
        }
        Some(Perm4(images))
    }

    /// Extends a bijection given on three points to a permutation of all four.
    pub fn from_partial(pairs: &[(u8, u8); 3]) -> Option<Self> {
        let mut images = [4u8; 4];
        for &(from, to) in pairs {
            if from > 3 || images[from as usize] != 4 {
                return None;
            }
            images[from as usize] = to;
        }
        let missing_src = (0..4).find(|&i| images[i] == 4)?;
        let missing_dst = (0..4u8).find(|d| !images.contains(d))?;
        images[missing_src] = missing_dst;
        Self::from_images(images)
    }

    #[inline]
    pub fn apply(self, i: u8) -> u8 {
        self.0[i as usize]
    }

    pub fn images(self) -> [u8; 4] {
        self.0
    }

    pub fn inverse(self) -> Self {
        let mut inv = [0u8; 4];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j as usize] = i as u8;
        }
        Perm4(inv)
    }

    /// `self` after `first`.
    pub fn compose(self, first: Perm4) -> Self {
        Perm4(first.0.map(|i| self.0[i as usize]))
    }

    pub fn sign(self) -> i32 {
        let mut inversions = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn all() -> impl Iterator<Item = Perm4> {
        (0..256u32).filter_map(|code| {
            let images = [0, 2, 4, 6].map(|s| ((code >> s) & 3) as u8);
            Perm4::from_images(images)
        })
    }
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}{}", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}
