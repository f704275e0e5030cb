use serde::{Deserialize, Serialize};

/// A permutation of {0,1,2,3}, stored as the image of each point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Perm4(pub [u8; 4]);

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    pub fn new(images: [u8; 4]) -> Option<Perm4> {
        let mut seen = [false; 4];
        for &x in &images {
            if x > 3 || seen[x as usize] {
                return None;
            }
            seen[x as usize] = true;
        }
        Some(Perm4(images))
    }

    #[inline]
    pub fn apply(self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn inverse(self) -> Perm4 {
        let mut out = [0u8; 4];
        for i in 0..4 {
            out[self.0[i] as usize] = i as u8;
        }
        Perm4(out)
    }

    /// `self.compose(other)` maps i to self(other(i)).
    pub fn compose(self, other: Perm4) -> Perm4 {
        let mut out = [0u8; 4];
        for i in 0..4 {
            out[i] = self.0[other.0[i] as usize];
        }
        Perm4(out)
    }

    pub fn transposition(a: usize, b: usize) -> Perm4 {
        let mut p = [0u8, 1, 2, 3];
        p.swap(a, b);
        Perm4(p)
    }

    pub fn sign(self) -> i32 {
        parity(self.0.map(|x| x as usize))
    }

    /// All 24 permutations in lexicographic order of their image arrays.
    pub fn all() -> Vec<Perm4> {
        let mut out = Vec::with_capacity(24);
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    for d in 0..4u8 {
                        if let Some(p) = Perm4::new([a, b, c, d]) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn from_lex_index(i: usize) -> Option<Perm4> {
        Perm4::all().get(i).copied()
    }
}

/// Sign of the arrangement of four distinct labels, relative to (0,1,2,3).
pub fn parity(v: [usize; 4]) -> i32 {
    let mut s = 1;
    for i in 0..4 {
        for j in i + 1..4 {
            if v[i] > v[j] {
                s = -s;
            }
        }
    }
    s
}

/// Regina numbering of the six edges of a tetrahedron.
pub const EDGE_VERTICES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

pub fn edge_index(a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    EDGE_VERTICES
        .iter()
        .position(|e| e[0] == a && e[1] == b)
        .expect("distinct vertices")
}

/// The vertices of face `f` (opposite vertex f) in increasing order.
pub fn face_vertices(f: usize) -> [usize; 3] {
    let mut out = [0; 3];
    let mut k = 0;
    for v in 0..4 {
        if v != f {
            out[k] = v;
            k += 1;
        }
    }
    out
}

/// The two vertices not in `e`.
pub fn complement(e: [usize; 2]) -> [usize; 2] {
    let mut out = [0; 2];
    let mut k = 0;
    for v in 0..4 {
        if v != e[0] && v != e[1] {
            out[k] = v;
            k += 1;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_and_inverse() {
        for p in Perm4::all() {
            assert_eq!(p.compose(p.inverse()), Perm4::IDENTITY);
            for q in Perm4::all() {
                assert_eq!(p.compose(q).sign(), p.sign() * q.sign());
            }
        }
    }

    #[test]
    fn lex_order_matches_regina_ordered_sn() {
        assert_eq!(Perm4::from_lex_index(0), Some(Perm4([0, 1, 2, 3])));
        assert_eq!(Perm4::from_lex_index(1), Some(Perm4([0, 1, 3, 2])));
        assert_eq!(Perm4::from_lex_index(23), Some(Perm4([3, 2, 1, 0])));
    }

    #[test]
    fn edge_pairs_are_opposite() {
        for k in 0..6 {
            let e = EDGE_VERTICES[k];
            let o = EDGE_VERTICES[5 - k];
            assert_eq!(complement(e), o);
        }
    }
}
