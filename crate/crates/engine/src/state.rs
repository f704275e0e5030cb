use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::frame::Frame;

const DEAD: usize = usize::MAX;

/// Corner `k` of a plate: the corner at the plate's face-edge `k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Corner {
    pub plate: usize,
    pub k: usize,
}

impl Corner {
    pub const UNSET: Corner = Corner { plate: DEAD, k: 0 };

    pub fn new(plate: usize, k: usize) -> Corner {
        Corner { plate, k }
    }
}

/// One sheet of the surface inside a face neighbourhood.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plate {
    pub face: usize,
    /// +1 when the surface's coorientation agrees with the face's.
    pub sign: i8,
    /// Height within the face's stack, 0 at the bottom.
    pub level: usize,
    /// Rod partner of each corner.
    pub links: [Corner; 3],
}

/// A flattened surface: plate stacks per face and the rod matchings between
/// plate corners.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlattenedSurface {
    pub plates: Vec<Plate>,
    pub stacks: Vec<Vec<usize>>,
}

/// Position of a plate independent of plate numbering.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlateRef {
    pub face: usize,
    pub level: usize,
}

impl FlattenedSurface {
    pub fn empty(n_faces: usize) -> FlattenedSurface {
        FlattenedSurface {
            plates: Vec::new(),
            stacks: vec![Vec::new(); n_faces],
        }
    }

    /// The all-positive state of a carried weight vector. At each edge the sheets
    /// on the two sides are matched from the bottom up.
    pub fn from_carried(fr: &Frame, w: &[u64]) -> Result<FlattenedSurface, String> {
        let tri = &fr.tri;
        if w.len() != tri.n_faces() {
            return Err(format!("expected {} weights, got {}", tri.n_faces(), w.len()));
        }
        let mut st = FlattenedSurface::empty(tri.n_faces());
        for (f, &wf) in w.iter().enumerate() {
            for level in 0..wf as usize {
                let id = st.plates.len();
                st.plates.push(Plate {
                    face: f,
                    sign: 1,
                    level,
                    links: [Corner::UNSET; 3],
                });
                st.stacks[f].push(id);
            }
        }
        for star in tri.stars() {
            let e = star.edge;
            let column = |side_a: bool, len: usize| -> Vec<Corner> {
                let mut out = Vec::new();
                for h in 0..len {
                    let (f, k) = fr.fe.on_side(tri, e, side_a, h);
                    out.extend(st.stacks[f].iter().map(|&p| Corner::new(p, k)));
                }
                out
            };
            let a = column(true, star.above);
            let b = column(false, star.faces.len() - star.above);
            if a.len() != b.len() {
                return Err(format!("branch equation fails at edge {e}"));
            }
            for (x, y) in a.into_iter().zip(b) {
                st.join(x, y);
            }
        }
        st.validate(fr)?;
        Ok(st)
    }

    pub fn area(&self) -> usize {
        self.plates.len()
    }

    pub fn is_carried(&self) -> bool {
        self.plates.iter().all(|p| p.sign > 0)
    }

    pub fn link(&self, c: Corner) -> Corner {
        self.plates[c.plate].links[c.k]
    }

    pub fn plate_ref(&self, p: usize) -> PlateRef {
        PlateRef {
            face: self.plates[p].face,
            level: self.plates[p].level,
        }
    }

    pub fn at(&self, r: PlateRef) -> Option<usize> {
        self.stacks.get(r.face)?.get(r.level).copied()
    }

    pub fn top(&self, f: usize) -> Option<usize> {
        self.stacks[f].last().copied()
    }

    pub fn bottom(&self, f: usize) -> Option<usize> {
        self.stacks[f].first().copied()
    }

    /// Plate of face `f` next to the tetrahedron on the given side of the stack.
    pub fn extremal(&self, f: usize, topmost: bool) -> Option<usize> {
        if topmost {
            self.top(f)
        } else {
            self.bottom(f)
        }
    }

    /// Sort key of a corner among the slots of its edge, in the cyclic order
    /// of the edge star.
    pub fn slot_key(&self, fr: &Frame, c: Corner) -> (usize, usize) {
        let p = &self.plates[c.plate];
        let pos = fr.fe.pos[p.face][c.k];
        let n = self.stacks[p.face].len();
        let depth = if pos.side_a { p.level } else { n - 1 - p.level };
        (pos.index, depth + 1)
    }

    pub fn edge_of(&self, fr: &Frame, c: Corner) -> usize {
        fr.fe.edge_class[self.plates[c.plate].face][c.k]
    }

    pub fn side_a(&self, fr: &Frame, c: Corner) -> bool {
        fr.fe.pos[self.plates[c.plate].face][c.k].side_a
    }

    /// Sign a plate must carry at corner `c` to be consistent with the rod to `other`.
    pub fn implied_sign(&self, fr: &Frame, face: usize, k: usize, other: Corner) -> i8 {
        let mine = fr.fe.pos[face][k].side_a;
        let theirs = self.side_a(fr, other);
        let s = self.plates[other.plate].sign;
        if mine == theirs {
            -s
        } else {
            s
        }
    }

    /// All slots at each edge, sorted in cyclic order.
    pub fn slots(&self, fr: &Frame) -> Vec<Vec<((usize, usize), Corner)>> {
        let mut out = vec![Vec::new(); fr.tri.n_edges()];
        for (p, pl) in self.plates.iter().enumerate().filter(|(_, pl)| pl.face != DEAD) {
            for k in 0..3 {
                let c = Corner::new(p, k);
                out[fr.fe.edge_class[pl.face][k]].push((self.slot_key(fr, c), c));
            }
        }
        for v in &mut out {
            v.sort();
        }
        out
    }

    pub fn validate(&self, fr: &Frame) -> Result<(), String> {
        if self.stacks.len() != fr.tri.n_faces() {
            return Err("stack count differs from face count".into());
        }
        let mut seen = vec![false; self.plates.len()];
        for (f, stack) in self.stacks.iter().enumerate() {
            for (l, &p) in stack.iter().enumerate() {
                let pl = self.plates.get(p).ok_or_else(|| format!("stack {f} names missing plate {p}"))?;
                if pl.face != f || pl.level != l || seen[p] {
                    return Err(format!("plate {p} is misfiled in stack {f}"));
                }
                seen[p] = true;
            }
        }
        if let Some(p) = seen.iter().position(|&s| !s) {
            return Err(format!("plate {p} is in no stack"));
        }
        for (p, pl) in self.plates.iter().enumerate() {
            if pl.sign != 1 && pl.sign != -1 {
                return Err(format!("plate {p} has sign {}", pl.sign));
            }
            for k in 0..3 {
                let c = Corner::new(p, k);
                let o = pl.links[k];
                if o.plate >= self.plates.len() || o.k > 2 {
                    return Err(format!("corner {p}:{k} is unmatched"));
                }
                if o == c || self.link(o) != c {
                    return Err(format!("rod at corner {p}:{k} is not symmetric"));
                }
                if self.edge_of(fr, o) != self.edge_of(fr, c) {
                    return Err(format!("rod at corner {p}:{k} joins different edges"));
                }
                if self.implied_sign(fr, pl.face, k, o) != pl.sign {
                    return Err(format!("rod at corner {p}:{k} breaks the sign rule"));
                }
            }
        }
        for (e, slots) in self.slots(fr).iter().enumerate() {
            let index: std::collections::HashMap<Corner, usize> =
                slots.iter().enumerate().map(|(i, &(_, c))| (c, i)).collect();
            let mut stack = Vec::new();
            for (i, &(_, c)) in slots.iter().enumerate() {
                let j = index[&self.link(c)];
                if j > i {
                    stack.push(i);
                } else if stack.pop() != Some(j) {
                    return Err(format!("rods cross at edge {e}"));
                }
            }
        }
        Ok(())
    }

    /// Signed plate count per face.
    pub fn signed_weights(&self, n_faces: usize) -> Vec<i64> {
        let mut w = vec![0i64; n_faces];
        for p in &self.plates {
            w[p.face] += i64::from(p.sign);
        }
        w
    }

    /// Class functional of the surface on the first homology of the frame.
    pub fn class(&self, fr: &Frame) -> Vec<BigInt> {
        let w: Vec<BigInt> = self.signed_weights(fr.n_faces()).into_iter().map(BigInt::from).collect();
        fr.fh.h1.functional_of(&w)
    }

    /// Nonnegative weights when every plate is positive.
    pub fn carried_weights(&self, n_faces: usize) -> Option<Vec<u64>> {
        self.is_carried().then(|| self.stacks.iter().take(n_faces).map(|s| s.len() as u64).collect())
    }

    /// A key identifying the state up to renumbering of plates.
    pub fn canonical_key(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.plates.len() * 8);
        for (f, stack) in self.stacks.iter().enumerate() {
            for &p in stack {
                let pl = &self.plates[p];
                out.push(f as u32);
                out.push(pl.sign as u32);
                for c in pl.links {
                    let o = &self.plates[c.plate];
                    out.extend([o.face as u32, o.level as u32, c.k as u32]);
                }
            }
            out.push(u32::MAX);
        }
        out
    }

    // Editing primitives. Callers finish with `settle`.

    pub(crate) fn join(&mut self, a: Corner, b: Corner) {
        self.plates[a.plate].links[a.k] = b;
        self.plates[b.plate].links[b.k] = a;
    }

    pub(crate) fn kill(&mut self, p: usize) {
        let f = self.plates[p].face;
        self.stacks[f].retain(|&x| x != p);
        self.plates[p].face = DEAD;
    }

    pub(crate) fn add(&mut self, face: usize, pos: usize, sign: i8) -> usize {
        let id = self.plates.len();
        self.plates.push(Plate {
            face,
            sign,
            level: 0,
            links: [Corner::UNSET; 3],
        });
        self.stacks[face].insert(pos, id);
        id
    }

    pub(crate) fn settle_levels(&mut self) {
        for f in 0..self.stacks.len() {
            for l in 0..self.stacks[f].len() {
                let p = self.stacks[f][l];
                self.plates[p].level = l;
            }
        }
    }

    /// Drop dead plates, renumber, and recompute levels.
    pub(crate) fn settle(&mut self) {
        let mut map = vec![DEAD; self.plates.len()];
        let mut next = 0;
        for (p, pl) in self.plates.iter().enumerate() {
            if pl.face != DEAD {
                map[p] = next;
                next += 1;
            }
        }
        let old = std::mem::take(&mut self.plates);
        for pl in old.into_iter().filter(|p| p.face != DEAD) {
            let mut pl = pl;
            for c in &mut pl.links {
                if c.plate != DEAD {
                    c.plate = map[c.plate];
                }
            }
            self.plates.push(pl);
        }
        for stack in &mut self.stacks {
            for p in stack.iter_mut() {
                *p = map[*p];
            }
        }
        self.settle_levels();
    }
}
