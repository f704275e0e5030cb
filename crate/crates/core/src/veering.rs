//! Boundary train tracks: flat triangles, ladders, veer, hinges, fans and the
//! per-cusp basis.
//!
//! Orientation convention: a tip at vertex `v` of tetrahedron `t` has its corners
//! `(v,a), (v,b), (v,c)` counterclockwise as seen from inside the manifold iff
//! `parity(v,a,b,c) * orientation(t) = -1` (this matches the usual left/right
//! veer colouring of census data). Each side of the cusp triangulation
//! carries a positive direction: the one that runs counterclockwise around the
//! triangle above it, so that (direction, coorientation) is a positive frame.

use serde::Serialize;

use crate::error::VeeringError;
use crate::perm::{edge_index, face_vertices, parity};
use crate::tri::TautTriangulation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Veer {
    Left,
    Right,
}

impl Veer {
    pub fn flip(self) -> Veer {
        match self {
            Veer::Left => Veer::Right,
            Veer::Right => Veer::Left,
        }
    }
    pub fn letter(self) -> char {
        match self {
            Veer::Left => 'L',
            Veer::Right => 'R',
        }
    }
}

/// A flat triangle: the tip of tetrahedron `tet` at vertex `vertex`.
#[derive(Clone, Debug)]
pub struct Tip {
    pub tet: usize,
    pub vertex: usize,
    pub cusp: usize,
    pub upward: bool,
    /// Cusp-complex vertices at the corners, counterclockwise.
    pub corners: [usize; 3],
    /// Tetrahedron vertex labels matching `corners` (corner i is the end of edge (vertex, labels[i])).
    pub labels: [usize; 3],
    /// `sides[i]` is the side opposite `corners[i]`.
    pub sides: [usize; 3],
    /// Position in `sides` of the 0-0 side.
    pub zero_zero: usize,
}

/// A side of the cusp triangulation: face class `face` at face-vertex `j`.
#[derive(Clone, Debug)]
pub struct Side {
    pub face: usize,
    pub j: usize,
    pub below: usize,
    pub above: usize,
    /// Ends oriented along the positive direction.
    pub tail: usize,
    pub head: usize,
    pub pole: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Ladder {
    pub cusp: usize,
    pub upward: bool,
    /// Tips in order, each followed by the one above its exit rung.
    pub tips: Vec<usize>,
    /// Exit rung of each tip, matching `tips`.
    pub exits: Vec<usize>,
    pub left_pole: usize,
    pub right_pole: usize,
}

/// A ladderpole curve: a cycle of sides, oriented along the positive direction of
/// its first side.
#[derive(Clone, Debug, Serialize)]
pub struct PoleCurve {
    pub cusp: usize,
    pub sides: Vec<usize>,
    /// +1 if the curve runs along the positive direction of the side.
    pub signs: Vec<i64>,
    pub veer: Veer,
    pub up_ladder: usize,
    pub down_ladder: usize,
}

/// Fan data for one edge: the number of tetrahedra on each side of its star.
#[derive(Clone, Debug, Serialize)]
pub struct Fans {
    pub side_a: usize,
    pub side_b: usize,
}

impl Fans {
    pub fn short_a(&self) -> bool {
        self.side_a == 1
    }
    pub fn short_b(&self) -> bool {
        self.side_b == 1
    }
}

/// A chain of side crossings on a cusp torus (dual 1-chain): `+1` crosses upward.
pub type DualChain = Vec<i64>;

/// Per-cusp data: ladders, poles and the chosen basis.
#[derive(Clone, Debug)]
pub struct CuspData {
    pub cusp: usize,
    pub tips: Vec<usize>,
    pub ladders: Vec<usize>,
    pub poles: Vec<usize>,
    /// Canonical transversal, as a closed path of (side, sign) crossings from the base tip.
    pub transversal: Vec<(usize, i64)>,
    /// Core of ladder 0, as a closed path from the same base tip.
    pub core: Vec<(usize, i64)>,
    pub base_tip: usize,
    /// Intersection of the left pole of ladder 0, oriented along it, with the transversal (±1).
    pub pole_dot_transversal: i64,
}

#[derive(Clone, Debug)]
pub struct CuspComplex {
    pub tips: Vec<Tip>,
    pub sides: Vec<Side>,
    /// Vertex `2e + k` is end k of edge e; its cusp.
    pub vertex_cusp: Vec<usize>,
    pub ladders: Vec<Ladder>,
    pub poles: Vec<PoleCurve>,
    /// Pole curve through each vertex.
    pub vertex_pole: Vec<usize>,
    /// Ladder of each tip.
    pub tip_ladder: Vec<usize>,
    pub cusps: Vec<CuspData>,
}

pub fn tip_id(t: usize, v: usize) -> usize {
    4 * t + v
}

pub fn side_id(face: usize, j: usize) -> usize {
    3 * face + j
}

/// Label of the vertex at end 0 of each edge slot.
fn end0_labels(tri: &TautTriangulation) -> Vec<[usize; 6]> {
    let mut out = vec![[usize::MAX; 6]; tri.n_tets()];
    for star in tri.stars() {
        for c in &star.corners {
            out[c.tet][c.slot()] = c.a;
        }
    }
    out
}

/// Cusp-complex vertex at the `v` end of edge (v, a) of tetrahedron `t`.
pub fn vertex_at(tri: &TautTriangulation, end0: &[[usize; 6]], t: usize, v: usize, a: usize) -> usize {
    let slot = edge_index(v, a);
    let e = tri.edge_class(t, slot);
    2 * e + usize::from(end0[t][slot] != v)
}

impl CuspComplex {
    pub fn build(tri: &TautTriangulation) -> Result<CuspComplex, VeeringError> {
        let n = tri.n_tets();
        let end0 = end0_labels(tri);
        let mut tips = Vec::with_capacity(4 * n);
        for t in 0..n {
            let top = tri.top_edge_vertices(t);
            let bottom = tri.bottom_edge_vertices(t);
            for v in 0..4 {
                let others: Vec<usize> = (0..4).filter(|&x| x != v).collect();
                let (a, mut b, mut c) = (others[0], others[1], others[2]);
                if parity([v, a, b, c]) * tri.orientation(t) != -1 {
                    std::mem::swap(&mut b, &mut c);
                }
                let labels = [a, b, c];
                let corners = labels.map(|x| vertex_at(tri, &end0, t, v, x));
                let sides = labels.map(|x| {
                    // The side opposite corner (v, x) lies in face x.
                    let f = tri.face_class(t, x);
                    let (_, fb) = tri.face_below(f);
                    let lv = tri.to_below(t, x, v);
                    let j = face_vertices(fb).iter().position(|&y| y == lv).unwrap();
                    side_id(f, j)
                });
                let upward = top.contains(&v);
                let partner = if upward {
                    if top[0] == v { top[1] } else { top[0] }
                } else if bottom[0] == v {
                    bottom[1]
                } else {
                    bottom[0]
                };
                let zero_zero = labels.iter().position(|&x| x == partner).unwrap();
                tips.push(Tip {
                    tet: t,
                    vertex: v,
                    cusp: tri.vertex_class(t, v),
                    upward,
                    corners,
                    labels,
                    sides,
                    zero_zero,
                });
            }
        }

        let mut sides = Vec::with_capacity(3 * tri.n_faces());
        for f in 0..tri.n_faces() {
            let (tb, fb) = tri.face_below(f);
            let (ta, _) = tri.face_above(f);
            let (_, p) = tri.gluing(tb, fb);
            for (j, &x) in face_vertices(fb).iter().enumerate() {
                let below = tip_id(tb, x);
                let above = tip_id(ta, p.apply(x));
                let sid = side_id(f, j);
                let orient = |tip: &Tip| {
                    let k = tip.sides.iter().position(|&s| s == sid).unwrap();
                    (tip.corners[(k + 1) % 3], tip.corners[(k + 2) % 3])
                };
                let (tail, head) = orient(&tips[above]);
                let (btail, bhead) = orient(&tips[below]);
                if (bhead, btail) != (tail, head) {
                    return Err(VeeringError::Internal {
                        cusp: tips[above].cusp,
                        detail: format!("orientations of tips disagree across side {sid}"),
                    });
                }
                sides.push(Side {
                    face: f,
                    j,
                    below,
                    above,
                    tail,
                    head,
                    pole: tips[below].upward != tips[above].upward,
                });
            }
        }
        let nverts = 2 * tri.n_edges();
        let mut vertex_cusp = vec![0; nverts];
        for e in 0..tri.n_edges() {
            let [c0, c1] = tri.edge_ends(e);
            vertex_cusp[2 * e] = c0;
            vertex_cusp[2 * e + 1] = c1;
        }

        let mut cx = CuspComplex {
            tips,
            sides,
            vertex_cusp,
            ladders: Vec::new(),
            poles: Vec::new(),
            vertex_pole: vec![usize::MAX; nverts],
            tip_ladder: vec![usize::MAX; 4 * n],
            cusps: Vec::new(),
        };
        cx.build_ladders()?;
        cx.build_poles()?;
        cx.assign_handedness()?;
        for c in 0..tri.n_cusps() {
            let data = cx.cusp_basis(c)?;
            cx.cusps.push(data);
        }
        Ok(cx)
    }

    fn not_ph(&self, tip: usize, witness: String) -> VeeringError {
        VeeringError::NotPseudohyperbolic {
            cusp: self.tips[tip].cusp,
            witness,
        }
    }

    /// The pole side of a tip, if it has exactly one.
    pub fn pole_side(&self, tip: usize) -> Option<usize> {
        let poles: Vec<usize> = self.tips[tip]
            .sides
            .iter()
            .copied()
            .filter(|&s| self.sides[s].pole)
            .collect();
        (poles.len() == 1).then(|| poles[0])
    }

    /// Exit rung: the rung crossed upward out of the tip.
    pub fn exit_rung(&self, tip: usize) -> usize {
        let t = &self.tips[tip];
        if !t.upward {
            return t.sides[t.zero_zero];
        }
        *t.sides
            .iter()
            .find(|&&s| self.sides[s].below == tip && !self.sides[s].pole)
            .expect("checked by build_ladders")
    }

    /// Entry rung: the rung crossed upward into the tip.
    pub fn entry_rung(&self, tip: usize) -> usize {
        let t = &self.tips[tip];
        if t.upward {
            return t.sides[t.zero_zero];
        }
        *t.sides
            .iter()
            .find(|&&s| self.sides[s].above == tip && !self.sides[s].pole)
            .expect("checked by build_ladders")
    }

    fn build_ladders(&mut self) -> Result<(), VeeringError> {
        for tip in 0..self.tips.len() {
            let t = &self.tips[tip];
            let poles = t.sides.iter().filter(|&&s| self.sides[s].pole).count();
            if poles != 1 {
                return Err(self.not_ph(
                    tip,
                    format!("tip ({},{}) has {poles} ladderpole sides", t.tet, t.vertex),
                ));
            }
            if self.sides[t.sides[t.zero_zero]].pole {
                return Err(self.not_ph(
                    tip,
                    format!("the 0-0 side of tip ({},{}) joins ladders of opposite direction", t.tet, t.vertex),
                ));
            }
        }
        let mut seen = vec![false; self.tips.len()];
        for start in 0..self.tips.len() {
            if seen[start] {
                continue;
            }
            let id = self.ladders.len();
            let mut tips = Vec::new();
            let mut exits = Vec::new();
            let mut cur = start;
            loop {
                if seen[cur] {
                    if cur != start {
                        return Err(self.not_ph(cur, "rung chain is not a cycle".into()));
                    }
                    break;
                }
                seen[cur] = true;
                self.tip_ladder[cur] = id;
                let exit = self.exit_rung(cur);
                tips.push(cur);
                exits.push(exit);
                let next = self.sides[exit].above;
                if self.entry_rung(next) != exit {
                    return Err(self.not_ph(next, "exit rung is not the next entry rung".into()));
                }
                cur = next;
            }
            self.ladders.push(Ladder {
                cusp: self.tips[start].cusp,
                upward: self.tips[start].upward,
                tips,
                exits,
                left_pole: usize::MAX,
                right_pole: usize::MAX,
            });
        }
        Ok(())
    }

    fn build_poles(&mut self) -> Result<(), VeeringError> {
        let nverts = self.vertex_cusp.len();
        let mut at: Vec<Vec<usize>> = vec![Vec::new(); nverts];
        for (s, side) in self.sides.iter().enumerate() {
            if side.pole {
                at[side.tail].push(s);
                at[side.head].push(s);
            }
        }
        for (v, list) in at.iter().enumerate() {
            if list.len() != 2 {
                return Err(VeeringError::NotPseudohyperbolic {
                    cusp: self.vertex_cusp[v],
                    witness: format!("switch {v} meets {} ladderpole sides", list.len()),
                });
            }
        }
        let mut used = vec![false; self.sides.len()];
        for s0 in 0..self.sides.len() {
            if !self.sides[s0].pole || used[s0] {
                continue;
            }
            let id = self.poles.len();
            let mut sides = Vec::new();
            let mut signs = Vec::new();
            let mut s = s0;
            let mut sign = 1i64;
            loop {
                used[s] = true;
                sides.push(s);
                signs.push(sign);
                let far = if sign == 1 { self.sides[s].head } else { self.sides[s].tail };
                self.vertex_pole[far] = id;
                let next = if at[far][0] == s { at[far][1] } else { at[far][0] };
                if next == s0 {
                    break;
                }
                if used[next] {
                    return Err(VeeringError::NotPseudohyperbolic {
                        cusp: self.vertex_cusp[far],
                        witness: "ladderpole sides do not form disjoint curves".into(),
                    });
                }
                sign = if self.sides[next].tail == far { 1 } else { -1 };
                s = next;
            }
            self.poles.push(PoleCurve {
                cusp: self.vertex_cusp[self.sides[s0].tail],
                sides,
                signs,
                veer: Veer::Left,
                up_ladder: usize::MAX,
                down_ladder: usize::MAX,
            });
        }
        // Each pole borders exactly one upward and one downward ladder.
        let mut side_pole = vec![usize::MAX; self.sides.len()];
        for (p, pc) in self.poles.iter().enumerate() {
            for &s in &pc.sides {
                side_pole[s] = p;
            }
        }
        for p in 0..self.poles.len() {
            let mut ups = Vec::new();
            let mut downs = Vec::new();
            for &s in &self.poles[p].sides {
                for tip in [self.sides[s].below, self.sides[s].above] {
                    let l = self.tip_ladder[tip];
                    if self.ladders[l].upward {
                        ups.push(l)
                    } else {
                        downs.push(l)
                    }
                }
            }
            ups.sort();
            ups.dedup();
            downs.sort();
            downs.dedup();
            if ups.len() != 1 || downs.len() != 1 {
                return Err(VeeringError::NotPseudohyperbolic {
                    cusp: self.poles[p].cusp,
                    witness: format!(
                        "ladderpole {p} borders {} upward and {} downward ladders",
                        ups.len(),
                        downs.len()
                    ),
                });
            }
            self.poles[p].up_ladder = ups[0];
            self.poles[p].down_ladder = downs[0];
        }
        for (l, lad) in self.ladders.iter().enumerate() {
            let mut ps: Vec<usize> = lad
                .tips
                .iter()
                .map(|&t| side_pole[self.pole_side(t).unwrap()])
                .collect();
            ps.sort();
            ps.dedup();
            if ps.len() != 2 {
                return Err(VeeringError::NotPseudohyperbolic {
                    cusp: lad.cusp,
                    witness: format!("ladder {l} does not have two distinct ladderpoles"),
                });
            }
        }
        Ok(())
    }

    fn assign_handedness(&mut self) -> Result<(), VeeringError> {
        let mut hand: Vec<Option<Veer>> = vec![None; self.poles.len()];
        for l in 0..self.ladders.len() {
            if self.ladders[l].upward {
                continue;
            }
            for tip in self.ladders[l].tips.clone() {
                let t = &self.tips[tip];
                let ps = self.pole_side(tip).unwrap();
                let k = t.sides.iter().position(|&s| s == ps).unwrap();
                let apex = t.corners[k];
                let entry = self.entry_rung(tip);
                let exit = self.exit_rung(tip);
                let ke = t.sides.iter().position(|&s| s == entry).unwrap();
                let kx = t.sides.iter().position(|&s| s == exit).unwrap();
                // Entry rung is opposite corner ke, so its far end is corners[kx] (= y),
                // and the exit rung's far end is corners[ke] (= z).
                let y = t.corners[kx];
                let z = t.corners[ke];
                let ccw = (k + 1) % 3 == kx && (k + 2) % 3 == ke;
                debug_assert!(ccw || ((k + 1) % 3 == ke && (k + 2) % 3 == kx));
                let _ = (y, z);
                let apex_hand = if ccw { Veer::Left } else { Veer::Right };
                let apex_pole = self.vertex_pole[apex];
                let side_pole = self.vertex_pole[self.sides[ps].tail];
                for (p, h) in [(apex_pole, apex_hand), (side_pole, apex_hand.flip())] {
                    match hand[p] {
                        None => hand[p] = Some(h),
                        Some(old) if old != h => {
                            return Err(VeeringError::Internal {
                                cusp: t.cusp,
                                detail: format!("ladderpole {p} is both left and right"),
                            })
                        }
                        _ => {}
                    }
                    let lad = &mut self.ladders[l];
                    match h {
                        Veer::Left => lad.left_pole = p,
                        Veer::Right => lad.right_pole = p,
                    }
                }
            }
        }
        for (p, h) in hand.into_iter().enumerate() {
            let h = h.ok_or_else(|| VeeringError::Internal {
                cusp: self.poles[p].cusp,
                detail: format!("ladderpole {p} borders no downward ladder"),
            })?;
            self.poles[p].veer = h;
        }
        // Upward ladders: poles named by their handedness.
        for l in 0..self.ladders.len() {
            if !self.ladders[l].upward {
                continue;
            }
            for p in 0..self.poles.len() {
                if self.poles[p].up_ladder == l {
                    match self.poles[p].veer {
                        Veer::Left => self.ladders[l].left_pole = p,
                        Veer::Right => self.ladders[l].right_pole = p,
                    }
                }
            }
        }
        Ok(())
    }

    /// Sign (+1 upward) of crossing side `s` when leaving tip `from`.
    pub fn crossing_sign(&self, s: usize, from: usize) -> i64 {
        if self.sides[s].below == from {
            1
        } else {
            -1
        }
    }

    fn cusp_basis(&self, cusp: usize) -> Result<CuspData, VeeringError> {
        let tips: Vec<usize> = (0..self.tips.len()).filter(|&t| self.tips[t].cusp == cusp).collect();
        let ladders: Vec<usize> = (0..self.ladders.len()).filter(|&l| self.ladders[l].cusp == cusp).collect();
        let poles: Vec<usize> = (0..self.poles.len()).filter(|&p| self.poles[p].cusp == cusp).collect();
        if !ladders.len().is_multiple_of(2) || ladders.len() < 2 {
            return Err(VeeringError::NotPseudohyperbolic {
                cusp,
                witness: format!("{} ladders", ladders.len()),
            });
        }
        let l0 = ladders[0];
        let base = self.ladders[l0].tips[0];
        let side_pole = |s: usize| self.vertex_pole[self.sides[s].tail];

        // Core of ladder 0 from the base tip.
        let lad0 = &self.ladders[l0];
        let core: Vec<(usize, i64)> = lad0.exits.iter().map(|&s| (s, 1)).collect();

        // Canonical transversal.
        let mut path: Vec<(usize, i64)> = Vec::new();
        let mut cur = base;
        let mut entered_by: Option<usize> = None;
        let mut crossed = 0;
        loop {
            let l = self.tip_ladder[cur];
            let lad = &self.ladders[l];
            if l == l0 && entered_by.is_some() {
                // Close up within ladder 0.
                while cur != base {
                    let ex = self.exit_rung(cur);
                    path.push((ex, 1));
                    cur = self.sides[ex].above;
                }
                break;
            }
            let out = if lad.upward { lad.left_pole } else { lad.right_pole };
            if Some(out) == entered_by {
                return Err(VeeringError::Internal {
                    cusp,
                    detail: "transversal re-enters through its exit pole".into(),
                });
            }
            let mut steps = 0;
            while side_pole(self.pole_side(cur).unwrap()) != out {
                let ex = self.exit_rung(cur);
                path.push((ex, 1));
                cur = self.sides[ex].above;
                steps += 1;
                if steps > lad.tips.len() {
                    return Err(VeeringError::Internal {
                        cusp,
                        detail: "exit pole unreachable in ladder".into(),
                    });
                }
            }
            let ps = self.pole_side(cur).unwrap();
            let sign = self.crossing_sign(ps, cur);
            path.push((ps, sign));
            cur = if sign == 1 { self.sides[ps].above } else { self.sides[ps].below };
            entered_by = Some(out);
            crossed += 1;
            if crossed > ladders.len() {
                return Err(VeeringError::Internal {
                    cusp,
                    detail: "transversal does not return to ladder 0".into(),
                });
            }
        }
        if crossed != ladders.len() {
            return Err(VeeringError::Internal {
                cusp,
                detail: format!("transversal crossed {crossed} of {} ladders", ladders.len()),
            });
        }
        let pole = self.pole_chain(self.ladders[l0].left_pole, l0);
        let dot = CuspComplex::pair(&pole, &self.chain(&path));
        if dot.abs() != 1 {
            return Err(VeeringError::Internal {
                cusp,
                detail: format!("transversal meets a ladderpole {dot} times algebraically"),
            });
        }
        Ok(CuspData {
            cusp,
            tips,
            ladders,
            poles,
            transversal: path,
            core,
            base_tip: base,
            pole_dot_transversal: dot,
        })
    }

    pub fn n_ladders(&self, cusp: usize) -> usize {
        self.cusps[cusp].ladders.len()
    }

    /// Chain of a closed crossing path.
    pub fn chain(&self, path: &[(usize, i64)]) -> DualChain {
        let mut c = vec![0; self.sides.len()];
        for &(s, sg) in path {
            c[s] += sg;
        }
        c
    }

    /// Primal chain of pole `p`, oriented forward along ladder `l` (which it must border).
    pub fn pole_chain(&self, p: usize, l: usize) -> Vec<i64> {
        let mut c = vec![0; self.sides.len()];
        let pc = &self.poles[p];
        let orient = self.pole_orientation(p, l);
        for (&s, &sg) in pc.sides.iter().zip(&pc.signs) {
            c[s] += sg * orient;
        }
        c
    }

    /// +1 if the stored orientation of pole `p` runs forward along ladder `l`.
    pub fn pole_orientation(&self, p: usize, l: usize) -> i64 {
        let pc = &self.poles[p];
        assert!(pc.up_ladder == l || pc.down_ladder == l, "pole does not border ladder");
        let s = pc.sides[0];
        let sg = pc.signs[0];
        let tip = if self.tip_ladder[self.sides[s].below] == l {
            self.sides[s].below
        } else {
            self.sides[s].above
        };
        let t = &self.tips[tip];
        let entry = self.entry_rung(tip);
        let exit = self.exit_rung(tip);
        // The pole side runs from its corner on the entry rung to its corner on the exit rung.
        let ke = t.sides.iter().position(|&x| x == entry).unwrap();
        let kx = t.sides.iter().position(|&x| x == exit).unwrap();
        let on_entry = t.corners[kx];
        let on_exit = t.corners[ke];
        let (from, to) = if sg == 1 {
            (self.sides[s].tail, self.sides[s].head)
        } else {
            (self.sides[s].head, self.sides[s].tail)
        };
        if from == on_entry && to == on_exit {
            1
        } else {
            debug_assert!(from == on_exit && to == on_entry);
            -1
        }
    }

    /// Algebraic intersection of a primal side chain with a dual chain.
    pub fn pair(primal: &[i64], dual: &[i64]) -> i64 {
        primal.iter().zip(dual).map(|(a, b)| a * b).sum()
    }

    /// Coordinates (p, q) of a primal cycle in the basis (transversal, core).
    pub fn primal_coords(&self, cusp: usize, primal: &[i64]) -> (i64, i64) {
        let cd = &self.cusps[cusp];
        let b1 = self.chain(&cd.transversal);
        let lam = self.chain(&cd.core);
        let l0 = cd.ladders[0];
        let pole = self.pole_chain(self.ladders[l0].left_pole, l0);
        let e = CuspComplex::pair(&pole, &b1);
        // i(γ, b1) = q·i(λ, b1); i(γ, λ) = p·i(b1, λ) = -p·i(λ, b1).
        let q = CuspComplex::pair(primal, &b1) * e;
        let p = -CuspComplex::pair(primal, &lam) * e;
        (p, q)
    }

    /// Dual chain of the slope p·transversal + q·core.
    pub fn slope_chain(&self, cusp: usize, p: i64, q: i64) -> DualChain {
        let cd = &self.cusps[cusp];
        let b1 = self.chain(&cd.transversal);
        let lam = self.chain(&cd.core);
        b1.iter().zip(&lam).map(|(a, b)| p * a + q * b).collect()
    }

    /// Crossing word b1^p core^q from the base tip, as (side, sign) steps.
    pub fn slope_word(&self, cusp: usize, p: i64, q: i64) -> Vec<(usize, i64)> {
        let cd = &self.cusps[cusp];
        let mut w = Vec::new();
        let rev = |path: &[(usize, i64)]| -> Vec<(usize, i64)> { path.iter().rev().map(|&(s, g)| (s, -g)).collect() };
        for _ in 0..p.abs() {
            if p > 0 {
                w.extend_from_slice(&cd.transversal)
            } else {
                w.extend(rev(&cd.transversal))
            }
        }
        for _ in 0..q.abs() {
            if q > 0 {
                w.extend_from_slice(&cd.core)
            } else {
                w.extend(rev(&cd.core))
            }
        }
        w
    }

    /// Prongs of slope (p, q): half the geometric intersection with all ladderpoles.
    pub fn prongs(&self, cusp: usize, p: i64, _q: i64) -> u64 {
        (self.n_ladders(cusp) as u64 * p.unsigned_abs()) / 2
    }

    /// Vertex loops: for each vertex, the dual chain of a small loop around it.
    pub fn vertex_loops(&self) -> Vec<DualChain> {
        let mut out = vec![vec![0; self.sides.len()]; self.vertex_cusp.len()];
        for (s, side) in self.sides.iter().enumerate() {
            out[side.tail][s] += 1;
            out[side.head][s] -= 1;
        }
        out
    }

    /// Boundary of a dual chain at tips (zero iff closed).
    pub fn dual_boundary(&self, chain: &[i64]) -> Vec<i64> {
        let mut b = vec![0; self.tips.len()];
        for (s, &c) in chain.iter().enumerate() {
            b[self.sides[s].above] += c;
            b[self.sides[s].below] -= c;
        }
        b
    }
}

/// Veer, hinge and fan data.
#[derive(Clone, Debug, Serialize)]
pub struct VeerData {
    pub veer: Vec<Veer>,
    pub hinge: Vec<bool>,
    pub fans: Vec<Fans>,
}

pub fn veer_and_hinge(tri: &TautTriangulation, cx: &CuspComplex) -> Result<VeerData, VeeringError> {
    let mut veer = Vec::with_capacity(tri.n_edges());
    for e in 0..tri.n_edges() {
        let a = cx.poles[cx.vertex_pole[2 * e]].veer;
        let b = cx.poles[cx.vertex_pole[2 * e + 1]].veer;
        if a != b {
            return Err(VeeringError::InconsistentVeer { edge: e });
        }
        veer.push(a);
    }
    let hinge = (0..tri.n_tets())
        .map(|t| veer[tri.top_edge(t)] != veer[tri.bottom_edge(t)])
        .collect();
    let fans = tri
        .stars()
        .iter()
        .map(|s| Fans {
            side_a: s.side_a().len(),
            side_b: s.side_b().len(),
        })
        .collect();
    Ok(VeerData { veer, hinge, fans })
}

/// Position of a tetrahedron in one fan of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FanPosition {
    pub edge: usize,
    pub side_a: bool,
    pub len: usize,
    pub topmost: bool,
    pub bottommost: bool,
}

/// Where the edge slot `(v, a)` of `t` sits in the star of its edge.
pub fn fan_position(tri: &TautTriangulation, t: usize, v: usize, a: usize) -> Option<FanPosition> {
    let slot = edge_index(v, a);
    let e = tri.edge_class(t, slot);
    let star = tri.edge_star(e);
    let i = star
        .corners
        .iter()
        .position(|c| c.tet == t && c.slot() == slot)?;
    if star.is_pi(i) {
        return None;
    }
    let side_a = i < star.above;
    let (len, topmost, bottommost) = if side_a {
        (star.above - 1, i == star.above - 1, i == 1)
    } else {
        let len = star.corners.len() - star.above - 1;
        (len, i == star.above + 1, i == star.corners.len() - 1)
    };
    Some(FanPosition {
        edge: e,
        side_a,
        len,
        topmost,
        bottommost,
    })
}

/// A violation of the fan lemma at a tip.
#[derive(Clone, Debug, Serialize)]
pub struct FanViolation {
    pub tet: usize,
    pub vertex: usize,
    pub detail: String,
}

/// Check the fan lemma at every tip.
pub fn check_fans(tri: &TautTriangulation, cx: &CuspComplex, vd: &VeerData) -> Vec<FanViolation> {
    let mut out = Vec::new();
    for tip in &cx.tips {
        let t = tip.tet;
        let k = tip.zero_zero;
        // Cuspidal corners are the two ends of the 0-0 side.
        let cusp_labels = [tip.labels[(k + 1) % 3], tip.labels[(k + 2) % 3]];
        let pos: Vec<FanPosition> = cusp_labels
            .iter()
            .filter_map(|&a| fan_position(tri, t, tip.vertex, a))
            .collect();
        if pos.len() != 2 {
            out.push(FanViolation {
                tet: t,
                vertex: tip.vertex,
                detail: "a cuspidal corner is not in a fan".into(),
            });
            continue;
        }
        if vd.hinge[t] {
            let ok = (pos[0].topmost && pos[1].bottommost) || (pos[0].bottommost && pos[1].topmost);
            if !ok {
                out.push(FanViolation {
                    tet: t,
                    vertex: tip.vertex,
                    detail: "hinge tip is not topmost in one fan and bottommost in the other".into(),
                });
            }
        } else {
            let short: Vec<&FanPosition> = pos.iter().filter(|p| p.len == 1).collect();
            let long: Vec<&FanPosition> = pos.iter().filter(|p| p.len > 1).collect();
            let ok = short.len() == 1 && long.len() == 1 && !long[0].topmost && !long[0].bottommost;
            if !ok {
                out.push(FanViolation {
                    tet: t,
                    vertex: tip.vertex,
                    detail: "non-hinge tip does not meet one short fan and sit inside a long fan".into(),
                });
            }
        }
    }
    out
}

/// Per-cusp summary for reports.
#[derive(Clone, Debug, Serialize)]
pub struct CuspReport {
    pub cusp: usize,
    pub ladders: usize,
    pub triangles_per_ladder: Vec<usize>,
    pub ladderpole_slope: (i64, i64),
    pub basis: [String; 2],
}

pub fn cusp_reports(cx: &CuspComplex) -> Vec<CuspReport> {
    cx.cusps
        .iter()
        .map(|cd| {
            let l0 = cd.ladders[0];
            let pole = cx.pole_chain(cx.ladders[l0].left_pole, l0);
            CuspReport {
                cusp: cd.cusp,
                ladders: cd.ladders.len(),
                triangles_per_ladder: cd.ladders.iter().map(|&l| cx.ladders[l].tips.len()).collect(),
                ladderpole_slope: cx.primal_coords(cd.cusp, &pole),
                basis: ["canonical transversal".into(), "core of ladder 0".into()],
            }
        })
        .collect()
}
