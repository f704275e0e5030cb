//! The dual graph, face train tracks of the stable and unstable branched
//! surfaces, normal loops and branch curves.

use serde::Serialize;
use thiserror::Error;

use crate::perm::{face_vertices, parity};
use crate::tri::TautTriangulation;
use crate::veering::{CuspComplex, Veer, VeerData};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DualError {
    #[error("dual graph is not strongly connected")]
    NotStronglyConnected,
    #[error("face {face}: switch targets from positions and from veers disagree")]
    InternalInconsistency { face: usize },
}

/// Γ: vertices are tetrahedra, edge F runs from the tetrahedron below face F to the one above.
#[derive(Clone, Debug, Serialize)]
pub struct DualGraph {
    pub n_vertices: usize,
    pub tail: Vec<usize>,
    pub head: Vec<usize>,
}

impl DualGraph {
    pub fn new(tri: &TautTriangulation) -> Result<DualGraph, DualError> {
        let tail = (0..tri.n_faces()).map(|f| tri.tet_below(f)).collect();
        let head = (0..tri.n_faces()).map(|f| tri.tet_above(f)).collect();
        let g = DualGraph {
            n_vertices: tri.n_tets(),
            tail,
            head,
        };
        if !g.strongly_connected() {
            return Err(DualError::NotStronglyConnected);
        }
        Ok(g)
    }

    pub fn n_edges(&self) -> usize {
        self.tail.len()
    }

    pub fn out_edges(&self, v: usize) -> Vec<usize> {
        (0..self.n_edges()).filter(|&e| self.tail[e] == v).collect()
    }

    pub fn in_edges(&self, v: usize) -> Vec<usize> {
        (0..self.n_edges()).filter(|&e| self.head[e] == v).collect()
    }

    fn reach(&self, forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.n_vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in 0..self.n_edges() {
                let (a, b) = if forward {
                    (self.tail[e], self.head[e])
                } else {
                    (self.head[e], self.tail[e])
                };
                if a == v && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen
    }

    pub fn strongly_connected(&self) -> bool {
        self.reach(true).iter().all(|&x| x) && self.reach(false).iter().all(|&x| x)
    }

    /// Incidence matrix d1 (rows = vertices, columns = edges): head minus tail.
    pub fn incidence(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0; self.n_edges()]; self.n_vertices];
        for e in 0..self.n_edges() {
            m[self.head[e]][e] += 1;
            m[self.tail[e]][e] -= 1;
        }
        m
    }

    /// All simple directed cycles as edge lists, each starting at its least vertex.
    /// Returns `None` if more than `cap` cycles exist.
    pub fn simple_cycles(&self, cap: usize) -> Option<Vec<Vec<usize>>> {
        let n = self.n_vertices;
        let mut out: Vec<Vec<usize>> = Vec::new();
        let adj: Vec<Vec<usize>> = (0..n).map(|v| self.out_edges(v)).collect();
        for s in 0..n {
            // Johnson's algorithm restricted to vertices >= s, on the multigraph.
            let mut blocked = vec![false; n];
            let mut bmap: Vec<Vec<usize>> = vec![Vec::new(); n];
            let mut path: Vec<usize> = Vec::new();
            if !self.circuit(s, s, &adj, &mut blocked, &mut bmap, &mut path, &mut out, cap) {
                return None;
            }
        }
        Some(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn circuit(
        &self,
        v: usize,
        s: usize,
        adj: &[Vec<usize>],
        blocked: &mut Vec<bool>,
        bmap: &mut Vec<Vec<usize>>,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> bool {
        // Returns false when the cap is exceeded; found-flag is tracked through `out` length.
        fn unblock(u: usize, blocked: &mut [bool], bmap: &mut [Vec<usize>]) {
            let mut stack = vec![u];
            while let Some(x) = stack.pop() {
                if blocked[x] {
                    blocked[x] = false;
                    let list = std::mem::take(&mut bmap[x]);
                    stack.extend(list);
                }
            }
        }
        let before = out.len();
        blocked[v] = true;
        for &e in &adj[v] {
            let w = self.head[e];
            if w < s {
                continue;
            }
            if w == s {
                path.push(e);
                out.push(path.clone());
                path.pop();
                if out.len() > cap {
                    return false;
                }
            } else if !blocked[w] {
                path.push(e);
                let ok = self.circuit(w, s, adj, blocked, bmap, path, out, cap);
                path.pop();
                if !ok {
                    return false;
                }
            }
        }
        if out.len() > before {
            unblock(v, blocked, bmap);
        } else {
            for &e in &adj[v] {
                let w = self.head[e];
                if w >= s && !bmap[w].contains(&v) {
                    bmap[w].push(v);
                }
            }
        }
        true
    }
}

/// Where each face-edge sits in the star of its edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct StarPos {
    pub edge: usize,
    /// Index into the star's face list.
    pub index: usize,
    pub side_a: bool,
    /// Height from the bottom within its side (0 = bottommost).
    pub height: usize,
    /// Number of faces on that side.
    pub side_len: usize,
}

impl StarPos {
    pub fn topmost(&self) -> bool {
        self.height + 1 == self.side_len
    }
    pub fn bottommost(&self) -> bool {
        self.height == 0
    }
}

/// Face-edge incidences: face F's edge k is opposite face-vertex k (below-slot labels).
#[derive(Clone, Debug)]
pub struct FaceEdges {
    pub pos: Vec<[StarPos; 3]>,
    /// For each edge and star face index, the (face, k) found there.
    pub at: Vec<Vec<(usize, usize)>>,
    pub edge_class: Vec<[usize; 3]>,
}

impl FaceEdges {
    pub fn new(tri: &TautTriangulation) -> FaceEdges {
        let dummy = StarPos {
            edge: 0,
            index: 0,
            side_a: true,
            height: 0,
            side_len: 0,
        };
        let mut pos = vec![[dummy; 3]; tri.n_faces()];
        let mut at = Vec::new();
        let mut edge_class = vec![[0; 3]; tri.n_faces()];
        for star in tri.stars() {
            let len = star.faces.len();
            let mut row = Vec::with_capacity(len);
            for i in 0..len {
                let c = star.corners[i];
                let f = tri.face_class(c.tet, c.c);
                let (_, fb) = tri.face_below(f);
                let opp = tri.to_below(c.tet, c.c, c.d);
                let k = face_vertices(fb).iter().position(|&x| x == opp).unwrap();
                let side_a = i < star.above;
                let (height, side_len) = if side_a {
                    (i, star.above)
                } else {
                    (len - 1 - i, len - star.above)
                };
                pos[f][k] = StarPos {
                    edge: star.edge,
                    index: i,
                    side_a,
                    height,
                    side_len,
                };
                edge_class[f][k] = star.edge;
                row.push((f, k));
            }
            at.push(row);
        }
        FaceEdges { pos, at, edge_class }
    }

    /// The face-edge at a given height of a side of an edge star.
    pub fn on_side(&self, tri: &TautTriangulation, edge: usize, side_a: bool, height: usize) -> (usize, usize) {
        let star = tri.edge_star(edge);
        let len = star.faces.len();
        let i = if side_a { height } else { len - 1 - height };
        self.at[edge][i]
    }
}

/// Face vertices (below-slot labels) in counterclockwise order seen with the
/// coorientation pointing at the viewer.
pub fn face_ccw(tri: &TautTriangulation, f: usize) -> [usize; 3] {
    let (tb, fb) = tri.face_below(f);
    let [a, b, c] = face_vertices(fb);
    if parity([fb, a, b, c]) * tri.orientation(tb) == -1 {
        [a, b, c]
    } else {
        [a, c, b]
    }
}

/// Switch targets (face-edge index, opposite the switch corner) per face.
#[derive(Clone, Debug, Serialize)]
pub struct FaceTrackData {
    pub stable_target: Vec<usize>,
    pub unstable_target: Vec<usize>,
}

impl FaceTrackData {
    /// Face-vertex whose tip carries the switch of the stable track.
    pub fn stable_corner(&self, f: usize) -> usize {
        self.stable_target[f]
    }
    pub fn unstable_corner(&self, f: usize) -> usize {
        self.unstable_target[f]
    }
}

fn face_edge_of(tri: &TautTriangulation, f: usize, slot_tet: usize, slot_face: usize, edge_vs: [usize; 2]) -> usize {
    let (_, fb) = tri.face_below(f);
    let a = tri.to_below(slot_tet, slot_face, edge_vs[0]);
    let b = tri.to_below(slot_tet, slot_face, edge_vs[1]);
    let fv = face_vertices(fb);
    fv.iter().position(|&x| x != a && x != b).unwrap()
}

/// Switch targets from the position definition: the stable switch points at the
/// bottom edge of the tetrahedron above the face, the unstable one at the top edge
/// of the tetrahedron below.
pub fn tracks_from_positions(tri: &TautTriangulation) -> FaceTrackData {
    let mut st = Vec::with_capacity(tri.n_faces());
    let mut un = Vec::with_capacity(tri.n_faces());
    for f in 0..tri.n_faces() {
        let (ta, fa) = tri.face_above(f);
        st.push(face_edge_of(tri, f, ta, fa, tri.bottom_edge_vertices(ta)));
        let (tb, fbs) = tri.face_below(f);
        un.push(face_edge_of(tri, f, tb, fbs, tri.top_edge_vertices(tb)));
    }
    FaceTrackData {
        stable_target: st,
        unstable_target: un,
    }
}

/// Switch targets reconstructed from the veers of the face's edges.
pub fn tracks_from_veer(tri: &TautTriangulation, fe: &FaceEdges, vd: &VeerData) -> Result<FaceTrackData, usize> {
    let mut st = Vec::with_capacity(tri.n_faces());
    let mut un = Vec::with_capacity(tri.n_faces());
    for f in 0..tri.n_faces() {
        let [x0, x1, x2] = face_ccw(tri, f);
        // Edges in counterclockwise order: opposite x2, x0, x1 (edge x0x1, x1x2, x2x0).
        let ks = [x2, x0, x1];
        let fv = face_vertices(tri.face_below(f).1);
        let idx = |x: usize| fv.iter().position(|&y| y == x).unwrap();
        let ks = ks.map(idx);
        let veers = ks.map(|k| vd.veer[fe.edge_class[f][k]]);
        let lefts = veers.iter().filter(|&&v| v == Veer::Left).count();
        let major = if lefts >= 2 { Veer::Left } else { Veer::Right };
        if lefts == 0 || lefts == 3 {
            return Err(f);
        }
        // e1, e2 are the two edges of the majority colour with e2 following e1.
        let odd = (0..3).find(|&i| veers[i] != major).unwrap();
        let e1 = ks[(odd + 1) % 3];
        let e2 = ks[(odd + 2) % 3];
        match major {
            Veer::Left => {
                st.push(e1);
                un.push(e2);
            }
            Veer::Right => {
                un.push(e1);
                st.push(e2);
            }
        }
    }
    Ok(FaceTrackData {
        stable_target: st,
        unstable_target: un,
    })
}

/// Both routes, which must agree.
pub fn face_tracks(tri: &TautTriangulation, fe: &FaceEdges, vd: &VeerData) -> Result<FaceTrackData, DualError> {
    let a = tracks_from_positions(tri);
    let b = tracks_from_veer(tri, fe, vd).map_err(|face| DualError::InternalInconsistency { face })?;
    for f in 0..tri.n_faces() {
        if a.stable_target[f] != b.stable_target[f] || a.unstable_target[f] != b.unstable_target[f] {
            return Err(DualError::InternalInconsistency { face: f });
        }
    }
    Ok(a)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TipKind {
    Ladderpole,
    UpwardRung,
    DownwardRung,
}

/// Tip trichotomy violations: sides whose ladder type disagrees with the switch data.
pub fn tip_trichotomy_violations(cx: &CuspComplex, ft: &FaceTrackData) -> Vec<usize> {
    let mut bad = Vec::new();
    for (s, side) in cx.sides.iter().enumerate() {
        let actual = if side.pole {
            TipKind::Ladderpole
        } else if cx.tips[side.below].upward {
            TipKind::UpwardRung
        } else {
            TipKind::DownwardRung
        };
        let st = ft.stable_corner(side.face) == side.j;
        let un = ft.unstable_corner(side.face) == side.j;
        let predicted = match (st, un) {
            (false, false) => TipKind::Ladderpole,
            (true, false) => TipKind::UpwardRung,
            (false, true) => TipKind::DownwardRung,
            (true, true) => {
                bad.push(s);
                continue;
            }
        };
        if predicted != actual {
            bad.push(s);
        }
    }
    bad
}

/// One step of a normal loop: cross face `face` from face-edge `entry` to `exit`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LoopStep {
    pub face: usize,
    pub entry: usize,
    pub exit: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalLoop {
    pub steps: Vec<LoopStep>,
    pub stable: bool,
    pub unstable: bool,
    pub shallow_stable: bool,
    pub shallow_unstable: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Stable,
    Unstable,
}

/// Crossing type at one edge: leaving `from` (face-edge) into `to`.
fn crossing_ok(fe: &FaceEdges, from: (usize, usize), to: (usize, usize)) -> Option<(bool, bool, bool, bool)> {
    let p = fe.pos[from.0][from.1];
    let q = fe.pos[to.0][to.1];
    if p.edge != q.edge || p.side_a == q.side_a {
        return None;
    }
    let stable = !p.topmost() && q.topmost();
    let shallow_s = stable && p.height + 2 == p.side_len;
    let unstable = p.bottommost() && !q.bottommost();
    let shallow_u = unstable && q.height == 1;
    Some((stable, shallow_s, unstable, shallow_u))
}

/// Classify a cyclic sequence of steps; `None` if it is not a normal loop.
pub fn classify_loop(fe: &FaceEdges, steps: &[LoopStep]) -> Option<NormalLoop> {
    if steps.is_empty() {
        return None;
    }
    let (mut st, mut sst, mut un, mut sun) = (true, true, true, true);
    for i in 0..steps.len() {
        let a = steps[i];
        let b = steps[(i + 1) % steps.len()];
        if a.entry == a.exit || a.entry > 2 || a.exit > 2 {
            return None;
        }
        let (s, ss, u, su) = crossing_ok(fe, (a.face, a.exit), (b.face, b.entry))?;
        st &= s;
        sst &= ss;
        un &= u;
        sun &= su;
    }
    Some(NormalLoop {
        steps: steps.to_vec(),
        stable: st,
        unstable: un,
        shallow_stable: sst,
        shallow_unstable: sun,
    })
}

/// Rotate a cyclic sequence to its lexicographically least rotation.
pub fn canonical_rotation<T: Ord + Clone>(v: &[T]) -> Vec<T> {
    let n = v.len();
    (0..n)
        .map(|r| {
            let mut w = v.to_vec();
            w.rotate_left(r);
            w
        })
        .min()
        .unwrap_or_default()
}

/// Successor states of the loop transition graph. A state is a face-edge
/// `(face, entry)`; a move picks an exit and crosses into the next face.
fn successors(tri: &TautTriangulation, fe: &FaceEdges, flavor: Flavor, state: (usize, usize)) -> Vec<(usize, (usize, usize))> {
    let (f, entry) = state;
    let mut out = Vec::new();
    for exit in 0..3 {
        if exit == entry {
            continue;
        }
        let p = fe.pos[f][exit];
        let other_len = if p.side_a {
            tri.edge_star(p.edge).faces.len() - tri.edge_star(p.edge).above
        } else {
            tri.edge_star(p.edge).above
        };
        match flavor {
            Flavor::Stable => {
                if p.topmost() {
                    continue;
                }
                let to = fe.on_side(tri, p.edge, !p.side_a, other_len - 1);
                out.push((exit, to));
            }
            Flavor::Unstable => {
                if !p.bottommost() {
                    continue;
                }
                for h in 1..other_len {
                    out.push((exit, fe.on_side(tri, p.edge, !p.side_a, h)));
                }
            }
        }
    }
    out
}

/// Enumerate loops of one flavor that visit each face-edge state at most once,
/// up to `max_len` steps and at most `cap` loops. Returns (loops, truncated).
pub fn enumerate_loops(
    tri: &TautTriangulation,
    fe: &FaceEdges,
    flavor: Flavor,
    max_len: usize,
    cap: usize,
) -> (Vec<NormalLoop>, bool) {
    let nstates = 3 * tri.n_faces();
    let id = |s: (usize, usize)| 3 * s.0 + s.1;
    let succ: Vec<Vec<(usize, (usize, usize))>> = (0..nstates)
        .map(|i| successors(tri, fe, flavor, (i / 3, i % 3)))
        .collect();
    let mut found: std::collections::BTreeSet<Vec<LoopStep>> = std::collections::BTreeSet::new();
    let mut truncated = false;
    for start in 0..nstates {
        // DFS over paths whose states are all >= start, closing at start.
        let mut on_path = vec![false; nstates];
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        let mut steps: Vec<LoopStep> = Vec::new();
        on_path[start] = true;
        while let Some(&mut (s, ref mut k)) = stack.last_mut() {
            if *k >= succ[s].len() || steps.len() >= max_len {
                stack.pop();
                on_path[s] = false;
                steps.pop();
                continue;
            }
            let (exit, to) = succ[s][*k];
            *k += 1;
            let t = id(to);
            let step = LoopStep {
                face: s / 3,
                entry: s % 3,
                exit,
            };
            if t == start {
                let mut cyc = steps.clone();
                cyc.push(step);
                found.insert(canonical_rotation(&cyc));
                if found.len() >= cap {
                    truncated = true;
                    break;
                }
                continue;
            }
            if t < start || on_path[t] {
                continue;
            }
            on_path[t] = true;
            steps.push(step);
            stack.push((t, 0));
        }
        if truncated {
            break;
        }
    }
    let loops = found
        .into_iter()
        .filter_map(|s| classify_loop(fe, &s))
        .collect();
    (loops, truncated)
}

/// Γ-edges (faces) crossed by the pushup of a stable loop, in order.
pub fn pushup(tri: &TautTriangulation, fe: &FaceEdges, l: &NormalLoop) -> Vec<usize> {
    let mut out = Vec::new();
    let n = l.steps.len();
    for i in 0..n {
        let a = l.steps[i];
        let p = fe.pos[a.face][a.exit];
        for h in p.height + 1..p.side_len {
            out.push(fe.on_side(tri, p.edge, p.side_a, h).0);
        }
    }
    out
}

/// Γ-edges crossed by the pushdown of an unstable loop, in order.
pub fn pushdown(tri: &TautTriangulation, fe: &FaceEdges, l: &NormalLoop) -> Vec<usize> {
    let mut out = Vec::new();
    let n = l.steps.len();
    for i in 0..n {
        let b = l.steps[(i + 1) % n];
        let q = fe.pos[b.face][b.entry];
        for h in 0..q.height {
            out.push(fe.on_side(tri, q.edge, q.side_a, h).0);
        }
    }
    out
}

/// Check that a face sequence is a closed directed path in Γ.
pub fn is_gamma_cycle(tri: &TautTriangulation, faces: &[usize]) -> bool {
    if faces.is_empty() {
        return false;
    }
    (0..faces.len()).all(|i| tri.tet_above(faces[i]) == tri.tet_below(faces[(i + 1) % faces.len()]))
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchCurve {
    pub normal_loop: NormalLoop,
    pub pushup: Vec<usize>,
    pub pushdown: Vec<usize>,
}

/// Normal branch loops (stable and unstable) up to `max_len`, with their pushes.
pub fn branch_curves(tri: &TautTriangulation, fe: &FaceEdges, max_len: usize, cap: usize) -> (Vec<BranchCurve>, bool) {
    let (loops, truncated) = enumerate_loops(tri, fe, Flavor::Stable, max_len, cap);
    let out = loops
        .into_iter()
        .filter(|l| l.stable && l.unstable)
        .map(|l| BranchCurve {
            pushup: pushup(tri, fe, &l),
            pushdown: pushdown(tri, fe, &l),
            normal_loop: l,
        })
        .collect();
    (out, truncated)
}

/// Branch curves whose pushup or pushdown misses every hinge tetrahedron.
pub fn hinge_violations(tri: &TautTriangulation, vd: &VeerData, curves: &[BranchCurve]) -> Vec<usize> {
    let hits = |faces: &[usize]| faces.iter().any(|&f| vd.hinge[tri.tet_above(f)] || vd.hinge[tri.tet_below(f)]);
    (0..curves.len())
        .filter(|&i| !hits(&curves[i].pushup) || !hits(&curves[i].pushdown))
        .collect()
}
