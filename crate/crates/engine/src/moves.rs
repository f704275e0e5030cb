//! The flat-isotopy moves. Each move takes a state and a site and returns a new
//! state, or says which precondition failed.

use std::fmt;

use serde::{Deserialize, Serialize};
use taut_core::veering::tip_id;

use crate::boundary::{disk_of, trace_curves, Curve, DiskCusp};
use crate::error::EngineError;
use crate::frame::Frame;
use crate::patches::surface_chi;
use crate::state::{Corner, FlattenedSurface, PlateRef};
use crate::status::BigonLevel;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveKind {
    Face,
    InverseFace,
    DiskRemoval,
    Tetrahedron,
    WidthOne,
    FlipUp,
    FlipDown,
    Annulus,
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MoveKind::Face => "face",
            MoveKind::InverseFace => "inverse face",
            MoveKind::DiskRemoval => "disk removal",
            MoveKind::Tetrahedron => "tetrahedron",
            MoveKind::WidthOne => "width one",
            MoveKind::FlipUp => "upward flip",
            MoveKind::FlipDown => "downward flip",
            MoveKind::Annulus => "annulus",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MoveSpec {
    /// Plates at `level` and `level + 1` of `face`, joined by a rod at corner `k`.
    Face { face: usize, level: usize, k: usize },
    /// Insert a pair at `level` joined at corner `k`; `pick[i]` chooses which
    /// neighbouring rod is split at the i-th other corner.
    InverseFace { face: usize, level: usize, k: usize, pick: [bool; 2] },
    /// Volume 1, circumference 3 disk around the tip of `tet` at `vertex`.
    DiskRemoval { tet: usize, vertex: usize },
    /// Volume 0, circumference 2 disk: plates at `level`, `level + 1` of `face`
    /// joined at both corners other than `j`.
    DiskRemovalBigon { face: usize, level: usize, j: usize },
    /// Sweep across `tet` at its equatorial edge `edge`; the target disk is
    /// looked for at `edge[0]` first.
    Tetrahedron { tet: usize, edge: [usize; 2] },
    /// Shrink and remove the width-one disk whose boundary runs through the given corner.
    WidthOne { at: PlateRef, j: usize },
    FlipUp { tet: usize },
    FlipDown { tet: usize },
    /// Sweep an annulus of extremal plates through the tetrahedra next to it.
    Annulus { stable: bool, plates: Vec<PlateRef> },
}

impl MoveSpec {
    pub fn kind(&self) -> MoveKind {
        match self {
            MoveSpec::Face { .. } => MoveKind::Face,
            MoveSpec::InverseFace { .. } => MoveKind::InverseFace,
            MoveSpec::DiskRemoval { .. } | MoveSpec::DiskRemovalBigon { .. } => MoveKind::DiskRemoval,
            MoveSpec::Tetrahedron { .. } => MoveKind::Tetrahedron,
            MoveSpec::WidthOne { .. } => MoveKind::WidthOne,
            MoveSpec::FlipUp { .. } => MoveKind::FlipUp,
            MoveSpec::FlipDown { .. } => MoveKind::FlipDown,
            MoveSpec::Annulus { .. } => MoveKind::Annulus,
        }
    }
}

/// Result of one application.
#[derive(Clone, Debug)]
pub struct Applied {
    pub state: FlattenedSurface,
    pub delta_area: i64,
    /// Volume change of the target disk, for tetrahedron moves.
    pub delta_volume: Option<i64>,
    /// Elementary moves making up a composite.
    pub steps: Vec<MoveSpec>,
}

/// One line of a simplification log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRecord {
    pub kind: MoveKind,
    pub site: MoveSpec,
    pub delta_area: i64,
    pub delta_volume: Option<i64>,
    pub pre_status: BigonLevel,
    pub post_status: BigonLevel,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub steps: Vec<MoveSpec>,
}

impl MoveRecord {
    /// Whether the recorded changes match what the move promises.
    pub fn meets_contract(&self) -> bool {
        match self.kind {
            MoveKind::Face | MoveKind::DiskRemoval => self.delta_area == -2,
            MoveKind::InverseFace => self.delta_area == 2,
            MoveKind::WidthOne => self.delta_area <= -2,
            MoveKind::FlipUp | MoveKind::FlipDown | MoveKind::Annulus => self.delta_area == 0,
            MoveKind::Tetrahedron => self.delta_area == 0 && self.delta_volume == Some(-1),
        }
    }
}

/// Apply a move, checking its preconditions and that the Euler characteristic
/// of the capped surface is unchanged.
pub fn apply_move(fr: &Frame, st: &FlattenedSurface, m: &MoveSpec) -> Result<Applied, EngineError> {
    let kind = m.kind();
    let mut delta_volume = None;
    let mut steps = Vec::new();
    let state = match m {
        MoveSpec::Face { face, level, k } => face_move(fr, st, *face, *level, *k)?,
        MoveSpec::InverseFace { face, level, k, pick } => inverse_face(fr, st, *face, *level, *k, *pick)?,
        MoveSpec::DiskRemoval { tet, vertex } => disk_removal(fr, st, *tet, *vertex)?,
        MoveSpec::DiskRemovalBigon { face, level, j } => bigon_removal(fr, st, *face, *level, *j)?,
        MoveSpec::Tetrahedron { tet, edge } => {
            let (s, dv, _) = tetrahedron(fr, st, *tet, *edge)?;
            delta_volume = dv;
            s
        }
        MoveSpec::WidthOne { at, j } => {
            let (s, sub) = width_one(fr, st, *at, *j)?;
            steps = sub;
            s
        }
        MoveSpec::FlipUp { tet } => flip(fr, st, *tet, true)?,
        MoveSpec::FlipDown { tet } => flip(fr, st, *tet, false)?,
        MoveSpec::Annulus { stable, plates } => annulus(fr, st, *stable, plates)?,
    };
    let before = surface_chi(fr, st, &trace_curves(fr, st));
    let after = surface_chi(fr, &state, &trace_curves(fr, &state));
    if before != after {
        return Err(EngineError::pre(
            kind,
            format!("Euler characteristic would change from {before} to {after}"),
        ));
    }
    Ok(Applied {
        delta_area: state.area() as i64 - st.area() as i64,
        state,
        delta_volume,
        steps,
    })
}

fn finish(fr: &Frame, mut st: FlattenedSurface, kind: MoveKind) -> Result<FlattenedSurface, EngineError> {
    st.settle();
    st.validate(fr).map_err(|e| EngineError::pre(kind, format!("result is not a flattened state: {e}")))?;
    Ok(st)
}

/// Remove two plates of one face at adjacent levels and reconnect their rod
/// partners corner by corner.
fn splice_pair(
    fr: &Frame,
    st: &FlattenedSurface,
    face: usize,
    level: usize,
    kind: MoveKind,
) -> Result<FlattenedSurface, EngineError> {
    let a = st.at(PlateRef { face, level }).ok_or_else(|| EngineError::pre(kind, "no plate at level"))?;
    let b = st
        .at(PlateRef { face, level: level + 1 })
        .ok_or_else(|| EngineError::pre(kind, "no plate above"))?;
    let mut out = st.clone();
    let mut joins = Vec::new();
    for k in 0..3 {
        let x = st.link(Corner::new(a, k));
        let y = st.link(Corner::new(b, k));
        if x == Corner::new(b, k) {
            continue;
        }
        if x.plate == a || x.plate == b || y.plate == a || y.plate == b {
            return Err(EngineError::pre(kind, "the pair is tangled with itself"));
        }
        joins.push((x, y));
    }
    out.kill(a);
    out.kill(b);
    for (x, y) in joins {
        out.join(x, y);
    }
    finish(fr, out, kind)
}

fn face_move(fr: &Frame, st: &FlattenedSurface, face: usize, level: usize, k: usize) -> Result<FlattenedSurface, EngineError> {
    let kind = MoveKind::Face;
    let a = st.at(PlateRef { face, level }).ok_or_else(|| EngineError::pre(kind, "no plate at level"))?;
    let b = st
        .at(PlateRef { face, level: level + 1 })
        .ok_or_else(|| EngineError::pre(kind, "no plate above"))?;
    if st.link(Corner::new(a, k)) != Corner::new(b, k) {
        return Err(EngineError::pre(kind, "the two plates do not backtrack through this corner"));
    }
    splice_pair(fr, st, face, level, kind)
}

fn bigon_removal(fr: &Frame, st: &FlattenedSurface, face: usize, level: usize, j: usize) -> Result<FlattenedSurface, EngineError> {
    let kind = MoveKind::DiskRemoval;
    let a = st.at(PlateRef { face, level }).ok_or_else(|| EngineError::pre(kind, "no plate at level"))?;
    let b = st
        .at(PlateRef { face, level: level + 1 })
        .ok_or_else(|| EngineError::pre(kind, "no plate above"))?;
    for k in (0..3).filter(|&k| k != j) {
        if st.link(Corner::new(a, k)) != Corner::new(b, k) {
            return Err(EngineError::pre(kind, "the disk does not have circumference 2"));
        }
    }
    splice_pair(fr, st, face, level, kind)
}

fn inverse_face(
    fr: &Frame,
    st: &FlattenedSurface,
    face: usize,
    level: usize,
    k: usize,
    pick: [bool; 2],
) -> Result<FlattenedSurface, EngineError> {
    let kind = MoveKind::InverseFace;
    if face >= st.stacks.len() || level > st.stacks[face].len() || k > 2 {
        return Err(EngineError::pre(kind, "site out of range"));
    }
    let mut out = st.clone();
    let a = out.add(face, level, 1);
    let b = out.add(face, level + 1, -1);
    out.settle_levels();
    out.join(Corner::new(a, k), Corner::new(b, k));
    let others: Vec<usize> = (0..3).filter(|&x| x != k).collect();
    for (i, &k1) in others.iter().enumerate() {
        let e = fr.fe.edge_class[face][k1];
        let mut keyed: Vec<((usize, usize), Corner)> = Vec::new();
        for (p, pl) in out.plates.iter().enumerate() {
            for kk in 0..3 {
                let c = Corner::new(p, kk);
                let live = pl.links[kk] != Corner::UNSET || ((p == a || p == b) && kk == k1);
                if fr.fe.edge_class[pl.face][kk] == e && live {
                    keyed.push((out.slot_key(fr, c), c));
                }
            }
        }
        keyed.sort();
        let n = keyed.len();
        if n < 4 {
            return Err(EngineError::pre(kind, "no rod to split at this corner"));
        }
        let idx = |c: Corner| keyed.iter().position(|&(_, d)| d == c).expect("slot");
        let (pa, pb) = (idx(Corner::new(a, k1)), idx(Corner::new(b, k1)));
        // the new slots share a face and sit at consecutive depths
        let (lo, hi) = (pa.min(pb), pa.max(pb));
        debug_assert_eq!(hi, lo + 1);
        let x = keyed[if pick[i] { (hi + 1) % n } else { (lo + n - 1) % n }].1;
        let y = out.link(x);
        if y.plate == a || y.plate == b {
            return Err(EngineError::pre(kind, "chosen rod already split"));
        }
        let (px, py) = (idx(x), idx(y));
        let fwd = |z: usize| (z + n - px) % n;
        let (c_lo, c_hi) = if fwd(lo) < fwd(py) { (x, y) } else { (y, x) };
        out.join(keyed[lo].1, c_lo);
        out.join(keyed[hi].1, c_hi);
    }
    let s = out.implied_sign(fr, face, others[0], out.link(Corner::new(a, others[0])));
    out.plates[a].sign = s;
    out.plates[b].sign = -s;
    finish(fr, out, kind)
}

/// Replace some plates by new ones, carrying rods across by a corner map.
struct Rewire {
    removed: Vec<usize>,
    /// Rods among removed plates that must be present.
    internal: Vec<(Corner, Corner)>,
    /// New plates: face class and whether they sit on top of the stack.
    added: Vec<(usize, bool)>,
    /// Old corner to (new plate index, corner).
    map: Vec<(Corner, (usize, usize))>,
    new_rods: Vec<((usize, usize), (usize, usize))>,
}

fn rewire(fr: &Frame, st: &FlattenedSurface, kind: MoveKind, rw: Rewire) -> Result<FlattenedSurface, EngineError> {
    for &(x, y) in &rw.internal {
        if st.link(x) != y {
            return Err(EngineError::pre(kind, "the plates are not joined as required"));
        }
    }
    let mut distinct = rw.removed.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() != rw.removed.len() {
        return Err(EngineError::pre(kind, "the required plates coincide"));
    }
    let removed = |p: usize| rw.removed.contains(&p);
    for &p in &rw.removed {
        for k in 0..3 {
            let c = Corner::new(p, k);
            let covered = rw.map.iter().any(|&(o, _)| o == c) || rw.internal.iter().any(|&(x, y)| x == c || y == c);
            if !covered {
                return Err(EngineError::pre(kind, "a corner of a swept plate is unaccounted for"));
            }
        }
    }
    let mut out = st.clone();
    for &p in &rw.removed {
        out.kill(p);
    }
    let mut ids = Vec::new();
    for &(f, topmost) in &rw.added {
        let pos = if topmost { out.stacks[f].len() } else { 0 };
        ids.push(out.add(f, pos, 0));
    }
    out.settle_levels();
    for &(old, (i, k)) in &rw.map {
        let x = st.link(old);
        let target = if removed(x.plate) {
            match rw.map.iter().find(|&&(o, _)| o == x) {
                Some(&(_, (i2, k2))) => Corner::new(ids[i2], k2),
                None => return Err(EngineError::pre(kind, "swept plates are joined unexpectedly")),
            }
        } else {
            x
        };
        out.join(Corner::new(ids[i], k), target);
    }
    for &((i, k), (i2, k2)) in &rw.new_rods {
        out.join(Corner::new(ids[i], k), Corner::new(ids[i2], k2));
    }
    // signs spread from the untouched part of the surface
    let mut changed = true;
    while changed {
        changed = false;
        for &p in &ids {
            if out.plates[p].sign != 0 {
                continue;
            }
            let face = out.plates[p].face;
            for k in 0..3 {
                let o = out.plates[p].links[k];
                if o.plate != usize::MAX && out.plates[o.plate].sign != 0 {
                    out.plates[p].sign = out.implied_sign(fr, face, k, o);
                    changed = true;
                    break;
                }
            }
        }
    }
    if ids.iter().any(|&p| out.plates[p].sign == 0) {
        return Err(EngineError::pre(kind, "cannot orient the new plates"));
    }
    finish(fr, out, kind)
}

fn other_two(a: usize, b: usize) -> [usize; 2] {
    let mut r = [0; 2];
    let mut i = 0;
    for v in 0..4 {
        if v != a && v != b {
            r[i] = v;
            i += 1;
        }
    }
    r
}

fn flip(fr: &Frame, st: &FlattenedSurface, t: usize, up: bool) -> Result<FlattenedSurface, EngineError> {
    let kind = if up { MoveKind::FlipUp } else { MoveKind::FlipDown };
    let tri = &fr.tri;
    if t >= tri.n_tets() {
        return Err(EngineError::pre(kind, "no such tetrahedron"));
    }
    let (from, to) = if up {
        (tri.bottom_faces(t), tri.top_faces(t))
    } else {
        (tri.top_faces(t), tri.bottom_faces(t))
    };
    let mut old = [0usize; 2];
    for i in 0..2 {
        let g = tri.face_class(t, from[i]);
        old[i] = st
            .extremal(g, fr.above(t, from[i]))
            .ok_or_else(|| EngineError::pre(kind, "a face next to the tetrahedron is empty"))?;
    }
    let [x1, x2] = from;
    let [y1, y2] = to;
    let mut map = Vec::new();
    for (i, &x) in from.iter().enumerate() {
        for (j, &y) in to.iter().enumerate() {
            map.push((Corner::new(old[i], fr.fv(t, x, y)), (j, fr.fv(t, y, x))));
        }
    }
    let rw = Rewire {
        removed: old.to_vec(),
        internal: vec![(Corner::new(old[0], fr.fv(t, x1, x2)), Corner::new(old[1], fr.fv(t, x2, x1)))],
        added: to.iter().map(|&y| (tri.face_class(t, y), fr.above(t, y))).collect(),
        map,
        new_rods: vec![((0, fr.fv(t, y1, y2)), (1, fr.fv(t, y2, y1)))],
    };
    rewire(fr, st, kind, rw)
}

fn disk_removal(fr: &Frame, st: &FlattenedSurface, t: usize, v: usize) -> Result<FlattenedSurface, EngineError> {
    let kind = MoveKind::DiskRemoval;
    let tri = &fr.tri;
    if t >= tri.n_tets() || v > 3 {
        return Err(EngineError::pre(kind, "no such tip"));
    }
    let xs: Vec<usize> = (0..4).filter(|&x| x != v).collect();
    let mut plates = Vec::new();
    for &x in &xs {
        let g = tri.face_class(t, x);
        plates.push(
            st.extremal(g, fr.above(t, x))
                .ok_or_else(|| EngineError::pre(kind, "no plate next to the tip"))?,
        );
    }
    let mut internal = Vec::new();
    let mut map = Vec::new();
    for i in 0..3 {
        for j in i + 1..3 {
            internal.push((
                Corner::new(plates[i], fr.fv(t, xs[i], xs[j])),
                Corner::new(plates[j], fr.fv(t, xs[j], xs[i])),
            ));
        }
        map.push((Corner::new(plates[i], fr.fv(t, xs[i], v)), (0, fr.fv(t, v, xs[i]))));
    }
    let rw = Rewire {
        removed: plates,
        internal,
        added: vec![(tri.face_class(t, v), fr.above(t, v))],
        map,
        new_rods: Vec::new(),
    };
    rewire(fr, st, kind, rw)
}

/// Curve through corner `j` of a plate.
fn curve_through(curves: &[Curve], plate: usize, j: usize) -> Option<usize> {
    curves.iter().position(|c| c.contains(plate, j))
}

/// Target disk of a tetrahedron move: a disk containing the tip of `t` at an
/// end of the swept edge, bounded by the curve through the lower plate.
fn tet_target(
    fr: &Frame,
    st: &FlattenedSurface,
    t: usize,
    fbot: usize,
    p: usize,
    edge: [usize; 2],
) -> Option<(usize, usize)> {
    let curves = trace_curves(fr, st);
    for w in edge {
        let ci = curve_through(&curves, p, fr.fv(t, fbot, w))?;
        if let Some(d) = disk_of(fr, st, &curves, ci) {
            let fits = |c: &DiskCusp| c.free && c.sweep.map(|(t2, e2)| t2 == t && e2[0] == w && e2[1] != w) == Some(true);
            if d.cusps.iter().any(fits) {
                // a disk wrapping both ends of the edge would lose two tips at once
                let other = if w == edge[0] { edge[1] } else { edge[0] };
                if d.tips.contains(&tip_id(t, other)) {
                    return None;
                }
                return Some((w, d.volume));
            }
        }
    }
    None
}

type Swept = (FlattenedSurface, Option<i64>, Option<(PlateRef, usize)>);

/// Tetrahedron move; returns the new state, the target disk's volume change, and
/// a corner on the target disk's new boundary.
fn tetrahedron(
    fr: &Frame,
    st: &FlattenedSurface,
    t: usize,
    edge: [usize; 2],
) -> Result<Swept, EngineError> {
    let kind = MoveKind::Tetrahedron;
    let tri = &fr.tri;
    let [x, y] = edge;
    if t >= tri.n_tets() || x == y || x > 3 || y > 3 {
        return Err(EngineError::pre(kind, "no such edge"));
    }
    let [z1, z2] = other_two(x, y);
    let (fbot, ftop) = match (fr.above(t, z1), fr.above(t, z2)) {
        (true, false) => (z1, z2),
        (false, true) => (z2, z1),
        _ => return Err(EngineError::pre(kind, "edge is not equatorial")),
    };
    let p = st
        .top(tri.face_class(t, fbot))
        .ok_or_else(|| EngineError::pre(kind, "no plate below the tetrahedron"))?;
    let q = st
        .bottom(tri.face_class(t, ftop))
        .ok_or_else(|| EngineError::pre(kind, "no plate above the tetrahedron"))?;
    let kp = fr.fv(t, fbot, ftop);
    let kq = fr.fv(t, ftop, fbot);
    if st.link(Corner::new(p, kp)) != Corner::new(q, kq) {
        return Err(EngineError::pre(kind, "the plates do not turn around the edge"));
    }
    let (w, vol) = tet_target(fr, st, t, fbot, p, edge)
        .ok_or_else(|| EngineError::pre(kind, "no disk has a free cusp of size 1 here"))?;
    let news = [x, y];
    let mut map = Vec::new();
    for (i, &z) in news.iter().enumerate() {
        map.push((Corner::new(p, fr.fv(t, fbot, z)), (i, fr.fv(t, z, fbot))));
        map.push((Corner::new(q, fr.fv(t, ftop, z)), (i, fr.fv(t, z, ftop))));
    }
    let rw = Rewire {
        removed: vec![p, q],
        internal: vec![(Corner::new(p, kp), Corner::new(q, kq))],
        added: news.iter().map(|&z| (tri.face_class(t, z), fr.above(t, z))).collect(),
        map,
        new_rods: vec![((0, fr.fv(t, x, y)), (1, fr.fv(t, y, x)))],
    };
    let out = rewire(fr, st, kind, rw)?;
    // the face opposite the other end of the edge carries w after the sweep
    let other = if w == x { y } else { x };
    let g = tri.face_class(t, other);
    let np = out.extremal(g, fr.above(t, other)).expect("new plate");
    let j = fr.fv(t, other, w);
    let curves = trace_curves(fr, &out);
    let dv = curve_through(&curves, np, j)
        .and_then(|ci| disk_of(fr, &out, &curves, ci))
        .map(|d| d.volume as i64 - vol as i64);
    Ok((out.clone(), dv, Some((out.plate_ref(np), j))))
}

fn width_one(
    fr: &Frame,
    st: &FlattenedSurface,
    at: PlateRef,
    j: usize,
) -> Result<(FlattenedSurface, Vec<MoveSpec>), EngineError> {
    let kind = MoveKind::WidthOne;
    let mut cur = st.clone();
    let mut loc = (at, j);
    let mut steps = Vec::new();
    let mut first = true;
    loop {
        let p = cur.at(loc.0).ok_or_else(|| EngineError::pre(kind, "no plate at the given corner"))?;
        let curves = trace_curves(fr, &cur);
        let ci = curve_through(&curves, p, loc.1).ok_or_else(|| EngineError::pre(kind, "corner off the boundary"))?;
        let d = disk_of(fr, &cur, &curves, ci).ok_or_else(|| EngineError::pre(kind, "curve bounds no disk"))?;
        if first && d.width > 1 {
            return Err(EngineError::pre(kind, format!("disk has width {}", d.width)));
        }
        first = false;
        if d.innermost && d.volume == 1 && d.circumference == 3 {
            let tip = &fr.cx.tips[d.tips[0]];
            let m = MoveSpec::DiskRemoval {
                tet: tip.tet,
                vertex: tip.vertex,
            };
            cur = disk_removal(fr, &cur, tip.tet, tip.vertex)?;
            steps.push(m);
            return Ok((cur, steps));
        }
        if d.innermost && d.volume == 0 && d.circumference == 2 {
            let s0 = curves[ci].segs[0];
            let pl = &cur.plates[s0.plate];
            let other = curves[ci].segs[1].plate;
            let level = pl.level.min(cur.plates[other].level);
            let m = MoveSpec::DiskRemovalBigon {
                face: pl.face,
                level,
                j: s0.j,
            };
            cur = bigon_removal(fr, &cur, pl.face, level, s0.j)?;
            steps.push(m);
            return Ok((cur, steps));
        }
        if steps.len() > d.volume + 8 {
            return Err(EngineError::pre(kind, "disk does not shrink"));
        }
        let cusp = d
            .cusps
            .iter()
            .find(|c| c.size == 1 && c.free)
            .ok_or_else(|| EngineError::pre(kind, "no free cusp of size 1"))?;
        let (tet, edge) = cusp.sweep.expect("size one cusps know their tetrahedron");
        let (next, _, target) = tetrahedron(fr, &cur, tet, edge)?;
        steps.push(MoveSpec::Tetrahedron { tet, edge });
        cur = next;
        loc = target.ok_or_else(|| EngineError::pre(kind, "lost track of the disk"))?;
    }
}

/// Annulus move on a cyclic chain of plates, each extremal towards the
/// tetrahedra being swept (topmost for the stable move).
fn annulus(fr: &Frame, st: &FlattenedSurface, stable: bool, refs: &[PlateRef]) -> Result<FlattenedSurface, EngineError> {
    let kind = MoveKind::Annulus;
    let tri = &fr.tri;
    let n = refs.len();
    if n == 0 {
        return Err(EngineError::pre(kind, "empty annulus"));
    }
    let mut plates = Vec::with_capacity(n);
    for r in refs {
        let p = st.at(*r).ok_or_else(|| EngineError::pre(kind, "no plate at site"))?;
        let extremal = if stable { st.top(r.face) } else { st.bottom(r.face) };
        if extremal != Some(p) {
            return Err(EngineError::pre(kind, "annulus plate is not extremal in its stack"));
        }
        plates.push(p);
    }
    // corners joining consecutive plates
    let mut steps = Vec::with_capacity(n);
    let mut internal = Vec::with_capacity(n);
    for i in 0..n {
        let (p, q) = (plates[i], plates[(i + 1) % n]);
        let exit = (0..3)
            .find(|&k| st.link(Corner::new(p, k)).plate == q)
            .ok_or_else(|| EngineError::pre(kind, "consecutive plates are not joined"))?;
        let to = st.link(Corner::new(p, exit));
        internal.push((Corner::new(p, exit), to));
        steps.push((exit, to.k));
    }
    let loop_steps: Vec<taut_core::dual::LoopStep> = (0..n)
        .map(|i| taut_core::dual::LoopStep {
            face: refs[i].face,
            entry: steps[(i + n - 1) % n].1,
            exit: steps[i].0,
        })
        .collect();
    let nl = taut_core::dual::classify_loop(&fr.fe, &loop_steps)
        .ok_or_else(|| EngineError::pre(kind, "plates do not collapse to a normal loop"))?;
    if (stable && !nl.shallow_stable) || (!stable && !nl.shallow_unstable) {
        return Err(EngineError::pre(kind, "core does not collapse to a shallow loop"));
    }
    // tetrahedra swept and the faces the plates land on
    let mut added = Vec::with_capacity(n);
    let mut map = Vec::new();
    for i in 0..n {
        let f = refs[i].face;
        let (t, x) = if stable { tri.face_above(f) } else { tri.face_below(f) };
        let exit = steps[i].0;
        // the face of t across the swept edge is passed through; the other one receives the plate
        let across = (0..4).find(|&y| y != x && tri.is_top_face(t, y) == tri.is_top_face(t, x))
            .expect("second face on the same side");
        let receivers: Vec<usize> = (0..4).filter(|&y| y != x && y != across).collect();
        let mut landing = None;
        for &y in &receivers {
            let shared = fr.fv(t, x, y);
            if shared != exit && fr.fv(t, x, across) != shared {
                landing = Some((y, shared));
            }
        }
        let (y, k_old) = landing.ok_or_else(|| EngineError::pre(kind, "no face to land on"))?;
        let g = other_of(&receivers, y);
        if !st.stacks[tri.face_class(t, g)].is_empty() {
            return Err(EngineError::pre(kind, "a face swept through is occupied"));
        }
        added.push((tri.face_class(t, y), !stable));
        map.push((Corner::new(plates[i], k_old), (i, fr.fv(t, y, x))));
    }
    // remaining corners of the new plates pair up by edge class
    let mut free: Vec<(usize, usize, usize)> = Vec::new();
    for (i, &(g, _)) in added.iter().enumerate() {
        let used = map[i].1 .1;
        for k in (0..3).filter(|&k| k != used) {
            free.push((fr.fe.edge_class[g][k], i, k));
        }
    }
    free.sort_unstable();
    let mut new_rods = Vec::new();
    let mut i = 0;
    while i < free.len() {
        let e = free[i].0;
        let group: Vec<_> = free[i..].iter().take_while(|x| x.0 == e).copied().collect();
        if group.len() != 2 {
            return Err(EngineError::pre(kind, "new plates do not pair up along edges"));
        }
        new_rods.push(((group[0].1, group[0].2), (group[1].1, group[1].2)));
        i += group.len();
    }
    let rw = Rewire {
        removed: plates,
        internal,
        added,
        map,
        new_rods,
    };
    rewire(fr, st, kind, rw)
}

fn other_of(pair: &[usize], y: usize) -> usize {
    if pair[0] == y {
        pair[1]
    } else {
        pair[0]
    }
}
