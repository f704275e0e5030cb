//! Boundary curves of a flattened surface on the cusp tori, the regions they cut
//! out, and the measurements of the disks among them.

use serde::Serialize;
use taut_core::tri::UnionFind;
use taut_core::veering::{side_id, tip_id};

use crate::frame::Frame;
use crate::state::{Corner, FlattenedSurface};

/// A conduit segment: the corner of plate `plate` at face-vertex `j`, run
/// along its side (`dir` = +1 from tail to head).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Seg {
    pub plate: usize,
    pub j: usize,
    pub dir: i8,
}

/// A junction segment: the rod arc from `from` to `to` seen at vertex `vertex`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Chord {
    pub vertex: usize,
    pub from: Corner,
    pub to: Corner,
}

#[derive(Clone, Debug, Serialize)]
pub struct Curve {
    pub cusp: usize,
    pub segs: Vec<Seg>,
    /// `chords[i]` follows `segs[i]`.
    pub chords: Vec<Chord>,
    pub slope: (i64, i64),
}

impl Curve {
    pub fn is_inessential(&self) -> bool {
        self.slope == (0, 0)
    }

    pub fn contains(&self, plate: usize, j: usize) -> bool {
        self.segs.iter().any(|s| s.plate == plate && s.j == j)
    }
}

fn seg_ends(fr: &Frame, st: &FlattenedSurface, s: Seg) -> (usize, usize, usize) {
    let f = st.plates[s.plate].face;
    let side = side_id(f, s.j);
    let sd = &fr.cx.sides[side];
    if s.dir > 0 {
        (sd.tail, sd.head, fr.ends[side][1])
    } else {
        (sd.head, sd.tail, fr.ends[side][0])
    }
}

/// Follow one segment through the junction at its forward end.
fn step(fr: &Frame, st: &FlattenedSurface, s: Seg) -> (Chord, Seg) {
    let (_, u, k_out) = seg_ends(fr, st, s);
    let from = Corner::new(s.plate, k_out);
    let to = st.link(from);
    let f2 = st.plates[to.plate].face;
    let j2 = fr.vertex_at_end(f2, to.k, u % 2);
    let side2 = side_id(f2, j2);
    let dir = if fr.ends[side2][0] == to.k { 1 } else { -1 };
    let next = Seg {
        plate: to.plate,
        j: j2,
        dir,
    };
    debug_assert_eq!(seg_ends(fr, st, next).0, u);
    (Chord { vertex: u, from, to }, next)
}

/// All boundary curves, each started at its least unvisited segment.
pub fn trace_curves(fr: &Frame, st: &FlattenedSurface) -> Vec<Curve> {
    let mut seen = vec![[false; 3]; st.plates.len()];
    let mut out = Vec::new();
    for p in 0..st.plates.len() {
        for j in 0..3 {
            if seen[p][j] {
                continue;
            }
            let start = Seg { plate: p, j, dir: 1 };
            let mut segs = Vec::new();
            let mut chords = Vec::new();
            let mut cur = start;
            loop {
                seen[cur.plate][cur.j] = true;
                segs.push(cur);
                let (ch, nxt) = step(fr, st, cur);
                chords.push(ch);
                cur = nxt;
                if cur.plate == start.plate && cur.j == start.j {
                    break;
                }
            }
            let mut chain = vec![0i64; fr.cx.sides.len()];
            for s in &segs {
                chain[side_id(st.plates[s.plate].face, s.j)] += i64::from(s.dir);
            }
            let cusp = fr.cx.vertex_cusp[chords[0].vertex];
            out.push(Curve {
                cusp,
                slope: fr.cx.primal_coords(cusp, &chain),
                segs,
                chords,
            });
        }
    }
    out
}

/// Which curve each segment lies on.
pub fn curve_index(st: &FlattenedSurface, curves: &[Curve]) -> Vec<[usize; 3]> {
    let mut idx = vec![[usize::MAX; 3]; st.plates.len()];
    for (i, c) in curves.iter().enumerate() {
        for s in &c.segs {
            idx[s.plate][s.j] = i;
        }
    }
    idx
}

/// The complement of a set of curves on one cusp torus, as a union of tips,
/// conduit strips and junction regions.
pub struct Regions {
    uf: UnionFind,
    n_tips: usize,
    strip_base: Vec<usize>,
    cuts: Vec<Vec<usize>>,
    chi: std::collections::HashMap<usize, i64>,
    cusp: usize,
}

impl Regions {
    pub fn build(fr: &Frame, st: &FlattenedSurface, curves: &[&Curve], cusp: usize) -> Regions {
        let n_tips = fr.cx.tips.len();
        let n_sides = fr.cx.sides.len();
        let mut cuts = vec![Vec::new(); n_sides];
        let mut chords_at: std::collections::HashMap<usize, Vec<Chord>> = std::collections::HashMap::new();
        for c in curves {
            debug_assert_eq!(c.cusp, cusp);
            for s in &c.segs {
                let pl = &st.plates[s.plate];
                cuts[side_id(pl.face, s.j)].push(pl.level);
            }
            for ch in &c.chords {
                chords_at.entry(ch.vertex).or_default().push(*ch);
            }
        }
        for v in &mut cuts {
            v.sort_unstable();
        }
        let mut strip_base = Vec::with_capacity(n_sides);
        let mut next = n_tips;
        for cs in &cuts {
            strip_base.push(next);
            next += cs.len() + 1;
        }
        // junction intervals come after the strips
        let mut interval_base = std::collections::HashMap::new();
        let mut keys_at = std::collections::HashMap::new();
        for &u in &fr.cusp_vertices[cusp] {
            let chords = chords_at.get(&u).map(Vec::as_slice).unwrap_or(&[]);
            let mut keys: Vec<(usize, usize)> = chords
                .iter()
                .flat_map(|ch| [st.slot_key(fr, ch.from), st.slot_key(fr, ch.to)])
                .collect();
            keys.sort_unstable();
            interval_base.insert(u, next);
            next += keys.len().max(1);
            keys_at.insert(u, keys);
        }
        let mut uf = UnionFind::new(next);
        let mut jreps = Vec::new();
        for &s in &fr.cusp_sides[cusp] {
            let m = cuts[s].len();
            uf.union(strip_base[s], fr.cx.sides[s].below);
            uf.union(strip_base[s] + m, fr.cx.sides[s].above);
        }
        for &u in &fr.cusp_vertices[cusp] {
            let keys = &keys_at[&u];
            let n = keys.len();
            let base = interval_base[&u];
            let iv = |t: usize| base + if n == 0 { 0 } else { t % n };
            let before = |k: (usize, usize)| keys.partition_point(|&x| x < k);
            let (e, end) = (u / 2, u % 2);
            let star = fr.tri.edge_star(e);
            for i in 0..star.faces.len() {
                let c = star.corners[i];
                let v = if end == 0 { c.a } else { c.b };
                uf.union(tip_id(c.tet, v), iv(before((i, 0))));
                let (f, k) = fr.fe.at[e][i];
                let j = fr.vertex_at_end(f, k, end);
                let s = side_id(f, j);
                let m = cuts[s].len();
                let b0 = before((i, 1));
                let side_a = fr.fe.pos[f][k].side_a;
                for r in 0..=m {
                    let off = if side_a { r } else { m - r };
                    uf.union(strip_base[s] + r, iv(b0 + off));
                }
            }
            let mut local = UnionFind::new(n.max(1));
            if let Some(chords) = chords_at.get(&u) {
                for ch in chords {
                    let a = keys.binary_search(&st.slot_key(fr, ch.from)).expect("chord end");
                    let b = keys.binary_search(&st.slot_key(fr, ch.to)).expect("chord end");
                    let (p, q) = (a.min(b), a.max(b));
                    uf.union(iv(p + 1), iv(q));
                    uf.union(iv(p), iv(q + 1));
                    local.union((p + 1) % n, q % n);
                    local.union(p % n, (q + 1) % n);
                }
            }
            let mut roots = std::collections::BTreeSet::new();
            for t in 0..n.max(1) {
                if roots.insert(local.find(t)) {
                    jreps.push(base + t);
                }
            }
        }
        let mut chi = std::collections::HashMap::new();
        for &t in &fr.cusp_tips[cusp] {
            *chi.entry(uf.find(t)).or_insert(0) += 1;
        }
        for &s in &fr.cusp_sides[cusp] {
            for r in 0..=cuts[s].len() {
                *chi.entry(uf.find(strip_base[s] + r)).or_insert(0) -= 1;
            }
        }
        for a in jreps {
            *chi.entry(uf.find(a)).or_insert(0) += 1;
        }
        Regions {
            uf,
            n_tips,
            strip_base,
            cuts,
            chi,
            cusp,
        }
    }

    pub fn cusp(&self) -> usize {
        self.cusp
    }

    /// Regions with their Euler characteristics, keyed by representative.
    pub fn chis(&self) -> Vec<(usize, i64)> {
        let mut v: Vec<(usize, i64)> = self.chi.iter().map(|(&a, &b)| (a, b)).collect();
        v.sort_unstable();
        v
    }

    pub fn tip_region(&mut self, tip: usize) -> usize {
        debug_assert!(tip < self.n_tips);
        self.uf.find(tip)
    }

    /// Region of the strip of side `s` containing a sheet at `level` that is not a cut.
    pub fn strip_region(&mut self, s: usize, level: usize) -> usize {
        let r = self.cuts[s].partition_point(|&x| x < level);
        self.uf.find(self.strip_base[s] + r)
    }

    /// Regions just below and above a cut at `level` of side `s`.
    pub fn cut_sides(&mut self, s: usize, level: usize) -> (usize, usize) {
        let r = self.cuts[s].partition_point(|&x| x < level);
        (self.uf.find(self.strip_base[s] + r), self.uf.find(self.strip_base[s] + r + 1))
    }
}

/// A cusp of a disk: a mixed junction segment that is convex for the disk.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DiskCusp {
    /// Index of the chord in the curve.
    pub chord: usize,
    pub edge: usize,
    /// Tetrahedron corners inside the turn.
    pub size: usize,
    /// No other sheets pass between the two ends.
    pub free: bool,
    /// For size 1: the tetrahedron inside the turn and its edge, with the
    /// vertex at this cusp first.
    pub sweep: Option<(usize, [usize; 2])>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlatDisk {
    pub curve: usize,
    pub cusp: usize,
    pub volume: usize,
    pub circumference: usize,
    pub width: i64,
    pub inward: bool,
    pub innermost: bool,
    pub tips: Vec<usize>,
    pub cusps: Vec<DiskCusp>,
}

/// Transverse pole coordinate walk: width of a closed curve on its cusp.
pub fn width(fr: &Frame, st: &FlattenedSurface, c: &Curve) -> i64 {
    let (mut x, mut lo, mut hi) = (0i64, 0i64, 0i64);
    for s in &c.segs {
        let side = side_id(st.plates[s.plate].face, s.j);
        let sd = &fr.cx.sides[side];
        if sd.pole {
            continue;
        }
        let (_, to, _) = seg_ends(fr, st, *s);
        let lad = &fr.cx.ladders[fr.cx.tip_ladder[sd.below]];
        let right = fr.cx.vertex_pole[to] == lad.right_pole;
        let dx = if right == lad.upward { 1 } else { -1 };
        x += dx;
        lo = lo.min(x);
        hi = hi.max(x);
    }
    hi - lo
}

/// The disk bounded by curve `ci`, if it bounds one.
pub fn disk_of(fr: &Frame, st: &FlattenedSurface, curves: &[Curve], ci: usize) -> Option<FlatDisk> {
    let c = &curves[ci];
    if !c.is_inessential() {
        return None;
    }
    let mut reg = Regions::build(fr, st, &[c], c.cusp);
    let chis = reg.chis();
    let (disk, _) = *chis.iter().find(|&&(_, x)| x == 1)?;
    debug_assert_eq!(chis.len(), 2, "an inessential curve splits its torus in two");
    let tips: Vec<usize> = fr.cusp_tips[c.cusp]
        .iter()
        .copied()
        .filter(|&t| reg.tip_region(t) == disk)
        .collect();
    let s0 = c.segs[0];
    let p0 = &st.plates[s0.plate];
    let (_, above) = reg.cut_sides(side_id(p0.face, s0.j), p0.level);
    let inward = (p0.sign > 0) == (above == disk);
    let mut innermost = true;
    'outer: for (i, o) in curves.iter().enumerate() {
        if i == ci || o.cusp != c.cusp {
            continue;
        }
        for s in &o.segs {
            let pl = &st.plates[s.plate];
            if reg.strip_region(side_id(pl.face, s.j), pl.level) == disk {
                innermost = false;
                break 'outer;
            }
        }
    }
    let cusps = disk_cusps(fr, st, c, &mut reg, disk);
    Some(FlatDisk {
        curve: ci,
        cusp: c.cusp,
        volume: tips.len(),
        circumference: c.segs.len(),
        width: width(fr, st, c),
        inward,
        innermost,
        tips,
        cusps,
    })
}

fn disk_cusps(fr: &Frame, st: &FlattenedSurface, c: &Curve, reg: &mut Regions, disk: usize) -> Vec<DiskCusp> {
    let mut out = Vec::new();
    for (i, ch) in c.chords.iter().enumerate() {
        if st.side_a(fr, ch.from) != st.side_a(fr, ch.to) {
            continue;
        }
        let (ka, kb) = (st.slot_key(fr, ch.from), st.slot_key(fr, ch.to));
        let (lo, hi) = (ka.min(kb), ka.max(kb));
        let e = st.edge_of(fr, ch.from);
        let star = fr.tri.edge_star(e);
        let end = ch.vertex % 2;
        // the disk lies inside the turn when the corner just past `lo` is in it;
        // with size 0 test the strip between the two sheets instead
        let size = hi.0 - lo.0;
        let inside = if size > 0 {
            let cn = star.corners[lo.0 + 1];
            let v = if end == 0 { cn.a } else { cn.b };
            reg.tip_region(tip_id(cn.tet, v)) == disk
        } else {
            let lower = if st.plates[ch.from.plate].level < st.plates[ch.to.plate].level {
                ch.from
            } else {
                ch.to
            };
            let pl = &st.plates[lower.plate];
            let j = fr.vertex_at_end(pl.face, lower.k, end);
            let (_, above) = reg.cut_sides(side_id(pl.face, j), pl.level);
            above == disk
        };
        if !inside {
            continue;
        }
        let free = {
            let mut between = 0;
            for (p, pl) in st.plates.iter().enumerate() {
                for k in 0..3 {
                    if fr.fe.edge_class[pl.face][k] == e {
                        let key = st.slot_key(fr, Corner::new(p, k));
                        if key > lo && key < hi {
                            between += 1;
                        }
                    }
                }
            }
            between == 0
        };
        out.push(DiskCusp {
            chord: i,
            edge: e,
            size,
            free,
            sweep: (size == 1).then(|| {
                let cn = star.corners[lo.0 + 1];
                if end == 0 {
                    (cn.tet, [cn.a, cn.b])
                } else {
                    (cn.tet, [cn.b, cn.a])
                }
            }),
        });
    }
    out
}

/// Disks of every inessential curve.
pub fn disks(fr: &Frame, st: &FlattenedSurface, curves: &[Curve]) -> Vec<FlatDisk> {
    (0..curves.len()).filter_map(|i| disk_of(fr, st, curves, i)).collect()
}
