//! The bigon hierarchy: bigon, efficient and excellent positions, with a
//! witness whenever a level fails.

use serde::{Deserialize, Serialize};
use taut_core::dual::{classify_loop, LoopStep};
use taut_core::tri::UnionFind;

use crate::boundary::{disks, trace_curves, Curve, FlatDisk};
use crate::frame::Frame;
use crate::patches::{patches, PatchKind, Track};
use crate::state::{Corner, FlattenedSurface, PlateRef};

/// The strongest property that holds, in increasing order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BigonLevel {
    Fails,
    Bigon,
    Efficient,
    Excellent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegKind {
    Ladderpole,
    Stable,
    Unstable,
    /// Not an annulus of any of the three kinds.
    Other,
}

/// A component of the union of negative plates and negative rods.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NegComponent {
    pub plates: Vec<PlateRef>,
    pub kind: NegKind,
    /// A cycle of plates through the component, when one was found.
    pub core: Vec<PlateRef>,
}

/// A run of same-sign ladderpole segments flanked by segments of the other sign.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Kink {
    pub curve: usize,
    /// Index of the first segment of the run in the curve.
    pub start: usize,
    pub len: usize,
    pub sign: i8,
    /// Whether a hinge tetrahedron has a tip inside the disk in a ladder next to the kink.
    pub shadow_has_hinge: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Witness {
    NullHomologousComponent { plates: Vec<PlateRef> },
    PositiveIndexPatch { track: String, curve: usize, index: i64 },
    NegativeSwitchOffBigon { track: String, curve: usize },
    Backtracking { face: usize, level: usize, k: usize },
    Kink(Kink),
    NegComponent { plates: Vec<PlateRef> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusReport {
    pub level: BigonLevel,
    /// First failure at the next level up.
    pub witness: Option<Witness>,
    pub kinks: Vec<Kink>,
    pub neg: Vec<NegComponent>,
}

fn track_name(t: Track) -> String {
    match t {
        Track::Stable => "stable".into(),
        Track::Unstable => "unstable".into(),
    }
}

fn bigon_witness(fr: &Frame, st: &FlattenedSurface, curves: &[Curve]) -> Option<Witness> {
    // components of the surface and their classes
    let mut uf = UnionFind::new(st.area());
    for (p, pl) in st.plates.iter().enumerate() {
        for c in pl.links {
            uf.union(p, c.plate);
        }
    }
    let mut comps: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for p in 0..st.area() {
        comps.entry(uf.find(p)).or_default().push(p);
    }
    for members in comps.values() {
        let mut w = vec![num_bigint::BigInt::from(0); fr.n_faces()];
        for &p in members {
            w[st.plates[p].face] += st.plates[p].sign as i64;
        }
        if fr.fh.h1.functional_of(&w).iter().all(|x| x == &num_bigint::BigInt::from(0)) {
            return Some(Witness::NullHomologousComponent {
                plates: members.iter().map(|&p| st.plate_ref(p)).collect(),
            });
        }
    }
    for track in [Track::Stable, Track::Unstable] {
        for p in patches(fr, st, curves, track) {
            if p.index > 0 {
                return Some(Witness::PositiveIndexPatch {
                    track: track_name(track),
                    curve: p.curve,
                    index: p.index,
                });
            }
            if p.negative_switches > 0 && !(p.kind == PatchKind::Disk && p.switches == 2) {
                return Some(Witness::NegativeSwitchOffBigon {
                    track: track_name(track),
                    curve: p.curve,
                });
            }
        }
    }
    None
}

/// Face-move sites: adjacent plates of one face joined at the same corner.
pub fn backtracking(st: &FlattenedSurface) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for (f, stack) in st.stacks.iter().enumerate() {
        for l in 0..stack.len().saturating_sub(1) {
            for k in 0..3 {
                if st.link(Corner::new(stack[l], k)) == Corner::new(stack[l + 1], k) {
                    out.push((f, l, k));
                }
            }
        }
    }
    out
}

/// Kinks on the boundaries of flat disks.
pub fn kinks(fr: &Frame, st: &FlattenedSurface, curves: &[Curve], ds: &[FlatDisk]) -> Vec<Kink> {
    let mut out = Vec::new();
    for d in ds {
        let c = &curves[d.curve];
        let n = c.segs.len();
        let sign = |i: usize| st.plates[c.segs[i % n].plate].sign;
        let pole = |i: usize| {
            let s = c.segs[i % n];
            fr.cx.sides[3 * st.plates[s.plate].face + s.j].pole
        };
        // start at a segment that ends a run, so runs never wrap
        let Some(first) = (0..n).find(|&i| !(pole(i + 1) && sign(i + 1) == sign(i) && pole(i))) else {
            continue;
        };
        let mut i = first + 1;
        while i < first + 1 + n {
            if !pole(i) {
                i += 1;
                continue;
            }
            let s = sign(i);
            let mut len = 0;
            while len < n && pole(i + len) && sign(i + len) == s {
                len += 1;
            }
            let before = sign(i + n - 1);
            let after = sign(i + len);
            if len < n && before == after && before != s {
                let ladders: Vec<usize> = (i..i + len)
                    .flat_map(|x| {
                        let sg = c.segs[x % n];
                        let sd = &fr.cx.sides[3 * st.plates[sg.plate].face + sg.j];
                        [fr.cx.tip_ladder[sd.below], fr.cx.tip_ladder[sd.above]]
                    })
                    .collect();
                let hinge = d
                    .tips
                    .iter()
                    .any(|&t| ladders.contains(&fr.cx.tip_ladder[t]) && fr.vd.hinge[fr.cx.tips[t].tet]);
                out.push(Kink {
                    curve: d.curve,
                    start: i % n,
                    len,
                    sign: s,
                    shadow_has_hinge: hinge,
                });
            }
            i += len.max(1);
        }
    }
    out
}

/// Components of the negative region, classified.
pub fn neg_components(fr: &Frame, st: &FlattenedSurface, curves: &[Curve]) -> Vec<NegComponent> {
    let neg: Vec<usize> = (0..st.area()).filter(|&p| st.plates[p].sign < 0).collect();
    let mut uf = UnionFind::new(st.area());
    for &p in &neg {
        for c in st.plates[p].links {
            if st.plates[c.plate].sign < 0 {
                uf.union(p, c.plate);
            }
        }
    }
    let mut comps: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for &p in &neg {
        comps.entry(uf.find(p)).or_default().push(p);
    }
    comps
        .into_values()
        .map(|members| classify_component(fr, st, curves, &members))
        .collect()
}

fn classify_component(fr: &Frame, st: &FlattenedSurface, curves: &[Curve], members: &[usize]) -> NegComponent {
    let refs: Vec<PlateRef> = members.iter().map(|&p| st.plate_ref(p)).collect();
    let inside = |p: usize| members.binary_search(&p).is_ok();
    let ladderpole = curves.iter().any(|c| {
        c.segs
            .iter()
            .all(|s| inside(s.plate) && fr.cx.sides[3 * st.plates[s.plate].face + s.j].pole)
    });
    if ladderpole {
        return NegComponent {
            plates: refs,
            kind: NegKind::Ladderpole,
            core: Vec::new(),
        };
    }
    // walk the negative rods looking for a cycle that collapses to a normal loop
    let mut best: Option<(NegKind, Vec<usize>)> = None;
    for cycle in plate_cycles(st, members, 2 * members.len() + 2) {
        let n = cycle.len();
        let steps: Vec<LoopStep> = (0..n)
            .map(|i| {
                let (p, exit, _) = cycle[i];
                let entry = cycle[(i + n - 1) % n].2;
                LoopStep {
                    face: st.plates[p].face,
                    entry,
                    exit,
                }
            })
            .collect();
        if let Some(nl) = classify_loop(&fr.fe, &steps) {
            let kind = if nl.stable {
                NegKind::Stable
            } else if nl.unstable {
                NegKind::Unstable
            } else {
                continue;
            };
            best = Some((kind, cycle.iter().map(|x| x.0).collect()));
            break;
        }
    }
    match best {
        Some((kind, core)) => NegComponent {
            plates: refs,
            kind,
            core: core.into_iter().map(|p| st.plate_ref(p)).collect(),
        },
        None => NegComponent {
            plates: refs,
            kind: NegKind::Other,
            core: Vec::new(),
        },
    }
}

/// Simple cycles in the rod graph of a plate set, as (plate, exit corner,
/// entry corner of the next plate). Bounded in number.
fn plate_cycles(st: &FlattenedSurface, members: &[usize], cap: usize) -> Vec<Vec<(usize, usize, usize)>> {
    let inside = |p: usize| members.binary_search(&p).is_ok();
    let mut out = Vec::new();
    let Some(&root) = members.first() else {
        return out;
    };
    for start in members.iter().copied().filter(|&s| s >= root) {
        let mut path: Vec<(usize, usize, usize)> = Vec::new();
        let mut on_path = vec![false; st.area()];
        // depth-first over corners
        #[allow(clippy::too_many_arguments)]
        fn dfs(
            st: &FlattenedSurface,
            inside: &dyn Fn(usize) -> bool,
            start: usize,
            cur: usize,
            entry: usize,
            path: &mut Vec<(usize, usize, usize)>,
            on_path: &mut Vec<bool>,
            out: &mut Vec<Vec<(usize, usize, usize)>>,
            cap: usize,
        ) {
            if out.len() >= cap || path.len() > 64 {
                return;
            }
            for exit in 0..3 {
                if exit == entry {
                    continue;
                }
                let o = st.link(Corner::new(cur, exit));
                if !inside(o.plate) || o.plate < start {
                    continue;
                }
                path.push((cur, exit, o.k));
                if o.plate == start {
                    if path.len() >= 2 || o.k != exit {
                        out.push(path.clone());
                    }
                } else if !on_path[o.plate] {
                    on_path[o.plate] = true;
                    dfs(st, inside, start, o.plate, o.k, path, on_path, out, cap);
                    on_path[o.plate] = false;
                }
                path.pop();
            }
        }
        on_path[start] = true;
        dfs(st, &inside, start, start, usize::MAX, &mut path, &mut on_path, &mut out, cap);
        if out.len() >= cap {
            break;
        }
    }
    // the entry of a cycle's first plate is the last step's landing corner
    out.retain(|c| c.first().map(|f| f.1) != c.last().map(|l| l.2));
    out
}

/// Evaluate the hierarchy.
pub fn bigon_status(fr: &Frame, st: &FlattenedSurface) -> StatusReport {
    let curves = trace_curves(fr, st);
    status_with(fr, st, &curves)
}

pub fn status_with(fr: &Frame, st: &FlattenedSurface, curves: &[Curve]) -> StatusReport {
    let mut report = StatusReport {
        level: BigonLevel::Fails,
        witness: None,
        kinks: Vec::new(),
        neg: Vec::new(),
    };
    if let Some(w) = bigon_witness(fr, st, curves) {
        report.witness = Some(w);
        return report;
    }
    report.level = BigonLevel::Bigon;
    if let Some(&(face, level, k)) = backtracking(st).first() {
        report.witness = Some(Witness::Backtracking { face, level, k });
        return report;
    }
    let ds = disks(fr, st, curves);
    report.kinks = kinks(fr, st, curves, &ds);
    if let Some(k) = report.kinks.first() {
        report.witness = Some(Witness::Kink(k.clone()));
        return report;
    }
    report.level = BigonLevel::Efficient;
    report.neg = neg_components(fr, st, curves);
    if let Some(c) = report.neg.iter().find(|c| c.kind == NegKind::Other) {
        report.witness = Some(Witness::NegComponent { plates: c.plates.clone() });
        return report;
    }
    report.level = BigonLevel::Excellent;
    report
}
