//! Surfaces carried by the 2-skeleton: branch equations, boundary multicurves
//! on the cusp tori, Euler characteristic, and a solver for a given class.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::cones::{self, dot, EulerClass, HomologyDirections};
use crate::dual::FaceEdges;
use crate::homology::{FilledHomology, Slope};
use crate::perm::face_vertices;
use crate::tri::TautTriangulation;
use crate::veering::{side_id, CuspComplex};

pub type WeightVector = Vec<u64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CarriedError {
    #[error("expected {expected} weights, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("branch equation fails at edge {0}")]
    BranchEquation(usize),
    #[error("boundary on cusp {cusp} is not cappable: {reason}")]
    NotCappable { cusp: usize, reason: String },
    #[error("class {0:?} is outside the dual cone")]
    ClassOutsideCone(Vec<BigInt>),
    #[error("smallest representative needs total weight {needed}, budget is {budget}")]
    NotFoundWithinBudget { needed: u64, budget: u64 },
    #[error("weight overflow")]
    Overflow,
}

/// Rows are edges, columns faces: +1 per side-A occurrence, −1 per side-B.
pub fn branch_matrix(tri: &TautTriangulation) -> Vec<Vec<i64>> {
    let mut m = vec![vec![0i64; tri.n_faces()]; tri.n_edges()];
    for star in tri.stars() {
        for &f in star.a_faces() {
            m[star.edge][f] += 1;
        }
        for &f in star.b_faces() {
            m[star.edge][f] -= 1;
        }
    }
    m
}

/// First edge whose branch equation fails.
pub fn branch_violation(tri: &TautTriangulation, w: &[u64]) -> Option<usize> {
    tri.stars().iter().find_map(|star| {
        let a: u64 = star.a_faces().iter().map(|&f| w[f]).sum();
        let b: u64 = star.b_faces().iter().map(|&f| w[f]).sum();
        (a != b).then_some(star.edge)
    })
}

/// The boundary train track: for each cusp side, the face-edges at its tail and head.
#[derive(Clone, Debug)]
pub struct BoundaryTrack {
    pub fe: FaceEdges,
    pub ends: Vec<[usize; 2]>,
}

impl BoundaryTrack {
    pub fn new(tri: &TautTriangulation, cx: &CuspComplex) -> BoundaryTrack {
        let fe = FaceEdges::new(tri);
        let ends = (0..cx.sides.len())
            .map(|s| {
                let side = &cx.sides[s];
                let (_, fb) = tri.face_below(side.face);
                let fv = face_vertices(fb);
                let tip = &cx.tips[side.below];
                let m = tip.sides.iter().position(|&x| x == s).expect("side on its tip");
                let idx = |label: usize| fv.iter().position(|&y| y == label).expect("label on face");
                // Seen from below, the head sits on edge (x, labels[m+1]).
                let tail = idx(tip.labels[(m + 1) % 3]);
                let head = idx(tip.labels[(m + 2) % 3]);
                debug_assert_eq!(fe.edge_class[side.face][tail], side.tail / 2);
                debug_assert_eq!(fe.edge_class[side.face][head], side.head / 2);
                [tail, head]
            })
            .collect();
        BoundaryTrack { fe, ends }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BoundaryKind {
    Empty,
    LadderpoleNulhomologous,
    Meridional,
    /// Allowed only on unfilled cusps.
    Other,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryCurve {
    /// (side, level) arcs in order, each traversed tail to head.
    pub arcs: Vec<(usize, u64)>,
    pub slope: (i64, i64),
    pub upward_rungs: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspBoundary {
    pub cusp: usize,
    pub kind: BoundaryKind,
    pub curves: Vec<BoundaryCurve>,
    pub total: (i64, i64),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CellCounts {
    pub vertices: u64,
    pub interior_edges: u64,
    pub boundary_edges: u64,
    pub hexagons: u64,
}

impl CellCounts {
    pub fn chi(&self) -> i64 {
        self.vertices as i64 - self.interior_edges as i64 - self.boundary_edges as i64 + self.hexagons as i64
    }
}

/// Stack offsets of sheets along each side of each edge star.
struct Stacks {
    // [edge][side: 0 = A, 1 = B] prefix sums by height
    pre: Vec<[Vec<u64>; 2]>,
}

impl Stacks {
    fn new(tri: &TautTriangulation, fe: &FaceEdges, w: &[u64]) -> Stacks {
        let pre = (0..tri.n_edges())
            .map(|e| {
                let star = tri.edge_star(e);
                let build = |side_a: bool, len: usize| {
                    let mut p = vec![0u64];
                    for h in 0..len {
                        let (f, _) = fe.on_side(tri, e, side_a, h);
                        p.push(p[h] + w[f]);
                    }
                    p
                };
                [build(true, star.above), build(false, star.faces.len() - star.above)]
            })
            .collect();
        Stacks { pre }
    }

    fn height_of(&self, e: usize, side_a: bool, level: u64) -> (usize, u64) {
        let p = &self.pre[e][usize::from(!side_a)];
        let h = p.partition_point(|&x| x <= level) - 1;
        (h, level - p[h])
    }
}

/// Follow an arc across the cusp vertex at its head, matching sheets by stack level.
fn next_arc(
    tri: &TautTriangulation,
    cx: &CuspComplex,
    track: &BoundaryTrack,
    stacks: &Stacks,
    (s, level): (usize, u64),
) -> ((usize, u64), (usize, u64)) {
    let side = &cx.sides[s];
    let p = track.fe.pos[side.face][track.ends[s][1]];
    let stack_level = stacks.pre[p.edge][usize::from(!p.side_a)][p.height] + level;
    let (h, l) = stacks.height_of(p.edge, !p.side_a, stack_level);
    let (f, k) = track.fe.on_side(tri, p.edge, !p.side_a, h);
    let j = (0..3)
        .find(|&j| j != k && track.ends[side_id(f, j)][0] == k)
        .expect("outgoing side");
    let s2 = side_id(f, j);
    debug_assert_eq!(cx.sides[s2].tail, side.head);
    ((s2, l), (side.head, stack_level))
}

/// Boundary multicurves (unclassified) and cell counts of the punctured surface.
pub fn trace_boundary(
    tri: &TautTriangulation,
    cx: &CuspComplex,
    track: &BoundaryTrack,
    w: &[u64],
) -> (Vec<Vec<BoundaryCurve>>, CellCounts) {
    let stacks = Stacks::new(tri, &track.fe, w);
    let mut seen: Vec<Vec<bool>> = cx.sides.iter().map(|sd| vec![false; w[sd.face] as usize]).collect();
    let mut junctions = BTreeSet::new();
    let mut curves = vec![Vec::new(); tri.n_cusps()];
    let mut counts = CellCounts {
        hexagons: w.iter().sum(),
        ..CellCounts::default()
    };
    for s in 0..cx.sides.len() {
        for l0 in 0..w[cx.sides[s].face] {
            if seen[s][l0 as usize] {
                continue;
            }
            let mut arcs = Vec::new();
            let mut cur = (s, l0);
            loop {
                seen[cur.0][cur.1 as usize] = true;
                arcs.push(cur);
                let (nxt, junction) = next_arc(tri, cx, track, &stacks, cur);
                junctions.insert(junction);
                cur = nxt;
                if cur == (s, l0) {
                    break;
                }
            }
            counts.boundary_edges += arcs.len() as u64;
            let mut chain = vec![0i64; cx.sides.len()];
            let mut upward_rungs = 0;
            for &(a, _) in &arcs {
                chain[a] += 1;
                let sd = &cx.sides[a];
                if !sd.pole && cx.ladders[cx.tip_ladder[sd.below]].upward {
                    upward_rungs += 1;
                }
            }
            let cusp = cx.vertex_cusp[cx.sides[s].tail];
            curves[cusp].push(BoundaryCurve {
                slope: cx.primal_coords(cusp, &chain),
                arcs,
                upward_rungs,
            });
        }
    }
    counts.vertices = junctions.len() as u64;
    // Each matched pair of sheets across an edge is one interior edge.
    counts.interior_edges = stacks.pre.iter().map(|p| *p[0].last().unwrap()).sum();
    (curves, counts)
}

pub fn classify(curves: &[BoundaryCurve], meridian: Option<Slope>) -> BoundaryKind {
    if curves.is_empty() {
        return BoundaryKind::Empty;
    }
    let total = curves.iter().fold((0, 0), |t, c| (t.0 + c.slope.0, t.1 + c.slope.1));
    if total == (0, 0) && curves.iter().all(|c| c.slope.0 == 0 && c.slope.1.abs() == 1) {
        return BoundaryKind::LadderpoleNulhomologous;
    }
    if let Some(m) = meridian {
        if curves.iter().all(|c| c.slope == (m.p, m.q) || c.slope == (-m.p, -m.q)) {
            return BoundaryKind::Meridional;
        }
    }
    BoundaryKind::Other
}

#[derive(Clone, Debug, Serialize)]
pub struct Cap {
    pub cusp: usize,
    pub curve: usize,
    pub rungs: usize,
    pub prongs: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormCertificate {
    pub alpha: Vec<BigInt>,
    pub in_dual_cone: bool,
    pub minus_chi: i64,
    /// ⟨−e, α⟩, absent in unfilled mode.
    pub euler_pairing: Option<BigRational>,
    pub norm_equals_euler_pairing: Option<bool>,
    pub cellular_matches_weights: bool,
    pub caps_admissible: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CarriedSurface {
    pub weights: WeightVector,
    pub boundary: Vec<CuspBoundary>,
    pub cells: CellCounts,
    pub chi_unfilled: i64,
    pub caps: Vec<Cap>,
    pub chi_filled: i64,
    pub h2_class: Vec<BigInt>,
    pub certificate: Option<NormCertificate>,
}

impl CarriedSurface {
    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }
}

fn check_len(tri: &TautTriangulation, w: &[u64]) -> Result<(), CarriedError> {
    if w.len() != tri.n_faces() {
        return Err(CarriedError::Dimension {
            expected: tri.n_faces(),
            got: w.len(),
        });
    }
    Ok(())
}

/// Build the carried surface of `w`, classifying its boundary and capping
/// meridional curves on filled cusps.
pub fn carried_surface(
    tri: &TautTriangulation,
    cx: &CuspComplex,
    fh: &FilledHomology,
    w: &[u64],
) -> Result<CarriedSurface, CarriedError> {
    check_len(tri, w)?;
    if let Some(e) = branch_violation(tri, w) {
        return Err(CarriedError::BranchEquation(e));
    }
    let track = BoundaryTrack::new(tri, cx);
    let (curves, cells) = trace_boundary(tri, cx, &track, w);
    let mut boundary = Vec::new();
    let mut caps = Vec::new();
    for (cusp, cs) in curves.into_iter().enumerate() {
        let meridian = fh.fillings.get(&cusp).copied();
        let kind = classify(&cs, meridian);
        if meridian.is_some() && kind == BoundaryKind::Other {
            let slopes: Vec<String> = cs.iter().map(|c| format!("{}/{}", c.slope.0, c.slope.1)).collect();
            return Err(CarriedError::NotCappable {
                cusp,
                reason: format!("curve slopes {}", slopes.join(", ")),
            });
        }
        if kind == BoundaryKind::Meridional {
            for (i, c) in cs.iter().enumerate() {
                caps.push(Cap {
                    cusp,
                    curve: i,
                    rungs: c.upward_rungs,
                    prongs: fh.prongs[&cusp],
                });
            }
        }
        let total = cs.iter().fold((0, 0), |t, c| (t.0 + c.slope.0, t.1 + c.slope.1));
        boundary.push(CuspBoundary {
            cusp,
            kind,
            curves: cs,
            total,
        });
    }
    let chi_unfilled = cells.chi();
    let wb: Vec<BigInt> = w.iter().map(|&x| BigInt::from(x)).collect();
    Ok(CarriedSurface {
        weights: w.to_vec(),
        boundary,
        cells,
        chi_unfilled,
        chi_filled: chi_unfilled + caps.len() as i64,
        caps,
        h2_class: fh.h1.functional_of(&wb),
        certificate: None,
    })
}

/// The functional of a carried weight vector on the (filled) first homology.
pub fn class_of_carried(
    tri: &TautTriangulation,
    cx: &CuspComplex,
    fh: &FilledHomology,
    w: &[u64],
) -> Result<Vec<BigInt>, CarriedError> {
    Ok(carried_surface(tri, cx, fh, w)?.h2_class)
}

/// Default weight budget: 8 × the largest pairing of `alpha` with the cycle
/// classes and with the class of the cycle through every face. The latter
/// pairing is exactly the total weight of any carried representative.
pub fn default_budget(tri: &TautTriangulation, fh: &FilledHomology, dirs: &HomologyDirections, alpha: &[BigInt]) -> u64 {
    let all_faces = fh.h1.class_of_i64(&vec![1; tri.n_faces()]).free;
    dirs.cycle_classes
        .iter()
        .chain(std::iter::once(&all_faces))
        .map(|g| dot(g, alpha))
        .max()
        .and_then(|m| m.to_u64())
        .unwrap_or(0)
        .saturating_mul(8)
}

const INF: i64 = i64::MAX / 4;

/// Insert the constraint x_v − x_u ≤ c into an all-pairs distance table.
fn relax(d: &mut [Vec<i64>], u: usize, v: usize, c: i64) {
    let n = d.len();
    for i in 0..n {
        if d[i][u] >= INF {
            continue;
        }
        for j in 0..n {
            if d[v][j] >= INF {
                continue;
            }
            let via = d[i][u] + c + d[v][j];
            if via < d[i][j] {
                d[i][j] = via;
            }
        }
    }
}

/// Lexicographically least nonnegative `w0 + δg`, or `None` if none exists.
/// Every such vector has the same total weight since each tetrahedron has
/// two faces below and two above, so lexicographic order alone decides.
pub fn lex_min_representative(tri: &TautTriangulation, w0: &[i64]) -> Option<Vec<i64>> {
    let n = tri.n_tets();
    // Potentials g with w_F = w0_F + g(above) − g(below) ≥ 0, i.e. g(below) − g(above) ≤ w0_F.
    let mut d = vec![vec![INF; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0;
    }
    for (f, &c) in w0.iter().enumerate() {
        let (a, b) = (tri.tet_above(f), tri.tet_below(f));
        relax(&mut d, a, b, c);
    }
    if (0..n).any(|v| d[v][v] < 0) {
        return None;
    }
    let mut w = vec![0i64; w0.len()];
    for f in 0..w0.len() {
        let (a, b) = (tri.tet_above(f), tri.tet_below(f));
        // max of g(below) − g(above) is the distance a → b
        let m = d[a][b];
        w[f] = w0[f] - m;
        relax(&mut d, b, a, -m);
    }
    Some(w)
}

/// Find the least carried representative of `alpha`.
pub fn solve_carried(
    tri: &TautTriangulation,
    cx: &CuspComplex,
    fh: &FilledHomology,
    dirs: &HomologyDirections,
    euler: Option<&EulerClass>,
    alpha: &[BigInt],
    budget: Option<u64>,
) -> Result<CarriedSurface, CarriedError> {
    if alpha.len() != fh.h1.rank {
        return Err(CarriedError::Dimension {
            expected: fh.h1.rank,
            got: alpha.len(),
        });
    }
    if dirs.cone.spanning_set().iter().any(|g| dot(g, alpha).is_negative()) {
        return Err(CarriedError::ClassOutsideCone(alpha.to_vec()));
    }
    let budget = budget.unwrap_or_else(|| default_budget(tri, fh, dirs, alpha));
    let mut w0 = vec![BigInt::zero(); tri.n_faces()];
    for (a, row) in alpha.iter().zip(fh.h1.cocycles()) {
        for (x, r) in w0.iter_mut().zip(row) {
            *x += a * r;
        }
    }
    let w0: Vec<i64> = w0.iter().map(|x| x.to_i64()).collect::<Option<_>>().ok_or(CarriedError::Overflow)?;
    let w = lex_min_representative(tri, &w0).ok_or_else(|| CarriedError::ClassOutsideCone(alpha.to_vec()))?;
    let w: Vec<u64> = w.iter().map(|&x| u64::try_from(x).expect("nonnegative")).collect();
    let needed: u64 = w.iter().sum();
    if needed > budget {
        return Err(CarriedError::NotFoundWithinBudget { needed, budget });
    }
    let mut s = carried_surface(tri, cx, fh, &w)?;
    debug_assert_eq!(s.h2_class, alpha);
    s.certificate = Some(certify(&s, dirs, euler));
    Ok(s)
}

pub fn certify(s: &CarriedSurface, dirs: &HomologyDirections, euler: Option<&EulerClass>) -> NormCertificate {
    let minus_chi = -s.chi_filled;
    let euler_pairing = euler.map(|e| cones::norm_value(e, &s.h2_class));
    let total: i64 = s.weights.iter().map(|&x| x as i64).sum();
    NormCertificate {
        alpha: s.h2_class.clone(),
        in_dual_cone: dirs.cone.spanning_set().iter().all(|g| !dot(g, &s.h2_class).is_negative()),
        minus_chi,
        norm_equals_euler_pairing: euler_pairing
            .as_ref()
            .map(|x| *x == BigRational::from_integer(BigInt::from(minus_chi))),
        euler_pairing,
        cellular_matches_weights: 2 * s.chi_unfilled == -total,
        caps_admissible: s.caps.iter().all(|c| c.rungs as u64 == c.prongs),
    }
}
