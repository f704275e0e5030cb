//! Exact polyhedral cones, the cone of homology directions, its dual, the
//! Euler class and the norm on the dual cone.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::dual::DualGraph;
use crate::homology::FilledHomology;
use crate::snf;
use crate::tri::TautTriangulation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConeError {
    #[error("more than {0} simple cycles in the dual graph")]
    TooManyCycles(usize),
    #[error("the Euler class needs every cusp filled")]
    UnfilledMode,
    #[error("class {0:?} is outside the dual cone")]
    ClassOutsideCone(Vec<BigInt>),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("double dual does not reproduce the cone")]
    DualityFailure,
}

pub type IVec = Vec<BigInt>;

pub fn ivec(v: &[i64]) -> IVec {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

pub fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Divide by the gcd of the entries (zero stays zero).
pub fn primitive(v: &[BigInt]) -> IVec {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v.to_vec();
    }
    v.iter().map(|x| x / &g).collect()
}

fn is_zero_vec(v: &[BigInt]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Rank of a set of integer vectors.
pub fn rank(rows: &[IVec], dim: usize) -> usize {
    if rows.is_empty() || dim == 0 {
        return 0;
    }
    snf::smith(&rows.to_vec(), rows.len(), dim).rank()
}

/// Lineality basis and extreme rays of `{y : a·y >= 0 for every row a}`.
pub fn double_description(dim: usize, constraints: &[IVec]) -> (Vec<IVec>, Vec<IVec>) {
    let mut lin: Vec<IVec> = (0..dim)
        .map(|i| (0..dim).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    let mut rays: Vec<IVec> = Vec::new();
    let mut seen: Vec<IVec> = Vec::new();
    for a in constraints {
        if is_zero_vec(a) {
            continue;
        }
        seen.push(a.clone());
        if let Some(k) = lin.iter().position(|l| !dot(a, l).is_zero()) {
            let mut l0 = lin.remove(k);
            if dot(a, &l0).is_negative() {
                l0 = l0.iter().map(|x| -x).collect();
            }
            let s0 = dot(a, &l0);
            let project = |v: &IVec| -> IVec {
                let s = dot(a, v);
                primitive(&v.iter().zip(&l0).map(|(x, y)| &s0 * x - &s * y).collect::<Vec<_>>())
            };
            lin = lin.iter().map(project).collect();
            rays = rays.iter().map(project).collect();
            rays.push(primitive(&l0));
            rays = dedup(rays);
            continue;
        }
        let vals: Vec<BigInt> = rays.iter().map(|r| dot(a, r)).collect();
        let target = dim - lin.len();
        let mut next: Vec<IVec> = Vec::new();
        for (r, v) in rays.iter().zip(&vals) {
            if !v.is_negative() {
                next.push(r.clone());
            }
        }
        for (i, vp) in vals.iter().enumerate() {
            if !vp.is_positive() {
                continue;
            }
            for (j, vn) in vals.iter().enumerate() {
                if !vn.is_negative() {
                    continue;
                }
                if adjacent(&rays[i], &rays[j], &seen[..seen.len() - 1], dim, target) {
                    let comb: IVec = rays[i].iter().zip(&rays[j]).map(|(p, n)| vp * n - vn * p).collect();
                    next.push(primitive(&comb));
                }
            }
        }
        rays = dedup(next);
    }
    (lin, rays)
}

fn adjacent(r1: &IVec, r2: &IVec, constraints: &[IVec], dim: usize, target: usize) -> bool {
    let common: Vec<IVec> = constraints
        .iter()
        .filter(|a| dot(a, r1).is_zero() && dot(a, r2).is_zero())
        .cloned()
        .collect();
    target >= 2 && rank(&common, dim) == target - 2
}

fn dedup(v: Vec<IVec>) -> Vec<IVec> {
    let set: BTreeSet<IVec> = v.into_iter().filter(|x| !is_zero_vec(x)).collect();
    set.into_iter().collect()
}

/// A polyhedral cone held in both descriptions. `generators` are extreme rays
/// modulo lineality, `lineality` a basis of the largest subspace in the cone;
/// `facets` are functionals `f` with `f·x >= 0` on the cone (equations appear
/// as opposite pairs).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RationalCone {
    pub ambient_dim: usize,
    pub generators: Vec<IVec>,
    pub lineality: Vec<IVec>,
    pub facets: Vec<IVec>,
    pub lineality_dim: usize,
}

impl RationalCone {
    /// The cone spanned by `gens` (nonnegative combinations).
    pub fn from_generators(dim: usize, gens: &[IVec]) -> RationalCone {
        let gens = dedup(gens.iter().map(|g| primitive(g)).collect());
        // Dual as {y : g·y >= 0}, then back.
        let (dlin, drays) = double_description(dim, &gens);
        let facets = halfspaces(&dlin, &drays);
        let (lin, rays) = double_description(dim, &facets);
        RationalCone {
            ambient_dim: dim,
            lineality_dim: lin.len(),
            generators: rays,
            lineality: lin,
            facets,
        }
    }

    /// The cone `{x : f·x >= 0}` for the given functionals.
    pub fn from_facets(dim: usize, facets: &[IVec]) -> RationalCone {
        let (lin, rays) = double_description(dim, facets);
        let mut gens = rays.clone();
        for l in &lin {
            gens.push(l.clone());
            gens.push(l.iter().map(|x| -x).collect());
        }
        RationalCone::from_generators(dim, &gens)
    }

    /// All generators including both signs of the lineality basis.
    pub fn spanning_set(&self) -> Vec<IVec> {
        halfspaces(&self.lineality, &self.generators)
    }

    pub fn dim(&self) -> usize {
        rank(&self.spanning_set(), self.ambient_dim)
    }

    pub fn is_zero(&self) -> bool {
        self.generators.is_empty() && self.lineality.is_empty()
    }

    pub fn contains_by_facets(&self, x: &[BigInt]) -> bool {
        self.facets.iter().all(|f| !dot(f, x).is_negative())
    }

    /// Membership by an exact linear program over the spanning set.
    pub fn contains_by_lp(&self, x: &[BigInt]) -> bool {
        in_cone(&self.spanning_set(), x, self.ambient_dim)
    }

    pub fn dual(&self) -> RationalCone {
        RationalCone::from_generators(self.ambient_dim, &self.facets)
    }
}

fn halfspaces(lin: &[IVec], rays: &[IVec]) -> Vec<IVec> {
    let mut out: Vec<IVec> = rays.to_vec();
    for l in lin {
        out.push(l.clone());
        out.push(l.iter().map(|x| -x).collect());
    }
    dedup(out)
}

/// Mutual containment of two cones by their generators and facets.
pub fn same_cone(a: &RationalCone, b: &RationalCone) -> bool {
    a.spanning_set().iter().all(|g| b.contains_by_facets(g)) && b.spanning_set().iter().all(|g| a.contains_by_facets(g))
}

/// Is `x` a nonnegative combination of `gens`? Phase-one simplex with Bland's rule.
pub fn in_cone(gens: &[IVec], x: &[BigInt], dim: usize) -> bool {
    let m = gens.len();
    if is_zero_vec(x) {
        return true;
    }
    if m == 0 {
        return false;
    }
    let q = |v: &BigInt| BigRational::from_integer(v.clone());
    // Rows: dim equations with nonnegative right-hand side; columns: m + dim artificials + rhs.
    let width = m + dim + 1;
    let mut t: Vec<Vec<BigRational>> = (0..dim)
        .map(|i| {
            let flip = x[i].is_negative();
            let mut row: Vec<BigRational> = Vec::with_capacity(width);
            for g in gens {
                let v = q(&g[i]);
                row.push(if flip { -v } else { v });
            }
            for j in 0..dim {
                row.push(if i == j { BigRational::one() } else { BigRational::zero() });
            }
            row.push(q(&x[i].abs()));
            row
        })
        .collect();
    let mut basis: Vec<usize> = (m..m + dim).collect();
    // Objective: minimize the sum of artificials, kept as reduced costs.
    let mut cost: Vec<BigRational> = vec![BigRational::zero(); width];
    for row in &t {
        for (c, v) in cost.iter_mut().zip(row) {
            *c -= v;
        }
    }
    for j in m..m + dim {
        cost[j] = BigRational::zero();
    }
    while let Some(enter) = (0..m + dim).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, BigRational)> = None;
        for (i, row) in t.iter().enumerate() {
            if row[enter].is_positive() {
                let ratio = &row[width - 1] / &row[enter];
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let Some((r, _)) = leave else { break };
        let piv = t[r][enter].clone();
        for v in t[r].iter_mut() {
            *v = &*v / &piv;
        }
        let prow = t[r].clone();
        for (i, row) in t.iter_mut().enumerate() {
            if i != r && !row[enter].is_zero() {
                let f = row[enter].clone();
                for (v, p) in row.iter_mut().zip(&prow) {
                    *v -= &f * p;
                }
            }
        }
        let f = cost[enter].clone();
        for (v, p) in cost.iter_mut().zip(&prow) {
            *v -= &f * p;
        }
        basis[r] = enter;
    }
    cost[width - 1].is_zero()
}

/// The flow cone of a digraph: extreme rays are indicator vectors of simple cycles.
pub fn flow_cone(g: &DualGraph, cap: usize) -> Result<(Vec<Vec<usize>>, RationalCone), ConeError> {
    let cycles = g.simple_cycles(cap).ok_or(ConeError::TooManyCycles(cap))?;
    let n = g.n_edges();
    let gens: Vec<IVec> = cycles
        .iter()
        .map(|c| {
            let mut v = vec![BigInt::zero(); n];
            for &e in c {
                v[e] += 1;
            }
            v
        })
        .collect();
    let mut facets: Vec<IVec> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    for row in g.incidence() {
        facets.push(ivec(&row));
        facets.push(row.iter().map(|&x| BigInt::from(-x)).collect());
    }
    Ok((
        cycles,
        RationalCone {
            ambient_dim: n,
            lineality_dim: 0,
            generators: dedup(gens),
            lineality: Vec::new(),
            facets: dedup(facets),
        },
    ))
}

/// The cone of homology directions in the free part of H1 of the filled manifold.
#[derive(Clone, Debug, Serialize)]
pub struct HomologyDirections {
    pub cone: RationalCone,
    pub n_cycles: usize,
    /// Distinct primitive classes of simple cycles.
    pub cycle_classes: Vec<IVec>,
}

pub fn homology_directions(tri: &TautTriangulation, fh: &FilledHomology, cap: usize) -> Result<HomologyDirections, ConeError> {
    let g = DualGraph::new(tri).map_err(|_| ConeError::TooManyCycles(0))?;
    let cycles = g.simple_cycles(cap).ok_or(ConeError::TooManyCycles(cap))?;
    let n = tri.n_faces();
    let mut classes = BTreeSet::new();
    for c in &cycles {
        let mut z = vec![0i64; n];
        for &e in c {
            z[e] += 1;
        }
        let cls = fh.h1.class_of_i64(&z).free;
        classes.insert(primitive(&cls));
    }
    let classes: Vec<IVec> = classes.into_iter().collect();
    let cone = RationalCone::from_generators(fh.h1.rank, &classes);
    Ok(HomologyDirections {
        cone,
        n_cycles: cycles.len(),
        cycle_classes: classes,
    })
}

/// Rational coordinates in the free part of H1.
#[derive(Clone, Debug, Serialize)]
pub struct EulerClass {
    pub h1_class: Vec<BigRational>,
    /// ind(U_i) = 2 − prongs(U_i)
    pub per_cusp_index: BTreeMap<usize, i64>,
}

pub fn euler_class(tri: &TautTriangulation, fh: &FilledHomology) -> Result<EulerClass, ConeError> {
    if tri.n_cusps() == 0 || !fh.is_closed_up(tri.n_cusps()) {
        return Err(ConeError::UnfilledMode);
    }
    let r = fh.h1.rank;
    let mut e = vec![BigRational::zero(); r];
    let mut per_cusp_index = BTreeMap::new();
    for (&c, &pr) in &fh.prongs {
        let ind = 2 - pr as i64;
        per_cusp_index.insert(c, ind);
        let coef = BigRational::new(BigInt::from(ind), BigInt::from(2));
        for (x, k) in e.iter_mut().zip(&fh.core_classes[&c]) {
            *x += &coef * BigRational::from_integer(k.clone());
        }
    }
    Ok(EulerClass {
        h1_class: e,
        per_cusp_index,
    })
}

/// x(α) = ⟨−e, α⟩ for a functional α given on the free basis.
pub fn norm_value(e: &EulerClass, alpha: &[BigInt]) -> BigRational {
    -e.h1_class
        .iter()
        .zip(alpha)
        .map(|(x, a)| x * BigRational::from_integer(a.clone()))
        .sum::<BigRational>()
}

#[derive(Clone, Debug, Serialize)]
pub struct NormFaceReport {
    pub directions: RationalCone,
    pub cone_sigma: RationalCone,
    pub face_codim: usize,
    /// Dimension of the face of the unit sphere, −1 for the empty face.
    pub face_dim: i64,
    /// Absent in unfilled mode.
    pub euler: Option<EulerClass>,
    /// Minimal integral generators of the dual cone with their norms (filled mode).
    pub sample_norms: Vec<(IVec, BigRational)>,
}

pub fn norm_face(tri: &TautTriangulation, fh: &FilledHomology, cap: usize) -> Result<NormFaceReport, ConeError> {
    let euler = match euler_class(tri, fh) {
        Ok(e) => Some(e),
        Err(ConeError::UnfilledMode) => None,
        Err(e) => return Err(e),
    };
    let hd = homology_directions(tri, fh, cap)?;
    let sigma = hd.cone.dual();
    if !same_cone(&sigma.dual(), &hd.cone) {
        return Err(ConeError::DualityFailure);
    }
    let face_dim = sigma.dim() as i64 - 1;
    let sample_norms = match &euler {
        Some(e) => sigma
            .spanning_set()
            .into_iter()
            .map(|a| {
                let x = norm_value(e, &a);
                (a, x)
            })
            .collect(),
        None => Vec::new(),
    };
    Ok(NormFaceReport {
        face_codim: hd.cone.lineality_dim,
        directions: hd.cone,
        cone_sigma: sigma,
        face_dim,
        euler,
        sample_norms,
    })
}

/// Norm of an integral class, refused outside the dual cone.
pub fn evaluate_norm(report: &NormFaceReport, alpha: &[BigInt]) -> Result<BigRational, ConeError> {
    if alpha.len() != report.cone_sigma.ambient_dim {
        return Err(ConeError::Dimension {
            expected: report.cone_sigma.ambient_dim,
            got: alpha.len(),
        });
    }
    if !report.directions.spanning_set().iter().all(|g| !dot(g, alpha).is_negative()) {
        return Err(ConeError::ClassOutsideCone(alpha.to_vec()));
    }
    let e = report.euler.as_ref().ok_or(ConeError::UnfilledMode)?;
    Ok(norm_value(e, alpha))
}
