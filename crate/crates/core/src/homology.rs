//! Integer homology of the dual spine, peripheral classes and Dehn filling.
//!
//! Chains: C2 on edge classes, C1 on face classes (the oriented edges of the
//! dual graph, running from the tetrahedron below to the one above), C0 on
//! tetrahedra. Second homology of the filled manifold is carried around as
//! linear functionals on first homology: a functional is the vector of its
//! values on the free basis emitted by [`HomologyPresentation`].

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::snf::{self, Mat};
use crate::tri::TautTriangulation;
use crate::veering::CuspComplex;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("spine boundary maps do not compose to zero")]
    NotAComplex,
    #[error("cusp {cusp}: slope {slope} has {prongs} prongs, filling needs at least 3")]
    ProngsTooSmall { cusp: usize, slope: Slope, prongs: u64 },
    #[error("cusp {cusp}: slope {slope} is not primitive")]
    NotPrimitive { cusp: usize, slope: Slope },
    #[error("cusp {0} does not exist")]
    NoSuchCusp(usize),
}

/// A slope `p·transversal + q·core` on a cusp torus, in the basis built by
/// [`CuspComplex`]. The ladderpole slope is `0/1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Slope {
    pub p: i64,
    pub q: i64,
}

impl Slope {
    pub fn new(p: i64, q: i64) -> Slope {
        Slope { p, q }
    }
    pub fn is_primitive(self) -> bool {
        self.p.gcd(&self.q) == 1
    }
}

impl std::ops::Neg for Slope {
    type Output = Slope;
    fn neg(self) -> Slope {
        Slope { p: -self.p, q: -self.q }
    }
}

impl fmt::Display for Slope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl std::str::FromStr for Slope {
    type Err = String;
    fn from_str(s: &str) -> Result<Slope, String> {
        let (p, q) = s.split_once('/').ok_or_else(|| format!("slope {s:?} is not of the form p/q"))?;
        let p = p.trim().parse().map_err(|e| format!("slope {s:?}: {e}"))?;
        let q = q.trim().parse().map_err(|e| format!("slope {s:?}: {e}"))?;
        Ok(Slope { p, q })
    }
}

pub type Fillings = BTreeMap<usize, Slope>;

#[derive(Clone, Debug)]
pub struct SpineComplex {
    pub n0: usize,
    pub n1: usize,
    pub n2: usize,
    /// faces × edges
    pub d2: Vec<Vec<i64>>,
    /// tetrahedra × faces
    pub d1: Vec<Vec<i64>>,
}

pub fn spine_complex(tri: &TautTriangulation) -> Result<SpineComplex, HomologyError> {
    let (n0, n1, n2) = (tri.n_tets(), tri.n_faces(), tri.n_edges());
    let mut d1 = vec![vec![0i64; n1]; n0];
    for f in 0..n1 {
        d1[tri.tet_above(f)][f] += 1;
        d1[tri.tet_below(f)][f] -= 1;
    }
    // The dual disk of an edge: up through side A, back down through side B.
    let mut d2 = vec![vec![0i64; n2]; n1];
    for e in 0..n2 {
        let st = tri.edge_star(e);
        for &f in st.a_faces() {
            d2[f][e] += 1;
        }
        for &f in st.b_faces() {
            d2[f][e] -= 1;
        }
    }
    for row in &d1 {
        for e in 0..n2 {
            let s: i64 = (0..n1).map(|f| row[f] * d2[f][e]).sum();
            if s != 0 {
                return Err(HomologyError::NotAComplex);
            }
        }
    }
    Ok(SpineComplex { n0, n1, n2, d2, d1 })
}

/// A class: free coordinates plus torsion residues.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Class {
    pub free: Vec<BigInt>,
    pub torsion: Vec<BigInt>,
}

impl Class {
    pub fn is_zero(&self) -> bool {
        self.free.iter().all(Zero::is_zero) && self.torsion.iter().all(Zero::is_zero)
    }
}

/// `ker d1 / im R` for a relation matrix `R` whose columns are cycles.
#[derive(Clone, Debug)]
pub struct HomologyPresentation {
    pub rank: usize,
    /// Invariant factors greater than one.
    pub torsion: Vec<BigInt>,
    /// Cycle representatives of the free generators.
    pub basis_lift: Vec<Vec<BigInt>>,
    /// Rows are cocycles; applied to a cycle they give the free coordinates.
    free_rows: Mat,
    torsion_rows: Vec<(Vec<BigInt>, BigInt)>,
    n1: usize,
}

impl HomologyPresentation {
    /// `relations` has one column per relation, `n1` rows.
    pub fn compute(d1: &[Vec<i64>], relations: &[Vec<BigInt>], n1: usize) -> HomologyPresentation {
        let n0 = d1.len();
        let s1 = snf::smith(&snf::from_i64(d1), n0, n1);
        let r1 = s1.rank();
        let k = n1 - r1;
        // Kernel basis K = columns r1.. of V1; coordinates via rows r1.. of V1^-1.
        let proj: Mat = s1.v_inv[r1..].to_vec();
        let m = relations.len();
        let y: Mat = if m == 0 {
            vec![Vec::new(); k]
        } else {
            let rel_t = snf::transpose(relations, n1); // n1 × m
            snf::mul(&proj, &rel_t, n1)
        };
        let s2 = snf::smith(&y, k, m);
        let r2 = s2.rank();
        let phi = snf::mul(&s2.u, &proj, k); // k × n1
        let kernel: Mat = (0..n1).map(|i| s1.v[i][r1..].to_vec()).collect(); // n1 × k
        let mut torsion = Vec::new();
        let mut torsion_rows = Vec::new();
        for i in 0..r2 {
            if !s2.diag[i].is_one() {
                torsion.push(s2.diag[i].clone());
                torsion_rows.push((phi[i].clone(), s2.diag[i].clone()));
            }
        }
        let free_rows: Mat = phi[r2..].to_vec();
        let basis_lift = (r2..k)
            .map(|j| {
                let col: Vec<BigInt> = (0..k).map(|i| s2.u_inv[i][j].clone()).collect();
                snf::mat_vec(&kernel, &col)
            })
            .collect();
        HomologyPresentation {
            rank: k - r2,
            torsion,
            basis_lift,
            free_rows,
            torsion_rows,
            n1,
        }
    }

    pub fn n_chains(&self) -> usize {
        self.n1
    }

    /// Coordinates of a cycle (the caller guarantees `d1 z = 0`).
    pub fn class_of(&self, z: &[BigInt]) -> Class {
        let free = snf::mat_vec(&self.free_rows, z);
        let torsion = self
            .torsion_rows
            .iter()
            .map(|(row, d)| {
                let v: BigInt = row.iter().zip(z).map(|(a, b)| a * b).sum();
                v.mod_floor(d)
            })
            .collect();
        Class { free, torsion }
    }

    pub fn class_of_i64(&self, z: &[i64]) -> Class {
        let z: Vec<BigInt> = z.iter().map(|&x| BigInt::from(x)).collect();
        self.class_of(&z)
    }

    /// Free-coordinate cocycles (rank × faces).
    pub fn cocycles(&self) -> &Mat {
        &self.free_rows
    }

    /// Values of the face-weight cochain `w` on the free basis. For a cocycle
    /// vanishing on the relations this is its class as a functional.
    pub fn functional_of(&self, w: &[BigInt]) -> Vec<BigInt> {
        self.basis_lift
            .iter()
            .map(|b| b.iter().zip(w).map(|(x, y)| x * y).sum())
            .collect()
    }

    /// Evaluate a functional on a class.
    pub fn pair(alpha: &[BigInt], class: &Class) -> BigInt {
        alpha.iter().zip(&class.free).map(|(a, b)| a * b).sum()
    }

    /// Summary like `Z^2 + Z/3`.
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if self.rank > 0 {
            parts.push(if self.rank == 1 { "Z".to_string() } else { format!("Z^{}", self.rank) });
        }
        for d in &self.torsion {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

pub fn h1_unfilled(tri: &TautTriangulation) -> Result<HomologyPresentation, HomologyError> {
    let sc = spine_complex(tri)?;
    Ok(HomologyPresentation::compute(&sc.d1, &columns(&sc.d2, sc.n2), sc.n1))
}

fn columns(m: &[Vec<i64>], cols: usize) -> Vec<Vec<BigInt>> {
    (0..cols).map(|j| m.iter().map(|r| BigInt::from(r[j])).collect()).collect()
}

/// Face chain of a side-crossing word on a cusp.
pub fn face_word(cx: &CuspComplex, word: &[(usize, i64)]) -> Vec<(usize, i64)> {
    word.iter().map(|&(s, g)| (cx.sides[s].face, g)).collect()
}

pub fn word_chain(n_faces: usize, word: &[(usize, i64)]) -> Vec<i64> {
    let mut c = vec![0; n_faces];
    for &(f, g) in word {
        c[f] += g;
    }
    c
}

#[derive(Clone, Debug, Serialize)]
pub struct PeripheralClass {
    pub cusp: usize,
    pub slope: Slope,
    /// Signed face classes crossed, in order.
    pub crossing_word: Vec<(usize, i64)>,
    pub chain: Vec<i64>,
    pub h1_class: Class,
}

pub fn peripheral_class(
    tri: &TautTriangulation,
    cx: &CuspComplex,
    h1: &HomologyPresentation,
    cusp: usize,
    slope: Slope,
) -> Result<PeripheralClass, HomologyError> {
    if cusp >= cx.cusps.len() {
        return Err(HomologyError::NoSuchCusp(cusp));
    }
    let word = face_word(cx, &cx.slope_word(cusp, slope.p, slope.q));
    let chain = word_chain(tri.n_faces(), &word);
    let h1_class = h1.class_of_i64(&chain);
    Ok(PeripheralClass {
        cusp,
        slope,
        crossing_word: word,
        chain,
        h1_class,
    })
}

/// Solve `p·b − q·a = s` for primitive `(p, q)` and `s = ±1`.
pub fn companion(slope: Slope, s: i64) -> Slope {
    let g = slope.p.extended_gcd(&slope.q);
    debug_assert_eq!(g.gcd, 1);
    // p·x + q·y = 1
    Slope { p: -s * g.y, q: s * g.x }
}

#[derive(Clone, Debug)]
pub struct FilledHomology {
    pub fillings: Fillings,
    pub h1: HomologyPresentation,
    pub meridians: BTreeMap<usize, PeripheralClass>,
    pub prongs: BTreeMap<usize, u64>,
    /// Companion slope meeting each meridian once, used for the core.
    pub companions: BTreeMap<usize, Slope>,
    /// Free coordinates of each filling core in the filled first homology.
    pub core_classes: BTreeMap<usize, Vec<BigInt>>,
    /// Face chain of the ladder-core slope on each filled cusp.
    pub ladder_cores: BTreeMap<usize, Vec<i64>>,
}

impl FilledHomology {
    /// True when every cusp is filled.
    pub fn is_closed_up(&self, n_cusps: usize) -> bool {
        self.fillings.len() == n_cusps
    }
}

pub fn fill(tri: &TautTriangulation, cx: &CuspComplex, fillings: &Fillings) -> Result<FilledHomology, HomologyError> {
    let sc = spine_complex(tri)?;
    let h1_open = HomologyPresentation::compute(&sc.d1, &columns(&sc.d2, sc.n2), sc.n1);
    let mut rels = columns(&sc.d2, sc.n2);
    let mut prongs = BTreeMap::new();
    let mut words = BTreeMap::new();
    for (&c, &slope) in fillings {
        if c >= tri.n_cusps() {
            return Err(HomologyError::NoSuchCusp(c));
        }
        if !slope.is_primitive() {
            return Err(HomologyError::NotPrimitive { cusp: c, slope });
        }
        let pr = cx.prongs(c, slope.p, slope.q);
        if pr < 3 {
            return Err(HomologyError::ProngsTooSmall { cusp: c, slope, prongs: pr });
        }
        prongs.insert(c, pr);
        let pc = peripheral_class(tri, cx, &h1_open, c, slope)?;
        rels.push(pc.chain.iter().map(|&x| BigInt::from(x)).collect());
        words.insert(c, pc);
    }
    let h1 = HomologyPresentation::compute(&sc.d1, &rels, sc.n1);
    let mut companions = BTreeMap::new();
    let mut core_classes = BTreeMap::new();
    let mut ladder_cores = BTreeMap::new();
    for (&c, &slope) in fillings {
        // Orientation: the ladder core (0, 1) must be a positive multiple of the core.
        let s = slope.p.signum();
        let comp = companion(slope, s);
        let chain = word_chain(tri.n_faces(), &face_word(cx, &cx.slope_word(c, comp.p, comp.q)));
        core_classes.insert(c, h1.class_of_i64(&chain).free);
        companions.insert(c, comp);
        ladder_cores.insert(c, word_chain(tri.n_faces(), &face_word(cx, &cx.slope_word(c, 0, 1))));
    }
    let meridians = words
        .into_iter()
        .map(|(c, mut pc)| {
            pc.h1_class = h1.class_of_i64(&pc.chain);
            (c, pc)
        })
        .collect();
    Ok(FilledHomology {
        fillings: fillings.clone(),
        h1,
        meridians,
        prongs,
        companions,
        core_classes,
        ladder_cores,
    })
}

/// The slope on `cusp` that dies rationally in H1 of the unfilled manifold, if
/// the cusp has exactly one. Filling along it keeps the free rank.
pub fn homological_longitude(
    tri: &TautTriangulation,
    cx: &CuspComplex,
    h1: &HomologyPresentation,
    cusp: usize,
) -> Result<Option<Slope>, HomologyError> {
    let b = peripheral_class(tri, cx, h1, cusp, Slope::new(1, 0))?.h1_class.free;
    let l = peripheral_class(tri, cx, h1, cusp, Slope::new(0, 1))?.h1_class.free;
    let Some(k) = (0..h1.rank).find(|&k| !b[k].is_zero() || !l[k].is_zero()) else {
        return Ok(None);
    };
    // Candidate (p, q) ∝ (l_k, −b_k); it must kill every coordinate.
    let (p, q) = (l[k].clone(), -b[k].clone());
    if (0..h1.rank).any(|i| !(&p * &b[i] + &q * &l[i]).is_zero()) {
        return Ok(None);
    }
    let g = p.gcd(&q);
    let (mut p, mut q) = (&p / &g, &q / &g);
    if p.is_negative() || (p.is_zero() && q.is_negative()) {
        p = -p;
        q = -q;
    }
    let to = |x: &BigInt| i64::try_from(x).ok();
    Ok(match (to(&p), to(&q)) {
        (Some(p), Some(q)) => Some(Slope::new(p, q)),
        _ => None,
    })
}

/// Slopes on a cusp with at least `min_prongs` prongs, by increasing |p|+|q|.
/// Only `p > 0` is listed since a slope and its reverse fill identically.
pub fn candidate_fillings(cx: &CuspComplex, cusp: usize, min_prongs: u64, count: usize) -> Vec<Slope> {
    let mut out = Vec::new();
    for r in 1i64..64 {
        for p in 1..=r {
            let q = r - p;
            let mut options = vec![Slope::new(p, q)];
            if q != 0 {
                options.push(Slope::new(p, -q));
            }
            for s in options {
                if out.len() < count && s.is_primitive() && cx.prongs(cusp, s.p, s.q) >= min_prongs {
                    out.push(s);
                }
            }
        }
        if out.len() >= count {
            break;
        }
    }
    out
}
