mod common;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use taut_core::carried::solve_carried;
use taut_core::cones::*;
use taut_core::dual::DualGraph;
use taut_core::homology::{self, fill, FilledHomology, Fillings, Slope};
use taut_core::veering::CuspComplex;
use taut_core::{parse_triangulation, TautTriangulation};

const CAP: usize = 1_000_000;

fn longitude_filling(tri: &TautTriangulation, cx: &CuspComplex) -> Option<Fillings> {
    let h1 = homology::h1_unfilled(tri).unwrap();
    let mut f = Fillings::new();
    for c in 0..tri.n_cusps() {
        let s = homology::homological_longitude(tri, cx, &h1, c).unwrap()?;
        if cx.prongs(c, s.p, s.q) < 3 {
            return None;
        }
        f.insert(c, s);
    }
    Some(f)
}

/// Every prepared mode for a record: unfilled, plus longitude filling when available.
fn modes(tri: &TautTriangulation, cx: &CuspComplex) -> Vec<FilledHomology> {
    let mut out = vec![fill(tri, cx, &Fillings::new()).unwrap()];
    if let Some(f) = longitude_filling(tri, cx) {
        out.push(fill(tri, cx, &f).unwrap());
    }
    out
}

/// Simple directed cycles by brute force over vertex sequences.
fn cycle_vectors(g: &DualGraph) -> BTreeSet<Vec<BigInt>> {
    let mut out = BTreeSet::new();
    fn go(g: &DualGraph, start: usize, v: usize, used: &mut Vec<bool>, edges: &mut Vec<usize>, out: &mut BTreeSet<Vec<BigInt>>) {
        for e in 0..g.n_edges() {
            if g.tail[e] != v {
                continue;
            }
            let h = g.head[e];
            edges.push(e);
            if h == start {
                let mut x = vec![BigInt::zero(); g.n_edges()];
                for &f in edges.iter() {
                    x[f] += 1;
                }
                out.insert(x);
            } else if h > start && !used[h] {
                used[h] = true;
                go(g, start, h, used, edges, out);
                used[h] = false;
            }
            edges.pop();
        }
    }
    for s in 0..g.n_vertices {
        let mut used = vec![false; g.n_vertices];
        used[s] = true;
        go(g, s, s, &mut used, &mut Vec::new(), &mut out);
    }
    out
}

#[test]
fn two_loops_on_one_vertex() {
    let g = DualGraph {
        n_vertices: 1,
        tail: vec![0, 0],
        head: vec![0, 0],
    };
    let (cycles, cone) = flow_cone(&g, 10).unwrap();
    assert_eq!(cycles.len(), 2);
    let dd = RationalCone::from_facets(2, &cone.facets);
    assert_eq!(dd.generators, vec![ivec(&[0, 1]), ivec(&[1, 0])]);
}

#[test]
fn flow_cone_rays_are_simple_cycles() {
    for r in common::small(5) {
        let tri = parse_triangulation(&r.record).unwrap();
        let g = DualGraph::new(&tri).unwrap();
        let (cycles, cone) = flow_cone(&g, CAP).unwrap();
        let oracle = cycle_vectors(&g);
        assert_eq!(cycles.len(), oracle.len(), "{}", r.record);
        // Double description from the conservation equations alone.
        let dd = RationalCone::from_facets(g.n_edges(), &cone.facets);
        assert_eq!(dd.lineality_dim, 0);
        let rays: BTreeSet<Vec<BigInt>> = dd.generators.iter().cloned().collect();
        assert_eq!(rays, oracle, "{}", r.record);
    }
}

#[test]
fn duality_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for r in common::small(12) {
        let tri = parse_triangulation(&r.record).unwrap();
        let cx = CuspComplex::build(&tri).unwrap();
        for fh in modes(&tri, &cx) {
            let hd = homology_directions(&tri, &fh, CAP).unwrap();
            let c = &hd.cone;
            let d = c.dual();
            assert!(same_cone(&d.dual(), c), "{}", r.record);
            for g in c.spanning_set() {
                for a in d.spanning_set() {
                    assert!(!dot(&g, &a).is_negative());
                }
            }
            for g in &hd.cycle_classes {
                assert!(c.contains_by_facets(g));
            }
            let dim = fh.h1.rank;
            for _ in 0..100 {
                let a: Vec<BigInt> = (0..dim).map(|_| BigInt::from(rng.gen_range(-5i64..=5))).collect();
                let direct = hd.cycle_classes.iter().all(|g| !dot(g, &a).is_negative());
                assert_eq!(direct, d.contains_by_lp(&a), "{}", r.record);
                assert_eq!(direct, d.contains_by_facets(&a), "{}", r.record);
            }
        }
    }
}

#[test]
fn codimension_and_empty_face() {
    let mut empty = 0;
    let mut proper = 0;
    for r in common::small(12) {
        let tri = parse_triangulation(&r.record).unwrap();
        let cx = CuspComplex::build(&tri).unwrap();
        for fh in modes(&tri, &cx) {
            let rep = norm_face(&tri, &fh, CAP).unwrap();
            assert_eq!(rep.face_codim, rep.directions.lineality_dim);
            assert_eq!(rep.face_dim, rep.cone_sigma.dim() as i64 - 1);
            if rep.directions.lineality_dim == fh.h1.rank {
                assert!(rep.cone_sigma.is_zero());
                assert_eq!(rep.face_dim, -1);
                empty += 1;
            } else {
                proper += 1;
            }
            assert_eq!(rep.euler.is_some(), fh.is_closed_up(tri.n_cusps()));
        }
    }
    assert!(empty > 0 && proper > 0);
}

#[test]
fn euler_class_coefficients() {
    let mut seen = BTreeSet::new();
    for r in common::small(8).into_iter().filter(|r| r.cusps == 1) {
        let tri = parse_triangulation(&r.record).unwrap();
        let cx = CuspComplex::build(&tri).unwrap();
        for s in homology::candidate_fillings(&cx, 0, 3, 6) {
            let pr = cx.prongs(0, s.p, s.q);
            if pr > 4 {
                continue;
            }
            let fh = fill(&tri, &cx, &Fillings::from([(0, s)])).unwrap();
            let e = euler_class(&tri, &fh).unwrap();
            let coef = if pr == 4 {
                BigRational::from_integer(BigInt::from(-1))
            } else {
                BigRational::new(BigInt::from(-1), BigInt::from(2))
            };
            let want: Vec<BigRational> = fh.core_classes[&0].iter().map(|k| &coef * BigRational::from_integer(k.clone())).collect();
            assert_eq!(e.h1_class, want);
            assert_eq!(e.per_cusp_index[&0], 2 - pr as i64);
            seen.insert(pr);
        }
    }
    assert_eq!(seen, BTreeSet::from([3, 4]));
}

#[test]
fn unfilled_mode_has_no_euler_class() {
    let tri = parse_triangulation(common::FIG8).unwrap();
    let cx = CuspComplex::build(&tri).unwrap();
    let fh = fill(&tri, &cx, &Fillings::new()).unwrap();
    assert_eq!(euler_class(&tri, &fh).unwrap_err(), ConeError::UnfilledMode);
    let rep = norm_face(&tri, &fh, CAP).unwrap();
    let a = rep.cone_sigma.spanning_set();
    if let Some(a) = a.first() {
        assert_eq!(evaluate_norm(&rep, a).unwrap_err(), ConeError::UnfilledMode);
    }
    // A generic filling kills the free part.
    let s: Slope = homology::candidate_fillings(&cx, 0, 3, 1)[0];
    let closed = fill(&tri, &cx, &Fillings::from([(0, s)])).unwrap();
    assert_eq!(closed.h1.rank, 0);
}

#[test]
fn norm_on_the_dual_cone() {
    let mut checked = 0;
    for r in common::small(12) {
        let tri = parse_triangulation(&r.record).unwrap();
        let cx = CuspComplex::build(&tri).unwrap();
        let Some(f) = longitude_filling(&tri, &cx) else { continue };
        let fh = fill(&tri, &cx, &f).unwrap();
        let rep = norm_face(&tri, &fh, CAP).unwrap();
        let hd = homology_directions(&tri, &fh, CAP).unwrap();
        let e = rep.euler.clone().unwrap();
        for cusp_index in e.per_cusp_index.values() {
            assert!(*cusp_index <= -1);
        }
        let zero = vec![BigInt::zero(); fh.h1.rank];
        assert!(evaluate_norm(&rep, &zero).unwrap().is_zero());
        for (a, x) in &rep.sample_norms {
            for k in 0..=5 {
                let ka: Vec<BigInt> = a.iter().map(|v| v * k).collect();
                assert_eq!(evaluate_norm(&rep, &ka).unwrap(), x * BigRational::from_integer(BigInt::from(k)));
            }
            let s = solve_carried(&tri, &cx, &fh, &hd, Some(&e), a, None).unwrap();
            assert_eq!(*x, BigRational::from_integer(BigInt::from(-s.chi_filled)), "{}", r.record);
            // |⟨e, [S]⟩| ≤ −χ(S), with equality for carried S.
            assert_eq!(norm_value(&e, a).abs(), BigRational::from_integer(BigInt::from(-s.chi_filled)));
            let neg: Vec<BigInt> = a.iter().map(|v| -v).collect();
            if !rep.cone_sigma.contains_by_lp(&neg) {
                assert!(matches!(evaluate_norm(&rep, &neg), Err(ConeError::ClassOutsideCone(_))));
            }
            checked += 1;
        }
    }
    assert!(checked >= 10);
}
