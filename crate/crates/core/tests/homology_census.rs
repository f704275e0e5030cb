mod common;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use taut_core::homology::{self, fill, h1_unfilled, peripheral_class, spine_complex, Fillings, Slope};
use taut_core::veering::CuspComplex;
use taut_core::{parse_triangulation, GluingDocument, TautTriangulation};

/// Invariant factors of Z^rows / column span, by plain row and column reduction.
/// Returns (free rank, factors > 1 in increasing order).
fn abelian_invariants(rows: usize, cols: &[Vec<i64>]) -> (usize, Vec<BigInt>) {
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|i| cols.iter().map(|c| BigInt::from(c[i])).collect())
        .collect();
    let m = cols.len();
    let mut diag = Vec::new();
    let mut t = 0;
    loop {
        let mut piv = None;
        for i in t..rows {
            for j in t..m {
                if !a[i][j].is_zero() && piv.is_none_or(|(x, y): (usize, usize)| a[i][j].abs() < a[x][y].abs()) {
                    piv = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = piv else { break };
        a.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let q = a[i][t].div_floor(&a[t][t]);
            if !q.is_zero() {
                let rt = a[t].clone();
                for (x, y) in a[i].iter_mut().zip(&rt) {
                    *x -= &q * y;
                }
            }
            clean &= a[i][t].is_zero();
        }
        for j in t + 1..m {
            let q = a[t][j].div_floor(&a[t][t]);
            if !q.is_zero() {
                for r in a.iter_mut() {
                    let v = &q * &r[t];
                    r[j] -= v;
                }
            }
            clean &= a[t][j].is_zero();
        }
        if clean {
            diag.push(a[t][t].abs());
            t += 1;
        }
    }
    // Diagonal form: normalize to invariant factors with pairwise gcd/lcm.
    for i in 0..diag.len() {
        for j in i + 1..diag.len() {
            let g = diag[i].gcd(&diag[j]);
            let l = diag[i].lcm(&diag[j]);
            diag[i] = g;
            diag[j] = l;
        }
    }
    let factors = diag.iter().filter(|d| **d > BigInt::from(1)).cloned().collect();
    (rows - diag.len(), factors)
}

/// Relators of the spine group, walked directly from the gluing table: one word per
/// edge class, and the faces of a spanning tree of the dual graph.
fn spine_presentation(tri: &TautTriangulation) -> (usize, Vec<Vec<i64>>) {
    let n1 = tri.n_faces();
    let mut rels = Vec::new();
    let mut seen = vec![false; tri.n_edges()];
    for t in 0..tri.n_tets() {
        for a in 0..4 {
            for b in a + 1..4 {
                let e = tri.edge_of(t, a, b);
                if seen[e] {
                    continue;
                }
                seen[e] = true;
                let others: Vec<usize> = (0..4).filter(|&x| x != a && x != b).collect();
                let (mut cur, mut ca, mut cb, mut cc, mut cd) = (t, a, b, others[0], others[1]);
                let mut word = vec![0i64; n1];
                loop {
                    let f = tri.face_class(cur, cc);
                    word[f] += if tri.is_top_face(cur, cc) { 1 } else { -1 };
                    let (u, p) = tri.gluing(cur, cc);
                    let (na, nb, nc, nd) = (p.apply(ca), p.apply(cb), p.apply(cd), p.apply(cc));
                    cur = u;
                    ca = na;
                    cb = nb;
                    cc = nc;
                    cd = nd;
                    if (cur, ca, cb, cc, cd) == (t, a, b, others[0], others[1]) {
                        break;
                    }
                }
                rels.push(word);
            }
        }
    }
    // Spanning tree by BFS over faces.
    let mut reached = vec![false; tri.n_tets()];
    reached[0] = true;
    let mut queue = vec![0];
    while let Some(t) = queue.pop() {
        for f in 0..n1 {
            let (lo, hi) = (tri.tet_below(f), tri.tet_above(f));
            let other = if lo == t { hi } else if hi == t { lo } else { continue };
            if !reached[other] {
                reached[other] = true;
                queue.push(other);
                let mut unit = vec![0; n1];
                unit[f] = 1;
                rels.push(unit);
            }
        }
    }
    (n1, rels)
}

fn regina_invariants(s: &str) -> (usize, Vec<BigInt>) {
    let mut rank = 0;
    let mut tors = Vec::new();
    for part in s.split('+').map(str::trim) {
        let (mult, g) = match part.split_once(' ') {
            Some((m, g)) => (m.parse::<usize>().unwrap(), g),
            None => (1, part),
        };
        if g == "Z" {
            rank += mult;
        } else {
            let d: i64 = g.strip_prefix("Z_").unwrap().parse().unwrap();
            tors.extend(std::iter::repeat_n(BigInt::from(d), mult));
        }
    }
    tors.sort();
    (rank, tors)
}

fn closed_gamma_path(tri: &TautTriangulation, word: &[(usize, i64)]) -> bool {
    let n = word.len();
    (0..n).all(|i| {
        let (f, s) = word[i];
        let (g, t) = word[(i + 1) % n];
        let here = if s > 0 { tri.tet_above(f) } else { tri.tet_below(f) };
        let there = if t > 0 { tri.tet_below(g) } else { tri.tet_above(g) };
        here == there
    })
}

#[test]
fn spine_counts_and_chain_axiom() {
    for r in common::census() {
        let tri = parse_triangulation(&r.record).unwrap();
        let sc = spine_complex(&tri).unwrap();
        assert_eq!((sc.n0, sc.n1, sc.n2), (r.tets, 2 * r.tets, r.tets), "{}", r.record);
        let d1 = taut_core::snf::from_i64(&sc.d1);
        let s = taut_core::snf::smith(&d1, sc.n0, sc.n1);
        assert_eq!(s.rank(), r.tets - 1, "{}", r.record);
    }
    let fig8 = parse_triangulation(common::FIG8).unwrap();
    let sc = spine_complex(&fig8).unwrap();
    assert_eq!((sc.n2, sc.n1, sc.n0), (2, 4, 2));
}

#[test]
fn unfilled_h1_matches_census_and_abelianization() {
    for r in common::census() {
        let tri = parse_triangulation(&r.record).unwrap();
        let h = h1_unfilled(&tri).unwrap();
        let (n1, rels) = spine_presentation(&tri);
        let (rank, tors) = abelian_invariants(n1, &rels);
        assert_eq!((h.rank, h.torsion.clone()), (rank, tors.clone()), "{} oracle", r.record);
        assert_eq!((h.rank, h.torsion.clone()), regina_invariants(&r.h1), "{} census", r.record);
        assert!(h.rank >= r.cusps);
    }
    let fig8 = h1_unfilled(&parse_triangulation(common::FIG8).unwrap()).unwrap();
    assert_eq!((fig8.rank, fig8.torsion.len()), (1, 0));
}

#[test]
fn relabeling_tetrahedra_preserves_invariants() {
    for r in common::small(8) {
        let tri = parse_triangulation(&r.record).unwrap();
        let doc = tri.to_document();
        let n = doc.tetrahedra;
        let sigma: Vec<usize> = (0..n).map(|t| (t * 5 + 3) % n).collect();
        if (0..n).any(|t| !sigma.contains(&t)) {
            continue;
        }
        let mut pi = vec![[0, 0]; n];
        let mut co = vec![[0, 0]; n];
        for t in 0..n {
            pi[sigma[t]] = doc.pi_edges[t];
            co[sigma[t]] = doc.coorientations[t];
        }
        let relabeled = GluingDocument {
            tetrahedra: n,
            gluings: doc.gluings.iter().map(|&(t, f, u, g, p)| (sigma[t], f, sigma[u], g, p)).collect(),
            pi_edges: pi,
            coorientations: co,
        };
        let other = TautTriangulation::from_document(&relabeled).unwrap();
        let a = h1_unfilled(&tri).unwrap();
        let b = h1_unfilled(&other).unwrap();
        assert_eq!((a.rank, a.torsion), (b.rank, b.torsion), "{}", r.record);
    }
}

#[test]
fn peripheral_classes() {
    for r in common::census() {
        let tri = parse_triangulation(&r.record).unwrap();
        let cx = CuspComplex::build(&tri).unwrap();
        let h = h1_unfilled(&tri).unwrap();
        let mut boundary_rows = Vec::new();
        for c in 0..tri.n_cusps() {
            let lp = peripheral_class(&tri, &cx, &h, c, Slope::new(0, 1)).unwrap();
            assert!(closed_gamma_path(&tri, &lp.crossing_word), "{}", r.record);
            // A second representative: the core of every other ladder on the cusp.
            for &l in &cx.cusps[c].ladders {
                let word: Vec<(usize, i64)> = cx.ladders[l].exits.iter().map(|&s| (s, 1)).collect();
                let fw = homology::face_word(&cx, &word);
                assert!(closed_gamma_path(&tri, &fw));
                let cls = h.class_of_i64(&homology::word_chain(tri.n_faces(), &fw));
                assert_eq!(cls, lp.h1_class, "{} ladder {l}", r.record);
            }
            for s in [Slope::new(1, 0), Slope::new(2, 1), Slope::new(1, -3)] {
                let a = peripheral_class(&tri, &cx, &h, c, s).unwrap();
                let b = peripheral_class(&tri, &cx, &h, c, -s).unwrap();
                assert!(closed_gamma_path(&tri, &a.crossing_word));
                let sum: Vec<BigInt> = a.h1_class.free.iter().zip(&b.h1_class.free).map(|(x, y)| x + y).collect();
                assert!(sum.iter().all(Zero::is_zero), "{}", r.record);
                // Additivity: (p, q) = p·(1,0) + q·(0,1).
                let m = peripheral_class(&tri, &cx, &h, c, Slope::new(1, 0)).unwrap();
                for k in 0..h.rank {
                    let expect = BigInt::from(s.p) * &m.h1_class.free[k] + BigInt::from(s.q) * &lp.h1_class.free[k];
                    assert_eq!(a.h1_class.free[k], expect);
                }
            }
            boundary_rows.push(
                peripheral_class(&tri, &cx, &h, c, Slope::new(1, 0))
                    .unwrap()
                    .h1_class
                    .free
                    .clone(),
            );
            boundary_rows.push(lp.h1_class.free.clone());
        }
        // Half of the boundary survives rationally.
        let m = boundary_rows.len();
        let rank = taut_core::snf::smith(&boundary_rows, m, h.rank).rank();
        assert_eq!(rank, tri.n_cusps(), "{}", r.record);
    }
}

#[test]
fn filled_homology_matches_oracle() {
    for r in common::small(10) {
        let tri = parse_triangulation(&r.record).unwrap();
        let cx = CuspComplex::build(&tri).unwrap();
        let per_cusp: Vec<Vec<Slope>> = (0..tri.n_cusps())
            .map(|c| homology::candidate_fillings(&cx, c, 3, 3))
            .collect();
        for i in 0..3 {
            let mut fillings = Fillings::new();
            for (c, opts) in per_cusp.iter().enumerate() {
                fillings.insert(c, opts[i]);
            }
            let fh = fill(&tri, &cx, &fillings).unwrap();
            let (n1, mut rels) = spine_presentation(&tri);
            for pc in fh.meridians.values() {
                assert!(closed_gamma_path(&tri, &pc.crossing_word));
                rels.push(homology::word_chain(n1, &pc.crossing_word));
                assert!(pc.h1_class.is_zero());
            }
            let (rank, tors) = abelian_invariants(n1, &rels);
            assert_eq!((fh.h1.rank, fh.h1.torsion.clone()), (rank, tors), "{} {:?}", r.record, fillings);
            // Core from the companion agrees with the ladder core divided by |p|.
            for (c, slope) in &fillings {
                let lam = fh.h1.class_of_i64(&fh.ladder_cores[c]).free;
                let core = &fh.core_classes[c];
                for k in 0..fh.h1.rank {
                    assert_eq!(&core[k] * BigInt::from(slope.p.abs()), lam[k]);
                }
            }
        }
    }
}

#[test]
fn small_prongs_are_rejected() {
    let tri = parse_triangulation(common::FIG8).unwrap();
    let cx = CuspComplex::build(&tri).unwrap();
    let mut f = Fillings::new();
    f.insert(0, Slope::new(0, 1));
    assert!(matches!(fill(&tri, &cx, &f), Err(homology::HomologyError::ProngsTooSmall { .. })));
    f.insert(0, Slope::new(2, 4));
    assert!(matches!(fill(&tri, &cx, &f), Err(homology::HomologyError::NotPrimitive { .. })));
    let unfilled = fill(&tri, &cx, &Fillings::new()).unwrap();
    assert_eq!(unfilled.h1.rank, h1_unfilled(&tri).unwrap().rank);
}
