//! Independent reference computations for the acceptance suite.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use taut_core::TautTriangulation;

/// Invariant factors of Z^rows / column span, by plain row and column reduction.
/// Returns (free rank, factors > 1 in increasing order).
pub fn abelian_invariants(rows: usize, cols: &[Vec<i64>]) -> (usize, Vec<BigInt>) {
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
pub fn spine_presentation(tri: &TautTriangulation) -> (usize, Vec<Vec<i64>>) {
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

pub fn closed_gamma_path(tri: &TautTriangulation, word: &[(usize, i64)]) -> bool {
    let n = word.len();
    (0..n).all(|i| {
        let (f, s) = word[i];
        let (g, t) = word[(i + 1) % n];
        let here = if s > 0 { tri.tet_above(f) } else { tri.tet_below(f) };
        let there = if t > 0 { tri.tet_below(g) } else { tri.tet_above(g) };
        here == there
    })
}

