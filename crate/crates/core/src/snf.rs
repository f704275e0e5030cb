//! Smith normal form over the integers with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Mat = Vec<Vec<BigInt>>;

pub fn from_i64(m: &[Vec<i64>]) -> Mat {
    m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn zeros(r: usize, c: usize) -> Mat {
    vec![vec![BigInt::zero(); c]; r]
}

pub fn mul(a: &Mat, b: &Mat, inner: usize) -> Mat {
    let r = a.len();
    let c = if b.is_empty() { 0 } else { b[0].len() };
    let mut out = zeros(r, c);
    for i in 0..r {
        for k in 0..inner {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..c {
                if !b[k][j].is_zero() {
                    out[i][j] += &a[i][k] * &b[k][j];
                }
            }
        }
    }
    out
}

pub fn mat_vec(a: &Mat, v: &[BigInt]) -> Vec<BigInt> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

pub fn transpose(a: &[Vec<BigInt>], cols: usize) -> Mat {
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// `u * a * v = d` with `d` diagonal, `d[i][i]` dividing `d[i+1][i+1]`, all nonnegative.
#[derive(Clone, Debug)]
pub struct Snf {
    pub rows: usize,
    pub cols: usize,
    pub diag: Vec<BigInt>,
    pub u: Mat,
    pub u_inv: Mat,
    pub v: Mat,
    pub v_inv: Mat,
}

impl Snf {
    pub fn rank(&self) -> usize {
        self.diag.iter().filter(|d| !d.is_zero()).count()
    }
}

struct Work {
    a: Mat,
    u: Mat,
    u_inv: Mat,
    v: Mat,
    v_inv: Mat,
}

impl Work {
    // row i += c * row j
    fn row_add(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        let rj = self.a[j].clone();
        for (x, y) in self.a[i].iter_mut().zip(&rj) {
            *x += c * y;
        }
        let uj = self.u[j].clone();
        for (x, y) in self.u[i].iter_mut().zip(&uj) {
            *x += c * y;
        }
        for row in self.u_inv.iter_mut() {
            let t = c * &row[i];
            row[j] -= t;
        }
    }
    fn row_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        self.u.swap(i, j);
        for row in self.u_inv.iter_mut() {
            row.swap(i, j);
        }
    }
    fn row_neg(&mut self, i: usize) {
        for x in self.a[i].iter_mut() {
            *x = -&*x;
        }
        for x in self.u[i].iter_mut() {
            *x = -&*x;
        }
        for row in self.u_inv.iter_mut() {
            row[i] = -&row[i];
        }
    }
    // col i += c * col j
    fn col_add(&mut self, i: usize, j: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for row in self.a.iter_mut() {
            let t = c * &row[j];
            row[i] += t;
        }
        for row in self.v.iter_mut() {
            let t = c * &row[j];
            row[i] += t;
        }
        let vi = self.v_inv[i].clone();
        for (x, y) in self.v_inv[j].iter_mut().zip(&vi) {
            *x -= c * y;
        }
    }
    fn col_swap(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        for row in self.v.iter_mut() {
            row.swap(i, j);
        }
        self.v_inv.swap(i, j);
    }
}

pub fn smith(a: &Mat, rows: usize, cols: usize) -> Snf {
    let mut w = Work {
        a: a.clone(),
        u: identity(rows),
        u_inv: identity(rows),
        v: identity(cols),
        v_inv: identity(cols),
    };
    let mut t = 0;
    while t < rows.min(cols) {
        // Pivot: smallest nonzero magnitude in the trailing block.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !w.a[i][j].is_zero() && best.is_none_or(|(bi, bj)| w.a[i][j].abs() < w.a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        w.row_swap(t, pi);
        w.col_swap(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if w.a[i][t].is_zero() {
                    continue;
                }
                let q = w.a[i][t].div_floor(&w.a[t][t]);
                w.row_add(i, t, &-q);
                if !w.a[i][t].is_zero() {
                    w.row_swap(t, i);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if w.a[t][j].is_zero() {
                    continue;
                }
                let q = w.a[t][j].div_floor(&w.a[t][t]);
                w.col_add(j, t, &-q);
                if !w.a[t][j].is_zero() {
                    w.col_swap(t, j);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // Divisibility of the trailing block by the pivot.
            let mut fix = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !w.a[i][j].is_multiple_of(&w.a[t][t]) {
                        fix = Some(i);
                        break 'outer;
                    }
                }
            }
            match fix {
                Some(i) => {
                    let one = BigInt::one();
                    w.row_add(t, i, &one);
                }
                None => break,
            }
        }
        if w.a[t][t].is_negative() {
            w.row_neg(t);
        }
        t += 1;
    }
    let diag = (0..rows.min(cols)).map(|i| w.a[i][i].clone()).collect();
    Snf {
        rows,
        cols,
        diag,
        u: w.u,
        u_inv: w.u_inv,
        v: w.v,
        v_inv: w.v_inv,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn check(a: &[Vec<i64>]) {
        let rows = a.len();
        let cols = a[0].len();
        let m = from_i64(a);
        let s = smith(&m, rows, cols);
        let d = mul(&mul(&s.u, &m, rows), &s.v, cols);
        for i in 0..rows {
            for j in 0..cols {
                if i == j {
                    assert_eq!(d[i][j], s.diag[i]);
                } else {
                    assert!(d[i][j].is_zero());
                }
            }
        }
        assert_eq!(mul(&s.u, &s.u_inv, rows), identity(rows));
        assert_eq!(mul(&s.v, &s.v_inv, cols), identity(cols));
        for k in 1..s.diag.len() {
            if !s.diag[k].is_zero() {
                assert!(s.diag[k].is_multiple_of(&s.diag[k - 1]));
            }
        }
    }

    #[test]
    fn known_example() {
        let a = vec![vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]];
        let s = smith(&from_i64(&a), 3, 3);
        let d: Vec<i64> = s.diag.iter().map(|x| i64::try_from(x).unwrap()).collect();
        assert_eq!(d, vec![2, 6, 12]);
        check(&a);
    }

    proptest! {
        #[test]
        fn transforms_are_unimodular(rows in 1usize..6, cols in 1usize..6, seed in proptest::collection::vec(-9i64..10, 36)) {
            let a: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 6 + j]).collect()).collect();
            check(&a);
        }
    }
}
