//! Dense exact linear algebra over the rationals and over prime fields.

use crate::arith::Rational;
use num_traits::{One, Zero};

pub type QMat = Vec<Vec<Rational>>;
pub type QVec = Vec<Rational>;

pub fn zeros(r: usize, c: usize) -> QMat {
    vec![vec![Rational::zero(); c]; r]
}

pub fn identity(n: usize) -> QMat {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

pub fn transpose(m: &QMat) -> QMat {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|r| r[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &QMat, b: &QMat) -> QMat {
    let n = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..n)
                .map(|j| {
                    let mut s = Rational::zero();
                    for (k, x) in row.iter().enumerate() {
                        if !x.is_zero() && !b[k][j].is_zero() {
                            s += x * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &QMat, v: &[Rational]) -> QVec {
    a.iter().map(|row| dot(row, v)).collect()
}

/// Row vector times matrix.
pub fn vec_mat(v: &[Rational], a: &QMat) -> QVec {
    let n = a.first().map_or(0, |r| r.len());
    let mut out = vec![Rational::zero(); n];
    for (k, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for j in 0..n {
            if !a[k][j].is_zero() {
                out[j] += x * &a[k][j];
            }
        }
    }
    out
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut s = Rational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

pub fn mat_add(a: &QMat, b: &QMat) -> QMat {
    a.iter()
        .zip(b)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect()
}

pub fn mat_scale(a: &QMat, c: &Rational) -> QMat {
    a.iter()
        .map(|r| r.iter().map(|x| x * c).collect())
        .collect()
}

/// Reduced row echelon form; returns the pivot columns.
pub fn rref(m: &mut QMat) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    if !m[r][j].is_zero() {
                        let t = &f * &m[r][j];
                        m[i][j] -= t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &QMat) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Basis (as rows) of the right kernel `{x : m·x = 0}`.
pub fn nullspace(m: &QMat, cols: usize) -> QMat {
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -a[i][f].clone();
            }
            v
        })
        .collect()
}

pub fn det(m: &QMat) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut d = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] * &inv;
                for j in c..n {
                    let t = &f * &a[c][j];
                    a[i][j] -= t;
                }
            }
        }
    }
    d
}

pub fn inverse(m: &QMat) -> Option<QMat> {
    let n = m.len();
    let mut a: QMat = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| {
                if i == j {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            }));
            row
        })
        .collect();
    let piv = rref(&mut a);
    if piv.len() < n || piv[n - 1] != n - 1 {
        return None;
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `x·m = v` for a row vector `x`, if possible.
pub fn solve_left(m: &QMat, v: &[Rational]) -> Option<QVec> {
    // x·m = v  <=>  mᵀ·xᵀ = vᵀ
    let mt = transpose(m);
    let rows = mt.len();
    let cols = m.len();
    let mut aug: QMat = mt
        .into_iter()
        .zip(v)
        .map(|(mut r, x)| {
            r.push(x.clone());
            r
        })
        .collect();
    let piv = rref(&mut aug);
    if piv.contains(&cols) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &p) in piv.iter().enumerate() {
        if i < rows {
            x[p] = aug[i][cols].clone();
        }
    }
    Some(x)
}

/// Row echelon form over `F_p`; returns pivot columns.
pub fn rref_mod(m: &mut [Vec<i64>], p: i64) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        for row in m.iter_mut() {
            row[c] = row[c].rem_euclid(p);
        }
        let Some(piv) = (r..rows).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, piv);
        let inv = crate::arith::inv_mod(m[r][c], p).expect("pivot invertible");
        for x in m[r].iter_mut() {
            *x = (*x * inv).rem_euclid(p);
        }
        for i in 0..rows {
            if i != r {
                let f = m[i][c].rem_euclid(p);
                if f != 0 {
                    for j in 0..cols {
                        m[i][j] = (m[i][j] - f * m[r][j]).rem_euclid(p);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    for row in m.iter_mut() {
        for x in row.iter_mut() {
            *x = x.rem_euclid(p);
        }
    }
    pivots
}

pub fn rank_mod(m: &[Vec<i64>], p: i64) -> usize {
    let mut a = m.to_vec();
    rref_mod(&mut a, p).len()
}

/// Kernel of `m` over `F_p` (rows).
pub fn nullspace_mod(m: &[Vec<i64>], cols: usize, p: i64) -> Vec<Vec<i64>> {
    let mut a = m.to_vec();
    let pivots = rref_mod(&mut a, p);
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![0i64; cols];
            v[f] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = (-a[i][f]).rem_euclid(p);
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;

    fn m(rows: &[&[i64]]) -> QMat {
        rows.iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect()
    }

    #[test]
    fn inverse_and_det() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(det(&a), int(18));
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(3));
    }

    #[test]
    fn kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6]]);
        let k = nullspace(&a, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(mat_vec(&a, v).iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn left_solve() {
        let a = m(&[&[1, 0], &[1, 1], &[0, 2]]);
        let x = solve_left(&a, &[int(2), int(5)]).unwrap();
        assert_eq!(vec_mat(&x, &a), vec![int(2), int(5)]);
    }
}
