//! Harmonic polynomials for the ternary form `Δ` and the invariant inner product.

use crate::arith::Rational;
use crate::linalg::{inverse, nullspace, rref, QMat, QVec};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

pub type Monomial = [u32; 3];

/// Monomials of degree `k` in 3 variables, in a fixed order.
pub fn monomials(k: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    for a in (0..=k).rev() {
        for b in (0..=k - a).rev() {
            out.push([a, b, k - a - b]);
        }
    }
    out
}

fn mono_index(k: u32) -> BTreeMap<Monomial, usize> {
    monomials(k)
        .into_iter()
        .enumerate()
        .map(|(i, m)| (m, i))
        .collect()
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, b| a * BigInt::from(b))
}

type Sparse = BTreeMap<Monomial, Rational>;

fn mul_sparse(a: &Sparse, b: &Sparse) -> Sparse {
    let mut out = Sparse::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            let m = [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]];
            *out.entry(m).or_insert_with(Rational::zero) += ca * cb;
        }
    }
    out.retain(|_, v| !v.is_zero());
    out
}

/// Coefficients of `P(M·y)` for `P` of degree `k` given on [`monomials`].
pub fn substitute(k: u32, p: &[Rational], m: &QMat) -> QVec {
    let lin: Vec<Sparse> = (0..3)
        .map(|c| {
            let mut s = Sparse::new();
            for d in 0..3 {
                if !m[c][d].is_zero() {
                    let mut e = [0u32; 3];
                    e[d] = 1;
                    s.insert(e, m[c][d].clone());
                }
            }
            s
        })
        .collect();
    let mut acc = Sparse::new();
    for (coef, mono) in p.iter().zip(monomials(k)) {
        if coef.is_zero() {
            continue;
        }
        let mut t = Sparse::from([([0u32; 3], coef.clone())]);
        for c in 0..3 {
            for _ in 0..mono[c] {
                t = mul_sparse(&t, &lin[c]);
            }
        }
        for (mm, v) in t {
            *acc.entry(mm).or_insert_with(Rational::zero) += v;
        }
    }
    let idx = mono_index(k);
    let mut out = vec![Rational::zero(); idx.len()];
    for (mm, v) in acc {
        out[idx[&mm]] += v;
    }
    out
}

/// Value of a degree-`k` polynomial at `y`.
pub fn evaluate(k: u32, p: &[Rational], y: &[Rational]) -> Rational {
    let mut s = Rational::zero();
    for (coef, m) in p.iter().zip(monomials(k)) {
        if coef.is_zero() {
            continue;
        }
        let mut t = coef.clone();
        for c in 0..3 {
            for _ in 0..m[c] {
                t *= &y[c];
            }
        }
        s += t;
    }
    s
}

/// Value at an integer point.
pub fn evaluate_int(k: u32, p: &[Rational], y: &[i64]) -> Rational {
    let yr: Vec<Rational> = y
        .iter()
        .map(|&v| Rational::from_integer(v.into()))
        .collect();
    evaluate(k, p, &yr)
}

/// `Σ A_ij ∂_i ∂_j P` as a polynomial of degree `k − 2`.
pub fn laplacian(k: u32, p: &[Rational], a: &QMat) -> QVec {
    if k < 2 {
        return Vec::new();
    }
    let idx = mono_index(k - 2);
    let mut out = vec![Rational::zero(); idx.len()];
    for (coef, m) in p.iter().zip(monomials(k)) {
        if coef.is_zero() {
            continue;
        }
        for i in 0..3 {
            for j in 0..3 {
                if a[i][j].is_zero() {
                    continue;
                }
                let mut e = m;
                let mut f = coef * &a[i][j];
                if e[i] == 0 {
                    continue;
                }
                f *= Rational::from_integer(e[i].into());
                e[i] -= 1;
                if e[j] == 0 {
                    continue;
                }
                f *= Rational::from_integer(e[j].into());
                e[j] -= 1;
                out[idx[&e]] += f;
            }
        }
    }
    out
}

/// `V_k`: harmonic polynomials of degree `k` for `Δ = yᵀ·gram·y`, with the
/// Fischer product `⟨P, Q⟩ = P(G⁻¹∂)Q / k!`, `G = −gram`.
#[derive(Clone, Debug)]
pub struct HarmonicSpace {
    pub k: u32,
    pub gram: QMat,
    /// Basis polynomials as coefficient vectors on [`monomials`].
    pub basis: Vec<QVec>,
    pub inner: QMat,
    pivots: Vec<usize>,
    pivot_inv: QMat,
}

impl HarmonicSpace {
    pub fn new(k: u32, gram: &QMat) -> HarmonicSpace {
        let ginv = inverse(gram).expect("Δ nondegenerate");
        let n = monomials(k).len();
        let basis: Vec<QVec> = if k < 2 {
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            if i == j {
                                Rational::one()
                            } else {
                                Rational::zero()
                            }
                        })
                        .collect()
                })
                .collect()
        } else {
            // rows of the Laplacian map, one per target monomial
            let cols: Vec<QVec> = (0..n)
                .map(|i| {
                    let e: QVec = (0..n)
                        .map(|j| {
                            if i == j {
                                Rational::one()
                            } else {
                                Rational::zero()
                            }
                        })
                        .collect();
                    laplacian(k, &e, &ginv)
                })
                .collect();
            let m = monomials(k - 2).len();
            let mat: QMat = (0..m)
                .map(|r| (0..n).map(|c| cols[c][r].clone()).collect())
                .collect();
            nullspace(&mat, n)
        };
        assert_eq!(basis.len(), 2 * k as usize + 1);
        let mut ech = basis.clone();
        let pivots = rref(&mut ech);
        let sub: QMat = basis
            .iter()
            .map(|b| pivots.iter().map(|&c| b[c].clone()).collect())
            .collect();
        let pivot_inv = inverse(&sub).expect("basis independent");
        let g_inv_pos: QMat = ginv
            .iter()
            .map(|r| r.iter().map(|v| -v).collect())
            .collect();
        let kf = Rational::from_integer(factorial(k));
        let mono = monomials(k);
        let inner = basis
            .iter()
            .map(|p| {
                let pd = substitute(k, p, &g_inv_pos);
                basis
                    .iter()
                    .map(|q| {
                        let mut s = Rational::zero();
                        for ((a, b), m) in pd.iter().zip(q).zip(&mono) {
                            if !a.is_zero() && !b.is_zero() {
                                let w = factorial(m[0]) * factorial(m[1]) * factorial(m[2]);
                                s += a * b * Rational::from_integer(w);
                            }
                        }
                        s / &kf
                    })
                    .collect()
            })
            .collect();
        HarmonicSpace {
            k,
            gram: gram.clone(),
            basis,
            inner,
            pivots,
            pivot_inv,
        }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Monomial coefficients of `Σ c_m B_m`.
    pub fn polynomial(&self, c: &[Rational]) -> QVec {
        let n = monomials(self.k).len();
        let mut out = vec![Rational::zero(); n];
        for (cm, b) in c.iter().zip(&self.basis) {
            if cm.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(b) {
                *o += cm * v;
            }
        }
        out
    }

    /// Basis coordinates of a harmonic polynomial.
    pub fn coords(&self, p: &[Rational]) -> QVec {
        let d = self.dim();
        (0..d)
            .map(|j| {
                let mut s = Rational::zero();
                for (r, &c) in self.pivots.iter().enumerate() {
                    s += &p[c] * &self.pivot_inv[r][j];
                }
                s
            })
            .collect()
    }

    /// Matrix `A` with `coords(P∘M) = A·coords(P)`.
    pub fn action(&self, m: &QMat) -> QMat {
        if self.k == 0 {
            return vec![vec![Rational::one()]];
        }
        let d = self.dim();
        let cols: Vec<QVec> = self
            .basis
            .iter()
            .map(|b| self.coords(&substitute(self.k, b, m)))
            .collect();
        (0..d)
            .map(|r| (0..d).map(|c| cols[c][r].clone()).collect())
            .collect()
    }

    /// `P(y)` for `P` in basis coordinates.
    pub fn eval(&self, c: &[Rational], y: &[Rational]) -> Rational {
        if self.k == 0 {
            return c[0].clone();
        }
        evaluate(self.k, &self.polynomial(c), y)
    }

    /// Values `B_m(y)` of the basis polynomials.
    pub fn basis_values(&self, y: &[Rational]) -> QVec {
        self.basis.iter().map(|b| evaluate(self.k, b, y)).collect()
    }

    pub fn inner_product(&self, a: &[Rational], b: &[Rational]) -> Rational {
        let mut s = Rational::zero();
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if !bj.is_zero() {
                    s += ai * bj * &self.inner[i][j];
                }
            }
        }
        s
    }
}
