//! Definite quaternion algebras `(a, b | Q)` and their local invariants.

use crate::arith::{kronecker, legendre, prime_divisors, Rational};
use crate::error::{Error, Result};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// A place of the rationals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Place {
    Finite(u64),
    Infinite,
}

/// The algebra with `i² = a`, `j² = b`, `ij = -ji = k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuaternionAlgebra {
    pub a: i64,
    pub b: i64,
    pub ramified_finite: Vec<u64>,
}

/// Elements are coordinate vectors in the basis `1, i, j, k`.
pub type Quat = Vec<Rational>;

fn split_p(n: i64, p: i64) -> (u32, i64) {
    let mut n = n;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    (v, n)
}

/// Local Hilbert symbol `(a, b)_v`.
pub fn hilbert_symbol(a: i64, b: i64, place: Place) -> i8 {
    assert!(a != 0 && b != 0);
    match place {
        Place::Infinite => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let (al, u) = split_p(a, 2);
            let (be, v) = split_p(b, 2);
            let eps = |x: i64| ((x.rem_euclid(4) - 1) / 2) as i64;
            let omega = |x: i64| {
                let r = x.rem_euclid(8);
                if r == 3 || r == 5 {
                    1
                } else {
                    0
                }
            };
            let e = eps(u) * eps(v) + al as i64 * omega(v) + be as i64 * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Finite(p) => {
            let pi = p as i64;
            let (al, u) = split_p(a, pi);
            let (be, v) = split_p(b, pi);
            let mut s: i8 = 1;
            if (al as i64 * be as i64) % 2 == 1 && (p % 4 == 3) {
                s = -s;
            }
            if be % 2 == 1 {
                s *= legendre(u, p);
            }
            if al % 2 == 1 {
                s *= legendre(v, p);
            }
            s
        }
    }
}

/// Finite primes where `(a, b)` ramifies.
pub fn ramified_primes(a: i64, b: i64) -> Vec<u64> {
    let mut cands = prime_divisors(2 * (a * b).unsigned_abs());
    cands.sort();
    cands.dedup();
    cands
        .into_iter()
        .filter(|&p| hilbert_symbol(a, b, Place::Finite(p)) == -1)
        .collect()
}

impl QuaternionAlgebra {
    pub fn new(a: i64, b: i64) -> Result<QuaternionAlgebra> {
        if a >= 0 || b >= 0 {
            return Err(Error::ScopeError("algebra must be definite".into()));
        }
        Ok(QuaternionAlgebra {
            a,
            b,
            ramified_finite: ramified_primes(a, b),
        })
    }

    pub fn disc(&self) -> u64 {
        self.ramified_finite.iter().product()
    }

    pub fn mul(&self, x: &[Rational], y: &[Rational]) -> Quat {
        let a = Rational::from_integer(self.a.into());
        let b = Rational::from_integer(self.b.into());
        let ab = &a * &b;
        let (x0, x1, x2, x3) = (&x[0], &x[1], &x[2], &x[3]);
        let (y0, y1, y2, y3) = (&y[0], &y[1], &y[2], &y[3]);
        vec![
            x0 * y0 + &a * x1 * y1 + &b * x2 * y2 - &ab * x3 * y3,
            x0 * y1 + x1 * y0 - &b * x2 * y3 + &b * x3 * y2,
            x0 * y2 + x2 * y0 + &a * x1 * y3 - &a * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        ]
    }

    pub fn conj(&self, x: &[Rational]) -> Quat {
        vec![x[0].clone(), -x[1].clone(), -x[2].clone(), -x[3].clone()]
    }

    pub fn norm(&self, x: &[Rational]) -> Rational {
        let a = Rational::from_integer(self.a.into());
        let b = Rational::from_integer(self.b.into());
        &x[0] * &x[0] - &a * &x[1] * &x[1] - &b * &x[2] * &x[2] + &a * &b * &x[3] * &x[3]
    }

    pub fn trace(&self, x: &[Rational]) -> Rational {
        &x[0] + &x[0]
    }

    pub fn inverse(&self, x: &[Rational]) -> Quat {
        let n = self.norm(x);
        assert!(!n.is_zero());
        self.conj(x).into_iter().map(|c| c / &n).collect()
    }

    /// Bilinear form `(x, y) ↦ tr(x·conj(y))`, equal to `2 n(x, y)`.
    pub fn trace_pairing(&self, x: &[Rational], y: &[Rational]) -> Rational {
        let a = Rational::from_integer(self.a.into());
        let b = Rational::from_integer(self.b.into());
        let two = Rational::from_integer(2.into());
        &two * (&x[0] * &y[0] - &a * &x[1] * &y[1] - &b * &x[2] * &y[2] + &a * &b * &x[3] * &y[3])
    }

    /// Discriminant `Δ(v) = tr(v)² − 4 n(v)` as a function on pure quaternions.
    pub fn pure_disc_gram(&self) -> Vec<Vec<Rational>> {
        let f = |x: i64| Rational::from_integer(x.into());
        vec![
            vec![f(4 * self.a), f(0), f(0)],
            vec![f(0), f(4 * self.b), f(0)],
            vec![f(0), f(0), f(-4 * self.a * self.b)],
        ]
    }
}

/// Search for a definite algebra ramified exactly at `s` (finite part).
pub fn algebra_for_ramification(s: &[u64]) -> Result<QuaternionAlgebra> {
    let mut target: Vec<u64> = s.to_vec();
    target.sort();
    target.dedup();
    if target.is_empty() || target.len() % 2 == 0 {
        return Err(Error::ScopeError(format!(
            "ramification set {target:?} must have odd size"
        )));
    }
    let prod: i64 = target.iter().map(|&p| p as i64).product();
    // Prefer b = -prod·m so that saturation only touches small extra primes.
    for bound in [50i64, 400, 2000] {
        let mut cands: Vec<(i64, i64)> = Vec::new();
        for a in 1..=bound.min(60) {
            for m in 1..=bound / prod.max(1) + 1 {
                cands.push((-a, -prod * m));
            }
        }
        for a in 1..=bound {
            for b in a..=bound {
                cands.push((-a, -b));
            }
        }
        cands.sort_by_key(|&(a, b)| {
            let extra: u64 = prime_divisors((a * b).unsigned_abs())
                .into_iter()
                .filter(|p| *p != 2 && !target.contains(p))
                .max()
                .unwrap_or(0);
            (extra, a.abs() + b.abs())
        });
        for (a, b) in cands {
            if ramified_primes(a, b) == target {
                return QuaternionAlgebra::new(a, b);
            }
        }
    }
    Err(Error::SearchExhausted(format!(
        "no algebra ramified at {target:?}"
    )))
}

/// Finite part of `Σ^l = {∞} ∪ {p | N : χ^l(p)^{v_p(N)} ε_g(p) = −1}`.
pub fn sigma_l(n: u64, eps_g: &BTreeMap<u64, i8>, l: &Rational) -> Result<Vec<u64>> {
    let dk = crate::arith::fundamental_pair(l).dk;
    let mut out = Vec::new();
    for (p, e) in crate::arith::factor(n) {
        let eg = *eps_g
            .get(&p)
            .ok_or_else(|| Error::ScopeError(format!("missing sign at p = {p}")))?;
        let chi = kronecker(dk, p as i64).pow(e);
        if chi * eg == -1 {
            out.push(p);
        }
    }
    if out.len() % 2 == 0 {
        return Err(Error::ParityViolation { finite: out });
    }
    Ok(out)
}
