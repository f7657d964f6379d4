//! Central values of quadratic twists and the ratio test against theta coefficients.

use crate::arith::{
    factor, fundamental_pair, is_fundamental, is_prime, kronecker, legendre, primes_up_to, sign,
    to_f64, Rational,
};
use crate::brandt::{al_signs, eigenvalues_from_theta, FormSpace, QuaternionicForm};
use crate::error::{Error, Result};
use crate::thetalift::CoefficientTable;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Hecke eigenvalues of a newform `g` of weight `2 + 2k` and squarefree level `N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EigenSystem {
    pub n: u64,
    pub k: u32,
    pub ap: BTreeMap<u64, i64>,
    pub eps: BTreeMap<u64, i8>,
    pub sign_fe: i8,
}

impl EigenSystem {
    /// From `a_p` (`p ∤ N`) and Atkin–Lehner signs `ε_g(p)`; sets `a_p = −ε_g(p)p^k` at `p | N`.
    pub fn new(n: u64, k: u32, mut ap: BTreeMap<u64, i64>, eps: BTreeMap<u64, i8>) -> EigenSystem {
        for (&p, &e) in &eps {
            ap.insert(p, -(e as i64) * (p as i64).pow(k));
        }
        let prod: i8 = eps.values().product();
        let sign_fe = if k % 2 == 0 { -prod } else { prod };
        EigenSystem {
            n,
            k,
            ap,
            eps,
            sign_fe,
        }
    }

    /// Reads `a_p` for `p ≤ bound` off a `k = 0` Brandt eigenform; `ε_g` comes from the
    /// Atkin–Lehner signs `κ_p` (`ε_g = −κ_p` at ramified `p`, `κ_p` at split `p`).
    pub fn from_brandt(space: &FormSpace, f: &QuaternionicForm, bound: u64) -> Result<EigenSystem> {
        let vals = eigenvalues_from_theta(space, f, bound)?;
        let mut ap = BTreeMap::new();
        for p in primes_up_to(bound) {
            if let Some(v) = &vals[p as usize] {
                let a = v
                    .to_integer()
                    .to_i64()
                    .filter(|_| v.is_integer())
                    .ok_or(Error::IrrationalEigenvalue { p })?;
                ap.insert(p, a);
            }
        }
        let ram = &space.classes.algebra().ramified_finite;
        let eps = al_signs(space, f)?
            .into_iter()
            .map(|(p, s)| (p, if ram.contains(&p) { -s } else { s }))
            .collect();
        Ok(EigenSystem::new(space.classes.order.disc, 0, ap, eps))
    }

    /// Functional-equation sign of `g ⊗ χ_d` for a fundamental `d` prime to `N`.
    pub fn twist_sign(&self, d: i64) -> i8 {
        if d == 1 {
            return self.sign_fe;
        }
        self.sign_fe * kronecker(d, -(self.n as i64))
    }
}

/// `a_n` for `n ≤ bound` by multiplicativity and the Hecke recursion.
pub fn extend_coefficients(es: &EigenSystem, bound: usize) -> Result<Vec<i128>> {
    let mut a = vec![0i128; bound + 1];
    if bound >= 1 {
        a[1] = 1;
    }
    let w = 2 * es.k + 1;
    // prime powers first
    for p in primes_up_to(bound as u64) {
        let ap = *es.ap.get(&p).ok_or(Error::MissingPrime(p))? as i128;
        let bad = es.n % p == 0;
        let pw = (p as i128).pow(w);
        let (mut prev, mut cur) = (1i128, ap);
        let mut q = p as usize;
        loop {
            a[q] = cur;
            let next = if bad { cur * ap } else { ap * cur - pw * prev };
            prev = cur;
            cur = next;
            match q.checked_mul(p as usize) {
                Some(n) if n <= bound => q = n,
                _ => break,
            }
        }
    }
    for n in 2..=bound {
        let f = factor(n as u64);
        if f.len() > 1 {
            a[n] = f.iter().map(|&(p, e)| a[(p as usize).pow(e)]).product();
        }
    }
    Ok(a)
}

/// A real number with an absolute error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LValue {
    pub value: f64,
    pub error: f64,
    pub terms: usize,
}

/// `e^{−x} Σ_{j ≤ k} x^j / j!`.
fn cutoff(x: f64, k: u32) -> f64 {
    let mut t = 1.0;
    let mut s = 1.0;
    for j in 1..=k {
        t *= x / j as f64;
        s += t;
    }
    (-x).exp() * s
}

/// Rigorous bound for `Σ_{n > m} 2·|a_n χ(n)| n^{−(k+1)} V(cn)`, using `d(n) ≤ 2√n`.
fn tail(c: f64, m: usize, k: u32) -> f64 {
    4.0 * (k + 1) as f64 * cutoff(c * m as f64, k) / c
}

/// `L(1/2, g ⊗ χ_d)` by the smoothed approximate functional equation; `d` a fundamental
/// discriminant prime to `N` (`d = 1` for `g` itself). Uses `terms_cap` coefficients at most.
pub fn twisted_central_value(
    es: &EigenSystem,
    coeffs: &[i128],
    d: i64,
    precision: f64,
) -> Result<LValue> {
    if num_integer::gcd(d.unsigned_abs(), es.n) != 1 {
        return Err(Error::ScopeError(format!("twist {d} not prime to N")));
    }
    if es.twist_sign(d) == -1 {
        return Ok(LValue {
            value: 0.0,
            error: 0.0,
            terms: 0,
        });
    }
    let q = es.n as f64 * (d as f64) * (d as f64);
    let c = 2.0 * std::f64::consts::PI / q.sqrt();
    let cap = coeffs.len() - 1;
    let mut m = 1;
    while tail(c, m, es.k) > precision / 2.0 {
        m += 1;
        if m > cap {
            return Err(Error::PrecisionUnreachable {
                target: precision,
                cap,
            });
        }
    }
    let mut s = 0.0f64;
    let mut abs = 0.0f64;
    for (n, &an) in coeffs.iter().enumerate().take(m + 1).skip(1) {
        let chi = kronecker(d, n as i64);
        if chi == 0 || an == 0 {
            continue;
        }
        let t =
            chi as f64 * an as f64 / (n as f64).powi(es.k as i32 + 1) * cutoff(c * n as f64, es.k);
        s += t;
        abs += t.abs();
    }
    let rounding = abs * (m as f64) * f64::EPSILON * 4.0;
    Ok(LValue {
        value: 2.0 * s,
        error: tail(c, m, es.k) + 2.0 * rounding,
        terms: m,
    })
}

/// Coefficient count needed for `precision` at twists up to `|d| ≤ range`.
pub fn terms_needed(n: u64, k: u32, range: u64, precision: f64) -> usize {
    let q = n as f64 * (range * range) as f64;
    let c = 2.0 * std::f64::consts::PI / q.sqrt();
    let mut m = 1;
    while tail(c, m, k) > precision / 2.0 {
        m += 1;
    }
    m
}

/// Permitted fundamental `(D, 1)`: `sgn(D) = −sgn(l)`, `|dK| ≤ range`, `dK` prime to `2N·f(l)`
/// and `χ_D(p) = ε_g(p)` at every `p | N` of odd valuation.
pub fn permitted_discriminants(
    n: u64,
    eps_g: &BTreeMap<u64, i8>,
    l: &Rational,
    range: u64,
) -> Vec<(Rational, Rational)> {
    let s = -sign(l);
    let fl = fundamental_pair(l).dk.unsigned_abs();
    let nf = factor(n);
    (1..=range as i64)
        .map(|m| s * m)
        .filter(|&d| is_fundamental(d) && d != 1)
        .filter(|&d| num_integer::gcd(d.unsigned_abs(), 2 * n * fl) == 1)
        .filter(|&d| {
            nf.iter()
                .all(|&(p, e)| e % 2 == 0 || kronecker(d, p as i64) == eps_g[&p])
        })
        .map(|d| {
            (
                Rational::from_integer(d.into()),
                Rational::from_integer(1.into()),
            )
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRow {
    pub d: String,
    pub a: String,
    pub lambda: String,
    pub l_l: f64,
    pub l_d: f64,
    pub l_d_error: f64,
    pub ratio: Option<f64>,
    pub deviation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioReport {
    pub l_l: LValue,
    pub rows: Vec<RatioRow>,
    /// Largest `|r / r̄ − 1|` over rows with a ratio; `None` when no row has one.
    pub constancy: Option<f64>,
    pub zero_matches: Vec<bool>,
    pub m_k: u64,
    pub h_f: u64,
}

impl RatioReport {
    pub fn all_zero_matched(&self) -> bool {
        self.zero_matches.iter().all(|&b| b)
    }

    pub fn nonzero_rows(&self) -> usize {
        self.rows.iter().filter(|r| r.ratio.is_some()).count()
    }

    /// Delimited table with a header line.
    pub fn to_tsv(&self) -> String {
        let mut s = String::from("D\ta\tlambda\tL_l\tL_D\tratio\tdeviation\n");
        let f = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.12e}"));
        for r in &self.rows {
            s += &format!(
                "{}\t{}\t{}\t{:.12e}\t{:.12e}\t{}\t{}\n",
                r.d,
                r.a,
                r.lambda,
                r.l_l,
                r.l_d,
                f(r.ratio),
                f(r.deviation)
            );
        }
        s
    }
}

/// Ratios `L(1/2, g⊗χ^l)·L(1/2, g⊗χ^D)·(−lD)^{k+1/2} / (N(ab)·λ²)` over permitted `D`.
pub fn waldspurger_report(
    table: &CoefficientTable,
    es: &EigenSystem,
    coeffs: &[i128],
    range: u64,
    precision: f64,
) -> Result<RatioReport> {
    let cfg = &table.config;
    let l = &cfg.l;
    let dl = fundamental_pair(l).dk;
    let l_l = twisted_central_value(es, coeffs, dl, precision)?;
    let ds = permitted_discriminants(es.n, &es.eps, l, range);
    let vals: Vec<Result<LValue>> = ds
        .par_iter()
        .map(|(d, _)| {
            twisted_central_value(es, coeffs, d.to_integer().to_i64().unwrap(), precision)
        })
        .collect();
    let mut rows = Vec::new();
    let mut zero_matches = Vec::new();
    let mut ratios = Vec::new();
    let mut max_err: f64 = l_l.error;
    let mut smallest = f64::INFINITY;
    for ((d, a), v) in ds.iter().zip(vals) {
        let v = v?;
        let lam = table.get(d, a)?;
        let floor = precision.max(v.error);
        let l_zero = v.value.abs() < floor;
        max_err = max_err.max(v.error);
        if !l_zero {
            smallest = smallest.min(v.value.abs());
        }
        zero_matches.push(lam.is_zero() == l_zero);
        let ratio = (!lam.is_zero() && !l_zero).then(|| {
            let mld = to_f64(&(-(l * d)));
            let nab = to_f64(&(a * &cfg.b));
            let lf = to_f64(&lam);
            l_l.value * v.value * mld.powf(cfg.k as f64 + 0.5) / (nab * lf * lf)
        });
        if let Some(r) = ratio {
            ratios.push(r);
        }
        rows.push(RatioRow {
            d: crate::arith::fmt_rat(d),
            a: crate::arith::fmt_rat(a),
            lambda: crate::arith::fmt_rat(&lam),
            l_l: l_l.value,
            l_d: v.value,
            l_d_error: v.error,
            ratio,
            deviation: None,
        });
    }
    if l_l.value.abs() >= precision.max(l_l.error) {
        smallest = smallest.min(l_l.value.abs());
    }
    if smallest.is_finite() && max_err > 0.01 * smallest {
        return Err(Error::InsufficientPrecision {
            error: max_err,
            smallest,
        });
    }
    let constancy = if ratios.is_empty() {
        None
    } else {
        let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
        for r in rows.iter_mut() {
            r.deviation = r.ratio.map(|x| (x / mean - 1.0).abs());
        }
        Some(
            ratios
                .iter()
                .map(|x| (x / mean - 1.0).abs())
                .fold(0.0, f64::max),
        )
    };
    Ok(RatioReport {
        l_l,
        rows,
        constancy,
        zero_matches,
        m_k: 1,
        h_f: 1,
    })
}

/// An elliptic curve `y² + a1 xy + a3 y = x³ + a2 x² + a4 x + a6`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Curve {
    pub label: &'static str,
    pub conductor: u64,
    pub ainvs: [i64; 5],
}

pub const CURVE_11A: Curve = Curve {
    label: "11a",
    conductor: 11,
    ainvs: [0, -1, 1, -10, -20],
};
pub const CURVE_37A: Curve = Curve {
    label: "37a",
    conductor: 37,
    ainvs: [0, 0, 1, -1, 0],
};

impl Curve {
    /// `#E(F_p)` by counting solutions of the completed square.
    pub fn count_points(&self, p: u64) -> u64 {
        let [a1, a2, a3, a4, a6] = self.ainvs;
        let pi = p as i64;
        let mut count = 1u64;
        for x in 0..pi {
            for y in 0..pi {
                let lhs = y * y + a1 * x * y + a3 * y;
                let rhs = x * x * x + a2 * x * x + a4 * x + a6;
                if (lhs - rhs).rem_euclid(pi) == 0 {
                    count += 1;
                }
            }
        }
        count
    }

    /// `a_p = p + 1 − #E(F_p)` for good `p`, via the Legendre symbol (odd `p`).
    pub fn ap(&self, p: u64) -> i64 {
        assert!(is_prime(p));
        if p == 2 {
            return 3 - self.count_points(2) as i64;
        }
        let [a1, a2, a3, a4, a6] = self.ainvs;
        let pi = p as i64;
        // (2y + a1 x + a3)² = 4x³ + b2 x² + 2 b4 x + b6
        let b2 = a1 * a1 + 4 * a2;
        let b4 = a1 * a3 + 2 * a4;
        let b6 = a3 * a3 + 4 * a6;
        let mut s = 0i64;
        for x in 0..pi {
            let r = (4 * x * x * x + b2 * x * x + 2 * b4 * x + b6).rem_euclid(pi);
            s += legendre(r, p) as i64;
        }
        -s
    }
}

/// Sum of `a_n χ(n) / n^{k+1}` up to `m`; used to compare cutoffs.
pub fn partial_value(es: &EigenSystem, coeffs: &[i128], d: i64, m: usize) -> f64 {
    let q = es.n as f64 * (d as f64) * (d as f64);
    let c = 2.0 * std::f64::consts::PI / q.sqrt();
    let mut s = 0.0;
    for (n, &an) in coeffs.iter().enumerate().take(m + 1).skip(1) {
        let chi = kronecker(d, n as i64);
        s += chi as f64 * an as f64 / (n as f64).powi(es.k as i32 + 1) * cutoff(c * n as f64, es.k);
    }
    2.0 * s
}
