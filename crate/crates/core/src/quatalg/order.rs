//! Orders in a definite quaternion algebra: maximal and Eichler orders.

use super::algebra::{Quat, QuaternionAlgebra};
use crate::arith::{is_squarefree, prime_divisors, Rational};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{det, inverse, mat_mul, QMat};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// An order, given by a lattice in the coordinates `1, i, j, k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuaternionOrder {
    pub algebra: QuaternionAlgebra,
    pub lattice: Lattice,
    pub disc: u64,
    pub eichler_invariants: BTreeMap<u64, i8>,
}

/// Serializable summary of an order.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct OrderSummary {
    pub a: i64,
    pub b: i64,
    pub basis: Vec<Vec<String>>,
    pub disc: u64,
    pub eichler_invariants: BTreeMap<u64, i8>,
}

pub(crate) fn one() -> Quat {
    let mut v = vec![Rational::zero(); 4];
    v[0] = Rational::one();
    v
}

/// Lattice spanned by all products `x·y`, `x ∈ I`, `y ∈ J`.
pub fn product(alg: &QuaternionAlgebra, i: &Lattice, j: &Lattice) -> Lattice {
    let mut gens = Vec::with_capacity(16);
    for x in &i.basis {
        for y in &j.basis {
            gens.push(alg.mul(x, y));
        }
    }
    Lattice::from_generators(&gens, 4)
}

pub fn conj_lattice(alg: &QuaternionAlgebra, i: &Lattice) -> Lattice {
    let g: QMat = i.basis.iter().map(|x| alg.conj(x)).collect();
    Lattice::from_generators(&g, 4)
}

/// Square root of `|det tr(e_i e_j)|` for a lattice containing 1.
pub fn reduced_disc(alg: &QuaternionAlgebra, l: &Lattice) -> Rational {
    let g: QMat = l
        .basis
        .iter()
        .map(|x| l.basis.iter().map(|y| alg.trace(&alg.mul(x, y))).collect())
        .collect();
    det(&g).abs_sq()
}

trait AbsSqrt {
    fn abs_sq(&self) -> Rational;
}

impl AbsSqrt for Rational {
    /// Exact square root of `|self|` (panics if not a square).
    fn abs_sq(&self) -> Rational {
        let n = self.numer().magnitude().sqrt();
        let d = self.denom().magnitude().sqrt();
        assert_eq!(&n * &n, *self.numer().magnitude(), "not a square");
        assert_eq!(&d * &d, *self.denom().magnitude(), "not a square");
        Rational::new(BigInt::from(n), BigInt::from(d))
    }
}

fn is_integral_elt(alg: &QuaternionAlgebra, x: &[Rational]) -> bool {
    alg.trace(x).is_integer() && alg.norm(x).is_integer()
}

/// Checks that `l` contains 1, is closed under products and integral.
pub fn is_order(alg: &QuaternionAlgebra, l: &Lattice) -> bool {
    if !l.contains(&one()) {
        return false;
    }
    for x in &l.basis {
        if !is_integral_elt(alg, x) {
            return false;
        }
        for y in &l.basis {
            if !l.contains(&alg.mul(x, y)) {
                return false;
            }
        }
    }
    true
}

/// Multiplicative closure of a lattice, or `None` if it leaves the integral elements.
fn ring_closure(alg: &QuaternionAlgebra, l: &Lattice) -> Option<Lattice> {
    let mut cur = l.clone();
    for _ in 0..8 {
        for x in &cur.basis {
            if !is_integral_elt(alg, x) {
                return None;
            }
        }
        let next = cur.sum(&product(alg, &cur, &cur));
        if next == cur {
            return Some(cur);
        }
        cur = next;
    }
    None
}

/// Right-multiplication stabilizer `{x : I·x ⊆ I}`.
pub fn right_order(alg: &QuaternionAlgebra, i: &Lattice) -> Lattice {
    stabilizer(alg, i, true)
}

/// Left-multiplication stabilizer `{x : x·I ⊆ I}`.
pub fn left_order(alg: &QuaternionAlgebra, i: &Lattice) -> Lattice {
    stabilizer(alg, i, false)
}

fn stabilizer(alg: &QuaternionAlgebra, i: &Lattice, right: bool) -> Lattice {
    let e: Vec<Quat> = (0..4)
        .map(|k| {
            let mut v = vec![Rational::zero(); 4];
            v[k] = Rational::one();
            v
        })
        .collect();
    let mut acc: Option<Lattice> = None;
    for b in &i.basis {
        // rows: image of e_k under the multiplication map
        let m: QMat = e
            .iter()
            .map(|ek| {
                if right {
                    alg.mul(b, ek)
                } else {
                    alg.mul(ek, b)
                }
            })
            .collect();
        let a = mat_mul(&m, i.inv());
        let gens = inverse(&a).expect("multiplication by a nonzero element is invertible");
        let l = Lattice::from_generators(&gens, 4);
        acc = Some(match acc {
            None => l,
            Some(prev) => prev.intersect(&l),
        });
    }
    acc.expect("nonempty basis")
}

/// Reduced norm of a lattice `I` relative to an order `O` with `O·I = I`.
pub fn ideal_norm(order: &Lattice, i: &Lattice) -> Rational {
    (i.det() / order.det()).abs_sq()
}

/// Integer Gram matrix of `x ↦ 2 n(x) / scale` on the lattice.
pub fn norm_form_gram(alg: &QuaternionAlgebra, l: &Lattice, scale: &Rational) -> Vec<Vec<i64>> {
    l.basis
        .iter()
        .map(|x| {
            l.basis
                .iter()
                .map(|y| {
                    let v = alg.trace_pairing(x, y) / scale;
                    assert!(v.is_integer(), "norm form not integral");
                    v.to_integer().to_i64().expect("Gram entry overflow")
                })
                .collect()
        })
        .collect()
}

/// Integer norm form of an order (values `2 n(x)`).
fn order_norm_gram(alg: &QuaternionAlgebra, l: &Lattice) -> Vec<Vec<i64>> {
    norm_form_gram(alg, l, &Rational::one())
}

/// Maximal order: saturate `Z⟨1, i, j, k⟩` until the discriminant is `disc(B)`.
pub fn maximal_order(alg: &QuaternionAlgebra) -> Result<Lattice> {
    let id: QMat = (0..4)
        .map(|k| {
            (0..4)
                .map(|c| {
                    if c == k {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    let mut cur = Lattice::from_generators(&id, 4);
    let target = Rational::from_integer(BigInt::from(alg.disc()));
    let mut guard = 0;
    while reduced_disc(alg, &cur) != target {
        guard += 1;
        if guard > 64 {
            return Err(Error::SearchExhausted("maximal order saturation".into()));
        }
        let d = reduced_disc(alg, &cur).to_integer().to_u64().unwrap();
        let bad: Vec<u64> = crate::arith::factor(d)
            .into_iter()
            .filter(|&(p, e)| e > u32::from(alg.ramified_finite.contains(&p)))
            .map(|(p, _)| p)
            .collect();
        let p = *bad
            .first()
            .ok_or_else(|| Error::SearchExhausted("no prime to saturate".into()))?;
        cur = saturate_at(alg, &cur, p)?;
    }
    Ok(cur)
}

fn saturate_at(alg: &QuaternionAlgebra, o: &Lattice, p: u64) -> Result<Lattice> {
    let g = order_norm_gram(alg, o);
    let pi = p as i64;
    let total = pi.pow(4);
    let prq = Rational::from_integer(BigInt::from(p));
    for idx in 1..total {
        let mut t = idx;
        let c: Vec<i64> = (0..4)
            .map(|_| {
                let v = t % pi;
                t /= pi;
                v
            })
            .collect();
        // x = (Σ c_k e_k)/p must have 2n(x) = cᵀGc/p² integral and even
        let q = crate::enumerate::eval_form(&g, &c);
        if q % (2 * pi * pi) != 0 {
            continue;
        }
        let x: Quat = (0..4)
            .map(|col| {
                let mut s = Rational::zero();
                for k in 0..4 {
                    s += Rational::from_integer(c[k].into()) * &o.basis[k][col];
                }
                s / &prq
            })
            .collect();
        if !alg.trace(&x).is_integer() {
            continue;
        }
        let mut gens = o.basis.clone();
        gens.push(x);
        let l = Lattice::from_generators(&gens, 4);
        if let Some(r) = ring_closure(alg, &l) {
            if is_order(alg, &r) && r != *o {
                return Ok(r);
            }
        }
    }
    Err(Error::SearchExhausted(format!(
        "no saturating element at p = {p}"
    )))
}

/// Two-sided ideal of reduced norm `p` in an order of discriminant divisible by `p`.
pub fn two_sided_ideal(alg: &QuaternionAlgebra, r: &Lattice, p: u64) -> Result<Lattice> {
    let g = order_norm_gram(alg, r);
    let pi = p as i64;
    let pr = Rational::from_integer(BigInt::from(p));
    let target = &pr * &pr;
    for idx in 1..pi.pow(4) {
        let mut t = idx;
        let c: Vec<i64> = (0..4)
            .map(|_| {
                let v = t % pi;
                t /= pi;
                v
            })
            .collect();
        if crate::enumerate::eval_form(&g, &c) % (2 * pi) != 0 {
            continue;
        }
        let x = combine(r, &c);
        let mut gens = Vec::new();
        for a in &r.basis {
            let ax = alg.mul(a, &x);
            for b in &r.basis {
                gens.push(alg.mul(&ax, b));
            }
            gens.push(a.iter().map(|v| v * &pr).collect());
        }
        let j = Lattice::from_generators(&gens, 4);
        if r.index_of(&j) == target {
            return Ok(j);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no two-sided ideal of norm {p}"
    )))
}

/// `Σ c_k · basis_k`.
pub fn combine(l: &Lattice, c: &[i64]) -> Quat {
    (0..4)
        .map(|col| {
            let mut s = Rational::zero();
            for k in 0..l.dim() {
                if c[k] != 0 {
                    s += Rational::from_integer(c[k].into()) * &l.basis[k][col];
                }
            }
            s
        })
        .collect()
}

/// Local Eichler invariant at `p | disc`: +1 if `R/J_p ≅ F_p × F_p`, −1 if it is `F_{p²}`.
pub fn eichler_invariant(alg: &QuaternionAlgebra, r: &Lattice, p: u64) -> Result<i8> {
    let j = two_sided_ideal(alg, r, p)?;
    let mut zj = j.basis.clone();
    zj.push(one());
    let zj = Lattice::from_generators(&zj, 4);
    let x = r
        .basis
        .iter()
        .find(|x| !zj.contains(x))
        .ok_or_else(|| Error::SearchExhausted("quotient generator".into()))?;
    let t = alg
        .trace(x)
        .to_integer()
        .to_i64()
        .unwrap()
        .rem_euclid(p as i64);
    let n = alg
        .norm(x)
        .to_integer()
        .to_i64()
        .unwrap()
        .rem_euclid(p as i64);
    let pi = p as i64;
    let splits = (0..pi).any(|s| (s * s - t * s + n).rem_euclid(pi) == 0);
    Ok(if splits { 1 } else { -1 })
}

impl QuaternionOrder {
    pub fn from_lattice(alg: &QuaternionAlgebra, l: Lattice) -> Result<QuaternionOrder> {
        if !is_order(alg, &l) {
            return Err(Error::ScopeError("lattice is not an order".into()));
        }
        let d = reduced_disc(alg, &l);
        let disc = d
            .to_integer()
            .to_u64()
            .filter(|_| d.is_integer())
            .ok_or_else(|| Error::ScopeError("non-integral discriminant".into()))?;
        let mut inv = BTreeMap::new();
        for p in prime_divisors(disc) {
            inv.insert(p, eichler_invariant(alg, &l, p)?);
        }
        Ok(QuaternionOrder {
            algebra: alg.clone(),
            lattice: l,
            disc,
            eichler_invariants: inv,
        })
    }

    pub fn basis(&self) -> &QMat {
        &self.lattice.basis
    }

    pub fn summary(&self) -> OrderSummary {
        OrderSummary {
            a: self.algebra.a,
            b: self.algebra.b,
            basis: self
                .lattice
                .basis
                .iter()
                .map(|r| r.iter().map(crate::arith::fmt_rat).collect())
                .collect(),
            disc: self.disc,
            eichler_invariants: self.eichler_invariants.clone(),
        }
    }
}

/// Eichler order of squarefree level `n` in the algebra `alg`.
pub fn eichler_order(alg: &QuaternionAlgebra, n: u64) -> Result<QuaternionOrder> {
    if !is_squarefree(n) {
        return Err(Error::ScopeError(format!("level {n} is not squarefree")));
    }
    let db = alg.disc();
    if n % db != 0
        || crate::arith::factor(n / db)
            .iter()
            .any(|&(p, _)| db % p == 0)
    {
        return Err(Error::ScopeError(format!(
            "level {n} incompatible with disc(B) = {db}"
        )));
    }
    let mut o = maximal_order(alg)?;
    for q in prime_divisors(n / db) {
        o = eichler_at(alg, &o, q)?;
    }
    let ord = QuaternionOrder::from_lattice(alg, o)?;
    if ord.disc != n {
        return Err(Error::ScopeError(format!(
            "constructed disc {} ≠ {n}",
            ord.disc
        )));
    }
    Ok(ord)
}

/// `O ∩ O_r(Oε + qO)` for a zero divisor `ε` modulo `q`.
fn eichler_at(alg: &QuaternionAlgebra, o: &Lattice, q: u64) -> Result<Lattice> {
    let g = order_norm_gram(alg, o);
    let qi = q as i64;
    let qr = Rational::from_integer(BigInt::from(q));
    let target = &qr * &qr;
    for idx in 1..qi.pow(4) {
        let mut t = idx;
        let c: Vec<i64> = (0..4)
            .map(|_| {
                let v = t % qi;
                t /= qi;
                v
            })
            .collect();
        if crate::enumerate::eval_form(&g, &c) % (2 * qi) != 0 {
            continue;
        }
        let eps = combine(o, &c);
        let mut gens: QMat = o.basis.iter().map(|a| alg.mul(a, &eps)).collect();
        gens.extend(
            o.basis
                .iter()
                .map(|a| a.iter().map(|v| v * &qr).collect::<Quat>()),
        );
        let i = Lattice::from_generators(&gens, 4);
        if o.index_of(&i) != target {
            continue;
        }
        let o2 = right_order(alg, &i);
        let e = o.intersect(&o2);
        let d = reduced_disc(alg, &e);
        if d == reduced_disc(alg, o) * &qr {
            return Ok(e);
        }
    }
    Err(Error::SearchExhausted(format!(
        "no Eichler refinement at q = {q}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quatalg::algebra::algebra_for_ramification;

    #[test]
    fn orders_have_expected_discriminants() {
        for (s, n) in [
            (vec![2u64], 2u64),
            (vec![3], 3),
            (vec![11], 11),
            (vec![37], 37),
            (vec![2], 6),
        ] {
            let b = algebra_for_ramification(&s).unwrap();
            let o = eichler_order(&b, n).unwrap();
            assert_eq!(o.disc, n);
            for (&p, &e) in &o.eichler_invariants {
                assert_eq!(e, if s.contains(&p) { -1 } else { 1 }, "p = {p}");
            }
        }
    }

    #[test]
    fn non_squarefree_level_is_rejected() {
        let b = algebra_for_ramification(&[2]).unwrap();
        assert!(matches!(eichler_order(&b, 18), Err(Error::ScopeError(_))));
    }
}
