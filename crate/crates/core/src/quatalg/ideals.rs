//! Left ideal classes of an order, found by `q`-neighbor traversal and
//! certified by the mass formula.
//!
//! Representatives `I_x` are left `R`-ideals (`R·I = I`) up to `I ~ I·γ`;
//! the order attached to a class is the right order `R_x = O_r(I_x)`.

use super::algebra::{Quat, QuaternionAlgebra};
use super::order::{
    combine, conj_lattice, ideal_norm, norm_form_gram, product, right_order, two_sided_ideal,
    QuaternionOrder,
};
use crate::arith::{factor, is_prime, Rational};
use crate::enumerate::ShortVectors;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{rank_mod, rref_mod, QMat};
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

/// Complete set of class representatives.
#[derive(Clone, Debug)]
pub struct IdealClassSet {
    pub order: QuaternionOrder,
    pub ideals: Vec<Lattice>,
    pub norms: Vec<Rational>,
    pub unit_orders: Vec<u64>,
    pub right_orders: Vec<Lattice>,
    /// Prime used for the neighbor traversal.
    pub neighbor_prime: u64,
}

/// Eichler mass `(1/12) Π_{p | disc B}(p−1) Π_{p | N/disc B}(p+1)`.
pub fn eichler_mass(order: &QuaternionOrder) -> Rational {
    let mut m = Rational::new(BigInt::one(), BigInt::from(12));
    for (p, _) in factor(order.disc) {
        let f = if order.algebra.ramified_finite.contains(&p) {
            p - 1
        } else {
            p + 1
        };
        m *= Rational::from_integer(BigInt::from(f));
    }
    m
}

/// Number of units `|R^×| / 2` of an order.
pub fn unit_count(alg: &QuaternionAlgebra, r: &Lattice) -> u64 {
    let g = norm_form_gram(alg, r, &Rational::one());
    ShortVectors::new(&g).with_value(2).len() as u64 / 2
}

/// The units of an order, as coordinate vectors in its basis.
pub fn units(alg: &QuaternionAlgebra, r: &Lattice) -> Vec<Vec<i64>> {
    let g = norm_form_gram(alg, r, &Rational::one());
    ShortVectors::new(&g).with_value(2)
}

/// Lattice `conj(I)·J` with the scale `N(I)·N(J)` normalizing its norm form.
pub fn connecting_lattice(
    alg: &QuaternionAlgebra,
    i: &Lattice,
    ni: &Rational,
    j: &Lattice,
    nj: &Rational,
) -> (Lattice, Rational) {
    (product(alg, &conj_lattice(alg, i), j), ni * nj)
}

/// If `J = I·γ`, returns `γ`.
pub fn equivalence(
    alg: &QuaternionAlgebra,
    i: &Lattice,
    ni: &Rational,
    j: &Lattice,
    nj: &Rational,
) -> Option<Quat> {
    let (l, s) = connecting_lattice(alg, i, ni, j, nj);
    let g = norm_form_gram(alg, &l, &s);
    let sv = ShortVectors::new(&g);
    let mut found = None;
    sv.for_each(2, |x, q| {
        if q == 2 && found.is_none() {
            found = Some(x.to_vec());
        }
    });
    found.map(|c| combine(&l, &c).into_iter().map(|v| v / ni).collect())
}

/// Class invariant: counts of `n(x)/N(I) = m` for `m ≤ 4` on the ideal.
fn invariant(alg: &QuaternionAlgebra, i: &Lattice, ni: &Rational) -> Vec<usize> {
    let g = norm_form_gram(alg, i, ni);
    let mut counts = vec![0usize; 9];
    ShortVectors::new(&g).for_each(8, |_, q| counts[q as usize] += 1);
    counts
}

/// Matrix (over `Z`) of left multiplication by `r` on the basis of `i`.
fn left_mult_matrix(alg: &QuaternionAlgebra, r: &[Rational], i: &Lattice) -> Vec<Vec<i64>> {
    i.basis
        .iter()
        .map(|b| {
            i.coords(&alg.mul(r, b))
                .into_iter()
                .map(|c| {
                    assert!(c.is_integer(), "ideal not stable under the order");
                    c.to_integer().to_i64().unwrap()
                })
                .collect()
        })
        .collect()
}

/// All 2-dimensional subspaces of `F_q^4` in reduced echelon form.
fn planes(q: i64) -> Vec<[Vec<i64>; 2]> {
    let mut out = Vec::new();
    for p1 in 0..4 {
        for p2 in p1 + 1..4 {
            let free1: Vec<usize> = (p1 + 1..4).filter(|&c| c != p2).collect();
            let free2: Vec<usize> = (p2 + 1..4).collect();
            let n1 = q.pow(free1.len() as u32);
            let n2 = q.pow(free2.len() as u32);
            for a in 0..n1 {
                for b in 0..n2 {
                    let mut r1 = vec![0i64; 4];
                    let mut r2 = vec![0i64; 4];
                    r1[p1] = 1;
                    r2[p2] = 1;
                    let mut t = a;
                    for &c in &free1 {
                        r1[c] = t % q;
                        t /= q;
                    }
                    let mut t = b;
                    for &c in &free2 {
                        r2[c] = t % q;
                        t /= q;
                    }
                    out.push([r1, r2]);
                }
            }
        }
    }
    out
}

/// The `q + 1` left sub-ideals of `I` of index `q²` (norm `q·N(I)`).
pub fn neighbors(order: &QuaternionOrder, i: &Lattice, q: u64) -> Vec<Lattice> {
    let alg = &order.algebra;
    let qi = q as i64;
    let mats: Vec<Vec<Vec<i64>>> = order
        .basis()
        .iter()
        .map(|r| left_mult_matrix(alg, r, i))
        .collect();
    let qr = Rational::from_integer(BigInt::from(q));
    let mut out = Vec::new();
    for plane in planes(qi) {
        let stable = mats.iter().all(|m| {
            plane.iter().all(|u| {
                let img: Vec<i64> = (0..4)
                    .map(|c| (0..4).map(|k| u[k] * m[k][c]).sum::<i64>().rem_euclid(qi))
                    .collect();
                rank_mod(&[plane[0].clone(), plane[1].clone(), img], qi) == 2
            })
        });
        if !stable {
            continue;
        }
        let mut gens: QMat = i
            .basis
            .iter()
            .map(|b| b.iter().map(|v| v * &qr).collect())
            .collect();
        gens.push(combine(i, &plane[0]));
        gens.push(combine(i, &plane[1]));
        out.push(Lattice::from_generators(&gens, 4));
    }
    debug_assert_eq!(out.len() as u64, q + 1);
    out
}

/// Smallest prime not dividing `n·avoid`.
pub fn neighbor_prime(n: u64, avoid: u64) -> u64 {
    (2..)
        .find(|&q| is_prime(q) && n % q != 0 && avoid % q != 0)
        .unwrap()
}

/// Class set computed with the smallest admissible neighbor prime.
pub fn right_ideal_classes(order: &QuaternionOrder) -> Result<IdealClassSet> {
    classes_with_prime(order, neighbor_prime(order.disc, 1))
}

/// Class set whose representatives have norms that are powers of `q`.
pub fn classes_with_prime(order: &QuaternionOrder, q: u64) -> Result<IdealClassSet> {
    let alg = &order.algebra;
    let target = eichler_mass(order);
    let r = order.lattice.clone();
    let one = Rational::one();
    let t0 = unit_count(alg, &r);
    let mut ideals = vec![r.clone()];
    let mut norms = vec![one.clone()];
    let mut invs = vec![invariant(alg, &r, &one)];
    let mut units_v = vec![t0];
    let mut rights = vec![r.clone()];
    let mut mass = Rational::new(BigInt::one(), BigInt::from(t0));
    let mut head = 0;
    let qr = Rational::from_integer(BigInt::from(q));
    while mass < target && head < ideals.len() {
        let cur = ideals[head].clone();
        let ncur = &norms[head] * &qr;
        head += 1;
        let cands = neighbors(order, &cur, q);
        // invariants and equivalence tests in parallel, acceptance in order
        let infos: Vec<(Lattice, Vec<usize>)> = cands
            .into_par_iter()
            .map(|j| {
                let inv = invariant(alg, &j, &ncur);
                (j, inv)
            })
            .collect();
        for (j, inv) in infos {
            let known = (0..ideals.len()).into_par_iter().any(|k| {
                invs[k] == inv && equivalence(alg, &ideals[k], &norms[k], &j, &ncur).is_some()
            });
            if known {
                continue;
            }
            let ro = right_order(alg, &j);
            let t = unit_count(alg, &ro);
            mass += Rational::new(BigInt::one(), BigInt::from(t));
            ideals.push(j);
            norms.push(ncur.clone());
            invs.push(inv);
            units_v.push(t);
            rights.push(ro);
            if mass > target {
                break;
            }
        }
    }
    if mass != target {
        return Err(Error::MassMismatch {
            found: crate::arith::fmt_rat(&mass),
            expected: crate::arith::fmt_rat(&target),
        });
    }
    Ok(IdealClassSet {
        order: order.clone(),
        ideals,
        norms,
        unit_orders: units_v,
        right_orders: rights,
        neighbor_prime: q,
    })
}

impl IdealClassSet {
    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    pub fn algebra(&self) -> &QuaternionAlgebra {
        &self.order.algebra
    }

    pub fn mass(&self) -> Rational {
        self.unit_orders
            .iter()
            .map(|&t| Rational::new(BigInt::one(), BigInt::from(t)))
            .fold(Rational::zero(), |a, b| a + b)
    }

    /// Index `y` and `γ` with `I = I_y·γ`.
    pub fn locate(&self, i: &Lattice, ni: &Rational) -> Option<(usize, Quat)> {
        let alg = self.algebra();
        (0..self.len())
            .find_map(|k| equivalence(alg, &self.ideals[k], &self.norms[k], i, ni).map(|g| (k, g)))
    }

    /// Permutation of classes induced by `I ↦ J_p·I`, with connecting elements.
    pub fn atkin_lehner(&self, p: u64) -> Result<(Vec<usize>, Vec<Quat>)> {
        let alg = self.algebra();
        let j = two_sided_ideal(alg, &self.order.lattice, p)?;
        let pr = Rational::from_integer(BigInt::from(p));
        let mut perm = Vec::new();
        let mut gammas = Vec::new();
        for (i, n) in self.ideals.iter().zip(&self.norms) {
            let k = product(alg, &j, i);
            let nk = n * &pr;
            debug_assert_eq!(ideal_norm(&self.order.lattice, &k), nk);
            let (y, g) = self
                .locate(&k, &nk)
                .ok_or_else(|| Error::SearchExhausted("Atkin–Lehner image class".into()))?;
            perm.push(y);
            gammas.push(g);
        }
        Ok((perm, gammas))
    }

    /// Rebuilds with representatives replaced by equivalent ideals `I·γ`.
    pub fn with_representatives(&self, ideals: Vec<Lattice>) -> IdealClassSet {
        let alg = self.algebra().clone();
        let norms: Vec<Rational> = ideals
            .iter()
            .map(|i| ideal_norm(&self.order.lattice, i))
            .collect();
        let rights: Vec<Lattice> = ideals.iter().map(|i| right_order(&alg, i)).collect();
        IdealClassSet {
            order: self.order.clone(),
            ideals,
            norms,
            unit_orders: self.unit_orders.clone(),
            right_orders: rights,
            neighbor_prime: self.neighbor_prime,
        }
    }
}

/// Echelon helper reexported for tests of neighbor planes.
pub fn plane_count(q: i64) -> usize {
    let ps = planes(q);
    debug_assert!(ps.iter().all(|p| {
        let mut m = vec![p[0].clone(), p[1].clone()];
        rref_mod(&mut m, q).len() == 2
    }));
    ps.len()
}
