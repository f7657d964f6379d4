//! The ternary lattice `L = R/Z` with the form `Δ(x) = tr(x)² − 4n(x)`, and the
//! local weight functions `w_p` on `L/pL`.
//!
//! A weight table is supported on the nonzero isotropic vectors of `Δ mod p`,
//! transforms under scalars by the Legendre symbol and under rotations by the
//! spinor norm. It is built by closing a single seed value under both actions.

use crate::arith::{fundamental_pair, legendre, prime_divisors, Rational};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::linalg::{inverse, mat_mul, QMat};
use crate::quatalg::QuaternionAlgebra;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::VecDeque;

/// `L = R/Z` realized as the pure parts of `R`.
#[derive(Clone, Debug)]
pub struct TernaryLattice {
    /// Basis in pure-quaternion coordinates `(i, j, k)`.
    pub basis: Lattice,
    /// `Δ(x) = xᵀ·gram·x` in lattice coordinates.
    pub gram: QMat,
    pub level: u64,
}

/// Pure part of a quaternion, as a 3-vector.
pub fn pure(x: &[Rational]) -> Vec<Rational> {
    x[1..4].to_vec()
}

impl TernaryLattice {
    /// Lattice spanned by the pure parts of `lattice`.
    pub fn from_order(alg: &QuaternionAlgebra, lattice: &Lattice) -> TernaryLattice {
        let gens: QMat = lattice.basis.iter().map(|x| pure(x)).collect();
        let basis = Lattice::from_generators(&gens, 3);
        let g0 = alg.pure_disc_gram();
        let gram = mat_mul(
            &mat_mul(&basis.basis, &g0),
            &crate::linalg::transpose(&basis.basis),
        );
        let inv = inverse(&gram).expect("Δ nondegenerate");
        let mut level = BigInt::one();
        for i in 0..3 {
            for j in 0..3 {
                let v = if i == j {
                    inv[i][j].clone()
                } else {
                    &inv[i][j] * Rational::from_integer(2.into())
                };
                level = level.lcm(v.denom());
            }
        }
        TernaryLattice {
            basis,
            gram,
            level: level.to_u64().unwrap(),
        }
    }

    /// Integer Gram matrix of the positive form `−2Δ`.
    pub fn neg_gram_int(&self) -> Vec<Vec<i64>> {
        self.gram
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| {
                        let v = -x * Rational::from_integer(2.into());
                        assert!(v.is_integer());
                        v.to_integer().to_i64().unwrap()
                    })
                    .collect()
            })
            .collect()
    }

    /// Coefficients `(Δ_ii, 2Δ_ij)` of `Δ` as an integral quadratic polynomial.
    pub fn delta_coeffs(&self) -> ([i64; 3], [i64; 3]) {
        let g = self.neg_gram_int();
        let diag = [-g[0][0] / 2, -g[1][1] / 2, -g[2][2] / 2];
        let off = [-g[0][1], -g[0][2], -g[1][2]];
        (diag, off)
    }

    /// `Δ` at integer coordinates.
    pub fn delta_int(&self, x: &[i64]) -> i64 {
        let (d, o) = self.delta_coeffs();
        d[0] * x[0] * x[0]
            + d[1] * x[1] * x[1]
            + d[2] * x[2] * x[2]
            + o[0] * x[0] * x[1]
            + o[1] * x[0] * x[2]
            + o[2] * x[1] * x[2]
    }

    /// Pure-quaternion coordinates of a lattice vector.
    pub fn to_pure(&self, x: &[i64]) -> Vec<Rational> {
        (0..3)
            .map(|c| {
                let mut s = Rational::zero();
                for k in 0..3 {
                    if x[k] != 0 {
                        s += Rational::from_integer(x[k].into()) * &self.basis.basis[k][c];
                    }
                }
                s
            })
            .collect()
    }

    /// Coordinates (rational) of a pure quaternion in this basis.
    pub fn coords(&self, y: &[Rational]) -> Vec<Rational> {
        self.basis.coords(y)
    }
}

/// The form `Δ` reduced modulo an odd prime.
#[derive(Clone, Debug)]
struct ModForm {
    p: i64,
    diag: [i64; 3],
    off: [i64; 3],
}

impl ModForm {
    fn delta(&self, x: &[i64; 3]) -> i64 {
        (self.diag[0] * x[0] * x[0]
            + self.diag[1] * x[1] * x[1]
            + self.diag[2] * x[2] * x[2]
            + self.off[0] * x[0] * x[1]
            + self.off[1] * x[0] * x[2]
            + self.off[2] * x[1] * x[2])
            .rem_euclid(self.p)
    }

    /// `2B(x, v)` where `B(x, x) = Δ(x)`.
    fn polar2(&self, x: &[i64; 3], v: &[i64; 3]) -> i64 {
        let g = [
            [2 * self.diag[0], self.off[0], self.off[1]],
            [self.off[0], 2 * self.diag[1], self.off[2]],
            [self.off[1], self.off[2], 2 * self.diag[2]],
        ];
        let mut s = 0;
        for i in 0..3 {
            for j in 0..3 {
                s += x[i] * g[i][j] % self.p * v[j];
            }
        }
        s.rem_euclid(self.p)
    }

    fn reflect(&self, x: &[i64; 3], v: &[i64; 3], dv_inv: i64) -> [i64; 3] {
        let f = self.polar2(x, v) * dv_inv % self.p;
        [
            (x[0] - f * v[0]).rem_euclid(self.p),
            (x[1] - f * v[1]).rem_euclid(self.p),
            (x[2] - f * v[2]).rem_euclid(self.p),
        ]
    }
}

fn index(x: &[i64; 3], p: i64) -> usize {
    (x[0] + p * x[1] + p * p * x[2]) as usize
}

fn unindex(i: usize, p: i64) -> [i64; 3] {
    let i = i as i64;
    [i % p, (i / p) % p, i / (p * p)]
}

/// A rotation `r_{v1}∘r_{v2}` of `L/pL` with its spinor sign.
#[derive(Clone, Debug)]
pub struct Rotation {
    pub v1: [i64; 3],
    pub v2: [i64; 3],
    pub sign: i8,
}

/// The function `w_p` on `L/pL`, stored densely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalWeightTable {
    pub p: u64,
    pub values: Vec<i8>,
    pub seed: usize,
}

fn primitive_root(p: i64) -> i64 {
    let fs = prime_divisors((p - 1) as u64);
    (2..p)
        .find(|&g| {
            fs.iter()
                .all(|&q| crate::arith::mod_pow(g as u64, (p as u64 - 1) / q, p as u64) != 1)
        })
        .unwrap()
}

impl LocalWeightTable {
    fn form(lat: &TernaryLattice, p: u64) -> ModForm {
        let (diag, off) = lat.delta_coeffs();
        let pi = p as i64;
        ModForm {
            p: pi,
            diag: diag.map(|v| v.rem_euclid(pi)),
            off: off.map(|v| v.rem_euclid(pi)),
        }
    }

    /// Nonzero isotropic vectors of `L/pL`, as indices in increasing lexicographic order.
    pub fn isotropic(lat: &TernaryLattice, p: u64) -> Vec<usize> {
        let f = Self::form(lat, p);
        let pi = p as i64;
        let mut out: Vec<[i64; 3]> = Vec::new();
        for a in 0..pi {
            for b in 0..pi {
                for c in 0..pi {
                    let x = [a, b, c];
                    if x != [0, 0, 0] && f.delta(&x) == 0 {
                        out.push(x);
                    }
                }
            }
        }
        out.iter().map(|x| index(x, pi)).collect()
    }

    /// Builds `w_p` with `w_p(seed) = +1`; the default seed is the smallest isotropic vector.
    pub fn build(lat: &TernaryLattice, p: u64, seed: Option<usize>) -> Result<LocalWeightTable> {
        let pi = p as i64;
        if p == 2 || lat.level % p == 0 {
            return Err(Error::ScopeError(format!("weight function at p = {p}")));
        }
        let f = Self::form(lat, p);
        let iso = Self::isotropic(lat, p);
        let seed = seed.unwrap_or(iso[0]);
        if !iso.contains(&seed) {
            return Err(Error::ScopeError("seed is not isotropic".into()));
        }
        let g = primitive_root(pi);
        let lg = legendre(g, p);
        let mut radius = 1;
        loop {
            let rots = generating_rotations(&f, radius);
            let n = (p * p * p) as usize;
            let mut values = vec![0i8; n];
            values[seed] = 1;
            let mut queue = VecDeque::from([seed]);
            while let Some(i) = queue.pop_front() {
                let x = unindex(i, pi);
                let s = values[i];
                let mut push = |y: [i64; 3], v: i8, values: &mut Vec<i8>| -> Result<()> {
                    let j = index(&y, pi);
                    if values[j] == 0 {
                        values[j] = v;
                        queue.push_back(j);
                    } else if values[j] != v {
                        return Err(Error::PropagationConflict { p });
                    }
                    Ok(())
                };
                push(x.map(|c| c * g % pi), s * lg, &mut values)?;
                for r in &rots {
                    push(apply_rotation(&f, r, &x), s * r.sign, &mut values)?;
                }
            }
            if iso.iter().all(|&i| values[i] != 0) {
                return Ok(LocalWeightTable { p, values, seed });
            }
            radius += 1;
            if radius > pi {
                return Err(Error::SearchExhausted("rotation generators".into()));
            }
        }
    }

    /// The residue vector stored at dense index `i`.
    pub fn vector(&self, i: usize) -> [i64; 3] {
        unindex(i, self.p as i64)
    }

    pub fn value(&self, x: &[i64; 3]) -> i8 {
        let p = self.p as i64;
        self.values[index(&x.map(|c| c.rem_euclid(p)), p)]
    }
}

fn anisotropic_vectors(f: &ModForm, radius: i64) -> Vec<[i64; 3]> {
    let p = f.p;
    let mut out = Vec::new();
    for a in -radius..=radius {
        for b in -radius..=radius {
            for c in -radius..=radius {
                let v = [a.rem_euclid(p), b.rem_euclid(p), c.rem_euclid(p)];
                if f.delta(&v) != 0 && !out.contains(&v) {
                    out.push(v);
                }
            }
        }
    }
    out
}

fn generating_rotations(f: &ModForm, radius: i64) -> Vec<Rotation> {
    let vs = anisotropic_vectors(f, radius);
    let v0 = vs[0];
    let p = f.p as u64;
    vs.iter()
        .skip(1)
        .map(|&v| Rotation {
            v1: v0,
            v2: v,
            sign: legendre(f.delta(&v0) * f.delta(&v), p),
        })
        .collect()
}

fn apply_rotation(f: &ModForm, r: &Rotation, x: &[i64; 3]) -> [i64; 3] {
    let inv2 = crate::arith::inv_mod(f.delta(&r.v2), f.p).unwrap();
    let inv1 = crate::arith::inv_mod(f.delta(&r.v1), f.p).unwrap();
    let y = f.reflect(x, &r.v2, inv2);
    f.reflect(&y, &r.v1, inv1)
}

/// Random rotation from two anisotropic vectors chosen by `pick`.
pub fn rotation_from(lat: &TernaryLattice, p: u64, v1: [i64; 3], v2: [i64; 3]) -> Option<Rotation> {
    let f = LocalWeightTable::form(lat, p);
    let pi = p as i64;
    let v1 = v1.map(|c| c.rem_euclid(pi));
    let v2 = v2.map(|c| c.rem_euclid(pi));
    if f.delta(&v1) == 0 || f.delta(&v2) == 0 {
        return None;
    }
    Some(Rotation {
        v1,
        v2,
        sign: legendre(f.delta(&v1) * f.delta(&v2), p),
    })
}

/// Image of `x` under a rotation, modulo `p`.
pub fn rotate(lat: &TernaryLattice, p: u64, r: &Rotation, x: &[i64; 3]) -> [i64; 3] {
    let f = LocalWeightTable::form(lat, p);
    apply_rotation(&f, r, &x.map(|c| c.rem_euclid(p as i64)))
}

/// `Δ mod p` on lattice coordinates.
pub fn delta_mod(lat: &TernaryLattice, p: u64, x: &[i64; 3]) -> i64 {
    LocalWeightTable::form(lat, p).delta(&x.map(|c| c.rem_euclid(p as i64)))
}

/// The product `w = Π_{p | f(l)} w_p`, attached to the pair `(l, b)`.
#[derive(Clone, Debug)]
pub struct AdelicWeight {
    pub tables: Vec<LocalWeightTable>,
    pub l: Rational,
    pub b: Rational,
    pub dk: i64,
}

impl AdelicWeight {
    pub fn new(lat: &TernaryLattice, l: &Rational) -> Result<AdelicWeight> {
        Self::with_seeds(lat, l, &[])
    }

    /// Builds the tables with explicit seeds (`None` = default) per prime of `f(l)`.
    pub fn with_seeds(
        lat: &TernaryLattice,
        l: &Rational,
        seeds: &[Option<usize>],
    ) -> Result<AdelicWeight> {
        let fp = fundamental_pair(l);
        let f = fp.dk.unsigned_abs();
        if f % 2 == 0 || num_integer::gcd(f, lat.level) != 1 {
            return Err(Error::ConductorClash {
                conductor: f,
                two_n: 2 * lat.level,
            });
        }
        let mut tables = Vec::new();
        for (k, p) in prime_divisors(f).into_iter().enumerate() {
            let seed = seeds.get(k).copied().flatten();
            tables.push(LocalWeightTable::build(lat, p, seed)?);
        }
        Ok(AdelicWeight {
            tables,
            l: l.clone(),
            b: fp.a,
            dk: fp.dk,
        })
    }

    /// `Π_p w_p(x)` on integer lattice coordinates.
    pub fn eval_int(&self, x: &[i64; 3]) -> i8 {
        let mut s = 1i8;
        for t in &self.tables {
            s *= t.value(x);
            if s == 0 {
                return 0;
            }
        }
        s
    }

    /// The shifted weight `w(y; c)` for a pure quaternion `y`.
    pub fn eval(&self, lat: &TernaryLattice, y: &[Rational], c: &Rational) -> i8 {
        let cy: Vec<Rational> = y.iter().map(|v| v * c).collect();
        let co = lat.coords(&cy);
        if !co.iter().all(|v| v.is_integer()) {
            return 0;
        }
        let x = [0, 1, 2].map(|k| co[k].to_integer().to_i64().unwrap());
        self.eval_int(&x)
    }

    /// `Π_p w_p(c·y)` reading `c·y` in `L ⊗ Z_p` for each `p`, so `c·y` need
    /// only be `p`-integral at the primes of the conductor.
    pub fn eval_local(&self, lat: &TernaryLattice, y: &[Rational], c: &Rational) -> i8 {
        let cy: Vec<Rational> = y.iter().map(|v| v * c).collect();
        let co = lat.coords(&cy);
        let mut s = 1i8;
        for t in &self.tables {
            let p = BigInt::from(t.p);
            let mut x = [0i64; 3];
            for (k, v) in co.iter().enumerate() {
                let d = v.denom().mod_floor(&p);
                if d.is_zero() {
                    return 0;
                }
                let dinv = crate::arith::inv_mod(d.to_i64().unwrap(), t.p as i64).unwrap();
                x[k] = v.numer().mod_floor(&p).to_i64().unwrap() * dinv % t.p as i64;
            }
            s *= t.value(&x);
        }
        s
    }

    pub fn conductor(&self) -> u64 {
        self.dk.unsigned_abs()
    }
}

/// Per-class weight data: `χ^l(N(I_x))` and the maps `L_x → L/pL`.
#[derive(Clone, Debug)]
pub struct ClassWeight {
    pub chi: i8,
    /// For each table, the 3×3 integer matrix (mod p) sending `L_x`-coordinates to `L`-coordinates.
    pub maps: Vec<[[i64; 3]; 3]>,
}

impl ClassWeight {
    pub fn new(
        base: &TernaryLattice,
        lx: &TernaryLattice,
        norm: &Rational,
        w: &AdelicWeight,
    ) -> Result<ClassWeight> {
        let n = norm.to_integer();
        let f = w.conductor() as i64;
        if !norm.is_integer() || num_integer::gcd(n.to_i64().unwrap(), f) != 1 {
            return Err(Error::NormClash {
                norm: crate::arith::fmt_rat(norm),
                conductor: f as u64,
            });
        }
        let chi = crate::arith::kronecker(w.dk, n.to_i64().unwrap());
        // rows: L_x basis vectors in L coordinates
        let t = mat_mul(&lx.basis.basis, base.basis.inv());
        let mut maps = Vec::new();
        for tab in &w.tables {
            let p = BigInt::from(tab.p);
            let mut m = [[0i64; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    let v = &t[i][j];
                    let d = v.denom().mod_floor(&p);
                    let dinv = crate::arith::inv_mod(d.to_i64().unwrap(), tab.p as i64).ok_or(
                        Error::NormClash {
                            norm: crate::arith::fmt_rat(norm),
                            conductor: tab.p,
                        },
                    )?;
                    let num = v.numer().mod_floor(&p).to_i64().unwrap();
                    m[i][j] = num * dinv % tab.p as i64;
                }
            }
            maps.push(m);
        }
        Ok(ClassWeight { chi, maps })
    }

    /// `w_x(z)` for `z` in `L_x` coordinates (without the `χ` factor).
    #[inline]
    pub fn local(&self, w: &AdelicWeight, z: &[i64]) -> i8 {
        let mut s = 1i8;
        for (t, m) in w.tables.iter().zip(&self.maps) {
            let p = t.p as i64;
            let mut y = [0i64; 3];
            for (c, yc) in y.iter_mut().enumerate() {
                *yc = (z[0] * m[0][c] + z[1] * m[1][c] + z[2] * m[2][c]).rem_euclid(p);
            }
            s *= t.values[index(&y, p)];
            if s == 0 {
                return 0;
            }
        }
        s
    }

    /// `w_x(z)` including `χ^l(N(I_x))`.
    pub fn value(&self, w: &AdelicWeight, z: &[i64]) -> i8 {
        self.chi * self.local(w, z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::int;
    use crate::quatalg::{algebra_for_ramification, eichler_order};

    fn lattice(s: &[u64], n: u64) -> TernaryLattice {
        let b = algebra_for_ramification(s).unwrap();
        let o = eichler_order(&b, n).unwrap();
        TernaryLattice::from_order(&b, &o.lattice)
    }

    #[test]
    fn levels() {
        assert_eq!(lattice(&[2], 2).level, 2);
        assert_eq!(lattice(&[11], 11).level, 11);
        assert_eq!(lattice(&[37], 37).level, 37);
        assert_eq!(lattice(&[2], 6).level, 6);
    }

    #[test]
    fn cone_size_level_37_p5() {
        let l = lattice(&[37], 37);
        let t = LocalWeightTable::build(&l, 5, None).unwrap();
        assert_eq!(t.values.iter().filter(|&&v| v != 0).count(), 24);
    }

    #[test]
    fn trivial_character_weight() {
        let l = lattice(&[11], 11);
        let w = AdelicWeight::new(&l, &int(1)).unwrap();
        assert!(w.tables.is_empty());
        let y = l.to_pure(&[1, 0, 0]);
        assert_eq!(w.eval(&l, &y, &int(1)), 1);
        let half: Vec<Rational> = y.iter().map(|v| v / int(2)).collect();
        assert_eq!(w.eval(&l, &half, &int(1)), 0);
    }
}
