//! Full-rank lattices in `Q^n`, stored by a canonical Hermite basis.

use crate::arith::Rational;
use crate::linalg::{det, inverse, transpose, vec_mat, QMat, QVec};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A lattice of full rank, rows of `basis` in row-style Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    pub basis: QMat,
    inv: QMat,
}

fn lcm_denominators(gens: &[QVec]) -> BigInt {
    let mut d = BigInt::one();
    for g in gens {
        for x in g {
            d = d.lcm(x.denom());
        }
    }
    d
}

/// Row-style Hermite normal form of an integer matrix (nonzero rows only).
pub fn hnf(mut m: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        // gcd-reduce column c below row r
        loop {
            let mut best: Option<usize> = None;
            for i in r..rows {
                if !m[i][c].is_zero() && best.map_or(true, |b| m[i][c].abs() < m[b][c].abs()) {
                    best = Some(i);
                }
            }
            let Some(b) = best else { break };
            m.swap(r, b);
            let mut done = true;
            for i in r + 1..rows {
                if !m[i][c].is_zero() {
                    let q = m[i][c].div_floor(&m[r][c]);
                    let pr = m[r].clone();
                    for (x, y) in m[i].iter_mut().zip(&pr) {
                        *x -= &q * y;
                    }
                    if !m[i][c].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if m[r][c].is_zero() {
            continue;
        }
        if m[r][c].is_negative() {
            for x in m[r].iter_mut() {
                *x = -x.clone();
            }
        }
        let pr = m[r].clone();
        for i in 0..r {
            let q = m[i][c].div_floor(&pr[c]);
            if !q.is_zero() {
                for (x, y) in m[i].iter_mut().zip(&pr) {
                    *x -= &q * y;
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

impl Lattice {
    /// The lattice spanned by `gens` (must have full rank `dim`).
    pub fn from_generators(gens: &[QVec], dim: usize) -> Lattice {
        let d = lcm_denominators(gens);
        let ints: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| g.iter().map(|x| (x * &d).to_integer()).collect())
            .collect();
        let h = hnf(ints);
        assert_eq!(h.len(), dim, "generators do not span a full-rank lattice");
        let dq = Rational::from_integer(d);
        let basis: QMat = h
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| Rational::from_integer(x) / &dq)
                    .collect()
            })
            .collect();
        let inv = inverse(&basis).expect("lattice basis invertible");
        Lattice { basis, inv }
    }

    /// Inverse of the basis matrix.
    pub fn inv(&self) -> &QMat {
        &self.inv
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn det(&self) -> Rational {
        det(&self.basis).abs()
    }

    /// Coordinates of `v` in this basis.
    pub fn coords(&self, v: &[Rational]) -> QVec {
        vec_mat(v, &self.inv)
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.coords(v).iter().all(|x| x.is_integer())
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other
            .basis
            .iter()
            .all(|v| vec_mat(v, &self.inv).iter().all(|x| x.is_integer()))
    }

    /// Dual lattice for the standard pairing.
    pub fn dual(&self) -> Lattice {
        Lattice::from_generators(&transpose(&self.inv), self.dim())
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        let mut g = self.basis.clone();
        g.extend(other.basis.iter().cloned());
        Lattice::from_generators(&g, self.dim())
    }

    pub fn intersect(&self, other: &Lattice) -> Lattice {
        self.dual().sum(&other.dual()).dual()
    }

    pub fn scale(&self, c: &Rational) -> Lattice {
        let g: QMat = self
            .basis
            .iter()
            .map(|r| r.iter().map(|x| x * c).collect())
            .collect();
        Lattice::from_generators(&g, self.dim())
    }

    /// `[self : other]` for `other ⊆ self`.
    pub fn index_of(&self, other: &Lattice) -> Rational {
        other.det() / self.det()
    }

    /// Canonical text key of the Hermite basis.
    pub fn key(&self) -> String {
        self.basis
            .iter()
            .map(|r| {
                r.iter()
                    .map(crate::arith::fmt_rat)
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}
