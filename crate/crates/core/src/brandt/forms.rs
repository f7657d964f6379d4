//! Quaternionic modular forms: functions on the class set with values in `V_k`.

use super::harmonic::HarmonicSpace;
use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::linalg::{identity, mat_vec, nullspace, QMat, QVec};
use crate::quatalg::{units, IdealClassSet, QuaternionAlgebra};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

/// `φ`, one `V_k` coordinate vector per class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuaternionicForm {
    pub coords: Vec<QVec>,
}

impl QuaternionicForm {
    pub fn zero(h: usize, d: usize) -> QuaternionicForm {
        QuaternionicForm {
            coords: vec![vec![Rational::zero(); d]; h],
        }
    }

    pub fn from_flat(v: &[Rational], d: usize) -> QuaternionicForm {
        QuaternionicForm {
            coords: v.chunks(d).map(|c| c.to_vec()).collect(),
        }
    }

    pub fn flat(&self) -> QVec {
        self.coords.iter().flatten().cloned().collect()
    }

    pub fn add(&self, o: &QuaternionicForm) -> QuaternionicForm {
        QuaternionicForm {
            coords: self
                .coords
                .iter()
                .zip(&o.coords)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x + y).collect())
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> QuaternionicForm {
        QuaternionicForm {
            coords: self
                .coords
                .iter()
                .map(|a| a.iter().map(|x| x * c).collect())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().flatten().all(|x| x.is_zero())
    }

    /// Scales so that the coordinates are coprime integers with the first nonzero one positive.
    pub fn primitive(&self) -> QuaternionicForm {
        let flat = self.flat();
        let Some(first) = flat.iter().find(|x| !x.is_zero()) else {
            return self.clone();
        };
        let mut den = BigInt::one();
        for x in &flat {
            den = num_integer::Integer::lcm(&den, x.denom());
        }
        let mut num = BigInt::zero();
        for x in &flat {
            num = num_integer::Integer::gcd(
                &num,
                &(x * Rational::from_integer(den.clone())).to_integer(),
            );
        }
        let mut s = Rational::new(den, num);
        if first < &Rational::zero() {
            s = -s;
        }
        self.scale(&s)
    }

    /// Serializable form with rationals as strings.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.coords
            .iter()
            .map(|c| c.iter().map(crate::arith::fmt_rat).collect())
            .collect()
    }
}

/// Matrix of `y ↦ γ y γ⁻¹` on pure-quaternion coordinates (column convention).
pub fn conjugation_matrix(alg: &QuaternionAlgebra, g: &[Rational]) -> QMat {
    let gi = alg.inverse(g);
    let cols: Vec<QVec> = (0..3)
        .map(|c| {
            let mut e = vec![Rational::zero(); 4];
            e[c + 1] = Rational::one();
            alg.mul(&alg.mul(g, &e), &gi)[1..4].to_vec()
        })
        .collect();
    (0..3)
        .map(|r| (0..3).map(|c| cols[c][r].clone()).collect())
        .collect()
}

/// The space `M_k(R)` over a fixed class set.
#[derive(Clone, Debug)]
pub struct FormSpace {
    pub classes: IdealClassSet,
    pub v: HarmonicSpace,
    /// Per class, a basis (rows) of the `Γ_x`-fixed subspace of `V_k`.
    pub invariant: Vec<QMat>,
}

impl FormSpace {
    pub fn new(classes: &IdealClassSet, k: u32) -> FormSpace {
        let alg = classes.algebra();
        let v = HarmonicSpace::new(k, &alg.pure_disc_gram());
        let d = v.dim();
        let invariant = classes
            .right_orders
            .iter()
            .map(|r| {
                if k == 0 {
                    return identity(1);
                }
                let mut rows: QMat = Vec::new();
                for u in units(alg, r) {
                    let q = crate::quatalg::order::combine(r, &u);
                    let a = v.action(&conjugation_matrix(alg, &q));
                    for (i, row) in a.into_iter().enumerate() {
                        let mut row = row;
                        row[i] -= Rational::one();
                        rows.push(row);
                    }
                }
                nullspace(&rows, d)
            })
            .collect();
        FormSpace {
            classes: classes.clone(),
            v,
            invariant,
        }
    }

    pub fn k(&self) -> u32 {
        self.v.k
    }

    pub fn h(&self) -> usize {
        self.classes.len()
    }

    pub fn dim(&self) -> usize {
        self.invariant.iter().map(|b| b.len()).sum()
    }

    /// Basis of `M_k(R)` as forms supported on one class each.
    pub fn basis(&self) -> Vec<QuaternionicForm> {
        let d = self.v.dim();
        let mut out = Vec::new();
        for (x, b) in self.invariant.iter().enumerate() {
            for row in b {
                let mut f = QuaternionicForm::zero(self.h(), d);
                f.coords[x] = row.clone();
                out.push(f);
            }
        }
        out
    }

    /// `Σ_x (1/t_x)⟨φ(x), ψ(x)⟩`.
    pub fn height_pairing(&self, a: &QuaternionicForm, b: &QuaternionicForm) -> Result<Rational> {
        let d = self.v.dim();
        if a.coords.len() != self.h() || b.coords.len() != self.h() {
            return Err(Error::DimensionMismatch("class count".into()));
        }
        let mut s = Rational::zero();
        for x in 0..self.h() {
            if a.coords[x].len() != d || b.coords[x].len() != d {
                return Err(Error::DimensionMismatch("V_k dimension".into()));
            }
            let t = Rational::from_integer(self.classes.unit_orders[x].into());
            s += self.v.inner_product(&a.coords[x], &b.coords[x]) / t;
        }
        Ok(s)
    }

    /// Whether each `φ(x)` is fixed by the units of `R_x`.
    pub fn is_invariant(&self, f: &QuaternionicForm) -> bool {
        f.coords.iter().zip(&self.invariant).all(|(c, b)| {
            let mut m = b.clone();
            m.push(c.clone());
            crate::linalg::rank(&m) == b.len()
        })
    }

    /// `φ` with `φ(x) = 1` for every class (`k = 0`).
    pub fn eisenstein(&self) -> Option<QuaternionicForm> {
        (self.k() == 0).then(|| QuaternionicForm {
            coords: vec![vec![Rational::one()]; self.h()],
        })
    }

    /// `(𝓔, 𝓢)`: Eisenstein and cuspidal subspaces, as bases.
    pub fn eisenstein_and_cusp_split(&self) -> (Vec<QuaternionicForm>, Vec<QuaternionicForm>) {
        let Some(e) = self.eisenstein() else {
            return (Vec::new(), self.basis());
        };
        // ψ ⟂ e  ⟺  Σ ψ(x)/t_x = 0
        let row: QVec = self
            .classes
            .unit_orders
            .iter()
            .map(|&t| Rational::new(BigInt::one(), BigInt::from(t)))
            .collect();
        let cusp = nullspace(&vec![row], self.h())
            .into_iter()
            .map(|v| QuaternionicForm::from_flat(&v, 1))
            .collect();
        (vec![e], cusp)
    }

    /// Applies the `V_k`-action of `γ` to a coordinate vector.
    pub fn act(&self, g: &[Rational], c: &[Rational]) -> QVec {
        if self.k() == 0 {
            return c.to_vec();
        }
        let a = self
            .v
            .action(&conjugation_matrix(self.classes.algebra(), g));
        mat_vec(&a, c)
    }
}

/// Serializable summary of an eigensystem.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct EigenRecord {
    pub form: Vec<Vec<String>>,
    pub eigenvalues: std::collections::BTreeMap<u64, String>,
}
