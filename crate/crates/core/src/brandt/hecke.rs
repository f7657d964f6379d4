//! Brandt matrices, eigenforms and Atkin–Lehner signs.

use super::forms::{conjugation_matrix, FormSpace, QuaternionicForm};
use crate::arith::{prime_divisors, Rational};
use crate::enumerate::ShortVectors;
use crate::error::{Error, Result};
use crate::linalg::{
    mat_add, mat_scale, mat_vec, nullspace, solve_left, transpose, zeros, QMat, QVec,
};
use crate::quatalg::ideals::connecting_lattice;
use crate::quatalg::order::{combine, norm_form_gram};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::collections::BTreeMap;

/// `T_m` as an `h × h` array of `V_k` blocks: `(T_m φ)(x_i) = Σ_j blocks[i][j]·φ(x_j)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeckeMatrix {
    pub m: u64,
    pub blocks: Vec<Vec<QMat>>,
}

impl HeckeMatrix {
    pub fn apply(&self, f: &QuaternionicForm) -> QuaternionicForm {
        let d = f.coords.first().map_or(0, |c| c.len());
        let coords = self
            .blocks
            .iter()
            .map(|row| {
                let mut acc = vec![Rational::zero(); d];
                for (b, c) in row.iter().zip(&f.coords) {
                    for (a, v) in acc.iter_mut().zip(mat_vec(b, c)) {
                        *a += v;
                    }
                }
                acc
            })
            .collect();
        QuaternionicForm { coords }
    }

    /// The full `(h·d) × (h·d)` matrix.
    pub fn full(&self) -> QMat {
        let h = self.blocks.len();
        let d = self.blocks[0][0].len();
        let mut out = zeros(h * d, h * d);
        for i in 0..h {
            for j in 0..h {
                for r in 0..d {
                    for c in 0..d {
                        out[i * d + r][j * d + c] = self.blocks[i][j][r][c].clone();
                    }
                }
            }
        }
        out
    }

    pub fn compose(&self, o: &HeckeMatrix) -> HeckeMatrix {
        let h = self.blocks.len();
        let d = self.blocks[0][0].len();
        let blocks = (0..h)
            .map(|i| {
                (0..h)
                    .map(|j| {
                        (0..h).fold(zeros(d, d), |acc, l| {
                            mat_add(
                                &acc,
                                &crate::linalg::mat_mul(&self.blocks[i][l], &o.blocks[l][j]),
                            )
                        })
                    })
                    .collect()
            })
            .collect();
        HeckeMatrix {
            m: self.m * o.m,
            blocks,
        }
    }

    pub fn to_strings(&self) -> Vec<Vec<Vec<Vec<String>>>> {
        self.blocks
            .iter()
            .map(|r| {
                r.iter()
                    .map(|b| {
                        b.iter()
                            .map(|row| row.iter().map(crate::arith::fmt_rat).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect()
    }
}

/// Elements `α ∈ conj(I_j)·I_i` with `n(α) = m·N(I_i)·N(I_j)`.
pub fn connecting_elements(space: &FormSpace, i: usize, j: usize, m: u64) -> Vec<QVec> {
    let cs = &space.classes;
    let alg = cs.algebra();
    let (l, s) = connecting_lattice(
        alg,
        &cs.ideals[j],
        &cs.norms[j],
        &cs.ideals[i],
        &cs.norms[i],
    );
    let g = norm_form_gram(alg, &l, &s);
    ShortVectors::new(&g)
        .with_value(2 * m as i64)
        .into_iter()
        .map(|c| combine(&l, &c))
        .collect()
}

/// The Brandt matrix `T_m`.
pub fn brandt_matrix(space: &FormSpace, m: u64) -> HeckeMatrix {
    let h = space.h();
    let d = space.v.dim();
    let alg = space.classes.algebra();
    let pairs: Vec<(usize, usize)> = (0..h).flat_map(|i| (0..h).map(move |j| (i, j))).collect();
    let blocks_flat: Vec<QMat> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let elems = connecting_elements(space, i, j, m);
            let w = Rational::new(
                BigInt::one(),
                BigInt::from(2 * space.classes.unit_orders[j]),
            );
            if space.k() == 0 {
                return vec![vec![Rational::from_integer(BigInt::from(elems.len())) * w]];
            }
            let mut acc = zeros(d, d);
            for a in &elems {
                acc = mat_add(&acc, &space.v.action(&conjugation_matrix(alg, a)));
            }
            mat_scale(&acc, &w)
        })
        .collect();
    let mut it = blocks_flat.into_iter();
    let blocks = (0..h)
        .map(|_| (0..h).map(|_| it.next().unwrap()).collect())
        .collect();
    HeckeMatrix { m, blocks }
}

/// Eigenvalue `λ` with `T·φ = λφ`.
pub fn eigenvalue_of(t: &HeckeMatrix, f: &QuaternionicForm) -> Result<Rational> {
    let tf = t.apply(f).flat();
    let ff = f.flat();
    let (idx, v) = ff
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_zero())
        .ok_or(Error::NotEigen { p: t.m })?;
    let lam = &tf[idx] / v;
    if tf.iter().zip(&ff).all(|(a, b)| *a == &lam * b) {
        Ok(lam)
    } else {
        Err(Error::NotEigen { p: t.m })
    }
}

/// Integer candidates `a` with `|a| ≤ 2p^{k+1/2}`.
fn candidate_range(p: u64, k: u32) -> i64 {
    let b = 2.0 * (p as f64).powf(k as f64 + 0.5);
    b.floor() as i64
}

/// Simultaneous rational eigenvectors of the cuspidal space, with eigenvalues
/// `λ_p = a_p / p^k` of the Brandt operators.
pub fn eigenforms(
    space: &FormSpace,
    primes: &[u64],
) -> Result<Vec<(QuaternionicForm, BTreeMap<u64, Rational>)>> {
    let d = space.v.dim();
    let (_, cusp) = space.eisenstein_and_cusp_split();
    if cusp.is_empty() {
        return Ok(Vec::new());
    }
    let mut systems: Vec<(QMat, BTreeMap<u64, Rational>)> =
        vec![(cusp.iter().map(|f| f.flat()).collect(), BTreeMap::new())];
    let n = space.classes.order.disc;
    for &p in primes {
        if n % p == 0 {
            continue;
        }
        let t = brandt_matrix(space, p);
        let full = t.full();
        let pk = Rational::from_integer(BigInt::from(p).pow(space.k()));
        let mut next = Vec::new();
        for (sub, map) in systems {
            let dim = sub.len();
            // restricted matrix R with T s_i = Σ_j R_ij s_j
            let r: QMat = sub
                .iter()
                .map(|s| solve_left(&sub, &mat_vec(&full, s)).expect("subspace is Hecke stable"))
                .collect();
            let rt = transpose(&r);
            let bound = candidate_range(p, space.k());
            let mut found = 0;
            for a in -bound..=bound {
                let lam = Rational::from_integer(a.into()) / &pk;
                let mut m = rt.clone();
                for (i, row) in m.iter_mut().enumerate() {
                    row[i] -= &lam;
                }
                let ker = nullspace(&m, dim);
                if ker.is_empty() {
                    continue;
                }
                found += ker.len();
                let vecs: QMat = ker
                    .iter()
                    .map(|c| {
                        let mut v = vec![Rational::zero(); sub[0].len()];
                        for (ci, s) in c.iter().zip(&sub) {
                            for (vv, sv) in v.iter_mut().zip(s) {
                                *vv += ci * sv;
                            }
                        }
                        v
                    })
                    .collect();
                let mut mp = map.clone();
                mp.insert(p, lam);
                next.push((vecs, mp));
            }
            if found < dim {
                log::warn!(
                    "T_{p}: {} dimensions without rational eigenvalue",
                    dim - found
                );
            }
        }
        systems = next;
        if systems.iter().all(|(s, _)| s.len() == 1) && !systems.is_empty() {
            continue;
        }
    }
    let mut out = Vec::new();
    for (sub, map) in systems {
        if sub.len() > 1 {
            log::warn!("eigensystem {:?} has multiplicity {}", map, sub.len());
        }
        for v in sub {
            out.push((QuaternionicForm::from_flat(&v, d).primitive(), map.clone()));
        }
    }
    Ok(out)
}

/// Applies the Atkin–Lehner involution at `p | N`.
pub fn atkin_lehner_apply(
    space: &FormSpace,
    f: &QuaternionicForm,
    p: u64,
) -> Result<QuaternionicForm> {
    let (perm, gammas) = space.classes.atkin_lehner(p)?;
    Ok(QuaternionicForm {
        coords: perm
            .iter()
            .zip(&gammas)
            .map(|(&y, g)| space.act(g, &f.coords[y]))
            .collect(),
    })
}

/// Sign by which the Atkin–Lehner involution at `p` acts on an eigenform.
pub fn al_sign(space: &FormSpace, f: &QuaternionicForm, p: u64) -> Result<i8> {
    let w = atkin_lehner_apply(space, f, p)?;
    if w == *f {
        Ok(1)
    } else if w == f.scale(&-Rational::one()) {
        Ok(-1)
    } else {
        Err(Error::NotEigen { p })
    }
}

/// Atkin–Lehner signs at every `p | N`.
pub fn al_signs(space: &FormSpace, f: &QuaternionicForm) -> Result<BTreeMap<u64, i8>> {
    prime_divisors(space.classes.order.disc)
        .into_iter()
        .map(|p| al_sign(space, f, p).map(|s| (p, s)))
        .collect()
}

/// For `k = 0`: `r[j][n] = #{α ∈ conj(I_j)I_x : n(α) = n·N(I_x)N(I_j)}` for `n ≤ bound`.
pub fn row_theta(space: &FormSpace, x: usize, bound: u64) -> Vec<Vec<u64>> {
    (0..space.h())
        .map(|j| {
            let cs = &space.classes;
            let alg = cs.algebra();
            let (l, s) = connecting_lattice(
                alg,
                &cs.ideals[j],
                &cs.norms[j],
                &cs.ideals[x],
                &cs.norms[x],
            );
            let g = norm_form_gram(alg, &l, &s);
            let nb = bound as usize;
            ShortVectors::new(&g).par_fold(
                2 * bound as i64,
                || vec![0u64; nb + 1],
                |acc, _, q| acc[(q / 2) as usize] += 1,
                |mut a, b| {
                    for (x, y) in a.iter_mut().zip(b) {
                        *x += y;
                    }
                    a
                },
            )
        })
        .collect()
}

/// Hecke eigenvalues `a_n` (`n ≤ bound`, `gcd(n, N) = 1`) of a `k = 0` eigenform,
/// read off one row of the theta series. Entries with `gcd(n, N) > 1` are `None`.
pub fn eigenvalues_from_theta(
    space: &FormSpace,
    f: &QuaternionicForm,
    bound: u64,
) -> Result<Vec<Option<Rational>>> {
    if space.k() != 0 {
        return Err(Error::ScopeError("theta-row eigenvalues need k = 0".into()));
    }
    let n = space.classes.order.disc;
    let x = f
        .coords
        .iter()
        .enumerate()
        .max_by_key(|(_, c)| c[0].abs())
        .map(|(i, _)| i)
        .unwrap();
    let fx = f.coords[x][0].clone();
    let rows = row_theta(space, x, bound);
    Ok((0..=bound)
        .map(|m| {
            if m == 0 || num_integer::gcd(m, n) != 1 {
                return None;
            }
            let mut s = Rational::zero();
            for (j, r) in rows.iter().enumerate() {
                let w = Rational::new(
                    BigInt::from(r[m as usize]),
                    BigInt::from(2 * space.classes.unit_orders[j]),
                );
                s += w * &f.coords[j][0];
            }
            Some(s / &fx)
        })
        .collect())
}
