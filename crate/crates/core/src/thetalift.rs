//! Fourier coefficients `λ(D, a)` of the theta lift of a quaternionic form.
//!
//! For each class `x` the engine enumerates `z ∈ L_x` with `Δ(z) = n·l·b²` once
//! and stores `Σ w_x(z)·B_m(z)` per `|n|` and basis polynomial `B_m`; the lift of
//! any form is then a linear combination of these sums.

use crate::arith::{fmt_rat, fundamental_pair, is_discriminant_pair, kronecker, sign, Rational};
use crate::brandt::harmonic::substitute;
use crate::brandt::{FormSpace, QuaternionicForm};
use crate::enumerate::ShortVectors;
use crate::error::{Error, Result};
use crate::linalg::transpose;
use crate::quatalg::sigma_l;
use crate::weightfn::{AdelicWeight, ClassWeight, TernaryLattice};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Parameters of the lift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftConfig {
    pub l: Rational,
    pub b: Rational,
    pub u: i8,
    pub k: u32,
    pub skew: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LiftHeader {
    pub l: String,
    pub b: String,
    pub u: i8,
    pub k: u32,
    pub skew: bool,
    pub bound: u64,
}

/// Checks the conductor, Hl2 (unless skew) and Hl1; returns `(Σ^l finite, b, u)`.
pub fn validate_l(
    l: &Rational,
    n: u64,
    eps_g: &BTreeMap<u64, i8>,
    k: u32,
    skew: bool,
) -> Result<(Vec<u64>, Rational, i8)> {
    let fp = fundamental_pair(l);
    let f = fp.dk.unsigned_abs();
    if num_integer::gcd(f, 2 * n) != 1 {
        return Err(Error::ConductorClash {
            conductor: f,
            two_n: 2 * n,
        });
    }
    let u = sign(l) as i8;
    let expected: i8 = if k % 2 == 0 { 1 } else { -1 };
    if !skew && u != expected {
        return Err(Error::SignViolation {
            sgn_l: u as i64,
            expected: expected as i64,
        });
    }
    let sigma = sigma_l(n, eps_g, l)?;
    Ok((sigma, fp.a, u))
}

impl LiftConfig {
    pub fn new(
        l: &Rational,
        n: u64,
        eps_g: &BTreeMap<u64, i8>,
        k: u32,
        skew: bool,
    ) -> Result<LiftConfig> {
        let (_, b, u) = validate_l(l, n, eps_g, k, skew)?;
        Ok(LiftConfig {
            l: l.clone(),
            b,
            u,
            k,
            skew,
        })
    }

    /// `l·b² = dK(l)`.
    pub fn dk(&self) -> i64 {
        fundamental_pair(&self.l).dk
    }

    pub fn header(&self, bound: u64) -> LiftHeader {
        LiftHeader {
            l: fmt_rat(&self.l),
            b: fmt_rat(&self.b),
            u: self.u,
            k: self.k,
            skew: self.skew,
            bound,
        }
    }
}

/// `A_{Δ,c}(L) = {y ∈ c⁻¹L : Δ(y) = Δ}` as pure quaternions, in enumeration order.
pub fn vectors_with_disc(
    lat: &TernaryLattice,
    c: &Rational,
    delta: &Rational,
) -> Vec<Vec<Rational>> {
    assert!(delta.is_negative());
    let t = delta * c * c * Rational::from_integer((-2).into());
    if !t.is_integer() {
        return Vec::new();
    }
    let Some(t) = t.to_integer().to_i64() else {
        return Vec::new();
    };
    ShortVectors::new(&lat.neg_gram_int())
        .with_value(t)
        .into_iter()
        .map(|z| lat.to_pure(&z).into_iter().map(|v| v / c).collect())
        .collect()
}

/// Integral multiples of the basis polynomials, precomposed with a lattice basis.
struct IntPolys {
    k: u32,
    den: BigInt,
    coeffs: Vec<Vec<i128>>,
    monos: Vec<[u32; 3]>,
}

impl IntPolys {
    fn new(space: &FormSpace, lat: &TernaryLattice) -> IntPolys {
        let k = space.k();
        let m = transpose(&lat.basis.basis);
        let polys: Vec<Vec<Rational>> =
            space.v.basis.iter().map(|b| substitute(k, b, &m)).collect();
        let mut den = BigInt::one();
        for p in &polys {
            for c in p {
                den = den.lcm(c.denom());
            }
        }
        let dr = Rational::from_integer(den.clone());
        let coeffs = polys
            .iter()
            .map(|p| {
                p.iter()
                    .map(|c| (c * &dr).to_integer().to_i128().unwrap())
                    .collect()
            })
            .collect();
        IntPolys {
            k,
            den,
            coeffs,
            monos: crate::brandt::harmonic::monomials(k),
        }
    }

    fn eval(&self, z: &[i64], out: &mut [i128]) {
        if self.k == 0 {
            out[0] = 1;
            return;
        }
        let pw: Vec<Vec<i128>> = (0..3)
            .map(|c| {
                let mut v = vec![1i128; self.k as usize + 1];
                for e in 1..=self.k as usize {
                    v[e] = v[e - 1] * z[c] as i128;
                }
                v
            })
            .collect();
        let mv: Vec<i128> = self
            .monos
            .iter()
            .map(|m| pw[0][m[0] as usize] * pw[1][m[1] as usize] * pw[2][m[2] as usize])
            .collect();
        for (o, cs) in out.iter_mut().zip(&self.coeffs) {
            *o = cs.iter().zip(&mv).map(|(a, b)| a * b).sum();
        }
    }
}

/// Per-class theta data for one weight and one range of `|n|`.
#[derive(Clone, Debug)]
pub struct LiftEngine {
    pub config: LiftConfig,
    pub bound: u64,
    pub weight: AdelicWeight,
    pub lattices: Vec<TernaryLattice>,
    pub class_weights: Vec<ClassWeight>,
    /// `sums[x][|n|]`: `Σ_{z ∈ L_x, Δ(z) = n·dK(l)} w_x(z)·B(z)` (with `χ_x`), one entry per basis polynomial.
    pub sums: Vec<Vec<Vec<Rational>>>,
    t: Vec<u64>,
    d: usize,
}

impl LiftEngine {
    pub fn new(space: &FormSpace, config: &LiftConfig, bound: u64) -> Result<LiftEngine> {
        Self::with_weight_seeds(space, config, bound, &[])
    }

    pub fn with_weight_seeds(
        space: &FormSpace,
        config: &LiftConfig,
        bound: u64,
        seeds: &[Option<usize>],
    ) -> Result<LiftEngine> {
        let cs = &space.classes;
        let alg = cs.algebra();
        let base = TernaryLattice::from_order(alg, &cs.order.lattice);
        let weight = AdelicWeight::with_seeds(&base, &config.l, seeds)?;
        let lattices: Vec<TernaryLattice> = cs
            .right_orders
            .iter()
            .map(|r| TernaryLattice::from_order(alg, r))
            .collect();
        let class_weights = lattices
            .iter()
            .zip(&cs.norms)
            .map(|(lx, n)| ClassWeight::new(&base, lx, n, &weight))
            .collect::<Result<Vec<_>>>()?;
        let f = weight.conductor() as i64;
        let d = space.v.dim();
        let nb = bound as usize;
        let sums = lattices
            .iter()
            .zip(&class_weights)
            .map(|(lx, cw)| {
                let polys = IntPolys::new(space, lx);
                let sv = ShortVectors::new(&lx.neg_gram_int());
                let raw = sv.par_fold(
                    2 * bound as i64 * f,
                    || vec![0i128; (nb + 1) * d],
                    |acc, z, q| {
                        // q = −2Δ(z) = 2|n|f
                        if q % (2 * f) != 0 {
                            return;
                        }
                        let n = (q / (2 * f)) as usize;
                        let s = cw.local(&weight, z);
                        if s == 0 {
                            return;
                        }
                        let mut vals = vec![0i128; d];
                        polys.eval(z, &mut vals);
                        for (m, v) in vals.into_iter().enumerate() {
                            acc[n * d + m] += s as i128 * v;
                        }
                    },
                    |mut a, b| {
                        for (x, y) in a.iter_mut().zip(b) {
                            *x += y;
                        }
                        a
                    },
                );
                let chi = Rational::from_integer(cw.chi.into());
                (0..=nb)
                    .map(|n| {
                        (0..d)
                            .map(|m| {
                                Rational::new(BigInt::from(raw[n * d + m]), polys.den.clone())
                                    * &chi
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        Ok(LiftEngine {
            config: config.clone(),
            bound,
            weight,
            lattices,
            class_weights,
            sums,
            t: cs.unit_orders.clone(),
            d,
        })
    }

    /// `Σ_x (1/t_x) Σ_z w_x(z) P_x(z)` over `Δ(z) = n·dK(l)`.
    pub fn raw(&self, f: &QuaternionicForm, n_abs: u64) -> Rational {
        let mut s = Rational::zero();
        for (x, sx) in self.sums.iter().enumerate() {
            let v = &sx[n_abs as usize];
            let mut acc = Rational::zero();
            for m in 0..self.d {
                if !f.coords[x][m].is_zero() && !v[m].is_zero() {
                    acc += &f.coords[x][m] * &v[m];
                }
            }
            s += acc / Rational::from_integer(self.t[x].into());
        }
        s
    }

    /// `λ(D, a)` for any pair with `|D·a²| ≤ bound`.
    pub fn coefficient(
        &self,
        f: &QuaternionicForm,
        d: &Rational,
        a: &Rational,
    ) -> Result<Rational> {
        if sign(d) != -sign(&self.config.l) {
            return Err(Error::ScopeError(format!("sign of D = {}", fmt_rat(d))));
        }
        let n = d * a * a;
        if !n.is_integer() {
            return Ok(Rational::zero());
        }
        let n_abs = n.abs().to_integer().to_u64().unwrap();
        if n_abs > self.bound {
            return Err(Error::RangeError(format!(
                "|D·a²| = {n_abs} > {}",
                self.bound
            )));
        }
        // λ = a⁻¹ (ab)^{−k} Σ
        let c = a * &self.config.b;
        let ck = num_traits::pow(c, self.config.k as usize);
        Ok(self.raw(f, n_abs) / (a * ck))
    }

    /// The coefficient table of `θ(φ)` over all discriminants `|n| ≤ bound`.
    pub fn lift(&self, f: &QuaternionicForm) -> CoefficientTable {
        let s = -sign(&self.config.l);
        let mut entries = BTreeMap::new();
        for n_abs in 1..=self.bound {
            let n = s * n_abs as i64;
            if !matches!(n.rem_euclid(4), 0 | 1) {
                continue;
            }
            let fp = fundamental_pair(&Rational::from_integer(n.into()));
            let d = Rational::from_integer(fp.dk.into());
            let a = fp.a.recip();
            let lam = self.coefficient(f, &d, &a).expect("in range");
            entries.insert(n_abs, TableEntry { d, a, lambda: lam });
        }
        CoefficientTable {
            config: self.config.clone(),
            bound: self.bound,
            entries,
        }
    }

    /// Nonzero raw sums at `|n|` outside the plus-space support.
    pub fn support_violations(&self, f: &QuaternionicForm) -> usize {
        let s = -sign(&self.config.l);
        (1..=self.bound)
            .filter(|&n| {
                let nn = s * n as i64;
                !matches!(nn.rem_euclid(4), 0 | 1) && !self.raw(f, n).is_zero()
            })
            .count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableEntry {
    pub d: Rational,
    pub a: Rational,
    pub lambda: Rational,
}

/// Coefficients `λ(D, a)`, one canonical entry per discriminant `D·a²`: `D = dK`, `a` its conductor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoefficientTable {
    pub config: LiftConfig,
    pub bound: u64,
    pub entries: BTreeMap<u64, TableEntry>,
}

#[derive(Serialize, Deserialize)]
struct Record {
    #[serde(rename = "D")]
    d: String,
    a: String,
    xi: String,
    lambda: String,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    header: LiftHeader,
    records: Vec<Record>,
}

impl CoefficientTable {
    /// `λ(D, a)` via homogeneity `λ(D m², a/m) = m^{k+1} λ(D, a)`; zero off the support.
    pub fn get(&self, d: &Rational, a: &Rational) -> Result<Rational> {
        if !is_discriminant_pair(d, a) {
            return Ok(Rational::zero());
        }
        let n = (d * a * a).abs().to_integer().to_u64().unwrap();
        if n > self.bound {
            return Err(Error::RangeError(format!("|D·a²| = {n} > {}", self.bound)));
        }
        let e = &self.entries[&n];
        let m = &e.a / a;
        Ok(&e.lambda * num_traits::pow(m, self.config.k as usize + 1))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.values().all(|e| e.lambda.is_zero())
    }

    pub fn add(&self, o: &CoefficientTable) -> CoefficientTable {
        let mut out = self.clone();
        for (n, e) in out.entries.iter_mut() {
            e.lambda += &o.entries[n].lambda;
        }
        out
    }

    /// Entries with `λ ≠ 0` that are not discriminant pairs.
    pub fn support_violations(&self) -> usize {
        self.entries
            .values()
            .filter(|e| !e.lambda.is_zero() && !is_discriminant_pair(&e.d, &e.a))
            .count()
    }

    pub fn to_json(&self) -> String {
        let u = Rational::from_integer(self.config.u.into());
        let file = TableFile {
            header: self.config.header(self.bound),
            records: self
                .entries
                .values()
                .map(|e| Record {
                    d: fmt_rat(&e.d),
                    a: fmt_rat(&e.a),
                    xi: fmt_rat(&(-&u * &e.d)),
                    lambda: fmt_rat(&e.lambda),
                })
                .collect(),
        };
        serde_json::to_string_pretty(&file).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<CoefficientTable> {
        let bad = |m: &str| Error::Cache(format!("table: {m}"));
        let file: TableFile = serde_json::from_str(s).map_err(|e| bad(&e.to_string()))?;
        let p = |s: &str| crate::arith::parse_rat(s).ok_or_else(|| bad(s));
        let h = &file.header;
        let config = LiftConfig {
            l: p(&h.l)?,
            b: p(&h.b)?,
            u: h.u,
            k: h.k,
            skew: h.skew,
        };
        let mut entries = BTreeMap::new();
        for r in &file.records {
            let (d, a) = (p(&r.d)?, p(&r.a)?);
            let n = (&d * &a * &a)
                .abs()
                .to_integer()
                .to_u64()
                .ok_or_else(|| bad("index"))?;
            entries.insert(
                n,
                TableEntry {
                    d,
                    a,
                    lambda: p(&r.lambda)?,
                },
            );
        }
        Ok(CoefficientTable {
            config,
            bound: h.bound,
            entries,
        })
    }
}

/// Three-term relation
/// `λ(D, a; θ(T_pφ)) = λ(D, a/p) + (D a² / p)·λ(D, a) + p·λ(D, pa)` for `|D a²| ≤ bound`.
pub fn hecke_identity_check(
    table_tp: &CoefficientTable,
    table: &CoefficientTable,
    p: u64,
    bound: u64,
) -> Result<bool> {
    if bound * p * p > table.bound || bound > table_tp.bound {
        return Err(Error::RangeError(format!(
            "need |D·a²| ≤ {} for p = {p}",
            bound * p * p
        )));
    }
    let pr = Rational::from_integer(p.into());
    for (&n, e) in table_tp.entries.range(..=bound) {
        let lhs = &e.lambda;
        let nd = (&e.d * &e.a * &e.a).to_integer().to_i64().unwrap();
        let chi = Rational::from_integer(kronecker(nd, p as i64).into());
        let rhs = table.get(&e.d, &(&e.a / &pr))?
            + chi * table.get(&e.d, &e.a)?
            + &pr * table.get(&e.d, &(&e.a * &pr))?;
        if *lhs != rhs {
            log::debug!(
                "Hecke relation fails at |n| = {n}: {} vs {}",
                fmt_rat(lhs),
                fmt_rat(&rhs)
            );
            return Ok(false);
        }
    }
    Ok(true)
}
