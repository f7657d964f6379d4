//! Special points: unit orbits of vectors of fixed discriminant in the class
//! lattices, and the pairing `⟨φ, η⟩` built from them with Gegenbauer kernels.

use crate::arith::{fundamental_pair, kronecker, Rational};
use crate::brandt::{FormSpace, HarmonicSpace, QuaternionicForm};
use crate::enumerate::ShortVectors;
use crate::error::{Error, Result};
use crate::linalg::{inverse, mat_vec, QVec};
use crate::quatalg::order::combine;
use crate::quatalg::units;
use crate::thetalift::LiftConfig;
use crate::weightfn::{AdelicWeight, TernaryLattice};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// A primitive positive definite binary form `a x² + b xy + c y²`.
pub type Form = (i64, i64, i64);

/// Data of the imaginary quadratic field attached to `Δ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadFieldData {
    pub delta: Rational,
    pub dk: i64,
    pub hk: usize,
    pub tk: u64,
    pub mk: u64,
    pub form_classes: Vec<Form>,
}

/// Reduced forms of discriminant `d < 0`.
pub fn reduced_forms(d: i64) -> Vec<Form> {
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                out.push((a, b, c));
            }
        }
        a += 1;
    }
    out
}

/// Reduction of a positive definite form.
pub fn reduce(f: Form) -> Form {
    let (mut a, mut b, mut c) = f;
    loop {
        if b > a || b <= -a {
            // normalize b into (−a, a]
            let two_a = 2 * a;
            let mut r = b.rem_euclid(two_a);
            if r > a {
                r -= two_a;
            }
            let k = (r - b) / two_a;
            // x ↦ x + k y
            c += k * k * a + k * b;
            b = r;
        }
        if a > c {
            (a, b, c) = (c, -b, a);
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        return (a, b, c);
    }
}

/// Gauss composition (Dirichlet's method), reduced.
pub fn compose(f1: Form, f2: Form) -> Form {
    let (a1, b1, c1) = f1;
    let (a2, b2, c2) = f2;
    let d = b1 * b1 - 4 * a1 * c1;
    debug_assert_eq!(d, b2 * b2 - 4 * a2 * c2);
    let s = (b1 + b2) / 2;
    let g1 = a1.extended_gcd(&a2);
    let g = g1.gcd.extended_gcd(&s);
    let e = g.gcd;
    // u a1 + v a2 + w s = e
    let (v, w) = (g.x * g1.y, g.y);
    let a3 = a1 * a2 / (e * e);
    let b3 = (b2 + 2 * a2 / e * (v * (s - b2) - w * c2)).rem_euclid(2 * a3);
    let c3 = (b3 * b3 - d) / (4 * a3);
    reduce((a3, b3, c3))
}

/// Identity form of discriminant `d`.
pub fn principal_form(d: i64) -> Form {
    let b = d.rem_euclid(2);
    (1, b, (b * b - d) / 4)
}

pub fn inverse_form(f: Form) -> Form {
    reduce((f.0, -f.1, f.2))
}

/// Class number data for `Q(√Δ)`.
pub fn quad_field(delta: &Rational) -> QuadFieldData {
    assert!(delta < &Rational::zero());
    let dk = fundamental_pair(delta).dk;
    let form_classes = reduced_forms(dk);
    let tk = match dk {
        -3 => 3,
        -4 => 2,
        _ => 1,
    };
    QuadFieldData {
        delta: delta.clone(),
        dk,
        hk: form_classes.len(),
        tk,
        mk: 1,
        form_classes,
    }
}

/// Some `m = f(x, y)` with `gcd(x, y) = 1` and `gcd(m, modulus) = 1`.
pub fn coprime_value(f: Form, modulus: u64, bound: i64) -> Result<i64> {
    for r in 1..=bound {
        for x in -r..=r {
            for y in [-r, r].into_iter().chain(-r + 1..r) {
                if x.abs() != r && y.abs() != r {
                    continue;
                }
                if x.gcd(&y) != 1 {
                    continue;
                }
                let m = f.0 * x * x + f.1 * x * y + f.2 * y * y;
                if (m as u64).gcd(&modulus) == 1 {
                    return Ok(m);
                }
            }
        }
    }
    Err(Error::NoCoprimeValue { modulus })
}

/// The genus character `Ξ(C) = χ^l(m)` for `m` represented by `C`.
pub fn genus_character(q: &QuadFieldData, l: &Rational) -> Result<BTreeMap<Form, i8>> {
    let dl = fundamental_pair(l).dk;
    let modulus = dl.unsigned_abs() * q.dk.unsigned_abs();
    q.form_classes
        .iter()
        .map(|&f| Ok((f, kronecker(dl, coprime_value(f, modulus, 50)?))))
        .collect()
}

/// `P_Δ ∈ V_k` with `⟨P, P_Δ⟩ = weight_value·P(ω)` for all `P`.
pub fn gegenbauer_kernel(v: &HarmonicSpace, omega: &[Rational], weight_value: i8) -> Result<QVec> {
    let inv = inverse(&v.inner).ok_or(Error::SingularGram)?;
    let w = Rational::from_integer(weight_value.into());
    let rhs: QVec = v.basis_values(omega).into_iter().map(|x| x * &w).collect();
    Ok(mat_vec(&inv, &rhs))
}

/// A representative of a unit orbit of embedded vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecialPoint {
    pub class_index: usize,
    /// `z = c·ω` in coordinates of `L_x`.
    pub embedding: Vec<i64>,
    /// `[O_x^× : Z^×]`: units of `R_x` commuting with `ω`, modulo `±1`.
    pub stabilizer: u64,
    pub orbit: Vec<Vec<i64>>,
}

/// Lattices, weights and unit actions for the special-point route.
#[derive(Clone, Debug)]
pub struct SpecialPointContext {
    pub base: TernaryLattice,
    pub lattices: Vec<TernaryLattice>,
    pub weight: Option<AdelicWeight>,
    pub chi: Vec<i8>,
    /// Per class, the unit conjugations as integer matrices on `L_x` (row convention).
    unit_actions: Vec<Vec<[[i64; 3]; 3]>>,
}

impl SpecialPointContext {
    pub fn new(space: &FormSpace, config: Option<&LiftConfig>) -> Result<SpecialPointContext> {
        let cs = &space.classes;
        let alg = cs.algebra();
        let base = TernaryLattice::from_order(alg, &cs.order.lattice);
        let lattices: Vec<TernaryLattice> = cs
            .right_orders
            .iter()
            .map(|r| TernaryLattice::from_order(alg, r))
            .collect();
        let weight = config.map(|c| AdelicWeight::new(&base, &c.l)).transpose()?;
        let chi = cs
            .norms
            .iter()
            .map(|n| match &weight {
                Some(w) => kronecker(w.dk, n.to_integer().to_i64().unwrap()),
                None => 1,
            })
            .collect();
        let unit_actions = cs
            .right_orders
            .iter()
            .zip(&lattices)
            .map(|(r, lx)| {
                units(alg, r)
                    .iter()
                    .map(|u| {
                        let m = crate::brandt::conjugation_matrix(alg, &combine(r, u));
                        let mut a = [[0i64; 3]; 3];
                        for (row, b) in lx.basis.basis.iter().enumerate() {
                            let img = lx.coords(&mat_vec(&m, b));
                            for c in 0..3 {
                                a[row][c] = img[c].to_integer().to_i64().unwrap();
                            }
                        }
                        a
                    })
                    .collect()
            })
            .collect();
        Ok(SpecialPointContext {
            base,
            lattices,
            weight,
            chi,
            unit_actions,
        })
    }

    /// `w_x(ω; c)`.
    pub fn weight_value(&self, x: usize, omega: &[Rational], c: &Rational) -> i8 {
        match &self.weight {
            Some(w) => self.chi[x] * w.eval_local(&self.base, omega, c),
            None => 1,
        }
    }
}

fn act(z: &[i64], a: &[[i64; 3]; 3]) -> Vec<i64> {
    (0..3)
        .map(|c| z[0] * a[0][c] + z[1] * a[1][c] + z[2] * a[2][c])
        .collect()
}

/// Orbit representatives of `A_{Δ,c}(L_x)` under `R_x^×`, over all classes.
pub fn special_points(
    ctx: &SpecialPointContext,
    delta: &Rational,
    c: &Rational,
) -> Vec<SpecialPoint> {
    let t = delta * c * c * Rational::from_integer((-2).into());
    if !t.is_integer() {
        return Vec::new();
    }
    let t = t.to_integer().to_i64().unwrap();
    let mut out = Vec::new();
    for (x, lx) in ctx.lattices.iter().enumerate() {
        let mut rest: BTreeSet<Vec<i64>> = ShortVectors::new(&lx.neg_gram_int())
            .with_value(t)
            .into_iter()
            .collect();
        while let Some(z) = rest.pop_first() {
            let mut orbit = BTreeSet::from([z.clone()]);
            let mut fixed = 0u64;
            for a in &ctx.unit_actions[x] {
                let img = act(&z, a);
                if img == z {
                    fixed += 1;
                }
                rest.remove(&img);
                orbit.insert(img);
            }
            out.push(SpecialPoint {
                class_index: x,
                embedding: z,
                stabilizer: fixed / 2,
                orbit: orbit.into_iter().collect(),
            });
        }
    }
    out
}

/// `η^l_{D,a}` as a form: `η(x) = Σ (t_x / [O_x^× : Z^×]) P_Δ(ω)` over special points of class `x`,
/// with `ω` taken as the orbit element chosen by `pick`.
pub fn eta_form_with<F>(
    space: &FormSpace,
    ctx: &SpecialPointContext,
    l: &Rational,
    b: &Rational,
    d: &Rational,
    a: &Rational,
    pick: F,
) -> Result<QuaternionicForm>
where
    F: Fn(&SpecialPoint) -> Vec<i64>,
{
    let delta = l * d;
    let c = a * b;
    let dim = space.v.dim();
    let mut eta = QuaternionicForm::zero(space.h(), dim);
    let fd = fundamental_pair(d);
    let fl = fundamental_pair(l).dk.unsigned_abs();
    let coprime = fd.dk.unsigned_abs().gcd(&fl) == 1;
    let fundamental = fd.a == *a && coprime;
    for sp in special_points(ctx, &delta, &c) {
        let x = sp.class_index;
        let z = pick(&sp);
        let omega: QVec = ctx.lattices[x]
            .to_pure(&z)
            .into_iter()
            .map(|v| v / &c)
            .collect();
        let wv = ctx.weight_value(x, &omega, &c);
        if fundamental && wv == 0 {
            return Err(Error::ScopeError(
                "vanishing weight at a special point".into(),
            ));
        }
        if wv == 0 {
            continue;
        }
        let p = gegenbauer_kernel(&space.v, &omega, wv)?;
        let scale = Rational::new(space.classes.unit_orders[x].into(), sp.stabilizer.into());
        for (e, v) in eta.coords[x].iter_mut().zip(p) {
            *e += v * &scale;
        }
    }
    Ok(eta)
}

pub fn eta_form(
    space: &FormSpace,
    ctx: &SpecialPointContext,
    l: &Rational,
    b: &Rational,
    d: &Rational,
    a: &Rational,
) -> Result<QuaternionicForm> {
    eta_form_with(space, ctx, l, b, d, a, |sp| sp.embedding.clone())
}

/// `⟨φ, η^l_{D,a}⟩`.
pub fn eta_pairing(
    f: &QuaternionicForm,
    space: &FormSpace,
    ctx: &SpecialPointContext,
    l: &Rational,
    b: &Rational,
    d: &Rational,
    a: &Rational,
) -> Result<Rational> {
    let eta = eta_form(space, ctx, l, b, d, a)?;
    space.height_pairing(f, &eta)
}
