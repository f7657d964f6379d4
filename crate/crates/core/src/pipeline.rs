//! End-to-end runs: classes, eigenform, lift and ratio report for one configuration.

use crate::arith::{fmt_rat, kronecker, primes_up_to, Rational};
use crate::brandt::{al_signs, eigenforms, FormSpace, QuaternionicForm};
use crate::cache::Cache;
use crate::error::{Error, Result};
use crate::lvalues::{
    extend_coefficients, terms_needed, waldspurger_report, EigenSystem, RatioReport,
};
use crate::quatalg::{algebra_for_ramification, eichler_order, right_ideal_classes, IdealClassSet};
use crate::thetalift::{validate_l, CoefficientTable, LiftConfig, LiftEngine};
use serde::Serialize;
use std::collections::BTreeMap;

/// Inputs of a run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub n: u64,
    pub eps_g: BTreeMap<u64, i8>,
    /// Expected `a_p` used to pick the eigenform; empty means "match by `ε_g` only".
    pub expected_ap: BTreeMap<u64, i64>,
    /// Finite ramification of `B`; defaults to `Σ^l`.
    pub ramified: Option<Vec<u64>>,
    pub l: Rational,
    pub k: u32,
    pub d_bound: u64,
    pub prime_bound: u64,
    pub precision: f64,
    pub tolerance: f64,
    pub skew: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 11,
            eps_g: BTreeMap::from([(11, -1)]),
            expected_ap: BTreeMap::new(),
            ramified: None,
            l: Rational::from_integer(1.into()),
            k: 0,
            d_bound: 200,
            prime_bound: 50,
            precision: 1e-8,
            tolerance: 1e-6,
            skew: false,
        }
    }
}

impl RunConfig {
    /// Canonical text used for cache keys.
    pub fn canonical(&self) -> String {
        let eps: Vec<String> = self.eps_g.iter().map(|(p, e)| format!("{p}:{e}")).collect();
        let ap: Vec<String> = self
            .expected_ap
            .iter()
            .map(|(p, a)| format!("{p}:{a}"))
            .collect();
        format!(
            "N={};eps={};ap={};ram={:?};l={};k={};D={};P={};prec={:e};skew={}",
            self.n,
            eps.join(","),
            ap.join(","),
            self.ramified,
            fmt_rat(&self.l),
            self.k,
            self.d_bound,
            self.prime_bound,
            self.precision,
            self.skew
        )
    }

    /// Hl1/Hl2 and conductor checks; returns the lift parameters and `Σ^l`.
    pub fn validate(&self) -> Result<(LiftConfig, Vec<u64>)> {
        let (sigma, b, u) = validate_l(&self.l, self.n, &self.eps_g, self.k, self.skew)?;
        Ok((
            LiftConfig {
                l: self.l.clone(),
                b,
                u,
                k: self.k,
                skew: self.skew,
            },
            sigma,
        ))
    }

    pub fn ramification(&self) -> Result<Vec<u64>> {
        match &self.ramified {
            Some(r) => Ok(r.clone()),
            None => Ok(self.validate()?.1),
        }
    }
}

/// Class set of the Eichler order of level `N` in the algebra ramified at `ramified`.
pub fn class_set(n: u64, ramified: &[u64]) -> Result<IdealClassSet> {
    let b = algebra_for_ramification(ramified)?;
    let o = eichler_order(&b, n)?;
    right_ideal_classes(&o)
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct ClassSummary {
    pub h: usize,
    pub t: Vec<u64>,
    pub mass: String,
    pub expected_mass: String,
    pub norms: Vec<String>,
}

pub fn summarize(cs: &IdealClassSet) -> ClassSummary {
    ClassSummary {
        h: cs.len(),
        t: cs.unit_orders.clone(),
        mass: fmt_rat(&cs.mass()),
        expected_mass: fmt_rat(&crate::quatalg::eichler_mass(&cs.order)),
        norms: cs.norms.iter().map(fmt_rat).collect(),
    }
}

/// A rational eigensystem of `M_k(R)`.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct EigenListing {
    pub form: Vec<Vec<String>>,
    /// `a_p = p^k λ_p`.
    pub ap: BTreeMap<u64, String>,
    pub al_signs: BTreeMap<u64, i8>,
}

pub fn eigen_listing(space: &FormSpace, prime_bound: u64) -> Result<Vec<EigenListing>> {
    let primes = primes_up_to(prime_bound);
    let k = space.k();
    eigenforms(space, &primes)?
        .into_iter()
        .map(|(f, m)| {
            let ap = m
                .into_iter()
                .map(|(p, l)| {
                    (
                        p,
                        fmt_rat(&(l * Rational::from_integer(num_bigint::BigInt::from(p).pow(k)))),
                    )
                })
                .collect();
            Ok(EigenListing {
                form: f.to_strings(),
                ap,
                al_signs: al_signs(space, &f)?,
            })
        })
        .collect()
}

/// The eigenform matching `ε_g` (through the Atkin–Lehner signs) and the expected `a_p`.
pub fn match_eigenform(space: &FormSpace, cfg: &RunConfig) -> Result<QuaternionicForm> {
    let ram = &space.classes.algebra().ramified_finite;
    let mut primes: Vec<u64> = primes_up_to(cfg.prime_bound.max(7));
    loop {
        let forms = eigenforms(space, &primes)?;
        let k = space.k();
        let matching: Vec<QuaternionicForm> = forms
            .into_iter()
            .filter(|(f, m)| {
                let ok_ap = cfg.expected_ap.iter().all(|(p, a)| match m.get(p) {
                    Some(l) => {
                        l * Rational::from_integer(num_bigint::BigInt::from(*p).pow(k))
                            == Rational::from_integer((*a).into())
                    }
                    None => true,
                });
                let ok_eps = al_signs(space, f).map_or(false, |s| {
                    s.iter().all(|(p, &kp)| {
                        let e = if ram.contains(p) { -kp } else { kp };
                        cfg.eps_g.get(p).map_or(true, |&want| want == e)
                    })
                });
                ok_ap && ok_eps
            })
            .map(|(f, _)| f)
            .collect();
        match matching.len() {
            1 => return Ok(matching.into_iter().next().unwrap()),
            0 => return Err(Error::Eigenform("no eigensystem matches the target".into())),
            _ => {
                let next = primes.last().copied().unwrap_or(2) * 2;
                if next > 1000 {
                    return Err(Error::Eigenform(
                        "eigensystems collide on all tested primes".into(),
                    ));
                }
                primes = primes_up_to(next);
            }
        }
    }
}

/// Eigenvalues of a `k = 0` form up to `bound`, with `ε_g` checked against the configuration.
pub fn eigensystem(
    space: &FormSpace,
    f: &QuaternionicForm,
    cfg: &RunConfig,
    bound: u64,
) -> Result<EigenSystem> {
    let es = if space.k() == 0 {
        EigenSystem::from_brandt(space, f, bound)?
    } else {
        let mut ap = BTreeMap::new();
        for p in primes_up_to(bound) {
            if cfg.n % p != 0 {
                let t = crate::brandt::brandt_matrix(space, p);
                let lam = crate::brandt::eigenvalue_of(&t, f)?;
                let a = lam * Rational::from_integer(num_bigint::BigInt::from(p).pow(space.k()));
                ap.insert(
                    p,
                    crate::arith::to_i64(&a).ok_or(Error::IrrationalEigenvalue { p })?,
                );
            }
        }
        EigenSystem::new(cfg.n, space.k(), ap, cfg.eps_g.clone())
    };
    for (p, e) in &cfg.eps_g {
        if es.eps.get(p) != Some(e) {
            return Err(Error::Eigenform(format!(
                "Atkin–Lehner sign at {p} differs from ε_g"
            )));
        }
    }
    Ok(es)
}

/// Everything a verification run produces.
#[derive(Clone, Debug)]
pub struct Verification {
    pub lift: LiftConfig,
    pub sigma: Vec<u64>,
    pub classes: IdealClassSet,
    pub form: QuaternionicForm,
    pub eigensystem: EigenSystem,
    pub table: CoefficientTable,
    pub report: RatioReport,
}

impl Verification {
    /// Constancy within tolerance, all zero patterns matched and some `λ ≠ 0`.
    pub fn passed(&self, tolerance: f64) -> bool {
        self.report.all_zero_matched()
            && match self.report.constancy {
                Some(c) => c < tolerance,
                None => self.table.is_zero() && !self.report.rows.is_empty(),
            }
    }
}

/// Coefficient table of `θ(φ)` for `|D·a²| ≤ bound`, through the cache when given.
pub fn lift_table(
    space: &FormSpace,
    lift: &LiftConfig,
    f: &QuaternionicForm,
    bound: u64,
    cache: Option<&Cache>,
) -> Result<CoefficientTable> {
    let key = format!(
        "lift;{};k={};l={};b={};skew={};bound={bound};form={:?}",
        space.classes.order.lattice.key(),
        lift.k,
        fmt_rat(&lift.l),
        fmt_rat(&lift.b),
        lift.skew,
        f.to_strings()
    );
    if let Some(c) = cache {
        if let Some(text) = c.get(&key)? {
            if let Ok(t) = CoefficientTable::from_json(&text) {
                log::info!("lift table: cache hit");
                return Ok(t);
            }
        }
    }
    let t = LiftEngine::new(space, lift, bound)?.lift(f);
    if let Some(c) = cache {
        c.put(&key, &t.to_json())?;
    }
    Ok(t)
}

pub fn verify(cfg: &RunConfig, cache: Option<&Cache>) -> Result<Verification> {
    let (lift, sigma) = cfg.validate()?;
    let ram = match &cfg.ramified {
        Some(r) => r.clone(),
        None => sigma.clone(),
    };
    let classes = class_set(cfg.n, &ram)?;
    let space = FormSpace::new(&classes, cfg.k);
    let form = match_eigenform(&space, cfg)?;
    let dl = lift.dk().unsigned_abs();
    let m = terms_needed(cfg.n, cfg.k, cfg.d_bound.max(dl), cfg.precision) as u64 + 16;
    let es = eigensystem(&space, &form, cfg, m)?;
    let coeffs = extend_coefficients(&es, m as usize)?;
    let table = lift_table(&space, &lift, &form, cfg.d_bound, cache)?;
    let report = waldspurger_report(&table, &es, &coeffs, cfg.d_bound, cfg.precision)?;
    Ok(Verification {
        lift,
        sigma,
        classes,
        form,
        eigensystem: es,
        table,
        report,
    })
}

/// `ε_g(p) = −a_p` at `p | N` for weight 2; used for the builtin curves.
pub fn eps_from_curve(c: &crate::lvalues::Curve) -> BTreeMap<u64, i8> {
    crate::arith::prime_divisors(c.conductor)
        .into_iter()
        .map(|p| (p, -(c.ap(p) as i8)))
        .collect()
}

/// `χ^l(p)` on the level primes, for reports.
pub fn chi_l_at_level(l: &Rational, n: u64) -> BTreeMap<u64, i8> {
    let dk = crate::arith::fundamental_pair(l).dk;
    crate::arith::prime_divisors(n)
        .into_iter()
        .map(|p| (p, kronecker(dk, p as i64)))
        .collect()
}
