//! Independent brute-force oracles, with their outputs frozen.

use num_traits::Zero;
use qtheta::arith::{fundamental_pair, int, is_fundamental, kronecker, rat};
use qtheta::brandt::{brandt_matrix, eigenforms};
use qtheta::pipeline::class_set;
use qtheta::thetalift::{vectors_with_disc, LiftEngine};
use qtheta::weightfn::AdelicWeight;
use qtheta::{FormSpace, LiftConfig, Rational, TernaryLattice};
use std::collections::BTreeMap;

const BOX: i64 = 24;

/// `#{x ∈ ℤ³ ∩ [−B, B]³ : Δ(x) = target}`, also asserting nothing sits on the box boundary.
fn brute_count(lat: &TernaryLattice, target: i64) -> usize {
    let (d, o) = lat.delta_coeffs();
    let delta = |x: [i64; 3]| {
        d[0] * x[0] * x[0]
            + d[1] * x[1] * x[1]
            + d[2] * x[2] * x[2]
            + o[0] * x[0] * x[1]
            + o[1] * x[0] * x[2]
            + o[2] * x[1] * x[2]
    };
    let mut n = 0;
    for a in -BOX..=BOX {
        for b in -BOX..=BOX {
            for c in -BOX..=BOX {
                if delta([a, b, c]) == target {
                    assert!(a.abs().max(b.abs()).max(c.abs()) < BOX, "box too small");
                    n += 1;
                }
            }
        }
    }
    n
}

fn setup(disc: u64) -> (FormSpace, Vec<TernaryLattice>) {
    let cs = class_set(disc, &[disc]).unwrap();
    let lats = cs
        .right_orders
        .iter()
        .map(|r| TernaryLattice::from_order(cs.algebra(), r))
        .collect();
    (FormSpace::new(&cs, 0), lats)
}

#[test]
fn representation_counts_match_brute_force() {
    let (_, lats) = setup(11);
    let deltas = [-3i64, -4, -7, -8, -11, -12, -15, -16, -19, -20, -23, -44];
    let frozen = [
        0, 2, 0, 0, 2, 4, 4, 2, 0, 4, 8, 4, 2, 0, 0, 0, 0, 2, 6, 6, 0, 6, 6, 6,
    ];
    let mut got = Vec::new();
    for lat in &lats {
        for &d in &deltas {
            let n = vectors_with_disc(lat, &int(1), &int(d)).len();
            assert_eq!(n, brute_count(lat, d), "Δ = {d}");
            got.push(n);
        }
    }
    assert_eq!(got, frozen);
}

/// `λ(D, 1)` for `l = 1`: `Σ_x φ(x)/t_x · #{z ∈ L_x : Δ(z) = D}`.
#[test]
fn trivial_character_lift_matches_brute_force() {
    let (sp, lats) = setup(11);
    let cfg = LiftConfig::new(&int(1), 11, &BTreeMap::from([(11, -1)]), 0, false).unwrap();
    let eng = LiftEngine::new(&sp, &cfg, 60).unwrap();
    let g = &eigenforms(&sp, &[2])
        .unwrap()
        .into_iter()
        .find(|(_, m)| m[&2] == int(-2))
        .unwrap()
        .0;
    let frozen = [
        (-3, -2),
        (-4, 2),
        (-7, 0),
        (-8, 0),
        (-11, 2),
        (-12, 2),
        (-15, -2),
        (-16, -4),
        (-19, 0),
        (-20, -2),
        (-23, 2),
        (-24, 0),
        (-27, 2),
        (-28, 0),
        (-31, 2),
        (-32, 0),
        (-35, 0),
        (-36, 0),
        (-39, 0),
        (-40, 0),
        (-43, 0),
        (-44, -2),
        (-47, 0),
        (-48, 0),
        (-51, 0),
        (-52, 0),
        (-55, -2),
        (-56, -4),
        (-59, 2),
        (-60, 6),
    ];
    let mut got = Vec::new();
    for n in 3..=60i64 {
        let d = -n;
        if !matches!(d.rem_euclid(4), 0 | 1) {
            continue;
        }
        let mut oracle = Rational::zero();
        for (x, lat) in lats.iter().enumerate() {
            let t = Rational::from_integer(sp.classes.unit_orders[x].into());
            oracle += &g.coords[x][0] * Rational::from_integer(brute_count(lat, d).into()) / t;
        }
        assert_eq!(
            eng.coefficient(g, &int(d), &int(1)).unwrap(),
            oracle,
            "D = {d}"
        );
        got.push((d, oracle));
    }
    // normalized so φ has coordinates ±1 on the two classes
    let scale = &got[0].1 / int(frozen[0].1);
    assert!(!scale.is_zero());
    for ((d, v), (fd, fv)) in got.iter().zip(frozen) {
        assert_eq!((*d, v / &scale), (fd, int(fv)));
    }
}

#[test]
fn brandt_matrices_level_11() {
    let (sp, _) = setup(11);
    assert_eq!(sp.classes.unit_orders, vec![2, 3]);
    let frozen = [(2, [[1, 2], [3, 0]], -2), (3, [[2, 2], [3, 1]], -1)];
    for (p, m, ap) in frozen {
        let t = brandt_matrix(&sp, p).full();
        let want: Vec<Vec<Rational>> = m
            .iter()
            .map(|r| r.iter().map(|&x| int(x)).collect())
            .collect();
        assert_eq!(t, want, "T_{p}");
        for row in &t {
            assert_eq!(row.iter().sum::<Rational>(), int(p as i64 + 1));
        }
        // spectrum {p + 1, a_p(11a)}
        let tr = &t[0][0] + &t[1][1];
        let det = &t[0][0] * &t[1][1] - &t[0][1] * &t[1][0];
        assert_eq!(
            (tr, det),
            (int(p as i64 + 1 + ap), int((p as i64 + 1) * ap))
        );
    }
}

/// `w(·; m·a)` on `a⁻¹L̂` equals `(dK(l)/m)·w(·; a)` for `m` prime to `f(l)`.
#[test]
fn weight_shift_identity() {
    let cs = class_set(37, &[37]).unwrap();
    let lat = TernaryLattice::from_order(cs.algebra(), &cs.order.lattice);
    for l in [int(5), int(-3), rat(5, 4)] {
        let w = AdelicWeight::new(&lat, &l).unwrap();
        let dk = fundamental_pair(&l).dk;
        assert!(is_fundamental(dk));
        let mut nonzero = 0;
        for a in [int(1), int(2), rat(1, 3), int(7)] {
            for z in [
                [1i64, 0, 0],
                [0, 1, 0],
                [1, 1, 0],
                [2, -1, 3],
                [1, 2, 2],
                [4, 0, -1],
                [3, 3, 1],
            ] {
                let y: Vec<Rational> = lat.to_pure(&z).into_iter().map(|v| v / &a).collect();
                let base = w.eval(&lat, &y, &a);
                nonzero += usize::from(base != 0);
                for m in [2i64, 4, 7, 11, 13, 37] {
                    if m % dk.abs() == 0 || num_integer::gcd(m, dk.abs()) != 1 {
                        continue;
                    }
                    let shifted = w.eval(&lat, &y, &(&a * int(m)));
                    assert_eq!(
                        shifted,
                        kronecker(dk, m) * base,
                        "l={l} a={a} z={z:?} m={m}"
                    );
                }
            }
        }
        assert!(nonzero > 0);
    }
}
