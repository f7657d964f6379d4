//! Exact rational arithmetic, quadratic characters and discriminant pairs.
//!
//! A fractional ideal of the rationals is represented by its positive
//! generator, so a discriminant pair is a pair of rationals `(D, a)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_rational::BigRational as Rational;

/// Default trial division bound (inputs are far below `bound²`).
pub const TRIAL_BOUND: u64 = 1_000_000;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Formats a rational as `p` or `p/q`.
pub fn fmt_rat(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p`, `-p` or `p/q`.
pub fn parse_rat(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

pub fn to_i64(q: &Rational) -> Option<i64> {
    if q.is_integer() {
        q.numer().to_i64()
    } else {
        None
    }
}

pub fn to_f64(q: &Rational) -> f64 {
    let n = q.numer().to_f64().unwrap_or(f64::NAN);
    let d = q.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        n / d
    } else {
        // huge numerators: scale down by a common power of two
        let shift = q.numer().bits().max(q.denom().bits()).saturating_sub(1000);
        let n = (q.numer() >> shift).to_f64().unwrap();
        let d = (q.denom() >> shift).to_f64().unwrap();
        n / d
    }
}

pub fn sign(q: &Rational) -> i64 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}

pub fn mod_pow(b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u128 % m as u128;
    let mut b128 = (b % m) as u128;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b128 % m as u128;
        }
        b128 = b128 * b128 % m as u128;
        e >>= 1;
    }
    r as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: i64, m: i64) -> Option<i64> {
    let g = (a.rem_euclid(m)).extended_gcd(&m);
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m))
}

pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (0..=n).filter(|&i| sieve[i]).map(|i| i as u64).collect()
}

/// Prime factorization by trial division, as `(p, e)` pairs in increasing order.
pub fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n && d <= TRIAL_BOUND {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: u64) -> Vec<u64> {
    factor(n).into_iter().map(|(p, _)| p).collect()
}

pub fn is_squarefree(n: u64) -> bool {
    factor(n).iter().all(|&(_, e)| e == 1)
}

/// Number of distinct prime factors.
pub fn omega(n: u64) -> u32 {
    factor(n).len() as u32
}

/// Kronecker symbol `(d/n)`.
pub fn kronecker(d: i64, n: i64) -> i8 {
    let mut d = d as i128;
    let mut n = n as i128;
    if n == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut res: i8 = 1;
    if n < 0 {
        n = -n;
        if d < 0 {
            res = -res;
        }
    }
    let mut v = 0;
    while n % 2 == 0 {
        n /= 2;
        v += 1;
    }
    if v > 0 {
        if d % 2 == 0 {
            return 0;
        }
        if v % 2 == 1 {
            let r = d.rem_euclid(8);
            if r == 3 || r == 5 {
                res = -res;
            }
        }
    }
    // Jacobi symbol (d/n), n odd positive
    d = d.rem_euclid(n);
    while d != 0 {
        while d % 2 == 0 {
            d /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                res = -res;
            }
        }
        std::mem::swap(&mut d, &mut n);
        if d % 4 == 3 && n % 4 == 3 {
            res = -res;
        }
        d %= n;
    }
    if n == 1 {
        res
    } else {
        0
    }
}

/// Legendre symbol of `a` modulo the odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i8 {
    kronecker(a.rem_euclid(p as i64), p as i64)
}

/// Whether `d` is a fundamental discriminant (1 counts, as the trivial one).
pub fn is_fundamental(d: i64) -> bool {
    if d == 1 {
        return true;
    }
    if d == 0 {
        return false;
    }
    let r = d.rem_euclid(4);
    if r == 1 {
        return is_squarefree(d.unsigned_abs());
    }
    if r == 0 {
        let m = d / 4;
        let mr = m.rem_euclid(4);
        return (mr == 2 || mr == 3) && is_squarefree(m.unsigned_abs());
    }
    false
}

/// Squarefree kernel with sign, and the integer `f` with `n = s·f²`.
fn squarefree_decomposition(n: i64) -> (i64, u64) {
    let mut s: i64 = n.signum();
    let mut f: u64 = 1;
    for (p, e) in factor(n.unsigned_abs()) {
        if e % 2 == 1 {
            s *= p as i64;
        }
        f *= p.pow(e / 2);
    }
    (s, f)
}

/// A discriminant pair `(D, a)` with `D·a² = dK` fundamental.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FundamentalPair {
    pub d: Rational,
    pub a: Rational,
    pub dk: i64,
}

/// The unique positive `a` making `(D, a)` fundamental.
pub fn fundamental_pair(d: &Rational) -> FundamentalPair {
    assert!(!d.is_zero(), "fundamental_pair of zero");
    // D·q² = n is an integer when D = p/q
    let q = d.denom().clone();
    let n = (d.numer() * &q)
        .to_i64()
        .expect("discriminant out of range");
    let (s, f) = squarefree_decomposition(n);
    let (dk, fr) = if s == 1 {
        (1, Rational::from_integer(BigInt::from(f)))
    } else if s.rem_euclid(4) == 1 {
        (s, Rational::from_integer(BigInt::from(f)))
    } else {
        (4 * s, Rational::new(BigInt::from(f), BigInt::from(2)))
    };
    let a = Rational::from_integer(q) / fr;
    FundamentalPair {
        d: d.clone(),
        a,
        dk,
    }
}

/// True iff `D·a²` is an integer congruent to 0 or 1 mod 4.
pub fn is_discriminant_pair(d: &Rational, a: &Rational) -> bool {
    let n = d * a * a;
    if !n.is_integer() {
        return false;
    }
    let r = n.numer().mod_floor(&BigInt::from(4));
    r.is_zero() || r.is_one()
}

/// `(D, a)` is a discriminant pair whose order is maximal: `D·a²` is fundamental.
pub fn is_fundamental_pair(d: &Rational, a: &Rational) -> bool {
    is_discriminant_pair(d, a) && fundamental_pair(d).a == *a
}

/// `|dK|` of the fundamental pair of `D`.
pub fn conductor(d: &Rational) -> u64 {
    fundamental_pair(d).dk.unsigned_abs()
}

/// Fundamental discriminant of an integer.
pub fn fundamental_part(n: i64) -> i64 {
    fundamental_pair(&int(n)).dk
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(7, 1), 1);
        assert_eq!(kronecker(4, 2), 0);
        assert_eq!(kronecker(5, 37), -1);
        assert_eq!(kronecker(-4, -1), -1);
    }

    #[test]
    fn fundamental_examples() {
        let p = fundamental_pair(&int(-4));
        assert_eq!((p.dk, p.a), (-4, int(1)));
        let p = fundamental_pair(&int(-180));
        assert_eq!((p.dk, p.a), (-20, rat(1, 3)));
        let p = fundamental_pair(&rat(-3, 4));
        assert_eq!((p.dk, p.a), (-3, int(2)));
        let p = fundamental_pair(&int(9));
        assert_eq!((p.dk, p.a), (1, rat(1, 3)));
    }

    #[test]
    fn discriminant_pair_examples() {
        assert!(is_discriminant_pair(&int(-3), &int(1)));
        assert!(is_discriminant_pair(&int(-3), &int(2)));
        assert!(!is_discriminant_pair(&int(-5), &int(1)));
        assert!(is_discriminant_pair(&int(-7), &int(3)));
    }

    #[test]
    fn conductor_examples() {
        assert_eq!(conductor(&int(9)), 1);
        assert_eq!(conductor(&int(5)), 5);
        assert_eq!(conductor(&int(-180)), 20);
    }

    #[test]
    fn rational_roundtrip() {
        for s in ["-3/4", "5", "0", "7/2"] {
            assert_eq!(fmt_rat(&parse_rat(s).unwrap()), s);
        }
    }
}
