//! Exact enumeration of lattice vectors of bounded norm.
//!
//! The positive definite form `Q(x) = xᵀGx` (integer `G`) is reduced by
//! fraction-free elimination, so every loop bound is an exact integer square
//! root and no floating point enters the decision of which vectors are listed.

use crate::arith::isqrt;
use rayon::prelude::*;

#[derive(Clone, Debug)]
pub struct ShortVectors {
    n: usize,
    /// `levels[k]` is the Bareiss matrix on the variables `k..n`.
    levels: Vec<Vec<Vec<i128>>>,
    /// `prev[k]` is the pivot of level `k-1` (1 at level 0).
    prev: Vec<i128>,
}

fn floor_div(a: i128, b: i128) -> i128 {
    let q = a / b;
    if (a % b != 0) && ((a < 0) != (b < 0)) {
        q - 1
    } else {
        q
    }
}

fn ceil_div(a: i128, b: i128) -> i128 {
    -floor_div(-a, b)
}

impl ShortVectors {
    /// Prepares enumeration for the integer Gram matrix `g` (positive definite).
    pub fn new(g: &[Vec<i64>]) -> ShortVectors {
        let n = g.len();
        let mut levels = Vec::with_capacity(n);
        let mut prev = Vec::with_capacity(n);
        let mut cur: Vec<Vec<i128>> = g
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let mut dprev: i128 = 1;
        for _ in 0..n {
            levels.push(cur.clone());
            prev.push(dprev);
            let m = cur.len();
            let p = cur[0][0];
            assert!(p > 0, "form is not positive definite");
            let next: Vec<Vec<i128>> = (1..m)
                .map(|i| {
                    (1..m)
                        .map(|j| {
                            let v = p * cur[i][j] - cur[0][i] * cur[0][j];
                            debug_assert_eq!(v % dprev, 0);
                            v / dprev
                        })
                        .collect()
                })
                .collect();
            dprev = p;
            cur = next;
        }
        ShortVectors { n, levels, prev }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Integer range of `x_k` given `x_{k+1..}`, plus the level data `(A, B, C, dX)`.
    fn range(
        &self,
        k: usize,
        x: &[i64],
        bound: i128,
    ) -> Option<(i128, i128, i128, i128, i128, i128)> {
        let l = &self.levels[k];
        let m = l.len();
        let a = l[0][0];
        let mut b: i128 = 0;
        let mut c: i128 = 0;
        for i in 1..m {
            let xi = x[k + i] as i128;
            if xi == 0 {
                continue;
            }
            b += 2 * l[0][i] * xi;
            c += l[i][i] * xi * xi;
            for j in i + 1..m {
                c += 2 * l[i][j] * xi * x[k + j] as i128;
            }
        }
        let dx = self.prev[k] * bound;
        let disc = b * b - 4 * a * (c - dx);
        if disc < 0 {
            return None;
        }
        let s = isqrt(disc as u128) as i128;
        let lo = ceil_div(-b - s - 1, 2 * a);
        let hi = floor_div(-b + s + 1, 2 * a);
        Some((lo, hi, a, b, c, dx))
    }

    fn rec<F: FnMut(&[i64], i64)>(&self, k: usize, x: &mut [i64], bound: i128, f: &mut F) {
        let Some((lo, hi, a, b, c, dx)) = self.range(k, x, bound) else {
            return;
        };
        for v in lo..=hi {
            let val = a * v * v + b * v + c;
            if val > dx {
                continue;
            }
            x[k] = v as i64;
            if k == 0 {
                if val != 0 {
                    f(x, val as i64);
                }
            } else {
                self.rec(k - 1, x, bound, f);
            }
        }
        x[k] = 0;
    }

    /// Calls `f(x, Q(x))` for every nonzero `x` with `Q(x) ≤ bound`.
    pub fn for_each<F: FnMut(&[i64], i64)>(&self, bound: i64, mut f: F) {
        if bound <= 0 {
            return;
        }
        let mut x = vec![0i64; self.n];
        self.rec(self.n - 1, &mut x, bound as i128, &mut f);
    }

    /// All nonzero vectors with `Q(x) = value`, in enumeration order.
    pub fn with_value(&self, value: i64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        self.for_each(value, |x, q| {
            if q == value {
                out.push(x.to_vec());
            }
        });
        out
    }

    /// Parallel fold over all nonzero vectors with `Q(x) ≤ bound`.
    ///
    /// Work is split over the outermost coordinate; `merge` must be associative
    /// and commutative for the result to be schedule independent.
    pub fn par_fold<A, I, V, M>(&self, bound: i64, init: I, visit: V, merge: M) -> A
    where
        A: Send,
        I: Fn() -> A + Sync + Send,
        V: Fn(&mut A, &[i64], i64) + Sync + Send,
        M: Fn(A, A) -> A + Sync + Send,
    {
        if bound <= 0 {
            return init();
        }
        let top = self.n - 1;
        let zero = vec![0i64; self.n];
        let Some((lo, hi, ..)) = self.range(top, &zero, bound as i128) else {
            return init();
        };
        (lo..=hi)
            .into_par_iter()
            .map(|v| {
                let mut acc = init();
                let mut x = vec![0i64; self.n];
                x[top] = v as i64;
                let l = &self.levels[top];
                if l[0][0] * v * v > self.prev[top] * bound as i128 {
                    return acc;
                }
                if top == 0 {
                    let q = (l[0][0] * v * v) as i64;
                    if q != 0 {
                        visit(&mut acc, &x, q);
                    }
                } else {
                    self.rec(top - 1, &mut x, bound as i128, &mut |y: &[i64], q| {
                        visit(&mut acc, y, q)
                    });
                }
                acc
            })
            .reduce(&init, &merge)
    }
}

/// Evaluates `xᵀGx`.
pub fn eval_form(g: &[Vec<i64>], x: &[i64]) -> i64 {
    let mut s: i128 = 0;
    for i in 0..x.len() {
        for j in 0..x.len() {
            s += g[i][j] as i128 * x[i] as i128 * x[j] as i128;
        }
    }
    s as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(g: &[Vec<i64>], bound: i64, box_: i64) -> Vec<(Vec<i64>, i64)> {
        let n = g.len();
        let mut out = Vec::new();
        let total = (2 * box_ + 1).pow(n as u32);
        for idx in 0..total {
            let mut t = idx;
            let x: Vec<i64> = (0..n)
                .map(|_| {
                    let v = t % (2 * box_ + 1) - box_;
                    t /= 2 * box_ + 1;
                    v
                })
                .collect();
            let q = eval_form(g, &x);
            if q > 0 && q <= bound {
                out.push((x, q));
            }
        }
        out.sort();
        out
    }

    #[test]
    fn matches_brute_force() {
        let g = vec![vec![4, 1, -1], vec![1, 6, 2], vec![-1, 2, 10]];
        let sv = ShortVectors::new(&g);
        let mut got = Vec::new();
        sv.for_each(60, |x, q| got.push((x.to_vec(), q)));
        got.sort();
        assert_eq!(got, brute(&g, 60, 8));
        let par = sv.par_fold(
            60,
            Vec::new,
            |a, x, q| a.push((x.to_vec(), q)),
            |mut a, b| {
                a.extend(b);
                a
            },
        );
        let mut par = par;
        par.sort();
        assert_eq!(par, got);
    }

    #[test]
    fn quaternary() {
        let g = vec![
            vec![2, 1, 0, 0],
            vec![1, 2, 0, 1],
            vec![0, 0, 4, 1],
            vec![0, 1, 1, 6],
        ];
        let sv = ShortVectors::new(&g);
        let mut got = Vec::new();
        sv.for_each(30, |x, q| got.push((x.to_vec(), q)));
        got.sort();
        assert_eq!(got, brute(&g, 30, 7));
    }
}
