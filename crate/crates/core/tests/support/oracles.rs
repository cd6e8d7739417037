//! Brute-force reference implementations used to cross-check the library.
//!
//! Nothing here calls into `pcs_core`: linear algebra is a plain rational
//! Gauss-Jordan, sign patterns are all `2^m` of them, and every search is
//! exhaustive with no early exit.
#![allow(dead_code)]

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = BigRational;
pub type Point = (Vec<Q>, Vec<Q>);

pub fn q(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(rows: &mut [Vec<Q>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Q::one() / rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for k in 0..rows[i].len() {
                    let t = &f * &rows[r][k];
                    rows[i][k] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    pivots
}

pub fn rank(a: &[Vec<Q>]) -> usize {
    if a.is_empty() {
        return 0;
    }
    let cols = a[0].len();
    let mut rows = a.to_vec();
    rref(&mut rows, cols).len()
}

/// The unique solution of `a z = b`, or `None`.
pub fn solve(a: &[Vec<Q>], b: &[Q], cols: usize) -> Option<Vec<Q>> {
    let mut rows: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(r, v)| {
            let mut r = r.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let pivots = rref(&mut rows, cols + 1);
    if pivots.contains(&cols) || pivots.len() != cols {
        return None;
    }
    Some((0..cols).map(|i| rows[i][cols].clone()).collect())
}

pub fn patterns(m: usize) -> Vec<Vec<i64>> {
    (0..1usize << m)
        .map(|mask| (0..m).map(|j| if mask >> j & 1 == 1 { -1 } else { 1 }).collect())
        .collect()
}

fn signed(b: &[Q], eps: &[i64]) -> Vec<Q> {
    b.iter().zip(eps).map(|(v, &e)| v * q(e)).collect()
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..1usize << n).map(move |mask| (0..n).filter(|i| mask >> i & 1 == 1).collect())
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    subsets(n).filter(|s| s.len() == k).collect()
}

fn nnz(x: &[Q]) -> usize {
    x.iter().filter(|v| !v.is_zero()).count()
}

/// Every solution of `Φx = b_ε` (any `ε`) that is unique on some support.
fn basic_solutions(phi: &[Vec<Q>], b: &[Q]) -> BTreeSet<Vec<Q>> {
    let n = phi[0].len();
    let mut out = BTreeSet::new();
    for eps in patterns(phi.len()) {
        let rhs = signed(b, &eps);
        for sup in subsets(n) {
            let sub: Vec<Vec<Q>> = phi.iter().map(|r| sup.iter().map(|&j| r[j].clone()).collect()).collect();
            if let Some(z) = solve(&sub, &rhs, sup.len()) {
                let mut x = vec![Q::zero(); n];
                for (&j, v) in sup.iter().zip(z) {
                    x[j] = v;
                }
                out.insert(x);
            }
        }
    }
    out
}

/// Sparsest solutions of `|Φx| = b` by exhaustive search.
pub fn l0_oracle(phi: &[Vec<Q>], b: &[Q]) -> (usize, Vec<Vec<Q>>) {
    let all = basic_solutions(phi, b);
    let s = all.iter().map(|x| nnz(x)).min().expect("full row rank gives a solution");
    (s, all.into_iter().filter(|x| nnz(x) == s).collect())
}

pub fn power_sum(x: &[Q], p: f64) -> f64 {
    x.iter()
        .filter(|v| !v.is_zero())
        .map(|v| v.abs().to_f64().unwrap().powf(p))
        .sum()
}

fn argmin(cands: impl IntoIterator<Item = Vec<Q>>, p: f64, rel: f64) -> (f64, Vec<Vec<Q>>) {
    let scored: Vec<(f64, Vec<Q>)> = cands.into_iter().map(|x| (power_sum(&x, p), x)).collect();
    let best = scored.iter().map(|(v, _)| *v).fold(f64::INFINITY, f64::min);
    let mut sols: Vec<Vec<Q>> = scored
        .into_iter()
        .filter(|(v, _)| *v - best <= rel * best.max(f64::MIN_POSITIVE))
        .map(|(_, x)| x)
        .collect();
    sols.sort();
    sols.dedup();
    (best, sols)
}

/// Global ℓp minimizers with no box: the objective is strictly concave along
/// any non-constant segment inside an orthant, so every minimizer is a basic
/// solution of some branch.
pub fn lp_global_oracle(phi: &[Vec<Q>], b: &[Q], p: f64) -> (f64, Vec<Vec<Q>>) {
    argmin(basic_solutions(phi, b), p, 1e-9)
}

/// `min Σ|x_i|^p` over `{|Φx| = b, ‖x‖∞ <= r0}` by enumerating vertices of
/// every (branch, orthant, box) piece: each coordinate is `0`, `±r0`, or free,
/// with exactly `m` free.
pub fn lp_box_oracle(phi: &[Vec<Q>], b: &[Q], r0: &Q, p: f64) -> Option<(f64, Vec<Vec<Q>>)> {
    let (m, n) = (phi.len(), phi[0].len());
    let mut cands = BTreeSet::new();
    for eps in patterns(m) {
        let rhs = signed(b, &eps);
        for free in k_subsets(n, m) {
            let fixed: Vec<usize> = (0..n).filter(|j| !free.contains(j)).collect();
            for code in 0..3usize.pow(fixed.len() as u32) {
                let mut x = vec![Q::zero(); n];
                let mut c = code;
                for &j in &fixed {
                    x[j] = match c % 3 {
                        0 => Q::zero(),
                        1 => r0.clone(),
                        _ => -r0.clone(),
                    };
                    c /= 3;
                }
                let reduced: Vec<Q> = (0..m)
                    .map(|i| &rhs[i] - fixed.iter().map(|&j| &phi[i][j] * &x[j]).fold(Q::zero(), |a, t| a + t))
                    .collect();
                let sub: Vec<Vec<Q>> = phi.iter().map(|r| free.iter().map(|&j| r[j].clone()).collect()).collect();
                if let Some(z) = solve(&sub, &reduced, m) {
                    for (&j, v) in free.iter().zip(z) {
                        x[j] = v;
                    }
                    if x.iter().all(|v| &v.abs() <= r0) {
                        cands.insert(x);
                    }
                }
            }
        }
    }
    (!cands.is_empty()).then(|| argmin(cands, p, 1e-9))
}

/// Vertices of `{Φx = b_ε, |x| <= y <= r0}` over all `ε`, by trying every
/// choice of `2n - m` tight rows among the `3n` defining inequalities.
pub fn vertex_oracle(phi: &[Vec<Q>], b: &[Q], r0: &Q) -> BTreeSet<Point> {
    let (m, n) = (phi.len(), phi[0].len());
    // rows over (x, y): x_i - y_i <= 0, -x_i - y_i <= 0, y_i <= r0
    let mut ineq: Vec<(Vec<Q>, Q)> = Vec::new();
    for i in 0..n {
        for (cx, cy, rhs) in [(1, -1, Q::zero()), (-1, -1, Q::zero()), (0, 1, r0.clone())] {
            let mut row = vec![Q::zero(); 2 * n];
            row[i] = q(cx);
            row[n + i] = q(cy);
            ineq.push((row, rhs));
        }
    }
    let mut out = BTreeSet::new();
    for eps in patterns(m) {
        let rhs = signed(b, &eps);
        let eq: Vec<Vec<Q>> = phi
            .iter()
            .map(|r| r.iter().cloned().chain(std::iter::repeat_n(Q::zero(), n)).collect())
            .collect();
        for tight in k_subsets(3 * n, 2 * n - m) {
            let mut a = eq.clone();
            let mut v = rhs.clone();
            for &t in &tight {
                a.push(ineq[t].0.clone());
                v.push(ineq[t].1.clone());
            }
            let Some(z) = solve(&a, &v, 2 * n) else { continue };
            let feasible = ineq.iter().all(|(row, rhs)| {
                let lhs = row.iter().zip(&z).fold(Q::zero(), |acc, (c, x)| acc + c * x);
                &lhs <= rhs
            });
            if feasible {
                out.insert((z[..n].to_vec(), z[n..].to_vec()));
            }
        }
    }
    out
}

/// A random instance in the test ensemble: `m ∈ ms`, `n ∈ ns`, integer
/// entries in `[-3, 3]`, full row rank, and `b = |Φx₀| > 0` for a random
/// integer `x₀` with at most `m` nonzeros.
pub struct Ensemble {
    rng: ChaCha8Rng,
    ms: Vec<usize>,
    ns: Vec<usize>,
}

impl Ensemble {
    pub fn new(seed: u64, ms: &[usize], ns: &[usize]) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            ms: ms.to_vec(),
            ns: ns.to_vec(),
        }
    }

    pub fn draw(&mut self) -> (Vec<Vec<i64>>, Vec<i64>) {
        loop {
            let m = self.ms[self.rng.random_range(0..self.ms.len())];
            let n = self.ns[self.rng.random_range(0..self.ns.len())];
            if m > n {
                continue;
            }
            let phi: Vec<Vec<i64>> = (0..m)
                .map(|_| (0..n).map(|_| self.rng.random_range(-3..=3)).collect())
                .collect();
            let phi_q: Vec<Vec<Q>> = phi.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect();
            if rank(&phi_q) < m {
                continue;
            }
            let k = self.rng.random_range(1..=m);
            let mut x0 = vec![0i64; n];
            let mut placed = 0;
            while placed < k {
                let j = self.rng.random_range(0..n);
                if x0[j] == 0 {
                    let mut v = 0;
                    while v == 0 {
                        v = self.rng.random_range(-3..=3);
                    }
                    x0[j] = v;
                    placed += 1;
                }
            }
            let b: Vec<i64> = phi
                .iter()
                .map(|r| r.iter().zip(&x0).map(|(a, x)| a * x).sum::<i64>().abs())
                .collect();
            if b.iter().all(|&v| v > 0) {
                return (phi, b);
            }
        }
    }
}

pub fn to_q(phi: &[Vec<i64>], b: &[i64]) -> (Vec<Vec<Q>>, Vec<Q>) {
    (
        phi.iter().map(|r| r.iter().map(|&v| q(v)).collect()).collect(),
        b.iter().map(|&v| q(v)).collect(),
    )
}
