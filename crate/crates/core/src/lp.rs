//! The ℓp problem `min Σ|x_i|^p s.t. |Φx| = b` for `0 < p < 1`.
//!
//! The exact solver scans the pseudo-extreme points, which contain every
//! global optimum after lifting. Objective values are compared in `f64`
//! first; near-ties are settled by comparing sorted `y` multisets exactly and,
//! failing that, by a 320-bit evaluation. The heuristic is a restarted IRLS
//! scheme with no optimality guarantee.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::serde_rational;
use crate::hiprec::{self, Fixed};
use crate::instance::Instance;
use crate::l0::SparseSolutionSet;
use crate::linalg::{Rational, RationalVector};
use crate::polytope::{LiftedPoint, VertexSet};
use crate::pstar::EquivalenceCertificate;

/// Relative gap below which two `f64` objective values are re-examined.
const FLOAT_TIE: f64 = 1e-12;
/// Values agreeing to this many bits in 320-bit arithmetic are treated as equal.
const TIE_BITS: u64 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMethod {
    ExactEnumeration,
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolveResult {
    pub p: f64,
    pub optimal_value: f64,
    /// Sorted `x`-parts of the optimal lifted points with `y = |x|`.
    #[serde(with = "serde_rational::vecs")]
    pub solutions: Vec<RationalVector>,
    pub lifted_solutions: Vec<LiftedPoint>,
    /// Optimal lifted points with `y ≠ |x|`; not solutions of the ℓp problem.
    pub slack_ties: Vec<LiftedPoint>,
    pub method: SolveMethod,
}

/// `Σ y_i^p` with `0^p = 0`.
pub fn lp_objective(y: &[Rational], p: f64) -> f64 {
    y.iter()
        .filter(|v| !v.is_zero())
        .map(|v| v.to_f64().unwrap_or(f64::INFINITY).powf(p))
        .sum()
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::PNotInRange { p })
    }
}

fn nonzero_multiset(y: &[Rational]) -> Vec<Rational> {
    let mut key: Vec<Rational> = y.iter().filter(|v| !v.is_zero()).cloned().collect();
    key.sort();
    key
}

/// Global minimizers over the pseudo-extreme points.
pub fn solve_lp_exact(instance: &Instance, p: f64, vset: &VertexSet) -> Result<LpSolveResult> {
    check_p(p)?;
    if vset.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    let points: Vec<&LiftedPoint> = vset.points().collect();
    if let Some(bad) = points.iter().find(|pt| pt.x.len() != instance.n()) {
        return Err(Error::Invariant(format!("vertex of dimension {} for n = {}", bad.x.len(), instance.n())));
    }
    let values: Vec<f64> = points.par_iter().map(|pt| lp_objective(&pt.y, p)).collect();
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let window = FLOAT_TIE * min.max(f64::MIN_POSITIVE);

    // Candidates grouped by their nonzero-y multiset: equal keys, equal objectives.
    let mut groups: BTreeMap<Vec<Rational>, Vec<&LiftedPoint>> = BTreeMap::new();
    for (pt, &v) in points.iter().zip(&values) {
        if v - min <= window {
            groups.entry(nonzero_multiset(&pt.y)).or_default().push(pt);
        }
    }
    let winners: Vec<&LiftedPoint> = if groups.len() == 1 {
        groups.into_values().flatten().collect()
    } else {
        let precise: Vec<(Fixed, Vec<&LiftedPoint>)> = groups
            .into_iter()
            .map(|(key, pts)| (hiprec::power_sum(&key, p), pts))
            .collect();
        let best = precise
            .iter()
            .map(|(v, _)| v)
            .min()
            .cloned()
            .ok_or_else(|| Error::Invariant("no objective candidates".into()))?;
        precise
            .into_iter()
            .filter(|(v, _)| v.close_to(&best, TIE_BITS))
            .flat_map(|(_, pts)| pts)
            .collect()
    };

    let mut lifted: Vec<LiftedPoint> = winners.iter().map(|pt| (*pt).clone()).collect();
    lifted.sort();
    let (tight, slack): (Vec<_>, Vec<_>) = lifted.into_iter().partition(LiftedPoint::is_tight_lift);
    let optimal_value = tight
        .first()
        .or(slack.first())
        .map(|pt| lp_objective(&pt.y, p))
        .unwrap_or(min);
    Ok(LpSolveResult {
        p,
        optimal_value,
        solutions: tight.iter().map(|pt| pt.x.clone()).collect(),
        lifted_solutions: tight,
        slack_ties: slack,
        method: SolveMethod::ExactEnumeration,
    })
}

/// Parameters of the restarted IRLS heuristic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IrlsConfig {
    pub restarts: usize,
    pub seed: u64,
    pub delta0: f64,
    pub delta_factor: f64,
    pub stages: usize,
    pub inner_iterations: usize,
}

impl Default for IrlsConfig {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0,
            delta0: 1.0,
            delta_factor: 0.1,
            stages: 8,
            inner_iterations: 50,
        }
    }
}

impl IrlsConfig {
    pub fn with_restarts(restarts: usize, seed: u64) -> Self {
        Self {
            restarts,
            seed,
            ..Self::default()
        }
    }
}

fn to_f64_matrix(instance: &Instance) -> DMatrix<f64> {
    let phi = instance.phi();
    DMatrix::from_fn(phi.rows(), phi.cols(), |i, j| phi[(i, j)].to_f64().unwrap_or(f64::NAN))
}

fn abs_power_sum(x: &DVector<f64>, p: f64) -> f64 {
    x.iter().filter(|v| **v != 0.0).map(|v| v.abs().powf(p)).sum()
}

/// `D Φᵀ (Φ D Φᵀ)⁻¹ b`.
fn weighted_min_norm(phi: &DMatrix<f64>, d: &DVector<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let scaled = phi * DMatrix::from_diagonal(d);
    let gram = &scaled * phi.transpose();
    let w = gram.lu().solve(b)?;
    Some(scaled.transpose() * w)
}

/// Re-fits `x` on its largest entries, keeping the first support that
/// reproduces `b` to working precision.
fn polish(phi: &DMatrix<f64>, b: &DVector<f64>, x: &DVector<f64>) -> Option<DVector<f64>> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| x[j].abs().total_cmp(&x[i].abs()).then(i.cmp(&j)));
    let tol = 1e-9 * (1.0 + b.norm());
    for k in 1..=n.min(phi.nrows()) {
        let cols = &order[..k];
        let sub = phi.select_columns(cols);
        let Ok(fit) = sub.clone().svd(true, true).solve(b, 1e-12) else {
            continue;
        };
        if (&sub * &fit - b).norm() <= tol {
            let mut out = DVector::zeros(n);
            for (&j, v) in cols.iter().zip(fit.iter()) {
                out[j] = *v;
            }
            return Some(out);
        }
    }
    None
}

fn irls_restart(phi: &DMatrix<f64>, b: &DVector<f64>, p: f64, cfg: &IrlsConfig, rng: &mut ChaCha8Rng) -> Option<DVector<f64>> {
    let n = phi.ncols();
    let ones = DVector::from_element(n, 1.0);
    let x_mn = weighted_min_norm(phi, &ones, b)?;
    let scale = 2.0 * x_mn.amax() + 1e-3;
    let z = DVector::from_fn(n, |_, _| rng.random_range(-scale..scale));
    // Project the random start onto {Φx = b}.
    let correction = weighted_min_norm(phi, &ones, &(b - phi * &z))?;
    let mut x = z + correction;

    let mut delta = cfg.delta0;
    for _ in 0..cfg.stages {
        for _ in 0..cfg.inner_iterations {
            let d = x.map(|v| (v * v + delta).powf(1.0 - p / 2.0));
            match weighted_min_norm(phi, &d, b) {
                Some(next) if next.iter().all(|v| v.is_finite()) => x = next,
                _ => break,
            }
        }
        delta *= cfg.delta_factor;
    }
    let polished = polish(phi, b, &x);
    match polished {
        Some(px) if abs_power_sum(&px, p) <= abs_power_sum(&x, p) => Some(px),
        _ => Some(x),
    }
}

/// Restarted IRLS on random branches. Deterministic for a fixed seed.
pub fn solve_lp_heuristic(instance: &Instance, p: f64, cfg: &IrlsConfig) -> Result<LpSolveResult> {
    check_p(p)?;
    let n = instance.n();
    if instance.is_degenerate() {
        let zero = vec![Rational::zero(); n];
        return Ok(LpSolveResult {
            p,
            optimal_value: 0.0,
            lifted_solutions: vec![LiftedPoint::lift(&zero)],
            solutions: vec![zero],
            slack_ties: vec![],
            method: SolveMethod::Heuristic,
        });
    }
    let phi = to_f64_matrix(instance);
    let reps = instance.sign_patterns(true);
    let rhs = reps
        .iter()
        .map(|eps| {
            let b = instance.signed_rhs(eps)?;
            Ok(DVector::from_iterator(b.len(), b.iter().map(|v| v.to_f64().unwrap_or(f64::NAN))))
        })
        .collect::<Result<Vec<_>>>()?;

    let runs: Vec<Option<(f64, DVector<f64>)>> = (0..cfg.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(r as u64);
            let b = &rhs[rng.random_range(0..rhs.len())];
            let x = irls_restart(&phi, b, p, cfg, &mut rng)?;
            let x = if rng.random_bool(0.5) { -x } else { x };
            Some((abs_power_sum(&x, p), x))
        })
        .collect();
    let best = runs
        .into_iter()
        .flatten()
        .filter(|(v, _)| v.is_finite())
        .reduce(|a, b| if b.0 < a.0 { b } else { a })
        .ok_or_else(|| Error::Invariant("every IRLS restart failed".into()))?;

    let x: RationalVector = best
        .1
        .iter()
        .map(|v| Rational::from_float(*v).unwrap_or_else(Rational::zero))
        .collect();
    Ok(LpSolveResult {
        p,
        optimal_value: best.0,
        lifted_solutions: vec![LiftedPoint::lift(&x)],
        solutions: vec![x],
        slack_ties: vec![],
        method: SolveMethod::Heuristic,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerificationStatus {
    Pass,
    Fail,
    Refused,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub p: f64,
    pub pstar: f64,
    pub status: VerificationStatus,
    pub lp_solution_count: usize,
    pub l0_solution_count: usize,
    /// The ℓp optima form a proper subset of the sparsest solutions.
    pub strict_containment: bool,
    /// ℓp optima that are not sparsest solutions.
    #[serde(with = "serde_rational::vecs")]
    pub unmatched: Vec<RationalVector>,
    pub detail: Option<String>,
}

impl VerificationReport {
    pub fn refused(p: f64, pstar: f64, reason: String) -> Self {
        Self {
            p,
            pstar,
            status: VerificationStatus::Refused,
            lp_solution_count: 0,
            l0_solution_count: 0,
            strict_containment: false,
            unmatched: vec![],
            detail: Some(reason),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == VerificationStatus::Pass
    }
}

/// Rejects `p` outside `(0, p*)`.
pub fn check_below_pstar(p: f64, cert: &EquivalenceCertificate) -> Result<()> {
    if p.is_nan() || p <= 0.0 {
        return Err(Error::PNotInRange { p });
    }
    if p >= cert.pstar {
        return Err(Error::PNotBelowPstar { p, pstar: cert.pstar });
    }
    Ok(())
}

/// Compares precomputed exact solution sets.
pub fn compare_solution_sets(
    p: f64,
    cert: &EquivalenceCertificate,
    l0: &SparseSolutionSet,
    lp: &LpSolveResult,
) -> Result<VerificationReport> {
    check_below_pstar(p, cert)?;
    if lp.method != SolveMethod::ExactEnumeration {
        return Err(Error::Invariant("verification needs the exact ℓp solution set".into()));
    }
    let unmatched: Vec<RationalVector> = lp.solutions.iter().filter(|x| !l0.contains(x)).cloned().collect();
    let passed = unmatched.is_empty() && !lp.solutions.is_empty();
    Ok(VerificationReport {
        p,
        pstar: cert.pstar,
        status: if passed { VerificationStatus::Pass } else { VerificationStatus::Fail },
        lp_solution_count: lp.solutions.len(),
        l0_solution_count: l0.solutions.len(),
        strict_containment: passed && lp.solutions.len() < l0.solutions.len(),
        detail: (!lp.slack_ties.is_empty())
            .then(|| format!("{} tying lifted optima with y != |x|", lp.slack_ties.len())),
        unmatched,
    })
}

/// Checks that every ℓp optimum at `p` is a sparsest solution.
pub fn verify_equivalence(
    instance: &Instance,
    p: f64,
    cert: &EquivalenceCertificate,
    budget: u64,
) -> Result<VerificationReport> {
    check_below_pstar(p, cert)?;
    let l0 = crate::l0::solve_l0_phaseless(instance)?;
    let vset = crate::polytope::pseudo_extreme_points(instance, &cert.r0, budget)?;
    let lp = solve_lp_exact(instance, p, &vset)?;
    compare_solution_sets(p, cert, &l0, &lp)
}

/// Largest absolute entry, in exact arithmetic.
pub fn sup_norm(x: &[Rational]) -> Rational {
    x.iter().map(Signed::abs).max().unwrap_or_else(Rational::zero)
}
