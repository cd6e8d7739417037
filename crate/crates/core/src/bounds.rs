//! Box radii containing every optimum: `c₀` for the sparsest solutions, `c₁`
//! for the ℓp minimizers, and `r₀ = max(c₀, c₁)`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::combinatorics::combinations;
use crate::error::{Error, Result};
use crate::format::serde_rational;
use crate::instance::{Instance, SignPattern};
use crate::linalg::{least_squares_full_col_rank, max_abs, min_norm_solution, LinalgError, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    /// Keyed by symmetry representatives; every other pattern shares the
    /// value of its representative.
    #[serde(with = "serde_rational::map")]
    pub c0_eps: BTreeMap<SignPattern, Rational>,
    #[serde(with = "serde_rational")]
    pub c0: Rational,
    #[serde(with = "serde_rational::map")]
    pub cp_eps: BTreeMap<SignPattern, Rational>,
    #[serde(with = "serde_rational")]
    pub c1: Rational,
    #[serde(with = "serde_rational")]
    pub r0: Rational,
    pub s_used: usize,
    /// `b = 0`: all radii are zero.
    pub degenerate: bool,
}

/// Max over all size-`s` supports with full column rank of the largest
/// least-squares coefficient magnitude.
///
/// `s = 0` only arises for `b = 0` and yields zero.
pub fn c0_eps(instance: &Instance, eps: &SignPattern, s: usize) -> Result<Rational> {
    let rhs = instance.signed_rhs(eps)?;
    if s == 0 {
        return Ok(Rational::zero());
    }
    let mut best: Option<Rational> = None;
    for cols in combinations(instance.n(), s) {
        let sub = instance.phi().select_columns(&cols);
        match least_squares_full_col_rank(&sub, &rhs) {
            Ok(x) => {
                let v = max_abs(&x);
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
            Err(LinalgError::NotFullColumnRank { .. }) => {}
            Err(e) => return Err(e.into()),
        }
    }
    best.ok_or(Error::NoFullColumnRankSupport { s })
}

pub fn c0(instance: &Instance, s: usize) -> Result<Rational> {
    instance
        .sign_patterns(true)
        .iter()
        .map(|eps| c0_eps(instance, eps, s))
        .try_fold(Rational::zero(), |acc, v| v.map(|v| acc.max(v)))
}

/// `n · ‖Φᵀ(ΦΦᵀ)⁻¹b_ε‖∞`. Independent of `p`.
pub fn cp_eps(instance: &Instance, eps: &SignPattern) -> Result<Rational> {
    let rhs = instance.signed_rhs(eps)?;
    let x = min_norm_solution(instance.phi(), &rhs)?;
    Ok(max_abs(&x) * Rational::from_integer(instance.n().into()))
}

pub fn c1(instance: &Instance) -> Result<Rational> {
    instance
        .sign_patterns(true)
        .iter()
        .map(|eps| cp_eps(instance, eps))
        .try_fold(Rational::zero(), |acc, v| v.map(|v| acc.max(v)))
}

/// Assembles every radius for sparsity level `s`.
pub fn compute_bounds(instance: &Instance, s: usize) -> Result<BoundReport> {
    let reps = instance.sign_patterns(true);
    let mut c0_map = BTreeMap::new();
    let mut cp_map = BTreeMap::new();
    for eps in &reps {
        c0_map.insert(eps.clone(), c0_eps(instance, eps, s)?);
        cp_map.insert(eps.clone(), cp_eps(instance, eps)?);
    }
    let c0 = c0_map.values().max().cloned().unwrap_or_else(Rational::zero);
    let c1 = cp_map.values().max().cloned().unwrap_or_else(Rational::zero);
    let r0 = c0.clone().max(c1.clone());
    Ok(BoundReport {
        c0_eps: c0_map,
        c0,
        cp_eps: cp_map,
        c1,
        r0,
        s_used: s,
        degenerate: instance.is_degenerate(),
    })
}
