//! Exact sparsest solutions of `Φx = b_ε` and of `|Φx| = b` by support
//! enumeration.
//!
//! Supports are visited by increasing size. Only supports whose column
//! submatrix has full column rank are considered; on such a support the
//! system has at most one solution, which counts as a hit when it is
//! consistent and has no zero entries. The first level with a hit is the
//! sparsity, and every hit at that level is returned.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::combinations;
use crate::error::{Error, Result};
use crate::format::serde_rational;
use crate::instance::{Instance, SignPattern};
use crate::linalg::{least_squares_full_col_rank, LinalgError, Rational, RationalMatrix, RationalVector};

/// Optimal solutions of one linear branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchSolution {
    pub sparsity: usize,
    #[serde(with = "serde_rational::vecs")]
    pub solutions: Vec<RationalVector>,
}

/// All sparsest solutions of the phaseless problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseSolutionSet {
    pub sparsity: usize,
    /// Sorted, duplicate-free.
    #[serde(with = "serde_rational::vecs")]
    pub solutions: Vec<RationalVector>,
    /// Branches whose own optimum reaches `sparsity`, with their solution sets.
    pub per_branch: BTreeMap<SignPattern, BranchSolution>,
}

impl SparseSolutionSet {
    pub fn contains(&self, x: &[Rational]) -> bool {
        self.solutions.binary_search_by(|s| s.as_slice().cmp(x)).is_ok()
    }
}

pub fn support(x: &[Rational]) -> Vec<usize> {
    x.iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(i, _)| i)
        .collect()
}

pub fn count_nonzero(x: &[Rational]) -> usize {
    x.iter().filter(|v| !v.is_zero()).count()
}

/// Unique solution supported exactly on `cols`, if it exists.
pub(crate) fn solve_on_support(
    phi: &RationalMatrix,
    b_eps: &[Rational],
    cols: &[usize],
) -> Result<Option<RationalVector>> {
    let sub = phi.select_columns(cols);
    let x_sub = match least_squares_full_col_rank(&sub, b_eps) {
        Ok(x) => x,
        Err(LinalgError::NotFullColumnRank { .. }) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    if sub.mul_vec(&x_sub)? != b_eps {
        return Ok(None);
    }
    if x_sub.iter().any(Zero::is_zero) {
        return Ok(None);
    }
    let mut x = vec![Rational::zero(); phi.cols()];
    for (&j, v) in cols.iter().zip(x_sub) {
        x[j] = v;
    }
    Ok(Some(x))
}

/// Sparsest solutions of `Φx = b_ε` for a full-row-rank `Φ`.
pub fn solve_l0_branch(phi: &RationalMatrix, b_eps: &[Rational]) -> Result<BranchSolution> {
    if b_eps.len() != phi.rows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "{} rows but right-hand side of length {}",
            phi.rows(),
            b_eps.len()
        ))
        .into());
    }
    let n = phi.cols();
    if b_eps.iter().all(Zero::is_zero) {
        return Ok(BranchSolution {
            sparsity: 0,
            solutions: vec![vec![Rational::zero(); n]],
        });
    }
    for k in 1..=phi.rows().min(n) {
        let mut hits = Vec::new();
        for cols in combinations(n, k) {
            if let Some(x) = solve_on_support(phi, b_eps, &cols)? {
                hits.push(x);
            }
        }
        if !hits.is_empty() {
            hits.sort();
            return Ok(BranchSolution {
                sparsity: k,
                solutions: hits,
            });
        }
    }
    Err(Error::Invariant(
        "no solution with at most m nonzeros; is Φ of full row rank?".into(),
    ))
}

fn negate_all(sols: &[RationalVector]) -> Vec<RationalVector> {
    let mut out: Vec<RationalVector> = sols
        .iter()
        .map(|x| x.iter().map(|v| -v).collect())
        .collect();
    out.sort();
    out
}

/// Sparsest solutions of `|Φx| = b`.
///
/// Branches are solved on symmetry representatives and re-expanded using
/// `S_{-ε} = -S_ε` and the invariance of `b∘ε` under flips where `b_j = 0`.
pub fn solve_l0_phaseless(instance: &Instance) -> Result<SparseSolutionSet> {
    let reps = instance.sign_patterns(true);
    let branches = reps
        .par_iter()
        .map(|eps| {
            let rhs = instance.signed_rhs(eps)?;
            solve_l0_branch(instance.phi(), &rhs)
        })
        .collect::<Result<Vec<_>>>()?;
    let sparsity = branches
        .iter()
        .map(|b| b.sparsity)
        .min()
        .ok_or_else(|| Error::Invariant("no sign patterns".into()))?;

    let mut all = BTreeSet::new();
    let mut per_branch = BTreeMap::new();
    for (rep, branch) in reps.iter().zip(branches) {
        if branch.sparsity != sparsity {
            continue;
        }
        let negated = BranchSolution {
            sparsity,
            solutions: negate_all(&branch.solutions),
        };
        let (same, opposite) = instance.orbit(rep);
        for eps in opposite {
            per_branch.insert(eps, negated.clone());
        }
        for eps in same {
            per_branch.insert(eps, branch.clone());
        }
        all.extend(branch.solutions);
        all.extend(negated.solutions);
    }
    Ok(SparseSolutionSet {
        sparsity,
        solutions: all.into_iter().collect(),
        per_branch,
    })
}

/// Whether every solution has exactly `sparsity` nonzeros.
pub fn assert_uniform_sparsity(set: &SparseSolutionSet) -> bool {
    set.solutions
        .iter()
        .all(|x| count_nonzero(x) == set.sparsity)
}
