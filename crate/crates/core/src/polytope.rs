//! Lifted polytopes `T_ε = {(x, y) : Φx = b∘ε, |x| <= y <= r₀}`, their exact
//! vertices, and the pseudo-extreme point set of `T = ∪_ε T_ε`.
//!
//! No inequality couples two coordinates, which drives the enumeration: at a
//! vertex every coordinate `i` has at least one of `x_i <= y_i`,
//! `-x_i <= y_i`, `y_i <= r₀` tight (otherwise `y_i` could move), and the
//! `2n - m` tight rows needed for rank `2n` then force exactly `n - m`
//! coordinates to carry two tight rows. Those "pinned" coordinates take one
//! of three values `(x_i, y_i) ∈ {(0, 0), (r₀, r₀), (-r₀, r₀)}`; the other `m`
//! coordinates form a square subsystem `Φ_S x_S = b_ε - Φ_P x_P` which must
//! be nonsingular, and each of them then picks `y_i ∈ {x_i, -x_i, r₀}`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binomial, combinations};
use crate::error::{Error, Result};
use crate::format::serde_rational;
use crate::instance::{Instance, SignPattern};
use crate::linalg::{rank, solve_unique, Rational, RationalMatrix, RationalVector};

/// Default cap on candidate active sets examined by [`pseudo_extreme_points`].
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// A point `(x, y) ∈ ℝ^{2n}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LiftedPoint {
    #[serde(with = "serde_rational::vec")]
    pub x: RationalVector,
    #[serde(with = "serde_rational::vec")]
    pub y: RationalVector,
}

impl LiftedPoint {
    /// `(x, |x|)`.
    pub fn lift(x: &[Rational]) -> Self {
        Self {
            x: x.to_vec(),
            y: x.iter().map(Signed::abs).collect(),
        }
    }

    pub fn coords(&self) -> RationalVector {
        self.x.iter().chain(&self.y).cloned().collect()
    }

    pub fn from_coords(v: &[Rational]) -> Self {
        let n = v.len() / 2;
        Self {
            x: v[..n].to_vec(),
            y: v[n..].to_vec(),
        }
    }

    pub fn negated_x(&self) -> Self {
        Self {
            x: self.x.iter().map(|v| -v).collect(),
            y: self.y.clone(),
        }
    }

    /// `y = |x|` componentwise.
    pub fn is_tight_lift(&self) -> bool {
        self.x.iter().zip(&self.y).all(|(x, y)| &x.abs() == y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowKind {
    /// `x_i - y_i <= 0`
    UpperAbs,
    /// `-x_i - y_i <= 0`
    LowerAbs,
    /// `y_i <= r₀`
    Cap,
    /// `x_i <= r₀` (implied)
    XUpper,
    /// `-x_i <= r₀` (implied)
    XLower,
    /// `-y_i <= 0` (implied)
    YNonneg,
}

/// `coeffs · (x, y) <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Inequality {
    pub coord: usize,
    pub kind: RowKind,
    pub coeffs: RationalVector,
    pub rhs: Rational,
}

impl Inequality {
    fn new(n: usize, coord: usize, kind: RowKind, r0: &Rational) -> Self {
        let one = Rational::from_integer(1.into());
        let mut coeffs = vec![Rational::zero(); 2 * n];
        let rhs = match kind {
            RowKind::UpperAbs => {
                coeffs[coord] = one.clone();
                coeffs[n + coord] = -one;
                Rational::zero()
            }
            RowKind::LowerAbs => {
                coeffs[coord] = -one.clone();
                coeffs[n + coord] = -one;
                Rational::zero()
            }
            RowKind::Cap => {
                coeffs[n + coord] = one;
                r0.clone()
            }
            RowKind::XUpper => {
                coeffs[coord] = one;
                r0.clone()
            }
            RowKind::XLower => {
                coeffs[coord] = -one;
                r0.clone()
            }
            RowKind::YNonneg => {
                coeffs[n + coord] = -one;
                Rational::zero()
            }
        };
        Self { coord, kind, coeffs, rhs }
    }

    pub fn slack(&self, coords: &[Rational]) -> Rational {
        &self.rhs - crate::linalg::dot(&self.coeffs, coords)
    }
}

/// H-representation of one branch polytope `T_ε`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedPolytope {
    pub eps: SignPattern,
    phi: RationalMatrix,
    rhs: RationalVector,
    r0: Rational,
}

impl LiftedPolytope {
    pub fn n(&self) -> usize {
        self.phi.cols()
    }

    pub fn m(&self) -> usize {
        self.phi.rows()
    }

    pub fn r0(&self) -> &Rational {
        &self.r0
    }

    pub fn rhs(&self) -> &[Rational] {
        &self.rhs
    }

    pub fn phi(&self) -> &RationalMatrix {
        &self.phi
    }

    /// `(Φ | 0)` rows with right-hand sides `b∘ε`.
    pub fn equalities(&self) -> Vec<(RationalVector, Rational)> {
        let n = self.n();
        (0..self.m())
            .map(|i| {
                let mut row = self.phi.row(i).to_vec();
                row.extend(std::iter::repeat_n(Rational::zero(), n));
                (row, self.rhs[i].clone())
            })
            .collect()
    }

    /// The `3n` defining inequalities, grouped by coordinate.
    pub fn inequalities(&self) -> Vec<Inequality> {
        let n = self.n();
        (0..n)
            .flat_map(|i| {
                [RowKind::UpperAbs, RowKind::LowerAbs, RowKind::Cap]
                    .into_iter()
                    .map(move |k| Inequality::new(n, i, k, &self.r0))
            })
            .collect()
    }

    /// `-r₀ <= x <= r₀` and `y >= 0`; implied by [`Self::inequalities`].
    pub fn redundant_inequalities(&self) -> Vec<Inequality> {
        let n = self.n();
        (0..n)
            .flat_map(|i| {
                [RowKind::XUpper, RowKind::XLower, RowKind::YNonneg]
                    .into_iter()
                    .map(move |k| Inequality::new(n, i, k, &self.r0))
            })
            .collect()
    }

    pub fn contains(&self, p: &LiftedPoint) -> bool {
        if p.x.len() != self.n() || p.y.len() != self.n() {
            return false;
        }
        let coords = p.coords();
        self.equalities()
            .iter()
            .all(|(row, rhs)| &crate::linalg::dot(row, &coords) == rhs)
            && self
                .inequalities()
                .iter()
                .chain(&self.redundant_inequalities())
                .all(|ineq| !ineq.slack(&coords).is_negative())
    }

    /// Rank of the equalities together with the tight defining inequalities.
    pub fn active_rank(&self, p: &LiftedPoint) -> usize {
        let coords = p.coords();
        let mut rows: Vec<RationalVector> = self.equalities().into_iter().map(|(r, _)| r).collect();
        rows.extend(
            self.inequalities()
                .into_iter()
                .filter(|ineq| ineq.slack(&coords).is_zero())
                .map(|ineq| ineq.coeffs),
        );
        RationalMatrix::from_rows(rows).map_or(0, |m| rank(&m))
    }

    pub fn is_vertex(&self, p: &LiftedPoint) -> bool {
        self.contains(p) && self.active_rank(p) == 2 * self.n()
    }
}

pub fn build_lifted(instance: &Instance, eps: &SignPattern, r0: &Rational) -> Result<LiftedPolytope> {
    Ok(LiftedPolytope {
        eps: eps.clone(),
        phi: instance.phi().clone(),
        rhs: instance.signed_rhs(eps)?,
        r0: r0.clone(),
    })
}

/// Number of active sets the structured enumerator examines for one branch.
pub fn candidate_count(n: usize, m: usize) -> u128 {
    binomial(n, m).saturating_mul(3u128.saturating_pow(n as u32))
}

/// Every vertex of `T_ε`, sorted and duplicate-free; empty iff `T_ε` is empty.
pub fn enumerate_vertices(poly: &LiftedPolytope) -> Result<Vec<LiftedPoint>> {
    let (n, m) = (poly.n(), poly.m());
    let r0 = poly.r0();
    let neg_r0 = -r0.clone();
    let mut found = BTreeSet::new();

    for free in combinations(n, m) {
        let phi_free = poly.phi.select_columns(&free);
        if rank(&phi_free) < m {
            continue;
        }
        let pinned: Vec<usize> = (0..n).filter(|j| !free.contains(j)).collect();
        // x_free = base - Σ_{j pinned} x_j · shift_j
        let base = solve_unique(&phi_free, &poly.rhs)?;
        let shifts = pinned
            .iter()
            .map(|&j| {
                let col: RationalVector = (0..m).map(|i| poly.phi[(i, j)].clone()).collect();
                solve_unique(&phi_free, &col)
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;

        let pinned_states = 3usize.pow(pinned.len() as u32);
        for code in 0..pinned_states {
            let mut x = vec![Rational::zero(); n];
            let mut y = vec![Rational::zero(); n];
            let mut x_free = base.clone();
            let mut c = code;
            for (k, &j) in pinned.iter().enumerate() {
                let (xj, yj) = match c % 3 {
                    0 => (Rational::zero(), Rational::zero()),
                    1 => (r0.clone(), r0.clone()),
                    _ => (neg_r0.clone(), r0.clone()),
                };
                c /= 3;
                if !xj.is_zero() {
                    for (xf, s) in x_free.iter_mut().zip(&shifts[k]) {
                        *xf -= &xj * s;
                    }
                }
                x[j] = xj;
                y[j] = yj;
            }

            // Each free coordinate takes y ∈ {x, -x, r₀} subject to |x| <= y <= r₀.
            let mut options: Vec<Vec<Rational>> = Vec::with_capacity(m);
            for (&j, xj) in free.iter().zip(&x_free) {
                x[j] = xj.clone();
                let abs = xj.abs();
                if &abs > r0 {
                    options.clear();
                    break;
                }
                let mut opts = vec![abs];
                if &opts[0] != r0 {
                    opts.push(r0.clone());
                }
                options.push(opts);
            }
            if options.len() != m {
                continue;
            }
            let total: usize = options.iter().map(Vec::len).product();
            for mut pick in 0..total {
                let mut point_y = y.clone();
                for (&j, opts) in free.iter().zip(&options) {
                    point_y[j] = opts[pick % opts.len()].clone();
                    pick /= opts.len();
                }
                found.insert(LiftedPoint {
                    x: x.clone(),
                    y: point_y,
                });
            }
        }
    }
    Ok(found.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexEntry {
    pub point: LiftedPoint,
    /// Every sign pattern whose polytope has this point as a vertex.
    pub sources: Vec<SignPattern>,
}

/// The pseudo-extreme points of `T`, sorted, each with its source patterns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSet {
    #[serde(with = "serde_rational")]
    pub r0: Rational,
    pub entries: Vec<VertexEntry>,
}

impl VertexSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &LiftedPoint> {
        self.entries.iter().map(|e| &e.point)
    }

    pub fn contains(&self, p: &LiftedPoint) -> bool {
        self.entries.binary_search_by(|e| e.point.cmp(p)).is_ok()
    }
}

/// Union of the vertex sets of all branch polytopes.
///
/// Refuses with [`Error::BudgetExceeded`] when the number of candidate active
/// sets exceeds `budget`.
pub fn pseudo_extreme_points(instance: &Instance, r0: &Rational, budget: u64) -> Result<VertexSet> {
    let reps = instance.sign_patterns(true);
    let required = candidate_count(instance.n(), instance.m()).saturating_mul(reps.len() as u128);
    if required > u128::from(budget) {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let per_branch = reps
        .par_iter()
        .map(|eps| enumerate_vertices(&build_lifted(instance, eps, r0)?))
        .collect::<Result<Vec<_>>>()?;

    let mut merged: BTreeMap<LiftedPoint, BTreeSet<SignPattern>> = BTreeMap::new();
    for (rep, vertices) in reps.iter().zip(per_branch) {
        let (same, opposite) = instance.orbit(rep);
        for v in vertices {
            merged
                .entry(v.negated_x())
                .or_default()
                .extend(opposite.iter().cloned());
            merged.entry(v).or_default().extend(same.iter().cloned());
        }
    }
    Ok(VertexSet {
        r0: r0.clone(),
        entries: merged
            .into_iter()
            .map(|(point, sources)| VertexEntry {
                point,
                sources: sources.into_iter().collect(),
            })
            .collect(),
    })
}

/// Smallest nonzero `y`-coordinate over all pseudo-extreme points.
pub fn compute_rm(vset: &VertexSet) -> Result<Rational> {
    if vset.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    vset.points()
        .flat_map(|p| p.y.iter())
        .filter(|v| !v.is_zero())
        .min()
        .cloned()
        .ok_or(Error::AllYZero)
}

/// Compact description of a vertex set for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexSummary {
    pub point_count: usize,
    /// Points with `y = |x|`, i.e. lifts of feasible `x`.
    pub tight_lift_count: usize,
    /// Points where some `y_i > |x_i|` (necessarily `y_i = r₀`).
    pub slack_count: usize,
    pub rm_witness: Option<LiftedPoint>,
}

impl VertexSummary {
    pub fn new(vset: &VertexSet, rm: Option<&Rational>) -> Self {
        let tight = vset.points().filter(|p| p.is_tight_lift()).count();
        Self {
            point_count: vset.len(),
            tight_lift_count: tight,
            slack_count: vset.len() - tight,
            rm_witness: rm.and_then(|rm| vset.points().find(|p| p.y.contains(rm)).cloned()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn pt(x: &[(i64, i64)], y: &[(i64, i64)]) -> LiftedPoint {
        LiftedPoint {
            x: x.iter().map(|&(a, b)| q(a, b)).collect(),
            y: y.iter().map(|&(a, b)| q(a, b)).collect(),
        }
    }

    fn pat(v: &[i8]) -> SignPattern {
        SignPattern::from_ints(v).unwrap()
    }

    #[test]
    fn builds_canonical_rows() {
        let inst = Instance::from_i64(&[&[1, -1]], &[1]).unwrap();
        let poly = build_lifted(&inst, &pat(&[1]), &q(1, 1)).unwrap();
        assert_eq!(poly.equalities().len(), 1);
        assert_eq!(poly.equalities()[0].0, vec![q(1, 1), q(-1, 1), q(0, 1), q(0, 1)]);
        assert_eq!(poly.inequalities().len(), 6);
        assert_eq!(poly.redundant_inequalities().len(), 6);

        let inst = Instance::from_i64(&[&[5, 1]], &[2]).unwrap();
        let poly = build_lifted(&inst, &pat(&[1]), &q(2, 1)).unwrap();
        assert_eq!(poly.equalities()[0].1, q(2, 1));
        assert_eq!(poly.inequalities().len(), 6);
    }

    #[test]
    fn fully_determined_segment() {
        let inst = Instance::from_i64(&[&[1]], &[1]).unwrap();
        let poly = build_lifted(&inst, &pat(&[1]), &q(1, 1)).unwrap();
        assert_eq!(enumerate_vertices(&poly).unwrap(), vec![pt(&[(1, 1)], &[(1, 1)])]);
    }

    #[test]
    fn first_example_branch() {
        let inst = Instance::from_i64(&[&[1, -1]], &[1]).unwrap();
        let poly = build_lifted(&inst, &pat(&[1]), &q(1, 1)).unwrap();
        let verts = enumerate_vertices(&poly).unwrap();
        assert!(verts.contains(&pt(&[(1, 1), (0, 1)], &[(1, 1), (0, 1)])));
        assert!(verts.contains(&pt(&[(0, 1), (-1, 1)], &[(0, 1), (1, 1)])));
        // A vertex with the cap active on a zero coordinate.
        assert!(verts.contains(&pt(&[(1, 1), (0, 1)], &[(1, 1), (1, 1)])));
        for v in &verts {
            assert!(poly.is_vertex(v), "{v:?}");
        }
    }

    #[test]
    fn empty_when_box_too_small() {
        let inst = Instance::from_i64(&[&[1, 1]], &[4]).unwrap();
        let poly = build_lifted(&inst, &pat(&[1]), &q(1, 1)).unwrap();
        assert!(enumerate_vertices(&poly).unwrap().is_empty());
    }

    #[test]
    fn example_pseudo_extreme_points() {
        let inst = Instance::from_i64(&[&[1, -1]], &[1]).unwrap();
        let vset = pseudo_extreme_points(&inst, &q(1, 1), DEFAULT_BUDGET).unwrap();
        for p in [
            pt(&[(0, 1), (-1, 1)], &[(0, 1), (1, 1)]),
            pt(&[(0, 1), (1, 1)], &[(0, 1), (1, 1)]),
            pt(&[(1, 1), (0, 1)], &[(1, 1), (0, 1)]),
            pt(&[(-1, 1), (0, 1)], &[(1, 1), (0, 1)]),
        ] {
            assert!(vset.contains(&p), "{p:?}");
        }
        assert_eq!(compute_rm(&vset).unwrap(), q(1, 1));

        let inst = Instance::from_i64(&[&[5, 1]], &[2]).unwrap();
        let vset = pseudo_extreme_points(&inst, &q(2, 1), DEFAULT_BUDGET).unwrap();
        for p in [
            pt(&[(-2, 5), (0, 1)], &[(2, 5), (0, 1)]),
            pt(&[(0, 1), (-2, 1)], &[(0, 1), (2, 1)]),
            pt(&[(2, 5), (0, 1)], &[(2, 5), (0, 1)]),
            pt(&[(0, 1), (2, 1)], &[(0, 1), (2, 1)]),
        ] {
            assert!(vset.contains(&p), "{p:?}");
        }
        assert_eq!(compute_rm(&vset).unwrap(), q(2, 5));
    }

    #[test]
    fn sources_are_consistent() {
        let inst = Instance::from_i64(&[&[1, 2, -1], &[0, 1, 1]], &[2, 1]).unwrap();
        let vset = pseudo_extreme_points(&inst, &q(3, 1), DEFAULT_BUDGET).unwrap();
        for entry in &vset.entries {
            assert!(!entry.sources.is_empty());
            for eps in &entry.sources {
                let poly = build_lifted(&inst, eps, &q(3, 1)).unwrap();
                assert!(poly.is_vertex(&entry.point));
            }
        }
    }

    #[test]
    fn zero_rhs() {
        let inst = Instance::from_i64(&[&[1, 2, 3]], &[0]).unwrap();
        let vset = pseudo_extreme_points(&inst, &q(1, 1), DEFAULT_BUDGET).unwrap();
        assert!(vset.contains(&pt(&[(0, 1); 3], &[(0, 1); 3])));
        let only_zero = VertexSet {
            r0: q(1, 1),
            entries: vec![VertexEntry {
                point: pt(&[(0, 1); 2], &[(0, 1); 2]),
                sources: vec![pat(&[1])],
            }],
        };
        assert!(matches!(compute_rm(&only_zero), Err(Error::AllYZero)));
        let empty = VertexSet { r0: q(1, 1), entries: vec![] };
        assert!(matches!(compute_rm(&empty), Err(Error::EmptyVertexSet)));
    }

    #[test]
    fn budget_is_enforced() {
        let inst = Instance::from_i64(&[&[1, 2, 3, 4, 5, 6]], &[1]).unwrap();
        let err = pseudo_extreme_points(&inst, &q(1, 1), 100).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { required: 4374, budget: 100 }));
    }
}
