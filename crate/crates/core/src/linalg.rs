//! Exact rational linear algebra.
//!
//! Every routine here works over arbitrary-precision rationals and never
//! rounds. Elimination is done fraction-free (Bareiss) on integer rows
//! obtained by clearing the denominators of each row, which keeps the
//! intermediate integers bounded by minors of the input instead of letting
//! denominators compound.

use std::fmt;
use std::ops::Index;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact scalar. Always normalized: positive denominator, reduced.
pub type Rational = BigRational;

/// Dense exact vector.
pub type RationalVector = Vec<Rational>;

/// Why a linear system failed to have exactly one solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoUniqueReason {
    /// No solution at all.
    Inconsistent,
    /// Infinitely many solutions.
    Underdetermined,
}

impl fmt::Display for NoUniqueReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoUniqueReason::Inconsistent => f.write_str("inconsistent"),
            NoUniqueReason::Underdetermined => f.write_str("underdetermined"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("system has no unique solution ({0})")]
    NoUniqueSolution(NoUniqueReason),
    #[error("matrix is not of full column rank (rank {rank} < {cols} columns)")]
    NotFullColumnRank { rank: usize, cols: usize },
    #[error("matrix is not of full row rank (rank {rank} < {rows} rows)")]
    NotFullRowRank { rank: usize, rows: usize },
}

/// Dense row-major matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RationalMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Rational>) -> Result<Self, LinalgError> {
        if data.len() != rows * cols {
            return Err(LinalgError::DimensionMismatch(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Rational::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    /// Builds a matrix from explicit rows; all rows must share a length.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self, LinalgError> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(LinalgError::DimensionMismatch("ragged rows".into()));
        }
        Ok(Self {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor for integer matrices.
    ///
    /// Panics on ragged input; intended for literals and tests.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| Rational::from_integer(v.into())).collect())
                .collect(),
        )
        .expect("ragged integer matrix")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_vecs(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self[(i, j)].clone());
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
        if self.cols != other.rows {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Result<RationalVector, LinalgError> {
        if self.cols != v.len() {
            return Err(LinalgError::DimensionMismatch(format!(
                "{}x{} times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|i| dot(self.row(i), v))
            .collect())
    }

    /// Submatrix made of the given columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for i in 0..self.rows {
            for &j in cols {
                data.push(self[(i, j)].clone());
            }
        }
        Self {
            rows: self.rows,
            cols: cols.len(),
            data,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = Rational;

    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Largest absolute entry, zero for an empty vector.
pub fn max_abs(v: &[Rational]) -> Rational {
    v.iter().map(Rational::abs).max().unwrap_or_else(Rational::zero)
}

/// Scales a rational row by the lcm of its denominators, yielding integers.
fn clear_denominators(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    row.iter()
        .map(|q| q.numer() * (&lcm / q.denom()))
        .collect()
}

/// Fraction-free row echelon form over the first `pivot_cols` columns.
///
/// Returns the pivot column of each pivot row; rows at index `>= pivots.len()`
/// are zero in the first `pivot_cols` columns afterwards.
fn bareiss_echelon(a: &mut [Vec<BigInt>], pivot_cols: usize) -> Vec<usize> {
    let nrows = a.len();
    let width = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..pivot_cols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (head, tail) = a.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut() {
            for j in (c + 1)..width {
                let num = &pivot_row[c] * &row[j] - &row[c] * &pivot_row[j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                row[j] = q;
            }
            row[c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Exact rank.
pub fn rank(a: &RationalMatrix) -> usize {
    if a.rows == 0 || a.cols == 0 {
        return 0;
    }
    let mut rows: Vec<Vec<BigInt>> = (0..a.rows).map(|i| clear_denominators(a.row(i))).collect();
    bareiss_echelon(&mut rows, a.cols).len()
}

/// Returns the solution of `a x = b` iff it exists and is unique.
pub fn solve_unique(a: &RationalMatrix, b: &[Rational]) -> Result<RationalVector, LinalgError> {
    if a.rows != b.len() {
        return Err(LinalgError::DimensionMismatch(format!(
            "{} rows but right-hand side of length {}",
            a.rows,
            b.len()
        )));
    }
    let n = a.cols;
    let mut rows: Vec<Vec<BigInt>> = (0..a.rows)
        .map(|i| {
            let mut row = a.row(i).to_vec();
            row.push(b[i].clone());
            clear_denominators(&row)
        })
        .collect();
    let pivots = bareiss_echelon(&mut rows, n);
    let r = pivots.len();
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return Err(LinalgError::NoUniqueSolution(NoUniqueReason::Inconsistent));
    }
    if r < n {
        return Err(LinalgError::NoUniqueSolution(NoUniqueReason::Underdetermined));
    }
    // r == n: pivots are exactly 0..n, upper-triangular back substitution.
    let mut x = vec![Rational::zero(); n];
    for i in (0..n).rev() {
        let row = &rows[i];
        let mut acc = Rational::from_integer(row[n].clone());
        for j in (i + 1)..n {
            if !row[j].is_zero() {
                acc -= Rational::from_integer(row[j].clone()) * &x[j];
            }
        }
        x[i] = acc / Rational::from_integer(row[i].clone());
    }
    Ok(x)
}

/// Exact `(AᵀA)⁻¹Aᵀb` for a full-column-rank `A`.
pub fn least_squares_full_col_rank(
    a: &RationalMatrix,
    b: &[Rational],
) -> Result<RationalVector, LinalgError> {
    if a.rows != b.len() {
        return Err(LinalgError::DimensionMismatch(format!(
            "{} rows but right-hand side of length {}",
            a.rows,
            b.len()
        )));
    }
    let r = rank(a);
    if r < a.cols {
        return Err(LinalgError::NotFullColumnRank { rank: r, cols: a.cols });
    }
    let at = a.transpose();
    let gram = at.mul(a)?;
    let rhs = at.mul_vec(b)?;
    solve_unique(&gram, &rhs)
}

/// Exact minimum-norm solution `Φᵀ(ΦΦᵀ)⁻¹b` of a full-row-rank system.
pub fn min_norm_solution(phi: &RationalMatrix, b: &[Rational]) -> Result<RationalVector, LinalgError> {
    if phi.rows != b.len() {
        return Err(LinalgError::DimensionMismatch(format!(
            "{} rows but right-hand side of length {}",
            phi.rows,
            b.len()
        )));
    }
    let r = rank(phi);
    if r < phi.rows {
        return Err(LinalgError::NotFullRowRank { rank: r, rows: phi.rows });
    }
    let pt = phi.transpose();
    let gram = phi.mul(&pt)?;
    let w = solve_unique(&gram, b)?;
    pt.mul_vec(&w)
}
