//! Phaseless instances `|Φx| = b` and the sign patterns that split them into
//! linear branches `Φx = b∘ε`.

use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{rank, Rational, RationalMatrix, RationalVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn flip(self) -> Self {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }

    pub fn apply(self, v: &Rational) -> Rational {
        match self {
            Sign::Plus => v.clone(),
            Sign::Minus => -v,
        }
    }
}

/// An element of `{-1, +1}^m`. Orders lexicographically with `-1 < +1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SignPattern(Vec<Sign>);

impl SignPattern {
    pub fn new(signs: Vec<Sign>) -> Self {
        Self(signs)
    }

    pub fn all_plus(m: usize) -> Self {
        Self(vec![Sign::Plus; m])
    }

    /// Builds a pattern from `±1` integers; anything else is rejected.
    pub fn from_ints(values: &[i8]) -> Option<Self> {
        values
            .iter()
            .map(|&v| match v {
                1 => Some(Sign::Plus),
                -1 => Some(Sign::Minus),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn signs(&self) -> &[Sign] {
        &self.0
    }

    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|s| s.flip()).collect())
    }

    /// All `2^m` patterns in lexicographic order.
    pub fn all(m: usize) -> impl Iterator<Item = SignPattern> {
        (0u64..(1u64 << m)).map(move |code| {
            SignPattern(
                (0..m)
                    .map(|j| {
                        if code >> (m - 1 - j) & 1 == 1 {
                            Sign::Plus
                        } else {
                            Sign::Minus
                        }
                    })
                    .collect(),
            )
        })
    }
}

impl fmt::Display for SignPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                Sign::Plus => "+",
                Sign::Minus => "-",
            })?;
        }
        Ok(())
    }
}

impl FromStr for SignPattern {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        s.chars()
            .map(|c| match c {
                '+' => Ok(Sign::Plus),
                '-' => Ok(Sign::Minus),
                other => Err(format!("invalid sign character {other:?}")),
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map(SignPattern)
    }
}

impl Serialize for SignPattern {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SignPattern {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Outcome of checking the standing assumptions on `(Φ, b)`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn check(&mut self, name: &str, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failed: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| format!("{}: {}", c.name, c.detail))
            .collect();
        if failed.is_empty() {
            f.write_str("all checks passed")
        } else {
            f.write_str(&failed.join("; "))
        }
    }
}

/// Unvalidated `(Φ, b)` as read from a file or built in code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawInstance {
    pub phi: RationalMatrix,
    pub b: RationalVector,
}

impl RawInstance {
    pub fn new(phi: RationalMatrix, b: RationalVector) -> Self {
        Self { phi, b }
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let (m, n) = (self.phi.rows(), self.phi.cols());

        let dims_ok = m >= 1 && n >= 1 && self.b.len() == m;
        report.check(
            "dimensions",
            dims_ok,
            format!("phi is {m}x{n}, b has {} entries", self.b.len()),
        );

        let negative: Vec<usize> = self
            .b
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_negative())
            .map(|(i, _)| i)
            .collect();
        report.check(
            "nonnegative_b",
            negative.is_empty(),
            if negative.is_empty() {
                "b >= 0".to_string()
            } else {
                format!("b has negative entries at indices {negative:?}")
            },
        );

        let r = rank(&self.phi);
        report.check(
            "full_row_rank",
            r == m,
            format!("rank {r}, m = {m}"),
        );

        report.check("m_le_n", m <= n, format!("m = {m}, n = {n}"));
        if m == n && dims_ok {
            report
                .warnings
                .push(format!("m = n = {m}: the instance is not underdetermined"));
        }
        report
    }
}

/// A validated instance: `b >= 0`, `rank(Φ) = m`, `1 <= m <= n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    phi: RationalMatrix,
    b: RationalVector,
    warnings: Vec<String>,
}

impl TryFrom<RawInstance> for Instance {
    type Error = Error;

    fn try_from(raw: RawInstance) -> Result<Self> {
        let report = raw.validate();
        if !report.passed() {
            return Err(Error::InvalidInstance(report));
        }
        Ok(Self {
            phi: raw.phi,
            b: raw.b,
            warnings: report.warnings,
        })
    }
}

impl Instance {
    pub fn new(phi: RationalMatrix, b: RationalVector) -> Result<Self> {
        RawInstance::new(phi, b).try_into()
    }

    /// Integer instance, mainly for tests and fixtures.
    pub fn from_i64(phi: &[&[i64]], b: &[i64]) -> Result<Self> {
        Self::new(
            RationalMatrix::from_i64(phi),
            b.iter().map(|&v| Rational::from_integer(v.into())).collect(),
        )
    }

    pub fn phi(&self) -> &RationalMatrix {
        &self.phi
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn m(&self) -> usize {
        self.phi.rows()
    }

    pub fn n(&self) -> usize {
        self.phi.cols()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `b = 0`: the zero vector is the only sparsest solution.
    pub fn is_degenerate(&self) -> bool {
        self.b.iter().all(Zero::is_zero)
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance::new(self.phi.clone(), self.b.clone())
    }

    /// `b∘ε`.
    pub fn signed_rhs(&self, eps: &SignPattern) -> Result<RationalVector> {
        if eps.len() != self.m() {
            return Err(Error::PatternLength {
                expected: self.m(),
                got: eps.len(),
            });
        }
        Ok(self
            .b
            .iter()
            .zip(eps.signs())
            .map(|(v, s)| s.apply(v))
            .collect())
    }

    fn is_free(&self, j: usize) -> bool {
        !self.b[j].is_zero()
    }

    /// Sign patterns in lexicographic order.
    ///
    /// With `reduce_symmetry`, coordinates with `b_j = 0` are pinned to `+1`
    /// and of each antipodal pair only the member whose first free sign is
    /// `+1` is kept. Use [`Instance::orbit`] to re-expand.
    pub fn sign_patterns(&self, reduce_symmetry: bool) -> Vec<SignPattern> {
        SignPattern::all(self.m())
            .filter(|eps| !reduce_symmetry || self.is_representative(eps))
            .collect()
    }

    pub fn is_representative(&self, eps: &SignPattern) -> bool {
        let pinned_ok = (0..self.m())
            .filter(|&j| !self.is_free(j))
            .all(|j| eps.signs()[j] == Sign::Plus);
        let first_free_plus = (0..self.m())
            .find(|&j| self.is_free(j))
            .is_none_or(|j| eps.signs()[j] == Sign::Plus);
        pinned_ok && first_free_plus
    }

    /// Patterns `ε'` with `b∘ε' = b∘ε` and those with `b∘ε' = -(b∘ε)`.
    pub fn orbit(&self, eps: &SignPattern) -> (Vec<SignPattern>, Vec<SignPattern>) {
        let mut same = Vec::new();
        let mut negated = Vec::new();
        for other in SignPattern::all(self.m()) {
            let free = (0..self.m()).filter(|&j| self.is_free(j));
            if free.clone().all(|j| other.signs()[j] == eps.signs()[j]) {
                same.push(other.clone());
            }
            if free.clone().all(|j| other.signs()[j] != eps.signs()[j]) {
                negated.push(other);
            }
        }
        (same, negated)
    }
}
