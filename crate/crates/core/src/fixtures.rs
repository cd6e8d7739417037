//! The two worked examples, embedded with their reference values so they can
//! be reproduced on a bare build.

use std::fmt;

use num_bigint::BigInt;

use crate::error::Result;
use crate::format::format_rational;
use crate::instance::Instance;
use crate::linalg::{Rational, RationalVector};
use crate::lp::LpSolveResult;
use crate::l0::SparseSolutionSet;
use crate::pstar::EquivalenceCertificate;

/// Tolerance for comparing `p*` and ℓp objective values.
pub const REAL_TOLERANCE: f64 = 1e-12;

/// Reference values for one example.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedValues {
    pub s: usize,
    pub c0: Rational,
    pub c1: Rational,
    pub r0: Rational,
    pub rm: Rational,
    pub pstar: f64,
    /// Sorted.
    pub l0_solutions: Vec<RationalVector>,
    pub lp_p: f64,
    /// Sorted.
    pub lp_solutions: Vec<RationalVector>,
    pub lp_value: f64,
}

#[derive(Debug, Clone)]
pub struct WorkedExample {
    pub name: &'static str,
    pub instance: Instance,
    pub expected: ExpectedValues,
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn vecs(points: &[[(i64, i64); 2]]) -> Vec<RationalVector> {
    let mut out: Vec<RationalVector> = points
        .iter()
        .map(|pt| pt.iter().map(|&(n, d)| q(n, d)).collect())
        .collect();
    out.sort();
    out
}

/// `Φ = (1, -1)`, `b = 1`.
pub fn example_one() -> WorkedExample {
    let four = vecs(&[[(0, 1), (-1, 1)], [(0, 1), (1, 1)], [(1, 1), (0, 1)], [(-1, 1), (0, 1)]]);
    WorkedExample {
        name: "example-1",
        instance: Instance::from_i64(&[&[1, -1]], &[1]).expect("valid fixture"),
        expected: ExpectedValues {
            s: 1,
            c0: q(1, 1),
            c1: q(1, 1),
            r0: q(1, 1),
            rm: q(1, 1),
            pstar: 1.0,
            l0_solutions: four.clone(),
            lp_p: 0.5,
            lp_solutions: four,
            lp_value: 1.0,
        },
    }
}

/// `Φ = (5, 1)`, `b = 2`.
pub fn example_two() -> WorkedExample {
    WorkedExample {
        name: "example-2",
        instance: Instance::from_i64(&[&[5, 1]], &[2]).expect("valid fixture"),
        expected: ExpectedValues {
            s: 1,
            c0: q(2, 1),
            c1: q(10, 13),
            r0: q(2, 1),
            rm: q(2, 5),
            pstar: std::f64::consts::LN_2 / 5f64.ln(),
            l0_solutions: vecs(&[[(2, 5), (0, 1)], [(-2, 5), (0, 1)], [(0, 1), (2, 1)], [(0, 1), (-2, 1)]]),
            lp_p: 0.3,
            lp_solutions: vecs(&[[(2, 5), (0, 1)], [(-2, 5), (0, 1)]]),
            lp_value: 0.4f64.powf(0.3),
        },
    }
}

pub fn worked_examples() -> Vec<WorkedExample> {
    vec![example_one(), example_two()]
}

/// One compared quantity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldCheck {
    pub field: &'static str,
    pub expected: String,
    pub actual: String,
    pub matches: bool,
}

impl fmt::Display for FieldCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = if self.matches { "ok" } else { "MISMATCH" };
        write!(f, "{:<14} {:<28} {:<28} {mark}", self.field, self.expected, self.actual)
    }
}

fn show_set(set: &[RationalVector]) -> String {
    let items: Vec<String> = set
        .iter()
        .map(|x| format!("({})", x.iter().map(format_rational).collect::<Vec<_>>().join(",")))
        .collect();
    format!("{{{}}}", items.join(" "))
}

fn exact<T: PartialEq>(field: &'static str, e: &T, a: &T, show: impl Fn(&T) -> String) -> FieldCheck {
    FieldCheck {
        field,
        expected: show(e),
        actual: show(a),
        matches: e == a,
    }
}

fn real(field: &'static str, e: f64, a: f64) -> FieldCheck {
    FieldCheck {
        field,
        expected: format!("{e}"),
        actual: format!("{a}"),
        matches: (e - a).abs() <= REAL_TOLERANCE,
    }
}

/// Compares computed results with the expected table, field by field.
pub fn compare(
    expected: &ExpectedValues,
    cert: &EquivalenceCertificate,
    l0: &SparseSolutionSet,
    lp: &LpSolveResult,
) -> Vec<FieldCheck> {
    let fr = |q: &Rational| format_rational(q);
    let rm = cert.rm.clone().unwrap_or_else(|| q(0, 1));
    vec![
        exact("s", &expected.s, &cert.s, |v| v.to_string()),
        exact("c0", &expected.c0, &cert.c0, fr),
        exact("c1", &expected.c1, &cert.c1, fr),
        exact("r0", &expected.r0, &cert.r0, fr),
        exact("rm", &expected.rm, &rm, fr),
        real("p*", expected.pstar, cert.pstar),
        exact("l0 solutions", &expected.l0_solutions, &l0.solutions, |s| show_set(s)),
        exact("lp solutions", &expected.lp_solutions, &lp.solutions, |s| show_set(s)),
        real("lp value", expected.lp_value, lp.optimal_value),
    ]
}

/// Runs every stage on an example and compares.
pub fn check_example(example: &WorkedExample, budget: u64) -> Result<Vec<FieldCheck>> {
    let pipeline = crate::report::Pipeline::new(&example.instance, budget);
    let cert = pipeline.certificate()?;
    let l0 = pipeline.l0()?;
    let lp = pipeline.lp_exact(example.expected.lp_p)?;
    Ok(compare(&example.expected, cert, l0, &lp))
}
