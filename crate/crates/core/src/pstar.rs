//! The equivalence threshold `p*` and the certificate that bundles it with
//! the constants it was computed from.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::bounds::{compute_bounds, BoundReport};
use crate::error::{Error, Result};
use crate::format::serde_rational;
use crate::hiprec::{self, Fixed, FRAC_BITS};
use crate::instance::Instance;
use crate::l0::{assert_uniform_sparsity, solve_l0_phaseless, SparseSolutionSet};
use crate::linalg::Rational;
use crate::polytope::{compute_rm, pseudo_extreme_points, VertexSet, VertexSummary};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PStar {
    pub value: f64,
    /// `r₀/r_m <= (s+1)/s`, so the threshold is 1.
    pub capped: bool,
}

/// Threshold below which every ℓp minimizer is a sparsest solution.
///
/// Returns 1 when `r₀/r_m <= (s+1)/s` (decided exactly), otherwise
/// `ln((s+1)/s) / ln(r₀/r_m)` evaluated in 320-bit fixed point and rounded
/// down to an `f64`, so the reported value never exceeds the exact one.
pub fn compute_pstar(s: usize, r0: &Rational, rm: &Rational) -> Result<PStar> {
    if s < 1 {
        return Err(Error::InvalidPstarInputs(format!("s = {s} < 1")));
    }
    if !rm.is_positive() {
        return Err(Error::InvalidPstarInputs(format!("r_m = {rm} <= 0")));
    }
    if rm > r0 {
        return Err(Error::InvalidPstarInputs(format!("r_m = {rm} > r_0 = {r0}")));
    }
    let s_q = Rational::from_integer(BigInt::from(s));
    let growth = (&s_q + Rational::one()) / &s_q;
    let ratio = r0 / rm;
    if ratio <= growth {
        return Ok(PStar {
            value: 1.0,
            capped: true,
        });
    }
    let quotient = hiprec::ln(&growth).div(&hiprec::ln(&ratio));
    // The fixed-point error is far below 2^-256; step under it before truncating.
    let margin = Fixed::from_rational(&Rational::new(
        BigInt::one(),
        BigInt::one() << (FRAC_BITS - 64),
    ));
    let lower = quotient.sub(&margin);
    let value = lower.to_f64_down().min(1.0f64 - f64::EPSILON / 2.0);
    Ok(PStar {
        value,
        capped: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceCertificate {
    pub s: usize,
    #[serde(with = "serde_rational")]
    pub c0: Rational,
    #[serde(with = "serde_rational")]
    pub c1: Rational,
    #[serde(with = "serde_rational")]
    pub r0: Rational,
    #[serde(with = "serde_rational::option")]
    pub rm: Option<Rational>,
    #[serde(with = "serde_rational::option")]
    pub ratio: Option<Rational>,
    pub pstar: f64,
    pub pstar_is_capped: bool,
    pub degenerate: bool,
    /// Every sparsest solution has exactly `s` nonzeros.
    pub uniform_sparsity: bool,
    pub notes: Vec<String>,
    pub bounds: BoundReport,
    pub vertices: Option<VertexSummary>,
}

/// Assembles a certificate from already computed stages and checks it.
///
/// `vset` may be `None` only for a degenerate instance.
pub fn assemble_certificate(
    instance: &Instance,
    l0: &SparseSolutionSet,
    bounds: &BoundReport,
    vset: Option<&VertexSet>,
) -> Result<EquivalenceCertificate> {
    let uniform = assert_uniform_sparsity(l0);
    let mut notes = Vec::new();

    let cert = if instance.is_degenerate() {
        notes.push(
            "b = 0: x = 0 is the unique solution of both problems for every p, \
             so the equivalence holds trivially; the threshold formula needs s >= 1"
                .to_string(),
        );
        EquivalenceCertificate {
            s: 0,
            c0: bounds.c0.clone(),
            c1: bounds.c1.clone(),
            r0: bounds.r0.clone(),
            rm: None,
            ratio: None,
            pstar: 1.0,
            pstar_is_capped: false,
            degenerate: true,
            uniform_sparsity: uniform,
            notes,
            bounds: bounds.clone(),
            vertices: vset.map(|v| VertexSummary::new(v, None)),
        }
    } else {
        let vset = vset.ok_or_else(|| Error::Invariant("vertex set required".into()))?;
        let rm = compute_rm(vset)?;
        let pstar = compute_pstar(l0.sparsity, &bounds.r0, &rm)?;
        let summary = VertexSummary::new(vset, Some(&rm));
        if summary.slack_count > 0 {
            notes.push(format!(
                "{} of {} pseudo-extreme points have some y_i = r0 > |x_i|",
                summary.slack_count, summary.point_count
            ));
        }
        EquivalenceCertificate {
            s: l0.sparsity,
            c0: bounds.c0.clone(),
            c1: bounds.c1.clone(),
            r0: bounds.r0.clone(),
            ratio: Some(&bounds.r0 / &rm),
            rm: Some(rm),
            pstar: pstar.value,
            pstar_is_capped: pstar.capped,
            degenerate: false,
            uniform_sparsity: uniform,
            notes,
            bounds: bounds.clone(),
            vertices: Some(summary),
        }
    };
    check_certificate(&cert, l0)?;
    Ok(cert)
}

fn check_certificate(cert: &EquivalenceCertificate, l0: &SparseSolutionSet) -> Result<()> {
    if !(cert.pstar > 0.0 && cert.pstar <= 1.0) {
        return Err(Error::Invariant(format!("p* = {} outside (0, 1]", cert.pstar)));
    }
    if !cert.uniform_sparsity {
        return Err(Error::Invariant("sparsest solutions with differing support sizes".into()));
    }
    if let Some(rm) = &cert.rm {
        if !rm.is_positive() || rm > &cert.r0 {
            return Err(Error::Invariant(format!("r_m = {rm} not in (0, r_0 = {}]", cert.r0)));
        }
    }
    if let Some(x) = l0
        .solutions
        .iter()
        .find(|x| x.iter().any(|v| v.abs() > cert.c0))
    {
        return Err(Error::Invariant(format!(
            "sparsest solution {x:?} outside the box of radius c0 = {}",
            cert.c0
        )));
    }
    if cert.degenerate && cert.s != 0 {
        return Err(Error::Invariant("degenerate instance with s != 0".into()));
    }
    if !cert.degenerate && cert.r0.is_zero() {
        return Err(Error::Invariant("r_0 = 0 for b != 0".into()));
    }
    Ok(())
}

/// Runs every stage and returns the certificate.
pub fn certify(instance: &Instance, budget: u64) -> Result<EquivalenceCertificate> {
    let l0 = solve_l0_phaseless(instance)?;
    let bounds = compute_bounds(instance, l0.sparsity)?;
    let vset = pseudo_extreme_points(instance, &bounds.r0, budget)?;
    assemble_certificate(instance, &l0, &bounds, Some(&vset))
}
