//! Exact analysis of real phaseless compressed sensing instances `|Φx| = b`.
//!
//! The crate solves the sparsest-solution problem and the ℓp relaxation
//! (`0 < p < 1`) exactly for small instances, computes the box radii that
//! contain every optimum, enumerates the pseudo-extreme points of the lifted
//! feasible set, and evaluates the threshold `p*` below which every ℓp
//! minimizer is also a sparsest solution.
//!
//! ```
//! use pcs_core::{certify, Instance, DEFAULT_BUDGET};
//!
//! let inst = Instance::from_i64(&[&[5, 1]], &[2]).unwrap();
//! let cert = certify(&inst, DEFAULT_BUDGET).unwrap();
//! assert_eq!(cert.s, 1);
//! assert!((cert.pstar - 2f64.ln() / 5f64.ln()).abs() < 1e-12);
//! ```

pub mod bounds;
pub mod combinatorics;
pub mod error;
pub mod fixtures;
pub mod format;
pub mod hiprec;
pub mod instance;
pub mod l0;
pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod pstar;
pub mod report;

pub use bounds::{compute_bounds, BoundReport};
pub use error::{Error, ErrorClass, Result};
pub use format::{format_rational, parse_rational, read_instance, write_instance, InstanceFile};
pub use instance::{Instance, RawInstance, Sign, SignPattern, ValidationReport};
pub use l0::{solve_l0_branch, solve_l0_phaseless, SparseSolutionSet};
pub use linalg::{Rational, RationalMatrix, RationalVector};
pub use lp::{
    lp_objective, solve_lp_exact, solve_lp_heuristic, verify_equivalence, IrlsConfig, LpSolveResult, SolveMethod,
    VerificationReport, VerificationStatus,
};
pub use polytope::{pseudo_extreme_points, LiftedPoint, LiftedPolytope, VertexSet, DEFAULT_BUDGET};
pub use pstar::{certify, compute_pstar, EquivalenceCertificate};
pub use report::{Pipeline, ReportDocument};
