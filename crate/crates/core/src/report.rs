//! Memoized pipeline and the report document the CLI prints.

use std::cell::{OnceCell, RefCell};
use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bounds::{compute_bounds, BoundReport};
use crate::error::{Error, Result};
use crate::format::InstanceFile;
use crate::instance::Instance;
use crate::l0::{solve_l0_phaseless, SparseSolutionSet};
use crate::lp::{
    check_below_pstar, compare_solution_sets, solve_lp_exact, solve_lp_heuristic, IrlsConfig, LpSolveResult,
    VerificationReport, VerificationStatus,
};
use crate::polytope::{pseudo_extreme_points, VertexSet};
use crate::pstar::{assemble_certificate, EquivalenceCertificate};

pub const SCHEMA_VERSION: &str = "pcs-report/1";

/// Runs each stage at most once and records its wall-clock time.
pub struct Pipeline<'a> {
    instance: &'a Instance,
    budget: u64,
    l0: OnceCell<SparseSolutionSet>,
    bounds: OnceCell<BoundReport>,
    vertices: OnceCell<VertexSet>,
    certificate: OnceCell<EquivalenceCertificate>,
    lp_exact: RefCell<BTreeMap<u64, LpSolveResult>>,
    timings: RefCell<BTreeMap<String, f64>>,
    runs: RefCell<BTreeMap<String, usize>>,
}

impl<'a> Pipeline<'a> {
    pub fn new(instance: &'a Instance, budget: u64) -> Self {
        Self {
            instance,
            budget,
            l0: OnceCell::new(),
            bounds: OnceCell::new(),
            vertices: OnceCell::new(),
            certificate: OnceCell::new(),
            lp_exact: RefCell::new(BTreeMap::new()),
            timings: RefCell::new(BTreeMap::new()),
            runs: RefCell::new(BTreeMap::new()),
        }
    }

    pub fn instance(&self) -> &Instance {
        self.instance
    }

    fn timed<T>(&self, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let out = f()?;
        *self.runs.borrow_mut().entry(stage.to_string()).or_default() += 1;
        self.timings
            .borrow_mut()
            .insert(stage.to_string(), start.elapsed().as_secs_f64());
        Ok(out)
    }

    fn memo<'s, T>(&'s self, cell: &'s OnceCell<T>, stage: &str, f: impl FnOnce() -> Result<T>) -> Result<&'s T> {
        if let Some(v) = cell.get() {
            return Ok(v);
        }
        let v = self.timed(stage, f)?;
        Ok(cell.get_or_init(|| v))
    }

    pub fn l0(&self) -> Result<&SparseSolutionSet> {
        self.memo(&self.l0, "l0", || solve_l0_phaseless(self.instance))
    }

    pub fn bounds(&self) -> Result<&BoundReport> {
        let s = self.l0()?.sparsity;
        self.memo(&self.bounds, "bounds", || compute_bounds(self.instance, s))
    }

    pub fn vertices(&self) -> Result<&VertexSet> {
        let r0 = self.bounds()?.r0.clone();
        self.memo(&self.vertices, "vertices", || {
            pseudo_extreme_points(self.instance, &r0, self.budget)
        })
    }

    pub fn certificate(&self) -> Result<&EquivalenceCertificate> {
        if let Some(c) = self.certificate.get() {
            return Ok(c);
        }
        let l0 = self.l0()?;
        let bounds = self.bounds()?;
        let vset = self.vertices()?;
        self.memo(&self.certificate, "certificate", || {
            assemble_certificate(self.instance, l0, bounds, Some(vset))
        })
    }

    pub fn lp_exact(&self, p: f64) -> Result<LpSolveResult> {
        if let Some(r) = self.lp_exact.borrow().get(&p.to_bits()) {
            return Ok(r.clone());
        }
        let vset = self.vertices()?;
        let r = self.timed(&format!("lp_exact(p={p})"), || solve_lp_exact(self.instance, p, vset))?;
        self.lp_exact.borrow_mut().insert(p.to_bits(), r.clone());
        Ok(r)
    }

    pub fn lp_heuristic(&self, p: f64, cfg: &IrlsConfig) -> Result<LpSolveResult> {
        self.timed(&format!("lp_heuristic(p={p})"), || solve_lp_heuristic(self.instance, p, cfg))
    }

    /// Verification at `p`; a `p` at or above the threshold yields a refused entry.
    pub fn verify(&self, p: f64) -> Result<VerificationReport> {
        let cert = self.certificate()?;
        match check_below_pstar(p, cert) {
            Err(Error::PNotBelowPstar { p, pstar }) => {
                return Ok(VerificationReport::refused(
                    p,
                    pstar,
                    "p is not below p*; the equivalence is not guaranteed there".into(),
                ))
            }
            Err(e) => return Err(e),
            Ok(()) => {}
        }
        let l0 = self.l0()?;
        let lp = self.lp_exact(p)?;
        self.timed(&format!("verify(p={p})"), || compare_solution_sets(p, cert, l0, &lp))
    }

    pub fn timings(&self) -> BTreeMap<String, f64> {
        self.timings.borrow().clone()
    }

    /// How many times each stage actually ran.
    pub fn run_counts(&self) -> BTreeMap<String, usize> {
        self.runs.borrow().clone()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: String,
    pub command: String,
    pub instance_echo: InstanceFile,
    pub certificate: Option<EquivalenceCertificate>,
    pub l0_solutions: Option<SparseSolutionSet>,
    pub lp_results: Vec<LpSolveResult>,
    pub verification: Vec<VerificationReport>,
    /// Present only in verbose mode.
    pub pseudo_extreme_points: Option<VertexSet>,
    /// Seconds per stage; the only field that varies between runs.
    pub timings: BTreeMap<String, f64>,
    pub warnings: Vec<String>,
}

impl ReportDocument {
    fn new(command: &str, instance: &Instance) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            instance_echo: InstanceFile::from_instance(instance),
            certificate: None,
            l0_solutions: None,
            lp_results: vec![],
            verification: vec![],
            pseudo_extreme_points: None,
            timings: BTreeMap::new(),
            warnings: instance.warnings().to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// A copy with timings cleared, for comparisons between runs.
    pub fn without_timings(&self) -> Self {
        Self {
            timings: BTreeMap::new(),
            ..self.clone()
        }
    }

    pub fn any_failed(&self) -> bool {
        self.verification.iter().any(|v| v.status == VerificationStatus::Fail)
    }

    pub fn any_refused(&self) -> bool {
        self.verification.iter().any(|v| v.status == VerificationStatus::Refused)
    }
}

/// Full certificate pipeline.
pub fn analyze(instance: &Instance, verbose: bool, budget: u64) -> Result<ReportDocument> {
    let pipe = Pipeline::new(instance, budget);
    let mut doc = ReportDocument::new("analyze", instance);
    doc.certificate = Some(pipe.certificate()?.clone());
    doc.l0_solutions = Some(pipe.l0()?.clone());
    if verbose {
        doc.pseudo_extreme_points = Some(pipe.vertices()?.clone());
    }
    doc.timings = pipe.timings();
    Ok(doc)
}

pub fn solve_l0(instance: &Instance, budget: u64) -> Result<ReportDocument> {
    let pipe = Pipeline::new(instance, budget);
    let mut doc = ReportDocument::new("solve-l0", instance);
    doc.l0_solutions = Some(pipe.l0()?.clone());
    doc.timings = pipe.timings();
    Ok(doc)
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpMethod {
    Exact,
    Heuristic(IrlsConfig),
}

pub fn solve_lp(instance: &Instance, p: f64, method: &LpMethod, budget: u64) -> Result<ReportDocument> {
    let pipe = Pipeline::new(instance, budget);
    let mut doc = ReportDocument::new("solve-lp", instance);
    let result = match method {
        LpMethod::Exact => pipe.lp_exact(p)?,
        LpMethod::Heuristic(cfg) => pipe.lp_heuristic(p, cfg)?,
    };
    if !result.slack_ties.is_empty() {
        doc.warnings.push(format!(
            "{} optimal lifted points have y != |x| and are not listed as solutions",
            result.slack_ties.len()
        ));
    }
    doc.lp_results.push(result);
    doc.timings = pipe.timings();
    Ok(doc)
}

/// Certifies, then checks the equivalence at every requested `p`.
pub fn verify(instance: &Instance, ps: &[f64], budget: u64) -> Result<ReportDocument> {
    if let Some(&p) = ps.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
        return Err(Error::PNotInRange { p });
    }
    let pipe = Pipeline::new(instance, budget);
    let mut doc = ReportDocument::new("verify", instance);
    doc.certificate = Some(pipe.certificate()?.clone());
    doc.l0_solutions = Some(pipe.l0()?.clone());
    for &p in ps {
        let report = pipe.verify(p)?;
        if report.status == VerificationStatus::Pass {
            doc.lp_results.push(pipe.lp_exact(p)?);
        }
        doc.verification.push(report);
    }
    doc.timings = pipe.timings();
    Ok(doc)
}
