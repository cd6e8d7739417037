#[path = "support/oracles.rs"]
mod oracles;

use num_traits::{Signed, ToPrimitive};
use oracles::{to_q, Ensemble};
use pcs_core::lp::sup_norm;
use pcs_core::polytope::build_lifted;
use pcs_core::{
    certify, lp_objective, read_instance, solve_lp_exact, write_instance, Instance, LiftedPoint, Pipeline, Rational,
    DEFAULT_BUDGET,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn instance(phi: &[Vec<i64>], b: &[i64]) -> Instance {
    let rows: Vec<&[i64]> = phi.iter().map(Vec::as_slice).collect();
    Instance::from_i64(&rows, b).unwrap()
}

#[test]
fn exact_lp_optima_are_global_and_inside_the_c1_box() {
    let mut ens = Ensemble::new(21, &[1, 2], &[3, 4, 5]);
    for i in 0..60 {
        let (phi, b) = ens.draw();
        let inst = instance(&phi, &b);
        let pipe = Pipeline::new(&inst, DEFAULT_BUDGET);
        let cert = pipe.certificate().unwrap();
        let p = [0.9 * cert.pstar, 0.5, 0.95][i % 3];
        let lp = pipe.lp_exact(p).unwrap();
        let (phi_q, b_q) = to_q(&phi, &b);
        let (value, sols) = oracles::lp_global_oracle(&phi_q, &b_q, p);
        assert!((lp.optimal_value - value).abs() <= 1e-9 * value.max(1.0), "phi = {phi:?}, b = {b:?}, p = {p}");
        assert_eq!(lp.solutions, sols, "phi = {phi:?}, b = {b:?}, p = {p}");
        for x in &lp.solutions {
            assert!(sup_norm(x) <= cert.c1, "phi = {phi:?}, b = {b:?}: {x:?} outside c1 = {}", cert.c1);
        }
    }
}

#[test]
fn sparsest_solutions_lift_into_the_feasible_set() {
    let mut ens = Ensemble::new(22, &[1, 2], &[3, 4, 5]);
    for _ in 0..40 {
        let (phi, b) = ens.draw();
        let inst = instance(&phi, &b);
        let pipe = Pipeline::new(&inst, DEFAULT_BUDGET);
        let cert = pipe.certificate().unwrap();
        for x in &pipe.l0().unwrap().solutions {
            let lifted = LiftedPoint::lift(x);
            let inside = inst
                .sign_patterns(false)
                .iter()
                .any(|eps| build_lifted(&inst, eps, &cert.r0).unwrap().contains(&lifted));
            assert!(inside, "{x:?}");
        }
    }
}

#[test]
fn every_vertex_has_full_active_rank() {
    let mut ens = Ensemble::new(23, &[1, 2], &[2, 3, 4]);
    for _ in 0..20 {
        let (phi, b) = ens.draw();
        let inst = instance(&phi, &b);
        let pipe = Pipeline::new(&inst, DEFAULT_BUDGET);
        let r0 = pipe.bounds().unwrap().r0.clone();
        for entry in &pipe.vertices().unwrap().entries {
            for eps in &entry.sources {
                assert!(build_lifted(&inst, eps, &r0).unwrap().is_vertex(&entry.point));
            }
        }
    }
}

#[test]
fn vertex_minimum_is_never_beaten_by_interior_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let mut ens = Ensemble::new(24, &[1, 2], &[3, 4]);
    for _ in 0..15 {
        let (phi, b) = ens.draw();
        let inst = instance(&phi, &b);
        let pipe = Pipeline::new(&inst, DEFAULT_BUDGET);
        let vset = pipe.vertices().unwrap();
        let p = 0.4;
        let best = solve_lp_exact(&inst, p, vset).unwrap().optimal_value;
        for eps in inst.sign_patterns(false) {
            let verts: Vec<_> = vset.entries.iter().filter(|e| e.sources.contains(&eps)).map(|e| &e.point).collect();
            if verts.is_empty() {
                continue;
            }
            // Random convex combinations of the branch's vertices lie in T_ε.
            for _ in 0..200 {
                let w: Vec<u32> = verts.iter().map(|_| rng.random_range(0..100)).collect();
                let total: u32 = w.iter().sum::<u32>().max(1);
                let y: Vec<Rational> = (0..inst.n())
                    .map(|i| {
                        verts.iter().zip(&w).fold(Rational::from_integer(0.into()), |acc, (v, &wi)| {
                            acc + &v.y[i] * Rational::new(wi.into(), total.into())
                        })
                    })
                    .collect();
                assert!(lp_objective(&y, p) >= best - 1e-12);
            }
        }
    }
}

#[test]
fn chain_inequality_for_certified_thresholds() {
    let mut ens = Ensemble::new(25, &[1, 2], &[3, 4, 5]);
    for _ in 0..40 {
        let (phi, b) = ens.draw();
        let cert = certify(&instance(&phi, &b), DEFAULT_BUDGET).unwrap();
        let ratio = cert.ratio.as_ref().unwrap().to_f64().unwrap();
        let s = cert.s as f64;
        for k in 1..50 {
            let p = cert.pstar * k as f64 / 50.0;
            let mid = ratio.powf(p) * s;
            assert!(s <= mid && mid < s + 1.0 + 1e-12);
        }
        assert!(cert.rm.as_ref().unwrap() <= &cert.r0);
        assert!(cert.rm.as_ref().unwrap().is_positive());
    }
}

#[test]
fn instance_files_round_trip() {
    let mut ens = Ensemble::new(26, &[1, 2, 3], &[3, 4, 5]);
    for _ in 0..30 {
        let (phi, b) = ens.draw();
        let inst = instance(&phi, &b);
        let text = write_instance(&inst);
        let back = read_instance(&text).unwrap();
        assert_eq!(back.phi(), inst.phi());
        assert_eq!(back.b(), inst.b());
        assert_eq!(write_instance(&back), text);
    }
}
