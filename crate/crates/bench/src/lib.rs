//! Seeded instance generators shared by the benchmarks.

use pcs_core::Instance;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A random `m × n` instance with integer entries in `[-3, 3]`, full row
/// rank, and `b = |Φx₀|` for an integer `x₀` with `k` nonzeros.
pub fn random_instance(m: usize, n: usize, k: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let phi: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.random_range(-3..=3)).collect())
            .collect();
        let mut x0 = vec![0i64; n];
        for j in rand::seq::index::sample(&mut rng, n, k.min(n)) {
            x0[j] = [-2, -1, 1, 2][rng.random_range(0..4)];
        }
        let b: Vec<i64> = phi
            .iter()
            .map(|r| r.iter().zip(&x0).map(|(a, x)| a * x).sum::<i64>().abs())
            .collect();
        let rows: Vec<&[i64]> = phi.iter().map(Vec::as_slice).collect();
        if let Ok(inst) = Instance::from_i64(&rows, &b) {
            if !inst.is_degenerate() {
                return inst;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_is_seeded() {
        let a = random_instance(2, 5, 1, 9);
        let b = random_instance(2, 5, 1, 9);
        assert_eq!(a.phi(), b.phi());
        assert_eq!(a.b(), b.b());
        assert_eq!((a.m(), a.n()), (2, 5));
    }
}
