use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Adds Gaussian noise scaled to `‖δ‖ = relative_level · ‖y‖`, deterministic per seed.
pub fn add_noise(y: &[f64], relative_level: f64, seed: u64) -> Vec<f64> {
    assert!(relative_level >= 0.0, "noise level must be nonnegative");
    let target = relative_level * crate::vecops::norm(y);
    if target == 0.0 {
        return y.to_vec();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir: Vec<f64> = (0..y.len()).map(|_| StandardNormal.sample(&mut rng)).collect();
    let scale = target / crate::vecops::norm(&dir);
    y.iter().zip(&dir).map(|(v, d)| v + scale * d).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vecops::{dist, norm};

    #[test]
    fn zero_level_is_identity() {
        let y = vec![1.0, -2.0, 3.0];
        assert_eq!(add_noise(&y, 0.0, 1), y);
    }

    #[test]
    fn relative_level_is_exact_and_seeded() {
        let y: Vec<f64> = (0..200).map(|i| (i as f64 * 0.1).cos()).collect();
        let a = add_noise(&y, 0.01, 42);
        assert!((dist(&a, &y) / norm(&y) - 0.01).abs() <= 1e-12);
        assert_eq!(a, add_noise(&y, 0.01, 42));
        assert_ne!(a, add_noise(&y, 0.01, 43));
    }
}
