//! Restore a noisy binary image with an Ising prior and a Gaussian
//! likelihood, using capped max elimination.

use binmrf::apps::{map_estimate, GaussianLikelihoodSpec};
use binmrf::models::build_ising;
use binmrf::{EliminationConfig, LatticeSpec, Mode};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};

fn main() -> binmrf::Result<()> {
    let (rows, cols): (usize, usize) = (12, 12);
    let truth: Vec<u8> = (0..rows * cols)
        .map(|k| u8::from((k / cols).abs_diff(rows / 2) + (k % cols).abs_diff(cols / 2) < 5))
        .collect();
    let noise = Normal::new(0.0, 0.7).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let y: Vec<f64> = truth.iter().map(|&v| f64::from(v) + noise.sample(&mut rng)).collect();

    let prior = build_ising(LatticeSpec::new(rows, cols)?, 0.8);
    let lik = GaussianLikelihoodSpec::new(0.0, 1.0, 0.7)?;
    for nu in [1, 3, 6] {
        let est = map_estimate(&y, &prior, &lik, &EliminationConfig::with_mode(Mode::Approximate, nu))?;
        let wrong = est.state.iter().zip(&truth).filter(|(a, b)| a != b).count();
        println!("nu {nu}: {wrong} of {} pixels misclassified", truth.len());
    }
    let thresholded = y.iter().zip(&truth).filter(|(v, &t)| u8::from(**v > 0.5) != t).count();
    println!("pixelwise threshold: {thresholded} misclassified");
    Ok(())
}
