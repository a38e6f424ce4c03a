//! Random generators for property checks: dense and sparse distributions,
//! Markov chain specs, pure two-qubit states.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::Result;
use crate::markov::MarkovChainSpec;
use crate::prob::JointDistribution;
use crate::quantum::DensityMatrix;
use crate::scalar::Real;

/// Dirichlet(alpha, ..., alpha) draw of length `n`.
pub fn dirichlet<R: Rng + ?Sized>(rng: &mut R, n: usize, alpha: f64) -> Vec<f64> {
    let gamma = Gamma::new(alpha, 1.0).expect("positive shape");
    loop {
        let draws: Vec<f64> = (0..n).map(|_| gamma.sample(rng)).collect();
        let sum: f64 = draws.iter().sum();
        if sum > 0.0 && sum.is_finite() {
            return draws.into_iter().map(|x| x / sum).collect();
        }
    }
}

/// Dense Dirichlet-distributed table with a random concentration in `[0.1, 3)`.
pub fn dense_distribution<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    alphabet_sizes: &[usize],
) -> Result<JointDistribution<T>> {
    let n = alphabet_sizes.iter().product();
    let alpha = rng.random_range(0.1..3.0);
    let probs = dirichlet(rng, n, alpha).into_iter().map(T::lit).collect();
    JointDistribution::new(alphabet_sizes.to_vec(), probs)
}

/// Table supported on a random subset of 1 to 3 outcomes.
pub fn sparse_distribution<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    alphabet_sizes: &[usize],
) -> Result<JointDistribution<T>> {
    let n: usize = alphabet_sizes.iter().product();
    let k = rng.random_range(1..=3.min(n));
    let mut probs = vec![0.0; n];
    let weights = dirichlet(rng, k, 1.0);
    for w in weights {
        let slot = rng.random_range(0..n);
        probs[slot] += w;
    }
    JointDistribution::new(
        alphabet_sizes.to_vec(),
        probs.into_iter().map(T::lit).collect(),
    )
}

/// Dense draw three times out of four, sparse otherwise.
pub fn mixed_distribution<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    alphabet_sizes: &[usize],
) -> Result<JointDistribution<T>> {
    if rng.random_bool(0.75) {
        dense_distribution(rng, alphabet_sizes)
    } else {
        sparse_distribution(rng, alphabet_sizes)
    }
}

fn stochastic_rows<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Vec<Vec<f64>> {
    (0..rows)
        .map(|_| {
            if rng.random_bool(0.2) {
                // deterministic row
                let mut r = vec![0.0; cols];
                r[rng.random_range(0..cols)] = 1.0;
                r
            } else {
                let alpha = rng.random_range(0.2..2.0);
                dirichlet(rng, cols, alpha)
            }
        })
        .collect()
}

/// Markov chain spec with alphabets drawn from `sizes`.
pub fn markov_spec<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    sizes: [usize; 3],
) -> Result<MarkovChainSpec<T>> {
    let conv = |m: Vec<Vec<f64>>| -> Vec<Vec<T>> {
        m.into_iter()
            .map(|r| r.into_iter().map(T::lit).collect())
            .collect()
    };
    let initial = dense_distribution(rng, &[sizes[0]])?;
    let t1 = conv(stochastic_rows(rng, sizes[0], sizes[1]));
    let t2 = conv(stochastic_rows(rng, sizes[1], sizes[2]));
    MarkovChainSpec::new(initial, t1, t2)
}

/// Haar-like random unit vector in `C^n` (normalized complex Gaussian).
pub fn random_amplitudes<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Complex<T>> {
    let v: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
    v.into_iter()
        .map(|(a, b)| Complex::new(T::lit(a / norm), T::lit(b / norm)))
        .collect()
}

/// Random pure two-qubit state and its amplitude vector.
///
/// With `product = true` the amplitudes are `u ⊗ v` for random qubits `u`, `v`.
pub fn random_pure_two_qubit<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    product: bool,
) -> Result<(DensityMatrix<T>, Vec<Complex<T>>)> {
    let amps = if product {
        let u = random_amplitudes::<T, _>(rng, 2);
        let v = random_amplitudes::<T, _>(rng, 2);
        u.iter()
            .flat_map(|&a| v.iter().map(move |&b| a * b))
            .collect()
    } else {
        random_amplitudes(rng, 4)
    };
    Ok((DensityMatrix::from_pure(2, 2, &amps)?, amps))
}
