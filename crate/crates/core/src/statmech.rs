//! Multiplicities, coin-sequence reversal and lattice mixing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::entropy::{boltzmann_entropy, EntropyValue};
use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAX_DICE: u32 = 8;
/// Largest `n_a + n_b` for which binomials are computed exactly in `u64`.
pub const MAX_MIXING_SITES: u64 = 60;

/// A labelled macrostate and its number of microstates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MacrostateSpec {
    pub description: String,
    pub multiplicity: u128,
}

impl MacrostateSpec {
    pub fn new(description: impl Into<String>, multiplicity: u128) -> Result<Self> {
        if multiplicity == 0 {
            return Err(Error::ZeroMultiplicity);
        }
        Ok(Self {
            description: description.into(),
            multiplicity,
        })
    }

    /// `ln Ω`.
    pub fn entropy<T: Real>(&self) -> Result<EntropyValue<T>> {
        boltzmann_entropy(self.multiplicity, T::E())
    }
}

/// Number of ordered outcomes of `num_dice` six-sided dice that sum to `total`,
/// by exhaustive enumeration of all `6^num_dice` rolls.
///
/// Unreachable totals give a multiplicity of zero, so the result is a bare
/// count rather than a [`MacrostateSpec`] (which requires `Ω ≥ 1`); see
/// [`dice_macrostate`].
pub fn dice_multiplicity(num_dice: u32, total: i64) -> Result<u128> {
    if num_dice == 0 {
        return Err(Error::InvalidArgument(
            "at least one die is required".into(),
        ));
    }
    if num_dice > MAX_DICE {
        return Err(Error::TooManyDice(num_dice));
    }
    if total < 0 {
        return Err(Error::TotalOutOfRange(total));
    }
    let n = num_dice as usize;
    let mut faces = vec![1i64; n];
    let mut count = 0u128;
    loop {
        if faces.iter().sum::<i64>() == total {
            count += 1;
        }
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(count);
            }
            k -= 1;
            if faces[k] < 6 {
                faces[k] += 1;
                break;
            }
            faces[k] = 1;
        }
    }
}

/// Dice roll as a macrostate; errors with [`Error::ZeroMultiplicity`] for unreachable totals.
pub fn dice_macrostate(num_dice: u32, total: i64) -> Result<MacrostateSpec> {
    let omega = dice_multiplicity(num_dice, total)?;
    MacrostateSpec::new(format!("{num_dice} dice showing {total}"), omega)
}

/// Joint macrostate of two independent systems: `Ω(A,B) = Ω(A) Ω(B)`.
pub fn combine_multiplicities(a: &MacrostateSpec, b: &MacrostateSpec) -> Result<MacrostateSpec> {
    let omega = a
        .multiplicity
        .checked_mul(b.multiplicity)
        .ok_or_else(|| Error::Overflow(format!("{} * {}", a.multiplicity, b.multiplicity)))?;
    MacrostateSpec::new(
        format!("({}) and ({})", a.description, b.description),
        omega,
    )
}

/// What counts as reproducing the target coin pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatchMode {
    /// The exact ordered (or labelled) sequence must reappear.
    #[default]
    Ordered,
    /// Only the number of heads must match.
    Unordered { heads: u32 },
}

/// Probability that fresh fair flips reproduce a target pattern of `sequence_length` outcomes.
///
/// Flipping one coin `n` times in a row and flipping `n` labelled coins at once
/// are the same event in [`MatchMode::Ordered`]: probability `2^−n`. The
/// unordered mode gives `C(n, heads) / 2^n`.
pub fn coin_reversal_probability<T: Real>(sequence_length: u32, mode: MatchMode) -> Result<T> {
    if sequence_length == 0 {
        return Err(Error::InvalidArgument(
            "sequence length must be at least 1".into(),
        ));
    }
    let n =
        i32::try_from(sequence_length).map_err(|_| Error::Overflow(sequence_length.to_string()))?;
    let base = T::two().powi(-n);
    match mode {
        MatchMode::Ordered => Ok(base),
        MatchMode::Unordered { heads } => {
            if heads > sequence_length {
                return Err(Error::InvalidArgument(format!(
                    "{heads} heads in a sequence of {sequence_length}"
                )));
            }
            let ways = binomial_f64(sequence_length as u64, heads as u64);
            Ok(T::lit(ways) * base)
        }
    }
}

fn binomial_f64(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Fraction of `trials` fresh sequences equal to a fixed target sequence.
///
/// The target is the first sequence drawn from a ChaCha8 generator seeded with
/// `seed`; every trial then draws a new sequence from the same generator.
pub fn coin_reversal_monte_carlo(sequence_length: u32, trials: u64, seed: u64) -> Result<f64> {
    if sequence_length == 0 || trials == 0 {
        return Err(Error::InvalidArgument(
            "sequence length and trial count must both be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = (sequence_length as usize).div_ceil(64);
    let tail_bits = sequence_length as usize - 64 * (words - 1);
    let tail_mask = if tail_bits == 64 {
        u64::MAX
    } else {
        (1u64 << tail_bits) - 1
    };
    let mask = |i: usize| if i + 1 == words { tail_mask } else { u64::MAX };
    let target: Vec<u64> = (0..words).map(|i| rng.random::<u64>() & mask(i)).collect();
    let mut hits = 0u64;
    for _ in 0..trials {
        if (0..words).all(|i| rng.random::<u64>() & mask(i) == target[i]) {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

/// Exact `C(n, k)` in `u64`; callers keep `n <= 60`.
pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    u64::try_from(acc).map_err(|_| Error::Overflow(format!("C({n}, {k})")))
}

/// Entropy of mixing, in bits, for `n_a` and `n_b` particles on `n_a + n_b`
/// lattice sites: `log2 C(n_a + n_b, n_a)` for distinct species, 0 for the same species.
pub fn mixing_demo<T: Real>(n_a: u64, n_b: u64, same_species: bool) -> Result<EntropyValue<T>> {
    if n_a == 0 || n_b == 0 {
        return Err(Error::InvalidArgument(
            "both systems need at least one particle".into(),
        ));
    }
    let n = n_a
        .checked_add(n_b)
        .filter(|&n| n <= MAX_MIXING_SITES)
        .ok_or_else(|| {
            Error::Overflow(format!("{n_a} + {n_b} sites exceeds {MAX_MIXING_SITES}"))
        })?;
    if same_species {
        return Ok(EntropyValue::bits(T::zero()));
    }
    let arrangements = binomial(n, n_a)?;
    let omega =
        T::from_u64(arrangements).ok_or_else(|| Error::Overflow(arrangements.to_string()))?;
    Ok(EntropyValue::bits(omega.log2()))
}
