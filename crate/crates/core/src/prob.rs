//! Dense joint probability tables over one to three finite variables.
//!
//! Tables are stored row-major with the last variable varying fastest, which
//! is also the on-disk order of the JSON distribution format:
//!
//! ```json
//! {"alphabet_sizes": [2, 2, 2], "probs": [0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125]}
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest number of variables a table may carry.
pub const MAX_VARS: usize = 3;

/// A normalized probability table over 1 to 3 finite variables.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution<T> {
    alphabet_sizes: Vec<usize>,
    probs: Vec<T>,
}

/// Checks a raw table against the distribution invariants without building one.
///
/// The structural checks (variable count, alphabet sizes) run first; after
/// that the entry invariants are checked in order: nonnegativity,
/// normalization to within `T::TOL`, table length.
pub fn validate<T: Real>(alphabet_sizes: &[usize], probs: &[T]) -> Result<()> {
    if alphabet_sizes.is_empty() || alphabet_sizes.len() > MAX_VARS {
        return Err(Error::ShapeMismatch(format!(
            "{} variables given, expected 1 to {MAX_VARS}",
            alphabet_sizes.len()
        )));
    }
    if alphabet_sizes.contains(&0) {
        return Err(Error::ShapeMismatch(
            "alphabet sizes must be positive".into(),
        ));
    }
    if let Some((index, &value)) = probs.iter().enumerate().find(|(_, p)| !(**p >= T::zero())) {
        return Err(Error::NegativeProbability {
            index,
            value: value.as_f64(),
        });
    }
    let sum: T = probs.iter().copied().sum();
    if !((sum - T::one()).abs() <= T::TOL) {
        return Err(Error::NotNormalized(sum.as_f64()));
    }
    let expected: usize = alphabet_sizes.iter().product();
    if probs.len() != expected {
        return Err(Error::ShapeMismatch(format!(
            "table has {} entries, alphabet sizes {:?} need {expected}",
            probs.len(),
            alphabet_sizes
        )));
    }
    Ok(())
}

impl<T: Real> JointDistribution<T> {
    /// Validates and builds a table, rescaling it so the entries sum to exactly one.
    pub fn new(alphabet_sizes: Vec<usize>, probs: Vec<T>) -> Result<Self> {
        validate(&alphabet_sizes, &probs)?;
        let sum: T = probs.iter().copied().sum();
        let rounding = T::epsilon() * T::from_usize(probs.len()).unwrap_or_else(T::one);
        let probs = if (sum - T::one()).abs() <= rounding {
            probs
        } else {
            probs.into_iter().map(|p| p / sum).collect()
        };
        Ok(Self {
            alphabet_sizes,
            probs,
        })
    }

    /// Single-variable distribution.
    pub fn from_probs(probs: Vec<T>) -> Result<Self> {
        Self::new(vec![probs.len()], probs)
    }

    /// Uniform table over the given alphabet sizes.
    pub fn uniform(alphabet_sizes: Vec<usize>) -> Result<Self> {
        let n: usize = alphabet_sizes.iter().product();
        let p = T::one() / T::from_usize(n.max(1)).unwrap_or_else(T::one);
        Self::new(alphabet_sizes, vec![p; n])
    }

    /// Point mass on one outcome tuple.
    pub fn point_mass(alphabet_sizes: Vec<usize>, outcome: &[usize]) -> Result<Self> {
        let n: usize = alphabet_sizes.iter().product();
        let mut probs = vec![T::zero(); n];
        let idx = flat_index(&alphabet_sizes, outcome)?;
        if idx < n {
            probs[idx] = T::one();
        }
        Self::new(alphabet_sizes, probs)
    }

    /// Re-checks the invariants.
    pub fn validate(&self) -> Result<()> {
        validate(&self.alphabet_sizes, &self.probs)
    }

    pub fn num_vars(&self) -> usize {
        self.alphabet_sizes.len()
    }

    pub fn alphabet_sizes(&self) -> &[usize] {
        &self.alphabet_sizes
    }

    /// Flat row-major table.
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// Probability of one outcome tuple.
    pub fn get(&self, outcome: &[usize]) -> Result<T> {
        Ok(self.probs[flat_index(&self.alphabet_sizes, outcome)?])
    }

    /// Sums out every variable not in `keep`.
    ///
    /// `keep` is treated as a set: duplicates are ignored and the surviving
    /// variables retain their original relative order.
    pub fn marginalize(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let num_vars = self.num_vars();
        if let Some(&index) = keep.iter().find(|&&k| k >= num_vars) {
            return Err(Error::IndexOutOfRange { index, num_vars });
        }
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        kept.dedup();
        if kept.len() == num_vars {
            return Ok(self.clone());
        }

        let out_sizes: Vec<usize> = kept.iter().map(|&k| self.alphabet_sizes[k]).collect();
        let mut out = vec![T::zero(); out_sizes.iter().product()];
        let mut outcome = vec![0usize; num_vars];
        for &p in &self.probs {
            let mut idx = 0;
            for &k in &kept {
                idx = idx * self.alphabet_sizes[k] + outcome[k];
            }
            out[idx] = out[idx] + p;
            increment(&mut outcome, &self.alphabet_sizes);
        }
        Ok(Self {
            alphabet_sizes: out_sizes,
            probs: out,
        })
    }

    /// Outer product `self ⊗ other`; the variables of `self` come first.
    pub fn product(&self, other: &Self) -> Result<Self> {
        let n = self.num_vars() + other.num_vars();
        if n > MAX_VARS {
            return Err(Error::ResultExceedsThreeVars(n));
        }
        let mut sizes = self.alphabet_sizes.clone();
        sizes.extend_from_slice(&other.alphabet_sizes);
        let probs = self
            .probs
            .iter()
            .flat_map(|&p| other.probs.iter().map(move |&q| p * q))
            .collect();
        Ok(Self {
            alphabet_sizes: sizes,
            probs,
        })
    }

    /// Iterates `(outcome tuple, probability)` in table order.
    pub fn iter_outcomes(&self) -> impl Iterator<Item = (Vec<usize>, T)> + '_ {
        let mut outcome = vec![0usize; self.num_vars()];
        self.probs.iter().map(move |&p| {
            let current = outcome.clone();
            increment(&mut outcome, &self.alphabet_sizes);
            (current, p)
        })
    }

    /// Largest absolute entrywise difference to another table of the same shape.
    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        if self.alphabet_sizes != other.alphabet_sizes {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.alphabet_sizes, other.alphabet_sizes
            )));
        }
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(&a, &b)| (a - b).abs())
            .fold(T::zero(), T::max))
    }

    /// Converts the table to another scalar type.
    pub fn cast<U: Real>(&self) -> Result<JointDistribution<U>> {
        JointDistribution::new(
            self.alphabet_sizes.clone(),
            self.probs.iter().map(|p| U::lit(p.as_f64())).collect(),
        )
    }
}

fn flat_index(sizes: &[usize], outcome: &[usize]) -> Result<usize> {
    if outcome.len() != sizes.len() {
        return Err(Error::ShapeMismatch(format!(
            "outcome has {} coordinates, table has {} variables",
            outcome.len(),
            sizes.len()
        )));
    }
    let mut idx = 0;
    for (var, (&o, &s)) in outcome.iter().zip(sizes).enumerate() {
        if o >= s {
            return Err(Error::IndexOutOfRange {
                index: var,
                num_vars: sizes.len(),
            });
        }
        idx = idx * s + o;
    }
    Ok(idx)
}

/// Odometer increment, last coordinate fastest.
fn increment(outcome: &mut [usize], sizes: &[usize]) {
    for k in (0..outcome.len()).rev() {
        outcome[k] += 1;
        if outcome[k] < sizes[k] {
            return;
        }
        outcome[k] = 0;
    }
}

/// On-disk JSON form of a distribution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DistributionFile {
    pub alphabet_sizes: Vec<usize>,
    pub probs: Vec<f64>,
}

impl<T: Real> JointDistribution<T> {
    pub fn from_json(text: &str) -> Result<Self> {
        let file: DistributionFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::try_from(file)
    }

    pub fn to_file(&self) -> DistributionFile {
        DistributionFile {
            alphabet_sizes: self.alphabet_sizes.clone(),
            probs: self.probs.iter().map(|p| p.as_f64()).collect(),
        }
    }
}

impl<T: Real> TryFrom<DistributionFile> for JointDistribution<T> {
    type Error = Error;

    fn try_from(file: DistributionFile) -> Result<Self> {
        let probs = file
            .probs
            .iter()
            .map(|&p| T::from_f64(p).ok_or_else(|| Error::Parse(format!("bad probability {p}"))))
            .collect::<Result<Vec<T>>>()?;
        Self::new(file.alphabet_sizes, probs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(sizes: &[usize], probs: &[f64]) -> JointDistribution<f64> {
        JointDistribution::new(sizes.to_vec(), probs.to_vec()).unwrap()
    }

    #[test]
    fn validate_accepts_uniform() {
        assert!(validate(&[2, 2], &[0.25f64; 4]).is_ok());
    }

    #[test]
    fn validate_rejects_unnormalized() {
        assert!(matches!(
            validate(&[2, 2], &[0.3f64, 0.2, 0.2, 0.2]),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn validate_rejects_negative() {
        assert!(matches!(
            validate(&[2, 2], &[-0.1f64, 0.4, 0.4, 0.3]),
            Err(Error::NegativeProbability { index: 0, .. })
        ));
    }

    #[test]
    fn validate_rejects_bad_shapes() {
        assert!(matches!(
            validate(&[2, 2], &[0.5f64, 0.5]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            validate::<f64>(&[], &[]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            validate(&[1, 1, 1, 1], &[1.0f64]),
            Err(Error::ShapeMismatch(_))
        ));
        assert!(matches!(
            validate(&[0], &[1.0f64]),
            Err(Error::ShapeMismatch(_))
        ));
    }

    #[test]
    fn near_normalized_input_is_rescaled() {
        let dist = d(&[2], &[0.5 + 4e-10, 0.5]);
        assert_eq!(dist.probs().iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn marginal_of_correlated_bits() {
        let dist = d(&[2, 2], &[0.5, 0.0, 0.0, 0.5]);
        assert_eq!(dist.marginalize(&[0]).unwrap().probs(), &[0.5, 0.5]);
    }

    #[test]
    fn marginal_of_product_recovers_factor() {
        let a = JointDistribution::from_probs(vec![0.3, 0.7]).unwrap();
        let b = JointDistribution::from_probs(vec![0.6, 0.4]).unwrap();
        let m = a.product(&b).unwrap().marginalize(&[1]).unwrap();
        assert!(m.max_abs_diff(&b).unwrap() < 1e-12);
    }

    #[test]
    fn tripartite_uniform_pair_marginal() {
        let u = JointDistribution::<f64>::uniform(vec![2, 2, 2]).unwrap();
        let m = u.marginalize(&[0, 2]).unwrap();
        assert_eq!(m.alphabet_sizes(), &[2, 2]);
        assert_eq!(m.probs(), &[0.25; 4]);
    }

    #[test]
    fn marginalize_errors() {
        let u = JointDistribution::<f64>::uniform(vec![2, 2]).unwrap();
        assert_eq!(u.marginalize(&[]), Err(Error::EmptyKeepSet));
        assert_eq!(
            u.marginalize(&[2]),
            Err(Error::IndexOutOfRange {
                index: 2,
                num_vars: 2
            })
        );
    }

    #[test]
    fn marginal_keeps_original_order() {
        // p(a, b, c) with distinct marginals so a swapped axis would show.
        let dist = d(
            &[2, 3, 2],
            &[
                0.05, 0.1, 0.0, 0.15, 0.1, 0.1, 0.05, 0.05, 0.2, 0.1, 0.05, 0.05,
            ],
        );
        let m = dist.marginalize(&[2, 0]).unwrap();
        assert_eq!(m.alphabet_sizes(), &[2, 2]);
        let expected = [
            0.05 + 0.0 + 0.1,
            0.1 + 0.15 + 0.1,
            0.05 + 0.2 + 0.05,
            0.05 + 0.1 + 0.05,
        ];
        for (x, y) in m.probs().iter().zip(expected) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn product_examples() {
        let half = JointDistribution::from_probs(vec![0.5, 0.5]).unwrap();
        assert_eq!(half.product(&half).unwrap().probs(), &[0.25; 4]);

        let one = JointDistribution::from_probs(vec![1.0]).unwrap();
        let b = JointDistribution::from_probs(vec![0.3, 0.7]).unwrap();
        let p = one.product(&b).unwrap();
        assert_eq!(p.alphabet_sizes(), &[1, 2]);
        assert_eq!(p.probs(), &[0.3, 0.7]);

        let a = JointDistribution::<f64>::from_probs(vec![0.3, 0.7]).unwrap();
        let c = JointDistribution::from_probs(vec![0.6, 0.4]).unwrap();
        let p = a.product(&c).unwrap();
        for (x, y) in p.probs().iter().zip([0.18, 0.12, 0.42, 0.28]) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn product_rejects_four_vars() {
        let u = JointDistribution::<f64>::uniform(vec![2, 2]).unwrap();
        assert_eq!(u.product(&u), Err(Error::ResultExceedsThreeVars(4)));
    }

    #[test]
    fn json_round_trip_is_row_major() {
        let dist: JointDistribution<f64> = JointDistribution::from_json(
            r#"{"alphabet_sizes":[2,3],"probs":[0.1,0.2,0.3,0.1,0.2,0.1]}"#,
        )
        .unwrap();
        assert_eq!(dist.get(&[0, 2]).unwrap(), 0.3);
        assert_eq!(dist.get(&[1, 0]).unwrap(), 0.1);
        let back = serde_json::to_string(&dist.to_file()).unwrap();
        assert_eq!(
            back,
            r#"{"alphabet_sizes":[2,3],"probs":[0.1,0.2,0.3,0.1,0.2,0.1]}"#
        );
    }

    #[test]
    fn f32_tables_work() {
        let dist = JointDistribution::<f32>::new(vec![2, 2], vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let m = dist.marginalize(&[1]).unwrap();
        assert!((m.probs()[0] - 0.4).abs() < 1e-6);
    }
}
