//! Classical entropy functionals over [`JointDistribution`]s.
//!
//! All functions take an explicit logarithm base; [`BITS`] is the default used
//! throughout the crate and the Boltzmann form conventionally uses the natural
//! base. Zero-probability terms are skipped (`0 log 0 = 0`).

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::prob::JointDistribution;
use crate::scalar::{clamp_nonnegative, Real};

/// Base 2.
pub const BITS: f64 = 2.0;

/// An entropy together with the logarithm base it was measured in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyValue<T> {
    pub value: T,
    pub base: T,
}

impl<T: Real> EntropyValue<T> {
    pub fn new(value: T, base: T) -> Result<Self> {
        check_base(base)?;
        Ok(Self { value, base })
    }

    pub fn bits(value: T) -> Self {
        Self {
            value,
            base: T::two(),
        }
    }

    pub fn nats(value: T) -> Self {
        Self {
            value,
            base: T::E(),
        }
    }

    /// Rescales to another base: `log_new(x) = log_old(x) / log_old(new)`.
    pub fn convert_base(self, new_base: T) -> Result<Self> {
        check_base(new_base)?;
        Ok(Self {
            value: self.value * self.base.ln() / new_base.ln(),
            base: new_base,
        })
    }

    pub fn in_bits(self) -> T {
        if self.base == T::two() {
            self.value
        } else {
            self.value * self.base.ln() / T::LN_2()
        }
    }
}

impl<T: Real> Serialize for EntropyValue<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("EntropyValue", 2)?;
        let v = self.value.as_f64();
        if v.is_infinite() && v > 0.0 {
            s.serialize_field("value", "inf")?;
        } else {
            s.serialize_field("value", &v)?;
        }
        s.serialize_field("base", &self.base.as_f64())?;
        s.end()
    }
}

/// Result of a relative entropy: finite, or `+inf` when the support of the
/// first argument escapes the support of the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence<T> {
    Finite(EntropyValue<T>),
    Infinite { base: T },
}

impl<T: Real> Divergence<T> {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Divergence::Infinite { .. })
    }

    pub fn finite(self) -> Option<EntropyValue<T>> {
        match self {
            Divergence::Finite(e) => Some(e),
            Divergence::Infinite { .. } => None,
        }
    }

    /// Flattens to an [`EntropyValue`], mapping the sentinel to `+inf`.
    pub fn to_entropy_value(self) -> EntropyValue<T> {
        match self {
            Divergence::Finite(e) => e,
            Divergence::Infinite { base } => EntropyValue {
                value: T::infinity(),
                base,
            },
        }
    }
}

impl<T: Real> Serialize for Divergence<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_entropy_value().serialize(serializer)
    }
}

fn check_base<T: Real>(base: T) -> Result<()> {
    if base > T::one() && base.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidBase(base.as_f64()))
    }
}

fn clamp<T: Real>(quantity: &'static str, value: T) -> Result<T> {
    clamp_nonnegative(value).ok_or(Error::Internal {
        quantity,
        value: value.as_f64(),
    })
}

/// Shannon entropy of the table, treated as one flattened variable.
///
/// For multi-variable tables this is the joint entropy.
pub fn shannon_entropy<T: Real>(d: &JointDistribution<T>, base: T) -> Result<EntropyValue<T>> {
    check_base(base)?;
    Ok(EntropyValue {
        value: entropy_of(d.probs(), base),
        base,
    })
}

/// `-Σ p log_base p` over an arbitrary slice, zeros skipped.
pub(crate) fn entropy_of<T: Real>(probs: &[T], base: T) -> T {
    let ln_base = base.ln();
    let nats: T = probs
        .iter()
        .filter(|&&p| p > T::zero())
        .map(|&p| -p * p.ln())
        .sum();
    (nats / ln_base).max(T::zero())
}

/// Entropy of the marginal over `vars`.
pub fn marginal_entropy<T: Real>(
    d: &JointDistribution<T>,
    vars: &[usize],
    base: T,
) -> Result<EntropyValue<T>> {
    shannon_entropy(&d.marginalize(vars)?, base)
}

/// Relative entropy `Σ p log(p/q)`.
pub fn relative_entropy<T: Real>(
    d: &JointDistribution<T>,
    reference: &JointDistribution<T>,
    base: T,
) -> Result<Divergence<T>> {
    check_base(base)?;
    if d.alphabet_sizes() != reference.alphabet_sizes() {
        return Err(Error::ShapeMismatch(format!(
            "{:?} vs {:?}",
            d.alphabet_sizes(),
            reference.alphabet_sizes()
        )));
    }
    let mut nats = T::zero();
    for (&p, &q) in d.probs().iter().zip(reference.probs()) {
        if p > T::zero() {
            if q <= T::zero() {
                return Ok(Divergence::Infinite { base });
            }
            nats = nats + p * (p / q).ln();
        }
    }
    let value = clamp("relative entropy", nats / base.ln())?;
    Ok(Divergence::Finite(EntropyValue { value, base }))
}

fn distinct_pair(d_vars: usize, x: usize, y: usize) -> Result<(usize, usize)> {
    for index in [x, y] {
        if index >= d_vars {
            return Err(Error::IndexOutOfRange {
                index,
                num_vars: d_vars,
            });
        }
    }
    if x == y {
        return Err(Error::SameVariable(x));
    }
    Ok((x.min(y), x.max(y)))
}

/// Mutual entropy `H(X:Y) = H(X) + H(Y) - H(X,Y)`; other variables are summed out.
///
/// The two indices are sorted before evaluation, so the result is bitwise
/// symmetric in its arguments.
pub fn mutual_entropy<T: Real>(
    d: &JointDistribution<T>,
    var_x: usize,
    var_y: usize,
    base: T,
) -> Result<EntropyValue<T>> {
    check_base(base)?;
    let (lo, hi) = distinct_pair(d.num_vars(), var_x, var_y)?;
    let pair = d.marginalize(&[lo, hi])?;
    let h_lo = entropy_of(pair.marginalize(&[0])?.probs(), base);
    let h_hi = entropy_of(pair.marginalize(&[1])?.probs(), base);
    let h_joint = entropy_of(pair.probs(), base);
    Ok(EntropyValue {
        value: clamp("mutual entropy", h_lo + h_hi - h_joint)?,
        base,
    })
}

/// `H(target | given) = H(target, given) - H(given)`.
pub fn conditional_entropy<T: Real>(
    d: &JointDistribution<T>,
    target: usize,
    given: usize,
    base: T,
) -> Result<EntropyValue<T>> {
    check_base(base)?;
    distinct_pair(d.num_vars(), target, given)?;
    let h_joint = entropy_of(d.marginalize(&[target, given])?.probs(), base);
    let h_given = entropy_of(d.marginalize(&[given])?.probs(), base);
    Ok(EntropyValue {
        value: clamp("conditional entropy", h_joint - h_given)?,
        base,
    })
}

/// Unitless Boltzmann entropy `log_base Ω`.
pub fn boltzmann_entropy<T: Real>(multiplicity: u128, base: T) -> Result<EntropyValue<T>> {
    check_base(base)?;
    if multiplicity == 0 {
        return Err(Error::ZeroMultiplicity);
    }
    let omega =
        T::from_u128(multiplicity).ok_or_else(|| Error::Overflow(multiplicity.to_string()))?;
    Ok(EntropyValue {
        value: omega.ln() / base.ln(),
        base,
    })
}

/// Free-function form of [`EntropyValue::convert_base`].
pub fn convert_base<T: Real>(e: EntropyValue<T>, new_base: T) -> Result<EntropyValue<T>> {
    e.convert_base(new_base)
}

/// Weighted mixture `Σ w_i d_i` of same-shaped distributions.
pub fn mixture<T: Real>(components: &[(T, &JointDistribution<T>)]) -> Result<JointDistribution<T>> {
    let (_, first) = components
        .first()
        .ok_or_else(|| Error::ShapeMismatch("no mixture components".into()))?;
    let sizes = first.alphabet_sizes().to_vec();
    let mut acc = vec![T::zero(); first.probs().len()];
    let mut wsum = T::zero();
    for &(w, d) in components {
        if d.alphabet_sizes() != sizes.as_slice() {
            return Err(Error::ShapeMismatch(format!(
                "{:?} vs {:?}",
                d.alphabet_sizes(),
                sizes
            )));
        }
        if !(w >= T::zero()) {
            return Err(Error::WeightsNotNormalized(w.as_f64()));
        }
        wsum = wsum + w;
        for (a, &p) in acc.iter_mut().zip(d.probs()) {
            *a = *a + w * p;
        }
    }
    if !((wsum - T::one()).abs() <= T::TOL) {
        return Err(Error::WeightsNotNormalized(wsum.as_f64()));
    }
    JointDistribution::new(sizes, acc)
}

/// Entropy of mixing `H(after) - Σ w_i H(before_i)`.
///
/// `after` must equal the weighted mixture of `before` to within `T::TOL`
/// per entry. The result is nonnegative by concavity of the entropy.
pub fn mixing_entropy<T: Real>(
    before: &[(T, &JointDistribution<T>)],
    after: &JointDistribution<T>,
    base: T,
) -> Result<EntropyValue<T>> {
    check_base(base)?;
    let mixed = mixture(before)?;
    if mixed.alphabet_sizes() != after.alphabet_sizes() {
        return Err(Error::ShapeMismatch(format!(
            "{:?} vs {:?}",
            after.alphabet_sizes(),
            mixed.alphabet_sizes()
        )));
    }
    let diff = mixed.max_abs_diff(after)?;
    if diff > T::TOL {
        return Err(Error::AfterIsNotTheMixture(diff.as_f64()));
    }
    let h_after = entropy_of(after.probs(), base);
    let h_before: T = before
        .iter()
        .map(|&(w, d)| w * entropy_of(d.probs(), base))
        .sum();
    Ok(EntropyValue {
        value: clamp("entropy of mixing", h_after - h_before)?,
        base,
    })
}
