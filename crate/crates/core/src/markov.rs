//! Markov chains A → B → C built from an initial law and two stochastic matrices.
//!
//! Spec file format:
//!
//! ```json
//! {"initial": [0.5, 0.5], "t1": [[0.9, 0.1], [0.1, 0.9]], "t2": [[0.9, 0.1], [0.1, 0.9]]}
//! ```

use serde::{Deserialize, Serialize};

use crate::entropy::{entropy_of, EntropyValue};
use crate::error::{Error, Result};
use crate::prob::JointDistribution;
use crate::scalar::{clamp_nonnegative, Real};

/// Initial distribution of A plus transition matrices `t1: A → B` and `t2: B → C`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovChainSpec<T> {
    initial: JointDistribution<T>,
    t1: Vec<Vec<T>>,
    t2: Vec<Vec<T>>,
}

fn check_stochastic<T: Real>(name: &str, rows: &[Vec<T>], expected_rows: usize) -> Result<usize> {
    if rows.len() != expected_rows {
        return Err(Error::InvalidSpec(format!(
            "{name} has {} rows, expected {expected_rows}",
            rows.len()
        )));
    }
    let cols = rows.first().map_or(0, Vec::len);
    if cols == 0 {
        return Err(Error::InvalidSpec(format!("{name} has no columns")));
    }
    for (r, row) in rows.iter().enumerate() {
        if row.len() != cols {
            return Err(Error::InvalidSpec(format!("{name} row {r} is ragged")));
        }
        if row.iter().any(|x| !(*x >= T::zero())) {
            return Err(Error::InvalidSpec(format!(
                "{name} row {r} has a negative entry"
            )));
        }
        let sum: T = row.iter().copied().sum();
        if !((sum - T::one()).abs() <= T::TOL) {
            return Err(Error::InvalidSpec(format!("{name} row {r} sums to {sum}")));
        }
    }
    Ok(cols)
}

impl<T: Real> MarkovChainSpec<T> {
    pub fn new(initial: JointDistribution<T>, t1: Vec<Vec<T>>, t2: Vec<Vec<T>>) -> Result<Self> {
        if initial.num_vars() != 1 {
            return Err(Error::InvalidSpec(format!(
                "initial distribution has {} variables",
                initial.num_vars()
            )));
        }
        let size_b = check_stochastic("t1", &t1, initial.alphabet_sizes()[0])?;
        check_stochastic("t2", &t2, size_b)?;
        Ok(Self { initial, t1, t2 })
    }

    /// Uniform source copied through two binary symmetric channels.
    pub fn binary_symmetric(flip_1: T, flip_2: T) -> Result<Self> {
        let half = T::lit(0.5);
        let bsc = |f: T| vec![vec![T::one() - f, f], vec![f, T::one() - f]];
        Self::new(
            JointDistribution::from_probs(vec![half, half])?,
            bsc(flip_1),
            bsc(flip_2),
        )
    }

    pub fn initial(&self) -> &JointDistribution<T> {
        &self.initial
    }
    pub fn t1(&self) -> &[Vec<T>] {
        &self.t1
    }
    pub fn t2(&self) -> &[Vec<T>] {
        &self.t2
    }

    pub fn alphabet_sizes(&self) -> [usize; 3] {
        [self.t1.len(), self.t2.len(), self.t2[0].len()]
    }

    /// Joint `p(a,b,c) = initial(a) t1(a,b) t2(b,c)`.
    pub fn build_tripartite(&self) -> Result<JointDistribution<T>> {
        let [na, nb, nc] = self.alphabet_sizes();
        let mut probs = Vec::with_capacity(na * nb * nc);
        for (a, &pa) in self.initial.probs().iter().enumerate() {
            for b in 0..nb {
                let pab = pa * self.t1[a][b];
                probs.extend(self.t2[b].iter().map(|&t| pab * t));
            }
        }
        JointDistribution::new(vec![na, nb, nc], probs)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MarkovSpecFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::try_from(file)
    }

    pub fn to_file(&self) -> MarkovSpecFile {
        let rows = |m: &[Vec<T>]| {
            m.iter()
                .map(|r| r.iter().map(|x| x.as_f64()).collect())
                .collect()
        };
        MarkovSpecFile {
            initial: self.initial.probs().iter().map(|x| x.as_f64()).collect(),
            t1: rows(&self.t1),
            t2: rows(&self.t2),
        }
    }
}

/// Free-function form of [`MarkovChainSpec::build_tripartite`].
pub fn build_tripartite<T: Real>(spec: &MarkovChainSpec<T>) -> Result<JointDistribution<T>> {
    spec.build_tripartite()
}

/// On-disk JSON form of a chain spec.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MarkovSpecFile {
    pub initial: Vec<f64>,
    pub t1: Vec<Vec<f64>>,
    pub t2: Vec<Vec<f64>>,
}

impl<T: Real> TryFrom<MarkovSpecFile> for MarkovChainSpec<T> {
    type Error = Error;

    fn try_from(file: MarkovSpecFile) -> Result<Self> {
        let conv = |x: f64| T::from_f64(x).ok_or_else(|| Error::Parse(format!("bad number {x}")));
        let rows = |m: Vec<Vec<f64>>| -> Result<Vec<Vec<T>>> {
            m.into_iter()
                .map(|r| r.into_iter().map(conv).collect())
                .collect()
        };
        let initial = file
            .initial
            .into_iter()
            .map(conv)
            .collect::<Result<Vec<T>>>()?;
        let initial = JointDistribution::from_probs(initial)
            .map_err(|e| Error::InvalidSpec(e.to_string()))?;
        Self::new(initial, rows(file.t1)?, rows(file.t2)?)
    }
}

/// `I(X;Y|Z) = H(X,Z) + H(Y,Z) - H(Z) - H(X,Y,Z)` in bits, clamped at zero.
pub fn conditional_mutual_information<T: Real>(
    d: &JointDistribution<T>,
    x: usize,
    y: usize,
    given: usize,
) -> Result<EntropyValue<T>> {
    let num_vars = d.num_vars();
    for index in [x, y, given] {
        if index >= num_vars {
            return Err(Error::IndexOutOfRange { index, num_vars });
        }
    }
    if x == y || x == given || y == given {
        return Err(Error::RepeatedIndex);
    }
    let two = T::two();
    let h = |vars: &[usize]| -> Result<T> { Ok(entropy_of(d.marginalize(vars)?.probs(), two)) };
    let value = h(&[x, given])? + h(&[y, given])? - h(&[given])? - h(&[x, y, given])?;
    let value = clamp_nonnegative(value).ok_or(Error::Internal {
        quantity: "conditional mutual information",
        value: value.as_f64(),
    })?;
    Ok(EntropyValue::bits(value))
}

/// Whether `order[0] → order[1] → order[2]` is Markov, i.e. `I(first; last | middle) <= T::TOL`.
pub fn is_markov<T: Real>(d: &JointDistribution<T>, order: [usize; 3]) -> Result<bool> {
    let mut sorted = order;
    sorted.sort_unstable();
    if sorted != [0, 1, 2] {
        return Err(Error::InvalidPermutation(order));
    }
    if d.num_vars() != 3 {
        return Err(Error::WrongArity(d.num_vars()));
    }
    Ok(conditional_mutual_information(d, order[0], order[2], order[1])?.value <= T::TOL)
}
