//! Entropic inequalities on tripartite systems.
//!
//! Every check produces an [`InequalityReport`] written in the form
//! `lhs <= rhs`, so `margin = rhs - lhs` is nonnegative exactly when the
//! inequality holds. Variables 0, 1, 2 are labelled A, B, C; all quantities
//! are in bits.
//!
//! Which checks hold for which inputs:
//!
//! | check | holds for |
//! |-------|-----------|
//! | [`joint_triangle_check`] | every distribution |
//! | [`two_hb_bound_check`] | every distribution |
//! | [`narrowed_bound_check`] | every distribution |
//! | [`cerf_adami_classical`] | every distribution with binary alphabets (unit bound) |
//! | [`triangle_check`] | Markov chains A → B → C |
//! | [`dpi_check`] | Markov chains A → B → C |

use std::collections::BTreeMap;

use serde::Serialize;

use crate::entropy::{entropy_of, mutual_entropy, EntropyValue};
use crate::error::{Error, Result};
use crate::markov::conditional_mutual_information;
use crate::prob::JointDistribution;
use crate::scalar::{clamp_nonnegative, Real};

const LABELS: [&str; 3] = ["A", "B", "C"];

/// Where the three mutual informations of a Cerf-Adami check came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MutualInfoSource {
    /// All three pairs are marginals of one joint distribution.
    SingleDistribution,
    /// Each pair was measured in its own experiment; no joint exists.
    PairwiseExperiments,
}

/// Right-hand side used by the Cerf-Adami evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoundMode {
    /// The bound 1, valid when the marginals are uniform bits.
    #[default]
    Unit,
    /// `max(H(A), H(B), H(C))`, for non-uniform marginals.
    MaxMarginal,
}

/// Evaluated inequality `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport<T> {
    name: String,
    lhs: T,
    rhs: T,
    terms: BTreeMap<String, T>,
    satisfied: bool,
    margin: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    source: Option<MutualInfoSource>,
    #[serde(skip_serializing_if = "Option::is_none")]
    normalized: Option<bool>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
}

impl<T: Real> InequalityReport<T> {
    pub fn new(name: impl Into<String>, lhs: T, rhs: T, terms: BTreeMap<String, T>) -> Self {
        Self {
            name: name.into(),
            lhs,
            rhs,
            terms,
            satisfied: lhs <= rhs + T::TOL,
            margin: rhs - lhs,
            source: None,
            normalized: None,
            warnings: Vec::new(),
        }
    }

    /// Re-evaluates `satisfied` against a different absolute tolerance.
    pub fn reassess(mut self, tolerance: T) -> Self {
        self.satisfied = self.lhs <= self.rhs + tolerance;
        self
    }

    pub fn with_warning(mut self, warning: impl Into<String>) -> Self {
        self.warnings.push(warning.into());
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn lhs(&self) -> T {
        self.lhs
    }
    pub fn rhs(&self) -> T {
        self.rhs
    }
    pub fn terms(&self) -> &BTreeMap<String, T> {
        &self.terms
    }
    pub fn term(&self, key: &str) -> Option<T> {
        self.terms.get(key).copied()
    }
    pub fn satisfied(&self) -> bool {
        self.satisfied
    }
    pub fn margin(&self) -> T {
        self.margin
    }
    pub fn source(&self) -> Option<MutualInfoSource> {
        self.source
    }
    pub fn normalized(&self) -> Option<bool> {
        self.normalized
    }
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }
}

/// Pairwise and single entropies of a tripartite distribution, in bits.
#[derive(Debug, Clone, Copy)]
struct Tripartite<T> {
    single: [T; 3],
    /// Joint entropies indexed by the excluded variable: `[H(B,C), H(A,C), H(A,B)]`.
    joint: [T; 3],
    /// Mutual entropies indexed the same way: `[H(B:C), H(A:C), H(A:B)]`.
    mutual: [T; 3],
}

impl<T: Real> Tripartite<T> {
    fn of(d: &JointDistribution<T>) -> Result<Self> {
        if d.num_vars() != 3 {
            return Err(Error::WrongArity(d.num_vars()));
        }
        let two = T::two();
        let mut single = [T::zero(); 3];
        for (k, s) in single.iter_mut().enumerate() {
            *s = entropy_of(d.marginalize(&[k])?.probs(), two);
        }
        let mut joint = [T::zero(); 3];
        let mut mutual = [T::zero(); 3];
        for excluded in 0..3 {
            let (i, j) = pair_without(excluded);
            joint[excluded] = entropy_of(d.marginalize(&[i, j])?.probs(), two);
            mutual[excluded] = mutual_entropy(d, i, j, two)?.value;
        }
        Ok(Self {
            single,
            joint,
            mutual,
        })
    }

    fn h(&self, k: usize) -> T {
        self.single[k]
    }

    fn hj(&self, i: usize, j: usize) -> T {
        self.joint[3 - i - j]
    }

    fn mi(&self, i: usize, j: usize) -> T {
        self.mutual[3 - i - j]
    }
}

fn pair_without(excluded: usize) -> (usize, usize) {
    match excluded {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

fn h_label(k: usize) -> String {
    format!("H({})", LABELS[k])
}

fn joint_label(i: usize, j: usize) -> String {
    format!("H({},{})", LABELS[i], LABELS[j])
}

fn mi_label(i: usize, j: usize) -> String {
    format!("H({}:{})", LABELS[i], LABELS[j])
}

fn terms<T: Real>(entries: impl IntoIterator<Item = (String, T)>) -> BTreeMap<String, T> {
    entries.into_iter().collect()
}

/// `H(A:C) <= H(A:B) + H(B:C)`.
///
/// Guaranteed only for Markov chains A → B → C. Non-Markov inputs are still
/// evaluated; the conditional mutual information `I(A;C|B)` is recorded and a
/// warning attached when it is nonzero.
pub fn triangle_check<T: Real>(d: &JointDistribution<T>) -> Result<InequalityReport<T>> {
    let t = Tripartite::of(d)?;
    let cmi = conditional_mutual_information(d, 0, 2, 1)?.value;
    let report = InequalityReport::new(
        "triangle",
        t.mi(0, 2),
        t.mi(0, 1) + t.mi(1, 2),
        terms([
            (mi_label(0, 1), t.mi(0, 1)),
            (mi_label(1, 2), t.mi(1, 2)),
            (mi_label(0, 2), t.mi(0, 2)),
            ("I(A;C|B)".to_string(), cmi),
        ]),
    );
    Ok(if cmi > T::TOL {
        report.with_warning(
            "input is not a Markov chain A -> B -> C; the triangle bound is not guaranteed",
        )
    } else {
        report
    })
}

/// `H(A,C) <= H(A,B) + H(B,C)`, valid for every distribution.
pub fn joint_triangle_check<T: Real>(d: &JointDistribution<T>) -> Result<InequalityReport<T>> {
    let t = Tripartite::of(d)?;
    Ok(InequalityReport::new(
        "joint_triangle",
        t.hj(0, 2),
        t.hj(0, 1) + t.hj(1, 2),
        terms([
            (joint_label(0, 1), t.hj(0, 1)),
            (joint_label(1, 2), t.hj(1, 2)),
            (joint_label(0, 2), t.hj(0, 2)),
            (h_label(1), t.h(1)),
        ]),
    ))
}

fn chain_terms<T: Real>(t: &Tripartite<T>) -> BTreeMap<String, T> {
    terms([
        (mi_label(0, 1), t.mi(0, 1)),
        (mi_label(1, 2), t.mi(1, 2)),
        (mi_label(0, 2), t.mi(0, 2)),
        (h_label(1), t.h(1)),
    ])
}

/// `H(A:B) + H(B:C) - H(A:C) <= 2 H(B)`, from the joint triangle by substitution.
pub fn two_hb_bound_check<T: Real>(d: &JointDistribution<T>) -> Result<InequalityReport<T>> {
    let t = Tripartite::of(d)?;
    Ok(InequalityReport::new(
        "two_hb_bound",
        t.mi(0, 1) + t.mi(1, 2) - t.mi(0, 2),
        T::two() * t.h(1),
        chain_terms(&t),
    ))
}

/// `H(A:B) + H(B:C) - H(A:C) <= H(B)`.
pub fn narrowed_bound_check<T: Real>(d: &JointDistribution<T>) -> Result<InequalityReport<T>> {
    let t = Tripartite::of(d)?;
    Ok(InequalityReport::new(
        "narrowed_bound",
        t.mi(0, 1) + t.mi(1, 2) - t.mi(0, 2),
        t.h(1),
        chain_terms(&t),
    ))
}

fn checked_mi<T: Real>(e: EntropyValue<T>) -> Result<T> {
    let bits = e.in_bits();
    clamp_nonnegative(bits).ok_or(Error::NegativeMutualInformation(bits.as_f64()))
}

fn cerf_adami_report<T: Real>(
    name: &str,
    pivot: (String, T),
    other: (String, T),
    shared: (String, T),
    bound: T,
    source: MutualInfoSource,
) -> InequalityReport<T> {
    let lhs = (pivot.1 - other.1).abs() + shared.1;
    let mut report = InequalityReport::new(name, lhs, bound, terms([pivot, other, shared]));
    report.source = Some(source);
    report
}

/// `|H(A:B) - H(A:C)| + H(B:C) <= bound`.
///
/// Inputs are converted to bits. Values slightly below zero (within `T::TOL`)
/// are clamped; anything more negative is rejected.
pub fn cerf_adami_check<T: Real>(
    hab: EntropyValue<T>,
    hac: EntropyValue<T>,
    hbc: EntropyValue<T>,
    bound: T,
    source: MutualInfoSource,
) -> Result<InequalityReport<T>> {
    let (ab, ac, bc) = (checked_mi(hab)?, checked_mi(hac)?, checked_mi(hbc)?);
    Ok(cerf_adami_report(
        "cerf_adami",
        (mi_label(0, 1), ab),
        (mi_label(0, 2), ac),
        (mi_label(1, 2), bc),
        bound,
        source,
    ))
}

fn classical_bound<T: Real>(t: &Tripartite<T>, mode: BoundMode) -> T {
    match mode {
        BoundMode::Unit => T::one(),
        BoundMode::MaxMarginal => t.single.iter().copied().fold(T::zero(), T::max),
    }
}

fn finish_classical<T: Real>(
    mut report: InequalityReport<T>,
    t: &Tripartite<T>,
    mode: BoundMode,
) -> InequalityReport<T> {
    report.normalized = Some(mode == BoundMode::MaxMarginal);
    if mode == BoundMode::Unit && t.single.iter().any(|&h| h > T::one() + T::TOL) {
        report = report
            .with_warning("a marginal entropy exceeds 1 bit; the unit bound is not guaranteed");
    }
    report
}

/// Cerf-Adami check in the form `|H(A:B) - H(A:C)| + H(B:C) <= bound` for one
/// tripartite distribution.
pub fn cerf_adami_classical<T: Real>(
    d: &JointDistribution<T>,
    mode: BoundMode,
) -> Result<InequalityReport<T>> {
    let t = Tripartite::of(d)?;
    let report = cerf_adami_report(
        "cerf_adami",
        (mi_label(0, 1), t.mi(0, 1)),
        (mi_label(0, 2), t.mi(0, 2)),
        (mi_label(1, 2), t.mi(1, 2)),
        classical_bound(&t, mode),
        MutualInfoSource::SingleDistribution,
    );
    Ok(finish_classical(report, &t, mode))
}

/// All three letter permutations `|H(k:i) - H(k:j)| + H(i:j) <= bound`, one per
/// choice of the pair `(i, j)` that appears outside the absolute value.
///
/// Reports are returned for the pairs (B,C), (A,C), (A,B) in that order.
pub fn cerf_adami_all_forms<T: Real>(
    d: &JointDistribution<T>,
    mode: BoundMode,
) -> Result<Vec<InequalityReport<T>>> {
    let t = Tripartite::of(d)?;
    let bound = classical_bound(&t, mode);
    Ok((0..3)
        .map(|k| {
            let (i, j) = pair_without(k);
            let (ki, kj) = ((k.min(i), k.max(i)), (k.min(j), k.max(j)));
            let report = cerf_adami_report(
                &format!("cerf_adami[{}:{}]", LABELS[i], LABELS[j]),
                (mi_label(ki.0, ki.1), t.mi(k, i)),
                (mi_label(kj.0, kj.1), t.mi(k, j)),
                (mi_label(i, j), t.mi(i, j)),
                bound,
                MutualInfoSource::SingleDistribution,
            );
            finish_classical(report, &t, mode)
        })
        .collect())
}

/// Data processing inequality along A → B → C and C → B → A:
/// `H(A:B) <= H(A)`, `H(A:C) <= H(A:B)`, `H(C:B) <= H(C)`, `H(C:A) <= H(C:B)`.
///
/// The links are only guaranteed when `markov_certified`; uncertified inputs
/// are evaluated and flagged.
pub fn dpi_check<T: Real>(
    d: &JointDistribution<T>,
    markov_certified: bool,
) -> Result<Vec<InequalityReport<T>>> {
    let t = Tripartite::of(d)?;
    let mut reports = Vec::with_capacity(4);
    for (start, end) in [(0usize, 2usize), (2, 0)] {
        let (s, m, e) = (LABELS[start], LABELS[1], LABELS[end]);
        let h_start = t.h(start);
        let near = t.mi(start, 1);
        let far = t.mi(start, end);
        let near_label = format!("H({s}:{m})");
        let far_label = format!("H({s}:{e})");
        reports.push(InequalityReport::new(
            format!("dpi[{near_label}<=H({s})]"),
            near,
            h_start,
            terms([(format!("H({s})"), h_start), (near_label.clone(), near)]),
        ));
        reports.push(InequalityReport::new(
            format!("dpi[{far_label}<={near_label}]"),
            far,
            near,
            terms([(near_label, near), (far_label, far)]),
        ));
    }
    if !markov_certified {
        reports = reports
            .into_iter()
            .map(|r| r.with_warning("Markov property not certified; the data processing inequality is not guaranteed"))
            .collect();
    }
    Ok(reports)
}
