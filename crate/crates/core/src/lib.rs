//! Entropic inequalities for small classical and quantum systems.
//!
//! The toolkit covers Shannon, relative, mutual and conditional entropies on
//! finite joint distributions; the chain of tripartite inequalities that ends
//! in the Cerf-Adami bound `|H(A:B) − H(A:C)| + H(B:C) ≤ 1`; von Neumann
//! entropies of two-qubit states; and a search over measurement angles for
//! quantum statistics that exceed the classical bound.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`). The aliases
//! at the crate root fix the scalar to `f64`, which is what the tolerances
//! (`1e-9` absolute) are calibrated for.
//!
//! ```
//! use entrobound_core::{inequalities, JointDistribution};
//!
//! // A = B = C, a uniform bit
//! let d = JointDistribution::new(vec![2, 2, 2], vec![0.5, 0., 0., 0., 0., 0., 0., 0.5]).unwrap();
//! let r = inequalities::narrowed_bound_check(&d).unwrap();
//! assert!(r.satisfied());
//! ```

#![forbid(unsafe_code)]
// `!(x >= 0)` is the NaN-rejecting form used throughout validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entropy;
pub mod error;
pub mod inequalities;
pub mod linalg;
pub mod markov;
pub mod prob;
pub mod quantum;
pub mod sampling;
pub mod scalar;
pub mod statmech;
pub mod viosearch;

pub use error::{Error, Result};
pub use inequalities::{BoundMode, MutualInfoSource};
pub use quantum::Subsystem;
pub use scalar::Real;
pub use statmech::{MacrostateSpec, MatchMode};

pub type JointDistribution = prob::JointDistribution<f64>;
pub type EntropyValue = entropy::EntropyValue<f64>;
pub type Divergence = entropy::Divergence<f64>;
pub type InequalityReport = inequalities::InequalityReport<f64>;
pub type MarkovChainSpec = markov::MarkovChainSpec<f64>;
pub type DensityMatrix = quantum::DensityMatrix<f64>;
pub type MeasurementSettings = quantum::MeasurementSettings<f64>;
pub type SearchResult = viosearch::SearchResult<f64>;
pub type WernerThreshold = viosearch::WernerThreshold<f64>;

pub type JointDistributionF32 = prob::JointDistribution<f32>;
pub type DensityMatrixF32 = quantum::DensityMatrix<f32>;
pub type InequalityReportF32 = inequalities::InequalityReport<f32>;
