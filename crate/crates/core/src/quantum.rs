//! Bipartite density matrices, von Neumann entropies and planar spin measurements.
//!
//! Measurements are projective spin measurements along `n(θ) = (sin θ, 0, cos θ)`:
//! `Π±(θ) = (I ± n(θ)·σ) / 2`. Outcome index 0 is `+`, index 1 is `−`.
//!
//! Density-matrix file format:
//!
//! ```json
//! {"dims": [2, 2], "re": [[...], ...], "im": [[...], ...]}
//! ```

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::entropy::{mutual_entropy, EntropyValue};
use crate::error::{Error, Result};
use crate::inequalities::{cerf_adami_check, InequalityReport, MutualInfoSource};
use crate::linalg::CMatrix;
use crate::prob::JointDistribution;
use crate::scalar::Real;

/// Marginals of measured pairs must sit this close to uniform for the unit
/// Cerf-Adami bound to apply.
pub const UNIFORM_MARGINAL_TOL: f64 = 1e-6;

/// Which factor of a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Hermitian, unit-trace, positive semidefinite operator on `C^dim_a ⊗ C^dim_b`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    dim_a: usize,
    dim_b: usize,
    matrix: CMatrix<T>,
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity, each to `T::TOL`.
    pub fn new(dim_a: usize, dim_b: usize, matrix: CMatrix<T>) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 || matrix.dim() != dim_a * dim_b {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for dims ({dim_a}, {dim_b})",
                matrix.dim(),
                matrix.dim()
            )));
        }
        let defect = matrix.hermiticity_defect();
        if !(defect <= T::TOL) {
            return Err(Error::NotHermitian(defect.as_f64()));
        }
        let tr = matrix.trace();
        if !((tr.re - T::one()).abs() <= T::TOL && tr.im.abs() <= T::TOL) {
            return Err(Error::InvalidTrace(tr.re.as_f64()));
        }
        let min = matrix.hermitian_eigenvalues()[0];
        if min < -T::TOL {
            return Err(Error::NotPositiveSemidefinite(min.as_f64()));
        }
        Ok(Self {
            dim_a,
            dim_b,
            matrix,
        })
    }

    /// `|ψ><ψ|` for an amplitude vector, normalized first.
    pub fn from_pure(dim_a: usize, dim_b: usize, amplitudes: &[Complex<T>]) -> Result<Self> {
        if amplitudes.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for dims ({dim_a}, {dim_b})",
                amplitudes.len()
            )));
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if !(norm > T::zero()) {
            return Err(Error::InvalidTrace(0.0));
        }
        let psi: Vec<Complex<T>> = amplitudes.iter().map(|z| z / norm).collect();
        Self::new(dim_a, dim_b, CMatrix::outer(&psi))
    }

    fn real_pure(amps: [f64; 4]) -> Self {
        let amps: Vec<Complex<T>> = amps
            .iter()
            .map(|&a| Complex::new(T::lit(a), T::zero()))
            .collect();
        Self::from_pure(2, 2, &amps).expect("fixed two-qubit state is valid")
    }

    /// `(|01> - |10>) / √2`.
    pub fn singlet() -> Self {
        Self::real_pure([0.0, 1.0, -1.0, 0.0])
    }

    /// `(|00> + |11>) / √2`.
    pub fn bell_phi_plus() -> Self {
        Self::real_pure([1.0, 0.0, 0.0, 1.0])
    }

    /// `(|00> - |11>) / √2`.
    pub fn bell_phi_minus() -> Self {
        Self::real_pure([1.0, 0.0, 0.0, -1.0])
    }

    /// `(|01> + |10>) / √2`.
    pub fn bell_psi_plus() -> Self {
        Self::real_pure([0.0, 1.0, 1.0, 0.0])
    }

    /// Same state as [`DensityMatrix::singlet`].
    pub fn bell_psi_minus() -> Self {
        Self::singlet()
    }

    /// `I / (dim_a dim_b)`.
    pub fn maximally_mixed(dim_a: usize, dim_b: usize) -> Result<Self> {
        let n = dim_a * dim_b;
        let p = T::one() / T::from_usize(n.max(1)).unwrap_or_else(T::one);
        Self::new(dim_a, dim_b, CMatrix::identity(n).scale(p))
    }

    /// `p · singlet + (1 − p) · I/4` for `p ∈ [0, 1]`.
    pub fn werner(p: T) -> Result<Self> {
        if !(p >= T::zero() && p <= T::one()) {
            return Err(Error::InvalidArgument(format!(
                "Werner parameter {p} outside [0, 1]"
            )));
        }
        let mixed = CMatrix::identity(4).scale((T::one() - p) / T::lit(4.0));
        Self::new(2, 2, Self::singlet().matrix.scale(p).add(&mixed))
    }

    /// Diagonal (classical) state with the given populations.
    pub fn diagonal(dim_a: usize, dim_b: usize, populations: &[T]) -> Result<Self> {
        if populations.len() != dim_a * dim_b {
            return Err(Error::DimensionMismatch(format!(
                "{} populations for dims ({dim_a}, {dim_b})",
                populations.len()
            )));
        }
        Self::new(dim_a, dim_b, CMatrix::from_real_diagonal(populations))
    }

    /// `a ⊗ b`; each factor's own dimension becomes one side of the result.
    pub fn product(a: &Self, b: &Self) -> Result<Self> {
        Self::new(a.dim(), b.dim(), a.matrix.kron(&b.matrix))
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.dim_a, self.dim_b)
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.dim_a * self.dim_b
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn purity(&self) -> T {
        self.matrix.data().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.matrix.hermitian_eigenvalues()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DensityMatrixFile =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::try_from(file)
    }

    pub fn to_file(&self) -> DensityMatrixFile {
        let n = self.dim();
        let part = |f: fn(&Complex<T>) -> T| -> Vec<Vec<f64>> {
            (0..n)
                .map(|i| (0..n).map(|j| f(&self.matrix[(i, j)]).as_f64()).collect())
                .collect()
        };
        DensityMatrixFile {
            dims: [self.dim_a, self.dim_b],
            re: part(|z| z.re),
            im: part(|z| z.im),
        }
    }
}

/// On-disk JSON form of a density matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityMatrixFile {
    pub dims: [usize; 2],
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl<T: Real> TryFrom<DensityMatrixFile> for DensityMatrix<T> {
    type Error = Error;

    fn try_from(file: DensityMatrixFile) -> Result<Self> {
        let n = file.dims[0] * file.dims[1];
        let square = |m: &[Vec<f64>]| m.len() == n && m.iter().all(|r| r.len() == n);
        if !square(&file.re) || !square(&file.im) {
            return Err(Error::DimensionMismatch(format!(
                "re/im must both be {n}x{n} for dims {:?}",
                file.dims
            )));
        }
        let conv = |x: f64| T::from_f64(x).ok_or_else(|| Error::Parse(format!("bad number {x}")));
        let mut data = Vec::with_capacity(n * n);
        for (row_re, row_im) in file.re.iter().zip(&file.im) {
            for (&re, &im) in row_re.iter().zip(row_im) {
                data.push(Complex::new(conv(re)?, conv(im)?));
            }
        }
        Self::new(file.dims[0], file.dims[1], CMatrix::from_vec(n, data))
    }
}

/// Reduced state of the kept factor, returned with dims `(d_keep, 1)`.
pub fn partial_trace<T: Real>(rho: &DensityMatrix<T>, keep: Subsystem) -> Result<DensityMatrix<T>> {
    let (da, db) = rho.dims();
    let m = rho.matrix();
    let zero = Complex::new(T::zero(), T::zero());
    let reduced = match keep {
        Subsystem::A => {
            let mut r = CMatrix::zeros(da);
            for i in 0..da {
                for k in 0..da {
                    r[(i, k)] = (0..db)
                        .map(|j| m[(i * db + j, k * db + j)])
                        .fold(zero, |a, b| a + b);
                }
            }
            r
        }
        Subsystem::B => {
            let mut r = CMatrix::zeros(db);
            for j in 0..db {
                for l in 0..db {
                    r[(j, l)] = (0..da)
                        .map(|i| m[(i * db + j, i * db + l)])
                        .fold(zero, |a, b| a + b);
                }
            }
            r
        }
    };
    let d = reduced.dim();
    DensityMatrix::new(d, 1, reduced)
}

/// Entropy of a spectrum, clamping eigenvalues in `[-T::TOL, 0)` to zero.
fn spectral_entropy<T: Real>(eigenvalues: &[T], base: T) -> Result<T> {
    let mut nats = T::zero();
    for &l in eigenvalues {
        if l < -T::TOL {
            return Err(Error::NotPositiveSemidefinite(l.as_f64()));
        }
        if l > T::zero() {
            nats = nats - l * l.ln();
        }
    }
    Ok((nats / base.ln()).max(T::zero()))
}

/// `S(ρ) = −tr(ρ log ρ)`.
pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>, base: T) -> Result<EntropyValue<T>> {
    let base_checked = EntropyValue::new(T::zero(), base)?.base;
    Ok(EntropyValue {
        value: spectral_entropy(&rho.eigenvalues(), base_checked)?,
        base: base_checked,
    })
}

/// `S(target | given) = S(A,B) − S(given)`, which may be negative.
pub fn conditional_quantum_entropy<T: Real>(
    rho: &DensityMatrix<T>,
    target: Subsystem,
    given: Subsystem,
    base: T,
) -> Result<EntropyValue<T>> {
    if target == given {
        return Err(Error::InvalidSubsystem);
    }
    let joint = von_neumann_entropy(rho, base)?;
    let marginal = von_neumann_entropy(&partial_trace(rho, given)?, base)?;
    Ok(EntropyValue {
        value: joint.value - marginal.value,
        base: joint.base,
    })
}

/// A pure bipartite state is entangled iff `S(B|A) < 0`. Mixed states are refused.
pub fn is_entangled_pure<T: Real>(rho: &DensityMatrix<T>) -> Result<bool> {
    let purity = rho.purity();
    if purity < T::one() - T::TOL {
        return Err(Error::NotPure(purity.as_f64()));
    }
    let s = conditional_quantum_entropy(rho, Subsystem::B, Subsystem::A, T::two())?;
    Ok(s.value < -T::TOL)
}

/// `Π±(θ)` as a 2×2 matrix; `sign` is `+1` or `−1`.
pub fn spin_projector<T: Real>(theta: T, sign: T) -> CMatrix<T> {
    let half = T::lit(0.5);
    let (s, c) = theta.sin_cos();
    let re = |x: T| Complex::new(x, T::zero());
    CMatrix::from_vec(
        2,
        vec![
            re(half * (T::one() + sign * c)),
            re(half * sign * s),
            re(half * sign * s),
            re(half * (T::one() - sign * c)),
        ],
    )
}

/// Joint outcome distribution of spin measurements at `angle_1` on A and `angle_2` on B.
pub fn measure_pair<T: Real>(
    rho: &DensityMatrix<T>,
    angle_1: T,
    angle_2: T,
) -> Result<JointDistribution<T>> {
    if rho.dims() != (2, 2) {
        return Err(Error::DimensionMismatch(format!(
            "measure_pair needs a two-qubit state, got dims {:?}",
            rho.dims()
        )));
    }
    let signs = [T::one(), -T::one()];
    let mut probs = Vec::with_capacity(4);
    for &sa in &signs {
        let pa = spin_projector(angle_1, sa);
        for &sb in &signs {
            let op = pa.kron(&spin_projector(angle_2, sb));
            let p = rho.matrix().trace_product(&op).re;
            probs.push(if p < T::zero() && p >= -T::TOL {
                T::zero()
            } else {
                p
            });
        }
    }
    JointDistribution::new(vec![2, 2], probs)
}

/// Three measurement angles for A, B and C, canonicalized to `[0, π)`.
///
/// `Π±(θ + π) = Π∓(θ)`, so shifting an angle by π only relabels outcomes and
/// leaves every mutual information unchanged.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasurementSettings<T> {
    angles: [T; 3],
}

impl<T: Real> MeasurementSettings<T> {
    pub fn new(angles: [T; 3]) -> Result<Self> {
        let mut out = angles;
        for a in &mut out {
            if !a.is_finite() {
                return Err(Error::InvalidAngle(a.as_f64()));
            }
            *a = canonical_angle(*a);
        }
        Ok(Self { angles: out })
    }

    pub fn angles(&self) -> [T; 3] {
        self.angles
    }
}

pub(crate) fn canonical_angle<T: Real>(a: T) -> T {
    let pi = T::PI();
    let r = a - pi * (a / pi).floor();
    if r >= pi || r < T::zero() {
        T::zero()
    } else {
        r
    }
}

fn marginals_uniform<T: Real>(d: &JointDistribution<T>) -> Result<bool> {
    let tol = T::lit(UNIFORM_MARGINAL_TOL);
    let half = T::lit(0.5);
    for k in 0..2 {
        if d.marginalize(&[k])?
            .probs()
            .iter()
            .any(|&p| (p - half).abs() > tol)
        {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Cerf-Adami check with unit bound on three pairwise experiments:
/// `H(A:B)` at `(θ_A, θ_B)`, `H(A:C)` at `(θ_A, θ_C)`, `H(B:C)` at `(θ_B, θ_C)`.
pub fn cerf_adami_quantum<T: Real>(
    rho: &DensityMatrix<T>,
    settings: &MeasurementSettings<T>,
) -> Result<InequalityReport<T>> {
    let [ta, tb, tc] = settings.angles();
    let two = T::two();
    let mut uniform = true;
    let mut mi = |x: T, y: T| -> Result<EntropyValue<T>> {
        let d = measure_pair(rho, x, y)?;
        uniform &= marginals_uniform(&d)?;
        mutual_entropy(&d, 0, 1, two)
    };
    let hab = mi(ta, tb)?;
    let hac = mi(ta, tc)?;
    let hbc = mi(tb, tc)?;
    let report = cerf_adami_check(
        hab,
        hac,
        hbc,
        T::one(),
        MutualInfoSource::PairwiseExperiments,
    )?;
    Ok(if uniform {
        report
    } else {
        report.with_warning("measured marginals are not uniform; the unit bound is not guaranteed")
    })
}

/// Left-hand side `|H(A:B) − H(A:C)| + H(B:C)` only, for search loops.
pub(crate) fn cerf_adami_lhs<T: Real>(rho: &DensityMatrix<T>, angles: [T; 3]) -> Result<T> {
    let two = T::two();
    let mi = |x: T, y: T| -> Result<T> {
        Ok(mutual_entropy(&measure_pair(rho, x, y)?, 0, 1, two)?.value)
    };
    let hab = mi(angles[0], angles[1])?;
    let hac = mi(angles[0], angles[2])?;
    let hbc = mi(angles[1], angles[2])?;
    Ok((hab - hac).abs() + hbc)
}
