//! Dense square complex matrices and a Hermitian eigenvalue solver, sized for
//! the handful-of-qubits case.

use num_complex::Complex;

use crate::scalar::Real;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    n: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::new(T::zero(), T::zero()); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    /// Panics unless `data.len() == n * n`.
    pub fn from_vec(n: usize, data: Vec<Complex<T>>) -> Self {
        assert_eq!(data.len(), n * n, "matrix data length");
        Self { n, data }
    }

    pub fn from_real_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Complex::new(d, T::zero());
        }
        m
    }

    /// `|v><v|`.
    pub fn outer(v: &[Complex<T>]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.n)
            .map(|i| self[(i, i)])
            .fold(Complex::new(T::zero(), T::zero()), |a, b| a + b)
    }

    pub fn kron(&self, other: &Self) -> Self {
        let n = self.n * other.n;
        let mut m = Self::zeros(n);
        for i in 0..self.n {
            for j in 0..self.n {
                let a = self[(i, j)];
                for k in 0..other.n {
                    for l in 0..other.n {
                        m[(i * other.n + k, j * other.n + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        m
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "matmul dimension");
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                for j in 0..n {
                    m[(i, j)] = m[(i, j)] + a * other[(k, j)];
                }
            }
        }
        m
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "add dimension");
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    /// `tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Complex<T> {
        let n = self.n;
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            for j in 0..n {
                acc = acc + self[(i, j)] * other[(j, i)];
            }
        }
        acc
    }

    /// Largest `|m_ij - conj(m_ji)|`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.n {
            for j in i..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Only the Hermitian part of `self` is used.
    pub fn hermitian_eigenvalues(&self) -> Vec<T> {
        let n = self.n;
        // Real symmetric embedding [[X, -Y], [Y, X]] of X + iY; every
        // eigenvalue of the Hermitian matrix appears twice in it.
        let m = 2 * n;
        let mut a = vec![T::zero(); m * m];
        let half = T::lit(0.5);
        for i in 0..n {
            for j in 0..n {
                let z = (self[(i, j)] + self[(j, i)].conj()) * half;
                a[i * m + j] = z.re;
                a[(i + n) * m + (j + n)] = z.re;
                a[i * m + (j + n)] = -z.im;
                a[(i + n) * m + j] = z.im;
            }
        }
        let mut evs = symmetric_eigenvalues(&mut a, m);
        evs.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
        evs.into_iter().step_by(2).collect()
    }
}

impl<T> std::ops::Index<(usize, usize)> for CMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.n + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.n + j]
    }
}

/// Cyclic Jacobi on a real symmetric row-major `m × m` matrix, destroying it.
fn symmetric_eigenvalues<T: Real>(a: &mut [T], m: usize) -> Vec<T> {
    const MAX_SWEEPS: usize = 100;
    let frob: T = a.iter().map(|&x| x * x).sum::<T>().sqrt();
    let threshold = T::epsilon() * frob.max(T::min_positive_value());
    for _ in 0..MAX_SWEEPS {
        let off: T = (0..m)
            .flat_map(|p| ((p + 1)..m).map(move |q| (p, q)))
            .map(|(p, q)| a[p * m + q] * a[p * m + q])
            .sum::<T>()
            .sqrt();
        if off <= threshold {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = a[p * m + q];
                if apq == T::zero() {
                    continue;
                }
                let theta = (a[q * m + q] - a[p * m + p]) / (T::two() * apq);
                let sign = if theta >= T::zero() {
                    T::one()
                } else {
                    -T::one()
                };
                let t = sign / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..m {
                    let akp = a[k * m + p];
                    let akq = a[k * m + q];
                    a[k * m + p] = c * akp - s * akq;
                    a[k * m + q] = s * akp + c * akq;
                }
                for k in 0..m {
                    let apk = a[p * m + k];
                    let aqk = a[q * m + k];
                    a[p * m + k] = c * apk - s * aqk;
                    a[q * m + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..m).map(|i| a[i * m + i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn diagonal_eigenvalues() {
        let m = CMatrix::<f64>::from_real_diagonal(&[0.3, 0.1, 0.6]);
        let ev = m.hermitian_eigenvalues();
        for (x, y) in ev.iter().zip([0.1, 0.3, 0.6]) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn pauli_y_eigenvalues() {
        let m = CMatrix::from_vec(2, vec![c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        let ev = m.hermitian_eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn complex_2x2_matches_closed_form() {
        // [[a, b], [b*, d]] has eigenvalues (a+d)/2 ± sqrt(((a-d)/2)^2 + |b|^2).
        let (a, d, b) = (0.7, -0.2, c(0.3, -0.4));
        let m = CMatrix::from_vec(2, vec![c(a, 0.0), b, b.conj(), c(d, 0.0)]);
        let ev = m.hermitian_eigenvalues();
        let mid = (a + d) / 2.0;
        let r = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
        assert!((ev[0] - (mid - r)).abs() < 1e-14);
        assert!((ev[1] - (mid + r)).abs() < 1e-14);
    }

    #[test]
    fn eigenvalues_sum_to_trace_and_square_sum_to_frobenius() {
        let v = [c(0.1, 0.2), c(-0.3, 0.5), c(0.7, -0.1), c(0.2, 0.2)];
        let w = [c(0.4, -0.1), c(0.0, 0.3), c(-0.2, 0.6), c(0.5, 0.0)];
        let m = CMatrix::outer(&v)
            .scale(0.6)
            .add(&CMatrix::outer(&w).scale(0.4));
        let ev = m.hermitian_eigenvalues();
        let tr: f64 = ev.iter().sum();
        let sq: f64 = ev.iter().map(|x| x * x).sum();
        assert!((tr - m.trace().re).abs() < 1e-13);
        assert!((sq - m.trace_product(&m).re).abs() < 1e-13);
        // rank two
        assert!(ev[0].abs() < 1e-13 && ev[1].abs() < 1e-13);
    }

    #[test]
    fn kron_and_trace() {
        let a = CMatrix::<f64>::from_real_diagonal(&[0.25, 0.75]);
        let b = CMatrix::from_real_diagonal(&[0.5, 0.5]);
        let k = a.kron(&b);
        assert_eq!(k.dim(), 4);
        assert!((k.trace().re - 1.0).abs() < 1e-15);
        assert_eq!(k[(2, 2)].re, 0.375);
        assert_eq!(a.matmul(&CMatrix::identity(2)), a);
    }
}
