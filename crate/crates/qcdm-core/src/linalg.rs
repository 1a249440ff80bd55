//! Dense complex linear algebra: matrix arithmetic, Kronecker products,
//! traces, adjoints, and a cyclic-Jacobi Hermitian eigensolver.
//!
//! Conventions fixed here and used by every module above:
//!
//! - matrices are square, stored row-major;
//! - `kron(a, b)` places the first factor's index most significant, so the
//!   composite row index is `m = r * b.dim() + u`;
//! - the Frobenius norm is the metric behind every tolerance check.

use thiserror::Error;

/// Complex scalar carried by every matrix element.
pub type Complex = num_complex::Complex64;

/// Relative tolerance for accepting a matrix as Hermitian.
pub const HERMITICITY_TOL: f64 = 1e-9;

/// The eigensolver stops once the off-diagonal Frobenius norm falls below
/// `JACOBI_OFF_THRESHOLD * ||A||_F`.
pub const JACOBI_OFF_THRESHOLD: f64 = 1e-13;

/// Maximum number of cyclic Jacobi sweeps before giving up.
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// `value > bound`, with NaN counting as exceeding. Every validity gate in
/// the crate goes through this or [`falls_below`] so that a NaN residual can
/// never pass a check.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub(crate) fn exceeds(value: f64, bound: f64) -> bool {
    !(value <= bound)
}

/// `value < bound`, with NaN counting as below; used for probability floors.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub(crate) fn falls_below(value: f64, bound: f64) -> bool {
    !(value >= bound)
}

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("entry count {got} does not match dim {dim} (expected {expected})")]
    EntryCount { dim: usize, expected: usize, got: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian: asymmetry residual {residual} exceeds tolerance {tol}")]
    NotHermitian { residual: f64, tol: f64 },
    #[error(
        "eigensolver failed to converge after {sweeps} sweeps \
         (off-diagonal norm {off_diagonal})"
    )]
    NoConvergence { sweeps: usize, off_diagonal: f64 },
}

/// Dense square matrix of complex scalars, row-major.
///
/// Immutable after construction; every entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex>,
}

impl ComplexMatrix {
    /// Build a matrix from row-major entries, rejecting wrong lengths and
    /// non-finite components.
    pub fn new(dim: usize, entries: Vec<Complex>) -> Result<Self, LinalgError> {
        if entries.len() != dim * dim {
            return Err(LinalgError::EntryCount {
                dim,
                expected: dim * dim,
                got: entries.len(),
            });
        }
        for (i, z) in entries.iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(LinalgError::NonFinite {
                    row: i / dim,
                    col: i % dim,
                });
            }
        }
        Ok(Self { dim, entries })
    }

    /// Build a matrix by evaluating `f(row, col)`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        Self { dim, entries }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| {
            if r == c {
                Complex::new(1.0, 0.0)
            } else {
                Complex::new(0.0, 0.0)
            }
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.entries[row * self.dim + col]
    }

    #[inline]
    fn set(&mut self, row: usize, col: usize, value: Complex) {
        self.entries[row * self.dim + col] = value;
    }

    /// Standard matrix product.
    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let d = self.dim;
        let mut out = ComplexMatrix::zeros(d);
        for r in 0..d {
            for k in 0..d {
                let a = self.get(r, k);
                if a == Complex::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..d {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self { dim: self.dim, entries })
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self { dim: self.dim, entries })
    }

    pub fn scale(&self, factor: Complex) -> ComplexMatrix {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * factor).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Kronecker product; block `(r, s)` of the result is `self[r][s] * other`.
    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (da, db) = (self.dim, other.dim);
        ComplexMatrix::from_fn(da * db, |m, n| {
            let (r, u) = (m / db, m % db);
            let (s, v) = (n / db, n % db);
            self.get(r, s) * other.get(u, v)
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `sqrt(sum |a_ij - b_ij|^2)`; symmetric, zero iff equal.
    pub fn frobenius_distance(&self, other: &ComplexMatrix) -> Result<f64, LinalgError> {
        if self.dim != other.dim {
            return Err(LinalgError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        let sum: f64 = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok(sum.sqrt())
    }

    /// `||A - A^dagger||_F`, the asymmetry residual used by Hermiticity checks.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut sum = 0.0;
        for r in 0..self.dim {
            for c in 0..self.dim {
                sum += (self.get(r, c) - self.get(c, r).conj()).norm_sqr();
            }
        }
        sum.sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_residual() <= tol
    }

    /// Hermitian part `(A + A^dagger) / 2`.
    pub fn hermitian_part(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, |r, c| {
            (self.get(r, c) + self.get(c, r).conj()) * 0.5
        })
    }

    /// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
    ///
    /// Eigenvalues come back ascending, paired with orthonormal eigenvector
    /// columns. Eigenvalues closer than any tolerance are still reported
    /// separately; grouping into degenerate clusters happens downstream.
    pub fn hermitian_eigendecompose(&self) -> Result<EigenDecomposition, LinalgError> {
        let norm = self.frobenius_norm();
        let tol = HERMITICITY_TOL * norm.max(1.0);
        let residual = self.hermiticity_residual();
        if exceeds(residual, tol) {
            return Err(LinalgError::NotHermitian { residual, tol });
        }
        // Rounding asymmetry within tolerance is averaged away so the
        // rotations see an exactly Hermitian matrix.
        let mut a = self.hermitian_part();
        let d = self.dim;
        let mut v = ComplexMatrix::identity(d);
        let target = JACOBI_OFF_THRESHOLD * norm;

        let mut off = off_diagonal_norm(&a);
        let mut sweeps = 0;
        while off > target {
            if sweeps == JACOBI_MAX_SWEEPS {
                return Err(LinalgError::NoConvergence {
                    sweeps,
                    off_diagonal: off,
                });
            }
            for p in 0..d {
                for q in (p + 1)..d {
                    jacobi_rotate(&mut a, &mut v, p, q);
                }
            }
            sweeps += 1;
            off = off_diagonal_norm(&a);
        }

        // Sort ascending by eigenvalue, carrying eigenvector columns along.
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&i, &j| a.get(i, i).re.total_cmp(&a.get(j, j).re));
        let values: Vec<f64> = order.iter().map(|&i| a.get(i, i).re).collect();
        let vectors = ComplexMatrix::from_fn(d, |r, c| v.get(r, order[c]));

        Ok(EigenDecomposition { values, vectors })
    }
}

/// Result of [`ComplexMatrix::hermitian_eigendecompose`]: ascending real
/// eigenvalues, column `k` of `vectors` paired with `values[k]`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl EigenDecomposition {
    /// Eigenvector column `k`.
    pub fn vector(&self, k: usize) -> Vec<Complex> {
        (0..self.vectors.dim()).map(|r| self.vectors.get(r, k)).collect()
    }

    /// `V diag(values) V^dagger`, for residual checks.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.vectors.dim();
        ComplexMatrix::from_fn(d, |r, c| {
            (0..d)
                .map(|k| self.vectors.get(r, k) * self.values[k] * self.vectors.get(c, k).conj())
                .sum()
        })
    }
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let d = a.dim();
    let mut sum = 0.0;
    for r in 0..d {
        for c in 0..d {
            if r != c {
                sum += a.get(r, c).norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One complex Jacobi rotation zeroing the `(p, q)` entry of the Hermitian
/// matrix `a`, accumulating the rotation into `v`.
///
/// With `g = a[p][q] = |g| e^{i theta}`, the unitary differs from identity
/// only in rows/columns `p, q`:
///
/// ```text
/// R[p][p] = c        R[p][q] = s e^{i theta}
/// R[q][p] = -s e^{-i theta}   R[q][q] = c
/// ```
///
/// and `c, s` solve the same secular equation as in the real symmetric case
/// with `|g|` in place of the off-diagonal element.
fn jacobi_rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let g = a.get(p, q);
    let abs_g = g.norm();
    if abs_g == 0.0 {
        return;
    }
    let phase = g / abs_g;
    let alpha = a.get(p, p).re;
    let beta = a.get(q, q).re;

    // Smaller root of t^2 - 2*zeta*t - 1 = 0 keeps the rotation angle <= 45 deg.
    let zeta = (alpha - beta) / (2.0 * abs_g);
    let t = if zeta >= 0.0 {
        -1.0 / (zeta + (zeta * zeta + 1.0).sqrt())
    } else {
        1.0 / (-zeta + (zeta * zeta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let d = a.dim();
    // A <- A R
    for k in 0..d {
        let akp = a.get(k, p);
        let akq = a.get(k, q);
        a.set(k, p, akp * c - akq * s * phase.conj());
        a.set(k, q, akp * s * phase + akq * c);
    }
    // A <- R^dagger A
    for j in 0..d {
        let apj = a.get(p, j);
        let aqj = a.get(q, j);
        a.set(p, j, apj * c - aqj * s * phase);
        a.set(q, j, apj * s * phase.conj() + aqj * c);
    }
    // The rotation annihilates (p, q) and keeps the diagonal real; pin both
    // against rounding residue.
    let new_pp = a.get(p, p).re;
    let new_qq = a.get(q, q).re;
    a.set(p, p, Complex::new(new_pp, 0.0));
    a.set(q, q, Complex::new(new_qq, 0.0));
    a.set(p, q, Complex::new(0.0, 0.0));
    a.set(q, p, Complex::new(0.0, 0.0));

    // V <- V R
    for k in 0..d {
        let vkp = v.get(k, p);
        let vkq = v.get(k, q);
        v.set(k, p, vkp * c - vkq * s * phase.conj());
        v.set(k, q, vkp * s * phase + vkq * c);
    }
}
