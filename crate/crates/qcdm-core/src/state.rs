//! Quantum states and observables: density-matrix validation, expectation,
//! dispersion, spectral decomposition, purity, and the probability rule.
//!
//! A density matrix must satisfy three conditions — Hermiticity, unit trace,
//! and positive semidefiniteness — and [`DensityMatrix::validate`] reports
//! every violated condition with its measured residual, not just the first.

use thiserror::Error;

use crate::linalg::{exceeds, falls_below, Complex, ComplexMatrix, LinalgError};
use crate::DEFAULT_TOL;

#[derive(Debug, Error)]
pub enum StateError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid density matrix: {0}")]
    InvalidState(#[from] ValidationReport),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("ket is not normalized: norm = {norm}")]
    NotNormalized { norm: f64 },
    #[error("amplitude count {amplitudes} does not match factor dims product {dims_product}")]
    KetShape { amplitudes: usize, dims_product: usize },
    #[error("observable is not Hermitian: residual {residual} exceeds tolerance {tol}")]
    NotHermitian { residual: f64, tol: f64 },
    #[error("trace has non-real residue {imaginary} beyond tolerance {tol}")]
    NonRealTrace { imaginary: f64, tol: f64 },
    #[error("incomplete family: projector sum deviates from identity by {residual} (tol {tol})")]
    IncompleteFamily { residual: f64, tol: f64 },
    #[error("spectral form is ill-formed: {0}")]
    BadSpectralForm(String),
}

/// One violated density-matrix condition together with its measured residual.
#[derive(Debug, Clone, PartialEq)]
pub enum ConditionViolation {
    /// `product(dims)` does not equal the matrix dimension, or a factor is zero.
    Shape { matrix_dim: usize, dims_product: usize },
    NotHermitian { residual: f64, tol: f64 },
    TraceNotOne { trace: Complex, residual: f64, tol: f64 },
    NegativeEigenvalue { min_eigenvalue: f64, tol: f64 },
}

impl std::fmt::Display for ConditionViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConditionViolation::Shape { matrix_dim, dims_product } => write!(
                f,
                "shape: matrix dim {matrix_dim} does not match factor dims product {dims_product}"
            ),
            ConditionViolation::NotHermitian { residual, tol } => {
                write!(f, "hermiticity: residual {residual} exceeds tol {tol}")
            }
            ConditionViolation::TraceNotOne { trace, residual, tol } => write!(
                f,
                "unit trace: trace = {trace}, residual {residual} exceeds tol {tol}"
            ),
            ConditionViolation::NegativeEigenvalue { min_eigenvalue, tol } => write!(
                f,
                "positivity: min eigenvalue {min_eigenvalue} below -{tol}"
            ),
        }
    }
}

/// Every condition a candidate state violated, in a fixed order.
#[derive(Debug, Clone, PartialEq, Error)]
pub struct ValidationReport {
    pub violations: Vec<ConditionViolation>,
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for v in &self.violations {
            if !first {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// Validated quantum state: Hermitian, unit-trace, positive semidefinite,
/// with its tensor-factor structure in `dims`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validate a candidate matrix against all three density-matrix
    /// conditions plus the factor-shape constraint, reporting every
    /// violation at once.
    pub fn validate(
        mat: ComplexMatrix,
        dims: Vec<usize>,
        tol: f64,
    ) -> Result<Self, StateError> {
        let mut violations = Vec::new();

        let dims_product: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || dims_product != mat.dim() {
            violations.push(ConditionViolation::Shape {
                matrix_dim: mat.dim(),
                dims_product,
            });
        }

        let herm_residual = mat.hermiticity_residual();
        if exceeds(herm_residual, tol) {
            violations.push(ConditionViolation::NotHermitian {
                residual: herm_residual,
                tol,
            });
        }

        let trace = mat.trace();
        let trace_residual = (trace - Complex::new(1.0, 0.0)).norm();
        if exceeds(trace_residual, tol) {
            violations.push(ConditionViolation::TraceNotOne {
                trace,
                residual: trace_residual,
                tol,
            });
        }

        // Positivity is checked on the Hermitian part so the eigensolver can
        // run even when the hermiticity condition itself failed.
        let eig = mat.hermitian_part().hermitian_eigendecompose()?;
        let min_eigenvalue = eig.values.first().copied().unwrap_or(0.0);
        if falls_below(min_eigenvalue, -tol) {
            violations.push(ConditionViolation::NegativeEigenvalue { min_eigenvalue, tol });
        }

        if violations.is_empty() {
            Ok(Self { mat, dims })
        } else {
            Err(StateError::InvalidState(ValidationReport { violations }))
        }
    }

    /// [`DensityMatrix::validate`] at the default tolerance.
    pub fn new(mat: ComplexMatrix, dims: Vec<usize>) -> Result<Self, StateError> {
        Self::validate(mat, dims, DEFAULT_TOL)
    }

    /// Constructor for internal paths whose outputs are states by
    /// construction (outer products, tensor products, partial traces).
    pub(crate) fn from_parts_unchecked(mat: ComplexMatrix, dims: Vec<usize>) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), mat.dim());
        Self { mat, dims }
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    /// Tensor-factor dimensions; their product equals `mat().dim()`.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }
}

/// Normalized pure state vector with its tensor-factor structure.
#[derive(Debug, Clone, PartialEq)]
pub struct PureKet {
    amplitudes: Vec<Complex>,
    dims: Vec<usize>,
}

impl PureKet {
    pub fn new(amplitudes: Vec<Complex>, dims: Vec<usize>, tol: f64) -> Result<Self, StateError> {
        let dims_product: usize = dims.iter().product();
        if dims.is_empty() || dims.contains(&0) || dims_product != amplitudes.len() {
            return Err(StateError::KetShape {
                amplitudes: amplitudes.len(),
                dims_product,
            });
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if exceeds((norm - 1.0).abs(), tol) {
            return Err(StateError::NotNormalized { norm });
        }
        Ok(Self { amplitudes, dims })
    }

    pub fn amplitudes(&self) -> &[Complex] {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }
}

/// Hermitian operator representing a physical variable.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    mat: ComplexMatrix,
}

impl Observable {
    pub fn new(mat: ComplexMatrix, tol: f64) -> Result<Self, StateError> {
        let residual = mat.hermiticity_residual();
        if exceeds(residual, tol) {
            return Err(StateError::NotHermitian { residual, tol });
        }
        Ok(Self { mat })
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }
}

/// Spectral form of an observable: distinct eigenvalues paired with the
/// orthogonal projectors onto their eigenspaces.
///
/// Projectors are Hermitian, idempotent, mutually orthogonal, and sum to
/// the identity; those invariants are checked at construction.
#[derive(Debug, Clone)]
pub struct SpectralForm {
    eigenvalues: Vec<f64>,
    projectors: Vec<ComplexMatrix>,
}

impl SpectralForm {
    pub fn new(
        eigenvalues: Vec<f64>,
        projectors: Vec<ComplexMatrix>,
        tol: f64,
    ) -> Result<Self, StateError> {
        if eigenvalues.len() != projectors.len() || projectors.is_empty() {
            return Err(StateError::BadSpectralForm(format!(
                "{} eigenvalues vs {} projectors",
                eigenvalues.len(),
                projectors.len()
            )));
        }
        let dim = projectors[0].dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for (i, p) in projectors.iter().enumerate() {
            if p.dim() != dim {
                return Err(StateError::DimensionMismatch { left: dim, right: p.dim() });
            }
            let herm = p.hermiticity_residual();
            if exceeds(herm, tol) {
                return Err(StateError::BadSpectralForm(format!(
                    "projector {i} not Hermitian: residual {herm}"
                )));
            }
            let idem = p.matmul(p)?.frobenius_distance(p)?;
            if exceeds(idem, tol) {
                return Err(StateError::BadSpectralForm(format!(
                    "projector {i} not idempotent: residual {idem}"
                )));
            }
            for (j, q) in projectors.iter().enumerate().skip(i + 1) {
                let cross = p.matmul(q)?.frobenius_norm();
                if exceeds(cross, tol) {
                    return Err(StateError::BadSpectralForm(format!(
                        "projectors {i} and {j} not orthogonal: residual {cross}"
                    )));
                }
            }
            sum = sum.add(p)?;
        }
        let completeness = sum.frobenius_distance(&ComplexMatrix::identity(dim))?;
        if exceeds(completeness, tol) {
            return Err(StateError::IncompleteFamily { residual: completeness, tol });
        }
        Ok(Self { eigenvalues, projectors })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn projectors(&self) -> &[ComplexMatrix] {
        &self.projectors
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }
}

/// Rank-1 state `|psi><psi|` from a normalized ket.
pub fn density_from_ket(psi: &PureKet) -> DensityMatrix {
    let amps = psi.amplitudes();
    let mat = ComplexMatrix::from_fn(psi.dim(), |r, c| amps[r] * amps[c].conj());
    DensityMatrix::from_parts_unchecked(mat, psi.dims().to_vec())
}

/// `Tr(a * b)` without forming the product matrix.
fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> Complex {
    let d = a.dim();
    let mut sum = Complex::new(0.0, 0.0);
    for r in 0..d {
        for k in 0..d {
            sum += a.get(r, k) * b.get(k, r);
        }
    }
    sum
}

/// Average value `Tr(F rho)`; the imaginary residue must stay within `tol`.
pub fn expectation(f: &Observable, rho: &DensityMatrix, tol: f64) -> Result<f64, StateError> {
    if f.dim() != rho.dim() {
        return Err(StateError::DimensionMismatch { left: f.dim(), right: rho.dim() });
    }
    let t = trace_product(f.mat(), rho.mat());
    if exceeds(t.im.abs(), tol) {
        return Err(StateError::NonRealTrace { imaginary: t.im, tol });
    }
    Ok(t.re)
}

/// Dispersion `Tr(Q^2 rho)` with `Q = F - <F> I`; nonnegative, with
/// floating-point dips inside `[-tol, 0)` clamped to zero.
pub fn dispersion(f: &Observable, rho: &DensityMatrix, tol: f64) -> Result<f64, StateError> {
    let mean = expectation(f, rho, tol)?;
    let q = f.mat().sub(&ComplexMatrix::identity(f.dim()).scale(Complex::new(mean, 0.0)))?;
    let q2 = q.matmul(&q)?;
    let t = trace_product(&q2, rho.mat());
    if exceeds(t.im.abs(), tol) {
        return Err(StateError::NonRealTrace { imaginary: t.im, tol });
    }
    let d = t.re;
    if d < 0.0 && d >= -tol {
        Ok(0.0)
    } else {
        Ok(d)
    }
}

/// Spectral decomposition `F = sum_n f_n P_n` with eigenvalues clustered by
/// single linkage: an ascending gap of at most `cluster_tol` merges.
pub fn spectral_decompose(f: &Observable, cluster_tol: f64) -> Result<SpectralForm, StateError> {
    let eig = f.mat().hermitian_eigendecompose()?;
    let d = f.dim();

    let mut eigenvalues = Vec::new();
    let mut projectors = Vec::new();
    let mut start = 0;
    while start < d {
        let mut end = start + 1;
        while end < d && eig.values[end] - eig.values[end - 1] <= cluster_tol {
            end += 1;
        }
        let cluster = &eig.values[start..end];
        eigenvalues.push(cluster.iter().sum::<f64>() / cluster.len() as f64);
        // Projector onto the cluster eigenspace: sum of |v_k><v_k|.
        let projector = ComplexMatrix::from_fn(d, |r, c| {
            (start..end)
                .map(|k| eig.vectors.get(r, k) * eig.vectors.get(c, k).conj())
                .sum()
        });
        projectors.push(projector);
        start = end;
    }
    SpectralForm::new(eigenvalues, projectors, DEFAULT_TOL)
}

/// Purity verdict: `residual = ||rho^2 - rho||_F` and whether it is within
/// tolerance of the pure-state condition `rho^2 = rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Purity {
    pub is_pure: bool,
    pub residual: f64,
}

pub fn purity(rho: &DensityMatrix, tol: f64) -> Purity {
    let m = rho.mat();
    let residual = m
        .matmul(m)
        .and_then(|sq| sq.frobenius_distance(m))
        .expect("square state times itself is well-formed");
    Purity { is_pure: residual <= tol, residual }
}

/// Outcome probabilities `p_n = Tr(rho P_n)` for a complete projector family,
/// clamped to `[0, 1]`.
pub fn probability_rule(
    rho: &DensityMatrix,
    family: &SpectralForm,
    tol: f64,
) -> Result<Vec<f64>, StateError> {
    if family.dim() != rho.dim() {
        return Err(StateError::DimensionMismatch { left: family.dim(), right: rho.dim() });
    }
    let mut sum = ComplexMatrix::zeros(family.dim());
    for p in family.projectors() {
        sum = sum.add(p)?;
    }
    let completeness = sum.frobenius_distance(&ComplexMatrix::identity(family.dim()))?;
    if exceeds(completeness, tol) {
        return Err(StateError::IncompleteFamily { residual: completeness, tol });
    }
    let mut probs = Vec::with_capacity(family.len());
    for p in family.projectors() {
        let t = trace_product(rho.mat(), p);
        if exceeds(t.im.abs(), tol) {
            return Err(StateError::NonRealTrace { imaginary: t.im, tol });
        }
        probs.push(t.re.clamp(0.0, 1.0));
    }
    Ok(probs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn real_matrix(dim: usize, vals: &[f64]) -> ComplexMatrix {
        ComplexMatrix::new(dim, vals.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    fn sigma_z() -> Observable {
        Observable::new(real_matrix(2, &[1.0, 0.0, 0.0, -1.0]), DEFAULT_TOL).unwrap()
    }

    fn ket(amps: &[f64], dims: &[usize]) -> PureKet {
        PureKet::new(
            amps.iter().map(|&x| c(x, 0.0)).collect(),
            dims.to_vec(),
            DEFAULT_TOL,
        )
        .unwrap()
    }

    fn maximally_mixed_qubit() -> DensityMatrix {
        DensityMatrix::new(real_matrix(2, &[0.5, 0.0, 0.0, 0.5]), vec![2]).unwrap()
    }

    fn singlet() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        density_from_ket(&ket(&[0.0, s, -s, 0.0], &[2, 2]))
    }

    #[test]
    fn density_from_ket_basis_state() {
        let rho = density_from_ket(&ket(&[1.0, 0.0], &[2]));
        assert_eq!(rho.mat(), &real_matrix(2, &[1.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn density_from_ket_plus_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rho = density_from_ket(&ket(&[s, s], &[2]));
        for r in 0..2 {
            for col in 0..2 {
                assert!((rho.mat().get(r, col) - c(0.5, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn density_from_ket_singlet() {
        let rho = singlet();
        let expect = |r: usize, col: usize| -> f64 {
            match (r, col) {
                (1, 1) | (2, 2) => 0.5,
                (1, 2) | (2, 1) => -0.5,
                _ => 0.0,
            }
        };
        for r in 0..4 {
            for col in 0..4 {
                assert!((rho.mat().get(r, col) - c(expect(r, col), 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn ket_rejects_unnormalized() {
        let err = PureKet::new(vec![c(1.0, 0.0), c(1.0, 0.0)], vec![2], DEFAULT_TOL);
        assert!(matches!(err, Err(StateError::NotNormalized { .. })));
        // NaN amplitudes must not slip through the norm comparison.
        let err = PureKet::new(vec![c(f64::NAN, 0.0), c(0.0, 0.0)], vec![2], DEFAULT_TOL);
        assert!(matches!(err, Err(StateError::NotNormalized { .. })));
    }

    #[test]
    fn validate_rejects_nan_matrices() {
        let mat = ComplexMatrix::from_fn(2, |r, c_| {
            if r == c_ {
                c(f64::NAN, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        assert!(DensityMatrix::new(mat, vec![2]).is_err());
    }

    #[test]
    fn validate_accepts_maximally_mixed() {
        assert!(DensityMatrix::validate(real_matrix(2, &[0.5, 0.0, 0.0, 0.5]), vec![2], 1e-9).is_ok());
    }

    #[test]
    fn validate_reports_trace_deficit() {
        let err = DensityMatrix::new(real_matrix(2, &[0.7, 0.0, 0.0, 0.4]), vec![2]);
        match err {
            Err(StateError::InvalidState(report)) => {
                assert_eq!(report.violations.len(), 1);
                match &report.violations[0] {
                    ConditionViolation::TraceNotOne { trace, .. } => {
                        assert!((trace.re - 1.1).abs() < 1e-12);
                    }
                    other => panic!("unexpected violation {other:?}"),
                }
            }
            other => panic!("expected invalid state, got {other:?}"),
        }
    }

    #[test]
    fn validate_reports_negative_eigenvalue() {
        // Eigenvalues of [[0.5, 0.6], [0.6, 0.5]] are 0.5 +- 0.6.
        let err = DensityMatrix::new(real_matrix(2, &[0.5, 0.6, 0.6, 0.5]), vec![2]);
        match err {
            Err(StateError::InvalidState(report)) => {
                assert_eq!(report.violations.len(), 1);
                match &report.violations[0] {
                    ConditionViolation::NegativeEigenvalue { min_eigenvalue, .. } => {
                        assert!((min_eigenvalue + 0.1).abs() < 1e-12);
                    }
                    other => panic!("unexpected violation {other:?}"),
                }
            }
            other => panic!("expected invalid state, got {other:?}"),
        }
    }

    #[test]
    fn validate_reports_multiple_violations() {
        let mat = ComplexMatrix::new(
            2,
            vec![c(0.7, 0.0), c(0.3, 0.1), c(0.3, 0.3), c(0.6, 0.0)],
        )
        .unwrap();
        let err = DensityMatrix::new(mat, vec![3]);
        match err {
            Err(StateError::InvalidState(report)) => {
                assert!(report.violations.len() >= 3, "got {:?}", report.violations);
            }
            other => panic!("expected invalid state, got {other:?}"),
        }
    }

    #[test]
    fn expectation_examples() {
        let identity = Observable::new(ComplexMatrix::identity(2), DEFAULT_TOL).unwrap();
        let mixed = maximally_mixed_qubit();
        let ground = density_from_ket(&ket(&[1.0, 0.0], &[2]));
        assert!((expectation(&identity, &mixed, DEFAULT_TOL).unwrap() - 1.0).abs() < 1e-15);
        assert!((expectation(&identity, &ground, DEFAULT_TOL).unwrap() - 1.0).abs() < 1e-15);
        assert!(expectation(&sigma_z(), &mixed, DEFAULT_TOL).unwrap().abs() < 1e-15);
        assert!((expectation(&sigma_z(), &ground, DEFAULT_TOL).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expectation_rejects_dimension_mismatch() {
        let identity4 = Observable::new(ComplexMatrix::identity(4), DEFAULT_TOL).unwrap();
        assert!(matches!(
            expectation(&identity4, &maximally_mixed_qubit(), DEFAULT_TOL),
            Err(StateError::DimensionMismatch { left: 4, right: 2 })
        ));
    }

    #[test]
    fn dispersion_examples() {
        let ground = density_from_ket(&ket(&[1.0, 0.0], &[2]));
        assert!(dispersion(&sigma_z(), &ground, DEFAULT_TOL).unwrap().abs() < 1e-15);
        let mixed = maximally_mixed_qubit();
        assert!((dispersion(&sigma_z(), &mixed, DEFAULT_TOL).unwrap() - 1.0).abs() < 1e-15);
        let identity = Observable::new(ComplexMatrix::identity(2), DEFAULT_TOL).unwrap();
        assert!(dispersion(&identity, &mixed, DEFAULT_TOL).unwrap().abs() < 1e-15);
    }

    #[test]
    fn spectral_decompose_sigma_z() {
        let form = spectral_decompose(&sigma_z(), 1e-9).unwrap();
        assert_eq!(form.eigenvalues(), &[-1.0, 1.0]);
        assert!(form.projectors()[0]
            .frobenius_distance(&real_matrix(2, &[0.0, 0.0, 0.0, 1.0]))
            .unwrap()
            < 1e-12);
        assert!(form.projectors()[1]
            .frobenius_distance(&real_matrix(2, &[1.0, 0.0, 0.0, 0.0]))
            .unwrap()
            < 1e-12);
    }

    #[test]
    fn spectral_decompose_identity_is_fully_degenerate() {
        let identity = Observable::new(ComplexMatrix::identity(2), DEFAULT_TOL).unwrap();
        let form = spectral_decompose(&identity, 1e-9).unwrap();
        assert_eq!(form.len(), 1);
        assert!((form.eigenvalues()[0] - 1.0).abs() < 1e-15);
        assert!(form.projectors()[0]
            .frobenius_distance(&ComplexMatrix::identity(2))
            .unwrap()
            < 1e-12);
    }

    #[test]
    fn spectral_decompose_clusters_near_degenerate_pair() {
        let obs = Observable::new(
            real_matrix(3, &[2.0, 0.0, 0.0, 0.0, 2.0 + 1e-12, 0.0, 0.0, 0.0, 5.0]),
            DEFAULT_TOL,
        )
        .unwrap();
        let form = spectral_decompose(&obs, 1e-9).unwrap();
        assert_eq!(form.len(), 2);
        assert!((form.eigenvalues()[0] - 2.0).abs() < 1e-9);
        assert!((form.eigenvalues()[1] - 5.0).abs() < 1e-9);
        let rank = |p: &ComplexMatrix| p.trace().re.round() as usize;
        assert_eq!(rank(&form.projectors()[0]), 2);
        assert_eq!(rank(&form.projectors()[1]), 1);
    }

    #[test]
    fn purity_examples() {
        let ground = density_from_ket(&ket(&[1.0, 0.0], &[2]));
        let p = purity(&ground, DEFAULT_TOL);
        assert!(p.is_pure);
        assert!(p.residual < 1e-15);

        let mixed = maximally_mixed_qubit();
        let p = purity(&mixed, DEFAULT_TOL);
        assert!(!p.is_pure);
        let expected = 1.0 / (2.0 * 2.0_f64.sqrt());
        assert!((p.residual - expected).abs() < 1e-15);

        assert!(purity(&singlet(), DEFAULT_TOL).is_pure);
    }

    #[test]
    fn probability_rule_examples() {
        let family = spectral_decompose(&sigma_z(), 1e-9).unwrap();
        let mixed = maximally_mixed_qubit();
        let probs = probability_rule(&mixed, &family, DEFAULT_TOL).unwrap();
        assert!((probs[0] - 0.5).abs() < 1e-12 && (probs[1] - 0.5).abs() < 1e-12);

        // sigma_z spectral form lists -1 (projector |1><1|) first.
        let ground = density_from_ket(&ket(&[1.0, 0.0], &[2]));
        let probs = probability_rule(&ground, &family, DEFAULT_TOL).unwrap();
        assert!(probs[0].abs() < 1e-12 && (probs[1] - 1.0).abs() < 1e-12);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = density_from_ket(&ket(&[s, s], &[2]));
        let probs = probability_rule(&plus, &family, DEFAULT_TOL).unwrap();
        assert!((probs[0] - 0.5).abs() < 1e-12 && (probs[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn probability_rule_rejects_incomplete_family() {
        let proj = real_matrix(2, &[1.0, 0.0, 0.0, 0.0]);
        let form = SpectralForm::new(vec![1.0], vec![proj], DEFAULT_TOL);
        assert!(matches!(form, Err(StateError::IncompleteFamily { .. })));
    }
}
