//! Shared fixtures for the criterion benchmarks.

use qcdm_core::scenarios::{bell_state, BellKind};
use qcdm_core::state::density_from_ket;
use qcdm_core::{Complex, ComplexMatrix, DensityMatrix};

/// Deterministic dense Hermitian matrix with entries of order one.
pub fn hermitian_fixture(dim: usize) -> ComplexMatrix {
    let raw = ComplexMatrix::from_fn(dim, |r, c| {
        let x = ((r * 31 + c * 17 + 7) % 23) as f64 / 23.0 - 0.5;
        let y = ((r * 13 + c * 29 + 3) % 19) as f64 / 19.0 - 0.5;
        Complex::new(x, y)
    });
    raw.hermitian_part()
}

/// The two-singlet swap state on dims `[2, 2, 2, 2]`.
pub fn swap_state() -> DensityMatrix {
    let singlet = density_from_ket(&bell_state(BellKind::PsiMinus));
    qcdm_core::composite::tensor_state(&singlet, &singlet)
}
