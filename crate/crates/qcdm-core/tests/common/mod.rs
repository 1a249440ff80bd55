//! Seeded random fixtures shared by the integration suites.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use qcdm_core::{Complex, ComplexMatrix, DensityMatrix};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut StdRng) -> Complex {
    Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, |_, _| random_complex(rng))
}

pub fn random_hermitian(rng: &mut StdRng, dim: usize) -> ComplexMatrix {
    random_matrix(rng, dim).hermitian_part()
}

/// Full-rank random state: `G G^dagger / Tr(G G^dagger)` is Hermitian,
/// positive, and unit-trace by construction.
pub fn random_density(rng: &mut StdRng, dims: &[usize]) -> DensityMatrix {
    let dim = dims.iter().product();
    let g = random_matrix(rng, dim);
    let w = g.matmul(&g.adjoint()).expect("square product");
    let trace = w.trace().re;
    let mat = w.scale(Complex::new(1.0 / trace, 0.0));
    DensityMatrix::validate(mat, dims.to_vec(), 1e-9).expect("Wishart state is valid")
}
