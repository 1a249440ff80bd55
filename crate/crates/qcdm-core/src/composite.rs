//! Composite-system structure: tensor products of states, embedding of
//! subsystem operators into the full space, and the partial trace.
//!
//! All composite indexing follows the global convention from [`crate::linalg`]:
//! factor 0 is most significant, so a full index decomposes as mixed-radix
//! digits over `dims`. The partial trace is computed by direct index
//! arithmetic over those digits, not by reshaping tricks.

use thiserror::Error;

use crate::linalg::{Complex, ComplexMatrix, LinalgError};
use crate::state::DensityMatrix;

#[derive(Debug, Error)]
pub enum CompositeError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("selector indices {indices:?} are not strictly increasing")]
    SelectorNotIncreasing { indices: Vec<usize> },
    #[error("selector index {index} out of range for {factor_count} factors")]
    SelectorOutOfRange { index: usize, factor_count: usize },
    #[error("empty keep-set: tracing out every factor leaves no state")]
    EmptyKeepSet,
    #[error("operator dim {op_dim} does not match selected factors dim {selected_dim}")]
    OperatorDimMismatch { op_dim: usize, selected_dim: usize },
}

/// Ordered choice of tensor factors (0-based, strictly increasing).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsystemSelector {
    indices: Vec<usize>,
}

impl SubsystemSelector {
    pub fn new(indices: Vec<usize>) -> Result<Self, CompositeError> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CompositeError::SelectorNotIncreasing { indices });
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The factors not selected, for a system with `factor_count` factors.
    pub fn complement(&self, factor_count: usize) -> Result<SubsystemSelector, CompositeError> {
        self.check_range(factor_count)?;
        let indices = (0..factor_count)
            .filter(|f| !self.indices.contains(f))
            .collect();
        Ok(Self { indices })
    }

    fn check_range(&self, factor_count: usize) -> Result<(), CompositeError> {
        if let Some(&index) = self.indices.iter().find(|&&i| i >= factor_count) {
            return Err(CompositeError::SelectorOutOfRange { index, factor_count });
        }
        Ok(())
    }

    fn selected_dim(&self, dims: &[usize]) -> usize {
        self.indices.iter().map(|&f| dims[f]).product()
    }
}

/// Full-space offset of every multi-index over `subset`, enumerated in the
/// subset's own row-major order. Offsets of disjoint subsets add up to a
/// complete full-space index.
fn embedding_offsets(dims: &[usize], subset: &[usize]) -> Vec<usize> {
    let factor_count = dims.len();
    let mut stride = vec![1usize; factor_count];
    for f in (0..factor_count.saturating_sub(1)).rev() {
        stride[f] = stride[f + 1] * dims[f + 1];
    }
    let sub_dim: usize = subset.iter().map(|&f| dims[f]).product();
    let mut offsets = Vec::with_capacity(sub_dim);
    for idx in 0..sub_dim {
        let mut rem = idx;
        let mut full = 0usize;
        for (pos, &f) in subset.iter().enumerate() {
            let sub_stride: usize = subset[pos + 1..].iter().map(|&g| dims[g]).product();
            full += (rem / sub_stride) * stride[f];
            rem %= sub_stride;
        }
        offsets.push(full);
    }
    offsets
}

/// Tensor product of two states; factor structure is the concatenation of
/// the operands' factor lists.
pub fn tensor_state(a: &DensityMatrix, b: &DensityMatrix) -> DensityMatrix {
    let mat = a.mat().kron(b.mat());
    let mut dims = a.dims().to_vec();
    dims.extend_from_slice(b.dims());
    DensityMatrix::from_parts_unchecked(mat, dims)
}

/// Extend an operator on the selected factors to the full space, acting as
/// the identity on every unselected factor.
pub fn embed_operator(
    op: &ComplexMatrix,
    on: &SubsystemSelector,
    dims: &[usize],
) -> Result<ComplexMatrix, CompositeError> {
    on.check_range(dims.len())?;
    let selected_dim = on.selected_dim(dims);
    if op.dim() != selected_dim {
        return Err(CompositeError::OperatorDimMismatch {
            op_dim: op.dim(),
            selected_dim,
        });
    }
    let complement = on.complement(dims.len())?;
    let sel_off = embedding_offsets(dims, on.indices());
    let com_off = embedding_offsets(dims, complement.indices());
    let full_dim: usize = dims.iter().product();

    let mut entries = vec![Complex::new(0.0, 0.0); full_dim * full_dim];
    for (a, &off_a) in sel_off.iter().enumerate() {
        for (b, &off_b) in sel_off.iter().enumerate() {
            let v = op.get(a, b);
            if v == Complex::new(0.0, 0.0) {
                continue;
            }
            for &off_t in &com_off {
                entries[(off_a + off_t) * full_dim + (off_b + off_t)] = v;
            }
        }
    }
    Ok(ComplexMatrix::new(full_dim, entries)?)
}

/// Partial trace over the complement of `keep`, on a raw matrix with the
/// given factor structure. `rho_out[a][b] = sum_t rho[(a,t)][(b,t)]`.
pub(crate) fn partial_trace_raw(
    mat: &ComplexMatrix,
    dims: &[usize],
    keep: &SubsystemSelector,
) -> Result<ComplexMatrix, CompositeError> {
    keep.check_range(dims.len())?;
    if keep.is_empty() {
        return Err(CompositeError::EmptyKeepSet);
    }
    let complement = keep.complement(dims.len())?;
    let keep_off = embedding_offsets(dims, keep.indices());
    let traced_off = embedding_offsets(dims, complement.indices());
    Ok(ComplexMatrix::from_fn(keep_off.len(), |a, b| {
        traced_off
            .iter()
            .map(|&t| mat.get(keep_off[a] + t, keep_off[b] + t))
            .sum()
    }))
}

/// Reduced density matrix over the kept factors; trace is preserved.
pub fn partial_trace(
    rho: &DensityMatrix,
    keep: &SubsystemSelector,
) -> Result<DensityMatrix, CompositeError> {
    let reduced = partial_trace_raw(rho.mat(), rho.dims(), keep)?;
    let kept_dims = keep.indices().iter().map(|&f| rho.dims()[f]).collect();
    Ok(DensityMatrix::from_parts_unchecked(reduced, kept_dims))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{density_from_ket, DensityMatrix, PureKet};
    use crate::DEFAULT_TOL;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn real_matrix(dim: usize, vals: &[f64]) -> ComplexMatrix {
        ComplexMatrix::new(dim, vals.iter().map(|&x| c(x, 0.0)).collect()).unwrap()
    }

    fn sigma_z() -> ComplexMatrix {
        real_matrix(2, &[1.0, 0.0, 0.0, -1.0])
    }

    fn mixed_qubit() -> DensityMatrix {
        DensityMatrix::new(real_matrix(2, &[0.5, 0.0, 0.0, 0.5]), vec![2]).unwrap()
    }

    fn basis_state(index: usize) -> DensityMatrix {
        let mut amps = vec![c(0.0, 0.0); 2];
        amps[index] = c(1.0, 0.0);
        density_from_ket(&PureKet::new(amps, vec![2], DEFAULT_TOL).unwrap())
    }

    fn singlet() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let amps = vec![c(0.0, 0.0), c(s, 0.0), c(-s, 0.0), c(0.0, 0.0)];
        density_from_ket(&PureKet::new(amps, vec![2, 2], DEFAULT_TOL).unwrap())
    }

    fn selector(indices: &[usize]) -> SubsystemSelector {
        SubsystemSelector::new(indices.to_vec()).unwrap()
    }

    #[test]
    fn tensor_state_of_mixed_qubits() {
        let product = tensor_state(&mixed_qubit(), &mixed_qubit());
        assert_eq!(product.dims(), &[2, 2]);
        let expected = ComplexMatrix::identity(4).scale(c(0.25, 0.0));
        assert!(product.mat().frobenius_distance(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn tensor_state_of_basis_states() {
        let product = tensor_state(&basis_state(0), &basis_state(1));
        assert_eq!(product.dims(), &[2, 2]);
        let expected = real_matrix(
            4,
            &[
                0.0, 0.0, 0.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.0, //
                0.0, 0.0, 0.0, 0.0,
            ],
        );
        assert_eq!(product.mat(), &expected);
    }

    #[test]
    fn tensor_state_of_two_singlets() {
        let pair = tensor_state(&singlet(), &singlet());
        assert_eq!(pair.dims(), &[2, 2, 2, 2]);
        assert_eq!(pair.dim(), 16);
        assert!((pair.mat().trace() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn embed_single_qubit_operator() {
        let dims = [2, 2];
        let lhs = embed_operator(&sigma_z(), &selector(&[0]), &dims).unwrap();
        assert_eq!(lhs, sigma_z().kron(&ComplexMatrix::identity(2)));
        let rhs = embed_operator(&sigma_z(), &selector(&[1]), &dims).unwrap();
        assert_eq!(rhs, ComplexMatrix::identity(2).kron(&sigma_z()));
    }

    #[test]
    fn embed_middle_pair_matches_index_oracle() {
        // Oracle: explicit digit arithmetic over every 16x16 entry.
        let dims = [2, 2, 2, 2];
        let p = singlet(); // projector |psi-><psi-| as a matrix
        let embedded = embed_operator(p.mat(), &selector(&[1, 2]), &dims).unwrap();
        assert_eq!(embedded.dim(), 16);
        for m in 0..16 {
            for n in 0..16 {
                let (m0, m1, m2, m3) = (m >> 3 & 1, m >> 2 & 1, m >> 1 & 1, m & 1);
                let (n0, n1, n2, n3) = (n >> 3 & 1, n >> 2 & 1, n >> 1 & 1, n & 1);
                let expected = if m0 == n0 && m3 == n3 {
                    p.mat().get(m1 * 2 + m2, n1 * 2 + n2)
                } else {
                    c(0.0, 0.0)
                };
                assert_eq!(embedded.get(m, n), expected, "entry ({m}, {n})");
            }
        }
    }

    #[test]
    fn embed_of_identity_is_identity() {
        let dims = [2, 3, 2];
        let embedded =
            embed_operator(&ComplexMatrix::identity(3), &selector(&[1]), &dims).unwrap();
        assert_eq!(embedded, ComplexMatrix::identity(12));
    }

    #[test]
    fn embed_on_all_factors_returns_the_operator() {
        let op = sigma_z().kron(&real_matrix(2, &[0.0, 1.0, 1.0, 0.0]));
        let embedded = embed_operator(&op, &selector(&[0, 1]), &[2, 2]).unwrap();
        assert_eq!(embedded, op);
    }

    #[test]
    fn embed_rejects_bad_selector_or_dim() {
        let dims = [2, 2];
        assert!(matches!(
            embed_operator(&sigma_z(), &selector(&[2]), &dims),
            Err(CompositeError::SelectorOutOfRange { index: 2, factor_count: 2 })
        ));
        assert!(matches!(
            embed_operator(&sigma_z(), &selector(&[0, 1]), &dims),
            Err(CompositeError::OperatorDimMismatch { op_dim: 2, selected_dim: 4 })
        ));
        assert!(matches!(
            SubsystemSelector::new(vec![1, 0]),
            Err(CompositeError::SelectorNotIncreasing { .. })
        ));
    }

    #[test]
    fn partial_trace_of_product_state_recovers_factors() {
        let a = basis_state(0);
        let b = mixed_qubit();
        let product = tensor_state(&a, &b);
        let left = partial_trace(&product, &selector(&[0])).unwrap();
        assert!(left.mat().frobenius_distance(a.mat()).unwrap() < 1e-15);
        assert_eq!(left.dims(), &[2]);
        let right = partial_trace(&product, &selector(&[1])).unwrap();
        assert!(right.mat().frobenius_distance(b.mat()).unwrap() < 1e-15);
    }

    #[test]
    fn partial_trace_of_singlet_is_maximally_mixed() {
        let reduced = partial_trace(&singlet(), &selector(&[0])).unwrap();
        assert!(reduced
            .mat()
            .frobenius_distance(&real_matrix(2, &[0.5, 0.0, 0.0, 0.5]))
            .unwrap()
            < 1e-15);
    }

    #[test]
    fn partial_trace_of_two_singlets_keeping_outer_pair() {
        let pair = tensor_state(&singlet(), &singlet());
        let outer = partial_trace(&pair, &selector(&[0, 3])).unwrap();
        assert_eq!(outer.dims(), &[2, 2]);
        let expected = ComplexMatrix::identity(4).scale(c(0.25, 0.0));
        assert!(outer.mat().frobenius_distance(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn partial_trace_rejects_empty_keep_and_bad_range() {
        let rho = singlet();
        assert!(matches!(
            partial_trace(&rho, &selector(&[])),
            Err(CompositeError::EmptyKeepSet)
        ));
        assert!(matches!(
            partial_trace(&rho, &selector(&[5])),
            Err(CompositeError::SelectorOutOfRange { index: 5, factor_count: 2 })
        ));
    }

    #[test]
    fn partial_trace_keeping_everything_is_identity_map() {
        let rho = singlet();
        let kept = partial_trace(&rho, &selector(&[0, 1])).unwrap();
        assert_eq!(kept.mat(), rho.mat());
        assert_eq!(kept.dims(), rho.dims());
    }
}
