//! Conditional density matrices: the state of one subsystem given that a
//! complementary subsystem is selected by a projective or POVM effect.
//!
//! The central operation is [`condition`]: with the effect embedded into the
//! full space, the selection probability is `Tr(E rho)` and the conditional
//! state is the partial trace of `E rho` over the selected factors divided
//! by that probability. [`decompose_reduced`] runs a complete effect family
//! through the same formula, recovering the reduced state as the
//! probability-weighted mixture of the conditional states.

use thiserror::Error;

use crate::composite::{embed_operator, partial_trace_raw, CompositeError, SubsystemSelector};
use crate::linalg::{exceeds, falls_below, Complex, ComplexMatrix, LinalgError};
use crate::state::{expectation, DensityMatrix, Observable, PureKet, StateError};

/// Selection probabilities below this threshold have no conditional state:
/// [`condition`] refuses to divide, [`decompose_reduced`] returns the branch
/// with probability 0 and no state.
pub const P_MIN: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ConditionalError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    State(#[from] StateError),
    #[error(transparent)]
    Composite(#[from] CompositeError),
    #[error(
        "zero-probability selection for effect '{label}': p = {probability} is below {P_MIN}; \
         the conditional state is undefined"
    )]
    ZeroProbability { probability: f64, label: String },
    #[error(
        "selector must pick a nonempty proper subset of factors: selected {selected} of \
         {factor_count}"
    )]
    SelectorNotProper { selected: usize, factor_count: usize },
    #[error("effect is not positive: min eigenvalue {min_eigenvalue} below -{tol}")]
    EffectNotPositive { min_eigenvalue: f64, tol: f64 },
    #[error("effect family does not sum to identity: residual {residual} exceeds tol {tol}")]
    IncompleteFamily { residual: f64, tol: f64 },
    #[error("selection probability has non-real residue {imaginary} beyond tol {tol}")]
    NonRealProbability { imaginary: f64, tol: f64 },
    #[error(
        "conditional state has anti-Hermitian residual {residual} beyond tol {tol} \
         after symmetrization"
    )]
    HermitizationResidual { residual: f64, tol: f64 },
}

/// Positive operator on a subsystem's space; projective effects are the
/// special case of idempotent, mutually orthogonal families.
#[derive(Debug, Clone)]
pub struct Effect {
    mat: ComplexMatrix,
    label: String,
}

impl Effect {
    pub fn new(
        mat: ComplexMatrix,
        label: impl Into<String>,
        tol: f64,
    ) -> Result<Self, ConditionalError> {
        let residual = mat.hermiticity_residual();
        if exceeds(residual, tol) {
            return Err(StateError::NotHermitian { residual, tol }.into());
        }
        let eig = mat.hermitian_eigendecompose()?;
        let min_eigenvalue = eig.values.first().copied().unwrap_or(0.0);
        if falls_below(min_eigenvalue, -tol) {
            return Err(ConditionalError::EffectNotPositive { min_eigenvalue, tol });
        }
        Ok(Self { mat, label: label.into() })
    }

    /// Rank-1 projector `|psi><psi|`, positive by construction.
    pub fn from_ket(psi: &PureKet, label: impl Into<String>) -> Self {
        let amps = psi.amplitudes();
        let mat = ComplexMatrix::from_fn(psi.dim(), |r, c| amps[r] * amps[c].conj());
        Self { mat, label: label.into() }
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }
}

/// Family of effects summing to the identity on the selected subsystem.
#[derive(Debug, Clone)]
pub struct EffectFamily {
    effects: Vec<Effect>,
    subsystem_dim: usize,
}

impl EffectFamily {
    pub fn new(effects: Vec<Effect>, tol: f64) -> Result<Self, ConditionalError> {
        let subsystem_dim = match effects.first() {
            Some(e) => e.dim(),
            None => {
                return Err(ConditionalError::IncompleteFamily { residual: f64::INFINITY, tol })
            }
        };
        let mut sum = ComplexMatrix::zeros(subsystem_dim);
        for e in &effects {
            if e.dim() != subsystem_dim {
                return Err(StateError::DimensionMismatch {
                    left: subsystem_dim,
                    right: e.dim(),
                }
                .into());
            }
            sum = sum.add(e.mat())?;
        }
        let residual = sum.frobenius_distance(&ComplexMatrix::identity(subsystem_dim))?;
        if exceeds(residual, tol) {
            return Err(ConditionalError::IncompleteFamily { residual, tol });
        }
        Ok(Self { effects, subsystem_dim })
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn subsystem_dim(&self) -> usize {
        self.subsystem_dim
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }
}

/// Selection probability and the conditional state of the unselected factors.
#[derive(Debug, Clone)]
pub struct ConditionalOutcome {
    /// `Tr(E rho)`, clamped to `[0, 1]`.
    pub probability: f64,
    /// Conditional state on the complement of the selected factors.
    pub state: DensityMatrix,
    /// Label of the selecting effect.
    pub label: String,
    /// Anti-Hermitian residual removed by symmetrizing `Tr_sel(E rho) / p`;
    /// zero for projective effects up to rounding.
    pub hermitization_residual: f64,
}

/// One branch of a reduced-state decomposition. Zero-probability branches
/// carry no state.
#[derive(Debug, Clone)]
pub struct DecomposedBranch {
    pub probability: f64,
    pub state: Option<DensityMatrix>,
    pub label: String,
}

fn check_proper_subset(
    on: &SubsystemSelector,
    factor_count: usize,
) -> Result<(), ConditionalError> {
    if on.is_empty() || on.len() >= factor_count {
        return Err(ConditionalError::SelectorNotProper {
            selected: on.len(),
            factor_count,
        });
    }
    Ok(())
}

/// Condition `rho` on selecting the factors in `on` with `effect`.
///
/// Returns the selection probability `Tr(E rho)` and the conditional state
/// `Tr_on(E rho) / p`, symmetrized and fully re-validated before return.
pub fn condition(
    rho: &DensityMatrix,
    effect: &Effect,
    on: &SubsystemSelector,
    tol: f64,
) -> Result<ConditionalOutcome, ConditionalError> {
    let factor_count = rho.dims().len();
    check_proper_subset(on, factor_count)?;
    let e_full = embed_operator(effect.mat(), on, rho.dims())?;
    let product = e_full.matmul(rho.mat())?;

    let trace = product.trace();
    if exceeds(trace.im.abs(), tol) {
        return Err(ConditionalError::NonRealProbability { imaginary: trace.im, tol });
    }
    let probability = trace.re;
    if falls_below(probability, P_MIN) {
        return Err(ConditionalError::ZeroProbability {
            probability,
            label: effect.label().to_string(),
        });
    }

    let complement = on.complement(factor_count)?;
    let unnormalized = partial_trace_raw(&product, rho.dims(), &complement)?;
    let normalized = unnormalized.scale(Complex::new(1.0 / probability, 0.0));

    // For non-projective effects E*rho need not be Hermitian; symmetrize and
    // keep the removed residual visible.
    let hermitization_residual = 0.5 * normalized.hermiticity_residual();
    if exceeds(hermitization_residual, tol) {
        return Err(ConditionalError::HermitizationResidual {
            residual: hermitization_residual,
            tol,
        });
    }
    let symmetrized = normalized.hermitian_part();

    let kept_dims: Vec<usize> = complement.indices().iter().map(|&f| rho.dims()[f]).collect();
    let state = DensityMatrix::validate(symmetrized, kept_dims, tol)?;

    Ok(ConditionalOutcome {
        probability: probability.clamp(0.0, 1.0),
        state,
        label: effect.label().to_string(),
        hermitization_residual,
    })
}

/// Decompose the reduced state of the unselected factors over a complete
/// effect family: one branch per effect, in family order.
///
/// The probability-weighted sum of the branch states reconstructs
/// `partial_trace(rho, complement)` — the total-probability formula.
pub fn decompose_reduced(
    rho: &DensityMatrix,
    family: &EffectFamily,
    on: &SubsystemSelector,
    tol: f64,
) -> Result<Vec<DecomposedBranch>, ConditionalError> {
    check_proper_subset(on, rho.dims().len())?;
    let selected_dim: usize = on.indices().iter().map(|&f| rho.dims()[f]).product();
    if family.subsystem_dim() != selected_dim {
        return Err(CompositeError::OperatorDimMismatch {
            op_dim: family.subsystem_dim(),
            selected_dim,
        }
        .into());
    }
    let mut branches = Vec::with_capacity(family.len());
    for effect in family.effects() {
        match condition(rho, effect, on, tol) {
            Ok(outcome) => branches.push(DecomposedBranch {
                probability: outcome.probability,
                state: Some(outcome.state),
                label: outcome.label,
            }),
            Err(ConditionalError::ZeroProbability { label, .. }) => {
                branches.push(DecomposedBranch { probability: 0.0, state: None, label })
            }
            Err(other) => return Err(other),
        }
    }
    Ok(branches)
}

/// Both sides of the order-free selection identity
/// `Tr((A tensor E) rho) = p * Tr(A rho_c)`.
///
/// `a` acts on the complement of `on`; the contract is `|lhs - rhs| <= tol`,
/// left to the caller to assert.
pub fn consistency_check(
    rho: &DensityMatrix,
    a: &Observable,
    effect: &Effect,
    on: &SubsystemSelector,
    tol: f64,
) -> Result<(f64, f64), ConditionalError> {
    let outcome = condition(rho, effect, on, tol)?;
    let complement = on.complement(rho.dims().len())?;
    let a_full = embed_operator(a.mat(), &complement, rho.dims())?;
    let e_full = embed_operator(effect.mat(), on, rho.dims())?;
    let joint = a_full.matmul(&e_full)?;
    let lhs_trace = joint.matmul(rho.mat())?.trace();
    if exceeds(lhs_trace.im.abs(), tol) {
        return Err(ConditionalError::NonRealProbability { imaginary: lhs_trace.im, tol });
    }
    let rhs = outcome.probability * expectation(a, &outcome.state, tol)?;
    Ok((lhs_trace.re, rhs))
}
