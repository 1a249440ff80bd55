//! Canonical constructions: the Bell basis and the entanglement-swapping
//! reference calculation.
//!
//! Two independent singlet pairs on factors (0,1) and (2,3) are conditioned
//! on a singlet selection of the inner pair (1,2). The unconditional state
//! of the outer pair (0,3) is maximally mixed; the conditional state is the
//! singlet again, so the outer photons end up entangled although they never
//! interacted.

use crate::composite::{partial_trace, tensor_state, SubsystemSelector};
use crate::conditional::{condition, ConditionalError, Effect};
use crate::linalg::Complex;
use crate::state::{density_from_ket, expectation, DensityMatrix, Observable, PureKet};

/// The four maximally entangled two-qubit states.
///
/// Basis convention: qubit basis `chi_0 = (1, 0)`, `chi_1 = (0, 1)`,
/// composite index with the first factor most significant. Global phases are
/// fixed as listed; every downstream comparison is projector-based, so the
/// phase choice never affects a contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    /// Antisymmetric singlet `(|01> - |10>) / sqrt(2)`.
    PsiMinus,
    /// `(|01> + |10>) / sqrt(2)`.
    PsiPlus,
    /// `(|00> - |11>) / sqrt(2)`.
    PhiMinus,
    /// `(|00> + |11>) / sqrt(2)`.
    PhiPlus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PsiMinus,
        BellKind::PsiPlus,
        BellKind::PhiMinus,
        BellKind::PhiPlus,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BellKind::PsiMinus => "psi_minus",
            BellKind::PsiPlus => "psi_plus",
            BellKind::PhiMinus => "phi_minus",
            BellKind::PhiPlus => "phi_plus",
        }
    }
}

/// Normalized two-qubit Bell ket with dims `[2, 2]`.
pub fn bell_state(kind: BellKind) -> PureKet {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let amps = match kind {
        BellKind::PsiMinus => [0.0, s, -s, 0.0],
        BellKind::PsiPlus => [0.0, s, s, 0.0],
        BellKind::PhiMinus => [s, 0.0, 0.0, -s],
        BellKind::PhiPlus => [s, 0.0, 0.0, s],
    };
    PureKet::new(
        amps.iter().map(|&x| Complex::new(x, 0.0)).collect(),
        vec![2, 2],
        1e-12,
    )
    .expect("Bell amplitudes are normalized")
}

/// Outputs of the entanglement-swapping calculation on `|psi-> x |psi->`.
#[derive(Debug, Clone)]
pub struct SwapReport {
    /// Unconditional reduced state of the outer pair (0,3): maximally mixed.
    pub reduced_14: DensityMatrix,
    /// Probability of selecting the inner pair (1,2) in the singlet: 1/4.
    pub selection_probability: f64,
    /// Conditional state of the outer pair given that selection.
    pub conditional_14: DensityMatrix,
    /// `Tr(P_singlet * conditional_14)`, clamped to `[0, 1]`: 1 when the
    /// conditional state is the singlet.
    pub fidelity_with_singlet: f64,
}

/// Run the swap: build the two-singlet state on dims `[2, 2, 2, 2]`, reduce
/// to the outer pair, and condition on the singlet selection of the inner
/// pair.
pub fn entanglement_swap(tol: f64) -> Result<SwapReport, ConditionalError> {
    let singlet = density_from_ket(&bell_state(BellKind::PsiMinus));
    let rho = tensor_state(&singlet, &singlet);

    let outer = SubsystemSelector::new(vec![0, 3])?;
    let inner = SubsystemSelector::new(vec![1, 2])?;

    let reduced_14 = partial_trace(&rho, &outer)?;
    let effect = Effect::from_ket(&bell_state(BellKind::PsiMinus), BellKind::PsiMinus.label());
    let outcome = condition(&rho, &effect, &inner, tol)?;

    let projector = Observable::new(singlet.mat().clone(), tol)?;
    let fidelity_with_singlet = expectation(&projector, &outcome.state, tol)?.clamp(0.0, 1.0);

    Ok(SwapReport {
        reduced_14,
        selection_probability: outcome.probability,
        conditional_14: outcome.state,
        fidelity_with_singlet,
    })
}
