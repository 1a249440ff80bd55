//! Conditional-density-matrix calculus for finite-dimensional quantum systems.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`] — dense complex matrices, Kronecker products, traces,
//!   adjoints, and a Hermitian eigensolver;
//! - [`state`] — density matrices, observables, expectation, dispersion,
//!   spectral decomposition, purity, and the probability rule;
//! - [`composite`] — tensor products of states, subsystem operator
//!   embedding, and the partial trace;
//! - [`conditional`] — conditional states under projective and POVM
//!   selection, and the total-probability decomposition of a reduced state;
//! - [`scenarios`] — Bell states and the entanglement-swapping reference
//!   calculation.
//!
//! All values are immutable after construction and all operations are pure
//! functions, so everything here is safe to share read-only across threads.

pub mod composite;
pub mod conditional;
pub mod linalg;
pub mod scenarios;
pub mod state;

pub use composite::SubsystemSelector;
pub use conditional::{ConditionalOutcome, DecomposedBranch, Effect, EffectFamily};
pub use linalg::{Complex, ComplexMatrix, EigenDecomposition};
pub use scenarios::{BellKind, SwapReport};
pub use state::{DensityMatrix, Observable, PureKet, SpectralForm};

/// Default numerical tolerance for all validity checks, overridable per call.
pub const DEFAULT_TOL: f64 = 1e-9;
