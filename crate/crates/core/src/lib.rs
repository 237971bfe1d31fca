//! Energy-driven quantum state reduction with Lévy information processes.
//!
//! The crate is generic over the real scalar (`f32` or `f64`); the aliases
//! at the root fix it to `f64`, with `*32` variants for single precision.

// `!(x > 0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decoherence;
pub mod error;
pub mod information;
pub mod levy;
pub mod quadrature;
pub mod quantum;
pub mod reduction;
pub mod scalar;
pub mod sde;
pub mod stats;

pub use error::{Error, Result};
pub use scalar::{CMatrix, CVector, Real, C};

pub use information::{InformationPath, Signal, TimeGrid};
pub use levy::{LevyKind, LevyMeasureSpec, LevyModel, Triplet};
pub use quantum::{DensityMatrix, EnergySpectrum, PureState};

pub type Spectrum = EnergySpectrum<f64>;
pub type Density = DensityMatrix<f64>;
pub type Pure = PureState<f64>;
pub type Levy = LevyModel<f64>;
pub type Sig = Signal<f64>;
pub type Grid = TimeGrid<f64>;
pub type Path = InformationPath<f64>;

pub type Spectrum32 = EnergySpectrum<f32>;
pub type Density32 = DensityMatrix<f32>;
pub type Pure32 = PureState<f32>;
pub type Levy32 = LevyModel<f32>;
pub type Sig32 = Signal<f32>;
pub type Grid32 = TimeGrid<f32>;
pub type Path32 = InformationPath<f32>;
pub use decoherence::{
    clock_bound, effective_q, gamma_rate, gamma_rate_integral, gamma_rate_sinh, lindblad_rhs, mean_density,
    small_gap_approx, DecoherenceRow, DecoherenceTable, LindbladGenerator, PLANCK_SIGMA_SQUARED,
};
pub use reduction::{
    branch_reduction_bound, detect_collapse, evolve_density, evolve_state_vector, posterior_probabilities, reduce_path,
    Reducer, ReductionPath,
};
