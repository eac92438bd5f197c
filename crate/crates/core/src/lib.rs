//! Noise sensitivities of diagonal observables under hierarchical (binary)
//! qubit maps, and heterogeneous surface-code distance allocation driven by
//! those sensitivities.
//!
//! The pipeline is
//! [`RealWavefunction`] → [`ExpectationVector`] (Walsh transform of the
//! probabilities), [`DiagonalObservable`] → [`PauliDecomposition`], then
//! [`sensitivities`] → [`SensitivityProfile`] → [`optimize_distances`].

pub mod error;
pub mod io;
pub mod noise;
pub mod observables;
pub mod qec;
pub mod states;
pub mod walsh;

pub use error::{Error, Result};
pub use noise::{
    decay_fit, kraus_oracle, noise_polynomial, noisy_expectation, sensitivities, DecayFit,
    DensityMatrix, NoisePolynomial, NoiseVector, Pauli, SensitivityProfile,
};
pub use observables::{sequency_report, DiagonalObservable, PauliDecomposition, SequencyRow};
pub use qec::{
    homogeneous_distance, log_grid, logical_error_rate, optimize_distances, reduction_sweep,
    uniform_error_distances, DistanceAssignment, SurfaceCodeParams, SweepPoint,
};
pub use states::{ExpectationVector, ProbabilityVector, RealWavefunction};
pub use walsh::{fwht, BasisIndex};
