//! Bound states and dynamics of one- and two-point interactions for `-d²/dx²`.
//!
//! - [`extensions`]: coupling matrices and boundary conditions
//! - [`spectra`]: closed-form eigenfunctions
//! - [`solver`]: numerical root search on the matching determinant
//! - [`dynamics`]: grid discretization, time stepping and dephasing

pub mod dynamics;
pub mod error;
pub mod extensions;
pub mod piecewise;
pub mod roots;
pub mod solver;
pub mod spectra;

pub use error::{Error, Result};
pub use extensions::{
    boundary_form_one_point, boundary_form_two_point, build_two_point, local_beta_for, BoundaryData,
    CouplingMatrix, GeneratorParams, OnePointBoundaryData, OnePointExtension, PointInteraction,
    TwoPointExtension, INTERFACE_TOL, LOCALITY_TOL,
};
pub use piecewise::{ExpPair, Parity, PiecewiseExpFunction, Side};
pub use solver::{
    bound_state_determinant, default_sweep, find_bound_states, interface_eigenvalues, matching_matrix, projection_residual,
    verify_against_analytic, verify_one_point, BoundState, Check, MatchingSystem, ScanOptions, SpectrumScan,
    VerificationReport, VERIFY_TOL,
};
pub use spectra::{
    delta_bound_state, even_state, handed_states, integral_over_gap, odd_state, one_point_eigenfunctions,
    SpectralPair,
};
