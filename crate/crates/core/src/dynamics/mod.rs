//! Grid dynamics under the discretized point-interaction Hamiltonians.

pub mod banded;
pub mod dephase;
pub mod evolve;
pub mod grid;
pub mod hamiltonian;
pub mod two_level;

pub use banded::BorderedSolver;
pub use dephase::{dephase, kicked_member, DephaseOptions, DephaseReport, PhaseSource, ReferenceStats};
pub use evolve::{crossing_period, evolve, EvolutionReport, EvolutionSample, EvolveOptions, Propagator};
pub use grid::{side_probabilities_of, GridSpec, GridState, Layout, SideProbabilities, MIN_POINTS};
pub use hamiltonian::{discretize, DiscreteHamiltonian, HERMITICITY_TOL};
pub use two_level::{two_level_evolution, TwoLevelOracle, TwoLevelState};
