//! Phase shift and transition probability of three-pulse light-pulse atom
//! interferometers, with finite-pulse and perturbative corrections and
//! independent numerical oracles for every closed form.

pub mod dynamics;
pub mod error;
pub mod magnus;
pub mod perturbation;
pub mod pauli;
pub mod pulse;
pub mod quadrature;
pub mod report;
pub mod scenario;
pub mod validators;

pub use error::{Error, Result};
pub use pauli::{compose_rotations, conjugate_sigma, exp_pauli, PauliVector, Unitary2};
pub use pulse::{PulseSequence, PulseShape};
pub use quadrature::QuadOptions;
pub use scenario::{AtomSpecies, InitialKinematics, LaserDrive, QuadraticPotential, Scenario};

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;
