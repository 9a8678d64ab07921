//! Resource estimation for phase estimation of vibrational spectra.
//!
//! The pipeline builds a second-quantized L-mode Hamiltonian from a polynomial
//! potential ([`vibrational`]), maps it to qubits ([`encoding`]), bounds its
//! commutator scaling ([`scaling`]), and turns that into Trotter step and gate
//! counts ([`costing`]) with a depth estimate from greedy layering
//! ([`layering`]).

pub mod costing;
pub mod encoding;
pub mod error;
pub mod io;
pub mod layering;
pub mod pauli;
pub mod scaling;
pub mod synthetic;
pub mod vibrational;

pub use costing::{qpe_budget, Approach, QpeConfig, ResourceReport};
pub use encoding::{encode, EncodingKind, EncodingSpec, WeightedPauliHamiltonian};
pub use error::{Error, Result};
pub use layering::{depth_ratio, LayeringStats};
pub use pauli::{nested_commutator, PauliString, Sigma, WeightedPauli};
pub use scaling::{alpha_bounds, alpha_exact, crude_bound, BoundConvention, ScalingResult};
pub use vibrational::{build_second_quantized, count_terms, SecondQuantizedHamiltonian, VibProblem};
