//! Discrete-time quantum walks on the line with D-level coins.
//!
//! The crate evolves a walker ⊗ coin pure state together with its derivative
//! with respect to a coin parameter θ. From these it computes the quantum
//! Fisher information, the Fisher information of a position measurement, and
//! probe states that maximize either.
//!
//! Modules:
//! - [`coin`]: rotation, embedded and Grover coins with analytic ∂θ
//! - [`probe`]: hypersphere parametrization of the initial coin state
//! - [`walk`]: the walk step, derivative co-evolution, distributions, entropy
//! - [`metrology`]: QFI, position FI, ratio, Cramér–Rao bound
//! - [`optimize`]: probe search (lattice + simplex) and closed-form probes
//! - [`oracles`]: closed-form values used to cross-check simulations
//! - [`experiment`]: configuration, sweeps, figure data and the verification suite

pub mod coin;
pub mod error;
pub mod experiment;
pub mod index;
pub mod metrology;
pub mod optimize;
pub mod oracles;
pub mod probe;
pub mod simplex;
pub mod walk;

pub use coin::{Axis, CoinFamily, CoinOperator, GeneratorSet};
pub use error::{Result, WalkError};
pub use metrology::{fi_position, qfi_pure, MetrologyReport};
pub use probe::ProbeSpec;
pub use walk::{DerivativePair, WalkState};
