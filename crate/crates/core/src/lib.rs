//! Information-theoretic second-law bookkeeping for small open quantum systems.
//!
//! The crate is organised bottom-up:
//!
//! - [`operator`]: dense Hermitian linear algebra (Jacobi eigensolver, spectral functions).
//! - [`state`]: density matrices, Gibbs states, entropies and free energies.
//! - [`process`]: heat, work, entropy production and the reversible/irreversible
//!   work partition over time-sampled trajectories.
//! - [`channels`]: Markovian and memory-bearing thermalization of a qubit, plus
//!   adiabatic frequency rescaling.
//! - [`engines`]: Otto cycle, single-reservoir cycle and the classical endoreversible engine.
//! - [`feedback`]: measurement records and feedback (demon) information quantities.
//! - [`cli`]: the scenario runner behind the `secondlaw-lab` binary.

pub mod channels;
pub mod cli;
pub mod engines;
mod error;
pub mod feedback;
pub mod operator;
pub mod process;
pub mod state;

pub use error::{Error, Result};
pub use operator::{ComplexMatrix, HermitianOperator, Spectrum, SUPPORT_CUTOFF};
pub use state::{QuantumState, ThermalContext};
