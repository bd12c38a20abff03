//! Simulation of triple-quantum-dot charge qubits coupled through a
//! superconducting resonator or transmon: single-qubit physics, dispersive
//! and holonomic two-qubit gates, and open-system gate fidelities.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod linalg;
pub mod ode;
pub mod tqd;
pub mod cavity;
pub mod lindblad;
pub mod gates;
pub mod experiments;

pub use error::{Error, Result};
