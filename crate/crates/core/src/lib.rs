//! Core of the sequential Hamiltonian assembly workbench.
//!
//! Everything in this crate is pure computation over owned data and builds
//! under `no_std` with `alloc`. File formats, persistence and the experiment
//! driver live in the `sha-workbench` crate.
//!
//! Conventions used throughout:
//!
//! * Basis states are indexed in natural binary order with qubit 0 as the
//!   least significant bit of the index.
//! * A [`Bitstring`] prints qubit 0 first, so `"01"` means qubit 0 reads 0
//!   and qubit 1 reads 1.
//! * Pauli-Z has eigenvalue `+1` on bit 0 and `-1` on bit 1.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod ansatz;
pub mod bits;
pub mod error;
pub mod graph;
pub mod hamiltonian;
pub mod instances;
pub mod metrics;
pub mod optimizer;
pub mod partition;
pub mod simulator;
pub mod training;

pub use ansatz::{AnsatzTemplate, Axis, EntanglerGate, Topology};
pub use bits::{Bitstring, Counts};
pub use error::{Error, Result};
pub use graph::Graph;
pub use hamiltonian::{DiagonalHamiltonian, PauliTerm};
pub use instances::{OracleReport, ProblemInstance, ProblemKind};

pub use metrics::MetricSnapshot;
pub use optimizer::{minimize, OptimizerConfig, StageResult};
pub use partition::{PartitionSchedule, Strategy};
pub use simulator::{Gate, GateKind, ParamCircuit, Statevector};
pub use training::{Method, RunRecord, TrainConfig};

pub use num_complex::Complex64;

/// Largest register the dense simulator and the brute-force oracle accept.
pub const MAX_QUBITS: usize = 24;
