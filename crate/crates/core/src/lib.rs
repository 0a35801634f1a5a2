//! Simulation of a two-qubit quantum search on a liquid-state NMR computer,
//! from ideal gates down to pulse sequences and simulated spectra.

pub mod error;
pub mod experiment;
pub mod grover;
pub mod matrix;
pub mod nmr;
pub mod readout;
pub mod search;
pub mod state;

pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentReport, SearchExperiment};
pub use grover::{grover2_circuit, oracle_matrix, OracleLabel};
pub use matrix::ComplexMatrix;
pub use readout::{classify, detect, reference_phase, AcquisitionParams, PhaseReference, Readout, Spectrum};
pub use search::{grover_general, optimal_iterations, SearchProblem};
pub use state::{equal_up_to_global_phase, fidelity, DensityMatrix, StateVector};
