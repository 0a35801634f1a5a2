//! Pulse-level simulation of the two-spin NMR computer.

pub mod compiler;
pub mod gradient;
pub mod pulse;
pub mod sequence;
pub mod spin;

pub use compiler::{compile_oracle, grover_sequence, verify_phase_table, PhaseTableEntry, PHASE_TABLE};
pub use gradient::{gradient_crush, pseudo_pure_00, temporal_average};
pub use pulse::{pulse_operator, ErrorModel, Pulse, Target};
pub use sequence::{run_sequence, PulseEvent, PulseSequence};
pub use spin::{Spin, SpinSystem};
