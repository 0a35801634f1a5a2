//! The two-qubit search circuit: pseudo-Hadamards, sign-flip oracles and the
//! fixed gate chain h⁻¹⊗h⁻¹ → U_f → h⊗h → U_00 → h⁻¹⊗h⁻¹.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{kron, pauli, ComplexMatrix};
use crate::state::{apply_unitary, StateVector};

/// Which of the four two-bit functions is being searched; named by the bit
/// pattern of its unique satisfying element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OracleLabel {
    a: u8,
    b: u8,
}

impl OracleLabel {
    pub const F00: Self = Self { a: 0, b: 0 };
    pub const F01: Self = Self { a: 0, b: 1 };
    pub const F10: Self = Self { a: 1, b: 0 };
    pub const F11: Self = Self { a: 1, b: 1 };
    pub const ALL: [Self; 4] = [Self::F00, Self::F01, Self::F10, Self::F11];

    pub fn new(a: u8, b: u8) -> Result<Self> {
        if a > 1 || b > 1 {
            return Err(Error::InvalidLabel(format!("{a}{b}")));
        }
        Ok(Self { a, b })
    }

    pub fn a(self) -> u8 {
        self.a
    }

    pub fn b(self) -> u8 {
        self.b
    }

    /// Basis index `2a + b`.
    pub fn index(self) -> usize {
        2 * self.a as usize + self.b as usize
    }

    pub fn from_index(index: usize) -> Result<Self> {
        if index > 3 {
            return Err(Error::InvalidLabel(index.to_string()));
        }
        Ok(Self { a: (index >> 1) as u8, b: (index & 1) as u8 })
    }

    /// Experiment name used in file names, e.g. `f01`.
    pub fn name(self) -> String {
        format!("f{}{}", self.a, self.b)
    }
}

impl fmt::Display for OracleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f{}{}", self.a, self.b)
    }
}

/// Accepts `f01`, `01`, `F01`.
impl FromStr for OracleLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s.strip_prefix(['f', 'F']).unwrap_or(s);
        let mut chars = bits.chars();
        match (chars.next(), chars.next(), chars.next()) {
            (Some(a @ ('0' | '1')), Some(b @ ('0' | '1')), None) => Ok(Self { a: a as u8 - b'0', b: b as u8 - b'0' }),
            _ => Err(Error::InvalidLabel(s.to_string())),
        }
    }
}

/// `h = Ry(90°)`.
pub fn pseudo_hadamard() -> ComplexMatrix {
    pauli::ry(FRAC_PI_2)
}

/// `h⁻¹ = Ry(−90°)`.
pub fn pseudo_hadamard_inverse() -> ComplexMatrix {
    pauli::ry(-FRAC_PI_2)
}

/// Diagonal oracle with −1 on `|ab⟩`. `U_00` is `oracle_matrix(F00)`.
pub fn oracle_matrix(label: OracleLabel) -> ComplexMatrix {
    let mut diag = [Complex64::new(1.0, 0.0); 4];
    diag[label.index()] = Complex64::new(-1.0, 0.0);
    ComplexMatrix::from_diag(&diag)
}

/// Gate list of the two-qubit circuit in application order.
pub fn grover2_gates(label: OracleLabel) -> Vec<ComplexMatrix> {
    let h = pseudo_hadamard();
    let hinv = pseudo_hadamard_inverse();
    let hh = kron(&h, &h);
    let hinv2 = kron(&hinv, &hinv);
    vec![hinv2.clone(), oracle_matrix(label), hh, oracle_matrix(OracleLabel::F00), hinv2]
}

/// Runs the circuit from `|00⟩` and returns the final state, which equals
/// `|ab⟩` up to a global phase.
pub fn grover2_circuit(label: OracleLabel) -> StateVector {
    grover2_gates(label)
        .iter()
        .try_fold(StateVector::basis(2, 0), |s, g| apply_unitary(g, &s))
        .expect("circuit gates are 4x4 unitaries")
}

/// Number of oracle calls made by [`grover2_circuit`].
pub const GROVER2_ORACLE_CALLS: usize = 1;
