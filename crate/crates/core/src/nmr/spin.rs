use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{kron, pauli, ComplexMatrix};

/// Which spin an operator or pulse addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Spin {
    First,
    Second,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::First, Spin::Second];

    /// Bit mask of this spin in a two-spin basis index.
    pub fn mask(self) -> usize {
        match self {
            Spin::First => 0b10,
            Spin::Second => 0b01,
        }
    }

    pub fn other(self) -> Spin {
        match self {
            Spin::First => Spin::Second,
            Spin::Second => Spin::First,
        }
    }
}

/// Weakly coupled homonuclear two-spin system. Frequencies are rotating-frame
/// offsets in Hz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinSystem {
    pub nu1: f64,
    pub nu2: f64,
    pub j: f64,
    pub t2: f64,
}

impl Default for SpinSystem {
    fn default() -> Self {
        Self { nu1: 80.0, nu2: -80.0, j: 7.0, t2: 1.0 }
    }
}

impl SpinSystem {
    pub fn new(nu1: f64, nu2: f64, j: f64, t2: f64) -> Result<Self> {
        let sys = Self { nu1, nu2, j, t2 };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.nu1, self.nu2, self.j, self.t2].iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidSpinSystem("parameters must be finite".into()));
        }
        if self.j <= 0.0 {
            return Err(Error::InvalidSpinSystem(format!("J = {} Hz must be positive", self.j)));
        }
        if self.t2 <= 0.0 {
            return Err(Error::InvalidSpinSystem(format!("T2 = {} s must be positive", self.t2)));
        }
        if (self.nu1 - self.nu2).abs() <= 10.0 * self.j {
            return Err(Error::InvalidSpinSystem(format!(
                "|nu1 - nu2| = {} Hz is not weakly coupled (needs > 10 J = {} Hz)",
                (self.nu1 - self.nu2).abs(),
                10.0 * self.j
            )));
        }
        Ok(())
    }

    pub fn offset(&self, spin: Spin) -> f64 {
        match spin {
            Spin::First => self.nu1,
            Spin::Second => self.nu2,
        }
    }

    /// Diagonal of `H = nu1·Iz₁ + nu2·Iz₂ + J·Iz₁Iz₂` (Hz).
    pub fn energies(&self) -> [f64; 4] {
        let mut e = [0.0; 4];
        for (i, slot) in e.iter_mut().enumerate() {
            let m1 = spin_projection(i, Spin::First);
            let m2 = spin_projection(i, Spin::Second);
            *slot = self.nu1 * m1 + self.nu2 * m2 + self.j * m1 * m2;
        }
        e
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        let e = self.energies().map(|x| Complex64::new(x, 0.0));
        ComplexMatrix::from_diag(&e)
    }

    /// `exp(−i·2π·t·H)`.
    pub fn free_evolution(&self, t: f64) -> ComplexMatrix {
        let e = self.energies().map(|x| Complex64::from_polar(1.0, -2.0 * PI * t * x));
        ComplexMatrix::from_diag(&e)
    }

    /// Resonance frequencies `(spin, nu_i ± J/2)` in ascending order per
    /// spin: the line with the partner in |1⟩ first.
    pub fn line_frequencies(&self) -> [(Spin, f64); 4] {
        [
            (Spin::First, self.nu1 - self.j / 2.0),
            (Spin::First, self.nu1 + self.j / 2.0),
            (Spin::Second, self.nu2 - self.j / 2.0),
            (Spin::Second, self.nu2 + self.j / 2.0),
        ]
    }
}

/// `m = +½` when the spin's bit is 0 (|0⟩ is spin-up), `−½` otherwise.
pub fn spin_projection(index: usize, spin: Spin) -> f64 {
    if index & spin.mask() == 0 {
        0.5
    } else {
        -0.5
    }
}

/// Cartesian single-spin operators `I_x, I_y, I_z` embedded in the
/// two-spin space.
pub fn spin_operator(spin: Spin, axis: Axis) -> ComplexMatrix {
    let half = Complex64::new(0.5, 0.0);
    let single = match axis {
        Axis::X => pauli::x(),
        Axis::Y => pauli::y(),
        Axis::Z => pauli::z(),
    }
    .scale(half);
    let id = ComplexMatrix::identity(2);
    match spin {
        Spin::First => kron(&single, &id),
        Spin::Second => kron(&id, &single),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}
