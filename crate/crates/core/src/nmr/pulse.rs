//! RF pulses and the selective-pulse error model.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{kron, pauli, ComplexMatrix};

use super::spin::{spin_operator, Axis, Spin, SpinSystem};

/// Pulse phases in degrees.
pub mod phase {
    pub const PLUS_X: f64 = 0.0;
    pub const PLUS_Y: f64 = 90.0;
    pub const MINUS_X: f64 = 180.0;
    pub const MINUS_Y: f64 = 270.0;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Target {
    Spin(Spin),
    Both,
}

impl Target {
    pub const FIRST: Target = Target::Spin(Spin::First);
    pub const SECOND: Target = Target::Spin(Spin::Second);
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Spin(Spin::First) => "1",
            Target::Spin(Spin::Second) => "2",
            Target::Both => "both",
        })
    }
}

impl FromStr for Target {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(Target::FIRST),
            "2" => Ok(Target::SECOND),
            "both" => Ok(Target::Both),
            other => Err(Error::InvalidEvent(format!("unknown pulse target `{other}`"))),
        }
    }
}

/// A rectangular RF pulse. `soft` carries an explicit pulse length (s);
/// without it the pulse is instantaneous unless the [`ErrorModel`] says
/// otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pulse {
    pub target: Target,
    pub angle_deg: f64,
    pub phase_deg: f64,
    pub soft: Option<f64>,
}

impl Pulse {
    pub fn new(target: Target, angle_deg: f64, phase_deg: f64) -> Self {
        Self { target, angle_deg, phase_deg, soft: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum ErrorModel {
    #[default]
    None,
    /// Every selective pulse lasts `duration` seconds.
    SoftPulse { duration: f64 },
}

impl ErrorModel {
    pub fn soft(duration: f64) -> Result<Self> {
        check_duration(duration)?;
        Ok(Self::SoftPulse { duration })
    }

    /// Pulse length to use for `pulse`, if it is to be treated as soft.
    fn duration_for(&self, pulse: &Pulse) -> Option<f64> {
        match (pulse.soft, pulse.target, self) {
            (Some(tp), _, _) => Some(tp),
            (None, Target::Spin(_), ErrorModel::SoftPulse { duration }) => Some(*duration),
            _ => None,
        }
    }
}

fn check_duration(tp: f64) -> Result<()> {
    if tp.is_finite() && tp > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidEvent(format!("soft pulse length {tp} s must be positive")))
    }
}

/// Instantaneous rotation `exp(−iβ(cos φ·I_x + sin φ·I_y))` on the target spin(s).
pub fn ideal_pulse(target: Target, angle_deg: f64, phase_deg: f64) -> ComplexMatrix {
    let r = pauli::transverse_rotation(angle_deg.to_radians(), phase_deg.to_radians());
    let id = ComplexMatrix::identity(2);
    match target {
        Target::Spin(Spin::First) => kron(&r, &id),
        Target::Spin(Spin::Second) => kron(&id, &r),
        Target::Both => kron(&r, &r),
    }
}

/// Propagator of a rectangular selective pulse of length `tp` on `spin`,
/// with the carrier on that spin's resonance.
///
/// The RF term acts on the target spin only, so the pulse tends to the ideal
/// rotation as `tp → 0`. Chemical-shift precession over the pulse is charged
/// to the surrounding timing (the pulse, including its RF phase, is referred
/// to its centre), while the scalar coupling keeps acting for the whole
/// pulse; that residual coupling is the error being modelled.
pub fn soft_pulse(sys: &SpinSystem, spin: Spin, angle_deg: f64, phase_deg: f64, tp: f64) -> Result<ComplexMatrix> {
    check_duration(tp)?;
    let c = |x: f64| Complex64::new(x, 0.0);
    let rf_hz = angle_deg / (360.0 * tp);
    let carrier = sys.offset(spin);
    // RF phase is defined at the pulse centre.
    let (sin_p, cos_p) = (phase_deg.to_radians() - PI * carrier * tp).sin_cos();
    let shifted = SpinSystem { nu1: sys.nu1 - carrier, nu2: sys.nu2 - carrier, ..*sys };
    let rf =
        &spin_operator(spin, Axis::X).scale(c(rf_hz * cos_p)) + &spin_operator(spin, Axis::Y).scale(c(rf_hz * sin_p));
    let generator = (&shifted.hamiltonian() + &rf).scale(Complex64::new(0.0, -2.0 * PI * tp));
    let in_frame = generator.expm();

    // Back to the common frame, minus the shift precession of the pulse length.
    let mut wrap = [Complex64::new(1.0, 0.0); 4];
    for (i, w) in wrap.iter_mut().enumerate() {
        let m1 = super::spin::spin_projection(i, Spin::First);
        let m2 = super::spin::spin_projection(i, Spin::Second);
        let frame = carrier * (m1 + m2);
        let shift = sys.nu1 * m1 + sys.nu2 * m2;
        *w = Complex64::from_polar(1.0, -2.0 * PI * tp * (frame - shift / 2.0));
    }
    let left = ComplexMatrix::from_diag(&wrap);
    let right_phases: Vec<Complex64> = (0..4)
        .map(|i| {
            let m1 = super::spin::spin_projection(i, Spin::First);
            let m2 = super::spin::spin_projection(i, Spin::Second);
            Complex64::from_polar(1.0, PI * tp * (sys.nu1 * m1 + sys.nu2 * m2))
        })
        .collect();
    let right = ComplexMatrix::from_diag(&right_phases);
    Ok(&(&left * &in_frame) * &right)
}

/// Operator for a single pulse under the given error model.
pub fn pulse_operator(sys: &SpinSystem, pulse: &Pulse, err: &ErrorModel) -> Result<ComplexMatrix> {
    if !pulse.angle_deg.is_finite() || !pulse.phase_deg.is_finite() {
        return Err(Error::InvalidEvent("pulse angle and phase must be finite".into()));
    }
    match (err.duration_for(pulse), pulse.target) {
        (Some(_), Target::Both) => Err(Error::InvalidEvent("soft pulses must address a single spin".into())),
        (Some(tp), Target::Spin(spin)) => soft_pulse(sys, spin, pulse.angle_deg, pulse.phase_deg, tp),
        (None, target) => Ok(ideal_pulse(target, pulse.angle_deg, pulse.phase_deg)),
    }
}
