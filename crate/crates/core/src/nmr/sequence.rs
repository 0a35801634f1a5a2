//! Pulse sequences, their line-based text form, and execution on a density matrix.
//!
//! Text format, one event per line:
//!
//! ```text
//! PULSE <target> <angle_deg> <phase_deg> [SOFT <t_p>]
//! DELAY <seconds>
//! GRAD
//! ```
//!
//! `<target>` is `1`, `2` or `both`. Everything after `#` is a comment.
//! Numbers are written in Rust's shortest round-trip form, so
//! `parse(to_text(s)) == s` bit for bit.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::state::{DensityMatrix, Evolve};

use super::gradient::gradient_crush;
use super::pulse::{pulse_operator, ErrorModel, Pulse, Target};
use super::spin::SpinSystem;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PulseEvent {
    Pulse(Pulse),
    Delay(f64),
    Gradient,
}

impl PulseEvent {
    pub fn pulse(target: Target, angle_deg: f64, phase_deg: f64) -> Self {
        PulseEvent::Pulse(Pulse::new(target, angle_deg, phase_deg))
    }
}

impl fmt::Display for PulseEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PulseEvent::Pulse(p) => {
                write!(f, "PULSE {} {:?} {:?}", p.target, p.angle_deg, p.phase_deg)?;
                if let Some(tp) = p.soft {
                    write!(f, " SOFT {tp:?}")?;
                }
                Ok(())
            }
            PulseEvent::Delay(t) => write!(f, "DELAY {t:?}"),
            PulseEvent::Gradient => f.write_str("GRAD"),
        }
    }
}

fn parse_number(token: Option<&str>, what: &str, line: usize) -> Result<f64> {
    let tok = token.ok_or_else(|| Error::Parse { line, message: format!("missing {what}") })?;
    let x: f64 = tok.parse().map_err(|_| Error::Parse { line, message: format!("bad {what} `{tok}`") })?;
    if !x.is_finite() {
        return Err(Error::Parse { line, message: format!("{what} must be finite") });
    }
    Ok(x)
}

fn parse_event(text: &str, line: usize) -> Result<PulseEvent> {
    let mut tokens = text.split_whitespace();
    let keyword = tokens.next().unwrap_or_default();
    let event = match keyword {
        "PULSE" => {
            let target: Target = tokens
                .next()
                .ok_or_else(|| Error::Parse { line, message: "missing target".into() })?
                .parse()
                .map_err(|e: Error| Error::Parse { line, message: e.to_string() })?;
            let angle_deg = parse_number(tokens.next(), "angle", line)?;
            let phase_deg = parse_number(tokens.next(), "phase", line)?;
            let soft = match tokens.next() {
                None => None,
                Some("SOFT") => {
                    let tp = parse_number(tokens.next(), "soft pulse length", line)?;
                    if tp <= 0.0 {
                        return Err(Error::Parse { line, message: "soft pulse length must be positive".into() });
                    }
                    if target == Target::Both {
                        return Err(Error::Parse { line, message: "soft pulses must address a single spin".into() });
                    }
                    Some(tp)
                }
                Some(other) => return Err(Error::Parse { line, message: format!("unexpected `{other}`") }),
            };
            PulseEvent::Pulse(Pulse { target, angle_deg, phase_deg, soft })
        }
        "DELAY" => {
            let t = parse_number(tokens.next(), "delay", line)?;
            if t < 0.0 {
                return Err(Error::Parse { line, message: "delay must be non-negative".into() });
            }
            PulseEvent::Delay(t)
        }
        "GRAD" => PulseEvent::Gradient,
        other => return Err(Error::Parse { line, message: format!("unknown event `{other}`") }),
    };
    if let Some(extra) = tokens.next() {
        return Err(Error::Parse { line, message: format!("trailing token `{extra}`") });
    }
    Ok(event)
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PulseSequence {
    pub events: Vec<PulseEvent>,
}

impl PulseSequence {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, event: PulseEvent) -> &mut Self {
        self.events.push(event);
        self
    }

    pub fn pulse(&mut self, target: Target, angle_deg: f64, phase_deg: f64) -> &mut Self {
        self.push(PulseEvent::pulse(target, angle_deg, phase_deg))
    }

    pub fn delay(&mut self, t: f64) -> &mut Self {
        self.push(PulseEvent::Delay(t))
    }

    pub fn gradient(&mut self) -> &mut Self {
        self.push(PulseEvent::Gradient)
    }

    pub fn extend(&mut self, other: &PulseSequence) -> &mut Self {
        self.events.extend_from_slice(&other.events);
        self
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn pulses(&self) -> impl Iterator<Item = &Pulse> {
        self.events.iter().filter_map(|e| match e {
            PulseEvent::Pulse(p) => Some(p),
            _ => None,
        })
    }

    /// Total free-precession time.
    pub fn total_delay(&self) -> f64 {
        self.events
            .iter()
            .map(|e| match e {
                PulseEvent::Delay(t) => *t,
                _ => 0.0,
            })
            .sum()
    }

    pub fn to_text(&self) -> String {
        self.events.iter().map(|e| format!("{e}\n")).collect()
    }

    /// Overall propagator. Fails if the sequence contains a gradient, which
    /// is not unitary.
    pub fn unitary(&self, sys: &SpinSystem, err: &ErrorModel) -> Result<ComplexMatrix> {
        let mut u = ComplexMatrix::identity(4);
        for event in &self.events {
            let step = match event {
                PulseEvent::Pulse(p) => pulse_operator(sys, p, err)?,
                PulseEvent::Delay(t) => sys.free_evolution(*t),
                PulseEvent::Gradient => return Err(Error::InvalidEvent("a gradient has no unitary propagator".into())),
            };
            u = &step * &u;
        }
        Ok(u)
    }
}

impl fmt::Display for PulseSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for PulseSequence {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut seq = PulseSequence::new();
        for (i, raw) in text.lines().enumerate() {
            let body = raw.split('#').next().unwrap_or_default().trim();
            if body.is_empty() {
                continue;
            }
            seq.push(parse_event(body, i + 1)?);
        }
        Ok(seq)
    }
}

/// Left fold of the sequence over `rho0`.
pub fn run_sequence(
    sys: &SpinSystem,
    seq: &PulseSequence,
    rho0: &DensityMatrix,
    err: &ErrorModel,
) -> Result<DensityMatrix> {
    if rho0.n_qubits() != 2 {
        return Err(Error::DimensionMismatch { expected: 4, actual: rho0.dim() });
    }
    let mut rho = rho0.clone();
    for event in &seq.events {
        rho = match event {
            PulseEvent::Pulse(p) => rho.evolve_unchecked(&pulse_operator(sys, p, err)?),
            PulseEvent::Delay(t) => rho.evolve_unchecked(&sys.free_evolution(*t)),
            PulseEvent::Gradient => gradient_crush(&rho),
        };
    }
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nmr::pulse::phase;
    use proptest::prelude::*;

    #[test]
    fn parses_with_comments() {
        let text = "# oracle fragment\nPULSE 1 90 270   # h^-1\n\nDELAY 0.0357\nPULSE both 180 0\nGRAD\nPULSE 2 90.5 90 SOFT 0.002\n";
        let seq: PulseSequence = text.parse().unwrap();
        assert_eq!(seq.len(), 5);
        assert_eq!(seq.events[0], PulseEvent::pulse(Target::FIRST, 90.0, phase::MINUS_Y));
        assert_eq!(seq.events[1], PulseEvent::Delay(0.0357));
        assert_eq!(seq.events[3], PulseEvent::Gradient);
        assert_eq!(
            seq.to_text(),
            "PULSE 1 90.0 270.0\nDELAY 0.0357\nPULSE both 180.0 0.0\nGRAD\nPULSE 2 90.5 90.0 SOFT 0.002\n"
        );
    }

    #[test]
    fn canonical_text_round_trips_exactly() {
        let text = "PULSE 2 90.0 180.0\nDELAY 0.03571428571428571\nGRAD\n";
        assert_eq!(text.parse::<PulseSequence>().unwrap().to_text(), text);
    }

    #[test]
    fn rejects_malformed_lines() {
        for bad in [
            "PULSE 3 90 0",
            "PULSE 1 90",
            "PULSE 1 ninety 0",
            "DELAY -1",
            "DELAY",
            "WAIT 1",
            "GRAD now",
            "PULSE both 90 0 SOFT 0.001",
            "PULSE 1 90 0 SOFT 0",
            "PULSE 1 90 0 HARD",
            "DELAY inf",
        ] {
            assert!(matches!(bad.parse::<PulseSequence>(), Err(Error::Parse { line: 1, .. })), "{bad}");
        }
        let err = "GRAD\nBOGUS".parse::<PulseSequence>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn empty_sequence_is_identity() {
        let sys = SpinSystem::default();
        let rho = DensityMatrix::from_populations(&[0.4, 0.3, 0.2, 0.1]).unwrap();
        let out = run_sequence(&sys, &PulseSequence::new(), &rho, &ErrorModel::None).unwrap();
        assert_eq!(out, rho);
        assert_eq!(PulseSequence::new().unitary(&sys, &ErrorModel::None).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn gradient_has_no_unitary() {
        let mut seq = PulseSequence::new();
        seq.gradient();
        assert!(seq.unitary(&SpinSystem::default(), &ErrorModel::None).is_err());
    }

    fn event_strategy() -> impl Strategy<Value = PulseEvent> {
        let target = prop_oneof![Just(Target::FIRST), Just(Target::SECOND), Just(Target::Both)];
        prop_oneof![
            (target, -720.0f64..720.0, -360.0f64..360.0, proptest::option::of(1e-9f64..1.0)).prop_map(
                |(target, angle_deg, phase_deg, soft)| {
                    let soft = if target == Target::Both { None } else { soft };
                    PulseEvent::Pulse(Pulse { target, angle_deg, phase_deg, soft })
                }
            ),
            (0.0f64..10.0).prop_map(PulseEvent::Delay),
            Just(PulseEvent::Gradient),
        ]
    }

    proptest! {
        #[test]
        fn text_round_trip(events in proptest::collection::vec(event_strategy(), 0..20)) {
            let seq = PulseSequence { events };
            let text = seq.to_text();
            let back: PulseSequence = text.parse().unwrap();
            prop_assert_eq!(&back, &seq);
            prop_assert_eq!(back.to_text(), text);
        }
    }
}
