//! Simulated detection: observe pulse, FID, spectrum, reference phasing and
//! qubit classification.
//!
//! Lines are measured by integrating a window of ±3 linewidths around each
//! predicted resonance. The window integrals are then unmixed with the exact
//! window response of a unit line, so the tails of neighbouring lines do not
//! bias the result.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{ComplexMatrix, C0};
use crate::nmr::gradient::gradient_crush;
use crate::nmr::pulse::{ideal_pulse, Target};
use crate::nmr::spin::{Spin, SpinSystem};
use crate::state::{DensityMatrix, Evolve};

/// Half-width of the integration window, in linewidths (FWHM).
pub const WINDOW_LINEWIDTHS: f64 = 3.0;

/// Minimum reference line amplitude treated as a detectable peak.
pub const DETECTION_THRESHOLD: f64 = 1e-9;

/// Lines weaker than this fraction of the reference are "no signal".
pub const MIN_RELATIVE_HEIGHT: f64 = 1e-3;

/// Largest phase spread tolerated between reference lines, degrees.
pub const REFERENCE_PHASE_TOL_DEG: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionParams {
    pub spectral_width: f64,
    pub n_points: usize,
    pub observe_phase: f64,
}

impl Default for AcquisitionParams {
    fn default() -> Self {
        Self { spectral_width: 400.0, n_points: 8192, observe_phase: 0.0 }
    }
}

impl AcquisitionParams {
    pub fn validate(&self, sys: &SpinSystem) -> Result<()> {
        if self.n_points < 1024 || !self.n_points.is_power_of_two() {
            return Err(Error::Acquisition(format!("n_points = {} must be a power of two >= 1024", self.n_points)));
        }
        let needed = 2.0 * (sys.nu1.abs().max(sys.nu2.abs()) + sys.j);
        if self.spectral_width.is_nan() || self.spectral_width <= needed {
            return Err(Error::Acquisition(format!(
                "spectral width {} Hz aliases lines (needs > {needed} Hz)",
                self.spectral_width
            )));
        }
        if !self.observe_phase.is_finite() {
            return Err(Error::Acquisition("observe phase must be finite".into()));
        }
        Ok(())
    }

    pub fn dwell(&self) -> f64 {
        1.0 / self.spectral_width
    }

    pub fn resolution(&self) -> f64 {
        self.spectral_width / self.n_points as f64
    }

    /// Frequency of spectrum bin `m` (ascending, centred on zero).
    pub fn frequency(&self, m: usize) -> f64 {
        (m as f64 - (self.n_points / 2) as f64) * self.resolution()
    }
}

/// One resonance of the two-spin spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralLine {
    pub spin: Spin,
    pub center_hz: f64,
    /// Raw complex integral over the line's window.
    #[serde(skip)]
    pub window_integral: Complex64,
    /// Complex FID amplitude of the line after unmixing window crosstalk.
    #[serde(skip)]
    pub amplitude: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub freq: Vec<f64>,
    pub values: Vec<Complex64>,
    /// The four predicted lines in ascending frequency.
    pub lines: Vec<SpectralLine>,
}

impl Spectrum {
    /// Applies a zero-order phase correction `e^{−iφ}`.
    pub fn phased(&self, phase_deg: f64) -> Spectrum {
        let rot = Complex64::from_polar(1.0, -phase_deg.to_radians());
        Spectrum {
            freq: self.freq.clone(),
            values: self.values.iter().map(|v| v * rot).collect(),
            lines: self
                .lines
                .iter()
                .map(|l| SpectralLine { window_integral: l.window_integral * rot, amplitude: l.amplitude * rot, ..*l })
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Grid step in Hz.
    pub fn resolution(&self) -> f64 {
        self.freq[1] - self.freq[0]
    }

    /// Writes `freq_hz,real,imag` rows in ascending frequency.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "freq_hz,real,imag")?;
        for (f, v) in self.freq.iter().zip(&self.values) {
            writeln!(out, "{f:?},{:?},{:?}", v.re, v.im)?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii")
    }
}

/// Transverse coherences of ρ that feed the detected signal: complex
/// amplitude and frequency (Hz) of each line, in ascending frequency.
fn observable_lines(sys: &SpinSystem, rho: &DensityMatrix) -> Vec<(Spin, f64, Complex64)> {
    let energies = sys.energies();
    let m = rho.matrix();
    let mut lines = Vec::with_capacity(4);
    for (spin, freq) in sys.line_frequencies() {
        let mut amp = C0;
        // ρ_ij pairs with (I⁺)_ji: i has the spin down, j = i with it up.
        for i in (0..4).filter(|i| i & spin.mask() != 0) {
            let j = i & !spin.mask();
            let f = energies[j] - energies[i];
            if (f - freq).abs() < 1e-9 * (1.0 + freq.abs()) {
                amp += m[(i, j)];
            }
        }
        lines.push((spin, freq, amp));
    }
    lines.sort_by(|a, b| a.1.total_cmp(&b.1));
    lines
}

/// Discrete spectrum of a unit line `exp((i2πf − 1/T2)t)` sampled with the
/// half-first-point convention, evaluated at bin frequency `bin_hz`.
fn unit_line_bin(line_hz: f64, bin_hz: f64, t2: f64, acq: &AcquisitionParams) -> Complex64 {
    let dt = acq.dwell();
    let w = Complex64::new(-dt / t2, 2.0 * PI * (line_hz - bin_hz) * dt).exp();
    let n = acq.n_points as i32;
    let geometric = (Complex64::new(1.0, 0.0) - w.powi(n)) / (Complex64::new(1.0, 0.0) - w);
    (geometric - 0.5) * dt
}

fn window_bins(center: f64, half_width: f64, acq: &AcquisitionParams) -> impl Iterator<Item = usize> + '_ {
    (0..acq.n_points).filter(move |&m| (acq.frequency(m) - center).abs() <= half_width)
}

/// Gradient crush, 90° observe pulse on both spins, FID under free
/// precession with T2 decay, and transform onto the ascending grid.
pub fn detect(sys: &SpinSystem, rho: &DensityMatrix, acq: &AcquisitionParams) -> Result<Spectrum> {
    if rho.n_qubits() != 2 {
        return Err(Error::DimensionMismatch { expected: 4, actual: rho.dim() });
    }
    sys.validate()?;
    acq.validate(sys)?;

    let crushed = gradient_crush(rho);
    let excited = crushed.evolve_unchecked(&ideal_pulse(Target::Both, 90.0, acq.observe_phase));
    let lines = observable_lines(sys, &excited);

    let n = acq.n_points;
    let dt = acq.dwell();
    let mut fid: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = k as f64 * dt;
            let decay = (-t / sys.t2).exp();
            lines.iter().map(|&(_, f, a)| a * Complex64::from_polar(decay, 2.0 * PI * f * t)).sum()
        })
        .collect();
    fid[0] *= 0.5;

    FftPlanner::new().plan_fft_forward(n).process(&mut fid);
    let values: Vec<Complex64> = (0..n).map(|m| fid[(m + n / 2) % n] * dt).collect();
    let freq: Vec<f64> = (0..n).map(|m| acq.frequency(m)).collect();

    let half_width = WINDOW_LINEWIDTHS / (PI * sys.t2);
    let df = acq.resolution();
    let window_integrals: Vec<Complex64> = lines
        .iter()
        .map(|&(_, center, _)| window_bins(center, half_width, acq).map(|m| values[m]).sum::<Complex64>() * df)
        .collect();

    let mut response = ComplexMatrix::zeros(4, 4);
    for (r, &(_, center, _)) in lines.iter().enumerate() {
        for (c, &(_, source, _)) in lines.iter().enumerate() {
            response[(r, c)] = window_bins(center, half_width, acq)
                .map(|m| unit_line_bin(source, acq.frequency(m), sys.t2, acq))
                .sum::<Complex64>()
                * df;
        }
    }
    let amplitudes = response.solve(&window_integrals)?;

    let lines = lines
        .iter()
        .zip(window_integrals.iter().zip(&amplitudes))
        .map(|(&(spin, center_hz, _), (&window_integral, &amplitude))| SpectralLine {
            spin,
            center_hz,
            window_integral,
            amplitude,
        })
        .collect();
    Ok(Spectrum { freq, values, lines })
}

/// Zero-order phase (degrees, in (−180, 180]) that puts the reference lines
/// in positive absorption.
pub fn reference_phase(reference: &Spectrum) -> Result<f64> {
    let strongest = reference.lines.iter().map(|l| l.amplitude.norm()).fold(0.0, f64::max);
    if strongest < DETECTION_THRESHOLD {
        return Err(Error::NoPeaks);
    }
    let total: Complex64 = reference.lines.iter().map(|l| l.amplitude).sum();
    if total.norm() < DETECTION_THRESHOLD {
        return Err(Error::AmbiguousReadout("reference lines cancel".into()));
    }
    let phase = total.arg();
    for l in reference.lines.iter().filter(|l| l.amplitude.norm() >= DETECTION_THRESHOLD) {
        let spread = (l.amplitude * Complex64::from_polar(1.0, -phase)).arg().to_degrees().abs();
        if spread > REFERENCE_PHASE_TOL_DEG {
            return Err(Error::AmbiguousReadout(format!(
                "reference line at {} Hz is {spread:.2}° away from the common phase",
                l.center_hz
            )));
        }
    }
    Ok(phase.to_degrees())
}

/// Phase correction plus the phased reference line amplitudes that relative
/// heights are measured against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhaseReference {
    pub phase_deg: f64,
    pub line_amplitudes: [f64; 4],
}

impl PhaseReference {
    pub fn from_spectrum(reference: &Spectrum) -> Result<Self> {
        let phase_deg = reference_phase(reference)?;
        let phased = reference.phased(phase_deg);
        let mut line_amplitudes = [0.0; 4];
        for (slot, l) in line_amplitudes.iter_mut().zip(&phased.lines) {
            *slot = l.amplitude.re;
        }
        if line_amplitudes.iter().any(|&a| a < DETECTION_THRESHOLD) {
            return Err(Error::NoPeaks);
        }
        Ok(Self { phase_deg, line_amplitudes })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Readout {
    /// Qubit values `[first spin, second spin]`.
    pub qubits: [u8; 2],
    /// Line heights relative to the reference, ascending frequency.
    pub heights: [f64; 4],
    pub centers_hz: [f64; 4],
}

impl Readout {
    pub fn label_index(&self) -> usize {
        2 * self.qubits[0] as usize + self.qubits[1] as usize
    }
}

/// Positive absorption means |0⟩, negative means |1⟩; each spin's two lines
/// must agree.
pub fn classify(spec: &Spectrum, reference: &PhaseReference) -> Result<Readout> {
    let phased = spec.phased(reference.phase_deg);
    let mut heights = [0.0; 4];
    let mut centers_hz = [0.0; 4];
    for (i, l) in phased.lines.iter().enumerate() {
        heights[i] = l.amplitude.re / reference.line_amplitudes[i];
        centers_hz[i] = l.center_hz;
    }
    let mut qubits = [0u8; 2];
    for (q, spin) in Spin::BOTH.iter().enumerate() {
        let pair: Vec<f64> =
            phased.lines.iter().zip(heights).filter(|(l, _)| l.spin == *spin).map(|(_, h)| h).collect();
        if pair.iter().any(|h| h.abs() < MIN_RELATIVE_HEIGHT) {
            return Err(Error::AmbiguousReadout(format!("no signal from spin {}", q + 1)));
        }
        if pair[0].signum() != pair[1].signum() {
            return Err(Error::AmbiguousReadout(format!(
                "lines of spin {} disagree in sign ({:+.3}, {:+.3})",
                q + 1,
                pair[0],
                pair[1]
            )));
        }
        qubits[q] = if pair.iter().sum::<f64>() > 0.0 { 0 } else { 1 };
    }
    Ok(Readout { qubits, heights, centers_hz })
}

/// Per-experiment entry of the JSON summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub experiment: String,
    pub qubits: [u8; 2],
    pub peaks: Vec<PeakSummary>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub fidelity: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakSummary {
    pub center_hz: f64,
    pub height_rel: f64,
}

impl ExperimentSummary {
    pub fn new(experiment: impl Into<String>, readout: &Readout, fidelity: Option<f64>) -> Self {
        let peaks = readout
            .centers_hz
            .iter()
            .zip(readout.heights)
            .map(|(&center_hz, height_rel)| PeakSummary { center_hz, height_rel })
            .collect();
        Self { experiment: experiment.into(), qubits: readout.qubits, peaks, fidelity }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateVector;

    fn sys() -> SpinSystem {
        SpinSystem::default()
    }

    fn basis(i: usize) -> DensityMatrix {
        StateVector::basis(2, i).to_density()
    }

    #[test]
    fn acquisition_validation() {
        let s = sys();
        assert!(AcquisitionParams::default().validate(&s).is_ok());
        let aliased = AcquisitionParams { spectral_width: 150.0, ..Default::default() };
        assert!(matches!(detect(&s, &basis(0), &aliased), Err(Error::Acquisition(_))));
        let short = AcquisitionParams { n_points: 512, ..Default::default() };
        assert!(short.validate(&s).is_err());
        let odd = AcquisitionParams { n_points: 3000, ..Default::default() };
        assert!(odd.validate(&s).is_err());
    }

    #[test]
    fn ground_state_gives_two_in_phase_doublets() {
        let s = sys();
        let spec = detect(&s, &basis(0), &AcquisitionParams::default()).unwrap();
        let centers: Vec<f64> = spec.lines.iter().map(|l| l.center_hz).collect();
        assert_eq!(centers, vec![-83.5, -76.5, 76.5, 83.5]);
        let phase = spec.lines[0].amplitude.arg();
        for l in &spec.lines {
            assert!((l.amplitude.norm() - 0.25).abs() < 1e-12, "{}", l.amplitude);
            assert!((l.amplitude.arg() - phase).abs() < 1e-9);
        }
    }

    #[test]
    fn maximally_mixed_is_silent() {
        let spec = detect(&sys(), &DensityMatrix::maximally_mixed(2), &AcquisitionParams::default()).unwrap();
        assert!(spec.max_abs() <= 1e-10);
        assert_eq!(reference_phase(&spec), Err(Error::NoPeaks));
    }

    #[test]
    fn reference_phase_of_rotated_spectra() {
        let s = sys();
        let acq = AcquisitionParams::default();
        let reference = detect(&s, &basis(0), &acq).unwrap();
        let base = reference_phase(&reference).unwrap();
        let absorbed = reference.phased(base);
        assert!(reference_phase(&absorbed).unwrap().abs() < 1.0);
        let turned = absorbed.phased(-90.0);
        assert!((reference_phase(&turned).unwrap() - 90.0).abs() < 1.0);
    }

    #[test]
    fn observe_phase_shifts_reference_phase() {
        let s = sys();
        let p0 = reference_phase(&detect(&s, &basis(0), &AcquisitionParams::default()).unwrap()).unwrap();
        let acq90 = AcquisitionParams { observe_phase: 90.0, ..Default::default() };
        let p90 = reference_phase(&detect(&s, &basis(0), &acq90).unwrap()).unwrap();
        let diff = (p90 - p0).rem_euclid(360.0);
        assert!((diff - 90.0).abs() < 1.0, "{p0} {p90}");
    }

    #[test]
    fn classification_of_basis_states() {
        let s = sys();
        let acq = AcquisitionParams::default();
        let reference = PhaseReference::from_spectrum(&detect(&s, &basis(0), &acq).unwrap()).unwrap();
        for i in 0..4 {
            let r = classify(&detect(&s, &basis(i), &acq).unwrap(), &reference).unwrap();
            assert_eq!(r.label_index(), i);
            for h in r.heights {
                assert!((h.abs() - 1.0).abs() < 1e-9);
            }
        }
        // |01⟩: spin-1 doublet positive, spin-2 doublet negative.
        let r = classify(&detect(&s, &basis(1), &acq).unwrap(), &reference).unwrap();
        assert!(r.heights[2] > 0.0 && r.heights[3] > 0.0);
        assert!(r.heights[0] < 0.0 && r.heights[1] < 0.0);
    }

    #[test]
    fn silent_spectrum_is_ambiguous() {
        let s = sys();
        let acq = AcquisitionParams::default();
        let reference = PhaseReference::from_spectrum(&detect(&s, &basis(0), &acq).unwrap()).unwrap();
        let silent = detect(&s, &DensityMatrix::maximally_mixed(2), &acq).unwrap();
        assert!(matches!(classify(&silent, &reference), Err(Error::AmbiguousReadout(_))));
    }

    #[test]
    fn disagreeing_pair_is_ambiguous() {
        // A spin-2 antiphase doublet: lines of opposite sign.
        let s = sys();
        let acq = AcquisitionParams::default();
        let reference = PhaseReference::from_spectrum(&detect(&s, &basis(0), &acq).unwrap()).unwrap();
        let rho = DensityMatrix::from_populations(&[0.5, 0.0, 0.0, 0.5]).unwrap();
        assert!(matches!(classify(&detect(&s, &rho, &acq).unwrap(), &reference), Err(Error::AmbiguousReadout(_))));
    }

    #[test]
    fn linewidth_matches_t2() {
        let s = SpinSystem { t2: 0.5, ..sys() };
        let acq = AcquisitionParams { n_points: 16384, ..Default::default() };
        let raw = detect(&s, &basis(0), &acq).unwrap();
        let spec = raw.phased(reference_phase(&raw).unwrap());
        let center = s.line_frequencies()[0].1;
        let near: Vec<(f64, f64)> = spec
            .freq
            .iter()
            .zip(&spec.values)
            .filter(|(f, _)| (*f - center).abs() < 2.0)
            .map(|(f, v)| (*f, v.re))
            .collect();
        let peak = near.iter().map(|p| p.1).fold(f64::MIN, f64::max);
        let above: Vec<f64> = near.iter().filter(|p| p.1 >= peak / 2.0).map(|p| p.0).collect();
        let fwhm = above.last().unwrap() - above.first().unwrap() + spec.resolution();
        let expected = 1.0 / (PI * s.t2);
        assert!((fwhm / expected - 1.0).abs() < 0.2, "{fwhm} vs {expected}");
    }

    #[test]
    fn csv_layout() {
        let spec = detect(&sys(), &basis(0), &AcquisitionParams::default()).unwrap();
        let csv = spec.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("freq_hz,real,imag"));
        assert_eq!(csv.lines().count(), 8193);
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(first[0], -200.0);
    }
}
