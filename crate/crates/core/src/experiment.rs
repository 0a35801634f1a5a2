//! The five-spectrum search experiment: a reference spectrum and one
//! spectrum per oracle, all phased with the reference.

use serde::Serialize;

use crate::error::Result;
use crate::grover::OracleLabel;
use crate::nmr::compiler::grover_sequence;
use crate::nmr::gradient::pseudo_pure_00;
use crate::nmr::pulse::ErrorModel;
use crate::nmr::sequence::run_sequence;
use crate::nmr::spin::SpinSystem;
use crate::readout::{classify, detect, AcquisitionParams, ExperimentSummary, PhaseReference, Readout, Spectrum};
use crate::state::{fidelity, StateVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub system: SpinSystem,
    pub acquisition: AcquisitionParams,
    pub epsilon: f64,
    pub error_model: ErrorModel,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            system: SpinSystem::default(),
            acquisition: AcquisitionParams::default(),
            epsilon: 1.0,
            error_model: ErrorModel::None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LabelRun {
    pub label: OracleLabel,
    pub spectrum: Spectrum,
    pub readout: Result<Readout>,
    /// Overlap of the pure-input final state with `|ab⟩`.
    pub fidelity: f64,
}

impl LabelRun {
    pub fn correct(&self) -> bool {
        matches!(&self.readout, Ok(r) if r.label_index() == self.label.index())
    }
}

#[derive(Debug, Clone)]
pub struct SearchExperiment {
    pub reference_spectrum: Spectrum,
    pub reference: PhaseReference,
    pub reference_readout: Readout,
    pub runs: Vec<LabelRun>,
}

impl SearchExperiment {
    pub fn all_correct(&self) -> bool {
        self.runs.iter().all(LabelRun::correct)
    }

    /// Summaries in the order ref, f00, f01, f10, f11. Failed readouts are
    /// left out.
    pub fn summaries(&self) -> Vec<ExperimentSummary> {
        let mut out = vec![ExperimentSummary::new("ref", &self.reference_readout, None)];
        for run in &self.runs {
            if let Ok(r) = &run.readout {
                out.push(ExperimentSummary::new(run.label.name(), r, Some(run.fidelity)));
            }
        }
        out
    }

    /// Spectra paired with their experiment names, in output order.
    pub fn spectra(&self) -> Vec<(String, &Spectrum)> {
        let mut out = vec![("ref".to_string(), &self.reference_spectrum)];
        out.extend(self.runs.iter().map(|r| (r.label.name(), &r.spectrum)));
        out
    }
}

/// Final deviation state of the full pulse-level search for `label`.
pub fn final_state(label: OracleLabel, cfg: &ExperimentConfig, epsilon: f64) -> Result<crate::state::DensityMatrix> {
    let rho0 = pseudo_pure_00(epsilon)?;
    run_sequence(&cfg.system, &grover_sequence(label, &cfg.system), &rho0, &cfg.error_model)
}

/// Runs the reference and all four searches. The reference is a 90° pulse
/// applied to the pure `|00⟩` input, so line heights read directly as the
/// purity of the search experiments.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SearchExperiment> {
    cfg.system.validate()?;
    cfg.acquisition.validate(&cfg.system)?;
    pseudo_pure_00(cfg.epsilon)?;

    let reference_spectrum = detect(&cfg.system, &pseudo_pure_00(1.0)?, &cfg.acquisition)?;
    let reference = PhaseReference::from_spectrum(&reference_spectrum)?;
    let reference_readout = classify(&reference_spectrum, &reference)?;

    let mut runs = Vec::with_capacity(4);
    for label in OracleLabel::ALL {
        let rho = final_state(label, cfg, cfg.epsilon)?;
        let spectrum = detect(&cfg.system, &rho, &cfg.acquisition)?;
        let readout = classify(&spectrum, &reference);
        let pure = final_state(label, cfg, 1.0)?;
        let fidelity = fidelity(&StateVector::basis(2, label.index()), &pure)?;
        runs.push(LabelRun { label, spectrum, readout, fidelity });
    }
    Ok(SearchExperiment { reference_spectrum, reference, reference_readout, runs })
}

/// Serializable form of the whole experiment.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub epsilon: f64,
    pub reference_phase_deg: f64,
    pub experiments: Vec<ExperimentSummary>,
}

impl ExperimentReport {
    pub fn new(cfg: &ExperimentConfig, exp: &SearchExperiment) -> Self {
        Self { epsilon: cfg.epsilon, reference_phase_deg: exp.reference.phase_deg, experiments: exp.summaries() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
