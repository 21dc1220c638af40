//! Scenario files: a versioned TOML schema describing a supply, a load and
//! analysis options, plus the driver that turns a scenario into a full
//! analysis result.
//!
//! Built-in scenarios ship as data files embedded in the library; they
//! double as templates for user scenarios.

use serde::{Deserialize, Serialize};

use crate::circuit::{oracle_powers, solve_steady_state, LinearCircuit, SeriesRlc};
use crate::engine::{
    compensate, decompose_with, power_factor, power_factor_from_power, AnalysisMode,
    CompensationStrategy, CurrentDecomposition,
};
use crate::error::{Error, Result};
use crate::ga::EPSILON_SCALE;
use crate::irp::{cv_decompose, cv_powers, cv_spectrum_report, CvDecomposition};
use crate::sequence::{sequence_split, spectrum_report, SpectrumEntry};
use crate::signal::{HarmonicSignal, HarmonicTerm, HilbertConvention, PolyphaseSignal};
use crate::trajectory::{GeometricTrajectory, ProjectedSignal};

pub const SCHEMA_VERSION: u32 = 1;

/// Which pipeline carries the geometric analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    /// Exact closed-form waveforms end to end.
    #[default]
    Analytic,
    /// Uniform sampling at `samples_per_period` before the embedding.
    Sampled,
}

/// One harmonic term in polar form: `amplitude_peak cos(order w t + phase)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    pub order: u32,
    pub amplitude_peak: f64,
    #[serde(default)]
    pub phase_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpec {
    #[serde(default)]
    pub terms: Vec<TermSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupplySpec {
    /// Base angular frequency in rad/s.
    pub base_omega_rad_s: f64,
    pub phases: Vec<PhaseSpec>,
}

/// A load given either as an explicit current or as a linear circuit to be
/// solved; exactly one must be present.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub current: Option<CurrentSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit: Option<CircuitSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurrentSpec {
    pub phases: Vec<PhaseSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CircuitSpec {
    SeriesRlc(BranchSpec),
    Star {
        branches: Vec<BranchSpec>,
        #[serde(default = "default_true")]
        neutral: bool,
    },
}

fn default_true() -> bool {
    true
}

/// One branch; `open = true` marks a missing branch in a star load.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchSpec {
    #[serde(default)]
    pub open: bool,
    #[serde(default)]
    pub resistance_ohm: f64,
    #[serde(default)]
    pub inductance_h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacitance_f: Option<f64>,
}

impl BranchSpec {
    fn to_branch(self) -> Option<SeriesRlc> {
        if self.open {
            None
        } else {
            Some(SeriesRlc {
                resistance: self.resistance_ohm,
                inductance: self.inductance_h,
                capacitance: self.capacitance_f,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioOptions {
    #[serde(default)]
    pub compensation: CompensationStrategy,
    #[serde(default)]
    pub hilbert_convention: HilbertConvention,
    #[serde(default)]
    pub pipeline: Pipeline,
    #[serde(default = "default_samples_per_period")]
    pub samples_per_period: usize,
    /// Override of the singularity threshold scale (relative to the mean
    /// squared voltage norm).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_scale: Option<f64>,
}

fn default_samples_per_period() -> usize {
    4096
}

impl Default for ScenarioOptions {
    fn default() -> Self {
        ScenarioOptions {
            compensation: CompensationStrategy::default(),
            hilbert_convention: HilbertConvention::default(),
            pipeline: Pipeline::default(),
            samples_per_period: default_samples_per_period(),
            epsilon_scale: None,
        }
    }
}

/// A complete analysis scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub mode: AnalysisMode,
    pub supply: SupplySpec,
    pub load: LoadSpec,
    #[serde(default)]
    pub options: ScenarioOptions,
}

impl Scenario {
    /// Parse a scenario from TOML source.
    pub fn from_toml(source: &str) -> Result<Scenario> {
        toml::from_str(source).map_err(|e| Error::ScenarioParse(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }

    /// Every invariant violation, not just the first.
    pub fn validation_issues(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            issues.push(format!(
                "unsupported schema_version {} (this build reads {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.name.is_empty() {
            issues.push("scenario name must not be empty".into());
        }
        let omega = self.supply.base_omega_rad_s;
        if !(omega.is_finite() && omega > 0.0) {
            issues.push(format!("supply.base_omega_rad_s must be positive and finite, got {omega}"));
        }
        if self.supply.phases.is_empty() {
            issues.push("supply has no phases".into());
        }
        if self.supply.phases.iter().all(|p| p.terms.is_empty()) {
            issues.push("supply is empty: no phase carries any harmonic term".into());
        }
        for (idx, phase) in self.supply.phases.iter().enumerate() {
            check_phase(&mut issues, "supply", idx, phase);
        }
        if self.mode == AnalysisMode::Instantaneous && self.supply.phases.len() < 2 {
            issues.push(
                "mode = \"instantaneous\" needs at least two phases; \
                 single-phase systems cannot be analysed instantaneously"
                    .into(),
            );
        }
        match (&self.load.current, &self.load.circuit) {
            (None, None) => issues.push("load must give either a current or a circuit".into()),
            (Some(_), Some(_)) => {
                issues.push("load gives both a current and a circuit; pick one".into())
            }
            (Some(current), None) => {
                if current.phases.len() != self.supply.phases.len() {
                    issues.push(format!(
                        "load current has {} phase(s), supply has {}",
                        current.phases.len(),
                        self.supply.phases.len()
                    ));
                }
                for (idx, phase) in current.phases.iter().enumerate() {
                    check_phase(&mut issues, "load.current", idx, phase);
                }
            }
            (None, Some(spec)) => {
                let circuit = spec.to_circuit();
                if let Err(e) = circuit.validate() {
                    issues.push(e.to_string());
                }
                if circuit.n_phases() != self.supply.phases.len() {
                    issues.push(format!(
                        "circuit expects {} phase(s), supply has {}",
                        circuit.n_phases(),
                        self.supply.phases.len()
                    ));
                }
            }
        }
        if self.options.samples_per_period < 16 {
            issues.push(format!(
                "options.samples_per_period must be at least 16, got {}",
                self.options.samples_per_period
            ));
        }
        if let Some(eps) = self.options.epsilon_scale {
            if !(eps.is_finite() && eps > 0.0) {
                issues.push(format!(
                    "options.epsilon_scale must be positive and finite, got {eps}"
                ));
            }
        }
        issues
    }

    /// Validate, turning any issue list into an error.
    pub fn validate(&self) -> Result<()> {
        let issues = self.validation_issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidScenario(issues))
        }
    }

    /// The supply as a waveform bundle.
    pub fn supply_signal(&self) -> Result<PolyphaseSignal> {
        phases_to_signal(self.supply.base_omega_rad_s, &self.supply.phases)
    }

    /// The load current: explicit, or solved from the circuit together with
    /// the oracle's power figures.
    pub fn load_current(&self, supply: &PolyphaseSignal) -> Result<(PolyphaseSignal, Option<OraclePowers>)> {
        match (&self.load.current, &self.load.circuit) {
            (Some(spec), None) => {
                Ok((phases_to_signal(self.supply.base_omega_rad_s, &spec.phases)?, None))
            }
            (None, Some(spec)) => {
                let circuit = spec.to_circuit();
                let current = solve_steady_state(&circuit, supply)?;
                let (p, q) = oracle_powers(supply, &current);
                Ok((current, Some(OraclePowers { active_power: p, reactive_power: q })))
            }
            _ => Err(Error::InvalidScenario(self.validation_issues())),
        }
    }
}

impl CircuitSpec {
    pub fn to_circuit(&self) -> LinearCircuit {
        match self {
            CircuitSpec::SeriesRlc(branch) => LinearCircuit::SeriesRlc(
                branch.to_branch().unwrap_or(SeriesRlc {
                    resistance: 0.0,
                    inductance: 0.0,
                    capacitance: None,
                }),
            ),
            CircuitSpec::Star { branches, neutral } => LinearCircuit::Star {
                branches: branches.iter().map(|b| b.to_branch()).collect(),
                neutral: *neutral,
            },
        }
    }
}

fn check_phase(issues: &mut Vec<String>, what: &str, idx: usize, phase: &PhaseSpec) {
    let mut seen = std::collections::BTreeSet::new();
    for term in &phase.terms {
        if term.order == 0 {
            issues.push(format!("{what} phase {} has a term with order 0", idx + 1));
        }
        if !seen.insert(term.order) {
            issues.push(format!(
                "{what} phase {} has a duplicate harmonic order {}",
                idx + 1,
                term.order
            ));
        }
        if !term.amplitude_peak.is_finite() || !term.phase_deg.is_finite() {
            issues.push(format!(
                "{what} phase {} order {} has a non-finite amplitude or phase",
                idx + 1,
                term.order
            ));
        }
    }
}

fn phases_to_signal(base_omega: f64, phases: &[PhaseSpec]) -> Result<PolyphaseSignal> {
    let signals = phases
        .iter()
        .map(|phase| {
            let terms = phase
                .terms
                .iter()
                .map(|t| {
                    HarmonicTerm::from_polar(t.order, t.amplitude_peak, t.phase_deg.to_radians())
                })
                .collect();
            HarmonicSignal::new(base_omega, terms)
        })
        .collect::<Result<Vec<_>>>()?;
    PolyphaseSignal::new(signals)
}

/// Oracle-side active and Budeanu reactive power of a solved circuit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OraclePowers {
    pub active_power: f64,
    pub reactive_power: f64,
}

/// Which theories to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheorySelection {
    #[default]
    Gapot,
    Cv,
    Both,
}

impl TheorySelection {
    pub fn wants_gapot(self) -> bool {
        matches!(self, TheorySelection::Gapot | TheorySelection::Both)
    }

    pub fn wants_cv(self) -> bool {
        matches!(self, TheorySelection::Cv | TheorySelection::Both)
    }
}

/// RMS amperes of the zero/negative/positive sequence parts of the
/// quadrature current (physical, per phase set).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SequenceRms {
    pub zero: f64,
    pub negative: f64,
    pub positive: f64,
}

/// One component row of a decomposition table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentRow {
    pub name: String,
    pub rms_amperes: f64,
    /// Closed form (or a `sampled(n)` / rational marker) per channel.
    pub channels: Vec<String>,
}

/// Analysis results of one theory on one scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoryReport {
    pub theory: String,
    pub mode: AnalysisMode,
    pub active_power_w: f64,
    /// Budeanu reactive power; absent where the theory does not define one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budeanu_reactive_var: Option<f64>,
    pub power_factor_before: f64,
    /// The power factor recomputed against the RMS norm of the geometric
    /// power wave, reported for inspection.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub power_factor_power_norm: Option<f64>,
    pub power_factor_after: f64,
    pub compensation: CompensationStrategy,
    pub voltage_rms: f64,
    pub current_rms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub orientation_factor: Option<f64>,
    pub flagged_samples: usize,
    pub components: Vec<ComponentRow>,
    /// Symmetrical-component spectrum of the post-compensation residual.
    pub residual_spectrum: Vec<SpectrumEntry>,
    /// Sequence split of the quadrature current, where defined.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quadrature_sequence_rms: Option<SequenceRms>,
}

/// Engine-versus-oracle agreement for circuit-backed scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleCrossCheck {
    pub oracle_active_power_w: f64,
    pub oracle_reactive_var: f64,
    pub active_power_rel_delta: f64,
    pub reactive_abs_rel_delta: f64,
}

/// Full result of running a scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioAnalysis {
    pub scenario: String,
    pub description: String,
    pub mode: AnalysisMode,
    pub pipeline: Pipeline,
    pub base_omega_rad_s: f64,
    pub n_phases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gapot: Option<TheoryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cv: Option<TheoryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_cross_check: Option<OracleCrossCheck>,
    /// Largest pointwise gap between the instantaneous geometric split and
    /// the cross-vector split, relative to the current scale. Present for
    /// three-phase runs of both theories.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub instantaneous_equivalence_delta: Option<f64>,
}

/// Trajectories retained for waveform emission.
#[derive(Debug, Clone)]
pub struct AnalysisArtifacts {
    pub mode: AnalysisMode,
    pub voltage: Option<GeometricTrajectory>,
    pub decomposition: Option<CurrentDecomposition>,
    pub residual: Option<GeometricTrajectory>,
    pub cv: Option<CvDecomposition>,
}

/// Run a scenario under the selected theories.
pub fn analyze(scenario: &Scenario, theory: TheorySelection) -> Result<ScenarioAnalysis> {
    analyze_with_artifacts(scenario, theory).map(|(report, _)| report)
}

/// Decomposition trajectories only, skipping the report figures; degenerate
/// scenarios (a zero load current, say) still yield waveforms.
pub fn waveform_artifacts(
    scenario: &Scenario,
    theory: TheorySelection,
) -> Result<AnalysisArtifacts> {
    scenario.validate()?;
    let supply = scenario.supply_signal()?;
    let (current, _) = scenario.load_current(&supply)?;
    let epsilon = scenario.options.epsilon_scale.unwrap_or(EPSILON_SCALE);
    let mut artifacts = AnalysisArtifacts {
        mode: scenario.mode,
        voltage: None,
        decomposition: None,
        residual: None,
        cv: None,
    };
    if theory.wants_gapot() {
        let (u_traj, i_traj) =
            build_trajectories(scenario, &supply, &current, scenario.options.hilbert_convention)?;
        let decomposition = decompose_with(&u_traj, &i_traj, scenario.mode, epsilon)?;
        artifacts.residual = Some(compensate(&decomposition, scenario.options.compensation));
        artifacts.voltage = Some(u_traj);
        artifacts.decomposition = Some(decomposition);
    }
    if theory.wants_cv() {
        artifacts.cv = Some(cv_decompose(&supply, &current)?);
    }
    Ok(artifacts)
}

/// Like [`analyze`], also returning the trajectories behind the report.
pub fn analyze_with_artifacts(
    scenario: &Scenario,
    theory: TheorySelection,
) -> Result<(ScenarioAnalysis, AnalysisArtifacts)> {
    scenario.validate()?;
    let supply = scenario.supply_signal()?;
    let (current, oracle) = scenario.load_current(&supply)?;
    let mode = scenario.mode;
    let convention = scenario.options.hilbert_convention;
    let epsilon = scenario.options.epsilon_scale.unwrap_or(EPSILON_SCALE);

    let mut artifacts = AnalysisArtifacts {
        mode,
        voltage: None,
        decomposition: None,
        residual: None,
        cv: None,
    };

    let mut gapot_report = None;
    if theory.wants_gapot() {
        let (u_traj, i_traj) = build_trajectories(scenario, &supply, &current, convention)?;
        let decomposition = decompose_with(&u_traj, &i_traj, mode, epsilon)?;
        let residual = compensate(&decomposition, scenario.options.compensation);
        let pf_before = power_factor(&u_traj, &i_traj)?;
        let pf_after = power_factor(&u_traj, &residual)?;
        let power = decomposition.power();

        let components = decomposition
            .components()
            .iter()
            .map(|(name, traj)| ComponentRow {
                name: (*name).into(),
                rms_amperes: component_rms(traj, mode),
                channels: traj.channels().iter().map(waveform_label).collect(),
            })
            .collect();

        let residual_spectrum = residual_spectrum(&residual, mode, supply.n_phases());
        let quadrature_sequence_rms = quadrature_sequence(&decomposition, mode, supply.n_phases());

        gapot_report = Some(TheoryReport {
            theory: "gapot".into(),
            mode,
            active_power_w: power.active_power(),
            budeanu_reactive_var: match mode {
                AnalysisMode::Averaged => Some(power.budeanu_reactive_power()),
                AnalysisMode::Instantaneous => None,
            },
            power_factor_before: pf_before,
            power_factor_power_norm: Some(power_factor_from_power(power)),
            power_factor_after: pf_after,
            compensation: scenario.options.compensation,
            voltage_rms: u_traj.rms(),
            current_rms: i_traj.rms(),
            orientation_factor: Some(decomposition.orientation_factor()),
            flagged_samples: decomposition.flagged_samples(),
            components,
            residual_spectrum,
            quadrature_sequence_rms,
        });
        artifacts.voltage = Some(u_traj);
        artifacts.residual = Some(residual);
        artifacts.decomposition = Some(decomposition);
    }

    let mut cv_report = None;
    if theory.wants_cv() {
        let powers = cv_powers(&supply, &current)?;
        let split = cv_decompose(&supply, &current)?;
        let p = powers.active_power();
        let u_rms = supply.rms();
        let i_rms = current.rms();
        if u_rms <= 0.0 {
            return Err(Error::ZeroSignal { which: "voltage" });
        }
        if i_rms <= 0.0 {
            return Err(Error::ZeroSignal { which: "current" });
        }
        let parallel_rms = split.parallel_rms();
        let components = vec![
            ComponentRow {
                name: "i_p".into(),
                rms_amperes: parallel_rms,
                channels: split.parallel().iter().map(waveform_label).collect(),
            },
            ComponentRow {
                name: "i_q".into(),
                rms_amperes: split.quadrature_rms(),
                channels: split.quadrature().iter().map(waveform_label).collect(),
            },
        ];
        let residual_spectrum = split
            .to_polyphase()
            .and_then(|(parallel, _)| cv_spectrum_report(&parallel).ok())
            .unwrap_or_default();

        cv_report = Some(TheoryReport {
            theory: "cv".into(),
            mode: AnalysisMode::Instantaneous,
            active_power_w: p,
            budeanu_reactive_var: None,
            power_factor_before: p / (u_rms * i_rms),
            power_factor_power_norm: None,
            power_factor_after: p / (u_rms * parallel_rms),
            compensation: CompensationStrategy::KeepParallel,
            voltage_rms: u_rms,
            current_rms: i_rms,
            orientation_factor: None,
            flagged_samples: 0,
            components,
            residual_spectrum,
            quadrature_sequence_rms: None,
        });
        artifacts.cv = Some(split);
    }

    let oracle_cross_check = oracle.map(|o| {
        let engine_p = gapot_report
            .as_ref()
            .map(|r| r.active_power_w)
            .or(cv_report.as_ref().map(|r| r.active_power_w))
            .unwrap_or(o.active_power);
        let engine_q = gapot_report
            .as_ref()
            .and_then(|r| r.budeanu_reactive_var)
            .unwrap_or(o.reactive_power);
        OracleCrossCheck {
            oracle_active_power_w: o.active_power,
            oracle_reactive_var: o.reactive_power,
            active_power_rel_delta: rel_delta(engine_p, o.active_power),
            reactive_abs_rel_delta: rel_delta(engine_q.abs(), o.reactive_power.abs()),
        }
    });

    let instantaneous_equivalence_delta = if theory == TheorySelection::Both
        && supply.n_phases() == 3
    {
        Some(instantaneous_equivalence(&supply, &current, epsilon)?)
    } else {
        None
    };

    let report = ScenarioAnalysis {
        scenario: scenario.name.clone(),
        description: scenario.description.clone(),
        mode,
        pipeline: scenario.options.pipeline,
        base_omega_rad_s: scenario.supply.base_omega_rad_s,
        n_phases: supply.n_phases(),
        gapot: gapot_report,
        cv: cv_report,
        oracle_cross_check,
        instantaneous_equivalence_delta,
    };
    Ok((report, artifacts))
}

fn build_trajectories(
    scenario: &Scenario,
    supply: &PolyphaseSignal,
    current: &PolyphaseSignal,
    convention: HilbertConvention,
) -> Result<(GeometricTrajectory, GeometricTrajectory)> {
    let embed_analytic = |signal: &PolyphaseSignal| -> Result<GeometricTrajectory> {
        match scenario.mode {
            AnalysisMode::Averaged => signal.to_geometric_with(convention),
            AnalysisMode::Instantaneous => signal.to_geometric_instantaneous(),
        }
    };
    match scenario.options.pipeline {
        Pipeline::Analytic => Ok((embed_analytic(supply)?, embed_analytic(current)?)),
        Pipeline::Sampled => {
            let n = scenario.options.samples_per_period;
            let embed = |signal: &PolyphaseSignal| -> Result<GeometricTrajectory> {
                let sampled = signal.sample(n, 1);
                match scenario.mode {
                    AnalysisMode::Averaged => sampled.to_geometric_with(convention),
                    AnalysisMode::Instantaneous => sampled.to_geometric_instantaneous(),
                }
            };
            Ok((embed(supply)?, embed(current)?))
        }
    }
}

/// Physical RMS of a component: the geometric norm rescaled so quadrature
/// channels do not double-count energy.
fn component_rms(traj: &GeometricTrajectory, mode: AnalysisMode) -> f64 {
    traj.rms() / mode.energy_scale().sqrt()
}

fn waveform_label(w: &crate::trajectory::Waveform) -> String {
    crate::report::machine_waveform(w)
}

fn residual_spectrum(
    residual: &GeometricTrajectory,
    mode: AnalysisMode,
    n_phases: usize,
) -> Vec<SpectrumEntry> {
    if n_phases != 3 {
        return Vec::new();
    }
    let signal = match mode {
        AnalysisMode::Averaged => match residual.project_to_time() {
            Ok(ProjectedSignal::Harmonic(p)) => Some(p),
            _ => None,
        },
        AnalysisMode::Instantaneous => {
            let phases = residual
                .channels()
                .iter()
                .map(|c| c.as_harmonic().cloned())
                .collect::<Option<Vec<_>>>();
            phases.and_then(|p| PolyphaseSignal::new(p).ok())
        }
    };
    signal
        .and_then(|s| spectrum_report(&s).ok())
        .unwrap_or_default()
}

fn quadrature_sequence(
    decomposition: &CurrentDecomposition,
    mode: AnalysisMode,
    n_phases: usize,
) -> Option<SequenceRms> {
    if n_phases != 3 {
        return None;
    }
    let split = sequence_split(decomposition.quadrature()).ok()?;
    let scale = mode.energy_scale().sqrt();
    Some(SequenceRms {
        zero: split.zero.rms() / scale,
        negative: split.negative.rms() / scale,
        positive: split.positive.rms() / scale,
    })
}

/// Largest pointwise difference between the instantaneous geometric split
/// and the cross-vector split, relative to the peak current norm.
fn instantaneous_equivalence(
    supply: &PolyphaseSignal,
    current: &PolyphaseSignal,
    epsilon: f64,
) -> Result<f64> {
    let u = supply.to_geometric_instantaneous()?;
    let i = current.to_geometric_instantaneous()?;
    let geometric = decompose_with(&u, &i, AnalysisMode::Instantaneous, epsilon)?;
    let cv = cv_decompose(supply, current)?;
    let period = u.period();
    let scale = (0..256)
        .map(|j| i.at(period * j as f64 / 256.0).norm())
        .fold(f64::MIN_POSITIVE, f64::max);
    let mut worst: f64 = 0.0;
    for j in 0..256 {
        let t = period * j as f64 / 256.0;
        let ga_p = geometric.parallel().values_at(t);
        let cv_p = cv.parallel_at(t);
        let ga_q = geometric.quadrature().values_at(t);
        let cv_q = cv.quadrature_at(t);
        for k in 0..3 {
            worst = worst.max((ga_p[k] - cv_p[k]).abs() / scale);
            worst = worst.max((ga_q[k] - cv_q[k]).abs() / scale);
        }
    }
    Ok(worst)
}

fn rel_delta(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

/// Built-in scenarios shipped with the library.
pub mod builtin {
    use super::Scenario;

    pub const ILLUSTRATION_1: &str = include_str!("../scenarios/illustration1.toml");
    pub const ILLUSTRATION_2: &str = include_str!("../scenarios/illustration2.toml");

    /// Names and sources of all built-in scenarios.
    pub fn all() -> Vec<(&'static str, &'static str)> {
        vec![
            ("illustration1", ILLUSTRATION_1),
            ("illustration2", ILLUSTRATION_2),
        ]
    }

    /// Look a built-in scenario up by name.
    pub fn by_name(name: &str) -> Option<Scenario> {
        all()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, source)| Scenario::from_toml(source).expect("built-in scenarios parse"))
    }
}
