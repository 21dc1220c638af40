//! Power analysis of electrical waveforms over geometric (Clifford)
//! algebra.
//!
//! Phase waveforms and their quadrature images are embedded as trajectories
//! of grade-1 multivectors; the geometric product of voltage and current
//! splits into a scalar (parallel) power and a bivector (quadrature) power,
//! and left-dividing by the voltage decomposes the current into parallel,
//! quadrature, Fryze, and Budeanu components with their complements. A
//! cross-vector instantaneous-reactive-power reference implementation and
//! an independent phasor circuit solver back every result.
//!
//! Module map:
//! - [`ga`] — sparse Euclidean Clifford algebra;
//! - [`signal`] — harmonic-series and sampled waveforms, quadrature
//!   transform;
//! - [`trajectory`] — geometric-domain embeddings and projections;
//! - [`engine`] — geometric power, current decomposition, power factor,
//!   compensation;
//! - [`sequence`] — symmetrical components;
//! - [`irp`] — cross-vector theory reference;
//! - [`circuit`] — per-harmonic phasor oracle for linear circuits;
//! - [`scenario`], [`report`] — scenario files, analysis driver, emitters.

pub mod circuit;
pub mod engine;
pub mod error;
pub mod ga;
pub mod irp;
pub mod report;
pub mod scenario;
pub mod sequence;
pub mod signal;
pub mod trajectory;

pub use circuit::{LinearCircuit, Phasor, SeriesRlc};
pub use engine::{
    compensate, decompose, geometric_power, power_factor, power_factor_from_power,
    AnalysisMode, CompensationStrategy, CurrentDecomposition, GeometricPower, RmsTable,
};
pub use error::{Error, Result};
pub use ga::{Blade, Multivector};
pub use irp::{cv_decompose, cv_powers, cv_spectrum_report, CvDecomposition, CvPowers};
pub use scenario::{
    analyze, analyze_with_artifacts, Scenario, ScenarioAnalysis, TheoryReport, TheorySelection,
};
pub use sequence::{sequence_split, spectrum_report, SequenceKind, SequenceSplit, SpectrumEntry};
pub use signal::{
    HarmonicSignal, HarmonicTerm, HilbertConvention, PolyphaseSignal, SampledSignal,
};
pub use trajectory::{GeometricTrajectory, ProjectedSignal, Waveform};
