//! Crate-wide error type.

/// Errors produced by the algebra, signal and analysis layers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Two operands live in spaces of different dimension.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// An operation defined for grade-1 multivectors received mixed grades.
    #[error("expected a pure grade-1 multivector")]
    NotAVector,

    /// Inverting a vector whose squared norm sits below the singularity threshold.
    #[error("vector squared norm {norm_sq:.3e} is below the singularity threshold {threshold:.3e}")]
    NearZeroVector { norm_sq: f64, threshold: f64 },

    /// The squared voltage norm vanishes somewhere in the analysis window, so
    /// the instantaneous division is undefined there.
    #[error("voltage squared norm falls to {min:.3e} (threshold {threshold:.3e}); \
             instantaneous decomposition is singular")]
    NearZeroVoltage { min: f64, threshold: f64 },

    /// A signal carries a dc offset where none is representable.
    #[error("signal has a nonzero dc component ({dc}); the quadrature transform of dc is undefined")]
    NonzeroDcComponent { dc: f64 },

    /// Two harmonic terms with the same order in one signal.
    #[error("duplicate harmonic order {order}")]
    DuplicateHarmonicOrder { order: u32 },

    /// A harmonic term with order zero.
    #[error("harmonic order must be at least 1")]
    ZeroHarmonicOrder,

    /// Phases of a polyphase signal disagree on the base angular frequency.
    #[error("phases must share the base angular frequency ({left} vs {right} rad/s)")]
    MixedBaseFrequency { left: f64, right: f64 },

    /// A polyphase signal with no phases.
    #[error("a polyphase signal needs at least one phase")]
    EmptySignal,

    /// A nonpositive or non-finite base angular frequency.
    #[error("base angular frequency must be positive and finite, got {omega}")]
    InvalidBaseFrequency { omega: f64 },

    /// Sample window does not cover a whole number of fundamental periods.
    #[error("sample window must cover an integer number of fundamental periods \
             (got {samples} samples at {sample_rate} Hz for {expected} per window)")]
    NonIntegerPeriodWindow {
        samples: usize,
        sample_rate: f64,
        expected: usize,
    },

    /// Single-phase systems admit no instantaneous (Hilbert-free) treatment.
    #[error("single-phase systems cannot be analysed instantaneously; use the averaged mode")]
    SinglePhaseInstantaneous,

    /// An operation restricted to three-phase systems received something else.
    /// For one phase the cross-product reactive vector is identically zero.
    #[error("{0}")]
    NotThreePhase(NotThreePhase),

    /// Sequence decomposition is implemented for single-harmonic signals only.
    #[error("sequence split supports single-harmonic signals, found orders {orders:?}")]
    MultiHarmonicUnsupported { orders: Vec<u32> },

    /// A trajectory dimension incompatible with the requested analysis mode.
    #[error("trajectory dimension {dim} is invalid for {context}")]
    InvalidTrajectoryDimension { dim: usize, context: &'static str },

    /// A trajectory channel has no closed harmonic form.
    #[error("trajectory has no closed harmonic form; sample it instead")]
    NoClosedForm,

    /// Power factor of a vanishing voltage or current is undefined.
    #[error("{which} RMS is zero; power factor is undefined")]
    ZeroSignal { which: &'static str },

    /// A circuit branch is (near-)resonant at a driven harmonic.
    #[error("branch impedance is resonant (|Z| = {magnitude:.3e}) at harmonic order {order}")]
    ResonantSingularity { order: u32, magnitude: f64 },

    /// Circuit and supply disagree on the number of phases.
    #[error("circuit expects {expected} phase(s), supply has {got}")]
    PhaseCountMismatch { expected: usize, got: usize },

    /// A circuit parameter outside its physical range.
    #[error("invalid circuit parameter: {0}")]
    InvalidCircuitParameter(String),

    /// Sampled operands on incompatible grids.
    #[error("sampled signals must share sample rate and length")]
    SampleGridMismatch,

    /// The total current cannot be both given explicitly and solved from a circuit.
    #[error("scenario validation failed:\n{}", format_issues(.0))]
    InvalidScenario(Vec<String>),

    /// Scenario file could not be parsed.
    #[error("scenario parse error: {0}")]
    ScenarioParse(String),

    /// Waveform CSV could not be parsed.
    #[error("waveform csv error: {0}")]
    WaveformCsv(String),

    /// The current theory selection does not apply to the scenario.
    #[error("{0}")]
    TheoryUnsupported(String),
}

/// Payload for [`Error::NotThreePhase`] with a tailored message for the
/// single-phase case.
#[derive(Debug, Clone, PartialEq)]
pub struct NotThreePhase {
    pub phases: usize,
}

impl std::fmt::Display for NotThreePhase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.phases == 1 {
            write!(
                f,
                "cross-vector theory cannot be applied to single-phase circuits: \
                 the reactive vector u x i is identically zero"
            )
        } else {
            write!(f, "expected a three-phase signal, got {} phases", self.phases)
        }
    }
}

fn format_issues(issues: &[String]) -> String {
    issues
        .iter()
        .map(|issue| format!("  - {issue}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub type Result<T> = std::result::Result<T, Error>;
