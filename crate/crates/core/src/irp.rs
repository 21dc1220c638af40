//! Cross-vector instantaneous reactive power theory for three-phase
//! systems.
//!
//! The reference against which the geometric decomposition is compared:
//! instantaneous power `p = u . i`, reactive vector `q = u x i`, and the
//! current split `i_p = (p / u.u) u`, `i_q = i - i_p`. Everything here is
//! plain per-phase waveform arithmetic; none of it touches the Clifford
//! layer, so agreement between the two is a real cross-check.

use crate::error::{Error, NotThreePhase, Result};
use crate::ga::EPSILON_SCALE;
use crate::sequence::{spectrum_report, SpectrumEntry};
use crate::signal::{HarmonicSignal, PolyphaseSignal};
use crate::trajectory::Waveform;

/// Instantaneous power quantities of the cross-vector theory.
#[derive(Debug, Clone)]
pub struct CvPowers {
    base_omega: f64,
    instantaneous_power: HarmonicSignal,
    reactive_vector: [HarmonicSignal; 3],
}

impl CvPowers {
    /// `p(t) = u_R i_R + u_S i_S + u_T i_T`, as a closed form.
    pub fn instantaneous_power(&self) -> &HarmonicSignal {
        &self.instantaneous_power
    }

    /// The components of `q(t) = u x i`, as closed forms.
    pub fn reactive_vector(&self) -> &[HarmonicSignal; 3] {
        &self.reactive_vector
    }

    pub fn power_at(&self, t: f64) -> f64 {
        self.instantaneous_power.eval(t)
    }

    pub fn reactive_vector_at(&self, t: f64) -> [f64; 3] {
        [
            self.reactive_vector[0].eval(t),
            self.reactive_vector[1].eval(t),
            self.reactive_vector[2].eval(t),
        ]
    }

    /// `q(t) = sqrt(q . q)`.
    pub fn reactive_norm_at(&self, t: f64) -> f64 {
        self.reactive_vector_at(t)
            .iter()
            .map(|q| q * q)
            .sum::<f64>()
            .sqrt()
    }

    /// Mean active power over a period.
    pub fn active_power(&self) -> f64 {
        self.instantaneous_power.mean()
    }

    pub fn base_omega(&self) -> f64 {
        self.base_omega
    }
}

fn require_three_phase(signal: &PolyphaseSignal) -> Result<()> {
    if signal.n_phases() != 3 {
        return Err(Error::NotThreePhase(NotThreePhase { phases: signal.n_phases() }));
    }
    Ok(())
}

/// Instantaneous power and reactive vector of a three-phase pair.
pub fn cv_powers(u: &PolyphaseSignal, i: &PolyphaseSignal) -> Result<CvPowers> {
    require_three_phase(u)?;
    require_three_phase(i)?;
    let [ur, us, ut] = [&u.phases()[0], &u.phases()[1], &u.phases()[2]];
    let [ir, is, it] = [&i.phases()[0], &i.phases()[1], &i.phases()[2]];

    let instantaneous_power = ur.mul(ir).add(&us.mul(is)).add(&ut.mul(it));
    let reactive_vector = [
        us.mul(it).sub(&ut.mul(is)),
        ut.mul(ir).sub(&ur.mul(it)),
        ur.mul(is).sub(&us.mul(ir)),
    ];
    Ok(CvPowers {
        base_omega: u.base_omega(),
        instantaneous_power,
        reactive_vector,
    })
}

/// The cross-vector current split. Components are closed harmonic forms when
/// the instantaneous division terminates, rational forms otherwise.
#[derive(Debug, Clone)]
pub struct CvDecomposition {
    base_omega: f64,
    parallel: [Waveform; 3],
    quadrature: [Waveform; 3],
}

impl CvDecomposition {
    pub fn parallel(&self) -> &[Waveform; 3] {
        &self.parallel
    }

    pub fn quadrature(&self) -> &[Waveform; 3] {
        &self.quadrature
    }

    pub fn parallel_at(&self, t: f64) -> [f64; 3] {
        [self.parallel[0].eval(t), self.parallel[1].eval(t), self.parallel[2].eval(t)]
    }

    pub fn quadrature_at(&self, t: f64) -> [f64; 3] {
        [
            self.quadrature[0].eval(t),
            self.quadrature[1].eval(t),
            self.quadrature[2].eval(t),
        ]
    }

    pub fn base_omega(&self) -> f64 {
        self.base_omega
    }

    fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.base_omega
    }

    /// Collective RMS of the parallel current.
    pub fn parallel_rms(&self) -> f64 {
        let period = self.period();
        self.parallel
            .iter()
            .map(|w| w.mean_product(w, period))
            .sum::<f64>()
            .sqrt()
    }

    /// Collective RMS of the quadrature current.
    pub fn quadrature_rms(&self) -> f64 {
        let period = self.period();
        self.quadrature
            .iter()
            .map(|w| w.mean_product(w, period))
            .sum::<f64>()
            .sqrt()
    }

    /// Closed-form polyphase signals, when both splits terminated.
    pub fn to_polyphase(&self) -> Option<(PolyphaseSignal, PolyphaseSignal)> {
        let collect = |waves: &[Waveform; 3]| -> Option<PolyphaseSignal> {
            let phases = waves
                .iter()
                .map(|w| w.as_harmonic().cloned())
                .collect::<Option<Vec<_>>>()?;
            PolyphaseSignal::new(phases).ok()
        };
        Some((collect(&self.parallel)?, collect(&self.quadrature)?))
    }
}

/// Split a three-phase current into `i_p = (p / u.u) u` and `i_q = i - i_p`.
///
/// The difference form for `i_q` is exact by construction; the cross-product
/// form `(q x u) / u.u` equals it identically and is exercised in tests.
pub fn cv_decompose(u: &PolyphaseSignal, i: &PolyphaseSignal) -> Result<CvDecomposition> {
    require_three_phase(u)?;
    require_three_phase(i)?;
    let powers = cv_powers(u, i)?;

    let mut norm_sq = u.phases()[0].mul(&u.phases()[0]);
    for phase in &u.phases()[1..] {
        norm_sq = norm_sq.add(&phase.mul(phase));
    }
    let threshold = EPSILON_SCALE * norm_sq.mean();
    if !norm_sq.mean().is_finite() || norm_sq.mean() <= 0.0 {
        return Err(Error::ZeroSignal { which: "voltage" });
    }

    let parallel: Vec<Waveform> = u
        .phases()
        .iter()
        .map(|phase| Waveform::divide(powers.instantaneous_power.mul(phase), &norm_sq))
        .collect();
    if parallel.iter().any(|w| matches!(w, Waveform::Rational { .. })) {
        let min = norm_sq.min_over_period();
        if min <= threshold {
            return Err(Error::NearZeroVoltage { min, threshold });
        }
    }

    let quadrature: Vec<Waveform> = i
        .phases()
        .iter()
        .zip(&parallel)
        .map(|(phase, ip)| Waveform::Harmonic(phase.clone()).sub(ip))
        .collect();

    let into_array = |mut v: Vec<Waveform>| -> [Waveform; 3] {
        let c = v.pop().unwrap();
        let b = v.pop().unwrap();
        let a = v.pop().unwrap();
        [a, b, c]
    };
    Ok(CvDecomposition {
        base_omega: u.base_omega(),
        parallel: into_array(parallel),
        quadrature: into_array(quadrature),
    })
}

/// Per-harmonic symmetrical-component table of a three-phase signal;
/// quantifies the distortion and asymmetry of cross-vector compensation
/// residuals.
pub fn cv_spectrum_report(signal: &PolyphaseSignal) -> Result<Vec<SpectrumEntry>> {
    require_three_phase(signal)?;
    spectrum_report(signal)
}
