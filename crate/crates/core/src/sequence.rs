//! Symmetrical components of three-phase quantities.
//!
//! The classical phasor transform with `a = exp(j 2 pi / 3)`:
//!
//! ```text
//! I0 = (IR +     IS +     IT) / 3
//! I+ = (IR +   a IS + a^2 IT) / 3
//! I- = (IR + a^2 IS +   a IT) / 3
//! ```
//!
//! applied per harmonic order. Trajectory splits treat each channel as its
//! own phasor set, so the zero/positive/negative parts always sum back to
//! the input channel by channel.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, NotThreePhase, Result};
use crate::signal::{HarmonicSignal, PolyphaseSignal};
use crate::trajectory::{GeometricTrajectory, Waveform};

/// Which symmetrical component an entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    Zero,
    Positive,
    Negative,
}

impl std::fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SequenceKind::Zero => write!(f, "zero"),
            SequenceKind::Positive => write!(f, "positive"),
            SequenceKind::Negative => write!(f, "negative"),
        }
    }
}

/// One row of a per-harmonic symmetrical-component table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub order: u32,
    pub sequence: SequenceKind,
    /// RMS magnitude of the component (per phase).
    pub magnitude: f64,
}

/// Zero, negative and positive sequence parts of a trajectory; the three sum
/// back to the input.
#[derive(Debug, Clone)]
pub struct SequenceSplit {
    pub zero: GeometricTrajectory,
    pub negative: GeometricTrajectory,
    pub positive: GeometricTrajectory,
}

fn rotator() -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0)
}

/// Fortescue transform of one phasor triple: (zero, positive, negative).
fn fortescue(r: Complex64, s: Complex64, t: Complex64) -> (Complex64, Complex64, Complex64) {
    let a = rotator();
    let a2 = a * a;
    (
        (r + s + t) / 3.0,
        (r + a * s + a2 * t) / 3.0,
        (r + a2 * s + a * t) / 3.0,
    )
}

/// Inverse transform: rebuild the (R, S, T) phasors of one component.
fn sequence_phasors(kind: SequenceKind, component: Complex64) -> [Complex64; 3] {
    let a = rotator();
    let a2 = a * a;
    match kind {
        SequenceKind::Zero => [component, component, component],
        SequenceKind::Positive => [component, a2 * component, a * component],
        SequenceKind::Negative => [component, a * component, a2 * component],
    }
}

/// Per-harmonic symmetrical-component magnitudes of a three-phase signal.
/// Components below `1e-9` of the largest magnitude are dropped, so a zero
/// signal yields an empty table and a balanced one a single entry per order.
pub fn spectrum_report(signal: &PolyphaseSignal) -> Result<Vec<SpectrumEntry>> {
    if signal.n_phases() != 3 {
        return Err(Error::NotThreePhase(NotThreePhase { phases: signal.n_phases() }));
    }
    let mut orders: Vec<u32> = signal.phases().iter().flat_map(|p| p.orders()).collect();
    orders.sort_unstable();
    orders.dedup();

    let mut raw: Vec<SpectrumEntry> = Vec::new();
    for &order in &orders {
        let [r, s, t] = [
            signal.phases()[0].phasor(order),
            signal.phases()[1].phasor(order),
            signal.phases()[2].phasor(order),
        ];
        let (zero, positive, negative) = fortescue(r, s, t);
        for (sequence, phasor) in [
            (SequenceKind::Zero, zero),
            (SequenceKind::Positive, positive),
            (SequenceKind::Negative, negative),
        ] {
            raw.push(SpectrumEntry {
                order,
                sequence,
                magnitude: phasor.norm() / std::f64::consts::SQRT_2,
            });
        }
    }
    let peak = raw.iter().map(|e| e.magnitude).fold(0.0, f64::max);
    raw.retain(|e| e.magnitude > 1e-9 * peak && e.magnitude > 0.0);
    Ok(raw)
}

/// Split a three-phase trajectory into its zero, negative and positive
/// sequence parts.
///
/// The trajectory must be three-phase (dimension 6 in averaged form or 3 in
/// instantaneous form), in closed harmonic form, and sinusoidal: a single
/// shared harmonic order. Channels are grouped by phase and transformed as
/// phasor triples, so quadrature channels keep their quadrature structure.
pub fn sequence_split(traj: &GeometricTrajectory) -> Result<SequenceSplit> {
    let dim = traj.dim();
    let (n_phases, stride) = match dim {
        6 => (3usize, 2usize),
        3 => (3usize, 1usize),
        _ => {
            return Err(Error::NotThreePhase(NotThreePhase {
                phases: if dim % 2 == 0 { dim / 2 } else { dim },
            }))
        }
    };

    let channels: Vec<&HarmonicSignal> = traj
        .channels()
        .iter()
        .map(|c| c.as_harmonic().ok_or(Error::NoClosedForm))
        .collect::<Result<_>>()?;

    let mut orders: Vec<u32> = channels.iter().flat_map(|c| c.orders()).collect();
    orders.sort_unstable();
    orders.dedup();
    if orders.len() > 1 {
        return Err(Error::MultiHarmonicUnsupported { orders });
    }
    let order = orders.first().copied().unwrap_or(1);

    // one phasor triple per channel slot (waveform chan, quadrature chan)
    let mut parts: [Vec<Waveform>; 3] =
        [Vec::with_capacity(dim), Vec::with_capacity(dim), Vec::with_capacity(dim)];
    for slot in 0..stride {
        let triple = [
            channels[slot].phasor(order),
            channels[stride + slot].phasor(order),
            channels[2 * stride + slot].phasor(order),
        ];
        let (zero, positive, negative) = fortescue(triple[0], triple[1], triple[2]);
        for (part, kind, component) in [
            (0usize, SequenceKind::Zero, zero),
            (1, SequenceKind::Negative, negative),
            (2, SequenceKind::Positive, positive),
        ] {
            let phasors = sequence_phasors(kind, component);
            for (phase, phasor) in phasors.iter().enumerate().take(n_phases) {
                let signal = if phasor.norm() == 0.0 {
                    HarmonicSignal::zero(traj.base_omega())
                } else {
                    HarmonicSignal::from_phasors(traj.base_omega(), &[(order, *phasor)])?
                };
                let index = phase * stride + slot;
                let wave = Waveform::Harmonic(signal);
                if parts[part].len() <= index {
                    parts[part].resize_with(index + 1, || {
                        Waveform::Harmonic(HarmonicSignal::zero(traj.base_omega()))
                    });
                }
                parts[part][index] = wave;
            }
        }
    }
    for part in &mut parts {
        part.resize_with(dim, || Waveform::Harmonic(HarmonicSignal::zero(traj.base_omega())));
    }

    let [zero_ch, negative_ch, positive_ch] = parts;
    let build = |channels: Vec<Waveform>| {
        GeometricTrajectory::new(traj.base_omega(), traj.hilbert_convention(), channels)
    };
    Ok(SequenceSplit {
        zero: build(zero_ch),
        negative: build(negative_ch),
        positive: build(positive_ch),
    })
}
