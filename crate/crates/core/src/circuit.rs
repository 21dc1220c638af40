//! Per-harmonic phasor solver for linear branch circuits.
//!
//! This is the ground-truth side of every cross-check: currents and powers
//! are computed with complex phasor arithmetic only, sharing no code with
//! the geometric-algebra layer. Phasors use the RMS convention with cosine
//! reference, matching the `sqrt(2) U cos(wt)` notation of the waveforms.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{HarmonicSignal, PolyphaseSignal};

/// Complex RMS amplitude of one harmonic (cosine reference).
pub type Phasor = Complex64;

/// Relative threshold below which a branch impedance counts as resonant.
const RESONANCE_REL: f64 = 1e-9;

/// One series R-L-C branch; a missing capacitor means no capacitive element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesRlc {
    #[serde(default)]
    pub resistance: f64,
    #[serde(default)]
    pub inductance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacitance: Option<f64>,
}

impl SeriesRlc {
    pub fn resistor(resistance: f64) -> SeriesRlc {
        SeriesRlc { resistance, inductance: 0.0, capacitance: None }
    }

    fn validate(&self) -> Result<()> {
        if !(self.resistance >= 0.0 && self.resistance.is_finite()) {
            return Err(Error::InvalidCircuitParameter(format!(
                "resistance must be finite and nonnegative, got {}",
                self.resistance
            )));
        }
        if !(self.inductance >= 0.0 && self.inductance.is_finite()) {
            return Err(Error::InvalidCircuitParameter(format!(
                "inductance must be finite and nonnegative, got {}",
                self.inductance
            )));
        }
        if let Some(c) = self.capacitance {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidCircuitParameter(format!(
                    "capacitance must be finite and positive, got {c}"
                )));
            }
        }
        Ok(())
    }

    /// Branch impedance at angular frequency `omega`.
    pub fn impedance(&self, omega: f64) -> Complex64 {
        let mut z = Complex64::new(self.resistance, omega * self.inductance);
        if let Some(c) = self.capacitance {
            z += Complex64::new(0.0, -1.0 / (omega * c));
        }
        z
    }

    /// Scale of the constituent impedance magnitudes, for the resonance test.
    fn impedance_scale(&self, omega: f64) -> f64 {
        let mut scale = self.resistance + omega * self.inductance;
        if let Some(c) = self.capacitance {
            scale += 1.0 / (omega * c);
        }
        scale.max(f64::MIN_POSITIVE)
    }
}

/// A linear circuit in one of the supported topologies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearCircuit {
    /// A single series R-L-C branch across a single-phase supply.
    SeriesRlc(SeriesRlc),
    /// Star-connected per-phase branches. `None` is an open branch. With a
    /// neutral conductor each phase sees its own source voltage; without
    /// one, the star point floats and shifts by the admittance-weighted
    /// source average.
    Star {
        branches: Vec<Option<SeriesRlc>>,
        #[serde(default = "default_true")]
        neutral: bool,
    },
}

fn default_true() -> bool {
    true
}

impl LinearCircuit {
    pub fn n_phases(&self) -> usize {
        match self {
            LinearCircuit::SeriesRlc(_) => 1,
            LinearCircuit::Star { branches, .. } => branches.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            LinearCircuit::SeriesRlc(branch) => branch.validate(),
            LinearCircuit::Star { branches, .. } => {
                if branches.is_empty() {
                    return Err(Error::InvalidCircuitParameter(
                        "a star circuit needs at least one branch".into(),
                    ));
                }
                branches.iter().flatten().try_for_each(SeriesRlc::validate)
            }
        }
    }
}

/// RMS phasor of one harmonic order of a waveform (cosine reference):
/// `x(t) = sqrt(2) Re[X exp(j k w t)]`.
pub fn rms_phasor(signal: &HarmonicSignal, order: u32) -> Phasor {
    signal.phasor(order) / std::f64::consts::SQRT_2
}

/// Steady-state branch currents for a linear circuit under a periodic
/// supply, solved harmonic by harmonic: `I_k = U_k / Z(j k w)`.
pub fn solve_steady_state(
    circuit: &LinearCircuit,
    supply: &PolyphaseSignal,
) -> Result<PolyphaseSignal> {
    circuit.validate()?;
    if circuit.n_phases() != supply.n_phases() {
        return Err(Error::PhaseCountMismatch {
            expected: circuit.n_phases(),
            got: supply.n_phases(),
        });
    }
    if !supply.is_dc_free() {
        let dc = supply.phases().iter().map(|p| p.dc()).find(|&d| d != 0.0).unwrap_or(0.0);
        return Err(Error::NonzeroDcComponent { dc });
    }

    let omega = supply.base_omega();
    let orders: Vec<u32> = {
        let mut all: Vec<u32> = supply.phases().iter().flat_map(|p| p.orders()).collect();
        all.sort_unstable();
        all.dedup();
        all
    };

    let branch_current = |branch: &SeriesRlc, voltage: &HarmonicSignal| -> Result<Vec<(u32, Phasor)>> {
        orders
            .iter()
            .filter_map(|&k| {
                let u_k = rms_phasor(voltage, k);
                if u_k.norm() == 0.0 {
                    return None;
                }
                let z = branch.impedance(k as f64 * omega);
                if z.norm() < RESONANCE_REL * branch.impedance_scale(k as f64 * omega) {
                    return Some(Err(Error::ResonantSingularity { order: k, magnitude: z.norm() }));
                }
                Some(Ok((k, u_k / z)))
            })
            .collect()
    };

    let phasors_to_signal = |phasors: Vec<(u32, Phasor)>| -> Result<HarmonicSignal> {
        let peak: Vec<(u32, Complex64)> = phasors
            .into_iter()
            .map(|(k, p)| (k, p * std::f64::consts::SQRT_2))
            .collect();
        HarmonicSignal::from_phasors(omega, &peak)
    };

    match circuit {
        LinearCircuit::SeriesRlc(branch) => {
            let current = phasors_to_signal(branch_current(branch, &supply.phases()[0])?)?;
            Ok(PolyphaseSignal::single(current))
        }
        LinearCircuit::Star { branches, neutral: true } => {
            let phases = branches
                .iter()
                .zip(supply.phases())
                .map(|(branch, voltage)| match branch {
                    Some(b) => phasors_to_signal(branch_current(b, voltage)?),
                    None => Ok(HarmonicSignal::zero(omega)),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(PolyphaseSignal::new(phases)?)
        }
        LinearCircuit::Star { branches, neutral: false } => {
            // floating star point: V_n(k) = sum Y_i U_i / sum Y_i
            let mut phase_phasors: Vec<Vec<(u32, Phasor)>> = vec![Vec::new(); branches.len()];
            for &k in &orders {
                let w = k as f64 * omega;
                let admittances: Vec<Complex64> = branches
                    .iter()
                    .map(|b| match b {
                        Some(b) => {
                            let z = b.impedance(w);
                            if z.norm() < RESONANCE_REL * b.impedance_scale(w) {
                                Err(Error::ResonantSingularity { order: k, magnitude: z.norm() })
                            } else {
                                Ok(1.0 / z)
                            }
                        }
                        None => Ok(Complex64::new(0.0, 0.0)),
                    })
                    .collect::<Result<Vec<_>>>()?;
                let y_total: Complex64 = admittances.iter().sum();
                let star_shift = if y_total.norm() == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    supply
                        .phases()
                        .iter()
                        .zip(&admittances)
                        .map(|(u, y)| y * rms_phasor(u, k))
                        .sum::<Complex64>()
                        / y_total
                };
                for (i, (u, y)) in supply.phases().iter().zip(&admittances).enumerate() {
                    let current = y * (rms_phasor(u, k) - star_shift);
                    if current.norm() > 0.0 {
                        phase_phasors[i].push((k, current));
                    }
                }
            }
            let phases = phase_phasors
                .into_iter()
                .map(phasors_to_signal)
                .collect::<Result<Vec<_>>>()?;
            Ok(PolyphaseSignal::new(phases)?)
        }
    }
}

/// Active and Budeanu reactive power from phasors:
/// `P = sum Re(U conj(I))`, `Q = sum Im(U conj(I))` over phases and orders.
pub fn oracle_powers(voltage: &PolyphaseSignal, current: &PolyphaseSignal) -> (f64, f64) {
    let mut p = 0.0;
    let mut q = 0.0;
    for (u, i) in voltage.phases().iter().zip(current.phases()) {
        let mut orders = u.orders();
        orders.extend(i.orders());
        orders.sort_unstable();
        orders.dedup();
        for k in orders {
            let s = rms_phasor(u, k) * rms_phasor(i, k).conj();
            p += s.re;
            q += s.im;
        }
    }
    (p, q)
}
