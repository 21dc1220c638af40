//! Geometric-domain trajectories: time-dependent grade-1 multivectors.
//!
//! A polyphase waveform enters the geometric domain in one of two ways:
//!
//! * **averaged form** — each phase contributes two consecutive channels,
//!   the waveform and its quadrature image, giving dimension `2n`;
//! * **instantaneous form** — each phase is one channel, dimension `n`,
//!   with no quadrature channels (two phases minimum).
//!
//! Channels carry one of three representations. Closed harmonic forms stay
//! exact through sums and products; instantaneous division generally yields
//! a ratio of harmonic forms, kept as such and evaluated pointwise; sampled
//! channels live on a uniform grid over whole periods. Period means are
//! analytic for harmonic channels and spectrally convergent (iterated
//! trapezoid over the period) for rational ones.

use crate::error::{Error, Result};
use crate::ga::Multivector;
use crate::signal::{
    hilbert_samples, try_div_exact, HarmonicSignal, HilbertConvention, PolyphaseSignal,
    SampledSignal,
};

/// One trajectory channel.
#[derive(Debug, Clone)]
pub enum Waveform {
    /// Finite harmonic series.
    Harmonic(HarmonicSignal),
    /// Ratio of two harmonic series, evaluated pointwise. The denominator
    /// is bounded away from zero over the period (checked on construction
    /// by the decomposition).
    Rational { num: HarmonicSignal, den: HarmonicSignal },
    /// Uniform samples over whole fundamental periods.
    Sampled { sample_rate: f64, values: Vec<f64> },
}

impl Waveform {
    /// Divide two harmonic series: the closed form when the division is
    /// exact, the rational form otherwise.
    pub fn divide(num: HarmonicSignal, den: &HarmonicSignal) -> Waveform {
        match try_div_exact(&num, den) {
            Some(q) => Waveform::Harmonic(q),
            None => Waveform::Rational { num, den: den.clone() },
        }
    }

    pub fn zero_like(&self, base_omega: f64) -> Waveform {
        match self {
            Waveform::Sampled { sample_rate, values } => Waveform::Sampled {
                sample_rate: *sample_rate,
                values: vec![0.0; values.len()],
            },
            _ => Waveform::Harmonic(HarmonicSignal::zero(base_omega)),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Waveform::Harmonic(s) => s.eval(t),
            Waveform::Rational { num, den } => num.eval(t) / den.eval(t),
            Waveform::Sampled { sample_rate, values } => {
                // linear interpolation with periodic wrap
                let n = values.len();
                let pos = (t * sample_rate).rem_euclid(n as f64);
                let j = pos.floor() as usize % n;
                let frac = pos - pos.floor();
                values[j] * (1.0 - frac) + values[(j + 1) % n] * frac
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> Waveform {
        match self {
            Waveform::Harmonic(s) => Waveform::Harmonic(s.scaled(factor)),
            Waveform::Rational { num, den } => {
                Waveform::Rational { num: num.scaled(factor), den: den.clone() }
            }
            Waveform::Sampled { sample_rate, values } => Waveform::Sampled {
                sample_rate: *sample_rate,
                values: values.iter().map(|v| v * factor).collect(),
            },
        }
    }

    pub fn add(&self, other: &Waveform) -> Waveform {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Waveform) -> Waveform {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Waveform, sign: f64) -> Waveform {
        use Waveform::*;
        match (self, other) {
            (Harmonic(a), Harmonic(b)) => {
                Harmonic(if sign < 0.0 { a.sub(b) } else { a.add(b) })
            }
            (Harmonic(a), Rational { num, den }) => Rational {
                num: a.mul(den).add(&num.scaled(sign)),
                den: den.clone(),
            },
            (Rational { num, den }, Harmonic(b)) => Rational {
                num: num.add(&b.mul(den).scaled(sign)),
                den: den.clone(),
            },
            (Rational { num: n1, den: d1 }, Rational { num: n2, den: d2 }) => {
                if d1 == d2 {
                    Rational { num: n1.add(&n2.scaled(sign)), den: d1.clone() }
                } else {
                    Rational {
                        num: n1.mul(d2).add(&n2.mul(d1).scaled(sign)),
                        den: d1.mul(d2),
                    }
                }
            }
            (Sampled { sample_rate, values }, other) => Sampled {
                sample_rate: *sample_rate,
                values: values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v + sign * other.eval(j as f64 / sample_rate))
                    .collect(),
            },
            (this, Sampled { sample_rate, values }) => Sampled {
                sample_rate: *sample_rate,
                values: values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| this.eval(j as f64 / sample_rate) + sign * v)
                    .collect(),
            },
        }
    }

    /// Pointwise product of two channels.
    pub fn mul(&self, other: &Waveform) -> Waveform {
        use Waveform::*;
        match (self, other) {
            (Harmonic(a), Harmonic(b)) => Harmonic(a.mul(b)),
            (Harmonic(a), Rational { num, den }) | (Rational { num, den }, Harmonic(a)) => {
                Rational { num: a.mul(num), den: den.clone() }
            }
            (Rational { num: n1, den: d1 }, Rational { num: n2, den: d2 }) => {
                Rational { num: n1.mul(n2), den: d1.mul(d2) }
            }
            (Sampled { sample_rate, values }, other)
            | (other, Sampled { sample_rate, values }) => Sampled {
                sample_rate: *sample_rate,
                values: values
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * other.eval(j as f64 / sample_rate))
                    .collect(),
            },
        }
    }

    /// Period mean of the pointwise product of two channels. Harmonic pairs
    /// are exact; pairs involving a rational channel use the iterated
    /// trapezoid rule, which converges geometrically for smooth periodic
    /// integrands; sampled pairs use the discrete mean on their grid.
    pub fn mean_product(&self, other: &Waveform, period: f64) -> f64 {
        use Waveform::*;
        match (self, other) {
            (Harmonic(a), Harmonic(b)) => a.mean_product(b),
            (Sampled { sample_rate, values }, other)
            | (other, Sampled { sample_rate, values }) => {
                let mut acc = 0.0;
                for (j, v) in values.iter().enumerate() {
                    acc += v * other.eval(j as f64 / sample_rate);
                }
                acc / values.len() as f64
            }
            _ => periodic_mean(|t| self.eval(t) * other.eval(t), period),
        }
    }

    /// Period mean of the channel itself.
    pub fn mean(&self, period: f64) -> f64 {
        match self {
            Waveform::Harmonic(s) => s.mean(),
            Waveform::Rational { .. } => periodic_mean(|t| self.eval(t), period),
            Waveform::Sampled { values, .. } => {
                values.iter().sum::<f64>() / values.len() as f64
            }
        }
    }

    pub fn rms(&self, period: f64) -> f64 {
        self.mean_product(self, period).sqrt()
    }

    /// The closed harmonic form, when this channel has one.
    pub fn as_harmonic(&self) -> Option<&HarmonicSignal> {
        match self {
            Waveform::Harmonic(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_sampled(&self) -> bool {
        matches!(self, Waveform::Sampled { .. })
    }
}

/// Trapezoid mean over one period with doubling until convergence; exact to
/// rounding for band-limited integrands and geometrically convergent for
/// smooth ones.
fn periodic_mean<F: Fn(f64) -> f64>(f: F, period: f64) -> f64 {
    let mut n = 512usize;
    let mean_at = |n: usize| -> f64 {
        let mut acc = 0.0;
        for j in 0..n {
            acc += f(period * j as f64 / n as f64);
        }
        acc / n as f64
    };
    let mut prev = mean_at(n);
    loop {
        n *= 2;
        let cur = mean_at(n);
        if (cur - prev).abs() <= 1e-13 * cur.abs().max(1e-30) || n >= (1 << 18) {
            return cur;
        }
        prev = cur;
    }
}

/// A time-dependent grade-1 multivector: one scalar channel per basis
/// direction.
#[derive(Debug, Clone)]
pub struct GeometricTrajectory {
    base_omega: f64,
    convention: HilbertConvention,
    channels: Vec<Waveform>,
}

impl GeometricTrajectory {
    pub fn new(
        base_omega: f64,
        convention: HilbertConvention,
        channels: Vec<Waveform>,
    ) -> GeometricTrajectory {
        assert!(!channels.is_empty(), "a trajectory needs at least one channel");
        GeometricTrajectory { base_omega, convention, channels }
    }

    pub fn dim(&self) -> usize {
        self.channels.len()
    }

    pub fn base_omega(&self) -> f64 {
        self.base_omega
    }

    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.base_omega
    }

    pub fn hilbert_convention(&self) -> HilbertConvention {
        self.convention
    }

    pub fn channels(&self) -> &[Waveform] {
        &self.channels
    }

    pub fn channel(&self, k: usize) -> &Waveform {
        &self.channels[k]
    }

    /// The grade-1 multivector at time `t`.
    pub fn at(&self, t: f64) -> Multivector {
        Multivector::from_vector(
            &self.channels.iter().map(|c| c.eval(t)).collect::<Vec<_>>(),
        )
    }

    /// Channel values at time `t`.
    pub fn values_at(&self, t: f64) -> Vec<f64> {
        self.channels.iter().map(|c| c.eval(t)).collect()
    }

    /// Geometric RMS norm: square root of the period mean of the squared
    /// vector norm.
    pub fn rms(&self) -> f64 {
        self.mean_inner(self).sqrt()
    }

    /// Period mean of the pointwise inner product with another trajectory.
    pub fn mean_inner(&self, other: &GeometricTrajectory) -> f64 {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        let period = self.period();
        self.channels
            .iter()
            .zip(&other.channels)
            .map(|(a, b)| a.mean_product(b, period))
            .sum()
    }

    pub fn scaled(&self, factor: f64) -> GeometricTrajectory {
        GeometricTrajectory {
            base_omega: self.base_omega,
            convention: self.convention,
            channels: self.channels.iter().map(|c| c.scaled(factor)).collect(),
        }
    }

    pub fn add(&self, other: &GeometricTrajectory) -> GeometricTrajectory {
        self.zip(other, Waveform::add)
    }

    pub fn sub(&self, other: &GeometricTrajectory) -> GeometricTrajectory {
        self.zip(other, Waveform::sub)
    }

    fn zip(
        &self,
        other: &GeometricTrajectory,
        op: impl Fn(&Waveform, &Waveform) -> Waveform,
    ) -> GeometricTrajectory {
        assert_eq!(self.dim(), other.dim(), "dimension mismatch");
        GeometricTrajectory {
            base_omega: self.base_omega,
            convention: self.convention,
            channels: self
                .channels
                .iter()
                .zip(&other.channels)
                .map(|(a, b)| op(a, b))
                .collect(),
        }
    }

    /// Componentwise quadrature transform, in the trajectory's convention.
    pub fn hilbert(&self) -> Result<GeometricTrajectory> {
        let channels = self
            .channels
            .iter()
            .map(|c| match c {
                Waveform::Harmonic(s) => Ok(Waveform::Harmonic(s.hilbert_with(self.convention)?)),
                Waveform::Sampled { sample_rate, values } => Ok(Waveform::Sampled {
                    sample_rate: *sample_rate,
                    values: hilbert_samples(values, self.convention),
                }),
                Waveform::Rational { .. } => Err(Error::NoClosedForm),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GeometricTrajectory {
            base_omega: self.base_omega,
            convention: self.convention,
            channels,
        })
    }

    /// Recover the time-domain polyphase waveform of an averaged-form
    /// trajectory: phase k is the channel at index 2k, quadrature channels
    /// are discarded.
    pub fn project_to_time(&self) -> Result<ProjectedSignal> {
        if self.dim() % 2 != 0 {
            return Err(Error::InvalidTrajectoryDimension {
                dim: self.dim(),
                context: "time projection (averaged form has an even dimension)",
            });
        }
        let odd_channels: Vec<&Waveform> = self.channels.iter().step_by(2).collect();
        let grid = odd_channels.iter().find_map(|c| match c {
            Waveform::Sampled { sample_rate, values } => Some((*sample_rate, values.len())),
            _ => None,
        });
        if let Some((rate, n)) = grid {
            // mixed representations evaluate onto the sampled grid
            let values: Vec<Vec<f64>> = odd_channels
                .iter()
                .map(|c| match c {
                    Waveform::Sampled { values, .. } => values.clone(),
                    other => (0..n).map(|j| other.eval(j as f64 / rate)).collect(),
                })
                .collect();
            let len = values[0].len();
            let period = self.period();
            let per_period = (rate * period).round().max(1.0) as usize;
            let signal = SampledSignal::new(
                self.base_omega,
                rate,
                (len / per_period) as u32,
                values,
            )?;
            return Ok(ProjectedSignal::Sampled(signal));
        }
        let phases = odd_channels
            .iter()
            .map(|c| c.as_harmonic().cloned().ok_or(Error::NoClosedForm))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProjectedSignal::Harmonic(PolyphaseSignal::new(phases)?))
    }

    /// Evaluate the time-domain phase waveforms on a uniform grid (averaged
    /// form keeps channels 0, 2, 4, ...; instantaneous form keeps all).
    pub fn sample_phases(&self, samples_per_period: usize, averaged: bool) -> Vec<Vec<f64>> {
        let period = self.period();
        let step = period / samples_per_period as f64;
        let stride = if averaged { 2 } else { 1 };
        self.channels
            .iter()
            .step_by(stride)
            .map(|c| (0..samples_per_period).map(|j| c.eval(step * j as f64)).collect())
            .collect()
    }

    /// All channels evaluated on a uniform grid.
    pub fn sample_channels(&self, samples_per_period: usize) -> Vec<Vec<f64>> {
        let period = self.period();
        let step = period / samples_per_period as f64;
        self.channels
            .iter()
            .map(|c| (0..samples_per_period).map(|j| c.eval(step * j as f64)).collect())
            .collect()
    }
}

/// Result of projecting a trajectory back to the time domain.
#[derive(Debug, Clone)]
pub enum ProjectedSignal {
    Harmonic(PolyphaseSignal),
    Sampled(SampledSignal),
}

impl ProjectedSignal {
    pub fn as_harmonic(&self) -> Option<&PolyphaseSignal> {
        match self {
            ProjectedSignal::Harmonic(p) => Some(p),
            ProjectedSignal::Sampled(_) => None,
        }
    }
}

impl PolyphaseSignal {
    /// Averaged-form geometric embedding: phase k lands in channel 2k and
    /// its quadrature image in channel 2k+1, giving dimension `2n`.
    /// Phases must be dc-free.
    pub fn to_geometric(&self) -> Result<GeometricTrajectory> {
        self.to_geometric_with(HilbertConvention::NegatedKernel)
    }

    pub fn to_geometric_with(&self, convention: HilbertConvention) -> Result<GeometricTrajectory> {
        let mut channels = Vec::with_capacity(2 * self.n_phases());
        for phase in self.phases() {
            let quadrature = phase.hilbert_with(convention)?;
            channels.push(Waveform::Harmonic(phase.clone()));
            channels.push(Waveform::Harmonic(quadrature));
        }
        Ok(GeometricTrajectory::new(self.base_omega(), convention, channels))
    }

    /// Instantaneous embedding: one channel per phase, no quadrature
    /// channels, dimension `n`. Single-phase systems are rejected; they
    /// admit no instantaneous treatment.
    pub fn to_geometric_instantaneous(&self) -> Result<GeometricTrajectory> {
        if self.n_phases() < 2 {
            return Err(Error::SinglePhaseInstantaneous);
        }
        let channels = self
            .phases()
            .iter()
            .map(|p| Waveform::Harmonic(p.clone()))
            .collect();
        Ok(GeometricTrajectory::new(
            self.base_omega(),
            HilbertConvention::NegatedKernel,
            channels,
        ))
    }
}

impl SampledSignal {
    /// Averaged-form geometric embedding of a sampled bundle.
    pub fn to_geometric(&self) -> Result<GeometricTrajectory> {
        self.to_geometric_with(HilbertConvention::NegatedKernel)
    }

    pub fn to_geometric_with(&self, convention: HilbertConvention) -> Result<GeometricTrajectory> {
        let mut channels = Vec::with_capacity(2 * self.n_phases());
        for values in self.channels() {
            channels.push(Waveform::Sampled {
                sample_rate: self.sample_rate(),
                values: values.clone(),
            });
            channels.push(Waveform::Sampled {
                sample_rate: self.sample_rate(),
                values: hilbert_samples(values, convention),
            });
        }
        Ok(GeometricTrajectory::new(self.base_omega(), convention, channels))
    }

    /// Instantaneous embedding of a sampled bundle.
    pub fn to_geometric_instantaneous(&self) -> Result<GeometricTrajectory> {
        if self.n_phases() < 2 {
            return Err(Error::SinglePhaseInstantaneous);
        }
        let channels = self
            .channels()
            .iter()
            .map(|values| Waveform::Sampled {
                sample_rate: self.sample_rate(),
                values: values.clone(),
            })
            .collect();
        Ok(GeometricTrajectory::new(
            self.base_omega(),
            HilbertConvention::NegatedKernel,
            channels,
        ))
    }
}
