//! Geometric apparent power and the full current decomposition.
//!
//! The geometric product of the voltage and current trajectories splits into
//! a scalar wave (parallel power, carrying the instantaneous active power)
//! and a bivector wave (quadrature power). Left-dividing by the voltage
//! splits the current into a parallel part and a quadrature part; averaging
//! further splits those into the Fryze current plus its complement and the
//! Budeanu reactive current plus its complement:
//!
//! ```text
//! i = i_parallel + i_quadrature
//!   = (i_fryze + i_fryze_complement) + (i_budeanu + i_budeanu_complement)
//! ```
//!
//! Both the averaged form (quadrature channels present, dimension 2n) and
//! the instantaneous form (dimension n, no averaging of the projection) are
//! supported; the instantaneous form reproduces the cross-vector theory.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ga::{Blade, Multivector, EPSILON_SCALE};
use crate::signal::HarmonicSignal;
use crate::trajectory::{GeometricTrajectory, Waveform};

/// Whether the analysis runs on quadrature-embedded (averaged) trajectories
/// or on plain instantaneous ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnalysisMode {
    #[default]
    Averaged,
    Instantaneous,
}

impl AnalysisMode {
    /// The quadrature channels double every phase's energy, so averaged-form
    /// power means carry a factor of two relative to physical powers.
    pub fn energy_scale(self) -> f64 {
        match self {
            AnalysisMode::Averaged => 2.0,
            AnalysisMode::Instantaneous => 1.0,
        }
    }
}

/// Orientation applied to the Budeanu current so that its fundamental is
/// `+sin`-like for a net inductive load. With the canonical ascending blade
/// orientation, the in-plane mean `q_bar` of the quadrature power and the
/// quadrature voltage image point opposite ways; the factor `-1` makes the
/// Budeanu current the exact projection of the current onto the quadrature
/// voltage (a pure inductor then yields `i_budeanu = i`). Recorded in the
/// decomposition metadata.
pub const ORIENTATION_FACTOR: f64 = -1.0;

/// Time-dependent geometric power `M(t)` split into its scalar and bivector
/// parts, with period means and the derived physical powers.
#[derive(Debug, Clone)]
pub struct GeometricPower {
    mode: AnalysisMode,
    base_omega: f64,
    scalar_wave: Waveform,
    bivector_waves: BTreeMap<Blade, Waveform>,
    dim: usize,
    mean_scalar: f64,
    mean_bivector: Multivector,
    in_plane_mean: f64,
    active_power: f64,
    budeanu_reactive_power: f64,
}

impl GeometricPower {
    pub fn mode(&self) -> AnalysisMode {
        self.mode
    }

    pub fn base_omega(&self) -> f64 {
        self.base_omega
    }

    /// The parallel (scalar) power wave `M_p(t)`.
    pub fn scalar_wave(&self) -> &Waveform {
        &self.scalar_wave
    }

    /// The quadrature (bivector) power wave of one blade, if nonzero.
    pub fn bivector_wave(&self, blade: Blade) -> Option<&Waveform> {
        self.bivector_waves.get(&blade)
    }

    pub fn bivector_waves(&self) -> impl Iterator<Item = (Blade, &Waveform)> {
        self.bivector_waves.iter().map(|(&b, w)| (b, w))
    }

    pub fn scalar_at(&self, t: f64) -> f64 {
        self.scalar_wave.eval(t)
    }

    /// The bivector part `M_q(t)`.
    pub fn bivector_at(&self, t: f64) -> Multivector {
        let terms: Vec<(Blade, f64)> = self
            .bivector_waves
            .iter()
            .map(|(&b, w)| (b, w.eval(t)))
            .collect();
        Multivector::from_terms(self.dim, &terms)
    }

    /// The full geometric power `M(t) = M_p(t) + M_q(t)`.
    pub fn at(&self, t: f64) -> Multivector {
        let mut terms = vec![(Blade::SCALAR, self.scalar_wave.eval(t))];
        terms.extend(self.bivector_waves.iter().map(|(&b, w)| (b, w.eval(t))));
        Multivector::from_terms(self.dim, &terms)
    }

    /// Period mean of the parallel power.
    pub fn mean_scalar(&self) -> f64 {
        self.mean_scalar
    }

    /// Period mean of the quadrature power, as a bivector.
    pub fn mean_bivector(&self) -> &Multivector {
        &self.mean_bivector
    }

    /// Sum of the mean in-plane blade coefficients (the planes pairing each
    /// phase channel with its quadrature channel). Zero in instantaneous
    /// form, where no such planes exist.
    pub fn in_plane_mean(&self) -> f64 {
        self.in_plane_mean
    }

    /// Active power `P` in watts.
    pub fn active_power(&self) -> f64 {
        self.active_power
    }

    /// Budeanu reactive power `Q` in volt-amperes reactive.
    pub fn budeanu_reactive_power(&self) -> f64 {
        self.budeanu_reactive_power
    }

    /// RMS norm of the geometric power over a period,
    /// `sqrt(mean ||M(t)||^2)`.
    pub fn rms_norm(&self) -> f64 {
        let period = 2.0 * std::f64::consts::PI / self.base_omega;
        let mut acc = self.scalar_wave.mean_product(&self.scalar_wave, period);
        for w in self.bivector_waves.values() {
            acc += w.mean_product(w, period);
        }
        acc.sqrt()
    }
}

fn check_pair(u: &GeometricTrajectory, i: &GeometricTrajectory, mode: AnalysisMode) -> Result<()> {
    if u.dim() != i.dim() {
        return Err(Error::DimensionMismatch { left: u.dim(), right: i.dim() });
    }
    if mode == AnalysisMode::Averaged && u.dim() % 2 != 0 {
        return Err(Error::InvalidTrajectoryDimension {
            dim: u.dim(),
            context: "averaged analysis (quadrature-embedded trajectories have even dimension)",
        });
    }
    if u.base_omega() != i.base_omega() {
        return Err(Error::MixedBaseFrequency {
            left: u.base_omega(),
            right: i.base_omega(),
        });
    }
    Ok(())
}

/// Geometric power of a voltage/current trajectory pair:
/// `M(t) = u(t) i(t)`, scalar part from the channel-wise products, bivector
/// part from the antisymmetric channel pairs.
pub fn geometric_power(
    u: &GeometricTrajectory,
    i: &GeometricTrajectory,
    mode: AnalysisMode,
) -> Result<GeometricPower> {
    check_pair(u, i, mode)?;
    let dim = u.dim();
    let period = u.period();

    let mut scalar_wave = u.channel(0).mul(i.channel(0));
    for c in 1..dim {
        scalar_wave = scalar_wave.add(&u.channel(c).mul(i.channel(c)));
    }

    let mut bivector_waves = BTreeMap::new();
    for a in 0..dim {
        for b in (a + 1)..dim {
            let wave = u.channel(a).mul(i.channel(b)).sub(&u.channel(b).mul(i.channel(a)));
            bivector_waves.insert(Blade::from_axes(&[a, b]), wave);
        }
    }

    let mean_scalar = scalar_wave.mean(period);
    let mean_terms: Vec<(Blade, f64)> = bivector_waves
        .iter()
        .map(|(&blade, wave)| (blade, wave.mean(period)))
        .collect();
    let mean_bivector = Multivector::from_terms(dim, &mean_terms);

    let in_plane_mean = match mode {
        AnalysisMode::Averaged => (0..dim / 2)
            .map(|k| mean_bivector.coefficient(Blade::from_axes(&[2 * k, 2 * k + 1])))
            .sum(),
        AnalysisMode::Instantaneous => 0.0,
    };

    // the textbook quadrature convention mirrors the in-plane orientation;
    // reported reactive power stays inductive-positive either way
    let convention_sign = match u.hilbert_convention() {
        crate::signal::HilbertConvention::NegatedKernel => 1.0,
        crate::signal::HilbertConvention::Textbook => -1.0,
    };

    let scale = mode.energy_scale();
    Ok(GeometricPower {
        mode,
        base_omega: u.base_omega(),
        scalar_wave,
        bivector_waves,
        dim,
        mean_scalar,
        mean_bivector,
        in_plane_mean,
        active_power: mean_scalar / scale,
        budeanu_reactive_power: convention_sign * in_plane_mean / scale,
    })
}

/// Which current survives after compensation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompensationStrategy {
    /// Remove the quadrature current; the parallel current remains. Needs no
    /// energy storage but in general leaves a time-varying conductance.
    KeepParallel,
    /// Remove everything except the Fryze current, the voltage-proportional
    /// current carrying exactly the mean active power. Yields unity power
    /// factor by construction; requires active elements whenever the Fryze
    /// complement is nonzero.
    #[default]
    KeepFryze,
}

/// RMS amperes of each current component, in physical (per-phase collective)
/// terms: the geometric norm rescaled so that quadrature channels do not
/// double-count energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RmsTable {
    pub parallel: f64,
    pub quadrature: f64,
    pub fryze: f64,
    pub fryze_complement: f64,
    pub budeanu: f64,
    pub budeanu_complement: f64,
    pub total: f64,
}

/// The six named current components of a decomposition, their RMS table and
/// the geometric power they derive from.
#[derive(Debug, Clone)]
pub struct CurrentDecomposition {
    mode: AnalysisMode,
    voltage: GeometricTrajectory,
    total: GeometricTrajectory,
    parallel: GeometricTrajectory,
    quadrature: GeometricTrajectory,
    fryze: GeometricTrajectory,
    fryze_complement: GeometricTrajectory,
    budeanu: GeometricTrajectory,
    budeanu_complement: GeometricTrajectory,
    power: GeometricPower,
    rms: RmsTable,
    flagged_samples: usize,
}

impl CurrentDecomposition {
    pub fn mode(&self) -> AnalysisMode {
        self.mode
    }

    pub fn voltage(&self) -> &GeometricTrajectory {
        &self.voltage
    }

    /// The analysed total current.
    pub fn total(&self) -> &GeometricTrajectory {
        &self.total
    }

    /// `i_p`: current aligned with the instantaneous voltage.
    pub fn parallel(&self) -> &GeometricTrajectory {
        &self.parallel
    }

    /// `i_q`: current orthogonal to the instantaneous voltage.
    pub fn quadrature(&self) -> &GeometricTrajectory {
        &self.quadrature
    }

    /// `i_F`: voltage-proportional current carrying the mean active power.
    pub fn fryze(&self) -> &GeometricTrajectory {
        &self.fryze
    }

    /// `i_f`: remainder of the parallel current beyond the Fryze current.
    pub fn fryze_complement(&self) -> &GeometricTrajectory {
        &self.fryze_complement
    }

    /// `i_B`: quadrature-voltage-proportional current carrying the mean
    /// reactive power.
    pub fn budeanu(&self) -> &GeometricTrajectory {
        &self.budeanu
    }

    /// `i_b`: remainder of the quadrature current; carries unbalance and
    /// asymmetry.
    pub fn budeanu_complement(&self) -> &GeometricTrajectory {
        &self.budeanu_complement
    }

    pub fn power(&self) -> &GeometricPower {
        &self.power
    }

    pub fn rms(&self) -> &RmsTable {
        &self.rms
    }

    /// Orientation applied to the Budeanu current (see [`ORIENTATION_FACTOR`]).
    pub fn orientation_factor(&self) -> f64 {
        ORIENTATION_FACTOR
    }

    /// Number of singular samples (voltage zero-crossings) that were skipped
    /// and filled by interpolation on the sampled path.
    pub fn flagged_samples(&self) -> usize {
        self.flagged_samples
    }

    /// Component trajectories in presentation order, with their names.
    pub fn components(&self) -> [(&'static str, &GeometricTrajectory); 7] {
        [
            ("i_p", &self.parallel),
            ("i_q", &self.quadrature),
            ("i_F", &self.fryze),
            ("i_f", &self.fryze_complement),
            ("i_B", &self.budeanu),
            ("i_b", &self.budeanu_complement),
            ("i", &self.total),
        ]
    }
}

/// Split a current against its voltage into the six named components.
///
/// The parallel current divides the scalar power wave by the squared
/// voltage norm pointwise. On the closed-form path that division is carried
/// out exactly as a quotient of harmonic series whenever it terminates;
/// otherwise the quotient is kept in rational form, which requires the
/// squared voltage norm to stay above the singularity threshold over the
/// whole period. On the sampled path, samples at voltage zero-crossings are
/// flagged, skipped by the division and filled by interpolation.
pub fn decompose(
    u: &GeometricTrajectory,
    i: &GeometricTrajectory,
    mode: AnalysisMode,
) -> Result<CurrentDecomposition> {
    decompose_with(u, i, mode, EPSILON_SCALE)
}

/// [`decompose`] with an explicit singularity threshold scale (relative to
/// the mean squared voltage norm).
pub fn decompose_with(
    u: &GeometricTrajectory,
    i: &GeometricTrajectory,
    mode: AnalysisMode,
    epsilon_scale: f64,
) -> Result<CurrentDecomposition> {
    check_pair(u, i, mode)?;
    let power = geometric_power(u, i, mode)?;
    let period = u.period();
    let dim = u.dim();

    // squared voltage norm, pointwise
    let mut den = u.channel(0).mul(u.channel(0));
    for c in 1..dim {
        den = den.add(&u.channel(c).mul(u.channel(c)));
    }
    let mean_den = den.mean(period);
    let threshold = epsilon_scale * mean_den;
    if !mean_den.is_finite() || mean_den <= 0.0 {
        return Err(Error::ZeroSignal { which: "voltage" });
    }

    let (parallel_channels, flagged_samples) =
        divide_by_norm(u, power.scalar_wave(), &den, threshold)?;
    let parallel = GeometricTrajectory::new(u.base_omega(), u.hilbert_convention(), parallel_channels);
    let quadrature = i.sub(&parallel);

    let fryze = u.scaled(power.mean_scalar() / mean_den);
    let fryze_complement = parallel.sub(&fryze);

    let budeanu = match mode {
        AnalysisMode::Averaged => u
            .hilbert()?
            .scaled(ORIENTATION_FACTOR * power.in_plane_mean() / mean_den),
        // no quadrature channels to carry a mean reactive current
        AnalysisMode::Instantaneous => u.scaled(0.0),
    };
    let budeanu_complement = quadrature.sub(&budeanu);

    let scale = mode.energy_scale().sqrt();
    let rms = RmsTable {
        parallel: parallel.rms() / scale,
        quadrature: quadrature.rms() / scale,
        fryze: fryze.rms() / scale,
        fryze_complement: fryze_complement.rms() / scale,
        budeanu: budeanu.rms() / scale,
        budeanu_complement: budeanu_complement.rms() / scale,
        total: i.rms() / scale,
    };

    Ok(CurrentDecomposition {
        mode,
        voltage: u.clone(),
        total: i.clone(),
        parallel,
        quadrature,
        fryze,
        fryze_complement,
        budeanu,
        budeanu_complement,
        power,
        rms,
        flagged_samples,
    })
}

/// Channel-wise `(scalar_wave * u_c) / den`, returning the channels and the
/// number of flagged samples.
fn divide_by_norm(
    u: &GeometricTrajectory,
    scalar_wave: &Waveform,
    den: &Waveform,
    threshold: f64,
) -> Result<(Vec<Waveform>, usize)> {
    match den {
        Waveform::Harmonic(den_h) => {
            let numerators: Vec<HarmonicSignal> = u
                .channels()
                .iter()
                .map(|c| match (scalar_wave, c) {
                    (Waveform::Harmonic(m), Waveform::Harmonic(uc)) => Ok(m.mul(uc)),
                    _ => Err(Error::NoClosedForm),
                })
                .collect::<Result<_>>()?;
            let channels: Vec<Waveform> = numerators
                .into_iter()
                .map(|num| Waveform::divide(num, den_h))
                .collect();
            if channels.iter().any(|c| matches!(c, Waveform::Rational { .. })) {
                let min = den_h.min_over_period();
                if min <= threshold {
                    return Err(Error::NearZeroVoltage { min, threshold });
                }
            }
            Ok((channels, 0))
        }
        Waveform::Sampled { sample_rate, values: den_values } => {
            let n = den_values.len();
            let flagged: Vec<bool> = den_values.iter().map(|&d| d <= threshold).collect();
            let n_flagged = flagged.iter().filter(|&&f| f).count();
            if n_flagged == n {
                return Err(Error::NearZeroVoltage {
                    min: den_values.iter().cloned().fold(f64::INFINITY, f64::min),
                    threshold,
                });
            }
            let mp: Vec<f64> = (0..n)
                .map(|j| scalar_wave.eval(j as f64 / sample_rate))
                .collect();
            let channels = u
                .channels()
                .iter()
                .map(|c| {
                    let mut out: Vec<f64> = (0..n)
                        .map(|j| {
                            if flagged[j] {
                                0.0
                            } else {
                                mp[j] * c.eval(j as f64 / sample_rate) / den_values[j]
                            }
                        })
                        .collect();
                    fill_flagged(&mut out, &flagged);
                    Waveform::Sampled { sample_rate: *sample_rate, values: out }
                })
                .collect();
            Ok((channels, n_flagged))
        }
        Waveform::Rational { .. } => Err(Error::NoClosedForm),
    }
}

/// Replace flagged samples by linear interpolation between the nearest
/// unflagged neighbours (periodic).
fn fill_flagged(values: &mut [f64], flagged: &[bool]) {
    let n = values.len();
    for j in 0..n {
        if !flagged[j] {
            continue;
        }
        let mut left = j;
        let mut left_steps = 0usize;
        for step in 1..n {
            let k = (j + n - step) % n;
            if !flagged[k] {
                left = k;
                left_steps = step;
                break;
            }
        }
        let mut right = j;
        let mut right_steps = 0usize;
        for step in 1..n {
            let k = (j + step) % n;
            if !flagged[k] {
                right = k;
                right_steps = step;
                break;
            }
        }
        let total = (left_steps + right_steps) as f64;
        values[j] = values[left] * (right_steps as f64 / total)
            + values[right] * (left_steps as f64 / total);
    }
}

/// Geometric power factor: the mean parallel power over the product of the
/// geometric RMS norms of voltage and current.
pub fn power_factor(u: &GeometricTrajectory, i: &GeometricTrajectory) -> Result<f64> {
    if u.dim() != i.dim() {
        return Err(Error::DimensionMismatch { left: u.dim(), right: i.dim() });
    }
    let u_rms = u.rms();
    let i_rms = i.rms();
    if u_rms <= 0.0 {
        return Err(Error::ZeroSignal { which: "voltage" });
    }
    if i_rms <= 0.0 {
        return Err(Error::ZeroSignal { which: "current" });
    }
    Ok(u.mean_inner(i) / (u_rms * i_rms))
}

/// Power factor computed against the RMS norm of the geometric power wave
/// itself, `mean(M_p) / sqrt(mean ||M||^2)`. Reported alongside the primary
/// form for inspection; the two coincide when `||u(t)|| ||i(t)||` is
/// constant over the period.
pub fn power_factor_from_power(power: &GeometricPower) -> f64 {
    power.mean_scalar() / power.rms_norm()
}

/// Residual source current after compensation under the chosen strategy.
pub fn compensate(
    decomposition: &CurrentDecomposition,
    strategy: CompensationStrategy,
) -> GeometricTrajectory {
    match strategy {
        CompensationStrategy::KeepParallel => decomposition.parallel().clone(),
        CompensationStrategy::KeepFryze => decomposition.fryze().clone(),
    }
}
