//! Waveform representations: exact harmonic series and uniformly sampled
//! windows, plus the quadrature (Hilbert) transform in both forms.
//!
//! The analytic form is a finite trigonometric polynomial over multiples of a
//! base angular frequency. All period means on this path are computed from
//! coefficients (harmonic orthogonality), never by quadrature.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rustfft::{num_complex::Complex as FftComplex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold below which a harmonic coefficient produced by
/// arithmetic is treated as rounding noise and pruned.
const COEFF_PRUNE_REL: f64 = 1e-12;

/// Sign convention of the quadrature transform.
///
/// The default `NegatedKernel` convention maps `cos -> -sin` and
/// `sin -> cos` (the kernel carries a leading minus sign). `Textbook`
/// is the usual `cos -> sin`, `sin -> -cos` convention, exposed for
/// interoperability. Both square to minus the identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HilbertConvention {
    #[default]
    NegatedKernel,
    Textbook,
}

impl HilbertConvention {
    /// Phasor rotation applied per harmonic: `+j` for the negated kernel,
    /// `-j` for the textbook convention.
    fn rotation(self) -> Complex64 {
        match self {
            HilbertConvention::NegatedKernel => Complex64::new(0.0, 1.0),
            HilbertConvention::Textbook => Complex64::new(0.0, -1.0),
        }
    }
}

/// One harmonic of a waveform: `cos_amp cos(k w t) + sin_amp sin(k w t)`
/// with peak amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HarmonicTerm {
    pub order: u32,
    pub cos_amp: f64,
    pub sin_amp: f64,
}

impl HarmonicTerm {
    pub fn cosine(order: u32, amp: f64) -> HarmonicTerm {
        HarmonicTerm { order, cos_amp: amp, sin_amp: 0.0 }
    }

    pub fn sine(order: u32, amp: f64) -> HarmonicTerm {
        HarmonicTerm { order, cos_amp: 0.0, sin_amp: amp }
    }

    /// Peak-amplitude polar form `amp cos(k w t + phase)`.
    pub fn from_polar(order: u32, amp: f64, phase_rad: f64) -> HarmonicTerm {
        HarmonicTerm {
            order,
            cos_amp: amp * phase_rad.cos(),
            sin_amp: -amp * phase_rad.sin(),
        }
    }
}

/// A waveform as a finite sum of harmonics of one base angular frequency,
/// plus a dc offset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSignal {
    base_omega: f64,
    dc: f64,
    terms: Vec<HarmonicTerm>,
}

impl HarmonicSignal {
    /// The zero signal.
    pub fn zero(base_omega: f64) -> HarmonicSignal {
        HarmonicSignal { base_omega, dc: 0.0, terms: Vec::new() }
    }

    /// Build from terms; orders must be distinct and at least 1.
    pub fn new(base_omega: f64, terms: Vec<HarmonicTerm>) -> Result<HarmonicSignal> {
        if !(base_omega.is_finite() && base_omega > 0.0) {
            return Err(Error::InvalidBaseFrequency { omega: base_omega });
        }
        let mut seen = std::collections::BTreeSet::new();
        for term in &terms {
            if term.order == 0 {
                return Err(Error::ZeroHarmonicOrder);
            }
            if !seen.insert(term.order) {
                return Err(Error::DuplicateHarmonicOrder { order: term.order });
            }
        }
        let mut signal = HarmonicSignal { base_omega, dc: 0.0, terms };
        signal.normalize();
        Ok(signal)
    }

    /// Build with a dc offset.
    pub fn with_dc(base_omega: f64, dc: f64, terms: Vec<HarmonicTerm>) -> Result<HarmonicSignal> {
        let mut s = HarmonicSignal::new(base_omega, terms)?;
        s.dc = dc;
        Ok(s)
    }

    /// Single cosine `amp cos(order w t)`.
    pub fn cosine(base_omega: f64, order: u32, amp: f64) -> HarmonicSignal {
        HarmonicSignal::new(base_omega, vec![HarmonicTerm::cosine(order, amp)])
            .expect("single term is valid")
    }

    /// Single sine `amp sin(order w t)`.
    pub fn sine(base_omega: f64, order: u32, amp: f64) -> HarmonicSignal {
        HarmonicSignal::new(base_omega, vec![HarmonicTerm::sine(order, amp)])
            .expect("single term is valid")
    }

    pub fn base_omega(&self) -> f64 {
        self.base_omega
    }

    /// Fundamental period `2 pi / w`.
    pub fn period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.base_omega
    }

    pub fn dc(&self) -> f64 {
        self.dc
    }

    pub fn terms(&self) -> &[HarmonicTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.dc == 0.0 && self.terms.is_empty()
    }

    /// Highest harmonic order present (0 for a pure dc or zero signal).
    pub fn max_order(&self) -> u32 {
        self.terms.last().map_or(0, |t| t.order)
    }

    /// Orders with nonzero coefficients, ascending.
    pub fn orders(&self) -> Vec<u32> {
        self.terms.iter().map(|t| t.order).collect()
    }

    /// Value at time `t`.
    pub fn eval(&self, t: f64) -> f64 {
        let theta = self.base_omega * t;
        if self.terms.len() <= 2 {
            return self.dc
                + self
                    .terms
                    .iter()
                    .map(|term| {
                        let angle = term.order as f64 * theta;
                        term.cos_amp * angle.cos() + term.sin_amp * angle.sin()
                    })
                    .sum::<f64>();
        }
        // angle-addition recurrence: two transcendentals for any term count
        let (s1, c1) = theta.sin_cos();
        let (mut ck, mut sk) = (1.0f64, 0.0f64);
        let mut k = 0u32;
        let mut acc = self.dc;
        for term in &self.terms {
            while k < term.order {
                let c = ck * c1 - sk * s1;
                sk = sk * c1 + ck * s1;
                ck = c;
                k += 1;
            }
            acc += term.cos_amp * ck + term.sin_amp * sk;
        }
        acc
    }

    /// Root-mean-square value over one period:
    /// `sqrt(dc^2 + sum (cos_amp^2 + sin_amp^2) / 2)`.
    pub fn rms(&self) -> f64 {
        let harmonic: f64 = self
            .terms
            .iter()
            .map(|t| (t.cos_amp * t.cos_amp + t.sin_amp * t.sin_amp) / 2.0)
            .sum();
        (self.dc * self.dc + harmonic).sqrt()
    }

    /// Period mean (the dc coefficient).
    pub fn mean(&self) -> f64 {
        self.dc
    }

    pub fn scaled(&self, factor: f64) -> HarmonicSignal {
        let mut out = HarmonicSignal {
            base_omega: self.base_omega,
            dc: self.dc * factor,
            terms: self
                .terms
                .iter()
                .map(|t| HarmonicTerm {
                    order: t.order,
                    cos_amp: t.cos_amp * factor,
                    sin_amp: t.sin_amp * factor,
                })
                .collect(),
        };
        out.normalize();
        out
    }

    pub fn add(&self, other: &HarmonicSignal) -> HarmonicSignal {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &HarmonicSignal) -> HarmonicSignal {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &HarmonicSignal, sign: f64) -> HarmonicSignal {
        assert_eq!(
            self.base_omega, other.base_omega,
            "combining signals with different base frequencies"
        );
        let mut acc: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
        for t in &self.terms {
            let e = acc.entry(t.order).or_insert((0.0, 0.0));
            e.0 += t.cos_amp;
            e.1 += t.sin_amp;
        }
        for t in &other.terms {
            let e = acc.entry(t.order).or_insert((0.0, 0.0));
            e.0 += sign * t.cos_amp;
            e.1 += sign * t.sin_amp;
        }
        HarmonicSignal::from_accumulator(self.base_omega, self.dc + sign * other.dc, acc)
    }

    /// Pointwise product, expanded with the product-to-sum identities so the
    /// result stays a finite harmonic series (orders up to the sum of the
    /// operand orders).
    pub fn mul(&self, other: &HarmonicSignal) -> HarmonicSignal {
        assert_eq!(
            self.base_omega, other.base_omega,
            "multiplying signals with different base frequencies"
        );
        let mut dc = self.dc * other.dc;
        let mut acc: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
        let mut put = |order: i64, cos_amp: f64, sin_amp: f64| {
            // cos is even, sin is odd in the order
            let (order, cos_amp, sin_amp) =
                if order < 0 { (-order, cos_amp, -sin_amp) } else { (order, cos_amp, sin_amp) };
            if order == 0 {
                dc += cos_amp;
            } else {
                let e = acc.entry(order as u32).or_insert((0.0, 0.0));
                e.0 += cos_amp;
                e.1 += sin_amp;
            }
        };
        for t in &self.terms {
            put(t.order as i64, other.dc * t.cos_amp, other.dc * t.sin_amp);
        }
        for u in &other.terms {
            put(u.order as i64, self.dc * u.cos_amp, self.dc * u.sin_amp);
        }
        for t in &self.terms {
            for u in &other.terms {
                let (k, l) = (t.order as i64, u.order as i64);
                let (a1, b1) = (t.cos_amp, t.sin_amp);
                let (a2, b2) = (u.cos_amp, u.sin_amp);
                // cos k cos l = [cos(k-l) + cos(k+l)] / 2
                put(k - l, a1 * a2 / 2.0, 0.0);
                put(k + l, a1 * a2 / 2.0, 0.0);
                // cos k sin l = [sin(k+l) - sin(k-l)] / 2
                put(k + l, 0.0, a1 * b2 / 2.0);
                put(k - l, 0.0, -a1 * b2 / 2.0);
                // sin k cos l = [sin(k+l) + sin(k-l)] / 2
                put(k + l, 0.0, b1 * a2 / 2.0);
                put(k - l, 0.0, b1 * a2 / 2.0);
                // sin k sin l = [cos(k-l) - cos(k+l)] / 2
                put(k - l, b1 * b2 / 2.0, 0.0);
                put(k + l, -b1 * b2 / 2.0, 0.0);
            }
        }
        HarmonicSignal::from_accumulator(self.base_omega, dc, acc)
    }

    /// Period mean of the pointwise product, from coefficients alone.
    pub fn mean_product(&self, other: &HarmonicSignal) -> f64 {
        assert_eq!(self.base_omega, other.base_omega);
        let mut mean = self.dc * other.dc;
        let mut iter = other.terms.iter().peekable();
        for t in &self.terms {
            while let Some(u) = iter.peek() {
                if u.order < t.order {
                    iter.next();
                } else {
                    break;
                }
            }
            if let Some(u) = iter.peek() {
                if u.order == t.order {
                    mean += (t.cos_amp * u.cos_amp + t.sin_amp * u.sin_amp) / 2.0;
                }
            }
        }
        mean
    }

    /// Quadrature transform in the default (negated-kernel) convention:
    /// `cos(k w t) -> -sin(k w t)` and `sin(k w t) -> cos(k w t)`.
    /// Applying it twice negates the signal. A nonzero dc offset is
    /// rejected because dc has no quadrature counterpart.
    pub fn hilbert(&self) -> Result<HarmonicSignal> {
        self.hilbert_with(HilbertConvention::NegatedKernel)
    }

    /// Quadrature transform with an explicit sign convention.
    pub fn hilbert_with(&self, convention: HilbertConvention) -> Result<HarmonicSignal> {
        if self.dc != 0.0 {
            return Err(Error::NonzeroDcComponent { dc: self.dc });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| match convention {
                // a cos + b sin -> -a sin + b cos
                HilbertConvention::NegatedKernel => HarmonicTerm {
                    order: t.order,
                    cos_amp: t.sin_amp,
                    sin_amp: -t.cos_amp,
                },
                // a cos + b sin -> a sin - b cos
                HilbertConvention::Textbook => HarmonicTerm {
                    order: t.order,
                    cos_amp: -t.sin_amp,
                    sin_amp: t.cos_amp,
                },
            })
            .collect();
        Ok(HarmonicSignal { base_omega: self.base_omega, dc: 0.0, terms })
    }

    /// Complex peak phasor of one harmonic order with cosine reference:
    /// `x(t) = Re[p exp(j k w t)]` gives `p = cos_amp - j sin_amp`.
    pub fn phasor(&self, order: u32) -> Complex64 {
        self.terms
            .iter()
            .find(|t| t.order == order)
            .map_or(Complex64::new(0.0, 0.0), |t| Complex64::new(t.cos_amp, -t.sin_amp))
    }

    /// Rebuild a term from a peak phasor (cosine reference).
    pub fn from_phasors(base_omega: f64, phasors: &[(u32, Complex64)]) -> Result<HarmonicSignal> {
        let terms = phasors
            .iter()
            .map(|&(order, p)| HarmonicTerm { order, cos_amp: p.re, sin_amp: -p.im })
            .collect();
        HarmonicSignal::new(base_omega, terms)
    }

    /// Minimum of the signal over one period, located by dense scanning with
    /// local refinement. Used for singularity checks, where the threshold
    /// decision tolerates small location error.
    pub fn min_over_period(&self) -> f64 {
        let samples = (64 * self.max_order().max(1) as usize).max(1024);
        let period = self.period();
        let mut best = f64::INFINITY;
        let mut best_t = 0.0;
        for j in 0..samples {
            let t = period * j as f64 / samples as f64;
            let v = self.eval(t);
            if v < best {
                best = v;
                best_t = t;
            }
        }
        // golden-section refinement around the best sample
        let mut lo = best_t - period / samples as f64;
        let mut hi = best_t + period / samples as f64;
        for _ in 0..60 {
            let m1 = lo + (hi - lo) * 0.381966;
            let m2 = hi - (hi - lo) * 0.381966;
            if self.eval(m1) < self.eval(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        best.min(self.eval(0.5 * (lo + hi)))
    }

    /// Maximum absolute coefficient (including dc).
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .flat_map(|t| [t.cos_amp.abs(), t.sin_amp.abs()])
            .fold(self.dc.abs(), f64::max)
    }

    fn from_accumulator(
        base_omega: f64,
        dc: f64,
        acc: BTreeMap<u32, (f64, f64)>,
    ) -> HarmonicSignal {
        let terms = acc
            .into_iter()
            .map(|(order, (cos_amp, sin_amp))| HarmonicTerm { order, cos_amp, sin_amp })
            .collect();
        let mut out = HarmonicSignal { base_omega, dc, terms };
        out.normalize();
        out
    }

    /// Sort terms, drop rounding noise relative to the largest coefficient.
    fn normalize(&mut self) {
        self.terms.sort_by_key(|t| t.order);
        let scale = self.max_abs_coefficient();
        if scale == 0.0 {
            self.terms.clear();
            self.dc = 0.0;
            return;
        }
        let cutoff = COEFF_PRUNE_REL * scale;
        for t in &mut self.terms {
            if t.cos_amp.abs() <= cutoff {
                t.cos_amp = 0.0;
            }
            if t.sin_amp.abs() <= cutoff {
                t.sin_amp = 0.0;
            }
        }
        if self.dc.abs() <= cutoff {
            self.dc = 0.0;
        }
        self.terms.retain(|t| t.cos_amp != 0.0 || t.sin_amp != 0.0);
    }
}

/// Exact division of one harmonic signal by another, when the quotient is
/// itself a finite harmonic series.
///
/// Both operands are viewed as Laurent polynomials in `z = exp(j w t)`; long
/// division with a near-zero remainder certifies the closed form. Returns
/// `None` when the quotient is genuinely rational (the caller then keeps the
/// numerator/denominator pair and evaluates pointwise).
pub fn try_div_exact(num: &HarmonicSignal, den: &HarmonicSignal) -> Option<HarmonicSignal> {
    assert_eq!(num.base_omega, den.base_omega);
    if num.is_zero() {
        return Some(HarmonicSignal::zero(num.base_omega));
    }
    if den.is_zero() {
        return None;
    }
    if den.terms.is_empty() {
        // constant denominator
        return Some(num.scaled(1.0 / den.dc));
    }

    let kn = num.max_order() as i64;
    let kd = den.max_order() as i64;
    if kn < kd {
        return None;
    }

    // Laurent coefficients c[-K..K] packed into a vec of length 2K+1,
    // shifted by z^K into an ordinary polynomial.
    fn laurent(signal: &HarmonicSignal, k: i64) -> Vec<Complex64> {
        let mut c = vec![Complex64::new(0.0, 0.0); (2 * k + 1) as usize];
        c[k as usize] = Complex64::new(signal.dc, 0.0);
        for t in &signal.terms {
            let half = Complex64::new(t.cos_amp / 2.0, -t.sin_amp / 2.0);
            c[(k + t.order as i64) as usize] = half;
            c[(k - t.order as i64) as usize] = half.conj();
        }
        c
    }

    let n_poly = laurent(num, kn);
    let d_poly = laurent(den, kd);
    let lead = *d_poly.last().expect("nonempty denominator");
    if lead.norm() < 1e-300 {
        return None;
    }

    // long division n_poly / d_poly
    let q_len = n_poly.len() - d_poly.len() + 1;
    let mut rem = n_poly;
    let mut quot = vec![Complex64::new(0.0, 0.0); q_len];
    for i in (0..q_len).rev() {
        let coef = rem[i + d_poly.len() - 1] / lead;
        quot[i] = coef;
        for (j, d) in d_poly.iter().enumerate() {
            rem[i + j] -= coef * d;
        }
    }

    let num_scale = num.max_abs_coefficient().max(f64::MIN_POSITIVE);
    let rem_max = rem.iter().map(|c| c.norm()).fold(0.0, f64::max);
    if rem_max > 1e-8 * num_scale {
        return None;
    }

    // quotient is z^(kn - kd) * Q(z); undo the shift and fold conjugate
    // pairs (each positive order collects half its amplitude from both
    // sides, and any asymmetry is caught by the re-multiplication below)
    let kq = kn - kd;
    let dc = quot[kq as usize].re;
    let mut acc: BTreeMap<u32, (f64, f64)> = BTreeMap::new();
    for (i, &c) in quot.iter().enumerate() {
        let order = i as i64 - kq;
        if order == 0 {
            continue;
        }
        let (order, c) = if order < 0 { (-order, c.conj()) } else { (order, c) };
        let e = acc.entry(order as u32).or_insert((0.0, 0.0));
        e.0 += c.re;
        e.1 += -c.im;
    }
    let quotient = HarmonicSignal::from_accumulator(num.base_omega, dc, acc);

    // confirm by re-multiplication before trusting the closed form
    let back = quotient.mul(den);
    let diff = back.sub(num);
    if diff.max_abs_coefficient() > 1e-8 * num_scale {
        return None;
    }
    Some(quotient)
}

/// An ordered bundle of phase waveforms sharing one base frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyphaseSignal {
    phases: Vec<HarmonicSignal>,
}

impl PolyphaseSignal {
    pub fn new(phases: Vec<HarmonicSignal>) -> Result<PolyphaseSignal> {
        let first = phases.first().ok_or(Error::EmptySignal)?;
        let omega = first.base_omega();
        for p in &phases {
            if p.base_omega() != omega {
                return Err(Error::MixedBaseFrequency { left: omega, right: p.base_omega() });
            }
        }
        Ok(PolyphaseSignal { phases })
    }

    /// Single-phase bundle.
    pub fn single(phase: HarmonicSignal) -> PolyphaseSignal {
        PolyphaseSignal { phases: vec![phase] }
    }

    pub fn n_phases(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[HarmonicSignal] {
        &self.phases
    }

    pub fn base_omega(&self) -> f64 {
        self.phases[0].base_omega()
    }

    pub fn period(&self) -> f64 {
        self.phases[0].period()
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        self.phases.iter().map(|p| p.eval(t)).collect()
    }

    pub fn is_dc_free(&self) -> bool {
        self.phases.iter().all(|p| p.dc() == 0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.phases.iter().all(|p| p.is_zero())
    }

    /// Collective RMS: square root of the sum of per-phase squared RMS values.
    pub fn rms(&self) -> f64 {
        self.phases.iter().map(|p| p.rms() * p.rms()).sum::<f64>().sqrt()
    }

    /// Largest harmonic order over all phases.
    pub fn max_order(&self) -> u32 {
        self.phases.iter().map(|p| p.max_order()).max().unwrap_or(0)
    }

    /// Uniformly sample the bundle over whole periods.
    pub fn sample(&self, samples_per_period: usize, periods: u32) -> SampledSignal {
        let period = self.period();
        let n = samples_per_period * periods as usize;
        let channels = self
            .phases
            .iter()
            .map(|p| {
                (0..n)
                    .map(|j| p.eval(period * j as f64 / samples_per_period as f64))
                    .collect()
            })
            .collect();
        SampledSignal::new(
            self.base_omega(),
            samples_per_period as f64 / period,
            periods,
            channels,
        )
        .expect("constructed grid covers whole periods")
    }
}

/// A uniformly sampled waveform bundle covering a whole number of
/// fundamental periods.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    base_omega: f64,
    sample_rate: f64,
    periods: u32,
    channels: Vec<Vec<f64>>,
}

impl SampledSignal {
    pub fn new(
        base_omega: f64,
        sample_rate: f64,
        periods: u32,
        channels: Vec<Vec<f64>>,
    ) -> Result<SampledSignal> {
        if !(base_omega.is_finite() && base_omega > 0.0) {
            return Err(Error::InvalidBaseFrequency { omega: base_omega });
        }
        if channels.is_empty() {
            return Err(Error::EmptySignal);
        }
        let period = 2.0 * std::f64::consts::PI / base_omega;
        let per_period = (sample_rate * period).round() as usize;
        let expected = per_period * periods as usize;
        let len = channels[0].len();
        let window_ok = per_period > 0
            && ((sample_rate * period) - per_period as f64).abs() < 1e-6 * per_period as f64
            && len == expected;
        if !window_ok {
            return Err(Error::NonIntegerPeriodWindow {
                samples: len,
                sample_rate,
                expected,
            });
        }
        if channels.iter().any(|c| c.len() != len) {
            return Err(Error::SampleGridMismatch);
        }
        Ok(SampledSignal { base_omega, sample_rate, periods, channels })
    }

    pub fn base_omega(&self) -> f64 {
        self.base_omega
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn periods_covered(&self) -> u32 {
        self.periods
    }

    pub fn n_phases(&self) -> usize {
        self.channels.len()
    }

    pub fn len(&self) -> usize {
        self.channels[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |j| j as f64 / self.sample_rate)
    }

    /// Parse a sampled bundle from CSV with header `t,phase1,phase2,...`
    /// (seconds, SI units). Samples must be uniform from t = 0 and cover a
    /// whole number of periods of `base_omega`.
    pub fn from_csv(source: &str, base_omega: f64) -> Result<SampledSignal> {
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(source.as_bytes());
        let n_columns = reader
            .headers()
            .map_err(|e| Error::WaveformCsv(e.to_string()))?
            .len();
        if n_columns < 2 {
            return Err(Error::WaveformCsv(
                "expected a time column and at least one phase column".into(),
            ));
        }
        let mut times = Vec::new();
        let mut channels: Vec<Vec<f64>> = vec![Vec::new(); n_columns - 1];
        for record in reader.records() {
            let record = record.map_err(|e| Error::WaveformCsv(e.to_string()))?;
            let mut fields = record.iter().map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::WaveformCsv(format!("bad number {f:?}: {e}")))
            });
            times.push(fields.next().ok_or_else(|| {
                Error::WaveformCsv("missing time field".into())
            })??);
            for channel in channels.iter_mut() {
                channel.push(fields.next().ok_or_else(|| {
                    Error::WaveformCsv("row shorter than header".into())
                })??);
            }
        }
        if times.len() < 2 {
            return Err(Error::WaveformCsv("need at least two samples".into()));
        }
        let dt = times[1] - times[0];
        if !(dt > 0.0) {
            return Err(Error::WaveformCsv("time column must be increasing".into()));
        }
        for (j, pair) in times.windows(2).enumerate() {
            if ((pair[1] - pair[0]) - dt).abs() > 1e-9 * dt {
                return Err(Error::WaveformCsv(format!(
                    "non-uniform sample spacing at row {}",
                    j + 2
                )));
            }
        }
        let sample_rate = 1.0 / dt;
        let period = 2.0 * std::f64::consts::PI / base_omega;
        let periods = (times.len() as f64 / (sample_rate * period)).round().max(1.0) as u32;
        SampledSignal::new(base_omega, sample_rate, periods, channels)
    }

    /// Render as CSV with header `t,phase1,phase2,...`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t");
        for k in 0..self.n_phases() {
            out.push_str(&format!(",phase{}", k + 1));
        }
        out.push('\n');
        for j in 0..self.len() {
            out.push_str(&format!("{:.16e}", j as f64 / self.sample_rate));
            for channel in &self.channels {
                out.push_str(&format!(",{:.16e}", channel[j]));
            }
            out.push('\n');
        }
        out
    }

    /// Discrete quadrature transform of every channel (negated-kernel
    /// convention), via the analytic-signal construction in the frequency
    /// domain.
    pub fn hilbert(&self) -> SampledSignal {
        self.hilbert_with(HilbertConvention::NegatedKernel)
    }

    pub fn hilbert_with(&self, convention: HilbertConvention) -> SampledSignal {
        let channels = self
            .channels
            .iter()
            .map(|c| hilbert_samples(c, convention))
            .collect();
        SampledSignal {
            base_omega: self.base_omega,
            sample_rate: self.sample_rate,
            periods: self.periods,
            channels,
        }
    }
}

/// Discrete quadrature transform of one full-period window.
///
/// Rotates positive-frequency bins by the convention's phasor factor and
/// negative-frequency bins by its conjugate; dc and Nyquist carry no
/// quadrature content and are zeroed.
pub fn hilbert_samples(values: &[f64], convention: HilbertConvention) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    let mut buf: Vec<FftComplex<f64>> =
        values.iter().map(|&v| FftComplex::new(v, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);

    let rot = convention.rotation();
    let rot = FftComplex::new(rot.re, rot.im);
    buf[0] = FftComplex::new(0.0, 0.0);
    let half = n / 2;
    for (k, value) in buf.iter_mut().enumerate().skip(1) {
        if n % 2 == 0 && k == half {
            *value = FftComplex::new(0.0, 0.0);
        } else if k < half || (n % 2 == 1 && k == half) {
            *value *= rot;
        } else {
            *value *= rot.conj();
        }
    }

    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}
