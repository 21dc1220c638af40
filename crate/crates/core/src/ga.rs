//! Sparse Clifford-algebra arithmetic over an orthonormal Euclidean basis.
//!
//! Blades are keyed by a bitmask over the basis vectors e1..em (all squaring
//! to +1), with the canonical orientation taken as ascending index order.
//! Products normalise signs by counting the transpositions needed to sort the
//! concatenated index lists. Coefficients are plain `f64` carriers; units
//! (volts, amperes, volt-amperes) are attached by context.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Largest supported space dimension (bitmask width).
pub const MAX_DIMENSION: usize = 16;

/// Relative scale of the singularity threshold used when inverting vectors:
/// a vector is treated as numerically zero when its squared norm is below
/// `EPSILON_SCALE * (max coefficient magnitude)^2`. Shared by the geometric
/// and cross-vector decompositions so their singularity behaviour matches.
pub const EPSILON_SCALE: f64 = 1e-9;

/// One canonical basis blade, stored as a bitmask: bit k set means the basis
/// vector e(k+1) participates. The empty mask is the scalar blade.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Blade(u16);

impl Blade {
    /// The scalar (grade-0) blade.
    pub const SCALAR: Blade = Blade(0);

    /// Basis vector with 0-based index `axis`.
    pub fn basis_vector(axis: usize) -> Blade {
        assert!(axis < MAX_DIMENSION, "axis {axis} out of range");
        Blade(1 << axis)
    }

    /// Blade spanned by the given 0-based axes. The axes must be distinct;
    /// order does not matter because the canonical orientation is ascending.
    pub fn from_axes(axes: &[usize]) -> Blade {
        let mut mask = 0u16;
        for &axis in axes {
            assert!(axis < MAX_DIMENSION, "axis {axis} out of range");
            assert!(mask & (1 << axis) == 0, "duplicate axis {axis}");
            mask |= 1 << axis;
        }
        Blade(mask)
    }

    /// Number of basis vectors in the blade.
    pub fn grade(self) -> usize {
        self.0.count_ones() as usize
    }

    /// 0-based axes of the blade in ascending order.
    pub fn axes(self) -> Vec<usize> {
        (0..MAX_DIMENSION).filter(|k| self.0 & (1 << k) != 0).collect()
    }

    /// Whether every axis fits inside a space of dimension `dim`.
    pub fn fits(self, dim: usize) -> bool {
        dim >= MAX_DIMENSION || self.0 < (1u16 << dim)
    }

    fn mask(self) -> u16 {
        self.0
    }
}

impl fmt::Display for Blade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == 0 {
            return write!(f, "1");
        }
        write!(f, "e")?;
        for axis in self.axes() {
            write!(f, "{}", axis + 1)?;
        }
        Ok(())
    }
}

/// Sign of the permutation that sorts the concatenation of two canonical
/// blades: for each axis of `a`, count the axes of `b` it has to move past.
fn reorder_sign(a: u16, b: u16) -> f64 {
    let mut rest = a >> 1;
    let mut swaps = 0u32;
    while rest != 0 {
        swaps += (rest & b).count_ones();
        rest >>= 1;
    }
    if swaps % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Geometric product of two canonical blades in a Euclidean metric:
/// shared axes square to +1 and drop out, the rest merge with the
/// transposition sign.
pub fn blade_product(a: Blade, b: Blade) -> (f64, Blade) {
    (reorder_sign(a.mask(), b.mask()), Blade(a.mask() ^ b.mask()))
}

/// Sparse multivector of `Cl(dim)` with Euclidean signature.
///
/// Stored coefficients are never exactly zero, so `terms()` iterates only
/// the support. Iteration order is deterministic (blade mask order).
#[derive(Clone, Debug, PartialEq)]
pub struct Multivector {
    dim: usize,
    terms: BTreeMap<Blade, f64>,
}

impl Multivector {
    /// The zero multivector of the given dimension.
    pub fn zero(dim: usize) -> Multivector {
        assert!(dim <= MAX_DIMENSION, "dimension {dim} exceeds {MAX_DIMENSION}");
        Multivector { dim, terms: BTreeMap::new() }
    }

    /// A pure scalar.
    pub fn scalar(dim: usize, value: f64) -> Multivector {
        let mut mv = Multivector::zero(dim);
        mv.add_term(Blade::SCALAR, value);
        mv
    }

    /// The basis vector e(axis+1) of the given space.
    pub fn basis_vector(dim: usize, axis: usize) -> Multivector {
        assert!(axis < dim, "axis {axis} out of range for dimension {dim}");
        let mut mv = Multivector::zero(dim);
        mv.add_term(Blade::basis_vector(axis), 1.0);
        mv
    }

    /// Grade-1 multivector from per-axis coefficients.
    pub fn from_vector(coefficients: &[f64]) -> Multivector {
        let mut mv = Multivector::zero(coefficients.len());
        for (axis, &c) in coefficients.iter().enumerate() {
            mv.add_term(Blade::basis_vector(axis), c);
        }
        mv
    }

    /// Build from explicit blade/coefficient pairs.
    pub fn from_terms(dim: usize, terms: &[(Blade, f64)]) -> Multivector {
        let mut mv = Multivector::zero(dim);
        for &(blade, c) in terms {
            assert!(blade.fits(dim), "blade {blade} does not fit dimension {dim}");
            mv.add_term(blade, c);
        }
        mv
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Coefficient of a blade (zero when absent).
    pub fn coefficient(&self, blade: Blade) -> f64 {
        self.terms.get(&blade).copied().unwrap_or(0.0)
    }

    /// Iterate stored (blade, coefficient) pairs in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (Blade, f64)> + '_ {
        self.terms.iter().map(|(&b, &c)| (b, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when every stored blade has the given grade.
    pub fn is_pure_grade(&self, grade: usize) -> bool {
        self.terms.keys().all(|b| b.grade() == grade)
    }

    /// True for a pure grade-1 multivector (the zero vector counts).
    pub fn is_vector(&self) -> bool {
        self.is_pure_grade(1)
    }

    /// Grade-1 coefficients as a dense array.
    pub fn vector_coefficients(&self) -> Vec<f64> {
        (0..self.dim)
            .map(|axis| self.coefficient(Blade::basis_vector(axis)))
            .collect()
    }

    fn add_term(&mut self, blade: Blade, c: f64) {
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(blade).or_insert(0.0);
        *entry += c;
        if *entry == 0.0 {
            self.terms.remove(&blade);
        }
    }

    fn check_dim(&self, other: &Multivector) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch { left: self.dim, right: other.dim });
        }
        Ok(())
    }

    /// Full Clifford product on canonical blades.
    pub fn geometric_product(&self, other: &Multivector) -> Result<Multivector> {
        self.check_dim(other)?;
        let mut out = Multivector::zero(self.dim);
        for (&ba, &ca) in &self.terms {
            for (&bb, &cb) in &other.terms {
                let (sign, blade) = blade_product(ba, bb);
                out.add_term(blade, sign * ca * cb);
            }
        }
        Ok(out)
    }

    /// Euclidean inner product of two grade-1 multivectors.
    pub fn inner(&self, other: &Multivector) -> Result<f64> {
        self.check_dim(other)?;
        if !self.is_vector() || !other.is_vector() {
            return Err(Error::NotAVector);
        }
        Ok(self
            .terms
            .iter()
            .map(|(b, c)| c * other.coefficient(*b))
            .sum())
    }

    /// Wedge (outer) product of two grade-1 multivectors: the oriented-plane
    /// coefficients `a_j b_k - a_k b_j` on blades e{jk} with j < k.
    pub fn wedge(&self, other: &Multivector) -> Result<Multivector> {
        self.check_dim(other)?;
        if !self.is_vector() || !other.is_vector() {
            return Err(Error::NotAVector);
        }
        let a = self.vector_coefficients();
        let b = other.vector_coefficients();
        let mut out = Multivector::zero(self.dim);
        for j in 0..self.dim {
            for k in (j + 1)..self.dim {
                out.add_term(Blade::from_axes(&[j, k]), a[j] * b[k] - a[k] * b[j]);
            }
        }
        Ok(out)
    }

    /// Keep only the grade-k part.
    pub fn grade_project(&self, grade: usize) -> Multivector {
        Multivector {
            dim: self.dim,
            terms: self
                .terms
                .iter()
                .filter(|(b, _)| b.grade() == grade)
                .map(|(&b, &c)| (b, c))
                .collect(),
        }
    }

    /// Square root of the sum of squared blade coefficients.
    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn norm_squared(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum()
    }

    /// Inverse of a grade-1 multivector, `v / ||v||^2`, using the default
    /// singularity threshold `EPSILON_SCALE * max|coefficient|^2`.
    pub fn vector_inverse(&self) -> Result<Multivector> {
        let scale = self
            .terms
            .values()
            .fold(0.0f64, |acc, c| acc.max(c.abs()));
        self.vector_inverse_with_threshold(EPSILON_SCALE * scale * scale)
    }

    /// Inverse of a grade-1 multivector against an explicit threshold on the
    /// squared norm. Signals `NearZeroVector` at voltage zero-crossings when
    /// used in instantaneous division.
    pub fn vector_inverse_with_threshold(&self, threshold: f64) -> Result<Multivector> {
        if !self.is_vector() {
            return Err(Error::NotAVector);
        }
        let norm_sq = self.norm_squared();
        if norm_sq <= threshold || norm_sq == 0.0 {
            return Err(Error::NearZeroVector { norm_sq, threshold });
        }
        Ok(self.scaled(1.0 / norm_sq))
    }

    /// Multivector scaled by a constant.
    pub fn scaled(&self, factor: f64) -> Multivector {
        let mut out = Multivector::zero(self.dim);
        for (&b, &c) in &self.terms {
            out.add_term(b, c * factor);
        }
        out
    }

    /// Largest absolute coefficient difference against another multivector.
    pub fn max_coefficient_distance(&self, other: &Multivector) -> f64 {
        let mut blades: Vec<Blade> = self.terms.keys().copied().collect();
        blades.extend(other.terms.keys().copied());
        blades
            .into_iter()
            .map(|b| (self.coefficient(b) - other.coefficient(b)).abs())
            .fold(0.0, f64::max)
    }
}

impl Add for &Multivector {
    type Output = Multivector;
    fn add(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in addition");
        let mut out = self.clone();
        for (&b, &c) in &rhs.terms {
            out.add_term(b, c);
        }
        out
    }
}

impl Sub for &Multivector {
    type Output = Multivector;
    fn sub(self, rhs: &Multivector) -> Multivector {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in subtraction");
        let mut out = self.clone();
        for (&b, &c) in &rhs.terms {
            out.add_term(b, -c);
        }
        out
    }
}

impl Neg for &Multivector {
    type Output = Multivector;
    fn neg(self) -> Multivector {
        self.scaled(-1.0)
    }
}

impl Mul<f64> for &Multivector {
    type Output = Multivector;
    fn mul(self, rhs: f64) -> Multivector {
        self.scaled(rhs)
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut blades: Vec<(Blade, f64)> = self.terms().collect();
        fn key(b: Blade) -> (usize, u16) {
            (b.grade(), b.mask())
        }
        blades.sort_by_key(|&(b, _)| key(b));
        for (idx, (blade, c)) in blades.iter().enumerate() {
            if idx == 0 {
                if *c < 0.0 {
                    write!(f, "-")?;
                }
            } else if *c < 0.0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            if blade.grade() == 0 {
                write!(f, "{mag}")?;
            } else if (mag - 1.0).abs() < 1e-15 {
                write!(f, "{blade}")?;
            } else {
                write!(f, "{mag} {blade}")?;
            }
        }
        Ok(())
    }
}
