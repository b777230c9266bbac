//! Scalars shared by the pipeline: complex amplitudes, the comparison
//! tolerances, and nonnegative reals extended with `∞`.
//!
//! `∞` is a separate variant rather than `f64::INFINITY` so that `∞ · 0 = 0`
//! holds by construction instead of producing `NaN`.

use std::fmt;
use std::ops::Add;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::LqcaError;

/// Transition amplitude `[δ(x₁…x_r)](y)`.
pub type Amplitude = Complex64;

/// Builds an amplitude, rejecting non-finite components.
pub fn amplitude(re: f64, im: f64) -> Result<Amplitude, LqcaError> {
    if re.is_finite() && im.is_finite() {
        Ok(Complex64::new(re, im))
    } else {
        Err(LqcaError::NonFiniteAmplitude { re, im })
    }
}

/// Thresholds used for every floating point comparison in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Absolute threshold below which a value is treated as zero.
    pub zero_abs: f64,
    /// A star argument within this distance of 1 (or above) diverges.
    pub star_gap: f64,
    /// Relative threshold for subspace membership and unit inner products.
    pub membership_rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            zero_abs: 1e-9,
            star_gap: 1e-9,
            membership_rel: 1e-8,
        }
    }
}

impl Tolerance {
    pub fn new(zero_abs: f64, star_gap: f64, membership_rel: f64) -> Result<Self, LqcaError> {
        let tol = Tolerance {
            zero_abs,
            star_gap,
            membership_rel,
        };
        for (name, value) in [
            ("zero_abs", zero_abs),
            ("star_gap", star_gap),
            ("membership_rel", membership_rel),
        ] {
            if !(value > 0.0 && value < 1.0) {
                return Err(LqcaError::InvalidTolerance { name, value });
            }
        }
        Ok(tol)
    }

    /// Sets `membership_rel` and scales the other two thresholds with it,
    /// keeping the default ratios.
    pub fn from_membership(membership_rel: f64) -> Result<Self, LqcaError> {
        let base = Tolerance::default();
        let ratio = membership_rel / base.membership_rel;
        Tolerance::new(base.zero_abs * ratio, base.star_gap * ratio, membership_rel)
    }

    pub fn is_zero(&self, x: f64) -> bool {
        x.abs() <= self.zero_abs
    }

    /// `|value − 1| ≤ membership_rel · max(1, scale)`.
    pub fn is_unit(&self, value: f64, scale: f64) -> bool {
        (value - 1.0).abs() <= self.membership_rel * scale.max(1.0)
    }
}

/// Element of `ℝ≥0 ∪ {∞}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtNonnegReal {
    Finite(f64),
    Infinite,
}

impl ExtNonnegReal {
    pub const ZERO: ExtNonnegReal = ExtNonnegReal::Finite(0.0);
    pub const ONE: ExtNonnegReal = ExtNonnegReal::Finite(1.0);

    /// Wraps a finite nonnegative value. `+∞` maps to [`ExtNonnegReal::Infinite`].
    ///
    /// Panics on negative or `NaN` input; callers only ever pass squared
    /// magnitudes or results of this module's arithmetic.
    pub fn new(value: f64) -> Self {
        assert!(
            value >= 0.0,
            "extended nonnegative real built from {value}"
        );
        if value == f64::INFINITY {
            ExtNonnegReal::Infinite
        } else {
            // normalizes -0.0
            ExtNonnegReal::Finite(value.max(0.0))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtNonnegReal::Infinite)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtNonnegReal::Finite(v) => Some(v),
            ExtNonnegReal::Infinite => None,
        }
    }

    /// `f64` view, with `∞` mapped to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    fn is_zero_within(self, tol: &Tolerance) -> bool {
        matches!(self, ExtNonnegReal::Finite(v) if v <= tol.zero_abs)
    }

    pub fn ext_add(self, other: ExtNonnegReal) -> ExtNonnegReal {
        match (self, other) {
            (ExtNonnegReal::Finite(a), ExtNonnegReal::Finite(b)) => ExtNonnegReal::Finite(a + b),
            _ => ExtNonnegReal::Infinite,
        }
    }

    /// Product with `∞ · c = ∞` for `c > 0` and `∞ · 0 = 0 · ∞ = 0`, where a
    /// finite operand at or below `zero_abs` counts as zero.
    pub fn ext_mul(self, other: ExtNonnegReal, tol: &Tolerance) -> ExtNonnegReal {
        match (self, other) {
            (ExtNonnegReal::Finite(a), ExtNonnegReal::Finite(b)) => ExtNonnegReal::Finite(a * b),
            (x, y) if x.is_zero_within(tol) || y.is_zero_within(tol) => ExtNonnegReal::ZERO,
            _ => ExtNonnegReal::Infinite,
        }
    }

    /// Kleene star `Σ_{e≥0} cᵉ`: `1/(1−c)` below `1 − star_gap`, `∞` otherwise.
    pub fn ext_star(self, tol: &Tolerance) -> ExtNonnegReal {
        match self {
            ExtNonnegReal::Finite(c) if c < 1.0 - tol.star_gap => {
                ExtNonnegReal::Finite(1.0 / (1.0 - c))
            }
            _ => ExtNonnegReal::Infinite,
        }
    }
}

impl Add for ExtNonnegReal {
    type Output = ExtNonnegReal;

    fn add(self, rhs: ExtNonnegReal) -> ExtNonnegReal {
        self.ext_add(rhs)
    }
}

impl From<f64> for ExtNonnegReal {
    fn from(value: f64) -> Self {
        ExtNonnegReal::new(value)
    }
}

impl fmt::Display for ExtNonnegReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtNonnegReal::Finite(v) => write!(f, "{v}"),
            ExtNonnegReal::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtNonnegReal {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtNonnegReal::Finite(v) => serializer.serialize_f64(*v),
            ExtNonnegReal::Infinite => serializer.serialize_str("inf"),
        }
    }
}
