//! Rational order chaotic maps and the keystreams they generate.
//!
//! The degree-2 member of the family is
//!
//! ```text
//! phi2(x, a) = a²(2x − 1)² / (4x(1 − x) + a²(2x − 1)²)
//! ```
//!
//! and the general degree-N member is written in terms of
//! `c = (−1)^N ₂F₁(−N, N; ½; x)`, which is evaluated through the identity
//! `₂F₁(−N, N; ½; sin²θ) = cos(2Nθ)`.
//!
//! Orbits have two absorbing traps: `0.5 → 0 → 1 → 1 → …`, and (for `a > 2`)
//! the attracting fixed point at `1`. The first is handled by remapping any
//! iterate that lands within [`DEGENERACY_EPS`] of `{0, 0.5, 1}`; the second
//! is caught by a variance gate over the first emitted values.

use crate::error::{Error, Result};

/// Burn-in used for every cipher stream.
pub const DEFAULT_BURN_IN: usize = 100;

/// Distance from `{0, 0.5, 1}` below which an iterate is considered trapped.
pub const DEGENERACY_EPS: f64 = 1e-12;

/// Trapped iterates are replaced by `REMAP_BASE + x * REMAP_SCALE`.
pub const REMAP_BASE: f64 = 0.3943;
pub const REMAP_SCALE: f64 = 1e-3;

/// Number of leading emitted values checked by the quality gate.
pub const QUALITY_WINDOW: usize = 256;

/// Minimum sample variance of the gate window.
pub const QUALITY_MIN_VARIANCE: f64 = 1e-4;

/// Seed, control parameter and polynomial degree of a rational order map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChaoticParams {
    x0: f64,
    a: f64,
    degree: u32,
}

impl ChaoticParams {
    /// `x0` must lie in the open unit interval, `a` must be positive and
    /// finite, and `degree >= 1`.
    ///
    /// A seed of exactly `0.5` is accepted: its first image is `0`, which the
    /// orbit's degeneracy rule remaps.
    pub fn new(x0: f64, a: f64, degree: u32) -> Result<Self> {
        if !(x0 > 0.0 && x0 < 1.0) {
            return Err(Error::domain("x0", x0, "0 < x0 < 1"));
        }
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::domain("a", a, "a > 0"));
        }
        if degree == 0 {
            return Err(Error::domain("N", 0.0, "N >= 1"));
        }
        Ok(Self { x0, a, degree })
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    fn step(&self, x: f64) -> f64 {
        if self.degree == 2 {
            phi2_unchecked(x, self.a)
        } else {
            phi_n_unchecked(x, self.a, self.degree)
        }
    }
}

fn check_inputs(x: f64, a: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain("x", x, "0 <= x <= 1"));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain("a", a, "a > 0"));
    }
    Ok(())
}

#[inline]
fn phi2_unchecked(x: f64, a: f64) -> f64 {
    let d = 2.0 * x - 1.0;
    let num = a * a * d * d;
    num / (4.0 * x * (1.0 - x) + num)
}

#[inline]
fn phi_n_unchecked(x: f64, a: f64, n: u32) -> f64 {
    let theta = x.sqrt().asin();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let c = sign * (2.0 * f64::from(n) * theta).cos();
    let a2 = a * a;
    let value = a2 * (1.0 + c) / ((a2 + 1.0) + (a2 - 1.0) * c);
    value.clamp(0.0, 1.0)
}

/// The degree-2 rational order map.
pub fn phi2(x: f64, a: f64) -> Result<f64> {
    check_inputs(x, a)?;
    Ok(phi2_unchecked(x, a))
}

/// The degree-`n` rational order map.
pub fn phi_n(x: f64, a: f64, n: u32) -> Result<f64> {
    check_inputs(x, a)?;
    if n == 0 {
        return Err(Error::domain("N", 0.0, "N >= 1"));
    }
    Ok(phi_n_unchecked(x, a, n))
}

fn is_trapped(x: f64) -> bool {
    x.abs() < DEGENERACY_EPS || (x - 0.5).abs() < DEGENERACY_EPS || (x - 1.0).abs() < DEGENERACY_EPS
}

/// A finite run of orbit values in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct KeyStream {
    values: Vec<f64>,
    params: ChaoticParams,
    burn_in: usize,
    remaps: usize,
    degenerate: bool,
}

impl KeyStream {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn params(&self) -> &ChaoticParams {
        &self.params
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    /// How many iterates (burn-in included) were replaced by the degeneracy rule.
    pub fn remaps(&self) -> usize {
        self.remaps
    }

    /// True when the degeneracy rule fired at least once.
    pub fn remapped(&self) -> bool {
        self.remaps > 0
    }

    /// True when the quality gate found the stream collapsed.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

fn window_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Iterates the map `burn_in` times from `x0`, then emits the next `length`
/// iterates. Does not apply the quality gate; check
/// [`KeyStream::is_degenerate`] instead.
pub fn orbit_ungated(params: &ChaoticParams, length: usize, burn_in: usize) -> Result<KeyStream> {
    if length == 0 {
        return Err(Error::StreamLength { expected: 1, actual: 0 });
    }
    let mut x = params.x0;
    let mut remaps = 0;
    let mut values = Vec::with_capacity(length);
    for i in 0..burn_in + length {
        let next = params.step(x);
        x = if is_trapped(next) {
            remaps += 1;
            REMAP_BASE + next * REMAP_SCALE
        } else {
            next
        };
        if i >= burn_in {
            values.push(x);
        }
    }

    let window = &values[..values.len().min(QUALITY_WINDOW)];
    let degenerate = window.len() >= 2 && window_variance(window) < QUALITY_MIN_VARIANCE;

    Ok(KeyStream {
        values,
        params: *params,
        burn_in,
        remaps,
        degenerate,
    })
}

/// Like [`orbit_ungated`], but a stream that fails the variance gate is an
/// error.
pub fn orbit(params: &ChaoticParams, length: usize, burn_in: usize) -> Result<KeyStream> {
    let stream = orbit_ungated(params, length, burn_in)?;
    if stream.degenerate {
        let window = &stream.values[..stream.values.len().min(QUALITY_WINDOW)];
        return Err(Error::DegenerateStream {
            variance: window_variance(window),
            window: window.len(),
            threshold: QUALITY_MIN_VARIANCE,
        });
    }
    Ok(stream)
}
