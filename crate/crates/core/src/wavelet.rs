//! Gradient Haar wavelets and the one-level chaotic analysis transform.
//!
//! The gradient scaling function is a sloped step, `λ(x − ½) + 1` on
//! `[0, 1)`, with slope `λ ∈ [−2, 2]`. Its two refinement coefficients are
//!
//! ```text
//! p0 = λ²/24 − λ/4 + 1        p1 = λ²/24 + λ/4 + 1
//! ```
//!
//! and the transform matrices are populated with the normalized forms
//! `p̃ = p / √2`. At `λ = 0` everything collapses to the classical Haar
//! wavelet.
//!
//! An [`AnalysisMatrix`] of even size `n` is the one-level two-band matrix:
//! row `r < n/2` holds `(p̃0(λa), p̃1(λb))` at columns `2r, 2r+1`, and row
//! `n/2 + r` holds `(p̃1(λc), −p̃0(λd))` at the same columns. Each 2×2 block
//! is built from four consecutive keystream values, so every entry gets its
//! own slope.

use std::f64::consts::FRAC_1_SQRT_2;

use ndarray::{s, Array2, ArrayView1, ArrayViewMut1, Axis};

use crate::error::{Error, Result};

/// Smallest value taken by `p0` or `p1` on `[−2, 2]`.
pub const MIN_COEFF: f64 = 2.0 / 3.0;

/// Lower bound on `|det|` of every 2×2 block: `2 · (MIN_COEFF / √2)²`.
pub const MIN_BLOCK_DET: f64 = 4.0 / 9.0;

fn check_lambda(lambda: f64) -> Result<()> {
    if (-2.0..=2.0).contains(&lambda) {
        Ok(())
    } else {
        Err(Error::domain("lambda", lambda, "-2 <= lambda <= 2"))
    }
}

/// Gradient Haar scaling function.
pub fn scaling_value(x: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(if (0.0..1.0).contains(&x) {
        lambda * (x - 0.5) + 1.0
    } else {
        0.0
    })
}

/// Gradient Haar wavelet function.
pub fn wavelet_value(x: f64, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    let pair = CoeffPair::new(lambda)?;
    Ok(if (0.0..0.5).contains(&x) {
        pair.p1 * (2.0 * lambda * x - lambda / 2.0 + 1.0)
    } else if (0.5..1.0).contains(&x) {
        -pair.p0 * (2.0 * lambda * x - 1.5 * lambda + 1.0)
    } else {
        0.0
    })
}

/// Refinement coefficients for one slope.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoeffPair {
    pub lambda: f64,
    pub p0: f64,
    pub p1: f64,
    /// `p0 / √2`
    pub pt0: f64,
    /// `p1 / √2`
    pub pt1: f64,
}

impl CoeffPair {
    pub fn new(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        Ok(Self::new_unchecked(lambda))
    }

    fn new_unchecked(lambda: f64) -> Self {
        let q = lambda * lambda / 24.0;
        let p0 = q - lambda / 4.0 + 1.0;
        let p1 = q + lambda / 4.0 + 1.0;
        Self {
            lambda,
            p0,
            p1,
            pt0: p0 * FRAC_1_SQRT_2,
            pt1: p1 * FRAC_1_SQRT_2,
        }
    }
}

/// Shorthand for [`CoeffPair::new`].
pub fn coeffs(lambda: f64) -> Result<CoeffPair> {
    CoeffPair::new(lambda)
}

/// Maps a keystream value in `[0, 1]` onto the slope range `[−2, 2]`.
pub fn lambda_from_s(s: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::domain("s", s, "0 <= s <= 1"));
    }
    Ok(4.0 * s - 2.0)
}

/// The four nonzero entries touching one column pair.
///
/// Low-pass row: `(a, b)`. High-pass row: `(c, −d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Block {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Block {
    pub const HAAR: Block = Block {
        a: FRAC_1_SQRT_2,
        b: FRAC_1_SQRT_2,
        c: FRAC_1_SQRT_2,
        d: FRAC_1_SQRT_2,
    };

    /// Determinant of `[[a, b], [c, −d]]`; always `≤ −4/9`.
    pub fn determinant(&self) -> f64 {
        -(self.a * self.d + self.b * self.c)
    }

    #[inline]
    fn analyze(&self, x0: f64, x1: f64) -> (f64, f64) {
        (self.a * x0 + self.b * x1, self.c * x0 - self.d * x1)
    }

    #[inline]
    fn synthesize(&self, lo: f64, hi: f64) -> (f64, f64) {
        let den = self.a * self.d + self.b * self.c;
        ((self.d * lo + self.b * hi) / den, (self.c * lo - self.a * hi) / den)
    }
}

/// Which keystream and index range a matrix was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StreamSegment {
    pub stream: u8,
    pub start: usize,
    pub len: usize,
}

/// One-level chaotic gradient Haar analysis matrix, stored by blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisMatrix {
    n: usize,
    blocks: Vec<Block>,
    source: Option<StreamSegment>,
}

impl AnalysisMatrix {
    /// Builds an `n × n` matrix from exactly `2n` keystream values.
    ///
    /// Block `r` consumes values `4r..4r+4` as `(λa, λb, λc, λd)`.
    pub fn from_stream(values: &[f64], n: usize) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "analysis matrix size must be even and positive, got {n}"
            )));
        }
        if values.len() != 2 * n {
            return Err(Error::StreamLength {
                expected: 2 * n,
                actual: values.len(),
            });
        }
        let blocks = values
            .chunks_exact(4)
            .map(|s| {
                let pair = |v: f64| lambda_from_s(v).map(CoeffPair::new_unchecked);
                Ok(Block {
                    a: pair(s[0])?.pt0,
                    b: pair(s[1])?.pt1,
                    c: pair(s[2])?.pt1,
                    d: pair(s[3])?.pt0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            n,
            blocks,
            source: None,
        })
    }

    /// The classical orthogonal Haar analysis matrix.
    pub fn haar(n: usize) -> Result<Self> {
        Self::from_stream(&vec![0.5; 2 * n], n)
    }

    pub fn with_source(mut self, source: StreamSegment) -> Self {
        self.source = Some(source);
        self
    }

    pub fn source(&self) -> Option<StreamSegment> {
        self.source
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn to_dense(&self) -> Array2<f64> {
        let half = self.n / 2;
        let mut m = Array2::zeros((self.n, self.n));
        for (r, b) in self.blocks.iter().enumerate() {
            m[[r, 2 * r]] = b.a;
            m[[r, 2 * r + 1]] = b.b;
            m[[half + r, 2 * r]] = b.c;
            m[[half + r, 2 * r + 1]] = -b.d;
        }
        m
    }

    /// Dense inverse, assembled from the closed-form 2×2 block inverses.
    pub fn inverse_dense(&self) -> Array2<f64> {
        let half = self.n / 2;
        let mut m = Array2::zeros((self.n, self.n));
        for (r, b) in self.blocks.iter().enumerate() {
            let den = b.a * b.d + b.b * b.c;
            m[[2 * r, r]] = b.d / den;
            m[[2 * r, half + r]] = b.b / den;
            m[[2 * r + 1, r]] = b.c / den;
            m[[2 * r + 1, half + r]] = -b.a / den;
        }
        m
    }

    fn analyze_lane(&self, input: ArrayView1<f64>, mut output: ArrayViewMut1<f64>) {
        let half = self.n / 2;
        for (r, b) in self.blocks.iter().enumerate() {
            let (lo, hi) = b.analyze(input[2 * r], input[2 * r + 1]);
            output[r] = lo;
            output[half + r] = hi;
        }
    }

    fn synthesize_lane(&self, input: ArrayView1<f64>, mut output: ArrayViewMut1<f64>) {
        let half = self.n / 2;
        for (r, b) in self.blocks.iter().enumerate() {
            let (x0, x1) = b.synthesize(input[r], input[half + r]);
            output[2 * r] = x0;
            output[2 * r + 1] = x1;
        }
    }
}

/// The four quadrants of a one-level transform.
#[derive(Clone, Debug, PartialEq)]
pub struct SubBands {
    pub ll: Array2<f64>,
    pub lh: Array2<f64>,
    pub hl: Array2<f64>,
    pub hh: Array2<f64>,
}

impl SubBands {
    /// Splits a full coefficient matrix: LL top-left, HL top-right,
    /// LH bottom-left, HH bottom-right.
    pub fn from_full(f: &Array2<f64>) -> Result<Self> {
        let (m, n) = f.dim();
        if m % 2 != 0 || n % 2 != 0 {
            return Err(Error::Dimension(format!(
                "coefficient matrix must have even sides, got {m}x{n}"
            )));
        }
        let (h, w) = (m / 2, n / 2);
        Ok(Self {
            ll: f.slice(s![..h, ..w]).to_owned(),
            hl: f.slice(s![..h, w..]).to_owned(),
            lh: f.slice(s![h.., ..w]).to_owned(),
            hh: f.slice(s![h.., w..]).to_owned(),
        })
    }

    pub fn to_full(&self) -> Result<Array2<f64>> {
        let (h, w) = self.ll.dim();
        for band in [&self.lh, &self.hl, &self.hh] {
            if band.dim() != (h, w) {
                return Err(Error::Dimension(format!(
                    "sub-band shapes disagree: {:?} vs {:?}",
                    band.dim(),
                    (h, w)
                )));
            }
        }
        let mut f = Array2::zeros((2 * h, 2 * w));
        f.slice_mut(s![..h, ..w]).assign(&self.ll);
        f.slice_mut(s![..h, w..]).assign(&self.hl);
        f.slice_mut(s![h.., ..w]).assign(&self.lh);
        f.slice_mut(s![h.., w..]).assign(&self.hh);
        Ok(f)
    }

    /// Half-size shape `(rows, cols)` shared by all four bands.
    pub fn dim(&self) -> (usize, usize) {
        self.ll.dim()
    }

    pub fn bands(&self) -> [&Array2<f64>; 4] {
        [&self.ll, &self.lh, &self.hl, &self.hh]
    }

    pub fn bands_mut(&mut self) -> [&mut Array2<f64>; 4] {
        [&mut self.ll, &mut self.lh, &mut self.hl, &mut self.hh]
    }
}

fn check_sizes(shape: (usize, usize), rows: &AnalysisMatrix, cols: &AnalysisMatrix) -> Result<()> {
    let (m, n) = shape;
    if rows.size() != m || cols.size() != n {
        return Err(Error::Dimension(format!(
            "image is {m}x{n} but matrices are {}x{} and {}x{}",
            rows.size(),
            rows.size(),
            cols.size(),
            cols.size()
        )));
    }
    Ok(())
}

/// `F = rows · image · colsᵀ`, split into sub-bands.
pub fn forward1(image: &Array2<f64>, rows: &AnalysisMatrix, cols: &AnalysisMatrix) -> Result<SubBands> {
    check_sizes(image.dim(), rows, cols)?;
    let mut tmp = Array2::zeros(image.dim());
    for (src, dst) in image.axis_iter(Axis(1)).zip(tmp.axis_iter_mut(Axis(1))) {
        rows.analyze_lane(src, dst);
    }
    let mut f = Array2::zeros(image.dim());
    for (src, dst) in tmp.axis_iter(Axis(0)).zip(f.axis_iter_mut(Axis(0))) {
        cols.analyze_lane(src, dst);
    }
    SubBands::from_full(&f)
}

/// `rows⁻¹ · F · (colsᵀ)⁻¹`, where `F` is reassembled from `bands`.
pub fn inverse1(bands: &SubBands, rows: &AnalysisMatrix, cols: &AnalysisMatrix) -> Result<Array2<f64>> {
    let f = bands.to_full()?;
    check_sizes(f.dim(), rows, cols)?;
    let mut tmp = Array2::zeros(f.dim());
    for (src, dst) in f.axis_iter(Axis(0)).zip(tmp.axis_iter_mut(Axis(0))) {
        cols.synthesize_lane(src, dst);
    }
    let mut out = Array2::zeros(f.dim());
    for (src, dst) in tmp.axis_iter(Axis(1)).zip(out.axis_iter_mut(Axis(1))) {
        rows.synthesize_lane(src, dst);
    }
    Ok(out)
}
