//! The encryption pipeline and its exact inverse.
//!
//! Encryption of an `m × n` image (`m` rows):
//!
//! 1. S1, S2, S3 are generated from the key material.
//! 2. The image is analyzed with the S1 matrices; every sub-band's rows and
//!    columns are shuffled by a permutation ranked from S1.
//! 3. The shuffled bands are synthesized with the inverse of the S2 matrices,
//!    giving the real-valued gradient image `G`.
//! 4. `G` is quantized over its own `[min, max]` range and XOR-masked with S3.
//!
//! Keystream layout (fixed, part of the format):
//!
//! | stream | range                       | use                    |
//! |--------|-----------------------------|------------------------|
//! | S1     | `0 .. 2m`                   | row analysis matrix    |
//! | S1     | `2m .. 2m+2n`               | column analysis matrix |
//! | S1     | `2m+2n .. 2m+2n+m/2`        | sub-band row shuffle   |
//! | S1     | `2m+2n+m/2 .. 2m+2n+m/2+n/2`| sub-band column shuffle|
//! | S2     | `0 .. 2m`, `2m .. 2m+2n`    | row / column matrices  |
//! | S3     | `0 .. m·n`                  | XOR mask, row-major    |

use ndarray::{Array2, Axis};

use crate::chaos::{orbit, KeyStream};
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::keys::{KeyMaterial, PermutationSource};
use crate::wavelet::{forward1, inverse1, AnalysisMatrix, StreamSegment, SubBands};

/// Current container format version.
pub const FORMAT_VERSION: u8 = 1;

/// Sample width of the quantized gradient image.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Mode {
    /// 8-bit samples, near-lossless.
    Paper8,
    /// 16-bit samples, exact round trip.
    #[default]
    Lossless16,
}

impl Mode {
    pub fn bits(self) -> u32 {
        match self {
            Mode::Paper8 => 8,
            Mode::Lossless16 => 16,
        }
    }

    /// Largest sample value, `2^bits − 1`.
    pub fn max_sample(self) -> u16 {
        match self {
            Mode::Paper8 => 0xff,
            Mode::Lossless16 => 0xffff,
        }
    }

    pub fn bytes_per_sample(self) -> usize {
        match self {
            Mode::Paper8 => 1,
            Mode::Lossless16 => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Paper8 => "paper8",
            Mode::Lossless16 => "lossless16",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper8" => Ok(Mode::Paper8),
            "lossless16" => Ok(Mode::Lossless16),
            other => Err(Error::Format(format!("unknown mode {other:?}"))),
        }
    }
}

/// Encrypted image plus what the decryptor needs besides the key.
#[derive(Clone, Debug, PartialEq)]
pub struct CipherEnvelope {
    pub width: usize,
    pub height: usize,
    pub mode: Mode,
    pub qmin: f64,
    pub qmax: f64,
    /// Row-major masked samples, each `<= mode.max_sample()`.
    pub payload: Vec<u16>,
}

impl CipherEnvelope {
    /// 8-bit view of the ciphertext: the payload itself in `paper8` mode,
    /// the high byte of each sample in `lossless16` mode.
    pub fn to_gray(&self) -> GrayImage {
        let shift = self.mode.bits() - 8;
        let pixels = self.payload.iter().map(|&v| (v >> shift) as u8).collect();
        GrayImage::new(self.width, self.height, pixels).expect("envelope dimensions are validated")
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 || !self.width.is_multiple_of(2) || !self.height.is_multiple_of(2) {
            return Err(Error::Dimension(format!(
                "envelope sides must be even and positive, got {}x{}",
                self.width, self.height
            )));
        }
        if self.payload.len() != self.width * self.height {
            return Err(Error::Dimension(format!(
                "payload has {} samples for a {}x{} image",
                self.payload.len(),
                self.width,
                self.height
            )));
        }
        if !(self.qmin.is_finite() && self.qmax.is_finite() && self.qmin < self.qmax) {
            return Err(Error::Format(format!(
                "invalid quantization range [{}, {}]",
                self.qmin, self.qmax
            )));
        }
        if self.payload.iter().any(|&v| v > self.mode.max_sample()) {
            return Err(Error::Format("payload sample exceeds the mode's bit depth".into()));
        }
        Ok(())
    }
}

/// Row and column shuffles applied to every sub-band.
///
/// Row `i` of the shuffled band is row `rows[i]` of the original.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationPair {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

fn argsort(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    // stable, so ties keep their original order
    idx.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    idx
}

fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

fn gather(m: &Array2<f64>, axis: Axis, order: &[usize]) -> Array2<f64> {
    m.select(axis, order)
}

impl PermutationPair {
    pub fn identity(h: usize, w: usize) -> Self {
        Self {
            rows: (0..h).collect(),
            cols: (0..w).collect(),
        }
    }

    pub fn apply(&self, m: &Array2<f64>) -> Array2<f64> {
        gather(&gather(m, Axis(0), &self.rows), Axis(1), &self.cols)
    }

    pub fn inverse(&self) -> Self {
        Self {
            rows: invert(&self.rows),
            cols: invert(&self.cols),
        }
    }

    pub fn unapply(&self, m: &Array2<f64>) -> Array2<f64> {
        self.inverse().apply(m)
    }
}

/// Ranking permutations from `h + w` keystream values: the first `h` order
/// the rows, the next `w` the columns.
pub fn keyed_permutations(stream: &[f64], h: usize, w: usize) -> Result<PermutationPair> {
    if stream.len() < h + w {
        return Err(Error::StreamLength {
            expected: h + w,
            actual: stream.len(),
        });
    }
    Ok(PermutationPair {
        rows: argsort(&stream[..h]),
        cols: argsort(&stream[h..h + w]),
    })
}

fn mean_sort(band: &Array2<f64>) -> Array2<f64> {
    let row_means: Vec<f64> = band.rows().into_iter().map(|r| r.mean().unwrap_or(0.0)).collect();
    let by_rows = gather(band, Axis(0), &argsort(&row_means));
    let col_means: Vec<f64> = by_rows.columns().into_iter().map(|c| c.mean().unwrap_or(0.0)).collect();
    gather(&by_rows, Axis(1), &argsort(&col_means))
}

/// XORs sample `t` with `⌊stream[t] · (2^bits − 1)⌋`.
pub fn xor_mask(samples: &[u16], stream: &[f64], mode: Mode) -> Result<Vec<u16>> {
    if stream.len() < samples.len() {
        return Err(Error::StreamLength {
            expected: samples.len(),
            actual: stream.len(),
        });
    }
    let scale = f64::from(mode.max_sample());
    Ok(samples
        .iter()
        .zip(stream)
        .map(|(&v, &s)| v ^ (s * scale).floor() as u16)
        .collect())
}

/// Affine map of `[qmin, qmax]` onto `0..=max_sample`, rounding to nearest.
pub fn quantize(values: &[f64], qmin: f64, qmax: f64, mode: Mode) -> Vec<u16> {
    let levels = f64::from(mode.max_sample());
    let scale = levels / (qmax - qmin);
    values
        .iter()
        .map(|&v| ((v - qmin) * scale).round().clamp(0.0, levels) as u16)
        .collect()
}

pub fn dequantize(samples: &[u16], qmin: f64, qmax: f64, mode: Mode) -> Vec<f64> {
    let step = (qmax - qmin) / f64::from(mode.max_sample());
    samples.iter().map(|&q| qmin + f64::from(q) * step).collect()
}

/// Quantization range of `values`, widened to a unit interval when flat.
fn range_of(values: &[f64]) -> (f64, f64) {
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    if hi > lo {
        (lo, hi)
    } else {
        (lo, lo + 1.0)
    }
}

/// The three keystreams, sized for an `h × w` image.
struct Streams {
    s1: KeyStream,
    s2: KeyStream,
    s3: KeyStream,
}

fn s1_len(h: usize, w: usize) -> usize {
    2 * h + 2 * w + h / 2 + w / 2
}

fn generate_streams(keys: &KeyMaterial, h: usize, w: usize) -> Result<Streams> {
    let gen = |k: usize, len: usize| {
        let s = keys.stream(k);
        orbit(&s.params, len, s.burn_in)
    };
    Ok(Streams {
        s1: gen(1, s1_len(h, w))?,
        s2: gen(2, 2 * h + 2 * w)?,
        s3: gen(3, h * w)?,
    })
}

fn matrices(stream: &KeyStream, id: u8, h: usize, w: usize) -> Result<(AnalysisMatrix, AnalysisMatrix)> {
    let v = stream.values();
    let rows = AnalysisMatrix::from_stream(&v[..2 * h], h)?.with_source(StreamSegment {
        stream: id,
        start: 0,
        len: 2 * h,
    });
    let cols = AnalysisMatrix::from_stream(&v[2 * h..2 * h + 2 * w], w)?.with_source(StreamSegment {
        stream: id,
        start: 2 * h,
        len: 2 * w,
    });
    Ok((rows, cols))
}

fn check_image_dims(h: usize, w: usize) -> Result<()> {
    if h < 4 || w < 4 || !h.is_multiple_of(2) || !w.is_multiple_of(2) {
        return Err(Error::Dimension(format!(
            "image sides must be even and at least 4, got {w}x{h}"
        )));
    }
    Ok(())
}

/// Intermediate values of one encryption, for inspection and tests.
#[derive(Clone, Debug)]
pub struct EncryptionTrace {
    /// Sub-bands straight out of the S1 analysis.
    pub bands: SubBands,
    /// The same bands after shuffling.
    pub shuffled: SubBands,
    /// Real-valued gradient image.
    pub gradient: Array2<f64>,
    pub envelope: CipherEnvelope,
}

pub fn encrypt(img: &GrayImage, keys: &KeyMaterial, mode: Mode) -> Result<CipherEnvelope> {
    encrypt_traced(img, keys, mode).map(|t| t.envelope)
}

pub fn encrypt_traced(img: &GrayImage, keys: &KeyMaterial, mode: Mode) -> Result<EncryptionTrace> {
    let (h, w) = (img.height(), img.width());
    check_image_dims(h, w)?;
    let streams = generate_streams(keys, h, w)?;

    let (r1, c1) = matrices(&streams.s1, 1, h, w)?;
    let bands = forward1(&img.to_matrix(), &r1, &c1)?;

    let (bh, bw) = bands.dim();
    let mut shuffled = bands.clone();
    match keys.permutation {
        PermutationSource::Keyed => {
            let perm = keyed_permutations(&streams.s1.values()[2 * h + 2 * w..], bh, bw)?;
            for band in shuffled.bands_mut() {
                *band = perm.apply(band);
            }
        }
        PermutationSource::DataSorted => {
            for band in shuffled.bands_mut() {
                *band = mean_sort(band);
            }
        }
    }

    let (r2, c2) = matrices(&streams.s2, 2, h, w)?;
    let gradient = inverse1(&shuffled, &r2, &c2)?;

    let flat: Vec<f64> = gradient.iter().copied().collect();
    let (qmin, qmax) = range_of(&flat);
    let samples = quantize(&flat, qmin, qmax, mode);
    let payload = xor_mask(&samples, streams.s3.values(), mode)?;

    Ok(EncryptionTrace {
        bands,
        shuffled,
        gradient,
        envelope: CipherEnvelope {
            width: w,
            height: h,
            mode,
            qmin,
            qmax,
            payload,
        },
    })
}

/// Reverses [`encrypt`]. A wrong key yields noise, not an error.
pub fn decrypt(env: &CipherEnvelope, keys: &KeyMaterial) -> Result<GrayImage> {
    env.validate()?;
    if keys.permutation == PermutationSource::DataSorted {
        return Err(Error::NotInvertible);
    }
    let (h, w) = (env.height, env.width);
    check_image_dims(h, w)?;
    let streams = generate_streams(keys, h, w)?;

    let samples = xor_mask(&env.payload, streams.s3.values(), env.mode)?;
    let flat = dequantize(&samples, env.qmin, env.qmax, env.mode);
    let gradient = Array2::from_shape_vec((h, w), flat).expect("validated payload length");

    let (r2, c2) = matrices(&streams.s2, 2, h, w)?;
    let mut bands = forward1(&gradient, &r2, &c2)?;

    let (bh, bw) = bands.dim();
    let perm = keyed_permutations(&streams.s1.values()[2 * h + 2 * w..], bh, bw)?.inverse();
    for band in bands.bands_mut() {
        *band = perm.apply(band);
    }

    let (r1, c1) = matrices(&streams.s1, 1, h, w)?;
    GrayImage::from_matrix(&inverse1(&bands, &r1, &c1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chaos::ChaoticParams;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn keys(seed: u64) -> KeyMaterial {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = || {
            let x: f64 = rng.random_range(0.05..0.95);
            ChaoticParams::new(x, 1.0 + rng.random_range(0.05..0.9), 2).unwrap()
        };
        KeyMaterial::user_supplied([p(), p(), p()], 100)
    }

    fn random_image(seed: u64, w: usize, h: usize) -> GrayImage {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        GrayImage::from_fn(w, h, |_, _| rng.random()).unwrap()
    }

    #[test]
    fn sorted_stream_gives_identity() {
        let s: Vec<f64> = (0..10).map(|i| f64::from(i) / 10.0).collect();
        let p = keyed_permutations(&s, 4, 6).unwrap();
        assert_eq!(p, PermutationPair::identity(4, 6));
    }

    #[test]
    fn argsort_example() {
        let p = keyed_permutations(&[0.9, 0.1, 0.5, 0.3], 3, 1).unwrap();
        assert_eq!(p.rows, vec![1, 2, 0]);
        assert_eq!(p.cols, vec![0]);
    }

    #[test]
    fn ties_keep_index_order() {
        let p = keyed_permutations(&[0.5, 0.2, 0.5, 0.2], 4, 0).unwrap();
        assert_eq!(p.rows, vec![1, 3, 0, 2]);
    }

    #[test]
    fn short_permutation_stream() {
        assert!(matches!(
            keyed_permutations(&[0.1, 0.2], 2, 1),
            Err(Error::StreamLength { expected: 3, actual: 2 })
        ));
    }

    #[test]
    fn permutation_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s: Vec<f64> = (0..13).map(|_| rng.random()).collect();
        let p = keyed_permutations(&s, 6, 7).unwrap();
        let m = Array2::from_shape_fn((6, 7), |_| rng.random::<f64>());
        assert_eq!(p.unapply(&p.apply(&m)), m);
        assert_ne!(p.apply(&m), m);
    }

    #[test]
    fn mask_examples() {
        let samples = vec![0u16, 0xff, 17, 200];
        let stream = vec![0.3, 1.0, 0.0, 0.77];
        let once = xor_mask(&samples, &stream, Mode::Paper8).unwrap();
        assert_eq!(once[1], 0);
        assert_eq!(once[2], 17);
        assert_eq!(xor_mask(&once, &stream, Mode::Paper8).unwrap(), samples);
        assert!(xor_mask(&samples, &stream[..3], Mode::Paper8).is_err());
        assert_eq!(xor_mask(&[0], &[1.0], Mode::Lossless16).unwrap(), vec![0xffff]);
    }

    #[test]
    fn quantizer_round_trip_error_is_half_a_step() {
        let values: Vec<f64> = (0..1000).map(|i| -300.0 + f64::from(i) * 0.917).collect();
        let (lo, hi) = range_of(&values);
        for mode in [Mode::Paper8, Mode::Lossless16] {
            let q = quantize(&values, lo, hi, mode);
            let back = dequantize(&q, lo, hi, mode);
            let step = (hi - lo) / f64::from(mode.max_sample());
            for (a, b) in values.iter().zip(&back) {
                assert!((a - b).abs() <= step / 2.0 + 1e-9);
            }
            assert_eq!(q[0], 0);
            assert_eq!(*q.last().unwrap(), mode.max_sample());
        }
    }

    #[test]
    fn flat_range_is_widened() {
        assert_eq!(range_of(&[3.0, 3.0]), (3.0, 4.0));
    }

    #[test]
    fn lossless_round_trip() {
        let img = random_image(8, 64, 64);
        for seed in 0..5 {
            let k = keys(seed);
            let env = encrypt(&img, &k, Mode::Lossless16).unwrap();
            assert_eq!(decrypt(&env, &k).unwrap(), img);
        }
    }

    #[test]
    fn flat_images_round_trip() {
        for v in [0u8, 100, 255] {
            let img = GrayImage::from_fn(8, 8, |_, _| v).unwrap();
            let k = keys(u64::from(v));
            let env = encrypt(&img, &k, Mode::Lossless16).unwrap();
            assert_eq!(decrypt(&env, &k).unwrap(), img);
        }
    }

    #[test]
    fn encryption_is_deterministic() {
        let img = random_image(2, 32, 16);
        let k = keys(9);
        assert_eq!(
            encrypt(&img, &k, Mode::Paper8).unwrap(),
            encrypt(&img, &k, Mode::Paper8).unwrap()
        );
    }

    #[test]
    fn pipeline_bands_match_dense_product() {
        let img = random_image(4, 4, 4);
        let k = keys(4);
        let trace = encrypt_traced(&img, &k, Mode::Lossless16).unwrap();
        let s1 = orbit(&k.streams[0].params, s1_len(4, 4), 100).unwrap();
        let g_rows = AnalysisMatrix::from_stream(&s1.values()[..8], 4).unwrap().to_dense();
        let g_cols = AnalysisMatrix::from_stream(&s1.values()[8..16], 4).unwrap().to_dense();
        let x = img.to_matrix();
        let mut f = Array2::<f64>::zeros((4, 4));
        for i in 0..4 {
            for j in 0..4 {
                for a in 0..4 {
                    for b in 0..4 {
                        f[[i, j]] += g_rows[[i, a]] * x[[a, b]] * g_cols[[j, b]];
                    }
                }
            }
        }
        let got = trace.bands.to_full().unwrap();
        let diff = f.iter().zip(&got).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-12);
    }

    #[test]
    fn data_sorted_is_encrypt_only() {
        let img = random_image(5, 16, 16);
        let k = keys(5).with_permutation(PermutationSource::DataSorted);
        let env = encrypt(&img, &k, Mode::Lossless16).unwrap();
        assert!(matches!(decrypt(&env, &k), Err(Error::NotInvertible)));
    }

    #[test]
    fn mean_sort_orders_rows_and_columns() {
        let band = Array2::from_shape_vec((2, 3), vec![9.0, 8.0, 7.0, 1.0, 2.0, 0.0]).unwrap();
        let sorted = mean_sort(&band);
        let row_means: Vec<f64> = sorted.rows().into_iter().map(|r| r.mean().unwrap()).collect();
        assert!(row_means[0] <= row_means[1]);
        let col_means: Vec<f64> = sorted.columns().into_iter().map(|c| c.mean().unwrap()).collect();
        assert!(col_means.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn odd_or_tiny_images_rejected() {
        let k = keys(0);
        for (w, h) in [(5, 4), (4, 6 + 1), (2, 2)] {
            let img = GrayImage::from_fn(w, h, |_, _| 1).unwrap();
            assert!(matches!(encrypt(&img, &k, Mode::Lossless16), Err(Error::Dimension(_))));
        }
    }

    #[test]
    fn envelope_validation() {
        let img = random_image(6, 8, 8);
        let k = keys(6);
        let mut env = encrypt(&img, &k, Mode::Paper8).unwrap();
        env.payload.pop();
        assert!(decrypt(&env, &k).is_err());
        let mut env = encrypt(&img, &k, Mode::Paper8).unwrap();
        env.qmax = env.qmin;
        assert!(decrypt(&env, &k).is_err());
    }

    #[test]
    fn streams_are_sized_for_their_segments() {
        let k = keys(3);
        let s = generate_streams(&k, 8, 12).unwrap();
        assert_eq!(s.s1.len(), 16 + 24 + 4 + 6);
        assert_eq!(s.s2.len(), 16 + 24);
        assert_eq!(s.s3.len(), 96);
    }
}
