//! Statistical security metrics for 8-bit images.
//!
//! Conventions: empty histogram bins contribute nothing to the entropy;
//! NPCR counts positions where the two images *differ*; UACI averages the
//! absolute difference. Correlation uses the biased (`1/N`) estimators for
//! mean, variance and covariance.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Default number of adjacent pairs sampled per direction.
pub const DEFAULT_PAIRS: usize = 3000;

/// Default seed for pair sampling.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Horizontal,
    Vertical,
    Diagonal,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Horizontal, Direction::Vertical, Direction::Diagonal];

    fn offset(self) -> (usize, usize) {
        match self {
            Direction::Horizontal => (0, 1),
            Direction::Vertical => (1, 0),
            Direction::Diagonal => (1, 1),
        }
    }
}

/// Neumaier-compensated sum.
#[derive(Default)]
struct Accumulator {
    sum: f64,
    carry: f64,
}

impl Accumulator {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.carry
    }
}

fn compensated_mean(values: impl Iterator<Item = f64>) -> f64 {
    let mut acc = Accumulator::default();
    let mut n = 0usize;
    for v in values {
        acc.add(v);
        n += 1;
    }
    acc.total() / n as f64
}

pub fn histogram(img: &GrayImage) -> [u64; 256] {
    let mut counts = [0u64; 256];
    for &p in img.pixels() {
        counts[usize::from(p)] += 1;
    }
    counts
}

/// Shannon entropy in bits of a histogram.
pub fn entropy_of_counts(counts: &[u64]) -> f64 {
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    let mut acc = Accumulator::default();
    for &c in counts.iter().filter(|&&c| c > 0) {
        let p = c as f64 / n;
        acc.add(p * (n / c as f64).log2());
    }
    acc.total()
}

/// `(entropy_bits, normalized_entropy)` with 256 gray levels.
pub fn entropy(img: &GrayImage) -> (f64, f64) {
    let h = entropy_of_counts(&histogram(img));
    (h, h / 8.0)
}

pub fn mean_intensity(img: &GrayImage) -> f64 {
    let sum: u64 = img.pixels().iter().map(|&p| u64::from(p)).sum();
    sum as f64 / img.len() as f64
}

/// Correlation coefficient `Cov(x, y) / sqrt(D(x) D(y))` of paired samples.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::Dimension(format!(
            "paired samples have lengths {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let ex = compensated_mean(xs.iter().copied());
    let ey = compensated_mean(ys.iter().copied());
    let dx = compensated_mean(xs.iter().map(|x| (x - ex) * (x - ex)));
    let dy = compensated_mean(ys.iter().map(|y| (y - ey) * (y - ey)));
    if dx == 0.0 || dy == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    let cov = compensated_mean(xs.iter().zip(ys).map(|(x, y)| (x - ex) * (y - ey)));
    Ok((cov / (dx.sqrt() * dy.sqrt())).clamp(-1.0, 1.0))
}

/// Samples `pairs` distinct pixel positions (seeded) together with their
/// neighbour in `direction`.
pub fn adjacent_pairs(img: &GrayImage, direction: Direction, pairs: usize, seed: u64) -> Result<(Vec<f64>, Vec<f64>)> {
    let (dr, dc) = direction.offset();
    let (h, w) = (img.height(), img.width());
    let rows = h.saturating_sub(dr);
    let cols = w.saturating_sub(dc);
    let available = rows * cols;
    if available < pairs || pairs == 0 {
        return Err(Error::Dimension(format!(
            "{w}x{h} image has {available} {direction:?} pairs, {pairs} requested"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = Vec::with_capacity(pairs);
    let mut ys = Vec::with_capacity(pairs);
    for idx in rand::seq::index::sample(&mut rng, available, pairs) {
        let (r, c) = (idx / cols, idx % cols);
        xs.push(f64::from(img.get(r, c)));
        ys.push(f64::from(img.get(r + dr, c + dc)));
    }
    Ok((xs, ys))
}

pub fn correlation(img: &GrayImage, direction: Direction, pairs: usize, seed: u64) -> Result<f64> {
    let (xs, ys) = adjacent_pairs(img, direction, pairs, seed)?;
    pearson(&xs, &ys)
}

fn check_same_dims(a: &GrayImage, b: &GrayImage) -> Result<()> {
    if (a.width(), a.height()) != (b.width(), b.height()) {
        return Err(Error::Dimension(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

/// Percentage of positions where the two images differ.
pub fn npcr(c1: &GrayImage, c2: &GrayImage) -> Result<f64> {
    check_same_dims(c1, c2)?;
    let changed = c1.pixels().iter().zip(c2.pixels()).filter(|(a, b)| a != b).count();
    Ok(100.0 * changed as f64 / c1.len() as f64)
}

/// Mean absolute intensity difference as a percentage of 255.
pub fn uaci(c1: &GrayImage, c2: &GrayImage) -> Result<f64> {
    check_same_dims(c1, c2)?;
    let total: u64 = c1
        .pixels()
        .iter()
        .zip(c2.pixels())
        .map(|(&a, &b)| u64::from(a.abs_diff(b)))
        .sum();
    Ok(100.0 * total as f64 / (255.0 * c1.len() as f64))
}

/// Correlations in the three adjacency directions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Correlations {
    pub horizontal: f64,
    pub vertical: f64,
    pub diagonal: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsReport {
    #[serde(serialize_with = "serialize_histogram")]
    pub histogram: [u64; 256],
    pub mean_intensity: f64,
    pub entropy_bits: f64,
    pub normalized_entropy: f64,
    /// `None` in a direction whose samples are constant.
    pub correlations: [Option<f64>; 3],
    pub pairs: usize,
    pub seed: u64,
    pub npcr_percent: Option<f64>,
    pub uaci_percent: Option<f64>,
}

fn serialize_histogram<S: serde::Serializer>(h: &[u64; 256], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(h.iter())
}

impl MetricsReport {
    /// Computes every metric for `img`; NPCR/UACI only when `reference` is given.
    pub fn compute(img: &GrayImage, reference: Option<&GrayImage>, pairs: usize, seed: u64) -> Result<Self> {
        let histogram = histogram(img);
        let entropy_bits = entropy_of_counts(&histogram);
        let mut correlations = [None; 3];
        for (slot, dir) in correlations.iter_mut().zip(Direction::ALL) {
            *slot = match correlation(img, dir, pairs, seed) {
                Ok(r) => Some(r),
                Err(Error::UndefinedCorrelation) => None,
                Err(e) => return Err(e),
            };
        }
        let (npcr_percent, uaci_percent) = match reference {
            Some(r) => (Some(npcr(img, r)?), Some(uaci(img, r)?)),
            None => (None, None),
        };
        Ok(Self {
            histogram,
            mean_intensity: mean_intensity(img),
            entropy_bits,
            normalized_entropy: entropy_bits / 8.0,
            correlations,
            pairs,
            seed,
            npcr_percent,
            uaci_percent,
        })
    }

    /// One `key=value` per line. Undefined correlations print as `nan`.
    pub fn to_text(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), |v| format!("{v:.6}"));
        let hist: Vec<String> = self.histogram.iter().map(u64::to_string).collect();
        let mut lines = vec![
            format!("histogram={}", hist.join(",")),
            format!("mean_intensity={:.6}", self.mean_intensity),
            format!("entropy_bits={:.6}", self.entropy_bits),
            format!("normalized_entropy={:.6}", self.normalized_entropy),
            format!("corr_h={}", opt(self.correlations[0])),
            format!("corr_v={}", opt(self.correlations[1])),
            format!("corr_d={}", opt(self.correlations[2])),
            format!("pairs={}", self.pairs),
            format!("seed={}", self.seed),
        ];
        if let Some(v) = self.npcr_percent {
            lines.push(format!("npcr_percent={v:.6}"));
        }
        if let Some(v) = self.uaci_percent {
            lines.push(format!("uaci_percent={v:.6}"));
        }
        lines.join("\n") + "\n"
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Flat<'a> {
            #[serde(serialize_with = "serialize_histogram")]
            histogram: &'a [u64; 256],
            mean_intensity: f64,
            entropy_bits: f64,
            normalized_entropy: f64,
            corr_h: Option<f64>,
            corr_v: Option<f64>,
            corr_d: Option<f64>,
            pairs: usize,
            seed: u64,
            #[serde(skip_serializing_if = "Option::is_none")]
            npcr_percent: Option<f64>,
            #[serde(skip_serializing_if = "Option::is_none")]
            uaci_percent: Option<f64>,
        }
        let flat = Flat {
            histogram: &self.histogram,
            mean_intensity: self.mean_intensity,
            entropy_bits: self.entropy_bits,
            normalized_entropy: self.normalized_entropy,
            corr_h: self.correlations[0],
            corr_v: self.correlations[1],
            corr_d: self.correlations[2],
            pairs: self.pairs,
            seed: self.seed,
            npcr_percent: self.npcr_percent,
            uaci_percent: self.uaci_percent,
        };
        serde_json::to_string_pretty(&flat).expect("report serializes")
    }
}
