//! Plaintext-derived key schedule.
//!
//! For a seed index `N` (1-based),
//!
//! ```text
//! λ_N = (Σ_i P(i, N) mod q) XOR 255        μ_N = (Σ_j P(N, j) mod q) XOR 255
//! q   = max(1, ⌊ΣΣ P / (m·n)⌋)
//! x_k = (λ_N XOR μ_N) / 255
//! ```
//!
//! Stream `k ∈ {1, 2, 3}` takes its seed pair from index `N = k + 1`. All
//! three streams iterate the degree-2 map, so the control parameter is
//! `α_k = 2(1 + x_k)` when unscaled, or half of that by default, which keeps
//! `α_k ∈ (1, 2]` where the fixed point at 1 is repelling.
//!
//! Because the keys depend on the plaintext, the receiver cannot rebuild
//! them; a [`KeyMaterial`] is the shared secret and travels as a key file.

use crate::chaos::{ChaoticParams, DEFAULT_BURN_IN};
use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Degree of the map every cipher stream iterates.
pub const MAP_DEGREE: u32 = 2;

/// Seeds that land on `{0, 0.5, 1}` are replaced by `REMAP_SEED + 0.1·(k − 1)`.
pub const REMAP_SEED: f64 = 0.123456789;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    DerivedFromImage,
    UserSupplied,
}

/// How the control parameter is scaled from the seed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ControlScaling {
    /// `α = (1 + x)`: halved, stays in the chaotic regime.
    #[default]
    Halved,
    /// `α = 2(1 + x)`. Streams usually collapse onto the fixed point at 1
    /// and are rejected by the quality gate.
    Unscaled,
}

/// Where the sub-band row/column shuffles come from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PermutationSource {
    /// Ranking permutation of keystream values; invertible.
    #[default]
    Keyed,
    /// Sort rows and columns of each band by their means. Encryption only.
    DataSorted,
}

/// The byte pair a stream seed was derived from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SeedPair {
    pub lambda: u8,
    pub mu: u8,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StreamKey {
    pub params: ChaoticParams,
    pub burn_in: usize,
    pub seed_pair: Option<SeedPair>,
}

/// Secret parameters for the three cipher streams S1, S2, S3.
#[derive(Clone, Debug, PartialEq)]
pub struct KeyMaterial {
    pub streams: [StreamKey; 3],
    pub provenance: Provenance,
    pub control: ControlScaling,
    pub permutation: PermutationSource,
}

impl KeyMaterial {
    /// Keys chosen by the caller rather than derived from an image.
    pub fn user_supplied(params: [ChaoticParams; 3], burn_in: usize) -> Self {
        Self {
            streams: params.map(|params| StreamKey {
                params,
                burn_in,
                seed_pair: None,
            }),
            provenance: Provenance::UserSupplied,
            control: ControlScaling::Halved,
            permutation: PermutationSource::Keyed,
        }
    }

    pub fn with_permutation(mut self, permutation: PermutationSource) -> Self {
        self.permutation = permutation;
        self
    }

    /// Stream `k`, 1-based.
    pub fn stream(&self, k: usize) -> &StreamKey {
        &self.streams[k - 1]
    }
}

/// The byte pair `(λ_N, μ_N)` for 1-based index `n`.
pub fn derive_seed_pair(img: &GrayImage, n: usize) -> Result<SeedPair> {
    let (h, w) = (img.height(), img.width());
    if n == 0 || n > h.min(w) {
        return Err(Error::Dimension(format!(
            "seed index {n} outside 1..={} for a {w}x{h} image",
            h.min(w)
        )));
    }
    let total: u64 = img.pixels().iter().map(|&p| u64::from(p)).sum();
    let modulus = (total / (h * w) as u64).max(1);
    let col: u64 = (0..h).map(|r| u64::from(img.get(r, n - 1))).sum();
    let row: u64 = (0..w).map(|c| u64::from(img.get(n - 1, c))).sum();
    // modulus <= 255, so both residues fit in a byte
    Ok(SeedPair {
        lambda: (col % modulus) as u8 ^ 0xff,
        mu: (row % modulus) as u8 ^ 0xff,
    })
}

/// Seed and control parameter for stream `k` (1..=3).
pub fn derive_stream_params(pair: SeedPair, k: usize, control: ControlScaling) -> Result<ChaoticParams> {
    if !(1..=3).contains(&k) {
        return Err(Error::domain("k", k as f64, "k in 1..=3"));
    }
    let raw = f64::from(pair.lambda ^ pair.mu) / 255.0;
    let x = if raw == 0.0 || raw == 0.5 || raw == 1.0 {
        REMAP_SEED + 0.1 * (k - 1) as f64
    } else {
        raw
    };
    let degree = f64::from(MAP_DEGREE);
    let a = match control {
        ControlScaling::Halved => degree * (1.0 + x) / 2.0,
        ControlScaling::Unscaled => degree * (1.0 + x),
    };
    ChaoticParams::new(x, a, MAP_DEGREE)
}

/// Derives all three stream keys from the plaintext with default settings.
pub fn derive_all(img: &GrayImage) -> Result<KeyMaterial> {
    derive_all_with(img, ControlScaling::Halved)
}

pub fn derive_all_with(img: &GrayImage, control: ControlScaling) -> Result<KeyMaterial> {
    let (h, w) = (img.height(), img.width());
    if h < 4 || w < 4 || h % 2 != 0 || w % 2 != 0 {
        return Err(Error::Dimension(format!(
            "key derivation needs even sides of at least 4, got {w}x{h}"
        )));
    }
    let mut streams = Vec::with_capacity(3);
    for k in 1..=3 {
        let pair = derive_seed_pair(img, k + 1)?;
        streams.push(StreamKey {
            params: derive_stream_params(pair, k, control)?,
            burn_in: DEFAULT_BURN_IN,
            seed_pair: Some(pair),
        });
    }
    Ok(KeyMaterial {
        streams: [streams[0], streams[1], streams[2]],
        provenance: Provenance::DerivedFromImage,
        control,
        permutation: PermutationSource::Keyed,
    })
}
