//! Grayscale image encryption with chaotic gradient Haar wavelets.
//!
//! Rational order chaotic maps ([`chaos`]) generate three keystreams from a
//! key derived from the plaintext ([`keys`]). The first keystream sets a
//! slope for every entry of a one-level gradient Haar analysis matrix
//! ([`wavelet`]) and shuffles the resulting sub-bands; the second drives the
//! synthesis back to a "gradient image"; the third masks it ([`cipher`]).
//! [`analysis`] provides the usual statistical checks of an image cipher.
//!
//! ```
//! use cghw::{cipher, image::GrayImage, keys};
//!
//! let img = GrayImage::from_fn(16, 16, |r, c| (r * 16 + c) as u8).unwrap();
//! let key = keys::derive_all(&img).unwrap();
//! let env = cipher::encrypt(&img, &key, cipher::Mode::Lossless16).unwrap();
//! assert_eq!(cipher::decrypt(&env, &key).unwrap(), img);
//! ```

pub mod analysis;
pub mod chaos;
pub mod cipher;
pub mod cli;
pub mod envelope;
pub mod error;
pub mod image;
pub mod keyfile;
pub mod keys;
pub mod wavelet;

pub use cipher::{decrypt, encrypt, CipherEnvelope, Mode};
pub use error::{Error, Result};
pub use image::GrayImage;
pub use keys::KeyMaterial;
