//! Binary ciphertext container.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "CGHW"
//! 4       1     version (1)
//! 5       1     mode (0 = paper8, 1 = lossless16)
//! 6       4     width, u32 LE
//! 10      4     height, u32 LE
//! 14      8     qmin, f64 LE
//! 22      8     qmax, f64 LE
//! 30      ...   payload, row-major, 1 or 2 bytes per sample (LE)
//! ```

use std::path::Path;

use crate::cipher::{CipherEnvelope, Mode, FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::image::write_atomic;

pub const MAGIC: [u8; 4] = *b"CGHW";
pub const HEADER_LEN: usize = 30;

fn mode_byte(mode: Mode) -> u8 {
    match mode {
        Mode::Paper8 => 0,
        Mode::Lossless16 => 1,
    }
}

impl CipherEnvelope {
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len() * self.mode.bytes_per_sample());
        out.extend_from_slice(&MAGIC);
        out.push(FORMAT_VERSION);
        out.push(mode_byte(self.mode));
        out.extend_from_slice(&(self.width as u32).to_le_bytes());
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        out.extend_from_slice(&self.qmin.to_le_bytes());
        out.extend_from_slice(&self.qmax.to_le_bytes());
        match self.mode {
            Mode::Paper8 => out.extend(self.payload.iter().map(|&v| v as u8)),
            Mode::Lossless16 => {
                for &v in &self.payload {
                    out.extend_from_slice(&v.to_le_bytes());
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            if bytes.len() >= 4 && bytes[..4] != MAGIC {
                return Err(Error::BadMagic(bytes[..4].try_into().unwrap()));
            }
            return Err(Error::Truncated {
                expected: HEADER_LEN,
                found: bytes.len(),
            });
        }
        let magic: [u8; 4] = bytes[..4].try_into().unwrap();
        if magic != MAGIC {
            return Err(Error::BadMagic(magic));
        }
        if bytes[4] != FORMAT_VERSION {
            return Err(Error::Version {
                found: bytes[4],
                expected: FORMAT_VERSION,
            });
        }
        let mode = match bytes[5] {
            0 => Mode::Paper8,
            1 => Mode::Lossless16,
            other => return Err(Error::Format(format!("unknown mode byte {other}"))),
        };
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap()) as usize;
        let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().unwrap());
        let (width, height) = (u32_at(6), u32_at(10));
        let (qmin, qmax) = (f64_at(14), f64_at(22));

        let expected = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(mode.bytes_per_sample()))
            .ok_or_else(|| Error::Format("header dimensions overflow".into()))?;
        let body = &bytes[HEADER_LEN..];
        if body.len() < expected {
            return Err(Error::Truncated {
                expected,
                found: body.len(),
            });
        }
        if body.len() > expected {
            return Err(Error::Format(format!(
                "{} trailing bytes after payload",
                body.len() - expected
            )));
        }
        let payload = match mode {
            Mode::Paper8 => body.iter().map(|&b| u16::from(b)).collect(),
            Mode::Lossless16 => body.chunks_exact(2).map(|c| u16::from_le_bytes([c[0], c[1]])).collect(),
        };
        let env = CipherEnvelope {
            width,
            height,
            mode,
            qmin,
            qmax,
            payload,
        };
        env.validate()?;
        Ok(env)
    }
}

pub fn write_envelope(env: &CipherEnvelope, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &env.to_bytes())
}

pub fn read_envelope(path: impl AsRef<Path>) -> Result<CipherEnvelope> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    CipherEnvelope::from_bytes(&bytes)
}
