//! Encrypts a photograph in both modes and decrypts it again.
//!
//! ```sh
//! cargo run --release --example encrypt_roundtrip [image.pgm]
//! ```

use cghw::cipher::{decrypt, encrypt, Mode};
use cghw::image::read_pgm;
use cghw::keys::derive_all;

fn main() -> cghw::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/camera.pgm").to_string());
    let img = read_pgm(&path)?;
    let keys = derive_all(&img)?;
    println!("{path}: {}x{}", img.width(), img.height());
    for (k, s) in keys.streams.iter().enumerate() {
        println!("  stream {}: x0 = {:.6}  a = {:.6}", k + 1, s.params.x0(), s.params.a());
    }

    for mode in [Mode::Lossless16, Mode::Paper8] {
        let start = std::time::Instant::now();
        let env = encrypt(&img, &keys, mode)?;
        let back = decrypt(&env, &keys)?;
        let worst = img
            .pixels()
            .iter()
            .zip(back.pixels())
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap_or(0);
        println!(
            "{:<10} {} bytes, range [{:.1}, {:.1}], max error {worst}, {:?}",
            mode.name(),
            env.to_bytes().len(),
            env.qmin,
            env.qmax,
            start.elapsed()
        );
    }
    Ok(())
}
