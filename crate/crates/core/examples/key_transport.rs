//! Writes a ciphertext container and key file, then decrypts from disk.
//!
//! ```sh
//! cargo run --example key_transport
//! ```

use cghw::cipher::{decrypt, encrypt, Mode};
use cghw::envelope::{read_envelope, write_envelope, HEADER_LEN};
use cghw::image::GrayImage;
use cghw::keyfile::{read_key_file, to_key_text, write_key_file};
use cghw::keys::derive_all;

fn main() -> cghw::Result<()> {
    let img = GrayImage::from_fn(32, 24, |r, c| (r * 8 + c * 3) as u8)?;
    let keys = derive_all(&img)?;
    let env = encrypt(&img, &keys, Mode::Lossless16)?;

    let dir = tempfile::tempdir().expect("temporary directory");
    let (cipher_path, key_path) = (dir.path().join("image.cghw"), dir.path().join("image.key"));
    write_envelope(&env, &cipher_path)?;
    write_key_file(&keys, &key_path)?;

    print!("{}", to_key_text(&keys));
    let bytes = env.to_bytes();
    let hex: Vec<String> = bytes[..HEADER_LEN].iter().map(|b| format!("{b:02x}")).collect();
    println!("header: {}", hex.join(" "));
    println!("payload: {} bytes", bytes.len() - HEADER_LEN);

    let restored = decrypt(&read_envelope(&cipher_path)?, &read_key_file(&key_path)?)?;
    println!("restored exactly: {}", restored == img);
    Ok(())
}
