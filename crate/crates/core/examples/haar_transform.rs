//! One-level transform with the classical Haar matrix and with a keyed one.
//!
//! ```sh
//! cargo run --example haar_transform
//! ```

use cghw::chaos::{orbit, ChaoticParams};
use cghw::wavelet::{forward1, inverse1, AnalysisMatrix};
use ndarray::Array2;

fn energy(m: &Array2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum()
}

fn report(label: &str, x: &Array2<f64>, rows: &AnalysisMatrix, cols: &AnalysisMatrix) -> cghw::Result<()> {
    let bands = forward1(x, rows, cols)?;
    let total: f64 = bands.bands().iter().map(|b| energy(b)).sum();
    println!("{label}");
    for (name, band) in ["LL", "LH", "HL", "HH"].iter().zip(bands.bands()) {
        println!("  {name} energy share {:>6.2}%", 100.0 * energy(band) / total);
    }
    let back = inverse1(&bands, rows, cols)?;
    let err = back
        .iter()
        .zip(x.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("  reconstruction error {err:.2e}");
    Ok(())
}

fn main() -> cghw::Result<()> {
    let n = 16;
    let x = Array2::from_shape_fn((n, n), |(r, c)| {
        128.0 + 60.0 * ((r as f64) / 3.0).sin() * ((c as f64) / 5.0).cos()
    });

    let haar = AnalysisMatrix::haar(n)?;
    report("classical Haar", &x, &haar, &haar)?;

    let stream = orbit(&ChaoticParams::new(0.41, 1.3, 2)?, 4 * n, 100)?;
    let (rv, cv) = stream.values().split_at(2 * n);
    let rows = AnalysisMatrix::from_stream(rv, n)?;
    let cols = AnalysisMatrix::from_stream(cv, n)?;
    report("keyed gradient Haar", &x, &rows, &cols)?;

    let dets: Vec<String> = rows
        .blocks()
        .iter()
        .take(4)
        .map(|b| format!("{:.3}", b.determinant()))
        .collect();
    println!("first block determinants: {}", dets.join(" "));
    Ok(())
}
