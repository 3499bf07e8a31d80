//! Iterates the degree-2 rational map and shows how fast nearby orbits part.
//!
//! ```sh
//! cargo run --example keystream_orbit
//! ```

use cghw::chaos::{orbit, phi_n, ChaoticParams};

fn main() -> cghw::Result<()> {
    let params = ChaoticParams::new(0.6, 2.0, 2)?;
    let stream = orbit(&params, 16, 0)?;
    println!("x0 = 0.6, a = 2, no burn-in:");
    for (i, v) in stream.values().iter().enumerate() {
        println!("  s{:<2} = {v:.6}", i + 1);
    }

    // higher degrees are available for experimentation
    for n in 2..=5 {
        println!("phi_{n}(0.3, 1.5) = {:.6}", phi_n(0.3, 1.5, n)?);
    }

    let a = ChaoticParams::new(0.37, 1.7, 2)?;
    let b = ChaoticParams::new(0.37 + 1e-10, 1.7, 2)?;
    let (sa, sb) = (orbit(&a, 60, 0)?, orbit(&b, 60, 0)?);
    println!("\nstep  |difference| for x0 shifted by 1e-10");
    for (i, (p, q)) in sa.values().iter().zip(sb.values()).enumerate().step_by(6) {
        println!("{:>4}  {:.3e}", i + 1, (p - q).abs());
    }
    Ok(())
}
