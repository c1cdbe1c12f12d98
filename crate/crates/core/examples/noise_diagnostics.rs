//! Deterministic checks of the noise bounds: the nominal regularity passes,
//! a slightly larger one fails, and block norms stay flat while the Sobolev
//! norm keeps growing.
//!
//! cargo run --release --example noise_diagnostics -- [white|power:D]

use spde_core::diagnostics::{
    besov_sobolev_contrast, default_t_grid, sharpness_probe, verify_assumption3, DEFAULT_BLOCKS,
    DEFAULT_TRUNCATION,
};
use spde_core::NoiseSpectrum;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spectrum = NoiseSpectrum::parse(&std::env::args().nth(1).unwrap_or_else(|| "white".into()))?;
    let grid = default_t_grid(0.5, 16);

    let nominal = verify_assumption3(&spectrum, &grid, DEFAULT_TRUNCATION, DEFAULT_BLOCKS)?;
    println!("{}", nominal.summary());
    let probe = spectrum.with_alpha(spectrum.alpha() + 0.1);
    println!("{}", verify_assumption3(&probe, &grid, DEFAULT_TRUNCATION, DEFAULT_BLOCKS)?.summary());

    let alphas: Vec<f64> = (1..=22).map(|i| i as f64 * 0.05).collect();
    let sharp = sharpness_probe(&spectrum, &alphas, &default_t_grid(0.5, 12), 1 << 15, 12)?;
    println!(
        "largest passing alpha {:.2} (claimed {:.2})",
        sharp.note("largest_passing_alpha").unwrap_or(f64::NAN),
        spectrum.alpha()
    );

    let contrast = besov_sobolev_contrast(&spectrum, 0.5, 8, 14)?;
    println!("{}", contrast.summary());
    print!("{}", contrast.to_csv());
    Ok(())
}
