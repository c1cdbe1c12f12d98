//! Spatial convergence with a user-supplied drift and noise spectrum.
//!
//! cargo run --release --example custom_model -- [samples]

use spde_core::harness::{render_report, run_spatial_convergence, ExperimentConfig};
use spde_core::{Drift, NoiseSpectrum};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let samples: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(100);

    // mu_k = 1/k^0.6 with a faster-decaying tail; still alpha = 0.8.
    let spectrum = NoiseSpectrum::custom(|k| (k as f64).powf(-0.6) / (1.0 + 1e-3 * k as f64), 0.8)?;
    let drift = Drift::new("sin", f64::sin, Some(1.0));

    let cfg = ExperimentConfig {
        spectrum,
        drift,
        samples,
        ..Default::default()
    };
    for w in cfg.validate()? {
        eprintln!("warning: {w}");
    }
    let table = run_spatial_convergence(&cfg)?;
    print!("{}", render_report(&table));
    Ok(())
}
