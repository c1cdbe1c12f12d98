//! Spatial convergence study with the white-noise default setup.
//!
//! cargo run --release --example spatial_convergence -- [white|power:D] [sine|dirac] [samples]

use spde_core::harness::{render_report, run_spatial_convergence, ExperimentConfig};
use spde_core::{InitialDatum, NoiseSpectrum};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut cfg = ExperimentConfig::default();
    if let Some(s) = args.first() {
        cfg.spectrum = NoiseSpectrum::parse(s)?;
    }
    if let Some(d) = args.get(1) {
        cfg.datum = InitialDatum::parse(d)?;
    }
    if let Some(n) = args.get(2) {
        cfg.samples = n.parse()?;
    }
    let start = std::time::Instant::now();
    let table = run_spatial_convergence(&cfg)?;
    print!("{}", render_report(&table));
    eprintln!("{} samples in {:.1?}", cfg.samples, start.elapsed());
    Ok(())
}
