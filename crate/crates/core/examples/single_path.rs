//! One sample path of the stochastic heat equation, printed as `x,u` at the
//! final time together with the L2 norm along the graded mesh.
//!
//! cargo run --release --example single_path -- [sine|dirac] [modes] [seed]

use std::sync::Arc;

use spde_core::noise::sample_increments;
use spde_core::solver::solve_trajectory;
use spde_core::spectral::evaluate_on_grid;
use spde_core::{Drift, GradedMesh, InitialDatum, NoiseSpectrum, SchemeConfig, Variant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let datum = InitialDatum::parse(args.first().map(String::as_str).unwrap_or("sine"))?;
    let modes: usize = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(128);
    let seed: u64 = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(0);

    let steps = GradedMesh::steps_for_tau(0.5, 0.7, 1.0 / 64.0)?;
    let mesh = Arc::new(GradedMesh::new(0.5, steps, 0.7)?);
    let pack = sample_increments(&mesh, modes, seed, 0);
    let cfg = SchemeConfig::new(Variant::Collocation, Drift::sqrt1pu2(), modes);
    let traj = solve_trajectory(&datum, &mesh, &cfg, &pack, &NoiseSpectrum::white())?;

    eprintln!("{} steps, first step {:.3e}", steps, mesh.step(1));
    for (n, state) in traj.states.iter().enumerate().step_by(steps / 8) {
        eprintln!("t = {:.4e}  ||u|| = {:.4}", mesh.time(n), state.l2_norm());
    }
    let last = traj.states.last().expect("at least one step");
    println!("x,u");
    for (m, u) in evaluate_on_grid(last).iter().enumerate() {
        println!("{},{}", (m + 1) as f64 / (modes + 1) as f64, u);
    }
    Ok(())
}
