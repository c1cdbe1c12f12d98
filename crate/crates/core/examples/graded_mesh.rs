//! Graded meshes for a few nominal step sizes and the smallest admissible
//! grading exponent for each noise and datum pairing.
//!
//! cargo run --example graded_mesh -- [gamma]

use spde_core::harness::DIRAC_BETA;
use spde_core::{gamma_lower_bound, GradedMesh};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let gamma: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(0.7);

    println!("tau,steps,first_step,last_step,c_min,c_max");
    for j in 4..=8 {
        let tau = 2f64.powi(-j);
        let steps = GradedMesh::steps_for_tau(0.5, gamma, tau)?;
        let mesh = GradedMesh::new(0.5, steps, gamma)?;
        let (c_min, c_max) = mesh.verify_grading()?;
        println!(
            "2^-{j},{steps},{:.3e},{:.3e},{c_min:.4},{c_max:.4}",
            mesh.step(1),
            mesh.step(steps)
        );
    }

    eprintln!("smallest admissible gamma (must be exceeded):");
    for alpha in [0.5, 0.75, 0.9, 1.0] {
        let smooth = gamma_lower_bound(alpha, alpha)?;
        let dirac = gamma_lower_bound(alpha, DIRAC_BETA)?;
        eprintln!("  alpha = {alpha:<4}  smooth datum {smooth:.3}  Dirac datum {dirac:.3}");
    }
    Ok(())
}
