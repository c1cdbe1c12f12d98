use std::sync::Arc;

use spde_core::diagnostics::{
    default_t_grid, empirical_regularity, regularity_snapshots, sharpness_probe, verify_assumption3,
};
use spde_core::harness::{ExperimentConfig, DIRAC_BETA};
use spde_core::solver::step;
use spde_core::{Drift, GradedMesh, InitialDatum, NoiseSpectrum, SchemeConfig, SpectralField, Variant};

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

#[test]
fn collocation_and_galerkin_steps_converge_together() {
    let mesh = GradedMesh::new(0.5, 32, 0.7).unwrap();
    let resolutions = [16usize, 32, 64, 128, 256];
    let mut gaps = Vec::new();
    for &m in &resolutions {
        let mut coeffs = vec![0.0; m];
        coeffs[0] = 1.2;
        coeffs[2] = -0.4;
        coeffs[4] = 0.1;
        let state = SpectralField::new(coeffs).unwrap();
        let zero = SpectralField::zeros(m);
        let out = |variant| {
            let cfg = SchemeConfig::new(variant, Drift::sqrt1pu2(), m);
            step(&state, 5, &zero, &cfg, &mesh).unwrap()
        };
        gaps.push((&out(Variant::Collocation) - &out(Variant::Galerkin)).l2_norm());
    }
    let xs: Vec<f64> = resolutions.iter().map(|&m| m as f64).collect();
    let s = slope(&xs, &gaps);
    assert!(s <= -0.9, "slope {s}, gaps {gaps:?}");
}

fn small_config(datum: InitialDatum) -> ExperimentConfig {
    ExperimentConfig {
        datum,
        samples: 64,
        workers: 2,
        seed: 11,
        ..Default::default()
    }
}

#[test]
fn lipschitz_drift_keeps_moments_bounded() {
    for (datum, beta) in [(InitialDatum::Sine, 0.5), (InitialDatum::Dirac { at: 0.5 }, DIRAC_BETA)] {
        let cfg = small_config(datum.clone());
        let levels: Vec<usize> = (0..=7).map(|i| 128 >> i).collect();
        let snaps = regularity_snapshots(&cfg, 64, 128, &levels).unwrap();
        assert!(snaps.iter().all(|(t, _)| *t > 0.0));
        let report = empirical_regularity(&snaps, beta, 0.5, 2.0).unwrap();
        assert!(report.pass, "{:?}: {}", datum, report.summary());
        let report4 = empirical_regularity(&snaps, beta, 0.5, 4.0).unwrap();
        assert!(report4.pass, "{:?}: {}", datum, report4.summary());
    }
}

#[test]
fn dirac_norm_blows_up_like_envelope() {
    // Noise-free linear run: ||e^{-tA} delta||^2 = sum_k 2 sin^2(k pi/2) e^{-2 t lambda_k},
    // which grows like t^{-1/2} until the mode cutoff is reached.
    let cfg = ExperimentConfig {
        spectrum: NoiseSpectrum::custom(|_| 0.0, 0.5).unwrap(),
        drift: Drift::zero(),
        datum: InitialDatum::Dirac { at: 0.5 },
        samples: 1,
        workers: 1,
        ..Default::default()
    };
    let snaps = regularity_snapshots(&cfg, 512, 64, &[64, 48, 32, 24, 16]).unwrap();
    for (t, e) in &snaps {
        let exact: f64 = (1..=512)
            .map(|k| {
                let lam = (k as f64 * std::f64::consts::PI).powi(2);
                2.0 * (k as f64 * std::f64::consts::PI / 2.0).sin().powi(2) * (-2.0 * t * lam).exp()
            })
            .sum::<f64>()
            .sqrt();
        let got = e.lp_l2_norm(2.0);
        assert!((got - exact).abs() <= 1e-10 * exact, "t={t}: {got} vs {exact}");
    }
    let report = empirical_regularity(&snaps, DIRAC_BETA, 0.5, 2.0).unwrap();
    assert!(report.pass, "{}", report.summary());
}

#[test]
fn zero_datum_zero_noise_grows_from_drift_only() {
    let cfg = ExperimentConfig {
        spectrum: NoiseSpectrum::custom(|_| 0.0, 0.5).unwrap(),
        datum: InitialDatum::Zero,
        samples: 1,
        workers: 1,
        ..Default::default()
    };
    let levels = [64usize, 32, 16, 8, 4];
    let snaps = regularity_snapshots(&cfg, 32, 64, &levels).unwrap();
    let mesh = GradedMesh::new(0.5, 64, 0.7).unwrap();
    for (t, e) in &snaps {
        // f = sqrt(1 + u^2) <= 1 + |u| and the drift starts after the first step.
        let norm = e.lp_l2_norm(2.0);
        assert!(norm <= 2.0 * (t - mesh.step(1)).max(0.0) + 1e-15, "t={t}: {norm}");
    }
}

#[test]
fn sharpness_threshold_tracks_classification() {
    let grid = default_t_grid(0.5, 12);
    let alphas: Vec<f64> = (1..=22).map(|i| i as f64 * 0.05).collect();
    for delta in [0.0, 0.5, 0.8, 1.0] {
        let spectrum = NoiseSpectrum::power(delta).unwrap();
        let r = sharpness_probe(&spectrum, &alphas, &grid, 1 << 15, 12).unwrap();
        let largest = r.note("largest_passing_alpha").unwrap();
        let nominal = ((1.0 + delta) / 2.0f64).min(1.0);
        assert!((largest - nominal).abs() <= 0.05 + 1e-9, "delta={delta}: {largest}");
        assert!(r.pass);
    }
}

#[test]
fn reports_are_reproducible() {
    let grid = default_t_grid(0.5, 8);
    let s = NoiseSpectrum::power(0.8).unwrap();
    let a = verify_assumption3(&s, &grid, 1 << 12, 10).unwrap();
    let b = verify_assumption3(&s, &grid, 1 << 12, 10).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
}

#[test]
fn standard_first_step_differs_only_by_first_interval() {
    let mesh = Arc::new(GradedMesh::new(0.5, 16, 0.7).unwrap());
    let pack = spde_core::noise::sample_increments(&mesh, 8, 0, 0);
    let spectrum = NoiseSpectrum::white();
    let modified = SchemeConfig::new(Variant::Collocation, Drift::zero(), 8);
    let standard = SchemeConfig {
        standard_first_step: true,
        ..modified.clone()
    };
    let a = spde_core::solver::solve_path(&InitialDatum::Sine, &mesh, &modified, &pack, &spectrum).unwrap();
    let b = spde_core::solver::solve_path(&InitialDatum::Sine, &mesh, &standard, &pack, &spectrum).unwrap();
    let first = spde_core::noise::convolution_increment(&pack, 1, &spectrum, 8).unwrap();
    for k in 1..=8 {
        let lam = (k as f64 * std::f64::consts::PI).powi(2);
        let carried = (-(0.5 - mesh.time(1)) * lam).exp() * first.coeff(k);
        assert!((b.coeff(k) - a.coeff(k) - carried).abs() < 1e-14, "k={k}");
    }
}
