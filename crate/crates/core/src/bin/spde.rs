use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use spde_core::diagnostics::{
    besov_sobolev_contrast, default_t_grid, increment_scaling_check, verify_assumption3, DiagnosticReport,
    DEFAULT_BLOCKS, DEFAULT_TRUNCATION, INCREMENT_BAND,
};
use spde_core::harness::{
    emit_report, render_field, render_mesh, render_report, run_spatial_convergence, run_temporal_convergence,
    ExperimentConfig,
};
use spde_core::noise::{sample_increments, SEED_ENV_VAR};
use spde_core::solver::{solve_path, SchemeConfig};
use spde_core::{Error, GradedMesh, Result};

/// Stochastic heat equation solver: single paths, convergence studies,
/// noise diagnostics.
#[derive(Parser)]
#[command(name = "spde", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides SPDE_SEED and the config file
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Mesh grading exponent
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// white or power:DELTA
    #[arg(long, global = true)]
    spectrum: Option<String>,
    /// sine or dirac
    #[arg(long, global = true)]
    datum: Option<String>,
    /// galerkin or collocation
    #[arg(long, global = true)]
    variant: Option<String>,
    /// Worker threads (0 = one per core)
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one path and print the final sine coefficients
    Solve,
    /// Spatial convergence study over the configured mode counts
    ConvergeSpace,
    /// Temporal convergence study over the configured step sizes
    ConvergeTime,
    /// Closed-form checks of the noise regularity bounds
    DiagnoseNoise,
    /// Print the graded mesh
    MeshDump,
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Ok(seed) = std::env::var(SEED_ENV_VAR) {
        cfg.seed = seed
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("{SEED_ENV_VAR}='{seed}' is not an unsigned integer")))?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(n) = cli.samples {
        cfg.samples = n;
    }
    if let Some(g) = cli.gamma {
        cfg.gamma = g;
    }
    for (key, value) in [
        ("spectrum", &cli.spectrum),
        ("datum", &cli.datum),
        ("variant", &cli.variant),
    ] {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if let Some(w) = cli.workers {
        cfg.workers = w;
    }
    if let Some(out) = &cli.out {
        cfg.out = Some(out.clone());
    }
    for warning in cfg.validate()? {
        eprintln!("warning: {warning}");
    }
    Ok(cfg)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn fixed_mesh(cfg: &ExperimentConfig) -> Result<Arc<GradedMesh>> {
    let steps = match cfg.steps {
        Some(n) => n,
        None => GradedMesh::steps_for_tau(cfg.final_time, cfg.gamma, cfg.ref_tau)?,
    };
    Ok(Arc::new(GradedMesh::new(cfg.final_time, steps, cfg.gamma)?))
}

fn solve(cfg: &ExperimentConfig) -> Result<()> {
    let mesh = fixed_mesh(cfg)?;
    let modes = *cfg.modes.last().expect("validated");
    let scheme = SchemeConfig {
        oversample: cfg.oversample,
        standard_first_step: cfg.standard_first_step,
        ..SchemeConfig::new(cfg.variant, cfg.drift.clone(), modes)
    };
    let pack = sample_increments(&mesh, modes, cfg.seed, 0);
    let field = solve_path(&cfg.datum, &mesh, &scheme, &pack, &cfg.spectrum)?;
    write_or_print(cfg.out.as_deref(), &render_field(&field))
}

fn converge(cfg: &ExperimentConfig, spatial: bool) -> Result<()> {
    let table = if spatial {
        run_spatial_convergence(cfg)?
    } else {
        run_temporal_convergence(cfg)?
    };
    if let Some(path) = &cfg.out {
        emit_report(&table, cfg, path)?;
    }
    print!("{}", render_report(&table));
    Ok(())
}

fn diagnose_noise(cfg: &ExperimentConfig) -> Result<()> {
    let spectrum = cfg.spectrum.with_alpha(cfg.alpha());
    let grid = default_t_grid(cfg.final_time, 16);
    let nominal = verify_assumption3(&spectrum, &grid, DEFAULT_TRUNCATION, DEFAULT_BLOCKS)?;
    let probe = verify_assumption3(
        &spectrum.with_alpha(spectrum.alpha() + 0.1),
        &grid,
        DEFAULT_TRUNCATION,
        DEFAULT_BLOCKS,
    )?;
    let contrast = besov_sobolev_contrast(&spectrum, cfg.final_time, 8, DEFAULT_BLOCKS)?;
    let gaps: Vec<f64> = (6..=24).map(|j| 2f64.powi(-j)).collect();
    let scaling = increment_scaling_check(&spectrum, 1.0, &gaps, DEFAULT_TRUNCATION, INCREMENT_BAND)?;
    let reports: [&DiagnosticReport; 4] = [&nominal, &probe, &contrast, &scaling];
    for r in reports {
        println!("{}", r.summary());
    }
    println!(
        "sharpness: alpha + 0.1 {}",
        if probe.pass { "unexpectedly passes" } else { "fails as expected" }
    );
    if let Some(path) = &cfg.out {
        let csv: Vec<String> = reports.iter().map(|r| r.to_csv()).collect();
        write_or_print(Some(path), &csv.join("\n"))?;
    }
    Ok(())
}

fn mesh_dump(cfg: &ExperimentConfig) -> Result<()> {
    let mesh = fixed_mesh(cfg)?;
    let (c_min, c_max) = mesh.verify_grading()?;
    eprintln!(
        "N = {}, tau = {:e}, grading constants in [{c_min:.6}, {c_max:.6}]",
        mesh.steps(),
        mesh.tau()
    );
    write_or_print(cfg.out.as_deref(), &render_mesh(&mesh))
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = build_config(cli)?;
    match cli.command {
        Command::Solve => solve(&cfg),
        Command::ConvergeSpace => converge(&cfg, true),
        Command::ConvergeTime => converge(&cfg, false),
        Command::DiagnoseNoise => diagnose_noise(&cfg),
        Command::MeshDump => mesh_dump(&cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
