//! Flat `key = value` experiment configuration.
//!
//! Blank lines and `#` comments are ignored; unknown keys are rejected.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::mesh::gamma_lower_bound;
use crate::noise::NoiseSpectrum;
use crate::solver::{Drift, InitialDatum, Variant};

/// Regularity index assigned to the Dirac datum, which lies in
/// `Ḣ^{-1/2-eps}` for every `eps > 0`.
pub const DIRAC_BETA: f64 = -0.51;

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub final_time: f64,
    pub gamma: f64,
    pub spectrum: NoiseSpectrum,
    /// Overrides the spectrum's own regularity classification.
    pub alpha: Option<f64>,
    pub datum: InitialDatum,
    /// Datum regularity; defaults by datum when absent.
    pub beta: Option<f64>,
    pub variant: Variant,
    pub drift: Drift,
    pub oversample: usize,
    /// Spatial study resolutions (each compared against twice its value).
    pub modes: Vec<usize>,
    /// Temporal study nominal steps (each compared against half its value).
    pub taus: Vec<f64>,
    /// Nominal step of the fixed mesh used by spatial studies and `solve`.
    pub ref_tau: f64,
    /// Explicit step count for `solve` and `mesh-dump`, bypassing `ref_tau`.
    pub steps: Option<usize>,
    /// Fixed mode count in temporal studies; `None` ties M to N.
    pub temporal_modes: Option<usize>,
    pub samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    /// Worker threads; 0 means one per core. Never affects results.
    pub workers: usize,
    /// Accept a grading exponent at or below the admissible bound.
    pub allow_gamma: bool,
    pub standard_first_step: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            final_time: 0.5,
            gamma: 0.7,
            spectrum: NoiseSpectrum::white(),
            alpha: None,
            datum: InitialDatum::Sine,
            beta: None,
            variant: Variant::Collocation,
            drift: Drift::sqrt1pu2(),
            oversample: 4,
            modes: vec![16, 32, 64, 128],
            taus: vec![1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0],
            ref_tau: 1.0 / 256.0,
            steps: None,
            temporal_modes: None,
            samples: 200,
            seed: 0,
            out: None,
            workers: 0,
            allow_gamma: false,
            standard_first_step: false,
        }
    }
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    let v = v.trim();
    let parsed = if let Some((num, den)) = v.split_once('/') {
        let num: f64 = num.trim().parse().map_err(|_| bad(key, v))?;
        let den: f64 = den.trim().parse().map_err(|_| bad(key, v))?;
        num / den
    } else if let Some(exp) = v.strip_prefix("2^") {
        let e: i32 = exp.trim().parse().map_err(|_| bad(key, v))?;
        2f64.powi(e)
    } else {
        v.parse().map_err(|_| bad(key, v))?
    };
    if !parsed.is_finite() {
        return Err(bad(key, v));
    }
    Ok(parsed)
}

fn parse_usize(key: &str, v: &str) -> Result<usize> {
    v.trim().parse().map_err(|_| bad(key, v))
}

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(bad(key, v)),
    }
}

fn bad(key: &str, v: &str) -> Error {
    Error::config(format!("invalid value '{v}' for key '{key}'"))
}

fn format_list<T: std::fmt::Display>(items: &[T]) -> String {
    items.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl ExperimentConfig {
    /// Sets one key. Shared by the file parser and CLI overrides.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "final_time" => self.final_time = parse_f64(key, value)?,
            "gamma" => self.gamma = parse_f64(key, value)?,
            "spectrum" => self.spectrum = NoiseSpectrum::parse(value)?,
            "alpha" => self.alpha = Some(parse_f64(key, value)?),
            "datum" => self.datum = InitialDatum::parse(value)?,
            "beta" => self.beta = Some(parse_f64(key, value)?),
            "variant" => self.variant = Variant::parse(value)?,
            "drift" => self.drift = Drift::by_name(value)?,
            "oversample" => self.oversample = parse_usize(key, value)?,
            "modes" => {
                self.modes = value
                    .split(',')
                    .map(|m| parse_usize(key, m))
                    .collect::<Result<_>>()?
            }
            "taus" => {
                self.taus = value
                    .split(',')
                    .map(|t| parse_f64(key, t))
                    .collect::<Result<_>>()?
            }
            "ref_tau" => self.ref_tau = parse_f64(key, value)?,
            "steps" => self.steps = Some(parse_usize(key, value)?),
            "temporal_modes" => self.temporal_modes = Some(parse_usize(key, value)?),
            "samples" => self.samples = parse_usize(key, value)?,
            "seed" => self.seed = value.parse().map_err(|_| bad(key, value))?,
            "out" => self.out = Some(PathBuf::from(value)),
            "workers" => self.workers = parse_usize(key, value)?,
            "allow_gamma" => self.allow_gamma = parse_bool(key, value)?,
            "standard_first_step" => self.standard_first_step = parse_bool(key, value)?,
            _ => return Err(Error::config(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::config(format!("line {}: expected key = value", lineno + 1))
            })?;
            cfg.set(key.trim(), value)
                .map_err(|e| Error::config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Canonical text form; parsing it reproduces every result-relevant
    /// setting. `workers` and `out` are omitted since they do not affect
    /// results.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "final_time = {}", self.final_time);
        let _ = writeln!(s, "gamma = {}", self.gamma);
        let _ = writeln!(s, "spectrum = {}", self.spectrum.label());
        if let Some(a) = self.alpha {
            let _ = writeln!(s, "alpha = {a}");
        }
        let _ = writeln!(s, "datum = {}", self.datum.label());
        if let Some(b) = self.beta {
            let _ = writeln!(s, "beta = {b}");
        }
        let _ = writeln!(s, "variant = {}", self.variant.label());
        let _ = writeln!(s, "drift = {}", self.drift.name());
        let _ = writeln!(s, "oversample = {}", self.oversample);
        let _ = writeln!(s, "modes = {}", format_list(&self.modes));
        let _ = writeln!(s, "taus = {}", format_list(&self.taus));
        let _ = writeln!(s, "ref_tau = {}", self.ref_tau);
        if let Some(n) = self.steps {
            let _ = writeln!(s, "steps = {n}");
        }
        if let Some(m) = self.temporal_modes {
            let _ = writeln!(s, "temporal_modes = {m}");
        }
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "allow_gamma = {}", self.allow_gamma);
        let _ = writeln!(s, "standard_first_step = {}", self.standard_first_step);
        s
    }

    /// Noise regularity used for the grading check.
    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or_else(|| self.spectrum.alpha())
    }

    /// Datum regularity used for the grading check.
    pub fn beta(&self) -> f64 {
        self.beta.unwrap_or(match self.datum {
            InitialDatum::Dirac { .. } => DIRAC_BETA,
            // Smooth data: any beta <= alpha, and beta = alpha gives the weakest bound.
            _ => self.alpha(),
        })
    }

    /// Checks structural settings and the grading rule. Returns warnings
    /// for overridden violations.
    pub fn validate(&self) -> Result<Vec<String>> {
        let mut warnings = Vec::new();
        if !(self.final_time > 0.0) {
            return Err(Error::validation("final_time must be positive"));
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::validation(format!("gamma {} outside [0, 1)", self.gamma)));
        }
        if self.samples == 0 {
            return Err(Error::validation("samples must be positive"));
        }
        if !(self.ref_tau > 0.0) {
            return Err(Error::validation("ref_tau must be positive"));
        }
        if self.modes.is_empty() || self.modes.contains(&0) {
            return Err(Error::validation("modes must be a nonempty list of positive integers"));
        }
        if self.modes.windows(2).any(|w| w[1] != 2 * w[0]) {
            return Err(Error::validation(format!(
                "modes must be sorted dyadic resolutions, got {:?}",
                self.modes
            )));
        }
        if self.taus.is_empty() || self.taus.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::validation("taus must be a nonempty list of positive steps"));
        }
        if self.taus.windows(2).any(|w| w[1] != 0.5 * w[0]) {
            return Err(Error::validation(format!(
                "taus must be sorted dyadic steps, got {:?}",
                self.taus
            )));
        }
        if self.variant == Variant::Galerkin && self.oversample < 2 {
            return Err(Error::validation("Galerkin oversample must be >= 2"));
        }
        if self.temporal_modes == Some(0) {
            return Err(Error::validation("temporal_modes must be positive"));
        }
        let (alpha, beta) = (self.alpha(), self.beta());
        let bound = gamma_lower_bound(alpha, beta).map_err(|e| Error::validation(e.to_string()))?;
        if self.gamma <= bound {
            let msg = format!(
                "gamma = {} does not exceed max(1/2, 1 - (1 + beta)/alpha) = {bound} for alpha = {alpha}, beta = {beta}",
                self.gamma
            );
            if self.allow_gamma {
                warnings.push(msg);
            } else {
                return Err(Error::validation(format!("{msg}; set allow_gamma = true to run anyway")));
            }
        }
        Ok(warnings)
    }
}
