//! Monte Carlo convergence studies with self-referencing dyadic pairs:
//! `E_2(M) = (E ||U_M - U_{2M}||^2)^{1/2}` in space and the analogous
//! `tau` versus `tau/2` comparison in time.

use std::sync::Arc;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::mesh::GradedMesh;
use crate::noise::{sample_increments, IncrementScales};
use crate::solver::{initial_state, PreparedScheme, SchemeConfig};
use crate::spectral::NonlinearityWorkspace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StudyKind {
    Spatial,
    Temporal,
}

impl StudyKind {
    pub fn label(&self) -> &'static str {
        match self {
            StudyKind::Spatial => "spatial",
            StudyKind::Temporal => "temporal",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    /// `M` for spatial studies, nominal `tau` for temporal ones.
    pub resolution: f64,
    pub error: f64,
    /// Delta-method standard error of `error`.
    pub stderr: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable {
    pub kind: StudyKind,
    pub rows: Vec<ErrorRow>,
    /// Pairwise `log2(E_i / E_{i+1})`; empty when some error vanishes.
    pub orders: Vec<f64>,
    pub order_stderr: Vec<f64>,
    pub mean_order: Option<f64>,
}

/// Pairwise observed orders `log2(e_i / e_{i+1})` and their mean.
pub fn estimate_order(errors: &[f64]) -> Result<(Vec<f64>, f64)> {
    if errors.len() < 2 {
        return Err(Error::validation("order estimation needs at least two errors"));
    }
    if let Some(e) = errors.iter().find(|e| !(**e > 0.0) || !e.is_finite()) {
        return Err(Error::validation(format!("errors must be positive and finite, got {e}")));
    }
    let orders: Vec<f64> = errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let mean = orders.iter().sum::<f64>() / orders.len() as f64;
    Ok((orders, mean))
}

/// Neumaier-compensated sum in the given order.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

impl ErrorTable {
    /// Builds the table from per-sample squared differences, `sq[i][r]` being
    /// sample `i` at resolution `r`.
    pub fn from_squared(kind: StudyKind, resolutions: &[f64], sq: &[Vec<f64>]) -> Self {
        let n = sq.len();
        let rows: Vec<ErrorRow> = resolutions
            .iter()
            .enumerate()
            .map(|(r, &resolution)| {
                let mean = compensated_sum(sq.iter().map(|s| s[r])) / n as f64;
                let var = if n > 1 {
                    compensated_sum(sq.iter().map(|s| (s[r] - mean).powi(2))) / (n - 1) as f64
                } else {
                    0.0
                };
                let error = mean.sqrt();
                let stderr = if error > 0.0 {
                    (var / n as f64).sqrt() / (2.0 * error)
                } else {
                    0.0
                };
                ErrorRow {
                    resolution,
                    error,
                    stderr,
                    samples: n,
                }
            })
            .collect();
        let errors: Vec<f64> = rows.iter().map(|r| r.error).collect();
        let (orders, mean_order) = match estimate_order(&errors) {
            Ok((o, m)) => (o, Some(m)),
            Err(_) => (Vec::new(), None),
        };
        let order_stderr = if orders.is_empty() {
            Vec::new()
        } else {
            rows.windows(2)
                .map(|w| {
                    ((w[0].stderr / w[0].error).powi(2) + (w[1].stderr / w[1].error).powi(2)).sqrt()
                        / std::f64::consts::LN_2
                })
                .collect()
        };
        Self {
            kind,
            rows,
            orders,
            order_stderr,
            mean_order,
        }
    }

    pub fn errors(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.error).collect()
    }

    /// Standard error of the mean order, treating pairs as independent.
    pub fn mean_order_stderr(&self) -> Option<f64> {
        if self.order_stderr.is_empty() {
            return None;
        }
        let n = self.order_stderr.len() as f64;
        Some(self.order_stderr.iter().map(|s| s * s).sum::<f64>().sqrt() / n)
    }
}

/// Maps `f` over sample indices on `workers` threads, preserving index
/// order; the first failing sample (by index) wins.
pub(crate) fn map_samples<T, W, I, F>(workers: usize, count: usize, init: I, f: F) -> Result<Vec<T>>
where
    T: Send,
    I: Fn() -> W + Sync + Send,
    F: Fn(&mut W, u64) -> Result<T> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<Result<T>> = pool.install(|| {
        (0..count as u64)
            .into_par_iter()
            .map_init(&init, |w, i| f(w, i).map_err(|e| e.with_sample(i)))
            .collect()
    });
    results.into_iter().collect()
}

fn sq_distance(a: &[f64], b: &[f64]) -> f64 {
    let common = a.len().min(b.len());
    let head: f64 = a[..common].iter().zip(&b[..common]).map(|(x, y)| (x - y) * (x - y)).sum();
    let tail: f64 = a[common..].iter().chain(&b[common..]).map(|x| x * x).sum();
    head + tail
}

fn scheme_for(cfg: &ExperimentConfig, modes: usize) -> SchemeConfig {
    SchemeConfig {
        oversample: cfg.oversample,
        standard_first_step: cfg.standard_first_step,
        ..SchemeConfig::new(cfg.variant, cfg.drift.clone(), modes)
    }
}

/// One level of a study: prepared scheme, initial state and the coarsening
/// factor relative to the shared noise mesh.
struct Level {
    scheme: PreparedScheme,
    u0: Vec<f64>,
    factor: usize,
}

fn run_levels(
    cfg: &ExperimentConfig,
    fine_mesh: &Arc<GradedMesh>,
    levels: &[Level],
) -> Result<Vec<Vec<f64>>> {
    let pack_modes = levels.iter().map(|l| l.scheme.modes()).max().unwrap_or(1);
    let scales = IncrementScales::new(fine_mesh, &cfg.spectrum, pack_modes);
    let init = || -> Option<Vec<NonlinearityWorkspace>> {
        levels.iter().map(|l| l.scheme.workspace().ok()).collect()
    };
    map_samples(cfg.workers, cfg.samples, init, |ws, i| {
        let ws = ws
            .as_mut()
            .ok_or_else(|| Error::validation("cannot build nonlinearity workspace"))?;
        let pack = sample_increments(fine_mesh, pack_modes, cfg.seed, i);
        let finals: Vec<Vec<f64>> = levels
            .iter()
            .zip(ws.iter_mut())
            .map(|(level, w)| {
                let incs = scales.aggregate(&pack, level.factor, level.scheme.modes())?;
                level.scheme.run(&level.u0, &incs, w, None)
            })
            .collect::<Result<_>>()?;
        Ok(finals.windows(2).map(|w| sq_distance(&w[0], &w[1])).collect())
    })
}

/// `E_2(M)` for each `M` in `cfg.modes` on the fixed mesh with nominal
/// step `cfg.ref_tau`. Every level is driven by mode prefixes of one
/// `2 M_max`-mode noise pack per sample.
pub fn run_spatial_convergence(cfg: &ExperimentConfig) -> Result<ErrorTable> {
    cfg.validate()?;
    let steps = GradedMesh::steps_for_tau(cfg.final_time, cfg.gamma, cfg.ref_tau)?;
    let mesh = Arc::new(GradedMesh::new(cfg.final_time, steps, cfg.gamma)?);
    let mut resolutions = cfg.modes.clone();
    resolutions.push(2 * cfg.modes[cfg.modes.len() - 1]);
    let levels = resolutions
        .iter()
        .map(|&m| {
            Ok(Level {
                scheme: PreparedScheme::new(Arc::clone(&mesh), scheme_for(cfg, m))?,
                u0: initial_state(&cfg.datum, m)?.into_coeffs(),
                factor: 1,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sq = run_levels(cfg, &mesh, &levels)?;
    let res: Vec<f64> = cfg.modes.iter().map(|&m| m as f64).collect();
    Ok(ErrorTable::from_squared(StudyKind::Spatial, &res, &sq))
}

/// `E_2(tau)` for each `tau` in `cfg.taus`, comparing against `tau/2`.
/// The coarsest mesh has `ceil(T^{1-gamma} / ((1-gamma) tau_0))` steps and
/// each further level doubles it; all levels aggregate the increments of the
/// finest. The mode count equals the step count unless `temporal_modes` is
/// set.
pub fn run_temporal_convergence(cfg: &ExperimentConfig) -> Result<ErrorTable> {
    cfg.validate()?;
    let base = GradedMesh::steps_for_tau(cfg.final_time, cfg.gamma, cfg.taus[0])?;
    let level_count = cfg.taus.len() + 1;
    let fine_steps = base << (level_count - 1);
    let fine_mesh = Arc::new(GradedMesh::new(cfg.final_time, fine_steps, cfg.gamma)?);
    let levels = (0..level_count)
        .map(|j| {
            let steps = base << j;
            let mesh = Arc::new(GradedMesh::new(cfg.final_time, steps, cfg.gamma)?);
            let modes = cfg.temporal_modes.unwrap_or(steps);
            Ok(Level {
                scheme: PreparedScheme::new(mesh, scheme_for(cfg, modes))?,
                u0: initial_state(&cfg.datum, modes)?.into_coeffs(),
                factor: fine_steps / steps,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let sq = run_levels(cfg, &fine_mesh, &levels)?;
    Ok(ErrorTable::from_squared(StudyKind::Temporal, &cfg.taus, &sq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseSpectrum;
    use crate::solver::{Drift, InitialDatum};

    #[test]
    fn order_estimation() {
        let (orders, mean) = estimate_order(&[1.0, 0.5, 0.25]).unwrap();
        assert_eq!(orders, vec![1.0, 1.0]);
        assert_eq!(mean, 1.0);
        assert!(estimate_order(&[1.0]).is_err());
        assert!(estimate_order(&[1.0, 0.0]).is_err());
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let v = [1.0, 1e-16, 1e-16, -1.0];
        assert_eq!(compensated_sum(v.into_iter()), 2e-16);
    }

    #[test]
    fn table_statistics() {
        let sq = vec![vec![4.0, 1.0], vec![4.0, 1.0]];
        let t = ErrorTable::from_squared(StudyKind::Spatial, &[8.0, 16.0], &sq);
        assert_eq!(t.errors(), vec![2.0, 1.0]);
        assert_eq!(t.rows[0].stderr, 0.0);
        assert_eq!(t.orders, vec![1.0]);
        let zero = ErrorTable::from_squared(StudyKind::Spatial, &[8.0, 16.0], &[vec![0.0, 0.0]]);
        assert!(zero.orders.is_empty() && zero.mean_order.is_none());
    }

    #[test]
    fn noiseless_linear_spatial_error_vanishes() {
        // Smooth datum, no drift, no noise: every resolution holds the exact answer.
        let cfg = ExperimentConfig {
            spectrum: NoiseSpectrum::custom(|_| 0.0, 1.0).unwrap(),
            drift: Drift::zero(),
            datum: InitialDatum::Sine,
            modes: vec![4, 8],
            ref_tau: 1.0 / 16.0,
            samples: 3,
            workers: 1,
            ..Default::default()
        };
        let t = run_spatial_convergence(&cfg).unwrap();
        assert!(t.errors().iter().all(|e| *e == 0.0));
        assert!(t.mean_order.is_none());
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let base = ExperimentConfig {
            modes: vec![4, 8],
            taus: vec![0.25, 0.125],
            ref_tau: 1.0 / 16.0,
            samples: 6,
            ..Default::default()
        };
        let one = ExperimentConfig { workers: 1, ..base.clone() };
        let three = ExperimentConfig { workers: 3, ..base };
        assert_eq!(run_spatial_convergence(&one).unwrap(), run_spatial_convergence(&three).unwrap());
        assert_eq!(run_temporal_convergence(&one).unwrap(), run_temporal_convergence(&three).unwrap());
    }
}
