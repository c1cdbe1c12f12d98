//! Graded time meshes `t_n = T (n/N)^{1/(1-gamma)}`.
//!
//! Step sizes satisfy `tau_n ~ t_n^gamma tau` with the nominal step
//! `tau = T^{1-gamma} / ((1-gamma) N)`, the first step is `T N^{-1/(1-gamma)}`,
//! and doubling `N` nests the coarse levels at even fine indices.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GradedMesh {
    levels: Vec<f64>,
    gamma: f64,
    tau: f64,
}

impl GradedMesh {
    /// Builds the graded mesh with `steps` intervals on `[0, final_time]`.
    pub fn new(final_time: f64, steps: usize, gamma: f64) -> Result<Self> {
        if !(final_time > 0.0) || !final_time.is_finite() {
            return Err(Error::domain(format!("final time must be positive, got {final_time}")));
        }
        if steps == 0 {
            return Err(Error::domain("mesh needs at least one step"));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::domain(format!("grading exponent must lie in [0, 1), got {gamma}")));
        }
        let r = 1.0 / (1.0 - gamma);
        let n = steps as f64;
        let levels = (0..=steps)
            .map(|i| {
                if i == steps {
                    final_time
                } else if gamma == 0.0 {
                    final_time * (i as f64 / n)
                } else {
                    final_time * (i as f64 / n).powf(r)
                }
            })
            .collect();
        Ok(Self {
            levels,
            gamma,
            tau: final_time.powf(1.0 - gamma) / ((1.0 - gamma) * n),
        })
    }

    /// Number of steps needed to reach nominal step `tau`, rounded up.
    pub fn steps_for_tau(final_time: f64, gamma: f64, tau: f64) -> Result<usize> {
        if !(tau > 0.0) {
            return Err(Error::domain(format!("nominal step must be positive, got {tau}")));
        }
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::domain(format!("grading exponent must lie in [0, 1), got {gamma}")));
        }
        let n = final_time.powf(1.0 - gamma) / ((1.0 - gamma) * tau);
        // Guard against n being an integer polluted by rounding.
        Ok(((n * (1.0 - 1e-12)).ceil() as usize).max(1))
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn steps(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn final_time(&self) -> f64 {
        *self.levels.last().unwrap()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Nominal maximal step size.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `t_n`.
    pub fn time(&self, n: usize) -> f64 {
        self.levels[n]
    }

    /// `tau_n = t_n - t_{n-1}` for `1 <= n <= N`.
    pub fn step(&self, n: usize) -> f64 {
        self.levels[n] - self.levels[n - 1]
    }

    /// Checks the grading sandwich and consecutive-ratio bound, returning
    /// `(c_min, c_max)` over `tau_n / (t_n^gamma tau)`.
    pub fn verify_grading(&self) -> Result<(f64, f64)> {
        let r = 1.0 / (1.0 - self.gamma);
        let ratio_cap = 2f64.powf(r) * (1.0 + 1e-12);
        let mut c_min = f64::INFINITY;
        let mut c_max = 0.0f64;
        if self.levels[0] != 0.0 {
            return Err(Error::validation("mesh does not start at t = 0"));
        }
        for n in 1..=self.steps() {
            let step = self.step(n);
            if !(step > 0.0) {
                return Err(Error::validation(format!("level {n} is not strictly increasing")));
            }
            let c = step / (self.levels[n].powf(self.gamma) * self.tau);
            c_min = c_min.min(c);
            c_max = c_max.max(c);
            if n >= 2 {
                let ratio = step / self.step(n - 1);
                if !(ratio >= 1.0 - 1e-9 && ratio <= ratio_cap) {
                    return Err(Error::validation(format!(
                        "consecutive step ratio {ratio} at n = {n} outside [1, 2^(1/(1-gamma))]"
                    )));
                }
            }
        }
        Ok((c_min, c_max))
    }
}

/// `max(1/2, 1 - (1 + beta) / alpha)`: the grading exponent must exceed this.
pub fn gamma_lower_bound(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::domain(format!("noise regularity alpha must lie in (0, 1], got {alpha}")));
    }
    if !(beta > -1.0) {
        return Err(Error::domain(format!("datum regularity beta must exceed -1, got {beta}")));
    }
    Ok(0.5f64.max(1.0 - (1.0 + beta) / alpha))
}
