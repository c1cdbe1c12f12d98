use std::ops::{Add, Sub};

use crate::error::{Error, Result};

/// A function on (0,1) represented by its first `M` coefficients in the
/// orthonormal Dirichlet eigenbasis `phi_k(x) = sqrt(2) sin(k pi x)`.
///
/// Index 0 of `coeffs` holds mode `k = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    coeffs: Vec<f64>,
}

impl SpectralField {
    /// Wraps a coefficient vector, rejecting empty or non-finite input.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("a spectral field needs at least one mode"));
        }
        if let Some((i, v)) = coeffs.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::domain(format!("coefficient of mode {} is {v}", i + 1)));
        }
        Ok(Self { coeffs })
    }

    /// Unchecked constructor for internal results known to be finite.
    pub(crate) fn from_vec(coeffs: Vec<f64>) -> Self {
        debug_assert!(!coeffs.is_empty());
        Self { coeffs }
    }

    pub fn zeros(modes: usize) -> Self {
        assert!(modes >= 1, "a spectral field needs at least one mode");
        Self {
            coeffs: vec![0.0; modes],
        }
    }

    /// The field `phi_k`.
    pub fn unit_mode(modes: usize, k: usize) -> Self {
        assert!((1..=modes).contains(&k));
        let mut v = Self::zeros(modes);
        v.coeffs[k - 1] = 1.0;
        v
    }

    pub fn modes(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Coefficient of mode `k` (1-based); zero beyond the stored modes.
    pub fn coeff(&self, k: usize) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.coeffs.get(k - 1).copied().unwrap_or(0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|v| v.is_finite())
    }

    /// L2(0,1) norm, which by Parseval is the Euclidean norm of the coefficients.
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn scale(&self, a: f64) -> Self {
        Self::from_vec(self.coeffs.iter().map(|v| a * v).collect())
    }

    fn zip_padded(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Self {
        let n = self.modes().max(other.modes());
        Self::from_vec(
            (1..=n)
                .map(|k| op(self.coeff(k), other.coeff(k)))
                .collect(),
        )
    }
}

// Fields of different lengths are combined after zero-padding the shorter one.
impl Add for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        self.zip_padded(rhs, |a, b| a + b)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        self.zip_padded(rhs, |a, b| a - b)
    }
}

/// Independent Monte Carlo realizations sharing one mode count.
#[derive(Debug, Clone)]
pub struct EnsembleField {
    samples: Vec<SpectralField>,
}

impl EnsembleField {
    pub fn new(samples: Vec<SpectralField>) -> Result<Self> {
        let Some(first) = samples.first() else {
            return Err(Error::domain("ensemble must contain at least one sample"));
        };
        let m = first.modes();
        if let Some(i) = samples.iter().position(|s| s.modes() != m) {
            return Err(Error::domain(format!(
                "sample {i} has {} modes, expected {m}",
                samples[i].modes()
            )));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[SpectralField] {
        &self.samples
    }

    pub fn sample_count(&self) -> usize {
        self.samples.len()
    }

    pub fn modes(&self) -> usize {
        self.samples[0].modes()
    }

    /// Empirical `L^p(Omega; L2)` norm.
    pub fn lp_l2_norm(&self, p: f64) -> f64 {
        let mean = self
            .samples
            .iter()
            .map(|s| s.l2_norm().powf(p))
            .sum::<f64>()
            / self.samples.len() as f64;
        mean.powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite() {
        assert!(SpectralField::new(vec![1.0, f64::NAN]).is_err());
        assert!(SpectralField::new(vec![]).is_err());
    }

    #[test]
    fn padded_arithmetic() {
        let a = SpectralField::new(vec![1.0, 2.0]).unwrap();
        let b = SpectralField::new(vec![1.0, 1.0, 3.0]).unwrap();
        assert_eq!((&a - &b).coeffs(), &[0.0, 1.0, -3.0]);
        assert_eq!((&a + &b).coeffs(), &[2.0, 3.0, 3.0]);
    }

    #[test]
    fn ensemble_mode_mismatch() {
        let a = SpectralField::zeros(2);
        let b = SpectralField::zeros(3);
        assert!(EnsembleField::new(vec![a, b]).is_err());
        assert!(EnsembleField::new(vec![]).is_err());
    }
}
