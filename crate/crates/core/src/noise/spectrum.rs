use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Admissible decay exponents for power-law spectra.
pub const POWER_DELTA_RANGE: (f64, f64) = (0.0, 1.5);

#[derive(Clone)]
pub enum SpectrumKind {
    /// `mu_k = 1`: space-time white noise.
    White,
    /// `mu_k = k^{-delta}`.
    Power(f64),
    /// User-supplied weights.
    Custom(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl fmt::Debug for SpectrumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectrumKind::White => write!(f, "White"),
            SpectrumKind::Power(d) => write!(f, "Power({d})"),
            SpectrumKind::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Eigenvalues `mu_k` of the noise covariance `Q` together with the
/// regularity exponent `alpha` the noise is classified with.
#[derive(Debug, Clone)]
pub struct NoiseSpectrum {
    kind: SpectrumKind,
    alpha: f64,
}

impl NoiseSpectrum {
    pub fn white() -> Self {
        Self {
            kind: SpectrumKind::White,
            alpha: 0.5,
        }
    }

    /// `mu_k = k^{-delta}` with `alpha = (1 + delta) / 2`, capped at 1.
    pub fn power(delta: f64) -> Result<Self> {
        let (lo, hi) = POWER_DELTA_RANGE;
        if !(lo..=hi).contains(&delta) {
            return Err(Error::domain(format!("power spectrum exponent {delta} outside [{lo}, {hi}]")));
        }
        Ok(Self {
            kind: SpectrumKind::Power(delta),
            alpha: ((1.0 + delta) / 2.0).min(1.0),
        })
    }

    /// Arbitrary nonnegative weights with a caller-provided classification.
    pub fn custom(mu: impl Fn(usize) -> f64 + Send + Sync + 'static, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::domain(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        Ok(Self {
            kind: SpectrumKind::Custom(Arc::new(mu)),
            alpha,
        })
    }

    /// Same weights, different claimed regularity. Used by sharpness probes.
    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self {
            kind: self.kind.clone(),
            alpha,
        }
    }

    /// Parses `white` or `power:DELTA`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if text.eq_ignore_ascii_case("white") {
            return Ok(Self::white());
        }
        if let Some(rest) = text.strip_prefix("power:") {
            let delta: f64 = rest
                .trim()
                .parse()
                .map_err(|_| Error::config(format!("bad power exponent in spectrum '{text}'")))?;
            return Self::power(delta);
        }
        Err(Error::config(format!("unknown spectrum '{text}' (expected white or power:DELTA)")))
    }

    pub fn kind(&self) -> &SpectrumKind {
        &self.kind
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `mu_k` for `k >= 1`.
    #[inline]
    pub fn mu(&self, k: usize) -> f64 {
        match &self.kind {
            SpectrumKind::White => 1.0,
            SpectrumKind::Power(d) => {
                if *d == 0.0 {
                    1.0
                } else {
                    (k as f64).powf(-d)
                }
            }
            SpectrumKind::Custom(f) => f(k),
        }
    }

    /// `Some(p)` when `mu_k = k^p` exactly.
    pub(crate) fn power_exponent(&self) -> Option<f64> {
        match self.kind {
            SpectrumKind::White => Some(0.0),
            SpectrumKind::Power(d) => Some(-d),
            SpectrumKind::Custom(_) => None,
        }
    }

    /// Canonical text form, inverse of [`NoiseSpectrum::parse`].
    pub fn label(&self) -> String {
        match &self.kind {
            SpectrumKind::White => "white".to_string(),
            SpectrumKind::Power(d) => format!("power:{d}"),
            SpectrumKind::Custom(_) => "custom".to_string(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        assert_eq!(NoiseSpectrum::white().alpha(), 0.5);
        assert_eq!(NoiseSpectrum::power(0.5).unwrap().alpha(), 0.75);
        assert_eq!(NoiseSpectrum::power(0.8).unwrap().alpha(), 0.9);
        assert_eq!(NoiseSpectrum::power(1.0).unwrap().alpha(), 1.0);
        assert_eq!(NoiseSpectrum::power(1.1).unwrap().alpha(), 1.0);
        assert!(NoiseSpectrum::power(1.6).is_err());
        assert!(NoiseSpectrum::power(-0.1).is_err());
    }

    #[test]
    fn weights() {
        let w = NoiseSpectrum::white();
        assert_eq!(w.mu(17), 1.0);
        let p = NoiseSpectrum::power(0.5).unwrap();
        assert!((p.mu(4) - 0.5).abs() < 1e-15);
        let c = NoiseSpectrum::custom(|k| if k == 1 { 1.0 } else { 0.0 }, 1.0).unwrap();
        assert_eq!(c.mu(1), 1.0);
        assert_eq!(c.mu(2), 0.0);
    }

    #[test]
    fn parse_roundtrip() {
        for s in ["white", "power:0.5", "power:1.1"] {
            assert_eq!(NoiseSpectrum::parse(s).unwrap().label(), s);
        }
        assert!(NoiseSpectrum::parse("pink").is_err());
        assert!(NoiseSpectrum::parse("power:x").is_err());
    }
}
