//! Closed-form second moments of the stochastic convolution
//! `W_A(t) = int_0^t e^{-(t-s)A} dW(s)`, mode by mode.

use std::f64::consts::PI;

use super::NoiseSpectrum;
use crate::error::{Error, Result};
use crate::spectral::{dyadic_range, lambda, phi_factor};

/// A truncated series together with an analytic bound on the omitted tail,
/// when one is available for the spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedSeries {
    pub value: f64,
    pub tail_bound: Option<f64>,
}

/// `sum_{k <= K} mu_k (1 - e^{-2 t lambda_k}) / (2 lambda_k)`, i.e.
/// `E ||P_K W_A(t)||^2`, with the tail bound `sum_{k > K} mu_k / (2 lambda_k)`.
pub fn convolution_l2_sq_exact(t: f64, spectrum: &NoiseSpectrum, truncation: usize) -> Result<TruncatedSeries> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("time must be positive, got {t}")));
    }
    if truncation == 0 {
        return Err(Error::domain("truncation must be at least one mode"));
    }
    let value = (1..=truncation)
        .map(|k| spectrum.mu(k) * 0.5 * phi_factor(2.0 * t, lambda(k)))
        .sum();
    Ok(TruncatedSeries {
        value,
        tail_bound: l2_tail_bound(spectrum, truncation),
    })
}

/// `sum_{k > K} k^{-delta} / (2 pi^2 k^2) <= K^{-1-delta} / (2 pi^2 (1 + delta))`.
fn l2_tail_bound(spectrum: &NoiseSpectrum, truncation: usize) -> Option<f64> {
    let p = spectrum.power_exponent()?;
    let decay = 1.0 - p;
    Some((truncation as f64).powf(-decay) / (2.0 * PI * PI * decay))
}

/// Closed-form `B^inf L^2 Ḣ^alpha` block norm of `W_A(t)`:
/// `(sum_{k in block j} mu_k lambda_k^{alpha-1} (1 - e^{-2 t lambda_k}) / 2)^{1/2}`.
pub fn besov_block_bound_exact(t: f64, alpha: f64, spectrum: &NoiseSpectrum, j: u32) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("time must be positive, got {t}")));
    }
    if j == 0 || j >= usize::BITS {
        return Err(Error::domain(format!("block index {j} out of range")));
    }
    let (lo, hi) = dyadic_range(j);
    let sum: f64 = (lo..=hi)
        .map(|k| {
            let lam = lambda(k);
            spectrum.mu(k) * lam.powf(alpha - 1.0) * -(-2.0 * t * lam).exp_m1() * 0.5
        })
        .sum();
    Ok(sum.sqrt())
}

/// `E ||int_{t2}^{t1} e^{-(t1-s)A} dW(s)||^2` truncated at `K` modes.
pub fn increment_scaling_exact(
    t1: f64,
    t2: f64,
    spectrum: &NoiseSpectrum,
    truncation: usize,
) -> Result<TruncatedSeries> {
    if !(t2 >= 0.0 && t2 < t1) {
        return Err(Error::domain(format!("need 0 <= t2 < t1, got t1 = {t1}, t2 = {t2}")));
    }
    convolution_l2_sq_exact(t1 - t2, spectrum, truncation)
}

/// Undamped Sobolev-type series `sum_{k <= K} mu_k lambda_k^{alpha-1}`, the
/// `Ḣ^alpha` counterpart of the block bounds.
pub fn sobolev_series(alpha: f64, spectrum: &NoiseSpectrum, truncation: usize) -> f64 {
    (1..=truncation)
        .map(|k| spectrum.mu(k) * lambda(k).powf(alpha - 1.0))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mode_long_time_limit() {
        let s = NoiseSpectrum::custom(|k| if k == 1 { 1.0 } else { 0.0 }, 1.0).unwrap();
        let v = convolution_l2_sq_exact(1e3, &s, 50).unwrap();
        assert!((v.value - 1.0 / (2.0 * PI * PI)).abs() < 1e-16);
        assert!(v.tail_bound.is_none());
    }

    #[test]
    fn white_noise_half_power_growth() {
        let s = NoiseSpectrum::white();
        let ratios: Vec<f64> = (1..=20)
            .map(|j| {
                let t = 2f64.powi(-j);
                convolution_l2_sq_exact(t, &s, 1 << 16).unwrap().value / t.sqrt()
            })
            .collect();
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        // The limit is int_0^inf (1 - e^{-2 x^2}) / (2 x^2) dx / pi = 1 / sqrt(2 pi).
        assert!(hi <= 1.0 / (2.0 * PI).sqrt() * 1.001, "{hi}");
        // Saturation at t = 1/2 sets the lower end: (pi^2/6) / (2 pi^2) / sqrt(1/2).
        assert!(lo > 0.1, "{lo}");
    }

    #[test]
    fn trace_class_linear_in_time() {
        let s = NoiseSpectrum::power(1.1).unwrap();
        let trace: f64 = (1..=1 << 18).map(|k| s.mu(k)).sum();
        for t in [1e-2, 1e-4, 1e-6] {
            let v = convolution_l2_sq_exact(t, &s, 1 << 18).unwrap().value;
            assert!(v <= t * trace, "t={t}: {v} > {}", t * trace);
        }
    }

    #[test]
    fn tail_bound_holds_under_doubling() {
        for s in [NoiseSpectrum::white(), NoiseSpectrum::power(0.5).unwrap()] {
            let k = 1 << 10;
            let small = convolution_l2_sq_exact(0.3, &s, k).unwrap();
            let big = convolution_l2_sq_exact(0.3, &s, 1 << 16).unwrap();
            assert!(big.value >= small.value);
            assert!(big.value - small.value <= small.tail_bound.unwrap());
        }
        let white = convolution_l2_sq_exact(0.3, &NoiseSpectrum::white(), 100).unwrap();
        assert!((white.tail_bound.unwrap() - 1.0 / (2.0 * PI * PI * 100.0)).abs() < 1e-18);
    }

    #[test]
    fn block_bounds() {
        let white = NoiseSpectrum::white();
        for j in 1..=12 {
            let b = besov_block_bound_exact(0.5, 0.5, &white, j).unwrap();
            // Undamped block sum: sum 1/(2 pi k), which tends to ln 2 / (2 pi) from above.
            let (lo, hi) = dyadic_range(j);
            let undamped: f64 = (lo..=hi).map(|k| 1.0 / (2.0 * PI * k as f64)).sum();
            assert!(b * b <= undamped * (1.0 + 1e-12));
            assert!(undamped >= 2f64.ln() / (2.0 * PI));
        }
        let b12 = besov_block_bound_exact(0.5, 0.5, &white, 12).unwrap();
        assert!((b12 * b12 - 2f64.ln() / (2.0 * PI)).abs() < 1e-4);

        let tc = NoiseSpectrum::power(1.1).unwrap();
        let total: f64 = (1..=1 << 16).map(|k| tc.mu(k)).sum();
        for j in 1..=10 {
            let b = besov_block_bound_exact(0.5, 1.0, &tc, j).unwrap();
            assert!(b <= (total / 2.0).sqrt());
        }
        assert!(besov_block_bound_exact(1e-300, 0.5, &white, 3).unwrap() < 1e-140);
    }

    #[test]
    fn increment_scaling_is_shift_invariant() {
        let s = NoiseSpectrum::white();
        let a = increment_scaling_exact(0.75, 0.25, &s, 4096).unwrap();
        let b = convolution_l2_sq_exact(0.5, &s, 4096).unwrap();
        assert_eq!(a, b);
        assert!(increment_scaling_exact(0.1, 0.1, &s, 10).is_err());
        let tiny = increment_scaling_exact(1e-12 + 0.2, 0.2, &s, 4096).unwrap();
        assert!(tiny.value > 0.0 && tiny.value < 1e-6);
    }

    #[test]
    fn white_increment_scaling_band() {
        let s = NoiseSpectrum::white();
        let ratios: Vec<f64> = (1..=20)
            .map(|j| {
                let gap = 2f64.powi(-j);
                increment_scaling_exact(1.0, 1.0 - gap, &s, 1 << 16).unwrap().value / gap.sqrt()
            })
            .collect();
        let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ratios.iter().cloned().fold(0.0, f64::max);
        assert!(hi / lo < 4.0, "{lo} {hi}");
    }
}
