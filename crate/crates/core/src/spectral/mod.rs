//! The sine eigenbasis of the Dirichlet Laplacian on (0,1).
//!
//! Eigenpairs are `lambda_k = (k pi)^2` and `phi_k(x) = sqrt(2) sin(k pi x)`.
//! Fields are stored as coefficient vectors in this basis; nodal values live
//! on the DST-I grid `x_m = m / (M + 1)`, `m = 1..M`.

mod besov;
mod dst;
mod field;
mod nonlinear;

use std::f64::consts::{PI, SQRT_2};

pub use besov::{besov_norm_ensemble, dyadic_block, dyadic_range, BesovQ};
pub use dst::{dst1_direct, SineTransform};
pub use field::{EnsembleField, SpectralField};
pub use nonlinear::{collocation_nonlinearity, galerkin_nonlinearity, NonlinearityWorkspace};

use crate::error::{Error, Result};

/// Admissible range of Sobolev exponents.
pub const SOBOLEV_RANGE: (f64, f64) = (-2.0, 2.0);

/// Dirichlet eigenvalue `(k pi)^2`.
pub fn eigenvalue(k: i64) -> Result<f64> {
    if k < 1 {
        return Err(Error::domain(format!("eigenvalue index must be >= 1, got {k}")));
    }
    Ok(lambda(k as usize))
}

/// Infallible eigenvalue for internal loops; `k >= 1`.
#[inline]
pub(crate) fn lambda(k: usize) -> f64 {
    let kp = k as f64 * PI;
    kp * kp
}

pub(crate) fn check_sobolev_exponent(s: f64) -> Result<()> {
    if !(SOBOLEV_RANGE.0..=SOBOLEV_RANGE.1).contains(&s) {
        return Err(Error::domain(format!("Sobolev exponent {s} outside [-2, 2]")));
    }
    Ok(())
}

/// `(sum_k lambda_k^s v_k^2)^{1/2}`.
pub fn sobolev_norm(v: &SpectralField, s: f64) -> Result<f64> {
    check_sobolev_exponent(s)?;
    Ok(sobolev_norm_unchecked(v.coeffs(), 1, s))
}

/// Ḣ^s norm of a coefficient slice whose first entry is mode `first_mode`.
pub(crate) fn sobolev_norm_unchecked(coeffs: &[f64], first_mode: usize, s: f64) -> f64 {
    let sum: f64 = if s == 0.0 {
        coeffs.iter().map(|v| v * v).sum()
    } else {
        coeffs
            .iter()
            .enumerate()
            .map(|(i, v)| lambda(first_mode + i).powf(s) * v * v)
            .sum()
    };
    sum.sqrt()
}

/// `P_M v`: keep the first `target` modes, zero-pad if `target` exceeds the
/// stored mode count.
pub fn project_truncate(v: &SpectralField, target: usize) -> Result<SpectralField> {
    if target == 0 {
        return Err(Error::domain("projection target must be at least one mode"));
    }
    Ok(SpectralField::from_vec(
        (1..=target).map(|k| v.coeff(k)).collect(),
    ))
}

/// Orthonormal coefficients of the constant function 1:
/// `2 sqrt(2) / (k pi)` for odd `k`, zero for even `k`.
pub fn constant_one_projection(modes: usize) -> Result<SpectralField> {
    if modes == 0 {
        return Err(Error::domain("mode count must be positive"));
    }
    Ok(SpectralField::from_vec(constant_one_coeffs(modes)))
}

pub(crate) fn constant_one_coeffs(modes: usize) -> Vec<f64> {
    (1..=modes)
        .map(|k| {
            if k % 2 == 1 {
                2.0 * SQRT_2 / (k as f64 * PI)
            } else {
                0.0
            }
        })
        .collect()
}

/// Nodal values at `x_m = m/(M+1)` of the field.
pub fn evaluate_on_grid(v: &SpectralField) -> Vec<f64> {
    let mut t = SineTransform::new(v.modes());
    let mut out = vec![0.0; v.modes()];
    evaluate_into(&mut t, v.coeffs(), &mut out);
    out
}

/// Trigonometric interpolation: the unique element of `S_M` matching the
/// nodal values at `x_m = m/(M+1)`.
pub fn sine_interpolate(nodal: &[f64]) -> Result<SpectralField> {
    if nodal.is_empty() {
        return Err(Error::domain("interpolation needs at least one node"));
    }
    if let Some((m, &value)) = nodal.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        return Err(Error::NonFiniteNode { node: m + 1, value });
    }
    let mut t = SineTransform::new(nodal.len());
    let mut out = vec![0.0; nodal.len()];
    interpolate_into(&mut t, nodal, &mut out);
    Ok(SpectralField::from_vec(out))
}

/// Nodal values on the transform's grid from (possibly fewer) coefficients.
pub(crate) fn evaluate_into(t: &mut SineTransform, coeffs: &[f64], nodal: &mut [f64]) {
    t.forward(coeffs, nodal);
    for x in nodal.iter_mut() {
        *x *= SQRT_2;
    }
}

/// Orthonormal interpolation coefficients from nodal values.
pub(crate) fn interpolate_into(t: &mut SineTransform, nodal: &[f64], coeffs: &mut [f64]) {
    t.forward(nodal, coeffs);
    let scale = SQRT_2 / (t.len() + 1) as f64;
    for c in coeffs.iter_mut() {
        *c *= scale;
    }
}

/// `e^{-tA} v`, coefficientwise `e^{-t lambda_k} v_k`.
pub fn semigroup_apply(v: &SpectralField, t: f64) -> Result<SpectralField> {
    if !(t >= 0.0) {
        return Err(Error::domain(format!("semigroup time must be >= 0, got {t}")));
    }
    Ok(SpectralField::from_vec(
        v.coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| (-t * lambda(i + 1)).exp() * c)
            .collect(),
    ))
}

/// `(1 - e^{-tau lambda}) / lambda`, evaluated through `expm1` so that it is
/// accurate when `tau lambda` is tiny.
#[inline]
pub fn phi_factor(tau: f64, lambda: f64) -> f64 {
    -(-tau * lambda).exp_m1() / lambda
}

/// `((1 - e^{-tau A}) / A) v`.
pub fn phi_filter_apply(v: &SpectralField, tau: f64) -> Result<SpectralField> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::domain(format!("phi filter needs tau > 0, got {tau}")));
    }
    Ok(SpectralField::from_vec(
        v.coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| phi_factor(tau, lambda(i + 1)) * c)
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn eigenvalues() {
        assert_relative_eq!(eigenvalue(1).unwrap(), 9.869_604_401_089_358, max_relative = 1e-15);
        assert_relative_eq!(eigenvalue(2).unwrap(), 4.0 * PI * PI, max_relative = 1e-15);
        for k in [1, 5, 100, 10_000] {
            assert_relative_eq!(eigenvalue(k).unwrap().sqrt() / k as f64, PI, max_relative = 1e-14);
        }
        assert!(eigenvalue(0).is_err());
        assert!(eigenvalue(-3).is_err());
    }

    #[test]
    fn sobolev_examples() {
        let e1 = SpectralField::new(vec![1.0, 0.0, 0.0]).unwrap();
        let e2 = SpectralField::new(vec![0.0, 1.0, 0.0]).unwrap();
        assert_relative_eq!(sobolev_norm(&e1, 0.0).unwrap(), 1.0);
        assert_relative_eq!(sobolev_norm(&e1, 1.0).unwrap(), PI, max_relative = 1e-15);
        assert_relative_eq!(sobolev_norm(&e2, -1.0).unwrap(), 1.0 / (2.0 * PI), max_relative = 1e-15);
        assert!(sobolev_norm(&e1, 2.5).is_err());
        assert!(sobolev_norm(&e1, -2.01).is_err());
    }

    #[test]
    fn truncation() {
        let v = SpectralField::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(project_truncate(&v, 1).unwrap().coeffs(), &[1.0]);
        assert_eq!(project_truncate(&v, 3).unwrap(), v);
        assert_eq!(project_truncate(&v, 5).unwrap().coeffs(), &[1.0, 2.0, 3.0, 0.0, 0.0]);
        assert!(project_truncate(&v, 0).is_err());
    }

    #[test]
    fn constant_one() {
        let p = constant_one_projection(3).unwrap();
        assert_relative_eq!(p.coeff(1), 0.900_316_316_157_106, max_relative = 1e-14);
        assert_eq!(p.coeff(2), 0.0);
        assert_relative_eq!(p.coeff(3), 2.0 * SQRT_2 / (3.0 * PI), max_relative = 1e-15);
    }

    #[test]
    fn interpolate_sine() {
        let m = 9;
        let nodal: Vec<f64> = (1..=m).map(|i| (PI * i as f64 / (m + 1) as f64).sin()).collect();
        let v = sine_interpolate(&nodal).unwrap();
        assert!((v.coeff(1) - 1.0 / SQRT_2).abs() < 1e-14);
        for k in 2..=m {
            assert!(v.coeff(k).abs() < 1e-14);
        }
        let back = evaluate_on_grid(&v);
        for (a, b) in back.iter().zip(&nodal) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn interpolate_matches_direct_summation() {
        let nodal = [0.3, -1.2, 2.5, 0.0, 4.1, -0.7, 1.9];
        let m = nodal.len();
        let v = sine_interpolate(&nodal).unwrap();
        for k in 1..=m {
            let unnormalized: f64 = (2.0 / (m + 1) as f64)
                * nodal
                    .iter()
                    .enumerate()
                    .map(|(i, g)| g * (PI * (k * (i + 1)) as f64 / (m + 1) as f64).sin())
                    .sum::<f64>();
            assert!((v.coeff(k) - unnormalized / SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn interpolate_rejects_nan() {
        match sine_interpolate(&[1.0, f64::INFINITY]) {
            Err(Error::NonFiniteNode { node, .. }) => assert_eq!(node, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn evaluate_first_mode() {
        let m = 6;
        let mut c = vec![0.0; m];
        c[0] = 1.0 / SQRT_2;
        let vals = evaluate_on_grid(&SpectralField::new(c).unwrap());
        for (i, v) in vals.iter().enumerate() {
            assert!((v - (PI * (i + 1) as f64 / (m + 1) as f64).sin()).abs() < 1e-14);
        }
    }

    #[test]
    fn semigroup_examples() {
        let v = SpectralField::new(vec![1.0, -2.0, 0.5]).unwrap();
        assert_eq!(semigroup_apply(&v, 0.0).unwrap(), v);
        let e = semigroup_apply(&SpectralField::unit_mode(1, 1), 1.0).unwrap();
        assert_relative_eq!(e.coeff(1), (-PI * PI).exp(), max_relative = 1e-14);
        assert!(semigroup_apply(&v, -1e-3).is_err());
    }

    #[test]
    fn phi_filter_values() {
        let l1 = PI * PI;
        // Independent evaluation via the plain formula, well-conditioned here.
        assert_relative_eq!(phi_factor(0.1, l1), (1.0 - (-0.1 * l1).exp()) / l1, max_relative = 1e-14);
        assert_relative_eq!(phi_factor(0.1, l1), 0.063_557_984_256_929_76, max_relative = 1e-12);
        // Large tau lambda limit.
        assert_relative_eq!(phi_factor(100.0, 1e4), 1e-4, max_relative = 1e-15);
        // Taylor regime: tau (1 - tau lambda / 2 + ...).
        let tau = 1e-8 / l1;
        assert_relative_eq!(phi_factor(tau, l1), tau, max_relative = 1e-7);
        assert_relative_eq!(phi_factor(tau, l1), tau * (1.0 - 0.5e-8), max_relative = 1e-15);
        assert!(phi_filter_apply(&SpectralField::zeros(2), 0.0).is_err());
    }
}
