//! Spectral evaluation of a pointwise nonlinearity `u -> f(u)`.
//!
//! Both variants treat `f(u) - f(0)` through sine transforms and add
//! `f(0) P_M 1` exactly, so the transformed function vanishes at the
//! boundary.

use super::{constant_one_coeffs, evaluate_into, interpolate_into, SineTransform, SpectralField};
use crate::error::{Error, Result};

/// Transforms and buffers for repeated nonlinearity evaluation at a fixed
/// mode count.
#[derive(Debug, Clone)]
pub struct NonlinearityWorkspace {
    modes: usize,
    oversample: usize,
    coarse: SineTransform,
    fine: Option<SineTransform>,
    nodal: Vec<f64>,
    fine_coeffs: Vec<f64>,
    one: Vec<f64>,
}

impl NonlinearityWorkspace {
    /// Workspace for collocation only.
    pub fn collocation(modes: usize) -> Self {
        Self::build(modes, 1)
    }

    /// Workspace for Galerkin quadrature on `oversample * (M + 1) - 1` nodes.
    pub fn galerkin(modes: usize, oversample: usize) -> Result<Self> {
        if oversample < 2 {
            return Err(Error::domain(format!("oversample must be >= 2, got {oversample}")));
        }
        Ok(Self::build(modes, oversample))
    }

    fn build(modes: usize, oversample: usize) -> Self {
        assert!(modes >= 1);
        let fine_len = oversample * (modes + 1) - 1;
        Self {
            modes,
            oversample,
            coarse: SineTransform::new(modes),
            fine: (oversample > 1).then(|| SineTransform::new(fine_len)),
            nodal: vec![0.0; fine_len],
            fine_coeffs: vec![0.0; fine_len],
            one: constant_one_coeffs(modes),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// `I_M f(v)` written into `out` (length `M`).
    pub fn collocation_into(
        &mut self,
        coeffs: &[f64],
        f: &dyn Fn(f64) -> f64,
        out: &mut [f64],
    ) -> Result<()> {
        let m = self.modes;
        debug_assert_eq!(coeffs.len(), m);
        let nodal = &mut self.nodal[..m];
        evaluate_into(&mut self.coarse, coeffs, nodal);
        let f0 = apply_shifted(nodal, f)?;
        interpolate_into(&mut self.coarse, nodal, out);
        add_constant(out, &self.one, f0);
        Ok(())
    }

    /// Quadrature approximation of `P_M f(v)` written into `out`.
    pub fn galerkin_into(
        &mut self,
        coeffs: &[f64],
        f: &dyn Fn(f64) -> f64,
        out: &mut [f64],
    ) -> Result<()> {
        let fine = self
            .fine
            .as_mut()
            .expect("workspace built without Galerkin support");
        let l = fine.len();
        debug_assert_eq!(coeffs.len(), self.modes);
        evaluate_into(fine, coeffs, &mut self.nodal[..l]);
        let f0 = apply_shifted(&mut self.nodal[..l], f)?;
        interpolate_into(fine, &self.nodal[..l], &mut self.fine_coeffs[..l]);
        out.copy_from_slice(&self.fine_coeffs[..self.modes]);
        add_constant(out, &self.one, f0);
        Ok(())
    }

    pub fn oversample(&self) -> usize {
        self.oversample
    }
}

/// Replaces each nodal value `u` by `f(u) - f(0)`; returns `f(0)`.
fn apply_shifted(nodal: &mut [f64], f: &dyn Fn(f64) -> f64) -> Result<f64> {
    let f0 = f(0.0);
    if !f0.is_finite() {
        return Err(Error::NonFiniteNode { node: 0, value: f0 });
    }
    for (m, u) in nodal.iter_mut().enumerate() {
        let value = f(*u);
        if !value.is_finite() {
            return Err(Error::NonFiniteNode { node: m + 1, value });
        }
        *u = value - f0;
    }
    Ok(f0)
}

fn add_constant(out: &mut [f64], one: &[f64], f0: f64) {
    if f0 != 0.0 {
        for (o, c) in out.iter_mut().zip(one) {
            *o += f0 * c;
        }
    }
}

/// `I_M f(v) = I_M^*[f(v) - f(0)] + f(0) P_M 1` on the DST-I grid of `v`.
pub fn collocation_nonlinearity(v: &SpectralField, f: &dyn Fn(f64) -> f64) -> Result<SpectralField> {
    let mut ws = NonlinearityWorkspace::collocation(v.modes());
    let mut out = vec![0.0; v.modes()];
    ws.collocation_into(v.coeffs(), f, &mut out)?;
    Ok(SpectralField::from_vec(out))
}

/// `P_M f(v)` by oversampled sine quadrature.
pub fn galerkin_nonlinearity(
    v: &SpectralField,
    f: &dyn Fn(f64) -> f64,
    oversample: usize,
) -> Result<SpectralField> {
    let mut ws = NonlinearityWorkspace::galerkin(v.modes(), oversample)?;
    let mut out = vec![0.0; v.modes()];
    ws.galerkin_into(v.coeffs(), f, &mut out)?;
    Ok(SpectralField::from_vec(out))
}
