use std::sync::Arc;

use super::{GaussianStream, NoiseSpectrum};
use crate::error::{Error, Result};
use crate::mesh::GradedMesh;
use crate::spectral::{lambda, phi_factor, SpectralField};

/// Standard normal draws `xi_k^n` for one Monte Carlo sample, `n = 1..N`,
/// `k = 1..M`, regenerable from `(master_seed, sample_index)`.
#[derive(Debug, Clone)]
pub struct IncrementPack {
    xi: Vec<f64>,
    mesh: Arc<GradedMesh>,
    modes: usize,
    master_seed: u64,
    sample_index: u64,
}

impl IncrementPack {
    pub fn mesh(&self) -> &Arc<GradedMesh> {
        &self.mesh
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn steps(&self) -> usize {
        self.mesh.steps()
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn sample_index(&self) -> u64 {
        self.sample_index
    }

    /// `xi_k^n` for `1 <= n <= N`, `1 <= k <= M`.
    #[inline]
    pub fn xi(&self, n: usize, k: usize) -> f64 {
        self.xi[(n - 1) * self.modes + (k - 1)]
    }

    /// All draws of step `n`, indexed by `k - 1`.
    pub fn row(&self, n: usize) -> &[f64] {
        &self.xi[(n - 1) * self.modes..n * self.modes]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.xi
    }
}

/// Fills an [`IncrementPack`] from the keyed Gaussian stream.
pub fn sample_increments(
    mesh: &Arc<GradedMesh>,
    modes: usize,
    master_seed: u64,
    sample_index: u64,
) -> IncrementPack {
    assert!(modes >= 1, "increment pack needs at least one mode");
    let stream = GaussianStream::new(master_seed, sample_index);
    let steps = mesh.steps();
    let mut xi = Vec::with_capacity(steps * modes);
    for n in 1..=steps {
        for k in 1..=modes {
            xi.push(stream.normal(n as u32, k as u32));
        }
    }
    IncrementPack {
        xi,
        mesh: Arc::clone(mesh),
        modes,
        master_seed,
        sample_index,
    }
}

/// Standard deviation of `int_{0}^{tau} e^{-(tau-s) lambda_k} sqrt(mu_k) dW_k(s)`.
#[inline]
pub fn increment_std(mu: f64, tau: f64, lambda: f64) -> f64 {
    (mu * 0.5 * phi_factor(2.0 * tau, lambda)).sqrt()
}

fn check_modes(pack: &IncrementPack, modes: usize) -> Result<()> {
    if modes == 0 || modes > pack.modes {
        return Err(Error::domain(format!(
            "requested {modes} modes from a pack holding {}",
            pack.modes
        )));
    }
    Ok(())
}

/// Exact sample of `int_{t_{n-1}}^{t_n} e^{-(t_n - s)A} P_M dW(s)`.
pub fn convolution_increment(
    pack: &IncrementPack,
    n: usize,
    spectrum: &NoiseSpectrum,
    modes: usize,
) -> Result<SpectralField> {
    check_modes(pack, modes)?;
    if n == 0 || n > pack.steps() {
        return Err(Error::domain(format!("step {n} outside 1..={}", pack.steps())));
    }
    let tau = pack.mesh.step(n);
    Ok(SpectralField::from_vec(
        (1..=modes)
            .map(|k| increment_std(spectrum.mu(k), tau, lambda(k)) * pack.xi(n, k))
            .collect(),
    ))
}

/// Sample of `int_{t_n}^{t_{n+m}} e^{-(t_{n+m} - s)A} P_M dW(s)` assembled
/// from the fine increments of steps `n+1..=n+m`:
/// `sum_j e^{-(t_{n+m} - t_{n+j}) lambda_k} inc_{n+j,k}`, accumulated in
/// Horner form.
pub fn aggregate_increments(
    pack: &IncrementPack,
    spectrum: &NoiseSpectrum,
    n: usize,
    m: usize,
    modes: usize,
) -> Result<SpectralField> {
    check_modes(pack, modes)?;
    if m == 0 || n + m > pack.steps() {
        return Err(Error::domain(format!(
            "span {n}+{m} outside the {}-step mesh",
            pack.steps()
        )));
    }
    let mesh = &pack.mesh;
    let coeffs = (1..=modes)
        .map(|k| {
            let lam = lambda(k);
            let mu = spectrum.mu(k);
            (n + 1..=n + m).fold(0.0, |acc, step| {
                let tau = mesh.step(step);
                acc * (-tau * lam).exp() + increment_std(mu, tau, lam) * pack.xi(step, k)
            })
        })
        .collect();
    Ok(SpectralField::from_vec(coeffs))
}

/// Per-step, per-mode increment scales and decay factors on one mesh,
/// shared read-only between Monte Carlo samples.
#[derive(Debug, Clone)]
pub struct IncrementScales {
    steps: usize,
    modes: usize,
    std: Vec<f64>,
    decay: Vec<f64>,
}

impl IncrementScales {
    pub fn new(mesh: &GradedMesh, spectrum: &NoiseSpectrum, modes: usize) -> Self {
        let steps = mesh.steps();
        let mut std = Vec::with_capacity(steps * modes);
        let mut decay = Vec::with_capacity(steps * modes);
        for n in 1..=steps {
            let tau = mesh.step(n);
            for k in 1..=modes {
                let lam = lambda(k);
                std.push(increment_std(spectrum.mu(k), tau, lam));
                decay.push((-tau * lam).exp());
            }
        }
        Self {
            steps,
            modes,
            std,
            decay,
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Increments of a coarse mesh whose levels are every `factor`-th level
    /// of this mesh, truncated to `modes`. Row `c - 1` holds coarse step `c`.
    pub fn aggregate(&self, pack: &IncrementPack, factor: usize, modes: usize) -> Result<Vec<f64>> {
        check_modes(pack, modes)?;
        if pack.steps() != self.steps || modes > self.modes {
            return Err(Error::domain("increment scales do not match the pack"));
        }
        if factor == 0 || !self.steps.is_multiple_of(factor) {
            return Err(Error::domain(format!(
                "coarsening factor {factor} does not divide {} steps",
                self.steps
            )));
        }
        let coarse_steps = self.steps / factor;
        let mut out = vec![0.0; coarse_steps * modes];
        for c in 0..coarse_steps {
            let acc = &mut out[c * modes..(c + 1) * modes];
            for fine in c * factor..(c + 1) * factor {
                let base = fine * self.modes;
                let std = &self.std[base..base + modes];
                let decay = &self.decay[base..base + modes];
                let xi = &pack.xi[fine * pack.modes..fine * pack.modes + modes];
                for k in 0..modes {
                    acc[k] = acc[k] * decay[k] + std[k] * xi[k];
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mesh(steps: usize) -> Arc<GradedMesh> {
        Arc::new(GradedMesh::new(0.5, steps, 0.7).unwrap())
    }

    #[test]
    fn deterministic_packs() {
        let m = mesh(8);
        let a = sample_increments(&m, 5, 11, 3);
        let b = sample_increments(&m, 5, 11, 3);
        assert!(a.as_slice().iter().zip(b.as_slice()).all(|(x, y)| x.to_bits() == y.to_bits()));
        // Mode prefix is independent of the pack width.
        let wide = sample_increments(&m, 9, 11, 3);
        for n in 1..=8 {
            for k in 1..=5 {
                assert_eq!(a.xi(n, k).to_bits(), wide.xi(n, k).to_bits());
            }
        }
    }

    #[test]
    fn zero_spectrum_gives_zero_field() {
        let m = mesh(4);
        let pack = sample_increments(&m, 6, 1, 0);
        let zero = NoiseSpectrum::custom(|_| 0.0, 1.0).unwrap();
        let inc = convolution_increment(&pack, 2, &zero, 6).unwrap();
        assert_eq!(inc, SpectralField::zeros(6));
    }

    #[test]
    fn long_step_limit() {
        let lam = lambda(3);
        let s = increment_std(2.0, 1e3, lam);
        assert!((s - (2.0 / (2.0 * lam)).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_span_matches_increment() {
        let m = mesh(10);
        let pack = sample_increments(&m, 7, 5, 2);
        let spec = NoiseSpectrum::power(0.5).unwrap();
        for n in 0..10 {
            let a = aggregate_increments(&pack, &spec, n, 1, 7).unwrap();
            let b = convolution_increment(&pack, n + 1, &spec, 7).unwrap();
            assert!(a.coeffs().iter().zip(b.coeffs()).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
    }

    #[test]
    fn two_step_aggregation_direct() {
        let m = mesh(10);
        let pack = sample_increments(&m, 7, 5, 2);
        let spec = NoiseSpectrum::white();
        let n = 3;
        let agg = aggregate_increments(&pack, &spec, n, 2, 7).unwrap();
        let i1 = convolution_increment(&pack, n + 1, &spec, 7).unwrap();
        let i2 = convolution_increment(&pack, n + 2, &spec, 7).unwrap();
        for k in 1..=7 {
            let direct = (-m.step(n + 2) * lambda(k)).exp() * i1.coeff(k) + i2.coeff(k);
            assert_eq!(agg.coeff(k).to_bits(), direct.to_bits());
        }
    }

    #[test]
    fn aggregated_variance_telescopes() {
        // sum_j e^{-2(t_{n+m}-t_{n+j}) lambda} var_j == mu (1 - e^{-2 (t_{n+m}-t_n) lambda}) / (2 lambda)
        let m = mesh(32);
        let spec = NoiseSpectrum::power(0.8).unwrap();
        for &(n, span) in &[(0usize, 32usize), (3, 5), (10, 17)] {
            for k in [1usize, 2, 7, 40] {
                let lam = lambda(k);
                let mu = spec.mu(k);
                let summed: f64 = (n + 1..=n + span)
                    .map(|j| {
                        let w = (-(m.time(n + span) - m.time(j)) * lam).exp();
                        w * w * increment_std(mu, m.step(j), lam).powi(2)
                    })
                    .sum();
                let closed = mu * (1.0 - (-2.0 * (m.time(n + span) - m.time(n)) * lam).exp()) / (2.0 * lam);
                assert!((summed - closed).abs() <= 1e-12 * closed, "n={n} k={k}: {summed} vs {closed}");
            }
        }
    }

    #[test]
    fn table_aggregation_matches_per_span() {
        let fine = mesh(16);
        let spec = NoiseSpectrum::power(0.5).unwrap();
        let pack = sample_increments(&fine, 8, 9, 1);
        let scales = IncrementScales::new(&fine, &spec, 8);
        let table = scales.aggregate(&pack, 4, 5).unwrap();
        for c in 0..4 {
            let direct = aggregate_increments(&pack, &spec, 4 * c, 4, 5).unwrap();
            for k in 1..=5 {
                assert_eq!(table[c * 5 + k - 1].to_bits(), direct.coeff(k).to_bits());
            }
        }
        assert!(scales.aggregate(&pack, 3, 5).is_err());
    }

    #[test]
    fn range_errors() {
        let m = mesh(4);
        let pack = sample_increments(&m, 3, 0, 0);
        let spec = NoiseSpectrum::white();
        assert!(convolution_increment(&pack, 0, &spec, 3).is_err());
        assert!(convolution_increment(&pack, 5, &spec, 3).is_err());
        assert!(convolution_increment(&pack, 1, &spec, 4).is_err());
        assert!(aggregate_increments(&pack, &spec, 2, 3, 3).is_err());
        assert!(aggregate_increments(&pack, &spec, 0, 0, 3).is_err());
    }
}
