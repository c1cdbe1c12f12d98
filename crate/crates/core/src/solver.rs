//! The modified exponential Euler scheme
//!
//! ```text
//! U^1 = e^{-tau_1 A} P_M u0
//! U^n = e^{-tau_n A} U^{n-1} + ((1 - e^{-tau_n A}) / A) F(U^{n-1}) + dW_n,   n >= 2
//! ```
//!
//! where `F` is either the Galerkin projection `P_M f` or the collocation
//! interpolant `I_M f`, and `dW_n` is the exact stochastic convolution
//! increment over `(t_{n-1}, t_n]`.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::GradedMesh;
use crate::noise::{aggregate_increments, IncrementPack, IncrementScales, NoiseSpectrum};
use crate::spectral::{lambda, phi_factor, semigroup_apply, NonlinearityWorkspace, SpectralField};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Spectral Galerkin: `P_M f(U)` by oversampled quadrature.
    Galerkin,
    /// Fourier sine collocation: `I_M f(U)` on the DST-I grid.
    Collocation,
}

impl Variant {
    pub fn parse(text: &str) -> Result<Self> {
        match text.trim() {
            "galerkin" => Ok(Variant::Galerkin),
            "collocation" => Ok(Variant::Collocation),
            other => Err(Error::config(format!(
                "unknown variant '{other}' (expected galerkin or collocation)"
            ))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Variant::Galerkin => "galerkin",
            Variant::Collocation => "collocation",
        }
    }
}

/// A scalar drift `f` applied pointwise.
#[derive(Clone)]
pub struct Drift {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    lipschitz: Option<f64>,
    vanishes: bool,
}

impl fmt::Debug for Drift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Drift")
            .field("name", &self.name)
            .field("lipschitz", &self.lipschitz)
            .finish()
    }
}

impl Drift {
    pub fn new(
        name: impl Into<String>,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        lipschitz: Option<f64>,
    ) -> Self {
        Self {
            name: name.into(),
            f: Arc::new(f),
            lipschitz,
            vanishes: false,
        }
    }

    /// `f(u) = sqrt(1 + u^2)`, globally Lipschitz with constant 1.
    pub fn sqrt1pu2() -> Self {
        Self::new("sqrt1pu2", |u: f64| u.hypot(1.0), Some(1.0))
    }

    /// `f = 0`; the stepper skips the drift entirely.
    pub fn zero() -> Self {
        Self {
            vanishes: true,
            ..Self::new("zero", |_| 0.0, Some(0.0))
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(format!("const:{c}"), move |_| c, Some(0.0))
    }

    /// Built-in drifts: `sqrt1pu2`, `zero`, `const:C`.
    pub fn by_name(name: &str) -> Result<Self> {
        let name = name.trim();
        match name {
            "sqrt1pu2" => Ok(Self::sqrt1pu2()),
            "zero" => Ok(Self::zero()),
            _ => {
                if let Some(c) = name.strip_prefix("const:") {
                    let c: f64 = c
                        .parse()
                        .map_err(|_| Error::config(format!("bad constant drift '{name}'")))?;
                    Ok(Self::constant(c))
                } else {
                    Err(Error::config(format!("unknown drift '{name}'")))
                }
            }
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn eval(&self, u: f64) -> f64 {
        (self.f)(u)
    }

    pub fn function(&self) -> &(dyn Fn(f64) -> f64 + Send + Sync) {
        &*self.f
    }

    pub fn is_zero(&self) -> bool {
        self.vanishes
    }
}

#[derive(Debug, Clone)]
pub struct SchemeConfig {
    pub variant: Variant,
    pub drift: Drift,
    pub modes: usize,
    /// Quadrature refinement for the Galerkin variant.
    pub oversample: usize,
    /// Use the unmodified exponential Euler first step (drift and noise on
    /// `(0, t_1]`). For comparison runs only.
    pub standard_first_step: bool,
}

impl SchemeConfig {
    pub const DEFAULT_OVERSAMPLE: usize = 4;

    pub fn new(variant: Variant, drift: Drift, modes: usize) -> Self {
        Self {
            variant,
            drift,
            modes,
            oversample: Self::DEFAULT_OVERSAMPLE,
            standard_first_step: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes == 0 {
            return Err(Error::validation("mode count must be at least 1"));
        }
        if self.variant == Variant::Galerkin && self.oversample < 2 {
            return Err(Error::validation(format!(
                "Galerkin oversample must be >= 2, got {}",
                self.oversample
            )));
        }
        Ok(())
    }

    pub fn workspace(&self) -> Result<NonlinearityWorkspace> {
        match self.variant {
            Variant::Collocation => Ok(NonlinearityWorkspace::collocation(self.modes)),
            Variant::Galerkin => NonlinearityWorkspace::galerkin(self.modes, self.oversample),
        }
    }

    /// Drift term `F(U)` of the configured variant, written into `out`.
    fn nonlinearity_into(&self, ws: &mut NonlinearityWorkspace, state: &[f64], out: &mut [f64]) -> Result<()> {
        let f = self.drift.function();
        match self.variant {
            Variant::Collocation => ws.collocation_into(state, f, out),
            Variant::Galerkin => ws.galerkin_into(state, f, out),
        }
    }
}

/// Initial data given through their sine coefficients.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialDatum {
    /// `sin(pi x)`.
    Sine,
    /// Point mass `delta(x - at)`.
    Dirac { at: f64 },
    /// `phi_k`.
    Mode(usize),
    Zero,
    /// Explicit orthonormal coefficients, zero beyond the given length.
    Coefficients(Vec<f64>),
}

impl InitialDatum {
    /// `sine`, `dirac` (at 1/2) or `dirac:X`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        match text {
            "sine" => Ok(InitialDatum::Sine),
            "dirac" => Ok(InitialDatum::Dirac { at: 0.5 }),
            "zero" => Ok(InitialDatum::Zero),
            _ => {
                if let Some(x) = text.strip_prefix("dirac:") {
                    let at: f64 = x
                        .parse()
                        .map_err(|_| Error::config(format!("bad Dirac location in '{text}'")))?;
                    if !(at > 0.0 && at < 1.0) {
                        return Err(Error::config(format!("Dirac location {at} outside (0, 1)")));
                    }
                    Ok(InitialDatum::Dirac { at })
                } else {
                    Err(Error::config(format!(
                        "unknown initial datum '{text}' (expected sine or dirac)"
                    )))
                }
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            InitialDatum::Sine => "sine".into(),
            InitialDatum::Dirac { at } if *at == 0.5 => "dirac".into(),
            InitialDatum::Dirac { at } => format!("dirac:{at}"),
            InitialDatum::Mode(k) => format!("mode:{k}"),
            InitialDatum::Zero => "zero".into(),
            InitialDatum::Coefficients(_) => "coefficients".into(),
        }
    }

    /// `(u0, phi_k)` for `k >= 1`.
    pub fn coefficient(&self, k: usize) -> f64 {
        match self {
            InitialDatum::Sine => {
                if k == 1 {
                    1.0 / SQRT_2
                } else {
                    0.0
                }
            }
            InitialDatum::Dirac { at } => SQRT_2 * (k as f64 * PI * at).sin(),
            InitialDatum::Mode(j) => {
                if k == *j {
                    1.0
                } else {
                    0.0
                }
            }
            InitialDatum::Zero => 0.0,
            InitialDatum::Coefficients(c) => c.get(k - 1).copied().unwrap_or(0.0),
        }
    }
}

/// `U^0 = P_M u0`.
pub fn initial_state(u0: &InitialDatum, modes: usize) -> Result<SpectralField> {
    if modes == 0 {
        return Err(Error::domain("mode count must be positive"));
    }
    let mut coeffs: Vec<f64> = (1..=modes).map(|k| u0.coefficient(k)).collect();
    if let InitialDatum::Dirac { at } = u0 {
        // sin(k pi / 2) is exactly 0 or +-1; avoid O(1e-16) residue in even modes.
        if *at == 0.5 {
            for (i, c) in coeffs.iter_mut().enumerate() {
                let k = i + 1;
                *c = match k % 4 {
                    1 => SQRT_2,
                    3 => -SQRT_2,
                    _ => 0.0,
                };
            }
        }
    }
    SpectralField::new(coeffs)
}

/// `U^1 = e^{-tau_1 A} U^0`: the modified first step drops drift and noise.
pub fn first_step(u0_field: &SpectralField, mesh: &GradedMesh) -> SpectralField {
    semigroup_apply(u0_field, mesh.step(1)).expect("mesh steps are positive")
}

/// One step `n >= 2` of the scheme from `state` with the given noise increment.
pub fn step(
    state: &SpectralField,
    n: usize,
    noise_inc: &SpectralField,
    cfg: &SchemeConfig,
    mesh: &GradedMesh,
) -> Result<SpectralField> {
    cfg.validate()?;
    if n == 0 || n > mesh.steps() {
        return Err(Error::domain(format!("step {n} outside 1..={}", mesh.steps())));
    }
    let m = cfg.modes;
    if state.modes() != m || noise_inc.modes() != m {
        return Err(Error::domain(format!(
            "state has {} modes and increment {}, scheme expects {m}",
            state.modes(),
            noise_inc.modes()
        )));
    }
    let tau = mesh.step(n);
    let mut drift = vec![0.0; m];
    if !cfg.drift.is_zero() {
        let mut ws = cfg.workspace()?;
        cfg.nonlinearity_into(&mut ws, state.coeffs(), &mut drift)?;
    }
    let coeffs: Vec<f64> = (0..m)
        .map(|i| {
            let lam = lambda(i + 1);
            (-tau * lam).exp() * state.coeffs()[i] + phi_factor(tau, lam) * drift[i] + noise_inc.coeffs()[i]
        })
        .collect();
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFiniteStep { step: n, sample: None });
    }
    Ok(SpectralField::from_vec(coeffs))
}

/// States at every time level.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub states: Vec<SpectralField>,
    pub mesh: Arc<GradedMesh>,
}

/// Per-step semigroup and phi-filter factors for one mesh and mode count,
/// shared read-only between Monte Carlo samples.
#[derive(Debug, Clone)]
pub struct PreparedScheme {
    mesh: Arc<GradedMesh>,
    cfg: SchemeConfig,
    decay: Vec<f64>,
    phi: Vec<f64>,
}

impl PreparedScheme {
    pub fn new(mesh: Arc<GradedMesh>, cfg: SchemeConfig) -> Result<Self> {
        cfg.validate()?;
        let m = cfg.modes;
        let steps = mesh.steps();
        let mut decay = Vec::with_capacity(steps * m);
        let mut phi = Vec::with_capacity(steps * m);
        for n in 1..=steps {
            let tau = mesh.step(n);
            for k in 1..=m {
                let lam = lambda(k);
                decay.push((-tau * lam).exp());
                phi.push(phi_factor(tau, lam));
            }
        }
        Ok(Self { mesh, cfg, decay, phi })
    }

    pub fn mesh(&self) -> &Arc<GradedMesh> {
        &self.mesh
    }

    pub fn config(&self) -> &SchemeConfig {
        &self.cfg
    }

    pub fn modes(&self) -> usize {
        self.cfg.modes
    }

    pub fn workspace(&self) -> Result<NonlinearityWorkspace> {
        self.cfg.workspace()
    }

    /// Advances `u0_field` to `t_N`. `increments` holds `N` rows of `M`
    /// values, row `n - 1` being the noise of step `n`; the first row is only
    /// read when the standard first step is enabled. `observer` sees the
    /// state after every level, including `n = 0`.
    pub fn run(
        &self,
        u0_field: &[f64],
        increments: &[f64],
        ws: &mut NonlinearityWorkspace,
        mut observer: Option<&mut dyn FnMut(usize, &[f64])>,
    ) -> Result<Vec<f64>> {
        let m = self.cfg.modes;
        let steps = self.mesh.steps();
        if u0_field.len() != m || increments.len() != steps * m || ws.modes() != m {
            return Err(Error::domain("state, increment table or workspace has the wrong shape"));
        }
        let mut state = u0_field.to_vec();
        let mut drift = vec![0.0; m];
        if let Some(obs) = observer.as_mut() {
            obs(0, &state);
        }
        for n in 1..=steps {
            let row = (n - 1) * m..n * m;
            let decay = &self.decay[row.clone()];
            if n == 1 && !self.cfg.standard_first_step {
                for (u, d) in state.iter_mut().zip(decay) {
                    *u *= d;
                }
            } else {
                let phi = &self.phi[row.clone()];
                let inc = &increments[row];
                if self.cfg.drift.is_zero() {
                    for k in 0..m {
                        state[k] = decay[k] * state[k] + inc[k];
                    }
                } else {
                    self.cfg
                        .nonlinearity_into(ws, &state, &mut drift)
                        .map_err(|e| match e {
                            Error::NonFiniteNode { .. } => Error::NonFiniteStep { step: n, sample: None },
                            other => other,
                        })?;
                    for k in 0..m {
                        state[k] = decay[k] * state[k] + phi[k] * drift[k] + inc[k];
                    }
                }
                if state.iter().any(|c| !c.is_finite()) {
                    return Err(Error::NonFiniteStep { step: n, sample: None });
                }
            }
            if let Some(obs) = observer.as_mut() {
                obs(n, &state);
            }
        }
        Ok(state)
    }
}

/// Coarsening factor between the pack's mesh and `mesh`, checking that
/// `mesh` sits inside the pack's mesh level by level.
fn nesting_factor(pack: &IncrementPack, mesh: &GradedMesh) -> Result<usize> {
    let fine = pack.mesh();
    let steps = mesh.steps();
    if !fine.steps().is_multiple_of(steps) {
        return Err(Error::domain(format!(
            "a {}-step pack cannot drive a {steps}-step mesh",
            fine.steps()
        )));
    }
    let factor = fine.steps() / steps;
    let scale = mesh.final_time();
    for n in 0..=steps {
        if (fine.time(n * factor) - mesh.time(n)).abs() > 4.0 * f64::EPSILON * scale {
            return Err(Error::domain(format!("mesh level {n} is not a level of the pack's mesh")));
        }
    }
    Ok(factor)
}

/// Noise table for [`PreparedScheme::run`] built from a pack on the same or
/// a nested finer mesh.
pub fn increment_table(
    pack: &IncrementPack,
    mesh: &GradedMesh,
    spectrum: &NoiseSpectrum,
    modes: usize,
) -> Result<Vec<f64>> {
    let factor = nesting_factor(pack, mesh)?;
    IncrementScales::new(pack.mesh(), spectrum, modes).aggregate(pack, factor, modes)
}

/// Solves one path to `t_N` and returns `U_M^N`.
pub fn solve_path(
    u0: &InitialDatum,
    mesh: &Arc<GradedMesh>,
    cfg: &SchemeConfig,
    pack: &IncrementPack,
    spectrum: &NoiseSpectrum,
) -> Result<SpectralField> {
    let prepared = PreparedScheme::new(Arc::clone(mesh), cfg.clone())?;
    let incs = increment_table(pack, mesh, spectrum, cfg.modes)?;
    let u0_field = initial_state(u0, cfg.modes)?;
    let mut ws = prepared.workspace()?;
    let out = prepared
        .run(u0_field.coeffs(), &incs, &mut ws, None)
        .map_err(|e| e.with_sample(pack.sample_index()))?;
    Ok(SpectralField::from_vec(out))
}

/// Like [`solve_path`] but keeps every level.
pub fn solve_trajectory(
    u0: &InitialDatum,
    mesh: &Arc<GradedMesh>,
    cfg: &SchemeConfig,
    pack: &IncrementPack,
    spectrum: &NoiseSpectrum,
) -> Result<Trajectory> {
    let prepared = PreparedScheme::new(Arc::clone(mesh), cfg.clone())?;
    let incs = increment_table(pack, mesh, spectrum, cfg.modes)?;
    let u0_field = initial_state(u0, cfg.modes)?;
    let mut ws = prepared.workspace()?;
    let mut states = Vec::with_capacity(mesh.steps() + 1);
    let mut record = |_: usize, s: &[f64]| states.push(SpectralField::from_vec(s.to_vec()));
    prepared
        .run(u0_field.coeffs(), &incs, &mut ws, Some(&mut record))
        .map_err(|e| e.with_sample(pack.sample_index()))?;
    Ok(Trajectory {
        states,
        mesh: Arc::clone(mesh),
    })
}

/// Exact mild solution at `t_N` of the `M`-mode linear system (`f = 0`)
/// driven by the same noise, with the first interval's noise dropped:
/// `e^{-(t_N - t_1) lambda_k} e^{-tau_1 lambda_k} u0_k + sum_{n >= 2} e^{-(t_N - t_n) lambda_k} dW_{n,k}`.
pub fn linear_oracle(
    u0_field: &SpectralField,
    mesh: &GradedMesh,
    pack: &IncrementPack,
    spectrum: &NoiseSpectrum,
) -> Result<SpectralField> {
    let factor = nesting_factor(pack, mesh)?;
    let m = u0_field.modes();
    let steps = mesh.steps();
    let t_end = mesh.final_time();
    let incs: Vec<SpectralField> = (2..=steps)
        .map(|n| aggregate_increments(pack, spectrum, (n - 1) * factor, factor, m))
        .collect::<Result<_>>()?;
    let coeffs = (1..=m)
        .map(|k| {
            let lam = lambda(k);
            let mut value = (-(t_end - mesh.time(1)) * lam).exp() * (-mesh.step(1) * lam).exp() * u0_field.coeff(k);
            for (i, inc) in incs.iter().enumerate() {
                let n = i + 2;
                value += (-(t_end - mesh.time(n)) * lam).exp() * inc.coeff(k);
            }
            value
        })
        .collect();
    Ok(SpectralField::from_vec(coeffs))
}
