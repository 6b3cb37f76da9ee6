//! Problem parameters, the spectral basis of the string operator on
//! `[0, 2π]`, modal projections of initial data, and discrete Sobolev norms.
//!
//! The string operator `∂²/∂x²` with Dirichlet ends on `[0, 2π]` has
//! eigenvalues `λ_n = -μ_n² = -n²/4` and orthonormal eigenfunctions
//! `φ_n(x) = π^{-1/2} sin(n x / 2)`. All quadrature is composite Simpson on
//! a uniform grid; `‖φ_n'‖² = μ_n²` is used analytically so differentiation
//! noise never enters small norms.

use crate::error::{Error, Result};
use crate::excitation::Excitation;
use crate::quad::simpson;
use crate::scalar::Real;

/// Aliasing guard: grid panels required per mode index.
pub const PANELS_PER_MODE: usize = 8;

/// Physical constants of the disturbed, possibly damped string.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StringParams<T> {
    /// Wave speed `a > 0`.
    pub a: T,
    /// Disturbance coefficient `γ ≥ 0`; the undisturbed averaged mode `n`
    /// is unstable when `γ² > a² μ_n²`.
    pub gamma: T,
    /// Damping coefficient `α ≥ 0`; zero selects the undamped problem.
    pub alpha: T,
}

impl<T: Real> StringParams<T> {
    /// Domain length; the basis formulas assume exactly `2π`.
    pub fn domain_length() -> T {
        T::TAU()
    }

    pub fn new(a: T, gamma: T, alpha: T) -> Result<Self> {
        if !(a.is_finite() && gamma.is_finite() && alpha.is_finite()) {
            return Err(Error::InvalidParameter("non-finite string parameter".into()));
        }
        if a <= T::zero() {
            return Err(Error::InvalidParameter(format!("wave speed a = {a} must be > 0")));
        }
        if gamma < T::zero() || alpha < T::zero() {
            return Err(Error::InvalidParameter(
                "gamma and alpha must be nonnegative".into(),
            ));
        }
        Ok(Self { a, gamma, alpha })
    }
}

/// Feedback law parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlParams<T> {
    /// Gain `δ ≥ 0`. The theory targets small `δ > 0`; zero is accepted as
    /// the uncontrolled reference configuration.
    pub delta: T,
    /// Frequency parameter `k ≥ 1` of the fast oscillation.
    pub k: T,
    /// The 1-periodic excitation driving the feedback.
    pub excitation: Excitation<T>,
    /// Output-feedback cutoff: when present only modes `n ≤ cutoff` are
    /// actuated; when absent the feedback acts on the full state.
    pub cutoff: Option<usize>,
}

impl<T: Real> ControlParams<T> {
    pub fn new(delta: T, k: T, excitation: Excitation<T>, cutoff: Option<usize>) -> Result<Self> {
        if !delta.is_finite() || delta < T::zero() {
            return Err(Error::InvalidParameter(format!("delta = {delta} must be >= 0")));
        }
        if !k.is_finite() || k < T::one() {
            return Err(Error::InvalidParameter(format!("k = {k} must be >= 1")));
        }
        if cutoff == Some(0) {
            return Err(Error::InvalidParameter("cutoff must be >= 1".into()));
        }
        Ok(Self {
            delta,
            k,
            excitation,
            cutoff,
        })
    }
}

/// A 1-based spatial mode index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct ModeIndex(usize);

impl ModeIndex {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("mode index must be >= 1".into()));
        }
        Ok(Self(n))
    }

    pub fn n(self) -> usize {
        self.0
    }

    /// `μ_n = n / 2`.
    pub fn mu<T: Real>(self) -> T {
        T::of_usize(self.0) / T::of(2.0)
    }

    /// `λ_n = -μ_n² = -n²/4`.
    pub fn lambda<T: Real>(self) -> T {
        -self.mu::<T>() * self.mu::<T>()
    }
}

/// One mode's coordinates: amplitude `T_n` and scaled velocity `S_n = k Ṫ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ModalState<T> {
    pub amplitude: T,
    /// `k` times the amplitude's time derivative, so the modal systems stay
    /// well-scaled for large `k`.
    pub velocity: T,
}

impl<T: Real> ModalState<T> {
    pub fn new(amplitude: T, velocity: T) -> Self {
        Self { amplitude, velocity }
    }
}

/// Samples of a function on the uniform grid over `[0, 2π]`, both endpoints
/// included, with Dirichlet (zero) end values.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    samples: Vec<T>,
}

impl<T: Real> GridFunction<T> {
    /// Wrap explicit samples. The panel count (`len - 1`) must be even and
    /// at least 4, and the end samples must vanish.
    pub fn new(samples: Vec<T>) -> Result<Self> {
        if samples.len() < 5 || !(samples.len() - 1).is_multiple_of(2) {
            return Err(Error::GridMismatch(format!(
                "need an even panel count >= 4, got {} samples",
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::GridMismatch("non-finite sample".into()));
        }
        if samples[0] != T::zero() || *samples.last().unwrap() != T::zero() {
            return Err(Error::GridMismatch(
                "end samples must be exactly zero (Dirichlet)".into(),
            ));
        }
        Ok(Self { samples })
    }

    /// Sample `f` on the grid, imposing the Dirichlet end values exactly.
    pub fn from_fn(panels: usize, f: impl Fn(T) -> T) -> Result<Self> {
        if panels < 4 || !panels.is_multiple_of(2) {
            return Err(Error::GridMismatch(format!(
                "need an even panel count >= 4, got {panels}"
            )));
        }
        let h = T::TAU() / T::of_usize(panels);
        let mut samples: Vec<T> = (0..=panels).map(|i| f(h * T::of_usize(i))).collect();
        samples[0] = T::zero();
        samples[panels] = T::zero();
        Self::new(samples)
    }

    pub fn zeros(panels: usize) -> Result<Self> {
        Self::from_fn(panels, |_| T::zero())
    }

    pub fn panels(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn samples(&self) -> &[T] {
        &self.samples
    }

    pub fn grid_step(&self) -> T {
        T::TAU() / T::of_usize(self.panels())
    }

    /// Abscissa of sample `i`.
    pub fn x(&self, i: usize) -> T {
        self.grid_step() * T::of_usize(i)
    }

    /// `∫ f g` by Simpson on the shared grid.
    pub fn inner(&self, other: &Self) -> Result<T> {
        if self.panels() != other.panels() {
            return Err(Error::GridMismatch(format!(
                "{} vs {} panels",
                self.panels(),
                other.panels()
            )));
        }
        let prod: Vec<T> = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&a, &b)| a * b)
            .collect();
        Ok(simpson(&prod, self.grid_step()))
    }

    /// `‖f‖²` by Simpson.
    pub fn norm_sq(&self) -> T {
        let sq: Vec<T> = self.samples.iter().map(|&v| v * v).collect();
        simpson(&sq, self.grid_step())
    }
}

/// Eigenvalue, frequency and grid samples of one basis mode.
#[derive(Debug, Clone)]
pub struct Eigenpair<T> {
    pub lambda: T,
    pub mu: T,
    pub phi: GridFunction<T>,
}

fn aliasing_guard(panels: usize, n: usize) -> Result<()> {
    if panels < PANELS_PER_MODE * n {
        return Err(Error::Aliasing(format!(
            "mode {n} needs at least {} grid panels, got {panels}",
            PANELS_PER_MODE * n
        )));
    }
    Ok(())
}

/// `λ_n`, `μ_n`, and the orthonormal shape `φ_n = π^{-1/2} sin(n x / 2)`
/// sampled on a grid of `panels` panels.
pub fn eigenpair<T: Real>(n: ModeIndex, panels: usize) -> Result<Eigenpair<T>> {
    aliasing_guard(panels, n.n())?;
    let mu = n.mu::<T>();
    let norm = T::PI().sqrt().recip();
    let phi = GridFunction::from_fn(panels, |x| norm * (mu * x).sin())?;
    Ok(Eigenpair {
        lambda: n.lambda(),
        mu,
        phi,
    })
}

/// Project initial displacement `φ` and initial velocity `ψ` (in original
/// time) onto the first `n_max` modes.
///
/// `T_n(0) = ⟨φ, φ_n⟩` and `S_n(0) = k Ṫ_n(0) = ⟨ψ, φ_n⟩`: the `k` of the
/// scaled velocity cancels the `k^{-1}` the time rescaling puts in front of
/// `ψ`, so `k` does not appear numerically.
pub fn project_initial_data<T: Real>(
    phi: &GridFunction<T>,
    psi: &GridFunction<T>,
    k: T,
    n_max: usize,
) -> Result<Vec<ModalState<T>>> {
    if k < T::one() {
        return Err(Error::InvalidParameter(format!("k = {k} must be >= 1")));
    }
    if phi.panels() != psi.panels() {
        return Err(Error::GridMismatch(format!(
            "phi has {} panels, psi has {}",
            phi.panels(),
            psi.panels()
        )));
    }
    aliasing_guard(phi.panels(), n_max.max(1))?;
    let mut states = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let pair = eigenpair::<T>(ModeIndex::new(n)?, phi.panels())?;
        states.push(ModalState::new(
            phi.inner(&pair.phi)?,
            psi.inner(&pair.phi)?,
        ));
    }
    Ok(states)
}

/// `(‖u‖₁², ‖u_t‖²)` from modal coordinates starting at mode `n_start`:
/// `Σ (1 + μ_n²) T_n²` and `Σ (S_n / k)²`.
pub fn sobolev_norms_from<T: Real>(states: &[ModalState<T>], n_start: usize, k: T) -> (T, T) {
    let mut h1 = T::zero();
    let mut vel = T::zero();
    for (i, s) in states.iter().enumerate() {
        let mu = T::of_usize(n_start + i) / T::of(2.0);
        h1 += (T::one() + mu * mu) * s.amplitude * s.amplitude;
        let v = s.velocity / k;
        vel += v * v;
    }
    (h1, vel)
}

/// [`sobolev_norms_from`] for states indexed from mode 1.
pub fn sobolev_norms<T: Real>(states: &[ModalState<T>], k: T) -> (T, T) {
    sobolev_norms_from(states, 1, k)
}

/// Sum the modal series `Σ T_n φ_n` back onto a grid.
pub fn reconstruct<T: Real>(states: &[ModalState<T>], panels: usize) -> Result<GridFunction<T>> {
    aliasing_guard(panels, states.len().max(1))?;
    let norm = T::PI().sqrt().recip();
    GridFunction::from_fn(panels, |x| {
        let mut acc = T::zero();
        for (i, s) in states.iter().enumerate() {
            let mu = T::of_usize(i + 1) / T::of(2.0);
            acc += s.amplitude * norm * (mu * x).sin();
        }
        acc
    })
}

/// Convert a decay exponent from the rescaled time `t` to the original time
/// `τ = t / k`: rates are `k` times larger in original time.
pub fn rate_in_original_time<T: Real>(sigma_rescaled: T, k: T) -> T {
    sigma_rescaled * k
}
