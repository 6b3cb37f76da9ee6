//! 1-periodic excitations: the waveform `g`, its primitive `G`, and the
//! moment `Γ = ∫₀¹ G²`.
//!
//! Admissible excitations have zero mean (so the fast feedback averages out)
//! and a zero-mean primitive (so the averaged generator picks up only the
//! `Γ` term). Both conditions are checked by [`Excitation::verify_assumptions`].

use crate::error::{Error, Result};
use crate::quad::simpson_segmented;
use crate::scalar::Real;

/// Tolerance for the zero-mean checks on built-in waveforms.
pub const ASSUMPTION_TOL_BUILTIN: f64 = 1e-10;
/// Tolerance for the zero-mean checks on tabulated waveforms.
pub const ASSUMPTION_TOL_TABULATED: f64 = 1e-8;

const DEFAULT_SAMPLES_PER_PERIOD: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
enum Waveform<T> {
    /// `g(t) = cos 2πt`.
    Harmonic,
    /// ±1 square wave whose primitive is a zero-mean triangle wave of peak
    /// 1/8 (two square cycles per unit period), giving `Γ = 1/192`.
    SquareWave,
    /// Linear interpolation of user samples over one period.
    Tabulated { times: Vec<T>, values: Vec<T> },
}

/// A bounded 1-periodic excitation with unit period.
#[derive(Debug, Clone, PartialEq)]
pub struct Excitation<T> {
    waveform: Waveform<T>,
    amplitude: T,
    samples_per_period: usize,
    /// Exact primitive values at the tabulated nodes (cumulative trapezoid,
    /// which is exact for the linear interpolant). Empty for built-ins.
    primitive_nodes: Vec<T>,
}

/// Measured assumption data; failures are carried, not raised.
#[derive(Debug, Clone)]
pub struct AssumptionReport<T> {
    pub integral_g: T,
    pub integral_primitive: T,
    /// `∫₀¹ G²` by quadrature (independent of any closed form).
    pub gamma_quadrature: T,
    pub max_abs_g: T,
    pub max_abs_primitive: T,
    pub tolerance: T,
    pub zero_mean_ok: bool,
    pub zero_mean_primitive_ok: bool,
    /// True for waveforms with jump discontinuities (admitted with a warning;
    /// every estimate used downstream only needs `g` bounded and `G` continuous).
    pub discontinuous: bool,
}

impl<T: Real> AssumptionReport<T> {
    pub fn all_pass(&self) -> bool {
        self.zero_mean_ok && self.zero_mean_primitive_ok
    }
}

impl<T: Real> Excitation<T> {
    pub fn harmonic() -> Self {
        Self {
            waveform: Waveform::Harmonic,
            amplitude: T::one(),
            samples_per_period: DEFAULT_SAMPLES_PER_PERIOD,
            primitive_nodes: Vec::new(),
        }
    }

    pub fn square_wave() -> Self {
        Self {
            waveform: Waveform::SquareWave,
            amplitude: T::one(),
            samples_per_period: DEFAULT_SAMPLES_PER_PERIOD,
            primitive_nodes: Vec::new(),
        }
    }

    /// Tabulated waveform on `[0, 1]`. Times must be strictly increasing,
    /// start at 0, end at 1, and the first and last values must agree so the
    /// periodic extension is well defined.
    pub fn tabulated(times: Vec<T>, values: Vec<T>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::InvalidExcitation(format!(
                "{} times vs {} values",
                times.len(),
                values.len()
            )));
        }
        if times.len() < 2 {
            return Err(Error::InvalidExcitation("need at least two samples".into()));
        }
        if times[0] != T::zero() || *times.last().unwrap() != T::one() {
            return Err(Error::InvalidExcitation(
                "times must start at 0 and end at 1".into(),
            ));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidExcitation(
                "times must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidExcitation("non-finite sample".into()));
        }
        let scale = values.iter().fold(T::one(), |m, v| m.max(v.abs()));
        if (values[0] - *values.last().unwrap()).abs() > T::of(1e-8) * scale {
            return Err(Error::InvalidExcitation(
                "samples do not close periodically (first != last)".into(),
            ));
        }
        // exact primitive of the linear interpolant at the nodes
        let mut primitive_nodes = vec![T::zero(); times.len()];
        for i in 1..times.len() {
            let dt = times[i] - times[i - 1];
            primitive_nodes[i] =
                primitive_nodes[i - 1] + dt * (values[i] + values[i - 1]) * T::of(0.5);
        }
        Ok(Self {
            waveform: Waveform::Tabulated { times, values },
            amplitude: T::one(),
            samples_per_period: DEFAULT_SAMPLES_PER_PERIOD,
            primitive_nodes,
        })
    }

    /// Parse the two-column `t,g(t)` CSV format. Blank lines and `#` comments
    /// are skipped; a single leading header line is tolerated.
    pub fn tabulated_from_csv(text: &str) -> Result<Self> {
        let mut times = Vec::new();
        let mut values = Vec::new();
        let mut first_data_line = true;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split(',').map(str::trim);
            let (t, v) = match (cols.next(), cols.next(), cols.next()) {
                (Some(t), Some(v), None) => (t, v),
                _ => {
                    return Err(Error::InvalidExcitation(format!(
                        "line {}: expected two comma-separated columns",
                        lineno + 1
                    )))
                }
            };
            match (t.parse::<f64>(), v.parse::<f64>()) {
                (Ok(t), Ok(v)) => {
                    times.push(T::of(t));
                    values.push(T::of(v));
                    first_data_line = false;
                }
                _ if first_data_line => {
                    // header row
                    first_data_line = false;
                }
                _ => {
                    return Err(Error::InvalidExcitation(format!(
                        "line {}: cannot parse '{line}'",
                        lineno + 1
                    )))
                }
            }
        }
        Self::tabulated(times, values)
    }

    pub fn with_samples_per_period(mut self, samples: usize) -> Self {
        self.samples_per_period = samples.max(64);
        self
    }

    /// Uniform rescaling `g -> c g`; all moments scale accordingly.
    pub fn scaled(&self, c: T) -> Self {
        let mut e = self.clone();
        e.amplitude *= c;
        e
    }

    pub fn kind_name(&self) -> &'static str {
        match self.waveform {
            Waveform::Harmonic => "harmonic",
            Waveform::SquareWave => "square",
            Waveform::Tabulated { .. } => "tabulated",
        }
    }

    pub fn is_discontinuous(&self) -> bool {
        matches!(self.waveform, Waveform::SquareWave)
    }

    /// Interior breakpoints of one period where `g` jumps or kinks.
    /// Flow integrators align step endpoints with these.
    pub fn breakpoints(&self) -> Vec<T> {
        match &self.waveform {
            Waveform::Harmonic => Vec::new(),
            Waveform::SquareWave => [0.125, 0.375, 0.625, 0.875]
                .iter()
                .map(|&b| T::of(b))
                .collect(),
            Waveform::Tabulated { times, .. } => times[1..times.len() - 1].to_vec(),
        }
    }

    /// For piecewise waveforms: the number of equal subdivisions of the
    /// period that contains every breakpoint, if one exists.
    pub fn uniform_segments(&self) -> Option<usize> {
        match self.waveform {
            Waveform::SquareWave => Some(8),
            _ => None,
        }
    }

    /// `g` at `t`, reduced mod 1. Jump points take the right-hand value.
    pub fn g(&self, t: T) -> T {
        let u = t - t.floor();
        self.amplitude * self.g_raw(u)
    }

    fn g_raw(&self, u: T) -> T {
        match &self.waveform {
            Waveform::Harmonic => (T::TAU() * u).cos(),
            Waveform::SquareWave => {
                // +1 on [0,1/8) u [3/8,5/8) u [7/8,1), -1 elsewhere
                let e = T::of(0.125);
                if u < e || (u >= T::of(0.375) && u < T::of(0.625)) || u >= T::of(0.875) {
                    T::one()
                } else {
                    -T::one()
                }
            }
            Waveform::Tabulated { times, values } => {
                let i = segment_index(times, u);
                let w = (u - times[i]) / (times[i + 1] - times[i]);
                values[i] + (values[i + 1] - values[i]) * w
            }
        }
    }

    /// Primitive `G(t) = ∫₀ᵗ g`, extended over periods by
    /// `G(t + 1) = G(t) + G(1)` (with `G(1) = 0` whenever the zero-mean
    /// assumption holds).
    pub fn primitive(&self, t: T) -> T {
        let n = t.floor();
        let u = t - n;
        self.amplitude * (self.primitive_raw(u) + n * self.primitive_raw(T::one()))
    }

    fn primitive_raw(&self, u: T) -> T {
        match &self.waveform {
            Waveform::Harmonic => (T::TAU() * u).sin() / T::TAU(),
            Waveform::SquareWave => {
                // zero-mean triangle of peak 1/8
                let (q1, q3, q5, q7) = (T::of(0.125), T::of(0.375), T::of(0.625), T::of(0.875));
                if u <= q1 {
                    u
                } else if u <= q3 {
                    T::of(0.25) - u
                } else if u <= q5 {
                    u - T::of(0.5)
                } else if u <= q7 {
                    T::of(0.75) - u
                } else {
                    u - T::one()
                }
            }
            Waveform::Tabulated { times, values } => {
                if u >= T::one() {
                    return *self.primitive_nodes.last().unwrap();
                }
                let i = segment_index(times, u);
                let dt = u - times[i];
                let slope = (values[i + 1] - values[i]) / (times[i + 1] - times[i]);
                self.primitive_nodes[i] + values[i] * dt + slope * dt * dt * T::of(0.5)
            }
        }
    }

    /// `Γ = ∫₀¹ G² > 0`; closed form for the built-ins, segment-aware Simpson
    /// for tabulated data. Fails when the result is not strictly positive.
    pub fn gamma_moment(&self) -> Result<T> {
        let amp2 = self.amplitude * self.amplitude;
        let gamma = match &self.waveform {
            Waveform::Harmonic => amp2 / (T::of(8.0) * T::PI() * T::PI()),
            Waveform::SquareWave => amp2 / T::of(192.0),
            Waveform::Tabulated { .. } => self.gamma_by_quadrature(),
        };
        if gamma <= T::zero() || !gamma.is_finite() {
            return Err(Error::InvalidExcitation(format!(
                "second moment of the primitive must be positive, got {gamma}"
            )));
        }
        Ok(gamma)
    }

    /// `Γ` by quadrature regardless of closed-form availability.
    pub fn gamma_by_quadrature(&self) -> T {
        let breaks = self.breakpoints();
        simpson_segmented(
            |t| {
                let v = self.primitive(t);
                v * v
            },
            T::zero(),
            T::one(),
            &breaks,
            self.samples_per_period,
        )
    }

    pub fn max_abs_g(&self) -> T {
        match &self.waveform {
            Waveform::Harmonic | Waveform::SquareWave => self.amplitude.abs(),
            Waveform::Tabulated { values, .. } => {
                self.amplitude.abs() * values.iter().fold(T::zero(), |m, v| m.max(v.abs()))
            }
        }
    }

    pub fn max_abs_primitive(&self) -> T {
        match &self.waveform {
            Waveform::Harmonic => self.amplitude.abs() / T::TAU(),
            Waveform::SquareWave => self.amplitude.abs() * T::of(0.125),
            Waveform::Tabulated { times, values } => {
                // extrema sit at nodes or at interior zeros of the linear g
                let mut m = T::zero();
                for i in 0..times.len() - 1 {
                    m = m.max(self.primitive_raw(times[i]).abs());
                    let (v0, v1) = (values[i], values[i + 1]);
                    if (v0 < T::zero()) != (v1 < T::zero()) && v0 != v1 {
                        let root = times[i] + (times[i + 1] - times[i]) * v0 / (v0 - v1);
                        m = m.max(self.primitive_raw(root).abs());
                    }
                }
                m.max(self.primitive_raw(T::one()).abs()) * self.amplitude.abs()
            }
        }
    }

    fn assumption_tolerance(&self) -> T {
        match self.waveform {
            Waveform::Tabulated { .. } => T::of(ASSUMPTION_TOL_TABULATED),
            _ => T::of(ASSUMPTION_TOL_BUILTIN),
        }
    }

    /// Measure `∫g`, `∫G`, and `Γ` by quadrature and check the zero-mean
    /// assumptions at the waveform's tolerance.
    pub fn verify_assumptions(&self) -> AssumptionReport<T> {
        let breaks = self.breakpoints();
        let n = self.samples_per_period;
        let integral_g =
            simpson_segmented(|t| self.g(t), T::zero(), T::one(), &breaks, n);
        let integral_primitive =
            simpson_segmented(|t| self.primitive(t), T::zero(), T::one(), &breaks, n);
        let gamma_quadrature = self.gamma_by_quadrature();
        let tol = self.assumption_tolerance();
        AssumptionReport {
            integral_g,
            integral_primitive,
            gamma_quadrature,
            max_abs_g: self.max_abs_g(),
            max_abs_primitive: self.max_abs_primitive(),
            tolerance: tol,
            zero_mean_ok: integral_g.abs() <= tol,
            zero_mean_primitive_ok: integral_primitive.abs() <= tol,
            discontinuous: self.is_discontinuous(),
        }
    }
}

fn segment_index<T: Real>(times: &[T], u: T) -> usize {
    // last i with times[i] <= u, clamped to a valid segment
    match times.binary_search_by(|t| t.partial_cmp(&u).unwrap()) {
        Ok(i) => i.min(times.len() - 2),
        Err(i) => i.saturating_sub(1).min(times.len() - 2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type E = Excitation<f64>;

    #[test]
    fn harmonic_values() {
        let e = E::harmonic();
        assert_eq!(e.g(0.0), 1.0);
        assert!(e.g(0.25).abs() < 1e-15);
        assert_eq!(e.g(1.25), e.g(0.25));
        // analytic primitive: sin(2 pi t) / (2 pi)
        assert_relative_eq!(e.primitive(0.25), 1.0 / (2.0 * std::f64::consts::PI));
        assert_eq!(e.primitive(0.0), 0.0);
        assert!(e.primitive(1.0).abs() < 1e-15);
    }

    #[test]
    fn harmonic_gamma_closed_form_vs_quadrature() {
        let e = E::harmonic();
        let closed = e.gamma_moment().unwrap();
        assert_relative_eq!(closed, 1.0 / (8.0 * std::f64::consts::PI.powi(2)));
        assert_relative_eq!(closed, e.gamma_by_quadrature(), max_relative = 1e-8);
    }

    #[test]
    fn square_wave_moments() {
        let e = E::square_wave();
        // piecewise-polynomial oracle: the primitive is a zero-mean triangle
        // of peak A = 1/8, so gamma = A^2 / 3 = 1/192
        let oracle = (1.0 / 8.0f64).powi(2) / 3.0;
        assert_relative_eq!(e.gamma_moment().unwrap(), oracle);
        assert_relative_eq!(e.gamma_moment().unwrap(), 1.0 / 192.0);
        assert_relative_eq!(e.gamma_by_quadrature(), 1.0 / 192.0, max_relative = 1e-10);
        let r = e.verify_assumptions();
        assert!(r.all_pass(), "integral_g={} integral_G={}", r.integral_g, r.integral_primitive);
        assert!(r.discontinuous);
        assert_eq!(e.max_abs_primitive(), 0.125);
    }

    #[test]
    fn scaling_is_quadratic_in_gamma() {
        let e = E::harmonic();
        let s = e.scaled(3.0);
        assert_relative_eq!(
            s.gamma_moment().unwrap(),
            9.0 * e.gamma_moment().unwrap()
        );
        assert_eq!(s.g(0.0), 3.0);
    }

    #[test]
    fn constant_tabulated_fails_assumption_one() {
        let e = E::tabulated(vec![0.0, 0.5, 1.0], vec![1.0, 1.0, 1.0]).unwrap();
        let r = e.verify_assumptions();
        assert!(!r.zero_mean_ok);
        assert_relative_eq!(r.integral_g, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn shifted_cosine_fails_with_measured_mean() {
        let n = 512;
        let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let values: Vec<f64> = times
            .iter()
            .map(|t| (2.0 * std::f64::consts::PI * t).cos() + 0.5)
            .collect();
        let e = E::tabulated(times, values).unwrap();
        let r = e.verify_assumptions();
        assert!(!r.zero_mean_ok);
        assert_relative_eq!(r.integral_g, 0.5, max_relative = 1e-4);
    }

    #[test]
    fn tabulated_triangle_matches_closed_square() {
        // sample the square wave densely; moments should approach closed form
        let sq = E::square_wave();
        let n = 4096;
        let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let values: Vec<f64> = times.iter().map(|&t| sq.g(t.min(1.0 - 1e-12))).collect();
        let e = E::tabulated(times, values).unwrap();
        assert_relative_eq!(e.gamma_moment().unwrap(), 1.0 / 192.0, max_relative = 1e-3);
    }

    #[test]
    fn tabulated_rejects_bad_input() {
        assert!(E::tabulated(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(E::tabulated(vec![0.1, 1.0], vec![0.0, 0.0]).is_err());
        assert!(E::tabulated(vec![0.0, 0.5, 0.4, 1.0], vec![0.0; 4]).is_err());
        // does not close periodically
        assert!(E::tabulated(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.5]).is_err());
    }

    #[test]
    fn csv_parsing() {
        let e = E::tabulated_from_csv("t,g\n0,0\n0.25,1\n0.5,0\n0.75,-1\n1,0\n").unwrap();
        assert_eq!(e.kind_name(), "tabulated");
        assert_eq!(e.g(0.25), 1.0);
        assert!(E::tabulated_from_csv("nonsense\nmore,nonsense\n").is_err());
    }

    #[test]
    fn gamma_fails_for_zero_waveform() {
        let e = E::tabulated(vec![0.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert!(e.gamma_moment().is_err());
    }

    #[test]
    fn primitive_is_periodic_between_periods() {
        let e = E::square_wave();
        for t in [0.1, 0.4, 0.9] {
            assert_relative_eq!(e.primitive(t + 1.0), e.primitive(t), epsilon = 1e-15);
        }
    }
}
