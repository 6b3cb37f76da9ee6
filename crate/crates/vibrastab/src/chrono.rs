//! Chronological calculus for 2x2 linear time-variant systems: left/right
//! time-ordered exponentials (fundamental matrices), Volterra truncations,
//! the variational factorization of a perturbed flow, and the principal
//! matrix logarithm.
//!
//! All flows use classical fixed-step RK4. A fixed step keeps CSV outputs
//! bit-reproducible across runs and platforms; for piecewise-continuous
//! coefficients the step count is rounded so that step endpoints land on the
//! discontinuity set, and end-of-step evaluations are taken as left limits.
//! Every flow records the Liouville (Abel) identity defect
//! `det P - exp(∫ tr A)` as an integration-quality certificate.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::mat2::{CMat2, Mat2};
use crate::quad::{cumulative_simpson_mat2, simpson_mat2};
use crate::scalar::Real;

/// Default RK4 steps per unit time.
pub const DEFAULT_STEPS: usize = 4096;

/// Relative Liouville defect beyond which a flow is rejected.
pub const LIOUVILLE_FAIL: f64 = 1e-6;

/// Smoothness declaration for a time-dependent coefficient matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Continuous,
    /// Jumps or kinks confined to the uniform subdivision of the period into
    /// `segments` equal parts.
    PiecewiseContinuous { segments: usize },
}

/// A deterministic, side-effect-free map `t -> A(t)`, tagged with its
/// smoothness and (optionally) a period.
pub struct TimeMatrixFn<'a, T> {
    f: Box<dyn Fn(T) -> Mat2<T> + Send + Sync + 'a>,
    smoothness: Smoothness,
    period: Option<T>,
}

impl<'a, T: Real> TimeMatrixFn<'a, T> {
    pub fn continuous(f: impl Fn(T) -> Mat2<T> + Send + Sync + 'a) -> Self {
        Self {
            f: Box::new(f),
            smoothness: Smoothness::Continuous,
            period: None,
        }
    }

    pub fn piecewise(f: impl Fn(T) -> Mat2<T> + Send + Sync + 'a, segments: usize) -> Self {
        Self {
            f: Box::new(f),
            smoothness: Smoothness::PiecewiseContinuous {
                segments: segments.max(1),
            },
            period: None,
        }
    }

    pub fn with_period(mut self, period: T) -> Self {
        self.period = Some(period);
        self
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn period(&self) -> Option<T> {
        self.period
    }

    pub fn eval(&self, t: T) -> Mat2<T> {
        (self.f)(t)
    }

    /// Interior breakpoints within `[0, 1]`, empty for continuous fields.
    pub fn breakpoints_in_period(&self) -> Vec<T> {
        match self.smoothness {
            Smoothness::Continuous => Vec::new(),
            Smoothness::PiecewiseContinuous { segments } => (1..segments)
                .map(|i| T::of_usize(i) / T::of_usize(segments))
                .collect(),
        }
    }

    /// Round `steps` up so that step endpoints hit every breakpoint of a
    /// piecewise field over `[0, t1]`, when the breakpoints sit on a uniform
    /// subdivision commensurate with `t1`.
    fn aligned_steps(&self, t1: T, steps: usize) -> usize {
        match self.smoothness {
            Smoothness::Continuous => steps,
            Smoothness::PiecewiseContinuous { segments } => {
                let segs = t1 * T::of_usize(segments);
                let rounded = segs.round();
                if (segs - rounded).abs() > T::of(1e-12) || rounded < T::one() {
                    return steps; // breakpoints incommensurate with [0, t1]
                }
                let segs = rounded.to_f64().unwrap_or(1.0) as usize;
                steps.div_ceil(segs) * segs
            }
        }
    }

    /// Evaluate at the end of a step: the left limit for piecewise fields
    /// (a tiny backward shift, exact for piecewise-constant coefficients and
    /// far below integration error for smooth ones).
    fn eval_step_end(&self, t: T, h: T) -> Mat2<T> {
        match self.smoothness {
            Smoothness::Continuous => self.eval(t),
            Smoothness::PiecewiseContinuous { .. } => self.eval(t - h * T::of(1e-7)),
        }
    }
}

/// Which side the coefficient multiplies the fundamental matrix on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    /// `dP/dt = A(t) P` (left chronological exponential).
    Left,
    /// `dP/dt = P A(t)` (right chronological exponential).
    Right,
}

/// A computed fundamental matrix with integration metadata.
#[derive(Debug, Clone, Copy)]
pub struct Flow<T> {
    /// The terminal matrix `P^{t1}`.
    pub matrix: Mat2<T>,
    pub t1: T,
    pub steps: usize,
    /// Simpson value of `∫₀^{t1} tr A`, accumulated on the RK4 nodes.
    pub trace_integral: T,
    /// Relative defect of `det P = exp(∫ tr A)`.
    pub liouville_defect: T,
}

fn integrate<T: Real>(a: &TimeMatrixFn<'_, T>, t1: T, steps: usize, side: Side) -> Result<Flow<T>> {
    if t1 <= T::zero() || !t1.is_finite() {
        return Err(Error::InvalidParameter(format!("t1 = {t1} must be positive")));
    }
    if steps < 64 {
        return Err(Error::InvalidParameter(format!(
            "steps = {steps}, need at least 64"
        )));
    }
    let steps = a.aligned_steps(t1, steps);
    let h = t1 / T::of_usize(steps);
    let sixth = h / T::of(6.0);
    let two = T::of(2.0);
    let mut p = Mat2::identity();
    let mut trace = T::zero();
    let mut t = T::zero();
    for i in 0..steps {
        let a0 = a.eval(t);
        let am = a.eval(t + h * T::of(0.5));
        let a1 = a.eval_step_end(t + h, h);
        if !(a0.is_finite() && am.is_finite() && a1.is_finite()) {
            return Err(Error::IntegrationFailure(format!(
                "coefficient matrix not finite near t = {t}"
            )));
        }
        let apply = |m: &Mat2<T>, q: &Mat2<T>| match side {
            Side::Left => *m * *q,
            Side::Right => *q * *m,
        };
        let k1 = apply(&a0, &p);
        let k2 = apply(&am, &(p + k1.scale(h * T::of(0.5))));
        let k3 = apply(&am, &(p + k2.scale(h * T::of(0.5))));
        let k4 = apply(&a1, &(p + k3.scale(h)));
        p = p + (k1 + k2.scale(two) + k3.scale(two) + k4).scale(sixth);
        // Simpson panel on the same nodes
        trace += sixth * (a0.trace() + T::of(4.0) * am.trace() + a1.trace());
        t = h * T::of_usize(i + 1);
    }
    if !p.is_finite() {
        return Err(Error::IntegrationFailure("flow overflowed".into()));
    }
    let expected_det = trace.exp();
    let defect = ((p.det() - expected_det) / expected_det).abs();
    if defect > T::of(LIOUVILLE_FAIL) {
        return Err(Error::IntegrationFailure(format!(
            "Liouville defect {defect:e} at {steps} steps exceeds {LIOUVILLE_FAIL:e}; \
             increase the step count"
        )));
    }
    Ok(Flow {
        matrix: p,
        t1,
        steps,
        trace_integral: trace,
        liouville_defect: defect,
    })
}

/// Fundamental matrix of `dz/dt = A(t) z` over `[0, t1]`.
pub fn chron_exp_left<T: Real>(a: &TimeMatrixFn<'_, T>, t1: T, steps: usize) -> Result<Flow<T>> {
    integrate(a, t1, steps, Side::Left)
}

/// Solution of `dP/dt = P A(t)`, `P(0) = id`, over `[0, t1]`.
pub fn chron_exp_right<T: Real>(a: &TimeMatrixFn<'_, T>, t1: T, steps: usize) -> Result<Flow<T>> {
    integrate(a, t1, steps, Side::Right)
}

/// Volterra series for the left flow truncated after the iterated integral
/// of order `order`, by nested cumulative Simpson over `[0, t1]`.
///
/// Quadrature accuracy assumes a continuous coefficient; piecewise fields are
/// integrated with their pointwise samples.
pub fn volterra_truncation<T: Real>(
    a: &TimeMatrixFn<'_, T>,
    t1: T,
    order: usize,
    quad_points: usize,
) -> Result<Mat2<T>> {
    if !(1..=4).contains(&order) {
        return Err(Error::InvalidParameter(format!(
            "order = {order}, supported range is 1..=4"
        )));
    }
    if quad_points < 32 {
        return Err(Error::InvalidParameter(format!(
            "quad_points = {quad_points}, need at least 32"
        )));
    }
    let panels = quad_points + quad_points % 2;
    let h = t1 / T::of_usize(panels);
    let samples: Vec<Mat2<T>> = (0..=panels)
        .map(|i| a.eval(h * T::of_usize(i)))
        .collect();

    let mut total = vec![Mat2::identity(); panels + 1];
    let mut term = vec![Mat2::identity(); panels + 1];
    for _ in 0..order {
        let integrand: Vec<Mat2<T>> = samples
            .iter()
            .zip(&term)
            .map(|(a_i, t_i)| *a_i * *t_i)
            .collect();
        term = cumulative_simpson_mat2(&integrand, h);
        for (tot, t_i) in total.iter_mut().zip(&term) {
            *tot = *tot + *t_i;
        }
    }
    Ok(total[panels])
}

/// The reference flow conjugation `(P_B^t)^{-1} C(t) P_B^t`, the matrix
/// realization of the adjoint action of the flow of `B` on the
/// perturbation `C`.
///
/// This is the realization consistent with the variational factorization
/// checked by [`variational_check`]; note that for a nilpotent reference
/// direction the series of the adjoint action terminates, which is what
/// makes the per-mode generators of [`crate::stability`] closed-form.
pub fn conjugated_perturbation<T: Real>(
    b: &TimeMatrixFn<'_, T>,
    c: &TimeMatrixFn<'_, T>,
    t: T,
    steps: usize,
) -> Result<Mat2<T>> {
    let flow = chron_exp_left(b, t, steps)?;
    let p = flow.matrix;
    Ok(p.inverse()? * c.eval(t) * p)
}

/// Both sides of the variational factorization over one period.
#[derive(Debug, Clone, Copy)]
pub struct VariationalCheck<T> {
    /// Flow of `B + C`.
    pub lhs: Mat2<T>,
    /// Flow of `B` composed with the flow of the conjugated perturbation.
    pub rhs: Mat2<T>,
    /// Max-entry difference.
    pub gap: T,
}

/// Verify `P_{B+C} = P_B ∘ P_V` on `[0, 1]`, where
/// `V(t) = (P_B^t)^{-1} C(t) P_B^t`.
///
/// The right-hand side integrates the coupled system `(P_B, Y)` with
/// `dY/dt = V(t) Y`, so both factors share RK4 nodes.
pub fn variational_check<T: Real>(
    b: &TimeMatrixFn<'_, T>,
    c: &TimeMatrixFn<'_, T>,
    steps: usize,
) -> Result<VariationalCheck<T>> {
    if steps < 64 {
        return Err(Error::InvalidParameter(format!(
            "steps = {steps}, need at least 64"
        )));
    }
    let sum = TimeMatrixFn {
        f: Box::new(|t| b.eval(t) + c.eval(t)),
        smoothness: merge_smoothness(b.smoothness(), c.smoothness()),
        period: None,
    };
    let lhs = chron_exp_left(&sum, T::one(), steps)?.matrix;

    let steps = sum.aligned_steps(T::one(), steps);
    let h = T::one() / T::of_usize(steps);
    let half = T::of(0.5);
    let sixth = h / T::of(6.0);
    let two = T::of(2.0);
    let mut pb = Mat2::identity();
    let mut y = Mat2::identity();
    for i in 0..steps {
        let t = h * T::of_usize(i);
        let stage = |tau: T,
                     end: bool,
                     pb_s: &Mat2<T>,
                     y_s: &Mat2<T>|
         -> Result<(Mat2<T>, Mat2<T>)> {
            let (b_t, c_t) = if end {
                (b.eval_step_end(tau, h), c.eval_step_end(tau, h))
            } else {
                (b.eval(tau), c.eval(tau))
            };
            let v = pb_s.inverse()? * c_t * *pb_s;
            Ok((b_t * *pb_s, v * *y_s))
        };
        let (p1, y1) = stage(t, false, &pb, &y)?;
        let (p2, y2) = stage(
            t + h * half,
            false,
            &(pb + p1.scale(h * half)),
            &(y + y1.scale(h * half)),
        )?;
        let (p3, y3) = stage(
            t + h * half,
            false,
            &(pb + p2.scale(h * half)),
            &(y + y2.scale(h * half)),
        )?;
        let (p4, y4) = stage(t + h, true, &(pb + p3.scale(h)), &(y + y3.scale(h)))?;
        pb = pb + (p1 + p2.scale(two) + p3.scale(two) + p4).scale(sixth);
        y = y + (y1 + y2.scale(two) + y3.scale(two) + y4).scale(sixth);
    }
    let rhs = pb * y;
    Ok(VariationalCheck {
        lhs,
        rhs,
        gap: lhs.max_abs_diff(&rhs),
    })
}

fn merge_smoothness(a: Smoothness, b: Smoothness) -> Smoothness {
    use Smoothness::*;
    match (a, b) {
        (Continuous, Continuous) => Continuous,
        (PiecewiseContinuous { segments }, Continuous)
        | (Continuous, PiecewiseContinuous { segments }) => PiecewiseContinuous { segments },
        (PiecewiseContinuous { segments: s1 }, PiecewiseContinuous { segments: s2 }) => {
            PiecewiseContinuous { segments: lcm(s1, s2) }
        }
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

/// First term of the logarithm expansion of a periodic flow: the plain time
/// average `∫₀¹ A` by Simpson.
pub fn lambda1<T: Real>(a: &TimeMatrixFn<'_, T>, quad_points: usize) -> Result<Mat2<T>> {
    if quad_points < 32 {
        return Err(Error::InvalidParameter(format!(
            "quad_points = {quad_points}, need at least 32"
        )));
    }
    let breaks = a.breakpoints_in_period();
    Ok(simpson_mat2(|t| a.eval(t), quad_points, &breaks))
}

/// Principal matrix logarithm of an invertible real 2x2 matrix.
#[derive(Debug, Clone, Copy)]
pub struct PrincipalLog<T> {
    pub log: CMat2<T>,
    /// Set when an eigenvalue lies on the closed negative real axis, where
    /// the principal logarithm leaves the real matrices.
    pub on_negative_axis: bool,
}

impl<T: Real> PrincipalLog<T> {
    /// The log is a real matrix when no eigenvalue sits on the negative axis.
    pub fn real_part_checked(&self, tol: T) -> Option<Mat2<T>> {
        if self.on_negative_axis || self.log.max_imag_abs() > tol {
            None
        } else {
            Some(self.log.real_part())
        }
    }
}

/// Eigendecomposition-based principal logarithm. Distinct eigenvalues use
/// the Lagrange two-point form; a (numerically) repeated eigenvalue `λ` uses
/// the Jordan closed form `ln(λ) I + N / λ` with `N = P - λ I`.
pub fn matrix_log_principal<T: Real>(p: &Mat2<T>) -> Result<PrincipalLog<T>> {
    if !p.is_finite() {
        return Err(Error::InvalidParameter("matrix not finite".into()));
    }
    let [l1, l2] = p.eigenvalues();
    let tiny = T::of(1e-300);
    if l1.norm() < tiny || l2.norm() < tiny {
        return Err(Error::SingularMatrix(
            "zero eigenvalue has no logarithm".into(),
        ));
    }
    let on_negative_axis =
        (l1.im == T::zero() && l1.re < T::zero()) || (l2.im == T::zero() && l2.re < T::zero());

    let scale = l1.norm().max(l2.norm());
    let pc = p.to_complex();
    let log = if (l1 - l2).norm() > T::of(1e-9) * scale {
        // L = (ln l1 (P - l2 I) - ln l2 (P - l1 I)) / (l1 - l2)
        let i = CMat2::identity();
        let num = (pc - i.scale(l2)).scale(l1.ln()) - (pc - i.scale(l1)).scale(l2.ln());
        num.scale(Complex::new(T::one(), T::zero()) / (l1 - l2))
    } else {
        let mean = (l1 + l2) * Complex::new(T::of(0.5), T::zero());
        let i = CMat2::identity();
        let n = pc - i.scale(mean);
        i.scale(mean.ln()) + n.scale(mean.inv())
    };
    Ok(PrincipalLog {
        log,
        on_negative_axis,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    type M = Mat2<f64>;

    fn rotation_field<'a>() -> TimeMatrixFn<'a, f64> {
        TimeMatrixFn::continuous(|_| M::new(0.0, 1.0, -1.0, 0.0))
    }

    #[test]
    fn zero_field_gives_identity() {
        let a = TimeMatrixFn::continuous(|_t: f64| M::zero());
        let flow = chron_exp_left(&a, 1.0, 64).unwrap();
        assert!(flow.matrix.max_abs_diff(&M::identity()) < 1e-15);
        assert!(flow.liouville_defect < 1e-12);
    }

    #[test]
    fn constant_rotation_matches_closed_form() {
        // closed-form matrix exponential oracle
        let t1 = std::f64::consts::FRAC_PI_2;
        let flow = chron_exp_left(&rotation_field(), t1, 4096).unwrap();
        let expect = M::new(t1.cos(), t1.sin(), -t1.sin(), t1.cos());
        assert!(flow.matrix.max_abs_diff(&expect) < 1e-12);
        // same thing through the algebraic exponential
        let alg = M::new(0.0, t1, -t1, 0.0).exp();
        assert!(flow.matrix.max_abs_diff(&alg) < 1e-12);
    }

    #[test]
    fn right_flow_equals_left_for_commuting_families() {
        let a = TimeMatrixFn::continuous(|_t: f64| M::new(0.3, 0.1, -0.2, 0.4));
        let l = chron_exp_left(&a, 1.0, 2048).unwrap().matrix;
        let r = chron_exp_right(&a, 1.0, 2048).unwrap().matrix;
        assert!(l.max_abs_diff(&r) < 1e-12);

        // scalar(t) * fixed matrix commutes with itself across times
        let b = TimeMatrixFn::continuous(|t: f64| {
            M::new(0.0, 1.0, -1.0, 0.0).scale((2.0 * std::f64::consts::PI * t).cos())
        });
        let l = chron_exp_left(&b, 1.0, 2048).unwrap().matrix;
        let r = chron_exp_right(&b, 1.0, 2048).unwrap().matrix;
        assert!(l.max_abs_diff(&r) < 1e-11);
    }

    #[test]
    fn left_and_right_differ_for_noncommuting_fields() {
        // X on the first half, Y on the second; closed forms
        // left:  e^{Y/2} e^{X/2},  right:  e^{X/2} e^{Y/2}
        let a = TimeMatrixFn::piecewise(
            |t: f64| {
                if t < 0.5 {
                    M::new(0.0, 1.0, 0.0, 0.0)
                } else {
                    M::new(0.0, 0.0, 1.0, 0.0)
                }
            },
            2,
        );
        let l = chron_exp_left(&a, 1.0, 1024).unwrap().matrix;
        let r = chron_exp_right(&a, 1.0, 1024).unwrap().matrix;
        let expect_l = M::new(1.0, 0.5, 0.5, 1.25);
        let expect_r = M::new(1.25, 0.5, 0.5, 1.0);
        assert!(l.max_abs_diff(&expect_l) < 1e-10, "left flow {l:?}");
        assert!(r.max_abs_diff(&expect_r) < 1e-10, "right flow {r:?}");
        assert!(l.max_abs_diff(&r) > 1e-3);
    }

    #[test]
    fn flow_composes_over_subintervals() {
        let field = |t: f64| {
            M::new(
                (2.0 * std::f64::consts::PI * t).sin(),
                1.0,
                -0.5,
                (2.0 * std::f64::consts::PI * t).cos(),
            )
            .scale(0.3)
        };
        let a = TimeMatrixFn::continuous(field);
        let whole = chron_exp_left(&a, 1.0, 4096).unwrap().matrix;
        let first = chron_exp_left(&a, 0.5, 2048).unwrap().matrix;
        let shifted = TimeMatrixFn::continuous(move |t: f64| field(t + 0.5));
        let second = chron_exp_left(&shifted, 0.5, 2048).unwrap().matrix;
        assert!((second * first).max_abs_diff(&whole) < 1e-9);
    }

    #[test]
    fn rk4_defect_shrinks_at_fourth_order() {
        // non-periodic on [0, 1]: the per-step error coefficients do not
        // cancel over the interval, exposing the plain fourth-order rate
        let a = TimeMatrixFn::continuous(|t: f64| {
            M::new(0.0, 1.0 + t, -2.0 + 0.3 * t * t, 0.1 + 0.5 * t)
        });
        let coarse = chron_exp_left(&a, 1.0, 96).unwrap();
        let fine = chron_exp_left(&a, 1.0, 192).unwrap();
        let ratio = coarse.liouville_defect / fine.liouville_defect.max(1e-300);
        assert!(
            (10.0..26.0).contains(&ratio),
            "expected ~16x defect reduction, got {ratio} ({:e} -> {:e})",
            coarse.liouville_defect,
            fine.liouville_defect
        );
    }

    #[test]
    fn volterra_identity_and_taylor() {
        let zero = TimeMatrixFn::continuous(|_t: f64| M::zero());
        let v = volterra_truncation(&zero, 1.0, 1, 64).unwrap();
        assert!(v.max_abs_diff(&M::identity()) < 1e-15);

        // truncated-exponential oracle for constant J, t1 = 0.1
        let j = M::new(0.0, 1.0, -1.0, 0.0);
        let a = TimeMatrixFn::continuous(move |_t: f64| j);
        let v4 = volterra_truncation(&a, 0.1, 4, 64).unwrap();
        let mut taylor = M::identity();
        let mut pow = M::identity();
        let mut fact = 1.0;
        for m in 1..=4 {
            pow = pow * j.scale(0.1);
            fact *= m as f64;
            taylor = taylor + pow.scale(1.0 / fact);
        }
        assert!(v4.max_abs_diff(&taylor) < 1e-9, "diff {}", v4.max_abs_diff(&taylor));
    }

    #[test]
    fn volterra_validates_input() {
        let a = TimeMatrixFn::continuous(|_t: f64| M::identity());
        assert!(volterra_truncation(&a, 1.0, 0, 64).is_err());
        assert!(volterra_truncation(&a, 1.0, 5, 64).is_err());
        assert!(volterra_truncation(&a, 1.0, 2, 16).is_err());
    }

    #[test]
    fn conjugation_by_zero_reference_is_identity() {
        let b = TimeMatrixFn::continuous(|_t: f64| M::zero());
        let c = TimeMatrixFn::continuous(|t: f64| M::new(t, 1.0, -1.0, -t));
        let d = conjugated_perturbation(&b, &c, 0.7, 512).unwrap();
        assert!(d.max_abs_diff(&c.eval(0.7)) < 1e-12);
    }

    #[test]
    fn variational_check_trivial_cases() {
        let zero = TimeMatrixFn::continuous(|_t: f64| M::zero());
        let c = TimeMatrixFn::continuous(|t: f64| {
            M::new(0.1, (2.0 * std::f64::consts::PI * t).cos(), -0.3, -0.1)
        });
        let chk = variational_check(&zero, &c, 1024).unwrap();
        assert!(chk.gap < 1e-12, "gap {}", chk.gap);
        let chk = variational_check(&c, &zero, 1024).unwrap();
        assert!(chk.gap < 1e-12, "gap {}", chk.gap);
    }

    #[test]
    fn log_of_identity_and_round_trip() {
        let log = matrix_log_principal(&M::identity()).unwrap();
        assert!(log.log.frobenius_norm() < 1e-15);
        assert!(!log.on_negative_axis);

        // exp-then-log round trip oracle
        let m = M::new(0.0, 0.3, -0.3, 0.0);
        let log = matrix_log_principal(&m.exp()).unwrap();
        let back = log.real_part_checked(1e-12).unwrap();
        assert!(back.max_abs_diff(&m) < 1e-10);
    }

    #[test]
    fn log_of_scalar_matrix() {
        let e = std::f64::consts::E;
        let log = matrix_log_principal(&M::new(e, 0.0, 0.0, e)).unwrap();
        let real = log.real_part_checked(1e-12).unwrap();
        assert!(real.max_abs_diff(&M::identity()) < 1e-12);
    }

    #[test]
    fn log_flags_negative_axis() {
        let log = matrix_log_principal(&M::new(-2.0, 0.0, 0.0, 0.5)).unwrap();
        assert!(log.on_negative_axis);
        assert!(log.real_part_checked(1e-12).is_none());
        assert_relative_eq!(log.log[(0, 0)].im, std::f64::consts::PI);

        assert!(matrix_log_principal(&M::new(1.0, 0.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn log_defective_jordan_block() {
        // P = [[1, 1], [0, 1]]: log = [[0, 1], [0, 0]]
        let log = matrix_log_principal(&M::new(1.0, 1.0, 0.0, 1.0)).unwrap();
        let real = log.real_part_checked(1e-12).unwrap();
        assert!(real.max_abs_diff(&M::new(0.0, 1.0, 0.0, 0.0)) < 1e-12);
    }

    #[test]
    fn rejects_too_few_steps() {
        assert!(chron_exp_left(&rotation_field(), 1.0, 32).is_err());
        assert!(chron_exp_left(&rotation_field(), -1.0, 128).is_err());
    }
}
