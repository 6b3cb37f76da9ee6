//! Composite Simpson quadrature and a least-squares line fit.
//!
//! Simpson on a uniform grid is accurate enough for every tolerance in this
//! crate and keeps results bit-reproducible across platforms.

use crate::mat2::Mat2;
use crate::scalar::Real;

/// Integral of samples on a uniform grid with an even number of panels.
/// `values.len()` must be odd and at least 3; `h` is the panel width.
pub(crate) fn simpson<T: Real>(values: &[T], h: T) -> T {
    assert!(values.len() >= 3 && values.len() % 2 == 1, "need even panel count");
    let mut s = values[0] + values[values.len() - 1];
    for (i, v) in values.iter().enumerate().skip(1).take(values.len() - 2) {
        let w = if i % 2 == 1 { T::of(4.0) } else { T::of(2.0) };
        s += w * *v;
    }
    s * h / T::of(3.0)
}

/// Simpson over `[lo, hi]` with `panels` panels (rounded up to even).
pub(crate) fn simpson_fn<T: Real>(f: impl Fn(T) -> T, lo: T, hi: T, panels: usize) -> T {
    let panels = panels.max(2) + panels % 2;
    let h = (hi - lo) / T::of_usize(panels);
    let values: Vec<T> = (0..=panels).map(|i| f(lo + h * T::of_usize(i))).collect();
    simpson(&values, h)
}

/// Simpson over one period split at the integrand's breakpoints, so that
/// piecewise-smooth functions are integrated segment by segment at full
/// order. `breakpoints` are interior points of `(lo, hi)`, sorted.
///
/// Jump discontinuities are assumed right-continuous: at an interior
/// breakpoint the right-edge node of the segment to its left is evaluated a
/// hair inside the segment, which recovers the left limit for piecewise
/// constants and is far below quadrature error for smooth integrands.
pub(crate) fn simpson_segmented<T: Real>(
    f: impl Fn(T) -> T,
    lo: T,
    hi: T,
    breakpoints: &[T],
    total_panels: usize,
) -> T {
    let mut edges = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(lo);
    edges.extend(breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
    edges.push(hi);
    let span = hi - lo;
    let mut acc = T::zero();
    for (i, w) in edges.windows(2).enumerate() {
        let frac = ((w[1] - w[0]) / span).to_f64().unwrap_or(0.0);
        let panels = ((total_panels as f64 * frac).ceil() as usize).max(2);
        let interior_right = i + 2 < edges.len();
        let cap = if interior_right {
            w[1] - (w[1] - w[0]) * T::of(1e-12)
        } else {
            w[1]
        };
        acc += simpson_fn(|t| f(t.min(cap)), w[0], w[1], panels);
    }
    acc
}

/// Matrix-valued Simpson average of `f` over `[0, 1]`.
pub(crate) fn simpson_mat2<T: Real>(
    f: impl Fn(T) -> Mat2<T>,
    panels: usize,
    breakpoints: &[T],
) -> Mat2<T> {
    let entry = |r: usize, c: usize| {
        simpson_segmented(|t| f(t)[(r, c)], T::zero(), T::one(), breakpoints, panels)
    };
    Mat2::new(entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1))
}

/// Cumulative Simpson antiderivative of matrix samples on a uniform grid.
///
/// Even nodes use the classic pairwise rule; odd nodes use the half-pair
/// rule `h/12 (5 f_{i-1} + 8 f_i - f_{i+1})`, exact for quadratics.
pub(crate) fn cumulative_simpson_mat2<T: Real>(samples: &[Mat2<T>], h: T) -> Vec<Mat2<T>> {
    let n = samples.len();
    assert!(n >= 3 && n % 2 == 1, "need even panel count");
    let mut out = vec![Mat2::zero(); n];
    let third = h / T::of(3.0);
    let twelfth = h / T::of(12.0);
    for i in 1..n {
        if i % 2 == 0 {
            out[i] = out[i - 2]
                + (samples[i - 2] + samples[i - 1].scale(T::of(4.0)) + samples[i]).scale(third);
        } else {
            out[i] = out[i - 1]
                + (samples[i - 1].scale(T::of(5.0)) + samples[i].scale(T::of(8.0))
                    - samples[i + 1])
                .scale(twelfth);
        }
    }
    out
}

/// Least-squares line through `(xs, ys)`: returns `(slope, intercept, r2)`.
/// `r2` is defined as 1 when the data has zero variance.
pub(crate) fn fit_line<T: Real>(xs: &[T], ys: &[T]) -> (T, T, T) {
    assert_eq!(xs.len(), ys.len());
    let n = T::of_usize(xs.len());
    let mx = xs.iter().copied().sum::<T>() / n;
    let my = ys.iter().copied().sum::<T>() / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    let mut syy = T::zero();
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == T::zero() {
        T::one()
    } else {
        let mut ss_res = T::zero();
        for (&x, &y) in xs.iter().zip(ys) {
            let e = y - (slope * x + intercept);
            ss_res += e * e;
        }
        T::one() - ss_res / syy
    };
    (slope, intercept, r2)
}
