//! Dense 2x2 real and complex matrices.
//!
//! Everything downstream (flows, monodromy spectra, averaged generators)
//! lives in two dimensions per mode, so a hand-rolled type with closed-form
//! eigenvalues and exponential beats pulling in a linear-algebra crate.

use std::ops::{Add, Index, Mul, Neg, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Real 2x2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T> {
    e: [[T; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub fn new(a11: T, a12: T, a21: T, a22: T) -> Self {
        Self {
            e: [[a11, a12], [a21, a22]],
        }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero(), T::zero())
    }

    pub fn identity() -> Self {
        Self::new(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn trace(&self) -> T {
        self.e[0][0] + self.e[1][1]
    }

    pub fn det(&self) -> T {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.e[0][0], self.e[1][0], self.e[0][1], self.e[1][1])
    }

    pub fn scale(&self, c: T) -> Self {
        Self::new(
            c * self.e[0][0],
            c * self.e[0][1],
            c * self.e[1][0],
            c * self.e[1][1],
        )
    }

    pub fn frobenius_norm(&self) -> T {
        let mut s = T::zero();
        for r in 0..2 {
            for c in 0..2 {
                s += self.e[r][c] * self.e[r][c];
            }
        }
        s.sqrt()
    }

    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for r in 0..2 {
            for c in 0..2 {
                m = m.max(self.e[r][c].abs());
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (*self - *other).max_abs()
    }

    pub fn is_finite(&self) -> bool {
        self.e.iter().flatten().all(|v| v.is_finite())
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d == T::zero() || !d.is_finite() {
            return Err(Error::SingularMatrix(format!("determinant {d}")));
        }
        Ok(Self::new(
            self.e[1][1] / d,
            -self.e[0][1] / d,
            -self.e[1][0] / d,
            self.e[0][0] / d,
        ))
    }

    /// Commutator `[a, b] = ab - ba`.
    pub fn commutator(a: &Self, b: &Self) -> Self {
        *a * *b - *b * *a
    }

    /// Eigenvalues via the characteristic polynomial, complex pair when the
    /// discriminant is negative. Ordered by real part, then imaginary part.
    pub fn eigenvalues(&self) -> [Complex<T>; 2] {
        let half = T::of(0.5);
        let mean = half * self.trace();
        // (tr/2)^2 - det, written to avoid cancellation in tr^2 - 4 det
        let disc = half * (self.e[0][0] - self.e[1][1]) * half * (self.e[0][0] - self.e[1][1])
            + self.e[0][1] * self.e[1][0];
        let pair = if disc >= T::zero() {
            let r = disc.sqrt();
            [
                Complex::new(mean - r, T::zero()),
                Complex::new(mean + r, T::zero()),
            ]
        } else {
            let w = (-disc).sqrt();
            [Complex::new(mean, -w), Complex::new(mean, w)]
        };
        sort_pair(pair)
    }

    pub fn spectral_radius(&self) -> T {
        let [l1, l2] = self.eigenvalues();
        l1.norm().max(l2.norm())
    }

    /// Matrix exponential, closed form.
    ///
    /// With `m = tr/2` and `d = (tr/2)^2 - det`,
    /// `exp(A) = e^m (ch(d) I + sh(d) (A - m I))` where `ch`/`sh` are the
    /// even/odd entire functions `cosh(sqrt d)` and `sinh(sqrt d)/sqrt d`,
    /// evaluated by series near `d = 0`.
    pub fn exp(&self) -> Self {
        let half = T::of(0.5);
        let m = half * self.trace();
        let b = *self - Self::identity().scale(m);
        // d = m^2 - det = -det(b)
        let d = -b.det();
        let (ch, sh) = cosh_sinhc(d);
        (Self::identity().scale(ch) + b.scale(sh)).scale(m.exp())
    }

    pub fn to_complex(&self) -> CMat2<T> {
        CMat2 {
            e: [
                [
                    Complex::new(self.e[0][0], T::zero()),
                    Complex::new(self.e[0][1], T::zero()),
                ],
                [
                    Complex::new(self.e[1][0], T::zero()),
                    Complex::new(self.e[1][1], T::zero()),
                ],
            ],
        }
    }
}

/// `(cosh(sqrt d), sinh(sqrt d)/sqrt d)` for real `d` of either sign.
fn cosh_sinhc<T: Real>(d: T) -> (T, T) {
    if d.abs() < T::of(1e-4) {
        // cosh = 1 + d/2 + d^2/24, sinhc = 1 + d/6 + d^2/120
        let c = T::one() + d * T::of(0.5) + d * d * T::of(1.0 / 24.0);
        let s = T::one() + d * T::of(1.0 / 6.0) + d * d * T::of(1.0 / 120.0);
        (c, s)
    } else if d > T::zero() {
        let r = d.sqrt();
        (r.cosh(), r.sinh() / r)
    } else {
        let w = (-d).sqrt();
        (w.cos(), w.sin() / w)
    }
}

fn sort_pair<T: Real>(mut p: [Complex<T>; 2]) -> [Complex<T>; 2] {
    let key = |z: &Complex<T>| (z.re, z.im);
    if key(&p[1]) < key(&p[0]) {
        p.swap(0, 1);
    }
    p
}

impl<T: Real> Add for Mat2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.e[0][0] + rhs.e[0][0],
            self.e[0][1] + rhs.e[0][1],
            self.e[1][0] + rhs.e[1][0],
            self.e[1][1] + rhs.e[1][1],
        )
    }
}

impl<T: Real> Sub for Mat2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(
            self.e[0][0] - rhs.e[0][0],
            self.e[0][1] - rhs.e[0][1],
            self.e[1][0] - rhs.e[1][0],
            self.e[1][1] - rhs.e[1][1],
        )
    }
}

impl<T: Real> Neg for Mat2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul for Mat2<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(
            self.e[0][0] * rhs.e[0][0] + self.e[0][1] * rhs.e[1][0],
            self.e[0][0] * rhs.e[0][1] + self.e[0][1] * rhs.e[1][1],
            self.e[1][0] * rhs.e[0][0] + self.e[1][1] * rhs.e[1][0],
            self.e[1][0] * rhs.e[0][1] + self.e[1][1] * rhs.e[1][1],
        )
    }
}

/// Matrix-vector product on `(z1, z2)`.
impl<T: Real> Mul<[T; 2]> for Mat2<T> {
    type Output = [T; 2];
    fn mul(self, v: [T; 2]) -> [T; 2] {
        [
            self.e[0][0] * v[0] + self.e[0][1] * v[1],
            self.e[1][0] * v[0] + self.e[1][1] * v[1],
        ]
    }
}

impl<T> Index<(usize, usize)> for Mat2<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.e[r][c]
    }
}

/// Complex 2x2 matrix; only what the principal logarithm needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CMat2<T> {
    e: [[Complex<T>; 2]; 2],
}

impl<T: Real> CMat2<T> {
    pub fn new(e: [[Complex<T>; 2]; 2]) -> Self {
        Self { e }
    }

    pub fn zero() -> Self {
        Self {
            e: [[Complex::new(T::zero(), T::zero()); 2]; 2],
        }
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        m.e[0][0] = Complex::new(T::one(), T::zero());
        m.e[1][1] = Complex::new(T::one(), T::zero());
        m
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        let mut out = *self;
        for r in 0..2 {
            for col in 0..2 {
                out.e[r][col] *= c;
            }
        }
        out
    }

    pub fn trace(&self) -> Complex<T> {
        self.e[0][0] + self.e[1][1]
    }

    pub fn det(&self) -> Complex<T> {
        self.e[0][0] * self.e[1][1] - self.e[0][1] * self.e[1][0]
    }

    pub fn eigenvalues(&self) -> [Complex<T>; 2] {
        let half = Complex::new(T::of(0.5), T::zero());
        let mean = self.trace() * half;
        let disc = mean * mean - self.det();
        let r = disc.sqrt();
        sort_pair([mean - r, mean + r])
    }

    pub fn frobenius_norm(&self) -> T {
        let mut s = T::zero();
        for r in 0..2 {
            for c in 0..2 {
                s += self.e[r][c].norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn max_imag_abs(&self) -> T {
        let mut m = T::zero();
        for r in 0..2 {
            for c in 0..2 {
                m = m.max(self.e[r][c].im.abs());
            }
        }
        m
    }

    pub fn real_part(&self) -> Mat2<T> {
        Mat2::new(
            self.e[0][0].re,
            self.e[0][1].re,
            self.e[1][0].re,
            self.e[1][1].re,
        )
    }
}

impl<T: Real> Add for CMat2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.e[r][c] += rhs.e[r][c];
            }
        }
        out
    }
}

impl<T: Real> Sub for CMat2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for r in 0..2 {
            for c in 0..2 {
                out.e[r][c] -= rhs.e[r][c];
            }
        }
        out
    }
}

impl<T> Index<(usize, usize)> for CMat2<T> {
    type Output = Complex<T>;
    fn index(&self, (r, c): (usize, usize)) -> &Complex<T> {
        &self.e[r][c]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = Mat2<f64>;

    #[test]
    fn algebra_basics() {
        let a = M::new(1.0, 2.0, 3.0, 4.0);
        assert_eq!(a.trace(), 5.0);
        assert_eq!(a.det(), -2.0);
        let inv = a.inverse().unwrap();
        assert!((a * inv).max_abs_diff(&M::identity()) < 1e-14);
    }

    #[test]
    fn eigenvalues_real_and_complex() {
        let a = M::new(2.0, 0.0, 0.0, -3.0);
        let [l1, l2] = a.eigenvalues();
        assert_eq!((l1.re, l2.re), (-3.0, 2.0));

        let rot = M::new(0.0, 1.0, -1.0, 0.0);
        let [l1, l2] = rot.eigenvalues();
        assert!(l1.re.abs() < 1e-15 && (l1.im + 1.0).abs() < 1e-15);
        assert!((l2.im - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exp_matches_rotation() {
        // exp(t J) for J = [[0,1],[-1,0]] is the rotation by t
        let t = 0.7;
        let j = M::new(0.0, t, -t, 0.0);
        let e = j.exp();
        let expect = M::new(t.cos(), t.sin(), -t.sin(), t.cos());
        assert!(e.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn exp_of_nilpotent() {
        let n = M::new(0.0, 0.0, 3.0, 0.0);
        let e = n.exp();
        assert!(e.max_abs_diff(&M::new(1.0, 0.0, 3.0, 1.0)) < 1e-14);
    }

    #[test]
    fn exp_defective() {
        // [[1,1],[0,1]] scaled: repeated eigenvalue, nontrivial Jordan block
        let a = M::new(0.5, 1.0, 0.0, 0.5);
        let e = a.exp();
        let s = 0.5f64.exp();
        assert!(e.max_abs_diff(&M::new(s, s, 0.0, s)) < 1e-14);
    }

    #[test]
    fn complex_eigenvalues_of_cmat() {
        let rot = M::new(0.0, 1.0, -1.0, 0.0);
        let [l1, l2] = rot.to_complex().eigenvalues();
        assert!((l1.im + 1.0).abs() < 1e-15 && (l2.im - 1.0).abs() < 1e-15);
    }
}
