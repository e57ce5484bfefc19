//! Two-photon quadrature algebra.
//!
//! Sideband fields at one offset frequency Ω are pairs of complex
//! amplitudes in the (cosine, sine) quadrature basis. Linear optics and
//! radiation-pressure coupling act on them as 2×2 complex matrices.

use core::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

pub type C64 = Complex64;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// True when `d` is finite and not zero or subnormal.
pub(crate) fn is_invertible(d: C64) -> bool {
    d.re.abs().max(d.im.abs()).is_normal() && d.is_finite()
}

/// A quadrature pair `(c, s)` at a single sideband frequency.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadVector {
    pub c: C64,
    pub s: C64,
}

/// Optical response to a normalised displacement `x / x_SQL`.
///
/// Structurally identical to a field quadrature pair.
pub type ResponseVector = QuadVector;

impl QuadVector {
    pub const ZERO: Self = Self { c: ZERO, s: ZERO };

    pub const fn new(c: C64, s: C64) -> Self {
        Self { c, s }
    }

    pub fn real(c: f64, s: f64) -> Self {
        Self::new(C64::new(c, 0.0), C64::new(s, 0.0))
    }

    /// Pure phase-quadrature vector `(0, s)`.
    pub fn sine(s: C64) -> Self {
        Self::new(ZERO, s)
    }

    /// Real projection `hᵀ · v` onto a real readout vector.
    pub fn project(&self, h: &QuadVector) -> C64 {
        h.c * self.c + h.s * self.s
    }

    pub fn norm_sqr(&self) -> f64 {
        self.c.norm_sqr() + self.s.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.c.is_finite() && self.s.is_finite()
    }
}

impl Add for QuadVector {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.c + rhs.c, self.s + rhs.s)
    }
}

impl AddAssign for QuadVector {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for QuadVector {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.c - rhs.c, self.s - rhs.s)
    }
}

impl Mul<C64> for QuadVector {
    type Output = Self;
    fn mul(self, k: C64) -> Self {
        Self::new(self.c * k, self.s * k)
    }
}

impl Mul<f64> for QuadVector {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.c * k, self.s * k)
    }
}

/// 2×2 complex transfer matrix acting on quadrature pairs.
///
/// Row/column order is (cosine, sine): `m[0][1]` maps the sine input
/// onto the cosine output.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QuadTransfer {
    pub m: [[C64; 2]; 2],
}

impl QuadTransfer {
    pub const ZERO: Self = Self {
        m: [[ZERO, ZERO], [ZERO, ZERO]],
    };
    pub const IDENTITY: Self = Self {
        m: [[ONE, ZERO], [ZERO, ONE]],
    };

    pub const fn new(cc: C64, cs: C64, sc: C64, ss: C64) -> Self {
        Self {
            m: [[cc, cs], [sc, ss]],
        }
    }

    pub fn real(cc: f64, cs: f64, sc: f64, ss: f64) -> Self {
        Self::new(cc.into(), cs.into(), sc.into(), ss.into())
    }

    /// `k · I`.
    pub fn scalar(k: C64) -> Self {
        Self::new(k, ZERO, ZERO, k)
    }

    /// The quadrature symplectic form `[[0, 1], [-1, 0]]`.
    pub fn symplectic_form() -> Self {
        Self::real(0.0, 1.0, -1.0, 0.0)
    }

    /// Strictly lower-triangular `[[0, 0], [1, 0]]`: amplitude-to-phase
    /// coupling used by radiation-pressure terms.
    pub fn lower_unit() -> Self {
        Self::real(0.0, 0.0, 1.0, 0.0)
    }

    pub fn det(&self) -> C64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn trace(&self) -> C64 {
        self.m[0][0] + self.m[1][1]
    }

    /// Inverse, or `None` when the determinant is not a normal float.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if !is_invertible(d) {
            return None;
        }
        let inv = d.inv();
        Some(Self::new(
            self.m[1][1] * inv,
            -self.m[0][1] * inv,
            -self.m[1][0] * inv,
            self.m[0][0] * inv,
        ))
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::new(
            self.m[0][0].conj(),
            self.m[1][0].conj(),
            self.m[0][1].conj(),
            self.m[1][1].conj(),
        )
    }

    pub fn apply(&self, v: &QuadVector) -> QuadVector {
        QuadVector::new(
            self.m[0][0] * v.c + self.m[0][1] * v.s,
            self.m[1][0] * v.c + self.m[1][1] * v.s,
        )
    }

    /// `hᵀ · M · M† · h` for a real readout vector `h`.
    pub fn projected_power(&self, h: &QuadVector) -> f64 {
        // hᵀ M is a row vector; its squared norm is the quadratic form.
        let r0 = h.c * self.m[0][0] + h.s * self.m[1][0];
        let r1 = h.c * self.m[0][1] + h.s * self.m[1][1];
        r0.norm_sqr() + r1.norm_sqr()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.m
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, z| acc.max(z.norm()))
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|z| z.is_finite())
    }

    /// Eigenvalues of a Hermitian matrix, ascending. Only the upper
    /// off-diagonal element and the real parts of the diagonal are read.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let b = self.m[0][1].norm();
        let mean = 0.5 * (a + d);
        let half = 0.5 * (a - d);
        let radius = libm::hypot(half, b);
        [mean - radius, mean + radius]
    }
}

impl Mul for QuadTransfer {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Mul<QuadVector> for QuadTransfer {
    type Output = QuadVector;
    fn mul(self, v: QuadVector) -> QuadVector {
        self.apply(&v)
    }
}

impl Mul<C64> for QuadTransfer {
    type Output = Self;
    fn mul(self, k: C64) -> Self {
        Self::new(
            self.m[0][0] * k,
            self.m[0][1] * k,
            self.m[1][0] * k,
            self.m[1][1] * k,
        )
    }
}

impl Mul<f64> for QuadTransfer {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self * C64::new(k, 0.0)
    }
}

impl Add for QuadTransfer {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.m[0][0] + rhs.m[0][0],
            self.m[0][1] + rhs.m[0][1],
            self.m[1][0] + rhs.m[1][0],
            self.m[1][1] + rhs.m[1][1],
        )
    }
}

impl AddAssign for QuadTransfer {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for QuadTransfer {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Neg for QuadTransfer {
    type Output = Self;
    fn neg(self) -> Self {
        self * -1.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn inverse_round_trip() {
        let m = QuadTransfer::new(c(1.0, 2.0), c(-0.5, 0.1), c(0.3, 0.0), c(2.0, -1.0));
        let p = m * m.inverse().unwrap();
        assert!((p - QuadTransfer::IDENTITY).max_abs() < 1e-14);
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = QuadTransfer::real(1.0, 2.0, 2.0, 4.0);
        assert!(m.inverse().is_none());
        assert!(QuadTransfer::lower_unit().inverse().is_none());
    }

    #[test]
    fn projected_power_matches_explicit_product() {
        let m = QuadTransfer::new(c(1.0, 2.0), c(-0.5, 0.1), c(0.3, 0.7), c(2.0, -1.0));
        let h = QuadVector::real(0.6, 0.8);
        let mm = m * m.dagger();
        let explicit = h.c * (mm.m[0][0] * h.c + mm.m[0][1] * h.s)
            + h.s * (mm.m[1][0] * h.c + mm.m[1][1] * h.s);
        assert!((explicit.re - m.projected_power(&h)).abs() < 1e-13);
        assert!(explicit.im.abs() < 1e-13);
    }

    #[test]
    fn hermitian_eigenvalues_of_diagonal() {
        let m = QuadTransfer::real(3.0, 0.0, 0.0, -1.0);
        assert_eq!(m.hermitian_eigenvalues(), [-1.0, 3.0]);
        let m = QuadTransfer::new(c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(2.0, 0.0));
        let [lo, hi] = m.hermitian_eigenvalues();
        assert!((lo - 1.0).abs() < 1e-15 && (hi - 3.0).abs() < 1e-15);
    }
}
