use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

type C = Complex64;

const ZERO: C = C::new(0.0, 0.0);
const ONE: C = C::new(1.0, 0.0);

/// A 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m: [[C; 2]; 2],
}

impl TransferMatrix {
    pub const fn new(m11: C, m12: C, m21: C, m22: C) -> Self {
        Self {
            m: [[m11, m12], [m21, m22]],
        }
    }

    pub fn real(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        Self::new(C::from(m11), C::from(m12), C::from(m21), C::from(m22))
    }

    pub const fn identity() -> Self {
        Self::new(ONE, ZERO, ZERO, ONE)
    }

    pub const fn zero() -> Self {
        Self::new(ZERO, ZERO, ZERO, ZERO)
    }

    /// The rotation `[[0, -1], [1, 0]]`.
    pub const fn e() -> Self {
        Self::new(ZERO, C::new(-1.0, 0.0), ONE, ZERO)
    }

    pub fn det(&self) -> C {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    pub fn tr(&self) -> C {
        self.m[0][0] + self.m[1][1]
    }

    pub fn discr(&self) -> C {
        let t = self.tr();
        t * t - 4.0 * self.det()
    }

    pub fn scale(&self, c: C) -> Self {
        self.map(|x| c * x)
    }

    pub fn map(&self, f: impl Fn(C) -> C) -> Self {
        Self::new(f(self.m[0][0]), f(self.m[0][1]), f(self.m[1][0]), f(self.m[1][1]))
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        self.map(|x| x.conj())
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.m[0][0], self.m[1][0], self.m[0][1], self.m[1][1])
    }

    /// Hermitian transpose.
    pub fn adjoint(&self) -> Self {
        self.transpose().conj()
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == ZERO {
            return None;
        }
        Some(Self::new(self.m[1][1], -self.m[0][1], -self.m[1][0], self.m[0][0]).scale(d.inv()))
    }

    /// `(M + M*) / 2`.
    pub fn sym(&self) -> Self {
        let a = self.adjoint();
        let mut s = (*self + a).scale(C::from(0.5));
        // exact Hermitian symmetry: mirror the upper triangle, real diagonal
        s.m[1][0] = s.m[0][1].conj();
        s.m[0][0].im = 0.0;
        s.m[1][1].im = 0.0;
        s
    }

    pub fn apply(&self, v: [C; 2]) -> [C; 2] {
        [
            self.m[0][0] * v[0] + self.m[0][1] * v[1],
            self.m[1][0] * v[0] + self.m[1][1] * v[1],
        ]
    }

    /// `⟨M v, v⟩ = Σ (M v)_k conj(v_k)`.
    pub fn form(&self, v: [C; 2]) -> C {
        let w = self.apply(v);
        w[0] * v[0].conj() + w[1] * v[1].conj()
    }

    fn entries(&self) -> impl Iterator<Item = C> + '_ {
        self.m.iter().flatten().copied()
    }

    /// Largest singular value, from the closed form for 2×2 matrices.
    pub fn op_norm(&self) -> f64 {
        let f = self.entries().map(|x| x.norm_sqr()).sum::<f64>();
        let d = self.det().norm();
        let disc = ((f - 2.0 * d) * (f + 2.0 * d)).max(0.0);
        ((f + disc.sqrt()) / 2.0).sqrt()
    }

    /// Euclidean norm of the entries.
    pub fn frobenius(&self) -> f64 {
        self.entries().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Sum of entry moduli.
    pub fn entry_l1(&self) -> f64 {
        self.entries().map(|x| x.norm()).sum()
    }

    pub fn max_imag(&self) -> f64 {
        self.entries().map(|x| x.im.abs()).fold(0.0, f64::max)
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let (p, q) = (self.m[0][0].re, self.m[1][1].re);
        let off = self.m[0][1].norm();
        let mid = 0.5 * (p + q);
        let rad = (0.25 * (p - q) * (p - q) + off * off).sqrt();
        [mid - rad, mid + rad]
    }

    pub fn is_finite(&self) -> bool {
        self.entries().all(|x| x.re.is_finite() && x.im.is_finite())
    }
}

impl Mul for TransferMatrix {
    type Output = Self;

    fn mul(self, r: Self) -> Self {
        let a = &self.m;
        let b = &r.m;
        Self::new(
            a[0][0] * b[0][0] + a[0][1] * b[1][0],
            a[0][0] * b[0][1] + a[0][1] * b[1][1],
            a[1][0] * b[0][0] + a[1][1] * b[1][0],
            a[1][0] * b[0][1] + a[1][1] * b[1][1],
        )
    }
}

impl Add for TransferMatrix {
    type Output = Self;

    fn add(self, r: Self) -> Self {
        let mut out = self;
        for (x, y) in out.m.iter_mut().flatten().zip(r.m.iter().flatten()) {
            *x += *y;
        }
        out
    }
}

impl Sub for TransferMatrix {
    type Output = Self;

    fn sub(self, r: Self) -> Self {
        self + (-r)
    }
}

impl Neg for TransferMatrix {
    type Output = Self;

    fn neg(self) -> Self {
        self.map(|x| -x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accessors_agree_with_entry_arithmetic() {
        let m = TransferMatrix::new(C::new(1.0, 2.0), C::new(-0.5, 0.0), C::new(3.0, -1.0), C::new(0.0, 4.0));
        assert_eq!(m.det(), m.m[0][0] * m.m[1][1] - m.m[0][1] * m.m[1][0]);
        assert_eq!(m.tr(), C::new(1.0, 6.0));
        let inv = m.inverse().unwrap();
        let id = m * inv;
        assert!((id - TransferMatrix::identity()).op_norm() < 1e-14);
        assert!(TransferMatrix::zero().inverse().is_none());
    }

    #[test]
    fn op_norm_of_diagonal_and_rotation() {
        assert!((TransferMatrix::real(3.0, 0.0, 0.0, -1.0).op_norm() - 3.0).abs() < 1e-15);
        assert!((TransferMatrix::e().op_norm() - 1.0).abs() < 1e-15);
        assert_eq!(TransferMatrix::zero().op_norm(), 0.0);
    }

    #[test]
    fn sym_is_exactly_hermitian() {
        let m = TransferMatrix::new(C::new(0.1, 0.7), C::new(-0.3, 0.2), C::new(1.3, -1.1), C::new(0.9, 0.4));
        let s = m.sym();
        assert_eq!(s, s.adjoint());
        let ev = TransferMatrix::real(2.0, -1.0, -1.0, 2.0).hermitian_eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 3.0).abs() < 1e-15);
    }
}
