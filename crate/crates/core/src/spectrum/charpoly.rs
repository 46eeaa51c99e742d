use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::pow2;
use crate::error::{Error, Result};
use crate::sequences::Jacobi;

type C = Complex64;

/// `mantissa · 2^exponent` with `0.5 ≤ |mantissa| < 2` unless zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CharPolyValue {
    pub mantissa: C,
    pub exponent: i64,
}

impl CharPolyValue {
    pub fn new(mantissa: C, exponent: i64) -> Self {
        let m = mantissa.norm();
        if m == 0.0 || !m.is_finite() {
            return Self { mantissa, exponent: 0 };
        }
        let e = m.log2().floor() as i64;
        let mut v = Self {
            mantissa: mantissa * pow2(-e as i32),
            exponent: exponent + e,
        };
        // log2 rounding can leave |mantissa| just outside [0.5, 2)
        let n = v.mantissa.norm();
        if n >= 2.0 {
            v.mantissa *= 0.5;
            v.exponent += 1;
        } else if n < 0.5 {
            v.mantissa *= 2.0;
            v.exponent -= 1;
        }
        v
    }

    /// The plain value; overflows to infinity or zero out of range.
    pub fn value(&self) -> C {
        if self.exponent.abs() > 2000 {
            let huge = if self.exponent > 0 { f64::INFINITY } else { 0.0 };
            return self.mantissa * huge;
        }
        let half = (self.exponent / 2) as i32;
        self.mantissa * pow2(half) * pow2(self.exponent as i32 - half)
    }

    pub fn ln_abs(&self) -> f64 {
        self.mantissa.norm().ln() + self.exponent as f64 * std::f64::consts::LN_2
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == C::from(0.0)
    }
}

/// The `dim × dim` truncation `J` with diagonal `b_0..b_{dim-1}` and
/// off-diagonals `a_0..a_{dim-2}`.
#[derive(Debug, Clone)]
pub struct Section {
    b: Vec<C>,
    a_sqr: Vec<C>,
}

const RENORM: i32 = 256;

impl Section {
    pub fn new(model: &Jacobi, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be at least 1".into()));
        }
        let mut b = Vec::with_capacity(dim);
        let mut a_sqr = Vec::with_capacity(dim);
        for k in 0..dim {
            let (a, bk) = model.coeff(k)?;
            b.push(bk);
            if k + 1 < dim {
                a_sqr.push(a * a);
            }
        }
        Ok(Self { b, a_sqr })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `(det(z - J), d/dz det(z - J))` sharing one exponent, via
    /// `p_k = (z - b_{k-1}) p_{k-1} - a_{k-2}² p_{k-2}`.
    pub fn eval_with_derivative(&self, z: C) -> (C, C, i64) {
        let (mut p0, mut p1) = (C::from(0.0), C::from(1.0));
        let (mut d0, mut d1) = (C::from(0.0), C::from(0.0));
        let mut exp: i64 = 0;
        for k in 1..=self.dim() {
            let s = z - self.b[k - 1];
            let (p2, d2) = if k == 1 {
                (s * p1, p1 + s * d1)
            } else {
                let a2 = self.a_sqr[k - 2];
                (s * p1 - a2 * p0, p1 + s * d1 - a2 * d0)
            };
            p0 = p1;
            p1 = p2;
            d0 = d1;
            d1 = d2;
            let m = p0.norm().max(p1.norm()).max(d0.norm()).max(d1.norm());
            if m > 0.0 && m.is_finite() {
                let e = m.log2().floor() as i32;
                if e.abs() > RENORM {
                    let f = pow2(-e);
                    p0 *= f;
                    p1 *= f;
                    d0 *= f;
                    d1 *= f;
                    exp += e as i64;
                }
            }
        }
        (p1, d1, exp)
    }

    pub fn charpoly(&self, z: C) -> CharPolyValue {
        let (p, _, e) = self.eval_with_derivative(z);
        CharPolyValue::new(p, e)
    }

    /// Newton step `p / p'`; `None` where `p'` vanishes.
    pub fn newton_step(&self, z: C) -> Option<C> {
        let (p, d, _) = self.eval_with_derivative(z);
        (d != C::from(0.0)).then(|| p / d)
    }
}

/// `det(z·Id - J_dim)` in scaled form.
pub fn charpoly(model: &Jacobi, dim: usize, z: C) -> Result<CharPolyValue> {
    Ok(Section::new(model, dim)?.charpoly(z))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{CoefficientModel, Expr, PeriodicPair};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    fn free() -> Jacobi {
        Jacobi::new(CoefficientModel::free()).unwrap()
    }

    #[test]
    fn small_dimensions() {
        for z in [c(0.3, 0.0), c(1.7, -0.4), c(-5.0, 2.0)] {
            let v = charpoly(&free(), 2, z).unwrap().value();
            assert!((v - (z * z - 1.0)).norm() < 1e-14 * (z * z).norm().max(1.0));
        }
        let m = Jacobi::new(CoefficientModel::ExplicitTable {
            a: vec![c(2.0, 0.0)],
            b: vec![c(0.5, 1.0)],
            a_minus1: None,
            period: None,
        })
        .unwrap();
        assert_eq!(charpoly(&m, 1, c(3.0, 0.0)).unwrap().value(), c(2.5, -1.0));
        assert!(charpoly(&m, 0, c(3.0, 0.0)).is_err());
    }

    #[test]
    fn mantissa_normalised() {
        for (x, e) in [
            (c(3.0, 4.0), 10),
            (c(1e-300, 0.0), -5),
            (c(0.5, 0.0), 0),
            (c(1.999_999_999, 0.0), 3),
        ] {
            let v = CharPolyValue::new(x, e);
            let m = v.mantissa.norm();
            assert!((0.5..2.0).contains(&m), "{v:?}");
            assert!(((v.value() - x * 2f64.powi(e as i32)).norm()) <= 1e-15 * (x * 2f64.powi(e as i32)).norm());
        }
        assert!(CharPolyValue::new(c(0.0, 0.0), 7).is_zero());
    }

    #[test]
    fn chebyshev_roots_vanish() {
        let s = Section::new(&free(), 100).unwrap();
        let root = s.charpoly(c(2.0 * (std::f64::consts::PI / 101.0).cos(), 0.0)).ln_abs();
        let near = s
            .charpoly(c(2.0 * (1.5 * std::f64::consts::PI / 101.0).cos(), 0.0))
            .ln_abs();
        assert!(root - near < (1e-6f64).ln(), "{root} {near}");
    }

    #[test]
    fn no_overflow_for_unbounded_models() {
        let m = Jacobi::new(CoefficientModel::PeriodicallyModulated {
            base: PeriodicPair::free(),
            modulator: Expr::pow(1.5),
        })
        .unwrap();
        let v = charpoly(&m, 2000, c(0.3, 0.1)).unwrap();
        assert!(v.mantissa.norm().is_finite() && v.exponent > 1024);
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let m = Jacobi::new(CoefficientModel::AsymptoticallyPeriodic {
            base: PeriodicPair::new(vec![c(1.0, 0.3)], vec![c(0.2, -0.1)]).unwrap(),
            perturb_a: None,
            perturb_b: Some(Expr::recip(Expr::pow(1.0))),
        })
        .unwrap();
        let s = Section::new(&m, 30).unwrap();
        let z = c(0.4, 0.9);
        let h = 1e-6;
        let (p, d, e) = s.eval_with_derivative(z);
        let (pp, _, ep) = s.eval_with_derivative(z + h);
        let (pm, _, em) = s.eval_with_derivative(z - h);
        assert_eq!((e, ep), (em, em));
        let fd = (pp - pm) / (2.0 * h);
        assert!((fd - d).norm() < 1e-6 * d.norm(), "{fd} {d} {p}");
    }
}
