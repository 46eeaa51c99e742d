//! Closed-form sequence expressions.
//!
//! A small serializable vocabulary for the perturbations, modulators and
//! blend entries used by the coefficient models. Every node is evaluated at a
//! non-negative index `n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cplx;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr {
    /// Constant complex value.
    Const {
        #[serde(with = "cplx::one")]
        value: Complex64,
    },
    /// `(n + 1)^exponent`.
    Pow {
        exponent: f64,
    },
    /// `(-1)^n`.
    Alt,
    /// `(-1)^{floor(n / period)}`.
    AltBlock {
        period: usize,
    },
    /// `1 / arg`.
    Recip {
        arg: Box<Expr>,
    },
    /// `i * arg`.
    Imag {
        arg: Box<Expr>,
    },
    Sum {
        terms: Vec<Expr>,
    },
    Product {
        factors: Vec<Expr>,
    },
}

impl Expr {
    pub fn constant(value: Complex64) -> Self {
        Expr::Const { value }
    }

    pub fn real(value: f64) -> Self {
        Expr::Const {
            value: Complex64::new(value, 0.0),
        }
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn pow(exponent: f64) -> Self {
        Expr::Pow { exponent }
    }

    pub fn recip(arg: Expr) -> Self {
        Expr::Recip { arg: Box::new(arg) }
    }

    pub fn imag(arg: Expr) -> Self {
        Expr::Imag { arg: Box::new(arg) }
    }

    pub fn sum(terms: Vec<Expr>) -> Self {
        Expr::Sum { terms }
    }

    pub fn product(factors: Vec<Expr>) -> Self {
        Expr::Product { factors }
    }

    pub fn eval(&self, n: usize) -> Complex64 {
        match self {
            Expr::Const { value } => *value,
            Expr::Pow { exponent } => Complex64::new(((n + 1) as f64).powf(*exponent), 0.0),
            Expr::Alt => Complex64::new(sign(n), 0.0),
            Expr::AltBlock { period } => Complex64::new(sign(n / (*period).max(1)), 0.0),
            Expr::Recip { arg } => arg.eval(n).inv(),
            Expr::Imag { arg } => Complex64::i() * arg.eval(n),
            Expr::Sum { terms } => terms.iter().map(|t| t.eval(n)).sum(),
            Expr::Product { factors } => factors.iter().map(|f| f.eval(n)).product(),
        }
    }

    /// Rejects nodes that cannot be evaluated (zero block period, non-finite
    /// constants or exponents).
    pub fn validate(&self) -> Result<(), String> {
        match self {
            Expr::Const { value } if !(value.re.is_finite() && value.im.is_finite()) => {
                Err("non-finite constant".into())
            }
            Expr::Pow { exponent } if !exponent.is_finite() => Err("non-finite exponent".into()),
            Expr::AltBlock { period: 0 } => Err("alt_block period must be positive".into()),
            Expr::Recip { arg } | Expr::Imag { arg } => arg.validate(),
            Expr::Sum { terms: items } | Expr::Product { factors: items } => items.iter().try_for_each(Expr::validate),
            _ => Ok(()),
        }
    }
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}
