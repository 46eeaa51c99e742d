use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cplx;
use super::expr::Expr;
use crate::error::{Error, Result};

/// A pair of `N`-periodic complex sequences indexed cyclically over all of ℤ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PeriodicPairRepr", into = "PeriodicPairRepr")]
pub struct PeriodicPair {
    alpha: Vec<Complex64>,
    beta: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct PeriodicPairRepr {
    period: usize,
    #[serde(with = "cplx::many")]
    alpha: Vec<Complex64>,
    #[serde(with = "cplx::many")]
    beta: Vec<Complex64>,
}

impl TryFrom<PeriodicPairRepr> for PeriodicPair {
    type Error = String;

    fn try_from(r: PeriodicPairRepr) -> Result<Self, String> {
        if r.alpha.len() != r.period || r.beta.len() != r.period {
            return Err(format!(
                "period {} does not match alpha/beta lengths {}/{}",
                r.period,
                r.alpha.len(),
                r.beta.len()
            ));
        }
        PeriodicPair::new(r.alpha, r.beta).map_err(|e| e.to_string())
    }
}

impl From<PeriodicPair> for PeriodicPairRepr {
    fn from(p: PeriodicPair) -> Self {
        PeriodicPairRepr {
            period: p.period(),
            alpha: p.alpha,
            beta: p.beta,
        }
    }
}

impl PeriodicPair {
    pub fn new(alpha: Vec<Complex64>, beta: Vec<Complex64>) -> Result<Self> {
        if alpha.is_empty() || alpha.len() != beta.len() {
            return Err(Error::InvalidParameter(
                "alpha and beta must be non-empty and of equal length".into(),
            ));
        }
        if let Some(k) = alpha.iter().position(|a| *a == Complex64::new(0.0, 0.0)) {
            return Err(Error::ZeroOffDiagonal { index: k as i64 });
        }
        Ok(Self { alpha, beta })
    }

    pub fn real(alpha: &[f64], beta: &[f64]) -> Result<Self> {
        Self::new(
            alpha.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
            beta.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// The free Jacobi pair `α ≡ 1`, `β ≡ 0` of period one.
    pub fn free() -> Self {
        Self::real(&[1.0], &[0.0]).expect("valid")
    }

    pub fn period(&self) -> usize {
        self.alpha.len()
    }

    pub fn alpha(&self, n: i64) -> Complex64 {
        self.alpha[n.rem_euclid(self.period() as i64) as usize]
    }

    pub fn beta(&self, n: i64) -> Complex64 {
        self.beta[n.rem_euclid(self.period() as i64) as usize]
    }

    pub fn alphas(&self) -> &[Complex64] {
        &self.alpha
    }

    pub fn betas(&self) -> &[Complex64] {
        &self.beta
    }

    pub fn is_real(&self) -> bool {
        self.alpha.iter().chain(&self.beta).all(|z| z.im == 0.0)
    }
}

/// Specification of the coefficient pair `(a_n, b_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CoefficientModel {
    ExplicitTable {
        #[serde(with = "cplx::many")]
        a: Vec<Complex64>,
        #[serde(with = "cplx::many")]
        b: Vec<Complex64>,
        #[serde(default, with = "cplx::opt", skip_serializing_if = "Option::is_none")]
        a_minus1: Option<Complex64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        period: Option<usize>,
    },
    /// `a_n = α_n + p_n`, `b_n = β_n + q_n`.
    AsymptoticallyPeriodic {
        #[serde(flatten)]
        base: PeriodicPair,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        perturb_a: Option<Expr>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        perturb_b: Option<Expr>,
    },
    /// `a_n = α_n ã_n`, `b_n = β_n ã_n`.
    PeriodicallyModulated {
        #[serde(flatten)]
        base: PeriodicPair,
        modulator: Expr,
    },
    /// `a_n + x_n`, `b_n + y_n`, or with `alternating` set
    /// `a_n + i ε_n x_n`, `b_n + i ε_n y_n` where `ε_n = (-1)^{⌊n/N⌋}`.
    AdditivePerturbation {
        inner: Box<CoefficientModel>,
        x: Expr,
        y: Expr,
        #[serde(default)]
        alternating: bool,
    },
    /// Periodic blocks of length `N` interleaved with two entries of the
    /// unbounded sequence `c̃` (diagonal `d̃`) per block.
    Blend {
        #[serde(flatten)]
        base: PeriodicPair,
        c_tilde: Expr,
        d_tilde: Expr,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        perturb_a: Option<Expr>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        perturb_b: Option<Expr>,
    },
    /// `a_n = α_n (n+1)^λ + i ε_n (n+1)^μ`, `b_n = β_n (n+1)^λ + i ε_n (n+1)^μ`.
    PowerLawExample {
        #[serde(flatten)]
        base: PeriodicPair,
        lambda: f64,
        mu: f64,
    },
}

/// On-disk wrapper: `{"model": {...}}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFile {
    pub model: CoefficientModel,
}

fn eps_block(n: usize, period: usize) -> f64 {
    if (n / period).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

fn check_a(a: Complex64, n: i64) -> Result<Complex64> {
    if a == Complex64::new(0.0, 0.0) || !(a.re.is_finite() && a.im.is_finite()) {
        Err(Error::ZeroOffDiagonal { index: n })
    } else {
        Ok(a)
    }
}

/// Entry `(k, i)` of the `N`-periodic blend: slot `i < N` comes from the
/// periodic block, slots `N` and `N+1` from `c̃_{2k}` and `c̃_{2k+1}`.
pub fn blend_coeff(
    base: &PeriodicPair,
    c_tilde: &Expr,
    d_tilde: &Expr,
    k: usize,
    i: usize,
) -> Result<(Complex64, Complex64)> {
    blend_slot(
        |m| (base.alpha(m as i64), base.beta(m as i64)),
        base.period(),
        c_tilde,
        d_tilde,
        k,
        i,
    )
}

fn blend_slot(
    periodic: impl Fn(usize) -> (Complex64, Complex64),
    period: usize,
    c_tilde: &Expr,
    d_tilde: &Expr,
    k: usize,
    i: usize,
) -> Result<(Complex64, Complex64)> {
    match i {
        i if i < period => Ok(periodic(k * period + i)),
        i if i == period => Ok((c_tilde.eval(2 * k), d_tilde.eval(2 * k))),
        i if i == period + 1 => Ok((c_tilde.eval(2 * k + 1), d_tilde.eval(2 * k + 1))),
        _ => Err(Error::SlotOutOfRange {
            slot: i,
            max: period + 1,
        }),
    }
}

/// Applies an additive perturbation to already-evaluated inner coefficients.
pub fn perturbed_coeff(
    inner: (Complex64, Complex64),
    x: Complex64,
    y: Complex64,
    alternating: bool,
    n: usize,
    period: usize,
) -> Result<(Complex64, Complex64)> {
    let (a, b) = inner;
    let (a, b) = if alternating {
        let w = Complex64::new(0.0, eps_block(n, period.max(1)));
        (a + w * x, b + w * y)
    } else {
        (a + x, b + y)
    };
    Ok((check_a(a, n as i64)?, b))
}

impl CoefficientModel {
    pub fn free() -> Self {
        CoefficientModel::AsymptoticallyPeriodic {
            base: PeriodicPair::free(),
            perturb_a: None,
            perturb_b: None,
        }
    }

    pub fn periodic(base: PeriodicPair) -> Self {
        CoefficientModel::AsymptoticallyPeriodic {
            base,
            perturb_a: None,
            perturb_b: None,
        }
    }

    /// Natural period of the coefficient pattern (`N + 2` for blends).
    pub fn period(&self) -> usize {
        match self {
            CoefficientModel::ExplicitTable { period, .. } => period.unwrap_or(1).max(1),
            CoefficientModel::AsymptoticallyPeriodic { base, .. }
            | CoefficientModel::PeriodicallyModulated { base, .. }
            | CoefficientModel::PowerLawExample { base, .. } => base.period(),
            CoefficientModel::AdditivePerturbation { inner, .. } => inner.period(),
            CoefficientModel::Blend { base, .. } => base.period() + 2,
        }
    }

    /// The underlying periodic pair, if any.
    pub fn base(&self) -> Option<&PeriodicPair> {
        match self {
            CoefficientModel::ExplicitTable { .. } => None,
            CoefficientModel::AsymptoticallyPeriodic { base, .. }
            | CoefficientModel::PeriodicallyModulated { base, .. }
            | CoefficientModel::PowerLawExample { base, .. }
            | CoefficientModel::Blend { base, .. } => Some(base),
            CoefficientModel::AdditivePerturbation { inner, .. } => inner.base(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            CoefficientModel::ExplicitTable { a, b, period, .. } => {
                if a.is_empty() || a.len() != b.len() {
                    return bad("explicit table needs equal, non-empty a and b".into());
                }
                if *period == Some(0) {
                    return bad("period must be positive".into());
                }
            }
            CoefficientModel::AsymptoticallyPeriodic {
                perturb_a, perturb_b, ..
            } => {
                for e in perturb_a.iter().chain(perturb_b) {
                    e.validate().or_else(bad)?;
                }
            }
            CoefficientModel::PeriodicallyModulated { modulator, .. } => modulator.validate().or_else(bad)?,
            CoefficientModel::AdditivePerturbation { inner, x, y, .. } => {
                inner.validate()?;
                x.validate().or_else(bad)?;
                y.validate().or_else(bad)?;
            }
            CoefficientModel::Blend {
                c_tilde,
                d_tilde,
                perturb_a,
                perturb_b,
                ..
            } => {
                for e in [c_tilde, d_tilde].into_iter().chain(perturb_a).chain(perturb_b) {
                    e.validate().or_else(bad)?;
                }
            }
            CoefficientModel::PowerLawExample { lambda, mu, .. } => {
                if !(lambda.is_finite() && mu.is_finite()) {
                    return bad("lambda and mu must be finite".into());
                }
            }
        }
        Ok(())
    }

    /// Coefficients without the `a_n ≠ 0` check.
    pub(crate) fn raw(&self, n: usize) -> Result<(Complex64, Complex64)> {
        let zero = Complex64::new(0.0, 0.0);
        Ok(match self {
            CoefficientModel::ExplicitTable { a, b, .. } => {
                if n >= a.len() {
                    return Err(Error::IndexOutOfTable {
                        index: n as i64,
                        len: a.len(),
                    });
                }
                (a[n], b[n])
            }
            CoefficientModel::AsymptoticallyPeriodic {
                base,
                perturb_a,
                perturb_b,
            } => {
                let m = n as i64;
                (
                    base.alpha(m) + perturb_a.as_ref().map_or(zero, |e| e.eval(n)),
                    base.beta(m) + perturb_b.as_ref().map_or(zero, |e| e.eval(n)),
                )
            }
            CoefficientModel::PeriodicallyModulated { base, modulator } => {
                let t = modulator.eval(n);
                (base.alpha(n as i64) * t, base.beta(n as i64) * t)
            }
            CoefficientModel::AdditivePerturbation {
                inner,
                x,
                y,
                alternating,
            } => {
                let (a, b) = inner.raw(n)?;
                let (x, y) = (x.eval(n), y.eval(n));
                if *alternating {
                    let w = Complex64::new(0.0, eps_block(n, inner.period()));
                    (a + w * x, b + w * y)
                } else {
                    (a + x, b + y)
                }
            }
            CoefficientModel::Blend {
                base,
                c_tilde,
                d_tilde,
                perturb_a,
                perturb_b,
            } => {
                let block = base.period() + 2;
                let periodic = |m: usize| {
                    (
                        base.alpha(m as i64) + perturb_a.as_ref().map_or(zero, |e| e.eval(m)),
                        base.beta(m as i64) + perturb_b.as_ref().map_or(zero, |e| e.eval(m)),
                    )
                };
                blend_slot(periodic, base.period(), c_tilde, d_tilde, n / block, n % block)?
            }
            CoefficientModel::PowerLawExample { base, lambda, mu } => {
                let m = (n + 1) as f64;
                let w = Complex64::new(0.0, eps_block(n, base.period()) * m.powf(*mu));
                let s = m.powf(*lambda);
                (base.alpha(n as i64) * s + w, base.beta(n as i64) * s + w)
            }
        })
    }

    /// `(a_n, b_n)` with the non-vanishing check on `a_n`.
    pub fn coeff(&self, n: usize) -> Result<(Complex64, Complex64)> {
        let (a, b) = self.raw(n)?;
        Ok((check_a(a, n as i64)?, b))
    }

    /// `a_{-1}`: the periodic-limit value `α_{N-1}` for every model built on
    /// a periodic pair, and the explicit `a_minus1` for tables.
    pub fn a_minus1(&self) -> Result<Complex64> {
        match self {
            CoefficientModel::ExplicitTable { a_minus1, .. } => {
                a_minus1.ok_or(Error::MissingBoundary).and_then(|a| check_a(a, -1))
            }
            other => {
                let base = other.base().expect("non-table models carry a periodic pair");
                Ok(base.alpha(-1))
            }
        }
    }
}
