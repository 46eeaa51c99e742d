use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{series_verdict, SeriesFit, DEFAULT_MARGIN};
use crate::sequences::Jacobi;
use crate::transfer::{n_step, TransferMatrix};

type C = Complex64;

/// Values whose twisted variation can be measured.
pub trait Twist: Copy {
    fn conj(&self) -> Self;
    /// Norm of `self - other`.
    fn dist(&self, other: &Self) -> f64;
    fn magnitude(&self) -> f64;
}

impl Twist for C {
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }

    fn dist(&self, other: &Self) -> f64 {
        (self - other).norm()
    }

    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl Twist for TransferMatrix {
    fn conj(&self) -> Self {
        TransferMatrix::conj(self)
    }

    fn dist(&self, other: &Self) -> f64 {
        (*self - *other).op_norm()
    }

    fn magnitude(&self) -> f64 {
        self.op_norm()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistedVariationReport {
    pub offset: usize,
    pub period: usize,
    /// `(n, Σ_{m<n} ‖x_{(m+1)N+i} - conj(x_{mN+i})‖)` at checkpoints.
    pub partial_sums: Vec<(usize, f64)>,
    pub total: f64,
    /// `sup ‖x_{nN+i}‖` over the range.
    pub sup_norm: f64,
    pub fit: SeriesFit,
}

/// Every block below 100, then 90 checkpoints per decade.
fn is_checkpoint(n: usize) -> bool {
    n < 100 || n.is_multiple_of(10usize.pow((n as f64).log10().floor() as u32 - 1))
}

/// Report from the increments `(n, ‖x_{nN+i} - conj(x_{(n-1)N+i})‖)`.
fn from_terms(offset: usize, period: usize, xs_norm: f64, terms: Vec<(usize, f64)>) -> TwistedVariationReport {
    let mut total = 0.0;
    let mut partial_sums = Vec::new();
    for (j, &(n, t)) in terms.iter().enumerate() {
        total += t;
        if is_checkpoint(n) || j + 1 == terms.len() {
            partial_sums.push((n, total));
        }
    }
    let fit = series_verdict(&terms, DEFAULT_MARGIN, 1e-14 * (1.0 + xs_norm));
    TwistedVariationReport {
        offset,
        period,
        partial_sums,
        total,
        sup_norm: xs_norm,
        fit,
    }
}

/// Twisted variation of `x_{nN+i}` for `n ≥ 0`, `nN + i ≤ n_max`.
pub fn twisted_variation<T: Twist>(
    seq: impl Fn(usize) -> Result<T>,
    offset: usize,
    period: usize,
    n_max: usize,
) -> Result<TwistedVariationReport> {
    if n_max < 2 {
        return Err(Error::InvalidParameter("n_max must be at least 2".into()));
    }
    if period == 0 || offset >= period {
        return Err(Error::OffsetOutOfRange {
            offset,
            min: 0,
            max: period.saturating_sub(1),
        });
    }
    let mut prev = seq(offset)?;
    let mut sup = prev.magnitude();
    let mut terms = Vec::with_capacity(n_max / period);
    for n in 1.. {
        let k = n * period + offset;
        if k > n_max {
            break;
        }
        let x = seq(k)?;
        terms.push((n, x.dist(&prev.conj())));
        sup = sup.max(x.magnitude());
        prev = x;
    }
    if terms.is_empty() {
        return Err(Error::EmptyRange);
    }
    Ok(from_terms(offset, period, sup, terms))
}

/// Ordinary variation `Σ ‖x_{(n+1)N+i} - x_{nN+i}‖`, for comparison.
pub fn plain_variation<T: Twist>(
    seq: impl Fn(usize) -> Result<T>,
    offset: usize,
    period: usize,
    n_max: usize,
) -> Result<f64> {
    let mut prev = seq(offset)?;
    let mut total = 0.0;
    for n in 1.. {
        let k = n * period + offset;
        if k > n_max {
            break;
        }
        let x = seq(k)?;
        total += x.dist(&prev);
        prev = x;
    }
    Ok(total)
}

/// Scalar sequences derived from the coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScalarSelector {
    /// `a_k`.
    A,
    /// `b_k`.
    B,
    /// `1 / a_k`.
    InvA,
    /// `b_k / a_k`.
    BOverA,
    /// `a_{k-1} / a_k`.
    ARatio,
    /// `γ / a_k`, with `γ` supplied.
    GammaOverA,
}

impl ScalarSelector {
    pub const ALL: [ScalarSelector; 6] = [
        Self::A,
        Self::B,
        Self::InvA,
        Self::BOverA,
        Self::ARatio,
        Self::GammaOverA,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::A => "a",
            Self::B => "b",
            Self::InvA => "inv_a",
            Self::BOverA => "b_over_a",
            Self::ARatio => "a_ratio",
            Self::GammaOverA => "gamma_over_a",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s)
    }

    pub fn eval(&self, model: &Jacobi, k: usize, gamma: C) -> Result<C> {
        let (a, b) = model.coeff(k)?;
        Ok(match self {
            Self::A => a,
            Self::B => b,
            Self::InvA => a.inv(),
            Self::BOverA => b / a,
            Self::ARatio => model.a(k as i64 - 1)? / a,
            Self::GammaOverA => gamma / a,
        })
    }
}

/// Twisted variation of a coefficient-derived scalar sequence.
pub fn scalar_variation(
    model: &Jacobi,
    selector: ScalarSelector,
    gamma: C,
    offset: usize,
    period: usize,
    n_max: usize,
) -> Result<TwistedVariationReport> {
    twisted_variation(|k| selector.eval(model, k, gamma), offset, period, n_max)
}

/// Twisted variation of `X_{nN+i}(z)`, or with `weighted` set of
/// `(a_{(n+1)N+i-1} / a_{nN+i-1}) X_{nN+i}(z)`. Starts at the first `n` with
/// `nN + i ≥ 1`.
pub fn transfer_variation(
    model: &Jacobi,
    z: C,
    weighted: bool,
    offset: usize,
    period: usize,
    n_max: usize,
) -> Result<TwistedVariationReport> {
    let start = if offset == 0 { period } else { offset };
    let seq = |k: usize| -> Result<TransferMatrix> {
        let k = k + start - offset;
        let x = n_step(model, k, period, z)?;
        if weighted {
            Ok(x.scale(model.a((k + period - 1) as i64)? / model.a(k as i64 - 1)?))
        } else {
            Ok(x)
        }
    };
    twisted_variation(seq, offset, period, n_max.saturating_sub(start - offset))
}
