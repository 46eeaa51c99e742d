use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trajectory::{walk, RESCALE_EXP};
use crate::error::{Error, Result};
use crate::fit::log_slope;
use crate::sequences::Jacobi;

type C = Complex64;

/// Basis initial conditions `(1, 0)` and `(0, 1)`.
pub const BASIS: [[C; 2]; 2] = [
    [C::new(1.0, 0.0), C::new(0.0, 0.0)],
    [C::new(0.0, 0.0), C::new(1.0, 0.0)],
];

/// Ratio extrema, all in log space; `r = exp(ln_r)` may overflow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LnRange {
    pub ln_inf: f64,
    pub ln_sup: f64,
}

impl LnRange {
    const EMPTY: LnRange = LnRange {
        ln_inf: f64::INFINITY,
        ln_sup: f64::NEG_INFINITY,
    };

    fn push(&mut self, v: f64) {
        self.ln_inf = self.ln_inf.min(v);
        self.ln_sup = self.ln_sup.max(v);
    }

    fn merge(self, o: LnRange) -> LnRange {
        LnRange {
            ln_inf: self.ln_inf.min(o.ln_inf),
            ln_sup: self.ln_sup.max(o.ln_sup),
        }
    }

    pub fn inf(&self) -> f64 {
        self.ln_inf.exp()
    }

    pub fn sup(&self) -> f64 {
        self.ln_sup.exp()
    }

    /// `sup / inf`.
    pub fn spread(&self) -> f64 {
        (self.ln_sup - self.ln_inf).exp()
    }

    pub fn is_empty(&self) -> bool {
        self.ln_inf > self.ln_sup
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisBound {
    pub alpha: [C; 2],
    /// Over the requested window `n_min ≤ k ≤ n_max`.
    pub window: LnRange,
    /// Over every `k ≥ 1`.
    pub global: LnRange,
    /// Over the last decade `k ≥ n_max / 10`.
    pub tail: LnRange,
    /// Slope of `ln r` against `ln k` over the last decade.
    pub slope: Option<f64>,
}

/// Two-sided bound diagnostics for
/// `r_k = |a_{k-1}| (|u_{k-1}|² + |u_k|²) / ‖α‖²` along `k = nN + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRatioReport {
    pub offset: usize,
    pub period: usize,
    pub z: C,
    pub n_min: usize,
    pub n_max: usize,
    pub bases: Vec<BasisBound>,
    /// Window range over both bases.
    pub window: LnRange,
    pub global: LnRange,
    pub tail: LnRange,
    /// Slope of largest magnitude over the bases.
    pub slope: Option<f64>,
}

impl BoundRatioReport {
    pub fn spread(&self) -> f64 {
        self.window.spread()
    }

    /// `sup/inf ≤ max_spread` and `|slope| ≤ max_slope`.
    pub fn is_bounded(&self, max_spread: f64, max_slope: f64) -> bool {
        self.spread() <= max_spread && self.slope.is_some_and(|s| s.abs() <= max_slope)
    }
}

/// Samples `ln r_k` for `k = nN + i ≤ n_max`, `k ≥ 1`.
pub fn ln_ratios(
    model: &Jacobi,
    offset: usize,
    period: usize,
    z: C,
    alpha: [C; 2],
    n_max: usize,
) -> Result<Vec<(usize, f64)>> {
    if period == 0 || offset > period {
        return Err(Error::OffsetOutOfRange {
            offset,
            min: 0,
            max: period,
        });
    }
    let ln_alpha = (alpha[0].norm_sqr() + alpha[1].norm_sqr()).ln();
    let mut out = Vec::with_capacity(n_max / period + 1);
    let mut err = None;
    walk(model, z, alpha, n_max, RESCALE_EXP, |s| {
        if err.is_some() || s.n % period != offset % period {
            return;
        }
        match model.a(s.n as i64 - 1) {
            Ok(a) => out.push((s.n, a.norm().ln() + s.ln_energy() - ln_alpha)),
            Err(e) => err = Some(e),
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(out),
    }
}

fn basis_bound(
    model: &Jacobi,
    offset: usize,
    period: usize,
    z: C,
    alpha: [C; 2],
    n_min: usize,
    n_max: usize,
) -> Result<BasisBound> {
    let r = ln_ratios(model, offset, period, z, alpha, n_max)?;
    let (mut window, mut global, mut tail) = (LnRange::EMPTY, LnRange::EMPTY, LnRange::EMPTY);
    for &(k, v) in &r {
        global.push(v);
        if k >= n_min {
            window.push(v);
        }
        if k >= n_max / 10 {
            tail.push(v);
        }
    }
    let slope = log_slope(r.iter().filter(|(k, _)| *k >= n_max / 10).map(|&(k, v)| (k as f64, v)));
    Ok(BasisBound {
        alpha,
        window,
        global,
        tail,
        slope,
    })
}

/// Bound ratios over `n_min ≤ k ≤ n_max` for both basis initial conditions.
pub fn bound_ratio_window(
    model: &Jacobi,
    offset: usize,
    period: usize,
    z: C,
    n_min: usize,
    n_max: usize,
) -> Result<BoundRatioReport> {
    if n_max < 10 * period {
        return Err(Error::InvalidParameter(format!(
            "n_max = {n_max} must be at least 10 periods ({})",
            10 * period
        )));
    }
    if n_min > n_max {
        return Err(Error::EmptyRange);
    }
    let bases = BASIS
        .par_iter()
        .map(|&alpha| basis_bound(model, offset, period, z, alpha, n_min, n_max))
        .collect::<Result<Vec<_>>>()?;
    let fold = |f: fn(&BasisBound) -> LnRange| bases.iter().map(f).fold(LnRange::EMPTY, LnRange::merge);
    let slope = bases
        .iter()
        .filter_map(|b| b.slope)
        .max_by(|a, b| a.abs().total_cmp(&b.abs()));
    Ok(BoundRatioReport {
        offset,
        period,
        z,
        n_min,
        n_max,
        window: fold(|b| b.window),
        global: fold(|b| b.global),
        tail: fold(|b| b.tail),
        slope,
        bases,
    })
}

pub fn bound_ratio(model: &Jacobi, offset: usize, period: usize, z: C, n_max: usize) -> Result<BoundRatioReport> {
    bound_ratio_window(model, offset, period, z, 1, n_max)
}
