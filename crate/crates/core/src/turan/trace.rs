use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::forms::{is_degenerate, q_matrix, q_tilde_matrix};
use crate::eigen::{pow2, walk, RESCALE_EXP};
use crate::error::{Error, Result};
use crate::io::{csv_line, num};
use crate::sequences::Jacobi;

type C = Complex64;

/// Block index used when γ is estimated from the coefficients.
pub const GAMMA_BLOCK: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Converged when the last-decade increment sum is at most `conv_tol · |g|`.
    pub conv_tol: f64,
    /// Relative eigenvalue threshold of [`is_degenerate`].
    pub degeneracy_rel: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        Self {
            conv_tol: 1e-3,
            degeneracy_rel: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    /// Sequence index `k = nN + i`.
    pub k: usize,
    /// `S_k / ‖α‖²`.
    pub s: f64,
    /// `(S_{k+N} - S_k) / S_k`; absent for the last point.
    pub f: Option<f64>,
    pub imag_residue: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuranTrace {
    pub offset: usize,
    pub period: usize,
    pub gamma: C,
    pub z: C,
    pub alpha: [C; 2],
    pub n_max: usize,
    pub values: Vec<TracePoint>,
    /// Limit estimate: the last recorded value.
    pub g: f64,
    /// `Σ |S_{k+N} - S_k|` over the last decade.
    pub residual: f64,
    pub converged: bool,
    /// Sign of `g`.
    pub sign: i8,
    /// First index after which every recorded value has the sign of `g`.
    pub burn_in: usize,
    /// The sign changed inside the last decade.
    pub sign_change: bool,
    /// One of the form matrices at the last index is close to indefinite.
    pub form_degenerate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSummary {
    pub g: f64,
    pub sign: i8,
    pub residual: f64,
    pub burn_in: usize,
    pub converged: bool,
    pub sign_change: bool,
    pub form_degenerate: bool,
}

impl TuranTrace {
    pub fn summary(&self) -> TraceSummary {
        TraceSummary {
            g: self.g,
            sign: self.sign,
            residual: self.residual,
            burn_in: self.burn_in,
            converged: self.converged,
            sign_change: self.sign_change,
            form_degenerate: self.form_degenerate,
        }
    }

    /// Converged with a definite sign on a non-degenerate form.
    pub fn is_healthy(&self) -> bool {
        self.converged && !self.sign_change && !self.form_degenerate
    }

    /// CSV with columns `n, S, F, imag_residue`.
    pub fn to_csv(&self, header: Option<&str>) -> String {
        let mut out = String::from(header.unwrap_or(""));
        out.push_str("n,S,F,imag_residue\n");
        for p in &self.values {
            out.push_str(&csv_line(&[
                p.k.to_string(),
                num(p.s),
                p.f.map(num).unwrap_or_default(),
                num(p.imag_residue),
            ]));
        }
        out
    }
}

fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

pub fn turan_trace(
    model: &Jacobi,
    offset: usize,
    period: usize,
    gamma: C,
    z: C,
    alpha: [C; 2],
    n_max: usize,
) -> Result<TuranTrace> {
    turan_trace_with(model, offset, period, gamma, z, alpha, n_max, TraceOptions::default())
}

/// Records `S_{nN+i}` for every `1 ≤ nN + i ≤ n_max`.
#[allow(clippy::too_many_arguments)]
pub fn turan_trace_with(
    model: &Jacobi,
    offset: usize,
    period: usize,
    gamma: C,
    z: C,
    alpha: [C; 2],
    n_max: usize,
    opts: TraceOptions,
) -> Result<TuranTrace> {
    if n_max < 10 {
        return Err(Error::InvalidParameter("n_max must be at least 10".into()));
    }
    if period == 0 || offset > period {
        return Err(Error::OffsetOutOfRange {
            offset,
            min: 0,
            max: period,
        });
    }
    let alpha_sqr = alpha[0].norm_sqr() + alpha[1].norm_sqr();
    let mut values: Vec<TracePoint> = Vec::with_capacity(n_max / period + 1);
    let mut err = None;
    walk(model, z, alpha, n_max, RESCALE_EXP, |s| {
        if err.is_some() || s.n % period != offset % period {
            return;
        }
        let point = (|| {
            let m = q_matrix(model, s.n, period, gamma, z)?;
            let w = m.form([s.prev, s.cur]);
            let scale = m.op_norm() * (s.prev.norm_sqr() + s.cur.norm_sqr());
            if w.im.abs() > super::forms::HARD_RESIDUE * scale {
                return Err(Error::ImaginaryResidue {
                    residue: w.im.abs(),
                    scale,
                });
            }
            let h = pow2(s.scale_exp);
            let f = model.a((s.n + period - 1) as i64)?.norm() / alpha_sqr * h * h;
            Ok(TracePoint {
                k: s.n,
                s: w.re * f,
                f: None,
                imag_residue: w.im.abs() * f,
            })
        })();
        match point {
            Ok(p) => values.push(p),
            Err(e) => err = Some(e),
        }
    })?;
    if let Some(e) = err {
        return Err(e);
    }
    if values.len() < 2 {
        return Err(Error::EmptyRange);
    }
    for j in 0..values.len() - 1 {
        let (s0, s1) = (values[j].s, values[j + 1].s);
        values[j].f = Some((s1 - s0) / s0);
    }

    let last = *values.last().expect("non-empty");
    let g = last.s;
    let sign = sign_of(g);
    let tail_start = values.partition_point(|p| p.k < n_max / 10);
    let residual: f64 = values[tail_start..].windows(2).map(|w| (w[1].s - w[0].s).abs()).sum();
    let burn_in = values
        .iter()
        .rposition(|p| sign_of(p.s) != sign)
        .map_or(values[0].k, |j| values[(j + 1).min(values.len() - 1)].k);
    let sign_change = values[tail_start..].iter().any(|p| sign_of(p.s) != sign) || sign == 0;
    let form_degenerate = is_degenerate(&q_matrix(model, last.k, period, gamma, z)?, opts.degeneracy_rel)
        || is_degenerate(&q_tilde_matrix(model, last.k, period, gamma, z)?, opts.degeneracy_rel);

    Ok(TuranTrace {
        offset,
        period,
        gamma,
        z,
        alpha,
        n_max,
        g,
        residual,
        converged: residual <= opts.conv_tol * g.abs(),
        sign,
        burn_in,
        sign_change,
        form_degenerate,
        values,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaEstimate {
    pub gamma: C,
    /// `|γ(block) - γ(block / 10)|`.
    pub drift: f64,
    pub block: usize,
}

/// `γ ≈ a_{nN+i-1} / |a_{nN+i-1}|` at `n = block`, with its drift over one
/// decade of blocks.
pub fn estimate_gamma_at(model: &Jacobi, offset: usize, block: usize) -> Result<GammaEstimate> {
    if block < 10 {
        return Err(Error::InvalidParameter("gamma block must be at least 10".into()));
    }
    let gamma = model.phase(block, offset)?;
    let earlier = model.phase(block / 10, offset)?;
    Ok(GammaEstimate {
        gamma,
        drift: (gamma - earlier).norm(),
        block,
    })
}

pub fn estimate_gamma(model: &Jacobi, offset: usize) -> Result<GammaEstimate> {
    estimate_gamma_at(model, offset, GAMMA_BLOCK)
}
