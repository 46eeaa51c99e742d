//! Λ-set scans along a line `z = γ t` in the complex plane.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::TransferMatrix;
use crate::error::{Error, Result};
use crate::io::{csv_line, num};

/// Default realness tolerance for the Λ predicate.
pub const DEFAULT_REAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanLine {
    /// Unimodular direction `γ`, stored as `[re, im]`.
    pub gamma: [f64; 2],
    pub t0: f64,
    pub t1: f64,
    pub step: f64,
}

impl ScanLine {
    pub fn real(t0: f64, t1: f64, step: f64) -> Self {
        Self {
            gamma: [1.0, 0.0],
            t0,
            t1,
            step,
        }
    }

    pub fn gamma(&self) -> Complex64 {
        Complex64::new(self.gamma[0], self.gamma[1])
    }

    pub fn point(&self, t: f64) -> Complex64 {
        self.gamma() * t
    }

    fn sample_count(&self) -> Result<usize> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scan step {} must be positive",
                self.step
            )));
        }
        if !(self.t0.is_finite() && self.t1.is_finite()) || self.t1 < self.t0 {
            return Err(Error::EmptyRange);
        }
        if ((self.gamma().norm() - 1.0).abs()) > 1e-12 {
            return Err(Error::InvalidParameter("gamma must be unimodular".into()));
        }
        Ok(((self.t1 - self.t0) / self.step + 1e-9).floor() as usize + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    pub t: f64,
    pub tr_re: f64,
    pub tr_im: f64,
    pub det_re: f64,
    pub det_im: f64,
    pub discr_re: f64,
    pub in_lambda: bool,
    /// `|discr| ≤ tol`: a band edge, kept outside Λ.
    pub edge: bool,
}

/// An open interval of the line parameter `t`, clipped to the scan range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub left: f64,
    pub right: f64,
    pub samples: usize,
    /// A single grid point satisfied the predicate.
    pub isolated: bool,
}

impl Interval {
    /// `count` equally spaced points of `[left + m·len, right - m·len]`.
    pub fn interior(&self, count: usize, margin: f64) -> Vec<f64> {
        let len = self.right - self.left;
        let (lo, hi) = (self.left + margin * len, self.right - margin * len);
        match count {
            0 => Vec::new(),
            1 => vec![0.5 * (lo + hi)],
            _ => (0..count)
                .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaScanResult {
    pub line: ScanLine,
    pub tol: f64,
    /// Offset class of the limit family that was scanned, if known.
    #[serde(default)]
    pub offset: Option<usize>,
    pub intervals: Vec<Interval>,
    pub samples: Vec<ScanSample>,
}

impl LambdaScanResult {
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Interior points (as complex `z = γ t`) of every non-isolated interval.
    pub fn interior_points(&self, per_interval: usize, margin: f64) -> Vec<Complex64> {
        self.intervals
            .iter()
            .filter(|iv| !iv.isolated)
            .flat_map(|iv| iv.interior(per_interval, margin))
            .map(|t| self.line.point(t))
            .collect()
    }

    /// Whether the whole scanned range lies in one Λ interval.
    pub fn covers_line(&self) -> bool {
        matches!(self.intervals.as_slice(), [iv] if iv.left == self.line.t0 && iv.right == self.line.t1)
    }

    pub fn to_csv(&self, header: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(h) = header {
            out.push_str(h);
        }
        out.push_str("t,tr_re,tr_im,det_re,det_im,discr_re,in_lambda,edge\n");
        for s in &self.samples {
            out.push_str(&csv_line(&[
                num(s.t),
                num(s.tr_re),
                num(s.tr_im),
                num(s.det_re),
                num(s.det_im),
                num(s.discr_re),
                (s.in_lambda as u8).to_string(),
                (s.edge as u8).to_string(),
            ]));
        }
        out
    }
}

fn classify(t: f64, m: &TransferMatrix, tol: f64) -> ScanSample {
    let (tr, det, discr) = (m.tr(), m.det(), m.discr());
    let real = m.max_imag() <= tol && discr.im.abs() <= tol;
    let edge = discr.norm() <= tol;
    let in_lambda = m.is_finite() && real && det.norm() > tol && discr.re < -tol && !edge;
    ScanSample {
        t,
        tr_re: tr.re,
        tr_im: tr.im,
        det_re: det.re,
        det_im: det.im,
        discr_re: discr.re,
        in_lambda,
        edge,
    }
}

/// Samples `limit(γ t)` on the grid and merges runs of Λ points into
/// intervals. Endpoints are placed halfway between the last outside and the
/// first inside sample.
pub fn lambda_scan<F>(limit: F, line: ScanLine, tol: f64) -> Result<LambdaScanResult>
where
    F: Fn(Complex64) -> TransferMatrix + Sync,
{
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter("realness tolerance must be positive".into()));
    }
    let count = line.sample_count()?;
    let samples: Vec<ScanSample> = (0..count)
        .into_par_iter()
        .map(|k| {
            let t = if k + 1 == count && (line.t1 - line.t0 - k as f64 * line.step).abs() < 1e-9 * line.step {
                line.t1
            } else {
                line.t0 + k as f64 * line.step
            };
            classify(t, &limit(line.point(t)), tol)
        })
        .collect();

    let mut intervals = Vec::new();
    let mut k = 0;
    while k < count {
        if !samples[k].in_lambda {
            k += 1;
            continue;
        }
        let start = k;
        while k < count && samples[k].in_lambda {
            k += 1;
        }
        let end = k - 1;
        let left = if start == 0 {
            line.t0
        } else {
            0.5 * (samples[start - 1].t + samples[start].t)
        };
        let right = if end + 1 == count {
            samples[end].t.max(line.t1)
        } else {
            0.5 * (samples[end].t + samples[end + 1].t)
        };
        intervals.push(Interval {
            left,
            right,
            samples: end - start + 1,
            isolated: start == end,
        });
    }

    Ok(LambdaScanResult {
        line,
        tol,
        offset: None,
        intervals,
        samples,
    })
}
