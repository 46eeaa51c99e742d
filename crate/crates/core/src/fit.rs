//! Tail-exponent heuristics for deciding summability from finitely many terms.
//!
//! A series `Σ t_n` is judged by the least-squares slope `p` of `ln t_n`
//! against `ln n` over the last decade of indices: `p < -1 - margin` reads as
//! converging, `p > -1 + margin` as diverging. A slope within
//! [`HARMONIC_BAND`] of `-1` is treated as a harmonic (logarithmic) divergence.
//! Everything else is inconclusive.

use serde::{Deserialize, Serialize};

pub const DEFAULT_MARGIN: f64 = 0.1;
pub const HARMONIC_BAND: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesVerdict {
    Diverging,
    Converging,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesFit {
    /// Fitted tail exponent; `None` when the tail vanished identically.
    pub exponent: Option<f64>,
    pub verdict: SeriesVerdict,
}

/// Least-squares slope of `ln y` against `ln x` over points with `x, y > 0`.
pub fn loglog_slope(points: impl IntoIterator<Item = (f64, f64)>) -> Option<f64> {
    loglog_slope_raw(
        points
            .into_iter()
            .filter(|&(x, y)| x > 0.0 && y > 0.0)
            .map(|(x, y)| (x.ln(), y.ln())),
    )
}

/// Same as [`loglog_slope`] but with `ln y` supplied directly, for values
/// that would overflow.
pub fn log_slope(points: impl IntoIterator<Item = (f64, f64)>) -> Option<f64> {
    loglog_slope_raw(points.into_iter().filter(|(x, _)| *x > 0.0).map(|(x, ly)| (x.ln(), ly)))
}

fn loglog_slope_raw(points: impl Iterator<Item = (f64, f64)>) -> Option<f64> {
    let (mut n, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (lx, ly) in points {
        if !ly.is_finite() {
            continue;
        }
        n += 1.0;
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    let den = n * sxx - sx * sx;
    (n >= 2.0 && den > 0.0).then(|| (n * sxy - sx * sy) / den)
}

/// Points of the last decade `index ≥ last / 10`.
pub fn last_decade<T: Copy>(terms: &[(usize, T)]) -> &[(usize, T)] {
    let Some(&(last, _)) = terms.last() else {
        return terms;
    };
    let start = terms.partition_point(|(n, _)| *n < last / 10);
    &terms[start..]
}

/// Summability verdict for the series with terms `(index, t_index)`.
/// Terms not exceeding `zero_floor` count as exact zeros.
pub fn series_verdict(terms: &[(usize, f64)], margin: f64, zero_floor: f64) -> SeriesFit {
    let tail = last_decade(terms);
    let positive: Vec<(f64, f64)> = tail
        .iter()
        .filter(|(_, t)| *t > zero_floor)
        .map(|&(n, t)| (n as f64, t))
        .collect();
    if positive.is_empty() {
        let verdict = if tail.is_empty() {
            SeriesVerdict::Inconclusive
        } else {
            SeriesVerdict::Converging
        };
        return SeriesFit {
            exponent: None,
            verdict,
        };
    }
    let exponent = loglog_slope(positive.iter().copied());
    SeriesFit {
        exponent,
        verdict: verdict_from_exponent(exponent, margin),
    }
}

pub fn verdict_from_exponent(exponent: Option<f64>, margin: f64) -> SeriesVerdict {
    match exponent {
        Some(p) if p < -1.0 - margin => SeriesVerdict::Converging,
        Some(p) if p > -1.0 + margin => SeriesVerdict::Diverging,
        Some(p) if (p + 1.0).abs() <= HARMONIC_BAND => SeriesVerdict::Diverging,
        _ => SeriesVerdict::Inconclusive,
    }
}
