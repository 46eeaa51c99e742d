use serde::{Deserialize, Serialize};

use super::trajectory::EigenvectorTrajectory;
use crate::error::{Error, Result};
use crate::fit::{log_slope, series_verdict, verdict_from_exponent, SeriesFit, DEFAULT_MARGIN};
use crate::sequences::Jacobi;

/// Partial sums recorded at roughly log-spaced checkpoints plus the tail fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    /// `(index, partial sum through index)`.
    pub partial_sums: Vec<(usize, f64)>,
    pub fit: SeriesFit,
}

impl SeriesReport {
    pub fn last_sum(&self) -> f64 {
        self.partial_sums.last().map_or(0.0, |p| p.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffsetSeries {
    pub offset: usize,
    pub series: SeriesReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlemanReport {
    pub period: usize,
    pub n_max: usize,
    /// `Σ_{k<n_max} 1/|a_k|`, fitted on block sums of length `period`.
    pub total: SeriesReport,
    /// `Σ_{n≥1} 1/|a_{nN+i-1}|` for every residue `i` in `0..N`.
    pub offsets: Vec<OffsetSeries>,
}

impl CarlemanReport {
    pub fn offset(&self, i: usize) -> Option<&SeriesReport> {
        self.offsets.iter().find(|o| o.offset == i).map(|o| &o.series)
    }
}

/// Every index below 100, then 90 checkpoints per decade.
fn is_checkpoint(k: usize) -> bool {
    k < 100 || k.is_multiple_of(10usize.pow((k as f64).log10().floor() as u32 - 1))
}

fn report(terms: &[(usize, f64)]) -> SeriesReport {
    let mut sum = 0.0;
    let mut partial_sums = Vec::new();
    for (j, &(k, t)) in terms.iter().enumerate() {
        sum += t;
        if is_checkpoint(k) || j + 1 == terms.len() {
            partial_sums.push((k, sum));
        }
    }
    SeriesReport {
        partial_sums,
        fit: series_verdict(terms, DEFAULT_MARGIN, 0.0),
    }
}

/// Carleman sums of `1/|a_k|` for `k < n_max`, in total and per offset class
/// of the period `N`.
pub fn carleman(model: &Jacobi, period: usize, n_max: usize) -> Result<CarlemanReport> {
    if period == 0 {
        return Err(Error::InvalidParameter("period must be positive".into()));
    }
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let inv: Vec<f64> = (0..n_max)
        .map(|k| model.a(k as i64).map(|a| 1.0 / a.norm()))
        .collect::<Result<_>>()?;

    // Block sums keep the fit meaningful when entries within a period scale
    // differently.
    let blocks: Vec<(usize, f64)> = inv
        .chunks(period)
        .enumerate()
        .filter(|(_, ch)| ch.len() == period)
        .map(|(m, ch)| (m + 1, ch.iter().sum()))
        .collect();
    let mut total = report(&inv.iter().enumerate().map(|(k, &t)| (k + 1, t)).collect::<Vec<_>>());
    total.fit = series_verdict(&blocks, DEFAULT_MARGIN, 0.0);

    let offsets = (0..period)
        .map(|i| {
            let terms: Vec<(usize, f64)> = (1..)
                .map(|n| (n, n * period + i - 1))
                .take_while(|&(_, k)| k < n_max)
                .map(|(n, k)| (n, inv[k]))
                .collect();
            OffsetSeries {
                offset: i,
                series: report(&terms),
            }
        })
        .collect();
    Ok(CarlemanReport {
        period,
        n_max,
        total,
        offsets,
    })
}

/// `Σ (|u_{n-1}|² + |u_n|²) / ‖α‖²` along a stride-1 trajectory.
pub fn l2_tail(trajectory: &EigenvectorTrajectory) -> Result<SeriesReport> {
    if trajectory.stride != 1 {
        return Err(Error::InvalidParameter("l2_tail needs a stride-1 trajectory".into()));
    }
    let ln_alpha = trajectory.alpha_norm_sqr().ln();
    let ln_terms: Vec<(usize, f64)> = trajectory
        .samples
        .iter()
        .map(|s| (s.n, s.ln_energy() - ln_alpha))
        .collect();
    let terms: Vec<(usize, f64)> = ln_terms.iter().map(|&(n, l)| (n, l.exp())).collect();
    let mut rep = report(&terms);
    // fit in log space so that growing solutions do not overflow
    let tail = crate::fit::last_decade(&ln_terms);
    let exponent = log_slope(tail.iter().map(|&(n, l)| (n as f64, l)));
    rep.fit = SeriesFit {
        exponent,
        verdict: verdict_from_exponent(exponent, DEFAULT_MARGIN),
    };
    Ok(rep)
}
