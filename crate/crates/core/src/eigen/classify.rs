use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bounds::{bound_ratio, LnRange, BASIS};
use super::series::{carleman, l2_tail, CarlemanReport};
use super::trajectory::evolve;
use crate::error::{Error, Result};
use crate::fit::SeriesVerdict;
use crate::sequences::Jacobi;
use crate::transfer::{lambda_scan, LambdaScanResult, LimitFamily, ScanLine};

type C = Complex64;

/// Interior z-values per offset used as evidence.
pub const EVIDENCE_POINTS: usize = 3;
/// Distance from the interval endpoints, as a fraction of its length.
pub const EVIDENCE_MARGIN: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Proper,
    Improper,
    Inconclusive,
}

/// A predicted spectral statement. Never a proof: `evidence` is always
/// `"numerical"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub label: String,
    /// Where the statement applies, e.g. the Λ intervals `K` is drawn from.
    pub domain: Option<String>,
    pub evidence: String,
    /// Which numerically checked hypothesis the claim rests on.
    pub hypothesis: String,
}

impl Claim {
    fn new(label: &str, domain: Option<String>, hypothesis: &str) -> Self {
        Self {
            label: label.into(),
            domain,
            evidence: "numerical".into(),
            hypothesis: hypothesis.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OffsetLambda {
    pub offset: usize,
    pub gamma: [f64; 2],
    /// `(left, right)` of every non-isolated Λ interval.
    pub intervals: Vec<(f64, f64)>,
    pub covers_line: bool,
    pub constant_family: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L2Evidence {
    pub alpha: [C; 2],
    pub exponent: Option<f64>,
    pub verdict: SeriesVerdict,
    pub partial_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evidence {
    pub offset: usize,
    pub z: C,
    /// Bound ratio `sup / inf` over both bases.
    pub spread: f64,
    pub slope: Option<f64>,
    pub global: LnRange,
    pub tail: LnRange,
    pub l2: Vec<L2Evidence>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub period: usize,
    pub n_max: usize,
    pub carleman: CarlemanReport,
    pub lambda: Vec<OffsetLambda>,
    pub verdict: Verdict,
    pub claims: Vec<Claim>,
    pub evidence: Vec<Evidence>,
}

impl ClassificationReport {
    pub fn has_claim(&self, label: &str) -> bool {
        self.claims.iter().any(|c| c.label == label)
    }
}

fn describe(lam: &OffsetLambda) -> String {
    let ivs: Vec<String> = lam.intervals.iter().map(|(l, r)| format!("({l:.6}, {r:.6})")).collect();
    format!(
        "offset {}: γ = ({}, {}), t ∈ {}",
        lam.offset,
        lam.gamma[0],
        lam.gamma[1],
        ivs.join(" ∪ ")
    )
}

fn evidence_at(model: &Jacobi, period: usize, offset: usize, z: C, n_max: usize) -> Result<Evidence> {
    let bound = bound_ratio(model, offset, period, z, n_max)?;
    let l2 = BASIS
        .iter()
        .map(|&alpha| {
            let t = evolve(model, z, alpha, n_max, 1)?;
            let rep = l2_tail(&t)?;
            Ok(L2Evidence {
                alpha,
                exponent: rep.fit.exponent,
                verdict: rep.fit.verdict,
                partial_sum: rep.last_sum(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Evidence {
        offset,
        z,
        spread: bound.spread(),
        slope: bound.slope,
        global: bound.global,
        tail: bound.tail,
        l2,
    })
}

/// Combines Carleman verdicts with Λ scans (one per offset, `scan.offset`
/// set) into a proper/improper verdict with predicted spectral claims.
pub fn classify(
    model: &Jacobi,
    period: usize,
    scans: &[LambdaScanResult],
    n_max: usize,
) -> Result<ClassificationReport> {
    let carleman = carleman(model, period, n_max)?;
    let mut lambda = Vec::with_capacity(scans.len());
    for scan in scans {
        let offset = scan
            .offset
            .ok_or_else(|| Error::InvalidParameter("Λ scan without offset".into()))?;
        let constant_family = LimitFamily::for_model(model, offset).is_ok_and(|f| f.is_constant());
        lambda.push(OffsetLambda {
            offset,
            gamma: scan.line.gamma,
            intervals: scan
                .intervals
                .iter()
                .filter(|iv| !iv.isolated)
                .map(|iv| (iv.left, iv.right))
                .collect(),
            covers_line: scan.covers_line(),
            constant_family,
        });
    }

    let required: Vec<usize> = LimitFamily::offsets(model).map(|r| r.collect()).unwrap_or_default();
    let all_nonempty = !required.is_empty()
        && required
            .iter()
            .all(|i| lambda.iter().any(|l| l.offset == *i && !l.intervals.is_empty()));
    let diverging: Vec<&OffsetLambda> = lambda
        .iter()
        .filter(|l| {
            !l.intervals.is_empty()
                && carleman
                    .offset(l.offset % period)
                    .is_some_and(|s| s.fit.verdict == SeriesVerdict::Diverging)
        })
        .collect();

    let mut claims = Vec::new();
    let verdict = if let Some(first) = diverging.first() {
        let hyp = format!("Carleman sum diverging on offset {} and nonempty Λ", first.offset);
        if first.constant_family && first.covers_line {
            let dom = Some(format!("γ = ({}, {})", first.gamma[0], first.gamma[1]));
            claims.push(Claim::new("γℝ ∩ σ_p(A) = ∅", dom.clone(), &hyp));
            claims.push(Claim::new("γℝ ⊂ σ(A)", dom, &hyp));
        } else {
            let dom = Some(format!("compact K ⊂ Λ, {}", describe(first)));
            claims.push(Claim::new("K ∩ σ_p(A) = ∅", dom.clone(), &hyp));
            claims.push(Claim::new("K ⊂ σ(A)", dom, &hyp));
        }
        Verdict::Proper
    } else if carleman.total.fit.verdict == SeriesVerdict::Converging && all_nonempty {
        let hyp = "Carleman sum converging and nonempty Λ for every offset";
        for label in ["σ_ess(A) = ∅", "σ(A) = ℂ", "σ_p(A_max) = ℂ"] {
            claims.push(Claim::new(label, None, hyp));
        }
        Verdict::Improper
    } else {
        Verdict::Inconclusive
    };

    let points: Vec<(usize, C)> = lambda
        .iter()
        .zip(scans)
        .flat_map(|(l, scan)| {
            let widest = scan
                .intervals
                .iter()
                .filter(|iv| !iv.isolated)
                .max_by(|a, b| (a.right - a.left).total_cmp(&(b.right - b.left)));
            widest
                .map(|iv| iv.interior(EVIDENCE_POINTS, EVIDENCE_MARGIN))
                .unwrap_or_default()
                .into_iter()
                .map(move |t| (l.offset, scan.line.point(t)))
        })
        .collect();
    let evidence = points
        .par_iter()
        .map(|&(offset, z)| evidence_at(model, period, offset, z, n_max))
        .collect::<Result<Vec<_>>>()?;

    Ok(ClassificationReport {
        period,
        n_max,
        carleman,
        lambda,
        verdict,
        claims,
        evidence,
    })
}

/// Scans every offset's limit family along `line` and classifies.
pub fn classify_model(model: &Jacobi, line: ScanLine, tol: f64, n_max: usize) -> Result<ClassificationReport> {
    let scans = LimitFamily::offsets(model)?
        .map(|i| {
            let family = LimitFamily::for_model(model, i)?;
            let mut scan = lambda_scan(|z| family.at(z), line, tol)?;
            scan.offset = Some(i);
            Ok(scan)
        })
        .collect::<Result<Vec<_>>>()?;
    classify(model, model.period(), &scans, n_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sequences::{CoefficientModel, PeriodicPair};
    use crate::transfer::DEFAULT_REAL_TOL;

    fn power_law(lambda: f64) -> Jacobi {
        Jacobi::new(CoefficientModel::PowerLawExample {
            base: PeriodicPair::real(&[1.0], &[0.0]).unwrap(),
            lambda,
            mu: 0.2,
        })
        .unwrap()
    }

    #[test]
    fn free_is_proper_on_the_band() {
        let free = Jacobi::new(CoefficientModel::free()).unwrap();
        let rep = classify_model(&free, ScanLine::real(-3.0, 3.0, 1e-2), DEFAULT_REAL_TOL, 10_000).unwrap();
        assert_eq!(rep.verdict, Verdict::Proper);
        assert!(rep.has_claim("K ∩ σ_p(A) = ∅") && rep.has_claim("K ⊂ σ(A)"));
        assert!(rep.claims.iter().all(|c| c.evidence == "numerical"));
        let (l, r) = rep.lambda[0].intervals[0];
        assert!((l + 2.0).abs() < 1e-2 && (r - 2.0).abs() < 1e-2);
        assert_eq!(rep.evidence.len(), 3);
        assert!(rep.evidence.iter().all(|e| e.spread < 10.0));
    }

    #[test]
    fn power_law_dichotomy() {
        let line = ScanLine::real(-2.0, 2.0, 0.5);
        let proper = classify_model(&power_law(0.7), line, DEFAULT_REAL_TOL, 20_000).unwrap();
        assert_eq!(proper.verdict, Verdict::Proper);
        assert!(proper.has_claim("γℝ ∩ σ_p(A) = ∅") && proper.has_claim("γℝ ⊂ σ(A)"));

        let improper = classify_model(&power_law(1.5), line, DEFAULT_REAL_TOL, 20_000).unwrap();
        assert_eq!(improper.verdict, Verdict::Improper);
        for label in ["σ_ess(A) = ∅", "σ(A) = ℂ", "σ_p(A_max) = ℂ"] {
            assert!(improper.has_claim(label));
        }
        assert_eq!(improper.carleman.total.fit.verdict, SeriesVerdict::Converging);
    }

    #[test]
    fn missing_offsets_are_inconclusive() {
        let m = Jacobi::new(CoefficientModel::PeriodicallyModulated {
            base: PeriodicPair::real(&[1.0, 1.0], &[0.5, 0.5]).unwrap(),
            modulator: crate::sequences::Expr::pow(1.5),
        })
        .unwrap();
        let family = LimitFamily::for_model(&m, 0).unwrap();
        let mut scan = lambda_scan(|z| family.at(z), ScanLine::real(-1.0, 1.0, 0.5), DEFAULT_REAL_TOL).unwrap();
        scan.offset = Some(0);
        let rep = classify(&m, 2, &[scan], 10_000).unwrap();
        assert_eq!(rep.verdict, Verdict::Inconclusive);
        assert!(rep.claims.is_empty());
    }
}
