//! Generalised eigenvectors: evolution, boundedness ratios, summability and
//! spectral classification.

mod bounds;
mod classify;
mod series;
mod trajectory;

pub use bounds::{bound_ratio, bound_ratio_window, ln_ratios, BasisBound, BoundRatioReport, LnRange, BASIS};
pub use classify::{
    classify, classify_model, Claim, ClassificationReport, Evidence, L2Evidence, OffsetLambda, Verdict,
    EVIDENCE_MARGIN, EVIDENCE_POINTS,
};
pub use series::{carleman, l2_tail, CarlemanReport, OffsetSeries, SeriesReport};
pub(crate) use trajectory::pow2;
pub use trajectory::{
    eigen_seed, evolve, evolve_with, walk, EigenvectorTrajectory, EvolveOptions, Sample, RESCALE_EXP,
};
