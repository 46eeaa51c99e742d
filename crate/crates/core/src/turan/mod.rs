//! Shifted Turán determinants, their convergence diagnostics and twisted
//! total variation.

mod forms;
mod trace;
mod variation;

pub use forms::{
    c_matrix, is_degenerate, q_form, q_matrix, q_tilde_form, q_tilde_matrix, turan, turan_intro, turan_tilde,
    RealValue, HARD_RESIDUE,
};
pub use trace::{
    estimate_gamma, estimate_gamma_at, turan_trace, turan_trace_with, GammaEstimate, TraceOptions, TracePoint,
    TraceSummary, TuranTrace, GAMMA_BLOCK,
};
pub use variation::{
    plain_variation, scalar_variation, transfer_variation, twisted_variation, ScalarSelector, Twist,
    TwistedVariationReport,
};
