//! Spectra of finite sections via the argument principle.
mod charpoly;
mod roots;

pub use charpoly::{charpoly, CharPolyValue, Section};
pub use roots::{
    finite_section, winding_count, BoxRegion, Root, SectionOptions, SpectrumEstimate, DEFAULT_BUDGET, MAX_DIM,
};
