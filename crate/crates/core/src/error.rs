use thiserror::Error;

use crate::network::ParseError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("zero vector cannot define an axis")]
    ZeroAxis,
    #[error("zero vector cannot define a polarization state")]
    ZeroVector,
    #[error("{what} must be non-negative, got {value}")]
    Negative { what: &'static str, value: f64 },
    #[error("coherence time must be positive, got {0}")]
    NonPositiveCoherence(f64),
    #[error("operator is not Hermitian")]
    NotHermitian,
    #[error("transmitted energy {0:e} is below the detection floor")]
    NearZeroTransmission(f64),
    #[error("post-selection is degenerate: no eigenmode passes")]
    DegeneratePostSelection,
    #[error("pre- and post-selected states are orthogonal (|<phi|psi>|^2 = {0:e})")]
    OrthogonalPostSelection(f64),
    #[error("element {0} is not a filter and cannot appear downstream in a PSP computation")]
    UnsupportedElement(usize),
    #[error("{0} elements exceed the exhaustive-search cap of {1}")]
    TooManyElements(usize, usize),
    #[error("grid size must be at least {min}, got {got}")]
    GridTooSmall { min: usize, got: usize },
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T> = std::result::Result<T, Error>;
