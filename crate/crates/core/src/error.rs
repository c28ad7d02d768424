use alloc::string::String;
use alloc::vec::Vec;

use crate::metrics::MetricId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("dimension mismatch: reference is {reference:?}, distorted is {distorted:?} (width, height, planes)")]
    DimensionMismatch {
        reference: (usize, usize, usize),
        distorted: (usize, usize, usize),
    },

    #[error("{what} needs at least {min}x{min} pixels, got {width}x{height}")]
    TooSmall {
        what: &'static str,
        min: usize,
        width: usize,
        height: usize,
    },

    #[error("expected a {expected} image, got {found}")]
    WrongDomain {
        expected: &'static str,
        found: &'static str,
    },

    #[error("border {border} is too large for a {width}x{height} image")]
    BorderTooLarge {
        border: usize,
        width: usize,
        height: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{0} is not computable by this crate (scores may only be ingested)")]
    MetricUnavailable(MetricId),

    #[error("incomplete design: {}", .0.join("; "))]
    IncompleteDesign(Vec<String>),

    #[error("duplicate record key: {0}")]
    DuplicateRecord(String),

    #[error("record sets do not share keys: {}", .0.join("; "))]
    KeyMismatch(Vec<String>),

    #[error("GLCM is not normalized: entries sum to {0}")]
    Unnormalized(f64),
}
