//! Measurement kernels for arbitrary-scale super-resolution evaluation.
//!
//! Everything here is pure computation over in-memory rasters and score
//! records: full-reference quality metrics, the bicubic degradation
//! pipeline, the hybrid pixel-gradient loss, GLCM texture statistics and
//! Borda-count rank aggregation. File formats and the command-line harness
//! live in the `sreval` crate.
//!
//! The crate is `no_std` (with `alloc`) when built without the default
//! `std` feature. FSIM and SR-SIM need a 2-D FFT and are only available
//! with `std`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod error;
mod fmath;

pub mod color;
pub mod image;
pub mod loss;
pub mod metrics;
pub mod ranking;
pub mod resample;
pub mod texture;

pub use error::{Error, Result};
pub use image::{Domain, PlanarImage};
pub use metrics::{EvalDomain, MetricId, MetricResult, Polarity};
