//! Full-reference image quality metrics.
//!
//! All constants from the original metric definitions that assume 8-bit
//! samples are rescaled to the `[0, 1]` sample domain used here. PSNR and
//! SSIM accept multi-plane input and average over planes; GMSD, FSIM, VIF
//! and SR-SIM are single-channel and always run on luma.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::color::extract_luma;
use crate::error::{Error, Result};
use crate::image::PlanarImage;

pub(crate) mod filter;
mod gmsd;
mod psnr;
mod ssim;
mod vif;

#[cfg(feature = "std")]
mod fft;
#[cfg(feature = "std")]
mod fsim;
#[cfg(feature = "std")]
mod phase;
#[cfg(feature = "std")]
mod srsim;

pub use gmsd::{gmsd, GMSD_C};
pub use psnr::psnr;
pub use ssim::{ssim, SsimConfig};
pub use vif::{vif, VifConfig};

#[cfg(feature = "std")]
pub use fsim::{fsim, FsimConfig};
#[cfg(feature = "std")]
pub use phase::{phase_congruency, PhaseCongruencyConfig};
#[cfg(feature = "std")]
pub use srsim::{srsim, SrSimConfig};

/// Whether larger metric values mean better quality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarity {
    HigherBetter,
    LowerBetter,
}

impl Polarity {
    pub fn flipped(self) -> Self {
        match self {
            Polarity::HigherBetter => Polarity::LowerBetter,
            Polarity::LowerBetter => Polarity::HigherBetter,
        }
    }
}

/// Metric identity. `Lpips` is never computed here; it exists so that
/// externally produced LPIPS scores can be ingested and ranked with the
/// right polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricId {
    Psnr,
    Ssim,
    Gmsd,
    Fsim,
    Vif,
    SrSim,
    Lpips,
}

impl MetricId {
    /// The metrics this crate can compute, in canonical report order.
    pub const COMPUTABLE: [MetricId; 6] = [
        MetricId::Psnr,
        MetricId::Ssim,
        MetricId::Gmsd,
        MetricId::Fsim,
        MetricId::Vif,
        MetricId::SrSim,
    ];

    pub fn polarity(self) -> Polarity {
        match self {
            MetricId::Gmsd | MetricId::Lpips => Polarity::LowerBetter,
            _ => Polarity::HigherBetter,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MetricId::Psnr => "PSNR",
            MetricId::Ssim => "SSIM",
            MetricId::Gmsd => "GMSD",
            MetricId::Fsim => "FSIM",
            MetricId::Vif => "VIF",
            MetricId::SrSim => "SRSIM",
            MetricId::Lpips => "LPIPS",
        }
    }

    /// Smallest width and height the metric accepts.
    pub fn min_side(self) -> usize {
        match self {
            MetricId::Psnr => 1,
            MetricId::Ssim => ssim::WINDOW,
            MetricId::Gmsd => 4,
            MetricId::Fsim | MetricId::SrSim | MetricId::Vif => 32,
            MetricId::Lpips => 1,
        }
    }

    /// Whether the metric can run on all planes of an RGB image.
    pub fn supports_rgb(self) -> bool {
        matches!(self, MetricId::Psnr | MetricId::Ssim)
    }

    pub fn is_computable(self) -> bool {
        match self {
            MetricId::Lpips => false,
            MetricId::Fsim | MetricId::SrSim => cfg!(feature = "std"),
            _ => true,
        }
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let upper: String = s
            .chars()
            .filter(|c| *c != '-' && *c != '_')
            .map(|c| c.to_ascii_uppercase())
            .collect();
        Ok(match upper.as_str() {
            "PSNR" => MetricId::Psnr,
            "SSIM" => MetricId::Ssim,
            "GMSD" => MetricId::Gmsd,
            "FSIM" => MetricId::Fsim,
            "VIF" | "VIFP" => MetricId::Vif,
            "SRSIM" => MetricId::SrSim,
            "LPIPS" => MetricId::Lpips,
            _ => {
                return Err(Error::InvalidParameter(alloc::format!(
                    "unknown metric {s:?}"
                )))
            }
        })
    }
}

/// Which planes a pair is evaluated on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EvalDomain {
    Rgb,
    Y,
}

impl EvalDomain {
    pub fn name(self) -> &'static str {
        match self {
            EvalDomain::Rgb => "rgb",
            EvalDomain::Y => "y",
        }
    }
}

/// One metric value. PSNR of identical images is `f64::INFINITY`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricResult {
    pub metric: MetricId,
    pub value: f64,
    pub domain: EvalDomain,
}

pub(crate) fn check_pair(
    metric: MetricId,
    reference: &PlanarImage,
    distorted: &PlanarImage,
) -> Result<()> {
    reference.check_same_shape(distorted)?;
    let min = metric.min_side();
    if reference.width() < min || reference.height() < min {
        return Err(Error::TooSmall {
            what: metric.name(),
            min,
            width: reference.width(),
            height: reference.height(),
        });
    }
    Ok(())
}

/// Computes one metric on an already prepared pair.
pub fn compute(metric: MetricId, reference: &PlanarImage, distorted: &PlanarImage) -> Result<f64> {
    match metric {
        MetricId::Psnr => psnr(reference, distorted, 1.0),
        MetricId::Ssim => ssim(reference, distorted),
        MetricId::Gmsd => gmsd(reference, distorted),
        MetricId::Vif => vif(reference, distorted),
        #[cfg(feature = "std")]
        MetricId::Fsim => fsim(reference, distorted),
        #[cfg(feature = "std")]
        MetricId::SrSim => srsim(reference, distorted),
        other => Err(Error::MetricUnavailable(other)),
    }
}

/// Crops `border` pixels, converts to luma when `domain` is `Y`, and runs
/// each requested metric. Luma-only metrics convert internally and are
/// reported with domain `Y` whatever `domain` was requested.
pub fn evaluate_pair(
    reference: &PlanarImage,
    distorted: &PlanarImage,
    metrics: &[MetricId],
    domain: EvalDomain,
    border: usize,
) -> Result<Vec<MetricResult>> {
    reference.check_same_shape(distorted)?;
    if metrics.is_empty() {
        return Ok(Vec::new());
    }
    let mut reference = reference.crop_border(border)?;
    let mut distorted = distorted.crop_border(border)?;
    if domain == EvalDomain::Y {
        reference = extract_luma(&reference);
        distorted = extract_luma(&distorted);
    }
    let mut luma: Option<(PlanarImage, PlanarImage)> = None;
    metrics
        .iter()
        .map(|&metric| {
            if metric.supports_rgb() {
                let value = compute(metric, &reference, &distorted)?;
                let used = if reference.planes() == 1 {
                    EvalDomain::Y
                } else {
                    EvalDomain::Rgb
                };
                return Ok(MetricResult {
                    metric,
                    value,
                    domain: used,
                });
            }
            let (r, d) =
                luma.get_or_insert_with(|| (extract_luma(&reference), extract_luma(&distorted)));
            let value = compute(metric, r, d)?;
            Ok(MetricResult {
                metric,
                value,
                domain: EvalDomain::Y,
            })
        })
        .collect()
}
