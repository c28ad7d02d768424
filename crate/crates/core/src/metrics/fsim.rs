use crate::color::extract_luma;
use crate::error::Result;
use crate::image::PlanarImage;

use super::filter::{auto_downsample_factor, scharr_magnitude, Plane};
use super::phase::{phase_congruency_plane, PhaseCongruencyConfig};
use super::{check_pair, MetricId};

/// FSIM parameters (luma variant).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FsimConfig {
    pub phase: PhaseCongruencyConfig,
    /// Phase congruency similarity constant.
    pub t1: f64,
    /// Gradient similarity constant; 160 on the 8-bit scale.
    pub t2: f64,
}

impl Default for FsimConfig {
    fn default() -> Self {
        Self {
            phase: PhaseCongruencyConfig::default(),
            t1: 0.85,
            t2: 160.0 / (255.0 * 255.0),
        }
    }
}

/// Feature similarity index on luma.
pub fn fsim(reference: &PlanarImage, distorted: &PlanarImage) -> Result<f64> {
    fsim_with(reference, distorted, &FsimConfig::default())
}

pub fn fsim_with(
    reference: &PlanarImage,
    distorted: &PlanarImage,
    cfg: &FsimConfig,
) -> Result<f64> {
    check_pair(MetricId::Fsim, reference, distorted)?;
    let f = auto_downsample_factor(reference.width(), reference.height());
    let x = Plane::from_image(&extract_luma(reference), 0).block_mean(f);
    let y = Plane::from_image(&extract_luma(distorted), 0).block_mean(f);

    let pc1 = phase_congruency_plane(&x, &cfg.phase);
    let pc2 = phase_congruency_plane(&y, &cfg.phase);
    let g1 = scharr_magnitude(&x);
    let g2 = scharr_magnitude(&y);

    let mut weighted = 0.0;
    let mut weight = 0.0;
    let mut unweighted = 0.0;
    for i in 0..x.data.len() {
        let (p1, p2) = (pc1.data[i], pc2.data[i]);
        let (a, b) = (g1.data[i], g2.data[i]);
        let s_pc = (2.0 * p1 * p2 + cfg.t1) / (p1 * p1 + p2 * p2 + cfg.t1);
        let s_g = (2.0 * a * b + cfg.t2) / (a * a + b * b + cfg.t2);
        let pcm = p1.max(p2);
        weighted += s_pc * s_g * pcm;
        weight += pcm;
        unweighted += s_pc * s_g;
    }
    if weight > 0.0 {
        Ok(weighted / weight)
    } else {
        // No phase structure anywhere: fall back to uniform pooling.
        Ok(unweighted / x.data.len() as f64)
    }
}
