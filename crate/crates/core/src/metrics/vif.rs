use crate::error::Result;
use crate::fmath;
use crate::image::PlanarImage;

use super::filter::{filter_valid, gaussian_1d, Plane};
use super::{check_pair, MetricId};

/// Pixel-domain VIF parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VifConfig {
    /// HVS noise variance; 2 on the 8-bit scale.
    pub noise_variance: f64,
    /// Variance floor below which a local estimate counts as zero; 1e-10 on the 8-bit scale.
    pub variance_floor: f64,
    pub scales: usize,
}

impl Default for VifConfig {
    fn default() -> Self {
        Self {
            noise_variance: 2.0 / (255.0 * 255.0),
            variance_floor: 1e-10 / (255.0 * 255.0),
            scales: 4,
        }
    }
}

/// Pixel-domain multi-scale visual information fidelity of `distorted`
/// relative to `reference`, on luma. Not symmetric.
pub fn vif(reference: &PlanarImage, distorted: &PlanarImage) -> Result<f64> {
    vif_with(reference, distorted, &VifConfig::default())
}

pub fn vif_with(reference: &PlanarImage, distorted: &PlanarImage, cfg: &VifConfig) -> Result<f64> {
    check_pair(MetricId::Vif, reference, distorted)?;
    let mut x = Plane::from_image(&crate::color::extract_luma(reference), 0);
    let mut y = Plane::from_image(&crate::color::extract_luma(distorted), 0);
    let identical = x == y;
    let mut num = 0.0;
    let mut den = 0.0;
    for scale in 0..cfg.scales {
        // Window sides 17, 9, 5, 3 for the canonical four scales.
        let n = (1usize << (cfg.scales - scale)) + 1;
        let window = gaussian_1d(n, n as f64 / 5.0);
        if scale > 0 {
            x = filter_valid(&x, &window).subsample(2);
            y = filter_valid(&y, &window).subsample(2);
        }
        let (sn, sd) = scale_terms(&x, &y, &window, cfg);
        num += sn;
        den += sd;
    }
    if den == 0.0 {
        // Flat reference: no information to preserve.
        return Ok(if identical { 1.0 } else { 0.0 });
    }
    Ok(num / den)
}

fn scale_terms(x: &Plane, y: &Plane, window: &[f64], cfg: &VifConfig) -> (f64, f64) {
    if x.is_empty() {
        return (0.0, 0.0);
    }
    let mu1 = filter_valid(x, window);
    let mu2 = filter_valid(y, window);
    if mu1.is_empty() {
        return (0.0, 0.0);
    }
    let e11 = filter_valid(&x.map(|v| v * v), window);
    let e22 = filter_valid(&y.map(|v| v * v), window);
    let e12 = filter_valid(&x.zip_map(y, |a, b| a * b), window);
    let eps = cfg.variance_floor;
    let sn = cfg.noise_variance;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..mu1.data.len() {
        let (m1, m2) = (mu1.data[i], mu2.data[i]);
        let mut s1 = (e11.data[i] - m1 * m1).max(0.0);
        let s2 = (e22.data[i] - m2 * m2).max(0.0);
        let s12 = e12.data[i] - m1 * m2;
        let mut g = s12 / (s1 + eps);
        let mut sv = s2 - g * s12;
        if s1 < eps {
            g = 0.0;
            sv = s2;
            s1 = 0.0;
        }
        if s2 < eps {
            g = 0.0;
            sv = 0.0;
        }
        if g < 0.0 {
            sv = s2;
            g = 0.0;
        }
        if sv <= eps {
            sv = eps;
        }
        num += fmath::log10(1.0 + g * g * s1 / (sv + sn));
        den += fmath::log10(1.0 + s1 / sn);
    }
    (num, den)
}
