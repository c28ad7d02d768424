use crate::error::Result;
use crate::image::PlanarImage;

use super::filter::{filter_valid, gaussian_1d, Plane};
use super::{check_pair, MetricId};

pub(crate) const WINDOW: usize = 11;

/// SSIM parameters. Defaults: 11x11 Gaussian window with sigma 1.5,
/// `K1 = 0.01`, `K2 = 0.03`, dynamic range 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SsimConfig {
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
    pub dynamic_range: f64,
}

impl Default for SsimConfig {
    fn default() -> Self {
        Self {
            sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            dynamic_range: 1.0,
        }
    }
}

/// Mean local SSIM over every window position that fits inside the image
/// (no padding), averaged over planes.
pub fn ssim(reference: &PlanarImage, distorted: &PlanarImage) -> Result<f64> {
    ssim_with(reference, distorted, &SsimConfig::default())
}

pub fn ssim_with(
    reference: &PlanarImage,
    distorted: &PlanarImage,
    cfg: &SsimConfig,
) -> Result<f64> {
    check_pair(MetricId::Ssim, reference, distorted)?;
    let window = gaussian_1d(WINDOW, cfg.sigma);
    let c1 = (cfg.k1 * cfg.dynamic_range) * (cfg.k1 * cfg.dynamic_range);
    let c2 = (cfg.k2 * cfg.dynamic_range) * (cfg.k2 * cfg.dynamic_range);
    let planes = reference.planes();
    let total: f64 = (0..planes)
        .map(|p| {
            let x = Plane::from_image(reference, p);
            let y = Plane::from_image(distorted, p);
            plane_ssim(&x, &y, &window, c1, c2)
        })
        .sum();
    Ok(total / planes as f64)
}

fn plane_ssim(x: &Plane, y: &Plane, window: &[f64], c1: f64, c2: f64) -> f64 {
    let mu_x = filter_valid(x, window);
    let mu_y = filter_valid(y, window);
    let e_xx = filter_valid(&x.map(|v| v * v), window);
    let e_yy = filter_valid(&y.map(|v| v * v), window);
    let e_xy = filter_valid(&x.zip_map(y, |a, b| a * b), window);
    let n = mu_x.data.len();
    let mut sum = 0.0;
    for i in 0..n {
        let (mx, my) = (mu_x.data[i], mu_y.data[i]);
        let sxx = e_xx.data[i] - mx * mx;
        let syy = e_yy.data[i] - my * my;
        let sxy = e_xy.data[i] - mx * my;
        sum += ((2.0 * mx * my + c1) * (2.0 * sxy + c2))
            / ((mx * mx + my * my + c1) * (sxx + syy + c2));
    }
    sum / n as f64
}
