use rustfft::num_complex::Complex64;

use crate::color::extract_luma;
use crate::error::Result;
use crate::fmath;
use crate::image::PlanarImage;
use crate::resample::resize_plane;

use super::fft::{fft2, forward_real};
use super::filter::{
    auto_downsample_factor, box3_replicate, filter_same_zero, gaussian_1d, scharr_magnitude, Plane,
};
use super::{check_pair, MetricId};

/// SR-SIM parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SrSimConfig {
    /// Saliency similarity constant. Saliency maps are normalized to
    /// `[0, 1]` independently of the sample scale, so this is not rescaled.
    pub c1: f64,
    /// Gradient similarity constant; 225 on the 8-bit scale.
    pub c2: f64,
    pub alpha: f64,
    /// Resize factor applied before computing the spectral residual.
    pub saliency_scale: f64,
    pub gaussian_size: usize,
    pub gaussian_sigma: f64,
}

impl Default for SrSimConfig {
    fn default() -> Self {
        Self {
            c1: 0.40,
            c2: 225.0 / (255.0 * 255.0),
            alpha: 0.50,
            saliency_scale: 0.25,
            gaussian_size: 10,
            gaussian_sigma: 3.8,
        }
    }
}

// Floor on spectral amplitudes so the log of an empty frequency bin stays finite.
const AMPLITUDE_FLOOR: f64 = 1e-12;

/// Spectral-residual saliency of `img`, normalized to `[0, 1]` and resized
/// back to the input size.
pub(crate) fn spectral_residual_saliency(img: &Plane, cfg: &SrSimConfig) -> Plane {
    let sw = fmath::ceil(img.w as f64 * cfg.saliency_scale).max(1.0) as usize;
    let sh = fmath::ceil(img.h as f64 * cfg.saliency_scale).max(1.0) as usize;
    let small = resize_plane(&img.data, img.w, img.h, sw, sh, true);

    let spectrum = forward_real(&small, sw, sh);
    let log_amp = Plane::new(
        sw,
        sh,
        spectrum
            .iter()
            .map(|z| fmath::ln(z.norm() + AMPLITUDE_FLOOR))
            .collect(),
    );
    let local_mean = box3_replicate(&log_amp);
    let mut residual: Vec<Complex64> = spectrum
        .iter()
        .zip(log_amp.data.iter().zip(&local_mean.data))
        .map(|(z, (la, lm))| Complex64::from_polar(fmath::exp(la - lm), z.arg()))
        .collect();
    fft2(&mut residual, sw, sh, true);
    let energy = Plane::new(sw, sh, residual.iter().map(|z| z.norm_sqr()).collect());

    let kernel = gaussian_1d(cfg.gaussian_size, cfg.gaussian_sigma);
    let center = (cfg.gaussian_size - 1) / 2;
    let smooth = filter_same_zero(&energy, &kernel, center);

    let (lo, hi) = smooth
        .data
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let normalized: Vec<f64> = if hi > lo {
        smooth.data.iter().map(|v| (v - lo) / (hi - lo)).collect()
    } else {
        vec![0.0; smooth.data.len()]
    };
    let mut full = resize_plane(&normalized, sw, sh, img.w, img.h, true);
    for v in full.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
    Plane::new(img.w, img.h, full)
}

/// Spectral-residual-based similarity on luma.
pub fn srsim(reference: &PlanarImage, distorted: &PlanarImage) -> Result<f64> {
    srsim_with(reference, distorted, &SrSimConfig::default())
}

pub fn srsim_with(
    reference: &PlanarImage,
    distorted: &PlanarImage,
    cfg: &SrSimConfig,
) -> Result<f64> {
    check_pair(MetricId::SrSim, reference, distorted)?;
    let f = auto_downsample_factor(reference.width(), reference.height());
    let x = Plane::from_image(&extract_luma(reference), 0).block_mean(f);
    let y = Plane::from_image(&extract_luma(distorted), 0).block_mean(f);

    let vs1 = spectral_residual_saliency(&x, cfg);
    let vs2 = spectral_residual_saliency(&y, cfg);
    let g1 = scharr_magnitude(&x);
    let g2 = scharr_magnitude(&y);

    let mut weighted = 0.0;
    let mut weight = 0.0;
    let mut unweighted = 0.0;
    for i in 0..x.data.len() {
        let (s1, s2) = (vs1.data[i], vs2.data[i]);
        let (a, b) = (g1.data[i], g2.data[i]);
        let s_vs = (2.0 * s1 * s2 + cfg.c1) / (s1 * s1 + s2 * s2 + cfg.c1);
        let s_g = (2.0 * a * b + cfg.c2) / (a * a + b * b + cfg.c2);
        let sim = s_vs * fmath::powf(s_g, cfg.alpha);
        let m = s1.max(s2);
        weighted += sim * m;
        weight += m;
        unweighted += sim;
    }
    if weight > 0.0 {
        Ok(weighted / weight)
    } else {
        Ok(unweighted / x.data.len() as f64)
    }
}
