//! GLCM (Haralick) texture statistics and edge/corner density maps.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::color::extract_luma;
use crate::error::{Error, Result};
use crate::fmath;
use crate::image::{Domain, PlanarImage};
use crate::metrics::filter::{gaussian_blur_replicate, sobel_replicate, Plane};

/// Offset direction of a co-occurrence pair; 45 degrees points up and to the right.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum GlcmAngle {
    #[default]
    Deg0,
    Deg45,
    Deg90,
    Deg135,
}

impl GlcmAngle {
    pub fn from_degrees(deg: u32) -> Result<Self> {
        Ok(match deg {
            0 => GlcmAngle::Deg0,
            45 => GlcmAngle::Deg45,
            90 => GlcmAngle::Deg90,
            135 => GlcmAngle::Deg135,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "GLCM angle {deg} is not one of 0, 45, 90, 135"
                )))
            }
        })
    }

    pub fn degrees(self) -> u32 {
        match self {
            GlcmAngle::Deg0 => 0,
            GlcmAngle::Deg45 => 45,
            GlcmAngle::Deg90 => 90,
            GlcmAngle::Deg135 => 135,
        }
    }

    /// `(row, column)` step for `distance`.
    pub fn offset(self, distance: usize) -> (isize, isize) {
        let d = distance as isize;
        match self {
            GlcmAngle::Deg0 => (0, d),
            GlcmAngle::Deg45 => (-d, d),
            GlcmAngle::Deg90 => (-d, 0),
            GlcmAngle::Deg135 => (-d, -d),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GlcmConfig {
    pub levels: usize,
    pub distance: usize,
    pub angle: GlcmAngle,
    pub symmetric: bool,
    pub normalize: bool,
}

impl Default for GlcmConfig {
    fn default() -> Self {
        Self {
            levels: 256,
            distance: 1,
            angle: GlcmAngle::Deg0,
            symmetric: false,
            normalize: true,
        }
    }
}

impl GlcmConfig {
    pub fn validate(&self) -> Result<()> {
        if !(2..=256).contains(&self.levels) || self.distance == 0 {
            return Err(Error::InvalidParameter(format!(
                "GLCM levels {} must be in 2..=256 and distance {} >= 1",
                self.levels, self.distance
            )));
        }
        Ok(())
    }
}

/// Gray level of a `[0, 1]` sample: `floor(v (levels - 1) + 0.5)`.
pub fn quantize(v: f64, levels: usize) -> usize {
    let q = fmath::round_half_up(v * (levels - 1) as f64);
    (q.max(0.0) as usize).min(levels - 1)
}

/// A `levels x levels` co-occurrence matrix, row index = reference pixel level.
#[derive(Clone, Debug, PartialEq)]
pub struct Glcm {
    levels: usize,
    data: Vec<f64>,
}

impl Glcm {
    pub fn from_entries(levels: usize, data: Vec<f64>) -> Result<Self> {
        if levels == 0 || data.len() != levels * levels {
            return Err(Error::InvalidParameter(format!(
                "{} entries for a {levels}x{levels} GLCM",
                data.len()
            )));
        }
        Ok(Self { levels, data })
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.levels + j]
    }

    pub fn total(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn transpose(&self) -> Self {
        let n = self.levels;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[j * n + i] = self.data[i * n + j];
            }
        }
        Self { levels: n, data }
    }
}

/// Co-occurrence counts of `(level at p, level at p + offset)` over a
/// single-plane image.
pub fn glcm(img: &PlanarImage, cfg: &GlcmConfig) -> Result<Glcm> {
    cfg.validate()?;
    if img.domain() != Domain::Luma {
        return Err(Error::WrongDomain {
            expected: Domain::Luma.name(),
            found: img.domain().name(),
        });
    }
    let (w, h) = (img.width() as isize, img.height() as isize);
    let (dr, dc) = cfg.angle.offset(cfg.distance);
    if dr.abs() >= h || dc.abs() >= w {
        return Err(Error::TooSmall {
            what: "GLCM offset",
            min: cfg.distance + 1,
            width: img.width(),
            height: img.height(),
        });
    }
    let n = cfg.levels;
    let levels: Vec<usize> = img.plane(0).iter().map(|&v| quantize(v, n)).collect();
    let mut data = vec![0.0; n * n];
    for r in 0..h {
        let r2 = r + dr;
        if r2 < 0 || r2 >= h {
            continue;
        }
        for c in 0..w {
            let c2 = c + dc;
            if c2 < 0 || c2 >= w {
                continue;
            }
            let i = levels[(r * w + c) as usize];
            let j = levels[(r2 * w + c2) as usize];
            data[i * n + j] += 1.0;
        }
    }
    let mut m = Glcm { levels: n, data };
    if cfg.symmetric {
        let t = m.transpose();
        for (a, b) in m.data.iter_mut().zip(t.data) {
            *a += b;
        }
    }
    if cfg.normalize {
        let total = m.total();
        for v in m.data.iter_mut() {
            *v /= total;
        }
    }
    Ok(m)
}

/// Haralick statistics of a normalized GLCM.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GlcmStats {
    pub contrast: f64,
    pub dissimilarity: f64,
    pub energy: f64,
    pub correlation: f64,
    pub asm: f64,
}

/// Contrast, dissimilarity, ASM, energy and correlation. A zero-variance
/// marginal (flat texture) has correlation 1.
pub fn glcm_stats(p: &Glcm) -> Result<GlcmStats> {
    let total = p.total();
    if (total - 1.0).abs() > 1e-9 || p.data.iter().any(|v| *v < 0.0 || !v.is_finite()) {
        return Err(Error::Unnormalized(total));
    }
    let n = p.levels;
    let (mut contrast, mut dissimilarity, mut asm) = (0.0, 0.0, 0.0);
    let (mut mu_i, mut mu_j) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let v = p.get(i, j);
            let d = i as f64 - j as f64;
            contrast += v * d * d;
            dissimilarity += v * d.abs();
            asm += v * v;
            mu_i += v * i as f64;
            mu_j += v * j as f64;
        }
    }
    let (mut var_i, mut var_j, mut cov) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let v = p.get(i, j);
            let di = i as f64 - mu_i;
            let dj = j as f64 - mu_j;
            var_i += v * di * di;
            var_j += v * dj * dj;
            cov += v * di * dj;
        }
    }
    let denom = fmath::sqrt(var_i) * fmath::sqrt(var_j);
    let correlation = if denom > 1e-15 {
        (cov / denom).clamp(-1.0, 1.0)
    } else {
        1.0
    };
    Ok(GlcmStats {
        contrast,
        dissimilarity,
        energy: fmath::sqrt(asm),
        correlation,
        asm,
    })
}

/// Edge (hysteresis on smoothed gradient magnitude) and Harris corner settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeCornerConfig {
    /// Gaussian pre-smoothing.
    pub sigma: f64,
    /// Hysteresis thresholds on Sobel magnitude (per-pixel intensity units).
    pub edge_low: f64,
    pub edge_high: f64,
    pub corner_k: f64,
    /// Corners must exceed this fraction of the maximum Harris response.
    pub corner_thresh: f64,
    /// Smoothing of the structure tensor.
    pub harris_sigma: f64,
    /// Half-width of the non-maximum suppression window for corners.
    pub nms_radius: usize,
}

impl Default for EdgeCornerConfig {
    fn default() -> Self {
        Self {
            sigma: 1.0,
            edge_low: 0.04,
            edge_high: 0.1,
            corner_k: 0.04,
            corner_thresh: 0.01,
            harris_sigma: 1.0,
            nms_radius: 3,
        }
    }
}

/// Detected edges and corners. Corners are `(row, column)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeCornerMap {
    pub width: usize,
    pub height: usize,
    pub edges: Vec<bool>,
    pub corners: Vec<(usize, usize)>,
    pub edge_pixel_count: usize,
    pub corner_count: usize,
}

impl EdgeCornerMap {
    /// Edge mask as a luma image (1 on edges).
    pub fn edge_image(&self) -> PlanarImage {
        let samples = self
            .edges
            .iter()
            .map(|&e| if e { 1.0 } else { 0.0 })
            .collect();
        PlanarImage::from_planes(self.width, self.height, Domain::Luma, &[samples])
    }
}

pub fn edge_corner_map(img: &PlanarImage, cfg: &EdgeCornerConfig) -> Result<EdgeCornerMap> {
    if img.width() < 8 || img.height() < 8 {
        return Err(Error::TooSmall {
            what: "edge/corner detection",
            min: 8,
            width: img.width(),
            height: img.height(),
        });
    }
    if !(cfg.edge_low >= 0.0
        && cfg.edge_high >= cfg.edge_low
        && cfg.sigma > 0.0
        && cfg.harris_sigma > 0.0)
    {
        return Err(Error::InvalidParameter(format!(
            "edge thresholds ({}, {}) and smoothing ({}, {}) are inconsistent",
            cfg.edge_low, cfg.edge_high, cfg.sigma, cfg.harris_sigma
        )));
    }
    let luma = Plane::from_image(&extract_luma(img), 0);
    let smooth = gaussian_blur_replicate(&luma, cfg.sigma);
    let (gx, gy) = sobel_replicate(&smooth);
    let edges = hysteresis_edges(&gx, &gy, cfg);
    let corners = harris_corners(&gx, &gy, cfg);
    let edge_pixel_count = edges.iter().filter(|e| **e).count();
    let corner_count = corners.len();
    Ok(EdgeCornerMap {
        width: luma.w,
        height: luma.h,
        edges,
        corners,
        edge_pixel_count,
        corner_count,
    })
}

fn hysteresis_edges(gx: &Plane, gy: &Plane, cfg: &EdgeCornerConfig) -> Vec<bool> {
    let (w, h) = (gx.w, gx.h);
    let mag = gx.zip_map(gy, |a, b| fmath::sqrt(a * a + b * b));
    // Thin ridges: keep pixels that are maximal across the quantized gradient direction.
    let mut thin = vec![0.0; w * h];
    for r in 0..h {
        for c in 0..w {
            let m = mag.at(r, c);
            if m == 0.0 {
                continue;
            }
            let mut angle = fmath::atan2_deg(gy.at(r, c), gx.at(r, c));
            if angle < 0.0 {
                angle += 180.0;
            }
            let (dr, dc): (isize, isize) = if !(22.5..157.5).contains(&angle) {
                (0, 1)
            } else if angle < 67.5 {
                (1, 1)
            } else if angle < 112.5 {
                (1, 0)
            } else {
                (1, -1)
            };
            let at = |rr: isize, cc: isize| {
                if rr < 0 || cc < 0 || rr >= h as isize || cc >= w as isize {
                    0.0
                } else {
                    mag.at(rr as usize, cc as usize)
                }
            };
            let (ri, ci) = (r as isize, c as isize);
            if m >= at(ri + dr, ci + dc) && m > at(ri - dr, ci - dc) {
                thin[r * w + c] = m;
            }
        }
    }
    let mut edges = vec![false; w * h];
    let mut stack: Vec<usize> = (0..w * h)
        .filter(|&i| thin[i] >= cfg.edge_high && thin[i] > 0.0)
        .collect();
    for &i in &stack {
        edges[i] = true;
    }
    while let Some(i) = stack.pop() {
        let (r, c) = ((i / w) as isize, (i % w) as isize);
        for dr in -1..=1 {
            for dc in -1..=1 {
                let (rr, cc) = (r + dr, c + dc);
                if rr < 0 || cc < 0 || rr >= h as isize || cc >= w as isize {
                    continue;
                }
                let j = rr as usize * w + cc as usize;
                if !edges[j] && thin[j] >= cfg.edge_low && thin[j] > 0.0 {
                    edges[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    edges
}

fn harris_corners(gx: &Plane, gy: &Plane, cfg: &EdgeCornerConfig) -> Vec<(usize, usize)> {
    let (w, h) = (gx.w, gx.h);
    let ixx = gaussian_blur_replicate(&gx.map(|v| v * v), cfg.harris_sigma);
    let iyy = gaussian_blur_replicate(&gy.map(|v| v * v), cfg.harris_sigma);
    let ixy = gaussian_blur_replicate(&gx.zip_map(gy, |a, b| a * b), cfg.harris_sigma);
    let response: Vec<f64> = (0..w * h)
        .map(|i| {
            let (a, b, c) = (ixx.data[i], iyy.data[i], ixy.data[i]);
            let tr = a + b;
            a * b - c * c - cfg.corner_k * tr * tr
        })
        .collect();
    let max = response.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Vec::new();
    }
    let threshold = cfg.corner_thresh * max;
    let rad = cfg.nms_radius as isize;
    let mut corners = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let i = r * w + c;
            let v = response[i];
            if v <= threshold || v <= 0.0 {
                continue;
            }
            let mut is_max = true;
            'window: for dr in -rad..=rad {
                for dc in -rad..=rad {
                    let (rr, cc) = (r as isize + dr, c as isize + dc);
                    if (dr == 0 && dc == 0)
                        || rr < 0
                        || cc < 0
                        || rr >= h as isize
                        || cc >= w as isize
                    {
                        continue;
                    }
                    let j = rr as usize * w + cc as usize;
                    // Plateaus keep only their first pixel in raster order.
                    let beaten = if j < i {
                        response[j] >= v
                    } else {
                        response[j] > v
                    };
                    if beaten {
                        is_max = false;
                        break 'window;
                    }
                }
            }
            if is_max {
                corners.push((r, c));
            }
        }
    }
    corners
}
