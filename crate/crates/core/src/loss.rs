//! Hybrid pixel-gradient loss: `lambda_l1 * L1 + lambda_grad * Lgrad`,
//! where `Lgrad` is the L1 distance between forward-difference gradients.

use alloc::format;
use alloc::vec::Vec;

use crate::color::extract_luma;
use crate::error::{Error, Result};
use crate::fmath;
use crate::image::{Domain, PlanarImage};

/// How absolute differences are reduced to a scalar.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Reduction {
    #[default]
    Mean,
    Sum,
}

/// Which planes the gradient term is computed on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GradientSource {
    #[default]
    PerChannel,
    Luma,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HybridLossConfig {
    pub lambda_l1: f64,
    pub lambda_grad: f64,
    pub reduction: Reduction,
    pub gradient_source: GradientSource,
}

impl Default for HybridLossConfig {
    fn default() -> Self {
        Self {
            lambda_l1: 1.0,
            lambda_grad: 0.05,
            reduction: Reduction::Mean,
            gradient_source: GradientSource::PerChannel,
        }
    }
}

impl HybridLossConfig {
    /// Gradient weights explored on top of the 0.05 default.
    pub const LAMBDA_SWEEP: [f64; 4] = [0.05, 0.075, 0.1, 0.3];

    pub fn new(lambda_l1: f64, lambda_grad: f64) -> Result<Self> {
        let cfg = Self {
            lambda_l1,
            lambda_grad,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_l1 >= 0.0 && self.lambda_grad >= 0.0)
            || !self.lambda_l1.is_finite()
            || !self.lambda_grad.is_finite()
        {
            return Err(Error::InvalidParameter(format!(
                "loss weights ({}, {}) must be finite and >= 0",
                self.lambda_l1, self.lambda_grad
            )));
        }
        Ok(())
    }
}

/// Forward differences per plane: `gx` is `planes x height x (width - 1)`,
/// `gy` is `planes x (height - 1) x width`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientField {
    pub width: usize,
    pub height: usize,
    pub planes: usize,
    pub gx: Vec<f64>,
    pub gy: Vec<f64>,
}

impl GradientField {
    pub fn gx_at(&self, plane: usize, r: usize, c: usize) -> f64 {
        self.gx[(plane * self.height + r) * (self.width - 1) + c]
    }

    pub fn gy_at(&self, plane: usize, r: usize, c: usize) -> f64 {
        self.gy[(plane * (self.height - 1) + r) * self.width + c]
    }
}

fn check_degenerate(img: &PlanarImage) -> Result<()> {
    if img.width() < 2 || img.height() < 2 {
        return Err(Error::TooSmall {
            what: "gradient field",
            min: 2,
            width: img.width(),
            height: img.height(),
        });
    }
    Ok(())
}

pub fn gradient_field(img: &PlanarImage) -> Result<GradientField> {
    check_degenerate(img)?;
    let (w, h) = (img.width(), img.height());
    let mut gx = Vec::with_capacity(img.planes() * h * (w - 1));
    let mut gy = Vec::with_capacity(img.planes() * (h - 1) * w);
    for p in img.plane_iter() {
        for r in 0..h {
            for c in 0..w - 1 {
                gx.push(p[r * w + c + 1] - p[r * w + c]);
            }
        }
        for r in 0..h - 1 {
            for c in 0..w {
                gy.push(p[(r + 1) * w + c] - p[r * w + c]);
            }
        }
    }
    Ok(GradientField {
        width: w,
        height: h,
        planes: img.planes(),
        gx,
        gy,
    })
}

fn reduce_abs_diff(a: &[f64], b: &[f64], reduction: Reduction) -> f64 {
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum();
    match reduction {
        Reduction::Sum => sum,
        Reduction::Mean => sum / a.len() as f64,
    }
}

/// Mean absolute sample difference.
pub fn l1_loss(truth: &PlanarImage, pred: &PlanarImage) -> Result<f64> {
    l1_loss_with(truth, pred, Reduction::Mean)
}

pub fn l1_loss_with(truth: &PlanarImage, pred: &PlanarImage, reduction: Reduction) -> Result<f64> {
    truth.check_same_shape(pred)?;
    Ok(reduce_abs_diff(truth.samples(), pred.samples(), reduction))
}

/// `mean |d gx| + mean |d gy|`, each over its own valid grid.
pub fn grad_loss(truth: &PlanarImage, pred: &PlanarImage) -> Result<f64> {
    grad_loss_with(truth, pred, Reduction::Mean, GradientSource::PerChannel)
}

pub fn grad_loss_with(
    truth: &PlanarImage,
    pred: &PlanarImage,
    reduction: Reduction,
    source: GradientSource,
) -> Result<f64> {
    truth.check_same_shape(pred)?;
    let (ft, fp) = match source {
        GradientSource::PerChannel => (gradient_field(truth)?, gradient_field(pred)?),
        GradientSource::Luma => (
            gradient_field(&extract_luma(truth))?,
            gradient_field(&extract_luma(pred))?,
        ),
    };
    Ok(reduce_abs_diff(&ft.gx, &fp.gx, reduction) + reduce_abs_diff(&ft.gy, &fp.gy, reduction))
}

pub fn hybrid_loss(truth: &PlanarImage, pred: &PlanarImage, cfg: &HybridLossConfig) -> Result<f64> {
    let (l1, grad) = loss_components(truth, pred, cfg)?;
    Ok(cfg.lambda_l1 * l1 + cfg.lambda_grad * grad)
}

/// The unweighted `(L1, Lgrad)` terms under `cfg`'s reduction and gradient source.
pub fn loss_components(
    truth: &PlanarImage,
    pred: &PlanarImage,
    cfg: &HybridLossConfig,
) -> Result<(f64, f64)> {
    cfg.validate()?;
    let l1 = l1_loss_with(truth, pred, cfg.reduction)?;
    let grad = grad_loss_with(truth, pred, cfg.reduction, cfg.gradient_source)?;
    Ok((l1, grad))
}

/// First-order derivative magnitude of the luma plane, with the last
/// row/column differenced against itself (clamped extension), scaled so the
/// maximum is 1. A flat image yields an all-zero map.
pub fn derivative_map(img: &PlanarImage) -> Result<PlanarImage> {
    check_degenerate(img)?;
    let luma = extract_luma(img);
    let (w, h) = (luma.width(), luma.height());
    let p = luma.plane(0);
    let mut mag = Vec::with_capacity(w * h);
    for r in 0..h {
        for c in 0..w {
            let v = p[r * w + c];
            let gx = p[r * w + (c + 1).min(w - 1)] - v;
            let gy = p[(r + 1).min(h - 1) * w + c] - v;
            mag.push(fmath::sqrt(gx * gx + gy * gy));
        }
    }
    let max = mag.iter().copied().fold(0.0, f64::max);
    if max > 0.0 {
        for v in mag.iter_mut() {
            *v /= max;
        }
    }
    PlanarImage::from_clamped(w, h, Domain::Luma, mag)
}
