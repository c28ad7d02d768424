//! Bicubic resampling and the LR/HR patch degradation pipeline.
//!
//! Resizing is separable Keys cubic convolution (`a = -0.5`) with
//! half-pixel-centered coordinates, clamp-to-edge sampling and, when
//! antialiasing a downscale, a kernel stretched by the inverse scale.

use alloc::format;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fmath;
use crate::image::PlanarImage;

/// Keys cubic convolution kernel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicKernel {
    pub a: f64,
}

impl Default for CubicKernel {
    fn default() -> Self {
        Self { a: -0.5 }
    }
}

impl CubicKernel {
    /// Support radius in kernel units.
    pub const SUPPORT: f64 = 2.0;

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        let a = self.a;
        let x = t.abs();
        if x <= 1.0 {
            ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0
        } else if x < 2.0 {
            ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a
        } else {
            0.0
        }
    }

    /// Raw (unnormalized) weights for every integer tap within the support
    /// of `center`, with the kernel stretched by `stretch >= 1`. Returns the
    /// index of the first tap and its weights.
    pub fn taps(&self, center: f64, stretch: f64) -> (i64, Vec<f64>) {
        let radius = Self::SUPPORT * stretch;
        let first = fmath::ceil(center - radius) as i64;
        let last = fmath::floor(center + radius) as i64;
        let weights = (first..=last)
            .map(|j| self.eval((j as f64 - center) / stretch))
            .collect();
        (first, weights)
    }
}

/// One output sample's contributions: clamped source indices and
/// normalized weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Contribution {
    pub indices: Vec<usize>,
    pub weights: Vec<f64>,
}

/// Contributions for each output position along one axis.
pub fn axis_contributions(in_len: usize, out_len: usize, antialias: bool) -> Vec<Contribution> {
    let kernel = CubicKernel::default();
    let scale = out_len as f64 / in_len as f64;
    let stretch = if antialias && scale < 1.0 {
        1.0 / scale
    } else {
        1.0
    };
    let max = in_len as i64 - 1;
    (0..out_len)
        .map(|i| {
            let center = (i as f64 + 0.5) / scale - 0.5;
            let (first, raw) = kernel.taps(center, stretch);
            let sum: f64 = raw.iter().sum();
            let mut indices = Vec::with_capacity(raw.len());
            let mut weights = Vec::with_capacity(raw.len());
            for (k, w) in raw.into_iter().enumerate() {
                if w != 0.0 {
                    indices.push((first + k as i64).clamp(0, max) as usize);
                    weights.push(w / sum);
                }
            }
            Contribution { indices, weights }
        })
        .collect()
}

/// Resizes one plane without clamping the result.
pub(crate) fn resize_plane(
    src: &[f64],
    width: usize,
    height: usize,
    out_w: usize,
    out_h: usize,
    antialias: bool,
) -> Vec<f64> {
    debug_assert_eq!(src.len(), width * height);
    let horizontal: Vec<f64> = if out_w == width {
        src.to_vec()
    } else {
        let contribs = axis_contributions(width, out_w, antialias);
        let mut out = Vec::with_capacity(out_w * height);
        for row in src.chunks_exact(width) {
            for c in &contribs {
                out.push(
                    c.indices
                        .iter()
                        .zip(&c.weights)
                        .map(|(&j, &w)| w * row[j])
                        .sum(),
                );
            }
        }
        out
    };
    if out_h == height {
        return horizontal;
    }
    let contribs = axis_contributions(height, out_h, antialias);
    let mut out = Vec::with_capacity(out_w * out_h);
    for c in &contribs {
        for x in 0..out_w {
            out.push(
                c.indices
                    .iter()
                    .zip(&c.weights)
                    .map(|(&j, &w)| w * horizontal[j * out_w + x])
                    .sum(),
            );
        }
    }
    out
}

/// Bicubic resize to `out_w x out_h`. Output samples are clamped to `[0, 1]`.
pub fn bicubic_resize(
    img: &PlanarImage,
    out_w: usize,
    out_h: usize,
    antialias: bool,
) -> Result<PlanarImage> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::InvalidParameter(format!(
            "resize target {out_w}x{out_h} has a zero dimension"
        )));
    }
    if out_w == img.width() && out_h == img.height() {
        return Ok(img.clone());
    }
    let planes: Vec<Vec<f64>> = img
        .plane_iter()
        .map(|p| {
            let mut out = resize_plane(p, img.width(), img.height(), out_w, out_h, antialias);
            for v in out.iter_mut() {
                *v = v.clamp(0.0, 1.0);
            }
            out
        })
        .collect();
    Ok(PlanarImage::from_planes(
        out_w,
        out_h,
        img.domain(),
        &planes,
    ))
}

/// Exact sample permutation: optional horizontal flip, then vertical flip,
/// then transpose (which swaps width and height).
pub fn augment(img: &PlanarImage, flip_h: bool, flip_v: bool, transpose: bool) -> PlanarImage {
    let (w, h) = (img.width(), img.height());
    let (ow, oh) = if transpose { (h, w) } else { (w, h) };
    let planes: Vec<Vec<f64>> = img
        .plane_iter()
        .map(|p| {
            let mut out = Vec::with_capacity(w * h);
            for r in 0..oh {
                for c in 0..ow {
                    // (r, c) in the output comes from (sr, sc) after flips.
                    let (fr, fc) = if transpose { (c, r) } else { (r, c) };
                    let sr = if flip_v { h - 1 - fr } else { fr };
                    let sc = if flip_h { w - 1 - fc } else { fc };
                    out.push(p[sr * w + sc]);
                }
            }
            out
        })
        .collect();
    PlanarImage::from_planes(ow, oh, img.domain(), &planes)
}

/// Uniform scale-factor sampler over `[lo, hi]` with a 64-bit seed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleSampler {
    lo: f64,
    hi: f64,
    seed: u64,
}

impl ScaleSampler {
    pub fn new(lo: f64, hi: f64, seed: u64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo >= 1.0 && hi >= lo) {
            return Err(Error::InvalidParameter(format!(
                "scale range [{lo}, {hi}] must satisfy 1 <= lo <= hi"
            )));
        }
        Ok(Self { lo, hi, seed })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The independent draw stream for source image `index`.
    pub fn stream(&self, index: u64) -> SampleStream {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index);
        SampleStream {
            rng,
            lo: self.lo,
            hi: self.hi,
        }
    }
}

/// Per-image ChaCha8 stream. Each repetition draws, in order: the scale,
/// crop x, crop y, then the horizontal, vertical and transpose flip bits.
#[derive(Clone, Debug)]
pub struct SampleStream {
    rng: ChaCha8Rng,
    lo: f64,
    hi: f64,
}

impl SampleStream {
    pub fn next_scale(&mut self) -> f64 {
        let u: f64 = self.rng.gen();
        (self.lo + (self.hi - self.lo) * u).clamp(self.lo, self.hi)
    }

    /// Uniform integer in `0..=max`.
    pub fn next_offset(&mut self, max: usize) -> usize {
        self.rng.gen_range(0..=max as u64) as usize
    }

    pub fn next_flip(&mut self) -> bool {
        self.rng.gen()
    }
}

/// Patch extraction parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PatchSpec {
    pub patch_size: usize,
    pub repetitions: usize,
    pub flip_h: bool,
    pub flip_v: bool,
    pub transpose: bool,
}

impl PatchSpec {
    pub fn new(patch_size: usize, repetitions: usize) -> Result<Self> {
        let spec = Self {
            patch_size,
            repetitions,
            flip_h: true,
            flip_v: true,
            transpose: true,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.patch_size == 0 || self.repetitions == 0 {
            return Err(Error::InvalidParameter(format!(
                "patch size {} and repetitions {} must both be >= 1",
                self.patch_size, self.repetitions
            )));
        }
        Ok(())
    }

    /// Side of the HR crop for `scale`: `patch_size * scale` rounded half up.
    pub fn hr_side(&self, scale: f64) -> usize {
        fmath::round_half_up(self.patch_size as f64 * scale) as usize
    }
}

/// Flip bits applied to one pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flips {
    pub flip_h: bool,
    pub flip_v: bool,
    pub transpose: bool,
}

/// One degraded training pair and how it was drawn.
#[derive(Clone, Debug, PartialEq)]
pub struct LrHrPair {
    pub lr: PlanarImage,
    pub hr_patch: PlanarImage,
    pub scale: f64,
    pub crop_x: usize,
    pub crop_y: usize,
    pub flips: Flips,
}

fn check_fits(hr: &PlanarImage, spec: &PatchSpec, scale: f64) -> Result<usize> {
    let side = spec.hr_side(scale);
    if side == 0 || side > hr.width() || side > hr.height() {
        return Err(Error::TooSmall {
            what: "HR patch extraction",
            min: side,
            width: hr.width(),
            height: hr.height(),
        });
    }
    Ok(side)
}

/// Crops a uniformly placed `round(patch_size * scale)` square, applies the
/// drawn flips and downsamples it to `patch_size` with antialiasing.
pub fn make_lr_hr_pair(
    hr: &PlanarImage,
    spec: &PatchSpec,
    scale: f64,
    stream: &mut SampleStream,
) -> Result<LrHrPair> {
    spec.validate()?;
    if !(scale.is_finite() && scale >= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "scale {scale} must be >= 1"
        )));
    }
    let side = check_fits(hr, spec, scale)?;
    let crop_x = stream.next_offset(hr.width() - side);
    let crop_y = stream.next_offset(hr.height() - side);
    let flips = Flips {
        flip_h: stream.next_flip() && spec.flip_h,
        flip_v: stream.next_flip() && spec.flip_v,
        transpose: stream.next_flip() && spec.transpose,
    };
    let patch = hr.crop(crop_x, crop_y, side, side)?;
    let hr_patch = augment(&patch, flips.flip_h, flips.flip_v, flips.transpose);
    let lr = bicubic_resize(&hr_patch, spec.patch_size, spec.patch_size, true)?;
    Ok(LrHrPair {
        lr,
        hr_patch,
        scale,
        crop_x,
        crop_y,
        flips,
    })
}

/// All `spec.repetitions` pairs for source image `index`, drawn from that
/// image's own stream so the result does not depend on processing order.
pub fn degrade_image(
    hr: &PlanarImage,
    index: u64,
    spec: &PatchSpec,
    sampler: &ScaleSampler,
) -> Result<Vec<LrHrPair>> {
    spec.validate()?;
    check_fits(hr, spec, sampler.hi())?;
    let mut stream = sampler.stream(index);
    (0..spec.repetitions)
        .map(|_| {
            let scale = stream.next_scale();
            make_lr_hr_pair(hr, spec, scale, &mut stream)
        })
        .collect()
}
