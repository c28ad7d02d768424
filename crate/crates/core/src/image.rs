//! Normalized multi-plane rasters.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Color interpretation of a [`PlanarImage`]'s planes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Domain {
    Rgb,
    YCbCr,
    Luma,
}

impl Domain {
    pub fn planes(self) -> usize {
        match self {
            Domain::Luma => 1,
            Domain::Rgb | Domain::YCbCr => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Domain::Rgb => "RGB",
            Domain::YCbCr => "YCbCr",
            Domain::Luma => "Luma",
        }
    }
}

/// A raster of `planes` planes, each `width * height` samples in `[0, 1]`,
/// stored plane-major then row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarImage {
    width: usize,
    height: usize,
    domain: Domain,
    samples: Vec<f64>,
}

impl PlanarImage {
    /// Validates dimensions and samples. Every sample must be finite and in `[0, 1]`.
    pub fn new(width: usize, height: usize, domain: Domain, samples: Vec<f64>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "zero dimension {width}x{height}"
            )));
        }
        let expected = width * height * domain.planes();
        if samples.len() != expected {
            return Err(Error::InvalidImage(format!(
                "{} samples for a {width}x{height}x{} image (expected {expected})",
                samples.len(),
                domain.planes()
            )));
        }
        if let Some(i) = samples
            .iter()
            .position(|v| !v.is_finite() || *v < 0.0 || *v > 1.0)
        {
            return Err(Error::InvalidImage(format!(
                "sample {i} = {} is outside [0, 1]",
                samples[i]
            )));
        }
        Ok(Self {
            width,
            height,
            domain,
            samples,
        })
    }

    /// Like [`PlanarImage::new`] but clamps finite samples into `[0, 1]`
    /// instead of rejecting them. Non-finite samples are still an error.
    pub fn from_clamped(
        width: usize,
        height: usize,
        domain: Domain,
        mut samples: Vec<f64>,
    ) -> Result<Self> {
        for v in samples.iter_mut() {
            if v.is_finite() {
                *v = v.clamp(0.0, 1.0);
            }
        }
        Self::new(width, height, domain, samples)
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        domain: Domain,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        let mut samples = Vec::with_capacity(width * height * domain.planes());
        for p in 0..domain.planes() {
            for r in 0..height {
                for c in 0..width {
                    samples.push(f(p, r, c));
                }
            }
        }
        Self::new(width, height, domain, samples)
    }

    pub fn constant(width: usize, height: usize, domain: Domain, value: f64) -> Result<Self> {
        Self::new(
            width,
            height,
            domain,
            alloc::vec![value; width * height * domain.planes()],
        )
    }

    /// Assembles an image from already-validated planes.
    pub(crate) fn from_planes(
        width: usize,
        height: usize,
        domain: Domain,
        planes: &[Vec<f64>],
    ) -> Self {
        debug_assert_eq!(planes.len(), domain.planes());
        let mut samples = Vec::with_capacity(width * height * planes.len());
        for p in planes {
            debug_assert_eq!(p.len(), width * height);
            samples.extend_from_slice(p);
        }
        Self {
            width,
            height,
            domain,
            samples,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn planes(&self) -> usize {
        self.domain.planes()
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// `(width, height, planes)`.
    pub fn shape(&self) -> (usize, usize, usize) {
        (self.width, self.height, self.planes())
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn plane(&self, p: usize) -> &[f64] {
        let n = self.width * self.height;
        &self.samples[p * n..(p + 1) * n]
    }

    pub fn plane_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.samples.chunks_exact(self.width * self.height)
    }

    #[inline]
    pub fn get(&self, plane: usize, row: usize, col: usize) -> f64 {
        self.samples[(plane * self.height + row) * self.width + col]
    }

    /// Copies the `w x h` window whose top-left corner is `(x, y)`.
    pub fn crop(&self, x: usize, y: usize, w: usize, h: usize) -> Result<Self> {
        if w == 0 || h == 0 || x + w > self.width || y + h > self.height {
            return Err(Error::InvalidParameter(format!(
                "crop {w}x{h} at ({x}, {y}) does not fit a {}x{} image",
                self.width, self.height
            )));
        }
        let mut samples = Vec::with_capacity(w * h * self.planes());
        for plane in self.plane_iter() {
            for r in y..y + h {
                let start = r * self.width + x;
                samples.extend_from_slice(&plane[start..start + w]);
            }
        }
        Ok(Self {
            width: w,
            height: h,
            domain: self.domain,
            samples,
        })
    }

    /// Removes `border` pixels from every side.
    pub fn crop_border(&self, border: usize) -> Result<Self> {
        if border == 0 {
            return Ok(self.clone());
        }
        if 2 * border >= self.width.min(self.height) {
            return Err(Error::BorderTooLarge {
                border,
                width: self.width,
                height: self.height,
            });
        }
        self.crop(
            border,
            border,
            self.width - 2 * border,
            self.height - 2 * border,
        )
    }

    /// Checks that `other` has the same width, height and plane count.
    pub fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                reference: self.shape(),
                distorted: other.shape(),
            });
        }
        Ok(())
    }
}

/// Free-function form of [`PlanarImage::crop_border`].
pub fn crop_border(img: &PlanarImage, border: usize) -> Result<PlanarImage> {
    img.crop_border(border)
}
