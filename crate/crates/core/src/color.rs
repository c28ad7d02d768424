//! BT.601 studio-swing RGB <-> YCbCr conversion and luma extraction.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::image::{Domain, PlanarImage};

/// An affine color transform `out = offsets + weights * rgb` on normalized samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ColorMatrix {
    pub weights: [[f64; 3]; 3],
    pub offsets: [f64; 3],
}

/// ITU-R BT.601 studio swing: Y in [16, 235], Cb/Cr in [16, 240] on the 8-bit scale.
pub const BT601_STUDIO: ColorMatrix = ColorMatrix {
    weights: [
        [65.481 / 255.0, 128.553 / 255.0, 24.966 / 255.0],
        [-37.797 / 255.0, -74.203 / 255.0, 112.0 / 255.0],
        [112.0 / 255.0, -93.786 / 255.0, -18.214 / 255.0],
    ],
    offsets: [16.0 / 255.0, 128.0 / 255.0, 128.0 / 255.0],
};

impl ColorMatrix {
    #[inline]
    fn row(&self, i: usize, px: [f64; 3]) -> f64 {
        let w = &self.weights[i];
        self.offsets[i] + w[0] * px[0] + w[1] * px[1] + w[2] * px[2]
    }

    #[inline]
    pub fn apply(&self, px: [f64; 3]) -> [f64; 3] {
        [self.row(0, px), self.row(1, px), self.row(2, px)]
    }

    /// The inverse transform; `None` if the weight matrix is singular.
    pub fn inverse(&self) -> Option<ColorMatrix> {
        let m = &self.weights;
        let cof = |r0: usize, r1: usize, c0: usize, c1: usize| {
            m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0]
        };
        let det = m[0][0] * cof(1, 2, 1, 2) - m[0][1] * cof(1, 2, 0, 2) + m[0][2] * cof(1, 2, 0, 1);
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let inv = [
            [
                cof(1, 2, 1, 2) / det,
                -cof(0, 2, 1, 2) / det,
                cof(0, 1, 1, 2) / det,
            ],
            [
                -cof(1, 2, 0, 2) / det,
                cof(0, 2, 0, 2) / det,
                -cof(0, 1, 0, 2) / det,
            ],
            [
                cof(1, 2, 0, 1) / det,
                -cof(0, 2, 0, 1) / det,
                cof(0, 1, 0, 1) / det,
            ],
        ];
        let o = self.offsets;
        let mut offsets = [0.0; 3];
        for (i, off) in offsets.iter_mut().enumerate() {
            *off = -(inv[i][0] * o[0] + inv[i][1] * o[1] + inv[i][2] * o[2]);
        }
        Some(ColorMatrix {
            weights: inv,
            offsets,
        })
    }
}

fn convert(img: &PlanarImage, matrix: &ColorMatrix, domain: Domain) -> PlanarImage {
    let n = img.width() * img.height();
    let (a, b, c) = (img.plane(0), img.plane(1), img.plane(2));
    let mut planes = [
        Vec::with_capacity(n),
        Vec::with_capacity(n),
        Vec::with_capacity(n),
    ];
    for i in 0..n {
        let out = matrix.apply([a[i], b[i], c[i]]);
        for (plane, v) in planes.iter_mut().zip(out) {
            plane.push(v.clamp(0.0, 1.0));
        }
    }
    PlanarImage::from_planes(img.width(), img.height(), domain, &planes)
}

fn expect_domain(img: &PlanarImage, expected: Domain) -> Result<()> {
    if img.domain() != expected {
        return Err(Error::WrongDomain {
            expected: expected.name(),
            found: img.domain().name(),
        });
    }
    Ok(())
}

/// RGB to BT.601 studio-swing YCbCr. Output samples are clamped to `[0, 1]`.
pub fn rgb_to_ycbcr(img: &PlanarImage) -> Result<PlanarImage> {
    expect_domain(img, Domain::Rgb)?;
    Ok(convert(img, &BT601_STUDIO, Domain::YCbCr))
}

/// Inverse of [`rgb_to_ycbcr`]; out-of-gamut results are clamped.
pub fn ycbcr_to_rgb(img: &PlanarImage) -> Result<PlanarImage> {
    expect_domain(img, Domain::YCbCr)?;
    let inv = BT601_STUDIO.inverse().expect("BT.601 matrix is invertible");
    Ok(convert(img, &inv, Domain::Rgb))
}

/// The luminance plane: the Y plane of [`rgb_to_ycbcr`] for RGB input, the
/// first plane for YCbCr input, and the image itself for luma input.
pub fn extract_luma(img: &PlanarImage) -> PlanarImage {
    match img.domain() {
        Domain::Luma => img.clone(),
        Domain::YCbCr => PlanarImage::from_planes(
            img.width(),
            img.height(),
            Domain::Luma,
            &[img.plane(0).to_vec()],
        ),
        Domain::Rgb => {
            let (r, g, b) = (img.plane(0), img.plane(1), img.plane(2));
            let y = (0..r.len())
                .map(|i| BT601_STUDIO.row(0, [r[i], g[i], b[i]]).clamp(0.0, 1.0))
                .collect();
            PlanarImage::from_planes(img.width(), img.height(), Domain::Luma, &[y])
        }
    }
}
