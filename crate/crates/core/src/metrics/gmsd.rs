use crate::error::Result;
use crate::fmath;
use crate::image::PlanarImage;

use super::filter::{correlate3_same, Plane};
use super::{check_pair, MetricId};

/// Stability constant of the gradient magnitude similarity, 170 on the
/// 8-bit scale.
pub const GMSD_C: f64 = 170.0 / (255.0 * 255.0);

const PREWITT_X: [[f64; 3]; 3] = [
    [1.0 / 3.0, 0.0, -1.0 / 3.0],
    [1.0 / 3.0, 0.0, -1.0 / 3.0],
    [1.0 / 3.0, 0.0, -1.0 / 3.0],
];
const PREWITT_Y: [[f64; 3]; 3] = [
    [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    [0.0, 0.0, 0.0],
    [-1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0],
];

pub(crate) fn gradient_magnitude(p: &Plane) -> Plane {
    let gx = correlate3_same(p, &PREWITT_X);
    let gy = correlate3_same(p, &PREWITT_Y);
    gx.zip_map(&gy, |a, b| fmath::sqrt(a * a + b * b))
}

/// Gradient magnitude similarity deviation on luma (0 for identical images;
/// lower is better).
///
/// Luma is 2x2 mean-pooled (odd trailing rows/columns dropped), Prewitt
/// gradients are taken with zero padding, and the score is the population
/// standard deviation of the similarity map.
pub fn gmsd(reference: &PlanarImage, distorted: &PlanarImage) -> Result<f64> {
    check_pair(MetricId::Gmsd, reference, distorted)?;
    let x = Plane::from_image(&crate::color::extract_luma(reference), 0).block_mean(2);
    let y = Plane::from_image(&crate::color::extract_luma(distorted), 0).block_mean(2);
    let gx = gradient_magnitude(&x);
    let gy = gradient_magnitude(&y);
    let map = gx.zip_map(&gy, |a, b| {
        (2.0 * a * b + GMSD_C) / (a * a + b * b + GMSD_C)
    });
    let n = map.data.len() as f64;
    let mean = map.sum() / n;
    let var = map
        .data
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum::<f64>()
        / n;
    Ok(fmath::sqrt(var))
}
