use crate::error::Result;
use crate::fmath;
use crate::image::PlanarImage;

use super::{check_pair, MetricId};

/// `10 log10(peak^2 / MSE)` with the MSE taken over every plane and pixel.
/// Identical images give `f64::INFINITY`.
pub fn psnr(reference: &PlanarImage, distorted: &PlanarImage, peak: f64) -> Result<f64> {
    check_pair(MetricId::Psnr, reference, distorted)?;
    let n = reference.samples().len() as f64;
    let sse: f64 = reference
        .samples()
        .iter()
        .zip(distorted.samples())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let mse = sse / n;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * fmath::log10(peak * peak / mse))
}
