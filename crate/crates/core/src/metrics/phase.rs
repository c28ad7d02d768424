//! Phase congruency from a log-Gabor filter bank evaluated in the
//! frequency domain.

use core::f64::consts::PI;

use rustfft::num_complex::Complex64;

use crate::fmath;

use super::fft::{fft2, forward_real, shifted_frequency};
use super::filter::Plane;

/// Log-Gabor bank and noise-compensation parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseCongruencyConfig {
    pub scales: usize,
    pub orientations: usize,
    /// Wavelength of the smallest-scale filter, in pixels.
    pub min_wavelength: f64,
    /// Wavelength ratio between successive scales.
    pub mult: f64,
    /// Ratio of the log-Gabor bandwidth to the center frequency.
    pub sigma_onf: f64,
    /// Orientation spacing over the angular standard deviation.
    pub d_theta_on_sigma: f64,
    /// Standard deviations of the noise energy above its mean that are rejected.
    pub noise_k: f64,
    /// Division guard, 1e-4 on the 8-bit scale.
    pub epsilon: f64,
}

impl Default for PhaseCongruencyConfig {
    fn default() -> Self {
        Self {
            scales: 4,
            orientations: 4,
            min_wavelength: 6.0,
            mult: 2.0,
            sigma_onf: 0.55,
            d_theta_on_sigma: 1.2,
            noise_k: 2.0,
            epsilon: 1e-4 / 255.0,
        }
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Phase congruency map of a single plane, values in `[0, 1]`.
pub fn phase_congruency(
    samples: &[f64],
    width: usize,
    height: usize,
    cfg: &PhaseCongruencyConfig,
) -> Vec<f64> {
    phase_congruency_plane(&Plane::new(width, height, samples.to_vec()), cfg).data
}

pub(crate) fn phase_congruency_plane(img: &Plane, cfg: &PhaseCongruencyConfig) -> Plane {
    let (w, h) = (img.w, img.h);
    let n = w * h;
    let spectrum = forward_real(&img.data, w, h);

    let mut radius = vec![0.0; n];
    let mut sin_t = vec![0.0; n];
    let mut cos_t = vec![0.0; n];
    let mut lowpass = vec![0.0; n];
    for r in 0..h {
        let fy = shifted_frequency(r, h);
        for c in 0..w {
            let fx = shifted_frequency(c, w);
            let i = r * w + c;
            let rad = fmath::sqrt(fx * fx + fy * fy);
            lowpass[i] = 1.0 / (1.0 + fmath::powf(rad / 0.45, 30.0));
            radius[i] = rad;
            let theta = fmath::atan2(-fy, fx);
            sin_t[i] = fmath::sin(theta);
            cos_t[i] = fmath::cos(theta);
        }
    }
    // Avoid log(0) at DC; the filters are zeroed there below.
    radius[0] = 1.0;

    let log_sigma = fmath::ln(cfg.sigma_onf);
    let log_gabor: Vec<Vec<f64>> = (0..cfg.scales)
        .map(|s| {
            let wavelength = cfg.min_wavelength * fmath::powf(cfg.mult, s as f64);
            let fo = 1.0 / wavelength;
            let mut g: Vec<f64> = radius
                .iter()
                .zip(&lowpass)
                .map(|(&rad, &lp)| {
                    let l = fmath::ln(rad / fo);
                    fmath::exp(-(l * l) / (2.0 * log_sigma * log_sigma)) * lp
                })
                .collect();
            g[0] = 0.0;
            g
        })
        .collect();

    let theta_sigma = PI / cfg.orientations as f64 / cfg.d_theta_on_sigma;
    let sqrt_n = fmath::sqrt(n as f64);
    let mut energy_all = vec![0.0; n];
    let mut an_all = vec![0.0; n];

    for o in 0..cfg.orientations {
        let angle = o as f64 * PI / cfg.orientations as f64;
        let (sa, ca) = (fmath::sin(angle), fmath::cos(angle));
        let spread: Vec<f64> = (0..n)
            .map(|i| {
                let ds = sin_t[i] * ca - cos_t[i] * sa;
                let dc = cos_t[i] * ca + sin_t[i] * sa;
                let d = fmath::atan2(ds, dc).abs();
                fmath::exp(-(d * d) / (2.0 * theta_sigma * theta_sigma))
            })
            .collect();

        let mut sum_e = vec![0.0; n];
        let mut sum_o = vec![0.0; n];
        let mut sum_an = vec![0.0; n];
        let mut responses: Vec<Vec<Complex64>> = Vec::with_capacity(cfg.scales);
        let mut spatial_filters: Vec<Vec<f64>> = Vec::with_capacity(cfg.scales);
        let mut em_n = 0.0;

        for (s, lg) in log_gabor.iter().enumerate() {
            let filter: Vec<f64> = lg.iter().zip(&spread).map(|(a, b)| a * b).collect();
            if s == 0 {
                em_n = filter.iter().map(|v| v * v).sum();
            }
            let mut spatial: Vec<Complex64> =
                filter.iter().map(|&v| Complex64::new(v, 0.0)).collect();
            fft2(&mut spatial, w, h, true);
            spatial_filters.push(spatial.iter().map(|v| v.re * sqrt_n).collect());

            let mut eo: Vec<Complex64> = spectrum.iter().zip(&filter).map(|(z, f)| z * f).collect();
            fft2(&mut eo, w, h, true);
            for i in 0..n {
                sum_an[i] += eo[i].norm();
                sum_e[i] += eo[i].re;
                sum_o[i] += eo[i].im;
            }
            responses.push(eo);
        }

        let mut energy = vec![0.0; n];
        for i in 0..n {
            let x_energy = fmath::sqrt(sum_e[i] * sum_e[i] + sum_o[i] * sum_o[i]) + cfg.epsilon;
            let mean_e = sum_e[i] / x_energy;
            let mean_o = sum_o[i] / x_energy;
            for eo in &responses {
                let (e, od) = (eo[i].re, eo[i].im);
                energy[i] += e * mean_e + od * mean_o - (e * mean_o - od * mean_e).abs();
            }
        }

        // Noise energy estimated from the smallest scale, assuming a Rayleigh
        // distributed response.
        let mut sq: Vec<f64> = responses[0].iter().map(|v| v.norm_sqr()).collect();
        let mean_e2n = -median(&mut sq) / fmath::ln(0.5);
        let noise_power = if em_n > 0.0 { mean_e2n / em_n } else { 0.0 };
        let mut sum_an2 = 0.0;
        for f in &spatial_filters {
            sum_an2 += f.iter().map(|v| v * v).sum::<f64>();
        }
        let mut sum_ai_aj = 0.0;
        for si in 0..spatial_filters.len() {
            for sj in si + 1..spatial_filters.len() {
                sum_ai_aj += spatial_filters[si]
                    .iter()
                    .zip(&spatial_filters[sj])
                    .map(|(a, b)| a * b)
                    .sum::<f64>();
            }
        }
        let noise_energy2 = 2.0 * noise_power * sum_an2 + 4.0 * noise_power * sum_ai_aj;
        let tau = fmath::sqrt((noise_energy2 / 2.0).max(0.0));
        let noise_mean = tau * fmath::sqrt(PI / 2.0);
        let noise_sigma = fmath::sqrt((2.0 - PI / 2.0) * tau * tau);
        // Empirical correction for this phase congruency measure.
        let threshold = (noise_mean + cfg.noise_k * noise_sigma) / 1.7;

        for i in 0..n {
            energy_all[i] += (energy[i] - threshold).max(0.0);
            an_all[i] += sum_an[i];
        }
    }

    let data = energy_all
        .iter()
        .zip(&an_all)
        .map(|(e, a)| (e / (a + cfg.epsilon)).clamp(0.0, 1.0))
        .collect();
    Plane::new(w, h, data)
}
