// Single-plane buffers and the small set of filters the metrics share.

use alloc::vec;
use alloc::vec::Vec;

use crate::fmath;
use crate::image::PlanarImage;

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Plane {
    pub w: usize,
    pub h: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn new(w: usize, h: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), w * h);
        Self { w, h, data }
    }

    pub fn from_image(img: &PlanarImage, p: usize) -> Self {
        Self::new(img.width(), img.height(), img.plane(p).to_vec())
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.w + c]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Plane {
        Plane::new(self.w, self.h, self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &Plane, f: impl Fn(f64, f64) -> f64) -> Plane {
        debug_assert_eq!((self.w, self.h), (other.w, other.h));
        Plane::new(
            self.w,
            self.h,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Keeps every `step`-th row and column starting at 0.
    pub fn subsample(&self, step: usize) -> Plane {
        let w = self.w.div_ceil(step);
        let h = self.h.div_ceil(step);
        let mut data = Vec::with_capacity(w * h);
        for r in (0..self.h).step_by(step) {
            for c in (0..self.w).step_by(step) {
                data.push(self.at(r, c));
            }
        }
        Plane::new(w, h, data)
    }

    /// Means of non-overlapping `f x f` blocks; trailing partial blocks are dropped.
    pub fn block_mean(&self, f: usize) -> Plane {
        if f == 1 {
            return self.clone();
        }
        let w = self.w / f;
        let h = self.h / f;
        let norm = (f * f) as f64;
        let mut data = Vec::with_capacity(w * h);
        for br in 0..h {
            for bc in 0..w {
                let mut s = 0.0;
                for r in br * f..(br + 1) * f {
                    for c in bc * f..(bc + 1) * f {
                        s += self.at(r, c);
                    }
                }
                data.push(s / norm);
            }
        }
        Plane::new(w, h, data)
    }
}

/// Normalized 1-D Gaussian with `size` taps centered at `(size - 1) / 2`.
pub(crate) fn gaussian_1d(size: usize, sigma: f64) -> Vec<f64> {
    let center = (size as f64 - 1.0) / 2.0;
    let mut k: Vec<f64> = (0..size)
        .map(|i| {
            let x = i as f64 - center;
            fmath::exp(-(x * x) / (2.0 * sigma * sigma))
        })
        .collect();
    let s: f64 = k.iter().sum();
    for v in k.iter_mut() {
        *v /= s;
    }
    k
}

/// Separable correlation with `kernel` on both axes keeping only positions
/// where the kernel lies fully inside the plane. May return an empty plane.
pub(crate) fn filter_valid(p: &Plane, kernel: &[f64]) -> Plane {
    let n = kernel.len();
    if p.w < n || p.h < n {
        return Plane::new(0, 0, Vec::new());
    }
    let ow = p.w - n + 1;
    let oh = p.h - n + 1;
    let mut tmp: Vec<f64> = Vec::with_capacity(ow * p.h);
    for r in 0..p.h {
        let row = &p.data[r * p.w..(r + 1) * p.w];
        for c in 0..ow {
            tmp.push(kernel.iter().zip(&row[c..c + n]).map(|(k, v)| k * v).sum());
        }
    }
    let mut out = Vec::with_capacity(ow * oh);
    for r in 0..oh {
        for c in 0..ow {
            let mut s = 0.0;
            for (i, k) in kernel.iter().enumerate() {
                s += k * tmp[(r + i) * ow + c];
            }
            out.push(s);
        }
    }
    Plane::new(ow, oh, out)
}

/// Separable correlation, same-size output, zero padding outside the
/// plane. `center` is the kernel tap aligned with the output pixel.
#[cfg(feature = "std")]
pub(crate) fn filter_same_zero(p: &Plane, kernel: &[f64], center: usize) -> Plane {
    let pass = |src: &[f64], len: usize, stride: usize, count: usize, outer_stride: usize| {
        let mut out = vec![0.0; src.len()];
        for o in 0..count {
            for i in 0..len {
                let mut s = 0.0;
                for (k, kv) in kernel.iter().enumerate() {
                    let j = i as isize + k as isize - center as isize;
                    if j >= 0 && (j as usize) < len {
                        s += kv * src[o * outer_stride + j as usize * stride];
                    }
                }
                out[o * outer_stride + i * stride] = s;
            }
        }
        out
    };
    let rows = pass(&p.data, p.w, 1, p.h, p.w);
    let data = pass(&rows, p.h, p.w, p.w, 1);
    Plane::new(p.w, p.h, data)
}

/// Separable Gaussian blur with replicated borders; radius `ceil(3 sigma)`.
pub(crate) fn gaussian_blur_replicate(p: &Plane, sigma: f64) -> Plane {
    let radius = fmath::ceil(3.0 * sigma).max(1.0) as usize;
    let kernel = gaussian_1d(2 * radius + 1, sigma);
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;
    let mut tmp = vec![0.0; p.w * p.h];
    for r in 0..p.h {
        for c in 0..p.w {
            let mut s = 0.0;
            for (k, kv) in kernel.iter().enumerate() {
                let cc = clamp(c as isize + k as isize - radius as isize, p.w);
                s += kv * p.data[r * p.w + cc];
            }
            tmp[r * p.w + c] = s;
        }
    }
    let mut out = vec![0.0; p.w * p.h];
    for r in 0..p.h {
        for c in 0..p.w {
            let mut s = 0.0;
            for (k, kv) in kernel.iter().enumerate() {
                let rr = clamp(r as isize + k as isize - radius as isize, p.h);
                s += kv * tmp[rr * p.w + c];
            }
            out[r * p.w + c] = s;
        }
    }
    Plane::new(p.w, p.h, out)
}

/// Sobel derivatives (scaled by 1/8) with replicated borders.
pub(crate) fn sobel_replicate(p: &Plane) -> (Plane, Plane) {
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;
    let mut gx = vec![0.0; p.w * p.h];
    let mut gy = vec![0.0; p.w * p.h];
    for r in 0..p.h {
        let rm = clamp(r as isize - 1, p.h);
        let rp = clamp(r as isize + 1, p.h);
        for c in 0..p.w {
            let cm = clamp(c as isize - 1, p.w);
            let cp = clamp(c as isize + 1, p.w);
            let v = |rr: usize, cc: usize| p.data[rr * p.w + cc];
            gx[r * p.w + c] = ((v(rm, cp) + 2.0 * v(r, cp) + v(rp, cp))
                - (v(rm, cm) + 2.0 * v(r, cm) + v(rp, cm)))
                / 8.0;
            gy[r * p.w + c] = ((v(rp, cm) + 2.0 * v(rp, c) + v(rp, cp))
                - (v(rm, cm) + 2.0 * v(rm, c) + v(rm, cp)))
                / 8.0;
        }
    }
    (Plane::new(p.w, p.h, gx), Plane::new(p.w, p.h, gy))
}

/// 3x3 correlation, same-size output, zero padding.
pub(crate) fn correlate3_same(p: &Plane, k: &[[f64; 3]; 3]) -> Plane {
    let mut out = vec![0.0; p.w * p.h];
    for r in 0..p.h {
        for c in 0..p.w {
            let mut s = 0.0;
            for (dr, krow) in k.iter().enumerate() {
                let rr = r as isize + dr as isize - 1;
                if rr < 0 || rr >= p.h as isize {
                    continue;
                }
                for (dc, kv) in krow.iter().enumerate() {
                    let cc = c as isize + dc as isize - 1;
                    if cc < 0 || cc >= p.w as isize {
                        continue;
                    }
                    s += kv * p.data[rr as usize * p.w + cc as usize];
                }
            }
            out[r * p.w + c] = s;
        }
    }
    Plane::new(p.w, p.h, out)
}

/// 3x3 mean with replicated borders.
#[cfg(feature = "std")]
pub(crate) fn box3_replicate(p: &Plane) -> Plane {
    let mut out = vec![0.0; p.w * p.h];
    for r in 0..p.h {
        for c in 0..p.w {
            let mut s = 0.0;
            for dr in -1isize..=1 {
                let rr = (r as isize + dr).clamp(0, p.h as isize - 1) as usize;
                for dc in -1isize..=1 {
                    let cc = (c as isize + dc).clamp(0, p.w as isize - 1) as usize;
                    s += p.data[rr * p.w + cc];
                }
            }
            out[r * p.w + c] = s / 9.0;
        }
    }
    Plane::new(p.w, p.h, out)
}

/// Scharr-like gradient magnitude used by FSIM and SR-SIM.
#[cfg_attr(not(feature = "std"), allow(dead_code))]
pub(crate) fn scharr_magnitude(p: &Plane) -> Plane {
    const DX: [[f64; 3]; 3] = [
        [3.0 / 16.0, 0.0, -3.0 / 16.0],
        [10.0 / 16.0, 0.0, -10.0 / 16.0],
        [3.0 / 16.0, 0.0, -3.0 / 16.0],
    ];
    const DY: [[f64; 3]; 3] = [
        [3.0 / 16.0, 10.0 / 16.0, 3.0 / 16.0],
        [0.0, 0.0, 0.0],
        [-3.0 / 16.0, -10.0 / 16.0, -3.0 / 16.0],
    ];
    let gx = correlate3_same(p, &DX);
    let gy = correlate3_same(p, &DY);
    gx.zip_map(&gy, |a, b| fmath::sqrt(a * a + b * b))
}

/// Downsampling factor applied before FSIM and SR-SIM: `max(1, round(min_side / 256))`.
#[cfg_attr(not(feature = "std"), allow(dead_code))]
pub(crate) fn auto_downsample_factor(w: usize, h: usize) -> usize {
    let f = fmath::round_half_up(w.min(h) as f64 / 256.0) as usize;
    f.max(1)
}
