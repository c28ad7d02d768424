// 2-D complex FFT over row-major buffers, backed by rustfft.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

/// In-place 2-D DFT of a `w x h` row-major buffer. The inverse is scaled by
/// `1 / (w h)` so that `inverse(forward(x)) == x`.
pub(crate) fn fft2(data: &mut [Complex64], w: usize, h: usize, inverse: bool) {
    debug_assert_eq!(data.len(), w * h);
    let mut planner = FftPlanner::<f64>::new();
    let row_fft = if inverse {
        planner.plan_fft_inverse(w)
    } else {
        planner.plan_fft_forward(w)
    };
    row_fft.process(data);
    let col_fft = if inverse {
        planner.plan_fft_inverse(h)
    } else {
        planner.plan_fft_forward(h)
    };
    let mut column = vec![Complex64::new(0.0, 0.0); h];
    for c in 0..w {
        for r in 0..h {
            column[r] = data[r * w + c];
        }
        col_fft.process(&mut column);
        for r in 0..h {
            data[r * w + c] = column[r];
        }
    }
    if inverse {
        let norm = 1.0 / (w * h) as f64;
        for v in data.iter_mut() {
            *v *= norm;
        }
    }
}

pub(crate) fn forward_real(data: &[f64], w: usize, h: usize) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = data.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft2(&mut buf, w, h, false);
    buf
}

/// Normalized frequency of index `i` along an axis of length `n`, after
/// the quadrant shift that puts zero frequency at index 0. Odd lengths are
/// normalized by `n - 1`, even lengths by `n`, giving a range of about +/-0.5.
pub(crate) fn shifted_frequency(i: usize, n: usize) -> f64 {
    if n == 1 {
        return 0.0;
    }
    let half = n / 2;
    // Position in the centered range before the shift.
    let centered = (i + half) % n;
    if n % 2 == 1 {
        (centered as f64 - (n as f64 - 1.0) / 2.0) / (n as f64 - 1.0)
    } else {
        (centered as f64 - n as f64 / 2.0) / n as f64
    }
}
