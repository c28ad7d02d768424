//! Direct, loop-by-loop restatements of the metric and texture formulas.
//! They share no code with the library beyond the image container.

#![allow(clippy::needless_range_loop)]

use sreval_core::PlanarImage;

type Grid = Vec<Vec<f64>>;

fn plane_grid(img: &PlanarImage, p: usize) -> Grid {
    (0..img.height())
        .map(|r| (0..img.width()).map(|c| img.get(p, r, c)).collect())
        .collect()
}

/// BT.601 studio-swing luma, clamped.
pub fn luma_grid(img: &PlanarImage) -> Grid {
    if img.planes() == 1 {
        return plane_grid(img, 0);
    }
    (0..img.height())
        .map(|r| {
            (0..img.width())
                .map(|c| {
                    let (red, g, b) = (img.get(0, r, c), img.get(1, r, c), img.get(2, r, c));
                    ((16.0 + 65.481 * red + 128.553 * g + 24.966 * b) / 255.0).clamp(0.0, 1.0)
                })
                .collect()
        })
        .collect()
}

pub fn psnr(a: &PlanarImage, b: &PlanarImage) -> f64 {
    let mut sse = 0.0;
    let mut n = 0usize;
    for p in 0..a.planes() {
        for r in 0..a.height() {
            for c in 0..a.width() {
                let d = a.get(p, r, c) - b.get(p, r, c);
                sse += d * d;
                n += 1;
            }
        }
    }
    let mse = sse / n as f64;
    if mse == 0.0 {
        f64::INFINITY
    } else {
        10.0 * (1.0 / mse).log10()
    }
}

/// Normalized 2-D Gaussian window.
pub fn gaussian_window(size: usize, sigma: f64) -> Grid {
    let c = (size as f64 - 1.0) / 2.0;
    let mut g: Grid = (0..size)
        .map(|i| {
            (0..size)
                .map(|j| {
                    let (di, dj) = (i as f64 - c, j as f64 - c);
                    (-(di * di + dj * dj) / (2.0 * sigma * sigma)).exp()
                })
                .collect()
        })
        .collect();
    let total: f64 = g.iter().flatten().sum();
    for v in g.iter_mut().flatten() {
        *v /= total;
    }
    g
}

fn weighted_mean(x: &Grid, win: &Grid, r0: usize, c0: usize) -> f64 {
    let mut s = 0.0;
    for (i, row) in win.iter().enumerate() {
        for (j, w) in row.iter().enumerate() {
            s += w * x[r0 + i][c0 + j];
        }
    }
    s
}

fn ssim_plane(x: &Grid, y: &Grid) -> f64 {
    let win = gaussian_window(11, 1.5);
    let (c1, c2) = (0.01f64.powi(2), 0.03f64.powi(2));
    let (h, w) = (x.len(), x[0].len());
    let mut total = 0.0;
    let mut count = 0;
    for r0 in 0..=h - 11 {
        for c0 in 0..=w - 11 {
            let mx = weighted_mean(x, &win, r0, c0);
            let my = weighted_mean(y, &win, r0, c0);
            let (mut vx, mut vy, mut cxy) = (0.0, 0.0, 0.0);
            for i in 0..11 {
                for j in 0..11 {
                    let dx = x[r0 + i][c0 + j] - mx;
                    let dy = y[r0 + i][c0 + j] - my;
                    vx += win[i][j] * dx * dx;
                    vy += win[i][j] * dy * dy;
                    cxy += win[i][j] * dx * dy;
                }
            }
            total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2));
            count += 1;
        }
    }
    total / count as f64
}

pub fn ssim(a: &PlanarImage, b: &PlanarImage) -> f64 {
    let planes = a.planes();
    (0..planes)
        .map(|p| ssim_plane(&plane_grid(a, p), &plane_grid(b, p)))
        .sum::<f64>()
        / planes as f64
}

fn prewitt_magnitude(x: &Grid) -> Grid {
    let (h, w) = (x.len() as isize, x[0].len() as isize);
    let at = |r: isize, c: isize| {
        if r < 0 || c < 0 || r >= h || c >= w {
            0.0
        } else {
            x[r as usize][c as usize]
        }
    };
    (0..h)
        .map(|r| {
            (0..w)
                .map(|c| {
                    let mut gx = 0.0;
                    let mut gy = 0.0;
                    for k in -1..=1 {
                        gx += (at(r + k, c - 1) - at(r + k, c + 1)) / 3.0;
                        gy += (at(r - 1, c + k) - at(r + 1, c + k)) / 3.0;
                    }
                    (gx * gx + gy * gy).sqrt()
                })
                .collect()
        })
        .collect()
}

fn pool2(x: &Grid) -> Grid {
    (0..x.len() / 2)
        .map(|r| {
            (0..x[0].len() / 2)
                .map(|c| {
                    (x[2 * r][2 * c]
                        + x[2 * r][2 * c + 1]
                        + x[2 * r + 1][2 * c]
                        + x[2 * r + 1][2 * c + 1])
                        / 4.0
                })
                .collect()
        })
        .collect()
}

pub fn gmsd(a: &PlanarImage, b: &PlanarImage) -> f64 {
    let c = 170.0 / (255.0 * 255.0);
    let ga = prewitt_magnitude(&pool2(&luma_grid(a)));
    let gb = prewitt_magnitude(&pool2(&luma_grid(b)));
    let gms: Vec<f64> = ga
        .iter()
        .flatten()
        .zip(gb.iter().flatten())
        .map(|(m, n)| (2.0 * m * n + c) / (m * m + n * n + c))
        .collect();
    let mean = gms.iter().sum::<f64>() / gms.len() as f64;
    (gms.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / gms.len() as f64).sqrt()
}

fn filter_valid(x: &Grid, win: &Grid) -> Grid {
    let n = win.len();
    let (h, w) = (x.len(), x[0].len());
    if h < n || w < n {
        return Vec::new();
    }
    (0..=h - n)
        .map(|r| (0..=w - n).map(|c| weighted_mean(x, win, r, c)).collect())
        .collect()
}

fn every_other(x: &Grid) -> Grid {
    x.iter()
        .step_by(2)
        .map(|row| row.iter().step_by(2).copied().collect())
        .collect()
}

/// Pixel-domain VIF over four scales.
pub fn vif(a: &PlanarImage, b: &PlanarImage) -> f64 {
    let sigma_nsq = 2.0 / (255.0 * 255.0);
    let eps = 1e-10 / (255.0 * 255.0);
    let mut x = luma_grid(a);
    let mut y = luma_grid(b);
    let (mut num, mut den) = (0.0, 0.0);
    for scale in 1..=4 {
        let n = (1usize << (4 - scale + 1)) + 1;
        let win = gaussian_window(n, n as f64 / 5.0);
        if scale > 1 {
            x = every_other(&filter_valid(&x, &win));
            y = every_other(&filter_valid(&y, &win));
        }
        if x.is_empty() || x[0].is_empty() {
            continue;
        }
        let sq = |g: &Grid| -> Grid {
            g.iter()
                .map(|r| r.iter().map(|v| v * v).collect())
                .collect()
        };
        let xy: Grid = x
            .iter()
            .zip(&y)
            .map(|(p, q)| p.iter().zip(q).map(|(u, v)| u * v).collect())
            .collect();
        let mu1 = filter_valid(&x, &win);
        if mu1.is_empty() {
            continue;
        }
        let mu2 = filter_valid(&y, &win);
        let e11 = filter_valid(&sq(&x), &win);
        let e22 = filter_valid(&sq(&y), &win);
        let e12 = filter_valid(&xy, &win);
        for r in 0..mu1.len() {
            for c in 0..mu1[0].len() {
                let (m1, m2) = (mu1[r][c], mu2[r][c]);
                let mut s1 = (e11[r][c] - m1 * m1).max(0.0);
                let s2 = (e22[r][c] - m2 * m2).max(0.0);
                let s12 = e12[r][c] - m1 * m2;
                let mut g = s12 / (s1 + eps);
                let mut sv = s2 - g * s12;
                if s1 < eps {
                    g = 0.0;
                    sv = s2;
                    s1 = 0.0;
                }
                if s2 < eps {
                    g = 0.0;
                    sv = 0.0;
                }
                if g < 0.0 {
                    sv = s2;
                    g = 0.0;
                }
                sv = sv.max(eps);
                num += (1.0 + g * g * s1 / (sv + sigma_nsq)).log10();
                den += (1.0 + s1 / sigma_nsq).log10();
            }
        }
    }
    num / den
}

/// Unnormalized co-occurrence counts with row/column offsets
/// 0 -> (0, d), 45 -> (-d, d), 90 -> (-d, 0), 135 -> (-d, -d).
pub fn glcm_counts(
    levels_img: &[Vec<usize>],
    levels: usize,
    distance: usize,
    angle: u32,
) -> Vec<Vec<f64>> {
    let d = distance as isize;
    let (dr, dc) = match angle {
        0 => (0, d),
        45 => (-d, d),
        90 => (-d, 0),
        135 => (-d, -d),
        _ => panic!("angle"),
    };
    let (h, w) = (levels_img.len() as isize, levels_img[0].len() as isize);
    let mut m = vec![vec![0.0; levels]; levels];
    for r in 0..h {
        for c in 0..w {
            let (r2, c2) = (r + dr, c + dc);
            if (0..h).contains(&r2) && (0..w).contains(&c2) {
                m[levels_img[r as usize][c as usize]][levels_img[r2 as usize][c2 as usize]] += 1.0;
            }
        }
    }
    m
}

/// `(contrast, dissimilarity, energy, correlation, asm)` from marginals.
pub fn glcm_stats(p: &[Vec<f64>]) -> (f64, f64, f64, f64, f64) {
    let n = p.len();
    let px: Vec<f64> = (0..n).map(|i| p[i].iter().sum()).collect();
    let py: Vec<f64> = (0..n).map(|j| (0..n).map(|i| p[i][j]).sum()).collect();
    let mi: f64 = (0..n).map(|i| i as f64 * px[i]).sum();
    let mj: f64 = (0..n).map(|j| j as f64 * py[j]).sum();
    let si = (0..n)
        .map(|i| (i as f64 - mi).powi(2) * px[i])
        .sum::<f64>()
        .sqrt();
    let sj = (0..n)
        .map(|j| (j as f64 - mj).powi(2) * py[j])
        .sum::<f64>()
        .sqrt();
    let (mut con, mut dis, mut asm, mut cov) = (0.0, 0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let v = p[i][j];
            let d = i as f64 - j as f64;
            con += v * d * d;
            dis += v * d.abs();
            asm += v * v;
            cov += v * (i as f64 - mi) * (j as f64 - mj);
        }
    }
    let corr = if si * sj > 1e-15 {
        cov / (si * sj)
    } else {
        1.0
    };
    (con, dis, asm.sqrt(), corr, asm)
}

/// Competition ranking by sorting: walk the descending order and give each
/// run of equal sums the 1-based position of its first member.
pub fn competition_ranks(sums: &[(String, f64)]) -> Vec<(String, usize, bool)> {
    let mut order: Vec<usize> = (0..sums.len()).collect();
    order.sort_by(|&a, &b| sums[b].1.partial_cmp(&sums[a].1).unwrap());
    let mut out = vec![(String::new(), 0, false); sums.len()];
    let mut pos = 0;
    while pos < order.len() {
        let mut end = pos;
        while end + 1 < order.len() && sums[order[end + 1]].1 == sums[order[pos]].1 {
            end += 1;
        }
        for &k in &order[pos..=end] {
            out[k] = (sums[k].0.clone(), pos + 1, end > pos);
        }
        pos = end + 1;
    }
    out
}

/// Value-ranks of one cell by counting: 1 + (#strictly worse) + (#equal others) / 2.
pub fn value_ranks(values: &[f64], higher_better: bool) -> Vec<f64> {
    values
        .iter()
        .map(|&v| {
            let worse = values
                .iter()
                .filter(|&&o| if higher_better { o < v } else { o > v })
                .count();
            let equal = values.iter().filter(|&&o| o == v).count() - 1;
            1.0 + worse as f64 + equal as f64 / 2.0
        })
        .collect()
}
