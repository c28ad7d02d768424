//! One function per property suite. Each returns a short summary on success
//! and a description of the first violations on failure.

use std::collections::BTreeMap;

use rand::Rng;
use sreval_core::loss::{grad_loss, hybrid_loss, l1_loss, HybridLossConfig};
use sreval_core::metrics::{evaluate_pair, fsim, gmsd, psnr, srsim, ssim, vif, Polarity};
use sreval_core::ranking::{
    borda_aggregate, final_rank, value_ranks, BordaTable, Dim, PolarityTable, ScoreRecord,
    ValueRankTable,
};
use sreval_core::resample::{axis_contributions, bicubic_resize, CubicKernel};
use sreval_core::texture::{glcm, glcm_stats, quantize, GlcmAngle, GlcmConfig};
use sreval_core::{Domain, EvalDomain, MetricId, PlanarImage};

use super::{gen, oracle};

pub type Outcome = Result<String, String>;

fn verdict(failures: Vec<String>, summary: String) -> Outcome {
    if failures.is_empty() {
        Ok(summary)
    } else {
        let n = failures.len();
        let mut shown: Vec<String> = failures.into_iter().take(5).collect();
        if n > 5 {
            shown.push(format!("... {} more", n - 5));
        }
        Err(shown.join("; "))
    }
}

/// Identical pairs give each metric's fixed point.
pub fn metric_identity(count: usize) -> Outcome {
    let mut rng = gen::rng(4);
    let mut failures = Vec::new();
    let mut worst = [0.0f64; 5];
    for i in 0..count {
        let (w, h) = (rng.gen_range(32..=64), rng.gen_range(32..=64));
        let domain = if i % 3 == 0 {
            Domain::Luma
        } else {
            Domain::Rgb
        };
        let img = if i % 2 == 0 {
            gen::natural(&mut rng, w, h, domain)
        } else {
            gen::uniform(&mut rng, w, h, domain)
        };
        let p = psnr(&img, &img, 1.0).unwrap();
        if p != f64::INFINITY {
            failures.push(format!("image {i}: PSNR {p}"));
        }
        let checks = [
            ("SSIM", ssim(&img, &img).unwrap(), 1.0, 1e-9),
            ("GMSD", gmsd(&img, &img).unwrap(), 0.0, 1e-12),
            ("FSIM", fsim(&img, &img).unwrap(), 1.0, 1e-9),
            ("VIF", vif(&img, &img).unwrap(), 1.0, 1e-6),
            ("SR-SIM", srsim(&img, &img).unwrap(), 1.0, 1e-9),
        ];
        for (k, (name, v, target, tol)) in checks.into_iter().enumerate() {
            let err = (v - target).abs();
            worst[k] = worst[k].max(err);
            if err.is_nan() || err > tol {
                failures.push(format!(
                    "image {i} ({w}x{h}): {name} {v} not within {tol:e} of {target}"
                ));
            }
        }
    }
    verdict(
        failures,
        format!(
            "{count} images; worst |err| SSIM {:.1e} GMSD {:.1e} FSIM {:.1e} VIF {:.1e} SR-SIM {:.1e}",
            worst[0], worst[1], worst[2], worst[3], worst[4]
        ),
    )
}

fn noisy_pair(
    rng: &mut rand::rngs::StdRng,
    w: usize,
    h: usize,
    domain: Domain,
) -> (PlanarImage, PlanarImage) {
    let a = if rng.gen_bool(0.5) {
        gen::natural(rng, w, h, domain)
    } else {
        gen::uniform(rng, w, h, domain)
    };
    let field = gen::noise_field(rng, a.samples().len());
    let sigma = rng.gen_range(0.01..0.2);
    let b = gen::add_noise(&a, &field, sigma);
    (a, b)
}

/// Library metrics and GLCM statistics against the brute-force oracles.
pub fn oracle_equivalence(instances: usize) -> Outcome {
    let mut rng = gen::rng(5);
    let mut failures = Vec::new();
    let mut worst: BTreeMap<&str, f64> = BTreeMap::new();
    let mut record = |name: &'static str,
                      i: usize,
                      got: f64,
                      want: f64,
                      tol: f64,
                      failures: &mut Vec<String>| {
        let err = if got == want { 0.0 } else { (got - want).abs() };
        let e = worst.entry(name).or_insert(0.0);
        *e = e.max(err);
        if err.is_nan() || err > tol {
            failures.push(format!("{name} instance {i}: {got} vs oracle {want}"));
        }
    };
    for i in 0..instances {
        let domain = if i % 2 == 0 {
            Domain::Rgb
        } else {
            Domain::Luma
        };
        let (w, h) = (rng.gen_range(11..=40), rng.gen_range(11..=40));
        let (a, b) = noisy_pair(&mut rng, w, h, domain);
        record(
            "PSNR",
            i,
            psnr(&a, &b, 1.0).unwrap(),
            oracle::psnr(&a, &b),
            1e-12,
            &mut failures,
        );
        record(
            "SSIM",
            i,
            ssim(&a, &b).unwrap(),
            oracle::ssim(&a, &b),
            1e-9,
            &mut failures,
        );
        record(
            "GMSD",
            i,
            gmsd(&a, &b).unwrap(),
            oracle::gmsd(&a, &b),
            1e-12,
            &mut failures,
        );

        let (w, h) = (rng.gen_range(32..=48), rng.gen_range(32..=48));
        let (a, b) = noisy_pair(&mut rng, w, h, domain);
        record(
            "VIF",
            i,
            vif(&a, &b).unwrap(),
            oracle::vif(&a, &b),
            1e-9,
            &mut failures,
        );

        let levels = [2, 8, 16, 256][i % 4];
        let angle = [0, 45, 90, 135][(i / 4) % 4];
        let distance = 1 + i % 3;
        let (gw, gh) = (rng.gen_range(8..=24), rng.gen_range(8..=24));
        let img = gen::uniform(&mut rng, gw, gh, Domain::Luma);
        let cfg = GlcmConfig {
            levels,
            distance,
            angle: GlcmAngle::from_degrees(angle).unwrap(),
            symmetric: false,
            normalize: false,
        };
        let q: Vec<Vec<usize>> = (0..img.height())
            .map(|r| {
                (0..img.width())
                    .map(|c| quantize(img.get(0, r, c), levels))
                    .collect()
            })
            .collect();
        let counts = oracle::glcm_counts(&q, levels, distance, angle);
        let lib = glcm(&img, &cfg).unwrap();
        let same = (0..levels).all(|r| (0..levels).all(|c| lib.get(r, c) == counts[r][c]));
        if !same {
            failures.push(format!("GLCM counts instance {i} differ"));
        }
        let total: f64 = counts.iter().flatten().sum();
        let p: Vec<Vec<f64>> = counts
            .iter()
            .map(|r| r.iter().map(|v| v / total).collect())
            .collect();
        let normalized = glcm(
            &img,
            &GlcmConfig {
                normalize: true,
                ..cfg
            },
        )
        .unwrap();
        let s = glcm_stats(&normalized).unwrap();
        let (con, dis, ene, cor, asm) = oracle::glcm_stats(&p);
        for (got, want) in [
            (s.contrast, con),
            (s.dissimilarity, dis),
            (s.energy, ene),
            (s.correlation, cor),
            (s.asm, asm),
        ] {
            let scale = want.abs().max(1.0);
            record("GLCM", i, got / scale, want / scale, 1e-12, &mut failures);
        }
    }
    let summary = worst
        .iter()
        .map(|(k, v)| format!("{k} {v:.1e}"))
        .collect::<Vec<_>>()
        .join(", ");
    verdict(
        failures,
        format!("{instances} instances per metric; worst |err|: {summary}"),
    )
}

/// Closed-form PSNR, SSIM and Y-versus-RGB values.
pub fn closed_forms() -> Outcome {
    let mut failures = Vec::new();
    let a = PlanarImage::constant(48, 48, Domain::Rgb, 0.4).unwrap();
    let b = PlanarImage::constant(48, 48, Domain::Rgb, 0.4 + 1.0 / 255.0).unwrap();
    let p = psnr(&a, &b, 1.0).unwrap();
    if (p - 48.1308).abs() > 1e-4 || (p - 20.0 * 255f64.log10()).abs() > 1e-6 {
        failures.push(format!("constant-offset PSNR {p}"));
    }

    let a = PlanarImage::constant(32, 32, Domain::Luma, 0.5).unwrap();
    let b = PlanarImage::constant(32, 32, Domain::Luma, 0.6).unwrap();
    let s = ssim(&a, &b).unwrap();
    if (s - 0.98361).abs() > 1e-5 {
        failures.push(format!("constant SSIM {s}"));
    }

    let target = 20.0 * (255.0f64 / 219.0).log10();
    let mut rng = gen::rng(6);
    let mut worst = 0.0f64;
    for i in 0..10 {
        let gray = gen::natural(&mut rng, 40, 40, Domain::Luma);
        let field = gen::noise_field(&mut rng, gray.samples().len());
        let noisy = gen::add_noise(&gray, &field, 0.03);
        let (r, d) = (gen::gray_rgb(&gray), gen::gray_rgb(&noisy));
        let rgb = evaluate_pair(&r, &d, &[MetricId::Psnr], EvalDomain::Rgb, 0).unwrap()[0].value;
        let y = evaluate_pair(&r, &d, &[MetricId::Psnr], EvalDomain::Y, 0).unwrap()[0].value;
        let err = (y - rgb - target).abs();
        worst = worst.max(err);
        if err > 1e-6 {
            failures.push(format!(
                "pair {i}: Y-RGB PSNR delta {} vs {target}",
                y - rgb
            ));
        }
    }
    verdict(
        failures,
        format!("PSNR {p:.6} dB, SSIM {s:.6}, Y-RGB delta {target:.6} dB (worst err {worst:.1e})"),
    )
}

const MODELS: [&str; 6] = ["A", "B", "C", "D", "E", "F"];

fn record(model: &str, dataset: usize, scale: f64, metric: MetricId, value: f64) -> ScoreRecord {
    ScoreRecord {
        model: model.into(),
        encoder: "enc".into(),
        recipe: "base".into(),
        dataset: format!("d{dataset}"),
        scale,
        metric,
        value,
    }
}

const CELL_DIMS: [Dim; 3] = [Dim::Dataset, Dim::Scale, Dim::Metric];

fn random_design(rng: &mut rand::rngs::StdRng) -> Vec<ScoreRecord> {
    let m = rng.gen_range(1..=6);
    let datasets = rng.gen_range(1..=2);
    let scales: Vec<f64> = [2.0, 3.5][..rng.gen_range(1..=2)].to_vec();
    let pool = [
        MetricId::Psnr,
        MetricId::Ssim,
        MetricId::Gmsd,
        MetricId::Lpips,
    ];
    let metrics: Vec<MetricId> = pool.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
    let metrics = if metrics.is_empty() {
        vec![MetricId::Psnr]
    } else {
        metrics
    };
    let integers = rng.gen_bool(0.5);
    let mut out = Vec::new();
    for d in 0..datasets {
        for &s in &scales {
            for &q in &metrics {
                for model in &MODELS[..m] {
                    let v = if q == MetricId::Psnr && rng.gen_bool(0.05) {
                        f64::INFINITY
                    } else if integers {
                        f64::from(rng.gen_range(0..4))
                    } else {
                        rng.gen_range(0.0..40.0)
                    };
                    out.push(record(model, d, s, q, v));
                }
            }
        }
    }
    out
}

fn ranks_equal(a: &ValueRankTable, b: &ValueRankTable) -> bool {
    a.cells.len() == b.cells.len()
        && a.cells
            .iter()
            .zip(&b.cells)
            .all(|((ka, ca), (kb, cb))| ka == kb && ca == cb)
}

/// Value-rank, Borda and final-rank invariants over random designs, plus an
/// exhaustive comparison with the sort-based ranking oracle.
pub fn borda_properties(designs: usize) -> Outcome {
    let mut rng = gen::rng(7);
    let mut failures = Vec::new();
    let pol = PolarityTable::default();
    for n in 0..designs {
        let records = random_design(&mut rng);
        let v = value_ranks(&records, &CELL_DIMS, &pol).unwrap();
        let m = v.models.len() as f64;
        let cell_sum = m * (m + 1.0) / 2.0;

        let mut by_cell: BTreeMap<_, Vec<&ScoreRecord>> = BTreeMap::new();
        for r in &records {
            by_cell
                .entry(sreval_core::ranking::CellKey::project(r, &CELL_DIMS))
                .or_default()
                .push(r);
        }
        for (key, rs) in &by_cell {
            let cell = &v.cells[key];
            let sum: f64 = cell.ranks.values().sum();
            if sum != cell_sum {
                failures.push(format!(
                    "design {n}: cell {key} rank sum {sum} != {cell_sum}"
                ));
            }
            let values: Vec<f64> = rs.iter().map(|r| r.value).collect();
            let expected =
                oracle::value_ranks(&values, rs[0].metric.polarity() == Polarity::HigherBetter);
            for (r, e) in rs.iter().zip(expected) {
                if cell.ranks[&r.model] != e {
                    failures.push(format!(
                        "design {n}: cell {key} model {} rank {} != oracle {e}",
                        r.model, cell.ranks[&r.model]
                    ));
                }
            }
        }

        let b = borda_aggregate(&v);
        let total: f64 = b.sums.values().sum();
        if total != v.cells.len() as f64 * cell_sum {
            failures.push(format!("design {n}: Borda total {total}"));
        }
        let ranked = final_rank(&b);
        let sums: Vec<(String, f64)> = b.sums.iter().map(|(k, v)| (k.clone(), *v)).collect();
        for (model, rank, tied) in oracle::competition_ranks(&sums) {
            let e = ranked.entries.iter().find(|e| e.model == model).unwrap();
            if (e.rank, e.tied) != (rank, tied) {
                failures.push(format!(
                    "design {n}: final rank of {model} {:?} != oracle {:?}",
                    (e.rank, e.tied),
                    (rank, tied)
                ));
            }
        }

        // Raising one higher-is-better value never lowers that model's sum.
        let candidates: Vec<usize> = (0..records.len())
            .filter(|&i| {
                records[i].metric.polarity() == Polarity::HigherBetter
                    && records[i].value.is_finite()
            })
            .collect();
        if !candidates.is_empty() {
            let i = candidates[rng.gen_range(0..candidates.len())];
            let mut raised = records.clone();
            raised[i].value += rng.gen_range(0.0..5.0);
            let b2 = borda_aggregate(&value_ranks(&raised, &CELL_DIMS, &pol).unwrap());
            let model = &records[i].model;
            if b2.sums[model] < b.sums[model] {
                failures.push(format!("design {n}: raising {model} lowered its Borda sum"));
            }
        }

        // Negating values and flipping every polarity changes nothing. An
        // identical-pair PSNR would negate to an invalid -inf, so such
        // designs skip this check.
        let finite = records.iter().all(|r| r.value.is_finite());
        let negated: Vec<ScoreRecord> = records
            .iter()
            .map(|r| ScoreRecord {
                value: -r.value,
                ..r.clone()
            })
            .collect();
        let flipped = [
            MetricId::Psnr,
            MetricId::Ssim,
            MetricId::Gmsd,
            MetricId::Lpips,
        ]
        .into_iter()
        .fold(PolarityTable::default(), |t, q| {
            t.with_override(q, q.polarity().flipped())
        });
        if finite && !ranks_equal(&v, &value_ranks(&negated, &CELL_DIMS, &flipped).unwrap()) {
            failures.push(format!("design {n}: polarity flip changed value-ranks"));
        }

        // Positive scaling of one cell changes nothing.
        let keys: Vec<_> = by_cell.keys().cloned().collect();
        let target = &keys[rng.gen_range(0..keys.len())];
        let c = rng.gen_range(0.1..10.0);
        let scaled: Vec<ScoreRecord> = records
            .iter()
            .map(|r| {
                let mut r = r.clone();
                if sreval_core::ranking::CellKey::project(&r, &CELL_DIMS) == *target {
                    r.value *= c;
                }
                r
            })
            .collect();
        if !ranks_equal(&v, &value_ranks(&scaled, &CELL_DIMS, &pol).unwrap()) {
            failures.push(format!(
                "design {n}: scaling cell {target} by {c} changed value-ranks"
            ));
        }
    }
    let grid = exhaustive_grid(&mut failures);
    verdict(
        failures,
        format!("{designs} random designs; exhaustive grid: {grid} rankings checked"),
    )
}

fn final_rank_matches(sums: &[f64], failures: &mut Vec<String>) {
    let table = BordaTable {
        sums: sums
            .iter()
            .enumerate()
            .map(|(i, s)| (MODELS[i].to_string(), *s))
            .collect(),
        cells: 0,
    };
    let ranked = final_rank(&table);
    let named: Vec<(String, f64)> = table.sums.iter().map(|(k, v)| (k.clone(), *v)).collect();
    for (model, rank, tied) in oracle::competition_ranks(&named) {
        let e = ranked.entries.iter().find(|e| e.model == model).unwrap();
        if (e.rank, e.tied) != (rank, tied) && failures.len() < 100 {
            failures.push(format!(
                "grid sums {sums:?}: {model} got {:?}, oracle {:?}",
                (e.rank, e.tied),
                (rank, tied)
            ));
        }
    }
}

/// Every assignment of values 0..=3 to up to 4 models in up to 3 cells.
/// Assignments are enumerated through their per-cell value-rank vectors
/// (each reached from all 4^|M| value vectors), and small designs also run
/// the full record pipeline.
fn exhaustive_grid(failures: &mut Vec<String>) -> usize {
    let pol = PolarityTable::default();
    let mut checked = 0;
    for m in 1..=4usize {
        let vectors: Vec<Vec<f64>> = (0..4usize.pow(m as u32))
            .map(|code| {
                (0..m)
                    .map(|k| ((code / 4usize.pow(k as u32)) % 4) as f64)
                    .collect()
            })
            .collect();
        let mut classes: Vec<Vec<f64>> = Vec::new();
        for values in &vectors {
            let recs: Vec<ScoreRecord> = values
                .iter()
                .enumerate()
                .map(|(k, &v)| record(MODELS[k], 0, 2.0, MetricId::Psnr, v))
                .collect();
            let v = value_ranks(&recs, &CELL_DIMS, &pol).unwrap();
            let ranks: Vec<f64> = v
                .cells
                .values()
                .next()
                .unwrap()
                .ranks
                .values()
                .copied()
                .collect();
            if ranks != oracle::value_ranks(values, true) {
                failures.push(format!("grid cell {values:?}: ranks {ranks:?}"));
            }
            if !classes.contains(&ranks) {
                classes.push(ranks);
            }
        }
        for cells in 1..=3usize {
            let combos = classes.len().pow(cells as u32);
            for code in 0..combos {
                let mut sums = vec![0.0; m];
                for c in 0..cells {
                    let class = &classes[(code / classes.len().pow(c as u32)) % classes.len()];
                    for (s, r) in sums.iter_mut().zip(class) {
                        *s += r;
                    }
                }
                final_rank_matches(&sums, failures);
                checked += 1;
            }
            if m * cells <= 6 {
                for code in 0..4usize.pow((m * cells) as u32) {
                    let recs: Vec<ScoreRecord> = (0..m * cells)
                        .map(|k| {
                            let v = ((code / 4usize.pow(k as u32)) % 4) as f64;
                            record(MODELS[k % m], k / m, 2.0, MetricId::Psnr, v)
                        })
                        .collect();
                    let b = borda_aggregate(&value_ranks(&recs, &CELL_DIMS, &pol).unwrap());
                    let sums: Vec<f64> = b.sums.values().copied().collect();
                    final_rank_matches(&sums, failures);
                    checked += 1;
                }
            }
        }
    }
    checked
}

/// Resampler partition of unity, identity, constant and ramp preservation.
pub fn resampler_properties() -> Outcome {
    let mut rng = gen::rng(8);
    let mut failures = Vec::new();
    let kernel = CubicKernel::default();
    let mut worst_pou = 0.0f64;
    for _ in 0..10_000 {
        let center = rng.gen_range(-5.0..200.0);
        let (_, w) = kernel.taps(center, 1.0);
        worst_pou = worst_pou.max((w.iter().sum::<f64>() - 1.0).abs());
    }
    let mut positions = 0;
    while positions < 10_000 {
        let (n_in, n_out) = (rng.gen_range(1..300), rng.gen_range(1..300));
        for c in axis_contributions(n_in, n_out, rng.gen_bool(0.5)) {
            worst_pou = worst_pou.max((c.weights.iter().sum::<f64>() - 1.0).abs());
            positions += 1;
        }
    }
    if worst_pou > 1e-12 {
        failures.push(format!("partition of unity off by {worst_pou:e}"));
    }

    for i in 0..10 {
        let img = gen::uniform(&mut rng, 17 + i, 23 - i, Domain::Rgb);
        let out = bicubic_resize(&img, img.width(), img.height(), true).unwrap();
        let exact = out
            .samples()
            .iter()
            .zip(img.samples())
            .all(|(a, b)| a.to_bits() == b.to_bits());
        if !exact {
            failures.push(format!("scale-1 resize of image {i} is not bit-exact"));
        }
    }

    let mut worst_const = 0.0f64;
    for _ in 0..50 {
        let mut s: f64 = rng.gen_range(1.0..6.0);
        if s.fract() == 0.0 {
            s += 0.5;
        }
        let value = rng.gen_range(0.0..1.0);
        let img = PlanarImage::constant(120, 90, Domain::Rgb, value).unwrap();
        let (dw, dh) = (
            ((120.0 / s).round() as usize).max(1),
            ((90.0 / s).round() as usize).max(1),
        );
        let (uw, uh) = ((20.0 * s).round() as usize, (15.0 * s).round() as usize);
        let small = PlanarImage::constant(20, 15, Domain::Rgb, value).unwrap();
        for out in [
            bicubic_resize(&img, dw, dh, true).unwrap(),
            bicubic_resize(&small, uw, uh, true).unwrap(),
        ] {
            for v in out.samples() {
                worst_const = worst_const.max((v - value).abs());
            }
        }
    }
    if worst_const > 1e-12 {
        failures.push(format!("constant not preserved: error {worst_const:e}"));
    }

    let (w, h) = (64, 48);
    let ramp = PlanarImage::from_fn(w, h, Domain::Luma, |_, r, c| {
        0.1 + 0.01 * c as f64 + 0.005 * r as f64
    })
    .unwrap();
    let half = bicubic_resize(&ramp, w / 2, h / 2, true).unwrap();
    let mut worst_ramp = 0.0f64;
    for i in 2..h / 2 - 3 {
        for j in 2..w / 2 - 3 {
            let (sr, sc) = (2.0 * i as f64 + 0.5, 2.0 * j as f64 + 0.5);
            let expected = 0.1 + 0.01 * sc + 0.005 * sr;
            worst_ramp = worst_ramp.max((half.get(0, i, j) - expected).abs());
        }
    }
    if worst_ramp > 1e-9 {
        failures.push(format!("interior ramp error {worst_ramp:e}"));
    }
    verdict(
        failures,
        format!(
            "unity {worst_pou:.1e} over {} positions, constant {worst_const:.1e}, ramp {worst_ramp:.1e}",
            10_000 + positions
        ),
    )
}

fn checkerboard(w: usize, h: usize) -> PlanarImage {
    PlanarImage::from_fn(w, h, Domain::Luma, |_, r, c| ((r + c) % 2) as f64).unwrap()
}

/// Enumerates every horizontal and vertical forward difference.
fn loss_oracle(t: &PlanarImage, p: &PlanarImage) -> (f64, f64) {
    let (w, h) = (t.width(), t.height());
    let (mut l1, mut n) = (0.0, 0.0);
    let (mut gx, mut nx, mut gy, mut ny) = (0.0, 0.0, 0.0, 0.0);
    for pl in 0..t.planes() {
        for r in 0..h {
            for c in 0..w {
                l1 += (t.get(pl, r, c) - p.get(pl, r, c)).abs();
                n += 1.0;
                if c + 1 < w {
                    let dt = t.get(pl, r, c + 1) - t.get(pl, r, c);
                    let dp = p.get(pl, r, c + 1) - p.get(pl, r, c);
                    gx += (dt - dp).abs();
                    nx += 1.0;
                }
                if r + 1 < h {
                    let dt = t.get(pl, r + 1, c) - t.get(pl, r, c);
                    let dp = p.get(pl, r + 1, c) - p.get(pl, r, c);
                    gy += (dt - dp).abs();
                    ny += 1.0;
                }
            }
        }
    }
    (l1 / n, gx / nx + gy / ny)
}

/// Hybrid loss reduces to L1, is linear in its weights, ignores DC offsets
/// in the gradient term and matches enumeration on a checkerboard.
pub fn loss_properties() -> Outcome {
    let mut rng = gen::rng(9);
    let mut failures = Vec::new();
    for i in 0..20 {
        let (w, h) = (rng.gen_range(2..30), rng.gen_range(2..30));
        let domain = if i % 2 == 0 {
            Domain::Rgb
        } else {
            Domain::Luma
        };
        let t = gen::uniform(&mut rng, w, h, domain);
        let p = gen::uniform(&mut rng, w, h, domain);
        let l1 = l1_loss(&t, &p).unwrap();
        let grad = grad_loss(&t, &p).unwrap();
        let pure = hybrid_loss(&t, &p, &HybridLossConfig::new(1.0, 0.0).unwrap()).unwrap();
        if pure.to_bits() != l1.to_bits() {
            failures.push(format!("pair {i}: hybrid(1, 0) {pure} != L1 {l1}"));
        }
        let (a, b) = (rng.gen_range(0.0..3.0), rng.gen_range(0.0..3.0));
        let h_ab = hybrid_loss(&t, &p, &HybridLossConfig::new(a, b).unwrap()).unwrap();
        if (h_ab - (a * l1 + b * grad)).abs() > 1e-15 {
            failures.push(format!("pair {i}: hybrid({a}, {b}) not linear"));
        }
        let (ol1, ograd) = loss_oracle(&t, &p);
        if (ol1 - l1).abs() > 1e-12 || (ograd - grad).abs() > 1e-12 {
            failures.push(format!("pair {i}: components differ from enumeration"));
        }

        // Dyadic samples keep the offset arithmetic exact.
        let base = PlanarImage::from_fn(w, h, domain, |_, _, _| {
            f64::from(rng.gen_range(0..=200u8)) / 256.0
        })
        .unwrap();
        let shifted =
            PlanarImage::from_fn(w, h, domain, |pl, r, c| base.get(pl, r, c) + 0.125).unwrap();
        let g = grad_loss(&base, &shifted).unwrap();
        if g != 0.0 {
            failures.push(format!("pair {i}: DC offset gives gradient loss {g}"));
        }
    }
    let board = checkerboard(9, 7);
    let flat = PlanarImage::constant(9, 7, Domain::Luma, 0.5).unwrap();
    let (l1, grad) = loss_oracle(&board, &flat);
    let expected = l1 + 0.3 * grad;
    let got = hybrid_loss(&board, &flat, &HybridLossConfig::new(1.0, 0.3).unwrap()).unwrap();
    if (got - expected).abs() > 1e-15 || (expected - 1.1).abs() > 1e-15 {
        failures.push(format!("checkerboard hybrid {got}, enumeration {expected}"));
    }
    verdict(
        failures,
        format!("20 random pairs; checkerboard hybrid {got}"),
    )
}

/// Per-image monotonic response to escalating Gaussian noise.
pub fn noise_monotonicity(images: usize) -> Outcome {
    let sigmas = [0.02, 0.05, 0.1];
    let mut failures = Vec::new();
    for i in 0..images {
        let mut rng = gen::rng(1000 + i as u64);
        let img = gen::natural(&mut rng, 64, 64, Domain::Rgb);
        let field = gen::noise_field(&mut rng, img.samples().len());
        let scores: Vec<[f64; 5]> = sigmas
            .iter()
            .map(|&s| {
                let d = gen::add_noise(&img, &field, s);
                [
                    psnr(&img, &d, 1.0).unwrap(),
                    ssim(&img, &d).unwrap(),
                    fsim(&img, &d).unwrap(),
                    srsim(&img, &d).unwrap(),
                    -gmsd(&img, &d).unwrap(),
                ]
            })
            .collect();
        for (k, name) in ["PSNR", "SSIM", "FSIM", "SR-SIM", "GMSD"]
            .iter()
            .enumerate()
        {
            let ok = scores.windows(2).all(|w| w[1][k] < w[0][k]);
            if !ok {
                let seq: Vec<f64> = scores
                    .iter()
                    .map(|s| if k == 4 { -s[k] } else { s[k] })
                    .collect();
                failures.push(format!("image {i}: {name} not monotone {seq:?}"));
            }
        }
    }
    verdict(
        failures,
        format!(
            "{images} images x {} noise levels x 5 metrics",
            sigmas.len()
        ),
    )
}
