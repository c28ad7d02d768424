#![allow(dead_code)]

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use sreval::io::save_image;
use sreval_core::{Domain, PlanarImage};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn sreval<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_sreval"))
        .args(args)
        .output()
        .expect("sreval binary runs")
}

/// Runs the binary and returns stdout, panicking with stderr on failure.
pub fn sreval_ok<I, S>(args: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let out = sreval(args);
    if !out.status.success() {
        panic!("sreval failed: {}", String::from_utf8_lossy(&out.stderr));
    }
    String::from_utf8(out.stdout).unwrap()
}

/// CSV text as one map per row.
pub fn csv_rows(text: &str) -> Vec<HashMap<String, String>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().clone();
    reader
        .records()
        .map(|r| {
            let r = r.unwrap();
            header
                .iter()
                .zip(r.iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}

pub fn noisy_image(
    rng: &mut StdRng,
    w: usize,
    h: usize,
    domain: Domain,
) -> (PlanarImage, PlanarImage) {
    let planes = domain.planes();
    let base: Vec<f64> = (0..w * h * planes)
        .map(|i| {
            let (r, c) = ((i / w) % h, i % w);
            0.5 + 0.3 * ((r as f64) * 0.3).sin() * ((c as f64) * 0.2).cos()
        })
        .collect();
    let noisy: Vec<f64> = base
        .iter()
        .map(|v| (v + rng.gen_range(-0.08..0.08)).clamp(0.0, 1.0))
        .collect();
    (
        PlanarImage::new(w, h, domain, base).unwrap(),
        PlanarImage::new(w, h, domain, noisy).unwrap(),
    )
}

/// Writes `n` reference/distorted PNG pairs under `root/ref` and
/// `root/dist`.
pub fn write_pair_corpus(root: &Path, n: usize, size: usize, seed: u64) -> (PathBuf, PathBuf) {
    let (refs, dists) = (root.join("ref"), root.join("dist"));
    std::fs::create_dir_all(&refs).unwrap();
    std::fs::create_dir_all(&dists).unwrap();
    let mut rng = StdRng::seed_from_u64(seed);
    for i in 0..n {
        let (a, b) = noisy_image(&mut rng, size, size, Domain::Rgb);
        save_image(&a, refs.join(format!("img{i:03}.png"))).unwrap();
        save_image(&b, dists.join(format!("img{i:03}.png"))).unwrap();
    }
    (refs, dists)
}
