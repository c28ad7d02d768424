//! Degradation manifests and evaluation pair manifests.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};

use crate::io::list_images;
use crate::report::{parse_value, Cell, Table};

pub const DEGRADE_HEADER: [&str; 10] = [
    "source",
    "rep",
    "scale",
    "crop_x",
    "crop_y",
    "flip_h",
    "flip_v",
    "transpose",
    "lr_path",
    "hr_path",
];

pub const PAIR_HEADER: [&str; 7] = [
    "reference",
    "distorted",
    "model",
    "dataset",
    "scale",
    "recipe",
    "encoder",
];

/// One generated LR/HR pair.
#[derive(Clone, Debug, PartialEq)]
pub struct DegradeRow {
    pub source: String,
    pub rep: usize,
    pub scale: f64,
    pub crop_x: usize,
    pub crop_y: usize,
    pub flip_h: bool,
    pub flip_v: bool,
    pub transpose: bool,
    pub lr_path: String,
    pub hr_path: String,
}

pub fn degrade_table(rows: &[DegradeRow]) -> Table {
    let mut t = Table::new(DEGRADE_HEADER);
    for r in rows {
        t.push(vec![
            Cell::text(&r.source),
            Cell::Int(r.rep as i64),
            Cell::Fixed(r.scale),
            Cell::Int(r.crop_x as i64),
            Cell::Int(r.crop_y as i64),
            Cell::Bool(r.flip_h),
            Cell::Bool(r.flip_v),
            Cell::Bool(r.transpose),
            Cell::text(&r.lr_path),
            Cell::text(&r.hr_path),
        ]);
    }
    t
}

/// Labels attached to every discovered pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairLabels {
    pub model: String,
    pub dataset: String,
    pub scale: f64,
    pub recipe: String,
    pub encoder: String,
}

/// A reference/distorted pair and the record key it scores into.
#[derive(Clone, Debug, PartialEq)]
pub struct Pair {
    pub reference: PathBuf,
    pub distorted: PathBuf,
    pub labels: PairLabels,
}

impl Pair {
    /// The image identifier written to per-image records.
    pub fn image_id(&self) -> String {
        self.reference
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    }

    fn sort_key(&self) -> (&str, &str, &str, &str, u64, String) {
        let l = &self.labels;
        (
            &l.model,
            &l.dataset,
            &l.encoder,
            &l.recipe,
            l.scale.to_bits(),
            self.image_id(),
        )
    }
}

fn stem(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Pairs files of two directories by identical stem. Every reference
/// needs a distorted counterpart.
pub fn discover_pairs(
    reference_dir: &Path,
    distorted_dir: &Path,
    labels: &PairLabels,
) -> Result<Vec<Pair>> {
    let refs = list_images(reference_dir)
        .with_context(|| format!("listing {}", reference_dir.display()))?;
    let dists = list_images(distorted_dir)
        .with_context(|| format!("listing {}", distorted_dir.display()))?;
    if refs.is_empty() {
        bail!("no images in {}", reference_dir.display());
    }
    let mut missing = Vec::new();
    let mut pairs = Vec::with_capacity(refs.len());
    for r in refs {
        let s = stem(&r);
        let mut matches = dists.iter().filter(|d| stem(d) == s);
        match (matches.next(), matches.next()) {
            (Some(d), None) => pairs.push(Pair {
                reference: r.clone(),
                distorted: d.clone(),
                labels: labels.clone(),
            }),
            (Some(_), Some(_)) => bail!(
                "several files in {} share the stem {s:?}",
                distorted_dir.display()
            ),
            (None, _) => missing.push(s),
        }
    }
    if !missing.is_empty() {
        bail!(
            "no distorted image in {} for: {}",
            distorted_dir.display(),
            missing.join(", ")
        );
    }
    Ok(pairs)
}

/// Reads a pair manifest. Relative paths resolve against the manifest's
/// directory; all files must exist and keys must be unique.
pub fn read_pair_manifest(path: &Path) -> Result<Vec<Pair>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    let col = |name: &str| {
        header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| anyhow!("{}: header lacks column {name:?}", path.display()))
    };
    let cols: Vec<usize> = PAIR_HEADER.iter().map(|n| col(n)).collect::<Result<_>>()?;
    let mut pairs = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let at = format!("{}: row {}", path.display(), i + 2);
        let row = row.with_context(|| at.clone())?;
        let f = |k: usize| row.get(cols[k]).unwrap_or_default().to_string();
        let resolve = |p: String| {
            let p = PathBuf::from(p);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        };
        let scale = parse_value(&f(4))
            .filter(|s| s.is_finite())
            .ok_or_else(|| anyhow!("{at}: scale {:?} is not a number", f(4)))?;
        let pair = Pair {
            reference: resolve(f(0)),
            distorted: resolve(f(1)),
            labels: PairLabels {
                model: f(2),
                dataset: f(3),
                scale,
                recipe: f(5),
                encoder: f(6),
            },
        };
        for p in [&pair.reference, &pair.distorted] {
            if !p.is_file() {
                bail!("{at}: {} does not exist", p.display());
            }
        }
        pairs.push(pair);
    }
    let mut seen = BTreeSet::new();
    for p in &pairs {
        if !seen.insert(p.sort_key()) {
            bail!(
                "{}: duplicate entry for image {} of model {} at scale {}",
                path.display(),
                p.image_id(),
                p.labels.model,
                p.labels.scale
            );
        }
    }
    Ok(pairs)
}

/// Orders pairs by (model, dataset, encoder, recipe, scale, image).
pub fn sort_pairs(pairs: &mut [Pair]) {
    pairs.sort_by(|a, b| {
        let (ka, kb) = (a.sort_key(), b.sort_key());
        ka.0.cmp(kb.0)
            .then(ka.1.cmp(kb.1))
            .then(ka.2.cmp(kb.2))
            .then(ka.3.cmp(kb.3))
            .then(a.labels.scale.total_cmp(&b.labels.scale))
            .then(ka.5.cmp(&kb.5))
    });
}
