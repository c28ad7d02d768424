//! Score record files: CSV with header
//! `model,encoder,recipe,dataset,scale,metric,value` or the JSON mirror.
//! Per-image files carry an extra trailing `image` column, and reading
//! them averages over images.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde_json::Value;
use sreval_core::ranking::{validate_records, CellKey, ScoreRecord};
use sreval_core::MetricId;

use crate::report::{parse_value, Cell, Table};

pub const RECORD_HEADER: [&str; 7] = [
    "model", "encoder", "recipe", "dataset", "scale", "metric", "value",
];
pub const IMAGE_COLUMN: &str = "image";

/// A score record, optionally tied to one evaluated image.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageRecord {
    pub record: ScoreRecord,
    pub image: Option<String>,
}

impl From<ScoreRecord> for ImageRecord {
    fn from(record: ScoreRecord) -> Self {
        ImageRecord {
            record,
            image: None,
        }
    }
}

pub fn records_table(rows: &[ImageRecord]) -> Table {
    let with_image = rows.iter().any(|r| r.image.is_some());
    let mut header: Vec<&str> = RECORD_HEADER.to_vec();
    if with_image {
        header.push(IMAGE_COLUMN);
    }
    let mut t = Table::new(header);
    for r in rows {
        let s = &r.record;
        let mut row = vec![
            Cell::text(&s.model),
            Cell::text(&s.encoder),
            Cell::text(&s.recipe),
            Cell::text(&s.dataset),
            Cell::Fixed(s.scale),
            Cell::text(s.metric.name()),
            Cell::Fixed(s.value),
        ];
        if with_image {
            row.push(Cell::text(r.image.clone().unwrap_or_default()));
        }
        t.push(row);
    }
    t
}

fn build(get: impl Fn(&str) -> Option<String>, at: &str) -> Result<ImageRecord> {
    let field = |name: &str| get(name).ok_or_else(|| anyhow!("{at}: missing field {name:?}"));
    let number = |name: &str| -> Result<f64> {
        let raw = field(name)?;
        parse_value(&raw).ok_or_else(|| anyhow!("{at}: {name} {raw:?} is not a number"))
    };
    let metric: MetricId = field("metric")?.parse().map_err(|e| anyhow!("{at}: {e}"))?;
    let record = ScoreRecord {
        model: field("model")?,
        encoder: field("encoder")?,
        recipe: field("recipe")?,
        dataset: field("dataset")?,
        scale: number("scale")?,
        metric,
        value: number("value")?,
    };
    record.validate().with_context(|| at.to_string())?;
    Ok(ImageRecord {
        record,
        image: get(IMAGE_COLUMN).filter(|s| !s.is_empty()),
    })
}

pub fn parse_csv(text: &str, origin: &str) -> Result<Vec<ImageRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    for name in RECORD_HEADER {
        if !header.iter().any(|h| h == name) {
            bail!("{origin}: header lacks column {name:?}");
        }
    }
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.with_context(|| format!("{origin}: row {}", i + 2))?;
        let get = |name: &str| {
            header
                .iter()
                .position(|h| h == name)
                .and_then(|j| row.get(j))
                .map(String::from)
        };
        out.push(build(get, &format!("{origin}: row {}", i + 2))?);
    }
    Ok(out)
}

pub fn parse_json(text: &str, origin: &str) -> Result<Vec<ImageRecord>> {
    let rows: Vec<serde_json::Map<String, Value>> = serde_json::from_str(text)
        .with_context(|| format!("{origin}: expected an array of objects"))?;
    rows.iter()
        .enumerate()
        .map(|(i, obj)| {
            let get = |name: &str| match obj.get(name)? {
                Value::String(s) => Some(s.clone()),
                Value::Number(n) => Some(n.to_string()),
                _ => None,
            };
            build(get, &format!("{origin}: element {i}"))
        })
        .collect()
}

/// Reads one CSV or JSON record file; JSON is recognized by a `.json`
/// extension or a leading `[`.
pub fn read_rows(path: &Path) -> Result<Vec<ImageRecord>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let origin = path.display().to_string();
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        || text.trim_start().starts_with('[');
    if is_json {
        parse_json(&text, &origin)
    } else {
        parse_csv(&text, &origin)
    }
}

/// Collapses per-image rows to one record per key by an unweighted mean
/// over images. Rows without an image must already be unique.
pub fn reduce_images(rows: Vec<ImageRecord>) -> Result<Vec<ScoreRecord>> {
    let mut plain = Vec::new();
    let mut groups: BTreeMap<CellKey, (ScoreRecord, f64, usize)> = BTreeMap::new();
    for r in rows {
        if r.image.is_none() {
            plain.push(r.record);
            continue;
        }
        let e = groups
            .entry(CellKey::full(&r.record))
            .or_insert_with(|| (r.record.clone(), 0.0, 0));
        e.1 += r.record.value;
        e.2 += 1;
    }
    plain.extend(groups.into_values().map(|(mut rec, sum, n)| {
        rec.value = sum / n as f64;
        rec
    }));
    validate_records(&plain)?;
    Ok(plain)
}

/// Reads and concatenates record files, averaging per-image rows.
pub fn read_records<P: AsRef<Path>>(paths: &[P]) -> Result<Vec<ScoreRecord>> {
    let mut rows = Vec::new();
    for p in paths {
        rows.extend(read_rows(p.as_ref())?);
    }
    reduce_images(rows)
}
