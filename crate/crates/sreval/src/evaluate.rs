//! Batch full-reference evaluation over image pairs.

use std::cmp::Ordering;

use rayon::prelude::*;
use sreval_core::metrics::evaluate_pair;
use sreval_core::ranking::ScoreRecord;
use sreval_core::{EvalDomain, MetricId};

use crate::io::load_image;
use crate::manifest::Pair;
use crate::records::ImageRecord;
use crate::report::{Cell, Table};

#[derive(Clone, Debug, PartialEq)]
pub struct EvalConfig {
    pub metrics: Vec<MetricId>,
    pub domain: EvalDomain,
    pub border: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            metrics: MetricId::COMPUTABLE.to_vec(),
            domain: EvalDomain::Rgb,
            border: 0,
        }
    }
}

/// A pair that could not be scored.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorRow {
    pub pair: Pair,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvalOutput {
    pub rows: Vec<ImageRecord>,
    pub errors: Vec<ErrorRow>,
}

fn score_pair(pair: &Pair, cfg: &EvalConfig) -> Result<Vec<ImageRecord>, String> {
    let reference = load_image(&pair.reference).map_err(|e| e.to_string())?;
    let distorted = load_image(&pair.distorted).map_err(|e| e.to_string())?;
    let results = evaluate_pair(&reference, &distorted, &cfg.metrics, cfg.domain, cfg.border)
        .map_err(|e| {
            format!(
                "{} vs {}: {e}",
                pair.reference.display(),
                pair.distorted.display()
            )
        })?;
    let l = &pair.labels;
    Ok(results
        .into_iter()
        .map(|r| ImageRecord {
            record: ScoreRecord {
                model: l.model.clone(),
                encoder: l.encoder.clone(),
                recipe: l.recipe.clone(),
                dataset: l.dataset.clone(),
                scale: l.scale,
                metric: r.metric,
                value: r.value,
            },
            image: Some(pair.image_id()),
        })
        .collect())
}

/// Output order: model, dataset, scale, metric, then encoder, recipe and
/// image.
pub fn row_order(a: &ImageRecord, b: &ImageRecord) -> Ordering {
    let (x, y) = (&a.record, &b.record);
    x.model
        .cmp(&y.model)
        .then_with(|| x.dataset.cmp(&y.dataset))
        .then_with(|| x.scale.total_cmp(&y.scale))
        .then_with(|| x.metric.cmp(&y.metric))
        .then_with(|| x.encoder.cmp(&y.encoder))
        .then_with(|| x.recipe.cmp(&y.recipe))
        .then_with(|| a.image.cmp(&b.image))
}

/// Scores every pair on the current rayon pool. Failing pairs become
/// error rows and the batch continues. Output is sorted, so it does not
/// depend on scheduling.
pub fn evaluate_pairs(pairs: &[Pair], cfg: &EvalConfig) -> EvalOutput {
    let results: Vec<_> = pairs.par_iter().map(|p| (p, score_pair(p, cfg))).collect();
    let mut out = EvalOutput::default();
    for (pair, result) in results {
        match result {
            Ok(rows) => out.rows.extend(rows),
            Err(message) => out.errors.push(ErrorRow {
                pair: pair.clone(),
                message,
            }),
        }
    }
    out.rows.sort_by(row_order);
    out.errors.sort_by(|a, b| {
        (&a.pair.reference, &a.pair.distorted, &a.pair.labels.model).cmp(&(
            &b.pair.reference,
            &b.pair.distorted,
            &b.pair.labels.model,
        ))
    });
    out
}

pub const ERROR_HEADER: [&str; 6] = ["ref", "dist", "model", "dataset", "scale", "error"];

pub fn error_table(errors: &[ErrorRow]) -> Table {
    let mut t = Table::new(ERROR_HEADER);
    for e in errors {
        t.push(vec![
            Cell::text(e.pair.reference.display().to_string()),
            Cell::text(e.pair.distorted.display().to_string()),
            Cell::text(&e.pair.labels.model),
            Cell::text(&e.pair.labels.dataset),
            Cell::Fixed(e.pair.labels.scale),
            Cell::text(&e.message),
        ]);
    }
    t
}
