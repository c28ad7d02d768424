//! Aggregated ranking over score records.
//!
//! Within each evaluation cell models get value-ranks (`|M|` for the best,
//! 1 for the worst, exact ties share the mean position). Borda sums add
//! value-ranks across cells and the final rank orders Borda sums
//! descending with competition ranking for ties.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};
use crate::metrics::{MetricId, Polarity};

mod borda;
mod tables;

pub use borda::{
    borda_aggregate, final_rank, value_ranks, BordaTable, CellRanks, RankEntry, RankTable,
    ValueRankTable,
};
pub use tables::{
    average_over, best_model_table, delta_analysis, mean_deltas, psnr_gain, BestCell, DeltaRow,
    GainRow, MEAN_LABEL,
};

/// One measurement: a model's score on one (dataset, scale, metric) under
/// one training recipe and encoder. PSNR may be `+inf` (identical images).
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreRecord {
    pub model: String,
    pub encoder: String,
    pub recipe: String,
    pub dataset: String,
    pub scale: f64,
    pub metric: MetricId,
    pub value: f64,
}

impl ScoreRecord {
    pub fn validate(&self) -> Result<()> {
        let ok = self.value.is_finite()
            || (self.metric == MetricId::Psnr && self.value == f64::INFINITY);
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "{} value {} for {} is not finite",
                self.metric,
                self.value,
                CellKey::full(self)
            )));
        }
        if !self.scale.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "scale {} is not finite",
                self.scale
            )));
        }
        Ok(())
    }
}

/// Checks every record and that no two share a full key.
pub fn validate_records(records: &[ScoreRecord]) -> Result<()> {
    let mut keys: Vec<CellKey> = Vec::with_capacity(records.len());
    for r in records {
        r.validate()?;
        keys.push(CellKey::full(r));
    }
    keys.sort();
    if let Some(w) = keys.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateRecord(format!("{}", w[0])));
    }
    Ok(())
}

/// A record field that cells can be grouped or joined on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dim {
    Model,
    Encoder,
    Recipe,
    Dataset,
    Scale,
    Metric,
}

impl Dim {
    pub const ALL: [Dim; 6] = [
        Dim::Model,
        Dim::Encoder,
        Dim::Recipe,
        Dim::Dataset,
        Dim::Scale,
        Dim::Metric,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dim::Model => "model",
            Dim::Encoder => "encoder",
            Dim::Recipe => "recipe",
            Dim::Dataset => "dataset",
            Dim::Scale => "scale",
            Dim::Metric => "metric",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Dim::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown dimension {s:?}")))
    }

    /// Every dimension except `excluded`.
    pub fn all_except(excluded: &[Dim]) -> Vec<Dim> {
        Dim::ALL
            .into_iter()
            .filter(|d| !excluded.contains(d))
            .collect()
    }
}

/// Totally ordered scale value.
#[derive(Clone, Copy, Debug)]
pub struct ScaleKey(pub f64);

impl PartialEq for ScaleKey {
    fn eq(&self, other: &Self) -> bool {
        self.0.total_cmp(&other.0) == Ordering::Equal
    }
}

impl Eq for ScaleKey {}

impl PartialOrd for ScaleKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ScaleKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// A projection of a record onto some dimensions; `None` marks a
/// dimension that is not part of the key.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct CellKey {
    pub model: Option<String>,
    pub encoder: Option<String>,
    pub recipe: Option<String>,
    pub dataset: Option<String>,
    pub scale: Option<ScaleKey>,
    pub metric: Option<MetricId>,
}

impl CellKey {
    pub fn project(r: &ScoreRecord, dims: &[Dim]) -> Self {
        let has = |d: Dim| dims.contains(&d);
        CellKey {
            model: has(Dim::Model).then(|| r.model.clone()),
            encoder: has(Dim::Encoder).then(|| r.encoder.clone()),
            recipe: has(Dim::Recipe).then(|| r.recipe.clone()),
            dataset: has(Dim::Dataset).then(|| r.dataset.clone()),
            scale: has(Dim::Scale).then_some(ScaleKey(r.scale)),
            metric: has(Dim::Metric).then_some(r.metric),
        }
    }

    pub fn full(r: &ScoreRecord) -> Self {
        Self::project(r, &Dim::ALL)
    }

    pub fn scale(&self) -> Option<f64> {
        self.scale.map(|s| s.0)
    }
}

impl fmt::Display for CellKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut part =
            |f: &mut fmt::Formatter<'_>, name: &str, v: &dyn fmt::Display| -> fmt::Result {
                if !first {
                    f.write_str(", ")?;
                }
                first = false;
                write!(f, "{name}={v}")
            };
        if let Some(v) = &self.model {
            part(f, "model", v)?;
        }
        if let Some(v) = &self.encoder {
            part(f, "encoder", v)?;
        }
        if let Some(v) = &self.recipe {
            part(f, "recipe", v)?;
        }
        if let Some(v) = &self.dataset {
            part(f, "dataset", v)?;
        }
        if let Some(v) = &self.scale {
            part(f, "scale", &v.0)?;
        }
        if let Some(v) = &self.metric {
            part(f, "metric", v)?;
        }
        if first {
            f.write_str("(all)")?;
        }
        Ok(())
    }
}

/// Metric polarities, defaulting to [`MetricId::polarity`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolarityTable {
    overrides: Vec<(MetricId, Polarity)>,
}

impl PolarityTable {
    pub fn with_override(mut self, metric: MetricId, polarity: Polarity) -> Self {
        self.overrides.retain(|(m, _)| *m != metric);
        self.overrides.push((metric, polarity));
        self
    }

    pub fn get(&self, metric: MetricId) -> Polarity {
        self.overrides
            .iter()
            .find(|(m, _)| *m == metric)
            .map(|(_, p)| *p)
            .unwrap_or_else(|| metric.polarity())
    }
}

/// Orders `a` against `b` from worse to better.
pub(crate) fn quality_cmp(a: f64, b: f64, polarity: Polarity) -> Ordering {
    match polarity {
        Polarity::HigherBetter => a.total_cmp(&b),
        Polarity::LowerBetter => b.total_cmp(&a),
    }
}
