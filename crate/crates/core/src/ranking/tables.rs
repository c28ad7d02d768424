use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::metrics::MetricId;

use super::{quality_cmp, CellKey, Dim, PolarityTable, ScaleKey, ScoreRecord};

/// Label written into the averaged-away dimension by [`average_over`].
pub const MEAN_LABEL: &str = "mean";

/// Unweighted mean over one text dimension (recipe, dataset, encoder or
/// model). The averaged field is set to `"mean"`.
pub fn average_over(records: &[ScoreRecord], dim: Dim) -> Result<Vec<ScoreRecord>> {
    if matches!(dim, Dim::Scale | Dim::Metric) {
        return Err(Error::InvalidParameter(format!(
            "cannot average over {}",
            dim.name()
        )));
    }
    let keep = Dim::all_except(&[dim]);
    let mut groups: BTreeMap<CellKey, (ScoreRecord, f64, usize)> = BTreeMap::new();
    for r in records {
        r.validate()?;
        let e = groups.entry(CellKey::project(r, &keep)).or_insert_with(|| {
            let mut t = r.clone();
            match dim {
                Dim::Model => t.model = MEAN_LABEL.into(),
                Dim::Encoder => t.encoder = MEAN_LABEL.into(),
                Dim::Recipe => t.recipe = MEAN_LABEL.into(),
                Dim::Dataset => t.dataset = MEAN_LABEL.into(),
                Dim::Scale | Dim::Metric => unreachable!(),
            }
            (t, 0.0, 0)
        });
        e.1 += r.value;
        e.2 += 1;
    }
    Ok(groups
        .into_values()
        .map(|(mut t, sum, n)| {
            t.value = sum / n as f64;
            t
        })
        .collect())
}

/// The best contender in one cell.
#[derive(Clone, Debug, PartialEq)]
pub struct BestCell {
    /// Every dimension except the contender one.
    pub key: CellKey,
    /// Winning contenders; more than one when values tie exactly.
    pub winners: Vec<String>,
    pub value: f64,
    pub tied: bool,
}

fn contender_of(r: &ScoreRecord, dim: Dim) -> Result<&str> {
    match dim {
        Dim::Model => Ok(&r.model),
        Dim::Encoder => Ok(&r.encoder),
        Dim::Recipe => Ok(&r.recipe),
        Dim::Dataset => Ok(&r.dataset),
        Dim::Scale | Dim::Metric => Err(Error::InvalidParameter(format!(
            "{} cannot be the contender dimension",
            dim.name()
        ))),
    }
}

/// Per cell, the polarity-respecting best contender and its value.
///
/// Cells span every dimension except `contender` (normally
/// [`Dim::Model`]). `encoder` restricts the input first. Every contender
/// must appear exactly once in every cell.
pub fn best_model_table(
    records: &[ScoreRecord],
    encoder: Option<&str>,
    contender: Dim,
    polarity: &PolarityTable,
) -> Result<Vec<BestCell>> {
    let kept: Vec<&ScoreRecord> = records
        .iter()
        .filter(|r| encoder.is_none_or(|e| r.encoder == e))
        .collect();
    if kept.is_empty() {
        return Err(Error::InvalidParameter(match encoder {
            Some(e) => format!("no records for encoder {e}"),
            None => "no records".into(),
        }));
    }
    let mut contenders: Vec<&str> = Vec::new();
    for r in &kept {
        r.validate()?;
        contenders.push(contender_of(r, contender)?);
    }
    contenders.sort_unstable();
    contenders.dedup();

    let cell_dims = Dim::all_except(&[contender]);
    let mut cells: BTreeMap<CellKey, Vec<&ScoreRecord>> = BTreeMap::new();
    for r in kept {
        cells
            .entry(CellKey::project(r, &cell_dims))
            .or_default()
            .push(r);
    }

    let mut holes = Vec::new();
    let mut out = Vec::with_capacity(cells.len());
    for (key, members) in cells {
        let mut names: Vec<&str> = members
            .iter()
            .map(|r| contender_of(r, contender))
            .collect::<Result<_>>()?;
        names.sort_unstable();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateRecord(format!(
                "{} {} twice in cell {key}",
                contender.name(),
                w[0]
            )));
        }
        for c in &contenders {
            if names.binary_search(c).is_err() {
                holes.push(format!("cell {key} is missing {} {c}", contender.name()));
            }
        }
        let pol = polarity.get(members[0].metric);
        let best = members
            .iter()
            .map(|r| r.value)
            .max_by(|a, b| quality_cmp(*a, *b, pol))
            .expect("cells are nonempty");
        let mut winners: Vec<String> = members
            .iter()
            .filter(|r| quality_cmp(r.value, best, pol) == Ordering::Equal)
            .map(|r| contender_of(r, contender).map(String::from))
            .collect::<Result<_>>()?;
        winners.sort();
        out.push(BestCell {
            key,
            tied: winners.len() > 1,
            winners,
            value: best,
        });
    }
    if !holes.is_empty() {
        return Err(Error::IncompleteDesign(holes));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GainRow {
    pub scale: f64,
    pub best: String,
    pub best_value: f64,
    pub second: String,
    pub second_value: f64,
    /// Best minus second-best PSNR in dB.
    pub gain: f64,
    pub tied: bool,
}

fn difference(b: f64, a: f64) -> f64 {
    if a == b {
        0.0
    } else {
        b - a
    }
}

/// Per scale, the margin in PSNR between the best and second-best model
/// for one encoder and dataset. Records must hold one PSNR per model and
/// scale (average recipes upstream).
pub fn psnr_gain(records: &[ScoreRecord], encoder: &str, dataset: &str) -> Result<Vec<GainRow>> {
    let mut by_scale: BTreeMap<ScaleKey, Vec<&ScoreRecord>> = BTreeMap::new();
    for r in records
        .iter()
        .filter(|r| r.metric == MetricId::Psnr && r.encoder == encoder && r.dataset == dataset)
    {
        r.validate()?;
        by_scale.entry(ScaleKey(r.scale)).or_default().push(r);
    }
    if by_scale.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "no PSNR records for encoder {encoder} on {dataset}"
        )));
    }
    by_scale
        .into_iter()
        .map(|(scale, mut rs)| {
            rs.sort_by(|a, b| {
                b.value
                    .total_cmp(&a.value)
                    .then_with(|| a.model.cmp(&b.model))
            });
            if let Some(w) = rs.windows(2).find(|w| w[0].model == w[1].model) {
                return Err(Error::DuplicateRecord(format!(
                    "model {} has several PSNR records at scale {}; average recipes first",
                    w[0].model, scale.0
                )));
            }
            if rs.len() < 2 {
                return Err(Error::InvalidParameter(format!(
                    "scale {} has {} model(s); a gain needs at least 2",
                    scale.0,
                    rs.len()
                )));
            }
            let gain = difference(rs[0].value, rs[1].value);
            Ok(GainRow {
                scale: scale.0,
                best: rs[0].model.clone(),
                best_value: rs[0].value,
                second: rs[1].model.clone(),
                second_value: rs[1].value,
                gain,
                tied: gain == 0.0,
            })
        })
        .collect()
}

/// One matched pair of records and their difference `b - a`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaRow {
    pub key: CellKey,
    pub a: f64,
    pub b: f64,
    pub delta: f64,
}

fn index(records: &[ScoreRecord], join_dims: &[Dim], side: &str) -> Result<BTreeMap<CellKey, f64>> {
    let mut map = BTreeMap::new();
    for r in records {
        r.validate()?;
        let key = CellKey::project(r, join_dims);
        if map.insert(key.clone(), r.value).is_some() {
            return Err(Error::DuplicateRecord(format!(
                "set {side} has several records for {key}; join on more dimensions"
            )));
        }
    }
    Ok(map)
}

/// Joins two record sets on `join_dims` and reports `value_B - value_A`
/// per key. Both sets must have the same keys. Equal values, including two
/// infinite PSNRs, give a delta of 0.
pub fn delta_analysis(
    a: &[ScoreRecord],
    b: &[ScoreRecord],
    join_dims: &[Dim],
) -> Result<Vec<DeltaRow>> {
    let ia = index(a, join_dims, "A")?;
    let ib = index(b, join_dims, "B")?;
    let mut unmatched: Vec<String> = ia
        .keys()
        .filter(|k| !ib.contains_key(k))
        .map(|k| format!("only in A: {k}"))
        .collect();
    unmatched.extend(
        ib.keys()
            .filter(|k| !ia.contains_key(k))
            .map(|k| format!("only in B: {k}")),
    );
    if !unmatched.is_empty() {
        return Err(Error::KeyMismatch(unmatched));
    }
    Ok(ia
        .into_iter()
        .map(|(key, va)| {
            let vb = ib[&key];
            DeltaRow {
                key,
                a: va,
                b: vb,
                delta: difference(vb, va),
            }
        })
        .collect())
}

/// Means of delta rows grouped on `keep` (a subset of the join
/// dimensions); the other dimensions are averaged out.
pub fn mean_deltas(rows: &[DeltaRow], keep: &[Dim]) -> Vec<DeltaRow> {
    let mut groups: BTreeMap<CellKey, (f64, f64, f64, usize)> = BTreeMap::new();
    for r in rows {
        let k = &r.key;
        let key = CellKey {
            model: k.model.clone().filter(|_| keep.contains(&Dim::Model)),
            encoder: k.encoder.clone().filter(|_| keep.contains(&Dim::Encoder)),
            recipe: k.recipe.clone().filter(|_| keep.contains(&Dim::Recipe)),
            dataset: k.dataset.clone().filter(|_| keep.contains(&Dim::Dataset)),
            scale: k.scale.filter(|_| keep.contains(&Dim::Scale)),
            metric: k.metric.filter(|_| keep.contains(&Dim::Metric)),
        };
        let e = groups.entry(key).or_insert((0.0, 0.0, 0.0, 0));
        e.0 += r.a;
        e.1 += r.b;
        e.2 += r.delta;
        e.3 += 1;
    }
    groups
        .into_iter()
        .map(|(key, (a, b, d, n))| {
            let n = n as f64;
            DeltaRow {
                key,
                a: a / n,
                b: b / n,
                delta: d / n,
            }
        })
        .collect()
}
