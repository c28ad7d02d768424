use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};

use super::{quality_cmp, CellKey, Dim, PolarityTable, ScoreRecord};

/// Value-ranks of every model within one cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellRanks {
    pub ranks: BTreeMap<String, f64>,
    /// Groups of models whose values are exactly equal.
    pub ties: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValueRankTable {
    pub models: Vec<String>,
    pub group_dims: Vec<Dim>,
    pub cells: BTreeMap<CellKey, CellRanks>,
}

/// Ranks models within each cell spanned by `group_dims`.
///
/// Every cell must hold exactly one record per model; the best value gets
/// rank `|M|` and the worst rank 1. Equal values share the mean of the
/// positions they occupy, which keeps each cell's rank sum at
/// `|M|(|M|+1)/2`.
pub fn value_ranks(
    records: &[ScoreRecord],
    group_dims: &[Dim],
    polarity: &PolarityTable,
) -> Result<ValueRankTable> {
    if group_dims.contains(&Dim::Model) {
        return Err(Error::InvalidParameter(
            "cells cannot be grouped by model".into(),
        ));
    }
    let mut models: Vec<String> = records.iter().map(|r| r.model.clone()).collect();
    models.sort();
    models.dedup();

    let mut cells: BTreeMap<CellKey, Vec<&ScoreRecord>> = BTreeMap::new();
    for r in records {
        r.validate()?;
        cells
            .entry(CellKey::project(r, group_dims))
            .or_default()
            .push(r);
    }

    let mut holes = Vec::new();
    for (key, members) in &cells {
        let mut seen: Vec<&str> = members.iter().map(|r| r.model.as_str()).collect();
        seen.sort_unstable();
        if let Some(w) = seen.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateRecord(format!(
                "model {} appears more than once in cell {key}; add grouping dimensions or filter the records",
                w[0]
            )));
        }
        for m in &models {
            if seen.binary_search(&m.as_str()).is_err() {
                holes.push(format!("cell {key} is missing model {m}"));
            }
        }
        let p0 = polarity.get(members[0].metric);
        if members.iter().any(|r| polarity.get(r.metric) != p0) {
            return Err(Error::InvalidParameter(format!(
                "cell {key} mixes metrics of different polarity"
            )));
        }
    }
    if !holes.is_empty() {
        return Err(Error::IncompleteDesign(holes));
    }

    let cells = cells
        .into_iter()
        .map(|(key, mut members)| {
            let pol = polarity.get(members[0].metric);
            members.sort_by(|a, b| {
                quality_cmp(a.value, b.value, pol).then_with(|| a.model.cmp(&b.model))
            });
            let mut ranks = BTreeMap::new();
            let mut ties = Vec::new();
            let mut start = 0;
            while start < members.len() {
                let mut end = start + 1;
                while end < members.len()
                    && quality_cmp(members[end].value, members[start].value, pol) == Ordering::Equal
                {
                    end += 1;
                }
                // Positions start+1 ..= end share their mean.
                let rank = (start + 1 + end) as f64 / 2.0;
                for r in &members[start..end] {
                    ranks.insert(r.model.clone(), rank);
                }
                if end - start > 1 {
                    ties.push(
                        members[start..end]
                            .iter()
                            .map(|r| r.model.clone())
                            .collect(),
                    );
                }
                start = end;
            }
            (key, CellRanks { ranks, ties })
        })
        .collect();

    Ok(ValueRankTable {
        models,
        group_dims: group_dims.to_vec(),
        cells,
    })
}

/// Per-model sums of value-ranks.
#[derive(Clone, Debug, PartialEq)]
pub struct BordaTable {
    pub sums: BTreeMap<String, f64>,
    pub cells: usize,
}

pub fn borda_aggregate(table: &ValueRankTable) -> BordaTable {
    let mut sums: BTreeMap<String, f64> = table.models.iter().map(|m| (m.clone(), 0.0)).collect();
    for cell in table.cells.values() {
        for (model, rank) in &cell.ranks {
            *sums.entry(model.clone()).or_insert(0.0) += rank;
        }
    }
    BordaTable {
        sums,
        cells: table.cells.len(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankEntry {
    pub model: String,
    pub borda: f64,
    pub rank: usize,
    pub tied: bool,
}

/// Final ranking, ordered by rank then model name.
#[derive(Clone, Debug, PartialEq)]
pub struct RankTable {
    pub entries: Vec<RankEntry>,
}

impl RankTable {
    pub fn rank_of(&self, model: &str) -> Option<usize> {
        self.entries
            .iter()
            .find(|e| e.model == model)
            .map(|e| e.rank)
    }
}

/// Rank 1 for the largest Borda sum; equal sums share the smallest rank
/// they cover and later ranks skip (1, 1, 3).
pub fn final_rank(borda: &BordaTable) -> RankTable {
    let mut entries: Vec<RankEntry> = borda
        .sums
        .iter()
        .map(|(model, &b)| RankEntry {
            model: model.clone(),
            borda: b,
            rank: 1 + borda.sums.values().filter(|&&o| o > b).count(),
            tied: borda.sums.values().filter(|&&o| o == b).count() > 1,
        })
        .collect();
    entries.sort_by(|a, b| a.rank.cmp(&b.rank).then_with(|| a.model.cmp(&b.model)));
    RankTable { entries }
}
