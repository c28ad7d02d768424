//! Writes seeded LR/HR training pairs for a directory of HR images.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use sreval_core::resample::{degrade_image, PatchSpec, ScaleSampler};

use crate::io::{list_images, load_image, save_image};
use crate::manifest::{degrade_table, DegradeRow};
use crate::report::{Cell, Format, Table};

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("no PNG/PPM/PGM images in {0}")]
    Empty(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Other(#[from] anyhow::Error),
}

/// A per-file failure; the rest of the corpus is still generated.
#[derive(Clone, Debug, PartialEq)]
pub struct FileError {
    pub source: PathBuf,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusReport {
    pub manifest: PathBuf,
    pub rows: Vec<DegradeRow>,
    pub errors: Vec<FileError>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn degrade_one(
    index: usize,
    path: &Path,
    spec: &PatchSpec,
    sampler: &ScaleSampler,
    out_dir: &Path,
) -> Result<Vec<DegradeRow>, String> {
    let hr = load_image(path).map_err(|e| e.to_string())?;
    let pairs = degrade_image(&hr, index as u64, spec, sampler)
        .map_err(|e| format!("{}: {e}", path.display()))?;
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    pairs
        .into_iter()
        .enumerate()
        .map(|(rep, pair)| {
            let name = format!("{stem}_{rep:03}.png");
            let lr_path = format!("lr/{name}");
            let hr_path = format!("hr/{name}");
            save_image(&pair.lr, out_dir.join(&lr_path)).map_err(|e| e.to_string())?;
            save_image(&pair.hr_patch, out_dir.join(&hr_path)).map_err(|e| e.to_string())?;
            Ok(DegradeRow {
                source: path
                    .file_name()
                    .map(|s| s.to_string_lossy().into_owned())
                    .unwrap_or_default(),
                rep,
                scale: pair.scale,
                crop_x: pair.crop_x,
                crop_y: pair.crop_y,
                flip_h: pair.flips.flip_h,
                flip_v: pair.flips.flip_v,
                transpose: pair.flips.transpose,
                lr_path,
                hr_path,
            })
        })
        .collect()
}

/// Generates `spec.repetitions` pairs per image of `hr_dir` into
/// `out_dir/lr` and `out_dir/hr` and writes `out_dir/manifest.{csv,json}`.
///
/// Images are processed in file-name order and image `i` draws from
/// sampler stream `i`, so output depends only on the directory contents,
/// the seed and the spec. Failing files are reported and skipped.
pub fn degrade_corpus(
    hr_dir: &Path,
    spec: &PatchSpec,
    sampler: &ScaleSampler,
    out_dir: &Path,
    format: Format,
) -> Result<CorpusReport, CorpusError> {
    spec.validate().map_err(anyhow::Error::from)?;
    let files = list_images(hr_dir).map_err(io_err(hr_dir))?;
    if files.is_empty() {
        return Err(CorpusError::Empty(hr_dir.to_path_buf()));
    }
    for sub in ["lr", "hr"] {
        let dir = out_dir.join(sub);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
    }
    let results: Vec<Result<Vec<DegradeRow>, String>> = files
        .par_iter()
        .enumerate()
        .map(|(i, path)| degrade_one(i, path, spec, sampler, out_dir))
        .collect();

    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (path, result) in files.iter().zip(results) {
        match result {
            Ok(r) => rows.extend(r),
            Err(message) => errors.push(FileError {
                source: path.clone(),
                message,
            }),
        }
    }
    let manifest = out_dir.join(match format {
        Format::Csv => "manifest.csv",
        Format::Json => "manifest.json",
    });
    fs::write(&manifest, degrade_table(&rows).to_string(format)).map_err(io_err(&manifest))?;
    Ok(CorpusReport {
        manifest,
        rows,
        errors,
    })
}

pub fn file_error_table(errors: &[FileError]) -> Table {
    let mut t = Table::new(["source", "error"]);
    for e in errors {
        t.push(vec![
            Cell::text(e.source.display().to_string()),
            Cell::text(&e.message),
        ]);
    }
    t
}
