//! Command-line definitions and subcommand drivers.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use sreval_core::color::extract_luma;
use sreval_core::loss::{
    derivative_map, loss_components, GradientSource, HybridLossConfig, Reduction,
};
use sreval_core::metrics::Polarity;
use sreval_core::ranking::{
    average_over, best_model_table, borda_aggregate, delta_analysis, final_rank, mean_deltas,
    psnr_gain, value_ranks, CellKey, DeltaRow, Dim, PolarityTable, ScoreRecord,
};
use sreval_core::resample::{PatchSpec, ScaleSampler};
use sreval_core::texture::{
    edge_corner_map, glcm, glcm_stats, EdgeCornerConfig, GlcmAngle, GlcmConfig,
};
use sreval_core::{EvalDomain, MetricId};

use crate::corpus::{degrade_corpus, file_error_table, CorpusError, FileError};
use crate::evaluate::{error_table, evaluate_pairs, EvalConfig, EvalOutput};
use crate::io::{list_images, load_image, save_image};
use crate::manifest::{discover_pairs, read_pair_manifest, sort_pairs, Pair, PairLabels};
use crate::records::{read_records, records_table, reduce_images, ImageRecord};
use crate::report::{Cell, Format, Table};
use crate::with_workers;

/// Bad input that the user must fix; exits with code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct InputError(pub String);

#[derive(Debug, Parser)]
#[command(
    name = "sreval",
    version,
    about = "Full-reference super-resolution evaluation toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output file (output directory for `degrade`); stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t)]
    pub format: Format,
    /// Worker threads; all cores when omitted.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate seeded LR/HR patch pairs and a manifest from HR images.
    Degrade(DegradeArgs),
    /// Score distorted images against references.
    Evaluate(EvaluateArgs),
    /// Borda-count ranking of models over score records.
    Rank(RankArgs),
    /// Best contender per cell.
    BestTable(BestTableArgs),
    /// PSNR margin between the best and second-best model per scale.
    Gain(GainArgs),
    /// Differences between two record sets (B minus A).
    Delta(DeltaArgs),
    /// GLCM statistics and edge/corner counts per image.
    Texture(TextureArgs),
    /// L1, gradient and hybrid losses between image pairs.
    Loss(LossArgs),
    /// Y-channel minus RGB scores for the same pairs.
    Ycompare(YcompareArgs),
}

#[derive(Debug, Args)]
pub struct DegradeArgs {
    /// Directory of HR images.
    #[arg(long)]
    pub hr: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 48)]
    pub patch_size: usize,
    #[arg(long, default_value_t = 40)]
    pub repetitions: usize,
    #[arg(long, default_value_t = 1.0)]
    pub scale_min: f64,
    #[arg(long, default_value_t = 4.0)]
    pub scale_max: f64,
    #[arg(long)]
    pub no_flip_h: bool,
    #[arg(long)]
    pub no_flip_v: bool,
    #[arg(long)]
    pub no_transpose: bool,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// CSV with columns reference,distorted,model,dataset,scale,recipe,encoder.
    #[arg(long, conflicts_with_all = ["reference", "distorted"])]
    pub manifest: Option<PathBuf>,
    /// Reference directory; files pair with `--distorted` by stem.
    #[arg(long, requires = "distorted")]
    pub reference: Option<PathBuf>,
    #[arg(long, requires = "reference")]
    pub distorted: Option<PathBuf>,
    /// Model label (defaults to the distorted directory name).
    #[arg(long)]
    pub model: Option<String>,
    /// Dataset label (defaults to the reference directory name).
    #[arg(long)]
    pub dataset: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value = "default")]
    pub recipe: String,
    #[arg(long, default_value = "none")]
    pub encoder: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum DomainArg {
    Rgb,
    Y,
}

impl From<DomainArg> for EvalDomain {
    fn from(d: DomainArg) -> Self {
        match d {
            DomainArg::Rgb => EvalDomain::Rgb,
            DomainArg::Y => EvalDomain::Y,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Reduce {
    /// One row per image and metric, with an `image` column.
    None,
    /// Mean over images; the plain record schema.
    Mean,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub pairs: PairArgs,
    /// Comma-separated metric names.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "psnr,ssim,gmsd,fsim,vif,srsim"
    )]
    pub metrics: Vec<String>,
    #[arg(long, value_enum, default_value_t = DomainArg::Rgb)]
    pub domain: DomainArg,
    /// Pixels cropped from every side before scoring.
    #[arg(long, default_value_t = 0)]
    pub border: usize,
    #[arg(long, value_enum, default_value_t = Reduce::None)]
    pub reduce: Reduce,
    /// Where to write failed pairs (stderr when omitted).
    #[arg(long)]
    pub errors: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecordFilters {
    /// Keep only records with DIM=VALUE; repeatable.
    #[arg(long = "filter", value_parser = parse_filter)]
    pub filters: Vec<(Dim, String)>,
    /// Override a metric's polarity, e.g. `lpips=lower`; repeatable.
    #[arg(long = "polarity", value_parser = parse_polarity)]
    pub polarity: Vec<(MetricId, Polarity)>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Score record files (CSV or JSON).
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    /// Dimensions that define a ranking cell.
    #[arg(long, value_delimiter = ',', value_parser = parse_dim, default_value = "encoder,recipe,dataset,scale,metric")]
    pub group_by: Vec<Dim>,
    /// Rank separately within each value of this dimension.
    #[arg(long, value_parser = parse_dim)]
    pub partition: Option<Dim>,
    /// Also write per-cell value-ranks here.
    #[arg(long)]
    pub value_ranks: Option<PathBuf>,
    #[command(flatten)]
    pub select: RecordFilters,
}

#[derive(Debug, Args)]
pub struct BestTableArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long)]
    pub encoder: Option<String>,
    /// Dimension whose values compete within each cell.
    #[arg(long, value_parser = parse_dim, default_value = "model")]
    pub contender: Dim,
    /// Average over recipes (unweighted) before picking winners.
    #[arg(long)]
    pub average_recipes: bool,
    #[command(flatten)]
    pub select: RecordFilters,
}

#[derive(Debug, Args)]
pub struct GainArgs {
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
    #[arg(long)]
    pub encoder: String,
    #[arg(long)]
    pub dataset: String,
    #[arg(long)]
    pub average_recipes: bool,
    #[command(flatten)]
    pub select: RecordFilters,
}

#[derive(Debug, Args)]
pub struct DeltaArgs {
    /// Record set A.
    pub a: PathBuf,
    /// Record set B (defaults to A, for comparing filtered subsets).
    pub b: Option<PathBuf>,
    /// DIM=VALUE selection applied to A; repeatable.
    #[arg(long, value_parser = parse_filter)]
    pub a_filter: Vec<(Dim, String)>,
    /// DIM=VALUE selection applied to B; repeatable.
    #[arg(long, value_parser = parse_filter)]
    pub b_filter: Vec<(Dim, String)>,
    /// Dimensions that match A rows to B rows.
    #[arg(long, value_delimiter = ',', value_parser = parse_dim, default_value = "model,encoder,dataset,scale,metric")]
    pub join: Vec<Dim>,
    /// Join dimensions to average out after differencing.
    #[arg(long, value_delimiter = ',', value_parser = parse_dim)]
    pub mean_over: Vec<Dim>,
}

#[derive(Debug, Args)]
pub struct TextureArgs {
    /// Image files or directories.
    #[arg(required = true)]
    pub images: Vec<PathBuf>,
    #[arg(long, default_value_t = 256)]
    pub levels: usize,
    #[arg(long, default_value_t = 1)]
    pub distance: usize,
    /// 0, 45, 90 or 135.
    #[arg(long, default_value_t = 0)]
    pub angle: u32,
    #[arg(long)]
    pub symmetric: bool,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.04)]
    pub edge_low: f64,
    #[arg(long, default_value_t = 0.1)]
    pub edge_high: f64,
    #[arg(long, default_value_t = 0.04)]
    pub corner_k: f64,
    #[arg(long, default_value_t = 0.01)]
    pub corner_thresh: f64,
    /// Write derivative and edge maps into this directory.
    #[arg(long)]
    pub maps: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ReductionArg {
    Mean,
    Sum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GradientArg {
    PerChannel,
    Luma,
}

#[derive(Debug, Args)]
pub struct LossArgs {
    /// Ground-truth image or directory.
    #[arg(long)]
    pub truth: PathBuf,
    /// Prediction image or directory (matched by stem).
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub lambda_l1: f64,
    #[arg(long, default_value_t = 0.05)]
    pub lambda_grad: f64,
    /// Report every gradient weight of the standard sweep.
    #[arg(long)]
    pub sweep: bool,
    #[arg(long, value_enum, default_value_t = ReductionArg::Mean)]
    pub reduction: ReductionArg,
    #[arg(long, value_enum, default_value_t = GradientArg::PerChannel)]
    pub gradient: GradientArg,
}

#[derive(Debug, Args)]
pub struct YcompareArgs {
    #[command(flatten)]
    pub pairs: PairArgs,
    /// Metrics defined on RGB planes.
    #[arg(long, value_delimiter = ',', default_value = "psnr,ssim")]
    pub metrics: Vec<String>,
    #[arg(long, default_value_t = 0)]
    pub border: usize,
    #[arg(long)]
    pub errors: Option<PathBuf>,
}

fn parse_dim(s: &str) -> Result<Dim, String> {
    Dim::parse(s).map_err(|e| e.to_string())
}

fn parse_filter(s: &str) -> Result<(Dim, String), String> {
    let (d, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected DIM=VALUE, got {s:?}"))?;
    Ok((parse_dim(d)?, v.to_string()))
}

fn parse_polarity(s: &str) -> Result<(MetricId, Polarity), String> {
    let (m, p) = s
        .split_once('=')
        .ok_or_else(|| format!("expected METRIC=higher|lower, got {s:?}"))?;
    let metric: MetricId = m.parse().map_err(|e: sreval_core::Error| e.to_string())?;
    let polarity = match p.to_ascii_lowercase().as_str() {
        "higher" | "higher_better" => Polarity::HigherBetter,
        "lower" | "lower_better" => Polarity::LowerBetter,
        _ => return Err(format!("polarity {p:?} must be higher or lower")),
    };
    Ok((metric, polarity))
}

fn dim_value(r: &ScoreRecord, d: Dim) -> String {
    match d {
        Dim::Model => r.model.clone(),
        Dim::Encoder => r.encoder.clone(),
        Dim::Recipe => r.recipe.clone(),
        Dim::Dataset => r.dataset.clone(),
        Dim::Scale => crate::report::fixed(r.scale),
        Dim::Metric => r.metric.name().to_string(),
    }
}

fn matches_filter(r: &ScoreRecord, (d, v): &(Dim, String)) -> bool {
    match d {
        Dim::Scale => crate::report::parse_value(v).is_some_and(|s| s == r.scale),
        Dim::Metric => v.parse::<MetricId>().is_ok_and(|m| m == r.metric),
        _ => dim_value(r, *d) == *v,
    }
}

fn apply_filters(records: Vec<ScoreRecord>, filters: &[(Dim, String)]) -> Result<Vec<ScoreRecord>> {
    let kept: Vec<ScoreRecord> = records
        .into_iter()
        .filter(|r| filters.iter().all(|f| matches_filter(r, f)))
        .collect();
    if kept.is_empty() {
        return Err(InputError("no records left after filtering".into()).into());
    }
    Ok(kept)
}

fn polarity_table(overrides: &[(MetricId, Polarity)]) -> PolarityTable {
    overrides
        .iter()
        .fold(PolarityTable::default(), |t, (m, p)| {
            t.with_override(*m, *p)
        })
}

fn load_selected(
    files: &[PathBuf],
    select: &RecordFilters,
) -> Result<(Vec<ScoreRecord>, PolarityTable)> {
    let records = apply_filters(read_records(files)?, &select.filters)?;
    Ok((records, polarity_table(&select.polarity)))
}

fn parse_metrics(names: &[String]) -> Result<Vec<MetricId>> {
    let mut out = Vec::new();
    for n in names.iter().filter(|n| !n.trim().is_empty()) {
        let m: MetricId = n
            .parse()
            .map_err(|e: sreval_core::Error| InputError(e.to_string()))?;
        if !m.is_computable() {
            return Err(InputError(format!(
                "{m} scores cannot be computed here; ingest them as records"
            ))
            .into());
        }
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(InputError("no metrics requested".into()).into());
    }
    Ok(out)
}

fn dir_name(p: &Path) -> String {
    p.canonicalize()
        .ok()
        .and_then(|c| c.file_name().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| p.display().to_string())
}

fn collect_pairs(args: &PairArgs) -> Result<Vec<Pair>> {
    let mut pairs = if let Some(m) = &args.manifest {
        read_pair_manifest(m)?
    } else if let (Some(r), Some(d)) = (&args.reference, &args.distorted) {
        if !(args.scale.is_finite() && args.scale > 0.0) {
            return Err(InputError(format!("scale {} must be positive", args.scale)).into());
        }
        let labels = PairLabels {
            model: args.model.clone().unwrap_or_else(|| dir_name(d)),
            dataset: args.dataset.clone().unwrap_or_else(|| dir_name(r)),
            scale: args.scale,
            recipe: args.recipe.clone(),
            encoder: args.encoder.clone(),
        };
        discover_pairs(r, d, &labels).map_err(|e| InputError(format!("{e:#}")))?
    } else {
        return Err(
            InputError("give --manifest or both --reference and --distorted".into()).into(),
        );
    };
    sort_pairs(&mut pairs);
    Ok(pairs)
}

fn emit(table: &Table, out: Option<&Path>, format: Format) -> Result<()> {
    match out {
        Some(path) => {
            let mut f =
                fs::File::create(path).with_context(|| format!("creating {}", path.display()))?;
            table.write(&mut f, format)?;
            f.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            table.write(&mut lock, format)?;
        }
    }
    Ok(())
}

/// Writes error rows to `path`, or to stderr when no path is given.
fn emit_errors(table: &Table, path: Option<&Path>) -> Result<()> {
    if table.rows.is_empty() {
        return Ok(());
    }
    match path {
        Some(p) => emit(table, Some(p), Format::Csv),
        None => {
            eprint!("{}", table.to_string(Format::Csv));
            Ok(())
        }
    }
}

fn key_cells(key: &CellKey) -> Vec<Cell> {
    let text = |v: &Option<String>| Cell::text(v.clone().unwrap_or_else(|| "*".into()));
    vec![
        text(&key.model),
        text(&key.encoder),
        text(&key.recipe),
        text(&key.dataset),
        key.scale().map_or_else(|| Cell::text("*"), Cell::Fixed),
        Cell::text(key.metric.map_or("*", |m| m.name())),
    ]
}

const KEY_HEADER: [&str; 6] = ["model", "encoder", "recipe", "dataset", "scale", "metric"];

/// Runs one parsed command line and returns the process exit code.
pub fn run(cli: Cli) -> Result<u8> {
    let Cli {
        command,
        out,
        format,
        workers,
    } = cli;
    if workers == Some(0) {
        return Err(InputError("--workers must be at least 1".into()).into());
    }
    let out = out.as_deref();
    match command {
        Command::Degrade(a) => cmd_degrade(&a, out, format, workers),
        Command::Evaluate(a) => cmd_evaluate(&a, out, format, workers),
        Command::Rank(a) => cmd_rank(&a, out, format),
        Command::BestTable(a) => cmd_best_table(&a, out, format),
        Command::Gain(a) => cmd_gain(&a, out, format),
        Command::Delta(a) => cmd_delta(&a, out, format),
        Command::Texture(a) => cmd_texture(&a, out, format),
        Command::Loss(a) => cmd_loss(&a, out, format),
        Command::Ycompare(a) => cmd_ycompare(&a, out, format, workers),
    }
}

/// Exit code for an error returned by [`run`].
pub fn exit_code(err: &anyhow::Error) -> u8 {
    let input = err.downcast_ref::<InputError>().is_some()
        || matches!(
            err.downcast_ref::<CorpusError>(),
            Some(CorpusError::Empty(_))
        );
    if input {
        2
    } else {
        1
    }
}

pub fn cmd_degrade(
    a: &DegradeArgs,
    out: Option<&Path>,
    format: Format,
    workers: Option<usize>,
) -> Result<u8> {
    let out_dir = out.ok_or_else(|| InputError("degrade needs --out DIR".into()))?;
    let mut spec =
        PatchSpec::new(a.patch_size, a.repetitions).map_err(|e| InputError(e.to_string()))?;
    spec.flip_h = !a.no_flip_h;
    spec.flip_v = !a.no_flip_v;
    spec.transpose = !a.no_transpose;
    let sampler = ScaleSampler::new(a.scale_min, a.scale_max, a.seed)
        .map_err(|e| InputError(e.to_string()))?;
    let report = with_workers(workers, || {
        degrade_corpus(&a.hr, &spec, &sampler, out_dir, format)
    })??;
    println!("manifest: {}", report.manifest.display());
    println!("rows: {}", report.rows.len());
    if report.errors.is_empty() {
        return Ok(0);
    }
    let errors_path = out_dir.join("errors.csv");
    emit(
        &file_error_table(&report.errors),
        Some(&errors_path),
        Format::Csv,
    )?;
    for FileError { message, .. } in &report.errors {
        eprintln!("error: {message}");
    }
    eprintln!(
        "{} file(s) failed; see {}",
        report.errors.len(),
        errors_path.display()
    );
    Ok(1)
}

fn run_evaluation(pairs: &[Pair], cfg: &EvalConfig, workers: Option<usize>) -> Result<EvalOutput> {
    with_workers(workers, || evaluate_pairs(pairs, cfg))
}

pub fn cmd_evaluate(
    a: &EvaluateArgs,
    out: Option<&Path>,
    format: Format,
    workers: Option<usize>,
) -> Result<u8> {
    let cfg = EvalConfig {
        metrics: parse_metrics(&a.metrics)?,
        domain: a.domain.into(),
        border: a.border,
    };
    let pairs = collect_pairs(&a.pairs)?;
    let result = run_evaluation(&pairs, &cfg, workers)?;
    let rows: Vec<ImageRecord> = match a.reduce {
        Reduce::None => result.rows,
        Reduce::Mean => reduce_images(result.rows)?
            .into_iter()
            .map(ImageRecord::from)
            .collect(),
    };
    emit(&records_table(&rows), out, format)?;
    emit_errors(&error_table(&result.errors), a.errors.as_deref())?;
    Ok(u8::from(!result.errors.is_empty()))
}

pub fn cmd_rank(a: &RankArgs, out: Option<&Path>, format: Format) -> Result<u8> {
    let (records, polarity) = load_selected(&a.files, &a.select)?;
    if let Some(p) = a.partition {
        if a.group_by.contains(&p) || p == Dim::Model {
            return Err(InputError(format!(
                "cannot partition by {} while grouping by it",
                p.name()
            ))
            .into());
        }
    }
    let mut parts: Vec<(String, Vec<ScoreRecord>)> = Vec::new();
    match a.partition {
        None => parts.push((String::new(), records)),
        Some(p) => {
            for r in records {
                let v = dim_value(&r, p);
                match parts.iter_mut().find(|(k, _)| *k == v) {
                    Some((_, rs)) => rs.push(r),
                    None => parts.push((v, vec![r])),
                }
            }
            parts.sort_by(|x, y| x.0.cmp(&y.0));
        }
    }

    let mut header = Vec::new();
    if a.partition.is_some() {
        header.push("partition");
    }
    header.extend(["model", "borda", "rank", "tied"]);
    let mut ranks = Table::new(header.clone());
    let mut cells_header: Vec<&str> = header[..header.len() - 3].to_vec();
    cells_header.pop();
    cells_header.extend(KEY_HEADER);
    cells_header.extend(["ranked_model", "value_rank", "tied"]);
    let mut cells = Table::new(cells_header);

    for (label, rs) in &parts {
        let v = value_ranks(rs, &a.group_by, &polarity)?;
        let table = final_rank(&borda_aggregate(&v));
        for e in &table.entries {
            let mut row = Vec::new();
            if a.partition.is_some() {
                row.push(Cell::text(label));
            }
            row.extend([
                Cell::text(&e.model),
                Cell::Fixed(e.borda),
                Cell::Int(e.rank as i64),
                Cell::Bool(e.tied),
            ]);
            ranks.push(row);
        }
        for (key, cell) in &v.cells {
            for (model, rank) in &cell.ranks {
                let mut row = Vec::new();
                if a.partition.is_some() {
                    row.push(Cell::text(label));
                }
                row.extend(key_cells(key));
                row.extend([
                    Cell::text(model),
                    Cell::Fixed(*rank),
                    Cell::Bool(cell.ties.iter().any(|t| t.contains(model))),
                ]);
                cells.push(row);
            }
        }
    }
    if let Some(path) = &a.value_ranks {
        emit(&cells, Some(path), format)?;
    }
    emit(&ranks, out, format)?;
    Ok(0)
}

pub fn cmd_best_table(a: &BestTableArgs, out: Option<&Path>, format: Format) -> Result<u8> {
    let (mut records, polarity) = load_selected(&a.files, &a.select)?;
    if a.average_recipes {
        if a.contender == Dim::Recipe {
            return Err(InputError("cannot average over the contender dimension".into()).into());
        }
        records = average_over(&records, Dim::Recipe)?;
    }
    let cells = best_model_table(&records, a.encoder.as_deref(), a.contender, &polarity)?;
    let mut header = KEY_HEADER.to_vec();
    header.extend(["best", "value", "tied"]);
    let mut t = Table::new(header);
    for c in cells {
        let mut row = key_cells(&c.key);
        row.extend([
            Cell::text(c.winners.join(";")),
            Cell::Fixed(c.value),
            Cell::Bool(c.tied),
        ]);
        t.push(row);
    }
    emit(&t, out, format)?;
    Ok(0)
}

pub fn cmd_gain(a: &GainArgs, out: Option<&Path>, format: Format) -> Result<u8> {
    let (mut records, _) = load_selected(&a.files, &a.select)?;
    if a.average_recipes {
        records = average_over(&records, Dim::Recipe)?;
    }
    let rows = psnr_gain(&records, &a.encoder, &a.dataset)?;
    let mut t = Table::new([
        "scale",
        "best",
        "best_value",
        "second",
        "second_value",
        "gain",
        "tied",
    ]);
    for r in rows {
        t.push(vec![
            Cell::Fixed(r.scale),
            Cell::text(r.best),
            Cell::Fixed(r.best_value),
            Cell::text(r.second),
            Cell::Fixed(r.second_value),
            Cell::Fixed(r.gain),
            Cell::Bool(r.tied),
        ]);
    }
    emit(&t, out, format)?;
    Ok(0)
}

fn delta_table(rows: &[DeltaRow], a_label: &str, b_label: &str, delta_label: &str) -> Table {
    let mut header = KEY_HEADER.to_vec();
    header.extend([a_label, b_label, delta_label]);
    let mut t = Table::new(header);
    for r in rows {
        let mut row = key_cells(&r.key);
        row.extend([Cell::Fixed(r.a), Cell::Fixed(r.b), Cell::Fixed(r.delta)]);
        t.push(row);
    }
    t
}

pub fn cmd_delta(a: &DeltaArgs, out: Option<&Path>, format: Format) -> Result<u8> {
    let set_a = apply_filters(read_records(std::slice::from_ref(&a.a))?, &a.a_filter)?;
    let set_b = apply_filters(
        read_records(std::slice::from_ref(a.b.as_ref().unwrap_or(&a.a)))?,
        &a.b_filter,
    )?;
    if let Some(d) = a.mean_over.iter().find(|d| !a.join.contains(d)) {
        return Err(InputError(format!("--mean-over {} is not a join dimension", d.name())).into());
    }
    let mut rows = delta_analysis(&set_a, &set_b, &a.join)?;
    if !a.mean_over.is_empty() {
        let keep: Vec<Dim> = a
            .join
            .iter()
            .copied()
            .filter(|d| !a.mean_over.contains(d))
            .collect();
        rows = mean_deltas(&rows, &keep);
    }
    emit(
        &delta_table(&rows, "a", "b", "delta_b_minus_a"),
        out,
        format,
    )?;
    Ok(0)
}

fn expand_inputs(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            out.extend(list_images(p).with_context(|| format!("listing {}", p.display()))?);
        } else {
            out.push(p.clone());
        }
    }
    if out.is_empty() {
        return Err(InputError("no input images".into()).into());
    }
    Ok(out)
}

fn stem_of(p: &Path) -> String {
    p.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

pub fn cmd_texture(a: &TextureArgs, out: Option<&Path>, format: Format) -> Result<u8> {
    let glcm_cfg = GlcmConfig {
        levels: a.levels,
        distance: a.distance,
        angle: GlcmAngle::from_degrees(a.angle).map_err(|e| InputError(e.to_string()))?,
        symmetric: a.symmetric,
        normalize: true,
    };
    glcm_cfg.validate().map_err(|e| InputError(e.to_string()))?;
    let ec_cfg = EdgeCornerConfig {
        sigma: a.sigma,
        edge_low: a.edge_low,
        edge_high: a.edge_high,
        corner_k: a.corner_k,
        corner_thresh: a.corner_thresh,
        ..EdgeCornerConfig::default()
    };
    if let Some(dir) = &a.maps {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut t = Table::new([
        "image",
        "levels",
        "distance",
        "angle",
        "symmetric",
        "normalized",
        "contrast",
        "dissimilarity",
        "energy",
        "correlation",
        "asm",
        "edge_pixels",
        "corners",
    ]);
    let mut failures = 0;
    for path in expand_inputs(&a.images)? {
        let result = (|| -> Result<Vec<Cell>> {
            let luma = extract_luma(&load_image(&path)?);
            let stats = glcm_stats(&glcm(&luma, &glcm_cfg)?)?;
            let ec = edge_corner_map(&luma, &ec_cfg)?;
            if let Some(dir) = &a.maps {
                let stem = stem_of(&path);
                save_image(
                    &derivative_map(&luma)?,
                    dir.join(format!("{stem}_derivative.png")),
                )?;
                save_image(&ec.edge_image(), dir.join(format!("{stem}_edges.png")))?;
            }
            Ok(vec![
                Cell::text(path.display().to_string()),
                Cell::Int(glcm_cfg.levels as i64),
                Cell::Int(glcm_cfg.distance as i64),
                Cell::Int(i64::from(glcm_cfg.angle.degrees())),
                Cell::Bool(glcm_cfg.symmetric),
                Cell::Bool(glcm_cfg.normalize),
                Cell::Fixed(stats.contrast),
                Cell::Fixed(stats.dissimilarity),
                Cell::Fixed(stats.energy),
                Cell::Fixed(stats.correlation),
                Cell::Fixed(stats.asm),
                Cell::Int(ec.edge_pixel_count as i64),
                Cell::Int(ec.corner_count as i64),
            ])
        })();
        match result {
            Ok(row) => t.push(row),
            Err(e) => {
                failures += 1;
                eprintln!("error: {}: {e:#}", path.display());
            }
        }
    }
    emit(&t, out, format)?;
    Ok(u8::from(failures > 0))
}

fn loss_pairs(truth: &Path, pred: &Path) -> Result<Vec<(PathBuf, PathBuf)>> {
    match (truth.is_dir(), pred.is_dir()) {
        (false, false) => Ok(vec![(truth.to_path_buf(), pred.to_path_buf())]),
        (true, true) => {
            let labels = PairLabels {
                model: String::new(),
                dataset: String::new(),
                scale: 1.0,
                recipe: String::new(),
                encoder: String::new(),
            };
            Ok(discover_pairs(truth, pred, &labels)
                .map_err(|e| InputError(format!("{e:#}")))?
                .into_iter()
                .map(|p| (p.reference, p.distorted))
                .collect())
        }
        _ => Err(
            InputError("--truth and --pred must both be files or both be directories".into())
                .into(),
        ),
    }
}

pub fn cmd_loss(a: &LossArgs, out: Option<&Path>, format: Format) -> Result<u8> {
    let base = HybridLossConfig {
        lambda_l1: a.lambda_l1,
        lambda_grad: a.lambda_grad,
        reduction: match a.reduction {
            ReductionArg::Mean => Reduction::Mean,
            ReductionArg::Sum => Reduction::Sum,
        },
        gradient_source: match a.gradient {
            GradientArg::PerChannel => GradientSource::PerChannel,
            GradientArg::Luma => GradientSource::Luma,
        },
    };
    let configs: Vec<HybridLossConfig> = if a.sweep {
        HybridLossConfig::LAMBDA_SWEEP
            .iter()
            .map(|&g| HybridLossConfig {
                lambda_grad: g,
                ..base
            })
            .collect()
    } else {
        vec![base]
    };
    for c in &configs {
        c.validate().map_err(|e| InputError(e.to_string()))?;
    }
    let mut t = Table::new([
        "truth",
        "pred",
        "lambda_l1",
        "lambda_grad",
        "l1",
        "grad",
        "hybrid",
    ]);
    for (truth_path, pred_path) in loss_pairs(&a.truth, &a.pred)? {
        let truth = load_image(&truth_path)?;
        let pred = load_image(&pred_path)?;
        for c in &configs {
            let (l1, grad) = loss_components(&truth, &pred, c)
                .map_err(|e| anyhow!("{} vs {}: {e}", truth_path.display(), pred_path.display()))?;
            t.push(vec![
                Cell::text(truth_path.display().to_string()),
                Cell::text(pred_path.display().to_string()),
                Cell::Fixed(c.lambda_l1),
                Cell::Fixed(c.lambda_grad),
                Cell::Fixed(l1),
                Cell::Fixed(grad),
                Cell::Fixed(c.lambda_l1 * l1 + c.lambda_grad * grad),
            ]);
        }
    }
    emit(&t, out, format)?;
    Ok(0)
}

pub fn cmd_ycompare(
    a: &YcompareArgs,
    out: Option<&Path>,
    format: Format,
    workers: Option<usize>,
) -> Result<u8> {
    let metrics = parse_metrics(&a.metrics)?;
    if let Some(m) = metrics.iter().find(|m| !m.supports_rgb()) {
        bail!(InputError(format!(
            "{m} is always computed on luma; ycompare needs RGB-capable metrics"
        )));
    }
    let pairs = collect_pairs(&a.pairs)?;
    let run = |domain| {
        run_evaluation(
            &pairs,
            &EvalConfig {
                metrics: metrics.clone(),
                domain,
                border: a.border,
            },
            workers,
        )
    };
    let rgb = run(EvalDomain::Rgb)?;
    let y = run(EvalDomain::Y)?;
    let mut errors = rgb.errors;
    let extra: Vec<_> = y
        .errors
        .into_iter()
        .filter(|e| !errors.iter().any(|x| x.pair == e.pair))
        .collect();
    errors.extend(extra);
    let failed: Vec<&Pair> = errors.iter().map(|e| &e.pair).collect();
    let keep = |rows: Vec<ImageRecord>| -> Vec<ImageRecord> {
        rows.into_iter()
            .filter(|r| {
                !failed.iter().any(|p| {
                    let (l, s) = (&p.labels, &r.record);
                    r.image.as_deref() == Some(p.image_id().as_str())
                        && (&s.model, &s.dataset, &s.recipe, &s.encoder)
                            == (&l.model, &l.dataset, &l.recipe, &l.encoder)
                        && s.scale == l.scale
                })
            })
            .collect()
    };
    let rgb = reduce_images(keep(rgb.rows))?;
    let y = reduce_images(keep(y.rows))?;
    let mut rows = Vec::new();
    if !rgb.is_empty() {
        rows = delta_analysis(&rgb, &y, &Dim::ALL)?;
    }
    emit(
        &delta_table(&rows, "rgb", "y", "delta_y_minus_rgb"),
        out,
        format,
    )?;
    emit_errors(&error_table(&errors), a.errors.as_deref())?;
    Ok(u8::from(!errors.is_empty()))
}
