//! Command-line surface of the `echoaug` binary.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::analysis::{self, AnalysisConfig};
use crate::error::{EchoError, Result};
use crate::fan_mask::{self, FanMaskConfig};
use crate::io;
use crate::metrics;
use crate::model::*;
use crate::pipeline::{self, PipelineSpec};
use crate::registry::PresetRegistry;

#[derive(Debug, Parser)]
#[command(name = "echoaug", version, about = "Ultrasound augmentation engine and benchmark analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Materialize an augmented copy of an image/mask dataset.
    Augment(AugmentArgs),
    /// Extract fan-sector masks with morphological operations.
    Fanmask(FanmaskArgs),
    /// Per-image intensity statistics over nonzero pixels.
    Stats(StatsArgs),
    /// Dice and IoU between predicted and reference masks.
    Metrics(MetricsArgs),
    /// Aggregate benchmark results and write the selection reports.
    Analyze(AnalyzeArgs),
    /// Cross-type pairwise plan from a selection table.
    Pairs(PairsArgs),
    /// Export the preset registry as JSON.
    Registry(RegistryArgs),
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    #[arg(long)]
    pub pipeline: PathBuf,
    /// Directory containing `images/`, `masks/` and optionally `fans/`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    /// Overrides the seed stored in the pipeline file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides the output side length; 0 keeps the input size.
    #[arg(long)]
    pub output_size: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FanmaskArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, default_value_t = FanMaskConfig::default().close_radius)]
    pub close_radius: usize,
    #[arg(long, default_value_t = FanMaskConfig::default().open_radius)]
    pub open_radius: usize,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// LV masks with the same file names; enables the LV-core columns.
    #[arg(long)]
    pub masks: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MetricsArgs {
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub truth: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Per-run table, or a per-cell means table with significance flags.
    #[arg(long)]
    pub runs: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub topk: usize,
    #[arg(long, default_value_t = 5)]
    pub min_sig: usize,
    #[arg(long, default_value_t = 6)]
    pub min_pos: usize,
    #[arg(long, default_value_t = SIGNIFICANCE_LEVEL)]
    pub alpha: f64,
    #[arg(long, default_value = "dice")]
    pub metric: Metric,
    /// Accept dataset identifiers outside the published ones.
    #[arg(long)]
    pub free_labels: bool,
}

#[derive(Debug, Args)]
pub struct PairsArgs {
    #[arg(long)]
    pub selection: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RegistryArgs {
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses arguments, runs the command, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Augment(a) => augment(a),
        Command::Fanmask(a) => fanmask(a),
        Command::Stats(a) => stats(a),
        Command::Metrics(a) => metrics_cmd(a),
        Command::Analyze(a) => analyze(a),
        Command::Pairs(a) => pairs(a),
        Command::Registry(a) => io::write_text(&a.out, &PresetRegistry::builtin().to_json()?),
    }
}

fn augment(a: AugmentArgs) -> Result<()> {
    let mut spec = PipelineSpec::from_json(&io::read_text(&a.pipeline)?)?;
    if let Some(size) = a.output_size {
        spec.output_size = (size > 0).then_some(size);
    }
    let seed = a.seed.unwrap_or(spec.seed);
    let manifest = pipeline::materialize_dataset(&spec, &a.input, &a.output, seed)?;
    eprintln!("augmented {} samples into {}", manifest.files.len(), a.output.display());
    Ok(())
}

fn fanmask(a: FanmaskArgs) -> Result<()> {
    let cfg = FanMaskConfig {
        close_radius: a.close_radius,
        open_radius: a.open_radius,
    };
    let files = io::list_pngs(&a.input)?;
    pipeline::with_thread_cap(|| {
        files.par_iter().try_for_each(|path| {
            let img = io::load_gray_png(path)?;
            let mask = fan_mask::extract_fan_mask_with(&img, &cfg)?;
            io::save_mask_png(&a.output.join(io::file_name(path)), &mask)
        })
    })?;
    eprintln!("wrote {} fan masks to {}", files.len(), a.output.display());
    Ok(())
}

fn stats(a: StatsArgs) -> Result<()> {
    let files = io::list_pngs(&a.input)?;
    let records = pipeline::with_thread_cap(|| {
        files
            .par_iter()
            .map(|path| {
                let name = io::file_name(path);
                let img = io::load_gray_png(path)?;
                let mask = match &a.masks {
                    Some(dir) => Some(io::load_mask_png(&dir.join(&name))?),
                    None => None,
                };
                Ok((name, metrics::image_stats(&img, mask.as_ref())?))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    io::write_text(&a.out, &io::stats_csv(&records)?)
}

fn metrics_cmd(a: MetricsArgs) -> Result<()> {
    let files = io::list_pngs(&a.pred)?;
    let rows = pipeline::with_thread_cap(|| {
        files
            .par_iter()
            .map(|path| {
                let name = io::file_name(path);
                let pred = io::load_mask_png(path)?;
                let truth = io::load_mask_png(&a.truth.join(&name))?;
                Ok((name, metrics::dice(&pred, &truth)?, metrics::iou(&pred, &truth)?))
            })
            .collect::<Result<Vec<_>>>()
    })?;
    io::write_text(&a.out, &io::metrics_csv(&rows)?)
}

/// Writes the six report files for an aggregate table.
pub fn write_reports(agg: &analysis::Aggregates, cfg: &AnalysisConfig, out_dir: &Path) -> Result<SelectionReport> {
    let selection = analysis::phase1_select(agg, cfg);
    let heatmaps = analysis::heatmap_matrices(agg);
    let no_harm = analysis::no_harm_filter(agg);
    let spearman = analysis::spearman_report(agg);
    io::write_text(&out_dir.join("aggregate.csv"), &io::aggregate_csv(agg)?)?;
    io::write_text(&out_dir.join("selection.csv"), &io::selection_csv(&selection)?)?;
    io::write_text(&out_dir.join("heatmap_raw.csv"), &io::heatmap_raw_csv(&heatmaps)?)?;
    io::write_text(&out_dir.join("heatmap_delta.csv"), &io::heatmap_delta_csv(&heatmaps)?)?;
    io::write_text(&out_dir.join("no_harm.csv"), &io::no_harm_csv(agg, &no_harm)?)?;
    io::write_text(&out_dir.join("spearman.csv"), &io::spearman_csv(&spearman)?)?;
    Ok(selection)
}

/// Loads either table flavour and aggregates it.
pub fn load_aggregates(path: &Path, cfg: &AnalysisConfig, policy: LabelPolicy) -> Result<analysis::Aggregates> {
    let text = io::read_text(path)?;
    if io::is_runs_table(&text)? {
        analysis::aggregate_runs(&io::parse_runs_csv(&text, policy)?, cfg)
    } else {
        analysis::aggregate_cell_means(&io::parse_cell_means_csv(&text, cfg.metric, policy)?, cfg.metric)
    }
}

fn analyze(a: AnalyzeArgs) -> Result<()> {
    if !(a.alpha > 0.0 && a.alpha < 1.0) {
        return Err(EchoError::validation("--alpha must lie in (0, 1)"));
    }
    let cfg = AnalysisConfig {
        min_pos: a.min_pos,
        min_sig: a.min_sig,
        top_k: a.topk,
        alpha: a.alpha,
        metric: a.metric,
        ..AnalysisConfig::default()
    };
    let policy = if a.free_labels { LabelPolicy::Free } else { LabelPolicy::Paper };
    let agg = load_aggregates(&a.runs, &cfg, policy)?;
    let selection = write_reports(&agg, &cfg, &a.out_dir)?;
    eprintln!(
        "{} presets, {} cells, {} selected; reports in {}",
        agg.rows.len(),
        agg.cells.len(),
        selection.selected().len(),
        a.out_dir.display()
    );
    Ok(())
}

fn pairs(a: PairsArgs) -> Result<()> {
    let selected = io::parse_selection_csv(&io::read_text(&a.selection)?)?;
    let doc = pipeline::pair_plan_document(&selected);
    io::write_text(&a.out, &serde_json::to_string_pretty(&doc)?)?;
    eprintln!("{} pairs from {} presets", doc.count, selected.len());
    Ok(())
}
