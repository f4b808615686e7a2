//! File formats: 8-bit PNG rasters, the runs/cell-means tables, and the
//! report CSVs written by `echoaug analyze`.
//!
//! Report tables use four decimals. `aggregate.csv` keeps full precision
//! (shortest round-trip representation), so re-reading it loses nothing.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::analysis::{Aggregates, CellMean, Heatmaps, SpearmanRow};
use crate::error::{EchoError, Result};
use crate::model::*;

pub fn load_gray_png(path: &Path) -> Result<GrayImage> {
    let img = image::open(path).map_err(|e| codec_error(path, e))?.to_luma8();
    let (w, h) = img.dimensions();
    GrayImage::from_u8(w as usize, h as usize, img.as_raw())
}

/// Loads a mask PNG; any nonzero value is foreground.
pub fn load_mask_png(path: &Path) -> Result<BinaryMask> {
    let img = image::open(path).map_err(|e| codec_error(path, e))?.to_luma8();
    let (w, h) = img.dimensions();
    BinaryMask::from_u8_nonzero(w as usize, h as usize, img.as_raw())
}

pub fn save_gray_png(path: &Path, img: &GrayImage) -> Result<()> {
    write_luma(path, img.width(), img.height(), img.to_u8())
}

/// Saves a mask as `{0, 255}`.
pub fn save_mask_png(path: &Path, mask: &BinaryMask) -> Result<()> {
    write_luma(path, mask.width(), mask.height(), mask.to_u8_255())
}

fn write_luma(path: &Path, w: usize, h: usize, data: Vec<u8>) -> Result<()> {
    ensure_parent(path)?;
    let buf = image::GrayImage::from_raw(w as u32, h as u32, data)
        .ok_or_else(|| EchoError::validation("raster buffer does not match its dimensions"))?;
    buf.save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| codec_error(path, e))
}

fn codec_error(path: &Path, e: image::ImageError) -> EchoError {
    match e {
        image::ImageError::IoError(io) => EchoError::io(path, io),
        other => EchoError::Codec {
            path: path.to_path_buf(),
            message: other.to_string(),
        },
    }
}

pub fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| EchoError::io(dir, e)),
        _ => Ok(()),
    }
}

/// PNG files directly inside `dir`, sorted by file name.
pub fn list_pngs(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| EchoError::io(dir, e))? {
        let path = entry.map_err(|e| EchoError::io(dir, e))?.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if is_png && path.is_file() {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

pub fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    ensure_parent(path)?;
    fs::write(path, text).map_err(|e| EchoError::io(path, e))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| EchoError::io(path, e))
}

/// Four-decimal formatting without a negative zero.
pub fn fmt4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn fmt_full(v: f64) -> String {
    format!("{v:?}")
}

struct Columns {
    headers: csv::StringRecord,
}

impl Columns {
    fn index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h.trim().eq_ignore_ascii_case(name))
    }

    fn require(&self, name: &str) -> Result<usize> {
        self.index(name)
            .ok_or_else(|| EchoError::validation(format!("missing column '{name}'")))
    }
}

fn field<'r>(rec: &'r csv::StringRecord, idx: Option<usize>) -> Option<&'r str> {
    idx.and_then(|i| rec.get(i)).map(str::trim).filter(|s| !s.is_empty())
}

fn parse_f64(s: &str, what: &str, line: u64) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| EchoError::validation(format!("line {line}: {what} '{s}' is not a number")))
}

fn parse_bool(s: &str, line: u64) -> Result<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "1" | "yes" | "y" => Ok(true),
        "false" | "0" | "no" | "n" | "" => Ok(false),
        other => Err(EchoError::validation(format!("line {line}: '{other}' is not a boolean"))),
    }
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes())
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

/// Parses a runs table:
/// `augmentation,setting,pair_partner,train_ds,test_ds,run_idx,dice,iou`
/// (`pair_partner` may be absent or empty).
pub fn parse_runs_csv(text: &str, policy: LabelPolicy) -> Result<Vec<RunRecord>> {
    let mut rdr = csv_reader(text);
    let cols = Columns { headers: rdr.headers()?.clone() };
    let (aug, setting, partner) = (cols.require("augmentation")?, cols.index("setting"), cols.index("pair_partner"));
    let (train, test) = (cols.require("train_ds")?, cols.require("test_ds")?);
    let (run, dice, iou) = (cols.require("run_idx")?, cols.require("dice")?, cols.require("iou")?);

    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let ctx = |e: EchoError| EchoError::validation(format!("line {line}: {e}"));
        let preset = PresetKey::from_columns(
            field(&rec, Some(aug)).unwrap_or(""),
            field(&rec, setting).unwrap_or(""),
            field(&rec, partner),
        )
        .map_err(ctx)?;
        let cell = CellId::new(
            field(&rec, Some(train)).unwrap_or(""),
            field(&rec, Some(test)).unwrap_or(""),
            policy,
        )
        .map_err(ctx)?;
        let run_idx = field(&rec, Some(run))
            .unwrap_or("")
            .parse::<u32>()
            .map_err(|_| EchoError::validation(format!("line {line}: run_idx must be a non-negative integer")))?;
        let record = RunRecord {
            preset,
            cell,
            run_idx,
            dice: parse_f64(field(&rec, Some(dice)).unwrap_or(""), "dice", line)?,
            iou: parse_f64(field(&rec, Some(iou)).unwrap_or(""), "iou", line)?,
        };
        record.validate().map_err(ctx)?;
        out.push(record);
    }
    Ok(out)
}

pub fn write_runs_csv(runs: &[RunRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["augmentation", "setting", "pair_partner", "train_ds", "test_ds", "run_idx", "dice", "iou"])?;
    for r in runs {
        let (a, s, p) = r.preset.columns();
        w.write_record([
            a,
            s,
            p,
            r.cell.train.clone(),
            r.cell.test.clone(),
            r.run_idx.to_string(),
            fmt_full(r.dice),
            fmt_full(r.iou),
        ])?;
    }
    finish(w)
}

/// Parses a per-cell means table:
/// `augmentation,setting,pair_partner,train_ds,test_ds,mean_<metric>,significant`.
/// A plain `mean` column is accepted as well.
pub fn parse_cell_means_csv(text: &str, metric: Metric, policy: LabelPolicy) -> Result<Vec<CellMean>> {
    let mut rdr = csv_reader(text);
    let cols = Columns { headers: rdr.headers()?.clone() };
    let aug = cols.require("augmentation")?;
    let (setting, partner) = (cols.index("setting"), cols.index("pair_partner"));
    let (train, test) = (cols.require("train_ds")?, cols.require("test_ds")?);
    let mean_col = cols
        .index(&format!("mean_{metric}"))
        .or_else(|| cols.index("mean"))
        .ok_or_else(|| EchoError::validation(format!("missing column 'mean_{metric}'")))?;
    let sig = cols.index("significant");

    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        let ctx = |e: EchoError| EchoError::validation(format!("line {line}: {e}"));
        out.push(CellMean {
            preset: PresetKey::from_columns(
                field(&rec, Some(aug)).unwrap_or(""),
                field(&rec, setting).unwrap_or(""),
                field(&rec, partner),
            )
            .map_err(ctx)?,
            cell: CellId::new(
                field(&rec, Some(train)).unwrap_or(""),
                field(&rec, Some(test)).unwrap_or(""),
                policy,
            )
            .map_err(ctx)?,
            mean: parse_f64(field(&rec, Some(mean_col)).unwrap_or(""), "mean", line)?,
            significant: parse_bool(field(&rec, sig).unwrap_or(""), line)?,
        });
    }
    Ok(out)
}

/// True when the header row looks like a per-run table (has `run_idx`).
pub fn is_runs_table(text: &str) -> Result<bool> {
    let mut rdr = csv_reader(text);
    Ok(rdr.headers()?.iter().any(|h| h.eq_ignore_ascii_case("run_idx")))
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| EchoError::validation(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| EchoError::validation(e.to_string()))
}

/// Long-format aggregate table at full precision.
pub fn aggregate_csv(agg: &Aggregates) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "augmentation",
        "setting",
        "pair_partner",
        "train_ds",
        "test_ds",
        &format!("mean_{}", agg.metric),
        "delta_vs_none",
        "p_value",
        "significant",
    ])?;
    for (key, row) in &agg.rows {
        let (a, s, p) = key.columns();
        for (cell, c) in agg.cells.iter().zip(row) {
            w.write_record([
                a.clone(),
                s.clone(),
                p.clone(),
                cell.train.clone(),
                cell.test.clone(),
                fmt_full(c.mean),
                fmt_full(c.delta_vs_none),
                c.p_value.map(fmt_full).unwrap_or_default(),
                c.significant.to_string(),
            ])?;
        }
    }
    finish(w)
}

pub fn selection_csv(report: &SelectionReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "augmentation",
        "setting",
        "pair_partner",
        "sig05_count",
        "delta_dice_score",
        "row_mean",
        "selected_by_significance",
        "selected_by_topk",
        "selected",
    ])?;
    for r in &report.rows {
        let (a, s, p) = r.preset.columns();
        w.write_record([
            a,
            s,
            p,
            r.sig05_count.to_string(),
            r.delta_dice_score.to_string(),
            fmt4(r.row_mean),
            r.selected_by_significance.to_string(),
            r.selected_by_topk.to_string(),
            r.selected().to_string(),
        ])?;
    }
    finish(w)
}

/// Reads the presets marked `selected` in a selection table. Pairs are skipped.
pub fn parse_selection_csv(text: &str) -> Result<Vec<PresetId>> {
    let mut rdr = csv_reader(text);
    let cols = Columns { headers: rdr.headers()?.clone() };
    let aug = cols.require("augmentation")?;
    let setting = cols.require("setting")?;
    let partner = cols.index("pair_partner");
    let selected = cols.index("selected");
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = line_of(&rec);
        if let Some(flag) = field(&rec, selected) {
            if !parse_bool(flag, line)? {
                continue;
            }
        }
        let key = PresetKey::from_columns(
            field(&rec, Some(aug)).unwrap_or(""),
            field(&rec, Some(setting)).unwrap_or(""),
            field(&rec, partner),
        )
        .map_err(|e| EchoError::validation(format!("line {line}: {e}")))?;
        if let PresetKey::Single(id) = key {
            out.push(id);
        }
    }
    Ok(out)
}

fn matrix_csv(cells: &[CellId], rows: &[(PresetKey, Vec<f64>)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["preset".to_string()];
    header.extend(cells.iter().map(ToString::to_string));
    w.write_record(&header)?;
    for (key, values) in rows {
        let mut rec = vec![key.to_string()];
        rec.extend(values.iter().map(|&v| fmt4(v)));
        w.write_record(&rec)?;
    }
    finish(w)
}

pub fn heatmap_raw_csv(h: &Heatmaps) -> Result<String> {
    matrix_csv(&h.cells, &h.raw)
}

pub fn heatmap_delta_csv(h: &Heatmaps) -> Result<String> {
    matrix_csv(&h.cells, &h.delta)
}

pub fn no_harm_csv(agg: &Aggregates, passing: &[PresetKey]) -> Result<String> {
    let cross = agg.cross_cells();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["augmentation", "setting", "pair_partner", "row_mean", "min_cross_delta"])?;
    for key in passing {
        let row = &agg.rows[key];
        let min_delta = cross
            .iter()
            .map(|&i| row[i].delta_vs_none)
            .fold(f64::INFINITY, f64::min);
        let (a, s, p) = key.columns();
        w.write_record([a, s, p, fmt4(crate::analysis::row_mean_of(row)), fmt4(min_delta)])?;
    }
    finish(w)
}

pub fn spearman_csv(rows: &[SpearmanRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["view", "target", "train_a", "train_b", "rho", "n"])?;
    for r in rows {
        w.write_record([
            r.view.to_string(),
            r.target.clone().unwrap_or_default(),
            r.train_a.clone(),
            r.train_b.clone(),
            r.rho.map(fmt4).unwrap_or_default(),
            r.n.to_string(),
        ])?;
    }
    finish(w)
}

/// One row per image (`file` plus the statistics fields) and a trailing `MEAN` row.
pub fn stats_csv(records: &[(String, ImageStatsRecord)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["file"];
    header.extend(ImageStatsRecord::FIELDS);
    w.write_record(&header)?;
    let fmt_row = |name: &str, r: &ImageStatsRecord| {
        let mut rec = vec![name.to_string()];
        rec.extend(r.values().iter().map(|v| v.map(fmt_full).unwrap_or_default()));
        rec
    };
    for (name, r) in records {
        w.write_record(fmt_row(name, r))?;
    }
    let all: Vec<ImageStatsRecord> = records.iter().map(|(_, r)| r.clone()).collect();
    if let Some(mean) = crate::metrics::mean_stats(&all) {
        w.write_record(fmt_row("MEAN", &mean))?;
    }
    finish(w)
}

/// `file,dice,iou` per mask pair plus a trailing `MEAN` row.
pub fn metrics_csv(rows: &[(String, f64, f64)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["file", "dice", "iou"])?;
    for (name, d, i) in rows {
        w.write_record([name.clone(), fmt_full(*d), fmt_full(*i)])?;
    }
    if !rows.is_empty() {
        let n = rows.len() as f64;
        let md = rows.iter().map(|r| r.1).sum::<f64>() / n;
        let mi = rows.iter().map(|r| r.2).sum::<f64>() / n;
        w.write_record(["MEAN".to_string(), fmt_full(md), fmt_full(mi)])?;
    }
    finish(w)
}

/// Writes `bytes` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    ensure_parent(path)?;
    let tmp = path.with_extension("tmp");
    let mut f = fs::File::create(&tmp).map_err(|e| EchoError::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| EchoError::io(&tmp, e))?;
    f.sync_all().map_err(|e| EchoError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| EchoError::io(path, e))
}
