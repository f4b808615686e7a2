//! Benchmark analysis: per-cell aggregation against the no-augmentation
//! baseline, significance testing, phase-one selection, heatmaps, rank
//! agreement, and the cross-dataset no-harm filter.

use std::collections::{BTreeMap, BTreeSet};

use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{EchoError, Result};
use crate::model::*;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TTest {
    pub t: f64,
    pub p: f64,
    pub df: f64,
}

/// Two-sided two-sample Student t-test with pooled variance.
pub fn t_test_vs_none(aug: &[f64], none: &[f64]) -> Result<TTest> {
    let (n1, n2) = (aug.len(), none.len());
    if n1 < 2 || n2 < 2 {
        return Err(EchoError::validation("t-test needs at least two values per group"));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let ss = |v: &[f64], m: f64| v.iter().map(|x| (x - m) * (x - m)).sum::<f64>();
    let (m1, m2) = (mean(aug), mean(none));
    let df = (n1 + n2 - 2) as f64;
    let pooled = (ss(aug, m1) + ss(none, m2)) / df;
    let se = (pooled * (1.0 / n1 as f64 + 1.0 / n2 as f64)).sqrt();
    let diff = m1 - m2;
    if se == 0.0 {
        return Ok(if diff == 0.0 {
            TTest { t: 0.0, p: 1.0, df }
        } else {
            TTest { t: f64::INFINITY.copysign(diff), p: 0.0, df }
        });
    }
    let t = diff / se;
    let dist = StudentsT::new(0.0, 1.0, df).expect("df is positive");
    let p = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok(TTest { t, p, df })
}

/// Thresholds and options for selection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnalysisConfig {
    pub min_pos: usize,
    pub min_sig: usize,
    pub top_k: usize,
    pub alpha: f64,
    pub runs_per_config: usize,
    pub metric: Metric,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            min_pos: 6,
            min_sig: 5,
            top_k: 5,
            alpha: SIGNIFICANCE_LEVEL,
            runs_per_config: 3,
            metric: Metric::Dice,
        }
    }
}

/// Aggregated results: one row per preset key, columns aligned with `cells`.
#[derive(Clone, Debug, PartialEq)]
pub struct Aggregates {
    pub metric: Metric,
    pub cells: Vec<CellId>,
    pub rows: BTreeMap<PresetKey, Vec<AggregateCell>>,
}

/// Published (or precomputed) mean for one (preset, cell) with its significance flag.
#[derive(Clone, Debug, PartialEq)]
pub struct CellMean {
    pub preset: PresetKey,
    pub cell: CellId,
    pub mean: f64,
    pub significant: bool,
}

/// Paper column order when every cell is a paper cell, otherwise sorted.
fn order_cells(cells: BTreeSet<CellId>) -> Vec<CellId> {
    let paper = CellId::paper_cells();
    if cells.iter().all(|c| paper.contains(c)) {
        paper.into_iter().filter(|c| cells.contains(c)).collect()
    } else {
        cells.into_iter().collect()
    }
}

pub fn aggregate_runs(runs: &[RunRecord], cfg: &AnalysisConfig) -> Result<Aggregates> {
    let mut groups: BTreeMap<(PresetKey, CellId), BTreeMap<u32, f64>> = BTreeMap::new();
    for r in runs {
        r.validate()?;
        let v = match cfg.metric {
            Metric::Dice => r.dice,
            Metric::Iou => r.iou,
        };
        let slot = groups.entry((r.preset, r.cell.clone())).or_default();
        if slot.insert(r.run_idx, v).is_some() {
            return Err(EchoError::validation(format!(
                "duplicate run {} for {} in cell {}",
                r.run_idx, r.preset, r.cell
            )));
        }
    }
    let baseline_cells: BTreeSet<CellId> = groups
        .keys()
        .filter(|(k, _)| k.is_none())
        .map(|(_, c)| c.clone())
        .collect();
    if baseline_cells.is_empty() {
        return Err(EchoError::BaselineMissing);
    }
    let cells = order_cells(baseline_cells);
    let presets: BTreeSet<PresetKey> = groups.keys().map(|(k, _)| *k).collect();

    let values = |key: PresetKey, cell: &CellId| -> Result<Vec<f64>> {
        let runs = groups.get(&(key, cell.clone())).ok_or_else(|| EchoError::MissingRuns {
            preset: key.to_string(),
            cell: cell.to_string(),
            detail: "no runs".into(),
        })?;
        if runs.len() != cfg.runs_per_config {
            return Err(EchoError::MissingRuns {
                preset: key.to_string(),
                cell: cell.to_string(),
                detail: format!("expected {} runs, found {}", cfg.runs_per_config, runs.len()),
            });
        }
        Ok(runs.values().copied().collect())
    };
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;

    let mut rows = BTreeMap::new();
    for key in presets {
        if let Some((_, stray)) = groups.keys().find(|(k, c)| *k == key && !cells.contains(c)) {
            return Err(EchoError::MissingRuns {
                preset: PresetKey::None.to_string(),
                cell: stray.to_string(),
                detail: format!("{key} has runs in a cell without baseline runs"),
            });
        }
        let mut row = Vec::with_capacity(cells.len());
        for cell in &cells {
            let aug = values(key, cell)?;
            let none = values(PresetKey::None, cell)?;
            let test = t_test_vs_none(&aug, &none)?;
            let m = mean(&aug);
            row.push(AggregateCell {
                mean: m,
                p_value: Some(test.p),
                significant: test.p < cfg.alpha,
                delta_vs_none: m - mean(&none),
            });
        }
        rows.insert(key, row);
    }
    Ok(Aggregates { metric: cfg.metric, cells, rows })
}

/// Builds aggregates from per-cell means and significance flags (no run data).
pub fn aggregate_cell_means(entries: &[CellMean], metric: Metric) -> Result<Aggregates> {
    let mut table: BTreeMap<PresetKey, BTreeMap<CellId, (f64, bool)>> = BTreeMap::new();
    for e in entries {
        if !(0.0..=1.0).contains(&e.mean) {
            return Err(EchoError::validation(format!("{} {}: mean {} outside [0, 1]", e.preset, e.cell, e.mean)));
        }
        if table.entry(e.preset).or_default().insert(e.cell.clone(), (e.mean, e.significant)).is_some() {
            return Err(EchoError::validation(format!("duplicate cell {} for {}", e.cell, e.preset)));
        }
    }
    let baseline = table.get(&PresetKey::None).ok_or(EchoError::BaselineMissing)?;
    let cells = order_cells(baseline.keys().cloned().collect());
    let mut rows = BTreeMap::new();
    for (key, by_cell) in &table {
        let mut row = Vec::with_capacity(cells.len());
        for cell in &cells {
            let &(m, sig) = by_cell.get(cell).ok_or_else(|| EchoError::MissingRuns {
                preset: key.to_string(),
                cell: cell.to_string(),
                detail: "no mean for this cell".into(),
            })?;
            row.push(AggregateCell {
                mean: m,
                p_value: None,
                significant: sig && !key.is_none(),
                delta_vs_none: m - baseline[cell].0,
            });
        }
        if by_cell.len() != cells.len() {
            return Err(EchoError::MissingRuns {
                preset: PresetKey::None.to_string(),
                cell: "?".into(),
                detail: format!("{key} has cells without a baseline value"),
            });
        }
        rows.insert(*key, row);
    }
    Ok(Aggregates { metric, cells, rows })
}

impl Aggregates {
    pub fn row(&self, key: &PresetKey) -> Option<&[AggregateCell]> {
        self.rows.get(key).map(Vec::as_slice)
    }

    /// Unweighted mean of the cell means.
    pub fn row_mean(&self, key: &PresetKey) -> Option<f64> {
        self.row(key).map(row_mean_of)
    }

    pub fn delta_count(&self, key: &PresetKey) -> Option<usize> {
        self.row(key).map(|r| r.iter().filter(|c| c.delta_vs_none > 0.0).count())
    }

    pub fn sig_count(&self, key: &PresetKey) -> Option<usize> {
        self.row(key).map(|r| r.iter().filter(|c| c.significant).count())
    }

    /// Cross-dataset column indices (train and test sets differ).
    pub fn cross_cells(&self) -> Vec<usize> {
        (0..self.cells.len()).filter(|&i| !self.cells[i].is_in_domain()).collect()
    }

    /// Adds `shift` to every mean (baseline included). Deltas and flags are kept.
    pub fn shifted(&self, shift: f64) -> Aggregates {
        let mut out = self.clone();
        for row in out.rows.values_mut() {
            for c in row.iter_mut() {
                c.mean += shift;
            }
        }
        out
    }
}

pub fn row_mean_of(cells: &[AggregateCell]) -> f64 {
    cells.iter().map(|c| c.mean).sum::<f64>() / cells.len() as f64
}

/// Criterion A (enough positive deltas and significant cells) united with the
/// top-k row means. Ordered by significance count, positive deltas, then row
/// mean (all descending), then preset key.
pub fn phase1_select(agg: &Aggregates, cfg: &AnalysisConfig) -> SelectionReport {
    let mut rows: Vec<SelectionRow> = agg
        .rows
        .keys()
        .filter(|k| !k.is_none())
        .map(|k| {
            let sig = agg.sig_count(k).unwrap_or(0);
            let pos = agg.delta_count(k).unwrap_or(0);
            SelectionRow {
                preset: *k,
                sig05_count: sig,
                delta_dice_score: pos,
                row_mean: agg.row_mean(k).unwrap_or(f64::NAN),
                selected_by_significance: pos >= cfg.min_pos && sig >= cfg.min_sig,
                selected_by_topk: false,
            }
        })
        .collect();

    let mut by_mean: Vec<usize> = (0..rows.len()).collect();
    by_mean.sort_by(|&a, &b| {
        rows[b]
            .row_mean
            .total_cmp(&rows[a].row_mean)
            .then_with(|| rows[a].preset.cmp(&rows[b].preset))
    });
    for &i in by_mean.iter().take(cfg.top_k) {
        rows[i].selected_by_topk = true;
    }

    rows.sort_by(|a, b| {
        b.sig05_count
            .cmp(&a.sig05_count)
            .then(b.delta_dice_score.cmp(&a.delta_dice_score))
            .then(b.row_mean.total_cmp(&a.row_mean))
            .then(a.preset.cmp(&b.preset))
    });
    SelectionReport { rows }
}

/// Preset keys ordered by row mean, best first (ties by key).
pub fn rank_by_row_mean(agg: &Aggregates) -> Vec<(PresetKey, f64)> {
    let mut v: Vec<(PresetKey, f64)> = agg.rows.iter().map(|(k, r)| (*k, row_mean_of(r))).collect();
    v.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    v
}

#[derive(Clone, Debug, PartialEq)]
pub struct Heatmaps {
    pub cells: Vec<CellId>,
    pub raw: Vec<(PresetKey, Vec<f64>)>,
    pub delta: Vec<(PresetKey, Vec<f64>)>,
}

pub fn heatmap_matrices(agg: &Aggregates) -> Heatmaps {
    let raw = agg
        .rows
        .iter()
        .map(|(k, r)| (*k, r.iter().map(|c| c.mean).collect()))
        .collect();
    let delta = agg
        .rows
        .iter()
        .map(|(k, r)| (*k, r.iter().map(|c| c.delta_vs_none).collect()))
        .collect();
    Heatmaps { cells: agg.cells.clone(), raw, delta }
}

/// Keys whose delta is strictly positive in every cross-dataset cell.
pub fn no_harm_filter(agg: &Aggregates) -> Vec<PresetKey> {
    let cross = agg.cross_cells();
    if cross.is_empty() {
        return Vec::new();
    }
    agg.rows
        .iter()
        .filter(|(_, r)| cross.iter().all(|&i| r[i].delta_vs_none > 0.0))
        .map(|(k, _)| *k)
        .collect()
}

/// Average ranks (1-based), ties share the mean of their positions.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (Pearson correlation of average ranks).
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(EchoError::validation("spearman inputs differ in length"));
    }
    if a.len() < 2 {
        return Err(EchoError::validation("spearman needs at least two observations"));
    }
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    let n = ra.len() as f64;
    let (ma, mb) = (ra.iter().sum::<f64>() / n, rb.iter().sum::<f64>() / n);
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in ra.iter().zip(&rb) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return Err(EchoError::validation("spearman undefined for constant input"));
    }
    Ok((cov / (va * vb).sqrt()).clamp(-1.0, 1.0))
}

/// One rank-agreement comparison between two training datasets.
#[derive(Clone, Debug, PartialEq)]
pub struct SpearmanRow {
    /// `"source"` compares row means over each training set's cells; `"target"`
    /// compares the cells of one test set.
    pub view: &'static str,
    pub target: Option<String>,
    pub train_a: String,
    pub train_b: String,
    pub rho: Option<f64>,
    pub n: usize,
}

/// Rank agreement across training datasets over all non-baseline keys.
pub fn spearman_report(agg: &Aggregates) -> Vec<SpearmanRow> {
    let keys: Vec<PresetKey> = agg.rows.keys().filter(|k| !k.is_none()).copied().collect();
    let mut trains: Vec<String> = Vec::new();
    let mut tests: Vec<String> = Vec::new();
    for c in &agg.cells {
        if !trains.contains(&c.train) {
            trains.push(c.train.clone());
        }
        if !tests.contains(&c.test) {
            tests.push(c.test.clone());
        }
    }
    let col = |train: &str, test: &str| agg.cells.iter().position(|c| c.train == train && c.test == test);
    let mut out = Vec::new();

    let source_score = |train: &str| -> Vec<f64> {
        let idx: Vec<usize> = (0..agg.cells.len()).filter(|&i| agg.cells[i].train == train).collect();
        keys.iter()
            .map(|k| {
                let r = &agg.rows[k];
                idx.iter().map(|&i| r[i].mean).sum::<f64>() / idx.len() as f64
            })
            .collect()
    };
    for (i, a) in trains.iter().enumerate() {
        for b in &trains[i + 1..] {
            out.push(SpearmanRow {
                view: "source",
                target: None,
                train_a: a.clone(),
                train_b: b.clone(),
                rho: spearman(&source_score(a), &source_score(b)).ok(),
                n: keys.len(),
            });
        }
    }
    for t in &tests {
        for (i, a) in trains.iter().enumerate() {
            for b in &trains[i + 1..] {
                let (Some(ia), Some(ib)) = (col(a, t), col(b, t)) else { continue };
                let va: Vec<f64> = keys.iter().map(|k| agg.rows[k][ia].mean).collect();
                let vb: Vec<f64> = keys.iter().map(|k| agg.rows[k][ib].mean).collect();
                out.push(SpearmanRow {
                    view: "target",
                    target: Some(t.clone()),
                    train_a: a.clone(),
                    train_b: b.clone(),
                    rho: spearman(&va, &vb).ok(),
                    n: keys.len(),
                });
            }
        }
    }
    out
}
