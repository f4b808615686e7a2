use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::preset::PresetId;
use crate::error::{EchoError, Result};

pub const TRAIN_DATASETS: [&str; 3] = ["Unity", "CA", "ED"];
pub const TEST_DATASETS: [&str; 3] = ["CS", "CA", "ED"];

/// How dataset labels in result tables are checked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LabelPolicy {
    /// Train sets {Unity, CA, ED}, test sets {CS, CA, ED}. CS replaces the Unity test split.
    #[default]
    Paper,
    /// Any non-empty labels; in-domain means train == test.
    Free,
}

impl LabelPolicy {
    fn canonical(self, label: &str, train: bool) -> Result<String> {
        let trimmed = label.trim();
        if trimmed.is_empty() {
            return Err(EchoError::validation("empty dataset label"));
        }
        if self == LabelPolicy::Free {
            return Ok(trimmed.to_string());
        }
        let canon = match trimmed.to_ascii_lowercase().as_str() {
            "unity" => "Unity",
            "ca" | "camus" => "CA",
            "ed" | "echonet" | "echonet-dynamic" | "echonetdynamic" => "ED",
            "cs" | "consensus" => "CS",
            _ => "",
        };
        let allowed: &[&str] = if train { &TRAIN_DATASETS } else { &TEST_DATASETS };
        if allowed.contains(&canon) {
            Ok(canon.to_string())
        } else {
            Err(EchoError::validation(format!(
                "'{trimmed}' is not a valid {} dataset (expected one of {allowed:?}; use free labels for other experiments)",
                if train { "train" } else { "test" }
            )))
        }
    }
}

/// One train→test evaluation cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellId {
    pub train: String,
    pub test: String,
}

impl CellId {
    pub fn new(train: &str, test: &str, policy: LabelPolicy) -> Result<Self> {
        Ok(Self {
            train: policy.canonical(train, true)?,
            test: policy.canonical(test, false)?,
        })
    }

    /// The nine cells in table column order.
    pub fn paper_cells() -> Vec<CellId> {
        TRAIN_DATASETS
            .iter()
            .flat_map(|tr| {
                TEST_DATASETS.iter().map(move |te| CellId {
                    train: tr.to_string(),
                    test: te.to_string(),
                })
            })
            .collect()
    }

    pub fn is_in_domain(&self) -> bool {
        self.train == self.test || (self.train == "Unity" && self.test == "CS")
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}", self.train, self.test)
    }
}

/// Which augmentation (or pair, or none) produced a result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PresetKey {
    None,
    Single(PresetId),
    /// Stored in canonical order (first <= second).
    Pair(PresetId, PresetId),
}

impl PresetKey {
    pub fn pair(a: PresetId, b: PresetId) -> Self {
        if a <= b {
            PresetKey::Pair(a, b)
        } else {
            PresetKey::Pair(b, a)
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, PresetKey::None)
    }

    /// Parses the `augmentation, setting, pair_partner` columns of a runs table.
    pub fn from_columns(augmentation: &str, setting: &str, partner: Option<&str>) -> Result<Self> {
        let aug = augmentation.trim();
        if aug.eq_ignore_ascii_case("none") {
            return Ok(PresetKey::None);
        }
        let first = PresetId::parse(aug, setting)?;
        match partner.map(str::trim).filter(|p| !p.is_empty()) {
            None => Ok(PresetKey::Single(first)),
            Some(p) => {
                let second = parse_preset_label(p)?;
                if second.transform == first.transform {
                    return Err(EchoError::validation(format!(
                        "pair {first} + {second} combines two settings of one transform"
                    )));
                }
                Ok(PresetKey::pair(first, second))
            }
        }
    }

    /// `(augmentation, setting, pair_partner)` column values.
    pub fn columns(&self) -> (String, String, String) {
        match self {
            PresetKey::None => ("NONE".into(), "NONE".into(), String::new()),
            PresetKey::Single(p) => (p.transform.to_string(), p.setting.to_string(), String::new()),
            PresetKey::Pair(a, b) => (a.transform.to_string(), a.setting.to_string(), b.to_string()),
        }
    }
}

/// Parses `Transform(S)` or `Transform:S`.
pub fn parse_preset_label(label: &str) -> Result<PresetId> {
    let label = label.trim();
    if let Some(open) = label.find('(') {
        let close = label
            .rfind(')')
            .ok_or_else(|| EchoError::validation(format!("unbalanced preset label '{label}'")))?;
        return PresetId::parse(&label[..open], &label[open + 1..close]);
    }
    if let Some((t, s)) = label.split_once(':') {
        return PresetId::parse(t, s);
    }
    Err(EchoError::validation(format!(
        "preset label '{label}' must look like Transform(S) or Transform:S"
    )))
}

impl fmt::Display for PresetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PresetKey::None => f.write_str("NONE"),
            PresetKey::Single(p) => write!(f, "{p}"),
            PresetKey::Pair(a, b) => write!(f, "{a}+{b}"),
        }
    }
}

impl FromStr for PresetKey {
    type Err = EchoError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("none") {
            return Ok(PresetKey::None);
        }
        match s.split_once('+') {
            Some((a, b)) => Ok(PresetKey::pair(parse_preset_label(a)?, parse_preset_label(b)?)),
            None => Ok(PresetKey::Single(parse_preset_label(s)?)),
        }
    }
}

/// One training run evaluated on one cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub preset: PresetKey,
    pub cell: CellId,
    pub run_idx: u32,
    pub dice: f64,
    pub iou: f64,
}

impl RunRecord {
    pub const MAX_RUNS: u32 = 3;

    pub fn validate(&self) -> Result<()> {
        if self.run_idx >= Self::MAX_RUNS {
            return Err(EchoError::validation(format!(
                "run_idx {} outside 0..={}",
                self.run_idx,
                Self::MAX_RUNS - 1
            )));
        }
        let in_unit = |v: f64| (0.0..=1.0).contains(&v);
        if !in_unit(self.dice) || !in_unit(self.iou) {
            return Err(EchoError::validation(format!(
                "{} {} run {}: dice/iou must lie in [0, 1]",
                self.preset, self.cell, self.run_idx
            )));
        }
        // Mean-of-batch metrics can break the pixelwise identity slightly,
        // but IoU can never exceed Dice.
        if self.iou > self.dice + 1e-9 {
            return Err(EchoError::validation(format!(
                "{} {} run {}: iou {} exceeds dice {}",
                self.preset, self.cell, self.run_idx, self.iou, self.dice
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Metric {
    #[default]
    Dice,
    Iou,
}

impl FromStr for Metric {
    type Err = EchoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dice" => Ok(Metric::Dice),
            "iou" => Ok(Metric::Iou),
            _ => Err(EchoError::validation(format!("unknown metric '{s}'"))),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Dice => "dice",
            Metric::Iou => "iou",
        })
    }
}

pub const SIGNIFICANCE_LEVEL: f64 = 0.05;

/// Aggregated result for one (preset, cell) under one metric.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateCell {
    pub mean: f64,
    /// Absent when the table was loaded from published means and flags.
    pub p_value: Option<f64>,
    pub significant: bool,
    pub delta_vs_none: f64,
}

/// One row of the phase-one selection report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionRow {
    pub preset: PresetKey,
    pub sig05_count: usize,
    pub delta_dice_score: usize,
    pub row_mean: f64,
    pub selected_by_significance: bool,
    pub selected_by_topk: bool,
}

impl SelectionRow {
    pub fn selected(&self) -> bool {
        self.selected_by_significance || self.selected_by_topk
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub rows: Vec<SelectionRow>,
}

impl SelectionReport {
    /// Union of both criteria, in report order.
    pub fn selected(&self) -> Vec<PresetKey> {
        self.rows.iter().filter(|r| r.selected()).map(|r| r.preset).collect()
    }

    pub fn row(&self, key: &PresetKey) -> Option<&SelectionRow> {
        self.rows.iter().find(|r| &r.preset == key)
    }
}

/// Intensity statistics over the nonzero pixels of one image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageStatsRecord {
    pub mean_brightness: f64,
    pub median_brightness: f64,
    pub std_contrast: f64,
    pub robust_contrast_5_95: f64,
    pub skewness: f64,
    pub kurtosis_excess: f64,
    pub dynamic_range: f64,
    pub lv_core_brightness: Option<f64>,
    pub lv_core_contrast: Option<f64>,
}

impl ImageStatsRecord {
    pub const FIELDS: [&'static str; 9] = [
        "mean_brightness",
        "median_brightness",
        "std_contrast",
        "robust_contrast_5_95",
        "skewness",
        "kurtosis_excess",
        "dynamic_range",
        "lv_core_brightness",
        "lv_core_contrast",
    ];

    pub fn values(&self) -> [Option<f64>; 9] {
        [
            Some(self.mean_brightness),
            Some(self.median_brightness),
            Some(self.std_contrast),
            Some(self.robust_contrast_5_95),
            Some(self.skewness),
            Some(self.kurtosis_excess),
            Some(self.dynamic_range),
            self.lv_core_brightness,
            self.lv_core_contrast,
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Setting, TransformKind};

    #[test]
    fn nine_cells_three_in_domain() {
        let cells = CellId::paper_cells();
        assert_eq!(cells.len(), 9);
        let in_domain: Vec<String> = cells.iter().filter(|c| c.is_in_domain()).map(|c| c.to_string()).collect();
        assert_eq!(in_domain, ["Unity_CS", "CA_CA", "ED_ED"]);
    }

    #[test]
    fn paper_labels_are_checked() {
        assert!(CellId::new("Unity", "Unity", LabelPolicy::Paper).is_err());
        assert!(CellId::new("CS", "CA", LabelPolicy::Paper).is_err());
        let c = CellId::new("camus", "EchoNet", LabelPolicy::Paper).unwrap();
        assert_eq!(c.to_string(), "CA_ED");
        assert!(CellId::new("siteA", "siteB", LabelPolicy::Free).is_ok());
    }

    #[test]
    fn preset_key_parsing() {
        let key = PresetKey::from_columns("Affine", "L", Some("RandomHorizontalFlip(L)")).unwrap();
        let flip = PresetId::new(TransformKind::HorizontalFlip, Setting::L);
        let affine = PresetId::new(TransformKind::Affine, Setting::L);
        assert_eq!(key, PresetKey::Pair(affine, flip));
        assert_eq!(key.to_string(), "Affine(L)+HorizontalFlip(L)");
        assert_eq!(key.to_string().parse::<PresetKey>().unwrap(), key);
        assert!(PresetKey::from_columns("Affine", "L", Some("Affine:H")).is_err());
        assert_eq!(PresetKey::from_columns("NONE", "NONE", None).unwrap(), PresetKey::None);
    }

    #[test]
    fn run_record_range_checks() {
        let cell = CellId::new("CA", "CA", LabelPolicy::Paper).unwrap();
        let mut r = RunRecord { preset: PresetKey::None, cell, run_idx: 0, dice: 0.8, iou: 0.6 };
        assert!(r.validate().is_ok());
        r.iou = 0.9;
        assert!(r.validate().is_err());
        r.iou = 0.6;
        r.run_idx = 3;
        assert!(r.validate().is_err());
    }
}
