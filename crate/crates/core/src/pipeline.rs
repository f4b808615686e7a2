//! Pipeline specs, pairwise plans, and dataset materialization.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{EchoError, Result};
use crate::fan_mask;
use crate::imgops;
use crate::io;
use crate::model::*;
use crate::registry::PresetRegistry;
use crate::rng::RngStream;
use crate::transforms::{self, ApplyOptions};

pub const DEFAULT_OUTPUT_SIZE: usize = 512;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "ECHOAUG_THREADS";

fn default_output_size() -> Option<usize> {
    Some(DEFAULT_OUTPUT_SIZE)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageSpec {
    pub transform: String,
    pub setting: String,
    /// Merged over the preset: `probability` replaces the gate probability,
    /// every other key replaces (or deep-merges into) the parameter field of that name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub overrides: Option<Value>,
}

impl StageSpec {
    pub fn new(id: PresetId) -> Self {
        Self {
            transform: id.transform.to_string(),
            setting: id.setting.to_string(),
            overrides: None,
        }
    }
}

/// JSON-facing pipeline description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineSpec {
    #[serde(default)]
    pub stages: Vec<StageSpec>,
    #[serde(default)]
    pub seed: u64,
    /// Square output side; `null` keeps the input size.
    #[serde(default = "default_output_size")]
    pub output_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub image_interp: Option<Interp>,
}

impl PipelineSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_presets(ids: &[PresetId], seed: u64) -> Self {
        Self {
            stages: ids.iter().map(|&id| StageSpec::new(id)).collect(),
            seed,
            output_size: default_output_size(),
            image_interp: None,
        }
    }
}

fn merge(base: &mut Value, patch: &Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k.clone(), v.clone());
                    }
                }
            }
        }
        (slot, v) => *slot = v.clone(),
    }
}

/// Applies a stage's overrides to a registry preset.
pub fn resolve_stage(stage: &StageSpec, registry: &PresetRegistry) -> Result<AugPreset> {
    let mut preset = registry.lookup_names(&stage.transform, &stage.setting)?.clone();
    let Some(overrides) = &stage.overrides else {
        return Ok(preset);
    };
    let Value::Object(map) = overrides else {
        return Err(EchoError::validation(format!("overrides for {} must be a JSON object", preset.id())));
    };
    let mut param_patch = serde_json::Map::new();
    for (k, v) in map {
        if k == "probability" {
            preset.probability = v
                .as_f64()
                .ok_or_else(|| EchoError::validation("override 'probability' must be a number"))?;
        } else {
            param_patch.insert(k.clone(), v.clone());
        }
    }
    if !param_patch.is_empty() {
        let mut value = serde_json::to_value(preset.params)?;
        let inner = value
            .get_mut(preset.transform.name())
            .ok_or_else(|| EchoError::validation("parameter record has an unexpected layout"))?;
        if let Value::Object(fields) = &*inner {
            if let Some(unknown) = param_patch.keys().find(|k| !fields.contains_key(*k)) {
                return Err(EchoError::validation(format!(
                    "{} has no parameter '{unknown}'",
                    preset.transform
                )));
            }
        }
        merge(inner, &Value::Object(param_patch));
        preset.params = serde_json::from_value(value)
            .map_err(|e| EchoError::validation(format!("override for {} rejected: {e}", preset.id())))?;
    }
    preset.validate()?;
    Ok(preset)
}

/// A spec resolved against the registry, ready to run.
#[derive(Clone, Debug, PartialEq)]
pub struct Pipeline {
    pub stages: Vec<AugPreset>,
    pub seed: u64,
    pub output_size: Option<usize>,
    pub options: ApplyOptions,
}

impl Pipeline {
    pub fn from_spec(spec: &PipelineSpec, registry: &PresetRegistry) -> Result<Self> {
        if spec.output_size == Some(0) {
            return Err(EchoError::validation("output_size must be positive"));
        }
        Ok(Self {
            stages: spec
                .stages
                .iter()
                .map(|s| resolve_stage(s, registry))
                .collect::<Result<_>>()?,
            seed: spec.seed,
            output_size: spec.output_size,
            options: ApplyOptions { image_interp: spec.image_interp },
        })
    }

    pub fn needs_fan(&self) -> bool {
        self.stages.iter().any(|s| s.transform.requires_fan())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Runs the stages in order; stage `i` draws from `RngStream(seed, sample_index, i)`.
/// The result is resized to `output_size` when set.
pub fn apply_pipeline(pipeline: &Pipeline, sample: &Sample, sample_index: u64) -> Result<Sample> {
    let mut current = sample.clone();
    for (i, preset) in pipeline.stages.iter().enumerate() {
        let mut rng = RngStream::derive(pipeline.seed, sample_index, i as u64);
        current = transforms::apply_with(&current, preset, &mut rng, &pipeline.options)?;
    }
    if let Some(size) = pipeline.output_size {
        if current.dims() != (size, size) {
            let interp = pipeline.options.image_interp.unwrap_or(Interp::Linear);
            current = imgops::resize_sample(&current, size, size, interp);
        }
    }
    Ok(current)
}

/// Every unordered pair of presets with different transforms, in canonical order.
/// Duplicate presets are collapsed first.
pub fn build_pairwise_plan(selected: &[AugPreset]) -> Vec<(AugPreset, AugPreset)> {
    let mut unique: Vec<&AugPreset> = selected.iter().collect();
    unique.sort_by_key(|p| p.id());
    unique.dedup_by_key(|p| p.id());
    let mut plan = Vec::new();
    for (i, a) in unique.iter().enumerate() {
        for b in &unique[i + 1..] {
            if a.transform != b.transform {
                plan.push(((*a).clone(), (*b).clone()));
            }
        }
    }
    plan
}

/// Same as [`build_pairwise_plan`] on preset ids.
pub fn pair_ids(selected: &[PresetId]) -> Vec<(PresetId, PresetId)> {
    let mut unique = selected.to_vec();
    unique.sort();
    unique.dedup();
    let mut plan = Vec::new();
    for (i, &a) in unique.iter().enumerate() {
        for &b in &unique[i + 1..] {
            if a.transform != b.transform {
                plan.push((a, b));
            }
        }
    }
    plan
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairEntry {
    pub key: String,
    pub stages: Vec<StageSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairPlanDocument {
    pub count: usize,
    pub pairs: Vec<PairEntry>,
}

pub fn pair_plan_document(selected: &[PresetId]) -> PairPlanDocument {
    let pairs: Vec<PairEntry> = pair_ids(selected)
        .into_iter()
        .map(|(a, b)| PairEntry {
            key: PresetKey::pair(a, b).to_string(),
            stages: vec![StageSpec::new(a), StageSpec::new(b)],
        })
        .collect();
    PairPlanDocument { count: pairs.len(), pairs }
}

/// Where a sample's fan mask came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FanSource {
    File,
    Extracted,
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub sample_index: u64,
    /// `[seed, sample_index, stage_index]` per stage.
    pub streams: Vec<[u64; 3]>,
    pub fan: FanSource,
    pub input_size: [usize; 2],
    pub output_size: [usize; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub spec: PipelineSpec,
    pub seed: u64,
    pub engine_version: String,
    pub files: Vec<ManifestEntry>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

/// Input layout: `images/*.png`, `masks/*.png` (same names), optional `fans/*.png`.
/// Output mirrors `images/` and `masks/` and adds `manifest.json`.
/// Fan-dependent stages without a fan file use the morphological extractor.
pub fn materialize_dataset(spec: &PipelineSpec, input_dir: &Path, output_dir: &Path, seed: u64) -> Result<Manifest> {
    let mut spec = spec.clone();
    spec.seed = seed;
    let pipeline = Pipeline::from_spec(&spec, PresetRegistry::builtin())?;
    let images = io::list_pngs(&input_dir.join("images"))?;
    let fan_dir = input_dir.join("fans");
    let has_fans = fan_dir.is_dir();

    let job = |(index, path): (usize, &PathBuf)| -> Result<ManifestEntry> {
        let name = io::file_name(path);
        let image = io::load_gray_png(path)?;
        let mask = io::load_mask_png(&input_dir.join("masks").join(&name))?;
        let fan_path = fan_dir.join(&name);
        let (fan, source) = if has_fans && fan_path.is_file() {
            (Some(io::load_mask_png(&fan_path)?), FanSource::File)
        } else if pipeline.needs_fan() {
            (Some(fan_mask::extract_fan_mask(&image)?), FanSource::Extracted)
        } else {
            (None, FanSource::None)
        };
        let input_size = [image.width(), image.height()];
        let sample = Sample::new(image, mask, fan)?;
        let out = apply_pipeline(&pipeline, &sample, index as u64)?;
        io::save_gray_png(&output_dir.join("images").join(&name), &out.image)?;
        io::save_mask_png(&output_dir.join("masks").join(&name), &out.lv_mask)?;
        Ok(ManifestEntry {
            file: name,
            sample_index: index as u64,
            streams: (0..pipeline.stages.len() as u64).map(|i| [seed, index as u64, i]).collect(),
            fan: source,
            input_size,
            output_size: [out.image.width(), out.image.height()],
        })
    };

    let files: Vec<ManifestEntry> = with_thread_cap(|| {
        images
            .par_iter()
            .enumerate()
            .map(job)
            .collect::<Result<Vec<_>>>()
    })?;

    let manifest = Manifest {
        spec,
        seed,
        engine_version: env!("CARGO_PKG_VERSION").to_string(),
        files,
    };
    let text = serde_json::to_string_pretty(&manifest)?;
    io::write_atomic(&output_dir.join(MANIFEST_NAME), text.as_bytes())?;
    Ok(manifest)
}

/// Runs `f` on a pool capped by `ECHOAUG_THREADS` when it is set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> T + Send) -> T {
    let cap = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0);
    match cap.and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}
