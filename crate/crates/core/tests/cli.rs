mod common;

use std::path::Path;
use std::process::{Command, Output};

use common::*;
use echoaug::io;
use echoaug::model::*;

fn echoaug(args: &[&str], paths: &[&Path]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_echoaug"));
    cmd.args(args);
    for p in paths {
        cmd.arg(p);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_echoaug")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_reproduces_the_selection_from_published_cells() {
    let out = tempfile::tempdir().unwrap();
    let fixture = fixture("table3_dice_cells.csv");
    let res = run(&["analyze", "--runs", s(&fixture), "--out-dir", s(out.path())]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    for f in ["aggregate.csv", "selection.csv", "heatmap_raw.csv", "heatmap_delta.csv", "no_harm.csv", "spearman.csv"] {
        assert!(out.path().join(f).is_file(), "{f}");
    }

    let selection = std::fs::read_to_string(out.path().join("selection.csv")).unwrap();
    let selected = io::parse_selection_csv(&selection).unwrap();
    for label in ["Affine(H)", "ShiftScaleRotate(C1)", "GridDistortion(C3)", "Perspective(C1)"] {
        let PresetKey::Single(id) = key(label) else { unreachable!() };
        assert!(selected.contains(&id), "{label} missing from {selected:?}");
    }
    let affine = selection.lines().find(|l| l.starts_with("Affine,H,")).unwrap();
    assert!(affine.contains(",8,9,"), "{affine}");

    let aggregate = std::fs::read_to_string(out.path().join("aggregate.csv")).unwrap();
    assert_eq!(aggregate.lines().count(), 1 + 30 * 9);
    let row = aggregate.lines().find(|l| l.starts_with("Affine,H,") && l.contains(",Unity,CA,")).unwrap();
    let delta: f64 = row.split(',').nth(6).unwrap().parse().unwrap();
    assert!((delta - 0.0930).abs() < 5e-5, "{row}");

    let heat = std::fs::read_to_string(out.path().join("heatmap_raw.csv")).unwrap();
    assert_eq!(heat.lines().next().unwrap().split(',').count(), 10);
}

#[test]
fn pairs_follow_the_selection() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = fixture("table3_dice_cells.csv");
    assert!(run(&["analyze", "--runs", s(&fixture), "--out-dir", s(dir.path())]).status.success());
    let plan = dir.path().join("pairs.json");
    let res = run(&["pairs", "--selection", s(&dir.path().join("selection.csv")), "--out", s(&plan)]);
    assert!(res.status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&plan).unwrap()).unwrap();

    let selected = io::parse_selection_csv(&std::fs::read_to_string(dir.path().join("selection.csv")).unwrap()).unwrap();
    let n = selected.len();
    let mut same = 0;
    for i in 0..n {
        for j in i + 1..n {
            same += usize::from(selected[i].transform == selected[j].transform);
        }
    }
    assert_eq!(doc["count"].as_u64().unwrap() as usize, n * (n - 1) / 2 - same);
    assert_eq!(doc["pairs"].as_array().unwrap().len(), doc["count"].as_u64().unwrap() as usize);
}

fn runs_table(with_baseline: bool) -> String {
    let mut rng = TestRng::new(61);
    let mut runs = Vec::new();
    let labels: &[&str] = if with_baseline { &["NONE", "Affine(H)"] } else { &["Affine(H)"] };
    for label in labels {
        for cell in CellId::paper_cells() {
            for run_idx in 0..3 {
                let dice = 0.6 + 0.3 * rng.unit();
                runs.push(RunRecord { preset: key(label), cell: cell.clone(), run_idx, dice, iou: dice / (2.0 - dice) });
            }
        }
    }
    io::write_runs_csv(&runs).unwrap()
}

#[test]
fn analyze_accepts_per_run_tables() {
    let dir = tempfile::tempdir().unwrap();
    let runs = dir.path().join("runs.csv");
    std::fs::write(&runs, runs_table(true)).unwrap();
    let res = echoaug(&["analyze", "--runs"], &[&runs, Path::new("--out-dir"), dir.path()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let aggregate = std::fs::read_to_string(dir.path().join("aggregate.csv")).unwrap();
    assert_eq!(aggregate.lines().count(), 1 + 2 * 9);
    let none_row = aggregate.lines().find(|l| l.starts_with("NONE,")).unwrap();
    assert!(none_row.ends_with(",false"), "{none_row}");
}

#[test]
fn analyze_without_baseline_fails_with_validation_code() {
    let dir = tempfile::tempdir().unwrap();
    let runs = dir.path().join("runs.csv");
    std::fs::write(&runs, runs_table(false)).unwrap();
    let res = echoaug(&["analyze", "--runs"], &[&runs, Path::new("--out-dir"), dir.path()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("baseline missing"));
    assert!(!dir.path().join("selection.csv").exists());
}

#[test]
fn missing_input_is_an_io_failure() {
    let dir = tempfile::tempdir().unwrap();
    let res = echoaug(&["analyze", "--runs"], &[&dir.path().join("absent.csv"), Path::new("--out-dir"), dir.path()]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["analyze"]).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

fn small_dataset(dir: &Path, n: usize) {
    let mut rng = TestRng::new(62);
    for i in 0..n {
        let s = random_sample(&mut rng, 40, 32);
        let name = format!("{i:02}.png");
        io::save_gray_png(&dir.join("images").join(&name), &s.image).unwrap();
        io::save_mask_png(&dir.join("masks").join(&name), &s.lv_mask).unwrap();
    }
}

#[test]
fn augment_rejects_unknown_presets_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    small_dataset(&dir.path().join("in"), 2);
    let spec = dir.path().join("p.json");
    std::fs::write(&spec, r#"{"stages":[{"transform":"Affine","setting":"C9"}]}"#).unwrap();
    let out = dir.path().join("out");
    let res = echoaug(&["augment", "--pipeline"], &[&spec, Path::new("--input"), &dir.path().join("in"), Path::new("--output"), &out]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!out.join("manifest.json").exists());
}

#[test]
fn augment_writes_manifest_and_respects_output_size() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    small_dataset(&input, 4);
    let spec = dir.path().join("p.json");
    std::fs::write(&spec, r#"{"stages":[{"transform":"GaussianShadow","setting":"L"},{"transform":"HorizontalFlip","setting":"L"}],"seed":5}"#).unwrap();
    let out = dir.path().join("out");
    let res = echoaug(
        &["augment", "--output-size", "0", "--pipeline"],
        &[&spec, Path::new("--input"), &input, Path::new("--output"), &out],
    );
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let manifest: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["files"].as_array().unwrap().len(), 4);
    assert_eq!(manifest["seed"], 5);
    let img = io::load_gray_png(&out.join("images").join("00.png")).unwrap();
    assert_eq!(img.dims(), (40, 32));
    let mask = io::load_mask_png(&out.join("masks").join("00.png")).unwrap();
    assert_eq!(mask.dims(), (40, 32));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    small_dataset(&input, 6);
    let spec = dir.path().join("p.json");
    std::fs::write(&spec, r#"{"stages":[{"transform":"ElasticTransform","setting":"H"},{"transform":"SaltAndPepper","setting":"H"}],"seed":1,"output_size":24}"#).unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("out{threads}"));
        let res = Command::new(env!("CARGO_BIN_EXE_echoaug"))
            .env("ECHOAUG_THREADS", threads)
            .args(["augment", "--pipeline", s(&spec), "--input", s(&input), "--output", s(&out)])
            .output()
            .unwrap();
        assert!(res.status.success());
        let files: Vec<Vec<u8>> = (0..6)
            .flat_map(|i| ["images", "masks"].map(|d| std::fs::read(out.join(d).join(format!("{i:02}.png"))).unwrap()))
            .collect();
        outputs.push(files);
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn fanmask_stats_and_metrics_commands() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in");
    small_dataset(&input, 3);
    let fans = dir.path().join("fans");
    assert!(run(&["fanmask", "--input", s(&input.join("images")), "--output", s(&fans)]).status.success());
    assert_eq!(io::list_pngs(&fans).unwrap().len(), 3);

    let stats = dir.path().join("stats.csv");
    let res = run(&["stats", "--input", s(&input.join("images")), "--masks", s(&input.join("masks")), "--out", s(&stats)]);
    assert!(res.status.success());
    let text = std::fs::read_to_string(&stats).unwrap();
    assert_eq!(text.lines().count(), 1 + 3 + 1);
    assert!(text.lines().next().unwrap().starts_with("file,mean_brightness"));
    assert!(text.lines().last().unwrap().starts_with("MEAN,"));

    let scores = dir.path().join("metrics.csv");
    let res = run(&["metrics", "--pred", s(&input.join("masks")), "--truth", s(&input.join("masks")), "--out", s(&scores)]);
    assert!(res.status.success());
    let text = std::fs::read_to_string(&scores).unwrap();
    for line in text.lines().skip(1) {
        assert!(line.ends_with(",1.0,1.0"), "{line}");
    }
}

#[test]
fn registry_export_lists_every_preset() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("registry.json");
    assert!(run(&["registry", "--out", s(&path)]).status.success());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["presets"].as_array().unwrap().len(), 94);
}
