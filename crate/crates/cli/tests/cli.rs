use std::path::Path;
use std::process::{Command, Output};

fn lesionseg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lesionseg")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn synth(dir: &Path, count: usize) {
    let d = dir.to_str().unwrap();
    let out = lesionseg(&["synth", "--out", d, "--count", &count.to_string(), "--size", "96", "--seed", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(code(&lesionseg(&["--help"])), 0);
    assert_eq!(code(&lesionseg(&["--version"])), 0);
    assert_eq!(code(&lesionseg(&["batch", "--help"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&lesionseg(&[])), 1);
    assert_eq!(code(&lesionseg(&["segment", "--input", "x.png"])), 1);
    assert_eq!(code(&lesionseg(&["frobnicate"])), 1);
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = lesionseg(&["batch", "--images", d, "--ground-truth", d, "--report", "r.csv", "--workers", "0"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn invalid_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), 1);
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"tau_low": 0.9, "tau_high": 0.1}"#).unwrap();
    let img = dir.path().join("SYN_0000000.png");
    let out = lesionseg(&[
        "segment",
        "--input",
        img.to_str().unwrap(),
        "--out-mask",
        dir.path().join("m.png").to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    std::fs::write(&cfg, r#"{"no_such_field": 1}"#).unwrap();
    let out = lesionseg(&[
        "segment",
        "--input",
        img.to_str().unwrap(),
        "--out-mask",
        dir.path().join("m.png").to_str().unwrap(),
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn missing_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = lesionseg(&[
        "segment",
        "--input",
        "/nonexistent/image.png",
        "--out-mask",
        dir.path().join("m.png").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    let empty = dir.path().to_str().unwrap();
    let out = lesionseg(&["batch", "--images", empty, "--ground-truth", empty, "--report", "r.csv"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn segment_writes_mask_and_overlay() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), 1);
    let mask = dir.path().join("out/mask.png");
    let overlay = dir.path().join("overlay.png");
    std::fs::create_dir_all(mask.parent().unwrap()).unwrap();
    let out = lesionseg(&[
        "segment",
        "--input",
        dir.path().join("SYN_0000000.png").to_str().unwrap(),
        "--out-mask",
        mask.to_str().unwrap(),
        "--out-overlay",
        overlay.to_str().unwrap(),
        "--seed",
        "3",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let m = image::open(&mask).unwrap();
    assert_eq!(m.color(), image::ColorType::L8);
    let m = m.to_luma8();
    assert!(m.pixels().all(|p| p[0] == 0 || p[0] == 255));
    assert!(m.pixels().any(|p| p[0] == 255));
    assert_eq!(image::open(&overlay).unwrap().to_rgb8().dimensions(), (96, 96));
}

#[test]
fn batch_reports_are_identical_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), 4);
    let d = dir.path().to_str().unwrap();
    let mut reports = Vec::new();
    for workers in ["1", "4"] {
        let report = dir.path().join(format!("r{workers}.csv"));
        let out = lesionseg(&[
            "batch",
            "--images",
            d,
            "--ground-truth",
            d,
            "--report",
            report.to_str().unwrap(),
            "--workers",
            workers,
            "--omit-timing",
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        reports.push(std::fs::read_to_string(&report).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let lines: Vec<_> = reports[0].lines().collect();
    assert_eq!(lines[0], "image_id,jaccard,tp,fp,fn,tn,init_mode,iterations,runtime_ms");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("SYN_0000000,"));
    assert!(lines[1].ends_with(','));
    assert!(dir.path().join("r1.summary.json").is_file());
}

#[test]
fn batch_limit_and_mask_output() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), 3);
    let d = dir.path().to_str().unwrap();
    let masks = dir.path().join("pred");
    let report = dir.path().join("r.csv");
    let out = lesionseg(&[
        "batch",
        "--images",
        d,
        "--ground-truth",
        d,
        "--report",
        report.to_str().unwrap(),
        "--limit",
        "2",
        "--out-masks",
        masks.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(std::fs::read_to_string(&report).unwrap().lines().count(), 3);
    assert!(masks.join("SYN_0000001.png").is_file());
    assert!(!masks.join("SYN_0000002.png").exists());
    let summary = std::fs::read_to_string(dir.path().join("r.summary.json")).unwrap();
    assert!(summary.contains("\"images_available\": 3"));

    // the written masks score identically through `eval`
    let eval_report = dir.path().join("eval.csv");
    let out = lesionseg(&[
        "eval",
        "--pred",
        masks.to_str().unwrap(),
        "--ground-truth",
        d,
        "--report",
        eval_report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let jc = |p: &Path| -> Vec<String> {
        std::fs::read_to_string(p)
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').take(6).collect::<Vec<_>>().join(","))
            .collect()
    };
    assert_eq!(jc(&report), jc(&eval_report));
}

#[test]
fn all_images_failing_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    synth(dir.path(), 2);
    // replace every ground truth with one of the wrong size
    let tiny = image::GrayImage::new(5, 5);
    for i in 0..2 {
        tiny.save(dir.path().join(format!("SYN_{i:07}_segmentation.png"))).unwrap();
    }
    let d = dir.path().to_str().unwrap();
    let report = dir.path().join("r.csv");
    let out = lesionseg(&["batch", "--images", d, "--ground-truth", d, "--report", report.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension mismatch"));
}
