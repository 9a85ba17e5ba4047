use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use softecm::manifest::RunManifest;

fn softecm(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_softecm"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn softecm")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn generate_diamond_writes_twelve_rows() {
    let dir = tempfile::tempdir().unwrap();
    let o = softecm(
        dir.path(),
        &["generate", "diamond", "--out", "d.csv", "--labels", "l.txt"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("d.csv")).unwrap();
    assert_eq!(text.lines().count(), 12);
    assert!(String::from_utf8_lossy(&o.stdout).contains("12"));
    let labels = std::fs::read_to_string(dir.path().join("l.txt")).unwrap();
    assert_eq!(labels.lines().count(), 12);
}

#[test]
fn generate_cbf_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "generate",
        "cbf",
        "--per-class",
        "50",
        "--length",
        "128",
        "--seed",
        "4",
    ];
    let a = softecm(dir.path(), &[&args[..], &["--out", "a.jsonl"]].concat());
    let b = softecm(dir.path(), &[&args[..], &["--out", "b.jsonl"]].concat());
    assert_eq!((code(&a), code(&b)), (0, 0));
    let a = std::fs::read(dir.path().join("a.jsonl")).unwrap();
    let b = std::fs::read(dir.path().join("b.jsonl")).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.iter().filter(|&&c| c == b'\n').count(), 150);
}

#[test]
fn generate_rejects_bad_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let o = softecm(
        dir.path(),
        &["generate", "cbf", "--length", "2", "--out", "x.jsonl"],
    );
    assert_eq!(code(&o), 2);
    let o = softecm(dir.path(), &["generate", "spiral", "--out", "x.csv"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn diamond_fit_marks_the_outlier() {
    let dir = tempfile::tempdir().unwrap();
    softecm(dir.path(), &["generate", "diamond", "--out", "d.csv"]);
    let o = softecm(
        dir.path(),
        &[
            "fit",
            "--data",
            "d.csv",
            "--clusters",
            "2",
            "--alpha",
            "0.1666666667",
            "--beta",
            "2",
            "--delta",
            "11",
            "--lambda",
            "1.5",
            "--restarts",
            "10",
            "--out-dir",
            "out",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let out = dir.path().join("out");
    for f in [
        "masses.csv",
        "summary.json",
        "prototypes.json",
        "manifest.json",
    ] {
        assert!(out.join(f).exists(), "{f}");
    }
    let s = json(&out.join("summary.json"));
    assert_eq!(s["argmax_focal"][11], "{}");
    assert_eq!(s["converged"], true);
    let nstar = s["normalized_specificity"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&nstar));
    let p = json(&out.join("prototypes.json"));
    assert!(p.get("{1,2}").is_some());
    let m = RunManifest::load(&out.join("manifest.json")).unwrap();
    assert!(m.verify().unwrap());
    assert_eq!(m.inputs.len(), 1);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 1);
}

#[test]
fn ecm_and_softecm_recover_blobs() {
    let dir = tempfile::tempdir().unwrap();
    softecm(
        dir.path(),
        &[
            "generate",
            "blobs",
            "--per-class",
            "20",
            "--out",
            "b.csv",
            "--labels",
            "l.txt",
        ],
    );
    for algo in ["ecm", "softecm"] {
        let o = softecm(
            dir.path(),
            &[
                "fit",
                "--algo",
                algo,
                "--data",
                "b.csv",
                "--labels",
                "l.txt",
                "-c",
                "3",
                "--lambda",
                "10",
                "--out-dir",
                algo,
            ],
        );
        assert_eq!(
            code(&o),
            0,
            "{algo}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        let s = json(&dir.path().join(algo).join("summary.json"));
        assert_eq!(s["rand_index"], 1.0, "{algo}");
        assert_eq!(s["accuracy"], 1.0, "{algo}");
    }
}

#[test]
fn fit_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    softecm(dir.path(), &["generate", "blobs", "--out", "b.csv"]);
    for out in ["r1", "r2"] {
        let o = softecm(
            dir.path(),
            &[
                "fit",
                "--data",
                "b.csv",
                "-c",
                "3",
                "--seed",
                "5",
                "--out-dir",
                out,
            ],
        );
        assert_eq!(code(&o), 0);
    }
    for f in ["masses.csv", "summary.json", "prototypes.json"] {
        assert_eq!(
            std::fs::read(dir.path().join("r1").join(f)).unwrap(),
            std::fs::read(dir.path().join("r2").join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn fit_validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    softecm(dir.path(), &["generate", "diamond", "--out", "d.csv"]);
    let too_many = softecm(dir.path(), &["fit", "--data", "d.csv", "-c", "13"]);
    assert_eq!(code(&too_many), 2);
    let ecm_dtw = softecm(
        dir.path(),
        &[
            "fit", "--algo", "ecm", "--data", "d.csv", "-c", "2", "--metric", "softdtw",
        ],
    );
    assert_eq!(code(&ecm_dtw), 2);
    let bad_beta = softecm(
        dir.path(),
        &["fit", "--data", "d.csv", "-c", "2", "--beta", "1"],
    );
    assert_eq!(code(&bad_beta), 2);
    let missing = softecm(dir.path(), &["fit", "--data", "nope.csv", "-c", "2"]);
    assert_eq!(code(&missing), 2);
    std::fs::write(dir.path().join("ragged.csv"), "1,2\n3\n").unwrap();
    let ragged = softecm(dir.path(), &["fit", "--data", "ragged.csv", "-c", "2"]);
    assert_eq!(code(&ragged), 2);
    assert!(
        String::from_utf8_lossy(&ragged.stderr).contains("row 2"),
        "{}",
        String::from_utf8_lossy(&ragged.stderr)
    );
}

#[test]
fn iteration_cap_exits_3_and_still_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    softecm(dir.path(), &["generate", "blobs", "--out", "b.csv"]);
    let o = softecm(
        dir.path(),
        &[
            "fit",
            "--data",
            "b.csv",
            "-c",
            "3",
            "--max-outer",
            "1",
            "--out-dir",
            "out",
        ],
    );
    assert_eq!(code(&o), 3);
    let s = json(&dir.path().join("out/summary.json"));
    assert_eq!(s["converged"], false);
    assert!(dir.path().join("out/masses.csv").exists());
}

#[test]
fn time_series_fit_with_soft_dtw() {
    let dir = tempfile::tempdir().unwrap();
    softecm(
        dir.path(),
        &[
            "generate",
            "cbf",
            "--per-class",
            "4",
            "--length",
            "16",
            "--out",
            "c.jsonl",
        ],
    );
    let o = softecm(
        dir.path(),
        &[
            "fit",
            "--data",
            "c.jsonl",
            "-c",
            "3",
            "--metric",
            "softdtw:0.5",
            "--max-inner",
            "20",
            "--out-dir",
            "out",
        ],
    );
    assert!(
        matches!(code(&o), 0 | 3),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let s = json(&dir.path().join("out/summary.json"));
    assert_eq!(s["config"]["metric"], "softdtw:0.5");
    assert!(s["rand_index"].as_f64().is_some());
}

#[test]
fn sweep_writes_table_and_best_cell() {
    let dir = tempfile::tempdir().unwrap();
    softecm(
        dir.path(),
        &["generate", "blobs", "--per-class", "8", "--out", "b.csv"],
    );
    let o = softecm(
        dir.path(),
        &[
            "sweep",
            "--data",
            "b.csv",
            "-c",
            "3",
            "--betas",
            "1.5,2.0",
            "--lambdas",
            "1,2",
            "--runs",
            "2",
            "--threads",
            "2",
            "--out-dir",
            "sw",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(dir.path().join("sw/sweep.csv")).unwrap();
    let rows: Vec<&str> = table.lines().skip(1).collect();
    assert_eq!(rows.len(), 4);
    for r in rows {
        let mean: f64 = r.split(',').nth(2).unwrap().parse().unwrap();
        assert!((0.0..=1.0).contains(&mean));
    }
    let best = json(&dir.path().join("sw/best.json"));
    assert!(best["mean_nstar"].as_f64().is_some());

    let single = softecm(
        dir.path(),
        &[
            "sweep",
            "--data",
            "b.csv",
            "-c",
            "3",
            "--betas",
            "2",
            "--lambdas",
            "1",
            "--runs",
            "1",
            "--out-dir",
            "one",
        ],
    );
    assert_eq!(code(&single), 0);
    let table = std::fs::read_to_string(dir.path().join("one/sweep.csv")).unwrap();
    assert_eq!(table.lines().count(), 2);
}

#[test]
fn sweep_with_every_cell_failing_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("huge.csv"),
        "1.5e308,0\n-1.5e308,0\n1.5e308,1\n-1.5e308,1\n",
    )
    .unwrap();
    let o = softecm(
        dir.path(),
        &[
            "sweep",
            "--data",
            "huge.csv",
            "-c",
            "2",
            "--betas",
            "2",
            "--lambdas",
            "1",
            "--runs",
            "1",
            "--out-dir",
            "sw",
        ],
    );
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn eval_scores_mass_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("l.txt"), "0\n0\n1\n1\n").unwrap();
    std::fs::write(
        dir.path().join("pure.csv"),
        "{},{1},{2},\"{1,2}\"\n0,1,0,0\n0,1,0,0\n0,0,1,0\n0,0,1,0\n",
    )
    .unwrap();
    let o = softecm(
        dir.path(),
        &[
            "eval", "--masses", "pure.csv", "--labels", "l.txt", "--out", "m.json",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let m = json(&dir.path().join("m.json"));
    assert_eq!(m["accuracy"], 1.0);
    assert_eq!(m["rand_index"], 1.0);
    assert_eq!(m["normalized_specificity"], 0.0);

    std::fs::write(
        dir.path().join("omega.csv"),
        "{},{1},{2},\"{1,2}\"\n0,0,0,1\n0,0,0,1\n0,0,0,1\n0,0,0,1\n",
    )
    .unwrap();
    softecm(
        dir.path(),
        &[
            "eval",
            "--masses",
            "omega.csv",
            "--labels",
            "l.txt",
            "--out",
            "o.json",
        ],
    );
    assert_eq!(
        json(&dir.path().join("o.json"))["normalized_specificity"],
        1.0
    );

    std::fs::write(dir.path().join("short.txt"), "0\n1\n").unwrap();
    let o = softecm(
        dir.path(),
        &["eval", "--masses", "pure.csv", "--labels", "short.txt"],
    );
    assert_eq!(code(&o), 2);
}

#[test]
fn help_documents_the_paper_flags() {
    let dir = tempfile::tempdir().unwrap();
    let o = softecm(dir.path(), &["fit", "--help"]);
    assert_eq!(code(&o), 0);
    let help = String::from_utf8_lossy(&o.stdout);
    for flag in [
        "--alpha",
        "--beta",
        "--delta",
        "--lambda",
        "--rho",
        "--epsilon",
        "--xi",
        "--max-card",
        "--clusters",
        "--metric",
        "--seed",
    ] {
        assert!(help.contains(flag), "{flag}");
    }
    let o = softecm(dir.path(), &["sweep", "--help"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("SOFTECM_THREADS"));
}
