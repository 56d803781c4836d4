use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use gora_core::{
    align_pair, dtw_full, fastdtw, generate_template, warped_pair, write_csv, Signal, TemplateSpec,
};
use tempfile::TempDir;

fn gora(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gora"))
        .args(args)
        .output()
        .expect("failed to run gora")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Pair written to `a.csv` and `b.csv` in a fresh directory.
fn fixture(len: usize, seed: u64) -> (TempDir, Signal, Signal) {
    let dir = tempfile::tempdir().unwrap();
    let template = generate_template(&TemplateSpec::trajectory(len, seed)).unwrap();
    let (a, b) = warped_pair(&template, seed, 0.5).unwrap();
    write_csv(&a, dir.path().join("a.csv")).unwrap();
    write_csv(&b, dir.path().join("b.csv")).unwrap();
    (dir, a, b)
}

fn align_value(dir: &Path, first: &str, second: &str, extra: &[&str]) -> f64 {
    let a = dir.join(first);
    let b = dir.join(second);
    let mut args = vec!["align", path_str(&a), path_str(&b)];
    args.extend_from_slice(extra);
    let out = gora(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    stdout(&out).trim().parse().unwrap()
}

#[test]
fn self_alignment_is_zero() {
    let (dir, _, _) = fixture(60, 1);
    let g = align_value(dir.path(), "a.csv", "a.csv", &["--method", "gora"]);
    assert!(g.abs() <= 1e-12, "{g}");
    let a = dir.path().join("a.csv");
    let out = gora(&["align", path_str(&a), path_str(&a), "--method", "dtw"]);
    assert_eq!(stdout(&out), "0\n");
}

#[test]
fn printed_error_matches_library_bit_for_bit() {
    let (dir, a, b) = fixture(150, 7);
    let d = dir.path();
    let gora_err = align_value(d, "a.csv", "b.csv", &["--method", "gora"]);
    assert_eq!(
        gora_err.to_bits(),
        align_pair(&a, &b).unwrap().error.to_bits()
    );
    let dtw_err = align_value(d, "a.csv", "b.csv", &["--method", "dtw"]);
    assert_eq!(
        dtw_err.to_bits(),
        dtw_full(&a, &b).unwrap().normalized_error().to_bits()
    );
    let fast_err = align_value(
        d,
        "a.csv",
        "b.csv",
        &["--method", "fastdtw", "--radius", "5"],
    );
    assert_eq!(
        fast_err.to_bits(),
        fastdtw(&a, &b, 5).unwrap().normalized_error().to_bits()
    );
}

#[test]
fn fastdtw_without_radius_uses_one_with_notice() {
    let (dir, a, b) = fixture(80, 3);
    let (pa, pb) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let out = gora(&["align", path_str(&pa), path_str(&pb), "--method", "fastdtw"]);
    assert!(out.status.success());
    assert!(stderr(&out).contains("radius"));
    let printed: f64 = stdout(&out).trim().parse().unwrap();
    assert_eq!(printed, fastdtw(&a, &b, 1).unwrap().normalized_error());
}

#[test]
fn emit_writes_artifacts() {
    let (dir, _, _) = fixture(50, 2);
    let d = dir.path();
    let (pa, pb) = (d.join("a.csv"), d.join("b.csv"));
    let emit = d.join("gora_out");
    let out = gora(&[
        "align",
        path_str(&pa),
        path_str(&pb),
        "--emit",
        path_str(&emit),
    ]);
    assert!(out.status.success());
    for side in ["first", "second"] {
        for file in ["tau_star.csv", "reparameterized.csv", "summary.json"] {
            assert!(emit.join(side).join(file).is_file(), "{side}/{file}");
        }
    }
    let emit = d.join("dtw_out");
    let out = gora(&[
        "align",
        path_str(&pa),
        path_str(&pb),
        "--method",
        "dtw",
        "--emit",
        path_str(&emit),
    ]);
    assert!(out.status.success());
    let path = fs::read_to_string(emit.join("path.csv")).unwrap();
    assert!(path.starts_with("0,0\n"));
    assert!(path.ends_with("49,49\n"));
}

#[test]
fn input_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("ragged.csv"), "1,2\n3,4\n5\n").unwrap();
    fs::write(d.join("text.csv"), "1\n2\nx\n").unwrap();
    fs::write(d.join("short.csv"), "1\n2\n").unwrap();
    fs::write(d.join("three.csv"), "1\n2\n3\n").unwrap();

    let run = |a: &str, b: &str| gora(&["align", path_str(&d.join(a)), path_str(&d.join(b))]);
    let out = run("ragged.csv", "ragged.csv");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("row 3"), "{}", stderr(&out));
    let out = run("text.csv", "text.csv");
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("row 3"), "{}", stderr(&out));
    let out = run("short.csv", "three.csv");
    assert_eq!(out.status.code(), Some(2));
    let out = run("missing.csv", "three.csv");
    assert_eq!(out.status.code(), Some(2));

    fs::write(d.join("cfg.json"), r#"{"T_values": [], "output_dir": "x"}"#).unwrap();
    let out = gora(&["bench", "--config", path_str(&d.join("cfg.json"))]);
    assert_eq!(out.status.code(), Some(2));
    fs::write(d.join("cfg.json"), r#"{"T_values": [20], "bogus": 1}"#).unwrap();
    let out = gora(&["bench", "--config", path_str(&d.join("cfg.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(gora(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(gora(&["gen", "--kind", "highdim"]).status.code(), Some(2));
}

#[test]
fn gen_is_deterministic_and_matches_manifest() {
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for dir in &dirs {
        let out = gora(&[
            "--quiet",
            "gen",
            "--T",
            "40",
            "--pairs",
            "3",
            "--seed",
            "11",
            "--out",
            path_str(dir.path()),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        assert!(out.stderr.is_empty());
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dirs[0].path().join("manifest.json")).unwrap())
            .unwrap();
    let pairs = manifest["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 3);
    for entry in pairs {
        for file in entry["files"].as_array().unwrap() {
            let name = file.as_str().unwrap();
            let first = fs::read(dirs[0].path().join(name)).unwrap();
            assert_eq!(
                first,
                fs::read(dirs[1].path().join(name)).unwrap(),
                "{name}"
            );
        }
        let spec: TemplateSpec = serde_json::from_value(entry["template"].clone()).unwrap();
        let index = entry["index"].as_u64().unwrap();
        let written =
            gora_core::read_csv(dirs[0].path().join(format!("template_{index}.csv"))).unwrap();
        assert_eq!(written, generate_template(&spec).unwrap());
    }
}

#[test]
fn gen_highdim_shape() {
    let dir = tempfile::tempdir().unwrap();
    let out = gora(&[
        "gen",
        "--kind",
        "highdim",
        "--n",
        "16",
        "--T",
        "30",
        "--out",
        path_str(dir.path()),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let s = gora_core::read_csv(dir.path().join("pair_0_a.csv")).unwrap();
    assert_eq!((s.len(), s.dim()), (30, 16));
}

#[test]
fn verify_prints_table_and_passes() {
    let args = [
        "verify", "--T", "30,100", "--trials", "20", "--warps", "5", "--seed", "3",
    ];
    let first = gora(&args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let text = stdout(&first);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "T\ttrials\tlower\tpercentage");
    assert_eq!(lines.len(), 3);
    assert!(lines[2].starts_with("100\t20\t"));
    assert_eq!(first.stdout, gora(&args).stdout);
}

#[test]
fn bench_reports_are_independent_of_threads() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(
        d.join("cfg.json"),
        r#"{"T_values": [20, 40], "templates_per_T": 4, "methods": ["gora", "dtw", "fastdtw:r=1"], "master_seed": 5}"#,
    )
    .unwrap();
    let cfg = d.join("cfg.json");
    for (threads, out) in [("1", "one"), ("3", "three")] {
        let out = gora(&[
            "--quiet",
            "--threads",
            threads,
            "bench",
            "--config",
            path_str(&cfg),
            "--out",
            path_str(&d.join(out)),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    for file in ["fig_error.csv", "fig2a.csv"] {
        assert_eq!(
            fs::read(d.join("one").join(file)).unwrap(),
            fs::read(d.join("three").join(file)).unwrap(),
            "{file}"
        );
    }
    let errors = fs::read_to_string(d.join("one/fig_error.csv")).unwrap();
    assert_eq!(errors.lines().count(), 1 + 2 * 3);
    let runtimes = fs::read_to_string(d.join("one/fig_runtime.csv")).unwrap();
    assert_eq!(runtimes.lines().count(), 1 + 2 * 3);
}
