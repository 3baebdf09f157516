//! End-to-end runs of the installed binary: every subcommand, the exit-code
//! contract, and cross-invocation determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_credal-decal"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary should spawn")
}

fn ok(args: &[&str], dir: &Path) -> Output {
    let out = run(args, dir);
    assert!(
        out.status.success(),
        "command {:?} failed:\n{}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn expect_code(args: &[&str], dir: &Path, code: i32) -> String {
    let out = run(args, dir);
    assert_eq!(
        out.status.code(),
        Some(code),
        "command {:?}: expected exit {code}, got {:?}\nstderr: {}",
        args,
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_synth_config(dir: &Path, seed: u64) -> PathBuf {
    let path = dir.join("synth.json");
    std::fs::write(
        &path,
        format!(
            r#"{{"k":4,"d":6,"n_train":250,"n_test":120,"separation":2.5,
"miscal_bias":[0.8,-0.4,0.0,0.0],"miscal_noise":0.25,"seed":{seed}}}"#
        ),
    )
    .unwrap();
    path
}

fn lines(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count()
}

#[test]
fn full_pipeline_smoke() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_synth_config(dir, 42);

    ok(&["synth", "--config", "synth.json", "-o", "data"], dir);
    for f in ["train.csv", "test.csv", "gt.csv", "ood.csv"] {
        assert!(dir.join("data").join(f).is_file(), "missing data/{f}");
    }
    assert_eq!(lines(&dir.join("data/train.csv")), 251);
    assert_eq!(lines(&dir.join("data/test.csv")), 121);

    ok(
        &["fit", "--train", "data/train.csv", "--alphas", "0.5,0.8,0.9", "-o", "model.json"],
        dir,
    );
    let model: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("model.json")).unwrap()).unwrap();
    assert_eq!(model["schema"], "credal-decal/1");
    assert_eq!(model["k"], 4);
    assert_eq!(model["root_finds"], 24);

    ok(
        &["predict", "--model", "model.json", "--test", "data/test.csv",
          "--alpha", "0.8", "-o", "boxes.csv"],
        dir,
    );
    assert_eq!(lines(&dir.join("boxes.csv")), 121);

    ok(
        &["uncertainty", "--model", "model.json", "--test", "data/test.csv",
          "--alpha", "0.8", "-o", "eu.csv"],
        dir,
    );
    assert_eq!(lines(&dir.join("eu.csv")), 121);

    ok(
        &["metrics", "--boxes", "boxes.csv", "--gt", "data/gt.csv", "-o", "summary.json"],
        dir,
    );
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["n_boxes"], 120);
    assert!(summary["coverage"].is_number());
    assert!(summary["efficiency"].is_number());

    ok(
        &["sweep", "--model", "model.json", "--test", "data/test.csv",
          "--gt", "data/gt.csv", "--ood", "data/ood.csv", "-o", "pareto.csv"],
        dir,
    );
    let pareto = std::fs::read_to_string(dir.join("pareto.csv")).unwrap();
    assert_eq!(pareto.lines().next(), Some("alpha,coverage,efficiency,auroc"));
    assert_eq!(pareto.lines().count(), 4);

    ok(
        &["ood", "--model", "model.json", "--id", "data/test.csv",
          "--ood", "data/ood.csv", "--alpha", "0.9", "-o", "auroc.json"],
        dir,
    );
    let auroc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("auroc.json")).unwrap()).unwrap();
    assert_eq!(auroc["n_id"], 120);
    assert_eq!(auroc["n_ood"], 120);
    let v = auroc["auroc"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&v));

    ok(
        &["select", "--model", "model.json", "--pool", "data/test.csv",
          "--alpha", "0.8", "-m", "15", "-o", "indices.csv"],
        dir,
    );
    let idx = std::fs::read_to_string(dir.join("indices.csv")).unwrap();
    assert_eq!(idx.lines().next(), Some("index"));
    assert_eq!(idx.lines().count(), 16);
    for line in idx.lines().skip(1) {
        let i: usize = line.parse().unwrap();
        assert!(i < 120);
    }

    ok(
        &["spider", "--boxes", "boxes.csv", "--row", "3",
          "--gt", "data/gt.csv", "-o", "plot.svg"],
        dir,
    );
    let svg = std::fs::read_to_string(dir.join("plot.svg")).unwrap();
    assert!(svg.starts_with("<?xml"));
    assert!(svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<circle").count() - 4, 8 + 4); // rings + endpoints + gt dots
}

#[test]
fn exit_codes_follow_the_contract() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_synth_config(dir, 7);
    ok(&["synth", "--config", "synth.json", "-o", "data"], dir);
    ok(
        &["fit", "--train", "data/train.csv", "--alphas", "0.5,0.9", "-o", "model.json"],
        dir,
    );

    // 0: help and version
    expect_code(&["--help"], dir, 0);
    expect_code(&["--version"], dir, 0);
    expect_code(&["fit", "--help"], dir, 0);

    // 1: usage errors (remapped off clap's default 2)
    expect_code(&["--bogus"], dir, 1);
    expect_code(&["fit"], dir, 1);
    expect_code(&["frobnicate"], dir, 1);

    // 1: file and validation errors
    let err = expect_code(
        &["predict", "--model", "model.json", "--test", "missing.csv",
          "--alpha", "0.9", "-o", "x.csv"],
        dir, 1,
    );
    assert!(err.contains("missing.csv"), "{err}");

    std::fs::write(dir.join("corrupt.csv"), "z_1,z_2,z_3,z_4\n1.0,2.0,nope,4.0\n").unwrap();
    let err = expect_code(
        &["predict", "--model", "model.json", "--test", "corrupt.csv",
          "--alpha", "0.9", "-o", "x.csv"],
        dir, 1,
    );
    assert!(err.contains("corrupt.csv:2"), "{err}");

    let err = expect_code(
        &["predict", "--model", "model.json", "--test", "data/test.csv",
          "--alpha", "0.77", "-o", "x.csv"],
        dir, 1,
    );
    assert!(err.contains("0.77"), "{err}");

    let doctored = std::fs::read_to_string(dir.join("model.json"))
        .unwrap()
        .replace("credal-decal/1", "credal-decal/3");
    std::fs::write(dir.join("bad_schema.json"), doctored).unwrap();
    let err = expect_code(
        &["predict", "--model", "bad_schema.json", "--test", "data/test.csv",
          "--alpha", "0.9", "-o", "x.csv"],
        dir, 1,
    );
    assert!(err.contains("credal-decal/3"), "{err}");

    let err = expect_code(
        &["spider", "--boxes", "data/gt.csv", "--row", "0", "-o", "x.svg"],
        dir, 1,
    );
    assert!(err.contains("header"), "{err}");

    expect_code(
        &["spider", "--boxes", "boxes_exist_not.csv", "--row", "0", "-o", "x.svg"],
        dir, 1,
    );

    // alpha outside [0, 1]
    expect_code(
        &["fit", "--train", "data/train.csv", "--alphas", "0.5,1.5", "-o", "m.json"],
        dir, 1,
    );

    // thread override must be a positive integer
    let out = bin()
        .args(["synth", "--config", "synth.json", "-o", "d2"])
        .env("CREDAL_DECAL_THREADS", "banana")
        .current_dir(dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("CREDAL_DECAL_THREADS"));
}

#[test]
fn synth_is_deterministic_and_seed_overridable() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_synth_config(dir, 42);
    ok(&["synth", "--config", "synth.json", "-o", "a"], dir);
    ok(&["synth", "--config", "synth.json", "-o", "b"], dir);
    ok(&["synth", "--config", "synth.json", "--seed", "43", "-o", "c"], dir);
    for f in ["train.csv", "test.csv", "gt.csv", "ood.csv"] {
        let a = std::fs::read(dir.join("a").join(f)).unwrap();
        let b = std::fs::read(dir.join("b").join(f)).unwrap();
        let c = std::fs::read(dir.join("c").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs across identical runs");
        assert_ne!(a, c, "{f} ignored the seed override");
    }
}

#[test]
fn fit_is_invariant_to_threads_and_alpha_order() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_synth_config(dir, 42);
    ok(&["synth", "--config", "synth.json", "-o", "data"], dir);

    let fit = |threads: &str, alphas: &str, out: &str| {
        let o = bin()
            .args(["fit", "--train", "data/train.csv", "--alphas", alphas, "-o", out])
            .env("CREDAL_DECAL_THREADS", threads)
            .current_dir(dir)
            .output()
            .unwrap();
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    };
    fit("1", "0.5,0.8,0.9", "m1.json");
    fit("8", "0.9,0.5,0.8", "m8.json");
    assert_eq!(
        std::fs::read(dir.join("m1.json")).unwrap(),
        std::fs::read(dir.join("m8.json")).unwrap()
    );
}

#[test]
fn spider_output_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(
        dir.join("boxes.csv"),
        "l_1,u_1,l_2,u_2,l_3,u_3\n0.1,0.3,0.4,0.7,0.2,0.3\n",
    )
    .unwrap();
    ok(
        &["spider", "--boxes", "boxes.csv", "--row", "0",
          "--names", "cat,dog,bird", "-o", "p1.svg"],
        dir,
    );
    ok(
        &["spider", "--boxes", "boxes.csv", "--row", "0",
          "--names", "cat,dog,bird", "-o", "p2.svg"],
        dir,
    );
    let a = std::fs::read_to_string(dir.join("p1.svg")).unwrap();
    assert_eq!(a, std::fs::read_to_string(dir.join("p2.svg")).unwrap());
    for name in ["cat", "dog", "bird"] {
        assert!(a.contains(name), "label {name} missing from the plot");
    }
}

#[test]
fn uncertainty_bits_flag_rescales_entropies_only() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_synth_config(dir, 42);
    ok(&["synth", "--config", "synth.json", "-o", "data"], dir);
    ok(
        &["fit", "--train", "data/train.csv", "--alphas", "0.8", "-o", "model.json"],
        dir,
    );
    let base = [
        "uncertainty", "--model", "model.json", "--test", "data/test.csv", "--alpha", "0.8",
    ];
    ok(&[&base[..], &["-o", "nats.csv"]].concat(), dir);
    ok(&[&base[..], &["--bits", "-o", "bits.csv"]].concat(), dir);
    ok(
        &[&base[..], &["--measure", "zero-one", "--bits", "-o", "zo.csv"]].concat(),
        dir,
    );
    ok(
        &[&base[..], &["--measure", "zero-one", "-o", "zo_nats.csv"]].concat(),
        dir,
    );

    let read = |name: &str| -> Vec<Vec<f64>> {
        std::fs::read_to_string(dir.join(name))
            .unwrap()
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
            .collect()
    };
    let (nats, bits) = (read("nats.csv"), read("bits.csv"));
    let ln2 = std::f64::consts::LN_2;
    for (n, b) in nats.iter().zip(&bits) {
        for j in 0..3 {
            assert!((n[j] / ln2 - b[j]).abs() < 1e-12, "column {j}: {} vs {}", n[j], b[j]);
        }
    }
    // the zero-one eu column is unitless: identical with and without --bits
    let (zo, zo_nats) = (read("zo.csv"), read("zo_nats.csv"));
    for (a, b) in zo.iter().zip(&zo_nats) {
        assert_eq!(a[1], b[1]);
    }
}

#[test]
fn metrics_without_ground_truth_reports_null_coverage() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(
        dir.join("boxes.csv"),
        "l_1,u_1,l_2,u_2\n0.2,0.6,0.4,0.8\n0.0,1.0,0.0,1.0\n",
    )
    .unwrap();
    ok(&["metrics", "--boxes", "boxes.csv", "-o", "summary.json"], dir);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    assert!(summary["coverage"].is_null());
    assert_eq!(summary["n_boxes"], 2);
    // widths: (0.4 + 0.4)/2 and (1 + 1)/2 -> mean 0.7 -> efficiency 0.3
    assert!((summary["efficiency"].as_f64().unwrap() - 0.3).abs() < 1e-12);
}

#[test]
fn metrics_renormalize_accepts_scaled_ground_truth() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    std::fs::write(dir.join("boxes.csv"), "l_1,u_1,l_2,u_2\n0.2,0.6,0.4,0.8\n").unwrap();
    std::fs::write(dir.join("gt.csv"), "p_1,p_2\n0.8,1.2\n").unwrap();
    expect_code(
        &["metrics", "--boxes", "boxes.csv", "--gt", "gt.csv", "-o", "s.json"],
        dir, 1,
    );
    ok(
        &["metrics", "--boxes", "boxes.csv", "--gt", "gt.csv", "--renormalize", "-o", "s.json"],
        dir,
    );
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("s.json")).unwrap()).unwrap();
    // 0.8/2 = 0.4 in [0.2,0.6]; 1.2/2 = 0.6 in [0.4,0.8]
    assert_eq!(summary["coverage"], 1.0);
}

#[test]
fn sweep_without_optional_inputs_leaves_columns_empty() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_synth_config(dir, 9);
    ok(&["synth", "--config", "synth.json", "-o", "data"], dir);
    ok(
        &["fit", "--train", "data/train.csv", "--alphas", "0.3,0.7", "-o", "model.json"],
        dir,
    );
    ok(
        &["sweep", "--model", "model.json", "--test", "data/test.csv", "-o", "pareto.csv"],
        dir,
    );
    let text = std::fs::read_to_string(dir.join("pareto.csv")).unwrap();
    for line in text.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 4);
        assert!(cells[1].is_empty(), "coverage should be empty: {line}");
        assert!(cells[3].is_empty(), "auroc should be empty: {line}");
        assert!(!cells[2].is_empty());
    }
}

#[test]
fn select_count_larger_than_pool_returns_whole_pool() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    write_synth_config(dir, 5);
    ok(&["synth", "--config", "synth.json", "-o", "data"], dir);
    ok(
        &["fit", "--train", "data/train.csv", "--alphas", "0.8", "-o", "model.json"],
        dir,
    );
    ok(
        &["select", "--model", "model.json", "--pool", "data/test.csv",
          "--alpha", "0.8", "-m", "99999", "-o", "idx.csv"],
        dir,
    );
    assert_eq!(lines(&dir.join("idx.csv")), 121);
}

#[test]
fn family_mle_mode_is_reachable_from_the_command_line() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    // near-calibrated data: with strong bias this mode's per-axis optima sit
    // jointly off the simplex and every prediction is an empty box
    std::fs::write(
        dir.join("synth.json"),
        r#"{"k":4,"d":6,"n_train":250,"n_test":120,"separation":2.5,
"miscal_bias":[0.0,0.0,0.0,0.0],"miscal_noise":0.05,"seed":17}"#,
    )
    .unwrap();
    ok(&["synth", "--config", "synth.json", "-o", "data"], dir);
    ok(
        &["fit", "--train", "data/train.csv", "--alphas", "0.5,0.9",
          "--mode", "family-mle", "-o", "model.json"],
        dir,
    );
    let model: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("model.json")).unwrap()).unwrap();
    assert_eq!(model["mode"], "family-mle");
    // wide level: near alpha = 1 the per-axis intervals of this mode can
    // tighten onto a jointly infeasible point, which predict rejects
    ok(
        &["predict", "--model", "model.json", "--test", "data/test.csv",
          "--alpha", "0.5", "-o", "boxes.csv"],
        dir,
    );
    assert_eq!(lines(&dir.join("boxes.csv")), 121);
}
