//! File formats: CSV tables must round-trip f64 values exactly, the model
//! document must survive read/write without bit drift, and malformed inputs
//! must fail with positioned errors.

use credal_core::credal::tighten_reachable;
use credal_core::likelihood::{fit, SolverConfig};
use credal_core::rng::SplitMix64;
use credal_core::synth::{generate, SynthConfig};
use credal_core::{AlphaLevel, BoxCredalSet, LabeledLogits, LogitMatrix, Mode, ProbabilityInterval};

use credal_decal::error::AppError;
use credal_decal::io::csv;
use credal_decal::io::model::{read_model, write_model};

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

fn wild_values(n: usize, seed: u64) -> Vec<f64> {
    // spread across many binades so shortest-repr shortcuts would show up
    let mut rng = SplitMix64::new(seed);
    (0..n)
        .map(|_| rng.next_normal() * 10f64.powi(rng.next_index(17) as i32 - 8))
        .collect()
}

#[test]
fn logits_roundtrip_is_exact() {
    let dir = tmp();
    let path = dir.path().join("z.csv");
    let m = LogitMatrix::new(wild_values(60, 21), 4).unwrap();
    csv::write_logits(&path, &m).unwrap();
    let back = csv::read_logits(&path).unwrap();
    assert_eq!(back.n_classes(), 4);
    assert_eq!(back.data(), m.data());
}

#[test]
fn labeled_logits_roundtrip_is_exact() {
    let dir = tmp();
    let path = dir.path().join("train.csv");
    let mut rng = SplitMix64::new(22);
    let z = LogitMatrix::new(wild_values(45, 23), 3).unwrap();
    let labels: Vec<usize> = (0..15).map(|_| rng.next_index(3)).collect();
    let data = LabeledLogits::new(z, labels.clone()).unwrap();
    csv::write_labeled_logits(&path, &data).unwrap();
    let back = csv::read_labeled_logits(&path).unwrap();
    assert_eq!(back.logits().data(), data.logits().data());
    assert_eq!(back.labels(), &labels[..]);
}

#[test]
fn boxes_roundtrip_hits_exact_zero_and_one() {
    let dir = tmp();
    let path = dir.path().join("boxes.csv");
    let mk = |b: &[(f64, f64)]| {
        BoxCredalSet::new(
            b.iter()
                .map(|&(l, u)| ProbabilityInterval::new(l, u).unwrap())
                .collect(),
        )
        .unwrap()
    };
    let boxes = vec![
        mk(&[(0.0, 1.0), (0.0, 1.0), (0.0, 1.0)]),
        mk(&[(0.12345678901234567, 0.3), (0.1, 0.5), (0.2, 0.77)]),
    ];
    csv::write_boxes(&path, &boxes).unwrap();
    let back = csv::read_boxes(&path).unwrap();
    assert_eq!(back.len(), 2);
    for (a, b) in boxes.iter().zip(&back) {
        for k in 0..3 {
            assert_eq!(a.lower(k), b.lower(k));
            assert_eq!(a.upper(k), b.upper(k));
        }
    }
    assert_eq!(back[0].lower(0), 0.0);
    assert_eq!(back[0].upper(0), 1.0);
}

#[test]
fn distributions_renormalize_divides_by_sum() {
    let dir = tmp();
    let path = dir.path().join("gt.csv");
    std::fs::write(&path, "p_1,p_2\n0.6,0.6\n0.25,0.75\n").unwrap();
    let strict = csv::read_distributions(&path, false);
    assert!(matches!(strict, Err(AppError::Parse { line: 2, .. })), "{strict:?}");
    let loose = csv::read_distributions(&path, true).unwrap();
    assert!((loose[0].as_slice()[0] - 0.5).abs() < 1e-15);
    assert_eq!(loose[1].as_slice()[1], 0.75);
}

#[test]
fn distributions_renormalize_rejects_nonpositive_rows() {
    let dir = tmp();
    let path = dir.path().join("gt.csv");
    std::fs::write(&path, "p_1,p_2\n0.0,0.0\n").unwrap();
    let r = csv::read_distributions(&path, true);
    assert!(matches!(r, Err(AppError::Parse { line: 2, .. })), "{r:?}");
}

#[test]
fn label_column_is_one_based_and_validated() {
    let dir = tmp();
    let path = dir.path().join("train.csv");
    std::fs::write(&path, "z_1,z_2,y\n0.5,-0.5,2\n1.0,0.0,1\n").unwrap();
    let data = csv::read_labeled_logits(&path).unwrap();
    assert_eq!(data.labels(), &[1, 0]);

    std::fs::write(&path, "z_1,z_2,y\n0.5,-0.5,0\n").unwrap();
    let r = csv::read_labeled_logits(&path);
    assert!(matches!(r, Err(AppError::Parse { line: 2, .. })), "{r:?}");

    std::fs::write(&path, "z_1,z_2,y\n0.5,-0.5,3\n").unwrap();
    let r = csv::read_labeled_logits(&path);
    assert!(matches!(r, Err(AppError::Parse { line: 2, .. })), "{r:?}");
}

#[test]
fn header_shape_is_enforced() {
    let dir = tmp();
    let path = dir.path().join("x.csv");
    for bad in [
        "z_1,z_3\n0.0,0.0\n",       // gap in the index sequence
        "z_1,z_2,y\n0.0,0.0,1\n",   // labeled file fed to the plain reader
        "a_1,a_2\n0.0,0.0\n",       // wrong prefix
        "\n",                        // empty
    ] {
        std::fs::write(&path, bad).unwrap();
        assert!(csv::read_logits(&path).is_err(), "accepted {bad:?}");
    }
    // ragged row
    std::fs::write(&path, "z_1,z_2\n0.0\n").unwrap();
    let r = csv::read_logits(&path);
    assert!(matches!(r, Err(AppError::Parse { line: 2, .. })), "{r:?}");
}

#[test]
fn crlf_input_is_accepted() {
    let dir = tmp();
    let path = dir.path().join("x.csv");
    std::fs::write(&path, "z_1,z_2\r\n0.5,-0.5\r\n").unwrap();
    let m = csv::read_logits(&path).unwrap();
    assert_eq!(m.n_instances(), 1);
    assert_eq!(m.row(0), &[0.5, -0.5]);
}

fn tiny_model(alphas: &[f64]) -> credal_core::DecalibrationModel {
    let cfg = SynthConfig {
        k: 3,
        d: 4,
        n_train: 30,
        n_test: 5,
        separation: 2.0,
        miscal_bias: vec![0.4, -0.4, 0.0],
        miscal_noise: 0.2,
        seed: 31,
    };
    let (train, _, _, _) = generate(&cfg).unwrap();
    let lv: Vec<AlphaLevel> = alphas.iter().map(|&a| AlphaLevel::new(a).unwrap()).collect();
    fit(&train, &lv, Mode::Base, &SolverConfig::default()).unwrap()
}

#[test]
fn model_document_roundtrips_bit_exact() {
    let dir = tmp();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    // alpha = 0 exercises the infinite-endpoint encoding
    let model = tiny_model(&[0.0, 0.3, 0.9]);
    write_model(&model, &a).unwrap();
    let back = read_model(&a).unwrap();
    write_model(&back, &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    assert_eq!(back.n_classes(), model.n_classes());
    assert_eq!(back.n_train(), model.n_train());
    assert_eq!(back.mode(), model.mode());
    assert_eq!(back.root_finds(), model.root_finds());
    for (x, y) in model.alphas().iter().zip(back.alphas()) {
        assert_eq!(x.alpha(), y.alpha());
    }
    for ai in 0..model.alphas().len() {
        for (e, f) in model.endpoints_at(ai).iter().zip(back.endpoints_at(ai)) {
            assert_eq!(e.t_minus.to_bits(), f.t_minus.to_bits());
            assert_eq!(e.t_plus.to_bits(), f.t_plus.to_bits());
        }
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert!(text.contains("\"-inf\""), "alpha=0 endpoints should encode as tags");
    assert!(text.contains("\"inf\""));
}

#[test]
fn model_schema_version_is_checked() {
    let dir = tmp();
    let path = dir.path().join("m.json");
    let model = tiny_model(&[0.5]);
    write_model(&model, &path).unwrap();
    let doctored = std::fs::read_to_string(&path)
        .unwrap()
        .replace("credal-decal/1", "credal-decal/2");
    std::fs::write(&path, doctored).unwrap();
    let r = read_model(&path);
    assert!(matches!(r, Err(AppError::SchemaVersion { .. })), "{r:?}");
}

#[test]
fn model_json_syntax_error_reports_line() {
    let dir = tmp();
    let path = dir.path().join("m.json");
    std::fs::write(&path, "{\n  \"schema\": \"credal-decal/1\",\n  oops\n}\n").unwrap();
    match read_model(&path) {
        Err(AppError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a positioned parse error, got {other:?}"),
    }
}

#[test]
fn uncertainty_and_index_writers_match_readers() {
    let dir = tmp();
    let upath = dir.path().join("eu.csv");
    csv::write_uncertainty(&upath, &[(0.5, 0.25, 0.75), (0.1, 0.0, 0.1)]).unwrap();
    let text = std::fs::read_to_string(&upath).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("au,eu,tu"));
    assert_eq!(text.lines().count(), 3);

    let ipath = dir.path().join("idx.csv");
    csv::write_indices(&ipath, &[5, 0, 12]).unwrap();
    assert_eq!(std::fs::read_to_string(&ipath).unwrap(), "index\n5\n0\n12\n");
}

#[test]
fn pareto_writer_leaves_missing_columns_empty() {
    use credal_core::metrics::SweepRow;
    let dir = tmp();
    let path = dir.path().join("pareto.csv");
    let rows = vec![
        SweepRow { alpha: 0.2, coverage: None, efficiency: 0.5, auroc: None },
        SweepRow { alpha: 0.8, coverage: Some(0.75), efficiency: 0.9, auroc: Some(0.6) },
    ];
    csv::write_pareto(&path, &rows).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "alpha,coverage,efficiency,auroc");
    assert!(lines[1].contains(",,"), "missing coverage must stay empty: {}", lines[1]);
    assert!(lines[1].ends_with(','), "missing auroc must stay empty: {}", lines[1]);
    assert!(!lines[2].contains(",,"));
}

#[test]
fn box_reader_rejects_inverted_and_out_of_range_bounds() {
    let dir = tmp();
    let path = dir.path().join("b.csv");
    std::fs::write(&path, "l_1,u_1,l_2,u_2\n0.4,0.2,0.1,0.9\n").unwrap();
    assert!(matches!(
        csv::read_boxes(&path),
        Err(AppError::Parse { line: 2, .. } | AppError::Validation(_))
    ));
    std::fs::write(&path, "l_1,u_1,l_2,u_2\n-0.1,0.2,0.1,0.9\n").unwrap();
    assert!(csv::read_boxes(&path).is_err());
}

#[test]
fn spider_rendering_requires_consistent_spec() {
    use credal_decal::io::svg::{render_spider_svg, SpiderPlotSpec};
    let b = tighten_reachable(
        &BoxCredalSet::new(vec![
            ProbabilityInterval::new(0.2, 0.5).unwrap(),
            ProbabilityInterval::new(0.3, 0.6).unwrap(),
        ])
        .unwrap(),
    )
    .unwrap();
    let spec = SpiderPlotSpec {
        class_names: vec!["a".into()],
        intervals: b,
        mle: None,
        gt: None,
        radial_max: 1.0,
        size_px: 640,
    };
    assert!(matches!(render_spider_svg(&spec), Err(AppError::Validation(_))));
}
