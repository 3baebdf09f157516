//! Argument surface and subcommand drivers.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use credal_core::credal::predict_box;
use credal_core::likelihood::{fit_axis, prepare_levels, SolverConfig};
use credal_core::metrics::{auroc, coverage, efficiency, pareto_sweep};
use credal_core::synth::generate;
use credal_core::uncertainty::{rank_by_uncertainty, uncertainty_report, UncertaintyMeasure};
use credal_core::{
    AlphaLevel, BoxCredalSet, DecalibrationModel, LogitMatrix, Mode, ProbabilityVector,
    ShiftEndpoints, UncertaintyReport,
};

use crate::error::AppError;
use crate::io::csv;
use crate::io::model::{read_model, write_model};
use crate::io::svg::{emit_spider_svg, SpiderPlotSpec};
use crate::synth_config::read_synth_config;

#[derive(Parser)]
#[command(
    name = "credal-decal",
    version,
    about = "Box credal sets from likelihood-budgeted logit shifts",
    after_help = "Exit codes: 0 success, 1 validation/parse error, 2 solver failure.\n\
                  CREDAL_DECAL_THREADS overrides the worker count."
)]
pub struct Cli {
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum ModeArg {
    Base,
    #[value(name = "family-mle")]
    FamilyMle,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Base => Mode::Base,
            ModeArg::FamilyMle => Mode::FamilyMle,
        }
    }
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum MeasureArg {
    Entropy,
    #[value(name = "zero-one")]
    ZeroOne,
}

impl From<MeasureArg> for UncertaintyMeasure {
    fn from(m: MeasureArg) -> UncertaintyMeasure {
        match m {
            MeasureArg::Entropy => UncertaintyMeasure::EuEntropy,
            MeasureArg::ZeroOne => UncertaintyMeasure::EuZeroOne,
        }
    }
}

#[derive(Args)]
pub struct ModelTestArgs {
    /// Fitted model document (credal-decal/1 JSON)
    #[arg(long)]
    model: PathBuf,
    /// Logit CSV (z_1,...,z_K header)
    #[arg(long)]
    test: PathBuf,
    /// One of the model's fitted alpha levels
    #[arg(long)]
    alpha: f64,
}

#[derive(Subcommand)]
pub enum Command {
    /// Fit plausible shift endpoints from labeled training logits
    Fit {
        /// Training CSV with header z_1,...,z_K,y (y is 1-based)
        #[arg(long)]
        train: PathBuf,
        /// Comma-separated alpha levels in [0, 1]
        #[arg(long, value_delimiter = ',', required = true)]
        alphas: Vec<f64>,
        /// Likelihood reference: the unshifted model or the family maximum
        #[arg(long, value_enum, default_value_t = ModeArg::Base)]
        mode: ModeArg,
        /// Override the endpoint residual tolerance (default 1e-10 * N)
        #[arg(long)]
        tol: Option<f64>,
        /// Shift magnitude treated as infinite
        #[arg(long)]
        clamp: Option<f64>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Map test logits to per-class probability interval boxes at one alpha
    Predict {
        #[command(flatten)]
        mt: ModelTestArgs,
        /// Box CSV destination (l_1,u_1,...,l_K,u_K)
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Per-instance aleatoric/epistemic/total uncertainty decomposition
    Uncertainty {
        #[command(flatten)]
        mt: ModelTestArgs,
        /// Epistemic score written to the eu column
        #[arg(long, value_enum, default_value_t = MeasureArg::Entropy)]
        measure: MeasureArg,
        /// Report entropies in bits instead of nats
        #[arg(long)]
        bits: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Coverage and efficiency of a box file against optional ground truth
    Metrics {
        /// Box CSV (l_1,u_1,...,l_K,u_K)
        #[arg(long)]
        boxes: PathBuf,
        /// Ground-truth distribution CSV (p_1,...,p_K)
        #[arg(long)]
        gt: Option<PathBuf>,
        /// Divide ground-truth rows by their sum before validation
        #[arg(long)]
        renormalize: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Coverage/efficiency/AUROC across every fitted alpha level
    Sweep {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        test: PathBuf,
        /// Ground-truth distribution CSV aligned with the test rows
        #[arg(long)]
        gt: Option<PathBuf>,
        /// Out-of-distribution logit CSV for the AUROC column
        #[arg(long)]
        ood: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = MeasureArg::Entropy)]
        measure: MeasureArg,
        #[arg(long)]
        renormalize: bool,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// AUROC of epistemic uncertainty separating OOD from in-distribution
    Ood {
        #[arg(long)]
        model: PathBuf,
        /// In-distribution logit CSV
        #[arg(long)]
        id: PathBuf,
        /// Out-of-distribution logit CSV
        #[arg(long)]
        ood: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long, value_enum, default_value_t = MeasureArg::Entropy)]
        measure: MeasureArg,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Indices of the most epistemically uncertain pool instances
    Select {
        #[arg(long)]
        model: PathBuf,
        /// Unlabeled pool logit CSV
        #[arg(long)]
        pool: PathBuf,
        #[arg(long)]
        alpha: f64,
        /// How many indices to emit
        #[arg(short = 'm', long, default_value_t = 20)]
        count: usize,
        #[arg(long, value_enum, default_value_t = MeasureArg::Entropy)]
        measure: MeasureArg,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Spider plot of one box row as a standalone SVG
    Spider {
        #[arg(long)]
        boxes: PathBuf,
        /// 0-based row inside the box file (and the overlay files)
        #[arg(long)]
        row: usize,
        /// Distribution CSV with a point estimate per box row
        #[arg(long)]
        mle: Option<PathBuf>,
        /// Distribution CSV with the ground truth per box row
        #[arg(long)]
        gt: Option<PathBuf>,
        /// Comma-separated axis labels (default c1,...,cK)
        #[arg(long, value_delimiter = ',')]
        names: Option<Vec<String>>,
        /// Probability at the outer ring
        #[arg(long, default_value_t = 1.0)]
        radial_max: f64,
        #[arg(long, default_value_t = 640)]
        size_px: u32,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Generate a synthetic task (train/test/gt/ood files) into a directory
    Synth {
        /// JSON config: k, d, n_train, n_test, separation, miscal_bias,
        /// miscal_noise, seed
        #[arg(long)]
        config: PathBuf,
        /// Override the config's RNG seed
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn alpha_level(a: f64) -> Result<AlphaLevel, AppError> {
    AlphaLevel::new(a).map_err(AppError::from)
}

/// Boxes for every row of `test` at one level, fanned out over the pool.
fn predict_all(
    model: &DecalibrationModel,
    test: &LogitMatrix,
    alpha: AlphaLevel,
) -> Result<Vec<BoxCredalSet>, AppError> {
    if test.n_classes() != model.n_classes() {
        return Err(AppError::Validation(format!(
            "test data has {} classes, model has {}",
            test.n_classes(),
            model.n_classes()
        )));
    }
    // fail on unknown alpha once, not per row
    model.endpoints_for(alpha.alpha())?;
    (0..test.n_instances())
        .into_par_iter()
        .map(|i| predict_box(model, test.row(i), alpha).map_err(AppError::from))
        .collect()
}

fn report_all(boxes: &[BoxCredalSet]) -> Result<Vec<UncertaintyReport>, AppError> {
    boxes
        .par_iter()
        .map(|b| uncertainty_report(b).map_err(AppError::from))
        .collect()
}

fn eu_of(r: &UncertaintyReport, measure: UncertaintyMeasure) -> f64 {
    match measure {
        UncertaintyMeasure::EuEntropy => r.eu_entropy,
        UncertaintyMeasure::EuZeroOne => r.eu_zero_one,
    }
}

pub fn run(cli: Cli) -> Result<(), AppError> {
    match cli.cmd {
        Command::Fit {
            train,
            alphas,
            mode,
            tol,
            clamp,
            output,
        } => {
            let data = csv::read_labeled_logits(&train)?;
            let levels = prepare_levels(
                &alphas
                    .into_iter()
                    .map(alpha_level)
                    .collect::<Result<Vec<_>, _>>()?,
            )?;
            let mut cfg = SolverConfig {
                tol_delta: tol,
                ..SolverConfig::default()
            };
            if let Some(c) = clamp {
                cfg.clamp = c;
            }
            let mode: Mode = mode.into();
            let k = data.n_classes();
            let per_class: Vec<(Vec<ShiftEndpoints>, u64)> = (0..k)
                .into_par_iter()
                .map(|class| fit_axis(&data, class, &levels, mode, &cfg))
                .collect::<credal_core::Result<_>>()?;
            let root_finds: u64 = per_class.iter().map(|(_, r)| r).sum();
            let endpoints: Vec<Vec<ShiftEndpoints>> = (0..levels.len())
                .map(|ai| per_class.iter().map(|(col, _)| col[ai]).collect())
                .collect();
            let model = DecalibrationModel::from_parts(
                k,
                data.n_instances(),
                mode,
                levels,
                endpoints,
                cfg.clamp,
                cfg.effective_tol_delta(data.n_instances()),
                root_finds,
            )?;
            write_model(&model, &output)?;
            println!(
                "fit: k={} n={} alphas={} mode={} root_finds={} -> {}",
                model.n_classes(),
                model.n_train(),
                model.alphas().len(),
                model.mode(),
                model.root_finds(),
                output.display()
            );
        }
        Command::Predict { mt, output } => {
            let model = read_model(&mt.model)?;
            let test = csv::read_logits(&mt.test)?;
            let boxes = predict_all(&model, &test, alpha_level(mt.alpha)?)?;
            csv::write_boxes(&output, &boxes)?;
            println!(
                "predict: {} boxes (k={}, alpha={}) -> {}",
                boxes.len(),
                model.n_classes(),
                mt.alpha,
                output.display()
            );
        }
        Command::Uncertainty {
            mt,
            measure,
            bits,
            output,
        } => {
            let model = read_model(&mt.model)?;
            let test = csv::read_logits(&mt.test)?;
            let boxes = predict_all(&model, &test, alpha_level(mt.alpha)?)?;
            let reports = report_all(&boxes)?;
            let measure: UncertaintyMeasure = measure.into();
            // --bits rescales entropies; the zero-one score is unitless and
            // passes through unchanged
            let scale = if bits { core::f64::consts::LN_2.recip() } else { 1.0 };
            let eu_scale = if measure == UncertaintyMeasure::EuEntropy { scale } else { 1.0 };
            let rows: Vec<(f64, f64, f64)> = reports
                .iter()
                .map(|r| (r.au * scale, eu_of(r, measure) * eu_scale, r.tu * scale))
                .collect();
            csv::write_uncertainty(&output, &rows)?;
            println!("uncertainty: {} rows -> {}", rows.len(), output.display());
        }
        Command::Metrics {
            boxes,
            gt,
            renormalize,
            output,
        } => {
            let boxes = csv::read_boxes(&boxes)?;
            let gts = gt
                .map(|p| csv::read_distributions(&p, renormalize))
                .transpose()?;
            let cov = gts
                .as_deref()
                .map(|g| coverage(&boxes, g))
                .transpose()?;
            let eff = efficiency(&boxes)?;
            let doc = json!({
                "n_boxes": boxes.len(),
                "coverage": cov,
                "efficiency": eff,
            });
            write_json(&output, &doc)?;
            println!(
                "metrics: n={} coverage={} efficiency={:.6} -> {}",
                boxes.len(),
                cov.map_or("n/a".to_string(), |c| format!("{c:.6}")),
                eff,
                output.display()
            );
        }
        Command::Sweep {
            model,
            test,
            gt,
            ood,
            measure,
            renormalize,
            output,
        } => {
            let model = read_model(&model)?;
            let test = csv::read_logits(&test)?;
            let gts = gt
                .map(|p| csv::read_distributions(&p, renormalize))
                .transpose()?;
            let ood = ood.map(|p| csv::read_logits(&p)).transpose()?;
            let summary = pareto_sweep(
                &model,
                &test,
                gts.as_deref(),
                ood.as_ref(),
                measure.into(),
            )?;
            csv::write_pareto(&output, summary.rows())?;
            println!(
                "sweep: {} alphas x {} instances -> {}",
                summary.rows().len(),
                summary.n_instances(),
                output.display()
            );
        }
        Command::Ood {
            model,
            id,
            ood,
            alpha,
            measure,
            output,
        } => {
            let model = read_model(&model)?;
            let id_logits = csv::read_logits(&id)?;
            let ood_logits = csv::read_logits(&ood)?;
            let level = alpha_level(alpha)?;
            let measure: UncertaintyMeasure = measure.into();
            let id_scores: Vec<f64> = report_all(&predict_all(&model, &id_logits, level)?)?
                .iter()
                .map(|r| eu_of(r, measure))
                .collect();
            let ood_scores: Vec<f64> = report_all(&predict_all(&model, &ood_logits, level)?)?
                .iter()
                .map(|r| eu_of(r, measure))
                .collect();
            let value = auroc(&ood_scores, &id_scores)?;
            let doc = json!({
                "alpha": alpha,
                "measure": match measure {
                    UncertaintyMeasure::EuEntropy => "entropy",
                    UncertaintyMeasure::EuZeroOne => "zero-one",
                },
                "n_id": id_scores.len(),
                "n_ood": ood_scores.len(),
                "auroc": value,
            });
            write_json(&output, &doc)?;
            println!("ood: auroc={value:.6} -> {}", output.display());
        }
        Command::Select {
            model,
            pool,
            alpha,
            count,
            measure,
            output,
        } => {
            let model = read_model(&model)?;
            let pool = csv::read_logits(&pool)?;
            let boxes = predict_all(&model, &pool, alpha_level(alpha)?)?;
            let idx = rank_by_uncertainty(&boxes, measure.into(), count)?;
            csv::write_indices(&output, &idx)?;
            println!(
                "select: {} of {} pool instances -> {}",
                idx.len(),
                boxes.len(),
                output.display()
            );
        }
        Command::Spider {
            boxes,
            row,
            mle,
            gt,
            names,
            radial_max,
            size_px,
            output,
        } => {
            let all = csv::read_boxes(&boxes)?;
            let b = all.get(row).cloned().ok_or_else(|| {
                AppError::Validation(format!("row {row} outside 0..{}", all.len()))
            })?;
            let k = b.n_classes();
            let pick_row = |path: &PathBuf| -> Result<ProbabilityVector, AppError> {
                let d = csv::read_distributions(path, false)?;
                d.get(row).cloned().ok_or_else(|| {
                    AppError::Validation(format!(
                        "row {row} outside 0..{} in {}",
                        d.len(),
                        path.display()
                    ))
                })
            };
            let spec = SpiderPlotSpec {
                class_names: names
                    .unwrap_or_else(|| (1..=k).map(|i| format!("c{i}")).collect()),
                intervals: b,
                mle: mle.as_ref().map(pick_row).transpose()?,
                gt: gt.as_ref().map(pick_row).transpose()?,
                radial_max,
                size_px,
            };
            emit_spider_svg(&spec, &output)?;
            println!("spider: row {row} -> {}", output.display());
        }
        Command::Synth {
            config,
            seed,
            output,
        } => {
            let cfg = read_synth_config(&config, seed)?;
            let (train, test, gts, ood) = generate(&cfg)?;
            std::fs::create_dir_all(&output).map_err(AppError::io(&output))?;
            csv::write_labeled_logits(&output.join("train.csv"), &train)?;
            csv::write_logits(&output.join("test.csv"), &test)?;
            csv::write_distributions(&output.join("gt.csv"), &gts)?;
            csv::write_logits(&output.join("ood.csv"), &ood)?;
            println!(
                "synth: k={} d={} train={} test={} ood={} seed={} -> {}",
                cfg.k,
                cfg.d,
                train.n_instances(),
                test.n_instances(),
                ood.n_instances(),
                cfg.seed,
                output.display()
            );
        }
    }
    Ok(())
}

fn write_json(path: &PathBuf, doc: &serde_json::Value) -> Result<(), AppError> {
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| AppError::Validation(format!("serialization: {e}")))?;
    text.push('\n');
    std::fs::write(path, text).map_err(AppError::io(path))
}
