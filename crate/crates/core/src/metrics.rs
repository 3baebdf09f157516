//! Evaluation: coverage against known ground truth, box efficiency, the
//! rank-based AUROC, and the per-alpha Pareto sweep.

use alloc::vec::Vec;

use crate::credal::{contains, predict_box};
use crate::error::Error;
use crate::Result;
use crate::types::{BoxCredalSet, DecalibrationModel, LogitMatrix, ProbabilityVector};
use crate::uncertainty::{uncertainty_report, UncertaintyMeasure};

/// Fraction of instances whose ground-truth distribution lies inside the
/// predicted box (membership with the standard 1e-9 slack).
pub fn coverage(boxes: &[BoxCredalSet], gts: &[ProbabilityVector]) -> Result<f64> {
    if boxes.is_empty() {
        return Err(Error::EmptyList);
    }
    if boxes.len() != gts.len() {
        return Err(Error::LengthMismatch { expected: boxes.len(), got: gts.len() });
    }
    let mut hits = 0usize;
    for (b, gt) in boxes.iter().zip(gts) {
        if b.n_classes() != gt.len() {
            return Err(Error::LengthMismatch { expected: b.n_classes(), got: gt.len() });
        }
        if contains(b, gt) {
            hits += 1;
        }
    }
    Ok(hits as f64 / boxes.len() as f64)
}

/// One minus the mean interval width, averaged over classes then instances.
/// Point boxes score 1, vacuous boxes score 0. Uses the boxes as given
/// (no tightening), so the score reflects what prediction produced.
pub fn efficiency(boxes: &[BoxCredalSet]) -> Result<f64> {
    if boxes.is_empty() {
        return Err(Error::EmptyList);
    }
    let mut acc = 0.0;
    for b in boxes {
        let k = b.n_classes();
        let w: f64 = (0..k).map(|i| b.upper(i) - b.lower(i)).sum();
        acc += w / k as f64;
    }
    Ok(1.0 - acc / boxes.len() as f64)
}

/// Mann-Whitney AUROC of positives vs negatives via average ranks, so ties
/// contribute half a win. 1.0 means positives always score higher.
pub fn auroc(pos: &[f64], neg: &[f64]) -> Result<f64> {
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::EmptyList);
    }
    if pos.iter().chain(neg).any(|x| x.is_nan()) {
        return Err(Error::NotFinite { what: "score" });
    }
    let mut all: Vec<(f64, bool)> = pos
        .iter()
        .map(|&s| (s, true))
        .chain(neg.iter().map(|&s| (s, false)))
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let mut rank_sum_pos = 0.0;
    let mut i = 0usize;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        // ranks are 1-based; a tie group spanning i..j shares the mean rank
        let avg_rank = (i + 1 + j) as f64 / 2.0;
        let pos_in_group = all[i..j].iter().filter(|t| t.1).count();
        rank_sum_pos += avg_rank * pos_in_group as f64;
        i = j;
    }
    let np = pos.len() as f64;
    let nn = neg.len() as f64;
    Ok((rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn))
}

/// One sweep row per fitted alpha, in the model's (ascending) order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub alpha: f64,
    /// Present only when ground-truth distributions were supplied.
    pub coverage: Option<f64>,
    pub efficiency: f64,
    /// AUROC of OOD vs in-distribution EU scores; present only with OOD data.
    pub auroc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationSummary {
    rows: Vec<SweepRow>,
    n_instances: usize,
}

impl EvaluationSummary {
    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    /// Number of evaluation (in-distribution) instances behind every row.
    pub fn n_instances(&self) -> usize {
        self.n_instances
    }
}

fn eu_scores(boxes: &[BoxCredalSet], measure: UncertaintyMeasure) -> Result<Vec<f64>> {
    boxes
        .iter()
        .map(|b| {
            let r = uncertainty_report(b)?;
            Ok(match measure {
                UncertaintyMeasure::EuEntropy => r.eu_entropy,
                UncertaintyMeasure::EuZeroOne => r.eu_zero_one,
            })
        })
        .collect()
}

/// Evaluate every fitted alpha level on a test set: coverage (when the true
/// conditional distributions are known), efficiency, and, when an OOD logit
/// block is supplied, the AUROC of the chosen EU measure at separating OOD
/// from in-distribution instances.
pub fn pareto_sweep(
    model: &DecalibrationModel,
    test: &LogitMatrix,
    gts: Option<&[ProbabilityVector]>,
    ood: Option<&LogitMatrix>,
    measure: UncertaintyMeasure,
) -> Result<EvaluationSummary> {
    if test.n_classes() != model.n_classes() {
        return Err(Error::LengthMismatch {
            expected: model.n_classes(),
            got: test.n_classes(),
        });
    }
    if let Some(g) = gts {
        if g.len() != test.n_instances() {
            return Err(Error::LengthMismatch {
                expected: test.n_instances(),
                got: g.len(),
            });
        }
    }
    if let Some(o) = ood {
        if o.n_classes() != model.n_classes() {
            return Err(Error::LengthMismatch {
                expected: model.n_classes(),
                got: o.n_classes(),
            });
        }
    }

    let mut rows = Vec::with_capacity(model.alphas().len());
    for &alpha in model.alphas() {
        let boxes: Vec<BoxCredalSet> = test
            .rows_iter()
            .map(|z| predict_box(model, z, alpha))
            .collect::<Result<_>>()?;
        let cov = match gts {
            Some(g) => Some(coverage(&boxes, g)?),
            None => None,
        };
        let eff = efficiency(&boxes)?;
        let roc = match ood {
            Some(o) => {
                let id_scores = eu_scores(&boxes, measure)?;
                let ood_boxes: Vec<BoxCredalSet> = o
                    .rows_iter()
                    .map(|z| predict_box(model, z, alpha))
                    .collect::<Result<_>>()?;
                let ood_scores = eu_scores(&ood_boxes, measure)?;
                Some(auroc(&ood_scores, &id_scores)?)
            }
            None => None,
        };
        rows.push(SweepRow {
            alpha: alpha.alpha(),
            coverage: cov,
            efficiency: eff,
            auroc: roc,
        });
    }
    Ok(EvaluationSummary { rows, n_instances: test.n_instances() })
}
