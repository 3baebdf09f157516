//! Validated domain types. Constructors reject invariant violations with a
//! typed [`Error`]; nothing is repaired or renormalized silently.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Absolute tolerance shared by simplex normalization and box membership.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Tolerance for interval nestedness comparisons.
pub const NEST_TOL: f64 = 1e-12;

/// Dense row-major N x K matrix of finite logits.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitMatrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl LogitMatrix {
    /// `data` is row-major with `cols` entries per row; K >= 2, N >= 1, all finite.
    pub fn new(data: Vec<f64>, cols: usize) -> Result<Self> {
        if cols < 2 {
            return Err(Error::LengthMismatch { expected: 2, got: cols });
        }
        if data.is_empty() || !data.len().is_multiple_of(cols) {
            return Err(Error::LengthMismatch {
                expected: cols,
                got: data.len(),
            });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NotFinite { what: "logit" });
        }
        let rows = data.len() / cols;
        Ok(LogitMatrix { data, rows, cols })
    }

    pub fn n_instances(&self) -> usize {
        self.rows
    }

    pub fn n_classes(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    /// Row-major backing slice.
    pub fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Training evidence: logits plus 0-based labels (1-based only in files).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledLogits {
    logits: LogitMatrix,
    labels: Vec<usize>,
    class_counts: Vec<usize>,
}

impl LabeledLogits {
    pub fn new(logits: LogitMatrix, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != logits.n_instances() {
            return Err(Error::LengthMismatch {
                expected: logits.n_instances(),
                got: labels.len(),
            });
        }
        let k = logits.n_classes();
        let mut class_counts = alloc::vec![0usize; k];
        for &y in &labels {
            if y >= k {
                return Err(Error::OutOfRange {
                    what: "label",
                    value: y as f64,
                });
            }
            class_counts[y] += 1;
        }
        Ok(LabeledLogits {
            logits,
            labels,
            class_counts,
        })
    }

    pub fn logits(&self) -> &LogitMatrix {
        &self.logits
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// N_j = #{n : y_n = j}.
    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    pub fn n_instances(&self) -> usize {
        self.logits.n_instances()
    }

    pub fn n_classes(&self) -> usize {
        self.logits.n_classes()
    }

    /// At least two classes appear among the labels.
    pub fn has_two_classes(&self) -> bool {
        self.class_counts.iter().filter(|&&c| c > 0).count() >= 2
    }
}

/// Point on the probability simplex, validated to tolerance [`SIMPLEX_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    p: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.len() < 2 {
            return Err(Error::LengthMismatch { expected: 2, got: p.len() });
        }
        for &x in &p {
            if !x.is_finite() {
                return Err(Error::NotFinite { what: "probability" });
            }
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::OutOfRange {
                    what: "probability",
                    value: x,
                });
            }
        }
        let sum: f64 = p.iter().sum();
        if crate::math::abs(sum - 1.0) > SIMPLEX_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(ProbabilityVector { p })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

/// Closed subinterval of [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityInterval {
    lower: f64,
    upper: f64,
}

impl ProbabilityInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(Error::NotFinite { what: "interval bound" });
        }
        if !(0.0..=1.0).contains(&lower) {
            return Err(Error::OutOfRange {
                what: "interval lower bound",
                value: lower,
            });
        }
        if !(0.0..=1.0).contains(&upper) {
            return Err(Error::OutOfRange {
                what: "interval upper bound",
                value: upper,
            });
        }
        if lower > upper {
            return Err(Error::OutOfRange {
                what: "interval lower bound above upper",
                value: lower,
            });
        }
        Ok(ProbabilityInterval { lower, upper })
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// K class-wise probability intervals whose box meets the simplex.
///
/// `reachable = false` means raw marginal extrema as produced by prediction;
/// `reachable = true` means every bound is attained by some member
/// distribution (post tightening).
#[derive(Debug, Clone, PartialEq)]
pub struct BoxCredalSet {
    intervals: Vec<ProbabilityInterval>,
    reachable: bool,
}

impl BoxCredalSet {
    pub fn new(intervals: Vec<ProbabilityInterval>) -> Result<Self> {
        if intervals.len() < 2 {
            return Err(Error::LengthMismatch {
                expected: 2,
                got: intervals.len(),
            });
        }
        let sum_lower: f64 = intervals.iter().map(|iv| iv.lower).sum();
        let sum_upper: f64 = intervals.iter().map(|iv| iv.upper).sum();
        if sum_lower > 1.0 + SIMPLEX_TOL || sum_upper < 1.0 - SIMPLEX_TOL {
            return Err(Error::EmptyBox);
        }
        Ok(BoxCredalSet {
            intervals,
            reachable: false,
        })
    }

    /// Constructor for tightened boxes; callers guarantee coherence.
    pub(crate) fn new_reachable(intervals: Vec<ProbabilityInterval>) -> Self {
        debug_assert!(intervals.len() >= 2);
        BoxCredalSet {
            intervals,
            reachable: true,
        }
    }

    pub fn n_classes(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[ProbabilityInterval] {
        &self.intervals
    }

    pub fn interval(&self, k: usize) -> ProbabilityInterval {
        self.intervals[k]
    }

    pub fn lower(&self, k: usize) -> f64 {
        self.intervals[k].lower
    }

    pub fn upper(&self, k: usize) -> f64 {
        self.intervals[k].upper
    }

    pub fn reachable(&self) -> bool {
        self.reachable
    }
}

/// Relative-likelihood budget level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaLevel {
    alpha: f64,
    log_budget: f64,
}

impl AlphaLevel {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::OutOfRange {
                what: "alpha",
                value: alpha,
            });
        }
        Ok(AlphaLevel {
            alpha,
            // ln(0) = -inf is the intended budget at alpha = 0
            log_budget: crate::math::ln(alpha),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// ln(alpha); -inf at alpha = 0.
    pub fn log_budget(&self) -> f64 {
        self.log_budget
    }
}

/// Plausible shift range for one class at one alpha, with the certified
/// residuals |delta_loglik_1d(t) - target| at each finite endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftEndpoints {
    pub t_minus: f64,
    pub t_plus: f64,
    /// 0.0 at infinite endpoints, where no root was solved.
    pub residual_minus: f64,
    pub residual_plus: f64,
}

/// Which model the likelihood budget is measured against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Budget relative to the unshifted model: shifts t with
    /// delta_loglik_1d(t) >= ln(alpha). Every interval contains t = 0.
    Base,
    /// Budget relative to the best shift in the family: intervals contain the
    /// per-class maximizer and collapse to it at alpha = 1.
    FamilyMle,
}

impl core::fmt::Display for Mode {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Mode::Base => "base",
            Mode::FamilyMle => "family-mle",
        })
    }
}

impl core::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "base" => Ok(Mode::Base),
            "family-mle" => Ok(Mode::FamilyMle),
            _ => Err(Error::InvalidConfig {
                reason: "mode must be \"base\" or \"family-mle\"",
            }),
        }
    }
}

/// Fitted per-alpha, per-class shift endpoints plus solver metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct DecalibrationModel {
    k: usize,
    n: usize,
    mode: Mode,
    alphas: Vec<AlphaLevel>,
    /// endpoints[alpha_idx][class], alphas ascending.
    endpoints: Vec<Vec<ShiftEndpoints>>,
    clamp: f64,
    tol: f64,
    root_finds: u64,
}

impl DecalibrationModel {
    /// Assemble and validate a model (used by `fit`, deserialization, and
    /// parallel fitting frontends).
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        k: usize,
        n: usize,
        mode: Mode,
        alphas: Vec<AlphaLevel>,
        endpoints: Vec<Vec<ShiftEndpoints>>,
        clamp: f64,
        tol: f64,
        root_finds: u64,
    ) -> Result<Self> {
        if k < 2 {
            return Err(Error::LengthMismatch { expected: 2, got: k });
        }
        if n == 0 {
            return Err(Error::OutOfRange {
                what: "training size",
                value: 0.0,
            });
        }
        if alphas.is_empty() {
            return Err(Error::EmptyList);
        }
        if endpoints.len() != alphas.len() {
            return Err(Error::LengthMismatch {
                expected: alphas.len(),
                got: endpoints.len(),
            });
        }
        for w in alphas.windows(2) {
            if w[0].alpha() >= w[1].alpha() {
                return Err(Error::InvalidConfig {
                    reason: "alphas must be strictly ascending",
                });
            }
        }
        for (ai, row) in endpoints.iter().enumerate() {
            if row.len() != k {
                return Err(Error::LengthMismatch {
                    expected: k,
                    got: row.len(),
                });
            }
            for ep in row {
                if ep.t_minus.is_nan() || ep.t_plus.is_nan() {
                    return Err(Error::NotFinite { what: "endpoint" });
                }
                if ep.t_minus > ep.t_plus {
                    return Err(Error::OutOfRange {
                        what: "endpoint order (t_minus > t_plus)",
                        value: ep.t_minus,
                    });
                }
                if mode == Mode::Base && (ep.t_minus > NEST_TOL || ep.t_plus < -NEST_TOL) {
                    return Err(Error::OutOfRange {
                        what: "base-mode endpoint interval must contain 0",
                        value: if ep.t_minus > NEST_TOL { ep.t_minus } else { ep.t_plus },
                    });
                }
            }
            // larger alpha => tighter interval, per class
            if ai > 0 {
                let prev = &endpoints[ai - 1][..];
                for (ep_outer, ep_inner) in prev.iter().zip(row.iter()) {
                    if ep_inner.t_minus < ep_outer.t_minus - NEST_TOL
                        || ep_inner.t_plus > ep_outer.t_plus + NEST_TOL
                    {
                        return Err(Error::InvalidConfig {
                            reason: "endpoints not nested across alphas",
                        });
                    }
                }
            }
        }
        if clamp.is_nan() || clamp <= 0.0 || tol.is_nan() || tol <= 0.0 {
            return Err(Error::InvalidConfig {
                reason: "clamp and tol must be positive",
            });
        }
        Ok(DecalibrationModel {
            k,
            n,
            mode,
            alphas,
            endpoints,
            clamp,
            tol,
            root_finds,
        })
    }

    pub fn n_classes(&self) -> usize {
        self.k
    }

    pub fn n_train(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Fitted levels, ascending.
    pub fn alphas(&self) -> &[AlphaLevel] {
        &self.alphas
    }

    pub fn clamp(&self) -> f64 {
        self.clamp
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// Number of one-sided endpoint root-finds performed by the fit.
    pub fn root_finds(&self) -> u64 {
        self.root_finds
    }

    /// Index of `alpha` among the fitted levels (exact float match).
    pub fn find_alpha(&self, alpha: f64) -> Option<usize> {
        self.alphas.iter().position(|a| a.alpha() == alpha)
    }

    pub fn endpoints_at(&self, alpha_idx: usize) -> &[ShiftEndpoints] {
        &self.endpoints[alpha_idx]
    }

    /// Per-class endpoints for a fitted level.
    pub fn endpoints_for(&self, alpha: f64) -> Result<&[ShiftEndpoints]> {
        self.find_alpha(alpha)
            .map(|i| &self.endpoints[i][..])
            .ok_or(Error::UnknownAlpha { alpha })
    }
}

/// Per-instance uncertainty decomposition, entropies in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UncertaintyReport {
    /// Aleatoric: minimum Shannon entropy over the credal set.
    pub au: f64,
    /// Epistemic (entropy gap): tu - au.
    pub eu_entropy: f64,
    /// Total: au + eu_entropy, by construction.
    pub tu: f64,
    /// Epistemic, zero-one-loss variant, in [0, 1].
    pub eu_zero_one: f64,
    /// True when the minimum entropy came from the K > 15 greedy heuristic
    /// (an upper bound on the true minimum) rather than vertex enumeration.
    pub min_entropy_heuristic: bool,
}
