//! Shifted-softmax likelihood surface and the per-class endpoint programs.
//!
//! Everything revolves around the log-likelihood gap of a constant logit
//! shift c against the unshifted model,
//!
//! ```text
//! delta_loglik(c) = sum_n [ log p_{y_n}(z_n + c) - log p_{y_n}(z_n) ]
//! ```
//!
//! which is concave in c and invariant under c -> c + t*1. Along a single
//! class axis it reduces to `delta_loglik_1d`, whose sublevel boundaries are
//! the shift endpoints stored in a fitted model. Roots are found by geometric
//! bracket expansion plus bisection and certified by the residual
//! |delta_loglik_1d(t) - target| at the returned endpoint.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::{self, CompensatedSum};
use crate::types::{AlphaLevel, DecalibrationModel, LabeledLogits, Mode, ShiftEndpoints};
use crate::{Error, Result};

/// Tolerances and budgets for the endpoint solvers.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Absolute tolerance on |delta_loglik_1d(t) - target| at returned finite
    /// endpoints. `None` scales with the data: 1e-10 * N.
    pub tol_delta: Option<f64>,
    /// Bisection stops once the bracket is this narrow.
    pub tol_t: f64,
    /// Largest |t| considered; expansion past it reports an infinite endpoint.
    pub clamp: f64,
    /// Iteration cap per bisection.
    pub max_iter: usize,
    /// Initial bracket half-width for the geometric expansion.
    pub bracket_init: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol_delta: None,
            tol_t: 1e-12,
            clamp: 10_000.0,
            max_iter: 200,
            bracket_init: 1.0,
        }
    }
}

impl SolverConfig {
    /// The residual tolerance actually applied for N training rows.
    pub fn effective_tol_delta(&self, n: usize) -> f64 {
        self.tol_delta.unwrap_or(1e-10 * n as f64)
    }

    fn validate(&self) -> Result<()> {
        if let Some(td) = self.tol_delta {
            if td.is_nan() || td <= 0.0 {
                return Err(Error::InvalidConfig {
                    reason: "tol_delta must be positive",
                });
            }
        }
        let bad = |x: f64| x.is_nan() || x <= 0.0;
        if bad(self.tol_t) || bad(self.clamp) || bad(self.bracket_init) {
            return Err(Error::InvalidConfig {
                reason: "tol_t, clamp, and bracket_init must be positive",
            });
        }
        if self.max_iter < 60 {
            return Err(Error::InvalidConfig {
                reason: "max_iter must be at least 60",
            });
        }
        Ok(())
    }
}

/// Log-probabilities of the shifted softmax, log p_j = z_j + c_j - lse(z + c).
///
/// Max-subtraction keeps the result finite for logits far into saturation.
/// Panics if `z` and `c` differ in length.
pub fn log_softmax_shift(z: &[f64], c: &[f64]) -> Vec<f64> {
    assert_eq!(z.len(), c.len(), "logit row and shift must have equal length");
    let mut m = f64::NEG_INFINITY;
    for (a, b) in z.iter().zip(c) {
        if a + b > m {
            m = a + b;
        }
    }
    let mut s = 0.0;
    for (a, b) in z.iter().zip(c) {
        s += math::exp(a + b - m);
    }
    let lse = m + math::ln(s);
    z.iter().zip(c).map(|(a, b)| a + b - lse).collect()
}

/// Log-likelihood gap of shift c against the unshifted model; 0 at c = 0,
/// invariant under adding a constant to every component.
///
/// Summation over rows is Neumaier-compensated so the value stays meaningful
/// against tolerances of order 1e-10 * N. Panics on a length mismatch.
pub fn delta_loglik(data: &LabeledLogits, c: &[f64]) -> f64 {
    assert_eq!(data.n_classes(), c.len(), "shift length must equal K");
    let mut acc = CompensatedSum::default();
    for (row, &y) in data.logits().rows_iter().zip(data.labels()) {
        acc.add(c[y] - (lse_shifted(row, c) - lse_shifted(row, &[])));
    }
    acc.value()
}

/// Analytic gradient of [`delta_loglik`]: sum_n (e_{y_n} - softmax(z_n + c)).
/// Components sum to zero. Panics on a length mismatch.
pub fn delta_loglik_grad(data: &LabeledLogits, c: &[f64]) -> Vec<f64> {
    assert_eq!(data.n_classes(), c.len(), "shift length must equal K");
    let k = c.len();
    let mut acc = vec![CompensatedSum::default(); k];
    let mut e = vec![0.0; k];
    for (row, &y) in data.logits().rows_iter().zip(data.labels()) {
        let mut m = f64::NEG_INFINITY;
        for j in 0..k {
            if row[j] + c[j] > m {
                m = row[j] + c[j];
            }
        }
        let mut s = 0.0;
        for j in 0..k {
            e[j] = math::exp(row[j] + c[j] - m);
            s += e[j];
        }
        for j in 0..k {
            acc[j].add(if j == y { 1.0 - e[j] / s } else { -e[j] / s });
        }
    }
    acc.iter().map(|a| a.value()).collect()
}

/// lse(z + c); an empty `c` means no shift.
fn lse_shifted(z: &[f64], c: &[f64]) -> f64 {
    let at = |j: usize| if c.is_empty() { z[j] } else { z[j] + c[j] };
    let mut m = f64::NEG_INFINITY;
    for j in 0..z.len() {
        if at(j) > m {
            m = at(j);
        }
    }
    let mut s = 0.0;
    for j in 0..z.len() {
        s += math::exp(at(j) - m);
    }
    m + math::ln(s)
}

/// [`delta_loglik`] restricted to the class-k axis, Δℓ_k(t) = Δℓ(t·e_k).
/// Strictly concave in t with derivative N_k - Σ_n p_k(z_n + t·e_k).
pub fn delta_loglik_1d(data: &LabeledLogits, k: usize, t: f64) -> f64 {
    assert!(k < data.n_classes(), "class index out of range");
    Axis::new(data, k).delta(t)
}

/// Cached per-class view: base probabilities p_k(z_n) per row, so evaluations
/// along the class axis cost O(N) instead of O(N*K).
pub(crate) struct Axis {
    pk0: Vec<f64>,
    n_k: usize,
    n: usize,
}

impl Axis {
    pub(crate) fn new(data: &LabeledLogits, k: usize) -> Axis {
        let mut pk0 = Vec::with_capacity(data.n_instances());
        for row in data.logits().rows_iter() {
            let lse = lse_shifted(row, &[]);
            pk0.push(math::exp(row[k] - lse));
        }
        Axis {
            pk0,
            n_k: data.class_counts()[k],
            n: data.n_instances(),
        }
    }

    /// Δℓ_k(t) = t*N_k - Σ_n ln(1 + (e^t - 1) p_n), with the log evaluated as
    /// ln1p(p·expm1(t)) for t <= 0 and t + ln1p((1-p)·expm1(-t)) for t > 0,
    /// which stays exact out to |t| ~ clamp instead of overflowing near 709.
    pub(crate) fn delta(&self, t: f64) -> f64 {
        let mut s = CompensatedSum::default();
        if t <= 0.0 {
            let em = math::expm1(t);
            for &p in &self.pk0 {
                s.add(math::ln1p(em * p));
            }
        } else {
            let em = math::expm1(-t);
            for &p in &self.pk0 {
                s.add(t + math::ln1p((1.0 - p) * em));
            }
        }
        t * self.n_k as f64 - s.value()
    }

    /// dΔℓ_k/dt = N_k - Σ_n p_n(t), strictly decreasing in t.
    pub(crate) fn deriv(&self, t: f64) -> f64 {
        let mut s = CompensatedSum::default();
        if t <= 0.0 {
            let et = math::exp(t);
            for &p in &self.pk0 {
                let q = p * et;
                s.add(q / (1.0 - p + q));
            }
        } else {
            let emt = math::exp(-t);
            for &p in &self.pk0 {
                s.add(p / (p + (1.0 - p) * emt));
            }
        }
        self.n_k as f64 - s.value()
    }
}

/// Unique maximizer of Δℓ_k and its value, by bisection on the strictly
/// decreasing derivative. Exists only when class k is neither absent nor
/// exhaustive (0 < N_k < N).
pub fn family_max_1d(data: &LabeledLogits, k: usize, cfg: &SolverConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    if k >= data.n_classes() {
        return Err(Error::OutOfRange {
            what: "class index",
            value: k as f64,
        });
    }
    let axis = Axis::new(data, k);
    family_max_axis(&axis, k, cfg)
}

fn family_max_axis(axis: &Axis, class: usize, cfg: &SolverConfig) -> Result<(f64, f64)> {
    if axis.n_k == 0 || axis.n_k == axis.n {
        return Err(Error::DegenerateClass { class });
    }
    // bracket the sign change of g; g -> N_k > 0 on the left, N_k - N < 0 on
    // the right, so both probes succeed before the clamp
    let mut lo = -cfg.bracket_init;
    while axis.deriv(lo) <= 0.0 && lo > -cfg.clamp {
        lo = (lo * 2.0).max(-cfg.clamp);
    }
    let mut hi = cfg.bracket_init;
    while axis.deriv(hi) >= 0.0 && hi < cfg.clamp {
        hi = (hi * 2.0).min(cfg.clamp);
    }
    for _ in 0..cfg.max_iter {
        if hi - lo <= cfg.tol_t {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if axis.deriv(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t_star = 0.5 * (lo + hi);
    let residual = math::abs(axis.deriv(t_star));
    if residual > cfg.effective_tol_delta(axis.n) {
        return Err(Error::SolverBudgetExceeded { residual });
    }
    Ok((t_star, axis.delta(t_star)))
}

/// One-sided root of h(t) = Δℓ_k(t) - target, moving outward from `center`
/// in direction `dir` (±1.0). Requires h(center) >= 0. Returns the endpoint
/// and its certified residual; ±∞ with residual 0 when the budget is never
/// exhausted on this side (flat tail, or the clamp is reached first).
fn solve_side(
    axis: &Axis,
    center: f64,
    dir: f64,
    target: f64,
    tol: f64,
    cfg: &SolverConfig,
) -> Result<(f64, f64)> {
    let h = |t: f64| axis.delta(t) - target;
    let mut a = center;
    let mut prev = h(center);
    let mut w = cfg.bracket_init;
    let b;
    loop {
        let t_raw = center + dir * w;
        let t = t_raw.clamp(-cfg.clamp, cfg.clamp);
        let ht = h(t);
        if ht < 0.0 {
            b = t;
            break;
        }
        // saturation: the window [t/2, t] moved the value by less than the
        // residual tolerance while the budget is still not exhausted
        if math::abs(ht - prev) < tol {
            return Ok((dir * f64::INFINITY, 0.0));
        }
        if t != t_raw || math::abs(t) >= cfg.clamp {
            return Ok((dir * f64::INFINITY, 0.0));
        }
        a = t;
        prev = ht;
        w *= 2.0;
    }
    // invariant: h(a) >= 0 > h(b)
    let mut b = b;
    for _ in 0..cfg.max_iter {
        if math::abs(b - a) <= cfg.tol_t {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        if h(mid) >= 0.0 {
            a = mid;
        } else {
            b = mid;
        }
    }
    let t = 0.5 * (a + b);
    let residual = math::abs(h(t));
    if residual > tol {
        return Err(Error::SolverBudgetExceeded { residual });
    }
    Ok((t, residual))
}

/// Both endpoints for one (class, alpha); `fam` carries a precomputed family
/// maximizer when the caller already has one. Returns the endpoints plus the
/// number of one-sided root-finds actually performed.
fn solve_axis(
    axis: &Axis,
    class: usize,
    alpha: AlphaLevel,
    mode: Mode,
    fam: Option<(f64, f64)>,
    cfg: &SolverConfig,
) -> Result<(ShiftEndpoints, u64)> {
    if alpha.alpha() == 0.0 {
        // ln(0) budget is never exhausted; no solving to do
        return Ok((
            ShiftEndpoints {
                t_minus: f64::NEG_INFINITY,
                t_plus: f64::INFINITY,
                residual_minus: 0.0,
                residual_plus: 0.0,
            },
            0,
        ));
    }
    let tol = cfg.effective_tol_delta(axis.n);
    let (center, target) = match mode {
        Mode::Base => (0.0, alpha.log_budget()),
        Mode::FamilyMle => {
            let (t_star, v_star) = match fam {
                Some(f) => f,
                None => family_max_axis(axis, class, cfg)?,
            };
            if alpha.alpha() == 1.0 {
                // the alpha-cut at the maximum is the single point t_star
                return Ok((
                    ShiftEndpoints {
                        t_minus: t_star,
                        t_plus: t_star,
                        residual_minus: 0.0,
                        residual_plus: 0.0,
                    },
                    0,
                ));
            }
            (t_star, v_star + alpha.log_budget())
        }
    };
    let mut root_finds = 0;
    // Δℓ_k has a finite limit on a side exactly when the class count pins its
    // tail slope to zero there: N_k = 0 on the left, N_k = N on the right.
    // The budget then survives the whole side and the endpoint is infinite.
    let (t_minus, residual_minus) = if mode == Mode::Base && axis.n_k == 0 {
        (f64::NEG_INFINITY, 0.0)
    } else {
        root_finds += 1;
        solve_side(axis, center, -1.0, target, tol, cfg)?
    };
    let (t_plus, residual_plus) = if mode == Mode::Base && axis.n_k == axis.n {
        (f64::INFINITY, 0.0)
    } else {
        root_finds += 1;
        solve_side(axis, center, 1.0, target, tol, cfg)?
    };
    Ok((
        ShiftEndpoints {
            t_minus,
            t_plus,
            residual_minus,
            residual_plus,
        },
        root_finds,
    ))
}

/// Endpoints of the plausible shift interval for one class at one level.
///
/// Base mode: roots of Δℓ_k(t) = ln α on each side of 0. Family-mle mode:
/// roots of Δℓ_k(t) - Δℓ_k(t*) = ln α on each side of the maximizer t*.
pub fn solve_endpoints(
    data: &LabeledLogits,
    k: usize,
    alpha: AlphaLevel,
    mode: Mode,
    cfg: &SolverConfig,
) -> Result<ShiftEndpoints> {
    cfg.validate()?;
    if k >= data.n_classes() {
        return Err(Error::OutOfRange {
            what: "class index",
            value: k as f64,
        });
    }
    let axis = Axis::new(data, k);
    solve_axis(&axis, k, alpha, mode, None, cfg).map(|(ep, _)| ep)
}

/// The alpha list as `fit` consumes it: sorted ascending, exact duplicates
/// dropped, never empty.
pub fn prepare_levels(alphas: &[AlphaLevel]) -> Result<Vec<AlphaLevel>> {
    if alphas.is_empty() {
        return Err(Error::EmptyList);
    }
    let mut levels: Vec<AlphaLevel> = alphas.to_vec();
    levels.sort_by(|a, b| {
        a.alpha()
            .partial_cmp(&b.alpha())
            .expect("alpha levels are validated finite")
    });
    levels.dedup_by(|a, b| a.alpha() == b.alpha());
    Ok(levels)
}

/// Endpoints for one class across every level (in the order given), plus the
/// number of one-sided root-finds run. In family-mle mode the per-axis
/// maximizer is solved once and shared across levels. Classes are
/// independent, so callers may fan this out over workers and assemble the
/// result with `DecalibrationModel::from_parts`; levels should come from
/// `prepare_levels` so every class sees the same order.
pub fn fit_axis(
    data: &LabeledLogits,
    class: usize,
    levels: &[AlphaLevel],
    mode: Mode,
    cfg: &SolverConfig,
) -> Result<(Vec<ShiftEndpoints>, u64)> {
    cfg.validate()?;
    if class >= data.n_classes() {
        return Err(Error::OutOfRange {
            what: "class index",
            value: class as f64,
        });
    }
    if !data.has_two_classes() {
        return Err(Error::SingleClassData);
    }
    let axis = Axis::new(data, class);
    let fam = match mode {
        Mode::FamilyMle => Some(family_max_axis(&axis, class, cfg)?),
        Mode::Base => None,
    };
    let mut column = Vec::with_capacity(levels.len());
    let mut root_finds = 0u64;
    for &alpha in levels {
        let (ep, solved) = solve_axis(&axis, class, alpha, mode, fam, cfg)?;
        column.push(ep);
        root_finds += solved;
    }
    Ok((column, root_finds))
}

/// Solve every (alpha, class) endpoint program and assemble the model.
///
/// Alphas are sorted ascending and exact duplicates dropped; the returned
/// model records how many one-sided root-finds ran (2 per class per alpha in
/// the nondegenerate case).
pub fn fit(
    data: &LabeledLogits,
    alphas: &[AlphaLevel],
    mode: Mode,
    cfg: &SolverConfig,
) -> Result<DecalibrationModel> {
    cfg.validate()?;
    let levels = prepare_levels(alphas)?;
    let k = data.n_classes();
    let n = data.n_instances();
    let mut per_class: Vec<Vec<ShiftEndpoints>> = Vec::with_capacity(k);
    let mut root_finds = 0u64;
    for class in 0..k {
        let (column, solved) = fit_axis(data, class, &levels, mode, cfg)?;
        per_class.push(column);
        root_finds += solved;
    }
    // Stored layout is [alpha][class].
    let endpoints: Vec<Vec<ShiftEndpoints>> = (0..levels.len())
        .map(|ai| per_class.iter().map(|col| col[ai]).collect())
        .collect();
    DecalibrationModel::from_parts(
        k,
        n,
        mode,
        levels,
        endpoints,
        cfg.clamp,
        cfg.effective_tol_delta(n),
        root_finds,
    )
}

// ---------------------------------------------------------------------------
// Multivariate upper bound
// ---------------------------------------------------------------------------

fn project_onto_hyperplane(g: &mut [f64]) {
    let mean: f64 = g.iter().sum::<f64>() / g.len() as f64;
    for x in g.iter_mut() {
        *x -= mean;
    }
}

fn norm2(g: &[f64]) -> f64 {
    math::sqrt(g.iter().map(|x| x * x).sum())
}

fn logp_only(z: &[f64], c: &[f64], k: usize) -> f64 {
    z[k] + c[k] - lse_shifted(z, c)
}

fn logp_and_grad(z: &[f64], c: &[f64], k: usize) -> (f64, Vec<f64>) {
    let kk = z.len();
    let mut m = f64::NEG_INFINITY;
    for j in 0..kk {
        if z[j] + c[j] > m {
            m = z[j] + c[j];
        }
    }
    let mut e = vec![0.0; kk];
    let mut s = 0.0;
    for j in 0..kk {
        e[j] = math::exp(z[j] + c[j] - m);
        s += e[j];
    }
    let mut grad: Vec<f64> = e.iter().map(|x| -x / s).collect();
    grad[k] += 1.0;
    (z[k] + c[k] - m - math::ln(s), grad)
}

fn delta_and_grad(data: &LabeledLogits, c: &[f64]) -> (f64, Vec<f64>) {
    (delta_loglik(data, c), delta_loglik_grad(data, c))
}

/// Projected gradient ascent with an Armijo backtracking line search; the
/// trial step is the Barzilai-Borwein spectral length from the last accepted
/// move. `f_only` returns -inf outside the feasible region. The gradient from
/// `f_grad` is projected onto the hyperplane sum(c) = 0 before stepping.
/// Returns (objective, projected gradient norm) at exit.
fn ascend<F, G>(c: &mut Vec<f64>, f_only: F, f_grad: G, max_steps: usize, gtol: f64) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64,
    G: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let (mut fv, mut g) = f_grad(c);
    project_onto_hyperplane(&mut g);
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut fallback = 1.0;
    for _ in 0..max_steps {
        let gn = norm2(&g);
        if gn <= gtol {
            return (fv, gn);
        }
        let mut step = match &prev {
            Some((pc, pg)) => {
                let mut sts = 0.0;
                let mut sty = 0.0;
                for j in 0..c.len() {
                    let s = c[j] - pc[j];
                    let y = pg[j] - g[j];
                    sts += s * s;
                    sty += s * y;
                }
                if sty > 0.0 {
                    (sts / sty).clamp(1e-12, 1e8)
                } else {
                    fallback * 2.0
                }
            }
            None => fallback,
        };
        let g2 = gn * gn;
        let mut accepted = false;
        for _ in 0..80 {
            let trial: Vec<f64> = c.iter().zip(&g).map(|(a, b)| a + step * b).collect();
            let ft = f_only(&trial);
            if ft.is_finite() && ft >= fv + 1e-4 * step * g2 {
                let (ft_full, mut gt) = f_grad(&trial);
                project_onto_hyperplane(&mut gt);
                prev = Some((core::mem::replace(c, trial), core::mem::replace(&mut g, gt)));
                fv = ft_full;
                fallback = step;
                accepted = true;
                break;
            }
            step *= 0.5;
            if step < 1e-18 {
                break;
            }
        }
        if !accepted {
            return (fv, norm2(&g));
        }
    }
    (fv, norm2(&g))
}

/// Within-family maximizer of Δℓ over the hyperplane sum(c) = 0.
fn family_max_multivariate(
    data: &LabeledLogits,
    gtol: f64,
    max_steps: usize,
) -> (Vec<f64>, f64) {
    let mut c = vec![0.0; data.n_classes()];
    let (v, _) = ascend(
        &mut c,
        |cc| delta_loglik(data, cc),
        |cc| delta_and_grad(data, cc),
        max_steps,
        gtol,
    );
    (c, v)
}

/// Largest p_k(x; c) over the full shift α-cut, by a log-barrier interior
/// method on the hyperplane sum(c) = 0 (stages μ ∈ {1, 0.1, 0.01, 0.001},
/// each capped at 500 ascent steps), polished by a line search onto the
/// active budget boundary. In base mode the one-dimensional feasible point
/// t_k⁺·e_k is also evaluated, so the result dominates the per-class bound up
/// to solver slack.
pub fn upper_bound_multivariate(
    data: &LabeledLogits,
    z: &[f64],
    k: usize,
    alpha: AlphaLevel,
    mode: Mode,
    cfg: &SolverConfig,
) -> Result<f64> {
    cfg.validate()?;
    let kk = data.n_classes();
    if z.len() != kk {
        return Err(Error::LengthMismatch {
            expected: kk,
            got: z.len(),
        });
    }
    if k >= kk {
        return Err(Error::OutOfRange {
            what: "class index",
            value: k as f64,
        });
    }
    if alpha.alpha() == 0.0 {
        return Err(Error::OutOfRange {
            what: "alpha (multivariate bound requires alpha > 0)",
            value: 0.0,
        });
    }
    if !data.has_two_classes() {
        return Err(Error::SingleClassData);
    }
    if mode == Mode::FamilyMle {
        // the within-family maximum is attained only when every class appears
        if let Some(class) = data.class_counts().iter().position(|&c| c == 0) {
            return Err(Error::DegenerateClass { class });
        }
    }
    let n = data.n_instances();
    let (mut c, v_star) = family_max_multivariate(data, cfg.effective_tol_delta(n), 500);
    let thr = match mode {
        Mode::Base => alpha.log_budget(),
        Mode::FamilyMle => v_star + alpha.log_budget(),
    };
    if delta_loglik(data, &c) - thr < 1e-12 {
        // feasible set is (numerically) the family maximizer alone
        return Ok(math::exp(logp_only(z, &c, k)));
    }
    let mut grad_norm = f64::INFINITY;
    for &mu in &[1.0, 0.1, 0.01, 0.001] {
        let f_only = |cc: &[f64]| {
            let gap = delta_loglik(data, cc) - thr;
            if gap <= 0.0 {
                return f64::NEG_INFINITY;
            }
            logp_only(z, cc, k) + mu * math::ln(gap)
        };
        let f_grad = |cc: &[f64]| {
            let (dv, dg) = delta_and_grad(data, cc);
            let gap = dv - thr;
            let (lp, mut lg) = logp_and_grad(z, cc, k);
            for j in 0..kk {
                lg[j] += mu / gap * dg[j];
            }
            (lp + mu * math::ln(gap), lg)
        };
        let (_, gn) = ascend(&mut c, f_only, f_grad, 500, 1e-6);
        grad_norm = gn;
    }
    if grad_norm > 1e-6 {
        return Err(Error::NotConverged { grad_norm });
    }
    let mut best = logp_only(z, &c, k);
    // the barrier keeps ~mu of slack to the boundary; ride the objective
    // gradient onto it to recover the last fraction of probability
    let (_, mut d) = logp_and_grad(z, &c, k);
    project_onto_hyperplane(&mut d);
    let dn = norm2(&d);
    if dn > 1e-12 {
        let eval = |s: f64| -> (f64, f64) {
            let cc: Vec<f64> = c.iter().zip(&d).map(|(a, b)| a + s * b).collect();
            (delta_loglik(data, &cc) - thr, logp_only(z, &cc, k))
        };
        let mut lo = 0.0;
        let mut hi = 1.0 / dn;
        let mut crossed = false;
        for _ in 0..60 {
            let (gap, lp) = eval(hi);
            if gap < 0.0 {
                crossed = true;
                break;
            }
            best = best.max(lp);
            lo = hi;
            hi *= 2.0;
        }
        if crossed {
            for _ in 0..cfg.max_iter {
                if hi - lo <= cfg.tol_t * (1.0 + lo) {
                    break;
                }
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                if eval(mid).0 >= 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            best = best.max(eval(lo).1);
        }
    }
    if mode == Mode::Base {
        let axis = Axis::new(data, k);
        let (ep, _) = solve_axis(&axis, k, alpha, Mode::Base, None, cfg)?;
        let lp_1d = if ep.t_plus == f64::INFINITY {
            0.0
        } else {
            let mut shift = vec![0.0; kk];
            shift[k] = ep.t_plus;
            logp_only(z, &shift, k)
        };
        best = best.max(lp_1d);
    }
    Ok(math::exp(best))
}
