//! Probability-space view of a fitted model: per-class interval boxes,
//! coherence tightening, membership, nestedness, and argmax feasibility.

use alloc::vec::Vec;

use crate::error::Error;
use crate::Result;
use crate::math;
use crate::types::{
    AlphaLevel, BoxCredalSet, DecalibrationModel, ProbabilityInterval, ProbabilityVector,
    NEST_TOL, SIMPLEX_TOL,
};

/// Class-k probability after shifting that class's logit by `t`, expressed
/// through the unshifted softmax mass `q` so neither branch exponentiates a
/// large positive argument.
fn shifted_prob(q: f64, t: f64) -> f64 {
    if t == f64::NEG_INFINITY {
        return 0.0;
    }
    if t == f64::INFINITY {
        return 1.0;
    }
    if t <= 0.0 {
        let e = math::exp(t);
        q * e / (1.0 - q + q * e)
    } else {
        q / (q + (1.0 - q) * math::exp(-t))
    }
}

/// Map the fitted shift endpoints for `alpha` through the softmax at `z`,
/// giving one probability interval per class. Infinite endpoints become the
/// exact bounds 0 and 1. The returned box is not tightened.
///
/// `alpha` must be one of the levels the model was fitted at. In family-mle
/// mode at alpha near 1 the per-class intervals can collapse around a point
/// that does not lie on the simplex (the per-axis maximizers are solved
/// independently), in which case the box is rejected as empty.
pub fn predict_box(
    model: &DecalibrationModel,
    z: &[f64],
    alpha: AlphaLevel,
) -> Result<BoxCredalSet> {
    let k = model.n_classes();
    if z.len() != k {
        return Err(Error::LengthMismatch { expected: k, got: z.len() });
    }
    if z.iter().any(|x| !x.is_finite()) {
        return Err(Error::NotFinite { what: "logit" });
    }
    let eps = model.endpoints_for(alpha.alpha())?;
    let lse = math::log_sum_exp(z);
    let mut ivs = Vec::with_capacity(k);
    for (zk, ep) in z.iter().zip(eps) {
        let q = math::exp(zk - lse);
        let lo = shifted_prob(q, ep.t_minus);
        let hi = shifted_prob(q, ep.t_plus);
        // monotone in t up to rounding; never let rounding invert a
        // degenerate interval
        ivs.push(ProbabilityInterval::new(lo, hi.max(lo))?);
    }
    BoxCredalSet::new(ivs)
}

/// One-pass coherence tightening: raise each lower bound to what the other
/// uppers leave over, cap each upper by what the other lowers demand. For
/// interval sets that meet the simplex this single pass is a fixed point.
pub fn tighten_reachable(b: &BoxCredalSet) -> Result<BoxCredalSet> {
    // Implied bounds carry summation rounding; a cut below this is noise and
    // the stored bound (always sound) is kept, so degenerate boxes that meet
    // the simplex exactly pass through bit-identical.
    const NOISE: f64 = 1e-14;
    let k = b.n_classes();
    let mut ivs = Vec::with_capacity(k);
    for i in 0..k {
        let mut sum_l_others = math::CompensatedSum::default();
        let mut sum_u_others = math::CompensatedSum::default();
        for j in 0..k {
            if j != i {
                sum_l_others.add(b.lower(j));
                sum_u_others.add(b.upper(j));
            }
        }
        let implied_lo = (1.0 - sum_u_others.value()).clamp(0.0, 1.0);
        let implied_hi = (1.0 - sum_l_others.value()).clamp(0.0, 1.0);
        let lo = if implied_lo > b.lower(i) + NOISE { implied_lo } else { b.lower(i) };
        let hi = if implied_hi < b.upper(i) - NOISE { implied_hi } else { b.upper(i) };
        // boxes are allowed to miss the simplex by up to SIMPLEX_TOL; within
        // that band the formulas can cross by rounding
        ivs.push(ProbabilityInterval::new(lo, hi.max(lo))?);
    }
    Ok(BoxCredalSet::new_reachable(ivs))
}

/// Interval membership with SIMPLEX_TOL slack on every bound.
pub fn contains(b: &BoxCredalSet, p: &ProbabilityVector) -> bool {
    assert_eq!(b.n_classes(), p.len(), "class count mismatch");
    p.as_slice()
        .iter()
        .enumerate()
        .all(|(k, &x)| x >= b.lower(k) - SIMPLEX_TOL && x <= b.upper(k) + SIMPLEX_TOL)
}

/// True when every interval of `inner` sits inside the matching interval of
/// `outer`, with NEST_TOL slack.
pub fn is_nested(inner: &BoxCredalSet, outer: &BoxCredalSet) -> bool {
    assert_eq!(inner.n_classes(), outer.n_classes(), "class count mismatch");
    (0..inner.n_classes()).all(|k| {
        inner.lower(k) >= outer.lower(k) - NEST_TOL && inner.upper(k) <= outer.upper(k) + NEST_TOL
    })
}

/// Can some member of the box (intersected with the simplex) put class `j`
/// in first place? Requires a tightened box.
///
/// Let m = upper_j. A witness with p_j = v exists for some v <= m iff (a) v
/// can reach every other class's lower bound and (b) capping every class at
/// v still leaves enough total mass to reach 1. Both tests are monotone in
/// v, and on a tightened box v = m never overshoots the simplex from below,
/// so checking v = m decides feasibility.
pub fn can_be_argmax(b: &BoxCredalSet, j: usize) -> bool {
    assert!(b.reachable(), "can_be_argmax needs a tightened box");
    assert!(j < b.n_classes(), "class index out of range");
    let m = b.upper(j);
    let mut max_lower = 0.0_f64;
    let mut capacity = m;
    for i in 0..b.n_classes() {
        max_lower = max_lower.max(b.lower(i));
        if i != j {
            capacity += b.upper(i).min(m);
        }
    }
    m + NEST_TOL >= max_lower && capacity >= 1.0 - NEST_TOL
}
