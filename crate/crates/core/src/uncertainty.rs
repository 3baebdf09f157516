//! Entropy extrema over a box, zero-one epistemic uncertainty, the combined
//! report, and ranking for selection. All entropies are in nats.

use alloc::vec;
use alloc::vec::Vec;

use crate::credal::{can_be_argmax, tighten_reachable};
use crate::error::Error;
use crate::Result;
use crate::math;
use crate::types::{BoxCredalSet, ProbabilityVector, UncertaintyReport, NEST_TOL, SIMPLEX_TOL};

/// Class-count ceiling for exact vertex enumeration; larger boxes fall back
/// to the greedy concentration heuristic.
const EXACT_MIN_ENTROPY_MAX_CLASSES: usize = 15;

/// Which epistemic-uncertainty score drives ranking and sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UncertaintyMeasure {
    EuEntropy,
    EuZeroOne,
}

fn entropy(p: &[f64]) -> f64 {
    -p.iter().map(|&x| math::xlnx(x)).sum::<f64>()
}

/// Most-uniform member of the box: p_k = clamp(lambda, l_k, u_k) with lambda
/// chosen so the masses sum to 1. The mass is piecewise linear and increasing
/// in lambda, so lambda is found exactly by walking the sorted bounds.
/// Returns the maximum entropy and the witness.
pub fn max_entropy(b: &BoxCredalSet) -> Result<(f64, ProbabilityVector)> {
    let k = b.n_classes();
    let mut bps: Vec<f64> = Vec::with_capacity(2 * k);
    for i in 0..k {
        bps.push(b.lower(i));
        bps.push(b.upper(i));
    }
    bps.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
    let mass = |lam: f64| -> f64 { (0..k).map(|i| lam.clamp(b.lower(i), b.upper(i))).sum() };

    let mut lam = bps[2 * k - 1];
    let mut prev = bps[0];
    let mut m_prev = mass(prev);
    if m_prev >= 1.0 {
        // the lowers alone reach 1 (within box tolerance)
        lam = prev;
    } else {
        for &cur in &bps[1..] {
            let m_cur = mass(cur);
            if m_cur >= 1.0 {
                lam = if m_cur > m_prev {
                    prev + (1.0 - m_prev) * (cur - prev) / (m_cur - m_prev)
                } else {
                    cur
                };
                break;
            }
            prev = cur;
            m_prev = m_cur;
        }
        // if no breakpoint reaches mass 1 the uppers sum to just under 1
        // (within box tolerance) and lam stays at the largest bound
    }
    let p: Vec<f64> = (0..k).map(|i| lam.clamp(b.lower(i), b.upper(i))).collect();
    Ok((entropy(&p), ProbabilityVector::new(p)?))
}

/// Exact entropy minimum: the minimum of a concave function over the
/// box-simplex polytope is attained at a vertex, and every vertex pins all
/// classes but at most one to a bound. Enumerates K * 2^(K-1) candidates.
pub fn min_entropy_exact(b: &BoxCredalSet) -> Result<(f64, ProbabilityVector)> {
    let k = b.n_classes();
    // First pass: strict vertex acceptance, residual snapped into its
    // interval. Second pass only fires for boxes that meet the simplex
    // marginally (within SIMPLEX_TOL); there the residual is kept unclamped
    // so the witness still sums to 1.
    for (eps, snap_to_interval) in [(NEST_TOL, true), (2.0 * SIMPLEX_TOL, false)] {
        let mut best: Option<(f64, Vec<f64>)> = None;
        for free in 0..k {
            let others: Vec<usize> = (0..k).filter(|&i| i != free).collect();
            for mask in 0u64..(1u64 << others.len()) {
                let mut p = vec![0.0; k];
                let mut s = 0.0;
                for (bit, &i) in others.iter().enumerate() {
                    p[i] = if mask & (1 << bit) != 0 { b.upper(i) } else { b.lower(i) };
                    s += p[i];
                }
                let rest = 1.0 - s;
                if rest < b.lower(free) - eps || rest > b.upper(free) + eps {
                    continue;
                }
                p[free] = if snap_to_interval {
                    rest.clamp(b.lower(free), b.upper(free))
                } else {
                    rest.clamp(0.0, 1.0)
                };
                let h = entropy(&p);
                if best.as_ref().is_none_or(|(bh, _)| h < *bh) {
                    best = Some((h, p));
                }
            }
        }
        if let Some((h, p)) = best {
            return Ok((h, ProbabilityVector::new(p)?));
        }
    }
    Err(Error::EmptyBox)
}

/// Greedy entropy minimizer: start every class at its lower bound and hand
/// the leftover mass to classes in order of remaining upper capacity
/// (largest first, index breaking ties). Feasible, deterministic, and an
/// upper bound on the true minimum.
pub fn min_entropy_greedy(b: &BoxCredalSet) -> Result<(f64, ProbabilityVector)> {
    let k = b.n_classes();
    let mut p: Vec<f64> = (0..k).map(|i| b.lower(i)).collect();
    let mut remaining = 1.0 - p.iter().sum::<f64>();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &c| {
        let ca = b.upper(a) - b.lower(a);
        let cc = b.upper(c) - b.lower(c);
        cc.partial_cmp(&ca).unwrap().then(a.cmp(&c))
    });
    for &i in &order {
        if remaining <= 0.0 {
            break;
        }
        let give = remaining.min(b.upper(i) - b.lower(i));
        p[i] += give;
        remaining -= give;
    }
    Ok((entropy(&p), ProbabilityVector::new(p)?))
}

/// Entropy minimum: exact vertex enumeration up to 15 classes, greedy above.
pub fn min_entropy(b: &BoxCredalSet) -> Result<(f64, ProbabilityVector)> {
    if b.n_classes() <= EXACT_MIN_ENTROPY_MAX_CLASSES {
        min_entropy_exact(b)
    } else {
        min_entropy_greedy(b)
    }
}

/// max p_k - p_j over the box-simplex polytope, with the remaining classes
/// collapsed into a total-mass window for the pair. The optimum sits on a
/// vertex of the 2-variable polygon; all candidate corners are tried.
fn max_gap(b: &BoxCredalSet, k: usize, j: usize) -> f64 {
    let (lk, uk) = (b.lower(k), b.upper(k));
    let (lj, uj) = (b.lower(j), b.upper(j));
    let mut rest_l = 0.0;
    let mut rest_u = 0.0;
    for i in 0..b.n_classes() {
        if i != k && i != j {
            rest_l += b.lower(i);
            rest_u += b.upper(i);
        }
    }
    let s_lo = 1.0 - rest_u;
    let s_hi = 1.0 - rest_l;
    let mut best = f64::NEG_INFINITY;
    for &pk in &[lk, uk, s_lo - lj, s_lo - uj, s_hi - lj, s_hi - uj] {
        if pk < lk - NEST_TOL || pk > uk + NEST_TOL {
            continue;
        }
        let pk = pk.clamp(lk, uk);
        for &pj in &[lj, uj, s_lo - pk, s_hi - pk] {
            if pj < lj - NEST_TOL || pj > uj + NEST_TOL {
                continue;
            }
            let pj = pj.clamp(lj, uj);
            let s = pk + pj;
            if s < s_lo - NEST_TOL || s > s_hi + NEST_TOL {
                continue;
            }
            best = best.max(pk - pj);
        }
    }
    best
}

/// Largest drop in the selected class's probability when a different box
/// member picks the argmax: max over argmax-feasible j of
/// max_{p in box} (max_k p_k - p_j). Zero when the box pins a single winner.
/// Requires a tightened box.
pub fn zero_one_eu(b: &BoxCredalSet) -> Result<f64> {
    assert!(b.reachable(), "zero_one_eu needs a tightened box");
    let k = b.n_classes();
    let mut best = 0.0_f64;
    for j in 0..k {
        if !can_be_argmax(b, j) {
            continue;
        }
        for i in 0..k {
            if i != j {
                best = best.max(max_gap(b, i, j));
            }
        }
    }
    Ok(best)
}

/// Tightens the box, then assembles AU = min entropy, TU = max entropy,
/// EU = TU - AU (stored so tu == au + eu_entropy holds exactly), plus the
/// zero-one EU and whether the entropy minimum came from the heuristic.
pub fn uncertainty_report(b: &BoxCredalSet) -> Result<UncertaintyReport> {
    let owned;
    let t = if b.reachable() {
        b
    } else {
        owned = tighten_reachable(b)?;
        &owned
    };
    let (tu_raw, _) = max_entropy(t)?;
    let (au, _) = min_entropy(t)?;
    let eu = (tu_raw - au).max(0.0);
    Ok(UncertaintyReport {
        au,
        eu_entropy: eu,
        tu: au + eu,
        eu_zero_one: zero_one_eu(t)?,
        min_entropy_heuristic: t.n_classes() > EXACT_MIN_ENTROPY_MAX_CLASSES,
    })
}

/// Indices of the `m` most epistemically uncertain boxes, descending by the
/// chosen measure, ties broken by ascending index. `m` is clamped to the
/// list length.
pub fn rank_by_uncertainty(
    boxes: &[BoxCredalSet],
    measure: UncertaintyMeasure,
    m: usize,
) -> Result<Vec<usize>> {
    if boxes.is_empty() {
        return Err(Error::EmptyList);
    }
    let mut scored = Vec::with_capacity(boxes.len());
    for (i, b) in boxes.iter().enumerate() {
        let r = uncertainty_report(b)?;
        let s = match measure {
            UncertaintyMeasure::EuEntropy => r.eu_entropy,
            UncertaintyMeasure::EuZeroOne => r.eu_zero_one,
        };
        scored.push((i, s));
    }
    scored.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    Ok(scored.into_iter().take(m).map(|(i, _)| i).collect())
}
