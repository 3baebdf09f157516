//! Synthetic classification tasks whose ground-truth conditional
//! distribution is available in closed form, for coverage/efficiency and
//! OOD experiments that need an exact reference.
//!
//! Generative model: k class means on a regular simplex with pairwise
//! distance `separation`, spanning the first k-1 feature coordinates;
//! features are the mean plus isotropic unit noise, priors are equal. The
//! Bayes posterior is then softmax(x . mu_j - |mu_j|^2 / 2), and "model
//! logits" are its log plus `miscal_bias` plus `miscal_noise` times a fresh
//! standard normal per entry, simulating a related but decalibrated
//! classifier. OOD features are unit noise around a point displaced
//! 3 * separation along a direction orthogonal to the class-mean span
//! (an arbitrary random direction when d = k-1 leaves no room).
//!
//! All draws come from a single SplitMix64 sequence in a fixed order:
//! the OOD direction, then per train row (component, d feature normals,
//! one label uniform, k noise normals), then the test rows (component,
//! features, noise), then the OOD rows (features, noise). Noise normals
//! are drawn even when `miscal_noise` is zero, so the sampled world is
//! identical across noise settings for a fixed seed.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::Result;
use crate::math;
use crate::rng::SplitMix64;
use crate::types::{LabeledLogits, LogitMatrix, ProbabilityVector};

/// Generator settings; see the module docs for the generative model.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub k: usize,
    pub d: usize,
    pub n_train: usize,
    pub n_test: usize,
    /// Pairwise distance between class means, in units of the feature noise.
    pub separation: f64,
    /// Added to every instance's log-posterior, one entry per class.
    pub miscal_bias: Vec<f64>,
    /// Scale of the zero-mean perturbation applied per logit.
    pub miscal_noise: f64,
    pub seed: u64,
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        if self.k < 2 {
            return Err(Error::InvalidConfig { reason: "need at least two classes" });
        }
        if self.d + 1 < self.k {
            return Err(Error::InvalidConfig {
                reason: "feature dimension too small for the class simplex (need d >= k-1)",
            });
        }
        if self.n_train == 0 || self.n_test == 0 {
            return Err(Error::InvalidConfig { reason: "instance counts must be positive" });
        }
        if !self.separation.is_finite() || self.separation <= 0.0 {
            return Err(Error::InvalidConfig { reason: "separation must be positive and finite" });
        }
        if !self.miscal_noise.is_finite() || self.miscal_noise < 0.0 {
            return Err(Error::InvalidConfig {
                reason: "miscal_noise must be nonnegative and finite",
            });
        }
        if self.miscal_bias.len() != self.k {
            return Err(Error::InvalidConfig { reason: "miscal_bias length must equal k" });
        }
        if self.miscal_bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidConfig { reason: "miscal_bias entries must be finite" });
        }
        Ok(())
    }
}

/// Regular simplex vertices via the Helmert basis of the sum-zero subspace:
/// mean i gets coordinates s * h_j[i] for j = 1..k-1, where h_j has j
/// entries 1/sqrt(j(j+1)) followed by -j/sqrt(j(j+1)). Pairwise distances
/// all equal s * sqrt(2), so s = separation / sqrt(2).
fn class_means(k: usize, d: usize, separation: f64) -> Vec<Vec<f64>> {
    let s = separation / math::sqrt(2.0);
    (0..k)
        .map(|i| {
            let mut mu = vec![0.0; d];
            for j in 1..k {
                let denom = math::sqrt((j * (j + 1)) as f64);
                if i < j {
                    mu[j - 1] = s / denom;
                } else if i == j {
                    mu[j - 1] = -(j as f64) * s / denom;
                }
            }
            mu
        })
        .collect()
}

/// Exact Bayes log-posterior under unit isotropic noise and equal priors.
fn log_posterior(x: &[f64], means: &[Vec<f64>]) -> Vec<f64> {
    let mut lp: Vec<f64> = means
        .iter()
        .map(|mu| {
            let dot: f64 = x.iter().zip(mu).map(|(a, b)| a * b).sum();
            let nrm: f64 = mu.iter().map(|m| m * m).sum();
            dot - 0.5 * nrm
        })
        .collect();
    let lse = math::log_sum_exp(&lp);
    for v in &mut lp {
        *v -= lse;
    }
    lp
}

fn sample_label(rng: &mut SplitMix64, lp: &[f64]) -> usize {
    let u = rng.next_f64();
    let mut cum = 0.0;
    for (i, &l) in lp.iter().enumerate() {
        cum += math::exp(l);
        if u < cum {
            return i;
        }
    }
    lp.len() - 1
}

fn push_logits(out: &mut Vec<f64>, lp: &[f64], cfg: &SynthConfig, rng: &mut SplitMix64) {
    for (j, &l) in lp.iter().enumerate() {
        out.push(l + cfg.miscal_bias[j] + cfg.miscal_noise * rng.next_normal());
    }
}

/// Produce (train, test_logits, test_gts, ood_logits); the OOD block has
/// n_test rows. Deterministic in the seed; see the module docs for the
/// exact draw order.
pub fn generate(
    cfg: &SynthConfig,
) -> Result<(LabeledLogits, LogitMatrix, Vec<ProbabilityVector>, LogitMatrix)> {
    cfg.validate()?;
    let (k, d) = (cfg.k, cfg.d);
    let means = class_means(k, d, cfg.separation);
    let mut rng = SplitMix64::new(cfg.seed);

    let mut dir: Vec<f64> = (0..d).map(|_| rng.next_normal()).collect();
    if d > k - 1 {
        // restrict to the orthogonal complement of the class-mean span
        for v in dir.iter_mut().take(k - 1) {
            *v = 0.0;
        }
    }
    let nrm = math::sqrt(dir.iter().map(|v| v * v).sum::<f64>());
    if nrm > 0.0 {
        for v in &mut dir {
            *v /= nrm;
        }
    } else {
        dir[d - 1] = 1.0;
    }

    let mut train_z = Vec::with_capacity(cfg.n_train * k);
    let mut train_y = Vec::with_capacity(cfg.n_train);
    for _ in 0..cfg.n_train {
        let comp = rng.next_index(k);
        let x: Vec<f64> = (0..d).map(|j| means[comp][j] + rng.next_normal()).collect();
        let lp = log_posterior(&x, &means);
        train_y.push(sample_label(&mut rng, &lp));
        push_logits(&mut train_z, &lp, cfg, &mut rng);
    }

    let mut test_z = Vec::with_capacity(cfg.n_test * k);
    let mut gts = Vec::with_capacity(cfg.n_test);
    for _ in 0..cfg.n_test {
        let comp = rng.next_index(k);
        let x: Vec<f64> = (0..d).map(|j| means[comp][j] + rng.next_normal()).collect();
        let lp = log_posterior(&x, &means);
        gts.push(ProbabilityVector::new(lp.iter().map(|&l| math::exp(l)).collect())?);
        push_logits(&mut test_z, &lp, cfg, &mut rng);
    }

    let shift = 3.0 * cfg.separation;
    let mut ood_z = Vec::with_capacity(cfg.n_test * k);
    for _ in 0..cfg.n_test {
        let x: Vec<f64> = (0..d).map(|j| shift * dir[j] + rng.next_normal()).collect();
        let lp = log_posterior(&x, &means);
        push_logits(&mut ood_z, &lp, cfg, &mut rng);
    }

    let train = LabeledLogits::new(LogitMatrix::new(train_z, k)?, train_y)?;
    let test = LogitMatrix::new(test_z, k)?;
    let ood = LogitMatrix::new(ood_z, k)?;
    Ok((train, test, gts, ood))
}
