//! JSON mirror of the synthetic-task configuration (the core crate stays
//! serialization-free).

use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

use credal_core::synth::SynthConfig;

use crate::error::AppError;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfigDoc {
    pub k: usize,
    pub d: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub separation: f64,
    pub miscal_bias: Vec<f64>,
    pub miscal_noise: f64,
    #[serde(default)]
    pub seed: u64,
}

pub fn read_synth_config(path: &Path, seed_override: Option<u64>) -> Result<SynthConfig, AppError> {
    let text = fs::read_to_string(path).map_err(AppError::io(path))?;
    let doc: SynthConfigDoc = serde_json::from_str(&text)
        .map_err(|e| AppError::parse(path, e.line(), e.to_string()))?;
    Ok(SynthConfig {
        k: doc.k,
        d: doc.d,
        n_train: doc.n_train,
        n_test: doc.n_test,
        separation: doc.separation,
        miscal_bias: doc.miscal_bias,
        miscal_noise: doc.miscal_noise,
        seed: seed_override.unwrap_or(doc.seed),
    })
}
