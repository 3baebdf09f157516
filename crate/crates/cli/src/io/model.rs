//! Versioned JSON model document.
//!
//! Finite numbers are written in serde_json's shortest round-trip form, so a
//! write/read/write cycle is byte-identical. Infinite shift endpoints (the
//! structural cases: a class absent from or occupying all of the training
//! labels, and the alpha = 0 budget) appear as the strings "inf"/"-inf".

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use credal_core::{AlphaLevel, DecalibrationModel, Mode, ShiftEndpoints};

use crate::error::AppError;

pub const SCHEMA: &str = "credal-decal/1";

#[derive(Serialize, Deserialize)]
struct ModelDoc {
    schema: String,
    k: usize,
    n_train: usize,
    mode: String,
    clamp: f64,
    tol: f64,
    root_finds: u64,
    alphas: Vec<f64>,
    /// endpoints[alpha_idx][class], alphas ascending.
    endpoints: Vec<Vec<EndpointDoc>>,
}

#[derive(Serialize, Deserialize)]
struct EndpointDoc {
    #[serde(with = "maybe_inf")]
    t_minus: f64,
    #[serde(with = "maybe_inf")]
    t_plus: f64,
    residual_minus: f64,
    residual_plus: f64,
}

mod maybe_inf {
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        if x.is_finite() {
            s.serialize_f64(*x)
        } else if *x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Tag(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(x),
            Raw::Tag(s) if s == "inf" => Ok(f64::INFINITY),
            Raw::Tag(s) if s == "-inf" => Ok(f64::NEG_INFINITY),
            Raw::Tag(s) => Err(D::Error::custom(format!("bad endpoint tag {s:?}"))),
        }
    }
}

pub fn write_model(model: &DecalibrationModel, path: &Path) -> Result<(), AppError> {
    let doc = ModelDoc {
        schema: SCHEMA.to_string(),
        k: model.n_classes(),
        n_train: model.n_train(),
        mode: model.mode().to_string(),
        clamp: model.clamp(),
        tol: model.tol(),
        root_finds: model.root_finds(),
        alphas: model.alphas().iter().map(AlphaLevel::alpha).collect(),
        endpoints: (0..model.alphas().len())
            .map(|ai| {
                model
                    .endpoints_at(ai)
                    .iter()
                    .map(|ep| EndpointDoc {
                        t_minus: ep.t_minus,
                        t_plus: ep.t_plus,
                        residual_minus: ep.residual_minus,
                        residual_plus: ep.residual_plus,
                    })
                    .collect()
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc)
        .map_err(|e| AppError::Validation(format!("model serialization: {e}")))?;
    text.push('\n');
    fs::write(path, text).map_err(AppError::io(path))
}

pub fn read_model(path: &Path) -> Result<DecalibrationModel, AppError> {
    let text = fs::read_to_string(path).map_err(AppError::io(path))?;
    // the schema tag gets its own diagnostic, so peek at it before the
    // strict parse
    if let Ok(head) = serde_json::from_str::<serde_json::Value>(&text) {
        if let Some(schema) = head.get("schema").and_then(|v| v.as_str()) {
            if schema != SCHEMA {
                return Err(AppError::SchemaVersion {
                    found: schema.to_string(),
                });
            }
        }
    }
    let doc: ModelDoc = serde_json::from_str(&text)
        .map_err(|e| AppError::parse(path, e.line(), e.to_string()))?;
    if doc.schema != SCHEMA {
        return Err(AppError::SchemaVersion { found: doc.schema });
    }
    let mode: Mode = doc.mode.parse()?;
    let alphas = doc
        .alphas
        .into_iter()
        .map(AlphaLevel::new)
        .collect::<credal_core::Result<Vec<_>>>()?;
    let endpoints: Vec<Vec<ShiftEndpoints>> = doc
        .endpoints
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|ep| ShiftEndpoints {
                    t_minus: ep.t_minus,
                    t_plus: ep.t_plus,
                    residual_minus: ep.residual_minus,
                    residual_plus: ep.residual_plus,
                })
                .collect()
        })
        .collect();
    DecalibrationModel::from_parts(
        doc.k,
        doc.n_train,
        mode,
        alphas,
        endpoints,
        doc.clamp,
        doc.tol,
        doc.root_finds,
    )
    .map_err(AppError::from)
}
