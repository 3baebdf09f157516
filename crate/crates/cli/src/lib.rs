//! Command-line front end and file formats for the core crate: CSV logit and
//! box tables, the `credal-decal/1` model document, spider-plot SVGs, and the
//! synthetic task generator config.

pub mod cli;
pub mod error;
pub mod io;
pub mod synth_config;
