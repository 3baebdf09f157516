//! Deterministic spider (radar) plots of box credal sets as standalone SVG.
//!
//! One radial axis per class, starting at 12 o'clock and proceeding at
//! angles 2*pi*k/K. Each axis carries a bar from the class's lower to upper
//! probability; an optional point estimate draws as a closed polygon and an
//! optional ground-truth distribution as one dot per class. Classes with
//! zero ground-truth mass get no dot (an origin dot would only clutter the
//! hub). Output is a pure function of the spec with fixed 3-decimal
//! coordinates, so identical specs yield byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use credal_core::{BoxCredalSet, ProbabilityVector};

use crate::error::AppError;

#[derive(Debug, Clone)]
pub struct SpiderPlotSpec {
    pub class_names: Vec<String>,
    pub intervals: BoxCredalSet,
    pub mle: Option<ProbabilityVector>,
    pub gt: Option<ProbabilityVector>,
    /// Probability mapped to the outer ring; bars are clipped to it.
    pub radial_max: f64,
    pub size_px: u32,
}

impl SpiderPlotSpec {
    fn validate(&self) -> Result<(), AppError> {
        let k = self.intervals.n_classes();
        if self.class_names.len() != k {
            return Err(AppError::Validation(format!(
                "{} class names for {k} classes",
                self.class_names.len()
            )));
        }
        for (what, overlay) in [("mle", &self.mle), ("gt", &self.gt)] {
            if let Some(p) = overlay {
                if p.len() != k {
                    return Err(AppError::Validation(format!(
                        "{what} overlay has {} classes, box has {k}",
                        p.len()
                    )));
                }
            }
        }
        if !self.radial_max.is_finite() || self.radial_max <= 0.0 {
            return Err(AppError::Validation(format!(
                "radial_max must be positive, got {}",
                self.radial_max
            )));
        }
        if self.size_px == 0 {
            return Err(AppError::Validation("size_px must be positive".into()));
        }
        Ok(())
    }
}

struct Geometry {
    cx: f64,
    cy: f64,
    r: f64,
    k: usize,
    radial_max: f64,
}

impl Geometry {
    /// Point at `frac` of the full radius along axis `j` (12 o'clock start).
    fn at(&self, j: usize, frac: f64) -> (f64, f64) {
        let theta = -core::f64::consts::FRAC_PI_2
            + 2.0 * core::f64::consts::PI * j as f64 / self.k as f64;
        (
            self.cx + self.r * frac * theta.cos(),
            self.cy + self.r * frac * theta.sin(),
        )
    }

    fn radial(&self, v: f64) -> f64 {
        (v / self.radial_max).clamp(0.0, 1.0)
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub fn render_spider_svg(spec: &SpiderPlotSpec) -> Result<String, AppError> {
    spec.validate()?;
    let size = spec.size_px as f64;
    let g = Geometry {
        cx: size / 2.0,
        cy: size / 2.0,
        r: size * 0.38,
        k: spec.intervals.n_classes(),
        radial_max: spec.radial_max,
    };
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        spec.size_px
    );
    let _ = writeln!(s, r#"<rect width="{0}" height="{0}" fill="white"/>"#, spec.size_px);

    for ring in 1..=4u32 {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.3}" cy="{:.3}" r="{:.3}" fill="none" stroke="#dddddd" stroke-width="1"/>"##,
            g.cx,
            g.cy,
            g.r * f64::from(ring) / 4.0
        );
    }

    for j in 0..g.k {
        let (x, y) = g.at(j, 1.0);
        let _ = writeln!(
            s,
            r##"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}" stroke="#999999" stroke-width="1"/>"##,
            g.cx, g.cy, x, y
        );
        let (lx, ly) = g.at(j, 1.1);
        let _ = writeln!(
            s,
            r#"<text x="{:.3}" y="{:.3}" font-family="monospace" font-size="14" text-anchor="middle" dominant-baseline="middle">{}</text>"#,
            lx,
            ly,
            xml_escape(&spec.class_names[j])
        );
    }

    if let Some(mle) = &spec.mle {
        let mut d = String::new();
        for (j, &p) in mle.as_slice().iter().enumerate() {
            let (x, y) = g.at(j, g.radial(p));
            let _ = write!(d, "{}{x:.3} {y:.3}", if j == 0 { "M" } else { "L" });
        }
        d.push('Z');
        let _ = writeln!(
            s,
            r##"<path d="{d}" fill="#d62728" fill-opacity="0.15" stroke="#d62728" stroke-width="1.5"/>"##
        );
    }

    for j in 0..g.k {
        let (x1, y1) = g.at(j, g.radial(spec.intervals.lower(j)));
        let (x2, y2) = g.at(j, g.radial(spec.intervals.upper(j)));
        let _ = writeln!(
            s,
            r##"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="#1f77b4" stroke-width="6" stroke-linecap="round"/>"##
        );
        // endpoint ticks keep degenerate (point) intervals visible
        for (x, y) in [(x1, y1), (x2, y2)] {
            let _ = writeln!(
                s,
                r##"<circle cx="{x:.3}" cy="{y:.3}" r="3" fill="#1f77b4"/>"##
            );
        }
    }

    if let Some(gt) = &spec.gt {
        for (j, &p) in gt.as_slice().iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            let (x, y) = g.at(j, g.radial(p));
            let _ = writeln!(s, r##"<circle cx="{x:.3}" cy="{y:.3}" r="4" fill="#2ca02c"/>"##);
        }
    }

    s.push_str("</svg>\n");
    Ok(s)
}

pub fn emit_spider_svg(spec: &SpiderPlotSpec, path: &Path) -> Result<(), AppError> {
    let svg = render_spider_svg(spec)?;
    fs::write(path, svg).map_err(AppError::io(path))
}
