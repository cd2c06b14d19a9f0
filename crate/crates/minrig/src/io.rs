//! File formats and rendering: point lists in CSV or JSON, the framework
//! JSON document, and SVG output.
//!
//! Serialization is byte-stable: struct fields serialize in a fixed order,
//! floats use the shortest round-trip representation, and SVG coordinates
//! are written with fixed precision. Writing the same framework twice
//! yields identical bytes.

use crate::construction::{central_frame, FanDecomposition, FanKind, Framework};
use crate::error::{Error, Result};
use crate::geometry::Configuration;
use crate::rigidity::RigidityReport;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// On-disk framework document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameworkFile {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
    pub edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fan: Option<FanDecomposition>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<RigidityReport>,
    /// Per-edge selfstress in edge order, sign matched to the PSD test;
    /// drives the stroke convention when rendering.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stress: Option<Vec<f64>>,
}

impl FrameworkFile {
    pub fn from_parts(
        fw: &Framework,
        fan: Option<&FanDecomposition>,
        report: Option<&RigidityReport>,
        stress: Option<&[f64]>,
    ) -> Self {
        let dim = fw.dim();
        Self {
            dim,
            points: (0..fw.len()).map(|i| fw.config().point(i).to_vec()).collect(),
            edges: fw.edges().to_vec(),
            fan: fan.cloned(),
            report: report.cloned(),
            stress: stress.map(<[f64]>::to_vec),
        }
    }

    pub fn to_framework(&self) -> Result<Framework> {
        if self.points.iter().any(|p| p.len() != self.dim) {
            return Err(Error::DegenerateInput(format!(
                "every point must have {} coordinates",
                self.dim
            )));
        }
        let coords = self.points.iter().flatten().copied().collect();
        let config = Configuration::new(self.dim, coords)?;
        if let Some(stress) = &self.stress {
            if stress.len() != self.edges.len() {
                return Err(Error::DegenerateInput(
                    "stress length must match edge count".into(),
                ));
            }
        }
        Framework::new(config, self.edges.iter().copied())
    }

    /// Pretty JSON with a trailing newline; identical input yields
    /// identical bytes.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable document");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: FrameworkFile = serde_json::from_str(text)
            .map_err(|e| Error::DegenerateInput(format!("malformed framework file: {e}")))?;
        file.to_framework()?;
        Ok(file)
    }
}

#[derive(Deserialize)]
struct PointFileJson {
    dim: usize,
    points: Vec<Vec<f64>>,
}

/// Reads a point set from JSON ({"dim": d, "points": [...]}) or CSV (one
/// point per line, two or three columns, optional header line).
pub fn parse_points(text: &str) -> Result<Configuration> {
    let trimmed = text.trim_start();
    if trimmed.starts_with('{') {
        let file: PointFileJson = serde_json::from_str(trimmed)
            .map_err(|e| Error::DegenerateInput(format!("malformed point file: {e}")))?;
        if file.points.iter().any(|p| p.len() != file.dim) {
            return Err(Error::DegenerateInput(format!(
                "every point must have {} coordinates",
                file.dim
            )));
        }
        let coords = file.points.into_iter().flatten().collect();
        return Configuration::new(file.dim, coords);
    }
    parse_points_csv(text)
}

fn parse_points_csv(text: &str) -> Result<Configuration> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse().ok()).collect();
        match parsed {
            Some(row) => rows.push(row),
            None if rows.is_empty() && lineno == 0 => continue, // header line
            None => {
                return Err(Error::DegenerateInput(format!(
                    "line {}: expected numeric fields, got {line:?}",
                    lineno + 1
                )))
            }
        }
    }
    let dim = match rows.first() {
        Some(r) => r.len(),
        None => return Err(Error::DegenerateInput("no points in input".into())),
    };
    if dim != 2 && dim != 3 {
        return Err(Error::DegenerateInput(format!("points must have 2 or 3 columns, got {dim}")));
    }
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::DegenerateInput("inconsistent column count across rows".into()));
    }
    Configuration::new(dim, rows.into_iter().flatten().collect())
}

/// What a render produced: the SVG text plus any warnings about missing
/// data that forced a degraded drawing.
pub struct RenderOutcome {
    pub svg: String,
    pub warnings: Vec<String>,
}

/// Node fill convention: center nodes (or central-edge endpoints) black,
/// chain-end neighbors grey, all others white. Stroke convention: thin for
/// positive stress, thick for negative, dashed for nearly zero.
pub fn render_svg(file: &FrameworkFile) -> Result<RenderOutcome> {
    let fw = file.to_framework()?;
    let mut warnings = Vec::new();

    let flat: Vec<[f64; 2]> = if file.dim == 2 {
        (0..fw.len()).map(|i| [fw.config().point(i)[0], fw.config().point(i)[1]]).collect()
    } else {
        match file.fan.as_ref().filter(|f| f.kind == FanKind::Fan3d) {
            Some(fan) => {
                let [a, b] = fan.central_edges[0];
                let frame = central_frame(fw.config(), a, b, fan.peripherals[0][0]);
                (0..fw.len()).map(|i| frame.planar(fw.config().point(i))).collect()
            }
            None => {
                warnings.push(
                    "no spatial fan data; projecting onto the first two axes".to_string(),
                );
                (0..fw.len())
                    .map(|i| [fw.config().point(i)[0], fw.config().point(i)[1]])
                    .collect()
            }
        }
    };
    if file.stress.is_none() {
        warnings.push("no stress data; rendering plain edges".to_string());
    }

    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in &flat {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-12);
    let (size, margin) = (640.0, 40.0);
    let to_px = |p: &[f64; 2]| {
        let x = margin + (p[0] - lo[0]) / span * (size - 2.0 * margin);
        let y = margin + (hi[1] - p[1]) / span * (size - 2.0 * margin);
        (x, y)
    };
    let width = margin * 2.0 + (hi[0] - lo[0]) / span * (size - 2.0 * margin);
    let height = margin * 2.0 + (hi[1] - lo[1]) / span * (size - 2.0 * margin);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width:.0}\" height=\"{height:.0}\" \
         viewBox=\"0 0 {width:.0} {height:.0}\">"
    );
    let _ = writeln!(svg, "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>");

    for (k, &[i, j]) in file.edges.iter().enumerate() {
        let (x1, y1) = to_px(&flat[i]);
        let (x2, y2) = to_px(&flat[j]);
        let style = match file.stress.as_ref().map(|s| s[k]) {
            Some(w) if w.abs() <= crate::TOL_EQ => {
                "stroke-width=\"1.0\" stroke-dasharray=\"6 4\"".to_string()
            }
            Some(w) if w < 0.0 => "stroke-width=\"3.0\"".to_string(),
            _ => "stroke-width=\"1.0\"".to_string(),
        };
        let _ = writeln!(
            svg,
            "  <line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" \
             stroke=\"black\" {style}/>"
        );
    }

    let mut role = vec![0u8; fw.len()]; // 0 plain, 1 neighbor, 2 center
    if let Some(fan) = &file.fan {
        for &x in &fan.neighbors {
            role[x] = 1;
        }
        for &c in &fan.center_nodes {
            role[c] = 2;
        }
        for &[a, b] in &fan.central_edges {
            role[a] = 2;
            role[b] = 2;
        }
    }
    for (i, p) in flat.iter().enumerate() {
        let (x, y) = to_px(p);
        let fill = match role[i] {
            2 => "black",
            1 => "#999999",
            _ => "white",
        };
        let _ = writeln!(
            svg,
            "  <circle cx=\"{x:.2}\" cy=\"{y:.2}\" r=\"5\" fill=\"{fill}\" stroke=\"black\"/>"
        );
    }
    svg.push_str("</svg>\n");
    Ok(RenderOutcome { svg, warnings })
}
