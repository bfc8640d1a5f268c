use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use tempfile::NamedTempFile;

use super::HarnessError;
use crate::aesthetics::{FeatureId, FeatureValue};
use crate::serde_inf;

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// creating parent directories as needed.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let io_err = |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    };
    let parent = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(parent).map_err(io_err)?;
    let mut tmp = NamedTempFile::new_in(parent).map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// One optimizer run of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub endpoint: String,
    /// Feature label(s), e.g. `Hue` or `GCF-Saturation`.
    pub cell: String,
    /// Direction(s), e.g. `Min` or `Max.f1-Min.f2`.
    pub corner: String,
    pub cutoff: f64,
    pub seed: u64,
    /// Achieved values, re-measured from the saved image; empty on failure.
    pub values: Vec<FeatureValue>,
    pub realness_raw: f64,
    pub fitness: f64,
    pub evals: usize,
    /// `None` on success, the error message otherwise.
    pub error: Option<String>,
    /// Best image, relative to the output directory.
    pub image: Option<String>,
}

impl ResultRow {
    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }

    pub fn value(&self, feature: FeatureId) -> Option<f64> {
        self.values.iter().find(|v| v.feature == feature).map(|v| v.value)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

pub const RESULT_HEADER: [&str; 14] = [
    "endpoint",
    "cell",
    "corner",
    "cutoff",
    "seed",
    "feature1",
    "value1",
    "feature2",
    "value2",
    "realness_raw",
    "fitness",
    "evals",
    "status",
    "image",
];

fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        serde_inf::display(v)
    }
}

impl ResultTable {
    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.is_ok()).count()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(RESULT_HEADER)?;
        for r in &self.rows {
            let slot = |i: usize| {
                r.values
                    .get(i)
                    .map(|v| (v.feature.key().to_string(), num(v.value)))
                    .unwrap_or_default()
            };
            let (f1, v1) = slot(0);
            let (f2, v2) = slot(1);
            w.write_record([
                r.endpoint.clone(),
                r.cell.clone(),
                r.corner.clone(),
                serde_inf::display(r.cutoff),
                r.seed.to_string(),
                f1,
                v1,
                f2,
                v2,
                num(r.realness_raw),
                num(r.fitness),
                r.evals.to_string(),
                match &r.error {
                    None => "ok".to_string(),
                    Some(e) => format!("failed: {e}"),
                },
                r.image.clone().unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_bytes(&self) -> Result<Vec<u8>, HarnessError> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(buf)
    }
}

/// CSV of measured features, one row per image.
pub fn write_features_csv<W: Write>(
    out: W,
    features: &[FeatureId],
    rows: &[(String, Vec<FeatureValue>)],
) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["image".to_string()];
    header.extend(features.iter().map(|f| f.key().to_string()));
    w.write_record(&header)?;
    for (name, values) in rows {
        let mut rec = vec![name.clone()];
        rec.extend(values.iter().map(|v| v.value.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One point of a feature-pair plot.
#[derive(Clone, Debug, PartialEq)]
pub struct PlotPoint {
    pub endpoint: String,
    pub corner: String,
    pub x: f64,
    pub y: f64,
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

fn axis_max(feature: FeatureId, values: impl Iterator<Item = f64>) -> f64 {
    if feature.is_bounded() {
        1.0
    } else {
        let m = values.filter(|v| v.is_finite()).fold(0.0_f64, f64::max);
        if m > 0.0 {
            m * 1.1
        } else {
            1.0
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Scatter plot of the corner points of one feature pair. Each endpoint's
/// corners are joined into a polygon; every `<circle>` carries its exact
/// values in `data-f1` / `data-f2`.
pub fn render_pair_svg(f1: FeatureId, f2: FeatureId, points: &[PlotPoint]) -> String {
    const W: f64 = 480.0;
    const H: f64 = 420.0;
    const M: f64 = 60.0;
    let xmax = axis_max(f1, points.iter().map(|p| p.x));
    let ymax = axis_max(f2, points.iter().map(|p| p.y));
    let px = |x: f64| M + (W - 2.0 * M) * (x / xmax).clamp(0.0, 1.0);
    let py = |y: f64| H - M - (H - 2.0 * M) * (y / ymax).clamp(0.0, 1.0);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<line x1="{M}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>"#,
        y0 = H - M,
        x1 = W - M
    );
    let _ = writeln!(
        s,
        r#"<line x1="{M}" y1="{M}" x2="{M}" y2="{y0}" stroke="black"/>"#,
        y0 = H - M
    );
    for i in 0..=4 {
        let t = i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" font-size="10" text-anchor="middle">{v:.2}</text>"#,
            x = px(t * xmax),
            y = H - M + 14.0,
            v = t * xmax
        );
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" font-size="10" text-anchor="end">{v:.2}</text>"#,
            x = M - 6.0,
            y = py(t * ymax) + 3.0,
            v = t * ymax
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{x}" y="{y}" font-size="13" text-anchor="middle">{label}</text>"#,
        x = W / 2.0,
        y = H - 18.0,
        label = f1.label()
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{y}" font-size="13" text-anchor="middle" transform="rotate(-90 18 {y})">{label}</text>"#,
        y = H / 2.0,
        label = f2.label()
    );

    let mut endpoints: Vec<&str> = Vec::new();
    for p in points {
        if !endpoints.contains(&p.endpoint.as_str()) {
            endpoints.push(&p.endpoint);
        }
    }
    for (k, name) in endpoints.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let mine: Vec<&PlotPoint> = points.iter().filter(|p| p.endpoint == *name).collect();
        // trace the quadrilateral Min-Min → Min-Max → Max-Max → Max-Min
        let order = [0usize, 1, 3, 2];
        let outline: Vec<String> = order
            .iter()
            .filter_map(|&i| mine.iter().find(|p| p.corner == super::PAIR_CORNERS[i]))
            .map(|p| format!("{:.2},{:.2}", px(p.x), py(p.y)))
            .collect();
        if outline.len() > 1 {
            let _ = writeln!(
                s,
                r#"<polygon points="{}" fill="{color}" fill-opacity="0.08" stroke="{color}"/>"#,
                outline.join(" ")
            );
        }
        for p in &mine {
            let _ = writeln!(
                s,
                r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="4" fill="{color}" data-endpoint="{ep}" data-corner="{corner}" data-f1="{x}" data-f2="{y}"><title>{ep} {corner}</title></circle>"#,
                cx = px(p.x),
                cy = py(p.y),
                ep = escape(name),
                corner = escape(&p.corner),
                x = p.x,
                y = p.y
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{x}" y="{y}" font-size="11" fill="{color}">{ep}</text>"#,
            x = W - M - 80.0,
            y = M + 14.0 * k as f64,
            ep = escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}
