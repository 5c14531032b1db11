//! Report emission: JSON documents, CSV tables and SVG line plots.

use crate::config::Format;
use crate::error::{LabError, Result};
use crate::suites::Series;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Conventions every report carries so its numbers can be read without the code.
pub const CONVENTION_NOTES: [&str; 5] = [
    "mean mode: homogeneous multipliers zero the k = 0 coefficient; fractional powers of the Laplacian use |xi|^(2 beta)",
    "r-range: Carleson suprema admit radii with r^(2 beta) <= T (PowerBeta) unless a report says Linear",
    "multipliers: xi = 2 pi k / L per axis; odd derivatives zero the Nyquist mode",
    "x-integrals: rectangle rule on grid samples, ball membership |y - x| < r, torus distance",
    "time quadrature: solver grids t_i = T q^(i - M), Carleson grids Gauss-Legendre in ln t",
];

/// Where and in which formats a command writes its artifacts.
#[derive(Debug, Clone)]
pub struct Sink {
    pub dir: Option<PathBuf>,
    pub formats: Vec<Format>,
}

impl Sink {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// Write `contents` to `dir/name`, creating the directory; a no-op without a directory.
    pub fn write(&self, name: &str, contents: &str) -> Result<Option<PathBuf>> {
        let Some(dir) = &self.dir else { return Ok(None) };
        std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|e| LabError::io(&path, e))?;
        Ok(Some(path))
    }

    pub fn write_bytes(&self, name: &str, contents: &[u8]) -> Result<Option<PathBuf>> {
        let Some(dir) = &self.dir else { return Ok(None) };
        std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
        let path = dir.join(name);
        std::fs::write(&path, contents).map_err(|e| LabError::io(&path, e))?;
        Ok(Some(path))
    }
}

pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

pub fn read_json(path: &Path) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Quote a CSV field when it contains a separator, quote or newline.
pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) { format!("\"{}\"", s.replace('"', "\"\"")) } else { s.to_string() }
}

pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for r in rows {
        out.push_str(&r.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

/// Seconds since the Unix epoch, for metadata blocks.
pub fn timestamp() -> f64 {
    std::time::SystemTime::now().duration_since(std::time::UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// A line plot of every series on shared axes. The y axis is logarithmic when all values are
/// positive and span more than two decades.
pub fn line_plot(title: &str, series: &[Series]) -> String {
    let (w, h, ml, mr, mt, mb) = (640.0, 400.0, 70.0, 160.0, 40.0, 50.0);
    let pts: Vec<(f64, f64)> =
        series.iter().flat_map(|s| s.x.iter().copied().zip(s.y.iter().copied())).filter(|(x, y)| x.is_finite() && y.is_finite()).collect();
    let mut svg = String::new();
    let _ = writeln!(svg, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" font-family="sans-serif" font-size="12">"#);
    let _ = writeln!(svg, r#"<text x="{}" y="20" text-anchor="middle">{}</text>"#, w / 2.0, escape(title));
    if pts.is_empty() {
        svg.push_str("</svg>\n");
        return svg;
    }
    let log_y = pts.iter().all(|p| p.1 > 0.0) && {
        let (lo, hi) = pts.iter().fold((f64::INFINITY, 0.0f64), |(a, b), p| (a.min(p.1), b.max(p.1)));
        hi / lo > 100.0
    };
    let ty = |y: f64| if log_y { y.log10() } else { y };
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in &pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(ty(y));
        y1 = y1.max(ty(y));
    }
    if x1 == x0 {
        x1 = x0 + 1.0;
    }
    if y1 == y0 {
        y1 = y0 + 1.0;
    }
    let (pw, ph) = (w - ml - mr, h - mt - mb);
    let sx = |x: f64| ml + (x - x0) / (x1 - x0) * pw;
    let sy = |y: f64| mt + ph - (ty(y) - y0) / (y1 - y0) * ph;
    let _ = writeln!(svg, r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    let label = |v: f64| if log_y { format!("1e{v:.1}") } else { format!("{v:.3e}") };
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, ml - 4.0, mt + ph, label(y0));
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, ml - 4.0, mt + 10.0, label(y1));
    let _ = writeln!(svg, r#"<text x="{ml}" y="{}" text-anchor="start">{x0:.4}</text>"#, mt + ph + 16.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="end">{x1:.4}</text>"#, ml + pw, mt + ph + 16.0);
    let _ = writeln!(svg, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, ml + pw / 2.0, h - 10.0, escape(&series[0].x_label));
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{}{}</text>"#,
        mt + ph / 2.0,
        mt + ph / 2.0,
        escape(&series[0].y_label),
        if log_y { " (log)" } else { "" }
    );
    for (i, s) in series.iter().enumerate() {
        let c = COLORS[i % COLORS.len()];
        let path: Vec<String> = s
            .x
            .iter()
            .zip(&s.y)
            .filter(|(x, y)| x.is_finite() && y.is_finite() && (!log_y || **y > 0.0))
            .map(|(&x, &y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        let _ = writeln!(svg, r#"<polyline fill="none" stroke="{c}" stroke-width="1.5" points="{}"/>"#, path.join(" "));
        let ly = mt + 14.0 + 16.0 * i as f64;
        let _ = writeln!(svg, r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{c}" stroke-width="2"/>"#, ml + pw + 10.0, ly - 4.0, ml + pw + 30.0, ly - 4.0);
        let _ = writeln!(svg, r#"<text x="{}" y="{ly}">{}</text>"#, ml + pw + 34.0, escape(&s.name));
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("say \"x\""), "\"say \"\"x\"\"\"");
        let t = csv_table(&["a", "b"], &[vec!["1".into(), "x,y".into()]]);
        assert_eq!(t, "a,b\n1,\"x,y\"\n");
    }

    #[test]
    fn plot_has_one_polyline_per_series() {
        let s = vec![
            Series::new("one", "k", "v", vec![1.0, 2.0, 3.0], vec![1.0, 10.0, 1000.0]),
            Series::new("two <b>", "k", "v", vec![1.0, 2.0], vec![2.0, 3.0]),
        ];
        let svg = line_plot("t", &s);
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("(log)"));
        assert!(svg.contains("two &lt;b&gt;"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert!(line_plot("empty", &[]).contains("</svg>"));
    }

    #[test]
    fn sink_without_directory_writes_nothing() {
        let s = Sink { dir: None, formats: vec![Format::Json] };
        assert!(s.write("x.json", "{}").unwrap().is_none());
        assert!(s.wants(Format::Json) && !s.wants(Format::Svg));
    }
}
