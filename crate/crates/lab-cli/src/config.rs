//! Flat sectioned `key = value` experiment configuration.
//!
//! ```text
//! # comment
//! [grid]
//! n = 2
//! N = 64
//! L = 2pi
//! [params]
//! alpha = 0.3
//! beta = 0.75
//! ```
//!
//! Every key is optional; missing keys take the defaults of [`ExperimentConfig::default`].
//! Unknown sections or keys, repeated keys and values that fail grid or parameter
//! validation are errors.

use crate::error::{LabError, Result};
use serde::Serialize;
use spectral_core::{FracParams, TimeGrid, TorusGrid};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(format!("unknown format `{other}` (json, csv, svg)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSection {
    pub n: usize,
    #[serde(rename = "N")]
    pub points: usize,
    #[serde(rename = "L")]
    pub period: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParamsSection {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
}

/// Deterministic band-limited test fields: member `i` is drawn from seed `seed + i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FamilySection {
    pub seed: u64,
    pub count: usize,
    pub spectrum_slope: f64,
    pub kmax: usize,
    /// Defaults to the grid dimension.
    pub components: Option<usize>,
    pub div_free: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteSection {
    pub name: String,
    /// Per-check tolerance overrides, keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    pub formats: Vec<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveSection {
    /// Data amplitude. In units of the located threshold when `relative`, otherwise a
    /// multiplier on the unit-`X` data direction.
    pub amplitude: f64,
    pub relative: bool,
    /// Ratio and node count of the geometric time grid ending at `T`.
    pub ratio: f64,
    pub nodes: usize,
    pub j_max: usize,
    pub tol: f64,
    /// Relative bracket width of the threshold bisection.
    pub bracket: f64,
    pub snapshots: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub grid: GridSection,
    pub params: ParamsSection,
    pub family: FamilySection,
    pub suite: SuiteSection,
    pub output: OutputSection,
    pub solve: SolveSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            grid: GridSection { n: 2, points: 64, period: 2.0 * PI },
            params: ParamsSection { alpha: 0.3, beta: 0.75, horizon: 1.0 },
            family: FamilySection {
                seed: 7,
                count: 1,
                spectrum_slope: 1.5,
                kmax: 4,
                components: None,
                div_free: true,
            },
            suite: SuiteSection { name: "all".into(), tolerances: BTreeMap::new() },
            output: OutputSection { dir: None, formats: vec![Format::Json] },
            solve: SolveSection {
                amplitude: 0.5,
                relative: true,
                ratio: 1.25,
                nodes: 32,
                j_max: 40,
                tol: 1e-10,
                bracket: 0.01,
                snapshots: false,
            },
        }
    }
}

fn parse_f64(v: &str) -> std::result::Result<f64, String> {
    let v = v.trim();
    let x = if v == "pi" {
        PI
    } else if let Some(m) = v.strip_suffix("pi") {
        m.trim().trim_end_matches('*').trim().parse::<f64>().map_err(|e| e.to_string())? * PI
    } else {
        v.parse::<f64>().map_err(|e| e.to_string())?
    };
    if x.is_finite() { Ok(x) } else { Err(format!("`{v}` is not finite")) }
}

fn parse_bool(v: &str) -> std::result::Result<bool, String> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(format!("`{v}` is not a boolean")),
    }
}

fn parse<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>().map_err(|e| e.to_string())
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| LabError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        let mut section: Option<String> = None;
        let mut seen = std::collections::HashSet::new();
        for (no, raw) in text.lines().enumerate() {
            let line_no = no + 1;
            let err = |msg: String| LabError::Config { line: line_no, msg };
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| err(format!("malformed section header `{line}`")))?;
                let name = name.trim();
                if !["grid", "params", "family", "suite", "output", "solve"].contains(&name) {
                    return Err(err(format!("unknown section `{name}`")));
                }
                section = Some(name.to_string());
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let sec = section.as_deref().ok_or_else(|| err(format!("key `{key}` outside any section")))?;
            if !seen.insert(format!("{sec}.{key}")) {
                return Err(err(format!("duplicate key `{sec}.{key}`")));
            }
            cfg.set(sec, key, value).map_err(|m| err(format!("{sec}.{key}: {m}")))?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, sec: &str, key: &str, v: &str) -> std::result::Result<(), String> {
        match (sec, key) {
            ("grid", "n") => self.grid.n = parse(v)?,
            ("grid", "N") => self.grid.points = parse(v)?,
            ("grid", "L") => self.grid.period = parse_f64(v)?,
            ("params", "alpha") => self.params.alpha = parse_f64(v)?,
            ("params", "beta") => self.params.beta = parse_f64(v)?,
            ("params", "T") => self.params.horizon = parse_f64(v)?,
            ("family", "seed") => self.family.seed = parse(v)?,
            ("family", "count") => self.family.count = parse(v)?,
            ("family", "spectrum_slope") => self.family.spectrum_slope = parse_f64(v)?,
            ("family", "kmax") => self.family.kmax = parse(v)?,
            ("family", "components") => self.family.components = Some(parse(v)?),
            ("family", "div_free") => self.family.div_free = parse_bool(v)?,
            ("suite", "name") => self.suite.name = v.to_string(),
            ("suite", "tolerances") => {
                self.suite.tolerances.clear();
                for item in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                    let (name, tol) = item.split_once(':').ok_or_else(|| format!("expected `check:value`, got `{item}`"))?;
                    let tol = parse_f64(tol)?;
                    if tol < 0.0 {
                        return Err(format!("negative tolerance for `{name}`"));
                    }
                    self.suite.tolerances.insert(name.trim().to_string(), tol);
                }
            }
            ("output", "dir") => self.output.dir = Some(PathBuf::from(v)),
            ("output", "formats") => {
                self.output.formats = v.split(',').map(|s| s.parse()).collect::<std::result::Result<_, _>>()?;
                self.output.formats.sort();
                self.output.formats.dedup();
            }
            ("solve", "amplitude") => self.solve.amplitude = parse_f64(v)?,
            ("solve", "relative") => self.solve.relative = parse_bool(v)?,
            ("solve", "ratio") => self.solve.ratio = parse_f64(v)?,
            ("solve", "nodes") => self.solve.nodes = parse(v)?,
            ("solve", "j_max") => self.solve.j_max = parse(v)?,
            ("solve", "tol") => self.solve.tol = parse_f64(v)?,
            ("solve", "bracket") => self.solve.bracket = parse_f64(v)?,
            ("solve", "snapshots") => self.solve.snapshots = parse_bool(v)?,
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    /// Re-run the grid and parameter constructors plus the driver-level bounds.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(LabError::Config { line: 0, msg });
        self.torus()?;
        self.frac_params()?;
        if !(self.params.horizon > 0.0) {
            return bad("params.T must be positive".into());
        }
        let comps = self.components();
        if comps == 0 || comps > 3 {
            return bad(format!("family.components = {comps} outside 1..=3"));
        }
        if self.family.div_free && comps != self.grid.n {
            return bad("family.div_free needs components equal to grid.n".into());
        }
        if self.family.count == 0 {
            return bad("family.count must be at least 1".into());
        }
        if self.family.kmax == 0 || self.family.kmax >= self.grid.points / 2 {
            return bad(format!("family.kmax must lie in 1..{}", self.grid.points / 2));
        }
        if self.output.formats.is_empty() {
            return bad("output.formats is empty".into());
        }
        let s = &self.solve;
        if !(s.amplitude >= 0.0) || !(s.ratio > 1.0) || s.nodes < 8 || s.j_max == 0 || !(s.tol >= 0.0) || !(s.bracket > 0.0) {
            return bad("solve needs amplitude >= 0, ratio > 1, nodes >= 8, j_max >= 1, tol >= 0, bracket > 0".into());
        }
        Ok(())
    }

    pub fn torus(&self) -> Result<TorusGrid> {
        TorusGrid::new(self.grid.n, self.grid.points, self.grid.period)
            .map_err(|e| LabError::Config { line: 0, msg: format!("grid: {e}") })
    }

    pub fn frac_params(&self) -> Result<FracParams> {
        FracParams::new(self.params.alpha, self.params.beta)
            .map_err(|e| LabError::Config { line: 0, msg: format!("params: {e}") })
    }

    pub fn components(&self) -> usize {
        self.family.components.unwrap_or(self.grid.n)
    }

    pub fn solve_times(&self) -> Result<TimeGrid> {
        Ok(TimeGrid::geometric(self.params.horizon, self.solve.ratio, self.solve.nodes)?)
    }
}
