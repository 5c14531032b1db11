//! Subcommand drivers. Each returns `Ok(true)` when every assertion it makes passes.

use crate::config::{ExperimentConfig, Format};
use crate::error::{LabError, Result};
use crate::family::TestFamily;
use crate::output::{csv_table, line_plot, read_json, timestamp, to_json, Sink, CONVENTION_NOTES};
use crate::suites::{self, Series, SuiteReport};
use qnorms::carleson::{wavelet_time_grid, CarlesonSetup, HeatGradientWindow};
use qnorms::{bmo_beta_norm, q_norm, wavelet_carleson_norm, CubeFamily, NormReport};
use serde::{Deserialize, Serialize};
use solver::{picard_solve, residual, smallness_threshold, PicardConfig, Regime, SolverError, Threshold, Trajectory, XSetup};
use spectral_core::ops::{divergence_defect, partial_derivative};
use spectral_core::qnsf::{read_field, write_field};
use spectral_core::{heat_semigroup, HalfSpaceSample, SpectralField, TimeGrid, TorusGrid};
use std::path::{Path, PathBuf};
use tentspace::{atomic_decompose, hausdorff_capacity, maximal_omega, power_omega, DyadicCube, LevelCover, AtomSummary};

fn notes() -> Vec<String> {
    CONVENTION_NOTES.iter().map(|s| s.to_string()).collect()
}

pub fn load_field(path: &Path) -> Result<SpectralField> {
    let mut file = std::fs::File::open(path).map_err(|e| LabError::io(path, e))?;
    Ok(read_field(&mut file)?)
}

pub fn save_field(path: &Path, f: &SpectralField) -> Result<()> {
    let mut buf = Vec::new();
    write_field(&mut buf, f)?;
    std::fs::write(path, buf).map_err(|e| LabError::io(path, e))
}

// ---------------------------------------------------------------- gen

#[derive(Debug, Serialize)]
pub struct FieldEntry {
    pub file: String,
    pub seed: u64,
    pub l2_norm: f64,
    pub sup_norm: f64,
    pub divergence_defect: Option<f64>,
}

#[derive(Debug, Serialize)]
pub struct GenManifest {
    pub family: TestFamily,
    pub fields: Vec<FieldEntry>,
    pub convention_notes: Vec<String>,
}

pub fn gen(cfg: &ExperimentConfig, sink: &Sink) -> Result<GenManifest> {
    let dir = sink.dir.as_ref().ok_or_else(|| LabError::Usage("gen needs an output directory (--out or output.dir)".into()))?;
    std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
    let fam = TestFamily::from_config(cfg)?;
    let mut fields = Vec::new();
    for i in 0..fam.count {
        let f = fam.member(i);
        let file = format!("field_{i:03}.qnsf");
        save_field(&dir.join(&file), &f)?;
        let div = if f.components == f.grid.dim { Some(divergence_defect(&f)?) } else { None };
        fields.push(FieldEntry { file, seed: fam.seed.wrapping_add(i as u64), l2_norm: f.l2_norm(), sup_norm: f.sup_norm(), divergence_defect: div });
    }
    let m = GenManifest { family: fam, fields, convention_notes: notes() };
    if sink.wants(Format::Json) {
        sink.write("gen.json", &to_json(&m)?)?;
    }
    if sink.wants(Format::Csv) {
        let rows: Vec<Vec<String>> = m
            .fields
            .iter()
            .map(|e| vec![e.file.clone(), e.seed.to_string(), e.l2_norm.to_string(), e.sup_norm.to_string()])
            .collect();
        sink.write("gen.csv", &csv_table(&["file", "seed", "l2_norm", "sup_norm"], &rows))?;
    }
    Ok(m)
}

// ---------------------------------------------------------------- norm

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    /// Discrete Q-norm over the dyadic cube family.
    Q,
    /// Mean-oscillation norm with exponent beta.
    Bmo,
    /// Semigroup Carleson norm of the heat extension.
    QInverse,
    /// Carleson norm of the heat-gradient wavelet transform.
    Wavelet,
}

#[derive(Debug, Serialize)]
pub struct NormOutput {
    pub file: String,
    pub which: NormKind,
    pub report: NormReport,
    pub convention_notes: Vec<String>,
}

pub fn norm_of(f: &SpectralField, which: NormKind, cfg: &ExperimentConfig) -> Result<NormReport> {
    let p = cfg.frac_params()?;
    let g = f.grid;
    Ok(match which {
        NormKind::Q => q_norm(f, &p, &CubeFamily::dyadic(g)?)?,
        NormKind::Bmo => bmo_beta_norm(f, p.beta, &CubeFamily::dyadic(g)?)?,
        NormKind::QInverse => {
            let mut setup = CarlesonSetup::standard(g, p.beta)?;
            setup.horizon = cfg.params.horizon;
            setup.q_inverse(f, &p)?
        }
        NormKind::Wavelet => {
            let setup = CarlesonSetup::standard(g, p.beta)?;
            let wt = wavelet_time_grid(&setup.balls)?;
            wavelet_carleson_norm(f, &HeatGradientWindow { beta: p.beta }, &p, &setup.balls, &wt)?
        }
    })
}

pub fn norm(path: &Path, which: NormKind, cfg: &ExperimentConfig, sink: &Sink) -> Result<NormOutput> {
    let f = load_field(path)?;
    let report = norm_of(&f, which, cfg)?;
    let out = NormOutput { file: path.display().to_string(), which, report, convention_notes: notes() };
    if sink.wants(Format::Json) {
        sink.write("norm.json", &to_json(&out)?)?;
    }
    if sink.wants(Format::Csv) {
        let row = vec![out.file.clone(), out.report.norm.clone(), out.report.value.to_string()];
        sink.write("norm.csv", &csv_table(&["file", "norm", "value"], &[row]))?;
    }
    Ok(out)
}

// ---------------------------------------------------------------- solve

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    pub max_relative: f64,
    pub times: Vec<f64>,
    pub relative: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct SolveManifest {
    pub grid: TorusGrid,
    pub alpha: f64,
    pub beta: f64,
    pub horizon: f64,
    pub time_nodes: Vec<f64>,
    pub data_seed: u64,
    /// Amplitude in units of `||exp(-t Lambda) a||_X` for unit data direction `a`.
    pub amplitude: f64,
    pub threshold: Option<Threshold>,
    /// `contracting` or `outside small-data regime`.
    pub regime: String,
    pub regime_reasons: Vec<String>,
    pub converged: bool,
    pub iterations: usize,
    pub linear_norm: f64,
    pub increments: Vec<f64>,
    pub ratios: Vec<f64>,
    pub max_divergence: f64,
    pub residual: Option<ResidualSummary>,
    pub failure: Option<String>,
    pub warnings: Vec<String>,
    pub snapshots: Vec<String>,
    pub convention_notes: Vec<String>,
}

pub const OUTSIDE: &str = "outside small-data regime";

pub fn solve(cfg: &ExperimentConfig, sink: &Sink) -> Result<SolveManifest> {
    let p = cfg.frac_params()?;
    let g = cfg.torus()?;
    if cfg.components() != g.dim {
        return Err(LabError::Config { line: 0, msg: "solve needs family.components equal to grid.n".into() });
    }
    let times = cfg.solve_times()?;
    let a = TestFamily::from_config(cfg)?.member(0);
    let xs = XSetup::standard(g, &times, p.beta)?;
    let lin = xs.norm(&Trajectory::linear(&spectral_core::leray_project(&a)?, times.clone(), p.beta)?, &p)?;
    if !(lin > 0.0) {
        return Err(LabError::Usage("data direction has zero X norm".into()));
    }
    let threshold = if cfg.solve.relative { Some(smallness_threshold(&a, &times, &p, cfg.solve.bracket)?) } else { None };
    let amplitude = match &threshold {
        Some(t) => cfg.solve.amplitude * t.amplitude,
        None => cfg.solve.amplitude,
    };
    let data = a.scale(amplitude / lin);
    let pc = PicardConfig { j_max: cfg.solve.j_max, tol: cfg.solve.tol, abort_ratio: Some(1.0) };
    let mut reasons = Vec::new();
    if let Some(t) = &threshold {
        if amplitude > t.amplitude {
            reasons.push(format!("amplitude {amplitude:.6} above located threshold {:.6}", t.amplitude));
        }
    }
    let mut m = SolveManifest {
        grid: g,
        alpha: p.alpha,
        beta: p.beta,
        horizon: cfg.params.horizon,
        time_nodes: times.nodes.clone(),
        data_seed: cfg.family.seed,
        amplitude,
        threshold,
        regime: String::new(),
        regime_reasons: vec![],
        converged: false,
        iterations: 0,
        linear_norm: 0.0,
        increments: vec![],
        ratios: vec![],
        max_divergence: 0.0,
        residual: None,
        failure: None,
        warnings: vec![],
        snapshots: vec![],
        convention_notes: notes(),
    };
    match picard_solve(&data, &times, &p, &pc) {
        Ok(s) => {
            if s.regime == Regime::OutsideSmallData {
                reasons.push("a contraction ratio reached 1".into());
            }
            if s.converged {
                let r = residual(&s.u, &p, true)?;
                m.residual = Some(ResidualSummary { max_relative: r.max_relative, times: r.times, relative: r.relative });
            }
            if cfg.solve.snapshots {
                let dir = sink.dir.as_ref().ok_or_else(|| LabError::Usage("solve.snapshots needs an output directory".into()))?;
                std::fs::create_dir_all(dir).map_err(|e| LabError::io(dir, e))?;
                for (i, f) in s.u.node_fields().iter().enumerate() {
                    let file = format!("u_{i:03}.qnsf");
                    save_field(&dir.join(&file), f)?;
                    m.snapshots.push(file);
                }
            }
            m.converged = s.converged;
            m.iterations = s.iterations;
            m.linear_norm = s.linear_norm;
            m.increments = s.increments;
            m.ratios = s.ratios;
            m.max_divergence = s.max_divergence;
            m.warnings = s.warnings;
        }
        Err(e @ SolverError::NonFinite { .. }) => {
            reasons.push("iterates became non-finite".into());
            m.failure = Some(e.to_string());
        }
        Err(e) => return Err(e.into()),
    }
    m.regime = if reasons.is_empty() { "contracting".into() } else { OUTSIDE.into() };
    m.regime_reasons = reasons;
    write_solve(&m, sink)?;
    Ok(m)
}

fn solve_plot(increments: &[f64], ratios: &[f64]) -> String {
    let inc_x: Vec<f64> = (1..=increments.len()).map(|j| j as f64).collect();
    let rat_x: Vec<f64> = (2..=ratios.len() + 1).map(|j| j as f64).collect();
    line_plot(
        "Picard iteration",
        &[
            Series::new("increment", "iteration j", "value", inc_x, increments.to_vec()),
            Series::new("ratio", "iteration j", "value", rat_x, ratios.to_vec()),
        ],
    )
}

fn solve_csv(increments: &[f64], ratios: &[f64]) -> String {
    let rows: Vec<Vec<String>> = increments
        .iter()
        .enumerate()
        .map(|(j, inc)| vec![(j + 1).to_string(), inc.to_string(), j.checked_sub(1).and_then(|k| ratios.get(k)).map_or(String::new(), |r| r.to_string())])
        .collect();
    csv_table(&["iteration", "increment", "ratio"], &rows)
}

fn write_solve(m: &SolveManifest, sink: &Sink) -> Result<()> {
    if sink.wants(Format::Json) {
        sink.write("solve.json", &to_json(m)?)?;
    }
    if sink.wants(Format::Csv) {
        sink.write("solve.csv", &solve_csv(&m.increments, &m.ratios))?;
    }
    if sink.wants(Format::Svg) {
        sink.write("solve.svg", &solve_plot(&m.increments, &m.ratios))?;
    }
    Ok(())
}

// ---------------------------------------------------------------- verify

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suite: String,
    pub pass: bool,
    pub suites: Vec<SuiteReport>,
    pub convention_notes: Vec<String>,
}

#[derive(Debug, Serialize)]
struct Timing {
    suite: String,
    seconds: f64,
}

#[derive(Debug, Serialize)]
struct Metadata {
    timestamp: f64,
    threads: usize,
    runtimes: Vec<Timing>,
}

/// One line per suite, plus an indented diff line per failed check.
pub fn summary_lines(rep: &SuiteReport, seconds: Option<f64>) -> Vec<String> {
    let time = seconds.map_or(String::new(), |s| format!(" ({s:.2} s)"));
    let mut lines = vec![format!(
        "{} {:>2} {:<22}{}{}",
        if rep.pass { "PASS" } else { "FAIL" },
        rep.criterion,
        rep.name,
        time,
        if rep.within_runtime { "" } else { " over runtime limit" }
    )];
    for c in rep.checks.iter().filter(|c| !c.pass) {
        lines.push(format!("       {}: {:e} not {} {:e} ({})", c.name, c.value, c.relation.symbol(), c.tolerance, c.detail));
    }
    lines
}

pub fn verify(cfg: &ExperimentConfig, sink: &Sink) -> Result<VerifyReport> {
    let selected = suites::find(&cfg.suite.name)?;
    let mut reports = Vec::new();
    let mut runtimes = Vec::new();
    for s in selected {
        let run = s.run(&cfg.suite.tolerances);
        for l in summary_lines(&run.report, Some(run.seconds)) {
            println!("{l}");
        }
        runtimes.push(Timing { suite: s.name.to_string(), seconds: run.seconds });
        reports.push(run.report);
    }
    let rep = VerifyReport {
        suite: cfg.suite.name.clone(),
        pass: reports.iter().all(|r| r.pass),
        suites: reports,
        convention_notes: notes(),
    };
    render_verify(&rep, sink, true)?;
    if sink.dir.is_some() {
        let meta = Metadata { timestamp: timestamp(), threads: rayon::current_num_threads(), runtimes };
        sink.write("metadata.json", &to_json(&meta)?)?;
    }
    Ok(rep)
}

fn render_verify(rep: &VerifyReport, sink: &Sink, json: bool) -> Result<()> {
    if json && sink.wants(Format::Json) {
        sink.write("verify.json", &to_json(rep)?)?;
    }
    if sink.wants(Format::Csv) {
        let rows: Vec<Vec<String>> = rep
            .suites
            .iter()
            .flat_map(|s| {
                s.checks.iter().map(move |c| {
                    vec![
                        s.criterion.to_string(),
                        s.name.clone(),
                        c.name.clone(),
                        c.pass.to_string(),
                        c.value.to_string(),
                        c.relation.symbol().to_string(),
                        c.tolerance.to_string(),
                        c.detail.clone(),
                    ]
                })
            })
            .collect();
        sink.write("verify.csv", &csv_table(&["criterion", "suite", "check", "pass", "value", "relation", "tolerance", "detail"], &rows))?;
    }
    if sink.wants(Format::Svg) {
        for s in rep.suites.iter().filter(|s| !s.series.is_empty()) {
            sink.write(&format!("verify_{}.svg", s.name), &line_plot(&s.title, &s.series))?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------- decompose

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaKind {
    /// Non-tangential maximal function of F.
    Maximal,
    /// Square root of the non-tangential maximal function.
    MaximalSqrt,
    /// |F| itself.
    Power,
}

#[derive(Debug, Serialize)]
pub struct DecompositionDump {
    pub file: String,
    pub grid: TorusGrid,
    pub time_nodes: Vec<f64>,
    pub omega: OmegaKind,
    pub width: Option<f64>,
    pub l1: f64,
    pub residual: f64,
    pub disjoint: bool,
    pub levels: Vec<LevelCover>,
    pub atoms: Vec<AtomSummary>,
    pub convention_notes: Vec<String>,
}

/// `F(t, x) = t |grad exp(-t^{2 beta} Lambda) f|(x)`, optionally cut off outside a cone-shaped
/// bump of radius `width` around the center of the torus.
pub fn half_space_field(f: &SpectralField, beta: f64, width: Option<f64>) -> Result<HalfSpaceSample> {
    let g = f.grid;
    let levels = g.n().trailing_zeros() as usize;
    let times = TimeGrid::dyadic_cells(g.spacing() / 4.0, levels, 2)?;
    let mut slices = Vec::with_capacity(times.len());
    for &t in &times.nodes {
        let u = heat_semigroup(f, t.powf(2.0 * beta), beta)?;
        let mut sq = vec![0.0; g.len()];
        for c in 0..f.components {
            for axis in 0..g.dim {
                let d = partial_derivative(&u.extract(c), axis)?.to_samples();
                sq.iter_mut().zip(&d).for_each(|(s, v)| *s += v * v);
            }
        }
        slices.push(sq.into_iter().map(|s| t * s.sqrt()).collect::<Vec<f64>>());
    }
    let center = [g.period / 2.0; 3];
    Ok(HalfSpaceSample::from_fn(times, g, |i, t, j, x| {
        let w = match width {
            Some(w) => {
                let r = tentspace::torus_distance(&g, x, center);
                if r < w && t < w { 1.0 - r / w } else { 0.0 }
            }
            None => 1.0,
        };
        slices[i][j] * w
    }))
}

pub fn decompose(path: &Path, omega: OmegaKind, width: Option<f64>, cfg: &ExperimentConfig, sink: &Sink) -> Result<DecompositionDump> {
    let p = cfg.frac_params()?;
    let f = load_field(path)?;
    if let Some(w) = width {
        if !(w > 0.0) {
            return Err(LabError::Usage("--width must be positive".into()));
        }
    }
    let hs = half_space_field(&f, p.beta, width)?;
    let om = match omega {
        OmegaKind::Maximal => maximal_omega(&hs, 1.0),
        OmegaKind::MaximalSqrt => maximal_omega(&hs, 0.5),
        OmegaKind::Power => power_omega(&hs, 1.0),
    };
    let dec = atomic_decompose(&hs, &om, &p)?;
    let dump = DecompositionDump {
        file: path.display().to_string(),
        grid: f.grid,
        time_nodes: hs.times.nodes.clone(),
        omega,
        width,
        l1: dec.l1,
        residual: dec.residual,
        disjoint: dec.disjoint,
        levels: dec.levels.clone(),
        atoms: dec.summaries(&p),
        convention_notes: notes(),
    };
    if sink.wants(Format::Json) {
        sink.write("decompose.json", &to_json(&dump)?)?;
    }
    if sink.wants(Format::Csv) {
        let rows: Vec<Vec<String>> = dump
            .atoms
            .iter()
            .map(|a| {
                vec![
                    a.center[0].to_string(),
                    a.center[1].to_string(),
                    a.center[2].to_string(),
                    a.radius.to_string(),
                    a.lambda.to_string(),
                    a.level.to_string(),
                    a.functional.to_string(),
                    a.margin.to_string(),
                ]
            })
            .collect();
        sink.write("decompose.csv", &csv_table(&["x", "y", "z", "radius", "lambda", "level", "V", "margin"], &rows))?;
    }
    Ok(dump)
}

// ---------------------------------------------------------------- capacity

#[derive(Debug, Serialize)]
pub struct CapacityReport {
    pub setspec: String,
    pub grid: TorusGrid,
    pub dimension: f64,
    pub samples: usize,
    pub upper: f64,
    pub lower: f64,
    pub cover: Vec<DyadicCube>,
    pub convention_notes: Vec<String>,
}

/// Parse `item;item;...` with items `all`, `cube:LEVEL:i,j[,k]` (sample indices of the lower
/// corner) or `ball:x,y[,z]:r` (physical coordinates, torus distance).
pub fn parse_setspec(spec: &str, g: &TorusGrid) -> Result<Vec<bool>> {
    let bad = |m: String| LabError::Usage(format!("set spec: {m}"));
    let nums = |s: &str| -> Result<Vec<f64>> {
        s.split(',').map(|v| v.trim().parse::<f64>().map_err(|e| bad(format!("`{v}`: {e}")))).collect()
    };
    let mut set = vec![false; g.len()];
    for item in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split(':').collect();
        match parts.as_slice() {
            ["all"] => set.iter_mut().for_each(|v| *v = true),
            ["cube", level, start] => {
                let level: u32 = level.trim().parse().map_err(|_| bad(format!("level `{level}`")))?;
                let side = 1usize.checked_shl(level).filter(|&s| s <= g.n()).ok_or_else(|| bad(format!("level {level} too large")))?;
                let c = nums(start)?;
                if c.len() != g.dim {
                    return Err(bad(format!("cube start needs {} indices", g.dim)));
                }
                let mut st = [0usize; 3];
                for (a, v) in c.iter().enumerate() {
                    if v.fract() != 0.0 || *v < 0.0 || *v as usize + side > g.n() || (*v as usize) % side != 0 {
                        return Err(bad(format!("cube start {v} is not a multiple of {side} inside the grid")));
                    }
                    st[a] = *v as usize;
                }
                DyadicCube { level, start: st }.samples(g).into_iter().for_each(|i| set[i] = true);
            }
            ["ball", center, r] => {
                let c = nums(center)?;
                let r: f64 = r.trim().parse().map_err(|_| bad(format!("radius `{r}`")))?;
                if c.len() != g.dim || !(r > 0.0) {
                    return Err(bad(format!("ball needs {} coordinates and a positive radius", g.dim)));
                }
                let mut cc = [0.0; 3];
                cc[..c.len()].copy_from_slice(&c);
                for (i, v) in set.iter_mut().enumerate() {
                    *v |= tentspace::torus_distance(g, g.position(i), cc) < r;
                }
            }
            _ => return Err(bad(format!("cannot parse `{item}`"))),
        }
    }
    Ok(set)
}

pub fn capacity(spec: &str, dimension: Option<f64>, cfg: &ExperimentConfig, sink: &Sink) -> Result<CapacityReport> {
    let g = cfg.torus()?;
    let set = parse_setspec(spec, &g)?;
    let d = match dimension {
        Some(d) => d,
        None => tentspace::capacity_dim(&cfg.frac_params()?, g.dim),
    };
    let samples = set.iter().filter(|&&v| v).count();
    let (upper, lower, cover) = if samples == 0 {
        (0.0, 0.0, vec![])
    } else {
        let b = hausdorff_capacity(&g, &set, d)?;
        (b.upper.value, b.lower, b.upper.cubes)
    };
    let rep = CapacityReport { setspec: spec.to_string(), grid: g, dimension: d, samples, upper, lower, cover, convention_notes: notes() };
    if sink.wants(Format::Json) {
        sink.write("capacity.json", &to_json(&rep)?)?;
    }
    if sink.wants(Format::Csv) {
        let row = vec![spec.to_string(), d.to_string(), samples.to_string(), upper.to_string(), lower.to_string()];
        sink.write("capacity.csv", &csv_table(&["set", "d", "samples", "upper", "lower"], &[row]))?;
    }
    Ok(rep)
}

// ---------------------------------------------------------------- report

/// Re-render CSV and SVG views of the JSON artifacts found in `dir`.
pub fn report(dir: &Path, formats: &[Format]) -> Result<Vec<PathBuf>> {
    let sink = Sink { dir: Some(dir.to_path_buf()), formats: formats.iter().copied().filter(|f| *f != Format::Json).collect() };
    let before: Vec<PathBuf> = Vec::new();
    let mut found = false;
    let verify_path = dir.join("verify.json");
    if verify_path.exists() {
        found = true;
        let rep: VerifyReport = serde_json::from_value(read_json(&verify_path)?)?;
        render_verify(&rep, &sink, false)?;
    }
    let solve_path = dir.join("solve.json");
    if solve_path.exists() {
        found = true;
        let v = read_json(&solve_path)?;
        let list = |k: &str| -> Vec<f64> {
            v.get(k).and_then(|a| a.as_array()).map_or(vec![], |a| a.iter().map(|x| x.as_f64().unwrap_or(f64::NAN)).collect())
        };
        let (inc, rat) = (list("increments"), list("ratios"));
        if sink.wants(Format::Csv) {
            sink.write("solve.csv", &solve_csv(&inc, &rat))?;
        }
        if sink.wants(Format::Svg) {
            sink.write("solve.svg", &solve_plot(&inc, &rat))?;
        }
    }
    if !found {
        return Err(LabError::Usage(format!("no verify.json or solve.json in {}", dir.display())));
    }
    let mut written = before;
    for e in std::fs::read_dir(dir).map_err(|e| LabError::io(dir, e))? {
        let path = e.map_err(|e| LabError::io(dir, e))?.path();
        let ext = path.extension().and_then(|x| x.to_str()).unwrap_or("");
        if (ext == "csv" && sink.wants(Format::Csv)) || (ext == "svg" && sink.wants(Format::Svg)) {
            written.push(path);
        }
    }
    written.sort();
    Ok(written)
}
