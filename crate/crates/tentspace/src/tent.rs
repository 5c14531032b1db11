//! `T^inf` norm, tent atoms and the constructive atomic decomposition.

use crate::capacity::{hausdorff_capacity, DyadicCube};
use crate::cone::{ball_volume, in_tent, nontangential_max};
use crate::{capacity_dim, node_weights, t1_power, tinf_power, Result, TentError};
use qnorms::carleson::ball_sums;
use qnorms::family::Ball;
use qnorms::{BallFamily, NormReport, Quadrature, ReportParams, Witness};
use serde::Serialize;
use spectral_core::{FracParams, HalfSpaceSample, KahanSum, TimeGrid, TorusGrid};
use std::collections::BTreeMap;

/// `sup_B (|B|^{-1 + 2(alpha+beta-1)/n} int_{T(B)} |F|^2 t^{-1-2(alpha-beta+1)} dt dy)^{1/2}`.
pub fn t_infty_norm(f: &HalfSpaceSample, p: &FracParams, balls: &BallFamily) -> Result<NormReport> {
    p.require_tent()?;
    if balls.grid != f.grid {
        return Err(TentError::GridMismatch);
    }
    let g = f.grid;
    let n = g.dim;
    let len = g.len();
    let w = node_weights(&f.times, tinf_power(p));
    let d = capacity_dim(p, n);
    let slices: Vec<Vec<f64>> = (0..f.times.len()).map(|i| (0..len).map(|j| f.abs_sq(i, j)).collect()).collect();
    let mut best = (f64::NEG_INFINITY, Ball { center: balls.centers[0], radius: balls.radii[0] });
    for &r in &balls.radii {
        let mut acc = vec![KahanSum::new(); len];
        for (i, &t) in f.times.nodes.iter().enumerate() {
            if t >= r || w[i] == 0.0 {
                continue;
            }
            let s = ball_sums(&g, &slices[i], r - t)?;
            for (a, v) in acc.iter_mut().zip(&s) {
                a.add(w[i] * v.max(0.0));
            }
        }
        let scale = ball_volume(n, r).powf(-d / n as f64) * g.cell_volume();
        for &c in &balls.centers {
            let v = scale * acc[c].value();
            if v > best.0 {
                best = (v, Ball { center: c, radius: r });
            }
        }
    }
    Ok(NormReport::new(
        "T^inf_{alpha,beta}",
        best.0.max(0.0).sqrt(),
        Witness::ball(&g, best.1),
        ReportParams { alpha: Some(p.alpha), beta: Some(p.beta), horizon: None, grid: g },
        Quadrature { grid: g, time_nodes: f.times.len(), excluded_diagonal: false, rates: vec![] },
    )
    .note("tent: samples with |y - x_B| < r - t"))
}

/// A function supported in the tent over `B(center, radius)`, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct TentAtom {
    pub center: [f64; 3],
    pub radius: f64,
    pub times: TimeGrid,
    pub grid: TorusGrid,
    /// `(time node, sample, value)`.
    pub entries: Vec<(usize, usize, f64)>,
}

impl TentAtom {
    /// Constant on the sampled tent, normalized so its functional equals the bound.
    pub fn indicator(times: TimeGrid, grid: TorusGrid, center: [f64; 3], radius: f64, p: &FracParams) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, &t) in times.nodes.iter().enumerate() {
            for x in 0..grid.len() {
                if in_tent(&grid, center, radius, t, x) {
                    entries.push((i, x, 1.0));
                }
            }
        }
        if entries.is_empty() {
            return Err(TentError::InvalidInput("tent contains no samples".into()));
        }
        let mut atom = Self { center, radius, times, grid, entries };
        let v = atom.functional(p);
        let bound = atom.bound(p);
        let c = (bound / v).sqrt();
        atom.entries.iter_mut().for_each(|e| e.2 = c);
        Ok(atom)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.entries.iter_mut().for_each(|e| e.2 *= s);
        out
    }

    /// `int |a|^2 t^{-(1 - 2(alpha - beta + 1))} dt dy` on the samples.
    pub fn functional(&self, p: &FracParams) -> f64 {
        let w = node_weights(&self.times, t1_power(p));
        let mut k = KahanSum::new();
        for &(i, _, v) in &self.entries {
            k.add(v * v * w[i]);
        }
        k.value() * self.grid.cell_volume()
    }

    /// `|B|^{-1 + 2(alpha + beta - 1)/n}`.
    pub fn bound(&self, p: &FracParams) -> f64 {
        let n = self.grid.dim;
        ball_volume(n, self.radius).powf(-capacity_dim(p, n) / n as f64)
    }

    pub fn to_sample(&self) -> HalfSpaceSample {
        let mut s = HalfSpaceSample::zeros(self.times.clone(), self.grid, 1);
        for &(i, x, v) in &self.entries {
            s.set(i, 0, x, s.get(i, 0, x) + v);
        }
        s
    }
}

/// Outcome of [`validate_atom`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomCertificate {
    pub support_ok: bool,
    /// Largest `|a|` on samples outside the tent.
    pub outside_max: f64,
    pub functional: f64,
    pub bound: f64,
    /// `functional / bound`.
    pub ratio: f64,
    /// `bound - functional`.
    pub margin: f64,
    pub pass: bool,
}

pub fn validate_atom(a: &TentAtom, p: &FracParams) -> AtomCertificate {
    let mut outside_max: f64 = 0.0;
    for &(i, x, v) in &a.entries {
        if v != 0.0 && !in_tent(&a.grid, a.center, a.radius, a.times.nodes[i], x) {
            outside_max = outside_max.max(v.abs());
        }
    }
    let functional = a.functional(p);
    let bound = a.bound(p);
    let support_ok = outside_max == 0.0;
    AtomCertificate {
        support_ok,
        outside_max,
        functional,
        bound,
        ratio: functional / bound,
        margin: bound - functional,
        pass: support_ok && functional <= bound * (1.0 + 1e-10),
    }
}

/// One atom of a decomposition with the dyadic cube that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposedAtom {
    pub lambda: f64,
    pub level: i32,
    pub cube: DyadicCube,
    pub atom: TentAtom,
}

/// JSON-facing summary of one atom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomSummary {
    pub center: [f64; 3],
    pub radius: f64,
    pub lambda: f64,
    pub level: i32,
    #[serde(rename = "V")]
    pub functional: f64,
    pub margin: f64,
}

/// Cover used at one level `E_k = {N omega > 2^k}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelCover {
    pub k: i32,
    pub cubes: usize,
    pub cover_value: f64,
    pub capacity: f64,
    /// `cover_value / capacity`; above 1 when cubes were enlarged to reach tall tent points.
    pub cover_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomicDecomposition {
    pub atoms: Vec<DecomposedAtom>,
    pub levels: Vec<LevelCover>,
    /// `max |sum lambda a - F| / max |F|` on the samples.
    pub residual: f64,
    pub l1: f64,
    /// Whether every support sample was assigned to exactly one region.
    pub disjoint: bool,
}

impl AtomicDecomposition {
    pub fn summaries(&self, p: &FracParams) -> Vec<AtomSummary> {
        self.atoms
            .iter()
            .map(|a| {
                let c = validate_atom(&a.atom, p);
                AtomSummary {
                    center: a.atom.center,
                    radius: a.atom.radius,
                    lambda: a.lambda,
                    level: a.level,
                    functional: c.functional,
                    margin: c.margin,
                }
            })
            .collect()
    }
}

/// Floor applied to positive weights on the support of `F`.
pub const OMEGA_FLOOR: f64 = 1e-300;

/// Largest `k` with `2^k < v`.
fn level_below(v: f64) -> i32 {
    let mut k = v.log2().floor() as i32;
    while 2f64.powi(k) >= v {
        k -= 1;
    }
    while 2f64.powi(k + 1) < v {
        k += 1;
    }
    k
}

struct LevelBoxes {
    k: i32,
    cubes: Vec<Option<DyadicCube>>,
    owner: Vec<usize>,
}

pub fn atomic_decompose(f: &HalfSpaceSample, omega: &HalfSpaceSample, p: &FracParams) -> Result<AtomicDecomposition> {
    p.require_tent()?;
    if !f.same_layout(omega) || f.components != 1 {
        return Err(TentError::InvalidInput("F and omega must be scalar samples on the same grids".into()));
    }
    f.check_finite()?;
    omega.check_finite()?;
    if !omega.is_nonneg() {
        return Err(TentError::InvalidInput("omega has negative samples".into()));
    }
    let g = f.grid;
    let len = g.len();
    let n = g.dim;
    let d = capacity_dim(p, n);
    let mut om = omega.clone();
    let mut support = Vec::new();
    for i in 0..f.times.len() {
        for x in 0..len {
            let v = f.get(i, 0, x);
            if v != 0.0 {
                let w = om.get(i, 0, x);
                if w == 0.0 {
                    return Err(TentError::OmegaVanishes { node: i, sample: x });
                }
                om.set(i, 0, x, w.max(OMEGA_FLOOR));
                support.push((i, x));
            }
        }
    }
    if support.is_empty() {
        return Ok(AtomicDecomposition { atoms: vec![], levels: vec![], residual: 0.0, l1: 0.0, disjoint: true });
    }
    let nw = nontangential_max(&om);
    let k_lo = support.iter().map(|&(i, x)| level_below(om.get(i, 0, x))).min().unwrap();
    let k_hi = level_below(nw.iter().fold(0.0f64, |a, &b| a.max(b)));
    let sqrt_n = (n as f64).sqrt();
    let h = g.spacing();
    let top = g.n().trailing_zeros();

    let mut boxes: Vec<LevelBoxes> = Vec::new();
    let mut levels = Vec::new();
    for k in (k_lo..=k_hi).rev() {
        let thr = 2f64.powi(k);
        let set: Vec<bool> = nw.iter().map(|&v| v > thr).collect();
        let cap = hausdorff_capacity(&g, &set, d)?;
        let mut cubes: Vec<Option<DyadicCube>> = cap.upper.cubes.iter().map(|c| Some(*c)).collect();
        let mut owner = vec![usize::MAX; len];
        for (ci, c) in cubes.iter().enumerate() {
            for s in c.unwrap().samples(&g) {
                owner[s] = ci;
            }
        }
        for &(i, x) in &support {
            if om.get(i, 0, x) <= thr {
                continue;
            }
            let t = f.times.nodes[i];
            let ci = owner[x];
            let cur = cubes[ci].expect("owner points at a live cube");
            if t < 2.0 * sqrt_n * cur.length(&g) {
                continue;
            }
            let mut lvl = cur.level;
            while lvl < top && t >= 2.0 * sqrt_n * (1usize << lvl) as f64 * h {
                lvl += 1;
            }
            let big = cur.ancestor(lvl);
            for c in cubes.iter_mut() {
                if c.is_some_and(|c| c.inside(&big)) {
                    *c = None;
                }
            }
            cubes.push(Some(big));
            let id = cubes.len() - 1;
            for s in big.samples(&g) {
                owner[s] = id;
            }
        }
        let live: Vec<DyadicCube> = cubes.iter().flatten().copied().collect();
        let cover_value: f64 = live.iter().map(|c| c.length(&g).powf(d)).sum();
        levels.push(LevelCover {
            k,
            cubes: live.len(),
            cover_value,
            capacity: cap.upper.value,
            cover_ratio: cover_value / cap.upper.value,
        });
        boxes.push(LevelBoxes { k, cubes, owner });
    }

    // Each support sample goes to the highest level whose box S*(I) contains it.
    let mut regions: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for &(i, x) in &support {
        let t = f.times.nodes[i];
        let hit = boxes.iter().enumerate().find_map(|(li, b)| {
            let ci = b.owner[x];
            if ci == usize::MAX {
                return None;
            }
            let c = b.cubes[ci]?;
            (t < 2.0 * sqrt_n * c.length(&g)).then_some((li, ci))
        });
        match hit {
            Some(key) => regions.entry(key).or_default().push((i, x)),
            None => return Err(TentError::InvalidInput(format!("support sample ({i}, {x}) left uncovered"))),
        }
    }

    let w = node_weights(&f.times, t1_power(p));
    let vol = g.cell_volume();
    let mut atoms = Vec::new();
    let mut rebuilt = vec![0.0; f.times.len() * len];
    let mut assigned = 0usize;
    for ((li, ci), pts) in regions {
        let cube = boxes[li].cubes[ci].expect("region cube is live");
        let mut s = KahanSum::new();
        for &(i, x) in &pts {
            s.add(f.get(i, 0, x).powi(2) * w[i]);
        }
        let l_star = 5.0 * sqrt_n * cube.length(&g);
        let lambda = (l_star.powf(d) * s.value() * vol).sqrt();
        if !(lambda > 0.0) {
            return Err(TentError::InvalidInput("region with vanishing time weight".into()));
        }
        let entries: Vec<(usize, usize, f64)> = pts.iter().map(|&(i, x)| (i, x, f.get(i, 0, x) / lambda)).collect();
        for &(i, x, v) in &entries {
            rebuilt[i * len + x] += lambda * v;
        }
        assigned += pts.len();
        atoms.push(DecomposedAtom {
            lambda,
            level: boxes[li].k,
            cube,
            atom: TentAtom { center: cube.center(&g), radius: l_star / 2.0, times: f.times.clone(), grid: g, entries },
        });
    }
    let scale = f.max_abs();
    let residual = rebuilt.iter().zip(&f.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / scale;
    let l1 = atoms.iter().map(|a| a.lambda).sum();
    Ok(AtomicDecomposition { atoms, levels, residual, l1, disjoint: assigned == support.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (TorusGrid, TimeGrid, FracParams) {
        let g = TorusGrid::new(2, 16, 1.0).unwrap();
        (g, TimeGrid::dyadic_cells(1.0 / 64.0, 5, 2).unwrap(), FracParams::new(0.3, 0.8).unwrap())
    }

    #[test]
    fn indicator_atom_passes_and_doubled_fails() {
        let (g, t, p) = setup();
        let a = TentAtom::indicator(t, g, [0.5, 0.5, 0.0], 0.3, &p).unwrap();
        let c = validate_atom(&a, &p);
        assert!(c.pass && (c.ratio - 1.0).abs() < 1e-12);
        let c2 = validate_atom(&a.scaled(2.0), &p);
        assert!(!c2.pass && (c2.ratio - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_field_has_empty_decomposition() {
        let (g, t, p) = setup();
        let z = HalfSpaceSample::zeros(t.clone(), g, 1);
        let mut om = z.clone();
        om.values.iter_mut().for_each(|v| *v = 1.0);
        let d = atomic_decompose(&z, &om, &p).unwrap();
        assert!(d.atoms.is_empty() && d.l1 == 0.0);
    }

    #[test]
    fn vanishing_omega_is_rejected() {
        let (g, t, p) = setup();
        let mut f = HalfSpaceSample::zeros(t, g, 1);
        f.set(2, 0, 5, 1.0);
        let om = HalfSpaceSample::zeros(f.times.clone(), g, 1);
        assert!(matches!(atomic_decompose(&f, &om, &p), Err(TentError::OmegaVanishes { .. })));
    }

    #[test]
    fn level_below_is_strict() {
        assert_eq!(level_below(4.0), 1);
        assert_eq!(level_below(4.5), 2);
        assert_eq!(level_below(0.75), -1);
    }
}
