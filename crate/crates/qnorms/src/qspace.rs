//! Double-difference norms over cubes: `Q^beta_alpha`, its translated form and `BMO^beta`.

use crate::family::{ball_offsets, Cube, CubeFamily};
use crate::report::{NormReport, Quadrature, ReportParams, Witness};
use crate::{QnormError, Result};
use spectral_core::{FracParams, KahanSum, SpectralField, TorusGrid};

/// Sample view of a (possibly vector) field: `components` blocks of `N^n` values.
#[derive(Debug, Clone, Copy)]
pub struct Samples<'a> {
    pub grid: TorusGrid,
    pub components: usize,
    pub values: &'a [f64],
}

impl<'a> Samples<'a> {
    pub fn new(grid: TorusGrid, components: usize, values: &'a [f64]) -> Result<Self> {
        if components == 0 || values.len() != components * grid.len() {
            return Err(QnormError::InvalidInput(format!(
                "{} samples do not match {components} components on {} points",
                values.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, components, values })
    }

    #[inline]
    fn at(&self, c: usize, idx: usize) -> f64 {
        self.values[c * self.grid.len() + idx]
    }

    fn gather(&self, cube: &Cube) -> (Vec<Vec<f64>>, Vec<[usize; 3]>) {
        let pts = cube.samples(&self.grid);
        let vals = (0..self.components)
            .map(|c| pts.iter().map(|(i, _)| self.at(c, *i)).collect())
            .collect();
        (vals, pts.into_iter().map(|(_, l)| l).collect())
    }
}

/// Exponent `n + 2(alpha - beta + 1)` of the pair kernel.
fn kernel_exponent(n: usize, alpha: f64, beta: f64) -> f64 {
    n as f64 + 2.0 * (alpha - beta + 1.0)
}

/// `U_1(I) = sum_{x != y in I} |f(x) - f(y)|^2 |x - y|^{-(n + 2(alpha - beta + 1))} h^{2n}`.
pub fn pair_energy(s: &Samples, cube: &Cube, alpha: f64, beta: f64) -> f64 {
    let g = s.grid;
    let n = g.dim;
    let h = g.spacing();
    let e = kernel_exponent(n, alpha, beta);
    let side = cube.side;
    let table: Vec<f64> = (0..side.pow(n as u32))
        .map(|m| {
            let mut rest = m;
            let mut d2 = 0usize;
            for _ in 0..n {
                let d = rest % side;
                rest /= side;
                d2 += d * d;
            }
            if d2 == 0 {
                0.0
            } else {
                ((d2 as f64).sqrt() * h).powf(-e)
            }
        })
        .collect();
    let (vals, local) = s.gather(cube);
    let cnt = local.len();
    let mut acc = KahanSum::new();
    for p in 0..cnt {
        for q in p + 1..cnt {
            let mut key = 0usize;
            for a in 0..n {
                key = key * side + local[p][a].abs_diff(local[q][a]);
            }
            let mut d2 = 0.0;
            for v in &vals {
                d2 += (v[p] - v[q]).powi(2);
            }
            acc.add(d2 * table[key]);
        }
    }
    2.0 * acc.value() * h.powi(2 * n as i32)
}

/// `U_2(I) = sum_{x in I} sum_{0 < |y| < rho} |f(x + y) - f(x)|^2 |y|^{-(n + 2(alpha - beta + 1))} h^{2n}`.
pub fn translated_energy(s: &Samples, cube: &Cube, rho: f64, alpha: f64, beta: f64) -> f64 {
    let g = s.grid;
    let n = g.dim;
    let h = g.spacing();
    let e = kernel_exponent(n, alpha, beta);
    let offs: Vec<([i64; 3], f64)> = ball_offsets(&g, rho)
        .into_iter()
        .filter(|d| d.iter().any(|&x| x != 0))
        .map(|d| {
            let r = ((d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) as f64).sqrt() * h;
            (d, r.powf(-e))
        })
        .collect();
    let mut acc = KahanSum::new();
    for (idx, _) in cube.samples(&g) {
        let c = g.coords(idx);
        for (d, w) in &offs {
            let j = g.flat_wrapped(&[c[0] as i64 + d[0], c[1] as i64 + d[1], c[2] as i64 + d[2]]);
            let mut d2 = 0.0;
            for comp in 0..s.components {
                d2 += (s.at(comp, j) - s.at(comp, idx)).powi(2);
            }
            acc.add(d2 * w);
        }
    }
    acc.value() * h.powi(2 * n as i32)
}

/// Scale weight `l(I)^{2(alpha + beta - 1) - n}`.
fn cube_weight(len: f64, n: usize, alpha: f64, beta: f64) -> f64 {
    len.powf(2.0 * (alpha + beta - 1.0) - n as f64)
}

/// Weighted energies `l(I)^{2(alpha+beta-1)-n} U_1(I)` for every cube of the family.
pub fn cube_energies(s: &Samples, alpha: f64, beta: f64, cubes: &CubeFamily) -> Result<Vec<f64>> {
    check_family(s, cubes)?;
    Ok(cubes
        .cubes
        .iter()
        .map(|c| cube_weight(c.length(&s.grid), s.grid.dim, alpha, beta) * pair_energy(s, c, alpha, beta))
        .collect())
}

fn check_family(s: &Samples, cubes: &CubeFamily) -> Result<()> {
    if cubes.is_empty() {
        return Err(QnormError::EmptyFamily);
    }
    if cubes.grid != s.grid {
        return Err(QnormError::GridMismatch);
    }
    Ok(())
}

/// First index attaining the maximum (ties keep the earliest).
pub fn arg_max(values: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, &v) in values.iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

fn q_params(p: &FracParams, grid: TorusGrid) -> ReportParams {
    ReportParams { alpha: Some(p.alpha), beta: Some(p.beta), horizon: None, grid }
}

fn pair_quadrature(grid: TorusGrid, p: &FracParams) -> Quadrature {
    Quadrature {
        grid,
        time_nodes: 0,
        excluded_diagonal: true,
        rates: vec![("diagonal cells".into(), 2.0 * (p.beta - p.alpha))],
    }
}

/// `sup_I (l(I)^{2(alpha+beta-1)-n} U_1(I))^{1/2}` from physical samples.
pub fn q_norm_samples(s: &Samples, p: &FracParams, cubes: &CubeFamily) -> Result<NormReport> {
    let vals = cube_energies(s, p.alpha, p.beta, cubes)?;
    let (i, v) = arg_max(&vals);
    Ok(NormReport::new(
        "Q_alpha^beta",
        v.max(0.0).sqrt(),
        Witness::cube(&s.grid, i, cubes.cubes[i]),
        q_params(p, s.grid),
        pair_quadrature(s.grid, p),
    ))
}

pub fn q_norm(f: &SpectralField, p: &FracParams, cubes: &CubeFamily) -> Result<NormReport> {
    let v = f.to_samples();
    q_norm_samples(&Samples::new(f.grid, f.components, &v)?, p, cubes)
}

/// Translated-difference norm with its ratio to [`q_norm`] on the same family.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslatedReport {
    pub report: NormReport,
    pub q_norm: f64,
    pub ratio: f64,
}

pub fn q_norm_translated(f: &SpectralField, p: &FracParams, cubes: &CubeFamily) -> Result<TranslatedReport> {
    let v = f.to_samples();
    let s = Samples::new(f.grid, f.components, &v)?;
    check_family(&s, cubes)?;
    let vals: Vec<f64> = cubes
        .cubes
        .iter()
        .map(|c| {
            let len = c.length(&s.grid);
            cube_weight(len, s.grid.dim, p.alpha, p.beta) * translated_energy(&s, c, len, p.alpha, p.beta)
        })
        .collect();
    let (i, best) = arg_max(&vals);
    let q = q_norm_samples(&s, p, cubes)?.value;
    let value = best.max(0.0).sqrt();
    let ratio = if q == 0.0 { if value == 0.0 { 1.0 } else { f64::INFINITY } } else { value / q };
    let report = NormReport::new(
        "Q_alpha^beta (translated differences)",
        value,
        Witness::cube(&s.grid, i, cubes.cubes[i]),
        q_params(p, s.grid),
        pair_quadrature(s.grid, p),
    )
    .note(format!("ratio to pair form on the same family: {ratio}"));
    Ok(TranslatedReport { report, q_norm: q, ratio })
}

/// `sup_I (|I|^{-1 + 4(beta - 1)/n} int_I |f - f_I|^2)^{1/2}` for `1/2 < beta <= 1`.
pub fn bmo_beta_norm(f: &SpectralField, beta: f64, cubes: &CubeFamily) -> Result<NormReport> {
    if !(beta > 0.5 && beta <= 1.0) {
        return Err(QnormError::InvalidInput(format!("beta = {beta} outside (1/2, 1]")));
    }
    let v = f.to_samples();
    let s = Samples::new(f.grid, f.components, &v)?;
    check_family(&s, cubes)?;
    let g = s.grid;
    let n = g.dim as f64;
    let vol = g.cell_volume();
    let vals: Vec<f64> = cubes
        .cubes
        .iter()
        .map(|c| {
            let (vals, _) = s.gather(c);
            let mut osc = KahanSum::new();
            for comp in &vals {
                let mut m = KahanSum::new();
                comp.iter().for_each(|&x| m.add(x));
                let mean = m.value() / comp.len() as f64;
                comp.iter().for_each(|&x| osc.add((x - mean).powi(2)));
            }
            let len = c.length(&g);
            len.powf(-n + 4.0 * (beta - 1.0)) * osc.value() * vol
        })
        .collect();
    let (i, best) = arg_max(&vals);
    Ok(NormReport::new(
        "BMO^beta",
        best.max(0.0).sqrt(),
        Witness::cube(&g, i, cubes.cubes[i]),
        ReportParams { alpha: None, beta: Some(beta), horizon: None, grid: g },
        Quadrature { grid: g, time_nodes: 0, excluded_diagonal: false, rates: vec![] },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::synth::random_field;

    fn params() -> FracParams {
        FracParams::new(0.3, 0.8).unwrap()
    }

    #[test]
    fn constants_vanish_and_shift_by_constant_is_exact() {
        let g = TorusGrid::new(2, 16, 1.0).unwrap();
        let fam = CubeFamily::dyadic(g).unwrap();
        let c = SpectralField::from_samples(g, 1, &vec![3.0; g.len()]).unwrap();
        assert_eq!(q_norm(&c, &params(), &fam).unwrap().value, 0.0);
        assert_eq!(bmo_beta_norm(&c, 0.8, &fam).unwrap().value, 0.0);
        assert_eq!(q_norm_translated(&c, &params(), &fam).unwrap().report.value, 0.0);

        let f = random_field(g, 1, 4, 1.0, 5, false);
        let samples = f.to_samples();
        let shifted: Vec<f64> = samples.iter().map(|x| x + 2.5).collect();
        let a = q_norm_samples(&Samples::new(g, 1, &samples).unwrap(), &params(), &fam).unwrap();
        let b = q_norm_samples(&Samples::new(g, 1, &shifted).unwrap(), &params(), &fam).unwrap();
        assert!((a.value - b.value).abs() <= 1e-12 * a.value);
    }

    #[test]
    fn pair_energy_two_point_cube() {
        // Side-2 cube in 1-D: two samples, U = 2 |f0 - f1|^2 h^{-(1 + 2(a-b+1))} h^2.
        let g = TorusGrid::new(1, 8, 8.0).unwrap();
        let vals = [0.0, 1.0, 3.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let s = Samples::new(g, 1, &vals).unwrap();
        let u = pair_energy(&s, &Cube { start: [1, 0, 0], side: 2 }, 0.3, 0.8);
        let want = 2.0 * 4.0 * 1f64.powf(-(1.0 + 2.0 * 0.5)) * 1.0;
        assert!((u - want).abs() < 1e-14);
    }

    #[test]
    fn bmo_rejects_bad_beta_and_family_mismatch() {
        let g = TorusGrid::new(1, 32, 1.0).unwrap();
        let fam = CubeFamily::dyadic(g).unwrap();
        let f = random_field(g, 1, 1, 1.0, 4, false);
        assert!(bmo_beta_norm(&f, 0.4, &fam).is_err());
        let other = CubeFamily::dyadic(TorusGrid::new(1, 64, 1.0).unwrap()).unwrap();
        assert!(matches!(q_norm(&f, &params(), &other), Err(QnormError::GridMismatch)));
    }
}
