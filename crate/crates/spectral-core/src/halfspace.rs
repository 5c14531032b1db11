//! Discretized upper half-space `(0, T] x torus`: time grids with exact power-weight
//! integration and sampled functions on the product grid.

use crate::field::SpectralField;
use crate::grid::TorusGrid;
use crate::{Result, SpectralError};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; order];
    let mut w = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let p = if order == 0 { 1.0 } else { p1 };
            dp = n * (z * p - p0) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[order - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[order - 1 - i] = w[i];
    }
    (x, w)
}

/// `int_lo^hi t^{-a} dt`, with `lo = 0` allowed when `a < 1`.
pub fn power_integral(a: f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let e = 1.0 - a;
    if lo == 0.0 {
        return hi.powf(e) / e;
    }
    let l = (hi / lo).ln();
    if e == 0.0 {
        l
    } else {
        lo.powf(e) * (e * l).exp_m1() / e
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TimeRule {
    /// Data piecewise-constant in `log t` on each node's cell.
    Cells,
    /// Composite Gauss-Legendre in `log t`, plus one node for `[0, b_0]`.
    GaussLog,
}

#[derive(Debug, Clone, PartialEq)]
enum Construction {
    Geometric { q: f64, m: usize },
    Dyadic { t_lo: f64, octaves: usize, per_octave: usize },
    GaussLog { breaks: Vec<f64>, order: usize, max_log_width: f64 },
}

/// Time nodes `0 < t_1 < ... < t_M` with per-node cells and quadrature weights.
#[derive(Debug, Clone)]
pub struct TimeGrid {
    pub nodes: Vec<f64>,
    /// Cell `[lo_i, hi_i]` attributed to node `i`; cells tile `[lo_0, hi_last]`.
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub rule: TimeRule,
    pub horizon: f64,
    /// GaussLog: panel of each node and its weight in `u = ln t` (`NaN` for the `[0, b_0]` node).
    panel: Vec<(f64, f64)>,
    log_weight: Vec<f64>,
    construction: Construction,
}

// Cell grids store NaN log weights, so equality goes through the defining data.
impl PartialEq for TimeGrid {
    fn eq(&self, other: &Self) -> bool {
        self.construction == other.construction
            && self.nodes == other.nodes
            && self.lo == other.lo
            && self.hi == other.hi
            && self.rule == other.rule
            && self.horizon == other.horizon
    }
}

impl TimeGrid {
    /// Solver grid `t_i = T q^{i - M}`, `i = 1..=M`, cells split at geometric midpoints.
    pub fn geometric(horizon: f64, q: f64, m: usize) -> Result<Self> {
        if !(horizon > 0.0 && horizon.is_finite()) || !(q > 1.0) || m < 3 {
            return Err(SpectralError::InvalidParams(format!(
                "geometric time grid needs T > 0, q > 1, M >= 3 (T={horizon}, q={q}, M={m})"
            )));
        }
        let nodes: Vec<f64> = (1..=m).map(|i| horizon * q.powi(i as i32 - m as i32)).collect();
        let sq = q.sqrt();
        let lo: Vec<f64> = nodes.iter().map(|t| t / sq).collect();
        let mut hi: Vec<f64> = nodes.iter().map(|t| t * sq).collect();
        hi[m - 1] = horizon;
        Ok(Self::cells(nodes, lo, hi, horizon, Construction::Geometric { q, m }))
    }

    /// Cells with boundaries `t_lo 2^{k / per_octave}` for `k = 0..=octaves*per_octave`,
    /// nodes at geometric cell midpoints.
    pub fn dyadic_cells(t_lo: f64, octaves: usize, per_octave: usize) -> Result<Self> {
        if !(t_lo > 0.0) || octaves == 0 || per_octave == 0 {
            return Err(SpectralError::InvalidParams("dyadic time grid needs t_lo > 0 and positive counts".into()));
        }
        let k = octaves * per_octave;
        let b: Vec<f64> = (0..=k).map(|i| t_lo * 2f64.powf(i as f64 / per_octave as f64)).collect();
        let nodes: Vec<f64> = (0..k).map(|i| (b[i] * b[i + 1]).sqrt()).collect();
        let horizon = b[k];
        Ok(Self::cells(
            nodes,
            b[..k].to_vec(),
            b[1..].to_vec(),
            horizon,
            Construction::Dyadic { t_lo, octaves, per_octave },
        ))
    }

    fn cells(nodes: Vec<f64>, lo: Vec<f64>, hi: Vec<f64>, horizon: f64, construction: Construction) -> Self {
        let m = nodes.len();
        Self {
            panel: lo.iter().zip(&hi).map(|(&l, &h)| (l, h)).collect(),
            log_weight: vec![f64::NAN; m],
            nodes,
            lo,
            hi,
            rule: TimeRule::Cells,
            horizon,
            construction,
        }
    }

    /// Composite Gauss rule in `ln t` between consecutive `breaks`, each gap split into
    /// panels of log-width at most `max_log_width`; `[0, breaks[0]]` gets one node.
    pub fn gauss_log(breaks: &[f64], order: usize, max_log_width: f64) -> Result<Self> {
        if breaks.len() < 2 || order == 0 || !(max_log_width > 0.0) {
            return Err(SpectralError::InvalidParams("gauss-log grid needs two breaks and order >= 1".into()));
        }
        let mut b = breaks.to_vec();
        b.sort_by(|x, y| x.partial_cmp(y).unwrap());
        b.dedup();
        if !(b[0] > 0.0) || b.iter().any(|x| !x.is_finite()) {
            return Err(SpectralError::InvalidParams("gauss-log breaks must be positive and finite".into()));
        }
        let (gx, gw) = gauss_legendre(order);
        let mut nodes = vec![b[0] / 2.0];
        let mut lo = vec![0.0];
        let mut hi = vec![b[0]];
        let mut panel = vec![(0.0, b[0])];
        let mut log_weight = vec![f64::NAN];
        for win in b.windows(2) {
            let (u0, u1) = (win[0].ln(), win[1].ln());
            let np = ((u1 - u0) / max_log_width).ceil().max(1.0) as usize;
            let du = (u1 - u0) / np as f64;
            for p in 0..np {
                let pa = u0 + p as f64 * du;
                let pl = if p == 0 { win[0] } else { pa.exp() };
                let ph = if p + 1 == np { win[1] } else { (pa + du).exp() };
                let us: Vec<f64> = gx.iter().map(|x| pa + 0.5 * du * (x + 1.0)).collect();
                for (i, &u) in us.iter().enumerate() {
                    nodes.push(u.exp());
                    lo.push(if i == 0 { pl } else { (0.5 * (us[i - 1] + u)).exp() });
                    hi.push(if i + 1 == order { ph } else { (0.5 * (u + us[i + 1])).exp() });
                    panel.push((pl, ph));
                    log_weight.push(0.5 * du * gw[i]);
                }
            }
        }
        let horizon = *b.last().unwrap();
        Ok(Self {
            nodes,
            lo,
            hi,
            rule: TimeRule::GaussLog,
            horizon,
            panel,
            log_weight,
            construction: Construction::GaussLog { breaks: b, order, max_log_width },
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Ratio of the geometric solver grid, if this is one.
    pub fn ratio(&self) -> Option<f64> {
        match self.construction {
            Construction::Geometric { q, .. } => Some(q),
            _ => None,
        }
    }

    /// Next grid in the nested refinement sequence.
    pub fn refined(&self) -> Result<Self> {
        match &self.construction {
            Construction::Geometric { q, m } => Self::geometric(self.horizon, q.sqrt(), 2 * m - 1),
            Construction::Dyadic { t_lo, octaves, per_octave } => {
                Self::dyadic_cells(*t_lo, *octaves, 2 * per_octave)
            }
            Construction::GaussLog { breaks, order, max_log_width } => {
                Self::gauss_log(breaks, *order, max_log_width / 2.0)
            }
        }
    }

    /// Index of the node equal to `t` within relative `1e-12`.
    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.nodes.iter().position(|&s| (s - t).abs() <= 1e-12 * t.abs().max(s))
    }

    /// Weight of node `i` in `int_0^tau g(t) t^{-a} dt`.
    ///
    /// With `from_zero = false` the integral starts at the lower edge of the first cell
    /// (GaussLog: the `[0, b_0]` node is dropped). `from_zero` needs `a < 1`.
    pub fn weight(&self, i: usize, a: f64, tau: f64, from_zero: bool) -> f64 {
        match self.rule {
            TimeRule::Cells => {
                let l = if i == 0 && from_zero { 0.0 } else { self.lo[i] };
                power_integral(a, l, self.hi[i].min(tau))
            }
            TimeRule::GaussLog => {
                if self.log_weight[i].is_nan() {
                    return if from_zero { power_integral(a, 0.0, self.hi[i].min(tau)) } else { 0.0 };
                }
                let (pl, ph) = self.panel[i];
                if tau >= ph {
                    self.log_weight[i] * self.nodes[i].powf(1.0 - a)
                } else if tau <= pl {
                    0.0
                } else {
                    power_integral(a, self.lo[i], self.hi[i].min(tau))
                }
            }
        }
    }

    /// Weights of every node for `int_0^tau g(t) t^{-a} dt`.
    pub fn weights(&self, a: f64, tau: f64, from_zero: bool) -> Result<Vec<f64>> {
        if from_zero && a >= 1.0 {
            return Err(SpectralError::InvalidParams(format!("t^-{a} is not integrable at 0")));
        }
        Ok((0..self.len()).map(|i| self.weight(i, a, tau, from_zero)).collect())
    }
}

/// Values `F(t_i, x_j)` (optionally vector-valued) on a time grid times a torus grid.
///
/// Layout: `values[(i * components + c) * N^n + j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpaceSample {
    pub times: TimeGrid,
    pub grid: TorusGrid,
    pub components: usize,
    pub values: Vec<f64>,
}

impl HalfSpaceSample {
    pub fn zeros(times: TimeGrid, grid: TorusGrid, components: usize) -> Self {
        let values = vec![0.0; times.len() * components * grid.len()];
        Self { times, grid, components, values }
    }

    /// Scalar sample from `F(i, t_i, j, x_j)`.
    pub fn from_fn<F: Fn(usize, f64, usize, [f64; 3]) -> f64>(times: TimeGrid, grid: TorusGrid, f: F) -> Self {
        let len = grid.len();
        let mut values = Vec::with_capacity(times.len() * len);
        for (i, &t) in times.nodes.iter().enumerate() {
            for j in 0..len {
                values.push(f(i, t, j, grid.position(j)));
            }
        }
        Self { times, grid, components: 1, values }
    }

    /// One physical snapshot per time node.
    pub fn from_fields(times: TimeGrid, fields: &[SpectralField]) -> Result<Self> {
        let first = fields.first().ok_or(SpectralError::InvalidParams("no snapshots".into()))?;
        if fields.len() != times.len() {
            return Err(SpectralError::ShapeMismatch { expected: times.len(), got: fields.len() });
        }
        let (grid, components) = (first.grid, first.components);
        let mut values = Vec::with_capacity(times.len() * components * grid.len());
        for f in fields {
            if f.grid != grid || f.components != components {
                return Err(SpectralError::GridMismatch);
            }
            values.extend(f.to_samples());
        }
        Ok(Self { times, grid, components, values })
    }

    #[inline]
    pub fn get(&self, i: usize, c: usize, j: usize) -> f64 {
        self.values[(i * self.components + c) * self.grid.len() + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, c: usize, j: usize, v: f64) {
        let len = self.grid.len();
        self.values[(i * self.components + c) * len + j] = v;
    }

    /// `|F(t_i, x_j)|^2` summed over components.
    #[inline]
    pub fn abs_sq(&self, i: usize, j: usize) -> f64 {
        (0..self.components).map(|c| self.get(i, c, j).powi(2)).sum()
    }

    /// `|F|` at every sample as a scalar sample.
    pub fn magnitude(&self) -> HalfSpaceSample {
        let len = self.grid.len();
        let mut values = Vec::with_capacity(self.times.len() * len);
        for i in 0..self.times.len() {
            for j in 0..len {
                values.push(self.abs_sq(i, j).sqrt());
            }
        }
        HalfSpaceSample { times: self.times.clone(), grid: self.grid, components: 1, values }
    }

    /// Same sample multiplied pointwise by `w(t_i)`.
    pub fn time_weighted<W: Fn(f64) -> f64>(&self, w: W) -> HalfSpaceSample {
        let block = self.components * self.grid.len();
        let mut out = self.clone();
        for (i, &t) in self.times.nodes.iter().enumerate() {
            let s = w(t);
            out.values[i * block..(i + 1) * block].iter_mut().for_each(|v| *v *= s);
        }
        out
    }

    pub fn scale(&self, s: f64) -> HalfSpaceSample {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |a, &v| a.max(v.abs()))
    }

    pub fn is_nonneg(&self) -> bool {
        self.values.iter().all(|&v| v >= 0.0)
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(SpectralError::InvalidParams("non-finite half-space sample".into()))
        }
    }

    pub fn same_layout(&self, other: &HalfSpaceSample) -> bool {
        self.grid == other.grid && self.times == other.times
    }
}
