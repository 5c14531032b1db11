//! Discrete families of cubes and balls over which suprema are taken.

use crate::{QnormError, Result};
use serde::Serialize;
use spectral_core::TorusGrid;

/// Axis-parallel cube covering the samples `start[a] .. start[a] + side` on each axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Cube {
    pub start: [usize; 3],
    pub side: usize,
}

impl Cube {
    /// Side length `l(I) = side * h`.
    pub fn length(&self, grid: &TorusGrid) -> f64 {
        self.side as f64 * grid.spacing()
    }

    /// Geometric center of the sample block.
    pub fn center(&self, grid: &TorusGrid) -> [f64; 3] {
        let h = grid.spacing();
        let mut c = [0.0; 3];
        for a in 0..grid.dim {
            c[a] = (self.start[a] as f64 + (self.side as f64 - 1.0) / 2.0) * h;
        }
        c
    }

    /// Flat indices of the covered samples (wrapping), with local offsets.
    pub fn samples(&self, grid: &TorusGrid) -> Vec<(usize, [usize; 3])> {
        let s = self.side;
        let count = s.pow(grid.dim as u32);
        let mut out = Vec::with_capacity(count);
        for m in 0..count {
            let mut local = [0usize; 3];
            let mut rest = m;
            for a in (0..grid.dim).rev() {
                local[a] = rest % s;
                rest /= s;
            }
            let mut c = [0i64; 3];
            for a in 0..grid.dim {
                c[a] = (self.start[a] + local[a]) as i64;
            }
            out.push((grid.flat_wrapped(&c), local));
        }
        out
    }
}

/// Cubes on one grid; the discretized supremum ranges over exactly this list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubeFamily {
    pub grid: TorusGrid,
    pub cubes: Vec<Cube>,
}

impl CubeFamily {
    /// Sides `2^j` samples for `j = 2 ..= log2 N - 2`, starts on multiples of half a side,
    /// every cube inside the central half `[N/4, 3N/4)` of each axis.
    pub fn dyadic(grid: TorusGrid) -> Result<Self> {
        let n = grid.n();
        let top = n.trailing_zeros() as usize;
        let sides: Vec<usize> = (2..=top.saturating_sub(2)).map(|j| 1usize << j).collect();
        Self::central(grid, &sides)
    }

    /// Cubes of the given sample sides tiled over the central half with step `side / 2`.
    pub fn central(grid: TorusGrid, sides: &[usize]) -> Result<Self> {
        let n = grid.n();
        let (lo, hi) = (n / 4, 3 * n / 4);
        let mut cubes = Vec::new();
        for &s in sides {
            if s == 0 || s > n / 4 {
                return Err(QnormError::InvalidInput(format!("cube side {s} exceeds N/4 = {}", n / 4)));
            }
            let step = (s / 2).max(1);
            let starts: Vec<usize> = (lo..=hi - s).step_by(step).collect();
            let per_axis = starts.len();
            for m in 0..per_axis.pow(grid.dim as u32) {
                let mut start = [0usize; 3];
                let mut rest = m;
                for a in (0..grid.dim).rev() {
                    start[a] = starts[rest % per_axis];
                    rest /= per_axis;
                }
                cubes.push(Cube { start, side: s });
            }
        }
        Self::from_cubes(grid, cubes)
    }

    pub fn from_cubes(grid: TorusGrid, cubes: Vec<Cube>) -> Result<Self> {
        if cubes.is_empty() {
            return Err(QnormError::EmptyFamily);
        }
        if cubes.iter().any(|c| c.side == 0 || c.side > grid.n()) {
            return Err(QnormError::InvalidInput("cube side outside 1..=N".into()));
        }
        Ok(Self { grid, cubes })
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    /// Every cube translated by a grid shift (wrapping).
    pub fn shifted(&self, shift: [i64; 3]) -> Self {
        let n = self.grid.n() as i64;
        let cubes = self
            .cubes
            .iter()
            .map(|c| {
                let mut start = c.start;
                for a in 0..self.grid.dim {
                    start[a] = (c.start[a] as i64 + shift[a]).rem_euclid(n) as usize;
                }
                Cube { start, side: c.side }
            })
            .collect();
        Self { grid: self.grid, cubes }
    }

    /// Image under `x -> lambda x` on the torus: starts and sides multiplied by `lambda`.
    pub fn dilated(&self, lambda: usize) -> Result<Self> {
        let n = self.grid.n();
        let mut cubes = Vec::with_capacity(self.cubes.len());
        for c in &self.cubes {
            if c.side * lambda > n {
                return Err(QnormError::InvalidInput(format!("dilated side {} exceeds N", c.side * lambda)));
            }
            let mut start = c.start;
            for a in 0..self.grid.dim {
                start[a] = (c.start[a] * lambda) % n;
            }
            cubes.push(Cube { start, side: c.side * lambda });
        }
        Ok(Self { grid: self.grid, cubes })
    }

    /// Same physical cubes on a grid with `factor` times as many points per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let grid = self.grid.refined(factor)?;
        let cubes = self
            .cubes
            .iter()
            .map(|c| {
                let mut start = c.start;
                for a in 0..self.grid.dim {
                    start[a] = c.start[a] * factor;
                }
                Cube { start, side: c.side * factor }
            })
            .collect();
        Ok(Self { grid, cubes })
    }

    /// Union of two families on the same grid.
    pub fn union(&self, other: &CubeFamily) -> Result<Self> {
        if self.grid != other.grid {
            return Err(QnormError::GridMismatch);
        }
        let mut cubes = self.cubes.clone();
        cubes.extend(other.cubes.iter().filter(|c| !self.cubes.contains(c)));
        Ok(Self { grid: self.grid, cubes })
    }
}

/// Open ball `|y - x| < r` around a grid point (minimal-image distance).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ball {
    pub center: usize,
    pub radius: f64,
}

/// Balls with every listed center and every listed radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallFamily {
    pub grid: TorusGrid,
    pub centers: Vec<usize>,
    pub radii: Vec<f64>,
}

impl BallFamily {
    /// Centers at every sample of the central half; radii `L/4, L/8, ...` down to `4h`.
    pub fn standard(grid: TorusGrid) -> Result<Self> {
        let l = grid.period;
        let mut radii = Vec::new();
        let mut r = l / 4.0;
        while r >= 4.0 * grid.spacing() * (1.0 - 1e-12) {
            radii.push(r);
            r /= 2.0;
        }
        Self::central(grid, radii)
    }

    /// Centers at every sample of the central half with the given radii.
    pub fn central(grid: TorusGrid, radii: Vec<f64>) -> Result<Self> {
        let n = grid.n();
        let (lo, hi) = (n / 4, 3 * n / 4);
        let centers = (0..grid.len())
            .filter(|&idx| {
                let c = grid.coords(idx);
                (0..grid.dim).all(|a| c[a] >= lo && c[a] < hi)
            })
            .collect();
        Self::new(grid, centers, radii)
    }

    pub fn new(grid: TorusGrid, centers: Vec<usize>, mut radii: Vec<f64>) -> Result<Self> {
        if centers.is_empty() || radii.is_empty() {
            return Err(QnormError::EmptyFamily);
        }
        if radii.iter().any(|r| !(*r > 0.0) || *r > grid.period / 2.0) {
            return Err(QnormError::InvalidInput("ball radii must lie in (0, L/2]".into()));
        }
        if centers.iter().any(|&c| c >= grid.len()) {
            return Err(QnormError::InvalidInput("ball center outside the grid".into()));
        }
        radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        radii.dedup();
        Ok(Self { grid, centers, radii })
    }

    /// Same physical balls on a grid with `factor` times as many points per axis.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let grid = self.grid.refined(factor)?;
        let centers = self
            .centers
            .iter()
            .map(|&idx| {
                let c = self.grid.coords(idx);
                grid.flat(&[c[0] * factor, c[1] * factor, c[2] * factor])
            })
            .collect();
        Self::new(grid, centers, self.radii.clone())
    }

    /// Keep only the radii accepted by `keep`.
    pub fn with_radii<F: Fn(f64) -> bool>(&self, keep: F) -> Result<Self> {
        let radii: Vec<f64> = self.radii.iter().copied().filter(|&r| keep(r)).collect();
        Self::new(self.grid, self.centers.clone(), radii)
    }
}

/// Integer offsets `d` with `|d| h < r`, in row-major order.
pub fn ball_offsets(grid: &TorusGrid, r: f64) -> Vec<[i64; 3]> {
    let h = grid.spacing();
    let m = (r / h).ceil() as i64;
    let dims = grid.dim;
    let mut out = Vec::new();
    let span = 2 * m + 1;
    for idx in 0..span.pow(dims as u32) {
        let mut d = [0i64; 3];
        let mut rest = idx;
        for a in (0..dims).rev() {
            d[a] = rest % span - m;
            rest /= span;
        }
        let r2 = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]) as f64 * h * h;
        if r2 < r * r {
            out.push(d);
        }
    }
    out
}
