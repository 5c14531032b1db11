//! Dyadic Hausdorff capacity of sample sets and the associated Choquet integral.
//!
//! Dyadic cubes of level `j` are aligned blocks of `2^j` samples per axis, with side
//! `l = 2^j h`. A set is a boolean mask over the grid samples.

use crate::{Result, TentError};
use serde::Serialize;
use spectral_core::TorusGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DyadicCube {
    pub level: u32,
    /// First sample index on each axis.
    pub start: [usize; 3],
}

impl DyadicCube {
    pub fn side(&self) -> usize {
        1 << self.level
    }

    pub fn length(&self, grid: &TorusGrid) -> f64 {
        self.side() as f64 * grid.spacing()
    }

    pub fn contains(&self, grid: &TorusGrid, idx: usize) -> bool {
        let c = grid.coords(idx);
        (0..grid.dim).all(|a| c[a] >= self.start[a] && c[a] < self.start[a] + self.side())
    }

    /// Flat indices of every sample in the cube.
    pub fn samples(&self, grid: &TorusGrid) -> Vec<usize> {
        let s = self.side();
        let count = s.pow(grid.dim as u32);
        (0..count)
            .map(|m| {
                let mut c = [0usize; 3];
                let mut rest = m;
                for a in (0..grid.dim).rev() {
                    c[a] = self.start[a] + rest % s;
                    rest /= s;
                }
                grid.flat(&c)
            })
            .collect()
    }

    /// Geometric center of the sample block.
    pub fn center(&self, grid: &TorusGrid) -> [f64; 3] {
        let h = grid.spacing();
        let mut c = [0.0; 3];
        for a in 0..grid.dim {
            c[a] = (self.start[a] as f64 + (self.side() as f64 - 1.0) / 2.0) * h;
        }
        c
    }

    /// Ancestor at `level` (which must not be below this cube's level).
    pub fn ancestor(&self, level: u32) -> DyadicCube {
        let mut start = self.start;
        for s in start.iter_mut() {
            *s = (*s >> level) << level;
        }
        DyadicCube { level, start }
    }

    /// Whether `self` lies inside `other`.
    pub fn inside(&self, other: &DyadicCube) -> bool {
        self.level <= other.level && self.ancestor(other.level) == *other
    }
}

/// Dyadic cover of a sample set with its value `sum l(I)^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicCover {
    pub cubes: Vec<DyadicCube>,
    pub value: f64,
}

/// Upper bound (an optimal dyadic cover) and lower bound (best inscribed dyadic cube).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityBounds {
    pub upper: DyadicCover,
    pub lower: f64,
}

fn check_dim(grid: &TorusGrid, d: f64) -> Result<()> {
    if !(d > 0.0 && d <= grid.dim as f64) {
        return Err(TentError::InvalidInput(format!("capacity dimension {d} outside (0, {}]", grid.dim)));
    }
    Ok(())
}

/// Per-level node tables of the dyadic tree: cost, hit flag, full flag.
struct Tree {
    levels: Vec<Level>,
}

struct Level {
    per_axis: usize,
    cost: Vec<f64>,
    take_self: Vec<bool>,
    hit: Vec<bool>,
    full: Vec<bool>,
}

fn node_index(per_axis: usize, dim: usize, c: &[usize; 3]) -> usize {
    let mut idx = 0;
    for a in 0..dim {
        idx = idx * per_axis + c[a];
    }
    idx
}

fn node_coords(per_axis: usize, dim: usize, mut idx: usize) -> [usize; 3] {
    let mut c = [0usize; 3];
    for a in (0..dim).rev() {
        c[a] = idx % per_axis;
        idx /= per_axis;
    }
    c
}

fn build_tree(grid: &TorusGrid, set: &[bool], d: f64) -> Tree {
    let n = grid.n();
    let dim = grid.dim;
    let h = grid.spacing();
    let top = n.trailing_zeros();
    let leaf_cost = h.powf(d);
    let mut levels = vec![Level {
        per_axis: n,
        cost: set.iter().map(|&s| if s { leaf_cost } else { 0.0 }).collect(),
        take_self: set.to_vec(),
        hit: set.to_vec(),
        full: set.to_vec(),
    }];
    for j in 1..=top {
        let prev = &levels[j as usize - 1];
        let per_axis = n >> j;
        let count = per_axis.pow(dim as u32);
        let own = ((1usize << j) as f64 * h).powf(d);
        let mut lvl = Level {
            per_axis,
            cost: vec![0.0; count],
            take_self: vec![false; count],
            hit: vec![false; count],
            full: vec![false; count],
        };
        for node in 0..count {
            let c = node_coords(per_axis, dim, node);
            let mut sum = 0.0;
            let mut hit = false;
            let mut full = true;
            for child in 0..(1usize << dim) {
                let mut cc = [0usize; 3];
                for a in 0..dim {
                    cc[a] = 2 * c[a] + ((child >> a) & 1);
                }
                let ci = node_index(prev.per_axis, dim, &cc);
                sum += prev.cost[ci];
                hit |= prev.hit[ci];
                full &= prev.full[ci];
            }
            lvl.hit[node] = hit;
            lvl.full[node] = full;
            if hit {
                if own <= sum {
                    lvl.cost[node] = own;
                    lvl.take_self[node] = true;
                } else {
                    lvl.cost[node] = sum;
                }
            }
        }
        levels.push(lvl);
    }
    Tree { levels }
}

/// Optimal dyadic cover of `set` and the best inscribed-cube lower bound.
pub fn hausdorff_capacity(grid: &TorusGrid, set: &[bool], d: f64) -> Result<CapacityBounds> {
    check_dim(grid, d)?;
    if set.len() != grid.len() {
        return Err(TentError::InvalidInput("set mask does not match the grid".into()));
    }
    if !set.iter().any(|&s| s) {
        return Err(TentError::EmptySet);
    }
    let tree = build_tree(grid, set, d);
    let dim = grid.dim;
    let top = tree.levels.len() - 1;
    let mut cubes = Vec::new();
    let mut stack = vec![(top, 0usize)];
    while let Some((j, node)) = stack.pop() {
        let lvl = &tree.levels[j];
        if !lvl.hit[node] {
            continue;
        }
        let c = node_coords(lvl.per_axis, dim, node);
        if lvl.take_self[node] {
            let mut start = [0usize; 3];
            for a in 0..dim {
                start[a] = c[a] << j;
            }
            cubes.push(DyadicCube { level: j as u32, start });
            continue;
        }
        for child in (0..(1usize << dim)).rev() {
            let mut cc = [0usize; 3];
            for a in 0..dim {
                cc[a] = 2 * c[a] + ((child >> a) & 1);
            }
            stack.push((j - 1, node_index(tree.levels[j - 1].per_axis, dim, &cc)));
        }
    }
    let h = grid.spacing();
    let mut lower: f64 = 0.0;
    for (j, lvl) in tree.levels.iter().enumerate() {
        if lvl.full.iter().any(|&f| f) {
            lower = lower.max(((1usize << j) as f64 * h).powf(d));
        }
    }
    Ok(CapacityBounds { upper: DyadicCover { value: tree.levels[top].cost[0], cubes }, lower })
}

/// Value of the optimal dyadic cover; zero for the empty set.
pub fn capacity_value(grid: &TorusGrid, set: &[bool], d: f64) -> Result<f64> {
    check_dim(grid, d)?;
    if !set.iter().any(|&s| s) {
        return Ok(0.0);
    }
    let tree = build_tree(grid, set, d);
    Ok(tree.levels.last().expect("at least one level").cost[0])
}

/// `int_0^inf cap({f > lambda}) d lambda`, exact for sampled `f`: the superlevel set is
/// constant between consecutive distinct sample values.
pub fn choquet_integral(grid: &TorusGrid, f: &[f64], d: f64) -> Result<f64> {
    check_dim(grid, d)?;
    if f.len() != grid.len() {
        return Err(TentError::InvalidInput("field does not match the grid".into()));
    }
    if f.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(TentError::InvalidInput("choquet integrand must be finite and nonnegative".into()));
    }
    let mut levels: Vec<f64> = f.iter().copied().filter(|&v| v > 0.0).collect();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    levels.dedup();
    let mut total = 0.0;
    let mut prev = 0.0;
    for &v in &levels {
        let set: Vec<bool> = f.iter().map(|&x| x >= v).collect();
        total += (v - prev) * capacity_value(grid, &set, d)?;
        prev = v;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(grid: &TorusGrid, cubes: &[DyadicCube]) -> Vec<bool> {
        let mut m = vec![false; grid.len()];
        for c in cubes {
            for i in c.samples(grid) {
                m[i] = true;
            }
        }
        m
    }

    #[test]
    fn single_dyadic_cube_is_exact() {
        let g = TorusGrid::new(2, 32, 1.0).unwrap();
        for level in 0..=5 {
            let q = DyadicCube { level, start: [0, 1 << level, 0].map(|x| x % 32) };
            let b = hausdorff_capacity(&g, &mask(&g, &[q]), 1.5).unwrap();
            let want = q.length(&g).powf(1.5);
            assert!((b.upper.value - want).abs() < 1e-15 && (b.lower - want).abs() < 1e-15);
            assert_eq!(b.upper.cubes, vec![q]);
        }
    }

    #[test]
    fn two_cubes_and_empty_set() {
        let g = TorusGrid::new(2, 32, 1.0).unwrap();
        let a = DyadicCube { level: 2, start: [0, 0, 0] };
        let b = DyadicCube { level: 2, start: [16, 8, 0] };
        let v = hausdorff_capacity(&g, &mask(&g, &[a, b]), 2.0).unwrap().upper.value;
        assert!(v <= 2.0 * a.length(&g).powi(2) + 1e-15);
        assert!(matches!(hausdorff_capacity(&g, &vec![false; g.len()], 1.0), Err(TentError::EmptySet)));
        assert!(hausdorff_capacity(&g, &mask(&g, &[a]), 2.5).is_err());
    }

    #[test]
    fn choquet_of_scaled_indicator() {
        let g = TorusGrid::new(2, 16, 1.0).unwrap();
        let q = DyadicCube { level: 2, start: [4, 8, 0] };
        let f: Vec<f64> = mask(&g, &[q]).iter().map(|&m| if m { 3.0 } else { 0.0 }).collect();
        let v = choquet_integral(&g, &f, 1.0).unwrap();
        assert!((v - 3.0 * q.length(&g)).abs() < 1e-14);
        let neg: Vec<f64> = f.iter().map(|x| -x).collect();
        assert!(choquet_integral(&g, &neg, 1.0).is_err());
    }

    #[test]
    fn cube_nesting() {
        let c = DyadicCube { level: 1, start: [6, 2, 0] };
        let p = c.ancestor(3);
        assert_eq!(p, DyadicCube { level: 3, start: [0, 0, 0] });
        assert!(c.inside(&p) && !p.inside(&c));
    }
}
