//! Sample-level geometry of cones and tents, and the nontangential maximal function.

use qnorms::family::ball_offsets;
use spectral_core::{HalfSpaceSample, TorusGrid};

/// Minimal-image distance between two physical points of the torus.
pub fn torus_distance(grid: &TorusGrid, a: [f64; 3], b: [f64; 3]) -> f64 {
    let l = grid.period;
    let mut s = 0.0;
    for ax in 0..grid.dim {
        let mut d = (a[ax] - b[ax]).rem_euclid(l);
        if d > l / 2.0 {
            d = l - d;
        }
        s += d * d;
    }
    s.sqrt()
}

/// Whether `(t, x)` lies in the tent `T(B(center, r)) = {|x - center| < r - t}`.
pub fn in_tent(grid: &TorusGrid, center: [f64; 3], r: f64, t: f64, x: usize) -> bool {
    t < r && torus_distance(grid, grid.position(x), center) < r - t
}

/// Volume of the Euclidean ball of radius `r` in dimension `n <= 3`.
pub fn ball_volume(n: usize, r: f64) -> f64 {
    let unit = match n {
        1 => 2.0,
        2 => std::f64::consts::PI,
        _ => 4.0 * std::f64::consts::PI / 3.0,
    };
    unit * r.powi(n as i32)
}

/// `N(F)(x) = max { |F(t_i, y)| : |y - x| < t_i }` over the samples.
pub fn nontangential_max(f: &HalfSpaceSample) -> Vec<f64> {
    let g = f.grid;
    let len = g.len();
    let half_diag = g.period * (g.dim as f64).sqrt() / 2.0;
    let mut out = vec![0.0f64; len];
    for (i, &t) in f.times.nodes.iter().enumerate() {
        let mag: Vec<f64> = (0..len).map(|j| f.abs_sq(i, j).sqrt()).collect();
        if t > half_diag {
            let m = mag.iter().fold(0.0f64, |a, &b| a.max(b));
            out.iter_mut().for_each(|o| *o = o.max(m));
            continue;
        }
        let offs = ball_offsets(&g, t);
        for (x, o) in out.iter_mut().enumerate() {
            let c = g.coords(x);
            let mut m = *o;
            for d in &offs {
                let y = g.flat_wrapped(&[c[0] as i64 + d[0], c[1] as i64 + d[1], c[2] as i64 + d[2]]);
                m = m.max(mag[y]);
            }
            *o = m;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use spectral_core::TimeGrid;

    #[test]
    fn point_mass_lights_up_its_cone() {
        let g = TorusGrid::new(2, 16, 1.0).unwrap();
        let times = TimeGrid::geometric(0.5, 2.0, 5).unwrap();
        let mut f = HalfSpaceSample::zeros(times, g, 1);
        let (i0, y0) = (3, g.flat(&[8, 8, 0]));
        f.set(i0, 0, y0, -2.0);
        let t0 = f.times.nodes[i0];
        let n = nontangential_max(&f);
        for x in 0..g.len() {
            let inside = torus_distance(&g, g.position(x), g.position(y0)) < t0;
            assert_eq!(n[x], if inside { 2.0 } else { 0.0 }, "x = {x}");
        }
    }

    #[test]
    fn distance_wraps() {
        let g = TorusGrid::new(1, 8, 1.0).unwrap();
        assert!((torus_distance(&g, [0.05, 0.0, 0.0], [0.95, 0.0, 0.0]) - 0.1).abs() < 1e-15);
        assert!(in_tent(&g, [0.5, 0.0, 0.0], 0.3, 0.1, 4));
        assert!(!in_tent(&g, [0.5, 0.0, 0.0], 0.3, 0.3, 4));
    }
}
