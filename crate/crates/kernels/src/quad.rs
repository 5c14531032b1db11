//! Adaptive Gauss-Kronrod quadrature for vector-valued integrands and Wynn's epsilon.

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One G7-K15 panel of an `m`-vector integrand. Returns `(kronrod, |kronrod - gauss|)` per component.
pub fn gk15<F: FnMut(f64, &mut [f64])>(f: &mut F, a: f64, b: f64, m: usize) -> (Vec<f64>, Vec<f64>) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k = vec![0.0; m];
    let mut g = vec![0.0; m];
    let mut buf = vec![0.0; m];
    f(c, &mut buf);
    for i in 0..m {
        k[i] = WGK[7] * buf[i];
        g[i] = WG[3] * buf[i];
    }
    for (j, &x) in XGK.iter().enumerate().take(7) {
        for sgn in [-1.0, 1.0] {
            f(c + sgn * h * x, &mut buf);
            for i in 0..m {
                k[i] += WGK[j] * buf[i];
                if j % 2 == 1 {
                    g[i] += WG[j / 2] * buf[i];
                }
            }
        }
    }
    let err = (0..m).map(|i| (h * (k[i] - g[i])).abs()).collect();
    (k.into_iter().map(|v| v * h).collect(), err)
}

/// Globally adaptive bisection: split the panel with the largest error until the summed
/// error of the worst component is below `tol`, or round-off level is reached.
/// Returns `None` if `max_panels` is exhausted first.
pub fn adaptive<F: FnMut(f64, &mut [f64])>(
    f: &mut F,
    a: f64,
    b: f64,
    m: usize,
    tol: f64,
    max_panels: usize,
) -> Option<(Vec<f64>, Vec<f64>)> {
    struct Panel {
        a: f64,
        b: f64,
        v: Vec<f64>,
        e: Vec<f64>,
        worst: f64,
    }
    let mk = |f: &mut F, a: f64, b: f64| {
        let (v, e) = gk15(f, a, b, m);
        let worst = e.iter().cloned().fold(0.0, f64::max);
        Panel { a, b, v, e, worst }
    };
    let mut panels = vec![mk(f, a, b)];
    loop {
        let mut tot_v = vec![0.0; m];
        let mut tot_e = vec![0.0; m];
        for p in &panels {
            for i in 0..m {
                tot_v[i] += p.v[i];
                tot_e[i] += p.e[i];
            }
        }
        let worst = tot_e.iter().cloned().fold(0.0, f64::max);
        let scale = tot_v.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if worst <= tol || worst <= 1e-15 * scale {
            return Some((tot_v, tot_e));
        }
        if panels.len() >= max_panels {
            return None;
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.worst > acc.1 { (i, p.worst) } else { acc });
        let p = panels.swap_remove(idx);
        let c = 0.5 * (p.a + p.b);
        if c <= p.a || c >= p.b {
            return Some((tot_v, tot_e));
        }
        panels.push(mk(f, p.a, c));
        panels.push(mk(f, c, p.b));
    }
}

/// Wynn's epsilon extrapolation of a sequence of partial sums; returns the last
/// even-column estimate.
pub fn wynn_epsilon(s: &[f64]) -> f64 {
    let n = s.len();
    if n < 3 {
        return *s.last().unwrap_or(&0.0);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = s.to_vec();
    let mut best = s[n - 1];
    for col in 1..n {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            let v = if d == 0.0 { f64::INFINITY } else { prev[i + 1] + 1.0 / d };
            next.push(v);
        }
        if next.iter().any(|v| !v.is_finite()) {
            break;
        }
        prev = cur;
        cur = next;
        if col % 2 == 0 {
            best = *cur.last().unwrap();
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_is_exact_for_polynomials_and_smooth_functions() {
        let mut f = |x: f64, o: &mut [f64]| {
            o[0] = x.powi(20);
            o[1] = x.exp();
        };
        let (v, _) = gk15(&mut f, 0.0, 1.0, 2);
        assert!((v[0] - 1.0 / 21.0).abs() < 1e-15);
        assert!((v[1] - (1f64.exp() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_endpoint_cusp() {
        let mut f = |x: f64, o: &mut [f64]| o[0] = x.powf(0.2);
        let (v, _) = adaptive(&mut f, 0.0, 1.0, 1, 1e-13, 500).unwrap();
        assert!((v[0] - 1.0 / 1.2).abs() < 1e-12);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // ln 2 = 1 - 1/2 + 1/3 - ...
        let mut s = Vec::new();
        let mut acc = 0.0;
        for k in 1..=14 {
            acc += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
            s.push(acc);
        }
        let naive = (s[13] - 2f64.ln()).abs();
        let fast = (wynn_epsilon(&s) - 2f64.ln()).abs();
        assert!(naive > 1e-2 && fast < 1e-9, "{naive} {fast}");
    }
}
