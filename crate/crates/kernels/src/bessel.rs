//! Integer-order Bessel functions `J_0..J_M` and spherical Bessel `j_0, j_1, j_2`.

use std::f64::consts::PI;

const ASYMPTOTIC_FROM: f64 = 40.0;

/// Fill `out[m] = J_m(x)` for `m = 0..out.len()`, `x >= 0`.
pub fn bessel_j_all(x: f64, out: &mut [f64]) {
    let mmax = out.len().saturating_sub(1);
    if out.is_empty() {
        return;
    }
    if x == 0.0 {
        out.iter_mut().for_each(|v| *v = 0.0);
        out[0] = 1.0;
        return;
    }
    if x >= ASYMPTOTIC_FROM && (mmax as f64) < x {
        let (j0, j1) = (hankel(0.0, x), hankel(1.0, x));
        out[0] = j0;
        if mmax >= 1 {
            out[1] = j1;
        }
        for k in 1..mmax {
            out[k + 1] = 2.0 * k as f64 / x * out[k] - out[k - 1];
        }
        return;
    }
    miller(x, out);
}

/// `J_m(x)` for a single order.
pub fn bessel_j(m: usize, x: f64) -> f64 {
    let mut buf = vec![0.0; m + 1];
    bessel_j_all(x, &mut buf);
    buf[m]
}

fn miller(x: f64, out: &mut [f64]) {
    let mmax = out.len() - 1;
    let top = (mmax as f64).max(x) + 20.0 + (20.0 * (mmax as f64).max(x)).sqrt();
    let start = 2 * ((top as usize).div_ceil(2));
    let (mut jp1, mut j) = (0.0f64, 1e-300f64);
    let mut norm = 0.0;
    out.iter_mut().for_each(|v| *v = 0.0);
    for k in (1..=start).rev() {
        let jm1 = 2.0 * k as f64 / x * j - jp1;
        jp1 = j;
        j = jm1;
        if (k - 1) % 2 == 0 && k - 1 > 0 {
            norm += 2.0 * j;
        }
        if k - 1 <= mmax {
            out[k - 1] = j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp1 *= 1e-250;
            norm *= 1e-250;
            out.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    norm += j;
    out.iter_mut().for_each(|v| *v /= norm);
}

/// Hankel asymptotic expansion, accurate to round-off for `x >= 40`.
fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let z8 = 8.0 * x;
    let (mut p, mut q) = (1.0, 0.0);
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let kk = (2 * k - 1) as f64;
        term *= (mu - kk * kk) / (k as f64 * z8);
        if term.abs() >= last {
            break;
        }
        last = term.abs();
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - (0.5 * nu + 0.25) * PI;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

fn spherical_series(n: u32, z: f64) -> f64 {
    // z^n / (2n+1)!! * sum_k (-z^2/2)^k / (k! (2n+3)(2n+5)...(2n+2k+1))
    let mut df = 1.0;
    for i in 1..=n {
        df *= (2 * i + 1) as f64;
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..30 {
        term *= -0.5 * z * z / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    z.powi(n as i32) / df * sum
}

/// Returns `[j_0(z), j_1(z)/z, j_2(z)]`.
pub fn spherical_triplet(z: f64) -> [f64; 3] {
    if z < 0.5 {
        let j1_over_z = {
            let mut term = 1.0 / 3.0;
            let mut sum = term;
            for k in 1..30 {
                term *= -0.5 * z * z / (k as f64 * (2 * k + 3) as f64);
                sum += term;
                if term.abs() < 1e-18 {
                    break;
                }
            }
            sum
        };
        return [spherical_series(0, z), j1_over_z, spherical_series(2, z)];
    }
    let (s, c) = z.sin_cos();
    let j0 = s / z;
    let j1 = s / (z * z) - c / z;
    let j2 = (3.0 / (z * z) - 1.0) * s / z - 3.0 * c / (z * z);
    [j0, j1 / z, j2]
}

pub fn spherical_j(n: u32, z: f64) -> f64 {
    let t = spherical_triplet(z);
    match n {
        0 => t[0],
        1 => t[1] * z,
        2 => t[2],
        _ => panic!("spherical_j supports orders 0..=2"),
    }
}
