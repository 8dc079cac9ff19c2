//! Gauss rules on the line.

use std::f64::consts::PI;

use crate::hermite::hermite_functions;

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp;
        loop {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 0..m {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            dp = m as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 3e-16 {
                break;
            }
        }
        x[i] = -z;
        x[m - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    (x, w)
}

/// Composite Gauss–Legendre rule: `panels` equal panels on `[a, b]`, `m` nodes each.
pub fn composite_legendre(a: f64, b: f64, panels: usize, m: usize) -> (Vec<f64>, Vec<f64>) {
    let (gx, gw) = gauss_legendre(m);
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let mut x = Vec::with_capacity(panels * m);
    let mut w = Vec::with_capacity(panels * m);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in gx.iter().zip(&gw) {
            x.push(lo + 0.5 * h * (xi + 1.0));
            w.push(0.5 * h * wi);
        }
    }
    (x, w)
}

/// Gauss–Hermite rule for the weight `e^{-x²}`, returned as nodes and
/// *absorbed* weights `w_i e^{x_i²}`, so that `∫ g(x) dx ≈ Σ ŵ_i g(x_i)` for
/// `g` = polynomial × `e^{-x²}` of degree ≤ 2m−1.
///
/// Nodes come from Newton iteration on the normalized Hermite function `h_m`;
/// absorbed weights are `1 / (m h_{m-1}(x_i)²)`, which never under/overflows.
pub fn gauss_hermite(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "Gauss–Hermite rule needs at least one node");
    let mf = m as f64;
    let mut roots = vec![0.0; m];
    let half = m.div_ceil(2);
    // roots in decreasing order, initial guesses after the classical asymptotics
    let mut z = 0.0;
    for i in 0..half {
        z = match i {
            0 => (2.0 * mf + 1.0).sqrt() - 1.85575 * (2.0 * mf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * mf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * roots[0],
            3 => 1.91 * z - 0.91 * roots[1],
            _ => 2.0 * z - roots[i - 2],
        };
        for _ in 0..200 {
            let h = hermite_functions(m, z);
            let f = h[m];
            let df = (2.0 * mf).sqrt() * h[m - 1] - z * f;
            let dz = f / df;
            z -= dz;
            if dz.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        roots[i] = z;
    }
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    for i in 0..half {
        let r = roots[i];
        let h = hermite_functions(m - 1, r);
        let wi = 1.0 / (mf * h[m - 1] * h[m - 1]);
        x[m - 1 - i] = r;
        x[i] = -r;
        w[m - 1 - i] = wi;
        w[i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        for m in [1usize, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre(m);
            let s: f64 = w.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "m={m}");
            let deg = 2 * m - 1;
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((q - exact).abs() < 1e-13, "m={m}");
        }
    }

    #[test]
    fn composite_rule_covers_interval() {
        let (x, w) = composite_legendre(0.0, 3.0, 4, 8);
        let v: f64 = x.iter().zip(&w).map(|(x, w)| w * x.exp()).sum();
        assert!((v - (3f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn hermite_rule_moments() {
        // ∫ x^{2k} e^{-x²} dx = Γ(k+½)
        for m in [1usize, 2, 3, 10, 40, 101] {
            let (x, w) = gauss_hermite(m);
            for k in 0..m {
                let exact = libm::tgamma(k as f64 + 0.5);
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * (-x * x).exp() * x.powi(2 * k as i32)).sum();
                assert!(((q - exact) / exact).abs() < 1e-11, "m={m} k={k} q={q} exact={exact}");
            }
        }
    }
}
