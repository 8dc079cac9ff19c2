//! Heisenberg group geometry, the Schrödinger representation and the heat
//! kernels `q_s(z, λ)`, `p_s(z, t)` with their left-invariant derivatives.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermite::{analyze, synthesize, QuadratureGrid, SpectralField};
use crate::quadrature::{composite_legendre, gauss_hermite};

/// A point `(z, t) ∈ ℂⁿ × ℝ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HeisenbergPoint {
    pub z: Vec<Complex64>,
    pub t: f64,
}

impl HeisenbergPoint {
    pub fn new(z: Vec<Complex64>, t: f64) -> Self {
        HeisenbergPoint { z, t }
    }

    pub fn origin(n: usize) -> Self {
        HeisenbergPoint { z: vec![Complex64::default(); n], t: 0.0 }
    }

    /// Build from real coordinates `x`, `y`.
    pub fn from_xy(x: &[f64], y: &[f64], t: f64) -> Self {
        HeisenbergPoint { z: x.iter().zip(y).map(|(&a, &b)| Complex64::new(a, b)).collect(), t }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn x(&self) -> Vec<f64> {
        self.z.iter().map(|c| c.re).collect()
    }

    pub fn y(&self) -> Vec<f64> {
        self.z.iter().map(|c| c.im).collect()
    }

    /// `|z|²`
    pub fn z_norm_sqr(&self) -> f64 {
        self.z.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn inverse(&self) -> Self {
        HeisenbergPoint { z: self.z.iter().map(|c| -c).collect(), t: -self.t }
    }
}

/// `(z, t)(w, s) = (z + w, t + s + ½ Im(z·w̄))`.
pub fn group_mul(a: &HeisenbergPoint, b: &HeisenbergPoint) -> Result<HeisenbergPoint> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    let twist: f64 = a.z.iter().zip(&b.z).map(|(z, w)| (z * w.conj()).im).sum();
    Ok(HeisenbergPoint { z: a.z.iter().zip(&b.z).map(|(z, w)| z + w).collect(), t: a.t + b.t + 0.5 * twist })
}

/// `(|z|⁴ + t²)^{1/4}`
pub fn koranyi_norm(p: &HeisenbergPoint) -> f64 {
    let z2 = p.z_norm_sqr();
    (z2 * z2 + p.t * p.t).sqrt().sqrt()
}

/// `δ_r(z, t) = (rz, r²t)`
pub fn dilate(p: &HeisenbergPoint, r: f64) -> HeisenbergPoint {
    HeisenbergPoint { z: p.z.iter().map(|c| c * r).collect(), t: r * r * p.t }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub n: usize,
    pub s: f64,
}

impl KernelParams {
    pub fn new(n: usize, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!("heat time must be positive, got {s}")));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(KernelParams { n, s })
    }

    pub fn unit(n: usize) -> Self {
        KernelParams { n, s: 1.0 }
    }
}

/// `ln(λ / sinh(λs))`, even in λ, with the series near `λ = 0`.
fn log_sinh_ratio(lambda: f64, s: f64) -> f64 {
    let u = (lambda * s).abs();
    if u < 1e-4 {
        -s.ln() - u * u / 6.0
    } else {
        // sinh u = e^u (1 − e^{−2u}) / 2
        lambda.abs().ln() - u - (-(-2.0 * u).exp_m1() / 2.0).ln()
    }
}

/// `λ coth(λs)`, even in λ, tending to `1/s`.
fn lambda_coth(lambda: f64, s: f64) -> f64 {
    let u = (lambda * s).abs();
    if u < 1e-4 {
        (1.0 + u * u / 3.0) / s
    } else {
        lambda.abs() / u.tanh()
    }
}

/// `q_s(z, λ) = (4π)^{-n} (λ / sinh λs)^n e^{-¼ λ coth(sλ) |z|²}`.
pub fn q_kernel(z: &[Complex64], lambda: f64, params: KernelParams) -> f64 {
    let z2: f64 = z.iter().map(|c| c.norm_sqr()).sum();
    let n = params.n as f64;
    (n * (log_sinh_ratio(lambda, params.s) - (4.0 * PI).ln()) - 0.25 * lambda_coth(lambda, params.s) * z2).exp()
}

/// `p_s`, `(1/r)∂_r p_s` and `∂_t p_s` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct KernelFields {
    pub p: f64,
    /// `(1/x_j) ∂_{x_j} p = (1/y_j) ∂_{y_j} p`
    pub radial: f64,
    /// `∂_t p`
    pub dt: f64,
}

impl KernelFields {
    /// `(X̃_j p, Ỹ_j p)` with `X̃_j = ∂_{x_j} − (y_j/2)∂_t`, `Ỹ_j = ∂_{y_j} + (x_j/2)∂_t`.
    pub fn xy_derivatives(&self, x: f64, y: f64) -> (f64, f64) {
        (x * self.radial - 0.5 * y * self.dt, y * self.radial + 0.5 * x * self.dt)
    }
}

struct LambdaTable {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    log_amp: Vec<f64>,
    quarter_coth: Vec<f64>,
}

const MAX_LEVEL: usize = 14;
const NODES_PER_PANEL: usize = 16;

/// Composite Gauss–Legendre rules in λ on `[0, Λ]`, built lazily per panel
/// level and shared between threads. One instance serves every `(z, t)`.
pub struct KernelQuadrature {
    params: KernelParams,
    lambda_max: f64,
    base_panels: usize,
    levels: Vec<OnceLock<LambdaTable>>,
}

impl KernelQuadrature {
    pub fn new(params: KernelParams) -> Self {
        let n = params.n as f64;
        // smallest Λs with (Λs / sinh Λs)^n below 1e-17
        let mut u = 0.25;
        while n * log_sinh_ratio(u, 1.0) > -39.2 {
            u += 0.25;
        }
        let lambda_max = u / params.s;
        let base_panels = ((lambda_max * params.s) / 2.0).ceil().max(1.0) as usize;
        KernelQuadrature { params, lambda_max, base_panels, levels: (0..=MAX_LEVEL).map(|_| OnceLock::new()).collect() }
    }

    pub fn params(&self) -> KernelParams {
        self.params
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda_max
    }

    /// Coarsest level whose panels span at most 1.5 periods of `cos(λt)`.
    fn level_for(&self, t: f64) -> Option<usize> {
        let width = self.lambda_max / self.base_panels as f64;
        let target = if t == 0.0 { f64::INFINITY } else { 3.0 * PI / t.abs() };
        let mut level = 0;
        let mut w = width;
        while w > target {
            level += 1;
            w *= 0.5;
            if level > MAX_LEVEL {
                return None;
            }
        }
        Some(level)
    }

    fn table(&self, level: usize) -> &LambdaTable {
        self.levels[level].get_or_init(|| {
            let panels = self.base_panels << level;
            let (nodes, weights) = composite_legendre(0.0, self.lambda_max, panels, NODES_PER_PANEL);
            let n = self.params.n as f64;
            let s = self.params.s;
            let log_amp = nodes.iter().map(|&l| n * (log_sinh_ratio(l, s) - (4.0 * PI).ln())).collect();
            let quarter_coth = nodes.iter().map(|&l| 0.25 * lambda_coth(l, s)).collect();
            LambdaTable { nodes, weights, log_amp, quarter_coth }
        })
    }

    fn eval_level(&self, level: usize, z2: f64, t: f64) -> KernelFields {
        let tab = self.table(level);
        let (mut p, mut a, mut b) = (0.0, 0.0, 0.0);
        for i in 0..tab.nodes.len() {
            let l = tab.nodes[i];
            let e = tab.log_amp[i] - tab.quarter_coth[i] * z2;
            if e < -745.0 {
                continue;
            }
            let q = tab.weights[i] * e.exp();
            let (sn, cs) = (l * t).sin_cos();
            p += q * cs;
            a -= 2.0 * tab.quarter_coth[i] * q * cs;
            b -= l * q * sn;
        }
        KernelFields { p: p / PI, radial: a / PI, dt: b / PI }
    }

    /// Single-rule evaluation, for hot loops; `None` when `|t|` needs more
    /// panels than the finest level provides.
    pub fn fields(&self, z2: f64, t: f64) -> Option<KernelFields> {
        self.level_for(t).map(|l| self.eval_level(l, z2, t))
    }

    /// Evaluation with an error estimate from the next finer level.
    pub fn fields_checked(&self, z2: f64, t: f64) -> Result<KernelFields> {
        let level =
            self.level_for(t).filter(|&l| l < MAX_LEVEL).ok_or(Error::Quadrature { estimate: f64::INFINITY })?;
        let coarse = self.eval_level(level, z2, t);
        let fine = self.eval_level(level + 1, z2, t);
        let scale = self.params.s.powf(-(self.params.n as f64) - 1.0);
        let err = [(coarse.p - fine.p).abs(), (coarse.radial - fine.radial).abs(), (coarse.dt - fine.dt).abs()]
            .into_iter()
            .fold(0.0, f64::max);
        let mag = fine.p.abs().max(fine.radial.abs()).max(fine.dt.abs());
        if err > 1e-13 * scale + 1e-9 * mag {
            return Err(Error::Quadrature { estimate: err });
        }
        Ok(fine)
    }
}

/// `p_s(z, t) = (1/2π) ∫ q_s(z, λ) e^{-iλt} dλ`.
pub fn p_kernel(p: &HeisenbergPoint, params: KernelParams) -> Result<f64> {
    if p.dim() != params.n {
        return Err(Error::DimensionMismatch { expected: params.n, got: p.dim() });
    }
    KernelQuadrature::new(params).fields_checked(p.z_norm_sqr(), p.t).map(|f| f.p)
}

/// `p_1` together with its radial and time derivatives.
pub fn kernel_fields(p: &HeisenbergPoint) -> Result<KernelFields> {
    KernelQuadrature::new(KernelParams::unit(p.dim())).fields_checked(p.z_norm_sqr(), p.t)
}

/// `(Z̃_j p₁, Z̃*_j p₁)` with `Z̃_j = iX̃_j + Ỹ_j` and `Z̃*_j = iX̃_j − Ỹ_j`.
pub fn zbar_grad_p1(p: &HeisenbergPoint, j: usize) -> Result<(Complex64, Complex64)> {
    if j >= p.dim() {
        return Err(Error::InvalidAxis { axis: j, dim: p.dim() });
    }
    let f = kernel_fields(p)?;
    Ok(z_pair(&f, p.z[j].re, p.z[j].im))
}

/// `(Z̃_j p₁, Z̃*_j p₁)` from fields already evaluated at `p`.
pub fn z_grad_pair(f: &KernelFields, p: &HeisenbergPoint, j: usize) -> (Complex64, Complex64) {
    z_pair(f, p.z[j].re, p.z[j].im)
}

pub(crate) fn z_pair(f: &KernelFields, x: f64, y: f64) -> (Complex64, Complex64) {
    let (xd, yd) = f.xy_derivatives(x, y);
    (Complex64::new(yd, xd), Complex64::new(-yd, xd))
}

/// `π_λ(x+iy, t)φ(ξ) = e^{iλt} e^{iλ(x·ξ + ½x·y)} φ(ξ + y)`.
pub fn schrodinger_apply<F>(p: &HeisenbergPoint, lambda: f64, phi: F, xi: &[f64]) -> Complex64
where
    F: Fn(&[f64]) -> Complex64,
{
    let mut phase = p.t;
    let mut shifted = Vec::with_capacity(xi.len());
    for (c, &e) in p.z.iter().zip(xi) {
        phase += c.re * e + 0.5 * c.re * c.im;
        shifted.push(e + c.im);
    }
    Complex64::from_polar(1.0, lambda * phase) * phi(&shifted)
}

/// `e^{-r²H(λ)} f = ∫_{ℂⁿ} π_λ(rz) f · q_1(z, λr²) dz` evaluated with a
/// 64-node Gauss–Hermite rule per real coordinate.
pub fn semigroup_via_kernel(field: &SpectralField, r: f64) -> Result<SpectralField> {
    semigroup_via_kernel_with(field, r, 64)
}

/// As [`semigroup_via_kernel`] with `m` nodes per coordinate; cost grows like `m^{2n}`.
pub fn semigroup_via_kernel_with(field: &SpectralField, r: f64, m: usize) -> Result<SpectralField> {
    if !(r > 0.0) {
        return Err(Error::NegativeTime(r));
    }
    let spec = field.spec;
    let (n, lambda) = (spec.n, spec.lambda);
    let mu = lambda * r * r;
    let a = 0.25 * lambda_coth(mu, 1.0);
    let (gx, gw) = gauss_hermite(m);
    let sa = a.sqrt();
    // ∫ g(z) e^{-a|z|²} dz ≈ Σ w_i e^{-x_i²}/√a g(x_i/√a) per coordinate
    let zn: Vec<f64> = gx.iter().map(|x| x / sa).collect();
    let zw: Vec<f64> = gx.iter().zip(&gw).map(|(x, w)| w * (-x * x).exp() / sa).collect();
    let amp = (n as f64 * (log_sinh_ratio(mu, 1.0) - (4.0 * PI).ln())).exp();

    let out_grid = QuadratureGrid::for_basis(&spec)?;
    let xi_pts = out_grid.points();
    let z_count = m.pow(n as u32);
    let coord = |mut idx: usize| -> Vec<usize> {
        let mut c = vec![0; n];
        for d in (0..n).rev() {
            c[d] = idx % m;
            idx /= m;
        }
        c
    };
    let y_idx: Vec<Vec<usize>> = (0..z_count).map(coord).collect();

    let mut samples = Vec::with_capacity(xi_pts.len());
    for xi in &xi_pts {
        // φ(ξ + r y) for every y node
        let shifted: Vec<Vec<f64>> =
            y_idx.iter().map(|c| xi.iter().zip(c).map(|(e, &i)| e + r * zn[i]).collect()).collect();
        let phi = synthesize(field, &shifted);
        let mut acc = Complex64::default();
        for (yi, yc) in y_idx.iter().enumerate() {
            if phi[yi].norm_sqr() == 0.0 {
                continue;
            }
            let wy: f64 = yc.iter().map(|&i| zw[i]).product();
            let mut inner = Complex64::default();
            for xc in &y_idx {
                let mut phase = 0.0;
                let mut wx = 1.0;
                for d in 0..n {
                    let x = zn[xc[d]];
                    phase += r * x * xi[d] + 0.5 * r * r * x * zn[yc[d]];
                    wx *= zw[xc[d]];
                }
                inner += Complex64::from_polar(wx, lambda * phase);
            }
            acc += inner * wy * phi[yi];
        }
        samples.push(acc * amp);
    }
    analyze(&samples, &out_grid, &spec)
}
