//! Self-checks against closed forms and independent quadrature.
//!
//! Each check reports a measured discrepancy and the tolerance it is held
//! to. Checks are grouped by subsystem into suites; the groups are also
//! public so callers can time and label them individually.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{Axis, Boundary, GridFunction};
use crate::grushin::Grushin;
use crate::heisenberg::{
    group_mul, kernel_fields, p_kernel, q_kernel, schrodinger_apply, semigroup_via_kernel, zbar_grad_p1,
    HeisenbergPoint, KernelParams, KernelQuadrature,
};
use crate::hermite::{
    analyze, apply_ladder, eval_phi, scaled_hermite_functions, synthesize, synthesize_tensor, BasisSpec, Ladder,
    MultiIndex, QuadratureGrid, SpectralField,
};
use crate::moments::kernel_moments;
use crate::quadrature::composite_legendre;
use crate::riesz::{
    apply_riesz, apply_truncated_riesz, truncated_factor, truncated_factor_by_quadrature, truncation_error,
    vector_riesz, Eigenvalue, TruncationWindow,
};
use crate::rng::{mix, stream};
use crate::sweep::{
    apply_op, dimension_sweep_with, random_field, sweep_lp_norm, Family, GridSpec, SweepConfig, SweepOp,
};
use crate::transfer::{
    curve_lp_ratios, curve_transform_at, hilbert_curve_trunc, reduction_conjugate, t_epsilon_at, transferred, u_action,
    LogRule, Reduction, DEFAULT_R_NODES,
};

pub const VERSION: &str = concat!("grushin ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = "<")]
    Below,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    /// Passes when `measured ≤ tolerance`; NaN fails.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check { name: name.into(), measured, tolerance, comparison: Comparison::AtMost, pass: measured <= tolerance }
    }

    /// Passes when `measured < tolerance`.
    pub fn below(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Check { name: name.into(), measured, tolerance, comparison: Comparison::Below, pass: measured < tolerance }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.comparison {
            Comparison::AtMost => "<=",
            Comparison::Below => "<",
        };
        write!(
            f,
            "{} {}: {:.6e} {op} {:.3e}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub suite: String,
    pub seed: u64,
    pub version: String,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Hermite,
    Riesz,
    Kernel,
    Transfer,
    Representation,
    Dimension,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 7] =
        ["hermite", "riesz", "kernel", "transfer", "representation", "dimension", "all"];
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "hermite" => Suite::Hermite,
            "riesz" => Suite::Riesz,
            "kernel" => Suite::Kernel,
            "transfer" => Suite::Transfer,
            "representation" => Suite::Representation,
            "dimension" => Suite::Dimension,
            "all" => Suite::All,
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown suite '{s}' (expected one of {})",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = match self {
            Suite::Hermite => 0,
            Suite::Riesz => 1,
            Suite::Kernel => 2,
            Suite::Transfer => 3,
            Suite::Representation => 4,
            Suite::Dimension => 5,
            Suite::All => 6,
        };
        f.write_str(Suite::NAMES[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Monte-Carlo samples for the representation formula.
    pub samples: usize,
    /// Monte-Carlo samples per dimension for the kernel moments.
    pub moment_samples: usize,
    pub epsilon: f64,
    /// Curve directions in the uniformity check.
    pub directions: usize,
    /// Random fields per dimension in the dimension probe.
    pub trials: usize,
    pub exec: Execution,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 0,
            samples: 200_000,
            moment_samples: 100_000,
            epsilon: 0.25,
            directions: 20,
            trials: 20,
            exec: Execution::default(),
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        TruncationWindow::new(self.epsilon)?;
        for (name, v) in [
            ("samples", self.samples),
            ("moment_samples", self.moment_samples),
            ("directions", self.directions),
            ("trials", self.trials),
        ] {
            if v == 0 {
                return Err(Error::InvalidParameter(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> Result<Report> {
    config.validate()?;
    let c = config;
    let checks = match suite {
        Suite::Hermite => hermite_checks(c.seed)?,
        Suite::Riesz => {
            let mut v = truncation_factor_checks()?;
            v.extend(truncation_convergence_checks(c.seed)?);
            v.extend(vector_identity_checks(c.seed, c.exec)?);
            v
        }
        Suite::Kernel => {
            let mut v = heat_kernel_checks(c.seed, c.exec)?;
            v.extend(semigroup_kernel_checks()?);
            v.extend(lemma_checks(c.seed, 50)?);
            v.extend(moment_flatness_checks(c.moment_samples, c.seed, c.exec)?);
            v
        }
        Suite::Transfer => {
            let mut v = parabola_checks()?;
            v.extend(transference_checks(c.seed, 20)?);
            v.extend(uniformity_checks(c.seed, c.directions, c.exec)?);
            v
        }
        Suite::Representation => {
            let mut v = representation_checks(c.epsilon, c.samples, c.seed, false, c.exec)?;
            v.extend(representation_checks(c.epsilon, c.samples, c.seed, true, c.exec)?);
            v
        }
        Suite::Dimension => dimension_probe_checks(c.trials, c.seed, c.exec)?,
        Suite::All => {
            let mut v = Vec::new();
            for s in
                [Suite::Hermite, Suite::Riesz, Suite::Kernel, Suite::Transfer, Suite::Representation, Suite::Dimension]
            {
                v.extend(run_suite(s, c)?.checks.into_iter().map(|mut k| {
                    k.name = format!("{s}.{}", k.name);
                    k
                }));
            }
            v
        }
    };
    let passed = checks.iter().all(|k| k.pass);
    Ok(Report { suite: suite.to_string(), seed: c.seed, version: VERSION.into(), checks, passed })
}

fn delta(a: bool) -> f64 {
    if a {
        1.0
    } else {
        0.0
    }
}

/// `Φ_k^λ` and its derivative from the physicists' polynomials
/// `H_{k+1} = 2xH_k − 2kH_{k−1}`, independent of the normalized recurrence.
fn explicit_phi(k: usize, la: f64, xi: f64) -> (f64, f64) {
    let x = la.sqrt() * xi;
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    let mut hk_minus = 0.0;
    let hk = if k == 0 {
        1.0
    } else {
        for m in 1..k {
            let h2 = 2.0 * x * h1 - 2.0 * m as f64 * h0;
            h0 = h1;
            h1 = h2;
        }
        hk_minus = h0;
        h1
    };
    let log_norm = 0.5 * (k as f64 * 2f64.ln() + libm::lgamma(k as f64 + 1.0) + 0.5 * PI.ln());
    let c = la.powf(0.25) * (-0.5 * x * x - log_norm).exp();
    let d = 2.0 * k as f64 * hk_minus - x * hk;
    (c * hk, c * d * la.sqrt())
}

fn explicit_phi_nd(alpha: &MultiIndex, la: f64, xi: &[f64]) -> (f64, Vec<f64>) {
    let parts: Vec<(f64, f64)> = alpha.entries().zip(xi).map(|(k, &x)| explicit_phi(k, la, x)).collect();
    let value: f64 = parts.iter().map(|p| p.0).product();
    let grad = (0..parts.len())
        .map(|j| parts.iter().enumerate().map(|(i, p)| if i == j { p.1 } else { p.0 }).product())
        .collect();
    (value, grad)
}

fn unit_field(spec: BasisSpec, alpha: &MultiIndex) -> Result<SpectralField> {
    SpectralField::from_coeffs(spec, [(alpha.clone(), Complex64::new(1.0, 0.0))])
}

fn random_spectral(rng: &mut impl Rng, n: usize, lambda: f64, degree: usize) -> Result<SpectralField> {
    let spec = BasisSpec::new(n, lambda, degree)?;
    let f = SpectralField::from_coeffs(
        spec,
        MultiIndex::enumerate(n, degree)
            .into_iter()
            .map(|a| (a, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))),
    )?;
    let s = f.norm();
    Ok(f.scale(Complex64::new(1.0 / s, 0.0)))
}

/// Hermite basis: explicit-polynomial oracle, Gram matrix, analysis
/// round trip, ladder relations and the `H(λ)` decomposition, for
/// `n ≤ 3`, `|α| ≤ 8`, `λ ∈ {0.5, 1, 2}`.
pub fn hermite_checks(seed: u64) -> Result<Vec<Check>> {
    const DEG: usize = 8;
    let lambdas: [f64; 3] = [0.5, 1.0, 2.0];
    let mut rng = stream(seed, 101);

    let (mut explicit, mut gram1) = (0.0f64, 0.0f64);
    for &l in &lambdas {
        let reach = 12.0 / l.sqrt();
        let (xs, ws) = composite_legendre(-reach, reach, 48, 16);
        let tab: Vec<Vec<f64>> = xs.iter().map(|&x| scaled_hermite_functions(DEG + 1, l, x)).collect();
        for j in 0..=DEG + 1 {
            for k in 0..=j {
                let g: f64 = tab.iter().zip(&ws).map(|(t, w)| w * t[j] * t[k]).sum();
                gram1 = gram1.max((g - delta(j == k)).abs());
            }
        }
        for (x, t) in xs.iter().zip(&tab).step_by(5) {
            for (k, v) in t.iter().enumerate() {
                explicit = explicit.max((v - explicit_phi(k, l, *x).0).abs());
            }
        }
    }

    let (mut gram_n, mut ladder, mut ladder_fd, mut decomposition, mut eigen_fd) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for n in 1..=3 {
        for &l in &lambdas {
            let spec = BasisSpec::new(n, l, DEG)?;
            let grid = QuadratureGrid::for_basis(&spec)?;
            let basis = MultiIndex::enumerate(n, DEG);
            for a in &basis {
                let e = unit_field(spec, a)?;
                let back = analyze(&synthesize_tensor(&e, &grid.nodes), &grid, &spec)?;
                for b in &basis {
                    gram_n = gram_n.max((back.get(b) - delta(a == b)).norm());
                }
                // ½ Σ_j (A_j A_j* + A_j* A_j) Φ_α = (2|α| + n)|λ| Φ_α
                let mut sum = SpectralField::new(spec.with_degree(DEG + 1));
                for j in 0..n {
                    let up = apply_ladder(&e, j, Ladder::Creation)?;
                    let down = apply_ladder(&e, j, Ladder::Annihilation)?;
                    let ud = apply_ladder(&up, j, Ladder::Annihilation)?;
                    let du = apply_ladder(&down, j, Ladder::Creation)?;
                    for (g, c) in ud.iter().chain(du.iter()) {
                        sum.insert(g.clone(), sum.get(g) + 0.5 * c)?;
                    }
                }
                let expect = spec.eigenvalue(a);
                for (g, c) in sum.iter() {
                    let target = if g == a { expect } else { 0.0 };
                    decomposition = decomposition.max((c - target).norm() / expect);
                }
            }
            for _ in 0..12 {
                let a = &basis[rng.gen_range(0..basis.len())];
                let j = rng.gen_range(0..n);
                let xi: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.5..2.5) / l.sqrt()).collect();
                let e = unit_field(spec, a)?;
                let (v, grad) = explicit_phi_nd(a, l, &xi);
                // A_j = −∂_j + |λ|ξ_j and A_j* = ∂_j + |λ|ξ_j
                let up = synthesize(&apply_ladder(&e, j, Ladder::Creation)?, std::slice::from_ref(&xi))[0];
                let down = synthesize(&apply_ladder(&e, j, Ladder::Annihilation)?, std::slice::from_ref(&xi))[0];
                ladder = ladder.max((up.re - (-grad[j] + l * xi[j] * v)).abs());
                ladder = ladder.max((down.re - (grad[j] + l * xi[j] * v)).abs());

                let h = 1e-3;
                let at = |d: f64| {
                    let mut p = xi.clone();
                    p[j] += d;
                    eval_phi(a, l, &p)
                };
                let (p1, m1, p2, m2, p3, m3) =
                    (at(h)?, at(-h)?, at(2.0 * h)?, at(-2.0 * h)?, at(3.0 * h)?, at(-3.0 * h)?);
                let d1 = (45.0 * (p1 - m1) - 9.0 * (p2 - m2) + (p3 - m3)) / (60.0 * h);
                ladder_fd = ladder_fd.max((up.re - (-d1 + l * xi[j] * v)).abs());

                // (−Δ + λ²|ξ|²)Φ_α = (2|α| + n)|λ|Φ_α, second derivatives by 6th-order differences
                let mut lap = 0.0;
                for k in 0..n {
                    let at = |d: f64| {
                        let mut p = xi.clone();
                        p[k] += d;
                        eval_phi(a, l, &p)
                    };
                    let c0 = at(0.0)?;
                    let s = |m: f64| -> Result<f64> { Ok(at(m * h)? + at(-m * h)?) };
                    lap += (-490.0 * c0 + 270.0 * s(1.0)? - 27.0 * s(2.0)? + 2.0 * s(3.0)?) / (180.0 * h * h);
                }
                let r2: f64 = xi.iter().map(|x| x * x).sum();
                let lhs = -lap + l * l * r2 * v;
                eigen_fd = eigen_fd.max((lhs - spec.eigenvalue(a) * v).abs() / spec.eigenvalue(a));
            }
        }
    }
    Ok(vec![
        Check::at_most("hermite_vs_explicit_polynomials", explicit, 1e-12),
        Check::at_most("gram_1d_legendre", gram1, 1e-10),
        Check::at_most("gram_nd_analysis", gram_n, 1e-10),
        Check::at_most("ladder_relation", ladder, 1e-10),
        Check::at_most("ladder_relation_finite_difference", ladder_fd, 1e-8),
        Check::at_most("h_decomposition_diagonal", decomposition, 1e-10),
        Check::at_most("eigen_equation_finite_difference", eigen_fd, 1e-6),
    ])
}

/// Closed-form truncation factor against direct quadrature over
/// `ν ∈ [0.1, 100]`, `ε ∈ [0.05, 1]`, plus frozen examples.
pub fn truncation_factor_checks() -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for i in 0..41 {
        let nu = 0.1 * 1000f64.powf(i as f64 / 40.0);
        for k in 0..=19 {
            let eps = 0.05 + 0.05 * k as f64;
            let closed = truncated_factor(Eigenvalue::new(nu)?, TruncationWindow::new(eps)?);
            let quad = truncated_factor_by_quadrature(nu, eps);
            let err =
                if closed == 0.0 && quad == 0.0 { 0.0 } else { (closed - quad).abs() / closed.abs().max(quad.abs()) };
            worst = worst.max(err);
        }
    }
    let spec = BasisSpec::new(1, 1.0, 0)?;
    let ground = unit_field(spec, &MultiIndex::zeros(1))?;
    let one = MultiIndex::new(&[1]);
    let full = apply_riesz(&ground, 0, false)?.get(&one).re;
    let half = apply_truncated_riesz(&ground, 0, false, TruncationWindow::new(0.5)?)?.get(&one).re;
    Ok(vec![
        Check::at_most("truncation_factor_closed_vs_quadrature", worst, 1e-8),
        // √2 (erf 2 − erf ½) in double precision
        Check::at_most("truncated_riesz_example", (half - 0.671_500_259_704_961_7).abs(), 1e-12),
        Check::at_most("riesz_ground_state_multiplier", (full - 2f64.sqrt()).abs(), 1e-15),
    ])
}

/// `‖R_j^ε f − R_j f‖₂` along `ε = 0.5, 0.25, 0.1, 0.05` for band-limited
/// slices, and the uniform bound `‖R_j^ε f‖₂ ≤ 2‖f‖₂` on 100 random fields.
pub fn truncation_convergence_checks(seed: u64) -> Result<Vec<Check>> {
    let mut rng = stream(seed, 102);
    let ladder = [0.5, 0.25, 0.1, 0.05];
    let (mut ratio, mut last, mut tiny, mut bound) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for trial in 0..100 {
        let n = 1 + trial % 3;
        let lambda = rng.gen_range(0.2..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let f = random_spectral(&mut rng, n, lambda, 6)?;
        let j = rng.gen_range(0..n);
        let star = rng.gen_bool(0.5);
        let errs: Vec<f64> =
            ladder.iter().map(|&e| truncation_error(&f, j, star, TruncationWindow::new(e)?)).collect::<Result<_>>()?;
        for w in errs.windows(2) {
            ratio = ratio.max(w[1] / w[0]);
        }
        last = last.max(errs[3]);
        tiny = tiny.max(truncation_error(&f, j, star, TruncationWindow::new(1e-8)?)?);
        let eps = rng.gen_range(0.01..1.0);
        let t = apply_truncated_riesz(&f, j, star, TruncationWindow::new(eps)?)?;
        bound = bound.max(t.norm() / f.norm());
    }
    Ok(vec![
        Check::below("truncation_error_decreasing_ratio", ratio, 1.0),
        Check::below("truncation_error_at_0.05", last, 1e-6),
        Check::below("truncation_error_at_1e-8", tiny, 1e-6),
        Check::at_most("truncated_norm_bound", bound, 2.0),
    ])
}

/// `‖𝓡f‖₂ = √2 ‖f‖₂` exactly on coefficients and end to end through the
/// grid slice expansion for `n = 1, 2, 3`.
pub fn vector_identity_checks(seed: u64, exec: Execution) -> Result<Vec<Check>> {
    let mut rng = stream(seed, 103);
    let mut coeff = 0.0f64;
    for trial in 0..30 {
        let n = 1 + trial % 3;
        let lambda = rng.gen_range(0.2..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let f = random_spectral(&mut rng, n, lambda, 8)?;
        let total: f64 = vector_riesz(&f).iter().map(|g| g.norm_sqr()).sum();
        coeff = coeff.max((total.sqrt() / f.norm() - 2f64.sqrt()).abs());
    }
    let mut out = vec![Check::at_most("vector_identity_coefficients", coeff, 1e-12)];
    // finer than the sweep default so the n = 3 slices hold the bump mix
    let grid = GridSpec { budget: 1 << 22, ..Default::default() };
    for n in 1..=3 {
        let field = random_field(&grid, n, mix(seed, 200 + n as u64), Family::BumpMix, exec)?;
        let g = apply_op(&field, SweepOp::Vector, None, exec)?;
        let ratio = sweep_lp_norm(&g, 2.0) / sweep_lp_norm(&field.grid, 2.0);
        out.push(Check::at_most(format!("vector_identity_grid_n{n}"), (ratio / 2f64.sqrt() - 1.0).abs(), 0.01));
    }
    Ok(out)
}

fn p_value(quad: &KernelQuadrature, z2: f64, t: f64) -> Result<f64> {
    match quad.fields(z2, t) {
        Some(f) => Ok(f.p),
        None => Ok(quad.fields_checked(z2, t)?.p),
    }
}

/// Heat kernel: total mass, homogeneity, factorization and gradients.
pub fn heat_kernel_checks(seed: u64, exec: Execution) -> Result<Vec<Check>> {
    let mut rng = stream(seed, 104);
    let unit = KernelParams::unit(1);
    let quad = KernelQuadrature::new(unit);

    // ∫∫ p₁ = 2π ∫ ρ ∫ p₁(ρ, t) dt dρ
    let (rs, rw) = composite_legendre(0.0, 13.0, 13, 16);
    let (ts, tw) = composite_legendre(-30.0, 30.0, 60, 16);
    let rows: Vec<Result<f64>> = exec.map(rs.len(), |i| {
        let z2 = rs[i] * rs[i];
        let mut acc = 0.0;
        for (t, w) in ts.iter().zip(&tw) {
            acc += w * p_value(&quad, z2, *t)?;
        }
        Ok(acc)
    });
    let mut mass = 0.0;
    for ((r, w), row) in rs.iter().zip(&rw).zip(rows) {
        mass += 2.0 * PI * r * w * row?;
    }

    let (mut q_hom, mut q_fact, mut p_hom) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..20 {
        let n = rng.gen_range(1..=3usize);
        let z: Vec<Complex64> =
            (0..n).map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        let (lambda, s) = (rng.gen_range(-3.0..3.0), rng.gen_range(0.3..3.0));
        // q_s(z, λ) = s^{-n} q₁(z/√s, sλ)
        let lhs = q_kernel(&z, lambda, KernelParams::new(n, s)?);
        let zs: Vec<Complex64> = z.iter().map(|c| c / s.sqrt()).collect();
        let rhs = s.powi(-(n as i32)) * q_kernel(&zs, s * lambda, KernelParams::unit(n));
        q_hom = q_hom.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()));
        let prod: f64 = z.iter().map(|c| q_kernel(&[*c], lambda, KernelParams::new(1, s).unwrap())).product();
        q_fact = q_fact.max((lhs - prod).abs() / lhs.abs().max(prod.abs()));
        if n == 1 {
            // p_s(z, t) = s^{-(n+1)} p₁(z/√s, t/s)
            let t = rng.gen_range(-2.0..2.0);
            let a = p_kernel(&HeisenbergPoint::new(z.clone(), t), KernelParams::new(1, s)?)?;
            let b = s.powi(-2) * p_kernel(&HeisenbergPoint::new(zs, t / s), unit)?;
            p_hom = p_hom.max((a - b).abs() / a.abs().max(b.abs()));
        }
    }

    let (mut grad, mut radial) = (0.0f64, 0.0f64);
    let h = 1e-4;
    for _ in 0..10 {
        let (x, y, t) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let pt = |x: f64, y: f64, t: f64| p_kernel(&HeisenbergPoint::from_xy(&[x], &[y], t), unit);
        let dx = (pt(x + h, y, t)? - pt(x - h, y, t)?) / (2.0 * h);
        let dy = (pt(x, y + h, t)? - pt(x, y - h, t)?) / (2.0 * h);
        let dt = (pt(x, y, t + h)? - pt(x, y, t - h)?) / (2.0 * h);
        let p = HeisenbergPoint::from_xy(&[x], &[y], t);
        let (z, zs) = zbar_grad_p1(&p, 0)?;
        // Z̃ = iX̃ + Ỹ, Z̃* = iX̃ − Ỹ
        let xt = dx - 0.5 * y * dt;
        let yt = dy + 0.5 * x * dt;
        grad = grad.max((z - Complex64::new(yt, xt)).norm());
        grad = grad.max((zs - Complex64::new(-yt, xt)).norm());
        let f = kernel_fields(&p)?;
        radial = radial.max((dx - x * f.radial).abs()).max((dt - f.dt).abs());
    }

    let q0 = q_kernel(&[Complex64::default()], 0.0, unit);
    let q2 = q_kernel(&[Complex64::new(2.0, 0.0)], 0.0, unit);
    Ok(vec![
        Check::at_most("p1_total_mass", (mass - 1.0).abs(), 1e-6),
        Check::at_most("q_origin_example", (q0 - 1.0 / (4.0 * PI)).abs(), 1e-15),
        // e^{-1}/(4π) in double precision
        Check::at_most("q_radius_two_example", (q2 - 0.029_274_915_762_159_584).abs(), 1e-15),
        Check::at_most("q_homogeneity", q_hom, 1e-12),
        Check::at_most("q_factorization", q_fact, 1e-12),
        Check::at_most("p_homogeneity", p_hom, 1e-8),
        Check::at_most("left_invariant_gradient_fd", grad, 1e-5),
        Check::at_most("radial_and_time_derivative_fd", radial, 1e-5),
    ])
}

/// `e^{-r²H(λ)}` through the heat-kernel integral on Hermite eigenfunctions,
/// `n = 1`, `λ ∈ {0.5, 1}`, `r ∈ {0.5, 1}`.
pub fn semigroup_kernel_checks() -> Result<Vec<Check>> {
    const DEG: usize = 4;
    let mut out = Vec::new();
    for lambda in [0.5, 1.0] {
        for r in [0.5, 1.0] {
            let spec = BasisSpec::new(1, lambda, DEG)?;
            let mut worst = 0.0f64;
            for k in 0..=DEG {
                let a = MultiIndex::new(&[k]);
                let g = semigroup_via_kernel(&unit_field(spec, &a)?, r)?;
                let expect = (-r * r * spec.eigenvalue(&a)).exp();
                for (b, c) in g.iter() {
                    worst = worst.max((c - if *b == a { expect } else { 0.0 }).norm());
                }
            }
            out.push(Check::at_most(format!("semigroup_kernel_lambda{lambda}_r{r}"), worst, 1e-6));
        }
    }
    Ok(out)
}

/// The two derivative identities for
/// `ψ = π_λ(rz)φ(ξ) = e^{iλ(r x·ξ + ½r² x·y)} φ(ξ + ry)`:
///
/// ```text
/// r ∂ψ/∂ξ_j  = (∂/∂y_j + iλr² x_j / 2) ψ
/// iλr ξ_j ψ  = (∂/∂x_j − iλr² y_j / 2) ψ
/// ```
pub fn lemma_checks(seed: u64, draws: usize) -> Result<Vec<Check>> {
    let mut rng = stream(seed, 105);
    let (mut first, mut second) = (0.0f64, 0.0f64);
    let h = 1e-5;
    for _ in 0..draws {
        let n = rng.gen_range(1..=3usize);
        let lambda = rng.gen_range(0.2..2.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let r = rng.gen_range(0.2..2.0);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let xi: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let centre: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let tilt = rng.gen_range(-1.0..1.0);
        let phi = |v: &[f64]| {
            let d: f64 = v.iter().zip(&centre).map(|(a, b)| (a - b) * (a - b)).sum();
            Complex64::new((-0.5 * d).exp(), 0.0) * Complex64::new(1.0, tilt * v[0])
        };
        let psi = |x: &[f64], y: &[f64], xi: &[f64]| {
            let rx: Vec<f64> = x.iter().map(|v| r * v).collect();
            let ry: Vec<f64> = y.iter().map(|v| r * v).collect();
            schrodinger_apply(&HeisenbergPoint::from_xy(&rx, &ry, 0.0), lambda, phi, xi)
        };
        let bump = |v: &[f64], j: usize, d: f64| {
            let mut w = v.to_vec();
            w[j] += d;
            w
        };
        let p0 = psi(&x, &y, &xi);
        let i = Complex64::i();
        for j in 0..n {
            let d_xi = (psi(&x, &y, &bump(&xi, j, h)) - psi(&x, &y, &bump(&xi, j, -h))) / (2.0 * h);
            let d_y = (psi(&x, &bump(&y, j, h), &xi) - psi(&x, &bump(&y, j, -h), &xi)) / (2.0 * h);
            let d_x = (psi(&bump(&x, j, h), &y, &xi) - psi(&bump(&x, j, -h), &y, &xi)) / (2.0 * h);
            let lhs1 = r * d_xi;
            let rhs1 = d_y + i * lambda * r * r * x[j] / 2.0 * p0;
            first = first.max((lhs1 - rhs1).norm());
            let lhs2 = i * lambda * r * xi[j] * p0;
            let rhs2 = d_x - i * lambda * r * r * y[j] / 2.0 * p0;
            second = second.max((lhs2 - rhs2).norm());
        }
    }
    Ok(vec![
        Check::at_most("schrodinger_xi_derivative_identity", first, 1e-6),
        Check::at_most("schrodinger_x_derivative_identity", second, 1e-6),
    ])
}

/// Moments `∫ |x₁|^p |D p₁|` for `p ∈ {0, 1, 2}` across `n = 1, 2, 3`:
/// max/min ratio and the gap between the 3σ intervals (≤ 0 when they overlap).
pub fn moment_flatness_checks(samples: usize, seed: u64, exec: Execution) -> Result<Vec<Check>> {
    let exps = [0.0, 1.0, 2.0];
    let per_n: Vec<_> =
        (1..=3).map(|n| kernel_moments(&exps, n, samples, mix(seed, 300 + n as u64), exec)).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for (kind, pick) in [("radial", 0usize), ("time", 1)] {
        for (k, p) in exps.iter().enumerate() {
            let est: Vec<_> = per_n.iter().map(|v| if pick == 0 { v[k].0 } else { v[k].1 }).collect();
            let hi = est.iter().map(|e| e.estimate).fold(f64::MIN, f64::max);
            let lo = est.iter().map(|e| e.estimate).fold(f64::MAX, f64::min);
            let lo_top = est.iter().map(|e| e.estimate - 3.0 * e.stderr).fold(f64::MIN, f64::max);
            let hi_bottom = est.iter().map(|e| e.estimate + 3.0 * e.stderr).fold(f64::MAX, f64::min);
            out.push(Check::at_most(format!("{kind}_moment_p{p}_spread"), hi / lo, 1.5));
            out.push(Check::at_most(format!("{kind}_moment_p{p}_3sigma_gap"), lo_top - hi_bottom, 0.0));
        }
    }
    Ok(out)
}

fn window(x: f64, half: f64) -> f64 {
    let a = x.abs();
    if a <= half {
        1.0
    } else if a >= half + 1.0 {
        0.0
    } else {
        let s = a - half;
        1.0 - s * s * (3.0 - 2.0 * s)
    }
}

fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Parabola transform examples and its reductions: shear, dilation
/// covariance and the dilation norm scaling.
pub fn parabola_checks() -> Result<Vec<Check>> {
    let ax = Axis::new(-12.0, 12.0, 193)?;
    let rule = LogRule::new(0.5, DEFAULT_R_NODES)?;
    let lin = GridFunction::from_fn(vec![ax, ax], |p| real(p[0] * window(p[0], 8.0) * window(p[1], 8.0)));
    let flat = GridFunction::from_fn(vec![ax, ax], |p| real(window(p[0], 8.0) * window(p[1], 8.0)));
    let svar = GridFunction::from_fn(vec![ax, ax], |p| real(p[1] * window(p[0], 8.0) * window(p[1], 8.0)));
    // H^ε u = −2(1/ε − ε) = −3 at ε = ½
    let e_lin = (curve_transform_at(&lin, 1.0, 1.0, 0.0, &rule, &[0.3, -1.0]) + 3.0).norm();
    let e_flat = curve_transform_at(&flat, 1.0, 1.0, 0.0, &rule, &[0.5, 0.5]).norm();
    let e_s = curve_transform_at(&svar, 1.0, 1.0, 0.0, &rule, &[0.2, 1.0]).norm();

    let big = Axis::new(-10.0, 10.0, 401)?;
    let f = GridFunction::from_fn(vec![big, big], |p| real((-(p[0] * p[0]) - p[1] * p[1]).exp() * (1.0 + p[0])));
    let probes = [[0.3, -0.4], [-0.8, 0.5], [0.0, 1.1], [1.2, -1.0]];

    // τ_a T_{(1,1,a)} τ_a^{-1} f = H f with τ_a g(u, s) = g(u, s + au)
    let a = 0.7;
    let sheared = reduction_conjugate(&Reduction::Shear { a: -a }, &f)?;
    let mut shear = 0.0f64;
    for p in &probes {
        let lhs = curve_transform_at(&sheared, 1.0, 1.0, a, &rule, &[p[0], p[1] + a * p[0]]);
        let rhs = curve_transform_at(&f, 1.0, 1.0, 0.0, &rule, p);
        shear = shear.max((lhs - rhs).norm());
    }

    // T_{(x,t,v)} f(u, s) = [T_{(1,1,vx/t)} δ_{x,t} f](u/x, s/t)
    let (x, t, v) = (0.8, 0.6, 0.5);
    let dil = reduction_conjugate(&Reduction::Dilation { l1: x, l2: t }, &f)?;
    let mut covariance = 0.0f64;
    for p in &probes {
        let lhs = curve_transform_at(&f, x, t, v, &rule, p);
        let rhs = curve_transform_at(&dil, 1.0, 1.0, v * x / t, &rule, &[p[0] / x, p[1] / t]);
        covariance = covariance.max((lhs - rhs).norm());
    }

    let (l1, l2) = (1.7, 0.6);
    let d = reduction_conjugate(&Reduction::Dilation { l1, l2 }, &f)?;
    let mut norm = 0.0f64;
    for p in [2.0, 4.0] {
        let expect = (l1 * l2).powf(-1.0 / p) * f.lp_norm(p);
        norm = norm.max((d.lp_norm(p) - expect).abs() / expect);
    }

    let mut rng = stream(0, 106);
    let mut pt =
        || HeisenbergPoint::from_xy(&[rng.gen_range(-2.0..2.0)], &[rng.gen_range(-2.0..2.0)], rng.gen_range(-2.0..2.0));
    let mut action = 0.0f64;
    for _ in 0..20 {
        let (g, h, p) = (pt(), pt(), pt());
        let (x1, e1) = u_action(&h, &p.x(), p.t)?;
        let (x2, e2) = u_action(&g, &x1, e1)?;
        let (x3, e3) = u_action(&group_mul(&g, &h)?, &p.x(), p.t)?;
        action = action.max((x2[0] - x3[0]).abs()).max((e2 - e3).abs());
    }

    Ok(vec![
        Check::at_most("parabola_linear_example", e_lin, 1e-4),
        Check::at_most("parabola_constant_annihilated", e_flat, 1e-12),
        Check::at_most("parabola_s_linear_annihilated", e_s, 1e-12),
        Check::at_most("shear_reduction", shear, 1e-3),
        Check::at_most("dilation_covariance", covariance, 1e-3),
        Check::at_most("dilation_norm_scaling", norm, 1e-4),
        Check::at_most("u_left_action", action, 1e-12),
    ])
}

fn compact_bump(x: f64, y: f64) -> f64 {
    let r2 = (x * x + y * y) / 9.0;
    if r2 >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r2)).exp() * (1.0 + 0.3 * x)
    }
}

/// `T_ε^{(z,t)} f(ξ, η)` against the curve transform of the transferred
/// function at the origin, and against the exact curve integral of the
/// analytic `f`, over `count` random `(z, t)`.
pub fn transference_checks(seed: u64, count: usize) -> Result<Vec<Check>> {
    let ax = Axis::new(-4.0, 4.0, 161)?;
    let f = GridFunction::from_fn(vec![ax, ax], |p| real(compact_bump(p[0], p[1])));
    let eps = 0.25;
    let rule = LogRule::new(eps, DEFAULT_R_NODES)?;
    let (us, uw) = composite_legendre(eps.ln(), -eps.ln(), 96, 16);
    let mut rng = stream(seed, 107);
    let (mut identity, mut exact) = (0.0f64, 0.0f64);
    for _ in 0..count {
        let base = HeisenbergPoint::from_xy(
            &[rng.gen_range(-1.0..1.0)],
            &[rng.gen_range(-1.0..1.0)],
            rng.gen_range(-1.0..1.0),
        );
        let (xi, eta) = ([rng.gen_range(-1.0..1.0)], rng.gen_range(-1.0..1.0));
        let direct = t_epsilon_at(&f, &base, &rule, &[xi[0], eta]);
        let curve = crate::transfer::CurveSpec::new(base.clone(), eps)?;
        let via = hilbert_curve_trunc(transferred(&f, &xi, eta), &curve, &HeisenbergPoint::origin(1))?;
        identity = identity.max((direct - via).norm());
        let (x, y, t) = (base.x()[0], base.y()[0], base.t);
        let along = |r: f64| compact_bump(xi[0] + r * y, eta + r * x * xi[0] + r * r * (t + 0.5 * x * y));
        let oracle: f64 = us
            .iter()
            .zip(&uw)
            .map(|(u, w)| {
                let r = u.exp();
                w * (along(r) - along(-r))
            })
            .sum();
        exact = exact.max((direct.re - oracle).abs());
    }
    Ok(vec![
        Check::at_most("transference_identity", identity, 1e-3),
        Check::at_most("t_epsilon_vs_exact_integral", exact, 1e-3),
    ])
}

/// Koranyi-unit point with `|z| ∈ [0.5, 1)`.
pub fn random_unit_direction(rng: &mut impl Rng) -> HeisenbergPoint {
    let r: f64 = rng.gen_range(0.5..1.0);
    let theta = rng.gen_range(0.0..2.0 * PI);
    let t = (1.0 - r.powi(4)).sqrt() * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
    HeisenbergPoint::new(vec![Complex64::from_polar(r, theta)], t)
}

/// `‖H^ε_{(z,t)}‖_{p→p}` probes along `directions` Koranyi-unit curves,
/// `ε ∈ {0.5, 0.1}`, `p ∈ {2, 4}`: spread (max/min) across directions.
pub fn uniformity_checks(seed: u64, directions: usize, exec: Execution) -> Result<Vec<Check>> {
    let mut rng = stream(seed, 108);
    let bases: Vec<HeisenbergPoint> = (0..directions).map(|_| random_unit_direction(&mut rng)).collect();
    let exps = [2.0, 4.0];
    let mut out = Vec::new();
    for eps in [0.5, 0.1] {
        let ratios: Vec<Vec<f64>> =
            bases.iter().map(|b| curve_lp_ratios(b, eps, &exps, exec)).collect::<Result<_>>()?;
        for (k, p) in exps.iter().enumerate() {
            let hi = ratios.iter().map(|r| r[k]).fold(f64::MIN, f64::max);
            let lo = ratios.iter().map(|r| r[k]).fold(f64::MAX, f64::min);
            out.push(Check::at_most(format!("curve_ratio_spread_eps{eps}_p{p}"), hi / lo, 1.5));
        }
    }
    Ok(out)
}

/// Monte-Carlo representation of `R_1^ε` (or `R_1^{*ε}`) on `ℍ¹` against the
/// spectral truncated transform: relative L² distance and the largest
/// pointwise deviation in units of the reported standard error.
pub fn representation_checks(
    epsilon: f64,
    samples: usize,
    seed: u64,
    star: bool,
    exec: Execution,
) -> Result<Vec<Check>> {
    let axes = vec![Axis::new(-8.0, 8.0, 129)?, Axis::centered(128, 0.25)?];
    let f = GridFunction::from_fn(axes, |p| {
        real((-(p[0] - 0.3) * (p[0] - 0.3) / 2.0 - p[1] * p[1] / 2.0).exp() * (1.0 + 0.5 * p[1]))
    });
    // output nodes lie on input nodes in both axes
    let at = [Axis::new(-3.0, 3.0, 17)?, Axis::new(-2.875, 3.125, 13)?];
    let g = Grushin { exec, ..Default::default() };
    let spectral = g.truncated_riesz(&f, 0, star, TruncationWindow::new(epsilon)?)?;
    let mc = g.riesz_mc(&f, 0, star, epsilon, samples, seed, &at)?;
    let b = [Boundary::Zero, Boundary::Zero];
    let (mut num, mut den, mut z, mut beyond) = (0.0, 0.0, 0.0f64, 0usize);
    for i in 0..mc.estimate.len() {
        let s = spectral.interpolate(&mc.estimate.point(i), &b);
        let d = mc.estimate.values[i] - s;
        num += d.norm_sqr();
        den += s.norm_sqr();
        let se = mc.stderr.values[i].re;
        let zi = if se > 0.0 {
            d.norm() / se
        } else if d.norm() == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        z = z.max(zi);
        if zi > 3.0 {
            beyond += 1;
        }
    }
    let tag = if star { "riesz_star" } else { "riesz" };
    Ok(vec![
        Check::at_most(format!("{tag}_mc_relative_l2"), (num / den).sqrt(), 0.05),
        Check::at_most(format!("{tag}_mc_max_stderr_units"), z, 3.0),
        // a Gaussian error leaves 0.27% of points beyond 3σ
        Check::at_most(format!("{tag}_mc_fraction_beyond_3_stderr"), beyond as f64 / mc.estimate.len() as f64, 0.01),
    ])
}

/// Dimension probe: `max_f ‖𝓡f‖₄/‖f‖₄` for `n = 1..4` must stay within a
/// factor 1.5, and the `p = 2` estimate must equal `√2` within 1%.
pub fn dimension_probe_checks(trials: usize, seed: u64, exec: Execution) -> Result<Vec<Check>> {
    let config = SweepConfig { dims: vec![1, 2, 3, 4], exponents: vec![2.0, 4.0], trials, seed, ..Default::default() };
    let outcome = dimension_sweep_with(&config, exec)?;
    if let Some(f) = outcome.failures.first() {
        return Err(Error::InvalidParameter(format!("sweep cell n={} p={}: {}", f.n, f.p, f.message)));
    }
    let mut out = Vec::new();
    let p4: Vec<f64> = outcome.records.iter().filter(|r| r.p == 4.0).map(|r| r.estimate).collect();
    let hi = p4.iter().cloned().fold(f64::MIN, f64::max);
    let lo = p4.iter().cloned().fold(f64::MAX, f64::min);
    out.push(Check::at_most("p4_estimate_spread", hi / lo, 1.5));
    for r in outcome.records.iter().filter(|r| r.p == 2.0) {
        out.push(Check::at_most(format!("p2_anchor_n{}", r.n), (r.estimate / 2f64.sqrt() - 1.0).abs(), 0.01));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_oracle_matches_low_orders() {
        // Φ₀ = π^{-1/4} e^{-x²/2}, Φ₁ = √2 π^{-1/4} x e^{-x²/2}
        let x: f64 = 0.7;
        let g = (-0.5 * x * x).exp() * PI.powf(-0.25);
        assert!((explicit_phi(0, 1.0, x).0 - g).abs() < 1e-15);
        assert!((explicit_phi(1, 1.0, x).0 - 2f64.sqrt() * x * g).abs() < 1e-15);
        assert!((explicit_phi(0, 1.0, x).1 + x * g).abs() < 1e-15);
    }

    #[test]
    fn suite_names_round_trip() {
        for name in Suite::NAMES {
            assert_eq!(name.parse::<Suite>().unwrap().to_string(), name);
        }
        assert!("nope".parse::<Suite>().is_err());
    }

    #[test]
    fn check_semantics() {
        assert!(Check::at_most("a", 1.0, 1.0).pass);
        assert!(!Check::below("a", 1.0, 1.0).pass);
        assert!(!Check::at_most("a", f64::NAN, 1.0).pass);
        let bad = VerifyConfig { samples: 0, ..Default::default() };
        assert!(run_suite(Suite::Hermite, &bad).is_err());
    }

    #[test]
    fn fast_groups_pass() {
        for c in truncation_factor_checks().unwrap() {
            assert!(c.pass, "{c}");
        }
        for c in lemma_checks(1, 10).unwrap() {
            assert!(c.pass, "{c}");
        }
    }
}
