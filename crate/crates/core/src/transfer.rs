//! Truncated Hilbert transforms along Heisenberg curves and their
//! transference to `ℝⁿ⁺¹`.
//!
//! Every truncated integral `∫_{ε<|r|<1/ε} g(r) dr/r` is evaluated as
//! `∫_{ln ε}^{-ln ε} (g(e^u) − g(−e^u)) du` with the trapezoid rule in `u`, so
//! any `g` that is even in `r` cancels exactly, node by node.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{Axis, Boundary, GridFunction};
use crate::heisenberg::HeisenbergPoint;

pub const DEFAULT_R_NODES: usize = 512;

/// Positive nodes `r_i` and weights for `∫_ε^{1/ε} h(r) dr/r`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRule {
    pub r: Vec<f64>,
    pub w: Vec<f64>,
}

impl LogRule {
    pub fn new(epsilon: f64, nodes: usize) -> Result<Self> {
        check_epsilon(epsilon)?;
        let nodes = nodes.max(2);
        let lo = epsilon.ln();
        let h = -2.0 * lo / (nodes - 1) as f64;
        let r = (0..nodes).map(|i| (lo + i as f64 * h).exp()).collect();
        let w = (0..nodes).map(|i| if i == 0 || i + 1 == nodes { 0.5 * h } else { h }).collect();
        Ok(LogRule { r, w })
    }

    /// `Σ w_i (g(r_i) − g(−r_i))`
    pub fn odd_sum<G: FnMut(f64) -> Complex64>(&self, mut g: G) -> Complex64 {
        let mut acc = Complex64::default();
        for (&r, &w) in self.r.iter().zip(&self.w) {
            if w != 0.0 {
                acc += (g(r) - g(-r)) * w;
            }
        }
        acc
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidEpsilon(epsilon))
    }
}

/// Base point `(z, t)` of the curve `r ↦ (rz, r²t)` and the truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub base: HeisenbergPoint,
    epsilon: f64,
}

impl CurveSpec {
    pub fn new(base: HeisenbergPoint, epsilon: f64) -> Result<Self> {
        check_epsilon(epsilon)?;
        Ok(CurveSpec { base, epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

fn zero_boundary(f: &GridFunction) -> Vec<Boundary> {
    vec![Boundary::Zero; f.dim()]
}

fn map_points<F>(f: &GridFunction, exec: Execution, eval: F) -> GridFunction
where
    F: Fn(&[f64]) -> Complex64 + Sync + Send,
{
    let mut out = GridFunction::zeros(f.axes.clone());
    let d = f.dim();
    let template = GridFunction::zeros(f.axes.clone());
    exec.for_chunks(&mut out.values, 256, |start, chunk| {
        let mut p = vec![0.0; d];
        for (k, v) in chunk.iter_mut().enumerate() {
            template.point_into(start + k, &mut p);
            *v = eval(&p);
        }
    });
    out
}

/// `T_{(x,t,v)} f(u, s) = ∫ f(u − rx, s − r²t − rvx) dr/r` at one point.
pub fn curve_transform_at(f: &GridFunction, x: f64, t: f64, v: f64, rule: &LogRule, at: &[f64]) -> Complex64 {
    let b = zero_boundary(f);
    rule.odd_sum(|r| f.interpolate(&[at[0] - r * x, at[1] - r * r * t - r * v * x], &b))
}

/// `T_{(x,t,v)}` over the whole grid of a function on `ℝ²`.
pub fn curve_transform(f: &GridFunction, x: f64, t: f64, v: f64, epsilon: f64) -> Result<GridFunction> {
    if f.dim() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: f.dim() });
    }
    let rule = LogRule::new(epsilon, DEFAULT_R_NODES)?;
    Ok(map_points(f, Execution::default(), |p| curve_transform_at(f, x, t, v, &rule, p)))
}

/// Truncated Hilbert transform along the parabola `(r, r²)`.
pub fn hilbert_parabola_trunc(f: &GridFunction, epsilon: f64) -> Result<GridFunction> {
    curve_transform(f, 1.0, 1.0, 0.0, epsilon)
}

/// `U(x+iy, t)(ξ, η) = (ξ − y, η − t + x·y/2 − x·ξ)`.
///
/// `U` is a left action: `U(a) ∘ U(b) = U(a·b)` for the product of
/// [`group_mul`](crate::heisenberg::group_mul).
pub fn u_action(p: &HeisenbergPoint, xi: &[f64], eta: f64) -> Result<(Vec<f64>, f64)> {
    if xi.len() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: xi.len() });
    }
    let mut out = Vec::with_capacity(xi.len());
    let mut e = eta - p.t;
    for (c, &x) in p.z.iter().zip(xi) {
        out.push(x - c.im);
        e += 0.5 * c.re * c.im - c.re * x;
    }
    Ok((out, e))
}

/// `T_ε^{(z,t)} f(ξ, η)` at one point of `ℝⁿ⁺¹`.
pub fn t_epsilon_at(f: &GridFunction, base: &HeisenbergPoint, rule: &LogRule, at: &[f64]) -> Complex64 {
    let n = base.dim();
    let b = zero_boundary(f);
    let x = base.x();
    let y = base.y();
    let xdot: f64 = x.iter().zip(&at[..n]).map(|(a, b)| a * b).sum();
    let xy: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
    let mut q = vec![0.0; n + 1];
    rule.odd_sum(|r| {
        for d in 0..n {
            q[d] = at[d] + r * y[d];
        }
        q[n] = at[n] + r * xdot + r * r * (base.t + 0.5 * xy);
        f.interpolate(&q, &b)
    })
}

/// `T_ε^{(z,t)} f(ξ, η) = ∫_{ε<|r|<1/ε} f(ξ + ry, η + r x·ξ + r²(t + x·y/2)) dr/r`.
pub fn t_epsilon_apply(f: &GridFunction, curve: &CurveSpec) -> Result<GridFunction> {
    t_epsilon_apply_with(f, curve, DEFAULT_R_NODES, Execution::default())
}

pub fn t_epsilon_apply_with(
    f: &GridFunction,
    curve: &CurveSpec,
    nodes: usize,
    exec: Execution,
) -> Result<GridFunction> {
    if f.dim() != curve.base.dim() + 1 {
        return Err(Error::DimensionMismatch { expected: curve.base.dim() + 1, got: f.dim() });
    }
    let rule = LogRule::new(curve.epsilon, nodes)?;
    Ok(map_points(f, exec, |p| t_epsilon_at(f, &curve.base, &rule, p)))
}

/// The function `F_{(ξ,η)}(w, s) = f(U(w, s)(ξ, η))` on the group.
pub fn transferred<'a>(f: &'a GridFunction, xi: &'a [f64], eta: f64) -> impl Fn(&HeisenbergPoint) -> Complex64 + 'a {
    let b = zero_boundary(f);
    move |p: &HeisenbergPoint| {
        let (x, e) = u_action(p, xi, eta).expect("dimension checked by caller");
        let mut q = x;
        q.push(e);
        f.interpolate(&q, &b)
    }
}

/// `H^ε_{(z,t)} F(w, s) = ∫_{ε<|r|<1/ε} F((w, s) γ(r)^{-1}) dr/r` with `γ(r) = (rz, r²t)`.
pub fn hilbert_curve_trunc<F>(big_f: F, curve: &CurveSpec, at: &HeisenbergPoint) -> Result<Complex64>
where
    F: Fn(&HeisenbergPoint) -> Complex64,
{
    hilbert_curve_trunc_with(big_f, curve, at, DEFAULT_R_NODES)
}

pub fn hilbert_curve_trunc_with<F>(big_f: F, curve: &CurveSpec, at: &HeisenbergPoint, nodes: usize) -> Result<Complex64>
where
    F: Fn(&HeisenbergPoint) -> Complex64,
{
    if at.dim() != curve.base.dim() {
        return Err(Error::DimensionMismatch { expected: curve.base.dim(), got: at.dim() });
    }
    let rule = LogRule::new(curve.epsilon, nodes)?;
    // (w, s)·(−rz, −r²t) = (w − rz, s − r²t − ½r Im(w·z̄)), written into a
    // reused point
    let twist: f64 = at.z.iter().zip(&curve.base.z).map(|(w, z)| (w * z.conj()).im).sum();
    let mut q = at.clone();
    Ok(rule.odd_sum(|r| {
        for ((qj, wj), zj) in q.z.iter_mut().zip(&at.z).zip(&curve.base.z) {
            *qj = wj - zj * r;
        }
        q.t = at.t - r * r * curve.base.t - 0.5 * r * twist;
        big_f(&q)
    }))
}

/// `‖H^ε_{(z,t)} F‖_p / ‖F‖_p` on `ℍ¹` for the test function carried to
/// `(z, t)` by the rotation, dilation and shear of the parabola reduction:
///
/// ```text
/// F(w, s) = g(u'/|z|, s/t − a u'/|z|) φ(v'),   u' + iv' = e^{−i arg z} w,   a = |z|v'/(2t)
/// ```
///
/// with `g(U, S) = e^{−U²−S²}(1 + U)` and `φ(v) = e^{−v²/2}`. `H^ε F` is
/// computed pointwise through the group law and both norms use the same
/// rule in the coordinates `(U, S, v')`: trapezoid in `U` and `S`,
/// Gauss–Hermite (absorbed weights) in `v'`. The Jacobian `|z||t|` is common and cancels.
pub fn curve_lp_ratios(base: &HeisenbergPoint, epsilon: f64, exponents: &[f64], exec: Execution) -> Result<Vec<f64>> {
    if base.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: base.dim() });
    }
    let zabs = base.z[0].norm();
    let t = base.t;
    if !(zabs > 0.0) || t == 0.0 {
        return Err(Error::InvalidParameter("curve needs z ≠ 0 and t ≠ 0".into()));
    }
    let curve = CurveSpec::new(base.clone(), epsilon)?;
    let rot = base.z[0] / zabs;
    let reach = 1.0 / epsilon;
    let step = 0.4;
    let u_axis = Axis::new(-5.0 - reach, 5.0 + reach, ((10.0 + 2.0 * reach) / step) as usize + 1)?;
    let s_axis = Axis::new(-5.0, 5.0 + reach * reach, ((10.0 + reach * reach) / step) as usize + 1)?;
    let (vn, vw) = crate::quadrature::gauss_hermite(8);
    let g = |u: f64, s: f64| {
        let e = u * u + s * s;
        if e > 40.0 {
            0.0
        } else {
            (-e).exp() * (1.0 + u)
        }
    };
    let big_f = |p: &HeisenbergPoint| {
        let w = p.z[0] * rot.conj();
        let (up, vp) = (w.re / zabs, w.im);
        let a = zabs * vp / (2.0 * t);
        Complex64::new(g(up, p.t / t - a * up) * (-0.5 * vp * vp).exp(), 0.0)
    };
    let uw = u_axis.weights();
    let sw = s_axis.weights();
    let rows = exec.map(u_axis.count, |i| {
        let u = u_axis.coord(i);
        let mut acc = vec![(0.0, 0.0); exponents.len()];
        for (v, wv) in vn.iter().zip(&vw) {
            for (k, ws) in sw.iter().enumerate() {
                let s = s_axis.coord(k);
                let at = HeisenbergPoint::new(vec![rot * Complex64::new(zabs * u, *v)], t * s);
                let f = big_f(&at).norm();
                let h = hilbert_curve_trunc(big_f, &curve, &at).expect("dimensions agree").norm();
                let w = uw[i] * ws * wv;
                for (a, &p) in acc.iter_mut().zip(exponents) {
                    a.0 += w * h.powf(p);
                    a.1 += w * f.powf(p);
                }
            }
        }
        acc
    });
    Ok(exponents
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            let (num, den): (f64, f64) = rows.iter().fold((0.0, 0.0), |s, r| (s.0 + r[k].0, s.1 + r[k].1));
            (num / den).powf(1.0 / p)
        })
        .collect())
}

/// Changes of variables used to reduce `H_{(z,t)}` to the parabola transform.
#[derive(Debug, Clone, PartialEq)]
pub enum Reduction {
    /// `ρ(σ)f(w, s) = f(σw, s)`, `σ` unitary `n × n` (row-major) acting on a
    /// grid with axes `(x₁, y₁, …, x_n, y_n, s)`.
    Rotation { sigma: Vec<Complex64> },
    /// `δ_{λ₁,λ₂} f(u, s) = f(λ₁u, λ₂s)` on `ℝ²`.
    Dilation { l1: f64, l2: f64 },
    /// `τ_a f(u, s) = f(u, s + au)` on `ℝ²`.
    Shear { a: f64 },
}

impl Reduction {
    pub fn inverse(&self) -> Reduction {
        match self {
            Reduction::Rotation { sigma } => {
                let n = (sigma.len() as f64).sqrt().round() as usize;
                let mut inv = vec![Complex64::default(); sigma.len()];
                for i in 0..n {
                    for j in 0..n {
                        inv[j * n + i] = sigma[i * n + j].conj();
                    }
                }
                Reduction::Rotation { sigma: inv }
            }
            Reduction::Dilation { l1, l2 } => Reduction::Dilation { l1: 1.0 / l1, l2: 1.0 / l2 },
            Reduction::Shear { a } => Reduction::Shear { a: -a },
        }
    }

    /// Point at which the transformed function reads the original.
    pub fn source(&self, p: &[f64]) -> Vec<f64> {
        match self {
            Reduction::Rotation { sigma } => {
                let n = (p.len() - 1) / 2;
                let mut out = vec![0.0; p.len()];
                for i in 0..n {
                    let mut acc = Complex64::default();
                    for j in 0..n {
                        acc += sigma[i * n + j] * Complex64::new(p[2 * j], p[2 * j + 1]);
                    }
                    out[2 * i] = acc.re;
                    out[2 * i + 1] = acc.im;
                }
                out[2 * n] = p[2 * n];
                out
            }
            Reduction::Dilation { l1, l2 } => vec![l1 * p[0], l2 * p[1]],
            Reduction::Shear { a } => vec![p[0], p[1] + a * p[0]],
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        match self {
            Reduction::Rotation { sigma } => {
                let n = (sigma.len() as f64).sqrt().round() as usize;
                if n * n != sigma.len() || dim != 2 * n + 1 {
                    return Err(Error::InvalidParameter(format!(
                        "rotation of size {} does not act on a {dim}-axis grid",
                        sigma.len()
                    )));
                }
                for i in 0..n {
                    for j in 0..n {
                        let dot: Complex64 = (0..n).map(|k| sigma[i * n + k] * sigma[j * n + k].conj()).sum();
                        let expect = if i == j { 1.0 } else { 0.0 };
                        if (dot - expect).norm() > 1e-10 {
                            return Err(Error::InvalidParameter("σ is not unitary".into()));
                        }
                    }
                }
                Ok(())
            }
            Reduction::Dilation { l1, l2 } => {
                if !(*l1 > 0.0 && *l2 > 0.0) || dim != 2 {
                    return Err(Error::InvalidParameter("dilation needs λ₁, λ₂ > 0 on a two-axis grid".into()));
                }
                Ok(())
            }
            Reduction::Shear { a } => {
                if !a.is_finite() || dim != 2 {
                    return Err(Error::InvalidParameter("shear needs finite a on a two-axis grid".into()));
                }
                Ok(())
            }
        }
    }
}

/// Resample `f` under the change of variables, zero outside the grid.
pub fn reduction_conjugate(kind: &Reduction, f: &GridFunction) -> Result<GridFunction> {
    kind.validate(f.dim())?;
    let b = zero_boundary(f);
    Ok(map_points(f, Execution::default(), |p| f.interpolate(&kind.source(p), &b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::heisenberg::group_mul;
    use rand::{Rng, SeedableRng};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn window(x: f64, half: f64) -> f64 {
        // flat on |x| ≤ half, smooth C¹ roll-off over one unit
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

    #[test]
    fn log_rule_integrates_dr_over_r() {
        let rule = LogRule::new(0.5, DEFAULT_R_NODES).unwrap();
        // ∫_ε^{1/ε} dr = 1/ε − ε
        let v = rule.odd_sum(|r| c(r.max(0.0)));
        assert!((v.re - 1.5).abs() < 1e-5);
        let empty = LogRule::new(1.0, 16).unwrap();
        assert!(empty.w.iter().all(|w| *w == 0.0));
        assert!(LogRule::new(0.0, 8).is_err());
    }

    #[test]
    fn parabola_examples() {
        let ax = Axis::new(-12.0, 12.0, 193).unwrap();
        let sx = Axis::new(-12.0, 12.0, 193).unwrap();
        let lin = GridFunction::from_fn(vec![ax, sx], |p| c(p[0] * window(p[0], 8.0) * window(p[1], 8.0)));
        let rule = LogRule::new(0.5, DEFAULT_R_NODES).unwrap();
        let v = curve_transform_at(&lin, 1.0, 1.0, 0.0, &rule, &[0.3, -1.0]);
        assert!((v.re + 3.0).abs() < 1e-4, "{v}");
        let flat = GridFunction::from_fn(vec![ax, sx], |p| c(window(p[0], 8.0) * window(p[1], 8.0)));
        assert!(curve_transform_at(&flat, 1.0, 1.0, 0.0, &rule, &[0.5, 0.5]).norm() < 1e-13);
        let s = GridFunction::from_fn(vec![ax, sx], |p| c(p[1] * window(p[0], 8.0) * window(p[1], 8.0)));
        assert!(curve_transform_at(&s, 1.0, 1.0, 0.0, &rule, &[0.2, 1.0]).norm() < 1e-12);
        let small = GridFunction::from_fn(vec![Axis::new(-1.0, 1.0, 5).unwrap(); 2], |p| c(p[0]));
        assert!(hilbert_parabola_trunc(&small, 1.5).is_err());
    }

    #[test]
    fn u_action_is_a_left_action_with_unit_jacobian() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let mut pt = || {
            HeisenbergPoint::from_xy(&[rng.gen_range(-2.0..2.0)], &[rng.gen_range(-2.0..2.0)], rng.gen_range(-2.0..2.0))
        };
        let (a, b, p) = (pt(), pt(), pt());
        let (xi, eta) = (p.x(), p.t);
        let (x1, e1) = u_action(&b, &xi, eta).unwrap();
        let (x2, e2) = u_action(&a, &x1, e1).unwrap();
        let (x3, e3) = u_action(&group_mul(&a, &b).unwrap(), &xi, eta).unwrap();
        assert!((x2[0] - x3[0]).abs() < 1e-14 && (e2 - e3).abs() < 1e-13);
        let (_, e4) = u_action(&group_mul(&b, &a).unwrap(), &xi, eta).unwrap();
        assert!((e2 - e4).abs() > 1e-6);
        let (x0, e0) = u_action(&HeisenbergPoint::new(vec![Complex64::default()], 0.7), &[0.4], 1.0).unwrap();
        assert_eq!((x0[0], e0), (0.4, 1.0 - 0.7));
        // Jacobian of (ξ, η) ↦ U(a)(ξ, η) by central differences
        let h = 1e-5;
        let d = |dx: f64, de: f64| u_action(&a, &[xi[0] + dx], eta + de).unwrap();
        let (xp, ep) = d(h, 0.0);
        let (xm, em) = d(-h, 0.0);
        let (xq, eq) = d(0.0, h);
        let (xr, er) = d(0.0, -h);
        let j = ((xp[0] - xm[0]) * (eq - er) - (ep - em) * (xq[0] - xr[0])) / (4.0 * h * h);
        assert!((j - 1.0).abs() < 1e-8);
    }

    #[test]
    fn t_epsilon_special_cases() {
        let ax = Axis::new(-6.0, 6.0, 97).unwrap();
        let f = GridFunction::from_fn(vec![ax, ax], |p| c((-(p[0] - 0.5).powi(2) - p[1] * p[1]).exp()));
        let zero = CurveSpec::new(HeisenbergPoint::origin(1), 0.3).unwrap();
        assert!(t_epsilon_apply_with(&f, &zero, 64, Execution::Sequential).unwrap().max_abs() == 0.0);
        // pure y direction: a 1-d truncated Hilbert transform in ξ
        let y = 0.8;
        let curve = CurveSpec::new(HeisenbergPoint::from_xy(&[0.0], &[y], 0.0), 0.25).unwrap();
        let rule = LogRule::new(0.25, DEFAULT_R_NODES).unwrap();
        for at in [[0.1, 0.3], [-1.2, 0.0]] {
            let got = t_epsilon_at(&f, &curve.base, &rule, &at);
            let g = |s: f64| (-(s - 0.5).powi(2) - at[1] * at[1]).exp();
            let (xs, ws) = crate::quadrature::composite_legendre(0.25f64.ln(), 4f64.ln(), 64, 16);
            let oracle: f64 = xs
                .iter()
                .zip(&ws)
                .map(|(u, w)| {
                    let r = u.exp();
                    w * (g(at[0] + r * y) - g(at[0] - r * y))
                })
                .sum();
            assert!((got.re - oracle).abs() < 1e-4, "{} vs {oracle}", got.re);
        }
    }

    #[test]
    fn transference_identity_at_random_points() {
        let ax = Axis::new(-6.0, 6.0, 121).unwrap();
        let f = GridFunction::from_fn(vec![ax, ax], |p| c((-(p[0] * p[0]) - 0.5 * (p[1] - 0.3).powi(2)).exp()));
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let base = HeisenbergPoint::from_xy(
                &[rng.gen_range(-1.0..1.0)],
                &[rng.gen_range(-1.0..1.0)],
                rng.gen_range(-1.0..1.0),
            );
            let curve = CurveSpec::new(base, 0.3).unwrap();
            let (xi, eta) = ([rng.gen_range(-1.0..1.0)], rng.gen_range(-1.0..1.0));
            let rule = LogRule::new(0.3, DEFAULT_R_NODES).unwrap();
            let direct = t_epsilon_at(&f, &curve.base, &rule, &[xi[0], eta]);
            let via = hilbert_curve_trunc(transferred(&f, &xi, eta), &curve, &HeisenbergPoint::origin(1)).unwrap();
            assert!((direct - via).norm() < 1e-12);
        }
    }

    #[test]
    fn reductions() {
        let ax = Axis::new(-4.0, 4.0, 81).unwrap();
        let f = GridFunction::from_fn(vec![ax, ax], |p| c((-(p[0] * p[0]) - 2.0 * p[1] * p[1]).exp()));
        let id = Reduction::Dilation { l1: 1.0, l2: 1.0 };
        assert!(reduction_conjugate(&id, &f).unwrap().sub(&f).unwrap().max_abs() < 1e-14);
        let big = Axis::new(-10.0, 10.0, 401).unwrap();
        let g = GridFunction::from_fn(vec![big, big], |p| c((-(p[0] * p[0]) - 2.0 * p[1] * p[1]).exp()));
        let (l1, l2) = (1.7, 0.6);
        for p in [2.0, 4.0] {
            let d = reduction_conjugate(&Reduction::Dilation { l1, l2 }, &g).unwrap();
            let expect = (l1 * l2).powf(-1.0 / p) * g.lp_norm(p);
            assert!((d.lp_norm(p) - expect).abs() < 1e-4 * expect);
        }
        let h3 = Axis::new(-3.0, 3.0, 13).unwrap();
        let f3 = GridFunction::from_fn(vec![h3, h3, h3], |p| c(p[0] + 2.0 * p[1] + p[2]));
        let rot = Reduction::Rotation { sigma: vec![Complex64::new(1.0, 0.0)] };
        assert!(reduction_conjugate(&rot, &f3).unwrap().sub(&f3).unwrap().max_abs() < 1e-14);
        assert!(reduction_conjugate(&Reduction::Rotation { sigma: vec![c(2.0)] }, &f3).is_err());
        assert!(reduction_conjugate(&Reduction::Dilation { l1: -1.0, l2: 1.0 }, &f).is_err());
    }
}
