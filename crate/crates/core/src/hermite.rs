//! Scaled Hermite functions and the spectral calculus of `H(λ) = −Δ + λ²|ξ|²`.
//!
//! Basis convention: `h_k(x) = (2^k k! √π)^{-1/2} H_k(x) e^{-x²/2}` and
//! `Φ_α^λ(ξ) = |λ|^{n/4} Π_j h_{α_j}(√|λ| ξ_j)`, orthonormal in `L²(ℝⁿ)` with
//! `H(λ) Φ_α^λ = (2|α| + n)|λ| Φ_α^λ`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::quadrature::gauss_hermite;

const RESCALE: f64 = 1e150;

/// `h_0(x), …, h_kmax(x)` by the three-term recurrence on the normalized
/// functions. The Gaussian factor is carried in log form and the running
/// pair is rescaled whenever it grows past `1e150`, so large `|x|` neither
/// underflows the seed nor overflows the recurrence.
pub fn hermite_functions(kmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(kmax + 1);
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    out.push(cur * log_scale.exp());
    for k in 0..kmax {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * cur - (kf / (kf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            log_scale += RESCALE.ln();
        }
        out.push(cur * log_scale.exp());
    }
    out
}

pub fn eval_hermite_1d(k: usize, x: f64) -> f64 {
    hermite_functions(k, x)[k]
}

/// `|λ|^{1/4} h_k(√|λ| ξ)` for `k = 0..=kmax`.
pub fn scaled_hermite_functions(kmax: usize, lambda_abs: f64, xi: f64) -> Vec<f64> {
    let s = lambda_abs.sqrt();
    let norm = lambda_abs.powf(0.25);
    let mut h = hermite_functions(kmax, s * xi);
    h.iter_mut().for_each(|v| *v *= norm);
    h
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(SmallVec<[u16; 4]>);

impl MultiIndex {
    pub fn new(entries: &[usize]) -> Self {
        MultiIndex(entries.iter().map(|&e| e as u16).collect())
    }

    pub fn zeros(n: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, n))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// `|α|`
    pub fn order(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn get(&self, j: usize) -> usize {
        self.0[j] as usize
    }

    pub fn entries(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&e| e as usize)
    }

    /// `α + e_j`
    pub fn shift(&self, j: usize) -> Self {
        let mut m = self.clone();
        m.0[j] += 1;
        m
    }

    /// `α − e_j`, defined only when `α_j ≥ 1`.
    pub fn lower(&self, j: usize) -> Option<Self> {
        if self.0[j] == 0 {
            return None;
        }
        let mut m = self.clone();
        m.0[j] -= 1;
        Some(m)
    }

    /// All indices with `|α| ≤ max_degree`, graded then lexicographic.
    pub fn enumerate(n: usize, max_degree: usize) -> Vec<MultiIndex> {
        let mut all = Vec::new();
        let mut cur = vec![0usize; n];
        fn rec(pos: usize, left: usize, cur: &mut Vec<usize>, all: &mut Vec<MultiIndex>) {
            if pos == cur.len() {
                all.push(MultiIndex::new(cur));
                return;
            }
            for v in 0..=left {
                cur[pos] = v;
                rec(pos + 1, left - v, cur, all);
            }
            cur[pos] = 0;
        }
        rec(0, max_degree, &mut cur, &mut all);
        all.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.cmp(b)));
        all
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisSpec {
    pub n: usize,
    pub lambda: f64,
    pub max_degree: usize,
}

impl BasisSpec {
    pub fn new(n: usize, lambda: f64, max_degree: usize) -> Result<Self> {
        if lambda == 0.0 || !lambda.is_finite() {
            return Err(Error::ZeroLambda);
        }
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        Ok(BasisSpec { n, lambda, max_degree })
    }

    /// `C(N+n, n)`
    pub fn size(&self) -> usize {
        let (n, big_n) = (self.n, self.max_degree);
        (1..=n).fold(1usize, |acc, k| acc * (big_n + k) / k)
    }

    /// Eigenvalue `(2|α| + n)|λ|` of `H(λ)` on `Φ_α^λ`.
    pub fn eigenvalue(&self, alpha: &MultiIndex) -> f64 {
        (2 * alpha.order() + self.n) as f64 * self.lambda.abs()
    }

    pub fn with_degree(self, max_degree: usize) -> Self {
        BasisSpec { max_degree, ..self }
    }
}

/// Coefficients of `f^λ` in the `Φ_α^λ` basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub spec: BasisSpec,
    coeffs: BTreeMap<MultiIndex, Complex64>,
}

impl SpectralField {
    pub fn new(spec: BasisSpec) -> Self {
        SpectralField { spec, coeffs: BTreeMap::new() }
    }

    pub fn from_coeffs<I>(spec: BasisSpec, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        let mut f = SpectralField::new(spec);
        for (a, c) in coeffs {
            f.insert(a, c)?;
        }
        Ok(f)
    }

    pub fn insert(&mut self, alpha: MultiIndex, c: Complex64) -> Result<()> {
        if alpha.dim() != self.spec.n {
            return Err(Error::DimensionMismatch { expected: self.spec.n, got: alpha.dim() });
        }
        if alpha.order() > self.spec.max_degree {
            return Err(Error::InvalidParameter(format!(
                "index of degree {} exceeds max_degree {}",
                alpha.order(),
                self.spec.max_degree
            )));
        }
        self.coeffs.insert(alpha, c);
        Ok(())
    }

    /// Insert without the degree check; callers guarantee the invariant.
    pub(crate) fn insert_raw(&mut self, alpha: MultiIndex, c: Complex64) {
        *self.coeffs.entry(alpha).or_default() += c;
    }

    pub fn get(&self, alpha: &MultiIndex) -> Complex64 {
        self.coeffs.get(alpha).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&MultiIndex, &Complex64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm_sqr()).sum()
    }

    /// `L²` norm, by Parseval.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Largest `|α|` actually present.
    pub fn degree(&self) -> usize {
        self.coeffs.keys().map(|a| a.order()).max().unwrap_or(0)
    }

    pub fn map_coeffs(&self, f: impl Fn(&MultiIndex, Complex64) -> Complex64) -> SpectralField {
        SpectralField { spec: self.spec, coeffs: self.coeffs.iter().map(|(a, c)| (a.clone(), f(a, *c))).collect() }
    }

    pub fn scale(&self, s: Complex64) -> SpectralField {
        self.map_coeffs(|_, c| c * s)
    }

    pub fn conj(&self) -> SpectralField {
        self.map_coeffs(|_, c| c.conj())
    }

    /// `self − other`; the result carries the larger `max_degree`.
    pub fn sub(&self, other: &SpectralField) -> SpectralField {
        let spec = self.spec.with_degree(self.spec.max_degree.max(other.spec.max_degree));
        let mut coeffs = self.coeffs.clone();
        for (a, c) in &other.coeffs {
            *coeffs.entry(a.clone()).or_default() -= c;
        }
        SpectralField { spec, coeffs }
    }

    /// Dense coefficient box of shape `[N+1; n]`, row-major.
    pub fn to_box(&self) -> (usize, Vec<Complex64>) {
        let side = self.spec.max_degree + 1;
        let n = self.spec.n;
        let mut data = vec![Complex64::default(); side.pow(n as u32)];
        for (a, c) in &self.coeffs {
            let idx = a.entries().fold(0usize, |acc, e| acc * side + e);
            data[idx] = *c;
        }
        (side, data)
    }

    /// Inverse of [`to_box`](Self::to_box), keeping entries with `|α| ≤ max_degree`.
    pub fn from_box(spec: BasisSpec, side: usize, data: &[Complex64]) -> SpectralField {
        let n = spec.n;
        let mut coeffs = BTreeMap::new();
        let mut digits = vec![0usize; n];
        for (idx, c) in data.iter().enumerate() {
            let mut r = idx;
            for d in (0..n).rev() {
                digits[d] = r % side;
                r /= side;
            }
            if digits.iter().sum::<usize>() <= spec.max_degree {
                coeffs.insert(MultiIndex::new(&digits), *c);
            }
        }
        SpectralField { spec, coeffs }
    }

    /// Drop every coefficient with `|α| > max_degree` and shrink the spec.
    pub fn truncate(&self, max_degree: usize) -> SpectralField {
        SpectralField {
            spec: self.spec.with_degree(max_degree),
            coeffs: self.coeffs.iter().filter(|(a, _)| a.order() <= max_degree).map(|(a, c)| (a.clone(), *c)).collect(),
        }
    }
}

pub fn eval_phi(alpha: &MultiIndex, lambda: f64, xi: &[f64]) -> Result<f64> {
    if lambda == 0.0 {
        return Err(Error::ZeroLambda);
    }
    if xi.len() != alpha.dim() {
        return Err(Error::DimensionMismatch { expected: alpha.dim(), got: xi.len() });
    }
    let la = lambda.abs();
    Ok(alpha.entries().zip(xi).map(|(k, &x)| scaled_hermite_functions(k, la, x)[k]).product())
}

/// Tensor quadrature rule on `ℝⁿ`: per-axis nodes and weights in ξ units.
///
/// Gauss–Hermite rules are built for one `|λ|` (recorded in `lambda_scale`);
/// uniform rules are the trapezoid rule on a sample grid and serve any λ
/// whose basis functions the grid resolves.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<Vec<f64>>,
    pub lambda_scale: Option<f64>,
}

impl QuadratureGrid {
    /// `m`-point Gauss–Hermite rule per axis, scaled to `|λ|`, with the
    /// Gaussian weight absorbed so `Σ w f ≈ ∫ f dξ`.
    pub fn gauss_hermite(n: usize, m: usize, lambda: f64) -> Result<Self> {
        if lambda == 0.0 {
            return Err(Error::ZeroLambda);
        }
        let s = lambda.abs().sqrt();
        let (x, w) = gauss_hermite(m);
        let nodes: Vec<f64> = x.iter().map(|v| v / s).collect();
        let weights: Vec<f64> = w.iter().map(|v| v / s).collect();
        Ok(QuadratureGrid { nodes: vec![nodes; n], weights: vec![weights; n], lambda_scale: Some(lambda.abs()) })
    }

    /// Default rule for a basis: `2N + 2` nodes per axis.
    pub fn for_basis(spec: &BasisSpec) -> Result<Self> {
        Self::gauss_hermite(spec.n, 2 * spec.max_degree + 2, spec.lambda)
    }

    /// Trapezoid rule on uniform axes `(min, max, count)`.
    pub fn uniform(axes: &[(f64, f64, usize)]) -> Self {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for &(lo, hi, count) in axes {
            let h = (hi - lo) / (count - 1) as f64;
            nodes.push((0..count).map(|i| lo + i as f64 * h).collect());
            weights.push((0..count).map(|i| if i == 0 || i + 1 == count { 0.5 * h } else { h }).collect());
        }
        QuadratureGrid { nodes, weights, lambda_scale: None }
    }

    pub fn dim(&self) -> usize {
        self.nodes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.nodes.iter().map(|a| a.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Tensor points in row-major order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let shape = self.shape();
        let total = self.len();
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; shape.len()];
        for _ in 0..total {
            out.push(idx.iter().enumerate().map(|(a, &i)| self.nodes[a][i]).collect());
            for a in (0..shape.len()).rev() {
                idx[a] += 1;
                if idx[a] < shape[a] {
                    break;
                }
                idx[a] = 0;
            }
        }
        out
    }

    /// Evaluate `f` at every tensor point.
    pub fn sample<F: Fn(&[f64]) -> Complex64>(&self, f: F) -> Vec<Complex64> {
        self.points().iter().map(|p| f(p)).collect()
    }
}

/// Contract one axis of a row-major tensor with a dense `rows × shape[axis]` matrix.
pub(crate) fn contract_axis(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    mat: &[f64],
    rows: usize,
) -> (Vec<Complex64>, Vec<usize>) {
    let cols = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![Complex64::default(); outer * rows * inner];
    for o in 0..outer {
        let src = &data[o * cols * inner..(o + 1) * cols * inner];
        let dst = &mut out[o * rows * inner..(o + 1) * rows * inner];
        for r in 0..rows {
            let drow = &mut dst[r * inner..(r + 1) * inner];
            for c in 0..cols {
                let m = mat[r * cols + c];
                if m == 0.0 {
                    continue;
                }
                let srow = &src[c * inner..(c + 1) * inner];
                for (d, s) in drow.iter_mut().zip(srow) {
                    *d += s * m;
                }
            }
        }
    }
    let mut new_shape = shape.to_vec();
    new_shape[axis] = rows;
    (out, new_shape)
}

/// Coefficient box `[kmax+1; n]` of `∫ f Φ_α^λ` for every `α` with all
/// `α_j ≤ kmax`, by sum factorization over the tensor rule.
pub(crate) fn analyze_box(
    samples: &[Complex64],
    grid: &QuadratureGrid,
    lambda_abs: f64,
    kmax: usize,
) -> Vec<Complex64> {
    let mut data = samples.to_vec();
    let mut shape = grid.shape();
    let side = kmax + 1;
    for axis in 0..grid.dim() {
        let nodes = &grid.nodes[axis];
        let weights = &grid.weights[axis];
        let mut mat = vec![0.0; side * nodes.len()];
        for (i, (&x, &w)) in nodes.iter().zip(weights).enumerate() {
            let h = scaled_hermite_functions(kmax, lambda_abs, x);
            for k in 0..side {
                mat[k * nodes.len() + i] = w * h[k];
            }
        }
        let (d, s) = contract_axis(&data, &shape, axis, &mat, side);
        data = d;
        shape = s;
    }
    data
}

/// Project samples on the quadrature grid onto `{Φ_α^λ : |α| ≤ N}`.
pub fn analyze(samples: &[Complex64], grid: &QuadratureGrid, spec: &BasisSpec) -> Result<SpectralField> {
    if grid.dim() != spec.n {
        return Err(Error::GridMismatch(format!("grid has {} axes, basis has n = {}", grid.dim(), spec.n)));
    }
    if samples.len() != grid.len() {
        return Err(Error::GridMismatch(format!("{} samples for a grid of {} points", samples.len(), grid.len())));
    }
    if let Some(scale) = grid.lambda_scale {
        if (scale - spec.lambda.abs()).abs() > 1e-12 * scale {
            return Err(Error::GridMismatch(format!(
                "rule built for |λ| = {scale}, basis has |λ| = {}",
                spec.lambda.abs()
            )));
        }
        if let Some(m) = grid.nodes.iter().map(|a| a.len()).min() {
            if m < spec.max_degree + 1 {
                return Err(Error::GridMismatch(format!(
                    "{m} Gauss–Hermite nodes cannot resolve degree {}",
                    spec.max_degree
                )));
            }
        }
    }
    let kmax = spec.max_degree;
    let data = analyze_box(samples, grid, spec.lambda.abs(), kmax);
    Ok(SpectralField::from_box(*spec, kmax + 1, &data))
}

/// Pointwise `Σ c_α Φ_α^λ(ξ)`.
pub fn synthesize(field: &SpectralField, points: &[Vec<f64>]) -> Vec<Complex64> {
    let la = field.spec.lambda.abs();
    let kmax = field.degree();
    points
        .iter()
        .map(|p| {
            let tables: Vec<Vec<f64>> = p.iter().map(|&x| scaled_hermite_functions(kmax, la, x)).collect();
            field
                .iter()
                .map(|(a, c)| {
                    let phi: f64 = a.entries().enumerate().map(|(j, k)| tables[j][k]).product();
                    c * phi
                })
                .sum()
        })
        .collect()
}

/// Synthesis on a tensor grid given per-axis coordinates, row-major output.
pub fn synthesize_tensor(field: &SpectralField, axes: &[Vec<f64>]) -> Vec<Complex64> {
    let la = field.spec.lambda.abs();
    let (side, mut data) = field.to_box();
    let mut shape = vec![side; field.spec.n];
    for (axis, coords) in axes.iter().enumerate() {
        let mut mat = vec![0.0; coords.len() * side];
        for (i, &x) in coords.iter().enumerate() {
            let h = scaled_hermite_functions(side - 1, la, x);
            mat[i * side..(i + 1) * side].copy_from_slice(&h);
        }
        let (d, s) = contract_axis(&data, &shape, axis, &mat, coords.len());
        data = d;
        shape = s;
    }
    data
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    Creation,
    Annihilation,
}

/// Creation `A_j(λ)Φ_α = (2α_j+2)^{1/2}|λ|^{1/2} Φ_{α+e_j}` (raises
/// `max_degree` to `N+1`) or annihilation `A_j*(λ)Φ_α = (2α_j)^{1/2}|λ|^{1/2} Φ_{α−e_j}`.
pub fn apply_ladder(field: &SpectralField, j: usize, kind: Ladder) -> Result<SpectralField> {
    let n = field.spec.n;
    if j >= n {
        return Err(Error::InvalidAxis { axis: j, dim: n });
    }
    let la = field.spec.lambda.abs();
    let mut out = match kind {
        Ladder::Creation => SpectralField::new(field.spec.with_degree(field.spec.max_degree + 1)),
        Ladder::Annihilation => SpectralField::new(field.spec),
    };
    for (a, c) in field.iter() {
        let aj = a.get(j) as f64;
        match kind {
            Ladder::Creation => {
                out.coeffs.insert(a.shift(j), c * ((2.0 * aj + 2.0) * la).sqrt());
            }
            Ladder::Annihilation => {
                if let Some(lo) = a.lower(j) {
                    out.coeffs.insert(lo, c * (2.0 * aj * la).sqrt());
                }
            }
        }
    }
    Ok(out)
}

/// `e^{−rH(λ)}`: multiply each coefficient by `e^{−(2|α|+n)|λ|r}`.
pub fn apply_semigroup(field: &SpectralField, r: f64) -> Result<SpectralField> {
    if r < 0.0 || r.is_nan() {
        return Err(Error::NegativeTime(r));
    }
    let spec = field.spec;
    Ok(field.map_coeffs(|a, c| c * (-spec.eigenvalue(a) * r).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn hermite_values() {
        assert_relative_eq!(eval_hermite_1d(0, 0.0), PI.powf(-0.25), epsilon = 1e-15);
        assert_relative_eq!(eval_hermite_1d(0, 0.0), 0.751126, epsilon = 1e-6);
        assert_eq!(eval_hermite_1d(1, 0.0), 0.0);
        // exact H_4 = 16x⁴ − 48x² + 12, norm (2⁴ 4! √π)^{-1/2}
        let x: f64 = 1.3;
        let h4 = 16.0 * x.powi(4) - 48.0 * x * x + 12.0;
        let expect = h4 * (-0.5 * x * x).exp() / (16.0 * 24.0 * PI.sqrt()).sqrt();
        assert!((eval_hermite_1d(4, 1.3) - expect).abs() < 1e-12);
    }

    #[test]
    fn hermite_far_tail_is_finite() {
        let h = hermite_functions(200, 30.0);
        assert!(h.iter().all(|v| v.is_finite()));
        let h = hermite_functions(200, 45.0);
        assert!(h.iter().all(|v| v.is_finite()));
        assert!(h[200] > 0.0);
    }

    #[test]
    fn phi_scaling() {
        let v = eval_phi(&MultiIndex::new(&[0]), 4.0, &[0.0]).unwrap();
        assert_relative_eq!(v, 4f64.powf(0.25) * PI.powf(-0.25), epsilon = 1e-14);
        assert_relative_eq!(v, 1.062252, epsilon = 1e-6);
        assert_eq!(eval_phi(&MultiIndex::new(&[1]), 1.0, &[0.0]).unwrap(), 0.0);
        let v = eval_phi(&MultiIndex::new(&[2, 0]), 2.0, &[0.5, -0.3]).unwrap();
        let s = 2f64.sqrt();
        let expect = 2f64.powf(0.25) * eval_hermite_1d(2, s * 0.5) * 2f64.powf(0.25) * eval_hermite_1d(0, -s * 0.3);
        assert_relative_eq!(v, expect, epsilon = 1e-15);
        assert_eq!(eval_phi(&MultiIndex::new(&[0]), 0.0, &[0.0]), Err(Error::ZeroLambda));
    }

    #[test]
    fn multi_index_ops() {
        let a = MultiIndex::new(&[1, 0, 2]);
        assert_eq!(a.order(), 3);
        assert_eq!(a.shift(1), MultiIndex::new(&[1, 1, 2]));
        assert_eq!(a.lower(1), None);
        assert_eq!(a.lower(2), Some(MultiIndex::new(&[1, 0, 1])));
        let all = MultiIndex::enumerate(3, 4);
        assert_eq!(all.len(), BasisSpec::new(3, 1.0, 4).unwrap().size());
        assert_eq!(all.len(), 35);
        assert!(all.windows(2).all(|w| w[0].order() <= w[1].order()));
    }

    #[test]
    fn basis_spec_rejects_zero_lambda() {
        assert_eq!(BasisSpec::new(1, 0.0, 3), Err(Error::ZeroLambda));
    }

    #[test]
    fn analyze_ground_state_and_combination() {
        let spec = BasisSpec::new(1, 1.5, 6).unwrap();
        let grid = QuadratureGrid::for_basis(&spec).unwrap();
        let g = |a: usize| move |p: &[f64]| c(eval_phi(&MultiIndex::new(&[a]), 1.5, p).unwrap());
        let f = analyze(&grid.sample(g(0)), &grid, &spec).unwrap();
        for (a, v) in f.iter() {
            let expect = if a.order() == 0 { 1.0 } else { 0.0 };
            assert!((v - c(expect)).norm() < 1e-12);
        }
        let mix = grid.sample(|p| (g(0)(p) + g(2)(p)) / 2f64.sqrt());
        let f = analyze(&mix, &grid, &spec).unwrap();
        assert!((f.get(&MultiIndex::new(&[0])).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((f.get(&MultiIndex::new(&[2])).re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn analyze_rejects_mismatch() {
        let spec = BasisSpec::new(2, 1.0, 4).unwrap();
        let grid = QuadratureGrid::gauss_hermite(1, 10, 1.0).unwrap();
        assert!(matches!(analyze(&[], &grid, &spec), Err(Error::GridMismatch(_))));
        let grid = QuadratureGrid::gauss_hermite(2, 3, 1.0).unwrap();
        let s = vec![Complex64::default(); grid.len()];
        assert!(matches!(analyze(&s, &grid, &spec), Err(Error::GridMismatch(_))));
        let grid = QuadratureGrid::gauss_hermite(2, 10, 2.0).unwrap();
        let s = vec![Complex64::default(); grid.len()];
        assert!(matches!(analyze(&s, &grid, &spec), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn synthesize_basics() {
        let spec = BasisSpec::new(1, 1.0, 2).unwrap();
        let f = SpectralField::from_coeffs(spec, [(MultiIndex::new(&[0]), c(1.0))]).unwrap();
        let v = synthesize(&f, &[vec![0.0]]);
        assert_relative_eq!(v[0].re, 0.751126, epsilon = 1e-6);
        let empty = SpectralField::new(spec);
        assert!(synthesize(&empty, &[vec![0.3], vec![-2.0]]).iter().all(|v| v.norm() == 0.0));

        let spec = BasisSpec::new(2, 0.7, 3).unwrap();
        let a = MultiIndex::new(&[1, 2]);
        let b = MultiIndex::new(&[0, 1]);
        let f =
            SpectralField::from_coeffs(spec, [(a.clone(), Complex64::new(0.3, -1.0)), (b.clone(), c(2.0))]).unwrap();
        let p = vec![0.4, -1.1];
        let direct = Complex64::new(0.3, -1.0) * eval_phi(&a, 0.7, &p).unwrap() + 2.0 * eval_phi(&b, 0.7, &p).unwrap();
        assert!((synthesize(&f, &[p])[0] - direct).norm() < 1e-14);
    }

    #[test]
    fn tensor_synthesis_matches_pointwise() {
        let spec = BasisSpec::new(2, 1.3, 3).unwrap();
        let f = SpectralField::from_coeffs(
            spec,
            MultiIndex::enumerate(2, 3)
                .into_iter()
                .enumerate()
                .map(|(i, a)| (a, Complex64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.05))),
        )
        .unwrap();
        let axes = vec![vec![-1.0, 0.0, 0.5], vec![0.2, 2.0]];
        let t = synthesize_tensor(&f, &axes);
        let pts: Vec<Vec<f64>> = axes[0].iter().flat_map(|&x| axes[1].iter().map(move |&y| vec![x, y])).collect();
        let d = synthesize(&f, &pts);
        for (a, b) in t.iter().zip(&d) {
            assert!((a - b).norm() < 1e-13);
        }
    }

    #[test]
    fn ladder_examples() {
        let spec = BasisSpec::new(1, 1.0, 0).unwrap();
        let f = SpectralField::from_coeffs(spec, [(MultiIndex::new(&[0]), c(1.0))]).unwrap();
        let up = apply_ladder(&f, 0, Ladder::Creation).unwrap();
        assert_eq!(up.spec.max_degree, 1);
        assert_relative_eq!(up.get(&MultiIndex::new(&[1])).re, 2f64.sqrt(), epsilon = 1e-15);
        assert!(apply_ladder(&f, 0, Ladder::Annihilation).unwrap().is_empty());
        assert_eq!(apply_ladder(&f, 1, Ladder::Creation), Err(Error::InvalidAxis { axis: 1, dim: 1 }));

        let spec = BasisSpec::new(2, -0.5, 3).unwrap();
        let a = MultiIndex::new(&[2, 1]);
        let f = SpectralField::from_coeffs(spec, [(a.clone(), c(1.0))]).unwrap();
        for j in 0..2 {
            let g = apply_ladder(&apply_ladder(&f, j, Ladder::Creation).unwrap(), j, Ladder::Annihilation).unwrap();
            let expect = 2.0 * (a.get(j) as f64 + 1.0) * 0.5;
            assert_relative_eq!(g.get(&a).re, expect, epsilon = 1e-14);
            assert_eq!(g.len(), 1);
        }
    }

    #[test]
    fn semigroup_examples() {
        let spec = BasisSpec::new(1, 2.0, 3).unwrap();
        let a = MultiIndex::new(&[3]);
        let f = SpectralField::from_coeffs(spec, [(a.clone(), c(1.0))]).unwrap();
        assert_eq!(apply_semigroup(&f, 0.0).unwrap(), f);
        let g = apply_semigroup(&f, 0.5).unwrap();
        assert_relative_eq!(g.get(&a).re, (-7f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(g.get(&a).re, 9.11882e-4, epsilon = 1e-9);
        let spec = BasisSpec::new(2, 1.0, 0).unwrap();
        let z = MultiIndex::zeros(2);
        let f = SpectralField::from_coeffs(spec, [(z.clone(), c(1.0))]).unwrap();
        assert_relative_eq!(apply_semigroup(&f, 1.0).unwrap().get(&z).re, 0.135335, epsilon = 1e-6);
        assert_eq!(apply_semigroup(&f, -1.0), Err(Error::NegativeTime(-1.0)));
    }
}
