//! Empirical `L^p → L^p` lower bounds for the Grushin transforms across
//! dimension.
//!
//! Every estimate is a maximum of `‖op f‖_p / ‖f‖_p` over random test
//! functions, so it is a lower bound for the operator norm on the discretized
//! space and never a norm. Trial `i` in dimension `n` is generated from
//! `mix(mix(seed, n), i)`, so a sweep with more trials extends, and never
//! reshuffles, the trials of a smaller one.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{axes_hash, Axis, GridFunction};
use crate::grushin::{slice_frequencies, Grushin, SlicedField};
use crate::hermite::{BasisSpec, MultiIndex, SpectralField};
use crate::riesz::{apply_riesz, apply_truncated_riesz, TruncationWindow};
use crate::rng::{mix, stream};

/// Slices of the Gaussian–Hermite family live at `0 < λ ≤ LAMBDA_CAP`.
const LAMBDA_CAP: f64 = 1.5;
/// Total Hermite degree of the random slices.
const FIELD_DEGREE: usize = 2;
const BUMPS: usize = 3;

/// Grid geometry shared by all dimensions; the ξ resolution follows from
/// the point budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Target total number of grid points per field.
    pub budget: usize,
    /// ξ axes cover `[-xi_half, xi_half]`.
    pub xi_half: f64,
    pub eta_count: usize,
    pub eta_step: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec { budget: 1 << 20, xi_half: 7.5, eta_count: 8, eta_step: 0.5 }
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        if self.eta_count < 2 || !self.eta_count.is_multiple_of(2) {
            return Err(Error::InvalidParameter("eta_count must be even and ≥ 2".into()));
        }
        if !(self.xi_half > 0.0 && self.eta_step > 0.0) {
            return Err(Error::InvalidParameter("grid extents must be positive".into()));
        }
        if self.budget < 9 * self.eta_count {
            return Err(Error::InvalidParameter(format!("grid budget {} is too small", self.budget)));
        }
        Ok(())
    }

    /// Per-axis ξ sample count for dimension `n`: odd, in `[9, 129]`.
    pub fn xi_count(&self, n: usize) -> usize {
        let per = (self.budget as f64 / self.eta_count as f64).powf(1.0 / n as f64);
        let c = (per.floor() as usize).clamp(9, 129);
        if c.is_multiple_of(2) {
            c - 1
        } else {
            c
        }
    }

    pub fn axes(&self, n: usize) -> Result<Vec<Axis>> {
        self.validate()?;
        if n == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let m = self.xi_count(n);
        let mut axes = vec![Axis::new(-self.xi_half, self.xi_half, m)?; n];
        axes.push(Axis::centered(self.eta_count, self.eta_step)?);
        Ok(axes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Random low-degree Hermite coefficients on a few slices, weighted by a
    /// Gaussian in λ; band-limited by construction.
    GaussianHermite,
    /// Random anisotropic smooth bumps with compact support.
    BumpMix,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian-hermite" => Ok(Family::GaussianHermite),
            "bump-mix" => Ok(Family::BumpMix),
            _ => Err(Error::InvalidParameter(format!("unknown family `{s}`"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::GaussianHermite => "gaussian-hermite",
            Family::BumpMix => "bump-mix",
        })
    }
}

/// Operator whose norm is probed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepOp {
    Identity,
    /// Pointwise magnitude of all `2n` components.
    Vector,
    Riesz {
        j: usize,
        star: bool,
    },
}

impl FromStr for SweepOp {
    type Err = Error;
    /// `identity`, `vector`, `riesz:J` or `riesz-star:J`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("unknown operator `{s}`"));
        match s {
            "identity" => Ok(SweepOp::Identity),
            "vector" => Ok(SweepOp::Vector),
            _ => {
                let (name, j) = s.split_once(':').ok_or_else(bad)?;
                let j = j.parse().map_err(|_| bad())?;
                match name {
                    "riesz" => Ok(SweepOp::Riesz { j, star: false }),
                    "riesz-star" => Ok(SweepOp::Riesz { j, star: true }),
                    _ => Err(bad()),
                }
            }
        }
    }
}

impl fmt::Display for SweepOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SweepOp::Identity => f.write_str("identity"),
            SweepOp::Vector => f.write_str("vector"),
            SweepOp::Riesz { j, star: false } => write!(f, "riesz:{j}"),
            SweepOp::Riesz { j, star: true } => write!(f, "riesz-star:{j}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub dims: Vec<usize>,
    pub exponents: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub grid: GridSpec,
    pub epsilon: Option<f64>,
    pub op: SweepOp,
    pub family: Family,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            dims: vec![1, 2, 3, 4],
            exponents: vec![2.0, 4.0],
            trials: 20,
            seed: 0,
            grid: GridSpec::default(),
            epsilon: None,
            op: SweepOp::Vector,
            family: Family::GaussianHermite,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be ≥ 1".into()));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&n| n == 0 || n > 4) {
            return Err(Error::InvalidParameter("dims must be a non-empty list in 1..=4".into()));
        }
        if self.exponents.is_empty() || self.exponents.iter().any(|&p| !(p > 1.0)) {
            return Err(Error::InvalidParameter("exponents must be a non-empty list of p > 1".into()));
        }
        if let Some(e) = self.epsilon {
            TruncationWindow::new(e)?;
        }
        self.grid.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: usize,
    pub p: f64,
    pub epsilon: Option<f64>,
    /// `max_i ‖op f_i‖_p / ‖f_i‖_p`
    pub estimate: f64,
    /// Standard error of the mean trial ratio.
    pub stderr: f64,
    pub seed: u64,
    /// Trial realizing `estimate`.
    pub trial_id: usize,
    pub grid_hash: String,
    /// Trials dropped because the field vanished on the grid.
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellFailure {
    pub n: usize,
    pub p: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub failures: Vec<CellFailure>,
}

/// Seed of trial `trial` in dimension `n`.
pub fn trial_seed(seed: u64, n: usize, trial: usize) -> u64 {
    mix(mix(seed, n as u64), trial as u64)
}

/// Quadrature weights for [`sweep_lp_norm`]: trapezoid in ξ, periodic
/// rectangle rule in η.
///
/// Test fields are antiperiodic in η over the grid period, so `|f|^p` is
/// periodic and the rectangle rule is the trapezoid rule of its periodic
/// extension; for `p = 2` it matches the slice Parseval identity exactly.
pub fn sweep_weights(axes: &[Axis]) -> Vec<f64> {
    let n = axes.len() - 1;
    let mut w = vec![axes[n].step(); axes[n].count];
    for a in axes[..n].iter().rev() {
        let aw = a.weights();
        w = aw.iter().flat_map(|x| w.iter().map(move |y| x * y)).collect();
    }
    w
}

/// `(Σ w |f|^p)^{1/p}` with the weights of [`sweep_weights`].
pub fn sweep_lp_norm(f: &GridFunction, p: f64) -> f64 {
    weighted_lp_norm(f, &sweep_weights(&f.axes), p)
}

fn weighted_lp_norm(f: &GridFunction, w: &[f64], p: f64) -> f64 {
    let half = 0.5 * p;
    let s: f64 = if p == 2.0 {
        f.values.iter().zip(w).map(|(v, w)| w * v.norm_sqr()).sum()
    } else if p == 4.0 {
        f.values.iter().zip(w).map(|(v, w)| w * v.norm_sqr().powi(2)).sum()
    } else {
        f.values.iter().zip(w).map(|(v, w)| w * v.norm_sqr().powf(half)).sum()
    };
    s.powf(1.0 / p)
}

/// A random test field together with its spectral slices when it was built
/// spectrally.
#[derive(Debug, Clone)]
pub struct TestField {
    pub grid: GridFunction,
    pub slices: Option<SlicedField>,
}

fn gaussian_hermite(axes: Vec<Axis>, seed: u64, exec: Execution) -> Result<TestField> {
    let n = axes.len() - 1;
    let eta = axes[n];
    let lambdas = slice_frequencies(&eta)?;
    let mut rng = stream(seed, 0);
    let mut slices: Vec<SpectralField> =
        lambdas.iter().map(|&l| BasisSpec::new(n, l, 0).map(SpectralField::new)).collect::<Result<_>>()?;
    let k = lambdas.len();
    let indices = MultiIndex::enumerate(n, FIELD_DEGREE);
    for i in 0..k / 2 {
        let l = lambdas[i];
        if l > LAMBDA_CAP {
            break;
        }
        let spec = BasisSpec::new(n, l, FIELD_DEGREE)?;
        let profile = (-0.25 * l * l).exp();
        let coeffs: Vec<(MultiIndex, Complex64)> = indices
            .iter()
            .map(|a| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                (a.clone(), Complex64::new(re, im) * (profile / 2f64.sqrt()))
            })
            .collect();
        let pos = SpectralField::from_coeffs(spec, coeffs)?;
        // real field: f^{-λ} = conj f^{λ}
        let mut neg = pos.conj();
        neg.spec = BasisSpec::new(n, -l, FIELD_DEGREE)?;
        slices[k - 1 - i] = neg;
        slices[i] = pos;
    }
    let mut sliced = SlicedField { lambdas, slices, xi_axes: axes[..n].to_vec(), eta_axis: eta, discarded_energy: 0.0 };
    let energy = sliced.energy();
    if energy > 0.0 {
        let s = Complex64::new(energy.sqrt().recip(), 0.0);
        sliced = sliced.map(Execution::Sequential, |g| Ok(g.scale(s)))?;
    }
    let grid = Grushin { exec, ..Default::default() }.assemble(&sliced)?;
    Ok(TestField { grid, slices: Some(sliced) })
}

fn bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

fn bump_mix(axes: Vec<Axis>, seed: u64) -> Result<TestField> {
    let d = axes.len();
    let mut rng = stream(seed, 1);
    let eta_half = 0.25 * axes[d - 1].period();
    let bumps: Vec<(Vec<f64>, Vec<f64>, f64)> = (0..BUMPS)
        .map(|_| {
            let mut centre = Vec::with_capacity(d);
            let mut width = Vec::with_capacity(d);
            for k in 0..d {
                let reach = if k + 1 == d { eta_half.min(1.0) } else { 2.0 };
                centre.push(rng.gen_range(-reach..reach));
                width.push(rng.gen_range(1.0..2.0));
            }
            (centre, width, rng.sample(StandardNormal))
        })
        .collect();
    let mut grid = GridFunction::from_fn(axes, |p| {
        let v: f64 = bumps
            .iter()
            .map(|(c, w, a)| a * p.iter().zip(c).zip(w).map(|((x, c), w)| bump((x - c) / w)).product::<f64>())
            .sum();
        Complex64::new(v, 0.0)
    });
    let norm = sweep_lp_norm(&grid, 2.0);
    if norm > 0.0 {
        grid = grid.scale(1.0 / norm);
    }
    Ok(TestField { grid, slices: None })
}

/// Reproducible random field on the default grid of dimension `n`.
pub fn random_test_function(n: usize, seed: u64, family: Family) -> Result<GridFunction> {
    Ok(random_field(&GridSpec::default(), n, seed, family, Execution::default())?.grid)
}

pub fn random_field(grid: &GridSpec, n: usize, seed: u64, family: Family, exec: Execution) -> Result<TestField> {
    let axes = grid.axes(n)?;
    match family {
        Family::GaussianHermite => gaussian_hermite(axes, seed, exec),
        Family::BumpMix => bump_mix(axes, seed),
    }
}

/// `op f` on the grid of `f`.
pub fn apply_op(field: &TestField, op: SweepOp, epsilon: Option<f64>, exec: Execution) -> Result<GridFunction> {
    let g = Grushin { exec, ..Default::default() };
    if op == SweepOp::Identity {
        return Ok(field.grid.clone());
    }
    let sliced = match &field.slices {
        Some(s) => s.clone(),
        None => g.slices(&field.grid)?,
    };
    let window = epsilon.map(TruncationWindow::new).transpose()?;
    match op {
        SweepOp::Identity => unreachable!(),
        SweepOp::Vector => g.vector_magnitude_sliced(&sliced, window),
        SweepOp::Riesz { j, star } => {
            if j >= sliced.n() {
                return Err(Error::InvalidAxis { axis: j, dim: sliced.n() });
            }
            g.assemble(&sliced.map(exec, |h| match window {
                Some(w) => apply_truncated_riesz(h, j, star, w),
                None => apply_riesz(h, j, star),
            })?)
        }
    }
}

/// `‖op f‖_p / ‖f‖_p` for each exponent, `None` when `f` vanishes on the grid.
fn trial_ratios(
    grid: &GridSpec,
    n: usize,
    seed: u64,
    family: Family,
    op: SweepOp,
    epsilon: Option<f64>,
    exponents: &[f64],
    exec: Execution,
) -> Result<Option<Vec<f64>>> {
    let field = random_field(grid, n, seed, family, exec)?;
    let w = sweep_weights(&field.grid.axes);
    let norms: Vec<f64> = exponents.iter().map(|&p| weighted_lp_norm(&field.grid, &w, p)).collect();
    if norms.iter().any(|&v| !(v > 0.0)) {
        return Ok(None);
    }
    let out = apply_op(&field, op, epsilon, exec)?;
    Ok(Some(
        exponents
            .iter()
            .zip(&norms)
            .map(|(&p, &d)| if op == SweepOp::Identity { 1.0 } else { weighted_lp_norm(&out, &w, p) / d })
            .collect(),
    ))
}

/// Ratio of one stored trial, for re-checking a record.
pub fn trial_ratio(config: &SweepConfig, n: usize, p: f64, trial: usize) -> Result<f64> {
    config.validate()?;
    let seed = trial_seed(config.seed, n, trial);
    trial_ratios(&config.grid, n, seed, config.family, config.op, config.epsilon, &[p], Execution::default())?
        .map(|r| r[0])
        .ok_or_else(|| Error::InvalidParameter("trial field vanishes on the grid".into()))
}

fn summarize(
    n: usize,
    p_index: usize,
    p: f64,
    config: &SweepConfig,
    ratios: &[Option<Vec<f64>>],
) -> Result<SweepRecord> {
    let mut best = (f64::NEG_INFINITY, 0usize);
    let mut vals = Vec::with_capacity(ratios.len());
    for (i, r) in ratios.iter().enumerate() {
        if let Some(r) = r {
            let v = r[p_index];
            if v > best.0 {
                best = (v, i);
            }
            vals.push(v);
        }
    }
    if vals.is_empty() {
        return Err(Error::DegenerateProposal);
    }
    let m = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / m;
    let var = if vals.len() > 1 { vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0) } else { 0.0 };
    Ok(SweepRecord {
        n,
        p,
        epsilon: config.epsilon,
        estimate: best.0,
        stderr: (var / m).sqrt(),
        seed: config.seed,
        trial_id: best.1,
        grid_hash: axes_hash(&config.grid.axes(n)?),
        skipped: ratios.len() - vals.len(),
    })
}

/// Full factorial sweep over `dims × exponents`, records ordered by `(n, p)`.
/// A failing cell is recorded and the sweep moves on.
pub fn dimension_sweep(config: &SweepConfig) -> Result<SweepOutcome> {
    dimension_sweep_with(config, Execution::default())
}

pub fn dimension_sweep_with(config: &SweepConfig, exec: Execution) -> Result<SweepOutcome> {
    config.validate()?;
    let mut out = SweepOutcome::default();
    for &n in &config.dims {
        // trials run in order; parallelism lives inside each transform
        let ratios: Result<Vec<Option<Vec<f64>>>> = (0..config.trials)
            .map(|i| {
                trial_ratios(
                    &config.grid,
                    n,
                    trial_seed(config.seed, n, i),
                    config.family,
                    config.op,
                    config.epsilon,
                    &config.exponents,
                    exec,
                )
            })
            .collect();
        for (pi, &p) in config.exponents.iter().enumerate() {
            match ratios.as_ref().map_err(Clone::clone).and_then(|r| summarize(n, pi, p, config, r)) {
                Ok(rec) => out.records.push(rec),
                Err(e) => out.failures.push(CellFailure { n, p, message: e.to_string() }),
            }
        }
    }
    Ok(out)
}

/// Lower bound for the `L^p` norm of `op` in dimension `n` on the default grid.
pub fn estimate_norm_lower_bound(op: SweepOp, n: usize, p: f64, trials: usize, seed: u64) -> Result<SweepRecord> {
    let config = SweepConfig { dims: vec![n], exponents: vec![p], trials, seed, op, ..Default::default() };
    let mut out = dimension_sweep(&config)?;
    match out.records.pop() {
        Some(r) => Ok(r),
        None => Err(Error::InvalidParameter(out.failures.pop().map(|f| f.message).unwrap_or_default())),
    }
}
