//! Grushin Riesz transforms on `ℝⁿ × ℝ`.
//!
//! A grid function `f(ξ, η)` (ξ axes first, η last) is Fourier transformed
//! in η, `f^λ(ξ) = ∫ f(ξ, η) e^{iλη} dη`, at the half-offset frequencies
//! `λ_k = 2π(k + ½)/L`, `L = KΔη`, so no slice sits at `λ = 0`. The discrete
//! transform is exactly unitary with Parseval weight `1/L`:
//! `Σ_m |f_m|² Δη = (1/L) Σ_k |F_k|²`. Each slice is expanded in `Φ_α^λ`,
//! acted on coefficient-wise, resynthesized and transformed back.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{Axis, Boundary, GridFunction};
use crate::heisenberg::{z_pair, KernelParams, KernelQuadrature};
use crate::hermite::{analyze_box, synthesize_tensor, BasisSpec, QuadratureGrid, SpectralField};
use crate::moments::Proposal;
use crate::riesz::{apply_riesz, apply_truncated_riesz, TruncationWindow};
use crate::rng::stream;

/// `λ_k` in FFT order: `k = 0, …, K/2 − 1, −K/2, …, −1`.
pub fn slice_frequencies(eta: &Axis) -> Result<Vec<f64>> {
    let k = eta.count;
    if !k.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("η axis needs an even number of samples, got {k}")));
    }
    let l = eta.period();
    Ok((0..k)
        .map(|i| {
            let kk = if i < k / 2 { i as f64 } else { i as f64 - k as f64 };
            2.0 * PI * (kk + 0.5) / l
        })
        .collect())
}

/// Largest per-axis Hermite degree the ξ sampling resolves: the wavenumber
/// `√((2k+1)|λ|)` of `Φ_k^λ` plus a Gaussian tail must stay below Nyquist.
/// Turning points may leave the grid; projections only integrate over the
/// support of `f^λ`, and synthesis is pointwise. The coefficient box
/// `(k+1)^n` is kept below `2·10⁵` entries.
pub fn resolvable_degree(xi_axes: &[Axis], lambda_abs: f64) -> Option<usize> {
    const TAIL: f64 = 4.5;
    const MAX_DEGREE: usize = 200;
    let s = lambda_abs.sqrt();
    let budget = (2e5f64).powf(1.0 / xi_axes.len() as f64).floor() as usize - 1;
    let mut cap = MAX_DEGREE.min(budget);
    for a in xi_axes {
        let band = PI / (a.step() * s) - TAIL;
        if band < 1.0 {
            return None;
        }
        // √(2k+1) ≤ band
        cap = cap.min(((band * band - 1.0) / 2.0).floor() as usize);
    }
    Some(cap)
}

/// `f^λ` for every frequency, each as a Hermite expansion.
#[derive(Debug, Clone)]
pub struct SlicedField {
    pub lambdas: Vec<f64>,
    pub slices: Vec<SpectralField>,
    pub xi_axes: Vec<Axis>,
    pub eta_axis: Axis,
    /// `(1/L)`-weighted energy the expansions could not hold.
    pub discarded_energy: f64,
}

impl SlicedField {
    pub fn n(&self) -> usize {
        self.xi_axes.len()
    }

    /// `(1/L) Σ_k ‖f^{λ_k}‖²`
    pub fn energy(&self) -> f64 {
        self.slices.iter().map(|s| s.norm_sqr()).sum::<f64>() / self.eta_axis.period()
    }

    pub fn map<F>(&self, exec: Execution, f: F) -> Result<SlicedField>
    where
        F: Fn(&SpectralField) -> Result<SpectralField> + Sync + Send,
    {
        let slices = exec.map(self.slices.len(), |i| f(&self.slices[i])).into_iter().collect::<Result<Vec<_>>>()?;
        Ok(SlicedField {
            slices,
            lambdas: self.lambdas.clone(),
            xi_axes: self.xi_axes.clone(),
            eta_axis: self.eta_axis,
            discarded_energy: self.discarded_energy,
        })
    }

    pub fn axes(&self) -> Vec<Axis> {
        let mut a = self.xi_axes.clone();
        a.push(self.eta_axis);
        a
    }
}

/// Transform configuration shared by every grid-level operation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grushin {
    pub exec: Execution,
    /// Target discarded-tail fraction of each slice's energy.
    pub tail_tol: f64,
}

impl Default for Grushin {
    fn default() -> Self {
        Grushin { exec: Execution::default(), tail_tol: 1e-10 }
    }
}

struct EtaFft {
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    k: usize,
    lambdas: Vec<f64>,
    /// `e^{iπm/K}` per sample.
    shift: Vec<Complex64>,
    /// `Δ e^{iλ_kη₀}` per frequency.
    origin: Vec<Complex64>,
    /// `e^{-iλ_kη₀} / L` per frequency.
    back: Vec<Complex64>,
}

impl EtaFft {
    fn new(eta: &Axis) -> Result<Self> {
        let lambdas = slice_frequencies(eta)?;
        let mut planner = FftPlanner::new();
        let k = eta.count as f64;
        Ok(EtaFft {
            // rustfft's inverse direction carries e^{+2πikm/K}
            fwd: planner.plan_fft_inverse(eta.count),
            inv: planner.plan_fft_forward(eta.count),
            k: eta.count,
            shift: (0..eta.count).map(|m| Complex64::from_polar(1.0, PI * m as f64 / k)).collect(),
            origin: lambdas.iter().map(|l| Complex64::from_polar(eta.step(), l * eta.min)).collect(),
            back: lambdas.iter().map(|l| Complex64::from_polar(1.0 / eta.period(), -l * eta.min)).collect(),
            lambdas,
        })
    }

    /// `F_k = Δ e^{iλ_kη₀} Σ_m f_m e^{iπm/K} e^{2πikm/K}`, in place on a
    /// block of whole rows.
    fn forward(&self, rows: &mut [Complex64]) {
        for row in rows.chunks_mut(self.k) {
            for (v, s) in row.iter_mut().zip(&self.shift) {
                *v *= s;
            }
        }
        self.fwd.process(rows);
        for row in rows.chunks_mut(self.k) {
            for (v, o) in row.iter_mut().zip(&self.origin) {
                *v *= o;
            }
        }
    }

    /// `f_m = (1/L) e^{-iπm/K} Σ_k F_k e^{-iλ_kη₀} e^{-2πikm/K}`.
    fn inverse(&self, rows: &mut [Complex64]) {
        for row in rows.chunks_mut(self.k) {
            for (v, b) in row.iter_mut().zip(&self.back) {
                *v *= b;
            }
        }
        self.inv.process(rows);
        for row in rows.chunks_mut(self.k) {
            for (v, s) in row.iter_mut().zip(&self.shift) {
                *v *= s.conj();
            }
        }
    }
}

/// Rows per FFT call.
const ROW_BLOCK: usize = 512;

/// η-transform of every ξ row of `f`; layout unchanged, last index is the slice.
fn eta_forward(f: &GridFunction, exec: Execution) -> Result<(EtaFft, Vec<Complex64>)> {
    let eta = *f.axes.last().ok_or_else(|| Error::InvalidParameter("empty grid".into()))?;
    let plan = EtaFft::new(&eta)?;
    let mut data = f.values.clone();
    exec.for_chunks(&mut data, eta.count * ROW_BLOCK, |_, rows| plan.forward(rows));
    Ok((plan, data))
}

fn eta_inverse(plan: &EtaFft, data: &mut [Complex64], exec: Execution) {
    exec.for_chunks(data, plan.k * ROW_BLOCK, |_, rows| plan.inverse(rows));
}

fn transpose(data: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            out[c * rows + r] = data[r * cols + c];
        }
    }
    out
}

impl Grushin {
    pub fn sequential() -> Self {
        Grushin { exec: Execution::Sequential, ..Default::default() }
    }

    fn check(&self, f: &GridFunction) -> Result<usize> {
        if f.dim() < 2 {
            return Err(Error::InvalidParameter("grid needs at least one ξ axis and the η axis".into()));
        }
        Ok(f.dim() - 1)
    }

    /// Slice and expand each `f^λ` in `Φ_α^λ` by trapezoid projection on the
    /// native ξ grid, choosing the degree per slice from the captured energy.
    pub fn slices(&self, f: &GridFunction) -> Result<SlicedField> {
        let n = self.check(f)?;
        let xi_axes = f.axes[..n].to_vec();
        let eta_axis = f.axes[n];
        let (plan, data) = eta_forward(f, self.exec)?;
        let kk = eta_axis.count;
        let xi_len = data.len() / kk;
        let by_slice = transpose(&data, xi_len, kk);
        let quad = QuadratureGrid::uniform(&xi_axes.iter().map(|a| (a.min, a.max, a.count)).collect::<Vec<_>>());
        let point_w: Vec<f64> = GridFunction::zeros(xi_axes.clone()).trapezoid_weights();
        let total: f64 =
            by_slice.chunks(xi_len).map(|s| s.iter().zip(&point_w).map(|(v, w)| w * v.norm_sqr()).sum::<f64>()).sum();
        let floor = 1e-30 * total;
        let tail_tol = self.tail_tol;

        let results = self.exec.map(kk, |k| -> Result<(SpectralField, f64)> {
            let lambda = plan.lambdas[k];
            let samples = &by_slice[k * xi_len..(k + 1) * xi_len];
            let energy: f64 = samples.iter().zip(&point_w).map(|(v, w)| w * v.norm_sqr()).sum();
            let empty = SpectralField::new(BasisSpec::new(n, lambda, 0)?);
            if energy <= floor {
                return Ok((empty, energy));
            }
            let Some(cap) = resolvable_degree(&xi_axes, lambda.abs()) else {
                return Ok((empty, energy));
            };
            let coeffs = analyze_box(samples, &quad, lambda.abs(), cap);
            // captured energy per total degree
            let side = cap + 1;
            let mut by_degree = vec![0.0; n * cap + 1];
            for (idx, c) in coeffs.iter().enumerate() {
                let mut r = idx;
                let mut deg = 0;
                for _ in 0..n {
                    deg += r % side;
                    r /= side;
                }
                by_degree[deg] += c.norm_sqr();
            }
            let mut tails = Vec::with_capacity(cap + 1);
            let mut captured = 0.0;
            for d in by_degree.iter().take(cap + 1) {
                captured += d;
                tails.push((energy - captured).max(0.0));
            }
            let best = tails.iter().cloned().fold(f64::INFINITY, f64::min);
            let goal = (tail_tol * energy).max(1.01 * best);
            let degree = tails.iter().position(|&t| t <= goal).unwrap_or(cap);
            let spec = BasisSpec::new(n, lambda, degree)?;
            let field = SpectralField::from_box(spec, side, &coeffs);
            Ok((field, tails[degree]))
        });
        let mut slices = Vec::with_capacity(kk);
        let mut discarded = 0.0;
        for r in results {
            let (s, lost) = r?;
            slices.push(s);
            discarded += lost;
        }
        Ok(SlicedField {
            lambdas: plan.lambdas.clone(),
            slices,
            xi_axes,
            eta_axis,
            discarded_energy: discarded / eta_axis.period(),
        })
    }

    /// Synthesize every slice on the ξ grid and invert the η transform.
    pub fn assemble(&self, s: &SlicedField) -> Result<GridFunction> {
        let axes = s.axes();
        let plan = EtaFft::new(&s.eta_axis)?;
        let coords: Vec<Vec<f64>> = s.xi_axes.iter().map(|a| a.coords()).collect();
        let xi_len: usize = s.xi_axes.iter().map(|a| a.count).product();
        let kk = s.eta_axis.count;
        let per_slice = self.exec.map(kk, |k| {
            let f = &s.slices[k];
            (!f.is_empty()).then(|| synthesize_tensor(f, &coords))
        });
        let mut data = vec![Complex64::default(); xi_len * kk];
        for (k, vals) in per_slice.iter().enumerate() {
            if let Some(vals) = vals {
                for (row, v) in data.chunks_exact_mut(kk).zip(vals) {
                    row[k] = *v;
                }
            }
        }
        eta_inverse(&plan, &mut data, self.exec);
        GridFunction::new(axes, data)
    }

    pub fn riesz(&self, f: &GridFunction, j: usize, star: bool) -> Result<GridFunction> {
        self.check_axis(f, j)?;
        let s = self.slices(f)?;
        self.assemble(&s.map(self.exec, |g| apply_riesz(g, j, star))?)
    }

    pub fn truncated_riesz(
        &self,
        f: &GridFunction,
        j: usize,
        star: bool,
        window: TruncationWindow,
    ) -> Result<GridFunction> {
        self.check_axis(f, j)?;
        let s = self.slices(f)?;
        self.assemble(&s.map(self.exec, |g| apply_truncated_riesz(g, j, star, window))?)
    }

    /// `|𝓡f| = (Σ_j |R_j f|² + |R_j* f|²)^{1/2}` pointwise.
    pub fn vector_magnitude(&self, f: &GridFunction) -> Result<GridFunction> {
        self.check(f)?;
        let s = self.slices(f)?;
        self.vector_magnitude_sliced(&s, None)
    }

    /// Pointwise vector magnitude of an already sliced field, truncated when
    /// a window is given.
    pub fn vector_magnitude_sliced(&self, s: &SlicedField, window: Option<TruncationWindow>) -> Result<GridFunction> {
        let mut acc: Option<Vec<f64>> = None;
        for star in [false, true] {
            for j in 0..s.n() {
                let g = self.assemble(&s.map(self.exec, |h| match window {
                    Some(w) => apply_truncated_riesz(h, j, star, w),
                    None => apply_riesz(h, j, star),
                })?)?;
                let acc = acc.get_or_insert_with(|| vec![0.0; g.len()]);
                for (a, v) in acc.iter_mut().zip(&g.values) {
                    *a += v.norm_sqr();
                }
            }
        }
        let acc = acc.unwrap_or_default();
        GridFunction::new(s.axes(), acc.into_iter().map(|a| Complex64::new(a.sqrt(), 0.0)).collect())
    }

    fn check_axis(&self, f: &GridFunction, j: usize) -> Result<()> {
        let n = self.check(f)?;
        if j >= n {
            return Err(Error::InvalidAxis { axis: j, dim: n });
        }
        Ok(())
    }

    /// Parts of `f` carried by `λ > 0` and by `λ < 0`.
    pub fn frequency_split(&self, f: &GridFunction) -> Result<(GridFunction, GridFunction)> {
        self.check(f)?;
        let (plan, data) = eta_forward(f, self.exec)?;
        let kk = plan.k;
        let mut pos = data.clone();
        let mut neg = data;
        for (row_p, row_n) in pos.chunks_mut(kk).zip(neg.chunks_mut(kk)) {
            for (i, &l) in plan.lambdas.iter().enumerate() {
                if l > 0.0 {
                    row_n[i] = Complex64::default();
                } else {
                    row_p[i] = Complex64::default();
                }
            }
        }
        eta_inverse(&plan, &mut pos, self.exec);
        eta_inverse(&plan, &mut neg, self.exec);
        Ok((GridFunction::new(f.axes.clone(), pos)?, GridFunction::new(f.axes.clone(), neg)?))
    }

    /// Importance-sampled truncated transform at the points of `at` (axes only).
    ///
    /// With `f = f₊ + f₋` split by the sign of λ and `T_ε^{(z,t)}` the
    /// curve integral along `r ↦ (ξ + ry, η + r x·ξ + r²(t + x·y/2))`,
    ///
    /// ```text
    /// R_j^ε  f = π^{-1/2} ∫ ( T_ε f₊ · (−Z̃*_j p₁) + T_ε f₋ · Z̃_j p₁ ) dz dt
    /// R_j^*ε f = π^{-1/2} ∫ ( T_ε f₊ · (−Z̃_j p₁)  + T_ε f₋ · Z̃*_j p₁ ) dz dt
    /// ```
    ///
    /// `(z, t)` comes from the kernel-moment proposal and `r` is drawn
    /// log-uniformly on `[ε, 1/ε]`, paired with `−r`.
    pub fn riesz_mc(
        &self,
        f: &GridFunction,
        j: usize,
        star: bool,
        epsilon: f64,
        samples: usize,
        seed: u64,
        at: &[Axis],
    ) -> Result<McEstimate> {
        self.check_axis(f, j)?;
        let n = f.dim() - 1;
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidEpsilon(epsilon));
        }
        if at.len() != f.dim() {
            return Err(Error::DimensionMismatch { expected: f.dim(), got: at.len() });
        }
        if samples == 0 {
            return Err(Error::InvalidParameter("samples must be positive".into()));
        }
        let out_grid = GridFunction::zeros(at.to_vec());
        let points: Vec<Vec<f64>> = (0..out_grid.len()).map(|i| out_grid.point(i)).collect();
        let np = points.len();
        let (fp, fm) = self.frequency_split(f)?;
        let real_input = f.max_imag() == 0.0;
        let mut boundary = vec![Boundary::Zero; n];
        boundary.push(Boundary::Antiperiodic);

        let quad = KernelQuadrature::new(KernelParams::new(n, 1.0)?);
        let proposal = Proposal::new(n);
        let log_span = -epsilon.ln();
        let batches = samples.div_ceil(MC_BATCH);

        let partial = self.exec.map(batches, |b| {
            let mut rng = stream(seed, b as u64);
            let count = MC_BATCH.min(samples - b * MC_BATCH);
            let mut sum = vec![Complex64::default(); np];
            let mut sq = vec![0.0; np];
            let mut z = vec![0.0; 2 * n];
            let mut q = vec![0.0; n + 1];
            for _ in 0..count {
                let Some(draw) = proposal.draw(&mut rng, &mut z) else {
                    continue;
                };
                let u: f64 = rand::Rng::gen_range(&mut rng, -1.0..=1.0);
                let r = (u * log_span).exp();
                let Some(fields) = quad.fields(draw.z2, draw.t) else {
                    continue;
                };
                let (zj, zsj) = z_pair(&fields, z[2 * j], z[2 * j + 1]);
                let (kp, km) = if star { (-zj, zsj) } else { (-zsj, zj) };
                let c = 2.0 * log_span / (PI.sqrt() * draw.density);
                let xy: f64 = (0..n).map(|d| z[2 * d] * z[2 * d + 1]).sum();
                for (i, p) in points.iter().enumerate() {
                    let mut diff = [Complex64::default(); 2];
                    for (sgn, rr) in [(1.0, r), (-1.0, -r)] {
                        let mut xdot = 0.0;
                        for d in 0..n {
                            q[d] = p[d] + rr * z[2 * d + 1];
                            xdot += z[2 * d] * p[d];
                        }
                        q[n] = p[n] + rr * xdot + rr * rr * (draw.t + 0.5 * xy);
                        let vp = fp.interpolate(&q, &boundary);
                        let vm = if real_input { vp.conj() } else { fm.interpolate(&q, &boundary) };
                        diff[0] += vp * sgn;
                        diff[1] += vm * sgn;
                    }
                    let x = (kp * diff[0] + km * diff[1]) * c;
                    sum[i] += x;
                    sq[i] += x.norm_sqr();
                }
            }
            (sum, sq)
        });

        let mut sum = vec![Complex64::default(); np];
        let mut sq = vec![0.0; np];
        for (s, q) in &partial {
            for i in 0..np {
                sum[i] += s[i];
                sq[i] += q[i];
            }
        }
        let m = samples as f64;
        let est: Vec<Complex64> = sum.iter().map(|s| s / m).collect();
        let err: Vec<Complex64> = est
            .iter()
            .zip(&sq)
            .map(|(e, q)| {
                let var = ((q / m - e.norm_sqr()) * m / (m - 1.0).max(1.0)).max(0.0);
                Complex64::new((var / m).sqrt(), 0.0)
            })
            .collect();
        if sq.iter().all(|&q| q == 0.0) && epsilon < 1.0 {
            return Err(Error::DegenerateProposal);
        }
        Ok(McEstimate {
            estimate: GridFunction::new(at.to_vec(), est)?,
            stderr: GridFunction::new(at.to_vec(), err)?,
            samples,
        })
    }
}

const MC_BATCH: usize = 2048;

/// Monte-Carlo transform values with per-point standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub estimate: GridFunction,
    pub stderr: GridFunction,
    pub samples: usize,
}

pub fn eta_fourier_slices(f: &GridFunction) -> Result<SlicedField> {
    Grushin::default().slices(f)
}

pub fn inverse_slices(s: &SlicedField) -> Result<GridFunction> {
    Grushin::default().assemble(s)
}

pub fn apply_grushin_riesz(f: &GridFunction, j: usize, star: bool) -> Result<GridFunction> {
    Grushin::default().riesz(f, j, star)
}

pub fn apply_grushin_truncated_riesz(
    f: &GridFunction,
    j: usize,
    star: bool,
    window: TruncationWindow,
) -> Result<GridFunction> {
    Grushin::default().truncated_riesz(f, j, star, window)
}

pub fn vector_riesz_magnitude(f: &GridFunction) -> Result<GridFunction> {
    Grushin::default().vector_magnitude(f)
}

#[allow(clippy::too_many_arguments)]
pub fn apply_grushin_riesz_mc(
    f: &GridFunction,
    j: usize,
    star: bool,
    epsilon: f64,
    samples: usize,
    seed: u64,
    at: &[Axis],
) -> Result<McEstimate> {
    Grushin::default().riesz_mc(f, j, star, epsilon, samples, seed, at)
}
