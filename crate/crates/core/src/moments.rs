//! Moments `∫ |x₁|^p |D p₁| dz dt` of the heat-kernel derivative densities,
//! by importance sampling.
//!
//! Proposal: every real coordinate of `z` is `N(0, 2.5)`, and given `z` the
//! time coordinate is Cauchy with scale `1 + |z|²`. Samples are drawn in
//! fixed-size batches, batch `b` from stream `(seed, b)`, so estimates do not
//! depend on the thread count.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::heisenberg::{KernelParams, KernelQuadrature};
use crate::rng::stream;

const Z_VARIANCE: f64 = 2.5;
const BATCH: usize = 1024;
/// Beyond this `|t|` every density is below `e^{-150}` and is taken as zero.
pub const T_CUTOFF: f64 = 60.0;

/// One draw `(z, t)` from the proposal; `z` is written as `(x₁, y₁, …, x_n, y_n)`.
pub(crate) struct Draw {
    pub t: f64,
    pub z2: f64,
    pub density: f64,
}

pub(crate) struct Proposal {
    sd: f64,
    log_norm_z: f64,
}

impl Proposal {
    pub fn new(n: usize) -> Self {
        Proposal { sd: Z_VARIANCE.sqrt(), log_norm_z: -(n as f64) * (2.0 * PI * Z_VARIANCE).ln() }
    }

    /// `None` when the time coordinate lands past [`T_CUTOFF`].
    pub fn draw<R: Rng>(&self, rng: &mut R, z: &mut [f64]) -> Option<Draw> {
        for v in z.iter_mut() {
            *v = self.sd * rng.sample::<f64, _>(StandardNormal);
        }
        let z2: f64 = z.iter().map(|v| v * v).sum();
        let gamma = 1.0 + z2;
        let u: f64 = rng.gen();
        let t = gamma * (PI * (u - 0.5)).tan();
        if t.abs() > T_CUTOFF {
            return None;
        }
        let log_q = self.log_norm_z - z2 / (2.0 * Z_VARIANCE);
        let density = log_q.exp() * gamma / (PI * (gamma * gamma + t * t));
        Some(Draw { t, z2, density })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentKind {
    /// `(1/r) ∂p₁/∂r`
    Radial,
    /// `∂p₁/∂t`
    Time,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: usize,
    /// Kish effective sample size of the importance weights.
    pub ess: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    sum: f64,
    sum_sq: f64,
}

impl Acc {
    fn push(&mut self, w: f64) {
        self.sum += w;
        self.sum_sq += w * w;
    }

    fn merge(&mut self, o: &Acc) {
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    fn finish(&self, samples: usize) -> Result<MomentEstimate> {
        if self.sum == 0.0 {
            return Err(Error::DegenerateProposal);
        }
        let s = samples as f64;
        let mean = self.sum / s;
        let var = ((self.sum_sq / s - mean * mean) * s / (s - 1.0).max(1.0)).max(0.0);
        Ok(MomentEstimate { estimate: mean, stderr: (var / s).sqrt(), samples, ess: self.sum * self.sum / self.sum_sq })
    }
}

/// Radial and time moments for every exponent in `p_exps`, sharing one sample set.
pub fn kernel_moments(
    p_exps: &[f64],
    n: usize,
    samples: usize,
    seed: u64,
    exec: Execution,
) -> Result<Vec<(MomentEstimate, MomentEstimate)>> {
    if samples == 0 {
        return Err(Error::InvalidParameter("samples must be positive".into()));
    }
    if let Some(p) = p_exps.iter().find(|p| !(**p >= 0.0)) {
        return Err(Error::InvalidParameter(format!("moment exponent must be ≥ 0, got {p}")));
    }
    let quad = KernelQuadrature::new(KernelParams::new(n, 1.0)?);
    let proposal = Proposal::new(n);
    let batches = samples.div_ceil(BATCH);
    let k = p_exps.len();

    let partial = exec.map(batches, |b| {
        let mut rng = stream(seed, b as u64);
        let count = BATCH.min(samples - b * BATCH);
        let mut acc = vec![(Acc::default(), Acc::default()); k];
        let mut z = vec![0.0; 2 * n];
        for _ in 0..count {
            let Some(draw) = proposal.draw(&mut rng, &mut z) else {
                for a in acc.iter_mut() {
                    a.0.push(0.0);
                    a.1.push(0.0);
                }
                continue;
            };
            let f = quad.fields(draw.z2, draw.t).unwrap_or_default();
            let x1 = z[0].abs();
            for (a, &p) in acc.iter_mut().zip(p_exps) {
                let xp = if p == 0.0 { 1.0 } else { x1.powf(p) };
                a.0.push(xp * f.radial.abs() / draw.density);
                a.1.push(xp * f.dt.abs() / draw.density);
            }
        }
        acc
    });

    let mut total = vec![(Acc::default(), Acc::default()); k];
    for part in &partial {
        for (t, p) in total.iter_mut().zip(part) {
            t.0.merge(&p.0);
            t.1.merge(&p.1);
        }
    }
    total.iter().map(|(r, t)| Ok((r.finish(samples)?, t.finish(samples)?))).collect()
}

/// One moment `∫ |x₁|^p |D p₁| dz dt` with its standard error.
pub fn kernel_moment(p_exp: f64, n: usize, which: MomentKind, samples: usize, seed: u64) -> Result<MomentEstimate> {
    let (r, t) = kernel_moments(&[p_exp], n, samples, seed, Execution::default())?[0];
    Ok(match which {
        MomentKind::Radial => r,
        MomentKind::Time => t,
    })
}
