//! Hermite–Riesz transforms `R_j(λ) = A_j(λ)H(λ)^{-1/2}`, their adjoints and
//! the truncated semigroup versions, all acting on coefficients.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermite::{MultiIndex, SpectralField};

/// `ν = (2|α| + n)|λ|`, always positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Eigenvalue(f64);

impl Eigenvalue {
    pub fn new(nu: f64) -> Result<Self> {
        if nu > 0.0 && nu.is_finite() {
            Ok(Eigenvalue(nu))
        } else {
            Err(Error::InvalidParameter(format!("eigenvalue must be positive, got {nu}")))
        }
    }

    pub fn of(alpha: &MultiIndex, lambda: f64) -> Result<Self> {
        if lambda == 0.0 {
            return Err(Error::ZeroLambda);
        }
        Self::new((2 * alpha.order() + alpha.dim()) as f64 * lambda.abs())
    }

    pub fn nu(self) -> f64 {
        self.0
    }
}

/// Semigroup time window `(ε², 1/ε²)`; empty at `ε = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationWindow {
    epsilon: f64,
}

impl TruncationWindow {
    pub fn new(epsilon: f64) -> Result<Self> {
        if epsilon > 0.0 && epsilon <= 1.0 {
            Ok(TruncationWindow { epsilon })
        } else {
            Err(Error::InvalidEpsilon(epsilon))
        }
    }

    pub fn epsilon(self) -> f64 {
        self.epsilon
    }
}

/// Multiplier of `R_j` (`star = false`, target `α + e_j`) or `R_j*`
/// (`star = true`, target `α − e_j`, zero when `α_j = 0`).
pub fn riesz_multiplier(alpha: &MultiIndex, j: usize, n: usize, star: bool) -> f64 {
    let aj = alpha.get(j) as f64;
    let denom = (2 * alpha.order() + n) as f64;
    if star {
        (2.0 * aj / denom).sqrt()
    } else {
        ((2.0 * aj + 2.0) / denom).sqrt()
    }
}

/// `(1/√π) ∫_{ε²ν}^{ν/ε²} e^{-u} u^{-1/2} du = erf(√ν/ε) − erf(ε√ν)`.
///
/// Once the lower argument leaves the origin the difference is taken between
/// complementary error functions, which keeps full relative accuracy when
/// both terms sit near 1.
pub fn truncated_factor(nu: Eigenvalue, window: TruncationWindow) -> f64 {
    let s = nu.0.sqrt();
    let eps = window.epsilon;
    if eps == 1.0 {
        return 0.0;
    }
    let (lo, hi) = (eps * s, s / eps);
    let v = if lo > 0.5 { libm::erfc(lo) - libm::erfc(hi) } else { libm::erf(hi) - libm::erf(lo) };
    v.clamp(0.0, 1.0)
}

/// `1 − truncated_factor = erf(ε√ν) + erfc(√ν/ε)`, evaluated without cancellation.
pub fn truncation_deficit(nu: Eigenvalue, window: TruncationWindow) -> f64 {
    let s = nu.0.sqrt();
    let eps = window.epsilon;
    if eps == 1.0 {
        return 1.0;
    }
    (libm::erf(eps * s) + libm::erfc(s / eps)).clamp(0.0, 1.0)
}

fn check_axis(field: &SpectralField, j: usize) -> Result<()> {
    let n = field.spec.n;
    if j >= n {
        Err(Error::InvalidAxis { axis: j, dim: n })
    } else {
        Ok(())
    }
}

fn transport(
    field: &SpectralField,
    j: usize,
    star: bool,
    weight: impl Fn(&MultiIndex) -> f64,
) -> Result<SpectralField> {
    check_axis(field, j)?;
    let n = field.spec.n;
    let spec = if star { field.spec } else { field.spec.with_degree(field.spec.max_degree + 1) };
    let mut out = SpectralField::new(spec);
    for (a, c) in field.iter() {
        let target = if star { a.lower(j) } else { Some(a.shift(j)) };
        if let Some(t) = target {
            let m = riesz_multiplier(a, j, n, star) * weight(a);
            if m != 0.0 {
                out.insert_raw(t, c * m);
            }
        }
    }
    Ok(out)
}

pub fn apply_riesz(field: &SpectralField, j: usize, star: bool) -> Result<SpectralField> {
    transport(field, j, star, |_| 1.0)
}

pub fn apply_truncated_riesz(
    field: &SpectralField,
    j: usize,
    star: bool,
    window: TruncationWindow,
) -> Result<SpectralField> {
    let lambda = field.spec.lambda;
    transport(field, j, star, |a| Eigenvalue::of(a, lambda).map(|nu| truncated_factor(nu, window)).unwrap_or(0.0))
}

/// `‖R_j^ε f − R_j f‖₂`, from the coefficient-wise deficit
/// `|c_α| m_α (erf(ε√ν) + erfc(√ν/ε))`.
pub fn truncation_error(field: &SpectralField, j: usize, star: bool, window: TruncationWindow) -> Result<f64> {
    check_axis(field, j)?;
    let n = field.spec.n;
    let lambda = field.spec.lambda;
    let mut acc = 0.0;
    for (a, c) in field.iter() {
        let m = riesz_multiplier(a, j, n, star);
        if m == 0.0 {
            continue;
        }
        let d = truncation_deficit(Eigenvalue::of(a, lambda)?, window);
        acc += c.norm_sqr() * (m * d).powi(2);
    }
    Ok(acc.sqrt())
}

/// All `2n` components `R_1 f, …, R_n f, R_1* f, …, R_n* f`.
pub fn vector_riesz(field: &SpectralField) -> Vec<SpectralField> {
    let n = field.spec.n;
    let mut out = Vec::with_capacity(2 * n);
    for star in [false, true] {
        for j in 0..n {
            out.push(transport(field, j, star, |_| 1.0).expect("axis in range"));
        }
    }
    out
}

/// `(1/√π)∫_{ε²}^{1/ε²} e^{-rν} r^{-1/2} dr · √ν` by composite Gauss–Legendre
/// in `w = √r`. Independent of the error-function route; used to cross-check it.
pub fn truncated_factor_by_quadrature(nu: f64, epsilon: f64) -> f64 {
    let lo = epsilon;
    // e^{-νw²} is below 1e-300 past this point
    let hi = (1.0 / epsilon).min((700.0 / nu).sqrt()).max(lo);
    if hi <= lo {
        return 0.0;
    }
    let panels = 400;
    let (x, w) = crate::quadrature::composite_legendre(lo, hi, panels, 16);
    let s: f64 = x.iter().zip(&w).map(|(x, w)| w * (-nu * x * x).exp()).sum();
    2.0 * s * (nu / std::f64::consts::PI).sqrt()
}

/// Complex zero helper for callers that need an explicit empty component.
pub fn zero_like(field: &SpectralField) -> SpectralField {
    field.map_coeffs(|_, _| Complex64::default())
}
