//! Complex samples on uniform tensor grids.
//!
//! On-disk layout (all little-endian):
//!
//! ```text
//! magic  b"GRDF"   version u32 = 1   ndim u32
//! ndim × { min f64, max f64, count u64 }
//! Π count × { re f64, im f64 }      row-major, last axis fastest
//! ```

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"GRDF";
const VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(min: f64, max: f64, count: usize) -> Result<Self> {
        if count < 2 || !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "axis needs count ≥ 2 and min < max, got ({min}, {max}, {count})"
            )));
        }
        Ok(Axis { min, max, count })
    }

    /// `count` points with spacing `h` centred on zero.
    pub fn centered(count: usize, h: f64) -> Result<Self> {
        let half = 0.5 * h * (count as f64 - 1.0);
        Self::new(-half, half, count)
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.count - 1) as f64
    }

    pub fn coord(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.coord(i)).collect()
    }

    /// Trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.count).map(|i| if i == 0 || i + 1 == self.count { 0.5 * h } else { h }).collect()
    }

    /// Period `count · h` of the periodic extension.
    pub fn period(&self) -> f64 {
        self.count as f64 * self.step()
    }
}

/// How reads past the last sample behave.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    Zero,
    /// `f(x + L) = −f(x)` with `L` the axis period.
    Antiperiodic,
}

/// Keys cubic convolution weights (`a = −½`) for offset `s ∈ [0, 1)`.
fn cubic_weights(s: f64) -> [f64; 4] {
    let s2 = s * s;
    let s3 = s2 * s;
    [-0.5 * s3 + s2 - 0.5 * s, 1.5 * s3 - 2.5 * s2 + 1.0, -1.5 * s3 + 2.0 * s2 + 0.5 * s, 0.5 * s3 - 0.5 * s2]
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub axes: Vec<Axis>,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(axes: Vec<Axis>, values: Vec<Complex64>) -> Result<Self> {
        let len: usize = axes.iter().map(|a| a.count).product();
        if axes.is_empty() {
            return Err(Error::InvalidParameter("grid needs at least one axis".into()));
        }
        if values.len() != len {
            return Err(Error::GridMismatch(format!("{} values for {} grid points", values.len(), len)));
        }
        Ok(GridFunction { axes, values })
    }

    pub fn zeros(axes: Vec<Axis>) -> Self {
        let len = axes.iter().map(|a| a.count).product();
        GridFunction { axes, values: vec![Complex64::default(); len] }
    }

    pub fn from_fn<F: Fn(&[f64]) -> Complex64>(axes: Vec<Axis>, f: F) -> Self {
        let mut g = Self::zeros(axes);
        let mut p = vec![0.0; g.dim()];
        for i in 0..g.values.len() {
            g.point_into(i, &mut p);
            g.values[i] = f(&p);
        }
        g
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.count).collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coordinates of the flat index `i`.
    pub fn point_into(&self, mut i: usize, out: &mut [f64]) {
        for d in (0..self.axes.len()).rev() {
            let c = self.axes[d].count;
            out[d] = self.axes[d].coord(i % c);
            i /= c;
        }
    }

    pub fn point(&self, i: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.dim()];
        self.point_into(i, &mut p);
        p
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        self.axes == other.axes
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridFunction {
        GridFunction { axes: self.axes.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, s: f64) -> GridFunction {
        self.map(|v| v * s)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        if !self.same_grid(other) {
            return Err(Error::GridMismatch("axes differ".into()));
        }
        Ok(GridFunction {
            axes: self.axes.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    /// Product trapezoid weight of every grid point, row-major.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let per_axis: Vec<Vec<f64>> = self.axes.iter().map(|a| a.weights()).collect();
        let mut out = vec![1.0; self.len()];
        let mut stride = self.len();
        for (d, w) in per_axis.iter().enumerate() {
            let c = self.axes[d].count;
            stride /= c;
            for (i, o) in out.iter_mut().enumerate() {
                *o *= w[(i / stride) % c];
            }
        }
        out
    }

    /// Value at an arbitrary point by separable cubic interpolation.
    pub fn interpolate(&self, x: &[f64], boundary: &[Boundary]) -> Complex64 {
        let d = self.dim();
        let mut base = [0i64; 8];
        let mut wts = [[0.0f64; 4]; 8];
        assert!(d <= 8, "interpolation supports at most 8 axes");
        for k in 0..d {
            let a = &self.axes[k];
            let u = (x[k] - a.min) / a.step();
            let i = u.floor();
            base[k] = i as i64 - 1;
            wts[k] = cubic_weights(u - i);
            if boundary[k] == Boundary::Zero && (u < -2.0 || u > a.count as f64 + 1.0) {
                return Complex64::default();
            }
        }
        let mut acc = Complex64::default();
        let taps = 1usize << (2 * d);
        'tap: for tap in 0..taps {
            let mut flat = 0usize;
            let mut w = 1.0;
            let mut sign = 1.0;
            for k in 0..d {
                let o = (tap >> (2 * (d - 1 - k))) & 3;
                let c = self.axes[k].count as i64;
                let mut idx = base[k] + o as i64;
                match boundary[k] {
                    Boundary::Zero => {
                        if idx < 0 || idx >= c {
                            continue 'tap;
                        }
                    }
                    Boundary::Antiperiodic => {
                        let wraps = idx.div_euclid(c);
                        idx = idx.rem_euclid(c);
                        if wraps % 2 != 0 {
                            sign = -sign;
                        }
                    }
                }
                w *= wts[k][o];
                flat = flat * c as usize + idx as usize;
            }
            acc += self.values[flat] * (w * sign);
        }
        acc
    }

    /// Trapezoid `(Σ w |f|^p)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        lp_norm(self, p)
    }

    /// Stable 16-hex-digit digest of the axis layout.
    pub fn grid_hash(&self) -> String {
        axes_hash(&self.axes)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.axes.len() as u32).to_le_bytes())?;
        for a in &self.axes {
            w.write_all(&a.min.to_le_bytes())?;
            w.write_all(&a.max.to_le_bytes())?;
            w.write_all(&(a.count as u64).to_le_bytes())?;
        }
        let mut buf = Vec::with_capacity(16 * self.values.len());
        for v in &self.values {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(|_| Error::Format("truncated header".into()))?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let version = read_u32(&mut r)?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let ndim = read_u32(&mut r)? as usize;
        if ndim == 0 || ndim > 8 {
            return Err(Error::Format(format!("unsupported dimension {ndim}")));
        }
        let mut axes = Vec::with_capacity(ndim);
        for _ in 0..ndim {
            let min = read_f64(&mut r)?;
            let max = read_f64(&mut r)?;
            let count = read_u64(&mut r)? as usize;
            axes.push(Axis::new(min, max, count).map_err(|e| Error::Format(e.to_string()))?);
        }
        let len = axes
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.count))
            .ok_or_else(|| Error::Format("grid too large".into()))?;
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        if bytes.len() != 16 * len {
            return Err(Error::Format(format!("expected {} payload bytes, found {}", 16 * len, bytes.len())));
        }
        let values = bytes
            .chunks_exact(16)
            .map(|c| {
                let re = f64::from_le_bytes(c[..8].try_into().unwrap());
                let im = f64::from_le_bytes(c[8..].try_into().unwrap());
                Complex64::new(re, im)
            })
            .collect();
        GridFunction::new(axes, values)
    }
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b).map_err(|_| Error::Format("truncated header".into()))?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b).map_err(|_| Error::Format("truncated header".into()))?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    read_u64(r).map(f64::from_bits)
}

pub fn axes_hash(axes: &[Axis]) -> String {
    let mut h = Sha256::new();
    for a in axes {
        h.update(a.min.to_le_bytes());
        h.update(a.max.to_le_bytes());
        h.update((a.count as u64).to_le_bytes());
    }
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Trapezoid `L^p` norm, `p ≥ 1`; `p = ∞` gives the max norm.
pub fn lp_norm(f: &GridFunction, p: f64) -> f64 {
    if p.is_infinite() {
        return f.max_abs();
    }
    let w = f.trapezoid_weights();
    let s: f64 = f
        .values
        .iter()
        .zip(&w)
        .map(|(v, w)| {
            let a = v.norm();
            if p == 2.0 {
                w * a * a
            } else {
                w * a.powf(p)
            }
        })
        .sum();
    s.powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn bump(x: &[f64]) -> Complex64 {
        Complex64::new((-x.iter().map(|v| v * v).sum::<f64>()).exp(), 0.0)
    }

    #[test]
    fn axis_geometry() {
        let a = Axis::new(-1.0, 1.0, 5).unwrap();
        assert_eq!(a.step(), 0.5);
        assert_eq!(a.coords(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(a.period(), 2.5);
        assert!(Axis::new(0.0, 1.0, 1).is_err());
        assert!(Axis::new(1.0, 0.0, 4).is_err());
        let c = Axis::centered(4, 0.5).unwrap();
        assert_eq!((c.min, c.max), (-0.75, 0.75));
    }

    #[test]
    fn cubic_interpolation_reproduces_cubics_and_samples() {
        let axes = vec![Axis::new(-2.0, 2.0, 41).unwrap(), Axis::new(-1.0, 3.0, 21).unwrap()];
        let f = |x: &[f64]| Complex64::new(x[0].powi(2) - 0.5 * x[1] + 1.0, x[0] * x[1]);
        let g = GridFunction::from_fn(axes, f);
        let b = [Boundary::Zero, Boundary::Zero];
        for i in [0, 17, 200, g.len() - 1] {
            assert!((g.interpolate(&g.point(i), &b) - g.values[i]).norm() < 1e-13);
        }
        // Keys kernel is exact for quadratics in the interior
        let v = g.interpolate(&[0.33, 1.27], &b);
        assert!((v - f(&[0.33, 1.27])).norm() < 1e-12);
        assert_eq!(g.interpolate(&[10.0, 0.0], &b), Complex64::default());
    }

    #[test]
    fn antiperiodic_wrap() {
        let ax = Axis::new(0.0, 0.9, 10).unwrap();
        let g = GridFunction::from_fn(vec![ax], |x| Complex64::new((x[0] * std::f64::consts::PI).sin() + 2.0, 0.0));
        let b = [Boundary::Antiperiodic];
        let inside = g.interpolate(&[0.35], &b);
        let wrapped = g.interpolate(&[0.35 + ax.period()], &b);
        assert!((inside + wrapped).norm() < 1e-14);
    }

    #[test]
    fn norms() {
        let ax = Axis::new(-6.0, 6.0, 241).unwrap();
        let g = GridFunction::from_fn(vec![ax, ax], bump);
        // ∫ e^{-2|x|²} = π/2 in two dimensions
        assert_relative_eq!(g.lp_norm(2.0).powi(2), std::f64::consts::FRAC_PI_2, max_relative = 1e-12);
        assert_relative_eq!(g.scale(-3.0).lp_norm(4.0), 3.0 * g.lp_norm(4.0), max_relative = 1e-14);
        assert_relative_eq!(g.lp_norm(f64::INFINITY), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn binary_roundtrip() {
        let axes = vec![Axis::new(-1.0, 1.0, 3).unwrap(), Axis::new(0.0, 2.0, 4).unwrap()];
        let g = GridFunction::from_fn(axes, |x| Complex64::new(x[0], -x[1]));
        let mut buf = Vec::new();
        g.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 12 + 2 * 24 + 16 * 12);
        assert_eq!(GridFunction::read_from(&buf[..]).unwrap(), g);
        assert!(matches!(GridFunction::read_from(&buf[..20]), Err(Error::Format(_))));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(GridFunction::read_from(&bad[..]), Err(Error::Format(_))));
        assert!(matches!(GridFunction::read_from(&buf[..buf.len() - 1]), Err(Error::Format(_))));
        assert_eq!(g.grid_hash().len(), 16);
        assert_eq!(g.grid_hash(), g.scale(2.0).grid_hash());
    }
}
