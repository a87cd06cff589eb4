//! Periodic one-dimensional grids and the free Schrödinger propagator.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{GpbgError, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plans(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        (p.plan_fft_forward(n), p.plan_fft_inverse(n))
    })
}

/// The torus `[0, L)` sampled at `N` equispaced points `x_i = i·L/N`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub l: f64,
}

impl Grid {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(GpbgError::InvalidGrid(format!(
                "N = {n} must be a power of two and at least 8"
            )));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(GpbgError::InvalidGrid(format!("L = {l} must be positive")));
        }
        Ok(Self { n, l })
    }

    pub fn dx(&self) -> f64 {
        self.l / self.n as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        i as f64 * self.dx()
    }

    /// Angular wavenumber of FFT bin `m`.
    pub fn wavenumber(&self, m: usize) -> f64 {
        let signed = if m < self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        };
        2.0 * std::f64::consts::PI * signed as f64 / self.l
    }

    /// `e^{−iξ²dt}` per bin, i.e. the symbol of `e^{i dt Δ}`.
    pub fn multiplier(&self, dt: f64) -> Vec<Complex64> {
        (0..self.n)
            .map(|m| {
                let xi = self.wavenumber(m);
                Complex64::from_polar(1.0, -xi * xi * dt)
            })
            .collect()
    }
}

/// Applies `e^{i dt Δ}` in place to a contiguous line of `N` samples.
pub(crate) fn propagate_line(line: &mut [Complex64], mult: &[Complex64]) {
    let (fwd, inv) = plans(line.len());
    fwd.process(line);
    let scale = 1.0 / line.len() as f64;
    for (v, m) in line.iter_mut().zip(mult) {
        *v *= m * scale;
    }
    inv.process(line);
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub grid: Grid,
    pub values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(GpbgError::InvalidGrid(format!(
                "{} samples on a grid of {}",
                values.len(),
                grid.n
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.n],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        Self {
            grid,
            values: (0..grid.n).map(|i| f(grid.x(i))).collect(),
        }
    }

    /// `exp(−(x−c)²/(2s²))`, centred at `c`.
    pub fn gaussian(grid: Grid, center: f64, width: f64) -> Self {
        Self::from_fn(grid, |x| {
            let y = (x - center) / width;
            Complex64::new((-0.5 * y * y).exp(), 0.0)
        })
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|v| v * c)
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        }
    }

    /// `|f|²f`.
    pub fn cubic(&self) -> Self {
        self.map(|v| v * v.norm_sqr())
    }

    /// `e^{i dt Δ} f`.
    pub fn propagate(&self, dt: f64) -> Self {
        let mut values = self.values.clone();
        if dt != 0.0 {
            propagate_line(&mut values, &self.grid.multiplier(dt));
        }
        Self {
            grid: self.grid,
            values,
        }
    }

    /// Discrete `L^p` norm, `(Σ|f|^p dx)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.linf_norm();
        }
        let s: f64 = self.values.iter().map(|v| v.norm().powf(p)).sum();
        (s * self.grid.dx()).powf(1.0 / p)
    }

    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.grid.dx()).sqrt()
    }

    pub fn linf_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Discrete spectrum, unnormalized.
    pub fn spectrum(&self) -> Vec<Complex64> {
        let mut s = self.values.clone();
        plans(self.grid.n).0.process(&mut s);
        s
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `(Σ|a−b|²)^{1/2} / max((Σ|a|²)^{1/2}, (Σ|b|²)^{1/2}, tiny)`.
pub fn rel_l2_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let na: f64 = a.iter().map(|x| x.norm_sqr()).sum();
    let nb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    d.sqrt() / na.sqrt().max(nb.sqrt()).max(1e-300)
}
