//! Full `k`-particle density kernels `γ^{(k)}(x_1…x_k; x′_1…x′_k)` on a grid.

use num_complex::Complex64;

use crate::error::{GpbgError, Result};
use crate::grid::{propagate_line, Grid, GridFunction};

/// Largest number of entries a [`DensityTensor`] may hold.
pub const MEMORY_GUARD: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `B⁺`: the contracted pair sits at `x_j`.
    Plus,
    /// `B⁻`: the contracted pair sits at `x′_j`.
    Minus,
}

/// Row-major over axes `(x_1, …, x_k, x′_1, …, x′_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTensor {
    pub grid: Grid,
    pub k: usize,
    pub values: Vec<Complex64>,
}

pub fn check_guard(n: usize, k: usize) -> Result<usize> {
    let entries = (n as u128).checked_pow(2 * k as u32).unwrap_or(u128::MAX);
    if entries > MEMORY_GUARD as u128 {
        return Err(GpbgError::MemoryGuardExceeded {
            entries,
            limit: MEMORY_GUARD,
        });
    }
    Ok(entries as usize)
}

impl DensityTensor {
    pub fn zeros(grid: Grid, k: usize) -> Result<Self> {
        let len = check_guard(grid.n, k)?;
        Ok(Self {
            grid,
            k,
            values: vec![Complex64::new(0.0, 0.0); len],
        })
    }

    /// `|ψ⟩⟨χ|` as a one-particle kernel `ψ(x) conj(χ(x′))`.
    pub fn outer(psi: &GridFunction, chi: &GridFunction) -> Self {
        let n = psi.grid.n;
        let mut values = Vec::with_capacity(n * n);
        for a in &psi.values {
            for b in &chi.values {
                values.push(a * b.conj());
            }
        }
        Self {
            grid: psi.grid,
            k: 1,
            values,
        }
    }

    /// `F_1 ⊗ ⋯ ⊗ F_k` of one-particle kernels.
    pub fn tensor_product(factors: &[DensityTensor]) -> Result<Self> {
        let grid = factors[0].grid;
        let n = grid.n;
        let k = factors.len();
        let mut out = Self::zeros(grid, k)?;
        let mut digits = vec![0usize; 2 * k];
        for (idx, v) in out.values.iter_mut().enumerate() {
            unravel(idx, n, &mut digits);
            *v = factors
                .iter()
                .enumerate()
                .map(|(j, f)| f.values[digits[j] * n + digits[k + j]])
                .product();
        }
        Ok(out)
    }

    /// `(|φ⟩⟨φ|)^{⊗k}`.
    pub fn factorized(phi: &GridFunction, k: usize) -> Result<Self> {
        let one = Self::outer(phi, phi);
        Self::tensor_product(&vec![one; k])
    }

    pub fn get(&self, digits: &[usize]) -> Complex64 {
        let n = self.grid.n;
        self.values[digits.iter().fold(0, |acc, &d| acc * n + d)]
    }

    /// `U^{(k)}(dt) = e^{i dt (Δ_x − Δ_{x′})}` applied axis by axis.
    pub fn propagate(&self, dt: f64) -> Self {
        let mut out = self.clone();
        if dt == 0.0 {
            return out;
        }
        let n = self.grid.n;
        let plus = self.grid.multiplier(dt);
        let minus = self.grid.multiplier(-dt);
        let axes = 2 * self.k;
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..axes {
            let mult = if axis < self.k { &plus } else { &minus };
            let stride = n.pow((axes - 1 - axis) as u32);
            let block = stride * n;
            for base in (0..out.values.len()).step_by(block) {
                for off in 0..stride {
                    for (i, v) in line.iter_mut().enumerate() {
                        *v = out.values[base + off + i * stride];
                    }
                    propagate_line(&mut line, mult);
                    for (i, v) in line.iter().enumerate() {
                        out.values[base + off + i * stride] = *v;
                    }
                }
            }
        }
        out
    }

    /// Discrete trace `Σ_x γ(x; x) dx^k`.
    pub fn trace(&self) -> Complex64 {
        let n = self.grid.n;
        let mut digits = vec![0usize; 2 * self.k];
        let mut sum = Complex64::new(0.0, 0.0);
        let count = n.pow(self.k as u32);
        for i in 0..count {
            unravel(i, n, &mut digits[..self.k]);
            let (a, b) = digits.split_at_mut(self.k);
            b.copy_from_slice(a);
            sum += self.get(&digits);
        }
        sum * self.grid.dx().powi(self.k as i32)
    }

    /// Hilbert–Schmidt norm `(Σ|γ|² dx^{2k})^{1/2}`.
    pub fn hs_norm(&self) -> f64 {
        let s: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        (s * self.grid.dx().powi(2 * self.k as i32)).sqrt()
    }

    pub fn add_scaled(&mut self, other: &Self, c: Complex64) {
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += b * c;
        }
    }
}

fn unravel(mut idx: usize, n: usize, digits: &mut [usize]) {
    for d in digits.iter_mut().rev() {
        *d = idx % n;
        idx /= n;
    }
}

/// `B^±_{j;k+1}`: restricts particle `k+1` to the diagonal at `x_j` or `x′_j`.
/// No quadrature weight is applied.
pub fn contract_b(t: &DensityTensor, j: usize, side: Side) -> Result<DensityTensor> {
    let k = t.k - 1;
    if t.k < 2 || j == 0 || j > k {
        return Err(GpbgError::Invalid(format!(
            "contraction B_{{{j};{}}} on {} particles",
            k + 1,
            t.k
        )));
    }
    let n = t.grid.n;
    let mut out = DensityTensor::zeros(t.grid, k)?;
    let mut digits = vec![0usize; 2 * k];
    let mut src = vec![0usize; 2 * k + 2];
    for (idx, v) in out.values.iter_mut().enumerate() {
        unravel(idx, n, &mut digits);
        let y = match side {
            Side::Plus => digits[j - 1],
            Side::Minus => digits[k + j - 1],
        };
        src[..k].copy_from_slice(&digits[..k]);
        src[k] = y;
        src[k + 1..2 * k + 1].copy_from_slice(&digits[k..]);
        src[2 * k + 1] = y;
        *v = t.get(&src);
    }
    Ok(out)
}

/// `B_{j;k+1} = B⁺_{j;k+1} − B⁻_{j;k+1}`.
pub fn contract_pair(t: &DensityTensor, j: usize) -> Result<DensityTensor> {
    let mut out = contract_b(t, j, Side::Plus)?;
    out.add_scaled(&contract_b(t, j, Side::Minus)?, Complex64::new(-1.0, 0.0));
    Ok(out)
}

/// `B_{k+1} = Σ_j B_{j;k+1}`.
pub fn contract_full(t: &DensityTensor) -> Result<DensityTensor> {
    let mut out = DensityTensor::zeros(t.grid, t.k - 1)?;
    for j in 1..t.k {
        out.add_scaled(&contract_pair(t, j)?, Complex64::new(1.0, 0.0));
    }
    Ok(out)
}
