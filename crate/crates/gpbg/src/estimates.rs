//! Empirical ratios for the one-dimensional dispersive and trilinear estimates.
//!
//! Functions are placed around the centre `L/2` of the box. Every check
//! first bounds how far the evolved data can travel and refuses to run if it
//! could wrap around the torus.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GpbgError, Result};
use crate::grid::{Grid, GridFunction};
use crate::quadrature::gauss_legendre;

/// Relative amplitude below which samples and modes count as negligible.
const NEGLIGIBLE: f64 = 1e-10;

/// `‖e^{itΔ}f‖_∞ ≤ (4π|t|)^{−1/2}‖f‖_{L¹}` integrated over the worst window
/// gives this ceiling for the `L¹` trilinear ratio.
pub fn trilinear_l1_ceiling() -> f64 {
    (2.0 / std::f64::consts::PI).sqrt()
}

/// Frozen regression baselines of the corpus maxima, rounded up from the
/// default-seed run (0.2270 and 0.2974 at N = 512, order 16).
pub const TRILINEAR_L1_BASELINE: f64 = 0.25;
pub const TRILINEAR_L2_BASELINE: f64 = 0.35;

/// Half-width of the numerical support around `L/2` and the largest
/// non-negligible angular frequency.
pub fn support_and_bandwidth(f: &GridFunction) -> (f64, f64) {
    let g = f.grid;
    let peak = f.linf_norm();
    let radius = f
        .values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > NEGLIGIBLE * peak)
        .map(|(i, _)| (g.x(i) - 0.5 * g.l).abs())
        .fold(0.0, f64::max);
    let modes = f.spectrum();
    let top = modes.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let bandwidth = modes
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() > NEGLIGIBLE * top)
        .map(|(m, _)| g.wavenumber(m).abs())
        .fold(0.0, f64::max);
    (radius, bandwidth)
}

/// Fails with [`GpbgError::WraparoundRisk`] if data starting in `f` could
/// reach the box boundary after evolving for `max_dt`.
pub fn wraparound_guard(f: &GridFunction, max_dt: f64) -> Result<()> {
    let (radius, bandwidth) = support_and_bandwidth(f);
    // group velocity of e^{−iξ²t} is 2ξ
    let reach = radius + 2.0 * bandwidth * max_dt.abs();
    let half_box = 0.5 * f.grid.l;
    if reach >= half_box {
        return Err(GpbgError::WraparoundRisk { reach, half_box });
    }
    Ok(())
}

fn dual_exponent(r: f64) -> f64 {
    if r.is_infinite() {
        1.0
    } else {
        r / (r - 1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DispersiveReport {
    pub r: f64,
    /// `(t, ‖e^{itΔ}f‖_{L^r} |t|^{1/2−1/r} / ‖f‖_{L^{r′}})`.
    pub ratios: Vec<(f64, f64)>,
}

impl DispersiveReport {
    pub fn max(&self) -> f64 {
        self.ratios.iter().map(|p| p.1).fold(f64::MIN, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.ratios.iter().map(|p| p.1).fold(f64::MAX, f64::min)
    }

    /// `(max − min) / max`.
    pub fn spread(&self) -> f64 {
        (self.max() - self.min()) / self.max()
    }
}

pub fn check_dispersive(f: &GridFunction, times: &[f64], r: f64) -> Result<DispersiveReport> {
    if r.is_nan() || r < 2.0 {
        return Err(GpbgError::Invalid(format!("exponent r = {r} below 2")));
    }
    let t_max = times.iter().map(|t| t.abs()).fold(0.0, f64::max);
    wraparound_guard(f, t_max)?;
    let denom = f.lp_norm(dual_exponent(r));
    let decay = if r.is_infinite() { 0.5 } else { 0.5 - 1.0 / r };
    let ratios = times
        .iter()
        .map(|&t| (t, f.propagate(t).lp_norm(r) * t.abs().powf(decay) / denom))
        .collect();
    Ok(DispersiveReport { r, ratios })
}

/// `n` log-spaced points from `a` to `b` inclusive.
pub fn log_spaced(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}

/// A sum of three modulated Gaussians near the centre of the box, with
/// envelopes wide enough to stay resolved on grids with `dx ≤ 1/4`.
pub fn random_localized(grid: Grid, rng: &mut ChaCha8Rng) -> GridFunction {
    let c = 0.5 * grid.l;
    let bumps: Vec<(Complex64, f64, f64, f64)> = (0..3)
        .map(|_| {
            let amp = Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
            (
                amp,
                rng.gen_range(-2.0..2.0),
                rng.gen_range(0.8..1.5),
                rng.gen_range(-2.0..2.0),
            )
        })
        .collect();
    GridFunction::from_fn(grid, |x| {
        bumps
            .iter()
            .map(|&(amp, shift, width, freq)| {
                let y = (x - c - shift) / width;
                amp * (-0.5 * y * y).exp() * Complex64::from_polar(1.0, freq * (x - c))
            })
            .sum()
    })
}

pub fn corpus_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrilinearReport {
    /// `‖T‖_{L¹_t L¹_x} / (T^{1/2}‖f‖_{L¹}‖g‖_{L²}‖h‖_{L²})`.
    pub l1_ratio: f64,
    /// `‖T‖_{L¹_t L²_x} / (T^{1/2}‖f‖_{L²}‖g‖_{L²}‖h‖_{L²})`.
    pub l2_ratio: f64,
}

/// Ratios of `T(f,g,h)(t) = Π e^{i(t−t_i)Δ}` over `t ∈ [0, window)`. The time
/// integral is Gauss–Legendre of `order` points on each panel between the
/// breakpoints `0, t_1, t_2, t_3, window`.
pub fn check_trilinear_d1(fs: [&GridFunction; 3], ts: [f64; 3], window: f64, order: usize) -> Result<TrilinearReport> {
    if window.is_nan() || window <= 0.0 || ts.iter().any(|&t| !(0.0..window).contains(&t)) {
        return Err(GpbgError::Invalid(format!("times {ts:?} outside [0, {window})")));
    }
    for f in fs {
        wraparound_guard(f, window)?;
    }
    let mut breaks = vec![0.0, window];
    breaks.extend_from_slice(&ts);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let (x, w) = gauss_legendre(order);
    let (mut lhs1, mut lhs2) = (0.0, 0.0);
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        for (xi, wi) in x.iter().zip(&w) {
            let t = a + (b - a) * xi;
            let prod = fs[0]
                .propagate(t - ts[0])
                .mul(&fs[1].propagate(t - ts[1]))
                .mul(&fs[2].propagate(t - ts[2]));
            lhs1 += (b - a) * wi * prod.lp_norm(1.0);
            lhs2 += (b - a) * wi * prod.l2_norm();
        }
    }
    let root = window.sqrt();
    let (g2, h2) = (fs[1].l2_norm(), fs[2].l2_norm());
    Ok(TrilinearReport {
        l1_ratio: lhs1 / (root * fs[0].lp_norm(1.0) * g2 * h2),
        l2_ratio: lhs2 / (root * fs[0].l2_norm() * g2 * h2),
    })
}
