//! The verification suites run by `gpbg verify`.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use gpbg_core::board::{acceptable_move, partition_classes, BoardState};
use gpbg_core::forest::build_forest;
use gpbg_core::kernel::build_kernels;
use gpbg_core::map::{enumerate_maps, Permutation};

use crate::duhamel::{evaluate_j_factorized, evaluate_j_full, FinalState, Probe};
use crate::error::Result;
use crate::estimates::{
    check_dispersive, check_trilinear_d1, corpus_rng, log_spaced, random_localized, TRILINEAR_L1_BASELINE,
    TRILINEAR_L2_BASELINE,
};
use crate::grid::{rel_l2_diff, Grid, GridFunction};
use crate::invariance::{simplex_integral, verify_domain_union, verify_move_invariance};
use crate::nls::{solve_nls, verify_hierarchy_solution};
use crate::quadrature::SimplexQuadrature;
use crate::report::CheckReport;
use crate::tensor::DensityTensor;

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Target {
    Invariance,
    DomainUnion,
    Factorization,
    Hierarchy,
    Dispersive,
    Trilinear,
}

impl Target {
    pub const ALL: [Target; 6] = [
        Target::Invariance,
        Target::DomainUnion,
        Target::Factorization,
        Target::Hierarchy,
        Target::Dispersive,
        Target::Trilinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Target::Invariance => "invariance",
            Target::DomainUnion => "domain-union",
            Target::Factorization => "factorization",
            Target::Hierarchy => "hierarchy",
            Target::Dispersive => "dispersive",
            Target::Trilinear => "trilinear",
        }
    }
}

/// Overrides for the suite defaults. `None` keeps the default sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub grid_n: Option<usize>,
    pub l: Option<f64>,
    pub quad: usize,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            k: None,
            n: None,
            grid_n: None,
            l: None,
            quad: 6,
            seed: DEFAULT_SEED,
        }
    }
}

impl SuiteConfig {
    fn sizes(&self, k_max: usize, n_max: usize) -> Vec<(usize, usize)> {
        let ks: Vec<usize> = self.k.map_or_else(|| (1..=k_max).collect(), |k| vec![k]);
        let ns: Vec<usize> = self.n.map_or_else(|| (1..=n_max).collect(), |n| vec![n]);
        ks.iter().flat_map(|&k| ns.iter().map(move |&n| (k, n))).collect()
    }

    fn lab_grid(&self, default_n: usize) -> Result<Grid> {
        Grid::new(
            self.grid_n.unwrap_or(default_n),
            self.l.unwrap_or(std::f64::consts::TAU),
        )
    }
}

/// Random trigonometric polynomial with modes `|m| ≤ max_mode`, unit `L²` norm.
pub fn band_limited(grid: Grid, max_mode: i64, rng: &mut ChaCha8Rng) -> GridFunction {
    let coeffs: Vec<(i64, Complex64)> = (-max_mode..=max_mode)
        .map(|m| (m, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    let f = GridFunction::from_fn(grid, |x| {
        coeffs
            .iter()
            .map(|&(m, c)| c * Complex64::from_polar(1.0, std::f64::consts::TAU * m as f64 * x / grid.l))
            .sum()
    });
    let norm = f.l2_norm();
    f.scale(Complex64::new(1.0 / norm, 0.0))
}

pub fn run_target(target: Target, cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    match target {
        Target::Invariance => invariance(cfg),
        Target::DomainUnion => domain_union(cfg),
        Target::Factorization => factorization(cfg),
        Target::Hierarchy => hierarchy(cfg),
        Target::Dispersive => dispersive(cfg),
        Target::Trilinear => trilinear(cfg),
    }
}

pub fn run_all(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let mut out = Vec::new();
    for t in Target::ALL {
        out.extend(run_target(t, cfg)?);
    }
    Ok(out)
}

const INVARIANCE_TOL: f64 = 1e-6;
const DOMAIN_TOL: f64 = 1e-5;
const ORACLE_TOL: f64 = 1e-10;
const OUTER_TIME: f64 = 0.1;

fn invariance(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let grid = cfg.lab_grid(16)?;
    let phi = band_limited(grid, 2, &mut corpus_rng(cfg.seed));
    let fin = FinalState::FreeEvolved;
    let q = SimplexQuadrature::new(cfg.quad)?;
    let q_fine = SimplexQuadrature::new(cfg.quad + 2)?;
    let q_ref = SimplexQuadrature::new(cfg.quad + 4)?;
    let mut out = Vec::new();
    // |I_fine − I_ref| / |I_coarse − I_ref|, below 1 when the rule converges
    let mut worst_contraction: f64 = 0.0;
    for (k, n) in cfg.sizes(2, 3) {
        for m in enumerate_maps(k, n)? {
            let b = BoardState::new(m.clone());
            let moves: Vec<usize> = b.legal_moves().collect();
            for &j in &moves {
                let after = acceptable_move(&b, j)?;
                let params = json!({"k": k, "mu": m.mu(), "move": j, "N": grid.n, "L": grid.l, "t": OUTER_TIME});
                for quad in [q, q_fine] {
                    let r = verify_move_invariance(&b, &after, &phi, quad, OUTER_TIME, fin)?;
                    let mut p = params.clone();
                    p["quad"] = json!(quad.order);
                    out.push(CheckReport::at_most(
                        "move-invariance",
                        p,
                        "rel_diff",
                        r.rel_diff,
                        INVARIANCE_TOL,
                    ));
                }
            }
            if moves.is_empty() {
                continue;
            }
            let id = Permutation::identity(n);
            let [coarse, fine, reference] =
                [q, q_fine, q_ref].map(|quad| simplex_integral(b.map(), &id, &phi, quad, OUTER_TIME, fin));
            let reference = reference?;
            let (e_coarse, e_fine) = (coarse?.rel_diff(&reference), fine?.rel_diff(&reference));
            if e_coarse > 1e-12 {
                worst_contraction = worst_contraction.max(e_fine / e_coarse);
            }
        }
    }
    out.push(CheckReport::at_most(
        "move-invariance-quadrature-convergence",
        json!({"orders": [q.order, q_fine.order, q_ref.order], "N": grid.n}),
        "error_ratio",
        worst_contraction,
        1.0,
    ));
    Ok(out)
}

fn domain_union(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let grid = cfg.lab_grid(16)?;
    let phi = band_limited(grid, 2, &mut corpus_rng(cfg.seed));
    let fin = FinalState::FreeEvolved;
    let q = SimplexQuadrature::new(cfg.quad)?;
    let (k, n) = (cfg.k.unwrap_or(1), cfg.n.unwrap_or(3));
    let mut out = Vec::new();
    let (mut left, mut right) = (Probe::zero(), Probe::zero());
    for cls in partition_classes(k, n)? {
        let r = verify_domain_union(&cls, &phi, q, OUTER_TIME, fin)?;
        left.add_scaled(&r.left, 1.0);
        right.add_scaled(&r.right, 1.0);
        out.push(CheckReport::at_most(
            "domain-union",
            json!({"k": k, "representative": cls.representative.highlights(), "members": cls.len(), "N": grid.n, "quad": q.order}),
            "rel_diff",
            r.rel_diff,
            DOMAIN_TOL,
        ));
    }
    out.push(CheckReport::at_most(
        "domain-union-global",
        json!({"k": k, "n": n, "N": grid.n, "quad": q.order}),
        "rel_diff",
        left.rel_diff(&right),
        DOMAIN_TOL,
    ));
    Ok(out)
}

fn factorization(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let grid = Grid::new(8, cfg.l.unwrap_or(std::f64::consts::TAU))?;
    let mut rng = corpus_rng(cfg.seed ^ 0xFAC7);
    let phis: Vec<GridFunction> = (0..5).map(|_| band_limited(grid, 3, &mut rng)).collect();
    let mut out = Vec::new();
    for (k, n) in cfg.sizes(1, 2) {
        let tuples: Vec<Vec<f64>> = (0..10)
            .map(|_| (0..=n).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        for m in enumerate_maps(k, n)? {
            let forest = build_forest(&m);
            let kernels = build_kernels(&forest)?;
            let mut worst: f64 = 0.0;
            for phi in &phis {
                for times in &tuples {
                    for fin in [FinalState::Fixed, FinalState::FreeEvolved] {
                        let full = evaluate_j_full(&m, times, phi, fin)?;
                        let parts = evaluate_j_factorized(&forest, &kernels, times, phi, fin)?;
                        let prod = DensityTensor::tensor_product(&parts)?;
                        worst = worst.max(rel_l2_diff(&full.values, &prod.values));
                    }
                }
            }
            out.push(CheckReport::at_most(
                "factorization-oracle",
                json!({"k": k, "mu": m.mu(), "N": grid.n, "phis": phis.len(), "time_tuples": tuples.len()}),
                "rel_diff",
                worst,
                ORACLE_TOL,
            ));
        }
    }
    Ok(out)
}

pub const HIERARCHY_T_END: f64 = 0.5;

fn hierarchy_data(grid: Grid) -> GridFunction {
    GridFunction::from_fn(grid, |x| {
        let y = std::f64::consts::TAU * x / grid.l;
        Complex64::new(1.0 + 0.5 * y.cos(), 0.3 * (2.0 * y).sin())
    })
}

fn hierarchy(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let grid = cfg.lab_grid(32)?;
    let k = cfg.k.unwrap_or(1);
    let lambda = 1.0;
    let phi0 = hierarchy_data(grid);
    let residual = |dt: f64, lh: f64| -> Result<f64> {
        let traj = solve_nls(&phi0, lambda, HIERARCHY_T_END, dt)?;
        Ok(verify_hierarchy_solution(&traj, k, lh)?.max_residual)
    };
    let coarse = residual(1e-3, lambda)?;
    let fine = residual(5e-4, lambda)?;
    let sentinel = residual(1e-3, -lambda)?;
    let params = json!({"k": k, "N": grid.n, "L": grid.l, "lambda": lambda, "t_end": HIERARCHY_T_END,
        "dt": [1e-3, 5e-4], "residuals": [coarse, fine]});
    Ok(vec![
        CheckReport::within("hierarchy-residual-order", params, "ratio", coarse / fine, 3.2, 4.8),
        CheckReport::at_least(
            "hierarchy-lambda-sentinel",
            json!({"k": k, "N": grid.n, "residual": sentinel, "matched": coarse}),
            "ratio",
            sentinel / coarse,
            100.0,
        ),
    ])
}

fn dispersive_grid() -> Grid {
    Grid::new(4096, 1024.0).expect("valid grid")
}

fn dispersive(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let grid = dispersive_grid();
    let ts = log_spaced(2.0, 20.0, 11);
    let gauss = GridFunction::gaussian(grid, 0.5 * grid.l, 1.0);
    let rep = check_dispersive(&gauss, &ts, f64::INFINITY)?;
    let unit = check_dispersive(&gauss, &ts, 2.0)?;
    let unitarity = unit.ratios.iter().map(|p| (p.1 - 1.0).abs()).fold(0.0, f64::max);
    let mut rng = corpus_rng(cfg.seed);
    let mut corpus_max: f64 = 0.0;
    for _ in 0..100 {
        let f = random_localized(grid, &mut rng);
        corpus_max = corpus_max.max(check_dispersive(&f, &ts, f64::INFINITY)?.max());
    }
    let params = json!({"N": grid.n, "L": grid.l, "t": [ts[0], ts[ts.len() - 1]], "points": ts.len()});
    Ok(vec![
        CheckReport::at_most(
            "dispersive-gaussian-spread",
            params.clone(),
            "ratio",
            rep.spread(),
            0.05,
        ),
        CheckReport::at_most("dispersive-l2-unitarity", params.clone(), "residual", unitarity, 1e-12),
        CheckReport::at_most(
            "dispersive-corpus",
            json!({"N": grid.n, "L": grid.l, "corpus": 100, "seed": cfg.seed, "gaussian_max": rep.max()}),
            "ratio",
            corpus_max / rep.max(),
            2.0,
        ),
    ])
}

pub const TRILINEAR_WINDOW: f64 = 1.0;

/// Corpus maxima and largest relative change under refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrilinearSweep {
    pub l1_max: f64,
    pub l2_max: f64,
    pub n_doubling_drift: f64,
    pub order_doubling_drift: f64,
}

pub fn trilinear_sweep(seed: u64, n: usize, order: usize) -> Result<TrilinearSweep> {
    let base = Grid::new(n, 128.0)?;
    let fine = Grid::new(2 * n, 128.0)?;
    let mut rng = corpus_rng(seed);
    let mut s = TrilinearSweep {
        l1_max: 0.0,
        l2_max: 0.0,
        n_doubling_drift: 0.0,
        order_doubling_drift: 0.0,
    };
    let drift = |a: f64, b: f64| (a - b).abs() / a.abs().max(1e-300);
    for _ in 0..100 {
        let draw = |g: Grid, rng: &mut ChaCha8Rng| random_localized(g, rng);
        // identical draws on both grids: replay the generator state
        let state = rng.clone();
        let fs: Vec<_> = (0..3).map(|_| draw(base, &mut rng)).collect();
        let mut replay = state;
        let fs2: Vec<_> = (0..3).map(|_| draw(fine, &mut replay)).collect();
        let ts = [
            rng.gen_range(0.0..TRILINEAR_WINDOW),
            rng.gen_range(0.0..TRILINEAR_WINDOW),
            rng.gen_range(0.0..TRILINEAR_WINDOW),
        ];
        let a = check_trilinear_d1([&fs[0], &fs[1], &fs[2]], ts, TRILINEAR_WINDOW, order)?;
        let b = check_trilinear_d1([&fs2[0], &fs2[1], &fs2[2]], ts, TRILINEAR_WINDOW, order)?;
        let c = check_trilinear_d1([&fs[0], &fs[1], &fs[2]], ts, TRILINEAR_WINDOW, 2 * order)?;
        s.l1_max = s.l1_max.max(a.l1_ratio);
        s.l2_max = s.l2_max.max(a.l2_ratio);
        s.n_doubling_drift = s
            .n_doubling_drift
            .max(drift(a.l1_ratio, b.l1_ratio))
            .max(drift(a.l2_ratio, b.l2_ratio));
        s.order_doubling_drift = s
            .order_doubling_drift
            .max(drift(a.l1_ratio, c.l1_ratio))
            .max(drift(a.l2_ratio, c.l2_ratio));
    }
    Ok(s)
}

fn trilinear(cfg: &SuiteConfig) -> Result<Vec<CheckReport>> {
    let (n, order) = (512, 16);
    let s = trilinear_sweep(cfg.seed, n, order)?;
    let params =
        json!({"N": n, "L": 128.0, "window": TRILINEAR_WINDOW, "order": order, "corpus": 100, "seed": cfg.seed});
    Ok(vec![
        CheckReport::at_most(
            "trilinear-l1-baseline",
            params.clone(),
            "ratio",
            s.l1_max,
            TRILINEAR_L1_BASELINE,
        ),
        CheckReport::at_most(
            "trilinear-l2-baseline",
            params.clone(),
            "ratio",
            s.l2_max,
            TRILINEAR_L2_BASELINE,
        ),
        CheckReport::at_most(
            "trilinear-n-doubling",
            params.clone(),
            "rel_diff",
            s.n_doubling_drift,
            0.3,
        ),
        CheckReport::at_most(
            "trilinear-order-doubling",
            params,
            "rel_diff",
            s.order_doubling_drift,
            0.3,
        ),
    ])
}
