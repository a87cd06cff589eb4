//! Gauss–Legendre rules and ordered-simplex quadrature.

use crate::error::{GpbgError, Result};

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[0, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * x * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    (nodes, weights)
}

/// Tensor Gauss–Legendre on the ordered simplex `{t ≥ s_1 ≥ ⋯ ≥ s_n ≥ 0}`
/// through `s_i = t·v_1⋯v_i`, `v ∈ [0,1]^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimplexQuadrature {
    pub order: usize,
}

impl SimplexQuadrature {
    pub fn new(order: usize) -> Result<Self> {
        if order < 2 {
            return Err(GpbgError::Invalid(format!("quadrature order {order} < 2")));
        }
        Ok(Self { order })
    }

    /// `(s, weight)` pairs; the weights sum to `tⁿ/n!`.
    pub fn nodes(&self, n: usize, t: f64) -> Vec<(Vec<f64>, f64)> {
        let (x, w) = gauss_legendre(self.order);
        let total = self.order.pow(n as u32);
        let mut out = Vec::with_capacity(total);
        let mut idx = vec![0usize; n];
        for _ in 0..total {
            let mut s = Vec::with_capacity(n);
            let mut prod = t;
            let mut weight = t.powi(n as i32);
            for (i, &q) in idx.iter().enumerate() {
                prod *= x[q];
                s.push(prod);
                weight *= w[q] * x[q].powi((n - 1 - i) as i32);
            }
            out.push((s, weight));
            for d in idx.iter_mut().rev() {
                *d += 1;
                if *d < self.order {
                    break;
                }
                *d = 0;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        for order in 2..=10 {
            let (x, w) = gauss_legendre(order);
            for p in 0..2 * order {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                assert!((q - 1.0 / (p + 1) as f64).abs() < 1e-14, "order {order} degree {p}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn simplex_volume_and_moments() {
        let q = SimplexQuadrature::new(4).unwrap();
        let t = 0.7;
        for n in 1..=4 {
            let nodes = q.nodes(n, t);
            let vol: f64 = nodes.iter().map(|(_, w)| w).sum();
            let fact: f64 = (1..=n).map(|i| i as f64).product();
            assert!((vol - t.powi(n as i32) / fact).abs() < 1e-15);
            assert!(nodes
                .iter()
                .all(|(s, _)| s.windows(2).all(|p| p[0] >= p[1]) && s[0] <= t));
        }
        // ∫ s_1 s_2 over {t ≥ s_1 ≥ s_2 ≥ 0} = t⁴/8
        let m: f64 = q.nodes(2, t).iter().map(|(s, w)| w * s[0] * s[1]).sum();
        assert!((m - t.powi(4) / 8.0).abs() < 1e-15);
        assert!(SimplexQuadrature::new(1).is_err());
    }
}
