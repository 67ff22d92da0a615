//! Radial reduction `−u'' − ((n−1)/r) u' + (V/r²) u` of a cone operator.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{CsrMatrix, Factorization};

/// Radial part of a Schrödinger operator on a cone of dimension `n` whose
/// link potential has been replaced by the constant `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialOperator {
    pub n: f64,
    /// Coefficient of `1/r²`.
    pub mu: f64,
}

impl RadialOperator {
    /// Exact action on the monomial `r^α` at radius `r`.
    pub fn apply_monomial(&self, alpha: f64, r: f64) -> f64 {
        -(alpha * alpha + (self.n - 2.0) * alpha - self.mu) * r.powf(alpha - 2.0)
    }

    /// Central-difference residual of `u` at interior nodes of a uniform grid.
    pub fn residual(&self, r: &[f64], u: &[f64]) -> Vec<f64> {
        let h = r[1] - r[0];
        (1..r.len() - 1)
            .map(|i| {
                let d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
                let d1 = (u[i + 1] - u[i - 1]) / (2.0 * h);
                -d2 - (self.n - 1.0) / r[i] * d1 + self.mu / (r[i] * r[i]) * u[i]
            })
            .collect()
    }
}

/// Uniform nodes on `[r_min, r_max]`.
pub fn uniform_nodes(r_min: f64, r_max: f64, nodes: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_max > r_min) || nodes < 3 {
        return Err(invalid(format!("bad radial grid [{r_min}, {r_max}] with {nodes} nodes")));
    }
    let h = (r_max - r_min) / (nodes - 1) as f64;
    Ok((0..nodes).map(|i| r_min + i as f64 * h).collect())
}

/// Two-point boundary problem `L u = 0`, `u(r_min) = left`, `u(r_max) = right`
/// by central differences; returns nodes and values.
pub fn solve_radial_dirichlet(
    op: &RadialOperator,
    r_min: f64,
    r_max: f64,
    nodes: usize,
    left: f64,
    right: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let r = uniform_nodes(r_min, r_max, nodes)?;
    let h = r[1] - r[0];
    let m = nodes - 2;
    let mut t = Vec::with_capacity(3 * m);
    let mut rhs = vec![0.0; m];
    for k in 0..m {
        let i = k + 1;
        let lo = -1.0 / (h * h) + (op.n - 1.0) / (2.0 * h * r[i]);
        let hi = -1.0 / (h * h) - (op.n - 1.0) / (2.0 * h * r[i]);
        t.push((k, k, 2.0 / (h * h) + op.mu / (r[i] * r[i])));
        if k > 0 {
            t.push((k, k - 1, lo));
        } else {
            rhs[k] -= lo * left;
        }
        if k + 1 < m {
            t.push((k, k + 1, hi));
        } else {
            rhs[k] -= hi * right;
        }
    }
    let a = CsrMatrix::from_triplets(m, t);
    let inner = Factorization::lu(&a)?.solve(&rhs)?;
    let mut u = Vec::with_capacity(nodes);
    u.push(left);
    u.extend(inner);
    u.push(right);
    Ok((r, u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monomial_residual_is_second_order() {
        let op = RadialOperator { n: 7.0, mu: -6.0 };
        let err = |nodes: usize| {
            let r = uniform_nodes(0.5, 2.0, nodes).unwrap();
            let u: Vec<f64> = r.iter().map(|x| x.powi(-2)).collect();
            op.residual(&r, &u).iter().fold(0.0f64, |m, v| m.max(v.abs()))
        };
        let (e1, e2) = (err(101), err(201));
        assert!(e1 / e2 > 3.5 && e1 / e2 < 4.5, "{e1} {e2}");
        assert_eq!(op.apply_monomial(-2.0, 1.3), 0.0);
        assert!((op.apply_monomial(-2.5, 2.0) - 0.25 * 2f64.powf(-4.5)).abs() < 1e-15);
    }

    #[test]
    fn dirichlet_reproduces_power() {
        let op = RadialOperator { n: 7.0, mu: -6.0 };
        let (r, u) = solve_radial_dirichlet(&op, 0.5, 2.0, 401, 0.5f64.powi(-3), 2f64.powi(-3)).unwrap();
        for (x, v) in r.iter().zip(&u) {
            assert!((v - x.powi(-3)).abs() < 5e-4 * x.powi(-3));
        }
    }
}
