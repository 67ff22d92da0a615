//! Nested neighbourhood chains toward a boundary point of a hyperbolic space,
//! built from a conformal geodesic ray.

use serde::{Deserialize, Serialize};

use super::geodesic::{GeodesicPath, PathMetric};
use super::space::SampledSpace;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainKind {
    /// Sets of points closer to the far part of the ray than to its start.
    Halfspace,
    /// Superlevel sets of the Gromov product with a point on the ray.
    GromovProduct,
}

/// The separation function of a chain, as an explicit formula.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiFunction {
    pub kind: ChainKind,
    pub delta: f64,
}

impl PhiFunction {
    pub fn eval(&self, t: f64) -> f64 {
        let d = self.delta;
        match self.kind {
            ChainKind::Halfspace => d.min(d / 22.0).max(t - 6.0 * d),
            ChainKind::GromovProduct => (t - 2.0 * (d + 2.0)).max(d - 2.0),
        }
    }

    /// Ray parameter of the `i`-th level.
    pub fn level_parameter(&self, i: usize) -> f64 {
        match self.kind {
            ChainKind::Halfspace => i as f64 * 22.0 * self.delta,
            ChainKind::GromovProduct => 4.0 * i as f64 * self.delta,
        }
    }

    pub fn formula(&self) -> String {
        match self.kind {
            ChainKind::Halfspace => format!("max(min(d, d/22), t - 6d), d = {}", self.delta),
            ChainKind::GromovProduct => format!("max(t - 2(d + 2), d - 2), d = {}", self.delta),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiChain {
    pub phi: PhiFunction,
    /// `Φ(0)`, the spacing constant of the chain.
    pub c0: f64,
    /// Membership masks of `V_1 ⊃ V_2 ⊃ …`.
    pub levels: Vec<Vec<bool>>,
    /// Chain basepoints `x_i ∈ ∂V_i`.
    pub basepoints: Vec<usize>,
    pub ray: Vec<usize>,
}

impl PhiChain {
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn members(&self, i: usize) -> Vec<usize> {
        self.levels[i].iter().enumerate().filter(|(_, &m)| m).map(|(v, _)| v).collect()
    }
}

/// Vertices outside `mask` with a neighbour inside it.
pub fn outer_boundary(space: &SampledSpace, mask: &[bool]) -> Vec<usize> {
    (0..space.len())
        .filter(|&v| !mask[v] && space.neighbours(v).iter().any(|&(w, _)| mask[w]))
        .collect()
}

/// Builds `m` nested levels along a conformal geodesic ray starting at the
/// ray's first vertex.
pub fn build_phi_chain(
    metric: &PathMetric<'_>,
    ray: &GeodesicPath,
    kind: ChainKind,
    delta: f64,
    m: usize,
) -> Result<PhiChain> {
    if !(delta > 0.0) {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    if m < 2 {
        return Err(invalid(format!("a chain needs at least two levels, got {m}")));
    }
    let phi = PhiFunction { kind, delta };
    let required = phi.level_parameter(m);
    if ray.conformal_length < required {
        return Err(Error::RayTooShort { length: ray.conformal_length, required });
    }
    let space = metric.space();
    let mut levels = Vec::with_capacity(m);
    let mut basepoints = Vec::with_capacity(m);
    match kind {
        ChainKind::Halfspace => {
            for i in 1..=m {
                let k = ray.index_at_conformal(phi.level_parameter(i));
                let near = metric.tree_from(&ray.vertices[..=k]).dist;
                let far = metric.tree_from(&ray.vertices[k..]).dist;
                levels.push((0..space.len()).map(|v| far[v] < near[v]).collect());
                basepoints.push(ray.vertices[k]);
            }
        }
        ChainKind::GromovProduct => {
            let p = ray.start();
            let from_p = metric.distances(p);
            for i in 1..=m {
                let t = phi.level_parameter(i);
                let k = ray.index_at_conformal(t);
                let anchor = ray.vertices[k];
                let from_anchor = metric.distances(anchor);
                let level = t - 2.0 * delta;
                let mask: Vec<bool> = (0..space.len())
                    .map(|x| 0.5 * (from_p[x] + from_p[anchor] - from_anchor[x]) >= level)
                    .collect();
                // Last ray vertex before the level set.
                let j = ray.vertices.iter().rposition(|&v| !mask[v]).unwrap_or(0);
                basepoints.push(ray.vertices[j]);
                levels.push(mask);
            }
        }
    }
    Ok(PhiChain { phi, c0: phi.eval(0.0), levels, basepoints, ray: ray.vertices.clone() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCheck {
    pub level: usize,
    pub nested: bool,
    pub basepoint_on_boundary: bool,
    /// `d(x_i, x_{i+1})`; `None` for the last level.
    pub spacing: Option<f64>,
    pub spacing_ok: bool,
    /// Smallest `d(x, V_{i+1}) - Φ(d(x, x_i))` over `x ∈ ∂V_i`.
    pub separation_margin: f64,
    pub witness: Option<usize>,
    pub boundary_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainValidation {
    pub pass: bool,
    pub levels: Vec<LevelCheck>,
}

/// Checks nesting, basepoint spacing `c0 ≤ d(x_i, x_{i+1}) ≤ 1/c0` and the
/// separation `d(x, V_{i+1}) ≥ Φ(d(x, x_i))` on every boundary vertex.
pub fn validate_phi_chain(chain: &PhiChain, metric: &PathMetric<'_>) -> Result<ChainValidation> {
    if chain.is_empty() {
        return Err(invalid("empty chain"));
    }
    let space = metric.space();
    let c0 = chain.c0;
    let mut levels = Vec::new();
    for i in 0..chain.len() {
        let mask = &chain.levels[i];
        let boundary = outer_boundary(space, mask);
        let x_i = chain.basepoints[i];
        let basepoint_on_boundary = boundary.binary_search(&x_i).is_ok();
        let mut check = LevelCheck {
            level: i + 1,
            nested: true,
            basepoint_on_boundary,
            spacing: None,
            spacing_ok: true,
            separation_margin: f64::INFINITY,
            witness: None,
            boundary_size: boundary.len(),
        };
        if i + 1 < chain.len() {
            let next = &chain.levels[i + 1];
            check.nested = next.iter().zip(mask).all(|(&n, &c)| !n || c);
            let from_x = metric.distances(x_i);
            let d = from_x[chain.basepoints[i + 1]];
            check.spacing = Some(d);
            check.spacing_ok = c0 > 0.0 && c0 <= d && d <= 1.0 / c0;
            let sources: Vec<usize> = (0..space.len()).filter(|&v| next[v]).collect();
            let to_next = if sources.is_empty() {
                vec![f64::INFINITY; space.len()]
            } else {
                metric.tree_from(&sources).dist
            };
            for &x in &boundary {
                let margin = to_next[x] - chain.phi.eval(from_x[x]);
                if margin < check.separation_margin {
                    check.separation_margin = margin;
                    check.witness = Some(x);
                }
            }
        }
        levels.push(check);
    }
    let pass = levels.iter().all(|l| {
        l.nested && l.basepoint_on_boundary && l.spacing_ok && l.separation_margin >= 0.0
    });
    Ok(ChainValidation { pass, levels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn halfspace_phi_at_zero() {
        let phi = PhiFunction { kind: ChainKind::Halfspace, delta: 1.0 };
        assert_eq!(phi.eval(0.0), 1.0 / 22.0);
        assert_eq!(phi.eval(10.0), 4.0);
        let g = PhiFunction { kind: ChainKind::GromovProduct, delta: 3.0 };
        assert_eq!(g.eval(0.0), 1.0);
        assert_eq!(g.eval(20.0), 10.0);
    }
}
