use serde::{Deserialize, Serialize};

use super::space::{dist, SampledSpace, VertexRole};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DensityMode {
    InvDistSigma,
    SkinModel,
    Hybrid,
    Custom,
}

/// How to build a density on a space.
#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec {
    /// `1 / dist(v, Σ)`.
    InvDistSigma,
    /// `max{|A|(v), Λ / dist(v, Σ)}` with per-vertex curvature norms.
    SkinModel { curvature: Vec<f64>, lambda: f64 },
    /// `1/ρ = min{L · dist(v, ∂D), δ(v)}` for a given skin reciprocal `δ`.
    Hybrid { lipschitz: f64, skin_delta: Vec<f64> },
    Custom(Vec<f64>),
}

/// Positive per-vertex conformal density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityField {
    mode: DensityMode,
    rho: Vec<f64>,
    delta: Vec<f64>,
    lipschitz: f64,
}

/// Reciprocal of the hybrid density.
pub fn hybrid_delta(lipschitz: f64, boundary_distance: f64, skin_delta: f64) -> f64 {
    (lipschitz * boundary_distance).min(skin_delta)
}

fn sigma_distances(space: &SampledSpace) -> Result<Vec<f64>> {
    (0..space.len())
        .map(|v| {
            let d = space.dist_to_sigma(v);
            if d > 0.0 && d.is_finite() {
                Ok(d)
            } else {
                Err(Error::OnSingularSet { vertex: v, dist: d })
            }
        })
        .collect()
}

fn check_len(space: &SampledSpace, values: &[f64], what: &str) -> Result<()> {
    if values.len() != space.len() {
        return Err(invalid(format!("{what} has {} values for {} vertices", values.len(), space.len())));
    }
    Ok(())
}

/// Builds a density field on `space`.
pub fn attach_density(space: &SampledSpace, spec: &DensitySpec) -> Result<DensityField> {
    let (mode, rho) = match spec {
        DensitySpec::InvDistSigma => {
            let d = sigma_distances(space)?;
            (DensityMode::InvDistSigma, d.iter().map(|x| 1.0 / x).collect())
        }
        DensitySpec::SkinModel { curvature, lambda } => {
            if !(*lambda > 0.0) {
                return Err(invalid(format!("skin constant must be positive, got {lambda}")));
            }
            check_len(space, curvature, "curvature")?;
            if curvature.iter().any(|a| !(*a >= 0.0)) {
                return Err(invalid("curvature norms must be non-negative"));
            }
            let d = sigma_distances(space)?;
            let rho = curvature.iter().zip(&d).map(|(a, dv)| a.max(lambda / dv)).collect();
            (DensityMode::SkinModel, rho)
        }
        DensitySpec::Hybrid { lipschitz, skin_delta } => {
            if !(*lipschitz > 0.0) {
                return Err(invalid(format!("Lipschitz constant must be positive, got {lipschitz}")));
            }
            check_len(space, skin_delta, "skin reciprocal")?;
            let boundary: Vec<&[f64]> = (0..space.len())
                .filter(|&v| space.role(v) == VertexRole::DomainBoundary)
                .map(|v| space.coords(v))
                .collect();
            if boundary.is_empty() {
                return Err(invalid("hybrid density needs domain-boundary vertices"));
            }
            let mut rho = Vec::with_capacity(space.len());
            for v in 0..space.len() {
                let db = boundary.iter().map(|b| dist(b, space.coords(v))).fold(f64::INFINITY, f64::min);
                // Boundary vertices themselves get the spacing to the next
                // vertex as distance so the density stays finite.
                let db = if db == 0.0 {
                    space.neighbours(v).iter().map(|&(_, e)| space.edges()[e].length).fold(f64::INFINITY, f64::min)
                } else {
                    db
                };
                let d = hybrid_delta(*lipschitz, db, skin_delta[v]);
                if !(d > 0.0) {
                    return Err(Error::NonPositive(format!("hybrid reciprocal at vertex {v}")));
                }
                rho.push(1.0 / d);
            }
            (DensityMode::Hybrid, rho)
        }
        DensitySpec::Custom(values) => {
            check_len(space, values, "density")?;
            (DensityMode::Custom, values.clone())
        }
    };
    DensityField::new(space, mode, rho)
}

impl DensityField {
    pub fn new(space: &SampledSpace, mode: DensityMode, rho: Vec<f64>) -> Result<Self> {
        check_len(space, &rho, "density")?;
        if let Some(v) = rho.iter().position(|r| !(*r > 0.0 && r.is_finite())) {
            return Err(Error::NonPositive(format!("density {} at vertex {v}", rho[v])));
        }
        let delta: Vec<f64> = rho.iter().map(|r| 1.0 / r).collect();
        let lipschitz = space
            .edges()
            .iter()
            .map(|e| (delta[e.a] - delta[e.b]).abs() / e.length)
            .fold(0.0, f64::max);
        Ok(Self { mode, rho, delta, lipschitz })
    }

    pub fn constant(space: &SampledSpace, value: f64) -> Result<Self> {
        Self::new(space, DensityMode::Custom, vec![value; space.len()])
    }

    pub fn mode(&self) -> DensityMode {
        self.mode
    }

    pub fn rho(&self, v: usize) -> f64 {
        self.rho[v]
    }

    pub fn delta(&self, v: usize) -> f64 {
        self.delta[v]
    }

    pub fn values(&self) -> &[f64] {
        &self.rho
    }

    pub fn deltas(&self) -> &[f64] {
        &self.delta
    }

    /// Empirical Lipschitz constant of `δ = 1/ρ` over edges.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// Trapezoid-rule conformal length of an edge.
    pub fn edge_weight(&self, a: usize, b: usize, length: f64) -> f64 {
        0.5 * (self.rho[a] + self.rho[b]) * length
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::space::{build_space, DomainSpec};

    fn disk() -> SampledSpace {
        build_space(&DomainSpec::PuncturedDisk { inner_radius: 0.01 }, 16).unwrap()
    }

    #[test]
    fn inverse_distance_at_half_radius() {
        let s = SampledSpace::from_text("V 0 0.5 0\nV 1 0.75 0\nE 0 1 0.25\nS 0 0\n").unwrap();
        let d = attach_density(&s, &DensitySpec::InvDistSigma).unwrap();
        assert_eq!(d.rho(0), 2.0);
        assert_eq!(d.delta(0) * d.rho(0), 1.0);
    }

    #[test]
    fn lipschitz_of_distance_is_at_most_one() {
        let s = disk();
        let d = attach_density(&s, &DensitySpec::InvDistSigma).unwrap();
        assert!(d.lipschitz() <= 1.0 + 1e-12);
        assert!(d.lipschitz() > 0.9);
        for v in 0..s.len() {
            assert!((d.rho(v) * s.dist_to_sigma(v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn skin_model_dominates_both_terms() {
        let s = disk();
        let curv: Vec<f64> = (0..s.len()).map(|v| 3.0 / s.dist_to_sigma(v).sqrt()).collect();
        let d = attach_density(&s, &DensitySpec::SkinModel { curvature: curv.clone(), lambda: 1.0 }).unwrap();
        for v in 0..s.len() {
            assert!(d.rho(v) >= curv[v]);
            assert!(d.rho(v) >= 1.0 / s.dist_to_sigma(v));
        }
    }

    #[test]
    fn hybrid_is_min_of_terms() {
        assert_eq!(hybrid_delta(1.0, 0.1, 0.3), 0.1);
        assert_eq!(1.0 / hybrid_delta(1.0, 0.1, 0.3), 10.0);
        assert_eq!(hybrid_delta(2.0, 0.5, 0.3), 0.3);
    }

    #[test]
    fn rejects_bad_parameters() {
        let s = disk();
        assert!(attach_density(&s, &DensitySpec::SkinModel { curvature: vec![1.0; s.len()], lambda: -1.0 }).is_err());
        assert!(attach_density(&s, &DensitySpec::Custom(vec![0.0; s.len()])).is_err());
        assert!(attach_density(&s, &DensitySpec::Custom(vec![1.0; 3])).is_err());
    }

    #[test]
    fn vertex_on_sigma_rejected() {
        use crate::metric::space::{Edge, SampleRegion, SigmaSet};
        let s = SampledSpace::from_parts(
            "tip",
            vec![vec![0.0, 0.0], vec![1.0, 0.0]],
            vec![VertexRole::Interior; 2],
            vec![0.5, 0.5],
            vec![Edge { a: 0, b: 1, length: 1.0, conductance: 1.0 }],
            SigmaSet::Tip,
            1,
            SampleRegion::Vertices,
        )
        .unwrap();
        assert!(matches!(
            attach_density(&s, &DensitySpec::InvDistSigma),
            Err(Error::OnSingularSet { vertex: 0, .. })
        ));
    }
}
