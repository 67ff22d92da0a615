//! Closed-form geometry of the Lawson cones over `S^p(a) × S^q(b)` and their
//! export as sampled spaces.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::{smallest_eigenpair, EigenOptions};
use crate::metric::{DensityField, Edge, SampleRegion, SampledSpace, SigmaSet, VertexRole};

/// Lawson cone `C^{p,q}` in `R^{p+q+2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeSpec {
    pub p: usize,
    pub q: usize,
    /// Cone dimension `p + q + 1`.
    pub n: usize,
    /// Radius of the `S^p` factor of the link.
    pub a_link: f64,
    /// Radius of the `S^q` factor of the link.
    pub b_link: f64,
    /// `|A|` of the cone at `r = 1`.
    pub a_link_norm: f64,
}

pub fn make_lawson_cone(p: usize, q: usize) -> Result<ConeSpec> {
    if p == 0 || q == 0 {
        return Err(invalid(format!("sphere dimensions must be positive, got p = {p}, q = {q}")));
    }
    let s = (p + q) as f64;
    Ok(ConeSpec {
        p,
        q,
        n: p + q + 1,
        a_link: (p as f64 / s).sqrt(),
        b_link: (q as f64 / s).sqrt(),
        a_link_norm: s.sqrt(),
    })
}

impl ConeSpec {
    pub fn simons() -> Self {
        make_lawson_cone(3, 3).expect("valid dimensions")
    }

    /// Cones with `p + q ≥ 6` are in the area-minimizing regime.
    pub fn certified_minimizing(&self) -> bool {
        self.p + self.q >= 6
    }

    pub fn warning(&self) -> Option<String> {
        (!self.certified_minimizing()).then(|| {
            format!("cone C({},{}) has p + q < 6 and is outside the certified-minimizing regime", self.p, self.q)
        })
    }

    /// Mean curvature of the link in the unit sphere; zero for minimal links.
    pub fn minimality_residual(&self) -> f64 {
        self.p as f64 * (self.b_link / self.a_link) - self.q as f64 * (self.a_link / self.b_link)
    }

    /// Principal curvatures of the link in the unit sphere with their
    /// multiplicities.
    pub fn link_principal_curvatures(&self) -> [(f64, usize); 2] {
        [(self.b_link / self.a_link, self.p), (-self.a_link / self.b_link, self.q)]
    }
}

fn positive_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("radius must be positive, got {r}")))
    }
}

/// `|A|(r) = √(p+q) / r`.
pub fn second_fundamental_norm(cone: &ConeSpec, r: f64) -> Result<f64> {
    positive_radius(r)?;
    Ok(cone.a_link_norm / r)
}

/// `scal = −|A|² = −(p+q) / r²`.
pub fn scalar_curvature(cone: &ConeSpec, r: f64) -> Result<f64> {
    positive_radius(r)?;
    Ok(-((cone.p + cone.q) as f64) / (r * r))
}

/// The model skin density `max{|A|, Λ/dist(·, tip)}` on a cone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeSkin {
    pub lambda: f64,
    /// Link value `⟨A⟩^×`, constant on product links.
    pub across: f64,
}

impl ConeSkin {
    pub fn rho(&self, r: f64) -> f64 {
        self.across / r
    }

    pub fn delta(&self, r: f64) -> f64 {
        r / self.across
    }
}

pub fn skin_density_on_cone(cone: &ConeSpec, lambda: f64) -> Result<ConeSkin> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("skin constant must be positive, got {lambda}")));
    }
    Ok(ConeSkin { lambda, across: cone.a_link_norm.max(lambda) })
}

/// A point of the cone as radius and two unit link directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConePoint {
    pub r: f64,
    /// Unit vector in `R^{p+1}`.
    pub omega1: Vec<f64>,
    /// Unit vector in `R^{q+1}`.
    pub omega2: Vec<f64>,
}

impl ConePoint {
    pub fn new(cone: &ConeSpec, r: f64, omega1: Vec<f64>, omega2: Vec<f64>) -> Result<Self> {
        positive_radius(r)?;
        if omega1.len() != cone.p + 1 || omega2.len() != cone.q + 1 {
            return Err(invalid("link direction has the wrong dimension"));
        }
        let unit = |v: Vec<f64>| -> Result<Vec<f64>> {
            let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(n > 0.0) {
                return Err(invalid("link direction must be non-zero"));
            }
            Ok(v.into_iter().map(|x| x / n).collect())
        };
        Ok(Self { r, omega1: unit(omega1)?, omega2: unit(omega2)? })
    }

    /// Point whose link directions lie on the first coordinate circles.
    pub fn on_torus(cone: &ConeSpec, r: f64, theta: f64, phi: f64) -> Result<Self> {
        let mut w1 = vec![0.0; cone.p + 1];
        let mut w2 = vec![0.0; cone.q + 1];
        w1[0] = theta.cos();
        w1[1] = theta.sin();
        w2[0] = phi.cos();
        w2[1] = phi.sin();
        Self::new(cone, r, w1, w2)
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self { r: self.r * t, ..self.clone() }
    }

    /// Position in `R^{p+q+2}`.
    pub fn embedding(&self, cone: &ConeSpec) -> Vec<f64> {
        self.omega1
            .iter()
            .map(|w| self.r * cone.a_link * w)
            .chain(self.omega2.iter().map(|w| self.r * cone.b_link * w))
            .collect()
    }
}

/// Nontangential approach region `{δ(x) > ρ_ap · d(x, tip)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PencilSpec {
    pub aperture: f64,
}

/// Rays through the tip are geodesics, so `d(x, tip) = r`.
pub fn pencil_contains(skin: &ConeSkin, x: &ConePoint, pencil: &PencilSpec) -> bool {
    skin.delta(x.r) > pencil.aperture * x.r
}

/// Product mesh of geometric radii with two great circles of the link.
///
/// Vertex `(i, j, k)` sits at radius `r_min · h^i` with link angles
/// `θ_j = 2πj/link_steps` on `S^p(a)` and `φ_k` on `S^q(b)`, embedded in
/// four dimensions. Cell volumes and conductances carry the weight
/// `r^{n-1}` of the full cone so that radial functions see the cone's
/// Laplacian. The innermost ring is the collar of the tip, the outermost
/// ring the truncation at infinity.
pub fn export_cone_graph(
    cone: &ConeSpec,
    r_min: f64,
    r_max: f64,
    radial_steps: usize,
    link_steps: usize,
) -> Result<SampledSpace> {
    if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
        return Err(invalid(format!("cone radii must satisfy 0 < r_min < r_max, got {r_min}, {r_max}")));
    }
    if radial_steps < 2 || link_steps < 3 {
        return Err(invalid(format!(
            "need at least 2 radial and 3 link steps, got {radial_steps}, {link_steps}"
        )));
    }
    let (a, b) = (cone.a_link, cone.b_link);
    let nr = radial_steps;
    let nl = link_steps;
    let h = (r_max / r_min).powf(1.0 / (nr - 1) as f64);
    let radii: Vec<f64> = (0..nr).map(|i| r_min * h.powi(i as i32)).collect();
    let dt = 2.0 * PI / nl as f64;
    let idx = |i: usize, j: usize, k: usize| (i * nl + j) * nl + k;
    let w = (cone.n - 1) as i32;

    let face_lo = |i: usize| if i == 0 { radii[0] } else { 0.5 * (radii[i - 1] + radii[i]) };
    let face_hi = |i: usize| if i + 1 == nr { radii[i] } else { 0.5 * (radii[i] + radii[i + 1]) };

    let mut coords = Vec::with_capacity(nr * nl * nl);
    let mut roles = Vec::with_capacity(nr * nl * nl);
    let mut volumes = Vec::with_capacity(nr * nl * nl);
    for (i, &r) in radii.iter().enumerate() {
        let dr = face_hi(i) - face_lo(i);
        let role = if i == 0 {
            VertexRole::SigmaCollar
        } else if i + 1 == nr {
            VertexRole::Infinity
        } else {
            VertexRole::Interior
        };
        for j in 0..nl {
            let t = j as f64 * dt;
            for k in 0..nl {
                let f = k as f64 * dt;
                coords.push(vec![r * a * t.cos(), r * a * t.sin(), r * b * f.cos(), r * b * f.sin()]);
                roles.push(role);
                volumes.push(r.powi(w) * dr * a * dt * b * dt);
            }
        }
    }

    let mut edges = Vec::new();
    for i in 0..nr {
        for j in 0..nl {
            for k in 0..nl {
                let v = idx(i, j, k);
                for di in 0..=1usize {
                    for dj in -1..=1isize {
                        for dk in -1..=1isize {
                            // Forward half of the 26-neighbourhood.
                            if di == 0 && (dj < 0 || (dj == 0 && dk <= 0)) {
                                continue;
                            }
                            let i2 = i + di;
                            if i2 >= nr {
                                continue;
                            }
                            let j2 = (j as isize + dj).rem_euclid(nl as isize) as usize;
                            let k2 = (k as isize + dk).rem_euclid(nl as isize) as usize;
                            let u = idx(i2, j2, k2);
                            let rm = 0.5 * (radii[i] + radii[i2]);
                            let dr = radii[i2] - radii[i];
                            let lt = rm * a * dt * dj.unsigned_abs() as f64;
                            let lf = rm * b * dt * dk.unsigned_abs() as f64;
                            let length = (dr * dr + lt * lt + lf * lf).sqrt();
                            let conductance = match (di, dj, dk) {
                                (1, 0, 0) => rm.powi(w) * a * dt * b * dt / dr,
                                (0, 1, 0) => {
                                    radii[i].powi(w - 2) * (face_hi(i) - face_lo(i)) * b * dt / (a * dt)
                                }
                                (0, 0, 1) => {
                                    radii[i].powi(w - 2) * (face_hi(i) - face_lo(i)) * a * dt / (b * dt)
                                }
                                _ => 0.0,
                            };
                            edges.push(Edge { a: v.min(u), b: v.max(u), length, conductance });
                        }
                    }
                }
            }
        }
    }
    let unit_ring = radii
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.ln().abs().total_cmp(&y.1.ln().abs()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    SampledSpace::from_parts(
        format!("cone({},{})/{nr}x{nl}", cone.p, cone.q),
        coords,
        roles,
        volumes,
        edges,
        SigmaSet::Tip,
        idx(unit_ring, 0, 0),
        SampleRegion::Cone { r_min, r_max, a, b },
    )
}

/// `|A|` at every vertex of a space embedded by [`export_cone_graph`].
pub fn curvature_on_graph(cone: &ConeSpec, space: &SampledSpace) -> Result<Vec<f64>> {
    (0..space.len()).map(|v| second_fundamental_norm(cone, space.dist_to_sigma(v))).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyEstimate {
    /// Smallest Rayleigh quotient.
    pub tau: f64,
    /// Minimizer on all vertices (zero on the Dirichlet set).
    pub ground_state: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub dirichlet_vertices: usize,
}

/// Best constant `τ` with `∫|∇f|² (+ ∫|A|²f²) ≥ τ ∫ρ²f²` over functions
/// vanishing on every non-interior vertex. The curvature term is included
/// when `curvature` is given.
pub fn hardy_constant(
    space: &SampledSpace,
    density: &DensityField,
    curvature: Option<&[f64]>,
    opts: EigenOptions,
) -> Result<HardyEstimate> {
    if density.len() != space.len() {
        return Err(invalid("density does not match the space"));
    }
    if let Some(c) = curvature {
        if c.len() != space.len() {
            return Err(invalid("curvature does not match the space"));
        }
    }
    let interior: Vec<usize> = (0..space.len()).filter(|&v| space.role(v) == VertexRole::Interior).collect();
    if interior.is_empty() {
        return Err(invalid("no interior vertices"));
    }
    let mut k = space.laplacian();
    if let Some(c) = curvature {
        let pot: Vec<f64> = (0..space.len()).map(|v| space.volume(v) * c[v] * c[v]).collect();
        k = k.add_diagonal(1.0, &pot);
    }
    let k = k.principal_submatrix(&interior);
    let mass: Vec<f64> = interior.iter().map(|&v| space.volume(v) * density.rho(v).powi(2)).collect();
    let pair = smallest_eigenpair(&k, &mass, opts)?;
    let mut ground_state = vec![0.0; space.len()];
    for (x, &v) in pair.vector.iter().zip(&interior) {
        ground_state[v] = *x;
    }
    Ok(HardyEstimate {
        tau: pair.value,
        ground_state,
        iterations: pair.iterations,
        residual: pair.residual,
        dirichlet_vertices: space.len() - interior.len(),
    })
}
