use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::density::{attach_density, DensityField, DensitySpec};
use super::geodesic::{GeodesicPath, PathMetric};
use super::space::SampledSpace;
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniformityReport {
    pub pass: bool,
    /// `l_g(γ) / d_g(p, q)`.
    pub length_ratio: f64,
    /// Largest `l_min(z) / δ(z)` along the path.
    pub cone_ratio: f64,
    /// Vertex attaining `cone_ratio`.
    pub witness: Option<usize>,
    /// `max(length_ratio, cone_ratio) / c`; the curve passes iff this is at most one.
    pub violation: f64,
}

/// Checks the two skin-uniformity conditions `l_g ≤ c·d_g(p,q)` and
/// `l_min(z) ≤ c·δ(z)` along `path`.
pub fn check_uniform_curve(
    space: &SampledSpace,
    path: &GeodesicPath,
    density: &DensityField,
    c: f64,
) -> Result<UniformityReport> {
    if !(c > 0.0) {
        return Err(invalid(format!("uniformity constant must be positive, got {c}")));
    }
    let (p, q) = (path.start(), path.end());
    if p == q {
        return Ok(UniformityReport { pass: true, length_ratio: 1.0, cone_ratio: 0.0, witness: None, violation: 0.0 });
    }
    let d = PathMetric::base(space).distance(p, q)?;
    let length_ratio = path.base_length / d;
    let mut cone_ratio = 0.0;
    let mut witness = None;
    for (i, &z) in path.vertices.iter().enumerate() {
        let r = path.l_min(i) / density.delta(z);
        if r > cone_ratio {
            cone_ratio = r;
            witness = Some(z);
        }
    }
    let violation = length_ratio.max(cone_ratio) / c;
    Ok(UniformityReport { pass: violation <= 1.0, length_ratio, cone_ratio, witness, violation })
}

/// `64 a⁴ exp(32 a⁴)`.
pub fn twisted_cone_constant(a: f64) -> f64 {
    64.0 * a.powi(4) * (32.0 * a.powi(4)).exp()
}

/// `exp(4a² log(1 + 4 b(a))) - 1`.
pub fn quasi_geodesic_constant(a: f64) -> f64 {
    (4.0 * a * a * (1.0 + 4.0 * twisted_cone_constant(a)).ln()).exp() - 1.0
}

/// Uniformity constant guaranteed for conformal geodesics on an
/// `a`-skin-uniform space. Overflows to infinity for moderate `a`.
pub fn uniformity_bound(a: f64) -> f64 {
    1.0 + quasi_geodesic_constant(a) * (4.0 * a * a + 1.0) + 8.0 * a * a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkinUniformity {
    pub c_measured: f64,
    pub c_bound: f64,
    pub holds: bool,
}

/// Measures the uniformity constant of a conformal geodesic and compares it
/// with the theoretical bound for parameter `a`.
pub fn skin_uniformity_from_geodesic(
    space: &SampledSpace,
    path: &GeodesicPath,
    density: &DensityField,
    a: f64,
) -> Result<SkinUniformity> {
    if !(a >= 1.0) {
        return Err(invalid(format!("skin-uniformity parameter must be at least 1, got {a}")));
    }
    let d = PathMetric::conformal(space, density).distance(path.start(), path.end())?;
    let tol = 1e-9 * d.max(1.0);
    if path.conformal_length > d + tol {
        return Err(Error::NotGeodesic { length: path.conformal_length, distance: d });
    }
    let rep = check_uniform_curve(space, path, density, 1.0)?;
    let c_measured = if path.start() == path.end() { 1.0 } else { rep.length_ratio.max(rep.cone_ratio) };
    let c_bound = uniformity_bound(a);
    Ok(SkinUniformity { c_measured, c_bound, holds: c_measured <= c_bound })
}

fn sample_pairs(space: &SampledSpace, count: usize, seed: u64) -> Vec<(usize, Vec<usize>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sources = ((count as f64).sqrt().ceil() as usize).max(1);
    let per = count.div_ceil(sources);
    let mut out = Vec::with_capacity(sources);
    let mut left = count;
    for _ in 0..sources {
        if left == 0 {
            break;
        }
        let x = space.sample_vertices(&mut rng, 1)[0];
        let k = per.min(left);
        out.push((x, space.sample_vertices(&mut rng, k)));
        left -= k;
    }
    out
}

/// Smallest `a ≥ 1` for which every sampled conformal geodesic is an
/// `a`-uniform curve.
pub fn fit_skin_uniformity(space: &SampledSpace, density: &DensityField, pair_samples: usize, seed: u64) -> f64 {
    let metric = PathMetric::conformal(space, density);
    let base = PathMetric::base(space);
    sample_pairs(space, pair_samples, seed)
        .par_iter()
        .map(|(x, ys)| {
            let tree = metric.tree(*x);
            let dg = base.distances(*x);
            let mut worst = 1.0f64;
            for &y in ys {
                if y == *x {
                    continue;
                }
                let Some(vs) = tree.path_to(y) else { continue };
                let path = GeodesicPath::along(space, Some(density), vs);
                worst = worst.max(path.base_length / dg[y]);
                for (i, &z) in path.vertices.iter().enumerate() {
                    worst = worst.max(path.l_min(i) / density.delta(z));
                }
            }
            worst
        })
        .reduce(|| 1.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub name: String,
    /// Largest `lhs / rhs` over the sampled pairs.
    pub worst_ratio: f64,
    pub worst_pair: Option<(usize, usize)>,
    /// Pairs with `lhs > (1 + slack) · rhs`.
    pub violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub pairs: usize,
    pub lipschitz: f64,
    pub a: f64,
    pub slack: f64,
    pub checks: Vec<InequalityCheck>,
}

impl InequalityReport {
    pub fn passes(&self) -> bool {
        self.checks.iter().all(|c| c.violations == 0)
    }

    pub fn check(&self, name: &str) -> Option<&InequalityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Names of the compared inequalities, in report order.
pub const INEQUALITIES: [&str; 5] = [
    "skin-vs-quasihyperbolic",
    "quasihyperbolic-vs-log",
    "upper-log",
    "lower-log",
    "log-delta",
];

/// Lower/upper bounds relating base, quasi-hyperbolic and skin distances for
/// one pair, as `(lhs, rhs)` in [`INEQUALITIES`] order.
#[allow(clippy::too_many_arguments)]
pub fn inequality_terms(
    d_rho: f64,
    k: f64,
    d_g: f64,
    dist_x: f64,
    dist_y: f64,
    rho_x: f64,
    rho_y: f64,
    lipschitz: f64,
    a: f64,
) -> [(f64, f64); 5] {
    let rho_max = rho_x.max(rho_y);
    let j = 0.5 * ((1.0 + d_g / dist_x) * (1.0 + d_g / dist_y)).ln();
    [
        (lipschitz * k, d_rho),
        (lipschitz * j, lipschitz * k),
        (d_rho, 4.0 * a * a * (1.0 + d_g * rho_max).ln()),
        ((1.0 + d_g * rho_max).ln(), d_rho),
        ((rho_x.ln() - rho_y.ln()).abs(), d_rho),
    ]
}

/// Samples pairs and evaluates the inequality chain between skin,
/// quasi-hyperbolic and base distances, allowing a relative `slack`.
pub fn metric_inequality_suite(
    space: &SampledSpace,
    density: &DensityField,
    pair_samples: usize,
    a: f64,
    seed: u64,
    slack: f64,
) -> Result<InequalityReport> {
    let qh = attach_density(space, &DensitySpec::InvDistSigma)?;
    let m_rho = PathMetric::conformal(space, density);
    let m_k = PathMetric::conformal(space, &qh);
    let m_g = PathMetric::base(space);
    let lipschitz = density.lipschitz();
    let groups = sample_pairs(space, pair_samples, seed);
    let rows: Vec<Vec<(usize, usize, [(f64, f64); 5])>> = groups
        .par_iter()
        .map(|(x, ys)| {
            let (dr, dk, dg) = (m_rho.distances(*x), m_k.distances(*x), m_g.distances(*x));
            ys.iter()
                .map(|&y| {
                    let t = inequality_terms(
                        dr[y],
                        dk[y],
                        dg[y],
                        space.dist_to_sigma(*x),
                        space.dist_to_sigma(y),
                        density.rho(*x),
                        density.rho(y),
                        lipschitz,
                        a,
                    );
                    (*x, y, t)
                })
                .collect()
        })
        .collect();
    let mut checks: Vec<InequalityCheck> = INEQUALITIES
        .iter()
        .map(|n| InequalityCheck { name: n.to_string(), worst_ratio: 0.0, worst_pair: None, violations: 0 })
        .collect();
    let mut pairs = 0;
    for (x, y, terms) in rows.into_iter().flatten() {
        pairs += 1;
        for (c, (lhs, rhs)) in checks.iter_mut().zip(terms) {
            let ratio = if rhs > 0.0 {
                lhs / rhs
            } else if lhs <= 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            if ratio > c.worst_ratio {
                c.worst_ratio = ratio;
                c.worst_pair = Some((x, y));
            }
            if lhs > (1.0 + slack) * rhs {
                c.violations += 1;
            }
        }
    }
    Ok(InequalityReport { pairs, lipschitz, a, slack, checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::density::attach_density;
    use crate::metric::space::{build_space, DomainSpec};

    #[test]
    fn bound_constants() {
        let b1 = 64.0 * 32f64.exp();
        assert!((twisted_cone_constant(1.0) / b1 - 1.0).abs() < 1e-14);
        let bstar = (1.0 + 4.0 * b1).powi(4) - 1.0;
        assert!((quasi_geodesic_constant(1.0) / bstar - 1.0).abs() < 1e-10);
        assert!(uniformity_bound(1.0) > 1e60);
        assert_eq!(uniformity_bound(3.0), f64::INFINITY);
    }

    #[test]
    fn degenerate_path_passes() {
        let s = build_space(&DomainSpec::PuncturedDisk { inner_radius: 0.05 }, 16).unwrap();
        let rho = attach_density(&s, &DensitySpec::InvDistSigma).unwrap();
        let p = GeodesicPath::along(&s, Some(&rho), vec![3]);
        assert!(check_uniform_curve(&s, &p, &rho, 0.5).unwrap().pass);
    }

    #[test]
    fn single_edge_measures_one() {
        let s = build_space(&DomainSpec::PuncturedDisk { inner_radius: 0.05 }, 16).unwrap();
        let rho = attach_density(&s, &DensitySpec::InvDistSigma).unwrap();
        let e = s.edges()[0];
        let g = PathMetric::conformal(&s, &rho).geodesic(e.a, e.b).unwrap();
        assert_eq!(g.len(), 2);
        let u = skin_uniformity_from_geodesic(&s, &g, &rho, 1.0).unwrap();
        assert_eq!(u.c_measured, 1.0);
        assert!(u.holds);
    }

    #[test]
    fn detour_is_not_geodesic() {
        let s = build_space(&DomainSpec::PuncturedDisk { inner_radius: 0.05 }, 16).unwrap();
        let rho = attach_density(&s, &DensitySpec::InvDistSigma).unwrap();
        let (a, b) = (s.edges()[0].a, s.edges()[0].b);
        let other = s.neighbours(a).iter().map(|&(w, _)| w).find(|&w| w != b && s.neighbours(w).iter().any(|&(u, _)| u == b)).unwrap();
        let p = GeodesicPath::along(&s, Some(&rho), vec![a, other, b]);
        assert!(matches!(skin_uniformity_from_geodesic(&s, &p, &rho, 1.0), Err(Error::NotGeodesic { .. })));
    }

    #[test]
    fn coincident_pair_terms_vanish() {
        let t = inequality_terms(0.0, 0.0, 0.0, 0.3, 0.3, 2.0, 2.0, 1.0, 1.0);
        for (l, r) in t {
            assert_eq!((l, r), (0.0, 0.0));
        }
    }

    #[test]
    fn j_metric_value() {
        // dist 0.1 from the singular set on both ends, base distance 0.2.
        let t = inequality_terms(5.0, 5.0, 0.2, 0.1, 0.1, 10.0, 10.0, 1.0, 1.0);
        assert!((t[1].0 - 3f64.ln()).abs() < 1e-15);
    }
}
