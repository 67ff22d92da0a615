use serde::{Deserialize, Serialize};

use super::operator::{green_function, GridFunction, GridSystem};
use crate::error::{invalid, Error, Result};

/// Weighted boundary nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    pub nodes: Vec<usize>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(nodes: Vec<usize>, weights: Vec<f64>) -> Result<Self> {
        if nodes.len() != weights.len() {
            return Err(invalid("measure nodes and weights differ in length"));
        }
        if weights.iter().any(|w| !(*w >= 0.0 && w.is_finite())) {
            return Err(invalid("measure weights must be finite and non-negative"));
        }
        Ok(Self { nodes, weights })
    }

    pub fn point(node: usize, mass: f64) -> Result<Self> {
        Self::new(vec![node], vec![mass])
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn weight_at(&self, node: usize) -> f64 {
        self.nodes.iter().zip(&self.weights).filter(|(n, _)| **n == node).map(|(_, w)| w).sum()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { nodes: self.nodes.clone(), weights: self.weights.iter().map(|w| w * factor).collect() }
    }

    fn check_support(&self, system: &GridSystem) -> Result<()> {
        for &y in &self.nodes {
            if y >= system.domain.len() || system.position(y).is_some() {
                return Err(invalid(format!("measure support node {y} is not a boundary node")));
            }
        }
        Ok(())
    }
}

/// Free node coupled most strongly to boundary node `y`, with its coupling.
pub fn boundary_neighbour(system: &GridSystem, y: usize) -> Result<(usize, f64)> {
    system
        .stiffness
        .row(y)
        .filter(|&(j, x)| j != y && x < 0.0 && system.position(j).is_some())
        .map(|(j, x)| (j, -x))
        .fold(None, |best: Option<(usize, f64)>, (j, g)| match best {
            Some((_, bg)) if bg >= g => best,
            _ => Some((j, g)),
        })
        .ok_or_else(|| invalid(format!("boundary node {y} has no interior neighbour")))
}

/// Kernels `G(·, p_n) / G(p₀, p_n)` with Cauchy evidence on a compact set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MartinSequence {
    pub poles: Vec<usize>,
    pub normalizers: Vec<f64>,
    pub kernels: Vec<GridFunction>,
    /// Sup-norm differences of consecutive kernels on the compact set.
    pub cauchy: Vec<f64>,
}

impl MartinSequence {
    pub fn limit(&self) -> &GridFunction {
        self.kernels.last().expect("sequence is non-empty")
    }
}

pub fn sup_difference(a: &GridFunction, b: &GridFunction, nodes: &[usize]) -> f64 {
    nodes.iter().map(|&v| (a.values[v] - b.values[v]).abs()).fold(0.0, f64::max)
}

pub fn martin_sequence(system: &GridSystem, basepoint: usize, poles: &[usize], compact: &[usize]) -> Result<MartinSequence> {
    if poles.is_empty() {
        return Err(invalid("empty pole sequence"));
    }
    let mut kernels = Vec::with_capacity(poles.len());
    let mut normalizers = Vec::with_capacity(poles.len());
    for &p in poles {
        let g = green_function(system, p)?;
        let norm = g.values[basepoint];
        if !(norm > 0.0) {
            return Err(Error::NonPositive(format!("normalizer G(p0, {p}) = {norm}")));
        }
        normalizers.push(norm);
        kernels.push(GridFunction { values: g.values.iter().map(|x| x / norm).collect() });
    }
    let cauchy = kernels.windows(2).map(|w| sup_difference(&w[0], &w[1], compact)).collect();
    Ok(MartinSequence { poles: poles.to_vec(), normalizers, kernels, cauchy })
}

/// `u_μ = Σ μ_j k(·; y_j)` with `k(·; y)` the kernel with pole at the
/// interior neighbour of `y`, extended harmonically to `y`.
pub fn martin_integral(system: &GridSystem, basepoint: usize, measure: &DiscreteMeasure) -> Result<GridFunction> {
    measure.check_support(system)?;
    let g0 = green_function(system, basepoint)?;
    let mut rhs = vec![0.0; system.free().len()];
    let mut boundary = vec![0.0; system.domain.len()];
    for (&y, &w) in measure.nodes.iter().zip(&measure.weights) {
        if w == 0.0 {
            continue;
        }
        let (q, g) = boundary_neighbour(system, y)?;
        let norm = g0.values[q];
        if !(norm > 0.0) {
            return Err(Error::NonPositive(format!("normalizer G(p0, {q}) = {norm}")));
        }
        rhs[system.position(q).expect("free neighbour")] += w / norm;
        boundary[y] += w / (g * norm);
    }
    let x = system.solve_free(&rhs)?;
    Ok(GridFunction { values: system.expand(&x, Some(&boundary)) })
}

/// Martin kernel for the boundary node `y`.
pub fn martin_kernel(system: &GridSystem, basepoint: usize, y: usize) -> Result<GridFunction> {
    martin_integral(system, basepoint, &DiscreteMeasure::point(y, 1.0)?)
}

/// `Σ μ_j k_j` from precomputed kernels.
pub fn combine_kernels(kernels: &[GridFunction], weights: &[f64]) -> Result<GridFunction> {
    if kernels.len() != weights.len() {
        return Err(invalid(format!("{} kernels for {} weights", kernels.len(), weights.len())));
    }
    let n = kernels.first().map_or(0, |k| k.values.len());
    if kernels.iter().any(|k| k.values.len() != n) {
        return Err(invalid("kernels live on different domains"));
    }
    let mut values = vec![0.0; n];
    for (k, w) in kernels.iter().zip(weights) {
        values.iter_mut().zip(&k.values).for_each(|(v, x)| *v += w * x);
    }
    Ok(GridFunction { values })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioTrace {
    /// `(distance to z, u_μ / u_ν)` along the path.
    pub points: Vec<(f64, f64)>,
}

impl RatioTrace {
    pub fn last(&self) -> Option<f64> {
        self.points.last().map(|p| p.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FatouReport {
    /// `μ_z / ν_z`.
    pub expected: f64,
    pub nontangential: RatioTrace,
    /// Reported without any convergence claim.
    pub tangential: RatioTrace,
    pub relative_error: f64,
}

pub fn fatou_experiment(
    system: &GridSystem,
    basepoint: usize,
    mu: &DiscreteMeasure,
    nu: &DiscreteMeasure,
    z: usize,
    pencil_path: &[usize],
    tangential_path: &[usize],
) -> Result<FatouReport> {
    let nu_z = nu.weight_at(z);
    if !(nu_z > 0.0) {
        return Err(invalid(format!("reference measure has no mass at node {z}")));
    }
    let expected = mu.weight_at(z) / nu_z;
    let u_mu = martin_integral(system, basepoint, mu)?;
    let u_nu = martin_integral(system, basepoint, nu)?;
    let zc = &system.domain.coords[z];
    let trace = |path: &[usize]| -> Result<RatioTrace> {
        let mut points = Vec::with_capacity(path.len());
        for &v in path {
            let den = u_nu.values[v];
            if !(den > 0.0) {
                return Err(Error::NonPositive(format!("u_nu at node {v}")));
            }
            points.push((crate::metric::space::dist(&system.domain.coords[v], zc), u_mu.values[v] / den));
        }
        Ok(RatioTrace { points })
    };
    let nontangential = trace(pencil_path)?;
    let tangential = trace(tangential_path)?;
    let last = nontangential.last().ok_or_else(|| invalid("empty pencil path"))?;
    let relative_error = if expected == 0.0 { last.abs() } else { (last / expected - 1.0).abs() };
    Ok(FatouReport { expected, nontangential, tangential, relative_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::domain::{disk, GridDomain};
    use crate::potential::operator::{discretize, OperatorSpec};

    fn poisson(x: &[f64], y: &[f64]) -> f64 {
        let r2 = x[0] * x[0] + x[1] * x[1];
        (1.0 - r2) / ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2))
    }

    fn setup(res: usize) -> (GridDomain, GridSystem) {
        let d = disk(res).unwrap();
        let s = discretize(&d, &OperatorSpec::laplacian()).unwrap();
        (d, s)
    }

    fn rim(d: &GridDomain) -> Vec<usize> {
        let p = d.polar().unwrap();
        (0..p.angles.len()).map(|j| p.node(p.rings() - 1, j)).collect()
    }

    #[test]
    fn kernel_normalized_and_poisson() {
        let (d, s) = setup(64);
        let p = d.polar().unwrap();
        let nr = p.rings() - 1;
        let p0 = d.nearest(&[0.0, 0.0]);
        let y = p.node(nr, 0);
        let poles: Vec<usize> = [8, 4, 2, 1].iter().map(|k| p.node(nr - k, 0)).collect();
        let inner: Vec<usize> = (0..d.len()).filter(|&v| d.radius(v) <= 0.5).collect();
        let seq = martin_sequence(&s, p0, &poles, &inner).unwrap();
        assert!(seq.kernels.iter().all(|k| (k.values[p0] - 1.0).abs() < 1e-12));
        let k = martin_kernel(&s, p0, y).unwrap();
        assert!(sup_difference(&k, seq.limit(), &(0..d.len()).filter(|&v| s.position(v).is_some()).collect::<Vec<_>>()) < 1e-10);
        let err = inner.iter().map(|&v| (k.values[v] - poisson(&d.coords[v], &[1.0, 0.0])).abs()).fold(0.0, f64::max);
        assert!(err < 0.05, "{err}");
        let r = s.apply(&k.values);
        assert!(r.iter().all(|x| x.abs() < 1e-8));
    }

    #[test]
    fn integral_of_uniform_is_one() {
        let (d, s) = setup(32);
        let p0 = d.nearest(&[0.0, 0.0]);
        let nodes = rim(&d);
        let n = nodes.len() as f64;
        let mu = DiscreteMeasure::new(nodes.clone(), vec![1.0 / n; nodes.len()]).unwrap();
        let u = martin_integral(&s, p0, &mu).unwrap();
        for &v in s.free() {
            assert!((u.values[v] - 1.0).abs() < 1e-9);
        }
        let zero = martin_integral(&s, p0, &mu.scaled(0.0)).unwrap();
        assert!(zero.values.iter().all(|x| *x == 0.0));
        let kernels: Vec<GridFunction> = nodes.iter().map(|&y| martin_kernel(&s, p0, y).unwrap()).collect();
        let sum = combine_kernels(&kernels, &mu.weights).unwrap();
        assert!(sup_difference(&sum, &u, s.free()) < 1e-9);
        assert!(martin_integral(&s, p0, &DiscreteMeasure::point(p0, 1.0).unwrap()).is_err());
    }

    #[test]
    fn fatou_density_ratio() {
        let (d, s) = setup(64);
        let p = d.polar().unwrap();
        let nr = p.rings() - 1;
        let p0 = d.nearest(&[0.0, 0.0]);
        let nodes = rim(&d);
        let n = nodes.len() as f64;
        let nu = DiscreteMeasure::new(nodes.clone(), vec![1.0 / n; nodes.len()]).unwrap();
        let mu = DiscreteMeasure::new(nodes.clone(), p.angles.iter().map(|t| (1.0 + t.cos()) / n).collect()).unwrap();
        let z = p.node(nr, 0);
        let path: Vec<usize> = [16, 8, 4, 2, 1].iter().map(|k| p.node(nr - k, 0)).collect();
        let tang: Vec<usize> = [16, 8, 4, 2, 1].iter().map(|&k| p.node(nr - k, 2 * k)).collect();
        let rep = fatou_experiment(&s, p0, &mu, &nu, z, &path, &tang).unwrap();
        assert_eq!(rep.expected, 2.0);
        assert!(rep.relative_error < 0.03, "{rep:?}");
        let twice = fatou_experiment(&s, p0, &nu.scaled(2.0), &nu, z, &path, &tang).unwrap();
        assert!(twice.nontangential.points.iter().all(|p| (p.1 - 2.0).abs() < 1e-9));
        let far = p.node(nr, p.angles.len() / 2);
        let half = DiscreteMeasure::new(
            nodes.clone(),
            p.angles.iter().map(|t| if t.cos() > 0.0 { 1.0 / n } else { 0.0 }).collect(),
        )
        .unwrap();
        let path2: Vec<usize> = [16, 8, 4, 2, 1].iter().map(|k| p.node(nr - k, p.angles.len() / 2)).collect();
        let control = fatou_experiment(&s, p0, &half, &nu, far, &path2, &path2).unwrap();
        assert_eq!(control.expected, 0.0);
        let tr = &control.nontangential.points;
        assert!(tr.last().unwrap().1 < 0.05 && tr.last().unwrap().1 < tr[0].1);
        assert!(fatou_experiment(&s, p0, &mu, &half, far, &path2, &path2).is_err());
    }
}
