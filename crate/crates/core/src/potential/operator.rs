use std::fmt::Write as _;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::domain::{Axis, DomainKind, GridDomain, NodeClass};
use crate::error::{invalid, Error, Result};
use crate::linalg::{CsrMatrix, Factorization};
use crate::spectral::LinkOperatorSpec;

/// Second-order coefficients per node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coefficients {
    Isotropic(Vec<f64>),
    /// Separate radial and angular diffusivities on polar grids.
    PolarDiagonal { radial: Vec<f64>, angular: Vec<f64> },
    /// `(a_rr, a_rθ, a_θθ)` in the grid frame.
    Tensor(Vec<[f64; 3]>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BaseOperator {
    Laplacian,
    /// Radial reduction of a cone operator with potential `V^×/r²`.
    ConeRadial(LinkOperatorSpec),
    Custom(Coefficients),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub base: BaseOperator,
    /// Additional zeroth-order term `c`.
    pub potential: Option<Vec<f64>>,
    /// Weight `w` of weighted eigenproblems, typically `ρ²`.
    pub weight: Option<Vec<f64>>,
    /// Ellipticity bound `k`.
    pub ellipticity: f64,
    /// Hölder exponent; recorded only.
    pub holder_beta: Option<f64>,
    /// Skin reciprocal `δ` for the adaptedness bounds.
    pub delta: Option<Vec<f64>>,
}

impl OperatorSpec {
    pub fn laplacian() -> Self {
        Self { base: BaseOperator::Laplacian, potential: None, weight: None, ellipticity: 1e6, holder_beta: None, delta: None }
    }

    pub fn with_base(base: BaseOperator) -> Self {
        Self { base, ..Self::laplacian() }
    }

    pub fn with_weight(mut self, weight: Vec<f64>) -> Self {
        self.weight = Some(weight);
        self
    }
}

/// Measured adaptedness quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkinBounds {
    /// `max δ^β · |Δa| / ℓ^β` over links.
    pub holder: f64,
    /// `max δ² |c|`.
    pub zeroth: f64,
}

/// Assembled symmetric system `K u = vol · L u` on a domain.
pub struct GridSystem {
    pub domain: GridDomain,
    pub stiffness: CsrMatrix,
    /// `vol · w` per node.
    pub mass: Vec<f64>,
    pub symmetric: bool,
    pub holder_beta: Option<f64>,
    pub skin_bounds: Option<SkinBounds>,
    free: Vec<usize>,
    position: Vec<Option<usize>>,
    interior: CsrMatrix,
    factor: OnceLock<std::result::Result<Factorization, Error>>,
}

impl std::fmt::Debug for GridSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridSystem")
            .field("kind", &self.domain.kind)
            .field("nodes", &self.domain.len())
            .field("free", &self.free.len())
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub values: Vec<f64>,
}

impl GridFunction {
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Node coordinates followed by the value, one node per line.
    pub fn to_csv(&self, domain: &GridDomain) -> String {
        let dim = domain.coords.first().map_or(0, Vec::len);
        let mut out = String::new();
        let names = ["x", "y", "z", "w"];
        for name in names.iter().take(dim) {
            let _ = write!(out, "{name},");
        }
        out.push_str("value\n");
        for (c, v) in domain.coords.iter().zip(&self.values) {
            for x in c {
                let _ = write!(out, "{x:?},");
            }
            let _ = writeln!(out, "{v:?}");
        }
        out
    }
}

fn link_coefficient(coef: &Coefficients, a: usize, b: usize, axis: Axis) -> f64 {
    let mean = |v: &[f64]| 0.5 * (v[a] + v[b]);
    match coef {
        Coefficients::Isotropic(c) => mean(c),
        Coefficients::PolarDiagonal { radial, angular } => match axis {
            Axis::Angular => mean(angular),
            _ => mean(radial),
        },
        Coefficients::Tensor(t) => match axis {
            Axis::Angular => 0.5 * (t[a][2] + t[b][2]),
            _ => 0.5 * (t[a][0] + t[b][0]),
        },
    }
}

fn check_coefficients(coef: &Coefficients, n: usize, k: f64) -> Result<()> {
    let pairs: Vec<(f64, f64)> = match coef {
        Coefficients::Isotropic(c) => {
            if c.len() != n {
                return Err(invalid("coefficient length mismatch"));
            }
            c.iter().map(|&x| (x, x)).collect()
        }
        Coefficients::PolarDiagonal { radial, angular } => {
            if radial.len() != n || angular.len() != n {
                return Err(invalid("coefficient length mismatch"));
            }
            radial.iter().zip(angular).map(|(&r, &t)| (r.min(t), r.max(t))).collect()
        }
        Coefficients::Tensor(t) => {
            if t.len() != n {
                return Err(invalid("coefficient length mismatch"));
            }
            let mut out = Vec::with_capacity(n);
            for (node, &[a, b, c]) in t.iter().enumerate() {
                let m = 0.5 * (a + c);
                let d = (0.25 * (a - c).powi(2) + b * b).sqrt();
                if !(m - d > 0.0) {
                    return Err(Error::Ellipticity { node, msg: format!("matrix [{a}, {b}; {b}, {c}] is not positive definite") });
                }
                if b != 0.0 {
                    return Err(Error::Stencil { node, msg: "mixed coefficient needs a wider stencil".into() });
                }
                out.push((m - d, m + d));
            }
            out
        }
    };
    for (node, (lo, hi)) in pairs.into_iter().enumerate() {
        if !(lo > 0.0) {
            return Err(Error::Ellipticity { node, msg: format!("coefficient {lo} is not positive") });
        }
        if lo < 1.0 / k || hi > k {
            return Err(Error::Ellipticity { node, msg: format!("eigenvalues [{lo}, {hi}] outside [1/{k}, {k}]") });
        }
    }
    Ok(())
}

/// Assembles the finite-volume system of `spec` on `domain`.
pub fn discretize(domain: &GridDomain, spec: &OperatorSpec) -> Result<GridSystem> {
    let n = domain.len();
    if !(spec.ellipticity >= 1.0) {
        return Err(invalid("ellipticity bound must be at least 1"));
    }
    let mut potential = vec![0.0; n];
    let coef = match &spec.base {
        BaseOperator::Laplacian => None,
        BaseOperator::Custom(c) => {
            check_coefficients(c, n, spec.ellipticity)?;
            Some(c)
        }
        BaseOperator::ConeRadial(link) => {
            if domain.kind != DomainKind::Radial1d || domain.radial_dimension != Some(link.cone.n as f64) {
                return Err(invalid("cone operators need a radial domain of the cone's dimension"));
            }
            let v = link.v_cross();
            for (i, p) in potential.iter_mut().enumerate() {
                let r = domain.coords[i][0];
                if r > 0.0 {
                    *p = v / (r * r);
                } else if domain.classes[i] == NodeClass::Free {
                    return Err(Error::Stencil { node: i, msg: "free node at r = 0".into() });
                }
            }
            None
        }
    };
    if let Some(c) = &spec.potential {
        if c.len() != n {
            return Err(invalid("potential length mismatch"));
        }
        potential.iter_mut().zip(c).for_each(|(p, x)| *p += x);
    }
    let weight = match &spec.weight {
        Some(w) => {
            if w.len() != n {
                return Err(invalid("weight length mismatch"));
            }
            if let Some(v) = (0..n).find(|&v| domain.classes[v] == NodeClass::Free && !(w[v] > 0.0)) {
                return Err(Error::NonPositive(format!("weight at node {v}")));
            }
            w.clone()
        }
        None => vec![1.0; n],
    };

    let mut t = Vec::with_capacity(4 * domain.links.len() + n);
    let mut degree = vec![0usize; n];
    for l in &domain.links {
        let a = coef.map_or(1.0, |c| link_coefficient(c, l.a, l.b, l.axis));
        let g = a * l.face / l.length;
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::Stencil { node: l.a, msg: format!("link conductance {g}") });
        }
        t.push((l.a, l.a, g));
        t.push((l.b, l.b, g));
        t.push((l.a, l.b, -g));
        t.push((l.b, l.a, -g));
        degree[l.a] += 1;
        degree[l.b] += 1;
    }
    for v in 0..n {
        if domain.classes[v] == NodeClass::Free && degree[v] == 0 {
            return Err(Error::Stencil { node: v, msg: "isolated free node".into() });
        }
        if !(domain.volumes[v] > 0.0) && domain.classes[v] == NodeClass::Free {
            return Err(Error::Stencil { node: v, msg: "zero cell volume".into() });
        }
        if potential[v] != 0.0 {
            t.push((v, v, domain.volumes[v] * potential[v]));
        }
    }
    let stiffness = CsrMatrix::from_triplets(n, t);

    let skin_bounds = match &spec.delta {
        Some(delta) => {
            if delta.len() != n {
                return Err(invalid("skin reciprocal length mismatch"));
            }
            let beta = spec.holder_beta.unwrap_or(1.0);
            let holder = match coef {
                Some(c) => domain
                    .links
                    .iter()
                    .map(|l| {
                        let (ca, cb) = (link_coefficient(c, l.a, l.a, l.axis), link_coefficient(c, l.b, l.b, l.axis));
                        delta[l.a].min(delta[l.b]).powf(beta) * (ca - cb).abs() / l.length.powf(beta)
                    })
                    .fold(0.0, f64::max),
                None => 0.0,
            };
            let zeroth = potential.iter().zip(delta).map(|(c, d)| d * d * c.abs()).fold(0.0, f64::max);
            for (bound, name) in [(holder, "Hölder"), (zeroth, "zeroth-order")] {
                if bound > spec.ellipticity {
                    return Err(Error::Ellipticity { node: 0, msg: format!("{name} skin bound {bound} exceeds {}", spec.ellipticity) });
                }
            }
            Some(SkinBounds { holder, zeroth })
        }
        None => None,
    };

    let mass = domain.volumes.iter().zip(&weight).map(|(v, w)| v * w).collect();
    Ok(GridSystem::assemble(domain.clone(), stiffness, mass, spec.holder_beta, skin_bounds))
}

impl GridSystem {
    fn assemble(
        domain: GridDomain,
        stiffness: CsrMatrix,
        mass: Vec<f64>,
        holder_beta: Option<f64>,
        skin_bounds: Option<SkinBounds>,
    ) -> Self {
        let free = domain.free_nodes();
        let mut position = vec![None; domain.len()];
        for (k, &v) in free.iter().enumerate() {
            position[v] = Some(k);
        }
        let interior = stiffness.principal_submatrix(&free);
        Self {
            domain,
            stiffness,
            mass,
            symmetric: true,
            holder_beta,
            skin_bounds,
            free,
            position,
            interior,
            factor: OnceLock::new(),
        }
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn position(&self, v: usize) -> Option<usize> {
        self.position[v]
    }

    pub fn interior_matrix(&self) -> &CsrMatrix {
        &self.interior
    }

    /// System of `L − λ w`.
    pub fn shifted(&self, lambda: f64) -> GridSystem {
        let stiffness = self.stiffness.add_diagonal(-lambda, &self.mass);
        GridSystem::assemble(self.domain.clone(), stiffness, self.mass.clone(), self.holder_beta, self.skin_bounds)
    }

    /// Cached Cholesky factorization of the free block.
    pub fn factor(&self) -> Result<&Factorization> {
        self.factor
            .get_or_init(|| Factorization::cholesky(&self.interior))
            .as_ref()
            .map_err(|e| Error::NotSubcritical(e.to_string()))
    }

    /// Solves on the free block; `rhs` is indexed by free position.
    pub fn solve_free(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.factor()?.solve(rhs)
    }

    /// Embeds free values into a full vector with `fill` elsewhere.
    pub fn expand(&self, free_values: &[f64], boundary: Option<&[f64]>) -> Vec<f64> {
        let mut out = match boundary {
            Some(b) => b.to_vec(),
            None => vec![0.0; self.domain.len()],
        };
        for (k, &v) in self.free.iter().enumerate() {
            out[v] = free_values[k];
        }
        out
    }

    /// `(K u)_v / vol_v` at free nodes, zero elsewhere.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let ku = self.stiffness.matvec(u);
        (0..self.domain.len())
            .map(|v| if self.position[v].is_some() { ku[v] / self.domain.volumes[v] } else { 0.0 })
            .collect()
    }

    /// Whether constants solve `L v = 0` at free nodes.
    pub fn constants_solve(&self) -> bool {
        let sums = self.stiffness.row_sums();
        self.free.iter().all(|&v| sums[v].abs() <= 1e-10 * self.stiffness.get(v, v).abs().max(1e-300))
    }

    /// Off-diagonals non-positive and row sums non-negative on free rows.
    pub fn is_m_matrix(&self) -> bool {
        let sums = self.stiffness.row_sums();
        self.free.iter().all(|&v| {
            let d = self.stiffness.get(v, v);
            sums[v] >= -1e-10 * d.abs() && self.stiffness.row(v).all(|(j, x)| j == v || x <= 0.0)
        })
    }

    pub fn coordinate_text(&self) -> String {
        self.stiffness.coordinate_text()
    }
}

/// Solves `L F = 0` at free nodes with `F = data` elsewhere.
///
/// The maximum principle is required either from the sign structure of the
/// system or from a positive supersolution `w` with `L w ≥ 0`.
pub fn solve_dirichlet(system: &GridSystem, data: &[f64], supersolution: Option<&[f64]>) -> Result<GridFunction> {
    let n = system.domain.len();
    if data.len() != n {
        return Err(invalid("boundary data length mismatch"));
    }
    match supersolution {
        Some(w) => {
            if w.len() != n || w.iter().any(|x| !(*x > 0.0)) {
                return Err(Error::MaximumPrinciple("supersolution must be positive".into()));
            }
            let lw = system.apply(w);
            if let Some(v) = system.free().iter().find(|&&v| lw[v] < -1e-8 * w[v].abs()) {
                return Err(Error::MaximumPrinciple(format!("supersolution fails at node {v}")));
            }
        }
        None => {
            if !system.is_m_matrix() {
                return Err(Error::MaximumPrinciple("system is not an M-matrix and no supersolution was given".into()));
            }
        }
    }
    let mut boundary = data.to_vec();
    for &v in system.free() {
        boundary[v] = 0.0;
    }
    let kb = system.stiffness.matvec(&boundary);
    let rhs: Vec<f64> = system.free().iter().map(|&v| -kb[v]).collect();
    let x = system.factor().map_err(|e| Error::SingularSystem(e.to_string()))?.solve(&rhs)?;
    let values = system.expand(&x, Some(&boundary));
    if supersolution.is_none() && system.constants_solve() {
        let (lo, hi) = (0..n)
            .filter(|&v| system.position(v).is_none())
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(data[v]), b.max(data[v])));
        let slack = 1e-9 * (hi - lo).abs().max(1.0);
        if values.iter().any(|&x| x < lo - slack || x > hi + slack) {
            return Err(Error::MaximumPrinciple("solution leaves the range of its boundary data".into()));
        }
    }
    Ok(GridFunction { values })
}

/// `G(·, p)` with `K G = e_p`, i.e. `L G = δ_p / vol_p`.
pub fn green_function(system: &GridSystem, pole: usize) -> Result<GridFunction> {
    let Some(k) = system.position(pole) else {
        return Err(invalid(format!("pole {pole} is not a free node")));
    };
    let mut rhs = vec![0.0; system.free().len()];
    rhs[k] = 1.0;
    let g = system.solve_free(&rhs)?;
    let scale = g.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if g.iter().any(|&x| x < -1e-10 * scale) {
        return Err(Error::NotSubcritical("Green's function changes sign".into()));
    }
    Ok(GridFunction { values: system.expand(&g, None) })
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::cone::ConeSpec;
    use crate::potential::domain::{disk, radial_1d, Spacing};
    use crate::spectral::PotentialKind;

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let d = disk(32).unwrap();
        let s = discretize(&d, &OperatorSpec::laplacian()).unwrap();
        assert!(s.constants_solve());
        assert!(s.is_m_matrix());
        assert!(s.stiffness.is_symmetric(1e-14));
        let p = d.polar().unwrap();
        let v = p.node(5, 3);
        assert_eq!(s.stiffness.row(v).count(), 5);
    }

    #[test]
    fn dirichlet_constant_zero_and_cos() {
        let d = disk(64).unwrap();
        let s = discretize(&d, &OperatorSpec::laplacian()).unwrap();
        let one = solve_dirichlet(&s, &vec![1.0; d.len()], None).unwrap();
        assert!(one.values.iter().all(|x| (x - 1.0).abs() < 1e-10));
        let zero = solve_dirichlet(&s, &vec![0.0; d.len()], None).unwrap();
        assert!(zero.values.iter().all(|x| x.abs() < 1e-14));
        let err = |res: usize| {
            let d = disk(res).unwrap();
            let s = discretize(&d, &OperatorSpec::laplacian()).unwrap();
            let data: Vec<f64> = d.coords.iter().map(|c| c[0]).collect();
            let f = solve_dirichlet(&s, &data, None).unwrap();
            f.values.iter().zip(&d.coords).map(|(v, c)| (v - c[0]).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(32), err(64));
        assert!(e2 < 1e-3 && e1 / e2 > 3.0, "{e1} {e2}");
    }

    #[test]
    fn second_order_manufactured_residual() {
        let res = |n: usize| {
            let d = disk(n).unwrap();
            let s = discretize(&d, &OperatorSpec::laplacian()).unwrap();
            let u: Vec<f64> = d.coords.iter().map(|c| c[0] * c[0] * c[0] - 3.0 * c[0] * c[1] * c[1]).collect();
            let r = s.apply(&u);
            (0..d.len())
                .filter(|&v| (0.3..0.9).contains(&d.radius(v)))
                .map(|v| r[v].abs())
                .fold(0.0, f64::max)
        };
        let (a, b) = (res(32), res(64));
        assert!(a / b > 3.5, "{a} {b}");
    }

    #[test]
    fn green_interval_is_tent() {
        let d = radial_1d(0.0, 1.0, 11, Spacing::Uniform, 1.0).unwrap();
        let s = discretize(&d, &OperatorSpec::laplacian()).unwrap();
        let g = green_function(&s, 5).unwrap();
        for (i, v) in g.values.iter().enumerate() {
            let x = i as f64 / 10.0;
            let exact = if x <= 0.5 { 0.5 * x } else { 0.5 * (1.0 - x) };
            assert!((v - exact).abs() < 1e-12, "{i}: {v} {exact}");
        }
        assert!(green_function(&s, 0).is_err());
    }

    #[test]
    fn green_disk_matches_log() {
        let d = disk(128).unwrap();
        let s = discretize(&d, &OperatorSpec::laplacian()).unwrap();
        let g = green_function(&s, 0).unwrap();
        assert!(g.min() >= 0.0);
        for v in 0..d.len() {
            let r = d.radius(v);
            if (0.2..0.9).contains(&r) {
                let exact = -(r.ln()) / (2.0 * PI);
                assert!((g.values[v] - exact).abs() < 0.02 * exact, "{r}: {} {exact}", g.values[v]);
            }
        }
    }

    #[test]
    fn green_symmetry() {
        let d = disk(32).unwrap();
        let s = discretize(&d, &OperatorSpec::laplacian()).unwrap();
        let p = d.polar().unwrap();
        let (x, y) = (p.node(3, 1), p.node(10, 20));
        let gx = green_function(&s, x).unwrap();
        let gy = green_function(&s, y).unwrap();
        assert!((gx.values[y] - gy.values[x]).abs() < 1e-10 * gx.values[y]);
    }

    #[test]
    fn rejects_bad_coefficients() {
        let d = disk(16).unwrap();
        let n = d.len();
        let bad = OperatorSpec::with_base(BaseOperator::Custom(Coefficients::Tensor(vec![[1.0, 2.0, 1.0]; n])));
        assert!(matches!(discretize(&d, &bad), Err(Error::Ellipticity { .. })));
        let neg = OperatorSpec::with_base(BaseOperator::Custom(Coefficients::Isotropic(vec![-1.0; n])));
        assert!(matches!(discretize(&d, &neg), Err(Error::Ellipticity { .. })));
        let mut wide = OperatorSpec::with_base(BaseOperator::Custom(Coefficients::Isotropic(vec![50.0; n])));
        wide.ellipticity = 10.0;
        assert!(discretize(&d, &wide).is_err());
        let ok = OperatorSpec::with_base(BaseOperator::Custom(Coefficients::PolarDiagonal {
            radial: vec![1.0; n],
            angular: vec![2.0; n],
        }));
        assert!(discretize(&d, &ok).is_ok());
    }

    #[test]
    fn cone_radial_manufactured_solution() {
        let link = LinkOperatorSpec::new(ConeSpec::simons(), PotentialKind::Jacobi, 0.0).unwrap();
        let res = |nodes: usize| {
            let d = radial_1d(0.5, 2.0, nodes, Spacing::Uniform, 7.0).unwrap();
            let s = discretize(&d, &OperatorSpec::with_base(BaseOperator::ConeRadial(link))).unwrap();
            let u: Vec<f64> = d.coords.iter().map(|c| c[0].powi(-2)).collect();
            s.apply(&u).iter().fold(0.0f64, |m, x| m.max(x.abs()))
        };
        let (a, b) = (res(101), res(201));
        assert!(a / b > 3.5 && b < 1e-2, "{a} {b}");
        let d = radial_1d(0.5, 2.0, 11, Spacing::Uniform, 3.0).unwrap();
        assert!(discretize(&d, &OperatorSpec::with_base(BaseOperator::ConeRadial(link))).is_err());
    }

    #[test]
    fn jacobi_needs_supersolution() {
        let link = LinkOperatorSpec::new(ConeSpec::simons(), PotentialKind::Jacobi, 0.0).unwrap();
        let d = radial_1d(0.5, 2.0, 201, Spacing::Uniform, 7.0).unwrap();
        let s = discretize(&d, &OperatorSpec::with_base(BaseOperator::ConeRadial(link))).unwrap();
        let data: Vec<f64> = d.coords.iter().map(|c| c[0].powi(-2)).collect();
        assert!(matches!(solve_dirichlet(&s, &data, None), Err(Error::MaximumPrinciple(_))));
        let w: Vec<f64> = d.coords.iter().map(|c| c[0].powf(-2.5)).collect();
        let f = solve_dirichlet(&s, &data, Some(&w)).unwrap();
        for (v, c) in f.values.iter().zip(&d.coords) {
            assert!((v - c[0].powi(-2)).abs() < 1e-3);
        }
    }

    #[test]
    fn skin_bounds_reported() {
        let d = disk(16).unwrap();
        let mut spec = OperatorSpec::laplacian();
        spec.potential = Some(vec![2.0; d.len()]);
        spec.delta = Some(vec![0.5; d.len()]);
        let s = discretize(&d, &spec).unwrap();
        assert_eq!(s.skin_bounds.unwrap().zeroth, 0.5);
        spec.ellipticity = 1.0;
        spec.potential = Some(vec![20.0; d.len()]);
        assert!(discretize(&d, &spec).is_err());
    }

    #[test]
    fn csv_export() {
        let d = radial_1d(0.0, 1.0, 3, Spacing::Uniform, 1.0).unwrap();
        let f = GridFunction { values: vec![0.0, 0.5, 0.0] };
        assert_eq!(f.to_csv(&d), "x,value\n0.0,0.0\n0.5,0.5\n1.0,0.0\n");
    }
}
