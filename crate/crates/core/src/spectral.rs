//! Separation of variables on Lawson cones: link eigenvalues, indicial
//! exponents, fixed-point solutions `ψ · r^α`, the scaling action on
//! monomial solution records and the eigenvalue bounds for conformal
//! Laplacians.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cone::{skin_density_on_cone, ConeSpec};
use crate::error::{invalid, Error, Result};
use crate::linalg::{fit_line, smallest_eigenpair, CsrMatrix, EigenOptions};
use crate::potential::radial::{solve_radial_dirichlet, RadialOperator};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum PotentialKind {
    Jacobi,
    Conformal,
    /// Conformal Laplacian of dimension `m ≥ n`.
    ShiftedConformal(usize),
    Base,
    /// Constant link potential.
    Custom(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkOperatorSpec {
    pub cone: ConeSpec,
    pub kind: PotentialKind,
    pub lambda: f64,
    /// Link skin value `⟨A⟩^×`.
    pub across: f64,
}

impl LinkOperatorSpec {
    /// Operator with the default skin value `max{√(p+q), 1}`.
    pub fn new(cone: ConeSpec, kind: PotentialKind, lambda: f64) -> Result<Self> {
        let across = skin_density_on_cone(&cone, 1.0)?.across;
        let op = Self { cone, kind, lambda, across };
        op.validate()?;
        Ok(op)
    }

    pub fn validate(&self) -> Result<()> {
        if let PotentialKind::ShiftedConformal(m) = self.kind {
            if m < self.cone.n {
                return Err(invalid(format!("shifted dimension {m} is below the cone dimension {}", self.cone.n)));
            }
        }
        if !self.lambda.is_finite() || !(self.across > 0.0) {
            return Err(invalid("lambda must be finite and the skin value positive"));
        }
        Ok(())
    }

    /// Link potential `V^×`.
    pub fn v_cross(&self) -> f64 {
        let a2 = (self.cone.p + self.cone.q) as f64;
        let conformal = |m: f64| -(m - 2.0) / (4.0 * (m - 1.0)) * a2;
        match self.kind {
            PotentialKind::Jacobi => -a2,
            PotentialKind::Conformal => conformal(self.cone.n as f64),
            PotentialKind::ShiftedConformal(m) => conformal(m as f64),
            PotentialKind::Base => a2,
            PotentialKind::Custom(v) => v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkEigen {
    pub mu: f64,
    /// Constant value of the normalized ground state on product links.
    pub psi: f64,
}

/// `μ = V^× − λ (⟨A⟩^×)²` with constant ground state.
pub fn link_principal_eigenvalue(op: &LinkOperatorSpec) -> Result<LinkEigen> {
    op.validate()?;
    Ok(LinkEigen { mu: op.v_cross() - op.lambda * op.across * op.across, psi: 1.0 })
}

/// Ground state of `−Δ + V − λ(⟨A⟩^×)²` on the torus of two great circles of
/// the link, `steps × steps` grid, `potential[j * steps + k]` at `(θ_j, φ_k)`.
pub fn link_principal_eigenvalue_grid(
    op: &LinkOperatorSpec,
    potential: &[f64],
    steps: usize,
    opts: EigenOptions,
) -> Result<(f64, Vec<f64>)> {
    if steps < 3 || potential.len() != steps * steps {
        return Err(invalid("link potential must be a steps x steps grid"));
    }
    let dt = 2.0 * PI / steps as f64;
    let (wa, wb) = (1.0 / (op.cone.a_link * dt).powi(2), 1.0 / (op.cone.b_link * dt).powi(2));
    let shift = op.lambda * op.across * op.across;
    let idx = |j: usize, k: usize| (j % steps) * steps + (k % steps);
    let mut t = Vec::with_capacity(5 * steps * steps);
    for j in 0..steps {
        for k in 0..steps {
            let v = idx(j, k);
            t.push((v, v, 2.0 * wa + 2.0 * wb + potential[v] - shift));
            t.push((v, idx(j + 1, k), -wa));
            t.push((v, idx(j + steps - 1, k), -wa));
            t.push((v, idx(j, k + 1), -wb));
            t.push((v, idx(j, k + steps - 1), -wb));
        }
    }
    let k = CsrMatrix::from_triplets(steps * steps, t);
    let pair = smallest_eigenpair(&k, &vec![1.0; steps * steps], opts)?;
    let norm = pair.vector.iter().map(|x| x.abs()).fold(0.0, f64::max);
    Ok((pair.value, pair.vector.iter().map(|x| x / norm).collect()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicialData {
    pub mu: f64,
    pub n: usize,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub discriminant: f64,
    /// Discriminant zero: the two exponents coincide.
    pub double_root: bool,
}

/// Roots of `α² + (n−2)α − μ = 0`.
pub fn indicial_exponents(mu: f64, n: usize) -> Result<IndicialData> {
    let h = (n as f64 - 2.0) / 2.0;
    let discriminant = h * h + mu;
    if discriminant < 0.0 || !discriminant.is_finite() {
        return Err(Error::ComplexExponents(discriminant));
    }
    let s = discriminant.sqrt();
    Ok(IndicialData {
        mu,
        n,
        alpha_plus: -h + s,
        alpha_minus: -h - s,
        discriminant,
        double_root: discriminant == 0.0,
    })
}

/// Whether the Jacobi operator on a cone of dimension `n` has real
/// exponents: `((n−2)/2)² − (n−1) ≥ 0`.
pub fn jacobi_exponents_real(n: usize) -> bool {
    indicial_exponents(-(n as f64 - 1.0), n).is_ok()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    Plus,
    Minus,
}

/// `Ψ(ω, r) = ψ · r^α`, normalized to 1 at `r = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadialSolution {
    pub psi: f64,
    pub alpha: f64,
    pub branch: Option<Branch>,
}

impl RadialSolution {
    pub fn monomial(alpha: f64) -> Self {
        Self { psi: 1.0, alpha, branch: None }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.psi * r.powf(self.alpha)
    }
}

pub fn build_fixed_point_solution(op: &LinkOperatorSpec, which: Branch) -> Result<RadialSolution> {
    let eig = link_principal_eigenvalue(op)?;
    let data = indicial_exponents(eig.mu, op.cone.n)?;
    if data.double_root {
        return Err(invalid("exponents coincide; no distinct fixed points"));
    }
    let alpha = match which {
        Branch::Plus => data.alpha_plus,
        Branch::Minus => data.alpha_minus,
    };
    Ok(RadialSolution { psi: 1.0, alpha, branch: Some(which) })
}

/// Largest `|L Ψ|` over the sample radii, using exact radial derivatives and
/// the link eigen-relation.
pub fn radial_residual_check(op: &LinkOperatorSpec, solution: &RadialSolution, radii: &[f64]) -> Result<f64> {
    let mu = link_principal_eigenvalue(op)?.mu;
    let radial = RadialOperator { n: op.cone.n as f64, mu };
    if radii.iter().any(|r| !(*r > 0.0)) {
        return Err(invalid("sample radii must be positive"));
    }
    Ok(radii
        .iter()
        .map(|&r| (solution.psi * radial.apply_monomial(solution.alpha, r)).abs())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentFit {
    pub alpha: f64,
    /// Largest deviation of `log u` from the fitted line.
    pub max_residual: f64,
    pub nodes: usize,
}

/// Relative log-residual above which a solution is not accepted as a monomial.
pub const MONOMIAL_TOLERANCE: f64 = 1e-3;

/// Solves `L u = 0` on `[r_min, r_max]` with the given boundary values and
/// fits the log-log slope of the interior solution.
pub fn radial_exponent_fit(
    radial: &RadialOperator,
    r_min: f64,
    r_max: f64,
    nodes: usize,
    boundary: (f64, f64),
) -> Result<ExponentFit> {
    let (r, u) = solve_radial_dirichlet(radial, r_min, r_max, nodes, boundary.0, boundary.1)?;
    if u.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::NotMonomial("solution is not positive".into()));
    }
    let xs: Vec<f64> = r.iter().map(|x| x.ln()).collect();
    let ys: Vec<f64> = u.iter().map(|x| x.ln()).collect();
    let (slope, _, max_residual) = fit_line(&xs, &ys);
    let span = ys.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b)) - ys.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if max_residual > MONOMIAL_TOLERANCE * span.max(1.0) {
        return Err(Error::NotMonomial(format!("log-log residual {max_residual:e}")));
    }
    Ok(ExponentFit { alpha: slope, max_residual, nodes })
}

/// Fits the exponent of the given branch of `op` from boundary data
/// `r^α` at both ends.
pub fn fit_branch_exponent(op: &LinkOperatorSpec, which: Branch, r_min: f64, r_max: f64, nodes: usize) -> Result<ExponentFit> {
    let sol = build_fixed_point_solution(op, which)?;
    let mu = link_principal_eigenvalue(op)?.mu;
    let radial = RadialOperator { n: op.cone.n as f64, mu };
    radial_exponent_fit(&radial, r_min, r_max, nodes, (sol.value(r_min), sol.value(r_max)))
}

/// One term `c · r^α ψ` of a solution record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordTerm {
    pub coeff: f64,
    pub alpha: f64,
    pub branch: Option<Branch>,
}

/// Finite combination of monomial solutions with constant link profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub terms: Vec<RecordTerm>,
}

impl SolutionRecord {
    pub fn from_solutions(parts: &[(f64, RadialSolution)]) -> Self {
        Self {
            terms: parts
                .iter()
                .map(|(c, s)| RecordTerm { coeff: c * s.psi, alpha: s.alpha, branch: s.branch })
                .collect(),
        }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.terms.iter().map(|t| t.coeff * r.powf(t.alpha)).sum()
    }

    /// Rescaled to value 1 at `r = 1`.
    pub fn normalized(&self) -> Result<Self> {
        let v = self.value(1.0);
        if !(v != 0.0 && v.is_finite()) {
            return Err(invalid("solution record vanishes at the basepoint"));
        }
        Ok(Self { terms: self.terms.iter().map(|t| RecordTerm { coeff: t.coeff / v, ..*t }).collect() })
    }
}

/// `S*_η u(x) = u(η x) / u(η p₀)`.
pub fn scaling_action(record: &SolutionRecord, eta: f64) -> Result<SolutionRecord> {
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(invalid(format!("scaling factor must be positive, got {eta}")));
    }
    if record.terms.iter().all(|t| t.coeff == 0.0) {
        return Err(invalid("all coefficients are zero"));
    }
    // Work in logs so that tiny factors do not underflow.
    let logs: Vec<f64> = record.terms.iter().map(|t| t.alpha * eta.ln()).collect();
    let top = logs
        .iter()
        .zip(&record.terms)
        .filter(|(_, t)| t.coeff != 0.0)
        .map(|(l, _)| *l)
        .fold(f64::NEG_INFINITY, f64::max);
    let scaled = SolutionRecord {
        terms: record
            .terms
            .iter()
            .zip(&logs)
            .map(|(t, l)| RecordTerm { coeff: t.coeff * (l - top).exp(), ..*t })
            .collect(),
    };
    scaled.normalized()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Direction {
    ToZero,
    ToInfinity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractorReport {
    pub limit: Option<Branch>,
    /// Sup-distance on `[1/2, 2]` to each fixed point along the sequence.
    pub distance_plus: Vec<f64>,
    pub distance_minus: Vec<f64>,
    pub etas: Vec<f64>,
}

fn sup_distance(record: &SolutionRecord, alpha: f64) -> f64 {
    (0..=64)
        .map(|i| 0.5 * 4f64.powf(i as f64 / 64.0))
        .map(|r| (record.value(r) - r.powf(alpha)).abs() / r.powf(alpha))
        .fold(0.0, f64::max)
}

/// Geometric sequence `10^{∓k}`, `k = 1..=steps`.
pub fn eta_sequence(direction: Direction, steps: usize) -> Vec<f64> {
    (1..=steps)
        .map(|k| match direction {
            Direction::ToZero => 10f64.powi(-(k as i32)),
            Direction::ToInfinity => 10f64.powi(k as i32),
        })
        .collect()
}

/// Follows `S*_η record` along `etas` and reports which fixed point, if
/// any, it approaches.
pub fn attractor_limit_check(record: &SolutionRecord, etas: &[f64]) -> Result<AttractorReport> {
    let find = |b: Branch| record.terms.iter().find(|t| t.branch == Some(b)).map(|t| t.alpha);
    let (ap, am) = (find(Branch::Plus), find(Branch::Minus));
    if ap.is_none() && am.is_none() {
        return Err(invalid("record contains neither fixed point"));
    }
    let mut distance_plus = Vec::new();
    let mut distance_minus = Vec::new();
    for &eta in etas {
        let s = scaling_action(record, eta)?;
        distance_plus.push(ap.map_or(f64::INFINITY, |a| sup_distance(&s, a)));
        distance_minus.push(am.map_or(f64::INFINITY, |a| sup_distance(&s, a)));
    }
    let settled = |d: &[f64]| {
        d.last().is_some_and(|&x| x < 1e-6) && d.windows(2).all(|w| w[1] <= w[0] + 1e-12)
    };
    let limit = if settled(&distance_plus) {
        Some(Branch::Plus)
    } else if settled(&distance_minus) {
        Some(Branch::Minus)
    } else {
        None
    };
    Ok(AttractorReport { limit, distance_plus, distance_minus, etas: etas.to_vec() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub value: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub lambda: f64,
    pub mu: f64,
    pub alpha_plus: f64,
    pub alpha_minus: f64,
    pub checks: Vec<BoundCheck>,
}

impl BoundsReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// The exponent and eigenvalue inequalities with constant `c` (`√(3/4)` for
/// conformal Laplacians, `√(2/3)` for shifted ones) and eigenvalue fraction
/// `f`: `0 > α₊ ≥ −(1−c)h`, `−(1+c)h ≥ α₋ > −2h`, `μ ≥ −f h²`, `h = (n−2)/2`.
fn bounds(op: &LinkOperatorSpec, c: f64, f: f64) -> Result<BoundsReport> {
    let mu = link_principal_eigenvalue(op)?.mu;
    let h = (op.cone.n as f64 - 2.0) / 2.0;
    let (ap, am) = match indicial_exponents(mu, op.cone.n) {
        Ok(d) => (d.alpha_plus, d.alpha_minus),
        Err(_) => (f64::NAN, f64::NAN),
    };
    let check = |name: &str, value: f64, bound: f64, pass: bool| BoundCheck { name: name.into(), value, bound, pass };
    let checks = vec![
        check("alpha-plus-negative", ap, 0.0, ap < 0.0),
        check("alpha-plus-lower", ap, -(1.0 - c) * h, ap >= -(1.0 - c) * h),
        check("alpha-minus-upper", am, -(1.0 + c) * h, am <= -(1.0 + c) * h),
        check("alpha-minus-lower", am, -2.0 * h, am > -2.0 * h),
        check("mu-lower", mu, -f * h * h, mu >= -f * h * h),
    ];
    Ok(BoundsReport { lambda: op.lambda, mu, alpha_plus: ap, alpha_minus: am, checks })
}

pub fn theorem12_bounds_check(cone: &ConeSpec, lambda: f64) -> Result<BoundsReport> {
    if !(lambda > 0.0) {
        return Err(invalid(format!("lambda must be positive, got {lambda}")));
    }
    let op = LinkOperatorSpec::new(*cone, PotentialKind::Conformal, lambda)?;
    bounds(&op, 0.75f64.sqrt(), 0.25)
}

pub fn shifted_bounds_check(cone: &ConeSpec, m: usize, lambda: f64) -> Result<BoundsReport> {
    if !(lambda >= 0.0) {
        return Err(invalid(format!("lambda must be non-negative, got {lambda}")));
    }
    let op = LinkOperatorSpec::new(*cone, PotentialKind::ShiftedConformal(m), lambda)?;
    bounds(&op, (2.0f64 / 3.0).sqrt(), 1.0 / 3.0)
}

/// Largest `λ` at which `passes` holds, by bisection to `tol`, assuming
/// `passes` is true on an initial interval `(0, λ*]`. Returns 0 when it
/// fails already at `tol`.
pub fn largest_passing_lambda<F>(passes: F, tol: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<bool>,
{
    if !passes(tol)? {
        return Ok(0.0);
    }
    let mut lo = tol;
    let mut hi = 2.0 * tol;
    while passes(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return Ok(f64::INFINITY);
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if passes(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

pub fn theorem12_largest_lambda(cone: &ConeSpec) -> Result<f64> {
    largest_passing_lambda(|l| Ok(theorem12_bounds_check(cone, l)?.all_pass()), 1e-9)
}

/// Volume of the round sphere `S^k` of radius `r`.
pub fn sphere_volume(k: usize, r: f64) -> f64 {
    let s = (k + 1) as f64 / 2.0;
    2.0 * PI.powf(s) / gamma_half(k + 1) * r.powi(k as i32)
}

/// `Γ(m/2)` for positive integers `m`.
fn gamma_half(m: usize) -> f64 {
    let (mut g, mut x) = if m % 2 == 0 { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    while x < m as f64 / 2.0 - 1e-12 {
        g *= x;
        x += 1.0;
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkNorms {
    pub l1: f64,
    pub inf: f64,
    pub sup: f64,
    /// `|ψ|_{L¹} / inf ψ`.
    pub ratio: f64,
}

/// Norms of the constant ground state `ψ₀` on `S^p(a) × S^q(b)`.
pub fn link_ground_state_norms(cone: &ConeSpec, psi0: f64) -> Result<LinkNorms> {
    if !(psi0 > 0.0) {
        return Err(invalid("ground state value must be positive"));
    }
    let vol = sphere_volume(cone.p, cone.a_link) * sphere_volume(cone.q, cone.b_link);
    Ok(LinkNorms { l1: vol * psi0, inf: psi0, sup: psi0, ratio: vol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::make_lawson_cone;

    fn simons(kind: PotentialKind, lambda: f64) -> LinkOperatorSpec {
        LinkOperatorSpec::new(ConeSpec::simons(), kind, lambda).unwrap()
    }

    #[test]
    fn link_eigenvalues() {
        assert_eq!(link_principal_eigenvalue(&simons(PotentialKind::Jacobi, 0.0)).unwrap().mu, -6.0);
        assert_eq!(link_principal_eigenvalue(&simons(PotentialKind::Conformal, 0.0)).unwrap().mu, -1.25);
        let mu = link_principal_eigenvalue(&simons(PotentialKind::Conformal, 0.01)).unwrap().mu;
        assert!((mu + 1.31).abs() < 1e-12);
        assert_eq!(simons(PotentialKind::Base, 0.0).v_cross(), 6.0);
        assert!(LinkOperatorSpec::new(ConeSpec::simons(), PotentialKind::ShiftedConformal(6), 0.0).is_err());
    }

    #[test]
    fn grid_link_eigenvalue_matches_closed_form() {
        let op = simons(PotentialKind::Conformal, 0.01);
        let steps = 12;
        let (mu, psi) =
            link_principal_eigenvalue_grid(&op, &vec![op.v_cross(); steps * steps], steps, EigenOptions::default()).unwrap();
        assert!((mu + 1.31).abs() < 1e-9, "{mu}");
        assert!(psi.iter().all(|x| (x - 1.0).abs() < 1e-6));
    }

    #[test]
    fn grid_link_eigenvalue_perturbation() {
        // V = ε cos θ lowers the bottom by about ε² a² / 2.
        let op = simons(PotentialKind::Custom(0.0), 0.0);
        let steps = 64;
        let eps = 0.05;
        let pot: Vec<f64> = (0..steps * steps)
            .map(|v| eps * (2.0 * PI * (v / steps) as f64 / steps as f64).cos())
            .collect();
        let (mu, _) = link_principal_eigenvalue_grid(&op, &pot, steps, EigenOptions::default()).unwrap();
        let expected = -eps * eps * op.cone.a_link.powi(2) / 2.0;
        assert!((mu - expected).abs() < 0.02 * expected.abs(), "{mu} vs {expected}");
    }

    #[test]
    fn indicial_examples() {
        let d = indicial_exponents(0.0, 7).unwrap();
        assert_eq!((d.alpha_plus, d.alpha_minus), (0.0, -5.0));
        let d = indicial_exponents(-6.0, 7).unwrap();
        assert_eq!((d.alpha_plus, d.alpha_minus), (-2.0, -3.0));
        let d = indicial_exponents(-6.25, 7).unwrap();
        assert!(d.double_root && d.alpha_plus == -2.5 && d.alpha_minus == -2.5);
        assert!(matches!(indicial_exponents(-7.0, 7), Err(Error::ComplexExponents(_))));
    }

    #[test]
    fn stability_threshold() {
        for n in 3..=9 {
            assert_eq!(jacobi_exponents_real(n), n >= 7, "n = {n}");
        }
    }

    #[test]
    fn fixed_points_and_residuals() {
        let op = simons(PotentialKind::Jacobi, 0.0);
        let plus = build_fixed_point_solution(&op, Branch::Plus).unwrap();
        let minus = build_fixed_point_solution(&op, Branch::Minus).unwrap();
        assert_eq!((plus.alpha, minus.alpha), (-2.0, -3.0));
        assert_eq!(plus.value(1.0), 1.0);
        assert!(radial_residual_check(&op, &plus, &[0.5, 1.0, 2.0]).unwrap() <= 1e-12);
        let wrong = RadialSolution::monomial(-2.5);
        let r = radial_residual_check(&op, &wrong, &[2.0]).unwrap();
        assert!((r - 0.25 * 2f64.powf(-4.5)).abs() < 1e-15);
    }

    #[test]
    fn exponent_fit_converges() {
        let op = simons(PotentialKind::Jacobi, 0.0);
        for (b, a) in [(Branch::Plus, -2.0), (Branch::Minus, -3.0)] {
            let coarse = fit_branch_exponent(&op, b, 0.5, 2.0, 251).unwrap();
            let fine = fit_branch_exponent(&op, b, 0.5, 2.0, 501).unwrap();
            let e1 = (coarse.alpha - a).abs();
            let e2 = (fine.alpha - a).abs();
            assert!(e2 < 1e-3 && e1 >= 2.0 * e2, "{e1} {e2}");
        }
    }

    #[test]
    fn non_monomial_rejected() {
        let flat = RadialOperator { n: 2.0, mu: 0.0 };
        let c = radial_exponent_fit(&flat, 0.5, 2.0, 201, (1.0, 1.0)).unwrap();
        assert!(c.alpha.abs() < 1e-12);
        let log = radial_exponent_fit(&flat, 2.0, 8.0, 201, (2f64.ln(), 8f64.ln()));
        assert!(matches!(log, Err(Error::NotMonomial(_))));
        let sign = radial_exponent_fit(&flat, 0.5, 2.0, 201, (0.5f64.ln(), 2f64.ln()));
        assert!(matches!(sign, Err(Error::NotMonomial(_))));
    }

    fn mixed() -> SolutionRecord {
        let op = simons(PotentialKind::Jacobi, 0.0);
        let p = build_fixed_point_solution(&op, Branch::Plus).unwrap();
        let m = build_fixed_point_solution(&op, Branch::Minus).unwrap();
        SolutionRecord::from_solutions(&[(1.0, m), (1.0, p)])
    }

    #[test]
    fn scaling_fixed_points_and_identity() {
        let op = simons(PotentialKind::Jacobi, 0.0);
        let p = build_fixed_point_solution(&op, Branch::Plus).unwrap();
        let rec = SolutionRecord::from_solutions(&[(1.0, p)]);
        for eta in [1e-3, 0.5, 7.0] {
            assert_eq!(scaling_action(&rec, eta).unwrap(), rec);
        }
        let m = mixed().normalized().unwrap();
        assert_eq!(scaling_action(&m, 1.0).unwrap(), m);
        let zero = SolutionRecord { terms: vec![RecordTerm { coeff: 0.0, alpha: -2.0, branch: None }] };
        assert!(scaling_action(&zero, 2.0).is_err());
    }

    #[test]
    fn mixed_record_attractors() {
        let rec = mixed();
        let small = scaling_action(&rec, 1e-3).unwrap();
        assert!(small.terms[0].coeff > 0.99);
        let to_zero = attractor_limit_check(&rec, &eta_sequence(Direction::ToZero, 12)).unwrap();
        assert_eq!(to_zero.limit, Some(Branch::Minus));
        let to_inf = attractor_limit_check(&rec, &eta_sequence(Direction::ToInfinity, 12)).unwrap();
        assert_eq!(to_inf.limit, Some(Branch::Plus));
    }

    #[test]
    fn bound_suite_simons() {
        let r = theorem12_bounds_check(&ConeSpec::simons(), 0.01).unwrap();
        assert!((r.mu + 1.31).abs() < 1e-12);
        assert!((r.alpha_plus + 0.2774).abs() < 1e-4);
        assert!((r.alpha_minus + 4.7226).abs() < 1e-4);
        assert!(r.all_pass());
        let bad = theorem12_bounds_check(&ConeSpec::simons(), 0.1).unwrap();
        assert!(!bad.checks.iter().find(|c| c.name == "mu-lower").unwrap().pass);
        let l = theorem12_largest_lambda(&ConeSpec::simons()).unwrap();
        assert!((l - 5.0 / 96.0).abs() < 1e-4, "{l}");
        assert!(theorem12_bounds_check(&ConeSpec::simons(), 0.0).is_err());
    }

    #[test]
    fn shifted_simons() {
        let s = ConeSpec::simons();
        let r = shifted_bounds_check(&s, 9, 0.0).unwrap();
        assert!((r.mu + 21.0 / 16.0).abs() < 1e-12);
        assert!(r.checks.iter().find(|c| c.name == "mu-lower").unwrap().pass);
        let r = shifted_bounds_check(&s, 9, 0.01).unwrap();
        assert!((r.mu + 1.3725).abs() < 1e-12);
        assert!((r.alpha_plus - (-2.5 + 4.8775f64.sqrt())).abs() < 1e-12);
        assert!(shifted_bounds_check(&s, 6, 0.01).is_err());
        let same = LinkOperatorSpec::new(s, PotentialKind::ShiftedConformal(7), 0.0).unwrap();
        assert_eq!(same.v_cross(), -1.25);
    }

    #[test]
    fn link_volumes() {
        let n = link_ground_state_norms(&ConeSpec::simons(), 1.0).unwrap();
        assert!((n.l1 - PI.powi(4) / 2.0).abs() < 1e-10);
        let n2 = link_ground_state_norms(&ConeSpec::simons(), 3.0).unwrap();
        assert!((n2.ratio - n.ratio).abs() < 1e-12);
        let c = make_lawson_cone(2, 4).unwrap();
        let expected = 4.0 * PI / 3.0 * (8.0 * PI * PI / 3.0) * (4.0 / 9.0);
        assert!((link_ground_state_norms(&c, 1.0).unwrap().l1 - expected).abs() < 1e-10);
        assert!((sphere_volume(2, 1.0) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_volume(1, 2.0) - 4.0 * PI).abs() < 1e-12);
    }
}
