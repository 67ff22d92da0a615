use serde::{Deserialize, Serialize};

use super::domain::{radial_1d, Spacing};
use super::operator::{discretize, GridFunction, GridSystem, OperatorSpec};
use crate::error::{invalid, Error, Result};
use crate::linalg::{fit_line, smallest_eigenpair, EigenOptions, Factorization};

pub const CRITICAL_BAND: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExhaustionReport {
    pub lambdas: Vec<f64>,
    pub scales: Vec<f64>,
    /// Extrapolated `λ_∞` of `λ_m ≈ λ_∞ + c / scale²`, or the last `λ_m`.
    pub estimate: f64,
    pub strictly_decreasing: bool,
    /// Ground state on the largest element with `φ(p₀) = 1`.
    pub ground_state: GridFunction,
    pub iterations: Vec<usize>,
}

fn check_exhaustion(system: &GridSystem, exhaustion: &[Vec<usize>]) -> Result<()> {
    if exhaustion.is_empty() {
        return Err(invalid("empty exhaustion"));
    }
    for (m, elem) in exhaustion.iter().enumerate() {
        if elem.is_empty() {
            return Err(invalid(format!("exhaustion element {m} is empty")));
        }
        if let Some(v) = elem.iter().find(|&&v| v >= system.domain.len() || system.position(v).is_none()) {
            return Err(invalid(format!("exhaustion element {m} contains non-free node {v}")));
        }
        if m > 0 {
            let prev = &exhaustion[m - 1];
            let mut inside = vec![false; system.domain.len()];
            elem.iter().for_each(|&v| inside[v] = true);
            if prev.iter().any(|&v| !inside[v]) {
                return Err(invalid(format!("exhaustion element {m} does not contain element {}", m - 1)));
            }
        }
    }
    Ok(())
}

fn restrict(system: &GridSystem, elem: &[usize], lambda: f64) -> (crate::linalg::CsrMatrix, Vec<f64>) {
    let k = system.stiffness.principal_submatrix(elem);
    let mass: Vec<f64> = elem.iter().map(|&v| system.mass[v]).collect();
    let k = if lambda == 0.0 { k } else { k.add_diagonal(-lambda, &mass) };
    (k, mass)
}

/// Smallest Dirichlet eigenvalues of `L` relative to the weight on nested
/// node sets.
pub fn weighted_principal_eigenvalue(
    system: &GridSystem,
    exhaustion: &[Vec<usize>],
    scales: Option<&[f64]>,
    basepoint: usize,
    opts: EigenOptions,
) -> Result<ExhaustionReport> {
    if !system.symmetric {
        return Err(invalid("weighted eigenproblems need a symmetric system"));
    }
    check_exhaustion(system, exhaustion)?;
    if let Some(s) = scales {
        if s.len() != exhaustion.len() || s.iter().any(|x| !(*x > 0.0)) {
            return Err(invalid("one positive scale per exhaustion element"));
        }
    }
    let last = exhaustion.last().expect("non-empty");
    let Some(p) = last.iter().position(|&v| v == basepoint) else {
        return Err(invalid(format!("basepoint {basepoint} is outside the exhaustion")));
    };
    let mut lambdas = Vec::with_capacity(exhaustion.len());
    let mut iterations = Vec::with_capacity(exhaustion.len());
    let mut phi = Vec::new();
    for elem in exhaustion {
        let (k, mass) = restrict(system, elem, 0.0);
        let pair = smallest_eigenpair(&k, &mass, opts)?;
        lambdas.push(pair.value);
        iterations.push(pair.iterations);
        phi = pair.vector;
    }
    if !(phi[p] > 0.0) {
        return Err(Error::NonPositive(format!("ground state at basepoint is {}", phi[p])));
    }
    let mut values = vec![0.0; system.domain.len()];
    for (&v, x) in last.iter().zip(&phi) {
        values[v] = x / phi[p];
    }
    let strictly_decreasing = lambdas.windows(2).all(|w| w[1] < w[0]);
    let scales: Vec<f64> = scales.map_or_else(|| (1..=exhaustion.len()).map(|m| m as f64).collect(), <[f64]>::to_vec);
    let estimate = if lambdas.len() >= 2 && scales.len() == lambdas.len() {
        let xs: Vec<f64> = scales.iter().map(|s| 1.0 / (s * s)).collect();
        fit_line(&xs, &lambdas).1
    } else {
        *lambdas.last().expect("non-empty")
    };
    Ok(ExhaustionReport { lambdas, scales, estimate, strictly_decreasing, ground_state: GridFunction { values }, iterations })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Criticality {
    Subcritical,
    Critical,
    Supercritical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalityReport {
    pub class: Criticality,
    pub lambda: f64,
    pub estimate: f64,
    pub band: f64,
    /// Minimum of the Green's function of `L − λw` on the largest element.
    pub green_min: Option<f64>,
    /// Smallest Dirichlet eigenvalue of `L − λw` relative to `w`.
    pub witness_eigenvalue: Option<f64>,
    /// Whether the witness confirms the class.
    pub verified: bool,
}

pub fn criticality_classify(
    system: &GridSystem,
    exhaustion: &[Vec<usize>],
    report: &ExhaustionReport,
    lambda: f64,
    band: f64,
    basepoint: usize,
    opts: EigenOptions,
) -> Result<CriticalityReport> {
    if !report.estimate.is_finite() {
        return Err(invalid("principal eigenvalue estimate unavailable"));
    }
    let last = exhaustion.last().ok_or_else(|| invalid("empty exhaustion"))?;
    let diff = report.estimate - lambda;
    let class = if diff > band {
        Criticality::Subcritical
    } else if diff < -band {
        Criticality::Supercritical
    } else {
        Criticality::Critical
    };
    let (k, mass) = restrict(system, last, lambda);
    let mut out = CriticalityReport {
        class,
        lambda,
        estimate: report.estimate,
        band,
        green_min: None,
        witness_eigenvalue: None,
        verified: true,
    };
    match class {
        Criticality::Subcritical => {
            let p = last.iter().position(|&v| v == basepoint).ok_or_else(|| invalid("basepoint outside exhaustion"))?;
            let f = Factorization::cholesky(&k).map_err(|e| Error::NotSubcritical(e.to_string()))?;
            let mut rhs = vec![0.0; last.len()];
            rhs[p] = 1.0;
            let g = f.solve(&rhs)?;
            let min = g.iter().copied().fold(f64::INFINITY, f64::min);
            out.green_min = Some(min);
            out.verified = min > 0.0;
        }
        Criticality::Supercritical => {
            let pair = smallest_eigenpair(&k, &mass, opts)?;
            out.witness_eigenvalue = Some(pair.value);
            out.verified = pair.value < 0.0;
        }
        Criticality::Critical => {}
    }
    Ok(out)
}

/// `−u''` with weight `1/r²` on `(e^{−L}, 1]`, exhausted by `[e^{−L_m}, 1]`.
pub struct HardyModel {
    pub system: GridSystem,
    pub exhaustion: Vec<Vec<usize>>,
    pub scales: Vec<f64>,
    pub basepoint: usize,
}

pub fn hardy_model(nodes: usize, log_lengths: &[f64]) -> Result<HardyModel> {
    if log_lengths.is_empty() || log_lengths.windows(2).any(|w| !(w[1] > w[0])) || !(log_lengths[0] > 1.0) {
        return Err(invalid("log lengths must increase and exceed 1"));
    }
    let big = *log_lengths.last().expect("non-empty");
    let domain = radial_1d((-big).exp(), 1.0, nodes, Spacing::Geometric, 1.0)?;
    let weight: Vec<f64> = domain.coords.iter().map(|c| 1.0 / (c[0] * c[0])).collect();
    let system = discretize(&domain, &OperatorSpec::laplacian().with_weight(weight))?;
    let exhaustion = log_lengths
        .iter()
        .map(|l| {
            let cut = -l * (1.0 + 1e-9);
            system.free().iter().copied().filter(|&v| domain.coords[v][0].ln() > cut).collect()
        })
        .collect();
    let basepoint = domain.nearest(&[0.5]);
    Ok(HardyModel { system, exhaustion, scales: log_lengths.to_vec(), basepoint })
}

/// Least-squares slope of `ln φ` against `ln r` over `r ∈ [lo, hi]`.
pub fn log_slope(system: &GridSystem, phi: &GridFunction, lo: f64, hi: f64) -> Result<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = system
        .free()
        .iter()
        .map(|&v| (system.domain.coords[v][0], phi.values[v]))
        .filter(|(r, f)| *r >= lo && *r <= hi && *f > 0.0)
        .map(|(r, f)| (r.ln(), f.ln()))
        .unzip();
    if xs.len() < 2 {
        return Err(invalid("too few positive samples for a log-slope fit"));
    }
    Ok(fit_line(&xs, &ys).0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::domain::disk;

    fn lengths() -> Vec<f64> {
        vec![5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
    }

    #[test]
    fn hardy_constant_and_trichotomy() {
        let h = hardy_model(1000, &lengths()).unwrap();
        let opts = EigenOptions::default();
        let rep = weighted_principal_eigenvalue(&h.system, &h.exhaustion, Some(&h.scales), h.basepoint, opts).unwrap();
        assert!(rep.strictly_decreasing, "{:?}", rep.lambdas);
        for (l, lam) in h.scales.iter().zip(&rep.lambdas) {
            let exact = 0.25 + (std::f64::consts::PI / l).powi(2);
            assert!((lam - exact).abs() < 0.01 * exact, "{l}: {lam} {exact}");
        }
        assert!((rep.estimate - 0.25).abs() < CRITICAL_BAND, "{}", rep.estimate);
        let classify = |lambda| {
            criticality_classify(&h.system, &h.exhaustion, &rep, lambda, CRITICAL_BAND, h.basepoint, opts).unwrap()
        };
        let sub = classify(0.1);
        assert_eq!(sub.class, Criticality::Subcritical);
        assert!(sub.verified && sub.green_min.unwrap() > 0.0);
        assert_eq!(classify(0.25).class, Criticality::Critical);
        let sup = classify(0.5);
        assert_eq!(sup.class, Criticality::Supercritical);
        assert!(sup.verified && sup.witness_eigenvalue.unwrap() < 0.0);
        let l = 30.0f64;
        let slope = log_slope(&h.system, &rep.ground_state, (-2.0 * l / 3.0).exp(), (-l / 3.0).exp()).unwrap();
        assert!((slope - 0.5).abs() < 0.025, "{slope}");
    }

    #[test]
    fn degenerate_exhaustion_is_constant() {
        let d = disk(16).unwrap();
        let s = discretize(&d, &OperatorSpec::laplacian()).unwrap();
        let all = s.free().to_vec();
        let p0 = d.nearest(&[0.0, 0.0]);
        let rep = weighted_principal_eigenvalue(&s, &[all.clone(), all.clone(), all], None, p0, EigenOptions::default())
            .unwrap();
        assert!(!rep.strictly_decreasing);
        assert!((rep.lambdas[0] - rep.lambdas[2]).abs() < 1e-10);
        // First Dirichlet eigenvalue of the unit disk, j_{0,1}².
        assert!((rep.lambdas[0] - 5.783186).abs() < 0.1, "{}", rep.lambdas[0]);
        assert!((rep.ground_state.values[p0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_nested() {
        let h = hardy_model(200, &[5.0, 10.0]).unwrap();
        let mut ex = h.exhaustion.clone();
        ex.reverse();
        assert!(weighted_principal_eigenvalue(&h.system, &ex, None, h.basepoint, EigenOptions::default()).is_err());
    }
}
