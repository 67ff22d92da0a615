use serde::{Deserialize, Serialize};

use super::operator::GridFunction;
use crate::error::{invalid, Error, Result};
use crate::linalg::fit_line;

fn quotient_range(u: &GridFunction, v: &GridFunction, region: &[usize]) -> Result<(f64, f64)> {
    if region.is_empty() {
        return Err(invalid("empty comparison region"));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in region {
        let (a, b) = (u.values[x], v.values[x]);
        if !(b > 0.0) {
            return Err(Error::NonPositive(format!("denominator {b} at node {x}")));
        }
        let q = a / b;
        lo = lo.min(q);
        hi = hi.max(q);
    }
    Ok((lo, hi))
}

/// `sup_{x,y∈U} (u(x)/v(x)) · (v(y)/u(y))`.
pub fn bhp_ratio(u: &GridFunction, v: &GridFunction, inner: &[usize]) -> Result<f64> {
    if let Some(&x) = inner.iter().find(|&&x| !(u.values[x] > 0.0)) {
        return Err(Error::NonPositive(format!("numerator {} at node {x}", u.values[x])));
    }
    let (lo, hi) = quotient_range(u, v, inner)?;
    Ok(hi / lo)
}

/// `(C* − 1) / (C* + 1)`.
pub fn predicted_rate(c_star: f64) -> f64 {
    (c_star - 1.0) / (c_star + 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationReport {
    /// `sup_{N_i} u/v − inf_{N_i} u/v`.
    pub osc: Vec<f64>,
    /// BHP constant of the level pairs `(N_i, N_{i+1})`.
    pub c_star: f64,
    pub predicted_rate: f64,
    /// Geometric rate from a log-linear fit of `osc`.
    pub fitted_rate: f64,
    pub non_increasing: bool,
    /// Largest `osc(i+1)/osc(i) − a` over levels.
    pub max_step_excess: f64,
}

/// Oscillation of `u/v` over nested regions `N_0 ⊃ N_1 ⊃ …`.
///
/// `C*` is measured from the positive solutions `M_i v − u` and `u − m_i v`
/// compared against `v` on `N_{i+1}`.
pub fn oscillation_decay(u: &GridFunction, v: &GridFunction, chain: &[Vec<usize>]) -> Result<OscillationReport> {
    if chain.len() < 3 {
        return Err(invalid(format!("chain has {} levels, need at least 3", chain.len())));
    }
    let ranges = chain.iter().map(|n| quotient_range(u, v, n)).collect::<Result<Vec<_>>>()?;
    let osc: Vec<f64> = ranges.iter().map(|(lo, hi)| hi - lo).collect();
    let scale = osc[0].abs().max(1e-300);
    let mut c_star: f64 = 1.0;
    for i in 0..chain.len() - 1 {
        let (m, big_m) = ranges[i];
        if osc[i] <= 1e-12 * scale.max(big_m.abs()) {
            continue;
        }
        let above = GridFunction { values: u.values.iter().zip(&v.values).map(|(a, b)| big_m * b - a).collect() };
        let below = GridFunction { values: u.values.iter().zip(&v.values).map(|(a, b)| a - m * b).collect() };
        for w in [&above, &below] {
            c_star = c_star.max(bhp_ratio(w, v, &chain[i + 1])?);
        }
    }
    let a = predicted_rate(c_star);
    let positive: Vec<(f64, f64)> = osc
        .iter()
        .enumerate()
        .filter(|(_, o)| **o > 1e-14 * scale)
        .map(|(i, o)| (i as f64, o.ln()))
        .collect();
    let fitted_rate = if positive.len() >= 2 {
        let (xs, ys): (Vec<f64>, Vec<f64>) = positive.into_iter().unzip();
        fit_line(&xs, &ys).0.exp()
    } else {
        0.0
    };
    let non_increasing = osc.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-14 * scale);
    let max_step_excess = osc
        .windows(2)
        .filter(|w| w[0] > 1e-14 * scale)
        .map(|w| w[1] / w[0] - a)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(OscillationReport { osc, c_star, predicted_rate: a, fitted_rate, non_increasing, max_step_excess })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub c_measured: f64,
    pub argmax: usize,
}

/// `sup_U G(p₀, ·) / v` for `v > 0` on `U`, `p₀ ∉ U`.
pub fn minimal_growth_check(green: &GridFunction, v: &GridFunction, region: &[usize], pole: usize) -> Result<GrowthReport> {
    if region.contains(&pole) {
        return Err(invalid("pole lies in the comparison region"));
    }
    if region.is_empty() {
        return Err(invalid("empty comparison region"));
    }
    let mut best = (f64::NEG_INFINITY, region[0]);
    for &x in region {
        let b = v.values[x];
        if !(b > 0.0) {
            return Err(Error::NonPositive(format!("comparison function {b} at node {x}")));
        }
        let q = green.values[x] / b;
        if q > best.0 {
            best = (q, x);
        }
    }
    Ok(GrowthReport { c_measured: best.0, argmax: best.1 })
}
