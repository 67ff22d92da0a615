use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::density::{DensityField, DensityMode};
use super::geodesic::PathMetric;
use super::space::SampledSpace;
use crate::error::{invalid, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothedDensity {
    pub field: DensityField,
    /// `min δ*/δ`.
    pub c1: f64,
    /// `max δ*/δ`.
    pub c2: f64,
    /// Range of `d_ρ* / d_ρ` over spot-checked pairs.
    pub distance_ratio: (f64, f64),
}

/// Base-metric ball around `v` of radius `r` as `(vertex, distance)`.
fn ball(space: &SampledSpace, v: usize, r: f64) -> Vec<(usize, f64)> {
    let mut dist: HashMap<usize, f64> = HashMap::new();
    let mut heap = BinaryHeap::new();
    dist.insert(v, 0.0);
    heap.push(Reverse((ordered(0.0), v)));
    let mut out = Vec::new();
    while let Some(Reverse((d, u))) = heap.pop() {
        let d = f64::from_bits(d);
        if d > dist[&u] {
            continue;
        }
        out.push((u, d));
        for &(w, e) in space.neighbours(u) {
            let nd = d + space.edges()[e].length;
            if nd <= r && nd < *dist.get(&w).unwrap_or(&f64::INFINITY) {
                dist.insert(w, nd);
                heap.push(Reverse((ordered(nd), w)));
            }
        }
    }
    out
}

// Non-negative floats order like their bit patterns.
fn ordered(x: f64) -> u64 {
    x.to_bits()
}

/// Averages `δ` over base balls of radius `radius · δ(v)` (volume weighted)
/// and reports the sandwich constants of the result.
pub fn smooth_density(
    space: &SampledSpace,
    density: &DensityField,
    radius: f64,
    check_pairs: usize,
    seed: u64,
) -> Result<SmoothedDensity> {
    if !(radius >= 0.0) {
        return Err(invalid(format!("smoothing radius must be non-negative, got {radius}")));
    }
    let smoothed: Vec<f64> = (0..space.len())
        .map(|v| {
            if radius == 0.0 {
                return density.delta(v);
            }
            let b = ball(space, v, radius * density.delta(v));
            let (num, den) = b.iter().fold((0.0, 0.0), |(n, d), &(u, _)| {
                let w = space.volume(u).max(f64::MIN_POSITIVE);
                (n + w * density.delta(u), d + w)
            });
            num / den
        })
        .collect();
    let ratios = smoothed.iter().zip(density.deltas()).map(|(s, d)| s / d);
    let (c1, c2) = ratios.fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    let rho: Vec<f64> = smoothed.iter().map(|d| 1.0 / d).collect();
    let field = DensityField::new(space, DensityMode::Custom, rho)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = space.sample_vertices(&mut rng, check_pairs.max(2));
    let a = PathMetric::conformal(space, density).distances(pts[0]);
    let b = PathMetric::conformal(space, &field).distances(pts[0]);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for &p in &pts[1..] {
        if a[p] > 0.0 {
            lo = lo.min(b[p] / a[p]);
            hi = hi.max(b[p] / a[p]);
        }
    }
    if !lo.is_finite() {
        lo = 1.0;
        hi = 1.0;
    }
    Ok(SmoothedDensity { field, c1, c2, distance_ratio: (lo, hi) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::density::{attach_density, DensitySpec};
    use crate::metric::space::{build_space, DomainSpec};

    #[test]
    fn constant_density_unchanged() {
        let s = build_space(&DomainSpec::HalfDisk, 12).unwrap();
        let one = DensityField::constant(&s, 1.0).unwrap();
        let out = smooth_density(&s, &one, 0.3, 10, 1).unwrap();
        assert!((out.c1 - 1.0).abs() < 1e-12 && (out.c2 - 1.0).abs() < 1e-12);
        for v in 0..s.len() {
            assert!((out.field.rho(v) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_radius_is_identity() {
        let s = build_space(&DomainSpec::PuncturedDisk { inner_radius: 0.05 }, 16).unwrap();
        let rho = attach_density(&s, &DensitySpec::InvDistSigma).unwrap();
        let out = smooth_density(&s, &rho, 0.0, 10, 1).unwrap();
        assert_eq!(out.field.values(), rho.values());
        assert_eq!((out.c1, out.c2), (1.0, 1.0));
    }

    #[test]
    fn punctured_disk_sandwich() {
        let s = build_space(&DomainSpec::PuncturedDisk { inner_radius: 0.01 }, 32).unwrap();
        let rho = attach_density(&s, &DensitySpec::InvDistSigma).unwrap();
        let out = smooth_density(&s, &rho, 0.5, 20, 2).unwrap();
        assert!(out.c1 > 0.0 && out.c1 <= 1.0 + 1e-12, "{}", out.c1);
        assert!(out.c2 >= 1.0 - 1e-12 && out.c2.is_finite(), "{}", out.c2);
        for v in 0..s.len() {
            let r = out.field.delta(v) / rho.delta(v);
            assert!(r >= out.c1 - 1e-12 && r <= out.c2 + 1e-12);
        }
        let (lo, hi) = out.distance_ratio;
        assert!(lo >= 1.0 / out.c2 - 1e-9 && hi <= 1.0 / out.c1 + 1e-9);
    }
}
