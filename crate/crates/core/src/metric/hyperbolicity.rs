use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::density::DensityField;
use super::geodesic::PathMetric;
use super::space::SampledSpace;
use crate::error::Result;

/// `(y·z)_x` from the three pairwise distances `d(x,y)`, `d(x,z)`, `d(y,z)`.
pub fn gromov_from_distances(dxy: f64, dxz: f64, dyz: f64) -> f64 {
    0.5 * (dxy + dxz - dyz)
}

/// Gromov product `(y·z)_x` for an arbitrary distance function.
pub fn gromov_product<F>(dist: F, x: usize, y: usize, z: usize) -> Result<f64>
where
    F: Fn(usize, usize) -> Result<f64>,
{
    Ok(gromov_from_distances(dist(x, y)?, dist(x, z)?, dist(y, z)?).max(0.0))
}

/// Four-point defect of `(w, x, y, z)` given a distance matrix.
pub fn four_point_defect(d: &[Vec<f64>], w: usize, x: usize, y: usize, z: usize) -> f64 {
    let g = |a: usize, b: usize| gromov_from_distances(d[x][a], d[x][b], d[a][b]);
    g(y, w).min(g(z, w)) - g(y, z)
}

/// Largest four-point defect over all ordered quadruples (clamped at 0).
pub fn four_point_delta_exhaustive(d: &[Vec<f64>]) -> f64 {
    let k = d.len();
    let mut best = 0.0f64;
    for w in 0..k {
        for x in 0..k {
            for y in 0..k {
                for z in 0..k {
                    best = best.max(four_point_defect(d, w, x, y, z));
                }
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaOptions {
    /// Size of the vertex pool that quadruples and triangles are drawn from.
    pub pool: usize,
    /// Pools at most this large are searched exhaustively.
    pub exhaustive_threshold: usize,
}

impl Default for DeltaOptions {
    fn default() -> Self {
        Self { pool: 48, exhaustive_threshold: 12 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicityReport {
    pub delta_fourpoint: f64,
    pub delta_thin_triangles: f64,
    pub quadruples: usize,
    pub triangles: usize,
    pub pool: usize,
    pub vertices: usize,
    pub exhaustive: bool,
}

/// Estimates Gromov hyperbolicity from seeded samples.
///
/// A pool of vertices is drawn first (from the space's sampling region, so
/// refinements see the same locations); quadruples and triangles are then
/// drawn from the pool. Enlarging the sample counts only appends samples,
/// so both estimates are monotone in the counts.
pub fn estimate_delta(
    space: &SampledSpace,
    density: &DensityField,
    quadruple_samples: usize,
    triangle_samples: usize,
    seed: u64,
) -> HyperbolicityReport {
    estimate_delta_with(space, density, quadruple_samples, triangle_samples, seed, DeltaOptions::default())
}

pub fn estimate_delta_with(
    space: &SampledSpace,
    density: &DensityField,
    quadruple_samples: usize,
    triangle_samples: usize,
    seed: u64,
    opts: DeltaOptions,
) -> HyperbolicityReport {
    let metric = PathMetric::conformal(space, density);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<usize> = if space.len() <= opts.exhaustive_threshold.max(opts.pool) {
        (0..space.len()).collect()
    } else {
        let mut p = space.sample_vertices(&mut rng, opts.pool);
        p.sort_unstable();
        p.dedup();
        p
    };
    let d = metric.distance_matrix(&pool);
    let k = pool.len();

    let exhaustive = k <= opts.exhaustive_threshold;
    let (delta_fourpoint, quadruples) = if exhaustive {
        (four_point_delta_exhaustive(&d), k.pow(4))
    } else {
        let mut qrng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
        let mut best = 0.0f64;
        for _ in 0..quadruple_samples {
            let q: [usize; 4] = std::array::from_fn(|_| qrng.gen_range(0..k));
            best = best.max(four_point_defect(&d, q[0], q[1], q[2], q[3]));
        }
        (best, quadruple_samples)
    };

    let mut trng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x5851_f42d_4c95_7f2d));
    let triangles: Vec<[usize; 3]> = (0..triangle_samples)
        .map(|_| std::array::from_fn(|_| pool[trng.gen_range(0..k)]))
        .collect();
    let delta_thin_triangles = triangles
        .par_iter()
        .map(|t| triangle_thinness(&metric, t[0], t[1], t[2]))
        .reduce(|| 0.0, f64::max);

    HyperbolicityReport {
        delta_fourpoint,
        delta_thin_triangles,
        quadruples,
        triangles: triangle_samples,
        pool: k,
        vertices: space.len(),
        exhaustive,
    }
}

/// Largest distance from a point of one side of the geodesic triangle
/// `xyz` to the union of the two other sides.
pub fn triangle_thinness(metric: &PathMetric<'_>, x: usize, y: usize, z: usize) -> f64 {
    let tx = metric.tree(x);
    let ty = metric.tree(y);
    let Some(xy) = tx.path_to(y) else { return f64::INFINITY };
    let Some(yz) = ty.path_to(z) else { return f64::INFINITY };
    let Some(xz) = tx.path_to(z) else { return f64::INFINITY };
    let sides = [&xy, &yz, &xz];
    let mut worst = 0.0f64;
    for i in 0..3 {
        let others: Vec<usize> = (0..3)
            .filter(|&j| j != i)
            .flat_map(|j| sides[j].iter().copied())
            .collect();
        let reach = metric.tree_from(&others).dist;
        for &v in sides[i] {
            worst = worst.max(reach[v]);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::space::euclidean_grid;

    #[test]
    fn product_arithmetic() {
        assert_eq!(gromov_from_distances(3.0, 5.0, 2.0), 3.0);
        let d = |a: usize, b: usize| -> Result<f64> { Ok((a as f64 - b as f64).abs()) };
        assert_eq!(gromov_product(d, 4, 7, 4).unwrap(), 0.0);
        assert_eq!(gromov_product(d, 4, 7, 7).unwrap(), 3.0);
    }

    #[test]
    fn grid_delta_grows() {
        let mut last = -1.0;
        for n in [3, 5, 8] {
            let g = euclidean_grid(n).unwrap();
            let one = DensityField::constant(&g, 1.0).unwrap();
            let d = PathMetric::conformal(&g, &one).distance_matrix(&(0..g.len()).collect::<Vec<_>>());
            let delta = four_point_delta_exhaustive(&d);
            assert!(delta > last, "n={n}: {delta} <= {last}");
            last = delta;
        }
    }

    #[test]
    fn estimates_are_monotone_in_counts() {
        let g = euclidean_grid(10).unwrap();
        let one = DensityField::constant(&g, 1.0).unwrap();
        let small = estimate_delta(&g, &one, 200, 3, 7);
        let large = estimate_delta(&g, &one, 2000, 6, 7);
        assert!(!small.exhaustive);
        assert!(large.delta_fourpoint >= small.delta_fourpoint);
        assert!(large.delta_thin_triangles >= small.delta_thin_triangles);
    }
}
