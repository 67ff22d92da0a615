use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::density::DensityField;
use super::geodesic::{GeodesicPath, PathMetric, ShortestPaths};
use super::space::{SampledSpace, VertexRole};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RayLabel {
    /// Ends on the singular set (finite base length).
    SigmaDirected,
    /// Base length grows without bound (truncated far end).
    InfinityDirected,
    /// Ends on the outer boundary of a bounded domain.
    DomainBoundary,
    Unresolved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracedRay {
    pub target: usize,
    pub end: usize,
    pub base_length: f64,
    pub conformal_length: f64,
    pub end_distance_to_sigma: f64,
    pub label: RayLabel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayClassification {
    pub rays: Vec<TracedRay>,
    pub diameter: f64,
}

impl RayClassification {
    pub fn count(&self, label: RayLabel) -> usize {
        self.rays.iter().filter(|r| r.label == label).count()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayOptions {
    /// Divergence is declared when the base length exceeds this multiple of
    /// the base diameter.
    pub divergence_factor: f64,
}

impl Default for RayOptions {
    fn default() -> Self {
        Self { divergence_factor: 10.0 }
    }
}

/// Children lists of a shortest-path tree.
fn children(tree: &ShortestPaths, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); n];
    for v in 0..n {
        if let Some(p) = tree.predecessor(v) {
            out[p].push(v);
        }
    }
    out
}

/// Deepest terminal vertex below each vertex of a shortest-path tree,
/// preferring leaves that lie on a non-interior vertex.
fn terminal_descendants(space: &SampledSpace, tree: &ShortestPaths, kids: &[Vec<usize>]) -> Vec<usize> {
    let n = space.len();
    let mut order: Vec<usize> = (0..n).filter(|&v| tree.dist[v].is_finite()).collect();
    order.sort_by(|&a, &b| tree.dist[b].total_cmp(&tree.dist[a]).then(a.cmp(&b)));
    let key = |v: usize| (space.role(v) != VertexRole::Interior, tree.dist[v]);
    let mut best: Vec<usize> = (0..n).collect();
    for v in order {
        for &c in &kids[v] {
            let (kc, kb) = (key(best[c]), key(best[v]));
            if kc.0 > kb.0 || (kc.0 == kb.0 && kc.1 > kb.1) {
                best[v] = best[c];
            }
        }
    }
    best
}

/// Extends the tree path to `target` through the subtree toward its best
/// terminal vertex, then past the cut locus by strict ascent of the distance
/// from the root until a non-interior vertex or a local maximum is reached.
pub fn extend_ray(space: &SampledSpace, tree: &ShortestPaths, terminal: &[usize], target: usize) -> Vec<usize> {
    let mut path = tree.path_to(terminal[target]).unwrap_or_default();
    let Some(&last) = path.last() else { return path };
    let mut v = last;
    while space.role(v) == VertexRole::Interior {
        let next = space
            .neighbours(v)
            .iter()
            .map(|&(w, _)| w)
            .filter(|&w| tree.dist[w] > tree.dist[v])
            .max_by(|&a, &b| tree.dist[a].total_cmp(&tree.dist[b]).then(b.cmp(&a)));
        match next {
            Some(w) => {
                path.push(w);
                v = w;
            }
            None => break,
        }
    }
    path
}

/// Approximate base diameter via a double sweep.
pub fn base_diameter(space: &SampledSpace) -> f64 {
    let m = PathMetric::base(space);
    let d0 = m.distances(space.basepoint());
    let far = (0..space.len()).max_by(|&a, &b| d0[a].total_cmp(&d0[b])).unwrap_or(0);
    m.distances(far).into_iter().filter(|d| d.is_finite()).fold(0.0, f64::max)
}

/// Traces `ray_count` maximal conformal geodesics from the basepoint through
/// seeded targets and labels each by where its base-metric trace ends.
pub fn classify_boundary_rays(
    space: &SampledSpace,
    density: &DensityField,
    ray_count: usize,
    seed: u64,
    opts: RayOptions,
) -> RayClassification {
    let diameter = base_diameter(space);
    if ray_count == 0 {
        return RayClassification { rays: Vec::new(), diameter };
    }
    let metric = PathMetric::conformal(space, density);
    let tree = metric.tree(space.basepoint());
    let kids = children(&tree, space.len());
    let terminal = terminal_descendants(space, &tree, &kids);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let targets = space.sample_vertices(&mut rng, ray_count);
    let rays = targets
        .into_iter()
        .map(|t| {
            let path = GeodesicPath::along(space, Some(density), extend_ray(space, &tree, &terminal, t));
            let end = path.end();
            let label = if path.base_length > opts.divergence_factor * diameter {
                RayLabel::InfinityDirected
            } else {
                match space.role(end) {
                    VertexRole::SigmaCollar => RayLabel::SigmaDirected,
                    VertexRole::Infinity => RayLabel::InfinityDirected,
                    VertexRole::DomainBoundary => RayLabel::DomainBoundary,
                    VertexRole::Interior => RayLabel::Unresolved,
                }
            };
            TracedRay {
                target: t,
                end,
                base_length: path.base_length,
                conformal_length: path.conformal_length,
                end_distance_to_sigma: space.dist_to_sigma(end),
                label,
            }
        })
        .collect();
    RayClassification { rays, diameter }
}
