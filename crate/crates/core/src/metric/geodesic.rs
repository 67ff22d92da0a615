use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::density::DensityField;
use super::space::SampledSpace;
use crate::error::{invalid, Error, Result};

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

/// Single- or multi-source shortest-path tree.
#[derive(Debug, Clone)]
pub struct ShortestPaths {
    pub dist: Vec<f64>,
    pred: Vec<usize>,
}

impl ShortestPaths {
    /// Vertices from a source to `target`, inclusive.
    pub fn path_to(&self, target: usize) -> Option<Vec<usize>> {
        if !self.dist[target].is_finite() {
            return None;
        }
        let mut out = vec![target];
        let mut v = target;
        while self.pred[v] != NONE {
            v = self.pred[v];
            out.push(v);
        }
        out.reverse();
        Some(out)
    }

    pub fn predecessor(&self, v: usize) -> Option<usize> {
        (self.pred[v] != NONE).then_some(self.pred[v])
    }
}

/// Dijkstra over per-edge weights. Among equal-length routes the
/// predecessor with the smallest vertex id wins.
pub fn dijkstra(space: &SampledSpace, weights: &[f64], sources: &[usize]) -> ShortestPaths {
    let n = space.len();
    let mut dist = vec![f64::INFINITY; n];
    let mut pred = vec![NONE; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(Reverse(Key(0.0, s)));
    }
    while let Some(Reverse(Key(d, v))) = heap.pop() {
        if done[v] || d > dist[v] {
            continue;
        }
        done[v] = true;
        for &(w, e) in space.neighbours(v) {
            if done[w] {
                continue;
            }
            let nd = d + weights[e];
            if nd < dist[w] || (nd == dist[w] && v < pred[w]) {
                dist[w] = nd;
                pred[w] = v;
                heap.push(Reverse(Key(nd, w)));
            }
        }
    }
    ShortestPaths { dist, pred }
}

/// Path metric on a sampled space with precomputed edge weights.
#[derive(Debug, Clone)]
pub struct PathMetric<'a> {
    space: &'a SampledSpace,
    weights: Vec<f64>,
    rho: Option<&'a DensityField>,
}

impl<'a> PathMetric<'a> {
    pub fn conformal(space: &'a SampledSpace, density: &'a DensityField) -> Self {
        let weights = space
            .edges()
            .iter()
            .map(|e| density.edge_weight(e.a, e.b, e.length))
            .collect();
        Self { space, weights, rho: Some(density) }
    }

    /// The base metric `d_g` (density identically one).
    pub fn base(space: &'a SampledSpace) -> Self {
        Self { space, weights: space.edges().iter().map(|e| e.length).collect(), rho: None }
    }

    pub fn space(&self) -> &'a SampledSpace {
        self.space
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn tree(&self, source: usize) -> ShortestPaths {
        dijkstra(self.space, &self.weights, &[source])
    }

    pub fn tree_from(&self, sources: &[usize]) -> ShortestPaths {
        dijkstra(self.space, &self.weights, sources)
    }

    /// Distances from `source` to every vertex.
    pub fn distances(&self, source: usize) -> Vec<f64> {
        self.tree(source).dist
    }

    pub fn distance(&self, x: usize, y: usize) -> Result<f64> {
        self.check(x)?;
        self.check(y)?;
        if x == y {
            return Ok(0.0);
        }
        let d = self.tree(x).dist[y];
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::Unreachable(y, x))
        }
    }

    /// Rows of pairwise distances among `points`, computed in parallel.
    pub fn distance_matrix(&self, points: &[usize]) -> Vec<Vec<f64>> {
        points
            .par_iter()
            .map(|&p| {
                let d = self.distances(p);
                points.iter().map(|&q| d[q]).collect()
            })
            .collect()
    }

    fn check(&self, v: usize) -> Result<()> {
        if v < self.space.len() {
            Ok(())
        } else {
            Err(invalid(format!("vertex {v} out of range")))
        }
    }

    pub fn geodesic(&self, x: usize, y: usize) -> Result<GeodesicPath> {
        self.check(x)?;
        self.check(y)?;
        let tree = self.tree(x);
        let vertices = tree.path_to(y).ok_or(Error::Unreachable(y, x))?;
        Ok(GeodesicPath::along(self.space, self.rho, vertices))
    }
}

/// Vertex path with base and conformal prefix lengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    pub vertices: Vec<usize>,
    pub base_length: f64,
    pub conformal_length: f64,
    pub base_prefix: Vec<f64>,
    pub conformal_prefix: Vec<f64>,
}

fn edge_between(space: &SampledSpace, a: usize, b: usize) -> Option<usize> {
    space
        .neighbours(a)
        .iter()
        .filter(|&&(w, _)| w == b)
        .map(|&(_, e)| e)
        .min_by(|&e1, &e2| space.edges()[e1].length.total_cmp(&space.edges()[e2].length))
}

impl GeodesicPath {
    /// Evaluates lengths along consecutive adjacent vertices. Without a
    /// density the conformal length equals the base length.
    pub fn along(space: &SampledSpace, density: Option<&DensityField>, vertices: Vec<usize>) -> Self {
        let mut base_prefix = vec![0.0];
        let mut conformal_prefix = vec![0.0];
        for w in vertices.windows(2) {
            let e = edge_between(space, w[0], w[1]).expect("path vertices must be adjacent");
            let len = space.edges()[e].length;
            let c = density.map_or(len, |d| d.edge_weight(w[0], w[1], len));
            base_prefix.push(base_prefix.last().unwrap() + len);
            conformal_prefix.push(conformal_prefix.last().unwrap() + c);
        }
        Self {
            base_length: *base_prefix.last().unwrap(),
            conformal_length: *conformal_prefix.last().unwrap(),
            vertices,
            base_prefix,
            conformal_prefix,
        }
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Base length of the shorter of the two sub-arcs split at position `i`.
    pub fn l_min(&self, i: usize) -> f64 {
        self.base_prefix[i].min(self.base_length - self.base_prefix[i])
    }

    /// First index whose conformal prefix reaches `t`.
    pub fn index_at_conformal(&self, t: f64) -> usize {
        self.conformal_prefix.partition_point(|&s| s < t).min(self.len() - 1)
    }
}

/// Conformal distance between two vertices.
pub fn conformal_distance(space: &SampledSpace, density: &DensityField, x: usize, y: usize) -> Result<f64> {
    PathMetric::conformal(space, density).distance(x, y)
}

/// A shortest path for the conformal metric with its lengths.
pub fn geodesic_between(space: &SampledSpace, density: &DensityField, x: usize, y: usize) -> Result<GeodesicPath> {
    PathMetric::conformal(space, density).geodesic(x, y)
}
