use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::CsrMatrix;

/// What a vertex stands for in the discretized space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VertexRole {
    Interior,
    /// Outer boundary of a bounded domain.
    DomainBoundary,
    /// Outermost layer of vertices next to the singular set.
    SigmaCollar,
    /// Far end of a truncated unbounded space.
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    /// Base length of the edge.
    pub length: f64,
    /// Finite-volume conductance; zero for edges that only serve the metric.
    pub conductance: f64,
}

/// Off-graph representation of the singular set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SigmaSet {
    Points(Vec<Vec<f64>>),
    /// Only the origin (cone tip, puncture).
    Tip,
    /// A straight segment, e.g. the diameter of a half-disk.
    Segment { start: Vec<f64>, end: Vec<f64> },
}

impl SigmaSet {
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            SigmaSet::Tip => norm(x),
            SigmaSet::Points(pts) => pts
                .iter()
                .map(|p| dist(p, x))
                .fold(f64::INFINITY, f64::min),
            SigmaSet::Segment { start, end } => {
                let d: Vec<f64> = end.iter().zip(start).map(|(e, s)| e - s).collect();
                let len2: f64 = d.iter().map(|v| v * v).sum();
                let t = if len2 > 0.0 {
                    x.iter()
                        .zip(start)
                        .zip(&d)
                        .map(|((xv, s), dv)| (xv - s) * dv)
                        .sum::<f64>()
                        / len2
                } else {
                    0.0
                };
                let t = t.clamp(0.0, 1.0);
                let proj: Vec<f64> = start.iter().zip(&d).map(|(s, dv)| s + t * dv).collect();
                dist(&proj, x)
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, SigmaSet::Points(p) if p.is_empty())
    }
}

/// Region used to draw coordinate samples that do not depend on the mesh,
/// so that refinements of the same space see the same sample locations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SampleRegion {
    /// Planar annulus; radii drawn log-uniformly.
    Annulus { r_min: f64, r_max: f64 },
    /// Upper half-disk of the given radius.
    HalfDisk { radius: f64 },
    /// Cone over a product of two circles with the given radii, embedded in
    /// four dimensions; radii drawn log-uniformly.
    Cone { r_min: f64, r_max: f64, a: f64, b: f64 },
    /// No geometric description; samples are uniform vertices.
    Vertices,
}

impl SampleRegion {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Option<Vec<f64>> {
        match *self {
            SampleRegion::Annulus { r_min, r_max } => {
                let r = (r_min.ln() + rng.gen::<f64>() * (r_max / r_min).ln()).exp();
                let t = rng.gen::<f64>() * 2.0 * PI;
                Some(vec![r * t.cos(), r * t.sin()])
            }
            SampleRegion::HalfDisk { radius } => {
                let r = radius * rng.gen::<f64>().sqrt();
                let t = rng.gen::<f64>() * PI;
                Some(vec![r * t.cos(), r * t.sin()])
            }
            SampleRegion::Cone { r_min, r_max, a, b } => {
                let r = (r_min.ln() + rng.gen::<f64>() * (r_max / r_min).ln()).exp();
                let t = rng.gen::<f64>() * 2.0 * PI;
                let f = rng.gen::<f64>() * 2.0 * PI;
                Some(vec![r * a * t.cos(), r * a * t.sin(), r * b * f.cos(), r * b * f.sin()])
            }
            SampleRegion::Vertices => None,
        }
    }
}

/// Weighted metric graph discretizing a space with a singular set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledSpace {
    coords: Vec<Vec<f64>>,
    roles: Vec<VertexRole>,
    volumes: Vec<f64>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, usize)>>,
    sigma: SigmaSet,
    basepoint: usize,
    region: SampleRegion,
    label: String,
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

impl SampledSpace {
    /// Assembles a space and validates its invariants.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        label: impl Into<String>,
        coords: Vec<Vec<f64>>,
        roles: Vec<VertexRole>,
        volumes: Vec<f64>,
        edges: Vec<Edge>,
        sigma: SigmaSet,
        basepoint: usize,
        region: SampleRegion,
    ) -> Result<Self> {
        let n = coords.len();
        if n < 2 || edges.is_empty() {
            return Err(Error::Disconnected(format!("{n} vertices, {} edges", edges.len())));
        }
        if roles.len() != n || volumes.len() != n {
            return Err(invalid("role/volume arrays do not match vertex count"));
        }
        if basepoint >= n {
            return Err(invalid(format!("basepoint {basepoint} out of range")));
        }
        let mut adjacency = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            if e.a >= n || e.b >= n || e.a == e.b {
                return Err(invalid(format!("bad edge {} -- {}", e.a, e.b)));
            }
            if !(e.length > 0.0 && e.length.is_finite()) {
                return Err(invalid(format!("edge {} -- {} has length {}", e.a, e.b, e.length)));
            }
            adjacency[e.a].push((e.b, k));
            adjacency[e.b].push((e.a, k));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        if let SigmaSet::Points(pts) = &sigma {
            for p in pts {
                if coords.iter().any(|c| dist(c, p) == 0.0) {
                    return Err(invalid("singular sample coincides with a vertex"));
                }
            }
        }
        let space = Self {
            coords,
            roles,
            volumes,
            edges,
            adjacency,
            sigma,
            basepoint,
            region,
            label: label.into(),
        };
        space.check_connected()?;
        Ok(space)
    }

    fn component_count(&self, keep: impl Fn(usize) -> bool) -> usize {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut comps = 0;
        for s in 0..n {
            if seen[s] || !keep(s) {
                continue;
            }
            comps += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &(w, _) in &self.adjacency[v] {
                    if !seen[w] && keep(w) {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        comps
    }

    fn check_connected(&self) -> Result<()> {
        if self.component_count(|_| true) != 1 {
            return Err(Error::Disconnected(format!("{} is not connected", self.label)));
        }
        let interior = |v: usize| self.roles[v] != VertexRole::DomainBoundary;
        if (0..self.len()).any(interior) && self.component_count(interior) != 1 {
            return Err(Error::Disconnected(format!(
                "{}: non-boundary vertices are not connected",
                self.label
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn coords(&self, v: usize) -> &[f64] {
        &self.coords[v]
    }

    pub fn coords_all(&self) -> &[Vec<f64>] {
        &self.coords
    }

    pub fn role(&self, v: usize) -> VertexRole {
        self.roles[v]
    }

    pub fn roles(&self) -> &[VertexRole] {
        &self.roles
    }

    pub fn volume(&self, v: usize) -> f64 {
        self.volumes[v]
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbours of `v` as `(vertex, edge index)`, sorted by vertex id.
    pub fn neighbours(&self, v: usize) -> &[(usize, usize)] {
        &self.adjacency[v]
    }

    pub fn sigma(&self) -> &SigmaSet {
        &self.sigma
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    pub fn region(&self) -> &SampleRegion {
        &self.region
    }

    pub fn with_basepoint(mut self, v: usize) -> Result<Self> {
        if v >= self.len() {
            return Err(invalid(format!("basepoint {v} out of range")));
        }
        self.basepoint = v;
        Ok(self)
    }

    pub fn dist_to_sigma(&self, v: usize) -> f64 {
        self.sigma.distance(&self.coords[v])
    }

    /// Closest vertex in ambient coordinates; ties go to the smaller id.
    pub fn nearest_vertex(&self, x: &[f64]) -> usize {
        let mut best = (f64::INFINITY, 0);
        for (i, c) in self.coords.iter().enumerate() {
            let d = dist(c, x);
            if d < best.0 {
                best = (d, i);
            }
        }
        best.1
    }

    /// Draws `count` vertices using the sampling region (snapped to the
    /// mesh) or uniformly when the space has no region.
    pub fn sample_vertices<R: Rng>(&self, rng: &mut R, count: usize) -> Vec<usize> {
        (0..count)
            .map(|_| match self.region.sample(rng) {
                Some(x) => self.nearest_vertex(&x),
                None => rng.gen_range(0..self.len()),
            })
            .collect()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(0.0, f64::max)
    }

    /// Weighted graph Laplacian built from the edge conductances.
    pub fn laplacian(&self) -> CsrMatrix {
        let mut t = Vec::with_capacity(4 * self.edges.len() + self.len());
        for e in self.edges.iter().filter(|e| e.conductance > 0.0) {
            t.push((e.a, e.a, e.conductance));
            t.push((e.b, e.b, e.conductance));
            t.push((e.a, e.b, -e.conductance));
            t.push((e.b, e.a, -e.conductance));
        }
        CsrMatrix::from_triplets(self.len(), t)
    }

    /// Serializes to the `V`/`E`/`S` text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, c) in self.coords.iter().enumerate() {
            let _ = write!(out, "V {i}");
            for x in c {
                let _ = write!(out, " {x:?}");
            }
            out.push('\n');
        }
        for e in &self.edges {
            let _ = writeln!(out, "E {} {} {:?}", e.a, e.b, e.length);
        }
        if let SigmaSet::Points(pts) = &self.sigma {
            for p in pts {
                out.push('S');
                for x in p {
                    let _ = write!(out, " {x:?}");
                }
                out.push('\n');
            }
        } else if matches!(self.sigma, SigmaSet::Tip) {
            let dim = self.coords[0].len();
            out.push('S');
            for _ in 0..dim {
                out.push_str(" 0.0");
            }
            out.push('\n');
        }
        out
    }

    /// Parses the `V id x..` / `E id id length` / `S x..` text format.
    ///
    /// Vertices of degree one are marked as domain boundary; conductances
    /// are `1/length` and vertex volumes half the incident length.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut ids: HashMap<String, usize> = HashMap::new();
        let mut coords = Vec::new();
        let mut raw_edges = Vec::new();
        let mut sigma = Vec::new();
        let num = |tok: &str, line: usize| -> Result<f64> {
            tok.parse::<f64>().map_err(|_| Error::Parse {
                line,
                msg: format!("expected a number, got `{tok}`"),
            })
        };
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let mut toks = l.split_whitespace();
            match toks.next() {
                Some("V") => {
                    let id = toks.next().ok_or(Error::Parse { line, msg: "missing vertex id".into() })?;
                    let xs = toks.map(|t| num(t, line)).collect::<Result<Vec<_>>>()?;
                    if xs.is_empty() {
                        return Err(Error::Parse { line, msg: "vertex without coordinates".into() });
                    }
                    if ids.insert(id.to_string(), coords.len()).is_some() {
                        return Err(Error::Parse { line, msg: format!("duplicate vertex `{id}`") });
                    }
                    coords.push(xs);
                }
                Some("E") => {
                    let parts: Vec<&str> = toks.collect();
                    if parts.len() != 3 {
                        return Err(Error::Parse { line, msg: "edge needs two ids and a length".into() });
                    }
                    raw_edges.push((parts[0].to_string(), parts[1].to_string(), num(parts[2], line)?, line));
                }
                Some("S") => {
                    sigma.push(toks.map(|t| num(t, line)).collect::<Result<Vec<_>>>()?);
                }
                Some(other) => {
                    return Err(Error::Parse { line, msg: format!("unknown record `{other}`") });
                }
                None => {}
            }
        }
        let dim = coords.first().map(|c| c.len()).unwrap_or(0);
        if coords.iter().any(|c| c.len() != dim) || sigma.iter().any(|s| s.len() != dim) {
            return Err(invalid("inconsistent coordinate dimension"));
        }
        let mut edges = Vec::with_capacity(raw_edges.len());
        for (a, b, length, line) in raw_edges {
            let lookup = |id: &str| {
                ids.get(id).copied().ok_or(Error::Parse { line, msg: format!("unknown vertex `{id}`") })
            };
            if !(length > 0.0 && length.is_finite()) {
                return Err(Error::Parse { line, msg: format!("edge length {length} must be positive") });
            }
            edges.push(Edge { a: lookup(&a)?, b: lookup(&b)?, length, conductance: 1.0 / length });
        }
        let n = coords.len();
        let mut degree = vec![0usize; n];
        let mut volumes = vec![0.0; n];
        for e in &edges {
            degree[e.a] += 1;
            degree[e.b] += 1;
            volumes[e.a] += 0.5 * e.length;
            volumes[e.b] += 0.5 * e.length;
        }
        let roles = degree
            .iter()
            .map(|&d| if d == 1 { VertexRole::DomainBoundary } else { VertexRole::Interior })
            .collect();
        Self::from_parts(
            "explicit",
            coords,
            roles,
            volumes,
            edges,
            SigmaSet::Points(sigma),
            0,
            SampleRegion::Vertices,
        )
    }
}

/// Structured description of a space to discretize.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainSpec {
    /// Unit disk minus the origin, truncated at `inner_radius`.
    PuncturedDisk {
        #[serde(default = "default_inner_radius")]
        inner_radius: f64,
    },
    /// Planar annulus with the origin as singular set.
    Annulus { inner_radius: f64, outer_radius: f64 },
    /// Upper unit half-disk whose diameter is the singular set.
    HalfDisk,
    /// Truncated Lawson cone; the resolution is the number of radial rings.
    LawsonCone {
        p: usize,
        q: usize,
        #[serde(default = "default_cone_r_min")]
        r_min: f64,
        #[serde(default = "default_cone_r_max")]
        r_max: f64,
        #[serde(default = "default_link_steps")]
        link_steps: usize,
    },
    /// Vertex/edge text.
    Explicit { text: String },
}

fn default_cone_r_min() -> f64 {
    0.01
}

fn default_cone_r_max() -> f64 {
    100.0
}

fn default_link_steps() -> usize {
    16
}

fn default_inner_radius() -> f64 {
    0.01
}

impl DomainSpec {
    pub fn from_kind(kind: &str) -> Result<Self> {
        match kind {
            "punctured-disk" => Ok(DomainSpec::PuncturedDisk { inner_radius: default_inner_radius() }),
            "annulus" => Ok(DomainSpec::Annulus { inner_radius: 0.1, outer_radius: 1.0 }),
            "half-disk" => Ok(DomainSpec::HalfDisk),
            "simons-cone" => Ok(DomainSpec::LawsonCone {
                p: 3,
                q: 3,
                r_min: default_cone_r_min(),
                r_max: default_cone_r_max(),
                link_steps: default_link_steps(),
            }),
            other => Err(Error::UnknownDomain(other.to_string())),
        }
    }
}

struct PolarMesh {
    radii: Vec<f64>,
    angles: Vec<f64>,
    periodic: bool,
}

impl PolarMesh {
    fn index(&self, i: usize, j: usize) -> usize {
        i * self.angles.len() + j
    }

    fn point(&self, i: usize, j: usize) -> Vec<f64> {
        let (r, t) = (self.radii[i], self.angles[j]);
        vec![r * t.cos(), r * t.sin()]
    }

    /// Vertices and edges with the given angular offsets per radial step.
    /// Only axis-aligned edges carry conductance.
    fn build(&self, offsets: &[(usize, isize)]) -> (Vec<Vec<f64>>, Vec<Edge>, Vec<f64>) {
        let nr = self.radii.len();
        let nt = self.angles.len();
        let mut coords = Vec::with_capacity(nr * nt);
        for i in 0..nr {
            for j in 0..nt {
                coords.push(self.point(i, j));
            }
        }
        let dtheta = if self.periodic { 2.0 * PI / nt as f64 } else { self.angles[1] - self.angles[0] };
        // Dual-cell radial extents.
        let face = |i: usize, up: bool| -> f64 {
            if up {
                if i + 1 < nr { 0.5 * (self.radii[i] + self.radii[i + 1]) } else { self.radii[i] }
            } else if i > 0 {
                0.5 * (self.radii[i] + self.radii[i - 1])
            } else {
                self.radii[i]
            }
        };
        let mut volumes = vec![0.0; nr * nt];
        for i in 0..nr {
            let (lo, hi) = (face(i, false), face(i, true));
            let area = 0.5 * (hi * hi - lo * lo);
            for j in 0..nt {
                let w = if !self.periodic && (j == 0 || j + 1 == nt) { 0.5 } else { 1.0 };
                volumes[self.index(i, j)] = area * dtheta * w;
            }
        }
        let mut edges = Vec::new();
        for i in 0..nr {
            for j in 0..nt {
                for &(di, dj) in offsets {
                    let i2 = i + di;
                    if i2 >= nr {
                        continue;
                    }
                    let jj = j as isize + dj;
                    let j2 = if self.periodic {
                        jj.rem_euclid(nt as isize) as usize
                    } else if jj < 0 || jj >= nt as isize {
                        continue;
                    } else {
                        jj as usize
                    };
                    if di == 0 && dj < 0 {
                        continue;
                    }
                    if self.periodic && di == 0 && nt == 2 && j2 < j {
                        continue;
                    }
                    let (a, b) = (self.index(i, j), self.index(i2, j2));
                    if a == b {
                        continue;
                    }
                    let length = dist(&coords[a], &coords[b]);
                    let conductance = match (di, dj) {
                        (1, 0) => {
                            let rm = 0.5 * (self.radii[i] + self.radii[i2]);
                            let mut w = rm * dtheta / (self.radii[i2] - self.radii[i]);
                            if !self.periodic && (j == 0 || j + 1 == nt) {
                                w *= 0.5;
                            }
                            w
                        }
                        (0, 1) => {
                            let (lo, hi) = (face(i, false), face(i, true));
                            (hi - lo) / (self.radii[i] * dtheta)
                        }
                        _ => 0.0,
                    };
                    edges.push(Edge { a: a.min(b), b: a.max(b), length, conductance });
                }
            }
        }
        (coords, edges, volumes)
    }
}

const EIGHT: [(usize, isize); 4] = [(0, 1), (1, 0), (1, 1), (1, -1)];
const SIXTEEN: [(usize, isize); 8] = [(0, 1), (1, 0), (1, 1), (1, -1), (1, 2), (1, -2), (2, 1), (2, -1)];

/// Discretizes `spec`; `resolution` is the number of angular samples (and
/// sets the radial spacing).
pub fn build_space(spec: &DomainSpec, resolution: usize) -> Result<SampledSpace> {
    if resolution < 2 {
        return Err(invalid(format!("resolution must be at least 2, got {resolution}")));
    }
    match spec {
        DomainSpec::PuncturedDisk { inner_radius } => punctured_disk(*inner_radius, resolution),
        DomainSpec::Annulus { inner_radius, outer_radius } => annulus(*inner_radius, *outer_radius, resolution),
        DomainSpec::HalfDisk => half_disk(resolution),
        DomainSpec::LawsonCone { p, q, r_min, r_max, link_steps } => {
            let cone = crate::cone::make_lawson_cone(*p, *q)?;
            crate::cone::export_cone_graph(&cone, *r_min, *r_max, resolution, *link_steps)
        }
        DomainSpec::Explicit { text } => SampledSpace::from_text(text),
    }
}

/// Rings at `r = exp(-i * 2π/N)` so that cells are square in log-polar
/// coordinates; knight moves are included to reduce grid anisotropy.
fn punctured_disk(inner: f64, resolution: usize) -> Result<SampledSpace> {
    if !(inner > 0.0 && inner < 1.0) {
        return Err(invalid(format!("inner radius {inner} must lie in (0, 1)")));
    }
    let nt = resolution.max(3);
    let step = 2.0 * PI / nt as f64;
    let rings = ((1.0 / inner).ln() / step).floor() as usize + 1;
    let mut radii: Vec<f64> = (0..rings.max(2)).map(|i| (-(i as f64) * step).exp()).collect();
    radii.reverse();
    let angles = (0..nt).map(|j| j as f64 * step).collect();
    let mesh = PolarMesh { radii, angles, periodic: true };
    let (coords, edges, volumes) = mesh.build(&SIXTEEN);
    let nr = mesh.radii.len();
    let roles = (0..coords.len())
        .map(|v| match v / nt {
            0 => VertexRole::SigmaCollar,
            i if i + 1 == nr => VertexRole::DomainBoundary,
            _ => VertexRole::Interior,
        })
        .collect();
    let r_min = mesh.radii[0];
    SampledSpace::from_parts(
        format!("punctured-disk/{resolution}"),
        coords,
        roles,
        volumes,
        edges,
        SigmaSet::Tip,
        mesh.index(nr - 1, 0),
        SampleRegion::Annulus { r_min, r_max: 1.0 },
    )
}

fn annulus(inner: f64, outer: f64, resolution: usize) -> Result<SampledSpace> {
    if !(inner > 0.0 && outer > inner) {
        return Err(invalid(format!("annulus radii {inner}, {outer} are invalid")));
    }
    let nt = resolution.max(3);
    let nr = ((outer - inner) * nt as f64 / (2.0 * PI * outer)).ceil().max(1.0) as usize + 1;
    let radii = (0..nr).map(|i| inner + (outer - inner) * i as f64 / (nr - 1) as f64).collect();
    let angles = (0..nt).map(|j| j as f64 * 2.0 * PI / nt as f64).collect();
    let mesh = PolarMesh { radii, angles, periodic: true };
    let (coords, edges, volumes) = mesh.build(&EIGHT);
    let roles = (0..coords.len())
        .map(|v| match v / nt {
            0 => VertexRole::SigmaCollar,
            i if i + 1 == nr => VertexRole::DomainBoundary,
            _ => VertexRole::Interior,
        })
        .collect();
    SampledSpace::from_parts(
        format!("annulus/{resolution}"),
        coords,
        roles,
        volumes,
        edges,
        SigmaSet::Tip,
        mesh.index(nr - 1, 0),
        SampleRegion::Annulus { r_min: inner, r_max: outer },
    )
}

fn half_disk(resolution: usize) -> Result<SampledSpace> {
    let nt = resolution.max(3);
    let nr = resolution.max(2);
    let radii = (1..=nr).map(|i| i as f64 / nr as f64).collect();
    let angles = (0..nt).map(|j| (j as f64 + 0.5) * PI / nt as f64).collect();
    let mesh = PolarMesh { radii, angles, periodic: false };
    let (coords, edges, volumes) = mesh.build(&EIGHT);
    let roles = (0..coords.len())
        .map(|v| {
            let (i, j) = (v / nt, v % nt);
            if i + 1 == nr {
                VertexRole::DomainBoundary
            } else if j == 0 || j + 1 == nt {
                VertexRole::SigmaCollar
            } else {
                VertexRole::Interior
            }
        })
        .collect();
    SampledSpace::from_parts(
        format!("half-disk/{resolution}"),
        coords,
        roles,
        volumes,
        edges,
        SigmaSet::Segment { start: vec![-1.0, 0.0], end: vec![1.0, 0.0] },
        mesh.index(nr / 2, nt / 2),
        SampleRegion::HalfDisk { radius: 1.0 },
    )
}

/// Square `n x n` grid with unit spacing and four-neighbour edges; a flat
/// control space without singular set.
pub fn euclidean_grid(n: usize) -> Result<SampledSpace> {
    if n < 2 {
        return Err(invalid(format!("grid size must be at least 2, got {n}")));
    }
    let idx = |i: usize, j: usize| i * n + j;
    let mut coords = Vec::with_capacity(n * n);
    let mut roles = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            coords.push(vec![i as f64, j as f64]);
            let edge = i == 0 || j == 0 || i + 1 == n || j + 1 == n;
            roles.push(if edge && n > 2 { VertexRole::DomainBoundary } else { VertexRole::Interior });
        }
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i + 1 < n {
                edges.push(Edge { a: idx(i, j), b: idx(i + 1, j), length: 1.0, conductance: 1.0 });
            }
            if j + 1 < n {
                edges.push(Edge { a: idx(i, j), b: idx(i, j + 1), length: 1.0, conductance: 1.0 });
            }
        }
    }
    SampledSpace::from_parts(
        format!("grid/{n}"),
        coords,
        roles,
        vec![1.0; n * n],
        edges,
        SigmaSet::Points(Vec::new()),
        0,
        SampleRegion::Vertices,
    )
}

/// Random recursive tree on `n` vertices: vertex `i` hangs off a uniform
/// earlier vertex. Edge lengths are multiples of `1/4` in `[1/4, 2]`, so path
/// sums are exact.
pub fn random_tree(n: usize, seed: u64) -> Result<SampledSpace> {
    use rand::SeedableRng;
    if n < 2 {
        return Err(invalid(format!("a tree needs at least 2 vertices, got {n}")));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut depth = vec![0.0; n];
    let mut edges = Vec::with_capacity(n - 1);
    for i in 1..n {
        let parent = rng.gen_range(0..i);
        let length = f64::from(rng.gen_range(1u8..=8)) / 4.0;
        depth[i] = depth[parent] + length;
        edges.push(Edge { a: parent, b: i, length, conductance: 1.0 });
    }
    let coords = depth.iter().enumerate().map(|(i, d)| vec![*d, i as f64]).collect();
    SampledSpace::from_parts(
        format!("tree/{n}"),
        coords,
        vec![VertexRole::Interior; n],
        vec![1.0; n],
        edges,
        SigmaSet::Points(Vec::new()),
        0,
        SampleRegion::Vertices,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn punctured_disk_builds_connected() {
        let s = build_space(&DomainSpec::PuncturedDisk { inner_radius: 0.01 }, 4).unwrap();
        assert!(s.len() > 4);
        assert_eq!(s.sigma(), &SigmaSet::Tip);
        assert!(s.edges().iter().all(|e| e.length > 0.0));
    }

    #[test]
    fn single_vertex_is_degenerate() {
        let err = SampledSpace::from_text("V 0 0.0 0.0\n").unwrap_err();
        assert!(matches!(err, Error::Disconnected(_)));
    }

    #[test]
    fn resolution_below_two_rejected() {
        assert!(build_space(&DomainSpec::HalfDisk, 1).is_err());
        assert!(build_space(&DomainSpec::HalfDisk, 0).is_err());
    }

    #[test]
    fn unknown_domain_kind() {
        assert_eq!(DomainSpec::from_kind("torus"), Err(Error::UnknownDomain("torus".into())));
    }

    #[test]
    fn annulus_edge_bound() {
        let s = build_space(&DomainSpec::Annulus { inner_radius: 0.1, outer_radius: 1.0 }, 64).unwrap();
        let nt = 64.0;
        let nr = ((0.9f64) * nt / (2.0 * PI)).ceil() + 1.0;
        let h_r = 0.9 / (nr - 1.0);
        assert!(s.max_edge_length() <= 2.0 * PI / nt + h_r + 1e-12);
    }

    #[test]
    fn text_roundtrip_and_parse_errors() {
        let text = "# path\nV a 0 0\nV b 1 0\nV c 2 0\nE a b 1\nE b c 1.0\nS 5 5\n";
        let s = SampledSpace::from_text(text).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.role(0), VertexRole::DomainBoundary);
        assert_eq!(s.role(1), VertexRole::Interior);
        let again = SampledSpace::from_text(&s.to_text()).unwrap();
        assert_eq!(again.edges(), s.edges());

        let bad = SampledSpace::from_text("V 0 0 0\nV 1 1 x\n").unwrap_err();
        assert_eq!(bad, Error::Parse { line: 2, msg: "expected a number, got `x`".into() });
        assert!(SampledSpace::from_text("V 0 0\nV 1 1\nE 0 1 -1\n").is_err());
        assert!(SampledSpace::from_text("V 0 0\nV 1 1\nV 2 5\nE 0 1 1\n").is_err());
    }

    #[test]
    fn segment_distance() {
        let s = SigmaSet::Segment { start: vec![-1.0, 0.0], end: vec![1.0, 0.0] };
        assert!((s.distance(&[0.3, 0.25]) - 0.25).abs() < 1e-15);
        assert!((s.distance(&[2.0, 0.0]) - 1.0).abs() < 1e-15);
    }
}
