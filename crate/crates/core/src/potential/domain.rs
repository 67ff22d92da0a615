use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::metric::{SampledSpace, VertexRole};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Disk,
    HalfDisk,
    AnnulusPolar,
    Radial1d,
    Imported,
}

/// Boundary partition of the nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NodeClass {
    Free,
    /// Dirichlet data prescribed (zero unless given otherwise).
    Dirichlet,
    /// Dirichlet node approaching the singular set.
    Singular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axis {
    Radial,
    Angular,
    Graph,
}

/// Finite-volume link: conductance for unit coefficient is `face / length`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Link {
    pub a: usize,
    pub b: usize,
    pub length: f64,
    pub face: f64,
    pub axis: Axis,
}

/// Ring/angle layout of polar grids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarLayout {
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
    pub periodic: bool,
    /// Node at the origin, if any.
    pub center: Option<usize>,
}

impl PolarLayout {
    /// Node on ring `i ≥ 1` (or ring 0 without centre) at angle index `j`.
    pub fn node(&self, i: usize, j: usize) -> usize {
        let off = usize::from(self.center.is_some());
        let ring = if self.center.is_some() { i - 1 } else { i };
        off + ring * self.angles.len() + j
    }

    pub fn rings(&self) -> usize {
        self.radii.len()
    }

    /// Angle index closest to `theta`.
    pub fn angle_index(&self, theta: f64) -> usize {
        let mut best = 0;
        let mut gap = f64::INFINITY;
        for (j, &t) in self.angles.iter().enumerate() {
            let mut d = (t - theta).rem_euclid(2.0 * PI);
            if self.periodic {
                d = d.min(2.0 * PI - d);
            } else {
                d = (t - theta).abs();
            }
            if d < gap {
                gap = d;
                best = j;
            }
        }
        best
    }

    /// Ring index closest to `r`.
    pub fn ring_index(&self, r: f64) -> usize {
        let first = usize::from(self.center.is_some());
        (first..self.radii.len())
            .min_by(|&a, &b| (self.radii[a] - r).abs().total_cmp(&(self.radii[b] - r).abs()))
            .unwrap_or(first)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    pub kind: DomainKind,
    pub coords: Vec<Vec<f64>>,
    pub classes: Vec<NodeClass>,
    pub volumes: Vec<f64>,
    pub links: Vec<Link>,
    pub polar: Option<PolarLayout>,
    /// Dimension whose radial measure `r^{n-1}` the radial grid carries.
    pub radial_dimension: Option<f64>,
    pub resolution: usize,
}

impl GridDomain {
    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn free_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.classes[v] == NodeClass::Free).collect()
    }

    pub fn radius(&self, v: usize) -> f64 {
        self.coords[v].iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Nearest node to a point (linear scan).
    pub fn nearest(&self, x: &[f64]) -> usize {
        (0..self.len())
            .min_by(|&a, &b| {
                let da: f64 = self.coords[a].iter().zip(x).map(|(p, q)| (p - q).powi(2)).sum();
                let db: f64 = self.coords[b].iter().zip(x).map(|(p, q)| (p - q).powi(2)).sum();
                da.total_cmp(&db)
            })
            .unwrap_or(0)
    }

    pub fn polar(&self) -> Result<&PolarLayout> {
        self.polar.as_ref().ok_or_else(|| invalid("domain has no polar layout"))
    }
}

struct PolarBuilder {
    radii: Vec<f64>,
    angles: Vec<f64>,
    periodic: bool,
    center: bool,
}

impl PolarBuilder {
    fn build(self, kind: DomainKind, resolution: usize, class: impl Fn(usize, usize) -> NodeClass) -> GridDomain {
        let nt = self.angles.len();
        let nr = self.radii.len();
        let layout = PolarLayout {
            radii: self.radii.clone(),
            angles: self.angles.clone(),
            periodic: self.periodic,
            center: self.center.then_some(0),
        };
        let dt = if self.periodic { 2.0 * PI / nt as f64 } else { self.angles[1] - self.angles[0] };
        let r = &self.radii;
        let lo = |i: usize| if i == 0 { r[0] } else { 0.5 * (r[i - 1] + r[i]) };
        let hi = |i: usize| if i + 1 == nr { r[i] } else { 0.5 * (r[i] + r[i + 1]) };
        let side = |j: usize| if !self.periodic && (j == 0 || j + 1 == nt) { 0.5 } else { 1.0 };

        let mut coords = Vec::new();
        let mut classes = Vec::new();
        let mut volumes = Vec::new();
        let first = usize::from(self.center);
        if self.center {
            coords.push(vec![0.0, 0.0]);
            classes.push(class(0, 0));
            let h = hi(0);
            let sweep = if self.periodic { 2.0 * PI } else { PI };
            volumes.push(0.5 * h * h * sweep);
        }
        for i in first..nr {
            for j in 0..nt {
                let t = self.angles[j];
                coords.push(vec![r[i] * t.cos(), r[i] * t.sin()]);
                classes.push(class(i, j));
                volumes.push(0.5 * (hi(i).powi(2) - lo(i).powi(2)) * dt * side(j));
            }
        }
        let mut links = Vec::new();
        for i in first..nr {
            for j in 0..nt {
                let v = layout.node(i, j);
                if i + 1 < nr {
                    let u = layout.node(i + 1, j);
                    links.push(Link { a: v, b: u, length: r[i + 1] - r[i], face: hi(i) * dt * side(j), axis: Axis::Radial });
                }
                let next = if j + 1 < nt {
                    Some(j + 1)
                } else if self.periodic && nt > 2 {
                    Some(0)
                } else {
                    None
                };
                if let Some(j2) = next {
                    let u = layout.node(i, j2);
                    links.push(Link {
                        a: v.min(u),
                        b: v.max(u),
                        length: r[i] * dt,
                        face: hi(i) - lo(i),
                        axis: Axis::Angular,
                    });
                }
            }
        }
        if self.center {
            for j in 0..nt {
                let u = layout.node(1, j);
                links.push(Link { a: 0, b: u, length: r[1], face: hi(0) * dt * side(j), axis: Axis::Radial });
            }
        }
        GridDomain {
            kind,
            coords,
            classes,
            volumes,
            links,
            polar: Some(layout),
            radial_dimension: None,
            resolution,
        }
    }
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 8 {
        return Err(invalid(format!("resolution must be at least 8, got {resolution}")));
    }
    Ok(())
}

/// Unit disk on a polar grid with `resolution` angles and `resolution / 2`
/// rings plus a centre node; the rim is Dirichlet.
pub fn disk(resolution: usize) -> Result<GridDomain> {
    check_resolution(resolution)?;
    let nr = resolution / 2;
    let radii = (0..=nr).map(|i| i as f64 / nr as f64).collect();
    let angles = (0..resolution).map(|j| 2.0 * PI * j as f64 / resolution as f64).collect();
    let b = PolarBuilder { radii, angles, periodic: true, center: true };
    Ok(b.build(DomainKind::Disk, resolution, |i, _| if i == nr { NodeClass::Dirichlet } else { NodeClass::Free }))
}

/// Upper unit half-disk; the diameter (including the centre) is singular,
/// the arc Dirichlet.
pub fn half_disk(resolution: usize) -> Result<GridDomain> {
    check_resolution(resolution)?;
    let nr = resolution / 2;
    let radii = (0..=nr).map(|i| i as f64 / nr as f64).collect();
    let angles = (0..=resolution).map(|j| PI * j as f64 / resolution as f64).collect();
    let b = PolarBuilder { radii, angles, periodic: false, center: true };
    Ok(b.build(DomainKind::HalfDisk, resolution, |i, j| {
        if i == 0 || j == 0 || j == resolution {
            NodeClass::Singular
        } else if i == nr {
            NodeClass::Dirichlet
        } else {
            NodeClass::Free
        }
    }))
}

/// Annulus `inner ≤ r ≤ outer`; the inner circle is singular, the outer
/// Dirichlet.
pub fn annulus_polar(inner: f64, outer: f64, resolution: usize) -> Result<GridDomain> {
    check_resolution(resolution)?;
    if !(inner > 0.0 && outer > inner) {
        return Err(invalid(format!("annulus radii {inner}, {outer} are invalid")));
    }
    let nr = ((outer - inner) / outer * resolution as f64 / 2.0).ceil().max(2.0) as usize;
    let radii = (0..=nr).map(|i| inner + (outer - inner) * i as f64 / nr as f64).collect();
    let angles = (0..resolution).map(|j| 2.0 * PI * j as f64 / resolution as f64).collect();
    let b = PolarBuilder { radii, angles, periodic: true, center: false };
    Ok(b.build(DomainKind::AnnulusPolar, resolution, |i, _| {
        if i == 0 {
            NodeClass::Singular
        } else if i == nr {
            NodeClass::Dirichlet
        } else {
            NodeClass::Free
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    Uniform,
    Geometric,
}

/// Radial nodes on `[r_min, r_max]` with measure `r^{n-1} dr`; the left end
/// is singular, the right end Dirichlet.
pub fn radial_1d(r_min: f64, r_max: f64, nodes: usize, spacing: Spacing, dimension: f64) -> Result<GridDomain> {
    if nodes < 3 || !(r_max > r_min) || r_min < 0.0 {
        return Err(invalid(format!("bad radial domain [{r_min}, {r_max}] with {nodes} nodes")));
    }
    if spacing == Spacing::Geometric && r_min <= 0.0 {
        return Err(invalid("geometric spacing needs r_min > 0"));
    }
    if !(dimension >= 1.0) {
        return Err(invalid(format!("radial dimension must be at least 1, got {dimension}")));
    }
    if r_min == 0.0 && dimension > 1.0 {
        return Err(invalid("r_min = 0 is only allowed in dimension 1"));
    }
    let r: Vec<f64> = match spacing {
        Spacing::Uniform => (0..nodes).map(|i| r_min + (r_max - r_min) * i as f64 / (nodes - 1) as f64).collect(),
        Spacing::Geometric => {
            let q = (r_max / r_min).ln() / (nodes - 1) as f64;
            (0..nodes).map(|i| r_min * (q * i as f64).exp()).collect()
        }
    };
    let w = |x: f64| x.powf(dimension - 1.0);
    let mid = |i: usize| 0.5 * (r[i] + r[i + 1]);
    let volumes = (0..nodes)
        .map(|i| {
            let lo = if i == 0 { r[0] } else { mid(i - 1) };
            let hi = if i + 1 == nodes { r[i] } else { mid(i) };
            (hi - lo) * w(r[i])
        })
        .collect();
    let links = (0..nodes - 1)
        .map(|i| Link { a: i, b: i + 1, length: r[i + 1] - r[i], face: w(mid(i)), axis: Axis::Radial })
        .collect();
    let mut classes = vec![NodeClass::Free; nodes];
    classes[0] = NodeClass::Singular;
    classes[nodes - 1] = NodeClass::Dirichlet;
    Ok(GridDomain {
        kind: DomainKind::Radial1d,
        coords: r.iter().map(|&x| vec![x]).collect(),
        classes,
        volumes,
        links,
        polar: None,
        radial_dimension: Some(dimension),
        resolution: nodes,
    })
}

/// Graph-Laplacian domain on a sampled space; domain-boundary and
/// truncation vertices are Dirichlet, collar vertices singular.
pub fn imported(space: &SampledSpace) -> Result<GridDomain> {
    let classes = space
        .roles()
        .iter()
        .map(|r| match r {
            VertexRole::Interior => NodeClass::Free,
            VertexRole::DomainBoundary | VertexRole::Infinity => NodeClass::Dirichlet,
            VertexRole::SigmaCollar => NodeClass::Singular,
        })
        .collect();
    let links: Vec<Link> = space
        .edges()
        .iter()
        .filter(|e| e.conductance > 0.0)
        .map(|e| Link { a: e.a, b: e.b, length: e.length, face: e.conductance * e.length, axis: Axis::Graph })
        .collect();
    if links.is_empty() {
        return Err(invalid("space has no conducting edges"));
    }
    Ok(GridDomain {
        kind: DomainKind::Imported,
        coords: space.coords_all().to_vec(),
        classes,
        volumes: space.volumes().to_vec(),
        links,
        polar: None,
        radial_dimension: None,
        resolution: space.len(),
    })
}
