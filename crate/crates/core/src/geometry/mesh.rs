use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Scenario;
use crate::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeTag {
    GammaArc,
    OuterRest,
    ObstacleBoundary,
    /// Boundary of a window submesh that is interior to the parent mesh.
    WindowCut,
}

impl EdgeTag {
    pub fn is_outer(self) -> bool {
        matches!(self, EdgeTag::GammaArc | EdgeTag::OuterRest)
    }
}

/// Boundary edge, oriented so the domain lies to its left.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEdge {
    pub v: [usize; 2],
    pub tag: EdgeTag,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point,
    pub radius: f64,
}

impl Circle {
    fn holds(&self, p: Point) -> bool {
        let r = (p[0] - self.center[0]).hypot(p[1] - self.center[1]);
        (r - self.radius).abs() <= 1e-9 * self.radius
    }

    fn project(&self, p: Point) -> Point {
        let d = [p[0] - self.center[0], p[1] - self.center[1]];
        let r = d[0].hypot(d[1]);
        [self.center[0] + self.radius * d[0] / r, self.center[1] + self.radius * d[1] / r]
    }
}

/// Conforming triangulation with region tags per triangle and tagged boundary edges.
///
/// `circles` lists the exact curves (outer boundary, obstacle boundary, circular interfaces)
/// onto which refinement projects new midpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub regions: Vec<usize>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub circles: Vec<Circle>,
    pub h: f64,
}

pub fn triangle_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

impl Mesh {
    /// Mesh from explicit arrays; `h` is computed and the invariants are checked.
    pub fn from_parts(
        vertices: Vec<Point>,
        triangles: Vec<[usize; 3]>,
        regions: Vec<usize>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Mesh> {
        if triangles.iter().flatten().any(|&v| v >= vertices.len()) {
            return Err(Error::DegenerateGeometry("triangle references a missing vertex".into()));
        }
        let mut m = Mesh { vertices, triangles, regions, boundary_edges, circles: Vec::new(), h: 0.0 };
        m.recompute_h();
        m.check_invariants()?;
        Ok(m)
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        triangle_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.n_triangles()).map(|t| self.area(t)).sum()
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.corners(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    pub fn diameter(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        dist(a, b).max(dist(b, c)).max(dist(c, a))
    }

    pub(crate) fn recompute_h(&mut self) {
        self.h = (0..self.n_triangles()).map(|t| self.diameter(t)).fold(0.0, f64::max);
    }

    pub fn edge_length(&self, e: &BoundaryEdge) -> f64 {
        dist(self.vertices[e.v[0]], self.vertices[e.v[1]])
    }

    /// Outward unit normal of a boundary edge (exterior to the meshed domain).
    pub fn edge_normal(&self, e: &BoundaryEdge) -> Point {
        let a = self.vertices[e.v[0]];
        let b = self.vertices[e.v[1]];
        let l = dist(a, b);
        [(b[1] - a[1]) / l, -(b[0] - a[0]) / l]
    }

    /// Vertices lying on an edge with one of the given tags, ascending.
    pub fn boundary_vertices_where(&self, pred: impl Fn(EdgeTag) -> bool) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.boundary_edges.iter().filter(|e| pred(e.tag)).flat_map(|e| e.v).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn outer_boundary_vertices(&self) -> Vec<usize> {
        self.boundary_vertices_where(EdgeTag::is_outer)
    }

    pub fn all_boundary_vertices(&self) -> Vec<usize> {
        self.boundary_vertices_where(|_| true)
    }

    /// Vertices whose every incident boundary edge is a GammaArc edge: the support of hat
    /// functions that vanish off the measurement arc.
    pub fn gamma_interior_vertices(&self) -> Vec<usize> {
        let mut on_gamma = vec![false; self.n_vertices()];
        let mut off_gamma = vec![false; self.n_vertices()];
        for e in &self.boundary_edges {
            for &v in &e.v {
                if e.tag == EdgeTag::GammaArc {
                    on_gamma[v] = true;
                } else {
                    off_gamma[v] = true;
                }
            }
        }
        (0..self.n_vertices()).filter(|&v| on_gamma[v] && !off_gamma[v]).collect()
    }

    /// Sum of lengths of edges carrying `tag`.
    pub fn tagged_length(&self, tag: EdgeTag) -> f64 {
        self.boundary_edges.iter().filter(|e| e.tag == tag).map(|e| self.edge_length(e)).sum()
    }

    /// Verifies conformity, orientation and boundary tagging.
    pub fn check_invariants(&self) -> Result<()> {
        let fail = |m: String| Err(Error::DegenerateGeometry(m));
        if self.regions.len() != self.triangles.len() {
            return fail("region tag count differs from triangle count".into());
        }
        for t in 0..self.n_triangles() {
            let a = self.area(t);
            if !(a > 0.0) {
                return fail(format!("triangle {t} has non-positive area {a:e}"));
            }
        }
        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &self.triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut boundary: HashMap<(usize, usize), usize> = HashMap::new();
        for e in &self.boundary_edges {
            let key = (e.v[0].min(e.v[1]), e.v[0].max(e.v[1]));
            *boundary.entry(key).or_default() += 1;
        }
        for (edge, &n) in &count {
            match n {
                1 if boundary.get(edge) == Some(&1) => {}
                1 => return fail(format!("edge {edge:?} has one triangle but no boundary tag")),
                2 if !boundary.contains_key(edge) => {}
                2 => return fail(format!("interior edge {edge:?} carries a boundary tag")),
                _ => return fail(format!("edge {edge:?} is shared by {n} triangles")),
            }
        }
        if boundary.len() != self.boundary_edges.len() || boundary.keys().any(|k| !count.contains_key(k)) {
            return fail("boundary edge list does not match the triangulation".into());
        }
        Ok(())
    }

    /// For each listed vertex of `self`, the vertex of `other` at the same position.
    pub fn match_vertices(&self, ids: &[usize], other: &Mesh) -> Result<Vec<usize>> {
        let scale = 1e8;
        let key = |p: Point| ((p[0] * scale).round() as i64, (p[1] * scale).round() as i64);
        let mut lookup: HashMap<(i64, i64), usize> = HashMap::new();
        for (i, &p) in other.vertices.iter().enumerate() {
            lookup.insert(key(p), i);
        }
        ids.iter()
            .map(|&v| {
                let (kx, ky) = key(self.vertices[v]);
                (-1..=1)
                    .flat_map(|dx| (-1..=1).map(move |dy| (kx + dx, ky + dy)))
                    .filter_map(|k| lookup.get(&k).copied())
                    .find(|&w| dist(other.vertices[w], self.vertices[v]) < 1e-10)
                    .ok_or_else(|| {
                        Error::InvalidInput(format!("vertex {v} at {:?} has no counterpart", self.vertices[v]))
                    })
            })
            .collect()
    }

    /// Index of a triangle containing `p` (closed), if any.
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for t in 0..self.n_triangles() {
            let [a, b, c] = self.corners(t);
            let area = triangle_area(a, b, c);
            let l0 = triangle_area(p, b, c) / area;
            let l1 = triangle_area(a, p, c) / area;
            let l2 = 1.0 - l0 - l1;
            let worst = l0.min(l1).min(l2);
            if worst >= -1e-12 {
                return Some((t, [l0, l1, l2]));
            }
            if best.map(|b| worst > b.2).unwrap_or(true) {
                best = Some((t, [l0, l1, l2], worst));
            }
        }
        best.filter(|b| b.2 > -1e-9).map(|b| (b.0, b.1))
    }

    /// Uniform red refinement: every triangle splits into four. Midpoints of edges lying on a
    /// registered circle are projected onto it.
    pub fn refine(&self) -> Mesh {
        let mut vertices = self.vertices.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let pa = vertices[a];
                let pb = vertices[b];
                let mut m = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
                if let Some(c) = self.circles.iter().find(|c| c.holds(pa) && c.holds(pb)) {
                    m = c.project(m);
                }
                vertices.push(m);
                vertices.len() - 1
            })
        };
        let mut triangles = Vec::with_capacity(4 * self.n_triangles());
        let mut regions = Vec::with_capacity(4 * self.n_triangles());
        for (t, &[a, b, c]) in self.triangles.iter().enumerate() {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            triangles.extend([[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]);
            regions.extend([self.regions[t]; 4]);
        }
        let mut boundary_edges = Vec::with_capacity(2 * self.boundary_edges.len());
        for e in &self.boundary_edges {
            let m = midpoint(e.v[0], e.v[1], &mut vertices);
            boundary_edges.push(BoundaryEdge { v: [e.v[0], m], tag: e.tag });
            boundary_edges.push(BoundaryEdge { v: [m, e.v[1]], tag: e.tag });
        }
        let mut out = Mesh { vertices, triangles, regions, boundary_edges, circles: self.circles.clone(), h: 0.0 };
        out.recompute_h();
        out
    }

    /// Triangles whose centroid satisfies `window`, as a standalone mesh, together with the map
    /// from new vertex indices to parent indices.
    pub fn submesh(&self, window: impl Fn(Point) -> bool) -> Result<(Mesh, Vec<usize>)> {
        let keep: Vec<usize> = (0..self.n_triangles()).filter(|&t| window(self.centroid(t))).collect();
        if keep.is_empty() {
            return Err(Error::EmptyWindow);
        }
        let mut new_index = vec![usize::MAX; self.n_vertices()];
        let mut parent = Vec::new();
        let mut triangles = Vec::with_capacity(keep.len());
        let mut regions = Vec::with_capacity(keep.len());
        for &t in &keep {
            let tri = self.triangles[t].map(|v| {
                if new_index[v] == usize::MAX {
                    new_index[v] = parent.len();
                    parent.push(v);
                }
                new_index[v]
            });
            triangles.push(tri);
            regions.push(self.regions[t]);
        }
        let parent_tags: HashMap<(usize, usize), EdgeTag> = self
            .boundary_edges
            .iter()
            .map(|e| ((e.v[0].min(e.v[1]), e.v[0].max(e.v[1])), e.tag))
            .collect();
        let mut directed: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for tri in &triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                if directed.remove(&key).is_none() {
                    directed.insert(key, (a, b));
                }
            }
        }
        let mut edges: Vec<(usize, usize)> = directed.into_values().collect();
        edges.sort_unstable();
        let boundary_edges = edges
            .into_iter()
            .map(|(a, b)| {
                let (pa, pb) = (parent[a], parent[b]);
                let tag = parent_tags.get(&(pa.min(pb), pa.max(pb))).copied().unwrap_or(EdgeTag::WindowCut);
                BoundaryEdge { v: [a, b], tag }
            })
            .collect();
        let vertices = parent.iter().map(|&v| self.vertices[v]).collect();
        let mut out = Mesh { vertices, triangles, regions, boundary_edges, circles: self.circles.clone(), h: 0.0 };
        out.recompute_h();
        Ok((out, parent))
    }
}

/// Per-triangle conductivity, constant on each region tag.
pub fn conductivity_field(scenario: &Scenario, mesh: &Mesh) -> Result<Vec<f64>> {
    mesh.regions
        .iter()
        .enumerate()
        .map(|(t, &tag)| {
            scenario
                .regions
                .get(tag)
                .map(|r| r.conductivity)
                .ok_or(Error::TagMismatch { triangle: t, tag })
        })
        .collect()
}
