//! Dirichlet-Green functions `-div(gamma grad G(., y)) = delta_y`, `G = 0` on the outer boundary,
//! obstacle condition on ∂D, computed by singularity splitting `G = Phi_2(., y)/c + w` with
//! `c = gamma(y)`.
//!
//! The regular part solves the forward operator with Dirichlet data `-Phi_2/c`, the interface
//! mismatch `(gamma_l - gamma_m)/c * d_n Phi_2` as a weak load, and for impedance obstacles the
//! residual `gamma d_nu Phi_2/c + i lambda Phi_2/c` on ∂D.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{window_integrals, Field, ForwardSolver};
use crate::geometry::{conductivity_field, EdgeTag, Mesh, ObstacleBc, Scenario};
use crate::singular::{grad_phi2, phi2};
use crate::Point;

type C64 = Complex64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Five-point Gauss-Legendre rule on [0, 1].
const GAUSS: [(f64, f64); 5] = [
    (0.046_910_077_030_668_0, 0.118_463_442_528_094_5),
    (0.230_765_344_947_158_5, 0.239_314_335_249_683_2),
    (0.5, 0.284_444_444_444_444_4),
    (0.769_234_655_052_841_5, 0.239_314_335_249_683_2),
    (0.953_089_922_969_332_0, 0.118_463_442_528_094_5),
];

/// Mesh edge on which the conductivity jumps, seen from the triangle with conductivity `inner`.
#[derive(Debug, Clone, Copy)]
struct InterfaceEdge {
    v: [usize; 2],
    normal: Point,
    inner: f64,
    outer: f64,
}

#[derive(Debug, Clone, Copy)]
struct ObstacleEdge {
    v: [usize; 2],
    normal: Point,
    gamma: f64,
}

/// Green function for one source point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GreensFunction {
    pub y: Point,
    pub c: f64,
    pub w: Field,
}

impl GreensFunction {
    pub fn singular_part(&self, x: Point) -> f64 {
        phi2(x, self.y) / self.c
    }

    pub fn value(&self, mesh: &Mesh, x: Point) -> Result<C64> {
        if x == self.y {
            return Err(Error::CoincidentPoints);
        }
        let w = self.w.evaluate(mesh, x).ok_or_else(|| Error::InvalidInput(format!("{x:?} is outside the mesh")))?;
        Ok(w + self.singular_part(x))
    }

    /// Nodal interpolant of G.
    pub fn nodal(&self, mesh: &Mesh) -> Result<Field> {
        let mut values = Vec::with_capacity(mesh.n_vertices());
        for (p, w) in mesh.vertices.iter().zip(&self.w.values) {
            if *p == self.y {
                return Err(Error::CoincidentPoints);
            }
            values.push(w + self.singular_part(*p));
        }
        Ok(Field { values })
    }
}

/// Factored forward operator plus the geometric data needed for Green solves.
#[derive(Debug, Clone)]
pub struct GreenSolver {
    scenario: Scenario,
    mesh: Mesh,
    gamma: Vec<f64>,
    forward: ForwardSolver,
    interfaces: Vec<InterfaceEdge>,
    obstacle_edges: Vec<ObstacleEdge>,
    dirichlet: Vec<usize>,
}

fn outward(a: Point, b: Point, opposite: Point) -> Point {
    let l = (b[0] - a[0]).hypot(b[1] - a[1]);
    let mut n = [(b[1] - a[1]) / l, -(b[0] - a[0]) / l];
    let m = [(a[0] + b[0]) / 2.0 - opposite[0], (a[1] + b[1]) / 2.0 - opposite[1]];
    if n[0] * m[0] + n[1] * m[1] < 0.0 {
        n = [-n[0], -n[1]];
    }
    n
}

fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1])).clamp(0.0, 1.0);
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

impl GreenSolver {
    pub fn new(scenario: &Scenario, mesh: &Mesh) -> Result<Self> {
        let gamma = conductivity_field(scenario, mesh)?;
        let forward = ForwardSolver::new(scenario, mesh)?;
        let mut owners: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for (t, tri) in mesh.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                owners.entry((a.min(b), a.max(b))).or_default().push((t, tri[(k + 2) % 3]));
            }
        }
        let mut keys: Vec<_> = owners.keys().copied().collect();
        keys.sort_unstable();
        let mut interfaces = Vec::new();
        for key in keys {
            let own = &owners[&key];
            if own.len() == 2 && gamma[own[0].0] != gamma[own[1].0] {
                let (a, b) = (mesh.vertices[key.0], mesh.vertices[key.1]);
                interfaces.push(InterfaceEdge {
                    v: [key.0, key.1],
                    normal: outward(a, b, mesh.vertices[own[0].1]),
                    inner: gamma[own[0].0],
                    outer: gamma[own[1].0],
                });
            }
        }
        let obstacle_edges = mesh
            .boundary_edges
            .iter()
            .filter(|e| e.tag == EdgeTag::ObstacleBoundary)
            .map(|e| {
                let t = owners[&(e.v[0].min(e.v[1]), e.v[0].max(e.v[1]))][0].0;
                ObstacleEdge { v: e.v, normal: mesh.edge_normal(e), gamma: gamma[t] }
            })
            .collect();
        let mut dirichlet = mesh.outer_boundary_vertices();
        if scenario.obstacle_bc == ObstacleBc::SoundSoft {
            dirichlet.extend(mesh.boundary_vertices_where(|t| t == EdgeTag::ObstacleBoundary));
            dirichlet.sort_unstable();
            dirichlet.dedup();
        }
        Ok(GreenSolver {
            scenario: scenario.clone(),
            mesh: mesh.clone(),
            gamma,
            forward,
            interfaces,
            obstacle_edges,
            dirichlet,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    /// Distance from `y` to the outer boundary, the obstacle boundary and all interfaces.
    pub fn clearance(&self, y: Point) -> f64 {
        let m = &self.mesh;
        let iface = self
            .interfaces
            .iter()
            .map(|e| segment_distance(y, m.vertices[e.v[0]], m.vertices[e.v[1]]));
        let bdry = m.boundary_edges.iter().map(|e| segment_distance(y, m.vertices[e.v[0]], m.vertices[e.v[1]]));
        iface.chain(bdry).fold(f64::INFINITY, f64::min)
    }

    pub fn green(&self, y: Point) -> Result<GreensFunction> {
        let required = 3.0 * self.mesh.h;
        let distance = self.clearance(y);
        let c = self.scenario.conductivity_at(y);
        if distance < required || c.is_none() || !self.scenario.domain.contains(y) {
            return Err(Error::SourceTooCloseToInterface { distance, required });
        }
        let c = c.unwrap_or(1.0);
        let m = &self.mesh;
        let n = m.n_vertices();
        let mut lift = vec![ZERO; n];
        for &v in &self.dirichlet {
            lift[v] = C64::new(-phi2(m.vertices[v], y) / c, 0.0);
        }
        let mut load = vec![ZERO; n];
        let edge_load = |load: &mut Vec<C64>, v: [usize; 2], density: &dyn Fn(Point) -> C64| {
            let (a, b) = (m.vertices[v[0]], m.vertices[v[1]]);
            let l = (b[0] - a[0]).hypot(b[1] - a[1]);
            for &(s, wgt) in &GAUSS {
                let p = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
                let d = density(p) * (wgt * l);
                load[v[0]] -= d * (1.0 - s);
                load[v[1]] -= d * s;
            }
        };
        for e in &self.interfaces {
            let jump = (e.inner - e.outer) / c;
            edge_load(&mut load, e.v, &|p| {
                let g = grad_phi2(p, y);
                C64::new(jump * (g[0] * e.normal[0] + g[1] * e.normal[1]), 0.0)
            });
        }
        if let ObstacleBc::Impedance { lambda } = self.scenario.obstacle_bc {
            for e in &self.obstacle_edges {
                edge_load(&mut load, e.v, &|p| {
                    let g = grad_phi2(p, y);
                    let dn = e.gamma * (g[0] * e.normal[0] + g[1] * e.normal[1]) / c;
                    C64::new(dn, 0.0) + C64::i() * lambda * (phi2(p, y) / c)
                });
            }
        }
        let w = self.forward.factored().solve_with_load(&load, &lift)?;
        Ok(GreensFunction { y, c, w })
    }

    /// Weak co-normal flux `gamma d_nu G` on the outer boundary as a nodal functional.
    pub fn flux(&self, g: &GreensFunction) -> Vec<C64> {
        let m = &self.mesh;
        let a = self.forward.factored().system().full_matrix();
        let outer = self.forward.outer_vertices();
        let mut is_outer = vec![false; m.n_vertices()];
        for &v in outer {
            is_outer[v] = true;
        }
        let mut flux = vec![ZERO; m.n_vertices()];
        for &v in outer {
            flux[v] = a.row_dot(v, &g.w.values);
        }
        for (t, tri) in m.triangles.iter().enumerate() {
            if !tri.iter().any(|&v| is_outer[v]) {
                continue;
            }
            let p = m.corners(t);
            // Integral of grad Phi over the triangle as a boundary integral of Phi n.
            let mut int = [0.0; 2];
            for k in 0..3 {
                let (a0, b0, c0) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
                let nrm = outward(a0, b0, c0);
                let l = (b0[0] - a0[0]).hypot(b0[1] - a0[1]);
                for &(s, wgt) in &GAUSS {
                    let q = [a0[0] + s * (b0[0] - a0[0]), a0[1] + s * (b0[1] - a0[1])];
                    let f = phi2(q, g.y) * wgt * l;
                    int[0] += f * nrm[0];
                    int[1] += f * nrm[1];
                }
            }
            let (grads, _) = crate::fem::barycentric_gradients(p);
            for k in 0..3 {
                if is_outer[tri[k]] {
                    let s = self.gamma[t] / g.c * (grads[k][0] * int[0] + grads[k][1] * int[1]);
                    flux[tri[k]] += s;
                }
            }
        }
        flux
    }

    /// `u(x) = -<gamma d_nu G(x, .), f>` for full-length nodal Dirichlet data `f`.
    pub fn representation(&self, x: Point, f: &[C64]) -> Result<C64> {
        if f.len() != self.mesh.n_vertices() {
            return Err(Error::InvalidInput("boundary data must be a full-length nodal vector".into()));
        }
        let g = self.green(x)?;
        let flux = self.flux(&g);
        Ok(-self.forward.outer_vertices().iter().map(|&v| flux[v] * f[v]).sum::<C64>())
    }

    /// `(G, Phi_2, G / Phi_2)` sampled on rings `|x - y| = r` for the given radii.
    pub fn kernel_ratios(&self, g: &GreensFunction, radii: &[f64], n_angles: usize) -> Result<Vec<KernelSample>> {
        let mut out = Vec::new();
        for &r in radii {
            for k in 0..n_angles {
                let t = std::f64::consts::TAU * k as f64 / n_angles as f64;
                let x = [g.y[0] + r * t.cos(), g.y[1] + r * t.sin()];
                let value = g.value(&self.mesh, x)?.re;
                let phi = phi2(x, g.y);
                out.push(KernelSample { x, y: g.y, green: value, phi, ratio: value / phi });
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub x: Point,
    pub y: Point,
    pub green: f64,
    pub phi: f64,
    pub ratio: f64,
}

pub fn kernel_samples_csv(samples: &[KernelSample]) -> String {
    let mut s = String::from("x1,x2,y1,y2,green,phi2,ratio\n");
    for k in samples {
        let _ = writeln!(s, "{},{},{},{},{:.12e},{:.12e},{:.12e}", k.x[0], k.x[1], k.y[0], k.y[1], k.green, k.phi, k.ratio);
    }
    s
}

pub fn dirichlet_green(scenario: &Scenario, mesh: &Mesh, y: Point) -> Result<GreensFunction> {
    GreenSolver::new(scenario, mesh)?.green(y)
}

pub fn representation_apply(scenario: &Scenario, mesh: &Mesh, f: &[C64], x: Point) -> Result<C64> {
    GreenSolver::new(scenario, mesh)?.representation(x, f)
}

/// Largest `|G_A(x, y) - G_B(x, y)|` over vertices `x` of the window (at least 3h from `y`)
/// and the given sources. Both scenarios must be meshed by `mesh`.
pub fn interior_agreement(
    a: &Scenario,
    b: &Scenario,
    mesh: &Mesh,
    window: impl Fn(Point) -> bool + Sync,
    ys: &[Point],
) -> Result<f64> {
    let sa = GreenSolver::new(a, mesh)?;
    let sb = GreenSolver::new(b, mesh)?;
    let sep = 3.0 * mesh.h;
    let maxima = ys
        .par_iter()
        .map(|&y| {
            let ga = sa.green(y)?;
            let gb = sb.green(y)?;
            let mut worst = 0.0f64;
            for (v, &x) in mesh.vertices.iter().enumerate() {
                if !window(x) || (x[0] - y[0]).hypot(x[1] - y[1]) < sep {
                    continue;
                }
                let singular = phi2(x, y) * (1.0 / ga.c - 1.0 / gb.c);
                worst = worst.max((ga.w.values[v] - gb.w.values[v] + singular).norm());
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(maxima.into_iter().fold(0.0, f64::max))
}

/// `||G||_{H^1}` over triangles with centroid in `window`, using the nodal interpolant.
pub fn green_window_norm(mesh: &Mesh, g: &GreensFunction, window: impl Fn(Point) -> bool) -> Result<f64> {
    let nodal = g.nodal(mesh)?;
    let (l2, grad) = window_integrals(mesh, &nodal, window)?;
    Ok((l2 + grad).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, GammaArc};
    use crate::oracle::disk_green;

    #[test]
    fn homogeneous_disk_matches_image_formula() {
        let s = Scenario::homogeneous_disk(1.0, 2.0, GammaArc::full());
        let m = build_mesh(&s, 0.05).unwrap();
        let solver = GreenSolver::new(&s, &m).unwrap();
        let y = [0.5, 0.0];
        let g = solver.green(y).unwrap();
        for x in [[0.0, 0.0], [-0.4, 0.3], [0.2, -0.6]] {
            let exact = disk_green(x, y, 2.0).unwrap();
            let got = g.value(&m, x).unwrap().re;
            assert!((got - exact).abs() < 0.01 * exact.abs(), "{x:?} {got} {exact}");
        }
    }

    #[test]
    fn source_too_close() {
        let s = Scenario::layered_disk(1.0, &[0.6], &[2.0, 1.0], GammaArc::full());
        let m = build_mesh(&s, 0.1).unwrap();
        assert!(matches!(dirichlet_green(&s, &m, [0.62, 0.0]), Err(Error::SourceTooCloseToInterface { .. })));
        assert!(matches!(dirichlet_green(&s, &m, [0.97, 0.0]), Err(Error::SourceTooCloseToInterface { .. })));
    }
}
