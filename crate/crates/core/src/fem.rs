//! P1 finite elements for `div(a grad u) - b u = rho` with Dirichlet and Robin conditions.
//!
//! The Galerkin system is `sum_T a_T (grad u, grad phi)_T + b (u, phi) + sum_edges coeff (u, phi)_e
//! = -(rho, phi)` with exact element integrals. Dirichlet values are imposed by eliminating the
//! constrained vertices and lifting their values into the right-hand side.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{conductivity_field, EdgeTag, Mesh, ObstacleBc, Scenario};
use crate::linalg::{CsrMatrix, SkylineLdlt, TripletBuilder};
use crate::Point;

type C64 = Complex64;

/// Nodal P1 coefficients, one per mesh vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub values: Vec<C64>,
}

impl Field {
    pub fn zeros(n: usize) -> Self {
        Field { values: vec![C64::new(0.0, 0.0); n] }
    }

    pub fn from_real(values: impl IntoIterator<Item = f64>) -> Self {
        Field { values: values.into_iter().map(|v| C64::new(v, 0.0)).collect() }
    }

    /// Nodal interpolant of `f`.
    pub fn interpolate(mesh: &Mesh, f: impl Fn(Point) -> C64) -> Self {
        Field { values: mesh.vertices.iter().map(|&p| f(p)).collect() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn scaled(&self, s: C64) -> Field {
        Field { values: self.values.iter().map(|v| v * s).collect() }
    }

    pub fn sub(&self, other: &Field) -> Field {
        Field { values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect() }
    }

    /// Value at `p` by linear interpolation on the containing triangle.
    pub fn evaluate(&self, mesh: &Mesh, p: Point) -> Option<C64> {
        let (t, l) = mesh.locate(p)?;
        let tri = mesh.triangles[t];
        Some((0..3).map(|k| self.values[tri[k]] * l[k]).sum())
    }

    fn check(&self, mesh: &Mesh) -> Result<()> {
        if self.len() != mesh.n_vertices() {
            return Err(Error::InvalidInput(format!(
                "field has {} coefficients, mesh has {} vertices",
                self.len(),
                mesh.n_vertices()
            )));
        }
        Ok(())
    }
}

/// Gradients of the barycentric coordinates of a triangle, and its area.
pub fn barycentric_gradients(p: [Point; 3]) -> ([Point; 3], f64) {
    let area = crate::geometry::triangle_area(p[0], p[1], p[2]);
    let mut g = [[0.0; 2]; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        g[i] = [(p[j][1] - p[k][1]) / (2.0 * area), (p[k][0] - p[j][0]) / (2.0 * area)];
    }
    (g, area)
}

pub fn element_stiffness(p: [Point; 3]) -> [[f64; 3]; 3] {
    let (g, area) = barycentric_gradients(p);
    let mut k = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            k[i][j] = area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
        }
    }
    k
}

pub fn element_mass(p: [Point; 3]) -> [[f64; 3]; 3] {
    let area = crate::geometry::triangle_area(p[0], p[1], p[2]);
    let mut m = [[area / 12.0; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = area / 6.0;
    }
    m
}

/// Robin term: boundary mass on edges with the given tag, scaled by `coeff`.
#[derive(Debug, Clone, Copy)]
pub struct Robin {
    pub tag: EdgeTag,
    pub coeff: C64,
}

/// Assembled matrix of the bilinear form over all vertices plus the load vector `-(rho, phi)`.
#[derive(Debug, Clone)]
pub struct Assembly {
    pub matrix: CsrMatrix,
    pub load: Vec<C64>,
}

pub fn assemble(mesh: &Mesh, a: &[f64], b: f64, rho: Option<&Field>, robin: &[Robin]) -> Result<Assembly> {
    if a.len() != mesh.n_triangles() {
        return Err(Error::InvalidInput("one coefficient per triangle expected".into()));
    }
    if let Some(t) = a.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidInput(format!("coefficient on triangle {t} must be positive")));
    }
    if !(b >= 0.0 && b.is_finite()) {
        return Err(Error::InvalidInput(format!("reaction coefficient must be nonnegative, got {b}")));
    }
    if let Some(r) = rho {
        r.check(mesh)?;
    }
    let n = mesh.n_vertices();
    let mut builder = TripletBuilder::new(n);
    let mut load = vec![C64::new(0.0, 0.0); n];
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let p = mesh.corners(t);
        let k = element_stiffness(p);
        let m = element_mass(p);
        for i in 0..3 {
            for j in 0..3 {
                builder.add(tri[i], tri[j], C64::new(a[t] * k[i][j] + b * m[i][j], 0.0));
            }
            if let Some(r) = rho {
                let mr: C64 = (0..3).map(|j| r.values[tri[j]] * m[i][j]).sum();
                load[tri[i]] -= mr;
            }
        }
    }
    for e in &mesh.boundary_edges {
        for r in robin.iter().filter(|r| r.tag == e.tag) {
            let l = mesh.edge_length(e);
            let [p, q] = e.v;
            builder.add(p, p, r.coeff * (l / 3.0));
            builder.add(q, q, r.coeff * (l / 3.0));
            builder.add(p, q, r.coeff * (l / 6.0));
            builder.add(q, p, r.coeff * (l / 6.0));
        }
    }
    Ok(Assembly { matrix: builder.build(), load })
}

/// Galerkin system restricted to the free vertices.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    assembly: Assembly,
    free: Vec<usize>,
    constrained: Vec<usize>,
    reduced: CsrMatrix,
}

impl LinearSystem {
    /// `constrained` lists the Dirichlet vertices (ascending, deduplicated).
    pub fn new(assembly: Assembly, constrained: Vec<usize>) -> Self {
        let n = assembly.matrix.dim();
        let mut is_c = vec![false; n];
        for &c in &constrained {
            is_c[c] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&i| !is_c[i]).collect();
        let reduced = assembly.matrix.principal_submatrix(&free);
        LinearSystem { assembly, free, constrained, reduced }
    }

    /// Reduced matrix over the free vertices.
    pub fn matrix(&self) -> &CsrMatrix {
        &self.reduced
    }

    pub fn full_matrix(&self) -> &CsrMatrix {
        &self.assembly.matrix
    }

    pub fn free(&self) -> &[usize] {
        &self.free
    }

    pub fn constrained(&self) -> &[usize] {
        &self.constrained
    }

    /// Reduced right-hand side for nodal Dirichlet values `lift` (full-length, read on
    /// constrained vertices) and a full-length load.
    pub fn rhs(&self, load: &[C64], lift: &[C64]) -> Vec<C64> {
        let mut is_c = vec![false; lift.len()];
        for &c in &self.constrained {
            is_c[c] = true;
        }
        self.free
            .iter()
            .map(|&i| {
                let mut s = load[i];
                for (j, v) in self.assembly.matrix.row(i) {
                    if is_c[j] {
                        s -= v * lift[j];
                    }
                }
                s
            })
            .collect()
    }

    pub fn factor(self) -> Result<FactoredSystem> {
        let ldlt = if self.free.is_empty() { None } else { Some(SkylineLdlt::factor(&self.reduced)?) };
        Ok(FactoredSystem { system: self, ldlt })
    }
}

/// A factored [`LinearSystem`], reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct FactoredSystem {
    system: LinearSystem,
    ldlt: Option<SkylineLdlt>,
}

impl FactoredSystem {
    pub fn system(&self) -> &LinearSystem {
        &self.system
    }

    /// Solution with Dirichlet values `lift` and the assembled load.
    pub fn solve(&self, lift: &[C64]) -> Result<Field> {
        self.solve_with_load(&self.system.assembly.load, lift)
    }

    pub fn solve_with_load(&self, load: &[C64], lift: &[C64]) -> Result<Field> {
        let n = self.system.assembly.matrix.dim();
        if lift.len() != n || load.len() != n {
            return Err(Error::InvalidInput("lift and load must be full-length nodal vectors".into()));
        }
        let mut values = vec![C64::new(0.0, 0.0); n];
        for &c in &self.system.constrained {
            values[c] = lift[c];
        }
        if let Some(ldlt) = &self.ldlt {
            let rhs = self.system.rhs(load, lift);
            let x = ldlt.solve(&rhs);
            for (k, &i) in self.system.free.iter().enumerate() {
                values[i] = x[k];
            }
        }
        let field = Field { values };
        if !field.is_finite() {
            return Err(Error::SolveFailure { reason: "non-finite solution values".into() });
        }
        Ok(field)
    }

    /// Discrete co-normal flux functional: `g_i = (A u)_i - load_i`, nonzero only where the
    /// equation is not enforced (constrained vertices).
    pub fn weak_flux(&self, u: &Field) -> Vec<C64> {
        let a = &self.system.assembly.matrix;
        let mut g = vec![C64::new(0.0, 0.0); a.dim()];
        for &c in &self.system.constrained {
            g[c] = a.row_dot(c, &u.values) - self.system.assembly.load[c];
        }
        g
    }
}

/// Forward EIT problem `div(gamma grad u) = 0` in the meshed domain with Dirichlet data on the
/// outer boundary and the scenario's obstacle condition, factored once.
#[derive(Debug, Clone)]
pub struct ForwardSolver {
    factored: FactoredSystem,
    outer: Vec<usize>,
}

impl ForwardSolver {
    pub fn new(scenario: &Scenario, mesh: &Mesh) -> Result<Self> {
        let gamma = conductivity_field(scenario, mesh)?;
        let mut robin = Vec::new();
        let mut constrained = mesh.outer_boundary_vertices();
        let outer = constrained.clone();
        match scenario.obstacle_bc {
            ObstacleBc::SoundSoft => {
                constrained.extend(mesh.boundary_vertices_where(|t| t == EdgeTag::ObstacleBoundary));
                constrained.sort_unstable();
                constrained.dedup();
            }
            ObstacleBc::Impedance { lambda } => robin.push(Robin {
                tag: EdgeTag::ObstacleBoundary,
                coeff: C64::new(0.0, 1.0) * lambda,
            }),
        }
        let assembly = assemble(mesh, &gamma, 0.0, None, &robin)?;
        let factored = LinearSystem::new(assembly, constrained).factor()?;
        Ok(ForwardSolver { factored, outer })
    }

    pub fn outer_vertices(&self) -> &[usize] {
        &self.outer
    }

    /// Solution for outer Dirichlet data `f` (full-length nodal vector; values off the outer
    /// boundary are ignored).
    pub fn solve(&self, f: &[C64]) -> Result<Field> {
        let mut lift = vec![C64::new(0.0, 0.0); f.len()];
        for &v in &self.outer {
            lift[v] = f[v];
        }
        self.factored.solve(&lift)
    }

    /// Weak Neumann trace `gamma d_nu u` on the outer boundary as a nodal functional.
    pub fn weak_flux(&self, u: &Field) -> Vec<C64> {
        let mut g = self.factored.weak_flux(u);
        let mut keep = vec![false; g.len()];
        for &v in &self.outer {
            keep[v] = true;
        }
        for (i, gi) in g.iter_mut().enumerate() {
            if !keep[i] {
                *gi = C64::new(0.0, 0.0);
            }
        }
        g
    }

    pub fn factored(&self) -> &FactoredSystem {
        &self.factored
    }
}

pub fn solve_forward(scenario: &Scenario, mesh: &Mesh, f: &[C64]) -> Result<Field> {
    ForwardSolver::new(scenario, mesh)?.solve(f)
}

/// Nodal restriction of `u` to vertices on edges tagged `tag` (zero elsewhere).
pub fn trace(mesh: &Mesh, u: &Field, tag: EdgeTag) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); u.len()];
    for v in mesh.boundary_vertices_where(|t| t == tag) {
        out[v] = u.values[v];
    }
    out
}

/// Weak flux of the forward solution with data `f`.
pub fn weak_flux(scenario: &Scenario, mesh: &Mesh, u: &Field, _f: &[C64]) -> Result<Vec<C64>> {
    u.check(mesh)?;
    Ok(ForwardSolver::new(scenario, mesh)?.weak_flux(u))
}

/// Pairing `sum_i g_i phi_i` of a nodal functional with nodal values.
pub fn pairing(g: &[C64], phi: &[C64]) -> C64 {
    g.iter().zip(phi).map(|(a, b)| a * b).sum()
}

/// Boundary mass matrix over edges accepted by `pred`, applied to `u`.
pub fn boundary_mass_apply(mesh: &Mesh, u: &[C64], pred: impl Fn(EdgeTag) -> bool) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); u.len()];
    for e in mesh.boundary_edges.iter().filter(|e| pred(e.tag)) {
        let l = mesh.edge_length(e);
        let [p, q] = e.v;
        out[p] += (u[p] * 2.0 + u[q]) * (l / 6.0);
        out[q] += (u[q] * 2.0 + u[p]) * (l / 6.0);
    }
    out
}

/// `(integral |u|^2, integral |grad u|^2)` over triangles whose centroid lies in `window`.
pub fn window_integrals(mesh: &Mesh, u: &Field, window: impl Fn(Point) -> bool) -> Result<(f64, f64)> {
    u.check(mesh)?;
    let mut l2 = 0.0;
    let mut grad = 0.0;
    let mut any = false;
    for t in 0..mesh.n_triangles() {
        if !window(mesh.centroid(t)) {
            continue;
        }
        any = true;
        let p = mesh.corners(t);
        let tri = mesh.triangles[t];
        let k = element_stiffness(p);
        let m = element_mass(p);
        for i in 0..3 {
            for j in 0..3 {
                let prod = (u.values[tri[i]].conj() * u.values[tri[j]]).re;
                l2 += m[i][j] * prod;
                grad += k[i][j] * prod;
            }
        }
    }
    if !any {
        return Err(Error::EmptyWindow);
    }
    Ok((l2.max(0.0), grad.max(0.0)))
}

pub fn l2_norm(mesh: &Mesh, u: &Field, window: impl Fn(Point) -> bool) -> Result<f64> {
    window_integrals(mesh, u, window).map(|(l2, _)| l2.sqrt())
}

pub fn h1_norm(mesh: &Mesh, u: &Field, window: impl Fn(Point) -> bool) -> Result<f64> {
    window_integrals(mesh, u, window).map(|(l2, g)| (l2 + g).sqrt())
}

pub fn h1_seminorm(mesh: &Mesh, u: &Field, window: impl Fn(Point) -> bool) -> Result<f64> {
    window_integrals(mesh, u, window).map(|(_, g)| g.sqrt())
}

pub fn everywhere(_: Point) -> bool {
    true
}

/// Legacy-VTK ASCII unstructured grid with the real and imaginary parts as point scalars.
pub fn to_vtk(mesh: &Mesh, u: &Field, name: &str) -> Result<String> {
    u.check(mesh)?;
    let mut s = String::new();
    let _ = writeln!(s, "# vtk DataFile Version 3.0\n{name}\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", mesh.n_vertices());
    for p in &mesh.vertices {
        let _ = writeln!(s, "{:.17e} {:.17e} 0", p[0], p[1]);
    }
    let _ = writeln!(s, "CELLS {} {}", mesh.n_triangles(), 4 * mesh.n_triangles());
    for t in &mesh.triangles {
        let _ = writeln!(s, "3 {} {} {}", t[0], t[1], t[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {}", mesh.n_triangles());
    for _ in &mesh.triangles {
        let _ = writeln!(s, "5");
    }
    let _ = writeln!(s, "POINT_DATA {}", mesh.n_vertices());
    for (label, part) in [("re", 0), ("im", 1)] {
        let _ = writeln!(s, "SCALARS {name}_{label} double 1\nLOOKUP_TABLE default");
        for v in &u.values {
            let x = if part == 0 { v.re } else { v.im };
            let _ = writeln!(s, "{x:.17e}");
        }
    }
    Ok(s)
}

/// CSV with header `vertex,x,y,re,im`.
pub fn to_csv(mesh: &Mesh, u: &Field) -> Result<String> {
    u.check(mesh)?;
    let mut s = String::from("vertex,x,y,re,im\n");
    for (i, (p, v)) in mesh.vertices.iter().zip(&u.values).enumerate() {
        let _ = writeln!(s, "{i},{:.17e},{:.17e},{:.17e},{:.17e}", p[0], p[1], v.re, v.im);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, GammaArc, Obstacle, Scenario};
    use std::f64::consts::PI;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn disk(h: f64) -> (Scenario, Mesh) {
        let s = Scenario::homogeneous_disk(1.0, 1.0, GammaArc::full());
        let m = build_mesh(&s, h).unwrap();
        (s, m)
    }

    #[test]
    fn element_stiffness_rows_sum_to_zero() {
        let k = element_stiffness([[0.0, 0.0], [1.0, 0.2], [0.3, 0.9]]);
        for row in k {
            assert!(row.iter().sum::<f64>().abs() < 1e-14);
        }
    }

    #[test]
    fn mass_total_equals_area() {
        let (_, m) = disk(0.1);
        let a = assemble(&m, &vec![1.0; m.n_triangles()], 1.0, None, &[]).unwrap();
        let stiff = assemble(&m, &vec![1.0; m.n_triangles()], 0.0, None, &[]).unwrap();
        let mut total = 0.0;
        for i in 0..m.n_vertices() {
            for (j, v) in a.matrix.row(i) {
                total += (v - stiff.matrix.get(i, j)).re;
            }
        }
        assert!((total - m.total_area()).abs() < 1e-10);
    }

    #[test]
    fn impedance_adds_scaled_boundary_mass() {
        let s = Scenario::homogeneous_disk(1.0, 1.0, GammaArc::full())
            .with_obstacle(Obstacle { center: [0.0, 0.0], radius: 0.5 }, ObstacleBc::neumann());
        let m = build_mesh(&s, 0.2).unwrap();
        let ones = vec![1.0; m.n_triangles()];
        let lam = C64::new(0.7, 0.2);
        let plain = assemble(&m, &ones, 0.0, None, &[]).unwrap();
        let robin = assemble(&m, &ones, 0.0, None, &[Robin { tag: EdgeTag::ObstacleBoundary, coeff: C64::i() * lam }]).unwrap();
        let one = vec![c(1.0); m.n_vertices()];
        let diff: C64 = (0..m.n_vertices()).map(|i| robin.matrix.row_dot(i, &one) - plain.matrix.row_dot(i, &one)).sum();
        let perimeter = m.tagged_length(EdgeTag::ObstacleBoundary);
        assert!((diff - C64::i() * lam * perimeter).norm() < 1e-12);
    }

    #[test]
    fn reproduces_linear_functions() {
        let (s, m) = disk(0.2);
        let f: Vec<C64> = m.vertices.iter().map(|p| c(p[0])).collect();
        let u = solve_forward(&s, &m, &f).unwrap();
        for (p, v) in m.vertices.iter().zip(&u.values) {
            assert!((v - c(p[0])).norm() < 1e-10);
        }
    }

    #[test]
    fn flux_of_linear_function_is_normal_component() {
        let (s, m) = disk(0.1);
        let f: Vec<C64> = m.vertices.iter().map(|p| c(p[0])).collect();
        let solver = ForwardSolver::new(&s, &m).unwrap();
        let u = solver.solve(&f).unwrap();
        let g = solver.weak_flux(&u);
        // Pair with phi = x2^2 + 1 on the boundary.
        let phi: Vec<C64> = m.vertices.iter().map(|p| c(p[1] * p[1] + 1.0)).collect();
        let mut exact = 0.0;
        for e in &m.boundary_edges {
            let nrm = m.edge_normal(e);
            let [a, b] = e.v;
            let l = m.edge_length(e);
            exact += nrm[0] * l * 0.5 * (phi[a].re + phi[b].re);
        }
        let got = pairing(&g, &phi);
        assert!((got.re - exact).abs() < 1e-8 * exact.abs().max(1.0));
    }

    #[test]
    fn flux_conservation() {
        let (s, m) = disk(0.1);
        let f: Vec<C64> = m.vertices.iter().map(|p| c((3.0 * p[1]).exp() * p[0])).collect();
        let solver = ForwardSolver::new(&s, &m).unwrap();
        let u = solver.solve(&f).unwrap();
        let total: C64 = solver.weak_flux(&u).iter().sum();
        assert!(total.norm() < 1e-10);
    }

    #[test]
    fn norms_of_simple_fields() {
        let (_, m) = disk(0.05);
        let one = Field::from_real(vec![1.0; m.n_vertices()]);
        let l2 = l2_norm(&m, &one, everywhere).unwrap();
        assert!((l2 - m.total_area().sqrt()).abs() < 1e-12);
        assert!((l2 - PI.sqrt()).abs() < 2e-3);
        let x = Field::from_real(m.vertices.iter().map(|p| p[0]));
        let (l2sq, gsq) = window_integrals(&m, &x, everywhere).unwrap();
        assert!((gsq - PI).abs() < 1e-2);
        assert!((l2sq - PI / 4.0).abs() < 1e-2);
        let h1 = h1_norm(&m, &x, everywhere).unwrap();
        assert!((h1 - (5.0 * PI / 4.0).sqrt()).abs() < 1e-2);
    }

    #[test]
    fn window_additivity() {
        let (_, m) = disk(0.1);
        let u = Field::interpolate(&m, |p| C64::new(p[0] * p[1], p[0] - p[1]));
        let left = |p: Point| p[0] < 0.1;
        let right = |p: Point| p[0] >= 0.1;
        let a = h1_norm(&m, &u, left).unwrap().powi(2) + h1_norm(&m, &u, right).unwrap().powi(2);
        let b = h1_norm(&m, &u, everywhere).unwrap().powi(2);
        assert!((a - b).abs() < 1e-12 * b);
        assert!(matches!(h1_norm(&m, &u, |_| false), Err(Error::EmptyWindow)));
    }

    #[test]
    fn discrete_maximum_principle() {
        let (s, m) = disk(0.1);
        let f: Vec<C64> = m.vertices.iter().map(|p| c((5.0 * p[0]).sin() + p[1] * p[1])).collect();
        let outer = m.outer_boundary_vertices();
        let lo = outer.iter().map(|&v| f[v].re).fold(f64::INFINITY, f64::min);
        let hi = outer.iter().map(|&v| f[v].re).fold(f64::NEG_INFINITY, f64::max);
        let u = solve_forward(&s, &m, &f).unwrap();
        for v in &u.values {
            assert!(v.re >= lo - 1e-12 && v.re <= hi + 1e-12);
        }
    }

    #[test]
    fn exports_have_headers() {
        let (_, m) = disk(0.5);
        let u = Field::interpolate(&m, |p| C64::new(p[0], p[1]));
        let vtk = to_vtk(&m, &u, "u").unwrap();
        assert!(vtk.starts_with("# vtk DataFile Version 3.0"));
        assert!(vtk.contains("SCALARS u_im double 1"));
        let csv = to_csv(&m, &u).unwrap();
        assert_eq!(csv.lines().count(), m.n_vertices() + 1);
    }
}
