//! The coupled transmission system on a subdomain `D0`:
//!
//! ```text
//! div(a1 grad u1) - b1 u1 = rho1,   div(a2 grad u2) - b2 u2 = rho2   in D0
//! u1 - u2 = f1,   a1 d_nu u1 - a2 d_nu u2 = f2                      on ∂D0
//! ```
//!
//! Discretized in P1 x P1 with the trace jump imposed strongly and test pairs `(phi, psi)` that
//! agree on ∂D0:
//! `B1(u1, phi) - B2(u2, psi) = <f2, phi> - (rho1, phi) + (rho2, psi)`, where
//! `B_k(u, phi) = (a_k grad u, grad phi) + b_k (u, phi)`.
//! Interior unknowns are condensed with sparse factorizations, leaving a dense system
//! `(S1 - S2) u1_B = r` on the boundary vertices.

pub mod poly;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dtn::BoundaryNorms;
use crate::error::{Error, Result};
use crate::fem::{assemble, h1_norm, l2_norm, Assembly, FactoredSystem, Field, LinearSystem};
use crate::geometry::Mesh;
use crate::linalg::{DenseLu, DenseMatrix};
use crate::Point;

type C64 = Complex64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Condition estimates above this make the boundary system numerically singular.
pub const SINGULAR_CONDITION: f64 = 1e14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoercivityReport {
    pub feasible: bool,
    pub threshold: f64,
    pub epsilon0: Option<f64>,
    pub c3: Option<f64>,
    pub c4: Option<f64>,
    pub c5: Option<f64>,
    pub c0: f64,
}

/// Feasibility of `eps0 b1 > ((1+b2)/2)^2` and `eps0 inf(a1/a2) > ((1+b2)/2)^2` for some
/// `eps0 in (0, 1)`, with `eps0` taken as the midpoint of the admissible interval.
pub fn check_coercivity(a1_over_a2_inf: f64, b1: f64, b2: f64, c0: f64) -> Result<CoercivityReport> {
    for (name, v) in [("a1/a2", a1_over_a2_inf), ("b1", b1), ("b2", b2), ("c0", c0)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidInput(format!("{name} must be positive, got {v}")));
        }
    }
    let threshold = (1.0 + b2).powi(2) / 4.0;
    let m = b1.min(a1_over_a2_inf);
    if m <= threshold {
        return Ok(CoercivityReport { feasible: false, threshold, epsilon0: None, c3: None, c4: None, c5: None, c0 });
    }
    let eps0 = (threshold / m + 1.0) / 2.0;
    let c3 = b1 - threshold / eps0;
    let c4 = a1_over_a2_inf - threshold / eps0;
    let c5 = (1.0 - eps0).min(c0 * (1.0 - eps0)).min(c3).min(c0 * c4);
    Ok(CoercivityReport { feasible: true, threshold, epsilon0: Some(eps0), c3: Some(c3), c4: Some(c4), c5: Some(c5), c0 })
}

#[derive(Debug, Clone)]
pub struct CoupledProblem {
    pub mesh: Mesh,
    pub a1: Vec<f64>,
    pub a2: Vec<f64>,
    pub b1: f64,
    pub b2: f64,
    pub rho1: Field,
    pub rho2: Field,
    /// Trace jump, nodal, read on boundary vertices.
    pub f1: Vec<C64>,
    /// Flux jump as a nodal functional on boundary vertices.
    pub f2: Vec<C64>,
}

/// Vertex split used by the monolithic ordering `(u1_I, u2_I, u1_B)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoupledLayout {
    pub interior: Vec<usize>,
    pub boundary: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct CoupledSolution {
    pub u1: Field,
    pub u2: Field,
    pub condition: f64,
    /// Largest residual of the discrete equations relative to the data scale.
    pub residual: f64,
    /// Set when the coefficients fail the coercivity check.
    pub warning: Option<String>,
}

impl CoupledProblem {
    /// Problem with zero data.
    pub fn homogeneous(mesh: Mesh, a1: Vec<f64>, a2: Vec<f64>, b1: f64, b2: f64) -> Self {
        let n = mesh.n_vertices();
        CoupledProblem {
            mesh,
            a1,
            a2,
            b1,
            b2,
            rho1: Field::zeros(n),
            rho2: Field::zeros(n),
            f1: vec![ZERO; n],
            f2: vec![ZERO; n],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.mesh.n_vertices();
        let nt = self.mesh.n_triangles();
        if self.a1.len() != nt || self.a2.len() != nt {
            return Err(Error::InvalidInput("a1 and a2 need one value per triangle".into()));
        }
        if self.a1.iter().chain(&self.a2).any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidInput("a1 and a2 must be positive".into()));
        }
        if !(self.b1 > 0.0 && self.b2 > 0.0 && self.b1.is_finite() && self.b2.is_finite()) {
            return Err(Error::InvalidInput(format!("b1 and b2 must be positive, got {} and {}", self.b1, self.b2)));
        }
        if self.rho1.len() != n || self.rho2.len() != n || self.f1.len() != n || self.f2.len() != n {
            return Err(Error::InvalidInput("data must be full-length nodal vectors".into()));
        }
        Ok(())
    }

    pub fn a1_over_a2_inf(&self) -> f64 {
        self.a1.iter().zip(&self.a2).map(|(a, b)| a / b).fold(f64::INFINITY, f64::min)
    }

    pub fn layout(&self) -> CoupledLayout {
        let boundary = self.mesh.all_boundary_vertices();
        let mut on = vec![false; self.mesh.n_vertices()];
        for &v in &boundary {
            on[v] = true;
        }
        let interior = (0..self.mesh.n_vertices()).filter(|&v| !on[v]).collect();
        CoupledLayout { interior, boundary }
    }

    fn assemblies(&self) -> Result<(Assembly, Assembly)> {
        let k1 = assemble(&self.mesh, &self.a1, self.b1, Some(&self.rho1), &[])?;
        let k2 = assemble(&self.mesh, &self.a2, self.b2, Some(&self.rho2), &[])?;
        Ok((k1, k2))
    }

    /// Dense monolithic matrix and right-hand side in the order `(u1_I, u2_I, u1_B)`, with the
    /// second block row negated so that the matrix is symmetric.
    pub fn monolithic_system(&self) -> Result<(DenseMatrix, Vec<C64>, CoupledLayout)> {
        self.validate()?;
        let (k1, k2) = self.assemblies()?;
        let lay = self.layout();
        let (ni, nb) = (lay.interior.len(), lay.boundary.len());
        let dim = 2 * ni + nb;
        let mut m = DenseMatrix::zeros(dim, dim);
        let mut rhs = vec![ZERO; dim];
        let mut slot_i = vec![usize::MAX; self.mesh.n_vertices()];
        let mut slot_b = vec![usize::MAX; self.mesh.n_vertices()];
        for (k, &v) in lay.interior.iter().enumerate() {
            slot_i[v] = k;
        }
        for (k, &v) in lay.boundary.iter().enumerate() {
            slot_b[v] = k;
        }
        let n = dim;
        for (r, &v) in lay.interior.iter().enumerate() {
            rhs[r] = k1.load[v];
            for (c, val) in k1.matrix.row(v) {
                let col = if slot_i[c] != usize::MAX { slot_i[c] } else { 2 * ni + slot_b[c] };
                m.data[r * n + col] += val;
            }
            let r2 = ni + r;
            rhs[r2] = -k2.load[v];
            for (c, val) in k2.matrix.row(v) {
                if slot_i[c] != usize::MAX {
                    m.data[r2 * n + ni + slot_i[c]] -= val;
                } else {
                    m.data[r2 * n + 2 * ni + slot_b[c]] -= val;
                    rhs[r2] -= val * self.f1[c];
                }
            }
        }
        for (k, &v) in lay.boundary.iter().enumerate() {
            let r = 2 * ni + k;
            rhs[r] = self.f2[v] + k1.load[v] - k2.load[v];
            for (c, val) in k1.matrix.row(v) {
                let col = if slot_i[c] != usize::MAX { slot_i[c] } else { 2 * ni + slot_b[c] };
                m.data[r * n + col] += val;
            }
            for (c, val) in k2.matrix.row(v) {
                if slot_i[c] != usize::MAX {
                    m.data[r * n + ni + slot_i[c]] -= val;
                } else {
                    m.data[r * n + 2 * ni + slot_b[c]] -= val;
                    rhs[r] -= val * self.f1[c];
                }
            }
        }
        Ok((m, rhs, lay))
    }
}

struct Condensed {
    k1: Assembly,
    k2: Assembly,
    s1: FactoredSystem,
    s2: FactoredSystem,
    boundary: Vec<usize>,
}

impl Condensed {
    fn new(p: &CoupledProblem) -> Result<Self> {
        let (k1, k2) = p.assemblies()?;
        let boundary = p.mesh.all_boundary_vertices();
        let s1 = LinearSystem::new(k1.clone(), boundary.clone()).factor()?;
        let s2 = LinearSystem::new(k2.clone(), boundary.clone()).factor()?;
        Ok(Condensed { k1, k2, s1, s2, boundary })
    }

    /// Interior solves for boundary values `x` of u1, and the boundary residual.
    fn sweep(&self, x: &[C64], f1: &[C64], loads: Option<(&[C64], &[C64], &[C64])>) -> Result<(Field, Field, Vec<C64>)> {
        let n = f1.len();
        let zero = vec![ZERO; n];
        let (l1, l2, f2) = loads.unwrap_or((&zero, &zero, &zero));
        let mut lift1 = vec![ZERO; n];
        let mut lift2 = vec![ZERO; n];
        for (k, &v) in self.boundary.iter().enumerate() {
            lift1[v] = x[k];
            lift2[v] = x[k] - f1[v];
        }
        let u1 = self.s1.solve_with_load(l1, &lift1)?;
        let u2 = self.s2.solve_with_load(l2, &lift2)?;
        let r = self
            .boundary
            .iter()
            .map(|&v| {
                self.k1.matrix.row_dot(v, &u1.values) - self.k2.matrix.row_dot(v, &u2.values) - (f2[v] + l1[v] - l2[v])
            })
            .collect();
        Ok((u1, u2, r))
    }
}

pub fn solve_coupled(p: &CoupledProblem) -> Result<CoupledSolution> {
    p.validate()?;
    let cond = Condensed::new(p)?;
    let nb = cond.boundary.len();
    if nb == 0 {
        return Err(Error::InvalidInput("subdomain has no boundary vertices".into()));
    }
    let zero_f1 = vec![ZERO; p.mesh.n_vertices()];
    let columns: Vec<Vec<C64>> = (0..nb)
        .into_par_iter()
        .map(|j| {
            let mut e = vec![ZERO; nb];
            e[j] = C64::new(1.0, 0.0);
            cond.sweep(&e, &zero_f1, None).map(|(_, _, r)| r)
        })
        .collect::<Result<_>>()?;
    let mut s = DenseMatrix::zeros(nb, nb);
    for (j, col) in columns.iter().enumerate() {
        for (i, &v) in col.iter().enumerate() {
            s.data[i * nb + j] = v;
        }
    }
    let lu = DenseLu::factor(&s).map_err(|_| Error::SingularCoupledSystem { condition: f64::INFINITY })?;
    let condition = lu.condition();
    if !(condition < SINGULAR_CONDITION) {
        return Err(Error::SingularCoupledSystem { condition });
    }
    let loads = (cond.k1.load.as_slice(), cond.k2.load.as_slice(), p.f2.as_slice());
    let zero_x = vec![ZERO; nb];
    let (_, _, r0) = cond.sweep(&zero_x, &p.f1, Some(loads))?;
    let neg: Vec<C64> = r0.iter().map(|v| -v).collect();
    let x = lu.solve(&neg);
    let (u1, u2, r) = cond.sweep(&x, &p.f1, Some(loads))?;
    let scale = r0
        .iter()
        .chain(&cond.k1.load)
        .chain(&cond.k2.load)
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let residual = r.iter().map(|v| v.norm()).fold(0.0, f64::max) / scale;
    let report = check_coercivity(p.a1_over_a2_inf(), p.b1, p.b2, 1.0)?;
    let warning = (!report.feasible).then(|| {
        format!(
            "IllPosedWarning: min(b1, inf a1/a2) = {} does not exceed (1+b2)^2/4 = {}",
            p.b1.min(p.a1_over_a2_inf()),
            report.threshold
        )
    });
    Ok(CoupledSolution { u1, u2, condition, residual, warning })
}

/// `(||u1||_{H1} + ||u2||_{H1}) / (||rho1||_{L2} + ||rho2||_{L2} + |f1|_{1/2} + |f2|_{-1/2})`.
pub fn stability_ratio(p: &CoupledProblem, sol: &CoupledSolution) -> Result<f64> {
    let norms = BoundaryNorms::new(&p.mesh)?;
    stability_ratio_with(p, sol, &norms)
}

pub fn stability_ratio_with(p: &CoupledProblem, sol: &CoupledSolution, norms: &BoundaryNorms) -> Result<f64> {
    let all = |_: Point| true;
    let den = l2_norm(&p.mesh, &p.rho1, all)?
        + l2_norm(&p.mesh, &p.rho2, all)?
        + norms.half(&p.f1)?
        + norms.minus_half(&p.f2)?;
    if den == 0.0 {
        return Err(Error::ZeroData);
    }
    Ok((h1_norm(&p.mesh, &sol.u1, all)? + h1_norm(&p.mesh, &sol.u2, all)?) / den)
}

/// Nodal functional `<g, phi_i>` of a boundary density `g(x, nu)` by 3-point Gauss on each edge.
pub fn boundary_functional(mesh: &Mesh, g: impl Fn(Point, Point) -> C64) -> Vec<C64> {
    const Q: [(f64, f64); 3] = [
        (0.112_701_665_379_258_3, 5.0 / 18.0),
        (0.5, 8.0 / 18.0),
        (0.887_298_334_620_741_7, 5.0 / 18.0),
    ];
    let mut out = vec![ZERO; mesh.n_vertices()];
    for e in &mesh.boundary_edges {
        let (a, b) = (mesh.vertices[e.v[0]], mesh.vertices[e.v[1]]);
        let n = mesh.edge_normal(e);
        let l = mesh.edge_length(e);
        for &(s, w) in &Q {
            let p = [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
            let v = g(p, n) * (w * l);
            out[e.v[0]] += v * (1.0 - s);
            out[e.v[1]] += v * s;
        }
    }
    out
}

/// Smooth random data for the stability ensemble: quadratic polynomials in coordinates relative
/// to `center`, so that the same sample can be evaluated on any mesh of the subdomain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomData {
    pub center: Point,
    /// Coefficients of `1, x, y, x^2, xy, y^2` for rho1, rho2, f1 and the f2 density.
    pub coeffs: [[f64; 6]; 4],
}

impl RandomData {
    pub fn sample(rng: &mut impl Rng, center: Point) -> Self {
        let mut coeffs = [[0.0; 6]; 4];
        for row in coeffs.iter_mut() {
            for c in row.iter_mut() {
                *c = rng.gen_range(-1.0..1.0);
            }
        }
        RandomData { center, coeffs }
    }

    pub fn ensemble(seed: u64, count: usize, center: Point) -> Vec<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| RandomData::sample(&mut rng, center)).collect()
    }

    fn eval(&self, k: usize, p: Point) -> f64 {
        let (x, y) = (p[0] - self.center[0], p[1] - self.center[1]);
        let c = &self.coeffs[k];
        c[0] + c[1] * x + c[2] * y + c[3] * x * x + c[4] * x * y + c[5] * y * y
    }

    pub fn problem(&self, mesh: &Mesh, a1: f64, a2: f64, b1: f64, b2: f64) -> CoupledProblem {
        let nt = mesh.n_triangles();
        let mut p = CoupledProblem::homogeneous(mesh.clone(), vec![a1; nt], vec![a2; nt], b1, b2);
        p.rho1 = Field::interpolate(mesh, |q| C64::new(self.eval(0, q), 0.0));
        p.rho2 = Field::interpolate(mesh, |q| C64::new(self.eval(1, q), 0.0));
        let on_boundary = mesh.all_boundary_vertices();
        for &v in &on_boundary {
            p.f1[v] = C64::new(self.eval(2, mesh.vertices[v]), 0.0);
        }
        p.f2 = boundary_functional(mesh, |q, _| C64::new(self.eval(3, q), 0.0));
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_mesh, GammaArc, Scenario};

    #[test]
    fn coercivity_examples() {
        let r = check_coercivity(2.0, 2.0, 1.0, 1.0).unwrap();
        assert!(r.feasible);
        assert!((r.epsilon0.unwrap() - 0.75).abs() < 1e-15);
        assert!((r.c3.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.c4.unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.c5.unwrap() - 0.25).abs() < 1e-12);
        assert!(!check_coercivity(1.0, 2.0, 1.0, 1.0).unwrap().feasible);
        let r = check_coercivity(10.0, 10.0, 0.1, 0.5).unwrap();
        assert!(r.feasible && (r.threshold - 0.3025).abs() < 1e-15);
        assert!(check_coercivity(0.0, 1.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn zero_data_gives_zero() {
        let s = Scenario::homogeneous_disk(0.3, 1.0, GammaArc::full());
        let m = build_mesh(&s, 0.06).unwrap();
        let nt = m.n_triangles();
        let p = CoupledProblem::homogeneous(m, vec![2.0; nt], vec![1.0; nt], 2.0, 1.0);
        let sol = solve_coupled(&p).unwrap();
        assert!(sol.u1.values.iter().chain(&sol.u2.values).all(|v| v.norm() == 0.0));
        assert!(matches!(stability_ratio(&p, &sol), Err(Error::ZeroData)));
    }

    #[test]
    fn condensed_solution_solves_monolithic_system() {
        let s = Scenario::homogeneous_disk(0.3, 1.0, GammaArc::full());
        let m = build_mesh(&s, 0.1).unwrap();
        let p = RandomData::ensemble(7, 1, [0.0, 0.0])[0].problem(&m, 2.0, 1.0, 2.0, 1.0);
        let sol = solve_coupled(&p).unwrap();
        assert!(sol.residual < 1e-10);
        let (a, rhs, lay) = p.monolithic_system().unwrap();
        let mut x: Vec<C64> = lay.interior.iter().map(|&v| sol.u1.values[v]).collect();
        x.extend(lay.interior.iter().map(|&v| sol.u2.values[v]));
        x.extend(lay.boundary.iter().map(|&v| sol.u1.values[v]));
        let ax = a.mul_vec(&x);
        let err = ax.iter().zip(&rhs).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
        assert!(a.data.iter().zip(&a.transpose().data).all(|(p, q)| (p - q).norm() < 1e-12));
        for &v in &lay.boundary {
            assert!((sol.u1.values[v] - sol.u2.values[v] - p.f1[v]).norm() < 1e-12);
        }
    }
}
