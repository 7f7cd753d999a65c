//! Local Dirichlet-to-Neumann maps on the measurement arc and boundary norm surrogates.
//!
//! Boundary data live in the span of hat functions of the Γ-interior vertices, so they vanish
//! on the rest of the outer boundary. Fluxes are the weak co-normal derivatives tested against
//! the same hat functions.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{assemble, boundary_mass_apply, window_integrals, FactoredSystem, Field, ForwardSolver, LinearSystem};
use crate::geometry::{GammaArc, Mesh, Scenario};
use crate::linalg::DenseMatrix;
use crate::Point;

type C64 = Complex64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// Forward solver restricted to data and measurements on Γ.
#[derive(Debug, Clone)]
pub struct DtnOperator {
    solver: ForwardSolver,
    gamma: Vec<usize>,
    off_gamma: Vec<usize>,
    n_vertices: usize,
}

impl DtnOperator {
    pub fn new(scenario: &Scenario, mesh: &Mesh) -> Result<Self> {
        let solver = ForwardSolver::new(scenario, mesh)?;
        let gamma = mesh.gamma_interior_vertices();
        if gamma.is_empty() {
            return Err(Error::InvalidInput("measurement arc carries no interior vertex".into()));
        }
        let mut on = vec![false; mesh.n_vertices()];
        for &v in &gamma {
            on[v] = true;
        }
        let off_gamma = solver.outer_vertices().iter().copied().filter(|&v| !on[v]).collect();
        Ok(DtnOperator { solver, gamma, off_gamma, n_vertices: mesh.n_vertices() })
    }

    /// Γ-interior vertex ids, ascending. Γ-restricted vectors follow this order.
    pub fn gamma_vertices(&self) -> &[usize] {
        &self.gamma
    }

    pub fn solver(&self) -> &ForwardSolver {
        &self.solver
    }

    /// Forward solution for full-length nodal data `f`, which must vanish on ∂Ω off Γ.
    pub fn solve(&self, f: &[C64]) -> Result<Field> {
        if f.len() != self.n_vertices {
            return Err(Error::InvalidInput("boundary data must be a full-length nodal vector".into()));
        }
        let scale = f.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if let Some(&v) = self.off_gamma.iter().find(|&&v| f[v].norm() > 1e-12 * scale.max(1e-300)) {
            return Err(Error::DataOutsideGamma { vertex: v });
        }
        self.solver.solve(f)
    }

    /// Flux functional of the solution, restricted to Γ test functions.
    pub fn flux_on_gamma(&self, u: &Field) -> Vec<C64> {
        let g = self.solver.weak_flux(u);
        self.gamma.iter().map(|&v| g[v]).collect()
    }

    pub fn apply(&self, f: &[C64]) -> Result<Vec<C64>> {
        let u = self.solve(f)?;
        Ok(self.flux_on_gamma(&u))
    }

    /// Full-length nodal vector from Γ coefficients.
    pub fn extend(&self, coeffs: &[C64]) -> Vec<C64> {
        let mut f = vec![ZERO; self.n_vertices];
        for (&v, &c) in self.gamma.iter().zip(coeffs) {
            f[v] = c;
        }
        f
    }

    pub fn matrix(&self, scenario: &Scenario, mesh: &Mesh) -> Result<DtnMatrix> {
        let n = self.gamma.len();
        let columns: Vec<Vec<C64>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut e = vec![ZERO; n];
                e[j] = C64::new(1.0, 0.0);
                self.apply(&self.extend(&e))
            })
            .collect::<Result<_>>()?;
        let mut m = DenseMatrix::zeros(n, n);
        for (j, col) in columns.iter().enumerate() {
            for (i, &v) in col.iter().enumerate() {
                m.data[i * n + j] = v;
            }
        }
        Ok(DtnMatrix {
            gamma_arc: scenario.gamma_arc,
            gamma_vertices: self.gamma.clone(),
            gamma_points: self.gamma.iter().map(|&v| mesh.vertices[v]).collect(),
            scenario_hash: scenario.hash(),
            h: mesh.h,
            matrix: m,
        })
    }
}

/// `M[i][j] = <Λ e_j, e_i>` over Γ-interior hat functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DtnMatrix {
    pub gamma_arc: GammaArc,
    pub gamma_vertices: Vec<usize>,
    pub gamma_points: Vec<Point>,
    pub scenario_hash: String,
    pub h: f64,
    pub matrix: DenseMatrix,
}

impl DtnMatrix {
    pub fn dim(&self) -> usize {
        self.gamma_vertices.len()
    }

    /// `||M - M^T|| / ||M||` in the Frobenius norm.
    pub fn symmetry_defect(&self) -> f64 {
        let m = &self.matrix;
        let t = m.transpose();
        let diff: f64 = m.data.iter().zip(&t.data).map(|(a, b)| (a - b).norm_sqr()).sum();
        diff.sqrt() / m.norm().max(f64::MIN_POSITIVE)
    }

    pub fn apply(&self, coeffs: &[C64]) -> Vec<C64> {
        self.matrix.mul_vec(coeffs)
    }

    /// Frobenius norm of the difference of two matrices on the same Γ vertices.
    pub fn distance(&self, other: &DtnMatrix) -> Result<f64> {
        if self.gamma_points != other.gamma_points {
            return Err(Error::InvalidInput("matrices live on different Γ vertex sets".into()));
        }
        let d: f64 = self.matrix.data.iter().zip(&other.matrix.data).map(|(a, b)| (a - b).norm_sqr()).sum();
        Ok(d.sqrt())
    }
}

pub fn dtn_apply(scenario: &Scenario, mesh: &Mesh, f: &[C64]) -> Result<Vec<C64>> {
    DtnOperator::new(scenario, mesh)?.apply(f)
}

pub fn local_dtn_matrix(scenario: &Scenario, mesh: &Mesh) -> Result<DtnMatrix> {
    DtnOperator::new(scenario, mesh)?.matrix(scenario, mesh)
}

/// Rayleigh quotient `<M f, conj f> / <f, conj f>_{L2(Γ)}` for `f = e^{i n theta}`, the discrete
/// counterpart of the mode-`n` eigenvalue on a full circle.
pub fn mode_eigenvalue(mesh: &Mesh, dtn: &DtnMatrix, n: i32) -> C64 {
    let theta = |p: Point| p[1].atan2(p[0]);
    let f: Vec<C64> = dtn.gamma_points.iter().map(|&p| C64::from_polar(1.0, n as f64 * theta(p))).collect();
    let mf = dtn.apply(&f);
    let num: C64 = mf.iter().zip(&f).map(|(a, b)| a * b.conj()).sum();
    let mut full = vec![ZERO; mesh.n_vertices()];
    for (&v, &c) in dtn.gamma_vertices.iter().zip(&f) {
        full[v] = c;
    }
    let bm = boundary_mass_apply(mesh, &full, |t| t.is_outer());
    let den: C64 = dtn.gamma_vertices.iter().zip(&f).map(|(&v, c)| bm[v] * c.conj()).sum();
    num / den
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyPair {
    pub trace: Vec<C64>,
    pub flux: Vec<C64>,
}

/// Pairs `(f|Γ, Λf|Γ)` in Γ-interior coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyDataset {
    pub gamma_arc: GammaArc,
    pub gamma_vertices: Vec<usize>,
    pub gamma_points: Vec<Point>,
    pub scenario_hash: String,
    pub h: f64,
    pub pairs: Vec<CauchyPair>,
}

impl CauchyDataset {
    /// One pair per data vector; each `traces[k]` holds Γ-interior coefficients.
    pub fn generate(scenario: &Scenario, mesh: &Mesh, traces: &[Vec<C64>]) -> Result<Self> {
        if traces.is_empty() {
            return Err(Error::InvalidInput("a Cauchy dataset needs at least one pair".into()));
        }
        let op = DtnOperator::new(scenario, mesh)?;
        let n = op.gamma_vertices().len();
        if let Some(t) = traces.iter().find(|t| t.len() != n) {
            return Err(Error::InvalidInput(format!("trace of length {} on {n} Γ vertices", t.len())));
        }
        let pairs = traces
            .par_iter()
            .map(|t| Ok(CauchyPair { trace: t.clone(), flux: op.apply(&op.extend(t))? }))
            .collect::<Result<Vec<_>>>()?;
        Ok(CauchyDataset {
            gamma_arc: scenario.gamma_arc,
            gamma_vertices: op.gamma_vertices().to_vec(),
            gamma_points: op.gamma_vertices().iter().map(|&v| mesh.vertices[v]).collect(),
            scenario_hash: scenario.hash(),
            h: mesh.h,
            pairs,
        })
    }

    /// Flux for the stored trace equal to `trace`, if present.
    pub fn lookup(&self, trace: &[C64]) -> Option<&[C64]> {
        let scale = trace.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
        self.pairs
            .iter()
            .find(|p| p.trace.len() == trace.len() && p.trace.iter().zip(trace).all(|(a, b)| (a - b).norm() <= 1e-9 * scale))
            .map(|p| p.flux.as_slice())
    }
}

/// Which boundary norm surrogate to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    /// H¹ norm of the discrete harmonic extension of a trace.
    HalfTrace,
    /// H¹ norm of the Neumann solution of `(-Δ + 1) w = 0` with flux data.
    MinusHalfFlux,
}

/// Factored extension problems for the H^{±1/2} surrogates on one mesh.
#[derive(Debug, Clone)]
pub struct BoundaryNorms {
    mesh: Mesh,
    harmonic: FactoredSystem,
    neumann: FactoredSystem,
}

impl BoundaryNorms {
    pub fn new(mesh: &Mesh) -> Result<Self> {
        let ones = vec![1.0; mesh.n_triangles()];
        let stiff = assemble(mesh, &ones, 0.0, None, &[])?;
        let harmonic = LinearSystem::new(stiff, mesh.all_boundary_vertices()).factor()?;
        let full = assemble(mesh, &ones, 1.0, None, &[])?;
        let neumann = LinearSystem::new(full, Vec::new()).factor()?;
        Ok(BoundaryNorms { mesh: mesh.clone(), harmonic, neumann })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    /// Harmonic extension of a full-length nodal trace (read on boundary vertices).
    pub fn harmonic_extension(&self, g: &[C64]) -> Result<Field> {
        self.harmonic.solve(g)
    }

    pub fn half(&self, g: &[C64]) -> Result<f64> {
        let w = self.harmonic_extension(g)?;
        let (l2, grad) = window_integrals(&self.mesh, &w, |_| true)?;
        Ok((l2 + grad).sqrt())
    }

    /// Surrogate of a full-length nodal flux functional (nonzero on boundary vertices).
    pub fn minus_half(&self, g: &[C64]) -> Result<f64> {
        let zero = vec![ZERO; g.len()];
        let w = self.neumann.solve_with_load(g, &zero)?;
        let (l2, grad) = window_integrals(&self.mesh, &w, |_| true)?;
        Ok((l2 + grad).sqrt())
    }

    pub fn norm(&self, g: &[C64], kind: NormKind) -> Result<f64> {
        match kind {
            NormKind::HalfTrace => self.half(g),
            NormKind::MinusHalfFlux => self.minus_half(g),
        }
    }
}

pub fn boundary_norms(g: &[C64], mesh: &Mesh, kind: NormKind) -> Result<f64> {
    BoundaryNorms::new(mesh)?.norm(g, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_mesh;
    use std::f64::consts::PI;

    #[test]
    fn unit_disk_mode_one() {
        let s = Scenario::homogeneous_disk(1.0, 1.0, GammaArc::full());
        let m = build_mesh(&s, 0.1).unwrap();
        let dtn = local_dtn_matrix(&s, &m).unwrap();
        let k = mode_eigenvalue(&m, &dtn, 1);
        assert!((k.re - 1.0).abs() < 0.02, "{k}");
        assert!(dtn.symmetry_defect() < 1e-8);
    }

    #[test]
    fn data_off_gamma_is_rejected() {
        let s = Scenario::homogeneous_disk(1.0, 1.0, GammaArc { start: 0.0, end: PI });
        let m = build_mesh(&s, 0.2).unwrap();
        let f: Vec<C64> = m.vertices.iter().map(|_| C64::new(1.0, 0.0)).collect();
        assert!(matches!(dtn_apply(&s, &m, &f), Err(Error::DataOutsideGamma { .. })));
    }

    #[test]
    fn norm_basics() {
        let s = Scenario::homogeneous_disk(1.0, 1.0, GammaArc::full());
        let m = build_mesh(&s, 0.1).unwrap();
        let norms = BoundaryNorms::new(&m).unwrap();
        let zero = vec![ZERO; m.n_vertices()];
        assert_eq!(norms.half(&zero).unwrap(), 0.0);
        assert_eq!(norms.minus_half(&zero).unwrap(), 0.0);
        let one = vec![C64::new(1.0, 0.0); m.n_vertices()];
        assert!((norms.half(&one).unwrap() - m.total_area().sqrt()).abs() < 1e-12);
        let g: Vec<C64> = m.vertices.iter().map(|p| C64::new(p[0], p[1] * p[1])).collect();
        let a = C64::new(-2.0, 3.0);
        let ga: Vec<C64> = g.iter().map(|v| v * a).collect();
        for kind in [NormKind::HalfTrace, NormKind::MinusHalfFlux] {
            let n1 = norms.norm(&g, kind).unwrap();
            let n2 = norms.norm(&ga, kind).unwrap();
            assert!((n2 - a.norm() * n1).abs() < 1e-10 * n2);
        }
    }
}
