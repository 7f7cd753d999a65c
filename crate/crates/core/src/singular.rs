//! Fundamental solutions, smooth cut-offs and the singular boundary-data family
//! `f_j = chi_delta * Phi_2(., x_j)` with sources `x_j = x* + nu(x*) / j` outside the domain.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Mesh, Scenario};
use crate::Point;

/// `-ln|x-y| / 2pi` for `dim = 2`, `1 / (4 pi |x-y|)` for `dim = 3`.
pub fn fundamental_solution(dim: u32, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != dim as usize || y.len() != dim as usize {
        return Err(Error::InvalidInput(format!("points must have {dim} coordinates")));
    }
    let r = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    if r == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    match dim {
        2 => Ok(-r.ln() / TAU),
        3 => Ok(1.0 / (4.0 * PI * r)),
        _ => Err(Error::InvalidInput(format!("dimension must be 2 or 3, got {dim}"))),
    }
}

/// Planar fundamental solution; callers guarantee `x != y`.
pub fn phi2(x: Point, y: Point) -> f64 {
    -(x[0] - y[0]).hypot(x[1] - y[1]).ln() / TAU
}

/// Gradient of `phi2` in `x`.
pub fn grad_phi2(x: Point, y: Point) -> Point {
    let d = [x[0] - y[0], x[1] - y[1]];
    let r2 = d[0] * d[0] + d[1] * d[1];
    [-d[0] / (TAU * r2), -d[1] / (TAU * r2)]
}

fn psi(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// Smooth radial step: 1 on `B_{delta/2}(center)`, 0 outside `B_delta(center)`.
pub fn cutoff(x: Point, center: Point, delta: f64) -> f64 {
    let r = (x[0] - center[0]).hypot(x[1] - center[1]);
    let s = (r - delta / 2.0) / (delta / 2.0);
    if s <= 0.0 {
        1.0
    } else if s >= 1.0 {
        0.0
    } else {
        let a = psi(1.0 - s);
        a / (a + psi(s))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularFamily {
    pub x_star: Point,
    pub normal: Point,
    pub delta: f64,
    pub eps: f64,
    pub j_values: Vec<u32>,
}

impl SingularFamily {
    /// Family anchored at the boundary point with polar angle `angle`.
    pub fn new(scenario: &Scenario, angle: f64, delta: f64, eps: f64, j_values: Vec<u32>) -> Result<Self> {
        let (x_star, normal) = scenario.domain.boundary_point(angle);
        let fam = SingularFamily { x_star, normal, delta, eps, j_values };
        fam.validate(scenario)?;
        Ok(fam)
    }

    pub fn validate(&self, scenario: &Scenario) -> Result<()> {
        if !(self.delta > 0.0 && self.eps > 0.0 && self.eps < self.delta / 2.0) {
            return Err(Error::InvalidInput(format!(
                "need 0 < eps < delta/2, got eps = {}, delta = {}",
                self.eps, self.delta
            )));
        }
        if self.j_values.is_empty() || self.j_values.contains(&0) {
            return Err(Error::InvalidInput("j values must be positive".into()));
        }
        for &j in &self.j_values {
            let x = self.source(j);
            if scenario.domain.contains(x) || scenario.domain.distance_to_boundary(x) <= 0.0 {
                return Err(Error::InvalidInput(format!("source for j = {j} is not outside the domain")));
            }
        }
        let center = scenario.domain.center();
        let samples = 4096;
        for k in 0..samples {
            let theta = TAU * k as f64 / samples as f64;
            let (p, _) = scenario.domain.boundary_point(theta);
            let d = (p[0] - self.x_star[0]).hypot(p[1] - self.x_star[1]);
            if d < self.delta && !scenario.gamma_arc.contains_angle(crate::geometry::polar_angle(p, center)) {
                return Err(Error::InvalidInput(format!(
                    "cut-off support reaches the boundary outside the measurement arc at {p:?}"
                )));
            }
        }
        Ok(())
    }

    pub fn source(&self, j: u32) -> Point {
        let t = 1.0 / j as f64;
        [self.x_star[0] + t * self.normal[0], self.x_star[1] + t * self.normal[1]]
    }

    /// j values whose source lies at least one mesh size outside the domain.
    pub fn resolvable(&self, h: f64) -> Vec<u32> {
        self.j_values.iter().copied().filter(|&j| 1.0 / j as f64 >= h).collect()
    }

    pub fn require_resolvable(&self, h: f64) -> Result<Vec<u32>> {
        let js = self.resolvable(h);
        if js.len() < 4 {
            return Err(Error::InsufficientRange { resolvable: js.len() });
        }
        Ok(js)
    }

    /// Window `O_eps = B_eps(x*)`.
    pub fn in_window(&self, p: Point) -> bool {
        (p[0] - self.x_star[0]).hypot(p[1] - self.x_star[1]) < self.eps
    }
}

/// Nodal values of `f_j` on the outer boundary, zero elsewhere.
pub fn singular_dirichlet_data(fam: &SingularFamily, j: u32, mesh: &Mesh) -> Result<Vec<Complex64>> {
    if !fam.j_values.contains(&j) {
        return Err(Error::InvalidInput(format!("j = {j} is not in the family range")));
    }
    let xj = fam.source(j);
    let mut f = vec![Complex64::new(0.0, 0.0); mesh.n_vertices()];
    for v in mesh.outer_boundary_vertices() {
        let p = mesh.vertices[v];
        let chi = cutoff(p, fam.x_star, fam.delta);
        if chi > 0.0 {
            f[v] = Complex64::new(chi * phi2(p, xj), 0.0);
        }
    }
    Ok(f)
}
