//! Singular-source probing.
//!
//! Data `f_j` concentrating at `x*` are fed to two scenarios; the Γ flux discrepancy `d_j`
//! stays bounded when the scenarios agree near `x*` and grows with `||f_j||` when they do
//! not. The fitted slope of `d_j` against `||f_j||` is the indicator; a threshold `tau`
//! separates the two cases.

use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coupled::CoupledProblem;
use crate::dtn::{BoundaryNorms, CauchyDataset, DtnMatrix, DtnOperator};
use crate::error::{Error, Result};
use crate::fem::{assemble, h1_norm, l2_norm, Field};
use crate::geometry::{build_mesh, conductivity_field, Mesh, Scenario};
use crate::greens::{green_window_norm, GreenSolver};
use crate::singular::{phi2, singular_dirichlet_data, SingularFamily};
use crate::Point;

type C64 = Complex64;

/// Default classification threshold on the discrepancy slope.
pub const DEFAULT_TAU: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Match,
    Mismatch,
}

/// Per-j sequences of a probe run.
///
/// For boundary probes `data_norms` holds the H^{1/2} surrogate of `f_j`, `window_norms` the
/// H¹ norm of `u_j` on `O_eps`, `away_h1` the H¹ norm off `B_eps(x*)` and `away_l2` the L² norm
/// on the whole mesh. For interface probes the driving norm is the window norm of `G_A(., x_j)`
/// on the half ball, `away_h1` is the H¹ norm of the regular part of `G_A` and `away_l2` the L²
/// norm of `G_A` on the half ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub j_values: Vec<u32>,
    pub data_norms: Vec<f64>,
    pub window_norms: Vec<f64>,
    pub away_h1: Vec<f64>,
    pub away_l2: Vec<f64>,
    pub discrepancies: Vec<f64>,
    pub relative_discrepancies: Vec<f64>,
    pub slope: f64,
    pub tau: f64,
    pub classification: Classification,
}

impl ProbeResult {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("j,data_norm,window,away_h1,away_l2,d_j,relative_d_j\n");
        for k in 0..self.j_values.len() {
            let _ = writeln!(
                s,
                "{},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
                self.j_values[k],
                self.data_norms[k],
                self.window_norms[k],
                self.away_h1[k],
                self.away_l2[k],
                self.discrepancies[k],
                self.relative_discrepancies[k]
            );
        }
        s
    }
}

/// Least-squares slope of `y` against `x`.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

fn classify(slope: f64, tau: f64) -> Classification {
    if slope > tau {
        Classification::Mismatch
    } else {
        Classification::Match
    }
}

/// Per-j quantities that depend only on the first scenario.
struct Driven {
    f: Vec<C64>,
    u: Field,
    flux: Vec<C64>,
}

fn drive(op: &DtnOperator, fam: &SingularFamily, j: u32, mesh: &Mesh) -> Result<Driven> {
    let f = singular_dirichlet_data(fam, j, mesh)?;
    let u = op.solve(&f)?;
    let flux = op.flux_on_gamma(&u);
    Ok(Driven { f, u, flux })
}

/// Runs the boundary probe of `a` against `b`, both meshed by `mesh`.
pub fn run_singular_probe(a: &Scenario, b: &Scenario, mesh: &Mesh, fam: &SingularFamily, tau: f64) -> Result<ProbeResult> {
    let opb = DtnOperator::new(b, mesh)?;
    probe_against(a, mesh, fam, tau, |_, f_full| opb.apply(f_full))
}

fn probe_against(
    a: &Scenario,
    mesh: &Mesh,
    fam: &SingularFamily,
    tau: f64,
    other_flux: impl Fn(&[C64], &[C64]) -> Result<Vec<C64>> + Sync,
) -> Result<ProbeResult> {
    fam.validate(a)?;
    let js = fam.require_resolvable(mesh.h)?;
    let opa = DtnOperator::new(a, mesh)?;
    let norms = BoundaryNorms::new(mesh)?;
    let rows = js
        .par_iter()
        .map(|&j| {
            let d = drive(&opa, fam, j, mesh)?;
            let f_gamma: Vec<C64> = opa.gamma_vertices().iter().map(|&v| d.f[v]).collect();
            let other = other_flux(&f_gamma, &d.f)?;
            let diff: Vec<C64> = d.flux.iter().zip(&other).map(|(x, y)| x - y).collect();
            let dj = norms.minus_half(&opa.extend(&diff))?;
            let own = norms.minus_half(&opa.extend(&d.flux))?;
            let data = norms.half(&d.f)?;
            let window = h1_norm(mesh, &d.u, |p| fam.in_window(p))?;
            let away_h1 = h1_norm(mesh, &d.u, |p| !fam.in_window(p))?;
            let away_l2 = l2_norm(mesh, &d.u, |_| true)?;
            Ok([data, window, away_h1, away_l2, dj, if own > 0.0 { dj / own } else { 0.0 }])
        })
        .collect::<Result<Vec<[f64; 6]>>>()?;
    let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let data_norms = col(0);
    let discrepancies = col(4);
    let slope = fitted_slope(&data_norms, &discrepancies);
    if !slope.is_finite() {
        return Err(Error::SolveFailure { reason: "non-finite discrepancy slope".into() });
    }
    Ok(ProbeResult {
        j_values: js,
        data_norms,
        window_norms: col(1),
        away_h1: col(2),
        away_l2: col(3),
        discrepancies,
        relative_discrepancies: col(5),
        slope,
        tau,
        classification: classify(slope, tau),
    })
}

/// Measured data of the hidden scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum Measured {
    Dtn(DtnMatrix),
    Cauchy(CauchyDataset),
}

impl Measured {
    fn gamma_points(&self) -> &[Point] {
        match self {
            Measured::Dtn(m) => &m.gamma_points,
            Measured::Cauchy(c) => &c.gamma_points,
        }
    }

    fn flux(&self, f_gamma: &[C64]) -> Result<Vec<C64>> {
        match self {
            Measured::Dtn(m) => Ok(m.apply(f_gamma)),
            Measured::Cauchy(c) => c
                .lookup(f_gamma)
                .map(|f| f.to_vec())
                .ok_or_else(|| Error::InvalidInput("no measured pair for this probe trace".into())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryRow {
    pub c: f64,
    pub slope: f64,
    pub discrepancies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Recovery {
    pub c_hat: f64,
    pub region: usize,
    pub table: Vec<RecoveryRow>,
    /// The minimizer sits at an end of a grid with more than one value.
    pub grid_too_coarse: bool,
}

impl Recovery {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("c,slope\n");
        for r in &self.table {
            let _ = writeln!(s, "{},{:.12e}", r.c, r.slope);
        }
        s
    }
}

/// Region of `scenario` adjacent to the boundary at `x*`.
pub fn boundary_region(scenario: &Scenario, fam: &SingularFamily) -> Result<usize> {
    let p = [fam.x_star[0] - 1e-9 * fam.normal[0], fam.x_star[1] - 1e-9 * fam.normal[1]];
    scenario
        .region_at(p)
        .ok_or_else(|| Error::InvalidInput("no region touches the boundary at the probe anchor".into()))
}

/// Scores each trial constant of the boundary-adjacent region by the probe slope against the
/// measured data and returns the minimizer (smallest `c` on ties).
pub fn recover_boundary_constant(
    measured: &Measured,
    template: &Scenario,
    grid: &[f64],
    fam: &SingularFamily,
    h: f64,
) -> Result<Recovery> {
    if grid.is_empty() || grid.iter().any(|&c| !(c > 0.0 && c.is_finite())) {
        return Err(Error::InvalidInput("grid must hold positive conductivities".into()));
    }
    let mesh = build_mesh(template, h)?;
    let region = boundary_region(template, fam)?;
    let op = DtnOperator::new(template, &mesh)?;
    let here: Vec<Point> = op.gamma_vertices().iter().map(|&v| mesh.vertices[v]).collect();
    let there = measured.gamma_points();
    if here.len() != there.len()
        || here.iter().zip(there).any(|(p, q)| (p[0] - q[0]).hypot(p[1] - q[1]) > 1e-10)
    {
        return Err(Error::InvalidInput("measured data live on a different measurement-arc discretization".into()));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut table = Vec::with_capacity(sorted.len());
    for &c in &sorted {
        let trial = template.clone().with_conductivity(region, c);
        let res = probe_against(&trial, &mesh, fam, 0.0, |f_gamma, _| measured.flux(f_gamma))?;
        table.push(RecoveryRow { c, slope: res.slope, discrepancies: res.discrepancies });
    }
    let mut best = 0;
    for k in 1..table.len() {
        if table[k].slope < table[best].slope {
            best = k;
        }
    }
    Ok(Recovery {
        c_hat: table[best].c,
        region,
        grid_too_coarse: table.len() > 1 && (best == 0 || best == table.len() - 1),
        table,
    })
}

/// Coupled problem of the local comparison argument on the window: `a1 = gamma_A`,
/// `a2 = gamma_B`, `b1 = 2`, `b2 = 1`, `rho1 = -2 u_A`, `rho2 = -u_B`, trace jump `u_A - u_B`
/// and flux jump given by the window-local weak fluxes of `u_A` and `u_B`. The discrete pair
/// `(u_A, u_B)` solves it exactly.
pub fn build_local_coupled(
    a: &Scenario,
    b: &Scenario,
    mesh: &Mesh,
    window: impl Fn(Point) -> bool,
    ua: &Field,
    ub: &Field,
) -> Result<CoupledProblem> {
    let (sub, parent) = mesh.submesh(window)?;
    let ga = conductivity_field(a, &sub)?;
    let gb = conductivity_field(b, &sub)?;
    let constant = |g: &[f64]| g.iter().all(|&v| v == g[0]);
    if !constant(&ga) || !constant(&gb) {
        return Err(Error::WindowCrossesInterface);
    }
    if sub.boundary_edges.iter().any(|e| e.tag == crate::geometry::EdgeTag::ObstacleBoundary) {
        return Err(Error::WindowCrossesInterface);
    }
    let local = |u: &Field| Field { values: parent.iter().map(|&v| u.values[v]).collect() };
    let (la, lb) = (local(ua), local(ub));
    let mut p = CoupledProblem::homogeneous(sub.clone(), ga.clone(), gb.clone(), 2.0, 1.0);
    p.rho1 = la.scaled(C64::new(-2.0, 0.0));
    p.rho2 = lb.scaled(C64::new(-1.0, 0.0));
    let ka = assemble(&sub, &ga, 0.0, None, &[])?;
    let kb = assemble(&sub, &gb, 0.0, None, &[])?;
    for v in sub.all_boundary_vertices() {
        p.f1[v] = la.values[v] - lb.values[v];
        p.f2[v] = ka.matrix.row_dot(v, &la.values) - kb.matrix.row_dot(v, &lb.values);
    }
    Ok(p)
}

/// Interface probe at `p` with sources `x_j = p + nu_p / j` and the half-ball window
/// `A' = {|x - p| < eps, (x - p) . nu_p < 0}` on the far side.
#[allow(clippy::too_many_arguments)]
pub fn probe_interface_point(
    a: &Scenario,
    b: &Scenario,
    mesh: &Mesh,
    p: Point,
    nu_p: Point,
    j_values: &[u32],
    eps: f64,
    tau: f64,
) -> Result<ProbeResult> {
    let len = nu_p[0].hypot(nu_p[1]);
    if !(len > 0.0 && eps > 0.0) {
        return Err(Error::InvalidInput("direction must be nonzero and the window radius positive".into()));
    }
    let nu = [nu_p[0] / len, nu_p[1] / len];
    let sep = 3.0 * mesh.h;
    let js: Vec<u32> = j_values.iter().copied().filter(|&j| j > 0 && 1.0 / j as f64 >= sep).collect();
    if js.len() < 4 {
        return Err(Error::InsufficientRange { resolvable: js.len() });
    }
    let in_half_ball = move |x: Point| {
        let d = [x[0] - p[0], x[1] - p[1]];
        d[0].hypot(d[1]) < eps && d[0] * nu[0] + d[1] * nu[1] < 0.0
    };
    let sa = GreenSolver::new(a, mesh)?;
    let sb = GreenSolver::new(b, mesh)?;
    let rows = js
        .par_iter()
        .map(|&j| {
            let y = [p[0] + nu[0] / j as f64, p[1] + nu[1] / j as f64];
            let ga = sa.green(y)?;
            let gb = sb.green(y)?;
            let window = green_window_norm(mesh, &ga, in_half_ball)?;
            let mut worst = 0.0f64;
            let mut scale = 0.0f64;
            for (v, &x) in mesh.vertices.iter().enumerate() {
                if !in_half_ball(x) {
                    continue;
                }
                let s = phi2(x, y);
                let va = ga.w.values[v] + s / ga.c;
                let vb = gb.w.values[v] + s / gb.c;
                worst = worst.max((va - vb).norm());
                scale = scale.max(va.norm());
            }
            let nodal = ga.nodal(mesh)?;
            let l2 = l2_norm(mesh, &nodal, in_half_ball)?;
            let regular = h1_norm(mesh, &ga.w, |_| true)?;
            Ok([window, regular, l2, worst, if scale > 0.0 { worst / scale } else { 0.0 }])
        })
        .collect::<Result<Vec<[f64; 5]>>>()?;
    let col = |k: usize| rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let window_norms = col(0);
    let discrepancies = col(3);
    let slope = fitted_slope(&window_norms, &discrepancies);
    Ok(ProbeResult {
        j_values: js,
        data_norms: window_norms.clone(),
        window_norms,
        away_h1: col(1),
        away_l2: col(2),
        discrepancies,
        relative_discrepancies: col(4),
        slope,
        tau,
        classification: classify(slope, tau),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y = [3.0, 5.0, 7.0, 9.0];
        assert!((fitted_slope(&x, &y) - 2.0).abs() < 1e-14);
        assert_eq!(fitted_slope(&[1.0, 1.0], &[2.0, 3.0]), 0.0);
    }
}
