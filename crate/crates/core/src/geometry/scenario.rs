use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::Point;

const GEOM_TOL: f64 = 1e-12;

/// Outer domain. Disks are centred at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainShape {
    Disk { radius: f64 },
    Rectangle { x_min: f64, x_max: f64, y_min: f64, y_max: f64 },
}

impl DomainShape {
    pub fn area(&self) -> f64 {
        match *self {
            DomainShape::Disk { radius } => PI * radius * radius,
            DomainShape::Rectangle { x_min, x_max, y_min, y_max } => (x_max - x_min) * (y_max - y_min),
        }
    }

    pub fn center(&self) -> Point {
        match *self {
            DomainShape::Disk { .. } => [0.0, 0.0],
            DomainShape::Rectangle { x_min, x_max, y_min, y_max } => {
                [0.5 * (x_min + x_max), 0.5 * (y_min + y_max)]
            }
        }
    }

    pub fn contains(&self, p: Point) -> bool {
        match *self {
            DomainShape::Disk { radius } => p[0].hypot(p[1]) < radius,
            DomainShape::Rectangle { x_min, x_max, y_min, y_max } => {
                p[0] > x_min && p[0] < x_max && p[1] > y_min && p[1] < y_max
            }
        }
    }

    /// Distance from an interior point to the outer boundary.
    pub fn distance_to_boundary(&self, p: Point) -> f64 {
        match *self {
            DomainShape::Disk { radius } => (radius - p[0].hypot(p[1])).abs(),
            DomainShape::Rectangle { x_min, x_max, y_min, y_max } => (p[0] - x_min)
                .abs()
                .min((x_max - p[0]).abs())
                .min((p[1] - y_min).abs())
                .min((y_max - p[1]).abs()),
        }
    }

    /// Boundary point in polar direction `theta` from the centre, and the outward normal there.
    pub fn boundary_point(&self, theta: f64) -> (Point, Point) {
        match *self {
            DomainShape::Disk { radius } => {
                let n = [theta.cos(), theta.sin()];
                ([radius * n[0], radius * n[1]], n)
            }
            DomainShape::Rectangle { x_min, x_max, y_min, y_max } => {
                let c = self.center();
                let d = [theta.cos(), theta.sin()];
                let hx = 0.5 * (x_max - x_min);
                let hy = 0.5 * (y_max - y_min);
                let tx = if d[0].abs() > 0.0 { hx / d[0].abs() } else { f64::INFINITY };
                let ty = if d[1].abs() > 0.0 { hy / d[1].abs() } else { f64::INFINITY };
                let t = tx.min(ty);
                let n = if tx < ty { [d[0].signum(), 0.0] } else { [0.0, d[1].signum()] };
                ([c[0] + t * d[0], c[1] + t * d[1]], n)
            }
        }
    }
}

/// Circular obstacle `D`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Obstacle {
    pub center: Point,
    pub radius: f64,
}

impl Obstacle {
    pub fn contains_closed(&self, p: Point) -> bool {
        (p[0] - self.center[0]).hypot(p[1] - self.center[1]) <= self.radius * (1.0 + GEOM_TOL)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// Region shapes. Membership is half-open in every coordinate (`lo <= t < hi`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionShape {
    /// Annular band `r_in <= |x| < r_out` of a disk domain.
    Band { r_in: f64, r_out: f64 },
    /// Polar cell: angular interval `[theta_start, theta_end)` intersected with a band.
    Sector { theta_start: f64, theta_end: f64, r_in: f64, r_out: f64 },
    /// Slab `lo <= x_axis < hi` of a rectangle domain (a half-plane split when one side is open).
    Slab { axis: Axis, lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub shape: RegionShape,
    pub conductivity: f64,
}

/// Condition on the obstacle boundary.
///
/// `Impedance` imposes `gamma * d_nu u + i*lambda*u = 0` with `nu` pointing into the obstacle;
/// `lambda = 0` is the Neumann condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ObstacleBc {
    SoundSoft,
    Impedance { lambda: Complex64 },
}

impl ObstacleBc {
    pub fn neumann() -> Self {
        ObstacleBc::Impedance { lambda: Complex64::new(0.0, 0.0) }
    }
}

/// Measurement arc, given as a polar angle interval seen from the domain centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaArc {
    pub start: f64,
    pub end: f64,
}

impl GammaArc {
    pub fn full() -> Self {
        GammaArc { start: 0.0, end: TAU }
    }

    pub fn length(&self) -> f64 {
        self.end - self.start
    }

    pub fn is_full(&self) -> bool {
        self.length() >= TAU - 1e-12
    }

    /// Open-arc membership.
    pub fn contains_angle(&self, theta: f64) -> bool {
        if self.is_full() {
            return true;
        }
        let t = (theta - self.start).rem_euclid(TAU);
        t > 1e-12 && t < self.length() - 1e-12
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub domain: DomainShape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstacle: Option<Obstacle>,
    pub regions: Vec<RegionSpec>,
    #[serde(default = "default_bc")]
    pub obstacle_bc: ObstacleBc,
    pub gamma_arc: GammaArc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ellipticity: Option<f64>,
}

fn default_bc() -> ObstacleBc {
    ObstacleBc::SoundSoft
}

pub fn polar_angle(p: Point, center: Point) -> f64 {
    (p[1] - center[1]).atan2(p[0] - center[0]).rem_euclid(TAU)
}

fn angle_in(theta: f64, start: f64, end: f64) -> bool {
    if end - start >= TAU - 1e-12 {
        return true;
    }
    let t = (theta - start).rem_euclid(TAU);
    t < end - start
}

impl RegionShape {
    pub fn contains(&self, p: Point) -> bool {
        match *self {
            RegionShape::Band { r_in, r_out } => {
                let r = p[0].hypot(p[1]);
                r >= r_in && r < r_out
            }
            RegionShape::Sector { theta_start, theta_end, r_in, r_out } => {
                let r = p[0].hypot(p[1]);
                r >= r_in && r < r_out && angle_in(polar_angle(p, [0.0, 0.0]), theta_start, theta_end)
            }
            RegionShape::Slab { axis, lo, hi } => {
                let t = match axis {
                    Axis::X => p[0],
                    Axis::Y => p[1],
                };
                t >= lo && t < hi
            }
        }
    }
}

impl Scenario {
    /// Single-region disk of the given radius.
    pub fn homogeneous_disk(radius: f64, conductivity: f64, gamma_arc: GammaArc) -> Self {
        Scenario {
            domain: DomainShape::Disk { radius },
            obstacle: None,
            regions: vec![RegionSpec {
                shape: RegionShape::Band { r_in: 0.0, r_out: radius },
                conductivity,
            }],
            obstacle_bc: ObstacleBc::SoundSoft,
            gamma_arc,
            ellipticity: None,
        }
    }

    /// Disk split into concentric bands at the given radii; `conductivities` runs inside out.
    pub fn layered_disk(radius: f64, splits: &[f64], conductivities: &[f64], gamma_arc: GammaArc) -> Self {
        let mut edges = vec![0.0];
        edges.extend_from_slice(splits);
        edges.push(radius);
        let regions = edges
            .windows(2)
            .zip(conductivities)
            .map(|(w, &c)| RegionSpec {
                shape: RegionShape::Band { r_in: w[0], r_out: w[1] },
                conductivity: c,
            })
            .collect();
        Scenario {
            domain: DomainShape::Disk { radius },
            obstacle: None,
            regions,
            obstacle_bc: ObstacleBc::SoundSoft,
            gamma_arc,
            ellipticity: None,
        }
    }

    pub fn with_obstacle(mut self, obstacle: Obstacle, bc: ObstacleBc) -> Self {
        self.obstacle = Some(obstacle);
        self.obstacle_bc = bc;
        self
    }

    pub fn with_conductivity(mut self, region: usize, c: f64) -> Self {
        self.regions[region].conductivity = c;
        self
    }

    /// Index of the region containing `p`, or `None` for points inside the obstacle or outside the domain.
    pub fn region_at(&self, p: Point) -> Option<usize> {
        if let Some(ob) = &self.obstacle {
            if ob.contains_closed(p) {
                return None;
            }
        }
        let p = self.clamp_outer(p);
        self.regions.iter().position(|r| r.shape.contains(p))
    }

    // Half-open bands and slabs exclude their upper edge; pull points on the outer boundary inwards.
    fn clamp_outer(&self, p: Point) -> Point {
        match self.domain {
            DomainShape::Disk { radius } => {
                let r = p[0].hypot(p[1]);
                if r >= radius * (1.0 - 1e-12) && r > 0.0 {
                    let s = radius * (1.0 - 1e-12) / r;
                    [p[0] * s, p[1] * s]
                } else {
                    p
                }
            }
            DomainShape::Rectangle { x_max, y_max, .. } => {
                let eps = 1e-12 * (1.0 + x_max.abs().max(y_max.abs()));
                [p[0].min(x_max - eps), p[1].min(y_max - eps)]
            }
        }
    }

    pub fn conductivity_at(&self, p: Point) -> Option<f64> {
        self.region_at(p).map(|i| self.regions[i].conductivity)
    }

    /// Declared ellipticity constant, or the tightest one compatible with the region values.
    pub fn ellipticity_constant(&self) -> f64 {
        self.ellipticity.unwrap_or_else(|| {
            self.regions
                .iter()
                .map(|r| r.conductivity.min(1.0 / r.conductivity))
                .fold(f64::INFINITY, f64::min)
        })
    }

    /// Stable content hash (hex SHA-256 of the canonical JSON form).
    pub fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("scenario serializes");
        let digest = Sha256::digest(&json);
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Radial breakpoints of a disk domain strictly between the inner and outer radius.
    pub(crate) fn radial_breaks(&self) -> Vec<f64> {
        let DomainShape::Disk { radius } = self.domain else {
            return Vec::new();
        };
        let inner = self.obstacle.map(|o| o.radius).unwrap_or(0.0);
        let mut out = Vec::new();
        for r in &self.regions {
            let (a, b) = match r.shape {
                RegionShape::Band { r_in, r_out } | RegionShape::Sector { r_in, r_out, .. } => (r_in, r_out),
                RegionShape::Slab { .. } => continue,
            };
            for v in [a, b] {
                if v > inner + GEOM_TOL && v < radius - GEOM_TOL {
                    out.push(v);
                }
            }
        }
        sort_dedup(&mut out);
        out
    }

    /// Polar angles of radial interfaces (sector edges), normalised to `[0, 2pi)`.
    pub(crate) fn angular_breaks(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for r in &self.regions {
            if let RegionShape::Sector { theta_start, theta_end, .. } = r.shape {
                if theta_end - theta_start < TAU - 1e-12 {
                    out.push(theta_start.rem_euclid(TAU));
                    out.push(theta_end.rem_euclid(TAU));
                }
            }
        }
        sort_dedup_angles(&mut out);
        out
    }

    pub(crate) fn slab_breaks(&self, axis: Axis) -> Vec<f64> {
        let DomainShape::Rectangle { x_min, x_max, y_min, y_max } = self.domain else {
            return Vec::new();
        };
        let (lo_d, hi_d) = match axis {
            Axis::X => (x_min, x_max),
            Axis::Y => (y_min, y_max),
        };
        let mut out = Vec::new();
        for r in &self.regions {
            if let RegionShape::Slab { axis: a, lo, hi } = r.shape {
                if a == axis {
                    for v in [lo, hi] {
                        if v > lo_d + GEOM_TOL && v < hi_d - GEOM_TOL {
                            out.push(v);
                        }
                    }
                }
            }
        }
        sort_dedup(&mut out);
        out
    }

    /// Checks the structural invariants: positive sizes, tiling, contrast across interfaces,
    /// ellipticity bounds, obstacle placement and a nonempty measurement arc.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidScenario(m));
        match self.domain {
            DomainShape::Disk { radius } if !(radius > 0.0 && radius.is_finite()) => {
                return bad(format!("disk radius must be positive, got {radius}"));
            }
            DomainShape::Rectangle { x_min, x_max, y_min, y_max } if !(x_max > x_min && y_max > y_min) => {
                return bad("rectangle has non-positive extent".into());
            }
            _ => {}
        }
        if self.regions.is_empty() {
            return bad("no regions".into());
        }
        for (i, r) in self.regions.iter().enumerate() {
            if !(r.conductivity > 0.0 && r.conductivity.is_finite()) {
                return bad(format!("region {i} has non-positive conductivity {}", r.conductivity));
            }
            let ok = match (&self.domain, &r.shape) {
                (DomainShape::Disk { .. }, RegionShape::Band { r_in, r_out }) => r_out > r_in && *r_in >= 0.0,
                (DomainShape::Disk { .. }, RegionShape::Sector { theta_start, theta_end, r_in, r_out }) => {
                    r_out > r_in && *r_in >= 0.0 && theta_end > theta_start && theta_end - theta_start <= TAU + 1e-12
                }
                (DomainShape::Rectangle { .. }, RegionShape::Slab { lo, hi, .. }) => hi > lo,
                _ => false,
            };
            if !ok {
                return bad(format!("region {i} is empty or does not fit the domain shape"));
            }
        }
        let c0 = self.ellipticity_constant();
        if !(c0 > 0.0 && c0 <= 1.0) {
            return bad(format!("ellipticity constant must lie in (0, 1], got {c0}"));
        }
        for (i, r) in self.regions.iter().enumerate() {
            if r.conductivity < c0 * (1.0 - 1e-12) || r.conductivity > (1.0 + 1e-12) / c0 {
                return bad(format!("region {i} conductivity {} violates ellipticity bound {c0}", r.conductivity));
            }
        }
        if self.gamma_arc.length() <= 0.0 || self.gamma_arc.length() > TAU + 1e-12 {
            return bad("measurement arc must be a nonempty angle interval of length at most 2pi".into());
        }
        if let Some(ob) = &self.obstacle {
            if !(ob.radius > 0.0) {
                return bad("obstacle radius must be positive".into());
            }
            let inside = match self.domain {
                DomainShape::Disk { radius } => ob.center[0].hypot(ob.center[1]) + ob.radius < radius - GEOM_TOL,
                DomainShape::Rectangle { .. } => {
                    let c = ob.center;
                    self.domain.contains(c) && self.domain.distance_to_boundary(c) > ob.radius + GEOM_TOL
                }
            };
            if !inside {
                return bad("obstacle closure must lie inside the domain".into());
            }
        }
        if let ObstacleBc::Impedance { lambda } = self.obstacle_bc {
            if lambda.re < 0.0 {
                return bad(format!("impedance coefficient needs Re(lambda) >= 0, got {lambda}"));
            }
        }
        self.check_tiling()
    }

    // Region boundaries all sit on the breakpoint grid, so one probe per grid cell decides
    // coverage and adjacency exactly.
    fn check_tiling(&self) -> Result<()> {
        let cells = self.grid_cells();
        let mut owner = vec![vec![None; cells[0].len()]; cells.len()];
        for (i, row) in cells.iter().enumerate() {
            for (k, cell) in row.iter().enumerate() {
                let Some(p) = cell else { continue };
                let hits: Vec<usize> = (0..self.regions.len())
                    .filter(|&r| self.regions[r].shape.contains(*p))
                    .collect();
                match hits.len() {
                    1 => owner[i][k] = Some(hits[0]),
                    0 => {
                        return Err(Error::InvalidScenario(format!(
                            "point ({:.4}, {:.4}) is covered by no region",
                            p[0], p[1]
                        )))
                    }
                    _ => {
                        return Err(Error::InvalidScenario(format!(
                            "regions {hits:?} overlap near ({:.4}, {:.4})",
                            p[0], p[1]
                        )))
                    }
                }
            }
        }
        let periodic = matches!(self.domain, DomainShape::Disk { .. });
        let n_i = owner.len();
        let n_k = owner[0].len();
        for i in 0..n_i {
            for k in 0..n_k {
                let Some(a) = owner[i][k] else { continue };
                let mut neighbours = Vec::new();
                if i + 1 < n_i {
                    neighbours.push(owner[i + 1][k]);
                }
                if k + 1 < n_k {
                    neighbours.push(owner[i][k + 1]);
                } else if periodic && n_k > 1 {
                    neighbours.push(owner[i][0]);
                }
                for b in neighbours.into_iter().flatten() {
                    let (ca, cb) = (self.regions[a].conductivity, self.regions[b].conductivity);
                    if a != b && ca == cb {
                        return Err(Error::InvalidScenario(format!(
                            "adjacent regions {a} and {b} share conductivity {ca}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Probe points at the centres of the breakpoint grid cells; `None` for cells inside the obstacle.
    fn grid_cells(&self) -> Vec<Vec<Option<Point>>> {
        match self.domain {
            DomainShape::Disk { radius } => {
                let mut rb = vec![0.0];
                for r in &self.regions {
                    match r.shape {
                        RegionShape::Band { r_in, r_out } | RegionShape::Sector { r_in, r_out, .. } => {
                            rb.push(r_in.min(radius));
                            rb.push(r_out.min(radius));
                        }
                        RegionShape::Slab { .. } => {}
                    }
                }
                if let Some(ob) = &self.obstacle {
                    let d = ob.center[0].hypot(ob.center[1]);
                    rb.push((d - ob.radius).max(0.0));
                    rb.push(d + ob.radius);
                }
                rb.push(radius);
                sort_dedup(&mut rb);
                let mut ab = self.angular_breaks();
                ab.push(0.0);
                sort_dedup_angles(&mut ab);
                let mut rows = Vec::new();
                for w in rb.windows(2) {
                    let rm = 0.5 * (w[0] + w[1]);
                    let mut row = Vec::new();
                    for k in 0..ab.len() {
                        let a0 = ab[k];
                        let a1 = if k + 1 < ab.len() { ab[k + 1] } else { ab[0] + TAU };
                        let tm = 0.5 * (a0 + a1);
                        let p = [rm * tm.cos(), rm * tm.sin()];
                        let hidden = self.obstacle.map(|o| o.contains_closed(p)).unwrap_or(false);
                        row.push(if hidden { None } else { Some(p) });
                    }
                    rows.push(row);
                }
                rows
            }
            DomainShape::Rectangle { x_min, x_max, y_min, y_max } => {
                let mut xb = vec![x_min, x_max];
                xb.extend(self.slab_breaks(Axis::X));
                let mut yb = vec![y_min, y_max];
                yb.extend(self.slab_breaks(Axis::Y));
                sort_dedup(&mut xb);
                sort_dedup(&mut yb);
                let mut rows = Vec::new();
                for wy in yb.windows(2) {
                    let mut row = Vec::new();
                    for wx in xb.windows(2) {
                        let p = [0.5 * (wx[0] + wx[1]), 0.5 * (wy[0] + wy[1])];
                        let hidden = self.obstacle.map(|o| o.contains_closed(p)).unwrap_or(false);
                        row.push(if hidden { None } else { Some(p) });
                    }
                    rows.push(row);
                }
                rows
            }
        }
    }
}

pub(crate) fn sort_dedup(v: &mut Vec<f64>) {
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= GEOM_TOL * (1.0 + b.abs()));
}

pub(crate) fn sort_dedup_angles(v: &mut Vec<f64>) {
    for a in v.iter_mut() {
        *a = a.rem_euclid(TAU);
        if TAU - *a < 1e-12 {
            *a = 0.0;
        }
    }
    sort_dedup(v);
}
