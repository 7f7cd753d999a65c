//! Structured polar (disk) and tensor (rectangle) mesh generation.
//!
//! Disk meshes are built from concentric vertex rings. Every ring carries a vertex at each
//! radial-interface angle (and at angle 0), circular interfaces and the obstacle boundary are
//! rings themselves, and consecutive rings are stitched segment by segment. Triangles therefore
//! never straddle an interface. The outer ring depends only on the radius, `h`, the
//! measurement-arc endpoints and the radial-interface angles, so two scenarios with the same
//! outer data share boundary vertices exactly.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::mesh::{triangle_area, BoundaryEdge, Circle, EdgeTag, Mesh};
use crate::geometry::scenario::{polar_angle, sort_dedup, sort_dedup_angles, Axis, DomainShape, Scenario};
use crate::Point;

/// Extra alignment constraints, used to give two scenarios a common mesh.
#[derive(Debug, Clone, Default)]
pub struct MeshExtras {
    pub radii: Vec<f64>,
    pub angles: Vec<f64>,
    pub x_breaks: Vec<f64>,
    pub y_breaks: Vec<f64>,
}

impl MeshExtras {
    /// Interfaces of `other`, so that a mesh of one scenario also aligns with the other.
    pub fn from_scenario(other: &Scenario) -> Self {
        MeshExtras {
            radii: other.radial_breaks(),
            angles: other.angular_breaks(),
            x_breaks: other.slab_breaks(Axis::X),
            y_breaks: other.slab_breaks(Axis::Y),
        }
    }
}

pub fn build_mesh(scenario: &Scenario, h: f64) -> Result<Mesh> {
    build_mesh_with(scenario, h, &MeshExtras::default())
}

pub fn build_mesh_with(scenario: &Scenario, h: f64, extras: &MeshExtras) -> Result<Mesh> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("mesh size must be positive, got {h}")));
    }
    scenario.validate()?;
    let mesh = match scenario.domain {
        DomainShape::Disk { radius } => build_disk(scenario, radius, h, extras)?,
        DomainShape::Rectangle { x_min, x_max, y_min, y_max } => {
            build_rectangle(scenario, [x_min, x_max, y_min, y_max], h, extras)?
        }
    };
    mesh.check_invariants()?;
    Ok(mesh)
}

/// A mesh of the same outer domain and measurement arc without obstacle or interfaces.
/// Its outer-boundary vertices coincide with those of any mesh built from `scenario` at `h`.
pub fn reference_mesh(scenario: &Scenario, h: f64) -> Result<Mesh> {
    let mut plain = scenario.clone();
    plain.obstacle = None;
    let angles = scenario.angular_breaks();
    plain.regions = match scenario.domain {
        DomainShape::Disk { radius } => vec![crate::geometry::RegionSpec {
            shape: crate::geometry::RegionShape::Band { r_in: 0.0, r_out: radius },
            conductivity: 1.0,
        }],
        DomainShape::Rectangle { x_min, x_max, .. } => vec![crate::geometry::RegionSpec {
            shape: crate::geometry::RegionShape::Slab { axis: Axis::X, lo: x_min, hi: x_max },
            conductivity: 1.0,
        }],
    };
    plain.ellipticity = None;
    let extras = MeshExtras {
        angles,
        x_breaks: scenario.slab_breaks(Axis::X),
        y_breaks: scenario.slab_breaks(Axis::Y),
        ..Default::default()
    };
    build_mesh_with(&plain, h, &extras)
}

/// Ring spacing relative to `h`; the stitched diagonals stay below `h` with this factor.
const DISK_SPACING: f64 = 0.6;

struct Ring {
    radius: f64,
    /// (angle in [0, 2pi), vertex id), sorted by angle, first entry at angle 0.
    nodes: Vec<(f64, usize)>,
}

fn build_disk(s: &Scenario, radius: f64, h: f64, extras: &MeshExtras) -> Result<Mesh> {
    let spacing = h * DISK_SPACING;
    let inner = match &s.obstacle {
        Some(ob) => {
            if ob.center[0].hypot(ob.center[1]) > 1e-12 {
                return Err(Error::UnmeshableGeometry(
                    "the polar mesher supports only obstacles concentric with the disk".into(),
                ));
            }
            ob.radius
        }
        None => 0.0,
    };

    let mut breaks = s.radial_breaks();
    breaks.extend(extras.radii.iter().copied().filter(|&r| r > inner + 1e-12 && r < radius - 1e-12));
    breaks.push(inner);
    breaks.push(radius);
    sort_dedup(&mut breaks);

    let mut angles = s.angular_breaks();
    angles.extend(extras.angles.iter().copied());
    angles.push(0.0);
    sort_dedup_angles(&mut angles);

    if s.obstacle.is_some() {
        // The first band outside the obstacle must belong to a single region.
        let rm = 0.5 * (breaks[0] + breaks[1]);
        let mut owner = None;
        for k in 0..angles.len() {
            let a1 = if k + 1 < angles.len() { angles[k + 1] } else { TAU };
            let tm = 0.5 * (angles[k] + a1);
            let reg = s.region_at([rm * tm.cos(), rm * tm.sin()]);
            match (owner, reg) {
                (None, r) => owner = Some(r),
                (Some(o), r) if o != r => {
                    return Err(Error::DegenerateGeometry(
                        "obstacle boundary touches a region interface".into(),
                    ))
                }
                _ => {}
            }
        }
    }

    let mut ring_radii = Vec::new();
    for w in breaks.windows(2) {
        let n = ((w[1] - w[0]) / spacing).ceil().max(1.0) as usize;
        for k in 0..n {
            ring_radii.push(w[0] + (w[1] - w[0]) * k as f64 / n as f64);
        }
    }
    ring_radii.push(radius);

    let gamma = s.gamma_arc;
    let mut outer_angles = angles.clone();
    if !gamma.is_full() {
        outer_angles.push(gamma.start);
        outer_angles.push(gamma.end);
        sort_dedup_angles(&mut outer_angles);
    }

    let mut vertices: Vec<Point> = Vec::new();
    let mut rings = Vec::with_capacity(ring_radii.len());
    for (i, &r) in ring_radii.iter().enumerate() {
        if r == 0.0 {
            vertices.push([0.0, 0.0]);
            rings.push(Ring { radius: 0.0, nodes: vec![(0.0, 0)] });
            continue;
        }
        let is_outer = i + 1 == ring_radii.len();
        let brk = if is_outer { &outer_angles } else { &angles };
        let mut nodes = Vec::new();
        for k in 0..brk.len() {
            let a0 = brk[k];
            let a1 = if k + 1 < brk.len() { brk[k + 1] } else { TAU };
            let len = a1 - a0;
            let mut count = ((r * len / spacing).ceil()).max((6.0 * len / TAU).ceil()).max(1.0) as usize;
            if is_outer && !gamma.is_full() && gamma.contains_angle(0.5 * (a0 + a1)) {
                count = count.max((4.0 * len / gamma.length()).ceil() as usize);
            }
            for m in 0..count {
                let t = a0 + len * m as f64 / count as f64;
                nodes.push((t, vertices.len()));
                vertices.push([r * t.cos(), r * t.sin()]);
            }
        }
        rings.push(Ring { radius: r, nodes });
    }

    let mut triangles = Vec::new();
    let mut regions = Vec::new();
    let mut push_tri = |tri: [usize; 3], rm: f64, vertices: &Vec<Point>| -> Result<()> {
        let [a, b, c] = tri.map(|v| vertices[v]);
        let tri = if triangle_area(a, b, c) < 0.0 { [tri[0], tri[2], tri[1]] } else { tri };
        let centroid = [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0];
        let t = polar_angle(centroid, [0.0, 0.0]);
        let tag = s.region_at([rm * t.cos(), rm * t.sin()]).ok_or_else(|| {
            Error::UnmeshableGeometry(format!("no region at radius {rm:.4}, angle {t:.4}"))
        })?;
        triangles.push(tri);
        regions.push(tag);
        Ok(())
    };

    for pair in rings.windows(2) {
        let (ri, ro) = (&pair[0], &pair[1]);
        let rm = 0.5 * (ri.radius + ro.radius);
        if ri.radius == 0.0 {
            let n = ro.nodes.len();
            for k in 0..n {
                push_tri([0, ro.nodes[k].1, ro.nodes[(k + 1) % n].1], rm, &vertices)?;
            }
            continue;
        }
        for k in 0..angles.len() {
            let a0 = angles[k];
            let a1 = if k + 1 < angles.len() { angles[k + 1] } else { TAU };
            let seg_in = segment(ri, a0, a1);
            let seg_out = segment(ro, a0, a1);
            let (p, q) = (seg_in.len() - 1, seg_out.len() - 1);
            let frac = |v: f64| (v - a0) / (a1 - a0);
            let (mut i, mut j) = (0, 0);
            while i < p || j < q {
                if j == q || (i < p && frac(seg_in[i + 1].0) <= frac(seg_out[j + 1].0)) {
                    push_tri([seg_in[i].1, seg_out[j].1, seg_in[i + 1].1], rm, &vertices)?;
                    i += 1;
                } else {
                    push_tri([seg_in[i].1, seg_out[j].1, seg_out[j + 1].1], rm, &vertices)?;
                    j += 1;
                }
            }
        }
    }

    let mut boundary_edges = Vec::new();
    let outer = rings.last().expect("at least one ring");
    let n = outer.nodes.len();
    for k in 0..n {
        let (t0, a) = outer.nodes[k];
        let (t1, b) = outer.nodes[(k + 1) % n];
        let t1 = if k + 1 == n { TAU } else { t1 };
        let tag = if gamma.contains_angle(0.5 * (t0 + t1)) { EdgeTag::GammaArc } else { EdgeTag::OuterRest };
        boundary_edges.push(BoundaryEdge { v: [a, b], tag });
    }
    if s.obstacle.is_some() {
        let ring = &rings[0];
        let n = ring.nodes.len();
        for k in 0..n {
            let a = ring.nodes[k].1;
            let b = ring.nodes[(k + 1) % n].1;
            boundary_edges.push(BoundaryEdge { v: [b, a], tag: EdgeTag::ObstacleBoundary });
        }
    }

    let circles = breaks
        .iter()
        .filter(|&&r| r > 0.0)
        .map(|&r| Circle { center: [0.0, 0.0], radius: r })
        .collect();
    let mut mesh = Mesh { vertices, triangles, regions, boundary_edges, circles, h: 0.0 };
    mesh.recompute_h();
    Ok(mesh)
}

/// Ring nodes with angle in `[a0, a1]`, the endpoint at `a1 = 2pi` wrapping to the first node.
fn segment(ring: &Ring, a0: f64, a1: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> =
        ring.nodes.iter().copied().filter(|&(t, _)| t >= a0 - 1e-12 && t < a1 - 1e-12).collect();
    let end = ring
        .nodes
        .iter()
        .copied()
        .find(|&(t, _)| (t - a1).abs() < 1e-12)
        .or_else(|| (a1 >= TAU - 1e-12).then(|| (TAU, ring.nodes[0].1)))
        .expect("segment endpoints are ring nodes");
    out.push((a1, end.1));
    out
}

fn axis_nodes(lo: f64, hi: f64, interior: Vec<f64>, spacing: f64) -> Vec<f64> {
    let mut brk = interior;
    brk.push(lo);
    brk.push(hi);
    sort_dedup(&mut brk);
    let mut out = Vec::new();
    for w in brk.windows(2) {
        let n = ((w[1] - w[0]) / spacing).ceil().max(1.0) as usize;
        for k in 0..n {
            out.push(w[0] + (w[1] - w[0]) * k as f64 / n as f64);
        }
    }
    out.push(hi);
    out
}

fn build_rectangle(s: &Scenario, [x_min, x_max, y_min, y_max]: [f64; 4], h: f64, extras: &MeshExtras) -> Result<Mesh> {
    if s.obstacle.is_some() {
        return Err(Error::UnmeshableGeometry("the tensor mesher does not support obstacles".into()));
    }
    let spacing = h / std::f64::consts::SQRT_2;
    let inside = |v: &f64, lo: f64, hi: f64| *v > lo + 1e-12 && *v < hi - 1e-12;
    let mut xb = s.slab_breaks(Axis::X);
    xb.extend(extras.x_breaks.iter().copied().filter(|v| inside(v, x_min, x_max)));
    let mut yb = s.slab_breaks(Axis::Y);
    yb.extend(extras.y_breaks.iter().copied().filter(|v| inside(v, y_min, y_max)));
    let xs = axis_nodes(x_min, x_max, xb, spacing);
    let ys = axis_nodes(y_min, y_max, yb, spacing);
    let (nx, ny) = (xs.len(), ys.len());
    let id = |i: usize, j: usize| j * nx + i;
    let mut vertices = Vec::with_capacity(nx * ny);
    for &y in &ys {
        for &x in &xs {
            vertices.push([x, y]);
        }
    }
    let mut triangles = Vec::new();
    let mut regions = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let c = [0.5 * (xs[i] + xs[i + 1]), 0.5 * (ys[j] + ys[j + 1])];
            let tag = s
                .region_at(c)
                .ok_or_else(|| Error::UnmeshableGeometry(format!("no region at ({:.4}, {:.4})", c[0], c[1])))?;
            let (a, b, cc, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            if (i + j) % 2 == 0 {
                triangles.extend([[a, b, cc], [a, cc, d]]);
            } else {
                triangles.extend([[a, b, d], [b, cc, d]]);
            }
            regions.extend([tag, tag]);
        }
    }
    let mut loop_ids = Vec::new();
    loop_ids.extend((0..nx).map(|i| id(i, 0)));
    loop_ids.extend((1..ny).map(|j| id(nx - 1, j)));
    loop_ids.extend((0..nx - 1).rev().map(|i| id(i, ny - 1)));
    loop_ids.extend((1..ny - 1).rev().map(|j| id(0, j)));
    let center = s.domain.center();
    let gamma = s.gamma_arc;
    let mut boundary_edges = Vec::new();
    for k in 0..loop_ids.len() {
        let (a, b) = (loop_ids[k], loop_ids[(k + 1) % loop_ids.len()]);
        let m = [0.5 * (vertices[a][0] + vertices[b][0]), 0.5 * (vertices[a][1] + vertices[b][1])];
        let tag = if gamma.contains_angle(polar_angle(m, center)) { EdgeTag::GammaArc } else { EdgeTag::OuterRest };
        boundary_edges.push(BoundaryEdge { v: [a, b], tag });
    }
    if boundary_edges.iter().filter(|e| e.tag == EdgeTag::GammaArc).count() < 4 {
        return Err(Error::UnmeshableGeometry("measurement arc resolves to fewer than 4 boundary edges".into()));
    }
    let mut mesh = Mesh { vertices, triangles, regions, boundary_edges, circles: Vec::new(), h: 0.0 };
    mesh.recompute_h();
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GammaArc, Obstacle, ObstacleBc, RegionShape, RegionSpec};
    use std::f64::consts::PI;

    fn annulus() -> Scenario {
        Scenario::homogeneous_disk(1.0, 1.0, GammaArc { start: -1.0, end: 1.0 })
            .with_obstacle(Obstacle { center: [0.0, 0.0], radius: 0.5 }, ObstacleBc::SoundSoft)
    }

    #[test]
    fn nominal_size_bounded_by_h() {
        let arc = GammaArc { start: -1.2, end: 1.2 };
        let scenarios = [
            Scenario::layered_disk(1.0, &[0.6], &[3.0, 1.0], arc),
            Scenario::layered_disk(1.0, &[0.3, 0.55, 0.8], &[3.0, 1.0, 2.0, 1.0], arc),
            Scenario::homogeneous_disk(1.0, 1.0, GammaArc { start: -0.3, end: 0.5 }),
            annulus(),
        ];
        for s in &scenarios {
            for h in [0.3, 0.2, 0.1, 0.07, 0.05, 0.035, 0.025] {
                let m = build_mesh(s, h).unwrap();
                assert!(m.h <= h, "h = {h}, mesh size {}", m.h);
            }
        }
    }

    #[test]
    fn single_region_disk() {
        let s = Scenario::homogeneous_disk(1.0, 1.0, GammaArc::full());
        let m = build_mesh(&s, 0.2).unwrap();
        assert!(m.regions.iter().all(|&r| r == 0));
        assert!(m.boundary_edges.iter().all(|e| e.tag.is_outer()));
        assert!(m.h <= 0.2 + 1e-12);
    }

    #[test]
    fn annulus_tags() {
        let m = build_mesh(&annulus(), 0.1).unwrap();
        let count = |t| m.boundary_edges.iter().filter(|e| e.tag == t).count();
        assert!(count(EdgeTag::ObstacleBoundary) > 0);
        assert!(count(EdgeTag::GammaArc) >= 4);
        assert!(count(EdgeTag::OuterRest) > 0);
        for e in m.boundary_edges.iter().filter(|e| e.tag == EdgeTag::ObstacleBoundary) {
            for &v in &e.v {
                let p = m.vertices[v];
                assert!((p[0].hypot(p[1]) - 0.5).abs() < 1e-12);
            }
        }
        // Obstacle normals point into the hole.
        let e = m.boundary_edges.iter().find(|e| e.tag == EdgeTag::ObstacleBoundary).unwrap();
        let nrm = m.edge_normal(e);
        let p = m.vertices[e.v[0]];
        assert!(nrm[0] * p[0] + nrm[1] * p[1] < 0.0);
    }

    #[test]
    fn interface_alignment_by_exhaustive_scan() {
        let s = Scenario::layered_disk(1.0, &[0.6], &[2.0, 1.0], GammaArc::full());
        let h = 0.1;
        let m = build_mesh(&s, h).unwrap();
        for t in 0..m.n_triangles() {
            let radii = m.corners(t).map(|p| p[0].hypot(p[1]));
            let inside = radii.iter().all(|&r| r <= 0.6 + 1e-12);
            let outside = radii.iter().all(|&r| r >= 0.6 - h * h);
            assert!(inside || outside, "triangle {t} straddles r = 0.6: {radii:?}");
            let c = m.centroid(t);
            let tag = if c[0].hypot(c[1]) < 0.6 { 0 } else { 1 };
            assert_eq!(m.regions[t], tag);
        }
    }

    #[test]
    fn sector_interfaces_are_edges() {
        let s = Scenario {
            domain: DomainShape::Disk { radius: 1.0 },
            obstacle: None,
            regions: vec![
                RegionSpec { shape: RegionShape::Sector { theta_start: 0.3, theta_end: 2.0, r_in: 0.0, r_out: 1.0 }, conductivity: 2.0 },
                RegionSpec { shape: RegionShape::Sector { theta_start: 2.0, theta_end: 0.3 + TAU, r_in: 0.0, r_out: 1.0 }, conductivity: 1.0 },
            ],
            obstacle_bc: ObstacleBc::SoundSoft,
            gamma_arc: GammaArc::full(),
            ellipticity: None,
        };
        let m = build_mesh(&s, 0.1).unwrap();
        for t in 0..m.n_triangles() {
            let c = m.centroid(t);
            assert_eq!(Some(m.regions[t]), s.region_at(c));
        }
    }

    #[test]
    fn refinement_quadruples_and_projects() {
        let m = build_mesh(&annulus(), 0.2).unwrap();
        let r1 = m.refine();
        assert_eq!(r1.n_triangles(), 4 * m.n_triangles());
        let r2 = r1.refine();
        r2.check_invariants().unwrap();
        for e in &r2.boundary_edges {
            let target = if e.tag == EdgeTag::ObstacleBoundary { 0.5 } else { 1.0 };
            for &v in &e.v {
                let p = r2.vertices[v];
                assert!((p[0].hypot(p[1]) / target - 1.0).abs() < 1e-12);
            }
        }
        assert!(r2.h < 0.55 * r1.h + 1e-3);
    }

    #[test]
    fn area_converges_quadratically() {
        let s = annulus();
        let exact = PI * (1.0 - 0.25);
        let mut m = build_mesh(&s, 0.2).unwrap();
        let mut errs = Vec::new();
        for _ in 0..3 {
            errs.push((m.total_area() - exact).abs());
            m = m.refine();
        }
        for w in errs.windows(2) {
            let rate = (w[0] / w[1]).log2();
            assert!(rate > 1.8, "area error rate {rate}");
        }
    }

    #[test]
    fn gamma_length_matches_arc() {
        let s = annulus();
        let m0 = build_mesh(&s, 0.2).unwrap();
        let m1 = m0.refine();
        let e0 = (m0.tagged_length(EdgeTag::GammaArc) - 2.0).abs();
        let e1 = (m1.tagged_length(EdgeTag::GammaArc) - 2.0).abs();
        assert!(e0 < 0.2 * 0.2 && e1 < e0 / 3.0);
    }

    #[test]
    fn outer_ring_independent_of_interior() {
        let g = GammaArc { start: -0.7, end: 0.7 };
        let a = build_mesh(&Scenario::homogeneous_disk(1.0, 1.0, g), 0.1).unwrap();
        let b = build_mesh(
            &Scenario::layered_disk(1.0, &[0.4], &[3.0, 1.0], g)
                .with_obstacle(Obstacle { center: [0.0, 0.0], radius: 0.2 }, ObstacleBc::neumann()),
            0.1,
        )
        .unwrap();
        let pts = |m: &Mesh| m.outer_boundary_vertices().iter().map(|&v| m.vertices[v]).collect::<Vec<_>>();
        let (pa, pb) = (pts(&a), pts(&b));
        assert_eq!(pa.len(), pb.len());
        let mut pa = pa;
        let mut pb = pb;
        let key = |p: &Point| polar_angle(*p, [0.0, 0.0]);
        pa.sort_by(|x, y| key(x).total_cmp(&key(y)));
        pb.sort_by(|x, y| key(x).total_cmp(&key(y)));
        assert_eq!(pa, pb);
    }

    #[test]
    fn offset_obstacle_is_unmeshable() {
        let s = Scenario::homogeneous_disk(1.0, 1.0, GammaArc::full())
            .with_obstacle(Obstacle { center: [0.2, 0.0], radius: 0.3 }, ObstacleBc::SoundSoft);
        assert!(matches!(build_mesh(&s, 0.1), Err(Error::UnmeshableGeometry(_))));
    }

    #[test]
    fn obstacle_touching_sector_interface_is_degenerate() {
        let s = Scenario {
            domain: DomainShape::Disk { radius: 1.0 },
            obstacle: Some(Obstacle { center: [0.0, 0.0], radius: 0.3 }),
            regions: vec![
                RegionSpec { shape: RegionShape::Sector { theta_start: 0.0, theta_end: PI, r_in: 0.0, r_out: 1.0 }, conductivity: 2.0 },
                RegionSpec { shape: RegionShape::Sector { theta_start: PI, theta_end: TAU, r_in: 0.0, r_out: 1.0 }, conductivity: 1.0 },
            ],
            obstacle_bc: ObstacleBc::SoundSoft,
            gamma_arc: GammaArc::full(),
            ellipticity: None,
        };
        assert!(matches!(build_mesh(&s, 0.1), Err(Error::DegenerateGeometry(_))));
    }

    #[test]
    fn rectangle_with_slabs() {
        let s = Scenario {
            domain: DomainShape::Rectangle { x_min: 0.0, x_max: 2.0, y_min: 0.0, y_max: 1.0 },
            obstacle: None,
            regions: vec![
                RegionSpec { shape: RegionShape::Slab { axis: Axis::X, lo: 0.0, hi: 0.7 }, conductivity: 1.0 },
                RegionSpec { shape: RegionShape::Slab { axis: Axis::X, lo: 0.7, hi: 2.0 }, conductivity: 4.0 },
            ],
            obstacle_bc: ObstacleBc::SoundSoft,
            gamma_arc: GammaArc { start: -0.5, end: 0.5 },
            ellipticity: None,
        };
        let m = build_mesh(&s, 0.1).unwrap();
        assert!((m.total_area() - 2.0).abs() < 1e-12);
        for t in 0..m.n_triangles() {
            let xs = m.corners(t).map(|p| p[0]);
            assert!(xs.iter().all(|&x| x <= 0.7 + 1e-12) || xs.iter().all(|&x| x >= 0.7 - 1e-12));
        }
        assert!(m.boundary_edges.iter().filter(|e| e.tag == EdgeTag::GammaArc).count() >= 4);
    }

    #[test]
    fn nonpositive_h_rejected() {
        let s = Scenario::homogeneous_disk(1.0, 1.0, GammaArc::full());
        assert!(build_mesh(&s, 0.0).is_err());
    }
}
