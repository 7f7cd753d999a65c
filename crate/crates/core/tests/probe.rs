use eit_core::coupled::solve_coupled;
use eit_core::dtn::{local_dtn_matrix, DtnOperator};
use eit_core::fem::{h1_norm, Field};
use eit_core::geometry::{build_mesh, GammaArc, Obstacle, ObstacleBc, Scenario};
use eit_core::probe::{
    build_local_coupled, probe_interface_point, recover_boundary_constant, run_singular_probe, Classification, Measured,
    DEFAULT_TAU,
};
use eit_core::singular::SingularFamily;
use eit_core::{Complex64, Error};

fn arc() -> GammaArc {
    GammaArc { start: -1.2, end: 1.2 }
}

#[test]
fn coarse_mesh_cannot_resolve_the_family() {
    let a = Scenario::layered_disk(1.0, &[0.6], &[3.0, 1.0], arc());
    let m = build_mesh(&a, 0.1).unwrap();
    let fam = SingularFamily::new(&a, 0.0, 0.4, 0.1, vec![4, 8, 16, 32]).unwrap();
    assert!(matches!(run_singular_probe(&a, &a, &m, &fam, DEFAULT_TAU), Err(Error::InsufficientRange { .. })));
}

#[test]
fn local_coupled_problem_is_solved_by_the_restricted_fields() {
    let a = Scenario::layered_disk(1.0, &[0.6], &[3.0, 1.0], arc());
    let b = a.clone().with_conductivity(0, 2.0);
    let m = build_mesh(&a, 0.05).unwrap();
    let (opa, opb) = (DtnOperator::new(&a, &m).unwrap(), DtnOperator::new(&b, &m).unwrap());
    let trace: Vec<Complex64> = opa
        .gamma_vertices()
        .iter()
        .map(|&v| {
            let p = m.vertices[v];
            Complex64::new(p[0] + p[1] * p[1], p[1])
        })
        .collect();
    let (ua, ub) = (opa.solve(&opa.extend(&trace)).unwrap(), opb.solve(&opb.extend(&trace)).unwrap());
    let window = |p: [f64; 2]| (p[0] - 0.85).hypot(p[1]) < 0.15;
    let p = build_local_coupled(&a, &b, &m, window, &ua, &ub).unwrap();
    let sol = solve_coupled(&p).unwrap();
    let (sub, parent) = m.submesh(window).unwrap();
    let local = |u: &Field| Field { values: parent.iter().map(|&v| u.values[v]).collect() };
    let (la, lb) = (local(&ua), local(&ub));
    let scale = h1_norm(&sub, &la, |_| true).unwrap();
    assert!(h1_norm(&sub, &sol.u1.sub(&la), |_| true).unwrap() < 1e-9 * scale);
    assert!(h1_norm(&sub, &sol.u2.sub(&lb), |_| true).unwrap() < 1e-9 * scale);

    let crossing = |p: [f64; 2]| (p[0] - 0.6).hypot(p[1]) < 0.15;
    assert!(matches!(build_local_coupled(&a, &b, &m, crossing, &ua, &ub), Err(Error::WindowCrossesInterface)));
}

#[test]
fn recovery_flags_a_grid_that_misses_the_truth() {
    let template = Scenario::homogeneous_disk(1.0, 1.0, arc())
        .with_obstacle(Obstacle { center: [0.0, 0.0], radius: 0.4 }, ObstacleBc::SoundSoft);
    let fam = SingularFamily::new(&template, 0.0, 0.4, 0.1, vec![4, 8, 16, 32]).unwrap();
    let h = 0.025;
    let truth = template.clone().with_conductivity(0, 2.0);
    let m = build_mesh(&truth, h).unwrap();
    let measured = Measured::Dtn(local_dtn_matrix(&truth, &m).unwrap());
    let r = recover_boundary_constant(&measured, &template, &[0.5, 0.75, 1.0], &fam, h).unwrap();
    assert_eq!(r.c_hat, 1.0);
    assert!(r.grid_too_coarse);
    assert!(r.table.windows(2).all(|w| w[1].slope < w[0].slope));
}

#[test]
fn interface_probe_of_identical_scenarios_matches() {
    let a = Scenario::layered_disk(1.0, &[0.6], &[3.0, 1.0], GammaArc::full());
    let m = build_mesh(&a, 0.025).unwrap();
    let res = probe_interface_point(&a, &a, &m, [0.6, 0.0], [1.0, 0.0], &[4, 5, 8, 10], 0.1, DEFAULT_TAU).unwrap();
    assert_eq!(res.j_values, vec![4, 5, 8, 10]);
    assert!(res.discrepancies.iter().all(|&d| d == 0.0));
    assert_eq!(res.classification, Classification::Match);
    let few = probe_interface_point(&a, &a, &m, [0.6, 0.0], [1.0, 0.0], &[40, 50, 60, 70], 0.1, DEFAULT_TAU);
    assert!(matches!(few, Err(Error::InsufficientRange { resolvable: 0 })));
}
