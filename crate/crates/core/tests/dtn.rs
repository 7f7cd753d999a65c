use eit_core::dtn::{
    boundary_norms, dtn_apply, local_dtn_matrix, mode_eigenvalue, CauchyDataset, DtnMatrix, DtnOperator, NormKind,
};
use eit_core::geometry::{build_mesh, GammaArc, Obstacle, ObstacleBc, Scenario};
use eit_core::io::{from_json, to_json};
use eit_core::oracle::{annulus_mode, two_layer_mode, HoleBc};
use eit_core::{Complex64, Error};

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn annulus(bc: ObstacleBc, arc: GammaArc) -> Scenario {
    Scenario::homogeneous_disk(1.0, 1.0, arc).with_obstacle(Obstacle { center: [0.0, 0.0], radius: 0.5 }, bc)
}

#[test]
fn modes_match_oracles_on_full_circle() {
    let cases: Vec<(Scenario, Box<dyn Fn(u32) -> f64>)> = vec![
        (
            annulus(ObstacleBc::SoundSoft, GammaArc::full()),
            Box::new(|n| annulus_mode(n, 0.5, HoleBc::SoundSoft, 1.0).unwrap().kappa),
        ),
        (
            annulus(ObstacleBc::neumann(), GammaArc::full()),
            Box::new(|n| annulus_mode(n, 0.5, HoleBc::Neumann, 1.0).unwrap().kappa),
        ),
        (
            Scenario::layered_disk(1.0, &[0.6], &[2.0, 1.0], GammaArc::full()),
            Box::new(|n| two_layer_mode(n, 0.6, 2.0, 1.0).unwrap()),
        ),
    ];
    for (s, oracle) in cases {
        let m = build_mesh(&s, 0.05).unwrap();
        let dtn = local_dtn_matrix(&s, &m).unwrap();
        for n in 1..=4 {
            let got = mode_eigenvalue(&m, &dtn, n as i32).re;
            let want = oracle(n);
            assert!((got - want).abs() <= 0.03 * want, "n = {n}: {got} vs {want}");
        }
    }
}

#[test]
fn matrix_is_symmetric_and_monotone_in_conductivity() {
    let arc = GammaArc { start: -1.0, end: 1.0 };
    let low = Scenario::layered_disk(1.0, &[0.6], &[1.0, 1.0 + 1e-3], arc);
    let high = low.clone().with_conductivity(1, 2.0);
    let m = build_mesh(&high, 0.1).unwrap();
    let (a, b) = (local_dtn_matrix(&low, &m).unwrap(), local_dtn_matrix(&high, &m).unwrap());
    assert!(a.symmetry_defect() < 1e-12 && b.symmetry_defect() < 1e-12);
    for k in 0..5 {
        let f: Vec<Complex64> = (0..a.dim()).map(|i| c(((i * (k + 2)) as f64 * 0.37).sin())).collect();
        let q = |d: &DtnMatrix| d.apply(&f).iter().zip(&f).map(|(x, y)| x * y).sum::<Complex64>().re;
        assert!(q(&b) > q(&a) && q(&a) > 0.0);
    }
}

#[test]
fn sound_soft_hole_raises_the_form() {
    let arc = GammaArc { start: -1.0, end: 1.0 };
    let soft = annulus(ObstacleBc::SoundSoft, arc);
    let neumann = annulus(ObstacleBc::neumann(), arc);
    let m = build_mesh(&soft, 0.1).unwrap();
    let (a, b) = (local_dtn_matrix(&soft, &m).unwrap(), local_dtn_matrix(&neumann, &m).unwrap());
    let f: Vec<Complex64> = (0..a.dim()).map(|_| c(1.0)).collect();
    let q = |d: &DtnMatrix| d.apply(&f).iter().zip(&f).map(|(x, y)| x * y).sum::<Complex64>().re;
    assert!(q(&a) > q(&b));
}

#[test]
fn data_must_live_on_gamma() {
    let s = annulus(ObstacleBc::SoundSoft, GammaArc { start: -0.5, end: 0.5 });
    let m = build_mesh(&s, 0.1).unwrap();
    let mut f = vec![c(0.0); m.n_vertices()];
    let off = m.outer_boundary_vertices().into_iter().find(|&v| m.vertices[v][0] < 0.0).unwrap();
    f[off] = c(1.0);
    assert!(matches!(dtn_apply(&s, &m, &f), Err(Error::DataOutsideGamma { .. })));
}

#[test]
fn matrix_columns_are_d_n_images_of_hats() {
    let s = annulus(ObstacleBc::SoundSoft, GammaArc { start: -1.0, end: 1.0 });
    let m = build_mesh(&s, 0.1).unwrap();
    let op = DtnOperator::new(&s, &m).unwrap();
    let dtn = op.matrix(&s, &m).unwrap();
    let j = dtn.dim() / 2;
    let mut e = vec![c(0.0); dtn.dim()];
    e[j] = c(1.0);
    let col = op.apply(&op.extend(&e)).unwrap();
    for i in 0..dtn.dim() {
        assert!((col[i] - dtn.matrix.data[i * dtn.dim() + j]).norm() < 1e-14);
    }
}

#[test]
fn serialized_datasets_reload_equal() {
    let s = annulus(ObstacleBc::Impedance { lambda: c(0.5) }, GammaArc { start: -1.0, end: 1.0 });
    let m = build_mesh(&s, 0.1).unwrap();
    let dtn = local_dtn_matrix(&s, &m).unwrap();
    let back: DtnMatrix = from_json(&to_json(&dtn).unwrap()).unwrap();
    assert_eq!(back, dtn);
    let n = dtn.dim();
    let traces: Vec<Vec<Complex64>> = (0..3).map(|k| (0..n).map(|i| c((i + k) as f64 / n as f64)).collect()).collect();
    let data = CauchyDataset::generate(&s, &m, &traces).unwrap();
    let back: CauchyDataset = from_json(&to_json(&data).unwrap()).unwrap();
    assert_eq!(back, data);
    let stored = back.lookup(&traces[1]).unwrap();
    for (a, b) in stored.iter().zip(dtn.apply(&traces[1])) {
        assert!((a - b).norm() < 1e-10);
    }
}

#[test]
fn boundary_norm_surrogates_scale_linearly() {
    let s = Scenario::homogeneous_disk(1.0, 1.0, GammaArc::full());
    let m = build_mesh(&s, 0.1).unwrap();
    let g: Vec<Complex64> = m.vertices.iter().map(|p| c(p[0] * p[1] + 0.3)).collect();
    let g3: Vec<Complex64> = g.iter().map(|v| v * 3.0).collect();
    for kind in [NormKind::HalfTrace, NormKind::MinusHalfFlux] {
        let a = boundary_norms(&g, &m, kind).unwrap();
        let b = boundary_norms(&g3, &m, kind).unwrap();
        assert!(a > 0.0 && (b - 3.0 * a).abs() < 1e-10 * b);
    }
}
