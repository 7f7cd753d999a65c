use eit_core::oracle::{annulus_mode, disk_green, two_layer_mode, HoleBc};

fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).filter(|l| !l.trim().is_empty()).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

#[test]
fn mode_values_match_golden_table() {
    let table = rows(include_str!("data/oracle_golden.csv"));
    assert!(table.len() >= 40);
    for r in table {
        let n: u32 = r[1].parse().unwrap();
        let f = |k: usize| r[k].parse::<f64>().unwrap();
        let (r0, gin, gout, kappa) = (f(2), f(3), f(4), f(5));
        let got = match r[0].as_str() {
            "annulus_soundsoft" => annulus_mode(n, r0, HoleBc::SoundSoft, gout).unwrap().kappa,
            "annulus_neumann" => annulus_mode(n, r0, HoleBc::Neumann, gout).unwrap().kappa,
            "two_layer" => two_layer_mode(n, r0, gin, gout).unwrap(),
            other => panic!("unknown case {other}"),
        };
        assert!(close(got, kappa), "{r:?}: {got}");
    }
}

#[test]
fn disk_green_matches_golden_table() {
    for r in rows(include_str!("data/disk_green_golden.csv")) {
        let f = |k: usize| r[k].parse::<f64>().unwrap();
        let got = disk_green([f(0), f(1)], [f(2), f(3)], f(4)).unwrap();
        assert!(close(got, f(5)), "{r:?}: {got}");
    }
}

#[test]
fn quoted_reference_values() {
    assert!((annulus_mode(1, 0.5, HoleBc::SoundSoft, 1.0).unwrap().kappa - 5.0 / 3.0).abs() < 1e-14);
    assert!((two_layer_mode(1, 0.6, 2.0, 1.0).unwrap() - 1.272727).abs() < 1e-6);
    let spot = disk_green([0.0, 0.0], [0.5, 0.0], 1.0).unwrap();
    assert!((spot - 0.110318).abs() < 1e-6);
}
