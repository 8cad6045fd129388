use bocce::functionals::{equi_modulus, pettis_ui_modulus, ui_modulus};
use bocce::gallery;
use bocce::{Functional, SpaceKind};

fn coordinates(upto: u64) -> Vec<Functional> {
    (1..=upto).map(|j| Functional::coordinate(j, SpaceKind::L2)).collect()
}

// e_j* with j = 2^k + 1 + i sees 2^{k/4} on atom i of level k and nothing
// elsewhere, so the tail mass at c is 2^{-3k/4} for the least k with
// 2^{k/4} >= c.
fn scaled_oracle(prefix: u32, c: f64) -> f64 {
    (1..=prefix)
        .filter(|&k| (k as f64 / 4.0).exp2() >= c)
        .map(|k| (-(3.0 * k as f64) / 4.0).exp2())
        .fold(0.0, f64::max)
}

#[test]
fn pettis_ui_ex53_scaled_matches_atom_oracle() {
    let k = 6;
    let s = gallery::gen_ex53_scaled(k).unwrap();
    let thresholds: Vec<f64> = (0..=8).map(|j| (j as f64 / 4.0).exp2()).collect();
    let curve = pettis_ui_modulus(&s, &coordinates(1 << (k + 1)), &thresholds).unwrap();
    for (c, v) in &curve.points {
        let want = scaled_oracle(k, *c);
        assert!((v - want).abs() < 1e-12, "c = {c}: {v} vs {want}");
    }
    for (c, v) in &curve.points {
        if *c <= (k as f64 / 4.0).exp2() {
            assert!(*v > 0.0);
        }
    }
}

#[test]
fn pettis_ui_ex53_vanishes_above_one() {
    let s = gallery::gen_ex53(6).unwrap();
    let curve = pettis_ui_modulus(&s, &coordinates(128), &[0.5, 1.0, 1.5, 4.0]).unwrap();
    let v: Vec<f64> = curve.values().collect();
    assert_eq!(v, vec![0.5, 0.5, 0.0, 0.0]);
}

#[test]
fn ui_and_equi_on_spike() {
    let s = gallery::gen_spike(8).unwrap();
    let ui = ui_modulus(&s, &[1.0, 16.0, 256.0, 512.0]);
    let v: Vec<f64> = ui.values().collect();
    assert_eq!(v, vec![1.0, 1.0, 1.0, 0.0]);
    let eq = equi_modulus(&s, &[0.25, 1.0 / 256.0]);
    assert!(eq.values().all(|v| v == 1.0));
    assert_eq!(eq.tail(), 1.0);
}

#[test]
fn ex34_is_not_uniformly_integrable() {
    let s = gallery::gen_ex34(8).unwrap();
    let ui = ui_modulus(&s, &[2.0, 64.0, 256.0]);
    let v: Vec<f64> = ui.values().collect();
    assert_eq!(v, vec![1.0, 1.0, 1.0]);
}
