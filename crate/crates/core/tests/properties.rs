use bocce::convergence::{limited_trend, weak_surrogate_trend, TestG};
use bocce::functionals::{equi_modulus, pettis_norm_bounds, pettis_norm_exact, tail_mass, ui_cutoff, ui_modulus};
use bocce::oscillation::{bocce_osc, pettis_bocce_osc};
use bocce::random;
use bocce::tight::{escape, finite_set_witness, tightness_search, CompactSet, TightnessGrid};
use bocce::{DyadicSet, FunctionSequence, SeqVec, SpaceKind, StepFunction};
use proptest::prelude::*;
use rand::Rng;

const KINDS: [SpaceKind; 3] = [SpaceKind::L1, SpaceKind::L2, SpaceKind::Linf];

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-10 * (1.0 + a.abs().max(b.abs()))
}

fn pick_kind(i: usize) -> SpaceKind {
    KINDS[i % 3]
}

fn function(seed: u64, kind: SpaceKind) -> StepFunction {
    let mut r = random::rng(seed);
    let level = r.gen_range(0..=4);
    random::step_function(&mut r, kind, level, 4, 5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn integral_is_linear(s1: u64, s2: u64, s3: u64, k in 0usize..3, a in -4i32..=4, b in -4i32..=4) {
        let kind = pick_kind(k);
        let f = function(s1, kind);
        let g = function(s2, kind);
        let set = random::dyadic_set(&mut random::rng(s3), 3);
        let (a, b) = (a as f64 / 2.0, b as f64 / 2.0);
        let lhs = f.combine(a, &g, b).unwrap().integral(&set);
        let rhs = f.integral(&set).scale(a).add(&g.integral(&set).scale(b));
        prop_assert!(lhs.sub(&rhs).norm(SpaceKind::Linf) < 1e-12);
    }

    #[test]
    fn norms_are_norms(s1: u64, s2: u64, a in -8i32..=8) {
        let x = random::seq_vec(&mut random::rng(s1), 6);
        let y = random::seq_vec(&mut random::rng(s2), 6);
        for kind in KINDS {
            prop_assert!(x.add(&y).norm(kind) <= x.norm(kind) + y.norm(kind) + 1e-12);
            prop_assert!(close(x.scale(a as f64).norm(kind), (a as f64).abs() * x.norm(kind)));
        }
        prop_assert!(x.norm(SpaceKind::Linf) <= x.norm(SpaceKind::L2) + 1e-12);
        prop_assert!(x.norm(SpaceKind::L2) <= x.norm(SpaceKind::L1) + 1e-12);
    }

    #[test]
    fn pairing_is_bounded_by_dual_norm(s1: u64, s2: u64, k in 0usize..3) {
        let kind = pick_kind(k);
        let x = random::seq_vec(&mut random::rng(s1), 5);
        let xs = random::unit_functional(&mut random::rng(s2), kind, 5);
        prop_assert!(xs.pair(&x, kind).unwrap().abs() <= xs.dual_norm() * x.norm(kind) + 1e-12);
    }

    #[test]
    fn conditional_expectation_contracts(s1: u64, s2: u64, k in 0usize..3, blocks in 1usize..6) {
        let f = function(s1, pick_kind(k));
        let pi = random::partition(&mut random::rng(s2), 3, blocks);
        let e = f.cond_expectation(&pi);
        prop_assert!(e.l1_norm() <= f.l1_norm() + 1e-12);
        for b in pi.blocks() {
            prop_assert!(e.integral(b).sub(&f.integral(b)).norm(SpaceKind::Linf) < 1e-12);
        }
    }

    #[test]
    fn truncation_shrinks(s1: u64, k in 0usize..3, n in 0u32..8) {
        let f = function(s1, pick_kind(k));
        let t = f.truncate(n as f64 / 2.0);
        prop_assert!(t.l1_norm() <= f.l1_norm());
        prop_assert!(t.sup_norm() <= n as f64 / 2.0);
        prop_assert_eq!(f.truncate(1e300), f);
    }

    #[test]
    fn pettis_is_a_seminorm_below_bochner(s1: u64, s2: u64, k in 0usize..3, a in -4i32..=4) {
        let kind = pick_kind(k);
        let mut r = random::rng(s1);
        let l1 = r.gen_range(0..=3);
        let f = random::step_function(&mut r, kind, l1, 4, 4);
        let l2 = r.gen_range(0..=3);
        let g = random::step_function(&mut r, kind, l2, 4, 4);
        let p = |h: &StepFunction| pettis_norm_exact(h).unwrap().value;
        prop_assert!(p(&f.add(&g).unwrap()) <= p(&f) + p(&g) + 1e-10);
        prop_assert!(close(p(&f.scale(a as f64)), (a as f64).abs() * p(&f)));
        prop_assert!(p(&f) <= f.l1_norm() + 1e-12);
        let fam: Vec<_> = (0..20).map(|_| random::unit_functional(&mut random::rng(s2), kind, 4)).collect();
        let bounds = pettis_norm_bounds(&f, &fam).unwrap();
        prop_assert!(bounds.lower.unwrap() <= p(&f) + 1e-12);
        prop_assert!(p(&f) <= bounds.upper.unwrap() + 1e-12);
    }

    #[test]
    fn pettis_bocce_is_below_bocce(s1: u64, s2: u64, k in 0usize..3) {
        let f = function(s1, pick_kind(k));
        let set = random::nonempty_dyadic_set(&mut random::rng(s2), 3);
        let pb = pettis_bocce_osc(&f, &set, 12).unwrap();
        prop_assert!(pb <= bocce_osc(&f, &set) + 1e-12);
        prop_assert!(pb >= 0.0);
    }

    #[test]
    fn oscillation_inequalities(s1: u64, s2: u64, s3: u64, k in 0usize..3) {
        let kind = pick_kind(k);
        let f = function(s1, kind);
        let g = function(s2, kind);
        let set = random::dyadic_set(&mut random::rng(s3), 3);
        let osc = |h: &StepFunction| bocce_osc(h, &set);
        let diff = f.sub(&g).unwrap();
        prop_assert!((osc(&f) - osc(&g)).abs() <= osc(&diff) + 1e-12);
        prop_assert!(osc(&f.add(&g).unwrap()) <= osc(&f) + osc(&g) + 1e-12);
        prop_assert!(set.measure().to_f64() * osc(&f) <= 2.0 * f.norm_integral(&set) + 1e-12);
    }

    #[test]
    fn moduli_are_monotone(seed: u64) {
        let s = random::sequence(&mut random::rng(seed), 6);
        let cs: Vec<f64> = (0..8).map(|j| (j as f64).exp2()).collect();
        let ui: Vec<f64> = ui_modulus(&s, &cs).values().collect();
        prop_assert!(ui.windows(2).all(|w| w[1] <= w[0]));
        let ds: Vec<f64> = (0..8).map(|j| (-(j as f64)).exp2()).collect();
        let eq: Vec<f64> = equi_modulus(&s, &ds).values().collect();
        prop_assert!(eq.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }

    #[test]
    fn escape_shrinks_with_larger_balls(s1: u64, k in 0usize..3, r in 0u32..6, d in 0u64..5) {
        let f = function(s1, pick_kind(k));
        let ball = |radius: f64, dimension: u64| CompactSet::ConstantBall { radius, dimension };
        let e = escape(&f, &ball(r as f64, d));
        prop_assert!(escape(&f, &ball(r as f64 + 1.0, d)) <= e);
        prop_assert!(escape(&f, &ball(r as f64, d + 1)) <= e);
        prop_assert!((0.0..=1.0).contains(&e));
    }

    #[test]
    fn single_linear_test_gives_weak_surrogate(s1: u64, s2: u64, k in 0usize..3) {
        let kind = pick_kind(k);
        let seq = random::convergent_sequence(&mut random::rng(s1), kind, 5, 4);
        let mut r = random::rng(s2);
        let level = r.gen_range(0..=3);
        let b = random::step_function(&mut r, kind.dual(), level, 4, 3);
        let limited = limited_trend(&seq, &[TestG::linear(b.clone())]).unwrap();
        let weak = weak_surrogate_trend(&seq, &[b]).unwrap();
        prop_assert_eq!(limited, weak);
    }

    #[test]
    fn truncation_changes_tests_by_tail_mass(s1: u64, s2: u64, k in 0usize..3, n in 0u32..6) {
        let kind = pick_kind(k);
        let f = function(s1, kind);
        let mut r = random::rng(s2);
        let x = random::unit_functional(&mut r, kind, 4);
        let set = random::dyadic_set(&mut r, 2);
        let b = random::step_function(&mut r, kind.dual(), 2, 4, 3);
        let mut g = TestG::abs_term(x, set);
        g.linear.push(b);
        let g = g.with_norm(4);
        let n = n as f64 / 2.0;
        let gap = (g.integrate(&f).unwrap() - g.integrate(&f.truncate(n)).unwrap()).abs();
        prop_assert!(gap <= g.bound() * tail_mass(&f, n) + 1e-12);
        prop_assert_eq!(g.eval(kind, g.level(), 0, &SeqVec::zero()), 0.0);
    }

    // On a bounded prefix with a tightness witness K, the average over B
    // differs from the average of the part inside K by at most
    // (c ε + tail mass at c) / µ(B), and the latter lies in K's ball.
    #[test]
    fn averages_of_tight_ui_prefixes_are_localized(s1: u64, s2: u64, k in 0usize..3) {
        let kind = pick_kind(k);
        let seq = random::convergent_sequence(&mut random::rng(s1), kind, 6, 4);
        let b = random::nonempty_dyadic_set(&mut random::rng(s2), 2);
        let c = ui_cutoff(seq.len());
        for outcome in tightness_search(&seq, &TightnessGrid::default()) {
            let w = outcome.witness().expect("bounded prefixes are tight");
            let CompactSet::ConstantBall { radius, dimension } = w.set else { unreachable!() };
            for f in seq.members() {
                let inside = StepFunction::new(
                    f.level(),
                    kind,
                    f.values().iter().map(|v| if w.set.contains(v, kind) { v.clone() } else { SeqVec::zero() }).collect(),
                ).unwrap();
                let m_in = inside.average(&b);
                prop_assert!(m_in.norm(kind) <= radius + 1e-12);
                prop_assert!(m_in.max_index().map_or(true, |m| m <= dimension));
                let gap = f.average(&b).sub(&m_in).norm(kind);
                let bound = (c * w.eps + tail_mass(f, c)) / b.measure().to_f64();
                prop_assert!(gap <= bound + 1e-12);
            }
        }
    }

    // Convergence in measure yields finite-set tightness at every ε.
    #[test]
    fn convergent_prefixes_have_finite_witnesses(s1: u64, k in 0usize..3) {
        let seq = random::convergent_sequence(&mut random::rng(s1), pick_kind(k), 8, 4);
        for j in 1..=6 {
            let eps = (-(j as f64)).exp2();
            let (_, w) = finite_set_witness(&seq, eps).unwrap();
            prop_assert!(w.max_escape() <= eps);
        }
    }

    #[test]
    fn dyadic_set_algebra(s1: u64, s2: u64) {
        let a = random::dyadic_set(&mut random::rng(s1), 3);
        let b = random::dyadic_set(&mut random::rng(s2), 4);
        let m = |s: &DyadicSet| s.measure().to_f64();
        prop_assert_eq!(m(&a.union(&b)) + m(&a.intersection(&b)), m(&a) + m(&b));
        prop_assert_eq!(m(&a.complement()), 1.0 - m(&a));
        prop_assert!(a.difference(&b).is_disjoint(&b));
        prop_assert!(a.intersection(&b).is_subset(&a));
    }
}

#[test]
fn translation_keeps_sequences_comparable() {
    let mut r = random::rng(5);
    let seq = random::convergent_sequence(&mut r, SpaceKind::L2, 4, 3);
    let g = random::step_function(&mut r, SpaceKind::L2, 2, 3, 2);
    let t: FunctionSequence = seq.translate(&g).unwrap();
    for (a, b) in seq.members().iter().zip(t.members()) {
        assert!(b.sub(a).unwrap().sub(&g).unwrap().l1_norm() < 1e-12);
    }
}
