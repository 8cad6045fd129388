//! Seeded random instances for property checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dyadic::{DyadicPartition, DyadicSet};
use crate::seq::{Functional, SeqVec, SpaceKind};
use crate::stepfn::{FunctionSequence, StepFunction, REAL_KIND};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Dyadic rational in `[-2, 2]` with denominator 16.
fn entry<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(-32i32..=32) as f64 / 16.0
}

/// Nonzero vector on coordinates `1..=dim` with at most three entries.
pub fn seq_vec<R: Rng>(rng: &mut R, dim: u64) -> SeqVec {
    loop {
        let nnz = rng.gen_range(1..=3usize.min(dim as usize));
        let v = SeqVec::from_pairs((0..nnz).map(|_| (rng.gen_range(1..=dim), entry(rng))));
        if !v.is_zero() {
            return v;
        }
    }
}

/// Step function of the given level taking at most `distinct` values, zero
/// allowed among them.
pub fn step_function<R: Rng>(rng: &mut R, kind: SpaceKind, level: u32, dim: u64, distinct: usize) -> StepFunction {
    let mut pool: Vec<SeqVec> = (0..distinct.max(1)).map(|_| seq_vec(rng, dim)).collect();
    if rng.gen_bool(0.3) {
        pool[0] = SeqVec::zero();
    }
    StepFunction::from_fn(level, kind, |_| pool.choose(rng).unwrap().clone()).expect("small level")
}

pub fn nonneg_real<R: Rng>(rng: &mut R, level: u32) -> StepFunction {
    let values: Vec<f64> = (0..1usize << level)
        .map(|_| {
            if rng.gen_bool(0.4) {
                0.0
            } else {
                rng.gen_range(0..=64) as f64 / 64.0
            }
        })
        .collect();
    StepFunction::real(level, &values).expect("small level")
}

/// Functional in the closed dual unit ball, normalized to norm one unless zero.
pub fn unit_functional<R: Rng>(rng: &mut R, primal: SpaceKind, dim: u64) -> Functional {
    let coeffs = match primal.dual() {
        SpaceKind::L2 => {
            let raw: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
            let v = SeqVec::from_dense(1, &raw);
            let n = v.norm(SpaceKind::L2);
            if n == 0.0 {
                v
            } else {
                v.scale(1.0 / n)
            }
        }
        SpaceKind::Linf => {
            let raw: Vec<f64> = (0..dim)
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        if rng.gen_bool(0.5) {
                            1.0
                        } else {
                            -1.0
                        }
                    } else {
                        rng.gen_range(-1.0..=1.0)
                    }
                })
                .collect();
            SeqVec::from_dense(1, &raw)
        }
        SpaceKind::L1 => {
            let j = rng.gen_range(1..=dim);
            SeqVec::unit(j).scale(if rng.gen_bool(0.5) { 1.0 } else { -1.0 })
        }
    };
    Functional::new(coeffs, primal)
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

pub fn dyadic_set<R: Rng>(rng: &mut R, level: u32) -> DyadicSet {
    DyadicSet::from_atoms(level, (0..1usize << level).filter(|_| rng.gen_bool(0.5))).expect("small level")
}

pub fn nonempty_dyadic_set<R: Rng>(rng: &mut R, level: u32) -> DyadicSet {
    loop {
        let s = dyadic_set(rng, level);
        if !s.is_empty() {
            return s;
        }
    }
}

/// Random labeling of the atoms of `level` into at most `blocks` classes.
pub fn partition<R: Rng>(rng: &mut R, level: u32, blocks: usize) -> DyadicPartition {
    let labels: Vec<usize> = (0..1usize << level).map(|_| rng.gen_range(0..blocks.max(1))).collect();
    let sets: Vec<DyadicSet> = (0..blocks.max(1))
        .map(|b| DyadicSet::from_atoms(level, (0..labels.len()).filter(|&i| labels[i] == b)).unwrap())
        .filter(|s| !s.is_empty())
        .collect();
    DyadicPartition::new(sets, None).expect("labels cover every atom")
}

/// `f_k = f_0 + 2^{-k} h_k` with `f_0`, `h_k` random of level at most 3.
pub fn convergent_sequence<R: Rng>(rng: &mut R, kind: SpaceKind, len: usize, dim: u64) -> FunctionSequence {
    let l0 = rng.gen_range(0..=3);
    let f0 = step_function(rng, kind, l0, dim, 4);
    let members = (1..=len)
        .map(|k| {
            let l = rng.gen_range(0..=3);
            let h = step_function(rng, kind, l, dim, 3);
            f0.add(&h.scale((-(k as f64)).exp2())).expect("same kind")
        })
        .collect();
    FunctionSequence::new(members, Some(f0), "random convergent").expect("nonempty")
}

/// `f_k = c e_j r_k` with `c ≥ 1`: no strong or Pettis limit.
pub fn rademacher_type<R: Rng>(rng: &mut R, kind: SpaceKind, len: usize, coord: u64) -> FunctionSequence {
    let c = 1.0 + rng.gen_range(0..=16) as f64 / 16.0;
    let members = (1..=len as u32)
        .map(|k| {
            StepFunction::from_fn(k, kind, |j| {
                SeqVec::unit(coord).scale(c * crate::gallery::rademacher_sign(k, k, j))
            })
            .expect("small level")
        })
        .collect();
    FunctionSequence::new(members, Some(StepFunction::zero(kind)), "random rademacher").expect("nonempty")
}

/// Mixed family used for lattice checks: convergent, oscillating, spiking
/// or arbitrary sequences with a zero or random limit.
pub fn sequence<R: Rng>(rng: &mut R, len: usize) -> FunctionSequence {
    let kind = *[SpaceKind::L1, SpaceKind::L2, SpaceKind::Linf].choose(rng).unwrap();
    let dim = rng.gen_range(1..=5);
    match rng.gen_range(0..4) {
        0 => convergent_sequence(rng, kind, len, dim),
        1 => {
            let coord = rng.gen_range(1..=dim);
            rademacher_type(rng, kind, len, coord)
        }
        2 => {
            let members = (1..=len as u32)
                .map(|k| {
                    let level = k.min(6);
                    let v = seq_vec(rng, dim).scale((level as f64).exp2());
                    StepFunction::from_fn(level, kind, |j| if j == 0 { v.clone() } else { SeqVec::zero() })
                        .expect("small level")
                })
                .collect();
            FunctionSequence::new(members, Some(StepFunction::zero(kind)), "random spike").expect("nonempty")
        }
        _ => {
            let members = (0..len)
                .map(|_| {
                    let l = rng.gen_range(0..=3);
                    step_function(rng, kind, l, dim, 4)
                })
                .collect();
            let l = rng.gen_range(0..=2);
            let limit = step_function(rng, kind, l, dim, 2);
            FunctionSequence::new(members, Some(limit), "random").expect("nonempty")
        }
    }
}

/// Real-valued random step function.
pub fn real<R: Rng>(rng: &mut R, level: u32) -> StepFunction {
    let values: Vec<f64> = (0..1usize << level).map(|_| entry(rng)).collect();
    StepFunction::new(level, REAL_KIND, values.into_iter().map(SeqVec::scalar).collect()).expect("small level")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_generation_is_reproducible() {
        let a = step_function(&mut rng(7), SpaceKind::L2, 3, 4, 5);
        let b = step_function(&mut rng(7), SpaceKind::L2, 3, 4, 5);
        assert_eq!(a, b);
        let s1 = sequence(&mut rng(11), 6);
        let s2 = sequence(&mut rng(11), 6);
        assert_eq!(s1, s2);
    }

    #[test]
    fn unit_functionals_lie_in_ball() {
        let mut r = rng(3);
        for kind in [SpaceKind::L1, SpaceKind::L2, SpaceKind::Linf] {
            for _ in 0..50 {
                let x = unit_functional(&mut r, kind, 5);
                assert!(x.dual_norm() <= 1.0 + 1e-12);
            }
        }
    }
}
