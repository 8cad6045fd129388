//! Example sequences with known closed-form behavior.

use crate::error::{Error, Result};
use crate::seq::{SeqVec, SpaceKind};
use crate::stepfn::{FunctionSequence, StepFunction, REAL_KIND};

/// Stable identifiers accepted by [`by_name`].
pub const NAMES: &[&str] = &[
    "ex32",
    "ex34",
    "ex52",
    "ex53",
    "ex53-scaled",
    "ex55",
    "spike",
    "rademacher",
];

/// A gallery sequence with the dual-valued test functions that witness its
/// failure of limited or weak convergence.
#[derive(Debug, Clone)]
pub struct GalleryEntry {
    pub name: String,
    pub sequence: FunctionSequence,
    pub duals: Vec<StepFunction>,
}

pub fn by_name(name: &str, prefix: usize) -> Result<GalleryEntry> {
    if prefix == 0 {
        return Err(Error::EmptySequence);
    }
    let k = prefix as u32;
    let (sequence, duals) = match name {
        "ex32" => (gen_ex32(k)?, vec![]),
        "ex34" => (gen_ex34(k)?, vec![ex34_test(k)?]),
        "ex52" => (gen_ex52(k)?, vec![]),
        "ex53" => (gen_ex53(k)?, vec![]),
        "ex53-scaled" => (gen_ex53_scaled(k)?, vec![]),
        "ex55" => (gen_ex55(k)?, vec![ex55_dual(k)?]),
        "spike" => (gen_spike(k)?, vec![]),
        "rademacher" => (rademacher_sequence(k)?, vec![]),
        _ => {
            return Err(Error::Parse(format!(
                "unknown gallery sequence `{name}` (expected one of {})",
                NAMES.join(", ")
            )))
        }
    };
    Ok(GalleryEntry {
        name: name.to_string(),
        sequence,
        duals,
    })
}

/// `r_i` on atom `j` of level `level ≥ i`: `+1` on the first half of each
/// level-`(i−1)` interval.
pub fn rademacher_sign(i: u32, level: u32, j: usize) -> f64 {
    debug_assert!(i >= 1 && level >= i);
    if (j >> (level - i)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `r_i` as a real step function of level `i`.
pub fn gen_rademacher(i: u32) -> Result<StepFunction> {
    if i == 0 {
        return Err(Error::InvalidArgument("Rademacher index starts at 1".into()));
    }
    StepFunction::from_fn(i, REAL_KIND, |j| SeqVec::scalar(rademacher_sign(i, i, j)))
}

fn with_zero_limit(members: Vec<StepFunction>, kind: SpaceKind, label: &str) -> Result<FunctionSequence> {
    FunctionSequence::new(members, Some(StepFunction::zero(kind)), label)
}

pub fn rademacher_sequence(k: u32) -> Result<FunctionSequence> {
    let members = (1..=k).map(gen_rademacher).collect::<Result<_>>()?;
    with_zero_limit(members, REAL_KIND, "rademacher")
}

/// `f_k ≡ e_k` in ℓ².
pub fn gen_ex32(k: u32) -> Result<FunctionSequence> {
    let members = (1..=k)
        .map(|i| StepFunction::constant(SeqVec::unit(i as u64), SpaceKind::L2))
        .collect();
    with_zero_limit(members, SpaceKind::L2, "ex32")
}

/// `f_k = 2^k e_k 1_{I^k_1}` in ℓ².
pub fn gen_ex34(k: u32) -> Result<FunctionSequence> {
    let members = (1..=k)
        .map(|i| {
            let spike = SeqVec::unit(i as u64).scale((i as f64).exp2());
            StepFunction::from_fn(i, SpaceKind::L2, |j| if j == 0 { spike.clone() } else { SeqVec::zero() })
        })
        .collect::<Result<_>>()?;
    with_zero_limit(members, SpaceKind::L2, "ex34")
}

/// `b(ω) = Σ_{j ≤ k} e_j 1_{I^{j+1}_2}(ω)`, the linear test separating the
/// spikes from limited convergence, truncated to `k` coordinates.
pub fn ex34_test(k: u32) -> Result<StepFunction> {
    let level = k + 1;
    StepFunction::from_fn(level, SpaceKind::L2, |i| {
        if i == 0 {
            return SeqVec::zero();
        }
        // I^{j+1}_2 covers atoms 2^{k−j} .. 2^{k+1−j} at level k+1
        let j = k - (usize::BITS - 1 - i.leading_zeros());
        if j >= 1 {
            SeqVec::unit(j as u64)
        } else {
            SeqVec::zero()
        }
    })
}

/// `f_k = e_k r_k` in ℓ².
pub fn gen_ex52(k: u32) -> Result<FunctionSequence> {
    let members = (1..=k)
        .map(|i| {
            StepFunction::from_fn(i, SpaceKind::L2, |j| {
                SeqVec::unit(i as u64).scale(rademacher_sign(i, i, j))
            })
        })
        .collect::<Result<_>>()?;
    with_zero_limit(members, SpaceKind::L2, "ex52")
}

fn ex53_member(k: u32, scale: f64) -> Result<StepFunction> {
    let base = 1u64 << k;
    StepFunction::from_fn(k, SpaceKind::L2, |i| {
        SeqVec::from_pairs([(base + 1 + i as u64, scale)])
    })
}

/// `f_k = Σ_i 1_{I^k_i} e_{2^k + i}` in ℓ².
pub fn gen_ex53(k: u32) -> Result<FunctionSequence> {
    let members = (1..=k).map(|i| ex53_member(i, 1.0)).collect::<Result<_>>()?;
    with_zero_limit(members, SpaceKind::L2, "ex53")
}

/// `g_k = 2^{k/4} f_k` with `f_k` as in [`gen_ex53`].
pub fn gen_ex53_scaled(k: u32) -> Result<FunctionSequence> {
    let members = (1..=k)
        .map(|i| ex53_member(i, (i as f64 / 4.0).exp2()))
        .collect::<Result<_>>()?;
    with_zero_limit(members, SpaceKind::L2, "ex53-scaled")
}

/// `f_k = (1/k) Σ_{i ≤ k} r_i e_i` in ℓ¹.
pub fn gen_ex55(k: u32) -> Result<FunctionSequence> {
    let members = (1..=k)
        .map(|n| {
            StepFunction::from_fn(n, SpaceKind::L1, |j| {
                SeqVec::from_pairs((1..=n).map(|i| (i as u64, rademacher_sign(i, n, j) / n as f64)))
            })
        })
        .collect::<Result<_>>()?;
    with_zero_limit(members, SpaceKind::L1, "ex55")
}

/// `b(ω) = (1_{[r_i = 1]}(ω))_{i ≤ k}`, an ℓ^∞-valued function.
pub fn ex55_dual(k: u32) -> Result<StepFunction> {
    StepFunction::from_fn(k, SpaceKind::Linf, |j| {
        SeqVec::from_pairs(
            (1..=k)
                .filter(|&i| rademacher_sign(i, k, j) > 0.0)
                .map(|i| (i as u64, 1.0)),
        )
    })
}

/// `f_n = 2^n 1_{[0, 2^{-n})}`, real-valued.
pub fn gen_spike(k: u32) -> Result<FunctionSequence> {
    let members = (1..=k)
        .map(|n| {
            StepFunction::from_fn(n, REAL_KIND, |j| {
                if j == 0 {
                    SeqVec::scalar((n as f64).exp2())
                } else {
                    SeqVec::zero()
                }
            })
        })
        .collect::<Result<_>>()?;
    with_zero_limit(members, REAL_KIND, "spike")
}
