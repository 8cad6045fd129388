//! Pettis norm, integrability moduli and in-measure deviation.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, DyadicSet};
use crate::error::{Error, Result};
use crate::seq::{Accumulator, Functional, SeqVec, SpaceKind};
use crate::stepfn::{FunctionSequence, StepFunction, ValueBlock};

/// Default cap on the exponent of any exact enumeration.
pub const DEFAULT_BLOCK_CAP: usize = 20;

const PAR_THRESHOLD: u64 = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PettisMethod {
    Exact,
    Bounds,
}

/// Outcome of a Pettis norm evaluation.
///
/// `witness` holds one sign per distinct-value block of `f`, blocks ordered
/// by first occurrence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PettisResult {
    pub value: f64,
    pub method: PettisMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<i8>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
}

/// `Σ s_i w_i v_i`.
pub fn signed_sum(blocks: &[ValueBlock], signs: &[i8]) -> SeqVec {
    let mut acc = Accumulator::default();
    for (b, &s) in blocks.iter().zip(signs) {
        acc.add_scaled(s as f64 * b.weight, &b.value);
    }
    acc.finish()
}

/// `max_{s ∈ {±1}^m} ‖Σ s_i w_i v_i‖` with a maximizing sign pattern.
///
/// Parallel values are merged first, the blocks are split into groups with
/// disjoint coordinate support, and each group is solved by the cheaper of
/// block-sign or (for ℓ¹) dual-vertex enumeration.
pub fn max_signed_norm(blocks: &[ValueBlock], kind: SpaceKind, cap: usize) -> Result<(f64, Vec<i8>)> {
    let mut signs = vec![1i8; blocks.len()];

    // merge parallel values: v = λ u with u's first entry equal to 1
    let mut dirs: Vec<Direction> = Vec::new();
    let mut by_key: HashMap<Vec<(u64, u64)>, usize> = HashMap::new();
    for (bi, b) in blocks.iter().enumerate() {
        if b.weight == 0.0 || b.value.is_zero() {
            continue;
        }
        let lead = b.value.entries()[0].1;
        let u = b.value.scale(1.0 / lead);
        let slot = *by_key.entry(u.bit_key()).or_insert_with(|| {
            dirs.push(Direction {
                u,
                weight: 0.0,
                members: Vec::new(),
            });
            dirs.len() - 1
        });
        dirs[slot].weight += lead.abs() * b.weight;
        dirs[slot].members.push((bi, if lead < 0.0 { -1 } else { 1 }));
    }

    let comps = components(&dirs);
    let mut parts = Vec::with_capacity(comps.len());
    for comp in &comps {
        let (value, dir_signs) = solve_component(&dirs, comp, kind, cap)?;
        let mut flip = 1i8;
        if let Some(&(_, lam)) = dirs[comp[0]].members.first() {
            flip = dir_signs[0] * lam;
        }
        for (&di, &s) in comp.iter().zip(&dir_signs) {
            for &(bi, lam) in &dirs[di].members {
                signs[bi] = s * lam * flip;
            }
        }
        parts.push(value);
    }

    let value = match kind {
        SpaceKind::L1 => parts.iter().sum(),
        SpaceKind::L2 => parts.iter().map(|x| x * x).sum::<f64>().sqrt(),
        SpaceKind::Linf => parts.iter().copied().fold(0.0, f64::max),
    };
    Ok((value, signs))
}

/// `max_s ‖Σ s_i w_i (v_i − m)‖` with `m = Σ w_i v_i / Σ w_i`: the Pettis
/// norm of a recentered function.
///
/// When the distinct values have pairwise disjoint supports the centered
/// sum splits as `Σ_i w_i v_i (s_i − S)` with `S = Σ s_j w_j / Σ w_j`, so only
/// the number of `+` signs inside each group of equal `(w_i, ‖v_i‖)` matters.
pub fn max_centered_signed_norm(
    blocks: &[ValueBlock],
    kind: SpaceKind,
    cap: usize,
) -> Result<(f64, Vec<i8>)> {
    let total: f64 = blocks.iter().map(|b| b.weight).sum();
    if total == 0.0 || blocks.len() <= 1 {
        return Ok((0.0, vec![1; blocks.len()]));
    }

    // identical values are one block
    let mut ids: HashMap<Vec<(u64, u64)>, usize> = HashMap::new();
    let mut merged: Vec<ValueBlock> = Vec::new();
    let mut slot_of = Vec::with_capacity(blocks.len());
    for b in blocks {
        let slot = *ids.entry(b.value.bit_key()).or_insert_with(|| {
            merged.push(ValueBlock {
                value: b.value.clone(),
                weight: 0.0,
            });
            merged.len() - 1
        });
        merged[slot].weight += b.weight;
        slot_of.push(slot);
    }
    if merged.len() == 1 {
        return Ok((0.0, vec![1; blocks.len()]));
    }

    let mut owner: HashMap<u64, usize> = HashMap::new();
    let disjoint = merged
        .iter()
        .enumerate()
        .all(|(i, b)| b.value.support().all(|k| owner.insert(k, i).is_none()));

    let (value, merged_signs) = if disjoint {
        disjoint_centered(&merged, total, kind, cap)?
    } else {
        let mut acc = Accumulator::default();
        for b in &merged {
            acc.add_scaled(b.weight / total, &b.value);
        }
        let m = acc.finish();
        let centered: Vec<ValueBlock> = merged
            .iter()
            .map(|b| ValueBlock {
                value: b.value.sub(&m),
                weight: b.weight,
            })
            .collect();
        max_signed_norm(&centered, kind, cap)?
    };
    Ok((value, slot_of.iter().map(|&s| merged_signs[s]).collect()))
}

fn disjoint_centered(
    blocks: &[ValueBlock],
    total: f64,
    kind: SpaceKind,
    cap: usize,
) -> Result<(f64, Vec<i8>)> {
    struct Group {
        w: f64,
        size: f64,
        members: Vec<usize>,
    }
    let mut groups: Vec<Group> = Vec::new();
    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    for (i, b) in blocks.iter().enumerate() {
        let n = b.value.norm(kind);
        let g = *index
            .entry((b.weight.to_bits(), n.to_bits()))
            .or_insert_with(|| {
                groups.push(Group {
                    w: b.weight,
                    size: b.weight * n,
                    members: Vec::new(),
                });
                groups.len() - 1
            });
        groups[g].members.push(i);
    }
    let combos = groups
        .iter()
        .try_fold(1u64, |acc, g| acc.checked_mul(g.members.len() as u64 + 1))
        .filter(|&c| c <= 1u64 << cap.min(62))
        .ok_or(Error::BlockCapExceeded {
            blocks: blocks.len(),
            cap,
        })?;

    let radix: Vec<u64> = groups.iter().map(|g| g.members.len() as u64 + 1).collect();
    let digits = |mut c: u64| -> Vec<u64> {
        radix
            .iter()
            .map(|&r| {
                let d = c % r;
                c /= r;
                d
            })
            .collect()
    };
    let score = |c: u64| {
        let plus = digits(c);
        let s: f64 = groups
            .iter()
            .zip(&plus)
            .map(|(g, &p)| g.w * (2.0 * p as f64 - g.members.len() as f64))
            .sum::<f64>()
            / total;
        let (up, down) = ((1.0 - s).abs(), (1.0 + s).abs());
        let mut acc = 0.0f64;
        for (g, &p) in groups.iter().zip(&plus) {
            let q = g.members.len() as f64 - p as f64;
            let p = p as f64;
            match kind {
                SpaceKind::L1 => acc += g.size * (p * up + q * down),
                SpaceKind::L2 => acc += g.size * g.size * (p * up * up + q * down * down),
                SpaceKind::Linf => {
                    let a = if p > 0.0 { up } else { 0.0 };
                    let b = if q > 0.0 { down } else { 0.0 };
                    acc = acc.max(g.size * a.max(b));
                }
            }
        }
        if kind == SpaceKind::L2 {
            acc.sqrt()
        } else {
            acc
        }
    };
    let (value, best) = argmax(combos, score);
    let mut signs = vec![-1i8; blocks.len()];
    for (g, &p) in groups.iter().zip(&digits(best)) {
        for &i in &g.members[..p as usize] {
            signs[i] = 1;
        }
    }
    normalize_first(&mut signs);
    Ok((value, signs))
}

struct Direction {
    u: SeqVec,
    weight: f64,
    members: Vec<(usize, i8)>,
}

fn components(dirs: &[Direction]) -> Vec<Vec<usize>> {
    let mut parent: Vec<usize> = (0..dirs.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut owner: HashMap<u64, usize> = HashMap::new();
    for (i, d) in dirs.iter().enumerate() {
        for k in d.u.support() {
            match owner.get(&k) {
                Some(&j) => {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
                None => {
                    owner.insert(k, i);
                }
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot: HashMap<usize, usize> = HashMap::new();
    for i in 0..dirs.len() {
        let r = find(&mut parent, i);
        let g = *slot.entry(r).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups
}

fn dense_norm(x: &[f64], kind: SpaceKind) -> f64 {
    match kind {
        SpaceKind::L1 => x.iter().map(|v| v.abs()).sum(),
        SpaceKind::L2 => {
            let m = x.iter().fold(0.0f64, |a, v| a.max(v.abs()));
            if m == 0.0 {
                0.0
            } else {
                m * x.iter().map(|v| (v / m) * (v / m)).sum::<f64>().sqrt()
            }
        }
        SpaceKind::Linf => x.iter().fold(0.0, |a, v| a.max(v.abs())),
    }
}

fn sign_of(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

/// Pattern `p` of an `n`-sign enumeration with the first sign fixed to `+`;
/// increasing `p` is lexicographic order with `+` before `−`.
fn pattern_sign(p: u64, n: usize, i: usize) -> f64 {
    if i == 0 || (p >> (n - 1 - i)) & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Maximize `score(p)` over `0..count`, ties to the smallest `p`.
fn argmax(count: u64, score: impl Fn(u64) -> f64 + Sync) -> (f64, u64) {
    let better = |a: (f64, u64), b: (f64, u64)| {
        if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
            b
        } else {
            a
        }
    };
    if count >= PAR_THRESHOLD {
        (0..count)
            .into_par_iter()
            .map(|p| (score(p), p))
            .reduce(|| (f64::NEG_INFINITY, u64::MAX), better)
    } else {
        (0..count)
            .map(|p| (score(p), p))
            .fold((f64::NEG_INFINITY, u64::MAX), better)
    }
}

fn solve_component(
    dirs: &[Direction],
    comp: &[usize],
    kind: SpaceKind,
    cap: usize,
) -> Result<(f64, Vec<i8>)> {
    let m = comp.len();
    if m == 1 {
        let d = &dirs[comp[0]];
        return Ok((d.weight * d.u.norm(kind), vec![1]));
    }
    let mut coords: Vec<u64> = comp.iter().flat_map(|&i| dirs[i].u.support()).collect();
    coords.sort_unstable();
    coords.dedup();
    let dim = coords.len();
    let col: HashMap<u64, usize> = coords.iter().enumerate().map(|(j, &k)| (k, j)).collect();
    let rows: Vec<Vec<f64>> = comp
        .iter()
        .map(|&i| {
            let mut r = vec![0.0; dim];
            for &(k, v) in dirs[i].u.entries() {
                r[col[&k]] = dirs[i].weight * v;
            }
            r
        })
        .collect();

    match kind {
        SpaceKind::Linf => {
            let mut best = (f64::NEG_INFINITY, 0usize);
            for j in 0..dim {
                let s: f64 = rows.iter().map(|r| r[j].abs()).sum();
                if s > best.0 {
                    best = (s, j);
                }
            }
            let mut signs: Vec<i8> = rows.iter().map(|r| sign_of(r[best.1])).collect();
            normalize_first(&mut signs);
            Ok((best.0, signs))
        }
        SpaceKind::L1 if dim < m => {
            if dim - 1 > cap {
                return Err(Error::BlockCapExceeded { blocks: dim, cap });
            }
            let count = 1u64 << (dim - 1);
            let score = |p: u64| {
                rows.iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .map(|(j, x)| pattern_sign(p, dim, j) * x)
                            .sum::<f64>()
                            .abs()
                    })
                    .sum::<f64>()
            };
            let (value, p) = argmax(count, score);
            let mut signs: Vec<i8> = rows
                .iter()
                .map(|r| {
                    sign_of(
                        r.iter()
                            .enumerate()
                            .map(|(j, x)| pattern_sign(p, dim, j) * x)
                            .sum(),
                    )
                })
                .collect();
            normalize_first(&mut signs);
            Ok((value, signs))
        }
        _ => {
            if m - 1 > cap {
                return Err(Error::BlockCapExceeded { blocks: m, cap });
            }
            let count = 1u64 << (m - 1);
            let score = |p: u64| {
                let mut x = vec![0.0; dim];
                for (i, r) in rows.iter().enumerate() {
                    let s = pattern_sign(p, m, i);
                    for (xj, rj) in x.iter_mut().zip(r) {
                        *xj += s * rj;
                    }
                }
                dense_norm(&x, kind)
            };
            let (value, p) = argmax(count, score);
            let signs = (0..m).map(|i| pattern_sign(p, m, i) as i8).collect();
            Ok((value, signs))
        }
    }
}

fn normalize_first(signs: &mut [i8]) {
    if signs.first() == Some(&-1) {
        signs.iter_mut().for_each(|s| *s = -*s);
    }
}

/// `‖f‖_Pettis` by exact sign enumeration with the default cap.
pub fn pettis_norm_exact(f: &StepFunction) -> Result<PettisResult> {
    pettis_norm_exact_with_cap(f, DEFAULT_BLOCK_CAP)
}

pub fn pettis_norm_exact_with_cap(f: &StepFunction, cap: usize) -> Result<PettisResult> {
    let blocks = f.value_blocks(&DyadicSet::full_unchecked(0));
    let (value, witness) = max_signed_norm(&blocks, f.kind(), cap)?;
    Ok(PettisResult {
        value,
        method: PettisMethod::Exact,
        witness: Some(witness),
        lower: None,
        upper: None,
    })
}

/// Lower bound from the supplied functionals (renormalized into the dual
/// unit ball), upper bound `‖f‖₁`. `value` is the lower bound.
pub fn pettis_norm_bounds(f: &StepFunction, functionals: &[Functional]) -> Result<PettisResult> {
    let mut lower = 0.0f64;
    for x in functionals {
        let x = x.clone().into_unit_ball();
        lower = lower.max(f.scalarize(&x)?.l1_norm());
    }
    let upper = f.l1_norm();
    let lower = lower.min(upper);
    Ok(PettisResult {
        value: lower,
        method: PettisMethod::Bounds,
        witness: None,
        lower: Some(lower),
        upper: Some(upper),
    })
}

/// Exact when within the cap, otherwise bounds from `functionals`.
pub fn pettis_norm(f: &StepFunction, cap: usize, functionals: &[Functional]) -> Result<PettisResult> {
    match pettis_norm_exact_with_cap(f, cap) {
        Err(Error::BlockCapExceeded { .. }) => pettis_norm_bounds(f, functionals),
        r => r,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusKind {
    Ui,
    Equi,
    PettisUi,
}

/// Sampled modulus, `(threshold, value)` pairs in the order requested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModulusCurve {
    pub kind: ModulusKind,
    /// Whether the modulus should decrease to 0 as the threshold grows
    /// (UI moduli) rather than as it shrinks (equi-integrability).
    pub decreasing: bool,
    pub points: Vec<(f64, f64)>,
}

impl ModulusCurve {
    pub fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.1)
    }

    /// Value at the threshold where the modulus should be smallest.
    pub fn tail(&self) -> f64 {
        let pick = if self.decreasing {
            self.points.iter().max_by(|a, b| a.0.total_cmp(&b.0))
        } else {
            self.points.iter().min_by(|a, b| a.0.total_cmp(&b.0))
        };
        pick.map(|p| p.1).unwrap_or(0.0)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,value\n");
        for (t, v) in &self.points {
            out.push_str(&format!("{t},{v}\n"));
        }
        out
    }
}

fn atom_norms(f: &StepFunction) -> (f64, Vec<f64>) {
    let w = (-(f.level() as f64)).exp2();
    (w, f.values().iter().map(|v| v.norm(f.kind())).collect())
}

/// `∫_{[‖f‖ ≥ c]} ‖f‖ dµ`.
pub fn tail_mass(f: &StepFunction, c: f64) -> f64 {
    let (w, norms) = atom_norms(f);
    norms.iter().filter(|&&n| n >= c).sum::<f64>() * w
}

/// `sup_k ∫_{[‖f_k‖ ≥ c]} ‖f_k‖ dµ` at each threshold.
pub fn ui_modulus(seq: &FunctionSequence, thresholds: &[f64]) -> ModulusCurve {
    ui_modulus_of(seq.members(), thresholds)
}

pub fn ui_modulus_of(members: &[StepFunction], thresholds: &[f64]) -> ModulusCurve {
    let points = thresholds
        .iter()
        .map(|&c| {
            let v = members
                .par_iter()
                .map(|f| tail_mass(f, c))
                .reduce(|| 0.0, f64::max);
            (c, v)
        })
        .collect();
    ModulusCurve {
        kind: ModulusKind::Ui,
        decreasing: true,
        points,
    }
}

/// `sup_{µ(A) ≤ δ} ∫_A ‖f‖ dµ` for one function; the worst set fills the
/// largest values first, splitting an atom if needed.
pub fn worst_set_mass(f: &StepFunction, delta: f64) -> f64 {
    let (w, mut norms) = atom_norms(f);
    norms.sort_by(|a, b| b.total_cmp(a));
    let mut room = delta.max(0.0);
    let mut total = 0.0;
    for n in norms {
        if room <= 0.0 || n == 0.0 {
            break;
        }
        let take = room.min(w);
        total += take * n;
        room -= take;
    }
    total
}

/// Threshold `2^⌈K/4⌉` at which a prefix of length `K` is judged uniformly
/// integrable: it grows with the prefix but slower than gallery spikes.
pub fn ui_cutoff(prefix: usize) -> f64 {
    (prefix.div_ceil(4) as f64).exp2()
}

/// `sup_k sup_{µ(A) ≤ δ} ∫_A ‖f_k‖ dµ` at each δ.
pub fn equi_modulus(seq: &FunctionSequence, deltas: &[f64]) -> ModulusCurve {
    let points = deltas
        .iter()
        .map(|&d| {
            let v = seq
                .members()
                .par_iter()
                .map(|f| worst_set_mass(f, d))
                .reduce(|| 0.0, f64::max);
            (d, v)
        })
        .collect();
    ModulusCurve {
        kind: ModulusKind::Equi,
        decreasing: false,
        points,
    }
}

/// UI modulus of `{x*(f_k)}` over members and the supplied functionals
/// (renormalized into the dual unit ball). A lower bound for the supremum
/// over the whole dual ball.
pub fn pettis_ui_modulus(
    seq: &FunctionSequence,
    functionals: &[Functional],
    thresholds: &[f64],
) -> Result<ModulusCurve> {
    let family = seq
        .members()
        .iter()
        .flat_map(|f| functionals.iter().map(move |x| (f, x)))
        .map(|(f, x)| f.scalarize(&x.clone().into_unit_ball()))
        .collect::<Result<Vec<_>>>()?;
    let mut curve = ui_modulus_of(&family, thresholds);
    curve.kind = ModulusKind::PettisUi;
    Ok(curve)
}

/// `µ{ω : ‖f(ω) − g(ω)‖ > ε}`, exact.
pub fn measure_deviation(f: &StepFunction, g: &StepFunction, eps: f64) -> Result<Dyadic> {
    f.deviation_measure(g, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicSet;

    fn ex53(k: u32) -> StepFunction {
        let base = 1u64 << k;
        StepFunction::from_fn(k, SpaceKind::L2, |i| SeqVec::unit(base + 1 + i as u64)).unwrap()
    }

    fn ex52(k: u32) -> StepFunction {
        StepFunction::from_fn(k, SpaceKind::L2, |j| {
            SeqVec::unit(k as u64).scale(if j % 2 == 0 { 1.0 } else { -1.0 })
        })
        .unwrap()
    }

    #[test]
    fn pettis_examples() {
        for k in 1..=8 {
            let r = pettis_norm_exact(&ex53(k)).unwrap();
            assert!((r.value - 2f64.powf(-(k as f64) / 2.0)).abs() < 1e-12);
        }
        for k in 1..=8 {
            assert_eq!(pettis_norm_exact(&ex52(k)).unwrap().value, 1.0);
        }
        let v = SeqVec::from_pairs([(1, 3.0), (2, 4.0)]);
        let c = StepFunction::constant(v, SpaceKind::L2);
        assert_eq!(pettis_norm_exact(&c).unwrap().value, 5.0);
    }

    #[test]
    fn witness_recomputes_value() {
        for kind in [SpaceKind::L1, SpaceKind::L2, SpaceKind::Linf] {
            let f = StepFunction::new(
                2,
                kind,
                vec![
                    SeqVec::from_pairs([(1, 1.0), (2, -2.0)]),
                    SeqVec::from_pairs([(2, 1.5)]),
                    SeqVec::from_pairs([(1, -0.5), (3, 1.0)]),
                    SeqVec::from_pairs([(3, 2.0), (1, 0.25)]),
                ],
            )
            .unwrap();
            let r = pettis_norm_exact(&f).unwrap();
            let blocks = f.value_blocks(&DyadicSet::full(0).unwrap());
            let w = r.witness.unwrap();
            assert_eq!(w[0], 1);
            let recomputed = signed_sum(&blocks, &w).norm(kind);
            assert!((recomputed - r.value).abs() < 1e-12, "{kind:?}");
            assert!(r.value <= f.l1_norm() + 1e-12);
        }
    }

    #[test]
    fn l1_routes_agree() {
        // more blocks than coordinates takes the dual-vertex route
        let vals: Vec<SeqVec> = (0..8)
            .map(|i| {
                SeqVec::from_pairs([
                    (1, (i as f64) - 3.5),
                    (2, if i % 3 == 0 { 1.0 } else { -0.75 }),
                ])
            })
            .collect();
        let f = StepFunction::new(3, SpaceKind::L1, vals).unwrap();
        let blocks = f.value_blocks(&DyadicSet::full(0).unwrap());
        let (v, w) = max_signed_norm(&blocks, SpaceKind::L1, 20).unwrap();
        let mut brute = 0.0f64;
        for p in 0u32..256 {
            let s: Vec<i8> = (0..8).map(|i| if (p >> i) & 1 == 1 { -1 } else { 1 }).collect();
            brute = brute.max(signed_sum(&blocks, &s).norm(SpaceKind::L1));
        }
        assert!((v - brute).abs() < 1e-12);
        assert!((signed_sum(&blocks, &w).norm(SpaceKind::L1) - v).abs() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        let vals: Vec<SeqVec> = (0..8)
            .map(|i| SeqVec::from_pairs([(1, 1.0 + i as f64), (2, 1.0 / (1.0 + i as f64))]))
            .collect();
        let f = StepFunction::new(3, SpaceKind::L2, vals).unwrap();
        assert!(matches!(
            pettis_norm_exact_with_cap(&f, 4),
            Err(Error::BlockCapExceeded { .. })
        ));
        let b = pettis_norm(&f, 4, &[Functional::coordinate(1, SpaceKind::L2)]).unwrap();
        assert_eq!(b.method, PettisMethod::Bounds);
        assert!(b.lower.unwrap() <= b.upper.unwrap());
    }

    #[test]
    fn bounds_examples() {
        let z = StepFunction::zero(SpaceKind::L2);
        let b = pettis_norm_bounds(&z, &[Functional::coordinate(1, SpaceKind::L2)]).unwrap();
        assert_eq!((b.lower, b.upper), (Some(0.0), Some(0.0)));
        let b = pettis_norm_bounds(&ex53(3), &[]).unwrap();
        assert_eq!(b.upper, Some(1.0));
    }

    fn seq(members: Vec<StepFunction>) -> FunctionSequence {
        FunctionSequence::new(members, None, "t").unwrap()
    }

    #[test]
    fn ui_modulus_examples() {
        let spikes: Vec<StepFunction> = (1..=10)
            .map(|k| {
                StepFunction::indicator(
                    &DyadicSet::atom(k, 0).unwrap(),
                    SeqVec::unit(k as u64).scale(2f64.powi(k as i32)),
                    SpaceKind::L2,
                )
            })
            .collect();
        let s = seq(spikes);
        let c = ui_modulus(&s, &[1.0, 16.0, 1024.0, 2048.0]);
        assert_eq!(c.values().collect::<Vec<_>>(), vec![1.0, 1.0, 1.0, 0.0]);

        let units = seq((1..=5).map(|k| StepFunction::constant(SeqVec::unit(k), SpaceKind::L2)).collect());
        let c = ui_modulus(&units, &[0.5, 1.0, 1.5]);
        assert_eq!(c.values().collect::<Vec<_>>(), vec![1.0, 1.0, 0.0]);
        assert!(c.to_csv().starts_with("threshold,value\n0.5,1\n"));
    }

    #[test]
    fn equi_modulus_examples() {
        let spikes: Vec<StepFunction> = (1..=6)
            .map(|n| {
                StepFunction::indicator(
                    &DyadicSet::atom(n, 0).unwrap(),
                    SeqVec::scalar(2f64.powi(n as i32)),
                    crate::stepfn::REAL_KIND,
                )
            })
            .collect();
        let s = seq(spikes);
        let c = equi_modulus(&s, &[0.5, 0.125, 1.0 / 64.0, 1.0 / 128.0]);
        assert_eq!(c.values().collect::<Vec<_>>(), vec![1.0, 1.0, 1.0, 0.5]);

        let units = seq(vec![StepFunction::constant(SeqVec::unit(3), SpaceKind::L2)]);
        let c = equi_modulus(&units, &[0.1, 0.25, 1.0]);
        assert_eq!(c.values().collect::<Vec<_>>(), vec![0.1, 0.25, 1.0]);
    }

    #[test]
    fn measure_deviation_examples() {
        let f = ex52(3);
        let z = StepFunction::zero(SpaceKind::L2);
        assert_eq!(measure_deviation(&f, &z, 0.5).unwrap(), Dyadic::ONE);
        assert_eq!(measure_deviation(&f, &f, 0.5).unwrap(), Dyadic::ZERO);
    }

    #[test]
    fn centered_disjoint_route_matches_brute_force() {
        let blocks = vec![
            ValueBlock { value: SeqVec::unit(1), weight: 0.25 },
            ValueBlock { value: SeqVec::unit(2).scale(2.0), weight: 0.125 },
            ValueBlock { value: SeqVec::from_pairs([(3, 1.0), (4, -1.0)]), weight: 0.125 },
            ValueBlock { value: SeqVec::zero(), weight: 0.25 },
            ValueBlock { value: SeqVec::unit(5), weight: 0.25 },
        ];
        let total: f64 = blocks.iter().map(|b| b.weight).sum();
        let mut acc = Accumulator::default();
        for b in &blocks {
            acc.add_scaled(b.weight / total, &b.value);
        }
        let m = acc.finish();
        for kind in [SpaceKind::L1, SpaceKind::L2, SpaceKind::Linf] {
            let (v, w) = max_centered_signed_norm(&blocks, kind, 20).unwrap();
            let centered: Vec<ValueBlock> = blocks
                .iter()
                .map(|b| ValueBlock { value: b.value.sub(&m), weight: b.weight })
                .collect();
            let mut brute = 0.0f64;
            for p in 0u32..32 {
                let s: Vec<i8> = (0..5).map(|i| if (p >> i) & 1 == 1 { -1 } else { 1 }).collect();
                brute = brute.max(signed_sum(&centered, &s).norm(kind));
            }
            assert!((v - brute).abs() < 1e-12, "{kind:?}");
            assert!((signed_sum(&centered, &w).norm(kind) - v).abs() < 1e-12);
        }
    }
}
