//! Bocce and Pettis-Bocce oscillation, and the finite-resolution checkers
//! for the oscillation criteria.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::{DyadicPartition, DyadicSet, Resolution};
use crate::error::{Error, Result};
use crate::functionals::max_centered_signed_norm;
use crate::seq::{Accumulator, SeqVec, SpaceKind};
use crate::stepfn::{FunctionSequence, StepFunction, ValueBlock};

/// `Bocce-osc f|_A = ∫_A ‖f − m_A(f)‖ dµ / µ(A)`, zero on null sets.
pub fn bocce_osc(f: &StepFunction, set: &DyadicSet) -> f64 {
    let mu = set.measure().to_f64();
    let blocks = f.value_blocks(set);
    if mu == 0.0 || blocks.len() <= 1 {
        return 0.0;
    }
    let m = f.average(set);
    blocks
        .iter()
        .map(|b| b.weight * b.value.sub(&m).norm(f.kind()))
        .sum::<f64>()
        / mu
}

/// `sup_{x* ∈ B_{E*}} Bocce-osc x*(f)|_A`, exact by sign enumeration over
/// the recentered blocks.
pub fn pettis_bocce_osc(f: &StepFunction, set: &DyadicSet, cap: usize) -> Result<f64> {
    let mu = set.measure().to_f64();
    let blocks = f.value_blocks(set);
    if mu == 0.0 || blocks.len() <= 1 {
        return Ok(0.0);
    }
    let scaled: Vec<ValueBlock> = blocks
        .into_iter()
        .map(|b| ValueBlock {
            value: b.value,
            weight: b.weight / mu,
        })
        .collect();
    Ok(max_centered_signed_norm(&scaled, f.kind(), cap)?.0)
}

/// `Σ_i µ(A_i) Bocce-osc f|_{A_i}` over every block of `π`.
pub fn small_bocce_osc(f: &StepFunction, partition: &DyadicPartition) -> f64 {
    partition
        .blocks()
        .iter()
        .map(|b| b.measure().to_f64() * bocce_osc(f, b))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictStatus {
    SatisfiedAtResolution,
    Falsified,
    Inconclusive,
}

/// Parameters of a finite criterion search.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub eps_grid: Vec<f64>,
    /// Stand-ins for "every B of positive measure".
    pub test_sets: Vec<DyadicSet>,
    /// Level at which candidate sets `A ⊆ B` are enumerated.
    pub search_level: u32,
    /// Largest number of atoms in `B` whose subsets are enumerated.
    pub atom_cap: usize,
    /// Enumeration cap for Pettis-Bocce oscillations inside searches.
    pub block_cap: usize,
    /// Members skipped before the tail window; defaults to half the prefix.
    pub burn_in: Option<usize>,
    /// Extra one-based index subsets standing in for subsequences.
    pub subsequences: Vec<Vec<usize>>,
    /// Candidate partition levels for (B1), (B2) and small oscillation.
    pub partition_levels: Vec<u32>,
    /// Depth of the sub-blocks quantified over by (B2).
    pub sub_depth: u32,
    pub resolution: Resolution,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            eps_grid: default_eps_grid(),
            test_sets: dyadic_intervals(2),
            search_level: 3,
            atom_cap: 16,
            block_cap: 12,
            burn_in: None,
            subsequences: Vec::new(),
            partition_levels: (0..=4).collect(),
            sub_depth: 2,
            resolution: Resolution::default(),
        }
    }
}

impl SearchConfig {
    pub fn with_search_level(mut self, level: u32) -> Self {
        self.search_level = level;
        self
    }

    pub fn with_eps_grid(mut self, grid: Vec<f64>) -> Self {
        self.eps_grid = grid;
        self
    }

    pub fn with_test_sets(mut self, sets: Vec<DyadicSet>) -> Self {
        self.test_sets = sets;
        self
    }

    /// First index of the tail window for a prefix of `len` members.
    pub fn tail_start(&self, len: usize) -> usize {
        self.burn_in
            .unwrap_or(len / 2)
            .min(len.saturating_sub(1))
    }
}

/// `{2^-1, …, 2^-6}`.
pub fn default_eps_grid() -> Vec<f64> {
    (1..=6).map(|j| (-(j as f64)).exp2()).collect()
}

/// Every dyadic interval `I^n_i` with `n ≤ max_level`.
pub fn dyadic_intervals(max_level: u32) -> Vec<DyadicSet> {
    (0..=max_level)
        .flat_map(|n| (0..1usize << n).map(move |i| DyadicSet::atom(n, i).expect("small level")))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResolution {
    pub search_level: u32,
    pub eps_grid: Vec<f64>,
    pub prefix: usize,
    /// One-based index `N` where the tail window starts.
    pub tail_from: usize,
    pub test_sets: usize,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CaseOutcome {
    Witness {
        sets: Vec<DyadicSet>,
        value: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        index: Option<usize>,
    },
    Exhausted {
        searched: u64,
        best: f64,
        #[serde(skip_serializing_if = "Option::is_none")]
        member: Option<usize>,
    },
    Skipped {
        reason: String,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub eps: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_set: Option<DyadicSet>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsequence: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub partition_level: Option<u32>,
    pub outcome: CaseOutcome,
}

/// Truth value of a criterion at a finite resolution with the data that
/// justifies it.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionVerdict {
    pub criterion: String,
    pub status: VerdictStatus,
    pub resolution: SearchResolution,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CaseReport>,
    pub cases: Vec<CaseReport>,
}

impl CriterionVerdict {
    fn assemble(criterion: &str, resolution: SearchResolution, cases: Vec<CaseReport>) -> Self {
        let counterexample = cases
            .iter()
            .find(|c| matches!(c.outcome, CaseOutcome::Exhausted { .. }))
            .cloned();
        let status = if counterexample.is_some() {
            VerdictStatus::Falsified
        } else if cases
            .iter()
            .any(|c| matches!(c.outcome, CaseOutcome::Skipped { .. }))
        {
            VerdictStatus::Inconclusive
        } else {
            VerdictStatus::SatisfiedAtResolution
        };
        CriterionVerdict {
            criterion: criterion.to_string(),
            status,
            resolution,
            counterexample,
            cases,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OscKind {
    Bocce,
    PettisBocce,
}

/// Per-atom summaries of one function at a fixed level, so that the
/// oscillation over any union of atoms is cheap.
struct AtomTable {
    kind: SpaceKind,
    atom_measure: f64,
    cells: Vec<Vec<ValueBlock>>,
    integrals: Vec<SeqVec>,
    uniform: Vec<Option<usize>>,
}

impl AtomTable {
    fn new(f: &StepFunction, level: u32) -> Self {
        let mut ids: HashMap<Vec<(u64, u64)>, usize> = HashMap::new();
        let mut cells = Vec::with_capacity(1 << level);
        let mut integrals = Vec::with_capacity(1 << level);
        let mut uniform = Vec::with_capacity(1 << level);
        for i in 0..1usize << level {
            let atom = DyadicSet::atom(level, i).expect("level already checked");
            let blocks = f.value_blocks(&atom);
            let mut acc = Accumulator::default();
            for b in &blocks {
                acc.add_scaled(b.weight, &b.value);
            }
            integrals.push(acc.finish());
            uniform.push(if blocks.len() == 1 {
                let n = ids.len();
                Some(*ids.entry(blocks[0].value.bit_key()).or_insert(n))
            } else {
                None
            });
            cells.push(blocks);
        }
        AtomTable {
            kind: f.kind(),
            atom_measure: (-(level as f64)).exp2(),
            cells,
            integrals,
            uniform,
        }
    }

    /// `None` when the Pettis enumeration exceeds the cap.
    fn osc(&self, which: OscKind, atoms: &[usize], cap: usize) -> Option<f64> {
        if atoms.is_empty() {
            return Some(0.0);
        }
        let first = self.uniform[atoms[0]];
        if first.is_some() && atoms.iter().all(|&i| self.uniform[i] == first) {
            return Some(0.0);
        }
        let mu = atoms.len() as f64 * self.atom_measure;
        let blocks = atoms.iter().flat_map(|&i| self.cells[i].iter());
        match which {
            OscKind::Bocce => {
                let mut acc = Accumulator::default();
                for &i in atoms {
                    acc.add_scaled(1.0, &self.integrals[i]);
                }
                let m = acc.finish().scale(1.0 / mu);
                Some(
                    blocks
                        .map(|b| b.weight * b.value.sub(&m).norm(self.kind))
                        .sum::<f64>()
                        / mu,
                )
            }
            OscKind::PettisBocce => {
                let scaled: Vec<ValueBlock> = blocks
                    .map(|b| ValueBlock {
                        value: b.value.clone(),
                        weight: b.weight / mu,
                    })
                    .collect();
                max_centered_signed_norm(&scaled, self.kind, cap).ok().map(|r| r.0)
            }
        }
    }
}

#[derive(Clone, Copy)]
enum TailAgg {
    Min,
    Max,
}

#[derive(Clone, Copy)]
struct TailScore {
    value: f64,
    at: usize,
    unknown: bool,
}

fn tail_score(
    tables: &[AtomTable],
    which: OscKind,
    agg: TailAgg,
    atoms: &[usize],
    cap: usize,
) -> TailScore {
    let mut score = TailScore {
        value: match agg {
            TailAgg::Min => f64::INFINITY,
            TailAgg::Max => f64::NEG_INFINITY,
        },
        at: 0,
        unknown: false,
    };
    for (j, t) in tables.iter().enumerate() {
        match t.osc(which, atoms, cap) {
            None => score.unknown = true,
            Some(v) => {
                let better = match agg {
                    TailAgg::Min => v < score.value,
                    TailAgg::Max => v > score.value,
                };
                if better {
                    score.value = v;
                    score.at = j;
                }
            }
        }
    }
    score
}

fn subset_atoms(set: &DyadicSet, level: u32, cfg: &SearchConfig) -> Result<(Vec<Vec<usize>>, u32)> {
    let level = level.max(set.level());
    cfg.resolution.check(level)?;
    let iter = set.subsets_of(level, &cfg.resolution, cfg.atom_cap)?;
    Ok((iter.map(|a| a.atoms().collect()).collect(), level))
}

fn set_from_atoms(level: u32, atoms: &[usize]) -> DyadicSet {
    DyadicSet::from_atoms(level, atoms.iter().copied()).expect("atoms in range")
}

/// Shared engine of the sequential checks: for each `(ε, B)` look for
/// `A ⊆ B` whose tail aggregate of oscillations is below `ε`.
fn sequential_search(
    members: &[&StepFunction],
    index_of: &[usize],
    which: OscKind,
    agg: TailAgg,
    cfg: &SearchConfig,
    subsequence: Option<usize>,
    cases: &mut Vec<CaseReport>,
) {
    for b in &cfg.test_sets {
        let (subsets, level) = match subset_atoms(b, cfg.search_level, cfg) {
            Ok(s) => s,
            Err(e) => {
                for &eps in &cfg.eps_grid {
                    cases.push(CaseReport {
                        eps,
                        test_set: Some(b.clone()),
                        subsequence,
                        partition_level: None,
                        outcome: CaseOutcome::Skipped {
                            reason: e.to_string(),
                        },
                    });
                }
                continue;
            }
        };
        let tables: Vec<AtomTable> = members.par_iter().map(|f| AtomTable::new(f, level)).collect();
        let scores: Vec<TailScore> = subsets
            .par_iter()
            .map(|a| tail_score(&tables, which, agg, a, cfg.block_cap))
            .collect();
        for &eps in &cfg.eps_grid {
            let hit = scores.iter().position(|s| match agg {
                TailAgg::Min => s.value < eps,
                TailAgg::Max => !s.unknown && s.value < eps,
            });
            let outcome = match hit {
                Some(i) => CaseOutcome::Witness {
                    sets: vec![set_from_atoms(level, &subsets[i])],
                    value: scores[i].value.max(0.0),
                    index: Some(match agg {
                        TailAgg::Min => index_of[scores[i].at],
                        TailAgg::Max => index_of[0],
                    }),
                },
                None if scores.iter().any(|s| s.unknown) => CaseOutcome::Skipped {
                    reason: "Pettis enumeration cap exceeded on some candidate sets".into(),
                },
                None => CaseOutcome::Exhausted {
                    searched: subsets.len() as u64,
                    best: scores.iter().map(|s| s.value).fold(f64::INFINITY, f64::min),
                    member: None,
                },
            };
            cases.push(CaseReport {
                eps,
                test_set: Some(b.clone()),
                subsequence,
                partition_level: None,
                outcome,
            });
        }
    }
}

fn resolution_of(len: usize, cfg: &SearchConfig) -> SearchResolution {
    SearchResolution {
        search_level: cfg.search_level,
        eps_grid: cfg.eps_grid.clone(),
        prefix: len,
        tail_from: cfg.tail_start(len) + 1,
        test_sets: cfg.test_sets.len(),
    }
}

fn sequential_check(
    seq: &FunctionSequence,
    cfg: &SearchConfig,
    which: OscKind,
    name: &str,
) -> Result<CriterionVerdict> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut runs: Vec<(Option<usize>, Vec<usize>)> = vec![(None, (1..=seq.len()).collect())];
    for (i, sub) in cfg.subsequences.iter().enumerate() {
        if sub.is_empty() || sub.iter().any(|&k| k == 0 || k > seq.len()) {
            return Err(Error::InvalidArgument(format!(
                "subsequence {i} has indices outside 1..={}",
                seq.len()
            )));
        }
        runs.push((Some(i), sub.clone()));
    }
    let mut cases = Vec::new();
    for (label, indices) in runs {
        let start = cfg.tail_start(indices.len());
        let tail_idx = &indices[start..];
        let tail: Vec<&StepFunction> = tail_idx.iter().map(|&k| &seq.members()[k - 1]).collect();
        sequential_search(&tail, tail_idx, which, TailAgg::Min, cfg, label, &mut cases);
    }
    Ok(CriterionVerdict::assemble(
        name,
        resolution_of(seq.len(), cfg),
        cases,
    ))
}

/// Sequential Bocce criterion with `liminf` replaced by the minimum over the
/// tail window.
pub fn sequential_bocce_check(seq: &FunctionSequence, cfg: &SearchConfig) -> Result<CriterionVerdict> {
    sequential_check(seq, cfg, OscKind::Bocce, "sequential_bocce")
}

pub fn sequential_pettis_bocce_check(
    seq: &FunctionSequence,
    cfg: &SearchConfig,
) -> Result<CriterionVerdict> {
    sequential_check(seq, cfg, OscKind::PettisBocce, "sequential_pettis_bocce")
}

/// Bocce criterion for a set: for each `(ε, B)` a finite collection of
/// subsets of `B` such that every member oscillates less than `ε` on one of
/// them. The collection is a greedy cover.
pub fn set_bocce_check(members: &[StepFunction], cfg: &SearchConfig) -> Result<CriterionVerdict> {
    if members.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut cases = Vec::new();
    for b in &cfg.test_sets {
        let (subsets, level) = match subset_atoms(b, cfg.search_level, cfg) {
            Ok(s) => s,
            Err(e) => {
                for &eps in &cfg.eps_grid {
                    cases.push(CaseReport {
                        eps,
                        test_set: Some(b.clone()),
                        subsequence: None,
                        partition_level: None,
                        outcome: CaseOutcome::Skipped {
                            reason: e.to_string(),
                        },
                    });
                }
                continue;
            }
        };
        let tables: Vec<AtomTable> = members.par_iter().map(|f| AtomTable::new(f, level)).collect();
        // osc[a][j]: oscillation of member j on candidate a
        let osc: Vec<Vec<f64>> = subsets
            .par_iter()
            .map(|a| {
                tables
                    .iter()
                    .map(|t| t.osc(OscKind::Bocce, a, cfg.block_cap).unwrap_or(f64::INFINITY))
                    .collect()
            })
            .collect();
        for &eps in &cfg.eps_grid {
            let uncoverable = (0..members.len()).find(|&j| osc.iter().all(|row| row[j] >= eps));
            let outcome = match uncoverable {
                Some(j) => CaseOutcome::Exhausted {
                    searched: subsets.len() as u64,
                    best: osc.iter().map(|row| row[j]).fold(f64::INFINITY, f64::min),
                    member: Some(j + 1),
                },
                None => {
                    let mut covered = vec![false; members.len()];
                    let mut chosen = Vec::new();
                    let mut worst = 0.0f64;
                    while covered.iter().any(|c| !c) {
                        let (best, _) = osc
                            .iter()
                            .enumerate()
                            .map(|(a, row)| {
                                let gain = row
                                    .iter()
                                    .zip(&covered)
                                    .filter(|(v, c)| !**c && **v < eps)
                                    .count();
                                (a, gain)
                            })
                            .fold((0, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
                        for (j, c) in covered.iter_mut().enumerate() {
                            if !*c && osc[best][j] < eps {
                                *c = true;
                                worst = worst.max(osc[best][j]);
                            }
                        }
                        chosen.push(set_from_atoms(level, &subsets[best]));
                    }
                    CaseOutcome::Witness {
                        sets: chosen,
                        value: worst,
                        index: None,
                    }
                }
            };
            cases.push(CaseReport {
                eps,
                test_set: Some(b.clone()),
                subsequence: None,
                partition_level: None,
                outcome,
            });
        }
    }
    Ok(CriterionVerdict::assemble(
        "set_bocce",
        resolution_of(members.len(), cfg),
        cases,
    ))
}

/// (B0): some `C ⊆ B` on which every tail member oscillates less than `ε`.
pub fn b0_check(seq: &FunctionSequence, cfg: &SearchConfig) -> Result<CriterionVerdict> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let start = cfg.tail_start(seq.len());
    let tail_idx: Vec<usize> = (start + 1..=seq.len()).collect();
    let tail: Vec<&StepFunction> = seq.members()[start..].iter().collect();
    let mut cases = Vec::new();
    sequential_search(&tail, &tail_idx, OscKind::Bocce, TailAgg::Max, cfg, None, &mut cases);
    Ok(CriterionVerdict::assemble("b0", resolution_of(seq.len(), cfg), cases))
}

/// (B1): a partition into the atoms of some candidate level, the atoms with
/// large tail oscillation forming `A_0`, with `µ(A_0) < ε`.
pub fn b1_check(seq: &FunctionSequence, cfg: &SearchConfig) -> Result<CriterionVerdict> {
    partition_check(seq, cfg, 0, "b1")
}

/// (B2): as (B1), but every union of sub-blocks `sub_depth` levels below a
/// regular atom must also oscillate less than `ε`.
pub fn b2_check(seq: &FunctionSequence, cfg: &SearchConfig) -> Result<CriterionVerdict> {
    partition_check(seq, cfg, cfg.sub_depth, "b2")
}

fn partition_check(
    seq: &FunctionSequence,
    cfg: &SearchConfig,
    depth: u32,
    name: &str,
) -> Result<CriterionVerdict> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let start = cfg.tail_start(seq.len());
    let tail = &seq.members()[start..];
    let sub_count = 1usize << depth;
    let sub_masks: Vec<Vec<usize>> = (1u64..1u64 << sub_count)
        .map(|m| (0..sub_count).filter(|b| m >> b & 1 == 1).collect())
        .collect();

    // bad-atom sets per candidate level, independent of ε only through the
    // tail maxima, so compute those once
    let mut per_level: Vec<(u32, std::result::Result<Vec<f64>, String>)> = Vec::new();
    for &level in &cfg.partition_levels {
        let fine = level + depth;
        let maxima = cfg.resolution.check(fine).map_err(|e| e.to_string()).map(|_| {
            let tables: Vec<AtomTable> = tail.par_iter().map(|f| AtomTable::new(f, fine)).collect();
            (0..1usize << level)
                .into_par_iter()
                .map(|i| {
                    sub_masks
                        .iter()
                        .map(|sub| {
                            let atoms: Vec<usize> = sub.iter().map(|s| i * sub_count + s).collect();
                            tables
                                .iter()
                                .map(|t| t.osc(OscKind::Bocce, &atoms, cfg.block_cap).unwrap_or(f64::INFINITY))
                                .fold(0.0, f64::max)
                        })
                        .fold(0.0, f64::max)
                })
                .collect()
        });
        per_level.push((level, maxima));
    }

    let mut cases = Vec::new();
    for &eps in &cfg.eps_grid {
        let mut outcome = None;
        let mut best = f64::INFINITY;
        let mut skipped = None;
        for (level, maxima) in &per_level {
            let maxima = match maxima {
                Ok(m) => m,
                Err(e) => {
                    skipped.get_or_insert_with(|| e.clone());
                    continue;
                }
            };
            let bad: Vec<usize> = (0..maxima.len()).filter(|&i| maxima[i] >= eps).collect();
            let a0 = set_from_atoms(*level, &bad);
            let mu0 = a0.measure().to_f64();
            best = best.min(mu0);
            if mu0 < eps {
                outcome = Some((
                    *level,
                    CaseOutcome::Witness {
                        sets: vec![a0],
                        value: mu0,
                        index: Some(start + 1),
                    },
                ));
                break;
            }
        }
        let (level, outcome) = match (outcome, skipped) {
            (Some(o), _) => (Some(o.0), o.1),
            (None, Some(reason)) => (None, CaseOutcome::Skipped { reason }),
            (None, None) => (
                None,
                CaseOutcome::Exhausted {
                    searched: per_level.len() as u64,
                    best,
                    member: None,
                },
            ),
        };
        cases.push(CaseReport {
            eps,
            test_set: None,
            subsequence: None,
            partition_level: level,
            outcome,
        });
    }
    Ok(CriterionVerdict::assemble(name, resolution_of(seq.len(), cfg), cases))
}

/// Small Bocce oscillation of a set: for each `ε` a candidate level whose
/// atom partition gives every member a weighted oscillation below `ε`.
pub fn small_bocce_set_check(members: &[StepFunction], cfg: &SearchConfig) -> Result<CriterionVerdict> {
    if members.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut totals = Vec::new();
    for &level in &cfg.partition_levels {
        cfg.resolution.check(level)?;
        let pi = DyadicPartition::atoms(level)?;
        let worst = members
            .par_iter()
            .map(|f| small_bocce_osc(f, &pi))
            .reduce(|| 0.0, f64::max);
        totals.push((level, worst));
    }
    let cases = cfg
        .eps_grid
        .iter()
        .map(|&eps| {
            let hit = totals.iter().find(|t| t.1 < eps);
            let (level, outcome) = match hit {
                Some(&(level, v)) => (
                    Some(level),
                    CaseOutcome::Witness {
                        sets: Vec::new(),
                        value: v,
                        index: None,
                    },
                ),
                None => (
                    None,
                    CaseOutcome::Exhausted {
                        searched: totals.len() as u64,
                        best: totals.iter().map(|t| t.1).fold(f64::INFINITY, f64::min),
                        member: None,
                    },
                ),
            };
            CaseReport {
                eps,
                test_set: None,
                subsequence: None,
                partition_level: level,
                outcome,
            }
        })
        .collect();
    Ok(CriterionVerdict::assemble(
        "small_bocce_set",
        resolution_of(members.len(), cfg),
        cases,
    ))
}

/// Brute-force form of the vanishing lemma for a non-negative real step
/// function of level at most 4.
#[derive(Debug, Clone, Serialize)]
pub struct VanishingReport {
    /// Every nonempty `B` contains a nonempty `A` with `m_A(φ) < ε`, for
    /// every `ε` of the grid.
    pub premise: bool,
    pub eps0: f64,
    pub max_value: f64,
    /// `max φ < 2ε₀`.
    pub conclusion: bool,
}

pub fn vanishing_check(phi: &StepFunction, eps_grid: &[f64]) -> Result<VanishingReport> {
    let level = phi.level();
    if level > 4 {
        return Err(Error::EnumerationOverflow {
            atoms: 1 << level,
            cap: 16,
        });
    }
    let vals: Vec<f64> = phi.values().iter().map(|v| v.as_scalar()).collect();
    if vals.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidFunction("expected a non-negative function".into()));
    }
    let full: u32 = ((1u64 << vals.len()) - 1) as u32;
    let avg = |mask: u32| {
        let mut s = 0.0;
        let mut m = mask;
        while m != 0 {
            s += vals[m.trailing_zeros() as usize];
            m &= m - 1;
        }
        s / mask.count_ones() as f64
    };
    let premise = eps_grid.iter().all(|&eps| {
        (1..=full).all(|b| {
            // ascending submasks of b
            let mut a = b & b.wrapping_neg();
            loop {
                if avg(a) < eps {
                    return true;
                }
                if a == b {
                    return false;
                }
                a = (a.wrapping_sub(b)) & b;
            }
        })
    });
    let eps0 = eps_grid.iter().copied().fold(f64::INFINITY, f64::min);
    let max_value = vals.iter().copied().fold(0.0, f64::max);
    Ok(VanishingReport {
        premise,
        eps0,
        max_value,
        conclusion: max_value < 2.0 * eps0,
    })
}
