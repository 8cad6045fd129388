//! Tightness witnesses with constant compact sets, the biting decomposition
//! and the composite checks relating them to strong convergence.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::convergence::{compute_trends, verdict_truth, window_max, LatticeConfig};
use crate::dyadic::DyadicSet;
use crate::error::Result;
use crate::functionals::{measure_deviation, ui_cutoff, ui_modulus, ui_modulus_of, ModulusCurve};
use crate::oscillation::{default_eps_grid, sequential_bocce_check};
use crate::seq::{SeqVec, SpaceKind};
use crate::stepfn::{FunctionSequence, StepFunction};

/// Constant compact set `K` standing in for the multifunction `F_ε`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CompactSet {
    /// `{x : ‖x‖ ≤ radius, x supported in 0..=dimension}`.
    ConstantBall { radius: f64, dimension: u64 },
    FiniteSet { points: Vec<SeqVec> },
}

impl CompactSet {
    pub fn contains(&self, x: &SeqVec, kind: SpaceKind) -> bool {
        match self {
            CompactSet::ConstantBall { radius, dimension } => {
                x.norm(kind) <= *radius && x.max_index().map_or(true, |m| m <= *dimension)
            }
            CompactSet::FiniteSet { points } => points.contains(x),
        }
    }
}

/// `µ{ω : f(ω) ∉ K}`, exact.
pub fn escape(f: &StepFunction, set: &CompactSet) -> f64 {
    let w = (-(f.level() as f64)).exp2();
    f.values().iter().filter(|v| !set.contains(v, f.kind())).count() as f64 * w
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessWitness {
    pub eps: f64,
    #[serde(flatten)]
    pub set: CompactSet,
    /// Escape measure of each member.
    pub escape: Vec<f64>,
}

impl TightnessWitness {
    pub fn max_escape(&self) -> f64 {
        self.escape.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TightnessOutcome {
    Found(TightnessWitness),
    /// Smallest achievable max escape over the grid and where it is reached.
    NotFound {
        eps: f64,
        min_escape: f64,
        radius: f64,
        dimension: u64,
    },
}

impl TightnessOutcome {
    pub fn eps(&self) -> f64 {
        match self {
            TightnessOutcome::Found(w) => w.eps,
            TightnessOutcome::NotFound { eps, .. } => *eps,
        }
    }

    pub fn witness(&self) -> Option<&TightnessWitness> {
        match self {
            TightnessOutcome::Found(w) => Some(w),
            TightnessOutcome::NotFound { .. } => None,
        }
    }
}

/// Tight at every grid `ε`.
pub fn is_tight(outcomes: &[TightnessOutcome]) -> bool {
    !outcomes.is_empty() && outcomes.iter().all(|o| o.witness().is_some())
}

#[derive(Debug, Clone)]
pub struct TightnessGrid {
    pub eps: Vec<f64>,
    pub radii: Vec<f64>,
    pub dims: Vec<u64>,
}

impl Default for TightnessGrid {
    /// `ε ∈ {2^-1, …, 2^-6}`, `R ∈ {0} ∪ {2^0, …, 2^20}`, `d ∈ {0, …, 5}`.
    fn default() -> Self {
        TightnessGrid {
            eps: default_eps_grid(),
            radii: std::iter::once(0.0).chain((0..=20).map(|j| (j as f64).exp2())).collect(),
            dims: (0..=5).collect(),
        }
    }
}

/// Per-member `(norm, largest coordinate)` of every atom value.
fn atom_profile(f: &StepFunction) -> (f64, Vec<(f64, u64)>) {
    let w = (-(f.level() as f64)).exp2();
    let rows = f
        .values()
        .iter()
        .map(|v| (v.norm(f.kind()), v.max_index().unwrap_or(0)))
        .collect();
    (w, rows)
}

/// Smallest `(d, R)` in the grid, `d` first, whose ball keeps every member's
/// escape at most `ε`.
pub fn tightness_search(seq: &FunctionSequence, grid: &TightnessGrid) -> Vec<TightnessOutcome> {
    let mut dims = grid.dims.clone();
    dims.sort_unstable();
    let mut radii = grid.radii.clone();
    radii.sort_by(f64::total_cmp);
    let profiles: Vec<_> = seq.members().iter().map(atom_profile).collect();
    let max_escape = |r: f64, d: u64| {
        profiles
            .iter()
            .map(|(w, rows)| rows.iter().filter(|(n, m)| *n > r || *m > d).count() as f64 * w)
            .fold(0.0, f64::max)
    };
    let table: Vec<(u64, f64, f64)> = dims
        .iter()
        .flat_map(|&d| radii.iter().map(move |&r| (d, r)))
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&(d, r)| (d, r, max_escape(r, d)))
        .collect();
    grid.eps
        .iter()
        .map(|&eps| match table.iter().find(|t| t.2 <= eps) {
            Some(&(d, r, _)) => {
                let set = CompactSet::ConstantBall {
                    radius: r,
                    dimension: d,
                };
                TightnessOutcome::Found(TightnessWitness {
                    eps,
                    escape: seq.members().iter().map(|f| escape(f, &set)).collect(),
                    set,
                })
            }
            None => {
                let best = table
                    .iter()
                    .min_by(|a, b| a.2.total_cmp(&b.2))
                    .copied()
                    .unwrap_or((0, 0.0, 1.0));
                TightnessOutcome::NotFound {
                    eps,
                    min_escape: best.2,
                    radius: best.1,
                    dimension: best.0,
                }
            }
        })
        .collect()
}

/// Finite-set witness from in-measure convergence: the values of `f_0`, all
/// values of members before the settling index `N`, and the values of later
/// members within `ε` of `f_0`. `N` is the first index after which every
/// `µ{‖f_k − f_0‖ > ε} ≤ ε`. Returns `N` (one-based) with the witness.
pub fn finite_set_witness(seq: &FunctionSequence, eps: f64) -> Result<(usize, TightnessWitness)> {
    let f0 = seq.require_limit()?;
    let kind = seq.kind();
    let devs = seq
        .members()
        .iter()
        .map(|f| measure_deviation(f, f0, eps).map(|d| d.to_f64()))
        .collect::<Result<Vec<_>>>()?;
    let settle = devs.iter().rposition(|&d| d > eps).map_or(0, |i| i + 1);
    let mut points: BTreeMap<Vec<(u64, u64)>, SeqVec> = BTreeMap::new();
    let mut add = |v: &SeqVec| {
        points.entry(v.bit_key()).or_insert_with(|| v.clone());
    };
    f0.values().iter().for_each(&mut add);
    for (i, f) in seq.members().iter().enumerate() {
        if i < settle {
            f.values().iter().for_each(&mut add);
        } else {
            let level = f.level().max(f0.level());
            for j in 0..1usize << level {
                let v = f.value_at(level, j);
                if v.sub(f0.value_at(level, j)).norm(kind) <= eps {
                    add(v);
                }
            }
        }
    }
    let set = CompactSet::FiniteSet {
        points: points.into_values().collect(),
    };
    let escape = seq.members().iter().map(|f| escape(f, &set)).collect();
    Ok((settle + 1, TightnessWitness { eps, set, escape }))
}

#[derive(Debug, Clone, Copy)]
pub struct BitingSchedule {
    /// Target fraction in `c_n = n · sup_k ‖f_k‖₁ / τ`.
    pub tau: f64,
    pub tol: f64,
}

impl Default for BitingSchedule {
    fn default() -> Self {
        BitingSchedule {
            tau: 0.5,
            tol: crate::convergence::DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BitingDecomposition {
    pub subsequence: Vec<usize>,
    pub thresholds: Vec<f64>,
    /// The prefix was already uniformly integrable, so nothing is bitten off.
    pub uniform: bool,
    pub sets: Vec<DyadicSet>,
    pub set_measures: Vec<f64>,
    pub monotone: bool,
    /// `‖f_n 1_{A_n}‖₁`.
    pub bitten_l1: Vec<f64>,
    pub bitten_ui: ModulusCurve,
    /// `µ(Ω \ A_n)`.
    pub removed_measure: Vec<f64>,
    /// `µ{‖f_n 1_{Ω∖A_n}‖ > √tol}`.
    pub removed_deviation: Vec<f64>,
    /// `‖f_n 1_{A_n} − f_0‖₁` when a limit is present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bitten_deviation: Option<Vec<f64>>,
}

/// `A_n = ∩_{m ≥ n} [‖f_m‖ < c_m]` over the prefix with `c_n = n M / τ`, or
/// `A_n = Ω` when the prefix is uniformly integrable at tolerance. The
/// subsequence is the whole prefix.
pub fn biting_decompose(seq: &FunctionSequence, schedule: &BitingSchedule) -> BitingDecomposition {
    let members = seq.members();
    let len = members.len();
    let bound = seq.sup_l1_norm();
    let thresholds: Vec<f64> = (1..=len).map(|n| n as f64 * bound / schedule.tau).collect();
    let uniform = bound == 0.0 || ui_modulus(seq, &[ui_cutoff(len)]).tail() < schedule.tol;
    let omega = DyadicSet::full(0).expect("level 0");
    let mut sets = vec![omega.clone(); len];
    if !uniform {
        let mut acc = omega.clone();
        for n in (0..len).rev() {
            let f = &members[n];
            let kind = f.kind();
            let small = DyadicSet::from_atoms(
                f.level(),
                (0..f.values().len()).filter(|&j| f.values()[j].norm(kind) < thresholds[n]),
            )
            .expect("member level");
            acc = acc.intersection(&small);
            sets[n] = acc.clone();
        }
    }
    let set_measures: Vec<f64> = sets.iter().map(|a| a.measure().to_f64()).collect();
    let monotone = sets.windows(2).all(|w| w[0].is_subset(&w[1]));
    let bitten: Vec<StepFunction> = members.iter().zip(&sets).map(|(f, a)| f.restrict(a)).collect();
    let removed: Vec<StepFunction> = members
        .iter()
        .zip(&sets)
        .map(|(f, a)| f.restrict(&a.complement()))
        .collect();
    let k = len as i32;
    let ui_thresholds: Vec<f64> = (0..=k).map(|j| (j as f64).exp2()).collect();
    let eta = schedule.tol.sqrt();
    let zero = StepFunction::zero(seq.kind());
    BitingDecomposition {
        subsequence: (1..=len).collect(),
        thresholds,
        uniform,
        bitten_l1: bitten.iter().map(|f| f.l1_norm()).collect(),
        bitten_ui: ui_modulus_of(&bitten, &ui_thresholds),
        removed_measure: set_measures.iter().map(|m| 1.0 - m).collect(),
        removed_deviation: removed
            .iter()
            .map(|f| measure_deviation(f, &zero, eta).expect("same kind").to_f64())
            .collect(),
        bitten_deviation: seq.limit().map(|f0| {
            bitten
                .iter()
                .map(|b| b.sub(f0).expect("same kind").l1_norm())
                .collect()
        }),
        sets,
        set_measures,
        monotone,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Premises hold exactly when the conclusion does.
    Iff,
    /// Premises imply the conclusion.
    Forward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Agreement {
    Consistent,
    Inconsistent,
    Undetermined,
}

/// Agreement between observed premises and conclusion at the report's
/// resolution; not a proof of either.
#[derive(Debug, Clone, Serialize)]
pub struct TheoremCheck {
    pub theorem: String,
    pub direction: Direction,
    /// `null` where a criterion search was inconclusive.
    pub premises: BTreeMap<String, Option<bool>>,
    pub conclusion: bool,
    pub agreement: Agreement,
    pub note: String,
}

fn judge(theorem: &str, direction: Direction, premises: BTreeMap<String, Option<bool>>, conclusion: bool) -> TheoremCheck {
    let any_false = premises.values().any(|p| *p == Some(false));
    let all_true = premises.values().all(|p| *p == Some(true));
    let (agreement, note) = match (direction, any_false, all_true, conclusion) {
        (_, true, _, false) => (Agreement::Consistent, "a premise fails and so does the conclusion"),
        (Direction::Forward, true, _, true) => (Agreement::Consistent, "a premise fails, no claim"),
        (Direction::Iff, true, _, true) => (Agreement::Inconsistent, "conclusion holds but a premise fails"),
        (_, _, true, true) => (Agreement::Consistent, "premises and conclusion hold"),
        (_, _, true, false) => (Agreement::Inconsistent, "premises hold but the conclusion fails"),
        (Direction::Forward, _, _, false) | (Direction::Iff, _, _, _) => {
            (Agreement::Undetermined, "a premise is inconclusive at this resolution")
        }
        (Direction::Forward, _, _, true) => (Agreement::Consistent, "conclusion holds"),
    };
    TheoremCheck {
        theorem: theorem.to_string(),
        direction,
        premises,
        conclusion,
        agreement,
        note: note.to_string(),
    }
}

/// Strong convergence against weak convergence, the sequential Bocce
/// criterion and tightness.
pub fn strong_iff_from(strong: bool, weak: bool, bocce: Option<bool>, tight: bool) -> TheoremCheck {
    let premises = BTreeMap::from([
        ("weak".to_string(), Some(weak)),
        ("sequential_bocce".to_string(), bocce),
        ("tight".to_string(), Some(tight)),
    ]);
    judge("strong_iff_weak_bocce_tight", Direction::Iff, premises, strong)
}

/// Bounded, tight and Bocce imply that the bitten parts converge strongly
/// and the removed parts vanish in measure.
pub fn strong_biting_from(tight: bool, bocce: Option<bool>, bite: &BitingDecomposition, tol: f64) -> TheoremCheck {
    let premises = BTreeMap::from([
        ("bounded".to_string(), Some(true)),
        ("tight".to_string(), Some(tight)),
        ("sequential_bocce".to_string(), bocce),
    ]);
    let bitten = bite
        .bitten_deviation
        .as_ref()
        .map_or(false, |d| window_max(d) < tol);
    let removed = window_max(&bite.removed_deviation) < tol.sqrt();
    judge("strong_biting", Direction::Forward, premises, bitten && removed)
}

pub fn strong_iff_check(seq: &FunctionSequence, cfg: &LatticeConfig) -> Result<TheoremCheck> {
    let (_, flags) = compute_trends(seq, cfg)?;
    let bocce = sequential_bocce_check(seq, &cfg.search)?;
    let tight = is_tight(&tightness_search(seq, &cfg.tightness));
    Ok(strong_iff_from(flags.strong, flags.weak, verdict_truth(bocce.status), tight))
}

pub fn strong_biting_check(seq: &FunctionSequence, cfg: &LatticeConfig) -> Result<TheoremCheck> {
    seq.require_limit()?;
    let bocce = sequential_bocce_check(seq, &cfg.search)?;
    let tight = is_tight(&tightness_search(seq, &cfg.tightness));
    let bite = biting_decompose(seq, &cfg.biting);
    Ok(strong_biting_from(tight, verdict_truth(bocce.status), &bite, cfg.tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;
    use crate::gallery;
    use crate::stepfn::REAL_KIND;

    #[test]
    fn ex34_is_tight_on_the_grid() {
        let s = gallery::gen_ex34(8).unwrap();
        let out = tightness_search(&s, &TightnessGrid::default());
        assert!(is_tight(&out));
        for o in &out {
            let w = o.witness().unwrap();
            assert!(w.max_escape() <= w.eps);
            let m = (-w.eps.log2()) as u64;
            assert_eq!(
                w.set,
                CompactSet::ConstantBall {
                    radius: if m == 1 { 0.0 } else { ((m - 1) as f64).exp2() },
                    dimension: m - 1
                }
            );
        }
    }

    #[test]
    fn ex32_is_not_tight() {
        let s = gallery::gen_ex32(6).unwrap();
        let grid = TightnessGrid {
            eps: vec![0.5],
            ..TightnessGrid::default()
        };
        let out = tightness_search(&s, &grid);
        assert!(matches!(out[0], TightnessOutcome::NotFound { min_escape, .. } if min_escape == 1.0));
        let ball = CompactSet::ConstantBall {
            radius: 1e6,
            dimension: 3,
        };
        for (k, f) in s.members().iter().enumerate() {
            assert_eq!(escape(f, &ball), if k + 1 > 3 { 1.0 } else { 0.0 });
        }
    }

    #[test]
    fn zero_sequence_needs_nothing() {
        let z = StepFunction::zero(SpaceKind::L1);
        let s = FunctionSequence::new(vec![z.clone(); 4], Some(z), "zero").unwrap();
        let out = tightness_search(&s, &TightnessGrid::default());
        assert!(out.iter().all(|o| o.witness().unwrap().set
            == CompactSet::ConstantBall {
                radius: 0.0,
                dimension: 0
            }));
        let b = biting_decompose(&s, &BitingSchedule::default());
        assert!(b.uniform && b.set_measures.iter().all(|&m| m == 1.0));
    }

    #[test]
    fn spike_biting_is_exact() {
        let s = gallery::gen_spike(10).unwrap();
        let b = biting_decompose(&s, &BitingSchedule::default());
        assert!(!b.uniform && b.monotone);
        for (i, a) in b.sets.iter().enumerate() {
            let n = i as u32 + 1;
            let expected = DyadicSet::atom(n, 0).unwrap().complement();
            assert!(a.same_points(&expected), "A_{n}");
            assert_eq!(b.bitten_l1[i], 0.0);
            assert_eq!(b.removed_measure[i], Dyadic::pow2_neg(n).to_f64());
        }
    }

    #[test]
    fn finite_set_witness_ex34() {
        let s = gallery::gen_ex34(8).unwrap();
        let (settle, w) = finite_set_witness(&s, 0.125).unwrap();
        assert_eq!(settle, 3);
        let CompactSet::FiniteSet { points } = &w.set else { panic!() };
        let mut expected = vec![SeqVec::zero(), SeqVec::unit(1).scale(2.0), SeqVec::unit(2).scale(4.0)];
        expected.sort_by_key(|v| v.bit_key());
        assert_eq!(points, &expected);
        assert!(w.max_escape() <= 0.125);
    }

    #[test]
    fn theorem_checks_on_gallery() {
        let cfg = LatticeConfig::default();
        let t = strong_iff_check(&gallery::gen_ex32(6).unwrap(), &cfg).unwrap();
        assert_eq!(t.premises["tight"], Some(false));
        assert!(!t.conclusion);
        assert_eq!(t.agreement, Agreement::Consistent);

        let f0 = StepFunction::real(1, &[1.0, -1.0]).unwrap();
        let members = (1..=6)
            .map(|k| f0.add(&StepFunction::constant(SeqVec::scalar((-(k as f64)).exp2()), REAL_KIND)).unwrap())
            .collect();
        let s = FunctionSequence::new(members, Some(f0), "convergent").unwrap();
        let t = strong_iff_check(&s, &cfg).unwrap();
        assert!(t.conclusion && t.premises.values().all(|p| *p == Some(true)));
        assert_eq!(t.agreement, Agreement::Consistent);
        let t = strong_biting_check(&s, &cfg).unwrap();
        assert_eq!(t.agreement, Agreement::Consistent);
        assert!(t.conclusion);

        let e = gallery::by_name("ex34", 8).unwrap();
        let cfg34 = cfg.clone().with_duals(e.duals);
        let t = strong_iff_check(&e.sequence, &cfg34).unwrap();
        assert_eq!(t.premises["weak"], Some(false));
        assert_eq!(t.agreement, Agreement::Consistent);
    }
}
