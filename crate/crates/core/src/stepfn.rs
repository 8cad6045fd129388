//! Vector-valued simple functions on the dyadic space.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::dyadic::{Dyadic, DyadicPartition, DyadicSet, Resolution, LEVEL_CEILING};
use crate::error::{Error, Result};
use crate::seq::{Accumulator, Functional, SeqVec, SpaceKind};

/// Kind attached to real-valued step functions (values at coordinate 0, so
/// every ℓᵖ norm reduces to the absolute value).
pub const REAL_KIND: SpaceKind = SpaceKind::L2;

/// Function constant on each atom `I^level_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawStepFunction")]
pub struct StepFunction {
    level: u32,
    kind: SpaceKind,
    values: Vec<SeqVec>,
}

#[derive(Deserialize)]
struct RawStepFunction {
    level: u32,
    kind: SpaceKind,
    values: Vec<SeqVec>,
}

impl TryFrom<RawStepFunction> for StepFunction {
    type Error = Error;

    fn try_from(raw: RawStepFunction) -> Result<Self> {
        StepFunction::new(raw.level, raw.kind, raw.values)
    }
}

/// One distinct value of a step function together with the measure of the
/// set where it is taken (restricted to some set `A`).
#[derive(Debug, Clone, PartialEq)]
pub struct ValueBlock {
    pub value: SeqVec,
    pub weight: f64,
}

impl StepFunction {
    pub fn new(level: u32, kind: SpaceKind, values: Vec<SeqVec>) -> Result<Self> {
        if level > LEVEL_CEILING {
            return Err(Error::ResolutionOverflow {
                level,
                max: LEVEL_CEILING,
            });
        }
        if values.len() != 1usize << level {
            return Err(Error::InvalidFunction(format!(
                "level {level} needs {} values, got {}",
                1usize << level,
                values.len()
            )));
        }
        if values
            .iter()
            .any(|v| v.entries().iter().any(|e| !e.1.is_finite()))
        {
            return Err(Error::InvalidFunction("non-finite value".into()));
        }
        Ok(StepFunction {
            level,
            kind,
            values,
        })
    }

    pub fn from_fn(level: u32, kind: SpaceKind, f: impl FnMut(usize) -> SeqVec) -> Result<Self> {
        if level > LEVEL_CEILING {
            return Err(Error::ResolutionOverflow {
                level,
                max: LEVEL_CEILING,
            });
        }
        StepFunction::new(level, kind, (0..1usize << level).map(f).collect())
    }

    pub fn constant(v: SeqVec, kind: SpaceKind) -> Self {
        StepFunction {
            level: 0,
            kind,
            values: vec![v],
        }
    }

    pub fn zero(kind: SpaceKind) -> Self {
        StepFunction::constant(SeqVec::zero(), kind)
    }

    /// `v · 1_set`.
    pub fn indicator(set: &DyadicSet, v: SeqVec, kind: SpaceKind) -> Self {
        let level = set.level();
        let values = (0..1usize << level)
            .map(|i| {
                if set.contains_atom(i) {
                    v.clone()
                } else {
                    SeqVec::zero()
                }
            })
            .collect();
        StepFunction {
            level,
            kind,
            values,
        }
    }

    /// Real-valued function from per-atom values.
    pub fn real(level: u32, values: &[f64]) -> Result<Self> {
        StepFunction::new(
            level,
            REAL_KIND,
            values.iter().map(|&x| SeqVec::scalar(x)).collect(),
        )
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn values(&self) -> &[SeqVec] {
        &self.values
    }

    /// Value on atom `j` of a level `level ≥ self.level()`.
    pub fn value_at(&self, level: u32, j: usize) -> &SeqVec {
        debug_assert!(level >= self.level);
        &self.values[j >> (level - self.level)]
    }

    pub fn refine(&self, level: u32, resolution: &Resolution) -> Result<Self> {
        if level < self.level {
            return Err(Error::InvalidArgument(format!(
                "cannot refine a level-{} function to level {level}",
                self.level
            )));
        }
        resolution.check(level)?;
        Ok(self.refine_to(level))
    }

    pub(crate) fn refine_to(&self, level: u32) -> Self {
        if level == self.level {
            return self.clone();
        }
        let values = (0..1usize << level)
            .map(|j| self.value_at(level, j).clone())
            .collect();
        StepFunction {
            level,
            kind: self.kind,
            values,
        }
    }

    /// Smallest level at which the function is still exactly represented.
    pub fn coarsen(&self) -> Self {
        let mut f = self.clone();
        while f.level > 0 {
            let pairs_equal = f.values.chunks(2).all(|c| c[0] == c[1]);
            if !pairs_equal {
                break;
            }
            f = StepFunction {
                level: f.level - 1,
                kind: f.kind,
                values: f.values.chunks(2).map(|c| c[0].clone()).collect(),
            };
        }
        f
    }

    /// `alpha · self + beta · other`, at the finer of the two levels.
    pub fn combine(&self, alpha: f64, other: &StepFunction, beta: f64) -> Result<Self> {
        self.kind.ensure(other.kind)?;
        let level = self.level.max(other.level);
        let values = (0..1usize << level)
            .map(|j| {
                self.value_at(level, j)
                    .scale(alpha)
                    .axpy(beta, other.value_at(level, j))
            })
            .collect();
        Ok(StepFunction {
            level,
            kind: self.kind,
            values,
        })
    }

    pub fn add(&self, other: &StepFunction) -> Result<Self> {
        self.combine(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &StepFunction) -> Result<Self> {
        self.combine(1.0, other, -1.0)
    }

    pub fn scale(&self, alpha: f64) -> Self {
        StepFunction {
            level: self.level,
            kind: self.kind,
            values: self.values.iter().map(|v| v.scale(alpha)).collect(),
        }
    }

    /// `∫_A f dµ`.
    pub fn integral(&self, set: &DyadicSet) -> SeqVec {
        let mut acc = Accumulator::default();
        for (i, w) in set.cell_weights(self.level) {
            acc.add_scaled(w, &self.values[i]);
        }
        acc.finish()
    }

    /// `m_A(f)`, with `0/0 = 0`.
    pub fn average(&self, set: &DyadicSet) -> SeqVec {
        let mu = set.measure();
        if mu.is_zero() {
            return SeqVec::zero();
        }
        self.integral(set).scale(1.0 / mu.to_f64())
    }

    /// `∫_A ‖f‖ dµ`.
    pub fn norm_integral(&self, set: &DyadicSet) -> f64 {
        set.cell_weights(self.level)
            .into_iter()
            .map(|(i, w)| w * self.values[i].norm(self.kind))
            .sum()
    }

    /// `‖f‖₁ = ∫_Ω ‖f‖ dµ`.
    pub fn l1_norm(&self) -> f64 {
        let w = (-(self.level as f64)).exp2();
        self.values.iter().map(|v| v.norm(self.kind)).sum::<f64>() * w
    }

    /// `ω ↦ ‖f(ω)‖` as a real-valued step function.
    pub fn pointwise_norm(&self) -> StepFunction {
        StepFunction {
            level: self.level,
            kind: REAL_KIND,
            values: self
                .values
                .iter()
                .map(|v| SeqVec::scalar(v.norm(self.kind)))
                .collect(),
        }
    }

    /// Essential supremum of `‖f‖`.
    pub fn sup_norm(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.norm(self.kind))
            .fold(0.0, f64::max)
    }

    /// Largest coordinate index used by any value.
    pub fn support_dimension(&self) -> Option<u64> {
        self.values.iter().filter_map(|v| v.max_index()).max()
    }

    /// `f · 1_[‖f‖ ≤ n]`.
    pub fn truncate(&self, n: f64) -> StepFunction {
        StepFunction {
            level: self.level,
            kind: self.kind,
            values: self
                .values
                .iter()
                .map(|v| {
                    if v.norm(self.kind) <= n {
                        v.clone()
                    } else {
                        SeqVec::zero()
                    }
                })
                .collect(),
        }
    }

    /// `f · 1_A`, at the finer of the two levels.
    pub fn restrict(&self, set: &DyadicSet) -> StepFunction {
        let level = self.level.max(set.level());
        let set = set.refine_to(level);
        let values = (0..1usize << level)
            .map(|j| {
                if set.contains_atom(j) {
                    self.value_at(level, j).clone()
                } else {
                    SeqVec::zero()
                }
            })
            .collect();
        StepFunction {
            level,
            kind: self.kind,
            values,
        }
    }

    /// `E_π(f)`: constant on each block, equal to the block average.
    pub fn cond_expectation(&self, partition: &DyadicPartition) -> StepFunction {
        let level = self.level.max(partition.level());
        let shift = level - partition.level();
        let averages: Vec<SeqVec> = partition.blocks().iter().map(|b| self.average(b)).collect();
        let mut owner = vec![0usize; 1usize << partition.level()];
        for (bi, b) in partition.blocks().iter().enumerate() {
            for a in b.atoms() {
                owner[a] = bi;
            }
        }
        let values = (0..1usize << level)
            .map(|j| averages[owner[j >> shift]].clone())
            .collect();
        StepFunction {
            level,
            kind: self.kind,
            values,
        }
    }

    /// `ω ↦ x*(f(ω))`.
    pub fn scalarize(&self, functional: &Functional) -> Result<StepFunction> {
        functional.primal.ensure(self.kind)?;
        Ok(StepFunction {
            level: self.level,
            kind: REAL_KIND,
            values: self
                .values
                .iter()
                .map(|v| SeqVec::scalar(functional.coeffs.dot(v)))
                .collect(),
        })
    }

    /// Distinct values on `A` with the measure of the set where each is
    /// taken, in order of first occurrence. Blocks of zero weight are omitted.
    pub fn value_blocks(&self, set: &DyadicSet) -> Vec<ValueBlock> {
        let mut index: HashMap<Vec<(u64, u64)>, usize> = HashMap::new();
        let mut blocks: Vec<ValueBlock> = Vec::new();
        for (i, w) in set.cell_weights(self.level) {
            let v = &self.values[i];
            let slot = *index.entry(v.bit_key()).or_insert_with(|| {
                blocks.push(ValueBlock {
                    value: v.clone(),
                    weight: 0.0,
                });
                blocks.len() - 1
            });
            blocks[slot].weight += w;
        }
        blocks
    }

    /// Partition of `[0, 1)` into the level sets of `f`, in order of first
    /// occurrence of each value.
    pub fn constancy_partition(&self) -> DyadicPartition {
        let mut index: HashMap<Vec<(u64, u64)>, usize> = HashMap::new();
        let mut atoms: Vec<Vec<usize>> = Vec::new();
        for (i, v) in self.values.iter().enumerate() {
            let slot = *index.entry(v.bit_key()).or_insert_with(|| {
                atoms.push(Vec::new());
                atoms.len() - 1
            });
            atoms[slot].push(i);
        }
        let blocks = atoms
            .into_iter()
            .map(|a| DyadicSet::from_atoms(self.level, a).expect("level already validated"))
            .collect();
        DyadicPartition::new(blocks, None).expect("level sets partition the space")
    }

    /// `µ{ω : ‖f(ω) − g(ω)‖ > eps}`, exact.
    pub fn deviation_measure(&self, other: &StepFunction, eps: f64) -> Result<Dyadic> {
        self.kind.ensure(other.kind)?;
        let level = self.level.max(other.level);
        let count = (0..1usize << level)
            .filter(|&j| {
                self.value_at(level, j)
                    .sub(other.value_at(level, j))
                    .norm(self.kind)
                    > eps
            })
            .count();
        Ok(Dyadic::new(count as u64, level))
    }
}

/// Finite prefix `(f_1, …, f_K)` with an optional limit candidate `f_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSequence")]
pub struct FunctionSequence {
    label: String,
    members: Vec<StepFunction>,
    limit: Option<StepFunction>,
}

#[derive(Deserialize)]
struct RawSequence {
    #[serde(default)]
    label: String,
    members: Vec<StepFunction>,
    #[serde(default)]
    limit: Option<StepFunction>,
}

impl TryFrom<RawSequence> for FunctionSequence {
    type Error = Error;

    fn try_from(raw: RawSequence) -> Result<Self> {
        FunctionSequence::new(raw.members, raw.limit, raw.label)
    }
}

impl FunctionSequence {
    pub fn new(
        members: Vec<StepFunction>,
        limit: Option<StepFunction>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let first = members
            .first()
            .or(limit.as_ref())
            .ok_or(Error::EmptySequence)?;
        let kind = first.kind();
        for f in members.iter().chain(limit.iter()) {
            kind.ensure(f.kind())?;
        }
        Ok(FunctionSequence {
            label: label.into(),
            members,
            limit,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn members(&self) -> &[StepFunction] {
        &self.members
    }

    /// `f_k`, one-based.
    pub fn member(&self, k: usize) -> Option<&StepFunction> {
        k.checked_sub(1).and_then(|i| self.members.get(i))
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn kind(&self) -> SpaceKind {
        self.members
            .first()
            .or(self.limit.as_ref())
            .map(|f| f.kind())
            .expect("constructor rejects empty sequences")
    }

    pub fn limit(&self) -> Option<&StepFunction> {
        self.limit.as_ref()
    }

    pub fn require_limit(&self) -> Result<&StepFunction> {
        self.limit.as_ref().ok_or(Error::MissingLimit)
    }

    pub fn with_limit(mut self, limit: StepFunction) -> Result<Self> {
        self.kind().ensure(limit.kind())?;
        self.limit = Some(limit);
        Ok(self)
    }

    pub fn max_level(&self) -> u32 {
        self.members
            .iter()
            .chain(self.limit.iter())
            .map(|f| f.level())
            .max()
            .unwrap_or(0)
    }

    /// `f_k − f_0` for every member.
    pub fn deviations(&self) -> Result<Vec<StepFunction>> {
        let f0 = self.require_limit()?;
        self.members.iter().map(|f| f.sub(f0)).collect()
    }

    /// Sequence of `f_k − f_0` with the zero limit.
    pub fn centered(&self) -> Result<FunctionSequence> {
        let kind = self.kind();
        FunctionSequence::new(
            self.deviations()?,
            Some(StepFunction::zero(kind)),
            format!("{} - f0", self.label),
        )
    }

    /// `(f_k + g)` with limit `f_0 + g`.
    pub fn translate(&self, g: &StepFunction) -> Result<FunctionSequence> {
        let members = self.members.iter().map(|f| f.add(g)).collect::<Result<_>>()?;
        let limit = self.limit.as_ref().map(|f| f.add(g)).transpose()?;
        FunctionSequence::new(members, limit, format!("{} + g", self.label))
    }

    /// Subsequence by one-based indices.
    pub fn subsequence(&self, indices: &[usize]) -> Result<FunctionSequence> {
        let members = indices
            .iter()
            .map(|&k| {
                self.member(k)
                    .cloned()
                    .ok_or_else(|| Error::InvalidArgument(format!("no member f_{k}")))
            })
            .collect::<Result<Vec<_>>>()?;
        FunctionSequence::new(members, self.limit.clone(), format!("{} sub", self.label))
    }

    pub fn sup_l1_norm(&self) -> f64 {
        self.members.iter().map(|f| f.l1_norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega() -> DyadicSet {
        DyadicSet::full(0).unwrap()
    }

    fn ex34(k: u32) -> StepFunction {
        let atom = DyadicSet::atom(k, 0).unwrap();
        StepFunction::indicator(&atom, SeqVec::unit(k as u64).scale(2f64.powi(k as i32)), SpaceKind::L2)
    }

    fn rademacher_vec(i: u32, v: SeqVec) -> StepFunction {
        StepFunction::from_fn(i, SpaceKind::L2, |j| if j % 2 == 0 { v.clone() } else { v.scale(-1.0) })
            .unwrap()
    }

    #[test]
    fn integral_examples() {
        let v = SeqVec::from_pairs([(1, 2.0), (3, -1.0)]);
        let c = StepFunction::constant(v.clone(), SpaceKind::L2);
        assert_eq!(c.integral(&omega()), v);
        for k in 1..12 {
            assert_eq!(ex34(k).integral(&omega()), SeqVec::unit(k as u64));
        }
        assert!(ex34(3).integral(&DyadicSet::empty(3).unwrap()).is_zero());
    }

    #[test]
    fn average_examples() {
        let v = SeqVec::unit(1);
        let half = StepFunction::indicator(&DyadicSet::atom(1, 0).unwrap(), v.clone(), SpaceKind::L2);
        assert_eq!(half.average(&omega()), v.scale(0.5));
        assert!(half.average(&DyadicSet::empty(4).unwrap()).is_zero());
        let e3 = StepFunction::constant(SeqVec::unit(3), SpaceKind::L2);
        let a = DyadicSet::from_atoms(4, [1, 7, 9]).unwrap();
        assert_eq!(e3.average(&a), SeqVec::unit(3));
    }

    #[test]
    fn average_on_set_finer_than_function() {
        let f = StepFunction::real(1, &[2.0, 4.0]).unwrap();
        let a = DyadicSet::from_atoms(3, [3, 4]).unwrap();
        assert_eq!(f.average(&a).as_scalar(), 3.0);
    }

    #[test]
    fn l1_norm_examples() {
        for k in 0..12 {
            assert_eq!(ex34(k).l1_norm(), 1.0);
        }
        assert_eq!(StepFunction::zero(SpaceKind::L1).l1_norm(), 0.0);
        let f = ex34(4);
        assert_eq!(f.pointwise_norm().integral(&omega()).as_scalar(), f.l1_norm());
    }

    #[test]
    fn truncate_examples() {
        let f = ex34(5);
        assert_eq!(f.truncate(31.0).l1_norm(), 0.0);
        assert_eq!(f.truncate(32.0), f);
        assert_eq!(f.truncate(1e300), f);
        let e = StepFunction::constant(SeqVec::unit(2), SpaceKind::L2);
        assert_eq!(e.truncate(1.0), e);
    }

    #[test]
    fn cond_expectation_examples() {
        let v = SeqVec::unit(1);
        let r1 = rademacher_vec(1, v.clone());
        let trivial = r1.cond_expectation(&DyadicPartition::trivial());
        assert!(trivial.values().iter().all(SeqVec::is_zero));

        let f = ex34(3);
        assert_eq!(f.cond_expectation(&DyadicPartition::atoms(3).unwrap()), f);

        // f_1 of the orthonormal-spread example: e_3 on the left half, e_4 on the right
        let f1 = StepFunction::new(1, SpaceKind::L2, vec![SeqVec::unit(3), SeqVec::unit(4)]).unwrap();
        let halves = DyadicPartition::atoms(1).unwrap();
        assert_eq!(f1.cond_expectation(&halves), f1);
        let e = f1.cond_expectation(&DyadicPartition::trivial());
        assert_eq!(e.values()[0], SeqVec::from_pairs([(3, 0.5), (4, 0.5)]));
    }

    #[test]
    fn scalarize_examples() {
        let y = Functional::new(SeqVec::from_pairs([(2, 0.3), (5, -0.7)]), SpaceKind::L2);
        for k in 1..8 {
            let s = ex34(k).scalarize(&y).unwrap();
            let abs_int = s.l1_norm();
            assert!((abs_int - y.coeffs.get(k as u64).abs()).abs() < 1e-12);
        }
        let zero = Functional::new(SeqVec::zero(), SpaceKind::L2);
        assert_eq!(ex34(3).scalarize(&zero).unwrap().l1_norm(), 0.0);
        let e = StepFunction::constant(SeqVec::unit(4), SpaceKind::L2);
        let s = e.scalarize(&Functional::coordinate(4, SpaceKind::L2)).unwrap();
        assert_eq!(s.values(), &[SeqVec::scalar(1.0)]);
        assert!(e.scalarize(&Functional::coordinate(4, SpaceKind::L1)).is_err());
    }

    #[test]
    fn sequence_validation() {
        let a = StepFunction::zero(SpaceKind::L1);
        let b = StepFunction::zero(SpaceKind::L2);
        assert!(FunctionSequence::new(vec![a.clone(), b], None, "x").is_err());
        assert_eq!(
            FunctionSequence::new(vec![], None, "x").unwrap_err(),
            Error::EmptySequence
        );
        let s = FunctionSequence::new(vec![a.clone()], None, "x").unwrap();
        assert_eq!(s.deviations().unwrap_err(), Error::MissingLimit);
    }

    #[test]
    fn step_function_json_roundtrip() {
        let f = ex34(2);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"level":2,"kind":"L2","values":[{"2":4.0},{},{},{}]}"#
        );
        let back: StepFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let bad = r#"{"level":2,"kind":"L2","values":[{}]}"#;
        assert!(serde_json::from_str::<StepFunction>(bad).is_err());
    }

    #[test]
    fn coarsen_recovers_level() {
        let f = StepFunction::real(1, &[1.0, 2.0]).unwrap();
        assert_eq!(f.refine_to(5).coarsen(), f);
    }

    #[test]
    fn deviation_measure_spike() {
        for k in 1..10 {
            let d = ex34(k)
                .deviation_measure(&StepFunction::zero(SpaceKind::L2), 1.0)
                .unwrap();
            assert_eq!(d, Dyadic::pow2_neg(k));
        }
    }
}
