//! Dyadic sets of `[0, 1)` with exact measures.
//!
//! A [`DyadicSet`] at level `n` is a union of the atoms
//! `I^n_i = [i 2^-n, (i+1) 2^-n)` for `i = 0, .., 2^n - 1` (atom indices are
//! zero-based throughout the crate). Measures are [`Dyadic`] rationals and are
//! always exact.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Hard representational limit. A level-24 set already holds 16M atoms.
pub const LEVEL_CEILING: u32 = 24;

/// Default value of the configurable resolution knob.
pub const DEFAULT_MAX_LEVEL: u32 = 20;

/// Configured upper bound on the dyadic level any operation may create.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub max_level: u32,
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution {
            max_level: DEFAULT_MAX_LEVEL,
        }
    }
}

impl Resolution {
    pub fn new(max_level: u32) -> Result<Self> {
        if max_level > LEVEL_CEILING {
            return Err(Error::ResolutionOverflow {
                level: max_level,
                max: LEVEL_CEILING,
            });
        }
        Ok(Resolution { max_level })
    }

    pub fn check(&self, level: u32) -> Result<()> {
        if level > self.max_level {
            Err(Error::ResolutionOverflow {
                level,
                max: self.max_level,
            })
        } else {
            Ok(())
        }
    }
}

/// Non-negative dyadic rational `num / 2^exp`, kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: u64,
    exp: u32,
}

impl Dyadic {
    pub const ZERO: Dyadic = Dyadic { num: 0, exp: 0 };
    pub const ONE: Dyadic = Dyadic { num: 1, exp: 0 };

    pub fn new(num: u64, exp: u32) -> Self {
        if num == 0 {
            return Dyadic::ZERO;
        }
        let shift = num.trailing_zeros().min(exp);
        Dyadic {
            num: num >> shift,
            exp: exp - shift,
        }
    }

    /// `2^-exp`.
    pub fn pow2_neg(exp: u32) -> Self {
        Dyadic { num: 1, exp }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    /// Base-2 logarithm of the denominator.
    pub fn denominator_exp(&self) -> u32 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Exact whenever the numerator fits in 53 bits, which holds for every
    /// measure of a set at a level up to [`LEVEL_CEILING`].
    pub fn to_f64(&self) -> f64 {
        self.num as f64 * (-(self.exp as f64)).exp2()
    }

    fn widened(&self, exp: u32) -> u128 {
        (self.num as u128) << (exp - self.exp)
    }

    pub fn checked_add(self, other: Dyadic) -> Option<Dyadic> {
        let exp = self.exp.max(other.exp);
        if exp > 64 {
            return None;
        }
        let sum = self.widened(exp) + other.widened(exp);
        Self::from_wide(sum, exp)
    }

    pub fn checked_sub(self, other: Dyadic) -> Option<Dyadic> {
        let exp = self.exp.max(other.exp);
        if exp > 64 {
            return None;
        }
        let diff = self.widened(exp).checked_sub(other.widened(exp))?;
        Self::from_wide(diff, exp)
    }

    fn from_wide(mut value: u128, mut exp: u32) -> Option<Dyadic> {
        if value == 0 {
            return Some(Dyadic::ZERO);
        }
        let shift = value.trailing_zeros().min(exp);
        value >>= shift;
        exp -= shift;
        u64::try_from(value).ok().map(|num| Dyadic { num, exp })
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let exp = self.exp.max(other.exp);
        self.widened(exp).cmp(&other.widened(exp))
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::ops::Add for Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: Dyadic) -> Dyadic {
        self.checked_add(rhs).expect("dyadic addition overflow")
    }
}

impl std::iter::Sum for Dyadic {
    fn sum<I: Iterator<Item = Dyadic>>(iter: I) -> Dyadic {
        iter.fold(Dyadic::ZERO, |a, b| a + b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exp == 0 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, 1u128 << self.exp)
        }
    }
}

impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("not a dyadic rational: {s:?}"));
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let num: u64 = num.parse().map_err(|_| bad())?;
        let den: u128 = den.parse().map_err(|_| bad())?;
        if den == 0 || !den.is_power_of_two() {
            return Err(bad());
        }
        Ok(Dyadic::new(num, den.trailing_zeros()))
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Finite union of level-`n` dyadic atoms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DyadicSet {
    level: u32,
    words: Vec<u64>,
}

fn word_count(level: u32) -> usize {
    ((1usize << level) + 63) / 64
}

fn check_ceiling(level: u32) -> Result<()> {
    if level > LEVEL_CEILING {
        Err(Error::ResolutionOverflow {
            level,
            max: LEVEL_CEILING,
        })
    } else {
        Ok(())
    }
}

impl DyadicSet {
    pub fn empty(level: u32) -> Result<Self> {
        check_ceiling(level)?;
        Ok(Self::empty_unchecked(level))
    }

    pub(crate) fn empty_unchecked(level: u32) -> Self {
        DyadicSet {
            level,
            words: vec![0; word_count(level)],
        }
    }

    pub fn full(level: u32) -> Result<Self> {
        check_ceiling(level)?;
        Ok(Self::full_unchecked(level))
    }

    pub(crate) fn full_unchecked(level: u32) -> Self {
        let mut set = Self::empty_unchecked(level);
        let n = 1usize << level;
        for (w, word) in set.words.iter_mut().enumerate() {
            let lo = w * 64;
            let bits = (n - lo).min(64);
            *word = if bits == 64 { u64::MAX } else { (1u64 << bits) - 1 };
        }
        set
    }

    /// The single atom `I^level_index` (zero-based index).
    pub fn atom(level: u32, index: usize) -> Result<Self> {
        Self::interval(level, index, index + 1)
    }

    /// Atoms `start..end` at `level`, i.e. `[start 2^-level, end 2^-level)`.
    pub fn interval(level: u32, start: usize, end: usize) -> Result<Self> {
        check_ceiling(level)?;
        let n = 1usize << level;
        if start > end || end > n {
            return Err(Error::InvalidSet(format!(
                "atom range {start}..{end} out of bounds at level {level}"
            )));
        }
        let mut set = Self::empty_unchecked(level);
        for i in start..end {
            set.insert(i);
        }
        Ok(set)
    }

    pub fn from_atoms<I: IntoIterator<Item = usize>>(level: u32, atoms: I) -> Result<Self> {
        check_ceiling(level)?;
        let n = 1usize << level;
        let mut set = Self::empty_unchecked(level);
        for i in atoms {
            if i >= n {
                return Err(Error::InvalidSet(format!(
                    "atom {i} out of bounds at level {level}"
                )));
            }
            set.insert(i);
        }
        Ok(set)
    }

    fn insert(&mut self, i: usize) {
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    /// Number of atoms at this set's level (`2^level`).
    pub fn atom_capacity(&self) -> usize {
        1usize << self.level
    }

    /// Number of atoms contained in the set.
    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn measure(&self) -> Dyadic {
        Dyadic::new(self.count() as u64, self.level)
    }

    pub fn contains_atom(&self, i: usize) -> bool {
        i < self.atom_capacity() && self.words[i / 64] & (1u64 << (i % 64)) != 0
    }

    /// Indices of contained atoms, ascending.
    pub fn atoms(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(w, &word)| {
            let mut bits = word;
            std::iter::from_fn(move || {
                if bits == 0 {
                    None
                } else {
                    let t = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    Some(w * 64 + t)
                }
            })
        })
    }

    /// Re-express the set at a finer level, checked against `resolution`.
    pub fn refine(&self, new_level: u32, resolution: &Resolution) -> Result<Self> {
        if new_level < self.level {
            return Err(Error::InvalidArgument(format!(
                "cannot refine a level-{} set to coarser level {new_level}",
                self.level
            )));
        }
        resolution.check(new_level)?;
        check_ceiling(new_level)?;
        Ok(self.refine_to(new_level))
    }

    /// Refinement without the resolution check; used when the target level is
    /// already that of an existing object.
    pub(crate) fn refine_to(&self, new_level: u32) -> Self {
        debug_assert!(new_level >= self.level);
        if new_level == self.level {
            return self.clone();
        }
        let shift = new_level - self.level;
        let span = 1usize << shift;
        let mut out = Self::empty_unchecked(new_level);
        for i in self.atoms() {
            let lo = i * span;
            for j in lo..lo + span {
                out.insert(j);
            }
        }
        out
    }

    /// Measure of `self ∩ I^level_i` for every atom `i` at `level` that meets
    /// the set, in ascending atom order. Values are exact in `f64`.
    pub fn cell_weights(&self, level: u32) -> Vec<(usize, f64)> {
        if level >= self.level {
            let shift = level - self.level;
            let w = (-(level as f64)).exp2();
            let span = 1usize << shift;
            self.atoms()
                .flat_map(|i| (i * span..(i + 1) * span).map(move |j| (j, w)))
                .collect()
        } else {
            let shift = self.level - level;
            let w = (-(self.level as f64)).exp2();
            let mut out: Vec<(usize, f64)> = Vec::new();
            for i in self.atoms() {
                let cell = i >> shift;
                match out.last_mut() {
                    Some((c, acc)) if *c == cell => *acc += w,
                    _ => out.push((cell, w)),
                }
            }
            out
        }
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        let level = self.level.max(other.level);
        (self.refine_to(level), other.refine_to(level))
    }

    fn zip_words(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Self {
        let (a, b) = self.aligned(other);
        let words = a.words.iter().zip(&b.words).map(|(&x, &y)| op(x, y)).collect();
        DyadicSet {
            level: a.level,
            words,
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_words(other, |x, y| x | y)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_words(other, |x, y| x & y)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_words(other, |x, y| x & !y)
    }

    pub fn complement(&self) -> Self {
        Self::full_unchecked(self.level).difference(self)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }

    /// Same point set, compared across levels.
    pub fn same_points(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.words == b.words
    }

    /// All nonempty dyadic subsets of `self` at `level`, in ascending mask
    /// order over the contained atoms. There are `2^m - 1` of them for `m`
    /// atoms; `m` must not exceed `atom_cap`.
    pub fn subsets_of(
        &self,
        level: u32,
        resolution: &Resolution,
        atom_cap: usize,
    ) -> Result<SubsetIter> {
        let base = if level >= self.level {
            self.refine(level, resolution)?
        } else {
            return Err(Error::InvalidArgument(format!(
                "subset level {level} is coarser than the set level {}",
                self.level
            )));
        };
        let atoms: Vec<usize> = base.atoms().collect();
        if atoms.len() > atom_cap || atoms.len() >= 64 {
            return Err(Error::EnumerationOverflow {
                atoms: atoms.len(),
                cap: atom_cap.min(63),
            });
        }
        Ok(SubsetIter {
            level,
            end: 1u64 << atoms.len(),
            atoms,
            next: 1,
        })
    }

    /// Text form `level:hexmask`, atom `i` being bit `i` of the mask.
    pub fn to_text(&self) -> String {
        let bits = 1usize << self.level;
        let nibbles = ((bits + 3) / 4).max(1);
        let mut s = format!("{}:", self.level);
        for j in (0..nibbles).rev() {
            let bit = j * 4;
            let nib = (self.words[bit / 64] >> (bit % 64)) & 0xF;
            s.push(char::from_digit(nib as u32, 16).unwrap());
        }
        s
    }
}

/// Iterator returned by [`DyadicSet::subsets_of`].
pub struct SubsetIter {
    level: u32,
    atoms: Vec<usize>,
    next: u64,
    end: u64,
}

impl SubsetIter {
    /// Total number of subsets the iterator yields.
    pub fn total(&self) -> u64 {
        self.end - 1
    }
}

impl Iterator for SubsetIter {
    type Item = DyadicSet;

    fn next(&mut self) -> Option<DyadicSet> {
        if self.next >= self.end {
            return None;
        }
        let mask = self.next;
        self.next += 1;
        let mut set = DyadicSet::empty_unchecked(self.level);
        for (b, &atom) in self.atoms.iter().enumerate() {
            if mask & (1u64 << b) != 0 {
                set.insert(atom);
            }
        }
        Some(set)
    }
}

impl fmt::Debug for DyadicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DyadicSet({})", self.to_text())
    }
}

impl fmt::Display for DyadicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for DyadicSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (lvl, hex) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected level:hexmask, got {s:?}")))?;
        let level: u32 = lvl
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad level in {s:?}")))?;
        check_ceiling(level)?;
        let hex = hex.trim();
        if hex.is_empty() {
            return Err(Error::Parse(format!("empty mask in {s:?}")));
        }
        let n = 1usize << level;
        let mut set = DyadicSet::empty_unchecked(level);
        for (j, c) in hex.chars().rev().enumerate() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("bad hex digit {c:?} in {s:?}")))?;
            for b in 0..4 {
                if nib & (1 << b) != 0 {
                    let i = j * 4 + b;
                    if i >= n {
                        return Err(Error::Parse(format!(
                            "mask {s:?} has bits beyond 2^{level} atoms"
                        )));
                    }
                    set.insert(i);
                }
            }
        }
        Ok(set)
    }
}

impl Serialize for DyadicSet {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for DyadicSet {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Finite partition of `[0, 1)` into dyadic blocks at a common level, with an
/// optional exceptional block (the `A_0` of partition-based conditions).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicPartition {
    level: u32,
    blocks: Vec<DyadicSet>,
    exceptional: Option<usize>,
}

impl DyadicPartition {
    /// Blocks are refined to their common level. They must be pairwise
    /// disjoint and cover `[0, 1)`; every block other than the exceptional
    /// one must be nonempty.
    pub fn new(blocks: Vec<DyadicSet>, exceptional: Option<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidPartition("no blocks".into()));
        }
        if let Some(e) = exceptional {
            if e >= blocks.len() {
                return Err(Error::InvalidPartition(format!(
                    "exceptional index {e} out of range"
                )));
            }
        }
        let level = blocks.iter().map(|b| b.level).max().unwrap();
        let blocks: Vec<DyadicSet> = blocks.iter().map(|b| b.refine_to(level)).collect();
        let mut cover = DyadicSet::empty_unchecked(level);
        for (i, b) in blocks.iter().enumerate() {
            if b.is_empty() && exceptional != Some(i) {
                return Err(Error::InvalidPartition(format!("block {i} is empty")));
            }
            if !cover.is_disjoint(b) {
                return Err(Error::InvalidPartition(format!(
                    "block {i} overlaps an earlier block"
                )));
            }
            cover = cover.union(b);
        }
        if cover.measure() != Dyadic::ONE {
            return Err(Error::InvalidPartition(format!(
                "blocks cover measure {} instead of 1",
                cover.measure()
            )));
        }
        Ok(DyadicPartition {
            level,
            blocks,
            exceptional,
        })
    }

    /// `{Ω}`.
    pub fn trivial() -> Self {
        DyadicPartition {
            level: 0,
            blocks: vec![DyadicSet::full_unchecked(0)],
            exceptional: None,
        }
    }

    /// Every atom at `level` as its own block.
    pub fn atoms(level: u32) -> Result<Self> {
        check_ceiling(level)?;
        let blocks = (0..1usize << level)
            .map(|i| {
                let mut s = DyadicSet::empty_unchecked(level);
                s.insert(i);
                s
            })
            .collect();
        Ok(DyadicPartition {
            level,
            blocks,
            exceptional: None,
        })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn blocks(&self) -> &[DyadicSet] {
        &self.blocks
    }

    pub fn exceptional(&self) -> Option<&DyadicSet> {
        self.exceptional.map(|i| &self.blocks[i])
    }

    pub fn exceptional_index(&self) -> Option<usize> {
        self.exceptional
    }

    /// Blocks other than the exceptional one.
    pub fn regular_blocks(&self) -> impl Iterator<Item = &DyadicSet> {
        self.blocks
            .iter()
            .enumerate()
            .filter(move |(i, _)| Some(*i) != self.exceptional)
            .map(|(_, b)| b)
    }

    /// Index of the block containing atom `i` at the partition level.
    pub fn block_of_atom(&self, i: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.contains_atom(i))
    }
}
