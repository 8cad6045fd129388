//! Finitely supported real sequences: the value space and its dual.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Which ℓᵖ norm the ambient space carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpaceKind {
    L1,
    L2,
    #[serde(rename = "LINF")]
    Linf,
}

impl SpaceKind {
    pub fn dual(self) -> SpaceKind {
        match self {
            SpaceKind::L1 => SpaceKind::Linf,
            SpaceKind::L2 => SpaceKind::L2,
            SpaceKind::Linf => SpaceKind::L1,
        }
    }

    pub fn ensure(self, found: SpaceKind) -> Result<()> {
        if self == found {
            Ok(())
        } else {
            Err(Error::KindMismatch {
                expected: self,
                found,
            })
        }
    }
}

impl std::str::FromStr for SpaceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "L1" => Ok(SpaceKind::L1),
            "L2" => Ok(SpaceKind::L2),
            "LINF" => Ok(SpaceKind::Linf),
            _ => Err(Error::Parse(format!("unknown space kind {s:?}"))),
        }
    }
}

/// Sparse real sequence. Coordinate `k` holds the coefficient of the unit
/// vector `e_k`; real-valued functions use coordinate 0 only.
#[derive(Clone, Default, PartialEq)]
pub struct SeqVec {
    entries: Vec<(u64, f64)>,
}

impl SeqVec {
    pub fn zero() -> Self {
        SeqVec::default()
    }

    /// `e_k`.
    pub fn unit(k: u64) -> Self {
        SeqVec {
            entries: vec![(k, 1.0)],
        }
    }

    /// A real number, stored at coordinate 0.
    pub fn scalar(x: f64) -> Self {
        SeqVec::from_pairs([(0, x)])
    }

    /// Duplicate coordinates are summed; zeros are dropped.
    pub fn from_pairs<I: IntoIterator<Item = (u64, f64)>>(pairs: I) -> Self {
        let mut acc = Accumulator::default();
        for (k, v) in pairs {
            acc.add_entry(k, v);
        }
        acc.finish()
    }

    /// Dense slice starting at coordinate `first`.
    pub fn from_dense(first: u64, values: &[f64]) -> Self {
        SeqVec::from_pairs(values.iter().enumerate().map(|(i, &v)| (first + i as u64, v)))
    }

    pub fn entries(&self) -> &[(u64, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, k: u64) -> f64 {
        self.entries
            .binary_search_by_key(&k, |e| e.0)
            .map(|i| self.entries[i].1)
            .unwrap_or(0.0)
    }

    /// Value at coordinate 0, the scalar reading of a real-valued function.
    pub fn as_scalar(&self) -> f64 {
        self.get(0)
    }

    pub fn support(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|e| e.0)
    }

    pub fn max_index(&self) -> Option<u64> {
        self.entries.last().map(|e| e.0)
    }

    pub fn norm(&self, kind: SpaceKind) -> f64 {
        let values = self.entries.iter().map(|e| e.1);
        match kind {
            SpaceKind::L1 => values.map(f64::abs).sum(),
            SpaceKind::L2 => {
                // scaled to avoid overflow for large spikes
                let scale = self.norm(SpaceKind::Linf);
                if scale == 0.0 {
                    return 0.0;
                }
                scale * values.map(|v| (v / scale) * (v / scale)).sum::<f64>().sqrt()
            }
            SpaceKind::Linf => values.map(f64::abs).fold(0.0, f64::max),
        }
    }

    /// Coordinatewise sum `Σ a_k b_k`.
    pub fn dot(&self, other: &SeqVec) -> f64 {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.entries, &other.entries);
        let mut acc = 0.0;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += a[i].1 * b[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    /// `self + alpha * other`.
    pub fn axpy(&self, alpha: f64, other: &SeqVec) -> SeqVec {
        let (a, b) = (&self.entries, &other.entries);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
            let (k, v) = if take_a {
                i += 1;
                a[i - 1]
            } else if take_b {
                j += 1;
                (b[j - 1].0, alpha * b[j - 1].1)
            } else {
                i += 1;
                j += 1;
                (a[i - 1].0, a[i - 1].1 + alpha * b[j - 1].1)
            };
            if v != 0.0 {
                out.push((k, v));
            }
        }
        SeqVec { entries: out }
    }

    pub fn add(&self, other: &SeqVec) -> SeqVec {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &SeqVec) -> SeqVec {
        self.axpy(-1.0, other)
    }

    pub fn scale(&self, alpha: f64) -> SeqVec {
        if alpha == 0.0 {
            return SeqVec::zero();
        }
        SeqVec {
            entries: self
                .entries
                .iter()
                .map(|&(k, v)| (k, alpha * v))
                .filter(|e| e.1 != 0.0)
                .collect(),
        }
    }

    /// Keep only coordinates `k ≤ d`.
    pub fn restrict_to(&self, d: u64) -> SeqVec {
        SeqVec {
            entries: self.entries.iter().copied().filter(|e| e.0 <= d).collect(),
        }
    }

    /// Exact bit pattern, usable as a hash key for grouping equal values.
    pub fn bit_key(&self) -> Vec<(u64, u64)> {
        self.entries.iter().map(|&(k, v)| (k, v.to_bits())).collect()
    }
}

impl fmt::Debug for SeqVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.entries.iter().map(|(k, v)| (k, v)))
            .finish()
    }
}

impl Serialize for SeqVec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.entries.len()))?;
        for (k, v) in &self.entries {
            map.serialize_entry(&k.to_string(), v)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for SeqVec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct SeqVisitor;

        impl<'de> Visitor<'de> for SeqVisitor {
            type Value = SeqVec;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a sparse map from coordinate index to value")
            }

            fn visit_map<M: MapAccess<'de>>(self, mut access: M) -> std::result::Result<SeqVec, M::Error> {
                let mut pairs = Vec::new();
                while let Some((k, v)) = access.next_entry::<String, f64>()? {
                    let k: u64 = k.parse().map_err(serde::de::Error::custom)?;
                    if !v.is_finite() {
                        return Err(serde::de::Error::custom("non-finite coordinate value"));
                    }
                    pairs.push((k, v));
                }
                Ok(SeqVec::from_pairs(pairs))
            }
        }

        deserializer.deserialize_map(SeqVisitor)
    }
}

/// Sums many sparse vectors without quadratic merging.
#[derive(Debug, Default)]
pub struct Accumulator {
    acc: BTreeMap<u64, f64>,
}

impl Accumulator {
    pub fn add_entry(&mut self, k: u64, v: f64) {
        *self.acc.entry(k).or_insert(0.0) += v;
    }

    pub fn add_scaled(&mut self, alpha: f64, v: &SeqVec) {
        for &(k, x) in v.entries() {
            self.add_entry(k, alpha * x);
        }
    }

    pub fn finish(self) -> SeqVec {
        SeqVec {
            entries: self.acc.into_iter().filter(|e| e.1 != 0.0).collect(),
        }
    }
}

/// Element of the dual space: a coefficient sequence acting on a primal space
/// of the given kind by coordinatewise pairing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Functional {
    pub coeffs: SeqVec,
    pub primal: SpaceKind,
}

impl Functional {
    pub fn new(coeffs: SeqVec, primal: SpaceKind) -> Self {
        Functional { coeffs, primal }
    }

    /// `e_k*`.
    pub fn coordinate(k: u64, primal: SpaceKind) -> Self {
        Functional::new(SeqVec::unit(k), primal)
    }

    pub fn pair(&self, v: &SeqVec, kind: SpaceKind) -> Result<f64> {
        self.primal.ensure(kind)?;
        Ok(self.coeffs.dot(v))
    }

    pub fn dual_norm(&self) -> f64 {
        self.coeffs.norm(self.primal.dual())
    }

    /// Rescaled into the dual unit ball if it lies outside it.
    pub fn into_unit_ball(self) -> Self {
        let n = self.dual_norm();
        if n > 1.0 {
            Functional::new(self.coeffs.scale(1.0 / n), self.primal)
        } else {
            self
        }
    }
}
