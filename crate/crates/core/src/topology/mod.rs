//! Finite point-set topology.
//!
//! Points live in a [`Universe`], a sorted list of identifiers. Subsets of a
//! universe are [`PointSet`] bit vectors indexed by universe position, so two
//! sets over the same universe compare and hash canonically.

mod connectivity;
mod finite_space;

use std::cmp::Ordering;
use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use connectivity::{CompleteOpenness, ConnectivityReport};
pub use finite_space::{is_topology, FiniteSpace, TopologyViolation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyError {
    #[error("a universe must contain at least one point")]
    EmptyUniverse,
    #[error("point identifiers must be nonempty")]
    EmptyPointId,
    #[error("point `{0}` occurs twice in the universe")]
    DuplicatePoint(PointId),
    #[error("point `{0}` is outside the universe")]
    PointOutsideUniverse(PointId),
    #[error("subbasis member {set:?} contains `{point}`, which is outside the universe")]
    MemberOutsideUniverse { set: Vec<PointId>, point: PointId },
    #[error("extra points overlap the universe at `{0}`")]
    OverlapWithUniverse(PointId),
    #[error("family is not a topology: {0}")]
    NotATopology(TopologyViolation),
}

/// Identifier of a point.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(String);

impl PointId {
    pub fn new(id: impl Into<String>) -> Self {
        PointId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// Name of the pair point `(left,right)` in a product universe.
    pub fn pair(left: &PointId, right: &PointId) -> PointId {
        PointId(format!("({},{})", left.0, right.0))
    }
}

impl fmt::Debug for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PointId {
    fn from(s: &str) -> Self {
        PointId(s.to_owned())
    }
}

impl From<String> for PointId {
    fn from(s: String) -> Self {
        PointId(s)
    }
}

impl From<&PointId> for PointId {
    fn from(p: &PointId) -> Self {
        p.clone()
    }
}

/// A subset of a universe, stored as a bit vector over universe positions.
///
/// Sets are ordered lexicographically by their member positions, which matches
/// lexicographic order of the sorted member names.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PointSet {
    bits: FixedBitSet,
}

impl PointSet {
    pub fn empty(capacity: usize) -> Self {
        PointSet {
            bits: FixedBitSet::with_capacity(capacity),
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(capacity);
        bits.insert_range(..);
        PointSet { bits }
    }

    pub fn from_indices(capacity: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut set = PointSet::empty(capacity);
        for i in indices {
            set.insert(i);
        }
        set
    }

    /// Size of the universe this set lives in.
    pub fn capacity(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    pub fn insert(&mut self, i: usize) {
        self.bits.insert(i);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.capacity()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn first(&self) -> Option<usize> {
        self.bits.minimum()
    }

    pub fn union(&self, other: &PointSet) -> PointSet {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        PointSet { bits }
    }

    pub fn intersection(&self, other: &PointSet) -> PointSet {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        PointSet { bits }
    }

    pub fn difference(&self, other: &PointSet) -> PointSet {
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        PointSet { bits }
    }

    pub fn complement(&self) -> PointSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        PointSet { bits }
    }

    pub fn is_subset(&self, other: &PointSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &PointSet) -> bool {
        self.bits.is_disjoint(&other.bits)
    }
}

impl Ord for PointSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter()
            .cmp(other.iter())
            .then_with(|| self.capacity().cmp(&other.capacity()))
    }
}

impl PartialOrd for PointSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for PointSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// The point universe of a finite space, sorted by identifier.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Universe {
    points: Vec<PointId>,
}

impl Universe {
    pub fn new<I, P>(points: I) -> Result<Self, TopologyError>
    where
        I: IntoIterator<Item = P>,
        P: Into<PointId>,
    {
        let mut points: Vec<PointId> = points.into_iter().map(Into::into).collect();
        if points.is_empty() {
            return Err(TopologyError::EmptyUniverse);
        }
        if points.iter().any(|p| p.0.is_empty()) {
            return Err(TopologyError::EmptyPointId);
        }
        points.sort();
        if let Some(w) = points.windows(2).find(|w| w[0] == w[1]) {
            return Err(TopologyError::DuplicatePoint(w[0].clone()));
        }
        Ok(Universe { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[PointId] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &PointId {
        &self.points[i]
    }

    pub fn index_of(&self, p: &PointId) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    pub fn contains(&self, p: &PointId) -> bool {
        self.index_of(p).is_some()
    }

    pub fn empty_set(&self) -> PointSet {
        PointSet::empty(self.len())
    }

    pub fn full_set(&self) -> PointSet {
        PointSet::full(self.len())
    }

    /// Builds a set from point names, failing on the first unknown point.
    pub fn set<I, P>(&self, points: I) -> Result<PointSet, TopologyError>
    where
        I: IntoIterator<Item = P>,
        P: Into<PointId>,
    {
        let mut set = self.empty_set();
        for p in points {
            let p = p.into();
            let i = self
                .index_of(&p)
                .ok_or(TopologyError::PointOutsideUniverse(p))?;
            set.insert(i);
        }
        Ok(set)
    }

    pub fn singleton(&self, p: &PointId) -> Result<PointSet, TopologyError> {
        self.set([p])
    }

    /// Sorted member names of `set`.
    pub fn names(&self, set: &PointSet) -> Vec<PointId> {
        set.iter().map(|i| self.points[i].clone()).collect()
    }

    /// Re-expresses `set` over `target`; every member must exist there.
    pub fn translate(&self, set: &PointSet, target: &Universe) -> Result<PointSet, TopologyError> {
        target.set(set.iter().map(|i| &self.points[i]))
    }
}
