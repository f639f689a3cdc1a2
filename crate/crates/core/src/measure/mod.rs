//! Measures on the Borel algebra of a finite space and the partition analyses
//! built on them.
//!
//! On a finite space the Borel sets are exactly the unions of Borel atoms, so
//! a measure is a weight per atom. Weights are exact nonnegative rationals or
//! `∞`.

mod analysis;
mod extension;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::iter::Sum;
use std::ops::Add;
use std::str::FromStr;

use num::{BigRational, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::algebra::AlgebraError;
use crate::space::SpaceError;
use crate::topology::{FiniteSpace, PointId, PointSet, TopologyError, Universe};

pub use analysis::{
    classify_restriction, find_mu_la_partition, homogeneity, is_mu_union, is_partitionable,
    Homogeneity, LaPartition, MuUnionFailure, Overlap, PairWitness, RestrictionClass,
};
pub use extension::{
    apply_null_addition, essential_part, EssentialMember, EssentialPart, NullAdditionSpec,
    NullAdditionViolation, Proposal, Rejection,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("`{0}` is not a nonnegative rational or `inf`")]
    BadWeight(String),
    #[error("point `{0}` is outside the universe")]
    PointOutsideUniverse(PointId),
    #[error("atom {atom:?} is given two different weights")]
    InconsistentAtom { atom: Vec<PointId> },
    #[error("expected {expected} atom weights, got {found}")]
    AtomCount { expected: usize, found: usize },
    #[error("{set:?} is not Borel: it splits the atom {atom:?}")]
    NotMeasurable {
        set: Vec<PointId>,
        atom: Vec<PointId>,
    },
    #[error("the measure lives on a different universe")]
    UniverseMismatch,
    #[error("not a valid μ-LA collection: {0}")]
    InvalidWitness(String),
    #[error("null addition rejected: {0:?}")]
    SpecViolation(NullAdditionViolation),
    #[error("the collection is not μ-CDR")]
    NotMuCdr,
    #[error("no member of the collection is equivalent to `{0}`")]
    NoEquivalentInC(String),
    #[error("point `{0}` needs an extension proposal")]
    MissingProposal(PointId),
    #[error("proposal for `{point}` rejected: {reason:?}")]
    ProposalRejected { point: PointId, reason: Rejection },
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// A nonnegative rational or `∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExtRational {
    Finite(BigRational),
    Infinite,
}

impl ExtRational {
    pub fn zero() -> Self {
        ExtRational::Finite(BigRational::zero())
    }

    /// `numer / denom`; panics on a zero denominator.
    pub fn ratio(numer: i64, denom: i64) -> Self {
        ExtRational::Finite(BigRational::new(numer.into(), denom.into()))
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, ExtRational::Finite(q) if q.is_zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtRational::Infinite)
    }
}

impl Default for ExtRational {
    fn default() -> Self {
        ExtRational::zero()
    }
}

impl Ord for ExtRational {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => a.cmp(b),
            (ExtRational::Finite(_), ExtRational::Infinite) => Ordering::Less,
            (ExtRational::Infinite, ExtRational::Finite(_)) => Ordering::Greater,
            (ExtRational::Infinite, ExtRational::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialOrd for ExtRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for ExtRational {
    type Output = ExtRational;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtRational::Finite(a), ExtRational::Finite(b)) => ExtRational::Finite(a + b),
            _ => ExtRational::Infinite,
        }
    }
}

impl<'a> Add<&'a ExtRational> for ExtRational {
    type Output = ExtRational;

    fn add(self, rhs: &'a ExtRational) -> Self {
        self + rhs.clone()
    }
}

impl Sum for ExtRational {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ExtRational::zero(), Add::add)
    }
}

impl<'a> Sum<&'a ExtRational> for ExtRational {
    fn sum<I: Iterator<Item = &'a ExtRational>>(iter: I) -> Self {
        iter.fold(ExtRational::zero(), |acc, x| acc + x)
    }
}

impl fmt::Display for ExtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRational::Finite(q) => write!(f, "{q}"),
            ExtRational::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for ExtRational {
    type Err = MeasureError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "inf" || t == "∞" {
            return Ok(ExtRational::Infinite);
        }
        let bad = || MeasureError::BadWeight(s.to_owned());
        if t.starts_with('+') || t.contains(' ') {
            return Err(bad());
        }
        let q = BigRational::from_str(t).map_err(|_| bad())?;
        if q.is_negative() {
            return Err(bad());
        }
        Ok(ExtRational::Finite(q))
    }
}

impl Serialize for ExtRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A measure given by one weight per Borel atom of a space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomMeasure {
    universe: Universe,
    atoms: Vec<PointSet>,
    weights: Vec<ExtRational>,
    atom_of: Vec<usize>,
}

impl AtomMeasure {
    /// Weights listed per point; a point stands for its whole atom and atoms
    /// without a listed point weigh zero.
    pub fn new(
        space: &FiniteSpace,
        weights: &BTreeMap<PointId, ExtRational>,
    ) -> Result<Self, MeasureError> {
        let universe = space.universe();
        let atoms = space.borel_atoms();
        let atom_of = atom_index(universe.len(), &atoms);
        let mut given: Vec<Option<ExtRational>> = vec![None; atoms.len()];
        for (p, w) in weights {
            let i = universe
                .index_of(p)
                .ok_or_else(|| MeasureError::PointOutsideUniverse(p.clone()))?;
            let a = atom_of[i];
            match &given[a] {
                Some(prev) if prev != w => {
                    return Err(MeasureError::InconsistentAtom {
                        atom: universe.names(&atoms[a]),
                    })
                }
                _ => given[a] = Some(w.clone()),
            }
        }
        Ok(AtomMeasure {
            universe: universe.clone(),
            weights: given.into_iter().map(Option::unwrap_or_default).collect(),
            atoms,
            atom_of,
        })
    }

    /// Weights in the canonical order of [`FiniteSpace::borel_atoms`].
    pub fn from_atom_weights(
        space: &FiniteSpace,
        weights: Vec<ExtRational>,
    ) -> Result<Self, MeasureError> {
        let atoms = space.borel_atoms();
        if atoms.len() != weights.len() {
            return Err(MeasureError::AtomCount {
                expected: atoms.len(),
                found: weights.len(),
            });
        }
        Ok(AtomMeasure {
            universe: space.universe().clone(),
            atom_of: atom_index(space.universe().len(), &atoms),
            atoms,
            weights,
        })
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    pub fn atoms(&self) -> &[PointSet] {
        &self.atoms
    }

    pub fn atom_weights(&self) -> &[ExtRational] {
        &self.weights
    }

    /// One entry per atom, keyed by its first point.
    pub fn representative_weights(&self) -> BTreeMap<PointId, ExtRational> {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(a, w)| (self.universe.point(a.first().unwrap()).clone(), w.clone()))
            .collect()
    }

    pub fn weight_of_point(&self, p: &PointId) -> Result<&ExtRational, MeasureError> {
        let i = self
            .universe
            .index_of(p)
            .ok_or_else(|| MeasureError::PointOutsideUniverse(p.clone()))?;
        Ok(&self.weights[self.atom_of[i]])
    }

    pub fn is_measurable(&self, e: &PointSet) -> bool {
        self.straddled_atom(e).is_none()
    }

    fn straddled_atom(&self, e: &PointSet) -> Option<&PointSet> {
        self.atoms
            .iter()
            .find(|a| !a.is_disjoint(e) && !a.is_subset(e))
    }

    /// `μ(e)` for a union of atoms.
    pub fn measure_of(&self, e: &PointSet) -> Result<ExtRational, MeasureError> {
        if e.capacity() != self.universe.len() {
            return Err(MeasureError::UniverseMismatch);
        }
        if let Some(a) = self.straddled_atom(e) {
            return Err(MeasureError::NotMeasurable {
                set: self.universe.names(e),
                atom: self.universe.names(a),
            });
        }
        Ok(self
            .atoms
            .iter()
            .zip(&self.weights)
            .filter(|(a, _)| a.is_subset(e))
            .map(|(_, w)| w)
            .sum())
    }

    /// `μ` of a set given by point names.
    pub fn measure_of_points<I, P>(&self, points: I) -> Result<ExtRational, MeasureError>
    where
        I: IntoIterator<Item = P>,
        P: Into<PointId>,
    {
        let e = self.universe.set(points)?;
        self.measure_of(&e)
    }

    pub fn total(&self) -> ExtRational {
        self.weights.iter().sum()
    }
}

fn atom_index(n: usize, atoms: &[PointSet]) -> Vec<usize> {
    let mut atom_of = vec![0; n];
    for (k, a) in atoms.iter().enumerate() {
        for i in a.iter() {
            atom_of[i] = k;
        }
    }
    atom_of
}
