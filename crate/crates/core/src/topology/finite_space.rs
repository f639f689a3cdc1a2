use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{PointId, PointSet, TopologyError, Universe};
use crate::Verdict;

/// First failure found when checking a family against the topology axioms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "violation")]
pub enum TopologyViolation {
    MissingEmpty,
    MissingUniverse,
    MissingUnion {
        left: Vec<PointId>,
        right: Vec<PointId>,
        union: Vec<PointId>,
    },
    MissingIntersection {
        left: Vec<PointId>,
        right: Vec<PointId>,
        intersection: Vec<PointId>,
    },
}

impl fmt::Display for TopologyViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologyViolation::MissingEmpty => write!(f, "the empty set is missing"),
            TopologyViolation::MissingUniverse => write!(f, "the universe is missing"),
            TopologyViolation::MissingUnion { left, right, union } => {
                write!(f, "union of {left:?} and {right:?} ({union:?}) is missing")
            }
            TopologyViolation::MissingIntersection {
                left,
                right,
                intersection,
            } => write!(
                f,
                "intersection of {left:?} and {right:?} ({intersection:?}) is missing"
            ),
        }
    }
}

/// Checks the topology axioms on a finite family. Pairs are scanned in
/// canonical order; for each pair the union is checked before the intersection.
pub fn is_topology(universe: &Universe, family: &[PointSet]) -> Verdict<TopologyViolation> {
    let members: BTreeSet<&PointSet> = family.iter().collect();
    if !members.contains(&universe.empty_set()) {
        return Verdict::Fails(TopologyViolation::MissingEmpty);
    }
    if !members.contains(&universe.full_set()) {
        return Verdict::Fails(TopologyViolation::MissingUniverse);
    }
    let ordered: Vec<&PointSet> = members.iter().copied().collect();
    for (i, a) in ordered.iter().enumerate() {
        for b in &ordered[i + 1..] {
            let union = a.union(b);
            if !members.contains(&union) {
                return Verdict::Fails(TopologyViolation::MissingUnion {
                    left: universe.names(a),
                    right: universe.names(b),
                    union: universe.names(&union),
                });
            }
            let inter = a.intersection(b);
            if !members.contains(&inter) {
                return Verdict::Fails(TopologyViolation::MissingIntersection {
                    left: universe.names(a),
                    right: universe.names(b),
                    intersection: universe.names(&inter),
                });
            }
        }
    }
    Verdict::Holds
}

/// A finite topological space.
///
/// Besides the canonical list of opens, the space keeps the minimal open set of
/// every point (the intersection of all opens containing it). On a finite space
/// the opens are exactly the unions of minimal open sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpace {
    universe: Universe,
    opens: Vec<PointSet>,
    minimal: Vec<PointSet>,
}

impl FiniteSpace {
    /// Accepts an explicit family of opens after checking the axioms.
    pub fn new(universe: Universe, family: Vec<PointSet>) -> Result<Self, TopologyError> {
        if let Verdict::Fails(v) = is_topology(&universe, &family) {
            return Err(TopologyError::NotATopology(v));
        }
        let opens: Vec<PointSet> = family
            .into_iter()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let minimal = (0..universe.len())
            .map(|x| {
                opens
                    .iter()
                    .filter(|o| o.contains(x))
                    .fold(universe.full_set(), |acc, o| acc.intersection(o))
            })
            .collect();
        Ok(FiniteSpace {
            universe,
            opens,
            minimal,
        })
    }

    /// The smallest topology in which every subbasis member is open.
    pub fn generated(universe: Universe, subbasis: &[PointSet]) -> Self {
        let minimal: Vec<PointSet> = (0..universe.len())
            .map(|x| {
                subbasis
                    .iter()
                    .filter(|s| s.contains(x))
                    .fold(universe.full_set(), |acc, s| acc.intersection(s))
            })
            .collect();
        let generators: BTreeSet<&PointSet> = minimal.iter().collect();
        let mut opens: BTreeSet<PointSet> = BTreeSet::from([universe.empty_set()]);
        for m in generators {
            let grown: Vec<PointSet> = opens.iter().map(|o| o.union(m)).collect();
            opens.extend(grown);
        }
        FiniteSpace {
            universe,
            opens: opens.into_iter().collect(),
            minimal,
        }
    }

    /// Name-based front end of [`FiniteSpace::generated`].
    pub fn generate_topology(
        universe: Universe,
        subbasis: &[Vec<PointId>],
    ) -> Result<Self, TopologyError> {
        let mut sets = Vec::with_capacity(subbasis.len());
        for member in subbasis {
            let set = universe.set(member).map_err(|e| match e {
                TopologyError::PointOutsideUniverse(point) => {
                    TopologyError::MemberOutsideUniverse {
                        set: member.clone(),
                        point,
                    }
                }
                other => other,
            })?;
            sets.push(set);
        }
        Ok(FiniteSpace::generated(universe, &sets))
    }

    pub fn indiscrete(universe: Universe) -> Self {
        FiniteSpace::generated(universe, &[])
    }

    pub fn discrete(universe: Universe) -> Self {
        let singletons: Vec<PointSet> = (0..universe.len())
            .map(|i| PointSet::from_indices(universe.len(), [i]))
            .collect();
        FiniteSpace::generated(universe, &singletons)
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    /// Opens in canonical order.
    pub fn opens(&self) -> &[PointSet] {
        &self.opens
    }

    pub fn is_open(&self, set: &PointSet) -> bool {
        self.opens.binary_search(set).is_ok()
    }

    pub fn is_closed(&self, set: &PointSet) -> bool {
        self.is_open(&set.complement())
    }

    /// Smallest open set containing the point at position `i`.
    pub fn minimal_open(&self, i: usize) -> &PointSet {
        &self.minimal[i]
    }

    /// Closure of the point at position `i`: every point whose minimal open contains it.
    pub fn point_closure(&self, i: usize) -> PointSet {
        PointSet::from_indices(
            self.universe.len(),
            (0..self.universe.len()).filter(|&y| self.minimal[y].contains(i)),
        )
    }

    /// Whether `candidate` contains an open set containing `p`.
    pub fn is_neighborhood(
        &self,
        candidate: &PointSet,
        p: &PointId,
    ) -> Result<bool, TopologyError> {
        let i = self
            .universe
            .index_of(p)
            .ok_or_else(|| TopologyError::PointOutsideUniverse(p.clone()))?;
        Ok(self.minimal[i].is_subset(candidate))
    }

    /// Classes of points that lie in exactly the same opens, in canonical order.
    pub fn borel_atoms(&self) -> Vec<PointSet> {
        let n = self.universe.len();
        let mut seen = self.universe.empty_set();
        let mut atoms = Vec::new();
        for x in 0..n {
            if seen.contains(x) {
                continue;
            }
            let atom =
                PointSet::from_indices(n, (x..n).filter(|&y| self.minimal[x] == self.minimal[y]));
            seen = seen.union(&atom);
            atoms.push(atom);
        }
        atoms
    }

    /// Opens are `K ∪ Q` with `K` open here and `Q` any subset of `extra`.
    pub fn extension_topology(&self, extra: &[PointId]) -> Result<FiniteSpace, TopologyError> {
        if let Some(p) = extra.iter().find(|p| self.universe.contains(p)) {
            return Err(TopologyError::OverlapWithUniverse(p.clone()));
        }
        let universe = Universe::new(self.universe.points().iter().chain(extra).cloned())?;
        let mut subbasis = Vec::with_capacity(self.opens.len() + extra.len());
        for o in &self.opens {
            subbasis.push(self.universe.translate(o, &universe)?);
        }
        for p in extra {
            subbasis.push(universe.singleton(p)?);
        }
        Ok(FiniteSpace::generated(universe, &subbasis))
    }

    /// Product topology on pair points `(p,q)`.
    pub fn product_topology(&self, other: &FiniteSpace) -> FiniteSpace {
        let universe = Universe::new(self.universe.points().iter().flat_map(|p| {
            other
                .universe
                .points()
                .iter()
                .map(move |q| PointId::pair(p, q))
        }))
        .expect("pair names of two universes are distinct and nonempty");
        let m = other.universe.len();
        // pair index in a universe sorted by name differs from row-major order
        let position: Vec<usize> = (0..self.universe.len() * m)
            .map(|k| {
                let pair = PointId::pair(self.universe.point(k / m), other.universe.point(k % m));
                universe.index_of(&pair).expect("pair point present")
            })
            .collect();
        let position = &position;
        let mut rectangles = Vec::new();
        for a in self.minimal.iter().collect::<BTreeSet<_>>() {
            for b in other.minimal.iter().collect::<BTreeSet<_>>() {
                let rect = PointSet::from_indices(
                    universe.len(),
                    a.iter()
                        .flat_map(|i| b.iter().map(move |j| position[i * m + j])),
                );
                rectangles.push(rect);
            }
        }
        FiniteSpace::generated(universe, &rectangles)
    }

    /// Subspace topology on `subset`.
    pub fn restrict(&self, subset: &PointSet) -> Result<FiniteSpace, TopologyError> {
        let universe = Universe::new(self.universe.names(subset))?;
        let mut family = BTreeSet::new();
        for o in &self.opens {
            family.insert(
                self.universe
                    .translate(&o.intersection(subset), &universe)?,
            );
        }
        FiniteSpace::new(universe, family.into_iter().collect())
    }

    /// The smallest topology containing this one in which every `extra` set is open.
    pub fn refine(&self, extra: &[PointSet]) -> FiniteSpace {
        let mut subbasis = self.opens.clone();
        subbasis.extend(extra.iter().cloned());
        FiniteSpace::generated(self.universe.clone(), &subbasis)
    }

    /// Opens rendered as sorted name lists, in canonical order.
    pub fn open_names(&self) -> Vec<Vec<PointId>> {
        self.opens.iter().map(|o| self.universe.names(o)).collect()
    }
}
