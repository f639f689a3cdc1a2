//! Structured spaces: a finite space, a family of algebraic neighborhoods and
//! a fixed choice of one neighborhood per point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteStructure, PropertySpec, StructureDescriptor, Witness};
use crate::topology::{FiniteSpace, PointId, PointSet, TopologyError, Universe};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("no neighborhood named `{0}`")]
    UnknownNeighborhood(String),
    #[error("point `{0}` is outside the universe")]
    PointOutsideUniverse(PointId),
    #[error("neighborhood `{neighborhood}` contains `{point}`, which is outside the universe")]
    CarrierOutsideUniverse {
        neighborhood: String,
        point: PointId,
    },
    #[error("point `{0}` has no fixed neighborhood")]
    MissingAssignment(PointId),
    #[error("neighborhood `{0}` is defined twice")]
    DuplicateNeighborhood(String),
    #[error("neighborhood `{neighborhood}` has {size} point(s); a fixed neighborhood must strictly contain its point")]
    CarrierTooSmall { neighborhood: String, size: usize },
    #[error("declared laws of `{0}` do not hold")]
    UnverifiedStructure(String),
    #[error("hint assigns `{point}` to `{neighborhood}`, which does not contain it")]
    InvalidHint {
        point: PointId,
        neighborhood: String,
    },
    #[error("the collection of structures is empty")]
    EmptyCollection,
    #[error("the subfamily is empty")]
    EmptySubfamily,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// One failed requirement of a structured space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum Violation {
    CarrierTooSmall {
        neighborhood: String,
        size: usize,
    },
    NotContaining {
        point: PointId,
        neighborhood: String,
    },
    NotANeighborhood {
        point: PointId,
        neighborhood: String,
    },
    PropertyFails {
        neighborhood: String,
        spec: PropertySpec,
        witness: Witness,
    },
    PropertyUnevaluable {
        neighborhood: String,
        error: String,
    },
    NotCovered {
        point: PointId,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::CarrierTooSmall { neighborhood, size } => write!(
                f,
                "neighborhood `{neighborhood}` has {size} point(s) and cannot strictly contain its point \
                 (1-generalised structured spaces are not supported)"
            ),
            Violation::NotContaining { point, neighborhood } => {
                write!(f, "`{point}` is assigned to `{neighborhood}`, which does not contain it")
            }
            Violation::NotANeighborhood { point, neighborhood } => write!(
                f,
                "`{neighborhood}` contains no open set containing `{point}`"
            ),
            Violation::PropertyFails {
                neighborhood,
                spec,
                witness,
            } => write!(f, "`{neighborhood}`: {spec} fails at {witness:?}"),
            Violation::PropertyUnevaluable {
                neighborhood,
                error,
            } => write!(f, "`{neighborhood}`: {error}"),
            Violation::NotCovered { point } => {
                write!(f, "`{point}` lies in no assigned neighborhood")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A distinct descriptor with the neighborhoods carrying it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub descriptor: StructureDescriptor,
    pub neighborhoods: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptorCatalog {
    pub entries: Vec<CatalogEntry>,
}

impl DescriptorCatalog {
    /// Distinct operation tuples.
    pub fn operation_tuples(&self) -> BTreeSet<Vec<String>> {
        self.entries
            .iter()
            .map(|e| e.descriptor.operations().to_vec())
            .collect()
    }

    /// Distinct property sets.
    pub fn property_sets(&self) -> BTreeSet<BTreeSet<PropertySpec>> {
        self.entries
            .iter()
            .map(|e| e.descriptor.properties().clone())
            .collect()
    }

    /// Distinct tag lists.
    pub fn tag_lists(&self) -> BTreeSet<Vec<crate::algebra::NonAlgTag>> {
        self.entries
            .iter()
            .map(|e| e.descriptor.nonalg().to_vec())
            .collect()
    }
}

/// A finite space whose points each carry a fixed algebraic neighborhood.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuredSpace {
    space: FiniteSpace,
    neighborhoods: BTreeMap<String, FiniteStructure>,
    carriers: BTreeMap<String, PointSet>,
    /// Neighborhood name per universe position.
    assignment: Vec<String>,
}

impl StructuredSpace {
    /// Assembles a space after checking that every name resolves. Semantic
    /// requirements are left to [`StructuredSpace::validate`].
    pub fn from_parts(
        space: FiniteSpace,
        neighborhoods: BTreeMap<String, FiniteStructure>,
        assignment: BTreeMap<PointId, String>,
    ) -> Result<Self, SpaceError> {
        let universe = space.universe();
        let mut carriers = BTreeMap::new();
        for (name, s) in &neighborhoods {
            let mut set = universe.empty_set();
            for p in s.carrier() {
                let i = universe
                    .index_of(p)
                    .ok_or_else(|| SpaceError::CarrierOutsideUniverse {
                        neighborhood: name.clone(),
                        point: p.clone(),
                    })?;
                set.insert(i);
            }
            carriers.insert(name.clone(), set);
        }
        if let Some(p) = assignment.keys().find(|p| !universe.contains(p)) {
            return Err(SpaceError::PointOutsideUniverse(p.clone()));
        }
        let mut assigned = Vec::with_capacity(universe.len());
        for p in universe.points() {
            let name = assignment
                .get(p)
                .ok_or_else(|| SpaceError::MissingAssignment(p.clone()))?;
            if !neighborhoods.contains_key(name) {
                return Err(SpaceError::UnknownNeighborhood(name.clone()));
            }
            assigned.push(name.clone());
        }
        Ok(StructuredSpace {
            space,
            neighborhoods,
            carriers,
            assignment: assigned,
        })
    }

    /// Builds the space generated by a collection of structures: the universe
    /// is the union of the carriers and the carriers form a subbasis.
    ///
    /// Identical structures are kept once, under the first name. Each point is
    /// assigned to its hint if given, otherwise to the first neighborhood by
    /// name that contains it.
    pub fn build_from_collection(
        structures: Vec<(String, FiniteStructure)>,
        hints: &BTreeMap<PointId, String>,
    ) -> Result<Self, SpaceError> {
        if structures.is_empty() {
            return Err(SpaceError::EmptyCollection);
        }
        let mut neighborhoods: BTreeMap<String, FiniteStructure> = BTreeMap::new();
        let mut aliases: BTreeMap<String, String> = BTreeMap::new();
        for (name, s) in structures {
            if neighborhoods.contains_key(&name) || aliases.contains_key(&name) {
                return Err(SpaceError::DuplicateNeighborhood(name));
            }
            if s.size() < 2 {
                return Err(SpaceError::CarrierTooSmall {
                    neighborhood: name,
                    size: s.size(),
                });
            }
            if !s.verify_descriptor()?.passes() {
                return Err(SpaceError::UnverifiedStructure(name));
            }
            if let Some((kept, _)) = neighborhoods.iter().find(|(_, t)| **t == s) {
                aliases.insert(name, kept.clone());
            } else {
                neighborhoods.insert(name, s);
            }
        }
        let universe = Universe::new(
            neighborhoods
                .values()
                .flat_map(|s| s.carrier().iter().cloned())
                .collect::<BTreeSet<_>>(),
        )?;
        let subbasis = neighborhoods
            .values()
            .map(|s| universe.set(s.carrier()))
            .collect::<Result<Vec<_>, _>>()?;
        let space = FiniteSpace::generated(universe, &subbasis);
        let assignment = canonical_assignment(&space, &neighborhoods, hints, &aliases)?;
        StructuredSpace::from_parts(space, neighborhoods, assignment)
    }

    pub fn space(&self) -> &FiniteSpace {
        &self.space
    }

    pub fn universe(&self) -> &Universe {
        self.space.universe()
    }

    /// The neighborhood family, keyed and ordered by name.
    pub fn neighborhoods(&self) -> &BTreeMap<String, FiniteStructure> {
        &self.neighborhoods
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.neighborhoods.keys()
    }

    pub fn neighborhood(&self, name: &str) -> Result<&FiniteStructure, SpaceError> {
        self.neighborhoods
            .get(name)
            .ok_or_else(|| SpaceError::UnknownNeighborhood(name.to_owned()))
    }

    /// Carrier of a neighborhood as a subset of the universe.
    pub fn carrier(&self, name: &str) -> Result<&PointSet, SpaceError> {
        self.carriers
            .get(name)
            .ok_or_else(|| SpaceError::UnknownNeighborhood(name.to_owned()))
    }

    pub fn carriers(&self) -> &BTreeMap<String, PointSet> {
        &self.carriers
    }

    /// The fixed neighborhood of `p`.
    pub fn assigned(&self, p: &PointId) -> Result<&str, SpaceError> {
        let i = self
            .universe()
            .index_of(p)
            .ok_or_else(|| SpaceError::PointOutsideUniverse(p.clone()))?;
        Ok(&self.assignment[i])
    }

    pub fn assignment(&self) -> BTreeMap<PointId, String> {
        self.universe()
            .points()
            .iter()
            .cloned()
            .zip(self.assignment.iter().cloned())
            .collect()
    }

    pub fn structure_map(&self, name: &str) -> Result<&StructureDescriptor, SpaceError> {
        Ok(self.neighborhood(name)?.descriptor())
    }

    /// Descriptor of the fixed neighborhood of `p`.
    pub fn modified_structure_map(&self, p: &PointId) -> Result<&StructureDescriptor, SpaceError> {
        self.structure_map(self.assigned(p)?)
    }

    /// Distinct descriptors in order of first occurrence by neighborhood name.
    pub fn catalog(&self) -> DescriptorCatalog {
        let mut entries: Vec<CatalogEntry> = Vec::new();
        for (name, s) in &self.neighborhoods {
            match entries.iter_mut().find(|e| &e.descriptor == s.descriptor()) {
                Some(e) => e.neighborhoods.push(name.clone()),
                None => entries.push(CatalogEntry {
                    descriptor: s.descriptor().clone(),
                    neighborhoods: vec![name.clone()],
                }),
            }
        }
        DescriptorCatalog { entries }
    }

    /// Checks every requirement and lists all failures.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (name, s) in &self.neighborhoods {
            if s.size() < 2 {
                violations.push(Violation::CarrierTooSmall {
                    neighborhood: name.clone(),
                    size: s.size(),
                });
            }
            match s.verify_descriptor() {
                Ok(report) => {
                    for r in report.failures() {
                        violations.push(Violation::PropertyFails {
                            neighborhood: name.clone(),
                            spec: r.spec.clone(),
                            witness: r
                                .residual
                                .witness()
                                .cloned()
                                .expect("failures carry witnesses"),
                        });
                    }
                }
                Err(e) => violations.push(Violation::PropertyUnevaluable {
                    neighborhood: name.clone(),
                    error: e.to_string(),
                }),
            }
        }
        let mut covered = self.universe().empty_set();
        for (i, name) in self.assignment.iter().enumerate() {
            let point = self.universe().point(i).clone();
            let carrier = &self.carriers[name];
            covered = covered.union(carrier);
            if !carrier.contains(i) {
                violations.push(Violation::NotContaining {
                    point,
                    neighborhood: name.clone(),
                });
            } else if !self.space.minimal_open(i).is_subset(carrier) {
                violations.push(Violation::NotANeighborhood {
                    point,
                    neighborhood: name.clone(),
                });
            }
        }
        for i in covered.complement().iter() {
            violations.push(Violation::NotCovered {
                point: self.universe().point(i).clone(),
            });
        }
        ValidationReport { violations }
    }

    /// The space on the union of the chosen carriers with the subspace
    /// topology. Points keep their neighborhood when it is chosen and are
    /// otherwise reassigned to the first chosen neighborhood containing them.
    pub fn subspace(&self, subfamily: &[String]) -> Result<StructuredSpace, SpaceError> {
        if subfamily.is_empty() {
            return Err(SpaceError::EmptySubfamily);
        }
        let mut chosen = BTreeMap::new();
        let mut union = self.universe().empty_set();
        for name in subfamily {
            let s = self.neighborhood(name)?;
            union = union.union(&self.carriers[name]);
            chosen.insert(name.clone(), s.clone());
        }
        let space = self.space.restrict(&union)?;
        let mut assignment = BTreeMap::new();
        for i in union.iter() {
            let p = self.universe().point(i);
            let own = &self.assignment[i];
            let name = if chosen.contains_key(own) {
                own.clone()
            } else {
                chosen
                    .keys()
                    .find(|n| self.carriers[*n].contains(i))
                    .expect("every point of the union lies in a chosen carrier")
                    .clone()
            };
            assignment.insert(p.clone(), name);
        }
        StructuredSpace::from_parts(space, chosen, assignment)
    }
}

fn canonical_assignment(
    space: &FiniteSpace,
    neighborhoods: &BTreeMap<String, FiniteStructure>,
    hints: &BTreeMap<PointId, String>,
    aliases: &BTreeMap<String, String>,
) -> Result<BTreeMap<PointId, String>, SpaceError> {
    let mut assignment = BTreeMap::new();
    for p in space.universe().points() {
        let name = match hints.get(p) {
            Some(h) => {
                let h = aliases.get(h).unwrap_or(h);
                let s = neighborhoods
                    .get(h)
                    .ok_or_else(|| SpaceError::UnknownNeighborhood(h.clone()))?;
                if s.index_of(p).is_none() {
                    return Err(SpaceError::InvalidHint {
                        point: p.clone(),
                        neighborhood: h.clone(),
                    });
                }
                h.clone()
            }
            None => neighborhoods
                .iter()
                .find(|(_, s)| s.index_of(p).is_some())
                .map(|(n, _)| n.clone())
                .expect("the universe is the union of the carriers"),
        };
        assignment.insert(p.clone(), name);
    }
    if let Some(p) = hints.keys().find(|p| !space.universe().contains(p)) {
        return Err(SpaceError::PointOutsideUniverse(p.clone()));
    }
    Ok(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::PropertyKind;
    use crate::fixtures;
    use proptest::prelude::*;

    #[test]
    fn f1_validates() {
        let f1 = fixtures::f1();
        assert_eq!(f1.universe().len(), 3);
        assert_eq!(f1.neighborhoods().len(), 2);
        assert!(f1.validate().passes(), "{:?}", f1.validate());
        assert_eq!(f1.assigned(&"2".into()).unwrap(), "U_a");
        assert_eq!(f1.assigned(&"3".into()).unwrap(), "U_b");
    }

    #[test]
    fn singleton_carrier_is_reported() {
        let s = fixtures::magma(&["p"], "·", |_, _| 0, &[]);
        let u = Universe::new(["p"]).unwrap();
        let space = FiniteSpace::indiscrete(u);
        let ss = StructuredSpace::from_parts(
            space,
            [("U".to_string(), s)].into(),
            [("p".into(), "U".to_string())].into(),
        )
        .unwrap();
        let report = ss.validate();
        assert_eq!(
            report.violations,
            vec![Violation::CarrierTooSmall {
                neighborhood: "U".into(),
                size: 1
            }]
        );
        assert!(report.violations[0].to_string().contains("1-generalised"));
    }

    #[test]
    fn false_declaration_is_reported_with_witness() {
        let lp = fixtures::magma(&["0", "1"], "·", |a, _| a, &[PropertyKind::Commutativity]);
        let u = Universe::new(["0", "1"]).unwrap();
        let ss = StructuredSpace::from_parts(
            FiniteSpace::indiscrete(u),
            [("U".to_string(), lp)].into(),
            [("0".into(), "U".to_string()), ("1".into(), "U".to_string())].into(),
        )
        .unwrap();
        let report = ss.validate();
        assert!(matches!(
            &report.violations[..],
            [Violation::PropertyFails {
                witness: Witness::Commutativity { .. },
                ..
            }]
        ));
    }

    #[test]
    fn explicit_topology_rechecks_neighborhoods() {
        let f1 = fixtures::f1();
        let u = f1.universe().clone();
        // only {1} and X are nontrivially open, so {2,3} is not a neighborhood of 3
        let space = FiniteSpace::new(
            u.clone(),
            vec![
                u.empty_set(),
                u.set(["1"]).unwrap(),
                u.set(["1", "2"]).unwrap(),
                u.full_set(),
            ],
        )
        .unwrap();
        let ss = StructuredSpace::from_parts(space, f1.neighborhoods().clone(), f1.assignment())
            .unwrap();
        let report = ss.validate();
        assert_eq!(
            report.violations,
            vec![Violation::NotANeighborhood {
                point: "3".into(),
                neighborhood: "U_b".into()
            }]
        );
    }

    #[test]
    fn structure_maps() {
        let ex = fixtures::unital_and_abelian();
        let d2 = ex.structure_map("U_2").unwrap();
        assert_eq!(d2.operations(), &["·3".to_string()]);
        assert_eq!(
            d2.properties()
                .iter()
                .map(|p| p.kind.clone())
                .collect::<Vec<_>>(),
            vec![PropertyKind::Closure, PropertyKind::Identity]
        );
        assert!(d2.nonalg().is_empty());
        assert_eq!(ex.structure_map("U_3").unwrap().properties().len(), 5);
        assert_eq!(
            ex.structure_map("U_9"),
            Err(SpaceError::UnknownNeighborhood("U_9".into()))
        );
        for p in ex.universe().points() {
            assert_eq!(
                ex.modified_structure_map(p).unwrap(),
                ex.structure_map(ex.assigned(p).unwrap()).unwrap()
            );
        }
        assert_eq!(
            ex.modified_structure_map(&"nowhere".into()),
            Err(SpaceError::PointOutsideUniverse("nowhere".into()))
        );
        assert_eq!(ex.catalog().entries.len(), 2);
    }

    #[test]
    fn single_group_covers_everything() {
        let z3 = fixtures::cyclic("Z", 3);
        let ss = StructuredSpace::build_from_collection(vec![("G".into(), z3)], &BTreeMap::new())
            .unwrap();
        assert!(ss.validate().passes());
        assert!(ss.assignment().values().all(|n| n == "G"));
        assert_eq!(ss.space().opens().len(), 2);
    }

    #[test]
    fn unverified_structures_are_refused() {
        let lp = fixtures::magma(&["0", "1"], "·", |a, _| a, &[PropertyKind::Commutativity]);
        assert_eq!(
            StructuredSpace::build_from_collection(vec![("U".into(), lp)], &BTreeMap::new()),
            Err(SpaceError::UnverifiedStructure("U".into()))
        );
        assert_eq!(
            StructuredSpace::build_from_collection(vec![], &BTreeMap::new()),
            Err(SpaceError::EmptyCollection)
        );
    }

    #[test]
    fn hints_override_the_canonical_choice() {
        let f1 = fixtures::f1();
        let parts: Vec<(String, FiniteStructure)> = f1
            .neighborhoods()
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let hinted = StructuredSpace::build_from_collection(
            parts.clone(),
            &[("2".into(), "U_b".to_string())].into(),
        )
        .unwrap();
        assert_eq!(hinted.assigned(&"2".into()).unwrap(), "U_b");
        assert_eq!(
            StructuredSpace::build_from_collection(
                parts,
                &[("1".into(), "U_b".to_string())].into()
            ),
            Err(SpaceError::InvalidHint {
                point: "1".into(),
                neighborhood: "U_b".into()
            })
        );
    }

    #[test]
    fn subspaces() {
        let f1 = fixtures::f1();
        let sub = f1.subspace(&["U_a".into()]).unwrap();
        assert_eq!(sub.universe().points(), &["1".into(), "2".into()][..]);
        assert!(sub.validate().passes());

        let all = f1.subspace(&["U_a".into(), "U_b".into()]).unwrap();
        assert_eq!(all.universe(), f1.universe());
        assert_eq!(all.catalog(), f1.catalog());
        assert_eq!(f1.subspace(&[]), Err(SpaceError::EmptySubfamily));
    }

    proptest! {
        #[test]
        fn generated_collections_validate(specs in proptest::collection::vec(
            (proptest::collection::btree_set(0usize..6, 2..=4), 0usize..3), 1..4)
        ) {
            let structures: Vec<(String, FiniteStructure)> = specs
                .iter()
                .enumerate()
                .map(|(k, (pts, kind))| {
                    let names: Vec<String> = pts.iter().map(|p| format!("x{p}")).collect();
                    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
                    let n = refs.len();
                    let s = match kind {
                        0 => fixtures::magma(&refs, "·", |a, _| a, &[PropertyKind::Closure, PropertyKind::Associativity]),
                        1 => fixtures::magma(&refs, "+", move |a, b| (a + b) % n, &[PropertyKind::Commutativity, PropertyKind::Identity]),
                        _ => fixtures::magma(&refs, "∨", |a, b| a.max(b), &[PropertyKind::Commutativity]),
                    };
                    (format!("U{k}"), s)
                })
                .collect();
            let ss = StructuredSpace::build_from_collection(structures, &BTreeMap::new()).unwrap();
            prop_assert!(ss.validate().passes());
            for c in ss.carriers().values() {
                prop_assert!(ss.space().is_open(c));
            }
            for p in ss.universe().points() {
                prop_assert_eq!(
                    ss.modified_structure_map(p).unwrap(),
                    ss.structure_map(ss.assigned(p).unwrap()).unwrap()
                );
            }
        }
    }
}
