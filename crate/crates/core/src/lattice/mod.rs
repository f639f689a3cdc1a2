//! The map sending each point to the neighborhoods containing it, the poset
//! it induces on the space, and the converse construction from a lattice.

mod poset;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, FiniteStructure, OperationTable, PropertyKind, PropertySpec};
use crate::space::{SpaceError, StructuredSpace};
use crate::topology::{FiniteSpace, PointId, TopologyError, Universe};
use crate::Verdict;

pub use poset::{verify_lattice, BoundFailure, BoundKind, LatticeVerdict, Poset, PosetError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("a lattice of {0} element(s) cannot carry a neighborhood")]
    TooSmall(usize),
    #[error("not a lattice: {0:?}")]
    NotALattice(BoundFailure),
    #[error(transparent)]
    Poset(#[from] PosetError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// For each point, the names of the neighborhoods containing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HAssignment {
    values: BTreeMap<PointId, BTreeSet<String>>,
}

impl HAssignment {
    pub fn get(&self, p: &PointId) -> Option<&BTreeSet<String>> {
        self.values.get(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PointId, &BTreeSet<String>)> {
        self.values.iter()
    }

    /// The preorder `h(p) ⊆ h(q)` on points.
    pub fn leq(&self, p: &PointId, q: &PointId) -> Option<bool> {
        Some(self.values.get(p)?.is_subset(self.values.get(q)?))
    }

    /// Distinct values, in order of their first point.
    pub fn distinct_values(&self) -> Vec<&BTreeSet<String>> {
        let mut seen = BTreeSet::new();
        self.values.values().filter(|v| seen.insert(*v)).collect()
    }
}

pub fn h_map(s: &StructuredSpace) -> HAssignment {
    let values = s
        .universe()
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let h = s
                .carriers()
                .iter()
                .filter(|(_, c)| c.contains(i))
                .map(|(n, _)| n.clone())
                .collect();
            (p.clone(), h)
        })
        .collect();
    HAssignment { values }
}

/// Holds when every nonempty subcollection of neighborhoods is some `h(x)`.
/// Otherwise lists the missing ones, smaller first and then by name; this
/// listing is exponential in the number of neighborhoods.
pub fn is_h_surjective(s: &StructuredSpace) -> Verdict<Vec<Vec<String>>> {
    let names: Vec<&String> = s.names().collect();
    let realized: BTreeSet<BTreeSet<String>> = h_map(s).values.into_values().collect();
    if names.len() < 64 && realized.len() as u64 == (1u64 << names.len()) - 1 {
        return Verdict::Holds;
    }
    let mut missing = Vec::new();
    for k in 1..=names.len() {
        let mut pick: Vec<usize> = (0..k).collect();
        loop {
            let sub: BTreeSet<String> = pick.iter().map(|&i| names[i].clone()).collect();
            if !realized.contains(&sub) {
                missing.push(sub.into_iter().collect());
            }
            let Some(i) = (0..k).rev().find(|&i| pick[i] < names.len() - k + i) else {
                break;
            };
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
        }
    }
    Verdict::Fails(missing)
}

/// Points sharing one value of `h`, labelled `[p]` after their first point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetClass {
    pub label: String,
    pub points: Vec<PointId>,
    pub h: BTreeSet<String>,
}

/// Classes of equal `h` ordered by inclusion of their values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientPoset {
    classes: Vec<PosetClass>,
    order: Poset,
    surjective: bool,
}

pub fn induced_poset(s: &StructuredSpace) -> QuotientPoset {
    let h = h_map(s);
    let mut classes: Vec<PosetClass> = Vec::new();
    for p in s.universe().points() {
        let value = &h.values[p];
        match classes.iter_mut().find(|c| &c.h == value) {
            Some(c) => c.points.push(p.clone()),
            None => classes.push(PosetClass {
                label: format!("[{p}]"),
                points: vec![p.clone()],
                h: value.clone(),
            }),
        }
    }
    let leq = classes
        .iter()
        .map(|a| classes.iter().map(|b| a.h.is_subset(&b.h)).collect())
        .collect();
    let labels = classes.iter().map(|c| c.label.clone()).collect();
    let order = Poset::new(labels, leq).expect("inclusion of distinct sets is a partial order");
    QuotientPoset {
        classes,
        order,
        surjective: is_h_surjective(s).holds(),
    }
}

/// Lattice verdict on a quotient, plus the check that joins are unions of
/// `h`-values when `h` is surjective.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientLatticeReport {
    pub verdict: LatticeVerdict,
    /// `None` when `h` is not surjective.
    pub joins_are_unions: Option<bool>,
}

impl QuotientPoset {
    pub fn classes(&self) -> &[PosetClass] {
        &self.classes
    }

    pub fn order(&self) -> &Poset {
        &self.order
    }

    pub fn surjective(&self) -> bool {
        self.surjective
    }

    pub fn class_of(&self, p: &PointId) -> Option<usize> {
        self.classes.iter().position(|c| c.points.contains(p))
    }

    pub fn verify_lattice(&self) -> QuotientLatticeReport {
        let verdict = verify_lattice(&self.order);
        let joins_are_unions = self.surjective.then(|| {
            let n = self.classes.len();
            (0..n).all(|i| {
                (0..n).all(|j| match self.order.join(i, j) {
                    Some(u) => {
                        let union: BTreeSet<String> = self.classes[i]
                            .h
                            .union(&self.classes[j].h)
                            .cloned()
                            .collect();
                        self.classes[u].h == union
                    }
                    None => false,
                })
            })
        });
        QuotientLatticeReport {
            verdict,
            joins_are_unions,
        }
    }

    /// Hasse diagram with classes labelled by their sorted `h`-values.
    pub fn to_dot(&self) -> String {
        let labels: Vec<String> = self
            .classes
            .iter()
            .map(|c| format!("{{{}}}", c.h.iter().cloned().collect::<Vec<_>>().join(",")))
            .collect();
        self.order.to_dot(&labels)
    }
}

/// The space built from a lattice: one neighborhood on the whole carrier with
/// operations `∨` and `∧`, the indiscrete topology, and equality as the
/// equivalence on points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConverseSpace {
    pub space: StructuredSpace,
    pub equivalence: Vec<Vec<PointId>>,
    pub h: HAssignment,
}

pub const CONVERSE_NEIGHBORHOOD: &str = "Y";

pub fn lattice_to_structured_space(l: &Poset) -> Result<ConverseSpace, LatticeError> {
    if l.len() < 2 {
        return Err(LatticeError::TooSmall(l.len()));
    }
    let verdict = verify_lattice(l);
    if let Some(f) = verdict.counterexample {
        return Err(LatticeError::NotALattice(f));
    }
    let join = verdict.join_table.expect("lattices have join tables");
    let meet = verdict.meet_table.expect("lattices have meet tables");
    let n = l.len();
    let tables = vec![
        OperationTable::from_fn("∨", n, |a, b| Some(join[a][b])),
        OperationTable::from_fn("∧", n, |a, b| Some(meet[a][b])),
    ];
    let kinds = [
        PropertyKind::Closure,
        PropertyKind::Associativity,
        PropertyKind::Commutativity,
    ];
    let properties = ["∨", "∧"]
        .into_iter()
        .flat_map(|op| kinds.iter().map(move |k| PropertySpec::new(k.clone(), op)));
    let carrier: Vec<PointId> = l.elements().iter().map(PointId::new).collect();
    let structure = FiniteStructure::new(carrier.clone(), tables, properties, vec![])?;
    if !structure.verify_descriptor()?.passes() {
        return Err(SpaceError::UnverifiedStructure(CONVERSE_NEIGHBORHOOD.into()).into());
    }
    let universe = Universe::new(carrier)?;
    let assignment = universe
        .points()
        .iter()
        .map(|p| (p.clone(), CONVERSE_NEIGHBORHOOD.to_string()))
        .collect();
    let space = StructuredSpace::from_parts(
        FiniteSpace::indiscrete(universe.clone()),
        [(CONVERSE_NEIGHBORHOOD.to_string(), structure)].into(),
        assignment,
    )?;
    let h = h_map(&space);
    Ok(ConverseSpace {
        equivalence: universe.points().iter().map(|p| vec![p.clone()]).collect(),
        space,
        h,
    })
}
