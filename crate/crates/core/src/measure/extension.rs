use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::analysis::{classify_restriction, la_remainder, members, MuUnionFailure};
use super::{AtomMeasure, ExtRational, MeasureError};
use crate::algebra::{FiniteStructure, PropertySpec};
use crate::space::StructuredSpace;
use crate::topology::{PointId, PointSet, Universe};

/// New points `Z` and a structure on `Y ∪ Z`, where `Y` is the part of the
/// space left uncovered by the chosen subcollection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NullAdditionSpec {
    /// Name of the new neighborhood.
    pub name: String,
    pub new_points: Vec<PointId>,
    pub structure: FiniteStructure,
    /// Weights of new points; unlisted points weigh zero.
    pub weights: BTreeMap<PointId, ExtRational>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum NullAdditionViolation {
    Overlap {
        point: PointId,
    },
    DuplicatePoint {
        point: PointId,
    },
    CarrierMismatch {
        expected: Vec<PointId>,
        found: Vec<PointId>,
    },
    TooSmall {
        size: usize,
    },
    Unverified {
        spec: PropertySpec,
    },
    NameClash {
        name: String,
    },
    WeightOutsideAddition {
        point: PointId,
    },
}

/// Adds `Z` to the space and replaces everything outside `C` by one structure
/// on `Y ∪ Z`. The result is a partition of `X ∪ Z`.
pub fn apply_null_addition(
    s: &StructuredSpace,
    m: &AtomMeasure,
    c: &[String],
    spec: &NullAdditionSpec,
) -> Result<(StructuredSpace, AtomMeasure), MeasureError> {
    let chosen = members(s, m, c)?;
    let y = la_remainder(s, m, &chosen)?.map_err(MeasureError::InvalidWitness)?;
    let violation = |v| Err(MeasureError::SpecViolation(v));

    let mut z = BTreeSet::new();
    for p in &spec.new_points {
        if s.universe().contains(p) {
            return violation(NullAdditionViolation::Overlap { point: p.clone() });
        }
        if !z.insert(p.clone()) {
            return violation(NullAdditionViolation::DuplicatePoint { point: p.clone() });
        }
    }
    let expected: BTreeSet<PointId> = s
        .universe()
        .names(&y)
        .into_iter()
        .chain(z.iter().cloned())
        .collect();
    let found: BTreeSet<PointId> = spec.structure.carrier().iter().cloned().collect();
    if expected != found {
        return violation(NullAdditionViolation::CarrierMismatch {
            expected: expected.into_iter().collect(),
            found: found.into_iter().collect(),
        });
    }
    if expected.len() < 2 {
        return violation(NullAdditionViolation::TooSmall {
            size: expected.len(),
        });
    }
    if let Some(r) = spec.structure.verify_descriptor()?.failures().next() {
        return violation(NullAdditionViolation::Unverified {
            spec: r.spec.clone(),
        });
    }
    if chosen.iter().any(|(n, _)| **n == spec.name) {
        return violation(NullAdditionViolation::NameClash {
            name: spec.name.clone(),
        });
    }
    if let Some(p) = spec.weights.keys().find(|p| !z.contains(*p)) {
        return violation(NullAdditionViolation::WeightOutsideAddition { point: p.clone() });
    }

    let extra: Vec<PointId> = z.iter().cloned().collect();
    let extended = s.space().extension_topology(&extra)?;
    let universe = extended.universe().clone();
    let mut opens = Vec::with_capacity(chosen.len() + 1);
    for (_, u) in &chosen {
        opens.push(s.universe().translate(u, &universe)?);
    }
    let yz = universe.set(expected.iter())?;
    opens.push(yz.clone());
    let space = extended.refine(&opens);

    let mut neighborhoods = BTreeMap::new();
    for (n, _) in &chosen {
        neighborhoods.insert((*n).clone(), s.neighborhoods()[*n].clone());
    }
    neighborhoods.insert(spec.name.clone(), spec.structure.clone());
    let mut assignment = BTreeMap::new();
    for (i, p) in universe.points().iter().enumerate() {
        let owner = if yz.contains(i) {
            spec.name.clone()
        } else {
            chosen
                .iter()
                .zip(&opens)
                .find(|(_, o)| o.contains(i))
                .map(|((n, _), _)| (*n).clone())
                .expect("points outside Y lie in a member of C")
        };
        assignment.insert(p.clone(), owner);
    }

    let weights = space
        .borel_atoms()
        .iter()
        .map(|atom| {
            let p = universe.point(atom.first().expect("atoms are nonempty"));
            if s.universe().contains(p) {
                m.weight_of_point(p).cloned()
            } else {
                Ok(spec.weights.get(p).cloned().unwrap_or_default())
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let measure = AtomMeasure::from_atom_weights(&space, weights)?;
    let result = StructuredSpace::from_parts(space, neighborhoods, assignment)?;
    Ok((result, measure))
}

/// A null extension of a partner in `C`, proposed for one point outside it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proposal {
    pub added: Vec<PointId>,
    pub structure: FiniteStructure,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Rejection {
    PointNotAdded,
    OutsideUniverse {
        point: PointId,
    },
    NotMeasurable {
        atom: Vec<PointId>,
    },
    NotNull {
        measure: ExtRational,
    },
    MeetsPartner {
        point: PointId,
    },
    CarrierMismatch {
        expected: Vec<PointId>,
        found: Vec<PointId>,
    },
    Unverified {
        spec: PropertySpec,
    },
    DescriptorChanged,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EssentialMember {
    pub name: String,
    pub carrier: Vec<PointId>,
    /// The member of `C` this one extends, if any.
    pub extends: Option<String>,
    pub for_point: Option<PointId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EssentialPart {
    pub members: Vec<EssentialMember>,
    /// The extended family need not be a μ-union; this records whether it is.
    pub is_mu_union: bool,
    pub union_failure: Option<MuUnionFailure>,
    #[serde(skip)]
    pub structures: BTreeMap<String, FiniteStructure>,
}

/// Checks user-proposed null extensions, one per point lying outside its
/// equivalent partner in `C`. Extensions are named `{partner}+{point}`.
pub fn essential_part(
    s: &StructuredSpace,
    m: &AtomMeasure,
    c: &[String],
    proposals: &BTreeMap<PointId, Proposal>,
) -> Result<EssentialPart, MeasureError> {
    if !classify_restriction(s, m, c)?.is_mu_cdr {
        return Err(MeasureError::NotMuCdr);
    }
    let chosen = members(s, m, c)?;
    let universe = s.universe();
    let mut result: Vec<(EssentialMember, PointSet)> = chosen
        .iter()
        .map(|(n, u)| {
            let member = EssentialMember {
                name: (*n).clone(),
                carrier: universe.names(u),
                extends: None,
                for_point: None,
            };
            (member, (*u).clone())
        })
        .collect();
    let mut structures: BTreeMap<String, FiniteStructure> = chosen
        .iter()
        .map(|(n, _)| ((*n).clone(), s.neighborhoods()[*n].clone()))
        .collect();

    for (j, point) in universe.points().iter().enumerate() {
        let uj = s.assigned(point)?;
        if chosen.iter().any(|(n, _)| *n == uj) {
            continue;
        }
        let fj = s.neighborhoods()[uj].descriptor();
        let (partner, up) = chosen
            .iter()
            .find(|(n, _)| s.neighborhoods()[*n].descriptor().is_equivalent(fj))
            .ok_or_else(|| MeasureError::NoEquivalentInC(uj.to_owned()))?;
        if up.contains(j) {
            continue;
        }
        let proposal = proposals
            .get(point)
            .ok_or_else(|| MeasureError::MissingProposal(point.clone()))?;
        let reject = |reason| MeasureError::ProposalRejected {
            point: point.clone(),
            reason,
        };
        let zj = check_proposal(s, m, point, partner, up, proposal).map_err(reject)?;
        let name = format!("{partner}+{point}");
        let carrier = up.union(&zj);
        structures.insert(name.clone(), proposal.structure.clone());
        result.push((
            EssentialMember {
                name,
                carrier: universe.names(&carrier),
                extends: Some((*partner).clone()),
                for_point: Some(point.clone()),
            },
            carrier,
        ));
    }

    let union_failure = union_failure(universe, m, &result)?;
    Ok(EssentialPart {
        members: result.into_iter().map(|(member, _)| member).collect(),
        is_mu_union: union_failure.is_none(),
        union_failure,
        structures,
    })
}

fn check_proposal(
    s: &StructuredSpace,
    m: &AtomMeasure,
    point: &PointId,
    partner: &str,
    up: &PointSet,
    proposal: &Proposal,
) -> Result<PointSet, Rejection> {
    let universe = s.universe();
    if !proposal.added.contains(point) {
        return Err(Rejection::PointNotAdded);
    }
    let mut zj = universe.empty_set();
    for p in &proposal.added {
        let i = universe
            .index_of(p)
            .ok_or_else(|| Rejection::OutsideUniverse { point: p.clone() })?;
        zj.insert(i);
    }
    let measure = m.measure_of(&zj).map_err(|e| match e {
        MeasureError::NotMeasurable { atom, .. } => Rejection::NotMeasurable { atom },
        _ => unreachable!("the measure shares the space's universe"),
    })?;
    if !measure.is_zero() {
        return Err(Rejection::NotNull { measure });
    }
    if let Some(k) = zj.intersection(up).first() {
        return Err(Rejection::MeetsPartner {
            point: universe.point(k).clone(),
        });
    }
    let expected = universe.names(&up.union(&zj));
    let found: BTreeSet<PointId> = proposal.structure.carrier().iter().cloned().collect();
    if found.iter().ne(expected.iter()) {
        return Err(Rejection::CarrierMismatch {
            expected,
            found: found.into_iter().collect(),
        });
    }
    let report = proposal
        .structure
        .verify_descriptor()
        .map_err(|_| Rejection::DescriptorChanged)?;
    if let Some(r) = report.failures().next() {
        return Err(Rejection::Unverified {
            spec: r.spec.clone(),
        });
    }
    let target = s.neighborhoods()[partner].descriptor();
    if !proposal.structure.descriptor().is_equivalent(target) {
        return Err(Rejection::DescriptorChanged);
    }
    Ok(zj)
}

fn union_failure(
    universe: &Universe,
    m: &AtomMeasure,
    family: &[(EssentialMember, PointSet)],
) -> Result<Option<MuUnionFailure>, MeasureError> {
    let covered = family
        .iter()
        .fold(universe.empty_set(), |acc, (_, u)| acc.union(u));
    if let Some(k) = covered.complement().first() {
        return Ok(Some(MuUnionFailure::NotCovering {
            point: universe.point(k).clone(),
        }));
    }
    for (i, (l, lu)) in family.iter().enumerate() {
        for (r, ru) in &family[i + 1..] {
            let measure = m.measure_of(&lu.intersection(ru))?;
            if !measure.is_zero() {
                return Ok(Some(MuUnionFailure::PositiveOverlap {
                    left: l.name.clone(),
                    right: r.name.clone(),
                    measure,
                }));
            }
        }
    }
    Ok(None)
}
