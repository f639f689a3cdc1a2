use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{AtomMeasure, ExtRational, MeasureError};
use crate::space::{SpaceError, StructuredSpace};
use crate::topology::{PointId, PointSet};
use crate::Verdict;

/// Two distinct neighborhoods sharing `point`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Overlap {
    pub left: String,
    pub right: String,
    pub point: PointId,
}

/// A subcollection of pairwise disjoint carriers covering all but a null set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaPartition {
    pub collection: Vec<String>,
    pub remainder: Vec<PointId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum MuUnionFailure {
    NotCovering {
        point: PointId,
    },
    PositiveOverlap {
        left: String,
        right: String,
        measure: ExtRational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictionClass {
    pub is_mu_union: bool,
    pub is_mu_cr: bool,
    pub is_mu_cdr: bool,
    pub union_failure: Option<MuUnionFailure>,
    /// A neighborhood whose descriptor class has no member in the subcollection.
    pub missing_class: Option<String>,
    /// Two equivalent members of the subcollection.
    pub equivalent_pair: Option<(String, String)>,
}

/// A pair of neighborhoods with the measure of their overlap.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairWitness {
    pub left: String,
    pub right: String,
    pub overlap: ExtRational,
    pub equivalent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Homogeneity {
    pub locally: bool,
    pub globally: bool,
    pub local_witness: Option<PairWitness>,
    pub global_witness: Option<PairWitness>,
}

pub fn is_partitionable(s: &StructuredSpace) -> Verdict<Overlap> {
    let carriers: Vec<_> = s.carriers().iter().collect();
    for (i, (ln, l)) in carriers.iter().enumerate() {
        for (rn, r) in &carriers[i + 1..] {
            if let Some(k) = l.intersection(r).first() {
                return Verdict::Fails(Overlap {
                    left: (*ln).clone(),
                    right: (*rn).clone(),
                    point: s.universe().point(k).clone(),
                });
            }
        }
    }
    Verdict::Holds
}

/// Resolves a subcollection to sorted, distinct names and their carriers.
pub(super) fn members<'a>(
    s: &'a StructuredSpace,
    m: &AtomMeasure,
    c: &[String],
) -> Result<Vec<(&'a String, &'a PointSet)>, MeasureError> {
    if m.universe() != s.universe() {
        return Err(MeasureError::UniverseMismatch);
    }
    let names: BTreeSet<&String> = c.iter().collect();
    names
        .into_iter()
        .map(|n| {
            s.carriers()
                .get_key_value(n)
                .ok_or_else(|| SpaceError::UnknownNeighborhood(n.clone()).into())
        })
        .collect()
}

fn check_carriers(s: &StructuredSpace, m: &AtomMeasure) -> Result<(), MeasureError> {
    if m.universe() != s.universe() {
        return Err(MeasureError::UniverseMismatch);
    }
    for carrier in s.carriers().values() {
        m.measure_of(carrier)?;
    }
    Ok(())
}

/// Checks a candidate μ-LA collection, returning the remainder or a reason.
pub(super) fn la_remainder(
    s: &StructuredSpace,
    m: &AtomMeasure,
    members: &[(&String, &PointSet)],
) -> Result<Result<PointSet, String>, MeasureError> {
    let mut covered = s.universe().empty_set();
    for (name, u) in members {
        if !covered.is_disjoint(u) {
            return Ok(Err(format!("`{name}` meets an earlier member")));
        }
        covered = covered.union(u);
    }
    let rest = covered.complement();
    let null = m.measure_of(&rest)?;
    if !null.is_zero() {
        return Ok(Err(format!("the remainder has measure {null}")));
    }
    let total = m.measure_of(&s.universe().full_set())?;
    let sum: ExtRational = members
        .iter()
        .map(|(_, u)| m.measure_of(u))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .sum();
    if total != sum {
        return Ok(Err(format!("μ(X) = {total} but the members sum to {sum}")));
    }
    Ok(Ok(rest))
}

/// Exhaustive search, larger subcollections first, then lexicographic by name.
pub fn find_mu_la_partition(
    s: &StructuredSpace,
    m: &AtomMeasure,
) -> Result<Option<LaPartition>, MeasureError> {
    check_carriers(s, m)?;
    let all: Vec<(&String, &PointSet)> = s.carriers().iter().collect();
    for k in (1..=all.len()).rev() {
        let mut pick: Vec<usize> = (0..k).collect();
        loop {
            let chosen: Vec<_> = pick.iter().map(|&i| all[i]).collect();
            if let Ok(rest) = la_remainder(s, m, &chosen)? {
                return Ok(Some(LaPartition {
                    collection: chosen.iter().map(|(n, _)| (*n).clone()).collect(),
                    remainder: s.universe().names(&rest),
                }));
            }
            if !next_combination(&mut pick, all.len()) {
                break;
            }
        }
    }
    Ok(None)
}

fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    for i in (0..k).rev() {
        if pick[i] < n - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

pub fn is_mu_union(
    s: &StructuredSpace,
    m: &AtomMeasure,
    c: &[String],
) -> Result<Verdict<MuUnionFailure>, MeasureError> {
    check_carriers(s, m)?;
    let members = members(s, m, c)?;
    let covered = members
        .iter()
        .fold(s.universe().empty_set(), |acc, (_, u)| acc.union(u));
    if let Some(k) = covered.complement().first() {
        return Ok(Verdict::Fails(MuUnionFailure::NotCovering {
            point: s.universe().point(k).clone(),
        }));
    }
    for (i, (ln, l)) in members.iter().enumerate() {
        for (rn, r) in &members[i + 1..] {
            let measure = m.measure_of(&l.intersection(r))?;
            if !measure.is_zero() {
                return Ok(Verdict::Fails(MuUnionFailure::PositiveOverlap {
                    left: (*ln).clone(),
                    right: (*rn).clone(),
                    measure,
                }));
            }
        }
    }
    Ok(Verdict::Holds)
}

fn equivalent(s: &StructuredSpace, a: &str, b: &str) -> bool {
    let da = s.neighborhoods()[a].descriptor();
    let db = s.neighborhoods()[b].descriptor();
    da.is_equivalent(db)
}

pub fn classify_restriction(
    s: &StructuredSpace,
    m: &AtomMeasure,
    c: &[String],
) -> Result<RestrictionClass, MeasureError> {
    let union = is_mu_union(s, m, c)?;
    let members = members(s, m, c)?;
    let missing_class = s
        .names()
        .find(|n| !members.iter().any(|(c, _)| equivalent(s, n, c)))
        .cloned();
    let mut equivalent_pair = None;
    'outer: for (i, (a, _)) in members.iter().enumerate() {
        for (b, _) in &members[i + 1..] {
            if equivalent(s, a, b) {
                equivalent_pair = Some(((*a).clone(), (*b).clone()));
                break 'outer;
            }
        }
    }
    let is_mu_union = union.holds();
    let is_mu_cr = is_mu_union && missing_class.is_none();
    Ok(RestrictionClass {
        is_mu_union,
        is_mu_cr,
        is_mu_cdr: is_mu_cr && equivalent_pair.is_none(),
        union_failure: union.into_witness(),
        missing_class,
        equivalent_pair,
    })
}

/// Local: positive overlap forces equivalent descriptors. Global: the converse
/// holds as well. Pairs are distinct neighborhoods in name order.
pub fn homogeneity(s: &StructuredSpace, m: &AtomMeasure) -> Result<Homogeneity, MeasureError> {
    check_carriers(s, m)?;
    let carriers: Vec<_> = s.carriers().iter().collect();
    let mut local_witness = None;
    let mut global_witness = None;
    for (i, (ln, l)) in carriers.iter().enumerate() {
        for (rn, r) in &carriers[i + 1..] {
            let overlap = m.measure_of(&l.intersection(r))?;
            let positive = !overlap.is_zero();
            let eq = equivalent(s, ln, rn);
            let witness = || PairWitness {
                left: (*ln).clone(),
                right: (*rn).clone(),
                overlap: overlap.clone(),
                equivalent: eq,
            };
            if positive && !eq && local_witness.is_none() {
                local_witness = Some(witness());
            }
            if positive != eq && global_witness.is_none() {
                global_witness = Some(witness());
            }
        }
    }
    Ok(Homogeneity {
        locally: local_witness.is_none(),
        globally: global_witness.is_none(),
        local_witness,
        global_witness,
    })
}
