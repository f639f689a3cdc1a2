//! Products, isomorphic replacement, congruence quotients and direct limits
//! of structured spaces.

mod limit;
mod product;
mod quotient;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{AlgebraError, PropertySpec, Witness};
use crate::space::{SpaceError, ValidationReport};
use crate::topology::{PointId, TopologyError};

pub use limit::{
    cone_commutes, direct_limit, union_of_direct_limits, validate_direct_system, DirectLimit,
    DirectSystem, SystemReport, SystemViolation,
};
pub use product::{product, replace_isomorphic};
pub use quotient::{
    normal_subgroup_congruence, quotient, CongruenceSpec, CongruenceWitness, SubgroupFailure,
};

/// A pair of elements of one algebra in a direct system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexedPoint {
    pub index: String,
    pub point: PointId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("input `{which}` does not validate ({} violation(s))", report.violations.len())]
    InvalidInput {
        which: String,
        report: ValidationReport,
    },
    #[error("replacement for `{neighborhood}` is not a bijection: {reason}")]
    NonBijectiveReplacement {
        neighborhood: String,
        reason: String,
    },
    #[error("no congruence given for `{0}`")]
    MissingCongruence(String),
    #[error("congruence for `{0}` given twice")]
    DuplicateCongruence(String),
    #[error("blocks for `{neighborhood}` do not partition its carrier: {reason}")]
    InvalidPartition {
        neighborhood: String,
        reason: String,
    },
    #[error("partition of `{neighborhood}` is not a congruence")]
    NotACongruence {
        neighborhood: String,
        witness: Box<CongruenceWitness>,
    },
    #[error("quotient of `{neighborhood}` has {size} point(s)")]
    QuotientTooSmall { neighborhood: String, size: usize },
    #[error("`{neighborhood}` loses {spec} after the construction")]
    DescriptorLost {
        neighborhood: String,
        spec: PropertySpec,
        witness: Box<Witness>,
    },
    #[error("structure is not a verified group under any operation")]
    NotAGroup,
    #[error("not a subgroup: {0:?}")]
    NotASubgroup(SubgroupFailure),
    #[error("subgroup is not normal: {conjugator} · {element} · {conjugator}⁻¹ = {conjugate}")]
    NotNormal {
        conjugator: PointId,
        element: PointId,
        conjugate: PointId,
    },
    #[error("direct system is invalid ({} violation(s))", .0.violations.len())]
    InvalidDirectSystem(SystemReport),
    #[error("operation `{op}` is not well defined on the limit at {left:?}, {right:?}")]
    IllDefinedOperation {
        op: String,
        left: IndexedPoint,
        right: IndexedPoint,
    },
    #[error("limit of system `{system}` has {size} point(s)")]
    LimitTooSmall { system: String, size: usize },
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
}

/// Re-checks a declared descriptor on a constructed structure.
fn reverify(
    neighborhood: &str,
    s: &crate::algebra::FiniteStructure,
) -> Result<(), ConstructionError> {
    let report = s.verify_descriptor()?;
    if let Some(r) = report.failures().next() {
        return Err(ConstructionError::DescriptorLost {
            neighborhood: neighborhood.to_owned(),
            spec: r.spec.clone(),
            witness: Box::new(
                r.residual
                    .witness()
                    .cloned()
                    .expect("failures carry witnesses"),
            ),
        });
    }
    Ok(())
}
