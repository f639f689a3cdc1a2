//! Finite algebraic structures given by binary operation tables.
//!
//! A [`FiniteStructure`] is a carrier, a set of named, possibly partial
//! operation tables, and a [`StructureDescriptor`] recording which laws the
//! structure is declared to satisfy. Each law is checked by an encoding
//! function ([`FiniteStructure::evaluate_encoding`]) whose residual must be
//! zero at every argument for the law to hold.

mod descriptor;
mod encoding;
mod morphism;
mod structure;

use thiserror::Error;

use crate::topology::PointId;

pub use descriptor::{
    Inequivalence, NonAlgTag, ParseKindError, PropertyKind, PropertySpec, StructureDescriptor,
};
pub use encoding::{DescriptorReport, IdentityRefutation, PropertyResult, Residual, Side, Witness};
pub(crate) use morphism::first_violation;
pub use morphism::{
    find_isomorphism, is_homomorphism, HomomorphismFailure, Isomorphism, MismatchKind,
};
pub use structure::{Entry, FiniteStructure, OperationTable, ProductFactors};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("a structure needs a nonempty carrier")]
    EmptyCarrier,
    #[error("point identifiers must be nonempty")]
    EmptyPointId,
    #[error("point `{0}` occurs twice in the carrier")]
    DuplicatePoint(PointId),
    #[error("operation names must be nonempty")]
    EmptyOperationName,
    #[error("operation `{0}` is defined twice")]
    DuplicateOperation(String),
    #[error("table `{op}` has order {found} but the carrier has {expected} points")]
    TableSizeMismatch {
        op: String,
        expected: usize,
        found: usize,
    },
    #[error("table `{op}` has a value outside the carrier")]
    ValueOutOfRange { op: String },
    #[error("entry {entry:?} of `{op}` mentions a point outside the carrier")]
    UnknownPoint { op: String, entry: Entry },
    #[error("`{op}` has two different values for ({left}, {right})")]
    ConflictingEntry {
        op: String,
        left: PointId,
        right: PointId,
    },
    #[error("no operation named `{0}`")]
    UnknownOperation(String),
    #[error("invertibility of `{0}` is declared without an identity on the same operation")]
    MissingIdentityPrerequisite(String),
    #[error("pair law on `{0}` needs the factor structures of a product")]
    MissingFactors(String),
    #[error("factor data is inconsistent: {0}")]
    InvalidFactors(String),
    #[error("operation `{0}` has no partner in the operation pairing")]
    UnpairedOperation(String),
    #[error("point `{0}` has no image under the map")]
    UnmappedPoint(PointId),
    #[error("image `{0}` is outside the target carrier")]
    ImageOutsideCarrier(PointId),
    /// Reserved for operations of arity other than two.
    #[error("operations `{left}` and `{right}` have different arities")]
    ArityMismatch { left: String, right: String },
}
