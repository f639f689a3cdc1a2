use serde::{Deserialize, Serialize};

use super::{AlgebraError, FiniteStructure, OperationTable, PropertyKind, PropertySpec};
use crate::topology::PointId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    Both,
}

/// Why one candidate `e` is not an identity: `e · x` (left) or `x · e`
/// (right) is `value` instead of `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityRefutation {
    pub candidate: PointId,
    pub element: PointId,
    pub side: Side,
    pub value: Option<PointId>,
}

/// A point where an encoding residual is nonzero. Undefined products are `None`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum Witness {
    MissingPair {
        left: PointId,
        right: PointId,
    },
    Commutativity {
        left: PointId,
        right: PointId,
        forward: Option<PointId>,
        backward: Option<PointId>,
    },
    Associativity {
        x: PointId,
        y: PointId,
        z: PointId,
        left_grouping: Option<PointId>,
        right_grouping: Option<PointId>,
    },
    NoIdentity {
        side: Side,
        refutations: Vec<IdentityRefutation>,
    },
    NoInverse {
        identity: PointId,
        element: PointId,
    },
    /// A pair law failing on one factor; the inner witness names factor points.
    Component {
        side: Side,
        witness: Box<Witness>,
    },
    /// The product table disagrees with the factor tables at this pair.
    NotComponentwise {
        left: PointId,
        right: PointId,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", content = "witness", rename_all = "snake_case")]
pub enum Residual {
    ZeroEverywhere,
    Nonzero(Witness),
}

impl Residual {
    pub fn is_zero(&self) -> bool {
        matches!(self, Residual::ZeroEverywhere)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Residual::ZeroEverywhere => None,
            Residual::Nonzero(w) => Some(w),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropertyResult {
    pub spec: PropertySpec,
    pub residual: Residual,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DescriptorReport {
    pub results: Vec<PropertyResult>,
}

impl DescriptorReport {
    pub fn passes(&self) -> bool {
        self.results.iter().all(|r| r.residual.is_zero())
    }

    pub fn failures(&self) -> impl Iterator<Item = &PropertyResult> {
        self.results.iter().filter(|r| !r.residual.is_zero())
    }
}

impl FiniteStructure {
    /// Evaluates the residual of one law over the whole carrier.
    pub fn evaluate_encoding(&self, spec: &PropertySpec) -> Result<Residual, AlgebraError> {
        let table = self
            .table(&spec.op)
            .ok_or_else(|| AlgebraError::UnknownOperation(spec.op.clone()))?;
        match &spec.kind {
            PropertyKind::Invertibility => {
                let identity = PropertySpec::new(PropertyKind::Identity, spec.op.clone());
                if !self.descriptor().properties().contains(&identity) {
                    return Err(AlgebraError::MissingIdentityPrerequisite(spec.op.clone()));
                }
                Ok(residual(self.carrier(), table, &spec.kind))
            }
            PropertyKind::Pair(h, z) => self.evaluate_pair(&spec.op, table, h, z),
            kind => Ok(residual(self.carrier(), table, kind)),
        }
    }

    /// Evaluates every declared law.
    pub fn verify_descriptor(&self) -> Result<DescriptorReport, AlgebraError> {
        let results = self
            .descriptor()
            .properties()
            .iter()
            .map(|spec| {
                Ok(PropertyResult {
                    spec: spec.clone(),
                    residual: self.evaluate_encoding(spec)?,
                })
            })
            .collect::<Result<_, AlgebraError>>()?;
        Ok(DescriptorReport { results })
    }

    fn evaluate_pair(
        &self,
        op: &str,
        table: &OperationTable,
        h: &PropertyKind,
        z: &PropertyKind,
    ) -> Result<Residual, AlgebraError> {
        let factors = self
            .factors()
            .ok_or_else(|| AlgebraError::MissingFactors(op.to_owned()))?;
        let (lop, rop) = factors
            .operations
            .get(op)
            .ok_or_else(|| AlgebraError::MissingFactors(op.to_owned()))?;
        let (left, right) = (&factors.left, &factors.right);
        let lt = left
            .table(lop)
            .expect("factor operations are checked on attach");
        let rt = right
            .table(rop)
            .expect("factor operations are checked on attach");

        let comps: Vec<(usize, usize)> = self
            .carrier()
            .iter()
            .map(|p| {
                let (l, r) = &factors.points[p];
                (left.index_of(l).unwrap(), right.index_of(r).unwrap())
            })
            .collect();
        let n = self.size();
        for a in 0..n {
            for b in 0..n {
                let expected = match (
                    lt.get(comps[a].0, comps[b].0),
                    rt.get(comps[a].1, comps[b].1),
                ) {
                    (Some(l), Some(r)) => Some((l, r)),
                    _ => None,
                };
                if table.get(a, b).map(|c| comps[c]) != expected {
                    return Ok(Residual::Nonzero(Witness::NotComponentwise {
                        left: self.point(a).clone(),
                        right: self.point(b).clone(),
                    }));
                }
            }
        }

        for (side, structure, t, kind) in [(Side::Left, left, lt, h), (Side::Right, right, rt, z)] {
            let r = match kind {
                PropertyKind::Pair(..) => structure
                    .evaluate_encoding(&PropertySpec::new(kind.clone(), t.name().to_owned()))?,
                _ => residual(structure.carrier(), t, kind),
            };
            if let Residual::Nonzero(w) = r {
                return Ok(Residual::Nonzero(Witness::Component {
                    side,
                    witness: Box::new(w),
                }));
            }
        }
        Ok(Residual::ZeroEverywhere)
    }
}

/// Residual of a single-operation law; `kind` must not be a pair law.
fn residual(carrier: &[PointId], t: &OperationTable, kind: &PropertyKind) -> Residual {
    let n = t.order();
    let name = |i: usize| carrier[i].clone();
    let opt = |v: Option<usize>| v.map(name);
    match kind {
        PropertyKind::Closure => {
            for a in 0..n {
                for b in 0..n {
                    if t.get(a, b).is_none() {
                        return Residual::Nonzero(Witness::MissingPair {
                            left: name(a),
                            right: name(b),
                        });
                    }
                }
            }
        }
        PropertyKind::Commutativity => {
            for a in 0..n {
                for b in a + 1..n {
                    if t.get(a, b) != t.get(b, a) {
                        return Residual::Nonzero(Witness::Commutativity {
                            left: name(a),
                            right: name(b),
                            forward: opt(t.get(a, b)),
                            backward: opt(t.get(b, a)),
                        });
                    }
                }
            }
        }
        PropertyKind::Associativity => {
            for x in 0..n {
                for y in 0..n {
                    let xy = t.get(x, y);
                    for z in 0..n {
                        let l = xy.and_then(|v| t.get(v, z));
                        let r = t.get(y, z).and_then(|v| t.get(x, v));
                        if l != r {
                            return Residual::Nonzero(Witness::Associativity {
                                x: name(x),
                                y: name(y),
                                z: name(z),
                                left_grouping: opt(l),
                                right_grouping: opt(r),
                            });
                        }
                    }
                }
            }
        }
        PropertyKind::LeftIdentity => return identity_residual(carrier, t, Side::Left),
        PropertyKind::RightIdentity => return identity_residual(carrier, t, Side::Right),
        PropertyKind::Identity => return identity_residual(carrier, t, Side::Both),
        PropertyKind::Invertibility => {
            let Some(e) = find_identity(t, Side::Both) else {
                return identity_residual(carrier, t, Side::Both);
            };
            for x in 0..n {
                if !(0..n).any(|y| t.get(x, y) == Some(e) && t.get(y, x) == Some(e)) {
                    return Residual::Nonzero(Witness::NoInverse {
                        identity: name(e),
                        element: name(x),
                    });
                }
            }
        }
        PropertyKind::Pair(..) => unreachable!("pair laws are evaluated on factors"),
    }
    Residual::ZeroEverywhere
}

/// First refutation of `e` as an identity on `side`, if any.
fn refute(t: &OperationTable, e: usize, side: Side) -> Option<(usize, Side, Option<usize>)> {
    (0..t.order()).find_map(|x| {
        if matches!(side, Side::Left | Side::Both) && t.get(e, x) != Some(x) {
            return Some((x, Side::Left, t.get(e, x)));
        }
        if matches!(side, Side::Right | Side::Both) && t.get(x, e) != Some(x) {
            return Some((x, Side::Right, t.get(x, e)));
        }
        None
    })
}

pub(crate) fn find_identity(t: &OperationTable, side: Side) -> Option<usize> {
    (0..t.order()).find(|&e| refute(t, e, side).is_none())
}

fn identity_residual(carrier: &[PointId], t: &OperationTable, side: Side) -> Residual {
    let mut refutations = Vec::new();
    for e in 0..t.order() {
        match refute(t, e, side) {
            None => return Residual::ZeroEverywhere,
            Some((x, s, v)) => refutations.push(IdentityRefutation {
                candidate: carrier[e].clone(),
                element: carrier[x].clone(),
                side: s,
                value: v.map(|i| carrier[i].clone()),
            }),
        }
    }
    Residual::Nonzero(Witness::NoIdentity { side, refutations })
}
