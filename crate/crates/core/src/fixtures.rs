use std::collections::BTreeMap;

use crate::algebra::{FiniteStructure, OperationTable, PropertyKind, PropertySpec};
use crate::space::StructuredSpace;
use crate::topology::PointId;

/// A total single-operation structure; `f` works on positions in `names`.
pub fn magma(
    names: &[&str],
    op: &str,
    mut f: impl FnMut(usize, usize) -> usize,
    kinds: &[PropertyKind],
) -> FiniteStructure {
    let carrier: Vec<PointId> = names.iter().map(|&s| s.into()).collect();
    let t = OperationTable::from_fn(op, names.len(), |a, b| Some(f(a, b)));
    FiniteStructure::new(
        carrier,
        vec![t],
        kinds.iter().map(|k| PropertySpec::new(k.clone(), op)),
        vec![],
    )
    .unwrap()
}

pub const GROUP: [PropertyKind; 5] = [
    PropertyKind::Closure,
    PropertyKind::Associativity,
    PropertyKind::Identity,
    PropertyKind::Invertibility,
    PropertyKind::Commutativity,
];

/// Addition mod `n` on points `{prefix}0 .. {prefix}{n-1}`, declared an abelian group.
pub fn cyclic(prefix: &str, n: usize) -> FiniteStructure {
    let names: Vec<String> = (0..n).map(|i| format!("{prefix}{i}")).collect();
    let carrier: Vec<PointId> = names.iter().map(|s| PointId::from(s.as_str())).collect();
    let t = OperationTable::from_fn("+", n, |a, b| Some((a + b) % n));
    FiniteStructure::new(
        carrier,
        vec![t],
        GROUP.iter().map(|k| PropertySpec::new(k.clone(), "+")),
        vec![],
    )
    .unwrap()
}

/// Left projection on {1,2} and addition mod 2 on {2,3}.
pub fn f1() -> StructuredSpace {
    let ua = magma(
        &["1", "2"],
        "·",
        |a, _| a,
        &[PropertyKind::Closure, PropertyKind::Associativity],
    );
    let ub = magma(&["2", "3"], "·", |a, b| (a + b) % 2, &GROUP);
    StructuredSpace::build_from_collection(
        vec![("U_a".into(), ua), ("U_b".into(), ub)],
        &BTreeMap::new(),
    )
    .unwrap()
}

/// A unital magma on {p,q,r} and an abelian group on {r,s}.
pub fn unital_and_abelian() -> StructuredSpace {
    let u2 = magma(
        &["p", "q", "r"],
        "·3",
        |a, b| {
            if a == 0 {
                b
            } else if b == 0 {
                a
            } else {
                1
            }
        },
        &[PropertyKind::Closure, PropertyKind::Identity],
    );
    let u3 = magma(&["r", "s"], "+2", |a, b| (a + b) % 2, &GROUP);
    StructuredSpace::build_from_collection(
        vec![("U_2".into(), u2), ("U_3".into(), u3)],
        &BTreeMap::new(),
    )
    .unwrap()
}
