use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{reverify, ConstructionError};
use crate::algebra::{FiniteStructure, OperationTable, PropertyKind};
use crate::space::{SpaceError, StructuredSpace};
use crate::topology::PointId;

/// A partition of one neighborhood's carrier into blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceSpec {
    pub neighborhood: String,
    pub blocks: Vec<Vec<PointId>>,
}

/// `left.0 ~ right.0` and `left.1 ~ right.1` but the products fall in
/// different blocks, or only one of them is defined.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceWitness {
    pub op: String,
    pub left: (PointId, PointId),
    pub right: (PointId, PointId),
    pub left_value: Option<PointId>,
    pub right_value: Option<PointId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "failure", rename_all = "snake_case")]
pub enum SubgroupFailure {
    Empty,
    UnknownPoint {
        point: PointId,
    },
    MissingIdentity {
        identity: PointId,
    },
    NotClosed {
        left: PointId,
        right: PointId,
        product: PointId,
    },
    MissingInverse {
        element: PointId,
    },
}

/// Block index of every carrier position.
fn block_index(
    neighborhood: &str,
    s: &FiniteStructure,
    blocks: &[Vec<PointId>],
) -> Result<Vec<usize>, ConstructionError> {
    let fail = |reason: String| ConstructionError::InvalidPartition {
        neighborhood: neighborhood.to_owned(),
        reason,
    };
    let mut class = vec![usize::MAX; s.size()];
    for (b, block) in blocks.iter().enumerate() {
        if block.is_empty() {
            return Err(fail(format!("block {b} is empty")));
        }
        for p in block {
            let i = s
                .index_of(p)
                .ok_or_else(|| fail(format!("`{p}` is not in the carrier")))?;
            if class[i] != usize::MAX {
                return Err(fail(format!("`{p}` lies in two blocks")));
            }
            class[i] = b;
        }
    }
    if let Some(i) = class.iter().position(|&c| c == usize::MAX) {
        return Err(fail(format!("`{}` lies in no block", s.point(i))));
    }
    Ok(class)
}

/// First violation of compatibility, replacing one operand at a time.
fn first_incompatibility(s: &FiniteStructure, class: &[usize]) -> Option<CongruenceWitness> {
    let n = s.size();
    let same = |u: Option<usize>, v: Option<usize>| match (u, v) {
        (None, None) => true,
        (Some(u), Some(v)) => class[u] == class[v],
        _ => false,
    };
    for t in s.tables() {
        for a in 0..n {
            for a2 in a + 1..n {
                if class[a] != class[a2] {
                    continue;
                }
                for b in 0..n {
                    for (l, r) in [((a, b), (a2, b)), ((b, a), (b, a2))] {
                        let (lv, rv) = (t.get(l.0, l.1), t.get(r.0, r.1));
                        if !same(lv, rv) {
                            let name = |i: usize| s.point(i).clone();
                            return Some(CongruenceWitness {
                                op: t.name().to_owned(),
                                left: (name(l.0), name(l.1)),
                                right: (name(r.0), name(r.1)),
                                left_value: lv.map(name),
                                right_value: rv.map(name),
                            });
                        }
                    }
                }
            }
        }
    }
    None
}

/// Quotients every neighborhood by its congruence and rebuilds the space.
///
/// Blocks become points labelled `[b0]`, `[b1]`, … in the sorted order of all
/// distinct blocks, so a block shared by two neighborhoods becomes one point.
pub fn quotient(
    s: &StructuredSpace,
    specs: &[CongruenceSpec],
) -> Result<StructuredSpace, ConstructionError> {
    let mut by_name: BTreeMap<&str, &CongruenceSpec> = BTreeMap::new();
    for spec in specs {
        if !s.neighborhoods().contains_key(&spec.neighborhood) {
            return Err(SpaceError::UnknownNeighborhood(spec.neighborhood.clone()).into());
        }
        if by_name.insert(&spec.neighborhood, spec).is_some() {
            return Err(ConstructionError::DuplicateCongruence(
                spec.neighborhood.clone(),
            ));
        }
    }
    let mut classes = BTreeMap::new();
    let mut all_blocks: BTreeSet<Vec<PointId>> = BTreeSet::new();
    for (name, u) in s.neighborhoods() {
        let spec = by_name
            .get(name.as_str())
            .ok_or_else(|| ConstructionError::MissingCongruence(name.clone()))?;
        let class = block_index(name, u, &spec.blocks)?;
        if let Some(witness) = first_incompatibility(u, &class) {
            return Err(ConstructionError::NotACongruence {
                neighborhood: name.clone(),
                witness: Box::new(witness),
            });
        }
        if spec.blocks.len() < 2 {
            return Err(ConstructionError::QuotientTooSmall {
                neighborhood: name.clone(),
                size: spec.blocks.len(),
            });
        }
        for block in &spec.blocks {
            let mut b = block.clone();
            b.sort();
            all_blocks.insert(b);
        }
        classes.insert(name.clone(), class);
    }
    let label: BTreeMap<Vec<PointId>, PointId> = all_blocks
        .into_iter()
        .enumerate()
        .map(|(k, b)| (b, PointId::new(format!("[b{k}]"))))
        .collect();

    let mut structures = Vec::new();
    let mut hints = BTreeMap::new();
    for (name, u) in s.neighborhoods() {
        let blocks = &by_name[name.as_str()].blocks;
        let class = &classes[name];
        let labels: Vec<PointId> = blocks
            .iter()
            .map(|b| {
                let mut b = b.clone();
                b.sort();
                label[&b].clone()
            })
            .collect();
        let q = quotient_structure(u, class, blocks.len(), labels.clone())?;
        reverify(name, &q)?;
        for (i, p) in u.carrier().iter().enumerate() {
            if s.assigned(p)? == name {
                hints
                    .entry(labels[class[i]].clone())
                    .or_insert(name.clone());
            }
        }
        structures.push((name.clone(), q));
    }
    Ok(StructuredSpace::build_from_collection(structures, &hints)?)
}

fn quotient_structure(
    u: &FiniteStructure,
    class: &[usize],
    k: usize,
    labels: Vec<PointId>,
) -> Result<FiniteStructure, ConstructionError> {
    let mut rep = vec![usize::MAX; k];
    for (i, &c) in class.iter().enumerate().rev() {
        rep[c] = i;
    }
    let tables: Vec<OperationTable> = u
        .tables()
        .iter()
        .map(|t| {
            OperationTable::from_fn(t.name(), k, |x, y| t.get(rep[x], rep[y]).map(|v| class[v]))
        })
        .collect();
    Ok(FiniteStructure::new(
        labels,
        tables,
        u.descriptor().properties().iter().cloned(),
        u.descriptor().nonalg().to_vec(),
    )?)
}

/// Left cosets of a normal subgroup as a congruence on `neighborhood`.
///
/// The group operation is the first operation, by name, declared closed,
/// associative, unital and invertible.
pub fn normal_subgroup_congruence(
    neighborhood: &str,
    g: &FiniteStructure,
    subgroup: &[PointId],
) -> Result<CongruenceSpec, ConstructionError> {
    use PropertyKind::*;
    let op = g
        .descriptor()
        .operations()
        .iter()
        .find(|op| {
            let kinds = g.descriptor().kinds_of(op);
            [Closure, Associativity, Identity, Invertibility]
                .iter()
                .all(|k| kinds.contains(k))
        })
        .ok_or(ConstructionError::NotAGroup)?;
    if !g.verify_descriptor()?.passes() {
        return Err(ConstructionError::NotAGroup);
    }
    let t = g.table(op).expect("descriptor operations have tables");
    let n = g.size();
    let mul = |a: usize, b: usize| t.get(a, b).expect("closure was verified");
    let e = (0..n)
        .find(|&e| (0..n).all(|x| mul(e, x) == x && mul(x, e) == x))
        .expect("identity was verified");
    let inv = |a: usize| {
        (0..n)
            .find(|&b| mul(a, b) == e)
            .expect("inverses were verified")
    };

    if subgroup.is_empty() {
        return Err(ConstructionError::NotASubgroup(SubgroupFailure::Empty));
    }
    let mut members = vec![false; n];
    for p in subgroup {
        let i = g.index_of(p).ok_or_else(|| {
            ConstructionError::NotASubgroup(SubgroupFailure::UnknownPoint { point: p.clone() })
        })?;
        members[i] = true;
    }
    let name = |i: usize| g.point(i).clone();
    if !members[e] {
        return Err(ConstructionError::NotASubgroup(
            SubgroupFailure::MissingIdentity { identity: name(e) },
        ));
    }
    let hs: Vec<usize> = (0..n).filter(|&i| members[i]).collect();
    for &a in &hs {
        for &b in &hs {
            if !members[mul(a, b)] {
                return Err(ConstructionError::NotASubgroup(
                    SubgroupFailure::NotClosed {
                        left: name(a),
                        right: name(b),
                        product: name(mul(a, b)),
                    },
                ));
            }
        }
        if !members[inv(a)] {
            return Err(ConstructionError::NotASubgroup(
                SubgroupFailure::MissingInverse { element: name(a) },
            ));
        }
    }
    for x in 0..n {
        for &h in &hs {
            let c = mul(mul(x, h), inv(x));
            if !members[c] {
                return Err(ConstructionError::NotNormal {
                    conjugator: name(x),
                    element: name(h),
                    conjugate: name(c),
                });
            }
        }
    }
    let mut seen = vec![false; n];
    let mut blocks = Vec::new();
    for x in 0..n {
        if seen[x] {
            continue;
        }
        let mut coset: Vec<usize> = hs.iter().map(|&h| mul(x, h)).collect();
        coset.sort_unstable();
        for &c in &coset {
            seen[c] = true;
        }
        blocks.push(coset.into_iter().map(name).collect());
    }
    Ok(CongruenceSpec {
        neighborhood: neighborhood.to_owned(),
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{find_isomorphism, PropertySpec};
    use crate::fixtures;
    use proptest::prelude::*;

    fn single(name: &str, s: FiniteStructure) -> StructuredSpace {
        StructuredSpace::build_from_collection(vec![(name.into(), s)], &BTreeMap::new()).unwrap()
    }

    fn names(v: &[&[&str]]) -> Vec<Vec<PointId>> {
        v.iter()
            .map(|b| b.iter().map(|&p| p.into()).collect())
            .collect()
    }

    /// Symmetric group on three letters, composing permutations as functions.
    fn s3() -> FiniteStructure {
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let pos = |p: [usize; 3]| perms.iter().position(|&q| q == p).unwrap();
        let names: Vec<PointId> = perms
            .iter()
            .map(|p| PointId::new(format!("{}{}{}", p[0], p[1], p[2])))
            .collect();
        let t = OperationTable::from_fn("∘", 6, |a, b| {
            let (f, g) = (perms[a], perms[b]);
            Some(pos([f[g[0]], f[g[1]], f[g[2]]]))
        });
        FiniteStructure::new(
            names,
            vec![t],
            fixtures::GROUP[..4]
                .iter()
                .map(|k| PropertySpec::new(k.clone(), "∘")),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn z6_mod_order_two_subgroup_is_z3() {
        let z6 = fixtures::cyclic("", 6);
        let spec = normal_subgroup_congruence("G", &z6, &["0".into(), "3".into()]).unwrap();
        assert_eq!(spec.blocks, names(&[&["0", "3"], &["1", "4"], &["2", "5"]]));
        let q = quotient(&single("G", z6), &[spec]).unwrap();
        assert!(q.validate().passes());
        let g = q.neighborhood("G").unwrap();
        assert_eq!(g.size(), 3);
        assert!(find_isomorphism(g, &fixtures::cyclic("", 3)).is_some());
    }

    #[test]
    fn singleton_blocks_give_a_copy() {
        let z4 = fixtures::cyclic("", 4);
        let blocks = z4.carrier().iter().map(|p| vec![p.clone()]).collect();
        let q = quotient(
            &single("G", z4.clone()),
            &[CongruenceSpec {
                neighborhood: "G".into(),
                blocks,
            }],
        )
        .unwrap();
        assert!(find_isomorphism(q.neighborhood("G").unwrap(), &z4).is_some());
    }

    #[test]
    fn z4_halves_are_not_a_congruence() {
        let spec = CongruenceSpec {
            neighborhood: "G".into(),
            blocks: names(&[&["0", "1"], &["2", "3"]]),
        };
        let err = quotient(&single("G", fixtures::cyclic("", 4)), &[spec]).unwrap_err();
        assert_eq!(
            err,
            ConstructionError::NotACongruence {
                neighborhood: "G".into(),
                witness: Box::new(CongruenceWitness {
                    op: "+".into(),
                    left: ("0".into(), "1".into()),
                    right: ("1".into(), "1".into()),
                    left_value: Some("1".into()),
                    right_value: Some("2".into()),
                }),
            }
        );
    }

    #[test]
    fn collapsing_everything_is_too_small() {
        let spec = CongruenceSpec {
            neighborhood: "G".into(),
            blocks: names(&[&["0", "1", "2"]]),
        };
        assert_eq!(
            quotient(&single("G", fixtures::cyclic("", 3)), &[spec]).unwrap_err(),
            ConstructionError::QuotientTooSmall {
                neighborhood: "G".into(),
                size: 1
            }
        );
    }

    #[test]
    fn missing_and_malformed_specs() {
        let f1 = fixtures::f1();
        let spec_a = CongruenceSpec {
            neighborhood: "U_a".into(),
            blocks: names(&[&["1"], &["2"]]),
        };
        assert_eq!(
            quotient(&f1, std::slice::from_ref(&spec_a)).unwrap_err(),
            ConstructionError::MissingCongruence("U_b".into())
        );
        let bad = CongruenceSpec {
            neighborhood: "U_b".into(),
            blocks: names(&[&["2"], &["2", "3"]]),
        };
        assert!(matches!(
            quotient(&f1, &[spec_a, bad]).unwrap_err(),
            ConstructionError::InvalidPartition { .. }
        ));
    }

    #[test]
    fn shared_blocks_become_shared_points() {
        let f1 = fixtures::f1();
        let specs = [
            CongruenceSpec {
                neighborhood: "U_a".into(),
                blocks: names(&[&["1"], &["2"]]),
            },
            CongruenceSpec {
                neighborhood: "U_b".into(),
                blocks: names(&[&["2"], &["3"]]),
            },
        ];
        let q = quotient(&f1, &specs).unwrap();
        assert_eq!(q.universe().len(), 3);
        assert!(q.validate().passes());
    }

    #[test]
    fn trivial_subgroup_gives_singletons() {
        let z4 = fixtures::cyclic("", 4);
        let spec = normal_subgroup_congruence("G", &z4, &["0".into()]).unwrap();
        assert_eq!(spec.blocks.len(), 4);
        assert!(spec.blocks.iter().all(|b| b.len() == 1));
    }

    #[test]
    fn transposition_subgroup_of_s3_is_not_normal() {
        let err =
            normal_subgroup_congruence("G", &s3(), &["012".into(), "021".into()]).unwrap_err();
        let ConstructionError::NotNormal {
            conjugator,
            element,
            conjugate,
        } = err
        else {
            panic!("expected a conjugation witness, got {err:?}");
        };
        assert_eq!(element, PointId::from("021"));
        assert_ne!(conjugate, PointId::from("021"));
        assert_ne!(conjugate, PointId::from("012"));
        assert_ne!(conjugator, PointId::from("012"));
    }

    #[test]
    fn subgroup_failures() {
        let z4 = fixtures::cyclic("", 4);
        assert_eq!(
            normal_subgroup_congruence("G", &z4, &["0".into(), "1".into()]).unwrap_err(),
            ConstructionError::NotASubgroup(SubgroupFailure::NotClosed {
                left: "1".into(),
                right: "1".into(),
                product: "2".into()
            })
        );
        assert_eq!(
            normal_subgroup_congruence("G", &z4, &["2".into()]).unwrap_err(),
            ConstructionError::NotASubgroup(SubgroupFailure::MissingIdentity {
                identity: "0".into()
            })
        );
        let lp = fixtures::magma(&["0", "1"], "·", |a, _| a, &[]);
        assert_eq!(
            normal_subgroup_congruence("G", &lp, &["0".into()]).unwrap_err(),
            ConstructionError::NotAGroup
        );
    }

    proptest! {
        #[test]
        fn lagrange(d in 1usize..=4, index in 2usize..=4) {
            let n = d * index;
            let g = fixtures::cyclic("", n);
            // the subgroup generated by n/d has order d
            let step = n / d;
            let sub: Vec<PointId> = (0..d).map(|k| PointId::new((k * step).to_string())).collect();
            let spec = normal_subgroup_congruence("G", &g, &sub).unwrap();
            prop_assert_eq!(spec.blocks.len(), n / d);
            let q = quotient(&single("G", g), &[spec]).unwrap();
            prop_assert_eq!(q.neighborhood("G").unwrap().size(), n / d);
            prop_assert!(find_isomorphism(q.neighborhood("G").unwrap(), &fixtures::cyclic("", n / d)).is_some());
        }
    }
}
