use std::collections::{BTreeMap, BTreeSet};

use super::ConstructionError;
use crate::algebra::{
    FiniteStructure, NonAlgTag, OperationTable, ProductFactors, PropertyKind, PropertySpec,
};
use crate::space::{SpaceError, StructuredSpace};
use crate::topology::PointId;

/// Product space with neighborhoods `U × V` named `U×V`.
///
/// Every pair of factor operations `(·, ∗)` yields a componentwise operation
/// named `(·,∗)`, and every pair of declared laws `h` on `·` and `z` on `∗`
/// becomes the pair law `(h,z)` on it.
pub fn product(
    s1: &StructuredSpace,
    s2: &StructuredSpace,
) -> Result<StructuredSpace, ConstructionError> {
    for (which, s) in [("left", s1), ("right", s2)] {
        let report = s.validate();
        if !report.passes() {
            return Err(ConstructionError::InvalidInput {
                which: which.to_owned(),
                report,
            });
        }
    }
    let space = s1.space().product_topology(s2.space());
    let mut neighborhoods = BTreeMap::new();
    for (nu, u) in s1.neighborhoods() {
        for (nv, v) in s2.neighborhoods() {
            neighborhoods.insert(product_name(nu, nv), product_structure(u, v)?);
        }
    }
    let mut assignment = BTreeMap::new();
    for p in s1.universe().points() {
        for q in s2.universe().points() {
            let name = product_name(s1.assigned(p)?, s2.assigned(q)?);
            assignment.insert(PointId::pair(p, q), name);
        }
    }
    Ok(StructuredSpace::from_parts(
        space,
        neighborhoods,
        assignment,
    )?)
}

fn product_name(u: &str, v: &str) -> String {
    format!("{u}×{v}")
}

/// The componentwise product of two structures, carrying its factors.
pub(crate) fn product_structure(
    u: &FiniteStructure,
    v: &FiniteStructure,
) -> Result<FiniteStructure, ConstructionError> {
    let m = v.size();
    let mut carrier = Vec::with_capacity(u.size() * m);
    let mut points = BTreeMap::new();
    for p in u.carrier() {
        for q in v.carrier() {
            let pq = PointId::pair(p, q);
            points.insert(pq.clone(), (p.clone(), q.clone()));
            carrier.push(pq);
        }
    }
    let mut tables = Vec::new();
    let mut properties = BTreeSet::new();
    let mut operations = BTreeMap::new();
    for tu in u.tables() {
        for tv in v.tables() {
            let name = format!("({},{})", tu.name(), tv.name());
            tables.push(OperationTable::from_fn(&name, u.size() * m, |x, y| {
                let a = tu.get(x / m, y / m)?;
                let b = tv.get(x % m, y % m)?;
                Some(a * m + b)
            }));
            for h in u.descriptor().kinds_of(tu.name()) {
                for z in v.descriptor().kinds_of(tv.name()) {
                    properties.insert(PropertySpec::new(PropertyKind::pair(h.clone(), z), &name));
                }
            }
            operations.insert(name, (tu.name().to_owned(), tv.name().to_owned()));
        }
    }
    let nonalg = pair_tags(u.descriptor().nonalg(), v.descriptor().nonalg());
    let s = FiniteStructure::new(carrier, tables, properties, nonalg)?;
    Ok(s.with_factors(ProductFactors {
        left: u.clone(),
        right: v.clone(),
        points,
        operations,
    })?)
}

/// Formal pairs of tags; an empty side contributes the single empty marker.
fn pair_tags(left: &[NonAlgTag], right: &[NonAlgTag]) -> Vec<NonAlgTag> {
    if left.is_empty() && right.is_empty() {
        return Vec::new();
    }
    let empty = [NonAlgTag::new("∅", "")];
    let l = if left.is_empty() { &empty[..] } else { left };
    let r = if right.is_empty() { &empty[..] } else { right };
    l.iter()
        .flat_map(|a| {
            r.iter().map(move |b| {
                NonAlgTag::new(
                    format!("({},{})", a.label, b.label),
                    format!("({},{})", a.payload, b.payload),
                )
            })
        })
        .collect()
}

/// Moves each listed neighborhood onto a new carrier along a bijection and
/// rebuilds the space from the transported structures. Descriptors are kept.
pub fn replace_isomorphic(
    s: &StructuredSpace,
    replacements: &BTreeMap<String, BTreeMap<PointId, PointId>>,
) -> Result<StructuredSpace, ConstructionError> {
    if let Some(name) = replacements
        .keys()
        .find(|n| !s.neighborhoods().contains_key(*n))
    {
        return Err(SpaceError::UnknownNeighborhood(name.clone()).into());
    }
    let mut structures = Vec::new();
    let mut renames = BTreeMap::new();
    for (name, u) in s.neighborhoods() {
        let rename: BTreeMap<PointId, PointId> = match replacements.get(name) {
            Some(f) => {
                check_bijection(name, u, f)?;
                f.clone()
            }
            None => u.carrier().iter().map(|p| (p.clone(), p.clone())).collect(),
        };
        structures.push((name.clone(), u.transported(&rename)));
        renames.insert(name.clone(), rename);
    }
    let mut hints: BTreeMap<PointId, String> = BTreeMap::new();
    for (p, name) in s.assignment() {
        hints.entry(renames[&name][&p].clone()).or_insert(name);
    }
    Ok(StructuredSpace::build_from_collection(structures, &hints)?)
}

fn check_bijection(
    name: &str,
    u: &FiniteStructure,
    f: &BTreeMap<PointId, PointId>,
) -> Result<(), ConstructionError> {
    let fail = |reason: String| ConstructionError::NonBijectiveReplacement {
        neighborhood: name.to_owned(),
        reason,
    };
    if let Some(p) = u.carrier().iter().find(|p| !f.contains_key(*p)) {
        return Err(fail(format!("`{p}` has no image")));
    }
    if let Some(p) = f.keys().find(|p| u.index_of(p).is_none()) {
        return Err(fail(format!("`{p}` is not in the carrier")));
    }
    let mut seen = BTreeMap::new();
    for (p, q) in f {
        if q.as_str().is_empty() {
            return Err(fail(format!("`{p}` maps to an empty identifier")));
        }
        if let Some(prev) = seen.insert(q, p) {
            return Err(fail(format!("`{prev}` and `{p}` both map to `{q}`")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{find_isomorphism, is_homomorphism};
    use crate::fixtures;
    use crate::Verdict;

    fn single(name: &str, s: FiniteStructure) -> StructuredSpace {
        StructuredSpace::build_from_collection(vec![(name.into(), s)], &BTreeMap::new()).unwrap()
    }

    #[test]
    fn z2_squared_is_klein() {
        let z2 = single("Z", fixtures::cyclic("", 2));
        let p = product(&z2, &z2).unwrap();
        assert!(p.validate().passes(), "{:?}", p.validate());
        let zz = p.neighborhood("Z×Z").unwrap();
        assert_eq!(zz.tables().len(), 1);
        assert_eq!(zz.entries("(+,+)").unwrap().len(), 16);
        let klein = fixtures::magma(&["e", "a", "b", "c"], "∘", |x, y| x ^ y, &[]);
        assert!(find_isomorphism(zz, &klein).is_some());
        assert!(find_isomorphism(zz, &fixtures::cyclic("", 4)).is_none());
    }

    #[test]
    fn operation_counts_multiply() {
        let two = FiniteStructure::new(
            vec!["a".into(), "b".into()],
            vec![
                OperationTable::from_fn("·", 2, |x, _| Some(x)),
                OperationTable::from_fn("∗", 2, |_, y| Some(y)),
            ],
            [],
            vec![],
        )
        .unwrap();
        let three = FiniteStructure::new(
            vec!["x".into(), "y".into()],
            vec![
                OperationTable::from_fn("+", 2, |a, b| Some((a + b) % 2)),
                OperationTable::from_fn("max", 2, |a, b| Some(a.max(b))),
                OperationTable::from_fn("min", 2, |a, b| Some(a.min(b))),
            ],
            [PropertySpec::new(PropertyKind::Commutativity, "max")],
            vec![NonAlgTag::new("atlas", "chart")],
        )
        .unwrap();
        let p = product(&single("U", two), &single("V", three)).unwrap();
        let uv = p.neighborhood("U×V").unwrap();
        assert_eq!(uv.tables().len(), 6);
        assert_eq!(
            uv.descriptor().nonalg(),
            &[NonAlgTag::new("(∅,atlas)", "(,chart)")]
        );
        assert!(p.validate().passes());

        let f = uv.factors().unwrap();
        let left_map = f
            .points
            .iter()
            .map(|(k, v)| (k.clone(), v.0.clone()))
            .collect();
        let right_map = f
            .points
            .iter()
            .map(|(k, v)| (k.clone(), v.1.clone()))
            .collect();
        let lp = f
            .operations
            .iter()
            .map(|(k, v)| (k.clone(), v.0.clone()))
            .collect();
        let rp = f
            .operations
            .iter()
            .map(|(k, v)| (k.clone(), v.1.clone()))
            .collect();
        assert_eq!(
            is_homomorphism(uv, &f.left, &lp, &left_map).unwrap(),
            Verdict::Holds
        );
        assert_eq!(
            is_homomorphism(uv, &f.right, &rp, &right_map).unwrap(),
            Verdict::Holds
        );
    }

    #[test]
    fn invalid_factors_are_refused() {
        let lp = fixtures::magma(&["0", "1"], "·", |a, _| a, &[PropertyKind::Commutativity]);
        let bad = StructuredSpace::from_parts(
            crate::topology::FiniteSpace::indiscrete(
                crate::topology::Universe::new(["0", "1"]).unwrap(),
            ),
            [("U".to_string(), lp)].into(),
            [("0".into(), "U".to_string()), ("1".into(), "U".to_string())].into(),
        )
        .unwrap();
        let ok = single("Z", fixtures::cyclic("", 2));
        assert!(matches!(
            product(&ok, &bad),
            Err(ConstructionError::InvalidInput { which, .. }) if which == "right"
        ));
    }

    #[test]
    fn replacement_shares_points() {
        let f1 = fixtures::f1();
        let r = replace_isomorphic(
            &f1,
            &[
                (
                    "U_a".to_string(),
                    [("1".into(), "a".into()), ("2".into(), "b".into())].into(),
                ),
                (
                    "U_b".to_string(),
                    [("2".into(), "b".into()), ("3".into(), "c".into())].into(),
                ),
            ]
            .into(),
        )
        .unwrap();
        assert!(r.validate().passes());
        assert_eq!(r.universe().len(), 3);
        for (name, u) in f1.neighborhoods() {
            let v = r.neighborhood(name).unwrap();
            assert!(find_isomorphism(u, v).is_some());
            assert_eq!(u.descriptor(), v.descriptor());
        }
    }

    #[test]
    fn identity_replacement_is_identity() {
        let f1 = fixtures::f1();
        assert_eq!(replace_isomorphic(&f1, &BTreeMap::new()).unwrap(), f1);
    }

    #[test]
    fn collapsing_replacement_is_refused() {
        let f1 = fixtures::f1();
        let err = replace_isomorphic(
            &f1,
            &[(
                "U_a".to_string(),
                [("1".into(), "a".into()), ("2".into(), "a".into())].into(),
            )]
            .into(),
        )
        .unwrap_err();
        assert!(matches!(
            err,
            ConstructionError::NonBijectiveReplacement { .. }
        ));
    }
}
