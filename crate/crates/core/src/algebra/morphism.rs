use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{AlgebraError, FiniteStructure, OperationTable};
use crate::topology::PointId;
use crate::Verdict;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchKind {
    /// `x · y` is defined but the images have no product in the target.
    ImageUndefined,
    /// Both sides are defined and differ.
    Unequal,
}

/// A pair `(left, right)` where `map(left · right) ≠ map(left) ⋆ map(right)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomomorphismFailure {
    pub op: String,
    pub target_op: String,
    pub left: PointId,
    pub right: PointId,
    pub image_of_product: PointId,
    pub product_of_images: Option<PointId>,
    pub kind: MismatchKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Isomorphism {
    pub map: BTreeMap<PointId, PointId>,
    /// `(source op, target op)` pairs in source order.
    pub op_pairing: Vec<(String, String)>,
}

/// Checks that `map` preserves every paired operation on the domain of `a`.
pub fn is_homomorphism(
    a: &FiniteStructure,
    b: &FiniteStructure,
    op_pairing: &BTreeMap<String, String>,
    map: &BTreeMap<PointId, PointId>,
) -> Result<Verdict<HomomorphismFailure>, AlgebraError> {
    for name in op_pairing.keys() {
        if a.table(name).is_none() {
            return Err(AlgebraError::UnknownOperation(name.clone()));
        }
    }
    let mut pairs = Vec::new();
    for t in a.tables() {
        let target = op_pairing
            .get(t.name())
            .ok_or_else(|| AlgebraError::UnpairedOperation(t.name().to_owned()))?;
        let bt = b
            .table(target)
            .ok_or_else(|| AlgebraError::UnknownOperation(target.clone()))?;
        pairs.push((t, bt));
    }
    let mut images = Vec::with_capacity(a.size());
    for p in a.carrier() {
        let q = map
            .get(p)
            .ok_or_else(|| AlgebraError::UnmappedPoint(p.clone()))?;
        images.push(
            b.index_of(q)
                .ok_or_else(|| AlgebraError::ImageOutsideCarrier(q.clone()))?,
        );
    }
    Ok(match first_violation(&pairs, &images) {
        None => Verdict::Holds,
        Some((k, x, y, kind)) => {
            let (t, bt) = pairs[k];
            let xy = t.get(x, y).expect("violations come from defined products");
            Verdict::Fails(HomomorphismFailure {
                op: t.name().to_owned(),
                target_op: bt.name().to_owned(),
                left: a.point(x).clone(),
                right: a.point(y).clone(),
                image_of_product: b.point(images[xy]).clone(),
                product_of_images: bt.get(images[x], images[y]).map(|v| b.point(v).clone()),
                kind,
            })
        }
    })
}

/// First `(pair index, x, y, kind)` at which `images` fails to preserve an operation.
pub(crate) fn first_violation(
    pairs: &[(&OperationTable, &OperationTable)],
    images: &[usize],
) -> Option<(usize, usize, usize, MismatchKind)> {
    let n = images.len();
    for (k, (t, bt)) in pairs.iter().enumerate() {
        for x in 0..n {
            for y in 0..n {
                if let Some(xy) = t.get(x, y) {
                    match bt.get(images[x], images[y]) {
                        None => return Some((k, x, y, MismatchKind::ImageUndefined)),
                        Some(v) if v != images[xy] => {
                            return Some((k, x, y, MismatchKind::Unequal))
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    None
}

/// Searches for a bijection that preserves and reflects every operation under
/// some operation pairing. Pairings are tried in lexicographic order of
/// permutations of `b`'s operations and carrier maps in lexicographic order of
/// images, so the result is the first success of that enumeration.
pub fn find_isomorphism(a: &FiniteStructure, b: &FiniteStructure) -> Option<Isomorphism> {
    let n = a.size();
    let m = a.tables().len();
    if n != b.size() || m != b.tables().len() {
        return None;
    }
    let mut perm: Vec<usize> = (0..m).collect();
    loop {
        let pairs: Vec<(&OperationTable, &OperationTable)> = (0..m)
            .map(|i| (&a.tables()[i], &b.tables()[perm[i]]))
            .collect();
        let mut images = Vec::with_capacity(n);
        let mut used = vec![false; n];
        if extend(&pairs, &mut images, &mut used) {
            return Some(Isomorphism {
                map: a
                    .carrier()
                    .iter()
                    .zip(&images)
                    .map(|(p, &i)| (p.clone(), b.point(i).clone()))
                    .collect(),
                op_pairing: pairs
                    .iter()
                    .map(|(t, u)| (t.name().to_owned(), u.name().to_owned()))
                    .collect(),
            });
        }
        if !next_permutation(&mut perm) {
            return None;
        }
    }
}

fn extend(
    pairs: &[(&OperationTable, &OperationTable)],
    images: &mut Vec<usize>,
    used: &mut [bool],
) -> bool {
    let n = used.len();
    let k = images.len();
    if k == n {
        // pairs whose product was assigned after both operands
        return first_violation(pairs, images).is_none();
    }
    for target in 0..n {
        if used[target] {
            continue;
        }
        images.push(target);
        used[target] = true;
        if consistent(pairs, images, k) && extend(pairs, images, used) {
            return true;
        }
        used[target] = false;
        images.pop();
    }
    false
}

/// Checks every pair involving the newest assigned point `k`.
fn consistent(pairs: &[(&OperationTable, &OperationTable)], images: &[usize], k: usize) -> bool {
    let assigned = images.len();
    let preimage = |v: usize| images.iter().position(|&i| i == v);
    for (t, bt) in pairs {
        for x in 0..assigned {
            for (p, q) in [(x, k), (k, x)] {
                let lhs = t.get(p, q);
                let rhs = bt.get(images[p], images[q]);
                match (lhs, rhs) {
                    (None, None) => {}
                    (Some(c), Some(d)) => {
                        if c < assigned && images[c] != d {
                            return false;
                        }
                        if let Some(pre) = preimage(d) {
                            if pre != c {
                                return false;
                            }
                        }
                    }
                    _ => return false,
                }
            }
        }
    }
    true
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
