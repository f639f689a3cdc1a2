use std::collections::{BTreeMap, BTreeSet};

use super::{AlgebraError, NonAlgTag, PropertyKind, PropertySpec, StructureDescriptor};
use crate::topology::PointId;

/// One table entry `a · b = c`, by point name.
pub type Entry = [PointId; 3];

/// A partial binary operation over carrier positions `0..order`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OperationTable {
    name: String,
    order: usize,
    cells: Vec<Option<usize>>,
}

impl OperationTable {
    pub fn from_fn(
        name: impl Into<String>,
        order: usize,
        mut op: impl FnMut(usize, usize) -> Option<usize>,
    ) -> Self {
        let mut cells = Vec::with_capacity(order * order);
        for a in 0..order {
            for b in 0..order {
                cells.push(op(a, b));
            }
        }
        OperationTable {
            name: name.into(),
            order,
            cells,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> Option<usize> {
        self.cells[a * self.order + b]
    }

    pub fn is_total(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    /// The same operation after moving position `i` to `perm[i]`.
    fn permuted(&self, perm: &[usize]) -> Self {
        let mut cells = vec![None; self.cells.len()];
        for a in 0..self.order {
            for b in 0..self.order {
                cells[perm[a] * self.order + perm[b]] = self.get(a, b).map(|c| perm[c]);
            }
        }
        OperationTable {
            name: self.name.clone(),
            order: self.order,
            cells,
        }
    }
}

/// Factor data attached to a neighborhood built as a product `U × V`.
///
/// Pair laws `(h, z)` on a product operation are verified by checking `h` on
/// the left factor operation and `z` on the right one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductFactors {
    pub left: FiniteStructure,
    pub right: FiniteStructure,
    /// Each product point with its two components.
    pub points: BTreeMap<PointId, (PointId, PointId)>,
    /// Each product operation with its two component operations.
    pub operations: BTreeMap<String, (String, String)>,
}

/// A carrier with named operation tables and a declared descriptor.
///
/// The carrier is kept sorted; table positions refer to it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteStructure {
    carrier: Vec<PointId>,
    tables: Vec<OperationTable>,
    descriptor: StructureDescriptor,
    factors: Option<Box<ProductFactors>>,
}

impl FiniteStructure {
    /// Builds a structure from tables indexed by the order of `carrier` as given.
    pub fn new(
        carrier: Vec<PointId>,
        tables: Vec<OperationTable>,
        properties: impl IntoIterator<Item = PropertySpec>,
        nonalg: Vec<NonAlgTag>,
    ) -> Result<Self, AlgebraError> {
        if carrier.is_empty() {
            return Err(AlgebraError::EmptyCarrier);
        }
        if carrier.iter().any(|p| p.as_str().is_empty()) {
            return Err(AlgebraError::EmptyPointId);
        }
        let n = carrier.len();
        for t in &tables {
            if t.name.is_empty() {
                return Err(AlgebraError::EmptyOperationName);
            }
            if t.order != n {
                return Err(AlgebraError::TableSizeMismatch {
                    op: t.name.clone(),
                    expected: n,
                    found: t.order,
                });
            }
            if t.cells.iter().flatten().any(|&c| c >= n) {
                return Err(AlgebraError::ValueOutOfRange { op: t.name.clone() });
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| carrier[a].cmp(&carrier[b]));
        if let Some(w) = order.windows(2).find(|w| carrier[w[0]] == carrier[w[1]]) {
            return Err(AlgebraError::DuplicatePoint(carrier[w[0]].clone()));
        }
        let mut perm = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            perm[old] = new;
        }
        let sorted_carrier: Vec<PointId> = order.iter().map(|&i| carrier[i].clone()).collect();
        let mut tables: Vec<OperationTable> = tables.iter().map(|t| t.permuted(&perm)).collect();
        tables.sort_by(|a, b| a.name.cmp(&b.name));
        if let Some(w) = tables.windows(2).find(|w| w[0].name == w[1].name) {
            return Err(AlgebraError::DuplicateOperation(w[0].name.clone()));
        }

        let descriptor = StructureDescriptor::new(
            tables.iter().map(|t| t.name.clone()).collect(),
            properties.into_iter().collect(),
            nonalg,
        );
        check_properties(&descriptor, None)?;
        Ok(FiniteStructure {
            carrier: sorted_carrier,
            tables,
            descriptor,
            factors: None,
        })
    }

    /// Builds a structure from explicit entry lists; absent pairs are undefined.
    pub fn from_entries(
        carrier: Vec<PointId>,
        operations: Vec<(String, Vec<Entry>)>,
        properties: impl IntoIterator<Item = PropertySpec>,
        nonalg: Vec<NonAlgTag>,
    ) -> Result<Self, AlgebraError> {
        let mut sorted = carrier.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != carrier.len() {
            let dup = carrier
                .iter()
                .find(|p| carrier.iter().filter(|q| q == p).count() > 1)
                .cloned()
                .expect("a duplicate exists");
            return Err(AlgebraError::DuplicatePoint(dup));
        }
        let n = sorted.len();
        let index = |p: &PointId| sorted.binary_search(p).ok();
        let mut tables = Vec::with_capacity(operations.len());
        for (name, entries) in operations {
            let mut cells: Vec<Option<usize>> = vec![None; n * n];
            for entry in entries {
                let (Some(a), Some(b), Some(c)) =
                    (index(&entry[0]), index(&entry[1]), index(&entry[2]))
                else {
                    return Err(AlgebraError::UnknownPoint { op: name, entry });
                };
                match cells[a * n + b] {
                    Some(existing) if existing != c => {
                        return Err(AlgebraError::ConflictingEntry {
                            op: name,
                            left: entry[0].clone(),
                            right: entry[1].clone(),
                        })
                    }
                    _ => cells[a * n + b] = Some(c),
                }
            }
            tables.push(OperationTable {
                name,
                order: n,
                cells,
            });
        }
        FiniteStructure::new(sorted, tables, properties, nonalg)
    }

    /// Attaches product factor data; required before pair laws can be evaluated.
    pub fn with_factors(mut self, factors: ProductFactors) -> Result<Self, AlgebraError> {
        for p in &self.carrier {
            let Some((l, r)) = factors.points.get(p) else {
                return Err(AlgebraError::InvalidFactors(format!(
                    "point `{p}` has no components"
                )));
            };
            if factors.left.index_of(l).is_none() || factors.right.index_of(r).is_none() {
                return Err(AlgebraError::InvalidFactors(format!(
                    "components of `{p}` are outside the factor carriers"
                )));
            }
        }
        if factors.points.len() != self.carrier.len() {
            return Err(AlgebraError::InvalidFactors(
                "component map has points outside the carrier".into(),
            ));
        }
        for (op, (l, r)) in &factors.operations {
            if self.table(op).is_none() {
                return Err(AlgebraError::UnknownOperation(op.clone()));
            }
            if factors.left.table(l).is_none() {
                return Err(AlgebraError::UnknownOperation(l.clone()));
            }
            if factors.right.table(r).is_none() {
                return Err(AlgebraError::UnknownOperation(r.clone()));
            }
        }
        check_properties(&self.descriptor, Some(&factors))?;
        self.factors = Some(Box::new(factors));
        Ok(self)
    }

    pub fn carrier(&self) -> &[PointId] {
        &self.carrier
    }

    pub fn size(&self) -> usize {
        self.carrier.len()
    }

    pub fn point(&self, i: usize) -> &PointId {
        &self.carrier[i]
    }

    pub fn index_of(&self, p: &PointId) -> Option<usize> {
        self.carrier.binary_search(p).ok()
    }

    /// Tables sorted by operation name.
    pub fn tables(&self) -> &[OperationTable] {
        &self.tables
    }

    pub fn table(&self, name: &str) -> Option<&OperationTable> {
        self.tables
            .binary_search_by(|t| t.name.as_str().cmp(name))
            .ok()
            .map(|i| &self.tables[i])
    }

    pub fn descriptor(&self) -> &StructureDescriptor {
        &self.descriptor
    }

    pub fn factors(&self) -> Option<&ProductFactors> {
        self.factors.as_deref()
    }

    /// Entries `a · b = c` of one operation in canonical order.
    pub fn entries(&self, op: &str) -> Option<Vec<Entry>> {
        let t = self.table(op)?;
        let n = self.size();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if let Some(c) = t.get(a, b) {
                    out.push([
                        self.carrier[a].clone(),
                        self.carrier[b].clone(),
                        self.carrier[c].clone(),
                    ]);
                }
            }
        }
        Some(out)
    }

    /// The same structure with every point renamed by `rename`, which must be injective.
    pub(crate) fn transported(&self, rename: &BTreeMap<PointId, PointId>) -> Self {
        let carrier: Vec<PointId> = self.carrier.iter().map(|p| rename[p].clone()).collect();
        let factors = self.factors.as_ref().map(|f| {
            let mut f = (**f).clone();
            f.points = f
                .points
                .into_iter()
                .map(|(p, comps)| (rename[&p].clone(), comps))
                .collect();
            f
        });
        let mut s = FiniteStructure::new(
            carrier,
            self.tables.clone(),
            self.descriptor.properties().iter().cloned(),
            self.descriptor.nonalg().to_vec(),
        )
        .expect("renaming preserves well-formedness");
        s.factors = factors.map(Box::new);
        s
    }
}

fn check_properties(
    descriptor: &StructureDescriptor,
    factors: Option<&ProductFactors>,
) -> Result<(), AlgebraError> {
    let ops: BTreeSet<&str> = descriptor.operations().iter().map(String::as_str).collect();
    for spec in descriptor.properties() {
        if !ops.contains(spec.op.as_str()) {
            return Err(AlgebraError::UnknownOperation(spec.op.clone()));
        }
        if spec.kind == PropertyKind::Invertibility
            && !descriptor
                .properties()
                .contains(&PropertySpec::new(PropertyKind::Identity, spec.op.clone()))
        {
            return Err(AlgebraError::MissingIdentityPrerequisite(spec.op.clone()));
        }
        if let (PropertyKind::Pair(..), Some(f)) = (&spec.kind, factors) {
            if !f.operations.contains_key(&spec.op) {
                return Err(AlgebraError::MissingFactors(spec.op.clone()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(names: &[&str]) -> Vec<PointId> {
        names.iter().map(|&s| PointId::from(s)).collect()
    }

    #[test]
    fn carrier_order_is_normalised() {
        // x·y = x on carrier given as [b, a]
        let t = OperationTable::from_fn("*", 2, |a, _| Some(a));
        let s = FiniteStructure::new(pts(&["b", "a"]), vec![t], [], vec![]).unwrap();
        assert_eq!(s.carrier(), &pts(&["a", "b"])[..]);
        let e = s.entries("*").unwrap();
        assert!(e.contains(&[PointId::from("a"), "b".into(), "a".into()]));
        assert!(e.contains(&[PointId::from("b"), "a".into(), "b".into()]));
    }

    #[test]
    fn entry_errors() {
        let err = FiniteStructure::from_entries(
            pts(&["0", "1"]),
            vec![("+".into(), vec![["0".into(), "1".into(), "7".into()]])],
            [],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, AlgebraError::UnknownPoint { .. }));

        let err = FiniteStructure::from_entries(
            pts(&["0", "1"]),
            vec![(
                "+".into(),
                vec![
                    ["0".into(), "1".into(), "0".into()],
                    ["0".into(), "1".into(), "1".into()],
                ],
            )],
            [],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, AlgebraError::ConflictingEntry { .. }));
    }

    #[test]
    fn declared_properties_must_name_operations() {
        let t = OperationTable::from_fn("*", 2, |a, _| Some(a));
        let err = FiniteStructure::new(
            pts(&["a", "b"]),
            vec![t.clone()],
            [PropertySpec::new(PropertyKind::Closure, "+")],
            vec![],
        )
        .unwrap_err();
        assert_eq!(err, AlgebraError::UnknownOperation("+".into()));

        let err = FiniteStructure::new(
            pts(&["a", "b"]),
            vec![t],
            [PropertySpec::new(PropertyKind::Invertibility, "*")],
            vec![],
        )
        .unwrap_err();
        assert_eq!(err, AlgebraError::MissingIdentityPrerequisite("*".into()));
    }
}
