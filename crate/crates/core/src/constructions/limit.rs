use std::collections::BTreeMap;

use petgraph::unionfind::UnionFind;
use serde::{Deserialize, Serialize};

use super::{reverify, ConstructionError, IndexedPoint};
use crate::algebra::{
    first_violation, is_homomorphism, FiniteStructure, HomomorphismFailure, OperationTable,
};
use crate::space::StructuredSpace;
use crate::topology::PointId;
use crate::Verdict;

/// A finite directed family of algebras with connecting maps `f_{i,j}`.
///
/// `order` may list any generating pairs `i ≤ j`; its reflexive-transitive
/// closure is the index order. A map must be given for every `i < j` in that
/// order; `f_{i,i}` defaults to the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectSystem {
    pub index: Vec<String>,
    pub order: Vec<(String, String)>,
    pub algebras: BTreeMap<String, FiniteStructure>,
    pub maps: BTreeMap<(String, String), BTreeMap<PointId, PointId>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum SystemViolation {
    EmptyIndex,
    DuplicateIndex {
        index: String,
    },
    UnknownIndex {
        index: String,
    },
    MissingAlgebra {
        index: String,
    },
    NotAntisymmetric {
        i: String,
        j: String,
    },
    NotDirected {
        i: String,
        j: String,
    },
    OperationMismatch {
        index: String,
    },
    DescriptorMismatch {
        index: String,
    },
    UnexpectedMap {
        i: String,
        j: String,
    },
    MissingMap {
        i: String,
        j: String,
    },
    InvalidMap {
        i: String,
        j: String,
        reason: String,
    },
    NotIdentity {
        index: String,
        element: PointId,
    },
    NotHomomorphism {
        i: String,
        j: String,
        failure: HomomorphismFailure,
    },
    CompositionFailure {
        i: String,
        j: String,
        k: String,
        element: PointId,
        direct: PointId,
        composed: PointId,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemReport {
    pub violations: Vec<SystemViolation>,
}

impl SystemReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A system with indices resolved to positions.
struct Resolved<'a> {
    names: &'a [String],
    leq: Vec<Vec<bool>>,
    algebras: Vec<&'a FiniteStructure>,
    /// `maps[i][j]` for `i ≤ j`, as carrier positions.
    maps: Vec<Vec<Option<Vec<usize>>>>,
}

impl Resolved<'_> {
    fn upper_bounds(&self, i: usize, j: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.names.len()).filter(move |&k| self.leq[i][k] && self.leq[j][k])
    }

    fn map(&self, i: usize, j: usize) -> &[usize] {
        self.maps[i][j]
            .as_deref()
            .expect("validated systems have every map")
    }
}

pub fn validate_direct_system(d: &DirectSystem) -> SystemReport {
    match resolve(d) {
        Ok(_) => SystemReport::default(),
        Err(violations) => SystemReport { violations },
    }
}

fn resolve(d: &DirectSystem) -> Result<Resolved<'_>, Vec<SystemViolation>> {
    use SystemViolation::*;
    let mut v = Vec::new();
    if d.index.is_empty() {
        return Err(vec![EmptyIndex]);
    }
    let mut pos: BTreeMap<&str, usize> = BTreeMap::new();
    for (k, name) in d.index.iter().enumerate() {
        if pos.insert(name, k).is_some() {
            v.push(DuplicateIndex {
                index: name.clone(),
            });
        }
    }
    for (a, b) in &d.order {
        for x in [a, b] {
            if !pos.contains_key(x.as_str()) {
                v.push(UnknownIndex { index: x.clone() });
            }
        }
    }
    for name in d.algebras.keys() {
        if !pos.contains_key(name.as_str()) {
            v.push(UnknownIndex {
                index: name.clone(),
            });
        }
    }
    for name in &d.index {
        if !d.algebras.contains_key(name) {
            v.push(MissingAlgebra {
                index: name.clone(),
            });
        }
    }
    if !v.is_empty() {
        return Err(v);
    }

    let n = d.index.len();
    let mut leq = vec![vec![false; n]; n];
    for (i, row) in leq.iter_mut().enumerate() {
        row[i] = true;
    }
    for (a, b) in &d.order {
        leq[pos[a.as_str()]][pos[b.as_str()]] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if leq[i][k] {
                for j in 0..n {
                    if leq[k][j] {
                        leq[i][j] = true;
                    }
                }
            }
        }
    }
    let name = |i: usize| d.index[i].clone();
    for i in 0..n {
        for j in i + 1..n {
            if leq[i][j] && leq[j][i] {
                v.push(NotAntisymmetric {
                    i: name(i),
                    j: name(j),
                });
            } else if !(0..n).any(|k| leq[i][k] && leq[j][k]) {
                v.push(NotDirected {
                    i: name(i),
                    j: name(j),
                });
            }
        }
    }
    let algebras: Vec<&FiniteStructure> = d.index.iter().map(|i| &d.algebras[i]).collect();
    let first = algebras[0].descriptor();
    let mut same_ops = true;
    for (k, a) in algebras.iter().enumerate().skip(1) {
        if a.descriptor().operations() != first.operations() {
            v.push(OperationMismatch { index: name(k) });
            same_ops = false;
        } else if !a.descriptor().is_equivalent(first) {
            v.push(DescriptorMismatch { index: name(k) });
        }
    }
    if !v.is_empty() {
        return Err(v);
    }

    let mut maps: Vec<Vec<Option<Vec<usize>>>> = vec![vec![None; n]; n];
    for ((a, b), f) in &d.maps {
        let (Some(&i), Some(&j)) = (pos.get(a.as_str()), pos.get(b.as_str())) else {
            v.push(UnexpectedMap {
                i: a.clone(),
                j: b.clone(),
            });
            continue;
        };
        if !leq[i][j] {
            v.push(UnexpectedMap {
                i: a.clone(),
                j: b.clone(),
            });
            continue;
        }
        match positions(algebras[i], algebras[j], f) {
            Err(reason) => v.push(InvalidMap {
                i: a.clone(),
                j: b.clone(),
                reason,
            }),
            Ok(images) => {
                if i == j {
                    if let Some(x) = (0..images.len()).find(|&x| images[x] != x) {
                        v.push(NotIdentity {
                            index: a.clone(),
                            element: algebras[i].point(x).clone(),
                        });
                    }
                }
                maps[i][j] = Some(images);
            }
        }
    }
    for i in 0..n {
        if maps[i][i].is_none() {
            maps[i][i] = Some((0..algebras[i].size()).collect());
        }
        for j in 0..n {
            if i != j && leq[i][j] && !d.maps.contains_key(&(name(i), name(j))) {
                v.push(MissingMap {
                    i: name(i),
                    j: name(j),
                });
            }
        }
    }
    if same_ops {
        let pairing: BTreeMap<String, String> = first
            .operations()
            .iter()
            .map(|o| (o.clone(), o.clone()))
            .collect();
        for ((a, b), f) in &d.maps {
            let (Some(&i), Some(&j)) = (pos.get(a.as_str()), pos.get(b.as_str())) else {
                continue;
            };
            if maps[i][j].is_none() || !leq[i][j] {
                continue;
            }
            if let Ok(Verdict::Fails(failure)) =
                is_homomorphism(algebras[i], algebras[j], &pairing, f)
            {
                v.push(NotHomomorphism {
                    i: a.clone(),
                    j: b.clone(),
                    failure,
                });
            }
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                if i == j || j == k || i == k || !leq[i][j] || !leq[j][k] {
                    continue;
                }
                let (Some(fij), Some(fjk), Some(fik)) = (&maps[i][j], &maps[j][k], &maps[i][k])
                else {
                    continue;
                };
                if let Some(x) = (0..fij.len()).find(|&x| fik[x] != fjk[fij[x]]) {
                    v.push(CompositionFailure {
                        i: name(i),
                        j: name(j),
                        k: name(k),
                        element: algebras[i].point(x).clone(),
                        direct: algebras[k].point(fik[x]).clone(),
                        composed: algebras[k].point(fjk[fij[x]]).clone(),
                    });
                }
            }
        }
    }
    if !v.is_empty() {
        return Err(v);
    }
    Ok(Resolved {
        names: &d.index,
        leq,
        algebras,
        maps,
    })
}

fn positions(
    a: &FiniteStructure,
    b: &FiniteStructure,
    f: &BTreeMap<PointId, PointId>,
) -> Result<Vec<usize>, String> {
    if let Some(p) = f.keys().find(|p| a.index_of(p).is_none()) {
        return Err(format!("`{p}` is not in the source carrier"));
    }
    a.carrier()
        .iter()
        .map(|p| {
            let q = f.get(p).ok_or_else(|| format!("`{p}` has no image"))?;
            b.index_of(q)
                .ok_or_else(|| format!("image `{q}` is not in the target carrier"))
        })
        .collect()
}

/// The limit algebra with the canonical map of every index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectLimit {
    pub structure: FiniteStructure,
    pub canonical: BTreeMap<String, BTreeMap<PointId, PointId>>,
}

/// Glues the disjoint union of the algebras along the connecting maps.
/// Classes are labelled `[b0]`, `[b1]`, … by their first member in index order.
pub fn direct_limit(d: &DirectSystem) -> Result<DirectLimit, ConstructionError> {
    limit_from(d, 0)
}

fn limit_from(d: &DirectSystem, offset: usize) -> Result<DirectLimit, ConstructionError> {
    let r = resolve(d).map_err(|violations| {
        ConstructionError::InvalidDirectSystem(SystemReport { violations })
    })?;
    let n = r.names.len();
    let mut start = Vec::with_capacity(n + 1);
    start.push(0);
    for a in &r.algebras {
        start.push(start.last().unwrap() + a.size());
    }
    let total = start[n];
    let mut uf = UnionFind::<usize>::new(total);
    for i in 0..n {
        for j in 0..n {
            if i != j && r.leq[i][j] {
                for (x, &y) in r.map(i, j).iter().enumerate() {
                    uf.union(start[i] + x, start[j] + y);
                }
            }
        }
    }
    // classes numbered by first member
    let mut class_of_root = BTreeMap::new();
    let mut class = vec![0; total];
    let mut members: Vec<Vec<(usize, usize)>> = Vec::new();
    for i in 0..n {
        for x in 0..r.algebras[i].size() {
            let id = start[i] + x;
            let c = *class_of_root.entry(uf.find(id)).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            class[id] = c;
            members[c].push((i, x));
        }
    }
    let k = members.len();
    let labels: Vec<PointId> = (0..k)
        .map(|c| PointId::new(format!("[b{}]", offset + c)))
        .collect();
    let indexed = |(i, x): (usize, usize)| IndexedPoint {
        index: r.names[i].clone(),
        point: r.algebras[i].point(x).clone(),
    };

    let mut tables = Vec::new();
    for op in r.algebras[0].descriptor().operations() {
        let ts: Vec<&OperationTable> = r.algebras.iter().map(|a| a.table(op).unwrap()).collect();
        let mut cells = vec![None; k * k];
        for c1 in 0..k {
            for c2 in 0..k {
                let mut value: Option<Option<usize>> = None;
                for &(i, x) in &members[c1] {
                    for &(j, y) in &members[c2] {
                        for u in r.upper_bounds(i, j) {
                            let (xu, yu) = (r.map(i, u)[x], r.map(j, u)[y]);
                            let v = ts[u].get(xu, yu).map(|z| class[start[u] + z]);
                            match value {
                                None => value = Some(v),
                                Some(w) if w != v => {
                                    return Err(ConstructionError::IllDefinedOperation {
                                        op: op.clone(),
                                        left: indexed((i, x)),
                                        right: indexed((j, y)),
                                    })
                                }
                                _ => {}
                            }
                        }
                    }
                }
                cells[c1 * k + c2] = value.flatten();
            }
        }
        tables.push(OperationTable::from_fn(op, k, |a, b| cells[a * k + b]));
    }
    let descriptor = r.algebras[0].descriptor();
    let structure = FiniteStructure::new(
        labels.clone(),
        tables,
        descriptor.properties().iter().cloned(),
        descriptor.nonalg().to_vec(),
    )?;
    reverify("limit", &structure)?;
    let canonical = (0..n)
        .map(|i| {
            let phi = r.algebras[i]
                .carrier()
                .iter()
                .enumerate()
                .map(|(x, p)| (p.clone(), labels[class[start[i] + x]].clone()))
                .collect();
            (r.names[i].clone(), phi)
        })
        .collect();
    Ok(DirectLimit {
        structure,
        canonical,
    })
}

/// The space generated by the limits of several systems, one neighborhood
/// per system. Class labels are numbered consecutively across systems, so
/// distinct limits never share points.
pub fn union_of_direct_limits(
    systems: &[(String, DirectSystem)],
) -> Result<StructuredSpace, ConstructionError> {
    let mut offset = 0;
    let mut structures = Vec::new();
    for (name, d) in systems {
        let lim = limit_from(d, offset)?;
        let size = lim.structure.size();
        if size < 2 {
            return Err(ConstructionError::LimitTooSmall {
                system: name.clone(),
                size,
            });
        }
        offset += size;
        structures.push((name.clone(), lim.structure));
    }
    Ok(StructuredSpace::build_from_collection(
        structures,
        &BTreeMap::new(),
    )?)
}

/// Checks `φ_j ∘ f_{i,j} = φ_i` and that every `φ_i` preserves the operations.
/// Invalid systems never commute.
pub fn cone_commutes(d: &DirectSystem, lim: &DirectLimit) -> bool {
    let Ok(r) = resolve(d) else {
        return false;
    };
    for i in 0..r.names.len() {
        let phi_i = &lim.canonical[&r.names[i]];
        let images: Vec<usize> = r.algebras[i]
            .carrier()
            .iter()
            .map(|p| lim.structure.index_of(&phi_i[p]).unwrap())
            .collect();
        let pairs: Vec<(&OperationTable, &OperationTable)> = r.algebras[i]
            .tables()
            .iter()
            .map(|t| (t, lim.structure.table(t.name()).unwrap()))
            .collect();
        if first_violation(&pairs, &images).is_some() {
            return false;
        }
        for j in 0..r.names.len() {
            if !r.leq[i][j] {
                continue;
            }
            let phi_j = &lim.canonical[&r.names[j]];
            for (x, p) in r.algebras[i].carrier().iter().enumerate() {
                let fx = r.algebras[j].point(r.map(i, j)[x]);
                if phi_j[fx] != phi_i[p] {
                    return false;
                }
            }
        }
    }
    true
}
