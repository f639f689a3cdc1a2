//! JSON interchange files for spaces, measures, congruences, direct systems
//! and lattices.
//!
//! Emission is canonical: parsing an emitted document and emitting it again
//! gives the same document.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize};
use thiserror::Error;

use crate::algebra::{Entry, FiniteStructure, NonAlgTag, ProductFactors, PropertySpec};
use crate::constructions::{CongruenceSpec, DirectSystem};
use crate::lattice::Poset;
use crate::measure::{AtomMeasure, ExtRational};
use crate::space::StructuredSpace;
use crate::topology::{FiniteSpace, PointId, Universe};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl FormatError {
    fn at(path: impl Into<String>, message: impl ToString) -> Self {
        FormatError::Invalid {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, FormatError> {
    serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("file types serialize");
    s.push('\n');
    s
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationFile {
    pub name: String,
    /// `[a, b, a·b]` for every defined pair.
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorsFile {
    pub left: NeighborhoodFile,
    pub right: NeighborhoodFile,
    pub points: BTreeMap<PointId, (PointId, PointId)>,
    pub operations: BTreeMap<String, (String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeighborhoodFile {
    pub name: String,
    pub points: Vec<PointId>,
    pub operations: Vec<OperationFile>,
    #[serde(default)]
    pub properties: Vec<PropertySpec>,
    /// A tag list, or the string `"∅"` for none.
    #[serde(default, deserialize_with = "tags_or_empty")]
    pub nonalg: Vec<NonAlgTag>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Box<FactorsFile>>,
}

fn tags_or_empty<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<NonAlgTag>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Tags {
        Marker(String),
        List(Vec<NonAlgTag>),
    }
    match Tags::deserialize(d)? {
        Tags::List(tags) => Ok(tags),
        Tags::Marker(m) if m == "∅" => Ok(Vec::new()),
        Tags::Marker(m) => Err(serde::de::Error::custom(format!(
            "expected a tag list or \"∅\", found \"{m}\""
        ))),
    }
}

impl NeighborhoodFile {
    pub fn from_structure(name: &str, s: &FiniteStructure) -> Self {
        NeighborhoodFile {
            name: name.to_owned(),
            points: s.carrier().to_vec(),
            operations: s
                .tables()
                .iter()
                .map(|t| OperationFile {
                    name: t.name().to_owned(),
                    entries: s.entries(t.name()).expect("table exists"),
                })
                .collect(),
            properties: s.descriptor().properties().iter().cloned().collect(),
            nonalg: s.descriptor().nonalg().to_vec(),
            factors: s.factors().map(|f| {
                Box::new(FactorsFile {
                    left: NeighborhoodFile::from_structure("left", &f.left),
                    right: NeighborhoodFile::from_structure("right", &f.right),
                    points: f.points.clone(),
                    operations: f.operations.clone(),
                })
            }),
        }
    }

    pub fn to_structure(&self, path: &str) -> Result<FiniteStructure, FormatError> {
        let ops = self
            .operations
            .iter()
            .map(|o| (o.name.clone(), o.entries.clone()))
            .collect();
        let s = FiniteStructure::from_entries(
            self.points.clone(),
            ops,
            self.properties.iter().cloned(),
            self.nonalg.clone(),
        )
        .map_err(|e| FormatError::at(path, e))?;
        match &self.factors {
            None => Ok(s),
            Some(f) => {
                let factors = ProductFactors {
                    left: f.left.to_structure(&format!("{path}.factors.left"))?,
                    right: f.right.to_structure(&format!("{path}.factors.right"))?,
                    points: f.points.clone(),
                    operations: f.operations.clone(),
                };
                s.with_factors(factors)
                    .map_err(|e| FormatError::at(format!("{path}.factors"), e))
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologySection {
    /// The carriers form a subbasis.
    #[default]
    Generate,
    Explicit {
        opens: Vec<Vec<PointId>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub points: Vec<PointId>,
    #[serde(default)]
    pub topology: TopologySection,
    pub neighborhoods: Vec<NeighborhoodFile>,
    /// Points left out go to the first neighborhood by name containing them.
    #[serde(default)]
    pub assignment: BTreeMap<PointId, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<BTreeMap<PointId, ExtRational>>,
}

impl SpaceFile {
    pub fn from_space(s: &StructuredSpace, measure: Option<&AtomMeasure>) -> Self {
        let universe = s.universe();
        let carriers: Vec<_> = s.carriers().values().cloned().collect();
        let topology = if FiniteSpace::generated(universe.clone(), &carriers) == *s.space() {
            TopologySection::Generate
        } else {
            TopologySection::Explicit {
                opens: s.space().open_names(),
            }
        };
        SpaceFile {
            points: universe.points().to_vec(),
            topology,
            neighborhoods: s
                .neighborhoods()
                .iter()
                .map(|(n, u)| NeighborhoodFile::from_structure(n, u))
                .collect(),
            assignment: s.assignment(),
            measure: measure.map(AtomMeasure::representative_weights),
        }
    }

    /// Resolves every name; semantic checks are left to validation.
    pub fn to_space(&self) -> Result<(StructuredSpace, Option<AtomMeasure>), FormatError> {
        let universe =
            Universe::new(self.points.iter().cloned()).map_err(|e| FormatError::at("points", e))?;
        let mut neighborhoods = BTreeMap::new();
        for (i, n) in self.neighborhoods.iter().enumerate() {
            let path = format!("neighborhoods[{i}]");
            let s = n.to_structure(&path)?;
            if let Some(p) = s.carrier().iter().find(|p| !universe.contains(p)) {
                return Err(FormatError::at(
                    &path,
                    format!("point `{p}` is not listed in points"),
                ));
            }
            if neighborhoods.insert(n.name.clone(), s).is_some() {
                return Err(FormatError::at(
                    &path,
                    format!("neighborhood `{}` is defined twice", n.name),
                ));
            }
        }
        if neighborhoods.is_empty() {
            return Err(FormatError::at(
                "neighborhoods",
                "at least one neighborhood is required",
            ));
        }
        let set =
            |pts: &[PointId], path: &str| universe.set(pts).map_err(|e| FormatError::at(path, e));
        let space = match &self.topology {
            TopologySection::Generate => {
                let carriers = neighborhoods
                    .values()
                    .map(|s| set(s.carrier(), "neighborhoods"))
                    .collect::<Result<Vec<_>, _>>()?;
                FiniteSpace::generated(universe.clone(), &carriers)
            }
            TopologySection::Explicit { opens } => {
                let family = opens
                    .iter()
                    .enumerate()
                    .map(|(i, o)| set(o, &format!("topology.opens[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                FiniteSpace::new(universe.clone(), family)
                    .map_err(|e| FormatError::at("topology.opens", e))?
            }
        };
        let mut assignment = BTreeMap::new();
        for p in universe.points() {
            let name = match self.assignment.get(p) {
                Some(n) => n.clone(),
                None => neighborhoods
                    .iter()
                    .find(|(_, s)| s.index_of(p).is_some())
                    .map(|(n, _)| n.clone())
                    .ok_or_else(|| {
                        FormatError::at(
                            "assignment",
                            format!("point `{p}` lies in no neighborhood"),
                        )
                    })?,
            };
            assignment.insert(p.clone(), name);
        }
        let s = StructuredSpace::from_parts(space, neighborhoods, assignment)
            .map_err(|e| FormatError::at("assignment", e))?;
        let measure = self
            .measure
            .as_ref()
            .map(|w| AtomMeasure::new(s.space(), w))
            .transpose()
            .map_err(|e| FormatError::at("measure", e))?;
        Ok((s, measure))
    }
}

pub fn parse_space(text: &str) -> Result<(StructuredSpace, Option<AtomMeasure>), FormatError> {
    from_json::<SpaceFile>(text)?.to_space()
}

pub fn emit_space(s: &StructuredSpace, measure: Option<&AtomMeasure>) -> String {
    to_json(&SpaceFile::from_space(s, measure))
}

/// A point-to-weight map for the given space.
pub fn parse_weights(text: &str, space: &FiniteSpace) -> Result<AtomMeasure, FormatError> {
    let weights: BTreeMap<PointId, ExtRational> = from_json(text)?;
    AtomMeasure::new(space, &weights).map_err(|e| FormatError::at("weights", e))
}

pub fn emit_weights(m: &AtomMeasure) -> String {
    to_json(&m.representative_weights())
}

/// A congruence given by blocks, or by a normal subgroup whose cosets are
/// the blocks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CongruenceEntry {
    Blocks(CongruenceSpec),
    NormalSubgroup {
        neighborhood: String,
        normal_subgroup: Vec<PointId>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CongruenceFile {
    pub congruences: Vec<CongruenceEntry>,
}

pub fn parse_congruences(text: &str) -> Result<CongruenceFile, FormatError> {
    from_json(text)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapFile {
    pub from: String,
    pub to: String,
    pub map: BTreeMap<PointId, PointId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemFile {
    pub name: String,
    pub index: Vec<String>,
    /// `[i, j]` pairs with `i ≤ j`; the closure is taken.
    pub order: Vec<(String, String)>,
    /// One algebra per index, named by it.
    pub algebras: Vec<NeighborhoodFile>,
    pub maps: Vec<MapFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectSystemFile {
    pub systems: Vec<SystemFile>,
}

impl SystemFile {
    pub fn from_system(name: &str, d: &DirectSystem) -> Self {
        SystemFile {
            name: name.to_owned(),
            index: d.index.clone(),
            order: d.order.clone(),
            algebras: d
                .algebras
                .iter()
                .map(|(i, a)| NeighborhoodFile::from_structure(i, a))
                .collect(),
            maps: d
                .maps
                .iter()
                .map(|((from, to), map)| MapFile {
                    from: from.clone(),
                    to: to.clone(),
                    map: map.clone(),
                })
                .collect(),
        }
    }

    pub fn to_system(&self, path: &str) -> Result<DirectSystem, FormatError> {
        let mut algebras = BTreeMap::new();
        for (i, a) in self.algebras.iter().enumerate() {
            let p = format!("{path}.algebras[{i}]");
            if algebras
                .insert(a.name.clone(), a.to_structure(&p)?)
                .is_some()
            {
                return Err(FormatError::at(
                    p,
                    format!("index `{}` has two algebras", a.name),
                ));
            }
        }
        let mut maps = BTreeMap::new();
        for (i, m) in self.maps.iter().enumerate() {
            if maps
                .insert((m.from.clone(), m.to.clone()), m.map.clone())
                .is_some()
            {
                return Err(FormatError::at(
                    format!("{path}.maps[{i}]"),
                    format!("map `{}` → `{}` is given twice", m.from, m.to),
                ));
            }
        }
        Ok(DirectSystem {
            index: self.index.clone(),
            order: self.order.clone(),
            algebras,
            maps,
        })
    }
}

pub fn parse_direct_systems(text: &str) -> Result<Vec<(String, DirectSystem)>, FormatError> {
    let file: DirectSystemFile = from_json(text)?;
    let mut names = BTreeSet::new();
    file.systems
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let path = format!("systems[{i}]");
            if !names.insert(&s.name) {
                return Err(FormatError::at(
                    &path,
                    format!("system `{}` is given twice", s.name),
                ));
            }
            Ok((s.name.clone(), s.to_system(&path)?))
        })
        .collect()
}

pub fn emit_direct_systems(systems: &[(String, DirectSystem)]) -> String {
    to_json(&DirectSystemFile {
        systems: systems
            .iter()
            .map(|(n, d)| SystemFile::from_system(n, d))
            .collect(),
    })
}

/// Elements and `[below, above]` pairs; the order is their reflexive
/// transitive closure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PosetFile {
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
}

pub fn parse_poset(text: &str) -> Result<Poset, FormatError> {
    let file: PosetFile = from_json(text)?;
    Poset::from_covers(file.elements, &file.covers).map_err(|e| FormatError::at("covers", e))
}

/// Emits the covering pairs only.
pub fn emit_poset(p: &Poset) -> String {
    let e = p.elements();
    to_json(&PosetFile {
        elements: e.to_vec(),
        covers: p
            .hasse_edges()
            .into_iter()
            .map(|(a, b)| (e[a].clone(), e[b].clone()))
            .collect(),
    })
}
