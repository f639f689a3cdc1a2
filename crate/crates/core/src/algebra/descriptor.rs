use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A law that a single operation may be declared to satisfy.
///
/// `Pair(h, z)` lives on product operations only: it holds when `h` holds on
/// the left factor operation and `z` on the right one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PropertyKind {
    Closure,
    Commutativity,
    Associativity,
    LeftIdentity,
    RightIdentity,
    Identity,
    Invertibility,
    Pair(Box<PropertyKind>, Box<PropertyKind>),
}

impl PropertyKind {
    /// The seven single-operation laws in declaration order.
    pub const BASIC: [PropertyKind; 7] = [
        PropertyKind::Closure,
        PropertyKind::Commutativity,
        PropertyKind::Associativity,
        PropertyKind::LeftIdentity,
        PropertyKind::RightIdentity,
        PropertyKind::Identity,
        PropertyKind::Invertibility,
    ];

    pub fn pair(left: PropertyKind, right: PropertyKind) -> Self {
        PropertyKind::Pair(Box::new(left), Box::new(right))
    }
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyKind::Closure => f.write_str("Closure"),
            PropertyKind::Commutativity => f.write_str("Commutativity"),
            PropertyKind::Associativity => f.write_str("Associativity"),
            PropertyKind::LeftIdentity => f.write_str("LeftIdentity"),
            PropertyKind::RightIdentity => f.write_str("RightIdentity"),
            PropertyKind::Identity => f.write_str("Identity"),
            PropertyKind::Invertibility => f.write_str("Invertibility"),
            PropertyKind::Pair(l, r) => write!(f, "({l},{r})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseKindError(pub String);

impl fmt::Display for ParseKindError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown property kind `{}`", self.0)
    }
}

impl std::error::Error for ParseKindError {}

impl FromStr for PropertyKind {
    type Err = ParseKindError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseKindError(s.to_owned());
        if let Some(inner) = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            // split at the top-level comma
            let mut depth = 0usize;
            for (i, ch) in inner.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => depth = depth.checked_sub(1).ok_or_else(err)?,
                    ',' if depth == 0 => {
                        let l = inner[..i].parse().map_err(|_| err())?;
                        let r = inner[i + 1..].parse().map_err(|_| err())?;
                        return Ok(PropertyKind::pair(l, r));
                    }
                    _ => {}
                }
            }
            return Err(err());
        }
        PropertyKind::BASIC
            .iter()
            .find(|k| k.to_string() == s)
            .cloned()
            .ok_or_else(err)
    }
}

impl Serialize for PropertyKind {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PropertyKind {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One declared law on one named operation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PropertySpec {
    pub kind: PropertyKind,
    pub op: String,
}

impl PropertySpec {
    pub fn new(kind: PropertyKind, op: impl Into<String>) -> Self {
        PropertySpec {
            kind,
            op: op.into(),
        }
    }
}

impl fmt::Display for PropertySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.kind, self.op)
    }
}

/// Opaque non-algebraic data, compared literally.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct NonAlgTag {
    pub label: String,
    #[serde(default)]
    pub payload: String,
}

impl NonAlgTag {
    pub fn new(label: impl Into<String>, payload: impl Into<String>) -> Self {
        NonAlgTag {
            label: label.into(),
            payload: payload.into(),
        }
    }
}

/// Operation names, declared laws and non-algebraic tags of a structure.
///
/// Operations are sorted, so two tuples that differ by a reordering produce the
/// same descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StructureDescriptor {
    operations: Vec<String>,
    properties: BTreeSet<PropertySpec>,
    nonalg: Vec<NonAlgTag>,
}

/// Why two descriptors are not equivalent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Inequivalence {
    OperationCount { left: usize, right: usize },
    NonAlgebraic,
    NoBijection,
}

impl fmt::Display for Inequivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inequivalence::OperationCount { left, right } => {
                write!(f, "operation counts differ ({left} vs {right})")
            }
            Inequivalence::NonAlgebraic => f.write_str("non-algebraic tags differ"),
            Inequivalence::NoBijection => {
                f.write_str("no operation bijection matches the property sets")
            }
        }
    }
}

impl StructureDescriptor {
    pub fn new(
        mut operations: Vec<String>,
        properties: BTreeSet<PropertySpec>,
        mut nonalg: Vec<NonAlgTag>,
    ) -> Self {
        operations.sort();
        operations.dedup();
        nonalg.sort();
        StructureDescriptor {
            operations,
            properties,
            nonalg,
        }
    }

    pub fn operations(&self) -> &[String] {
        &self.operations
    }

    pub fn properties(&self) -> &BTreeSet<PropertySpec> {
        &self.properties
    }

    pub fn nonalg(&self) -> &[NonAlgTag] {
        &self.nonalg
    }

    /// Declared law kinds of one operation.
    pub fn kinds_of(&self, op: &str) -> BTreeSet<PropertyKind> {
        self.properties
            .iter()
            .filter(|p| p.op == op)
            .map(|p| p.kind.clone())
            .collect()
    }

    /// Searches for an operation bijection carrying each operation's law set
    /// onto its partner's. The witness lists `(own op, other op)` pairs.
    pub fn equivalence(
        &self,
        other: &StructureDescriptor,
    ) -> Result<Vec<(String, String)>, Inequivalence> {
        if self.operations.len() != other.operations.len() {
            return Err(Inequivalence::OperationCount {
                left: self.operations.len(),
                right: other.operations.len(),
            });
        }
        if self.nonalg != other.nonalg {
            return Err(Inequivalence::NonAlgebraic);
        }
        let mine: Vec<BTreeSet<PropertyKind>> =
            self.operations.iter().map(|o| self.kinds_of(o)).collect();
        let theirs: Vec<BTreeSet<PropertyKind>> =
            other.operations.iter().map(|o| other.kinds_of(o)).collect();

        // cheap necessary condition before the search
        let mut counts: BTreeMap<&BTreeSet<PropertyKind>, isize> = BTreeMap::new();
        for k in &mine {
            *counts.entry(k).or_default() += 1;
        }
        for k in &theirs {
            *counts.entry(k).or_default() -= 1;
        }
        if counts.values().any(|&c| c != 0) {
            return Err(Inequivalence::NoBijection);
        }

        let mut used = vec![false; theirs.len()];
        let mut chosen = Vec::with_capacity(mine.len());
        if match_ops(&mine, &theirs, &mut used, &mut chosen) {
            Ok(chosen
                .iter()
                .enumerate()
                .map(|(i, &j)| (self.operations[i].clone(), other.operations[j].clone()))
                .collect())
        } else {
            Err(Inequivalence::NoBijection)
        }
    }

    pub fn is_equivalent(&self, other: &StructureDescriptor) -> bool {
        self.equivalence(other).is_ok()
    }
}

fn match_ops(
    mine: &[BTreeSet<PropertyKind>],
    theirs: &[BTreeSet<PropertyKind>],
    used: &mut [bool],
    chosen: &mut Vec<usize>,
) -> bool {
    let i = chosen.len();
    if i == mine.len() {
        return true;
    }
    for j in 0..theirs.len() {
        if !used[j] && mine[i] == theirs[j] {
            used[j] = true;
            chosen.push(j);
            if match_ops(mine, theirs, used, chosen) {
                return true;
            }
            chosen.pop();
            used[j] = false;
        }
    }
    false
}

impl fmt::Display for StructureDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{({}), {{", self.operations.join(", "))?;
        for (i, p) in self.properties.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}, ")?;
        if self.nonalg.is_empty() {
            f.write_str("∅")?;
        } else {
            let tags: Vec<String> = self
                .nonalg
                .iter()
                .map(|t| format!("{}:{}", t.label, t.payload))
                .collect();
            write!(f, "{{{}}}", tags.join(", "))?;
        }
        f.write_str("}")
    }
}
