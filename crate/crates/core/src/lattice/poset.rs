use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PosetError {
    #[error("a poset needs at least one element")]
    Empty,
    #[error("element `{0}` is listed twice")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("relation matrix must be {0}×{0}")]
    BadMatrix(usize),
    #[error("`{0}` is not below itself")]
    NotReflexive(String),
    #[error("`{0}` and `{1}` are below each other")]
    NotAntisymmetric(String, String),
    #[error("`{0}` ≤ `{1}` ≤ `{2}` but not `{0}` ≤ `{2}`")]
    NotTransitive(String, String, String),
}

/// A finite partial order on named elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poset {
    elements: Vec<String>,
    leq: Vec<Vec<bool>>,
}

impl Poset {
    /// Checks the three order laws on an explicit relation matrix.
    pub fn new(elements: Vec<String>, leq: Vec<Vec<bool>>) -> Result<Self, PosetError> {
        check_names(&elements)?;
        let n = elements.len();
        if leq.len() != n || leq.iter().any(|row| row.len() != n) {
            return Err(PosetError::BadMatrix(n));
        }
        for i in 0..n {
            if !leq[i][i] {
                return Err(PosetError::NotReflexive(elements[i].clone()));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if leq[i][j] && leq[j][i] {
                    return Err(PosetError::NotAntisymmetric(
                        elements[i].clone(),
                        elements[j].clone(),
                    ));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !leq[i][j] {
                    continue;
                }
                if let Some(k) = (0..n).find(|&k| leq[j][k] && !leq[i][k]) {
                    return Err(PosetError::NotTransitive(
                        elements[i].clone(),
                        elements[j].clone(),
                        elements[k].clone(),
                    ));
                }
            }
        }
        Ok(Poset { elements, leq })
    }

    /// The reflexive transitive closure of `below ≤ above` pairs.
    pub fn from_covers(
        elements: Vec<String>,
        covers: &[(String, String)],
    ) -> Result<Self, PosetError> {
        check_names(&elements)?;
        let n = elements.len();
        let index = |e: &String| {
            elements
                .iter()
                .position(|x| x == e)
                .ok_or_else(|| PosetError::UnknownElement(e.clone()))
        };
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in covers {
            leq[index(a)?][index(b)?] = true;
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
        Poset::new(elements, leq)
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    /// Pairs `(i, j)` with `j` covering `i`: the transitive reduction.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let n = self.len();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i != j
                    && self.leq[i][j]
                    && !(0..n).any(|k| k != i && k != j && self.leq[i][k] && self.leq[k][j])
                {
                    edges.push((i, j));
                }
            }
        }
        edges
    }

    /// Hasse diagram in DOT, drawn bottom to top, nodes labelled by `labels`.
    pub fn to_dot(&self, labels: &[String]) -> String {
        let mut out = String::from("digraph poset {\n  rankdir=BT;\n");
        for (i, label) in labels.iter().enumerate() {
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", label.replace('"', "\\\""));
        }
        for (i, j) in self.hasse_edges() {
            let _ = writeln!(out, "  n{i} -> n{j};");
        }
        out.push_str("}\n");
        out
    }

    fn upper_bounds(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&u| self.leq[a][u] && self.leq[b][u])
            .collect()
    }

    fn lower_bounds(&self, a: usize, b: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&l| self.leq[l][a] && self.leq[l][b])
            .collect()
    }

    /// The least upper bound of `a` and `b`, if any.
    pub fn join(&self, a: usize, b: usize) -> Option<usize> {
        let ub = self.upper_bounds(a, b);
        ub.iter()
            .copied()
            .find(|&u| ub.iter().all(|&v| self.leq[u][v]))
    }

    /// The greatest lower bound of `a` and `b`, if any.
    pub fn meet(&self, a: usize, b: usize) -> Option<usize> {
        let lb = self.lower_bounds(a, b);
        lb.iter()
            .copied()
            .find(|&l| lb.iter().all(|&v| self.leq[v][l]))
    }
}

fn check_names(elements: &[String]) -> Result<(), PosetError> {
    if elements.is_empty() {
        return Err(PosetError::Empty);
    }
    let mut seen = BTreeSet::new();
    for e in elements {
        if !seen.insert(e) {
            return Err(PosetError::DuplicateElement(e.clone()));
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    Join,
    Meet,
}

/// A pair without a least upper or greatest lower bound. `bounds` lists every
/// upper (or lower) bound; it is empty when there is none at all.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundFailure {
    pub left: String,
    pub right: String,
    pub missing: BoundKind,
    pub bounds: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeVerdict {
    pub is_lattice: bool,
    /// Indices into the element list.
    pub join_table: Option<Vec<Vec<usize>>>,
    pub meet_table: Option<Vec<Vec<usize>>>,
    pub counterexample: Option<BoundFailure>,
}

/// Brute force over all pairs `i ≤ j` in element order, joins before meets.
pub fn verify_lattice(p: &Poset) -> LatticeVerdict {
    let n = p.len();
    let mut join = vec![vec![0; n]; n];
    let mut meet = vec![vec![0; n]; n];
    for i in 0..n {
        for j in i..n {
            let failure = |missing, bounds: Vec<usize>| LatticeVerdict {
                is_lattice: false,
                join_table: None,
                meet_table: None,
                counterexample: Some(BoundFailure {
                    left: p.elements[i].clone(),
                    right: p.elements[j].clone(),
                    missing,
                    bounds: bounds.into_iter().map(|k| p.elements[k].clone()).collect(),
                }),
            };
            let Some(u) = p.join(i, j) else {
                return failure(BoundKind::Join, p.upper_bounds(i, j));
            };
            let Some(l) = p.meet(i, j) else {
                return failure(BoundKind::Meet, p.lower_bounds(i, j));
            };
            join[i][j] = u;
            join[j][i] = u;
            meet[i][j] = l;
            meet[j][i] = l;
        }
    }
    LatticeVerdict {
        is_lattice: true,
        join_table: Some(join),
        meet_table: Some(meet),
        counterexample: None,
    }
}
