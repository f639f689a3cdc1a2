use serde::{Deserialize, Serialize};

use super::{FiniteSpace, PointId, PointSet};

/// Connectedness classification of a finite space. Each `false` flag comes
/// with a pair of disjoint nonempty sets witnessing it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub connected: bool,
    pub hyperconnected: bool,
    pub ultraconnected: bool,
    /// Complementary nonempty opens.
    pub disconnection: Option<[Vec<PointId>; 2]>,
    /// Disjoint nonempty opens.
    pub disjoint_opens: Option<[Vec<PointId>; 2]>,
    /// Disjoint nonempty closed sets.
    pub disjoint_closed: Option<[Vec<PointId>; 2]>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompleteOpenness {
    pub completely_open: bool,
    pub completely_closed: bool,
}

impl FiniteSpace {
    pub fn connectivity_report(&self) -> ConnectivityReport {
        let u = self.universe();
        let n = u.len();
        let pair = |a: &PointSet, b: &PointSet| [u.names(a), u.names(b)];

        let disconnection = self
            .opens()
            .iter()
            .find(|o| !o.is_empty() && !o.is_full() && self.is_open(&o.complement()))
            .map(|o| pair(o, &o.complement()));

        // two disjoint nonempty opens exist iff two minimal opens are disjoint
        let disjoint_opens =
            first_disjoint_pair(n, |i| self.minimal_open(i).clone()).map(|(a, b)| pair(&a, &b));
        // dually for closed sets and point closures
        let disjoint_closed =
            first_disjoint_pair(n, |i| self.point_closure(i)).map(|(a, b)| pair(&a, &b));

        ConnectivityReport {
            connected: disconnection.is_none(),
            hyperconnected: disjoint_opens.is_none(),
            ultraconnected: disjoint_closed.is_none(),
            disconnection,
            disjoint_opens,
            disjoint_closed,
        }
    }

    /// Whether every member of `collection` is open, and whether every member is closed.
    pub fn check_complete_openness(&self, collection: &[PointSet]) -> CompleteOpenness {
        CompleteOpenness {
            completely_open: collection.iter().all(|c| self.is_open(c)),
            completely_closed: collection.iter().all(|c| self.is_closed(c)),
        }
    }
}

fn first_disjoint_pair(
    n: usize,
    set_of: impl Fn(usize) -> PointSet,
) -> Option<(PointSet, PointSet)> {
    let sets: Vec<PointSet> = (0..n).map(set_of).collect();
    for i in 0..n {
        for j in i + 1..n {
            if sets[i].is_disjoint(&sets[j]) {
                return Some((sets[i].clone(), sets[j].clone()));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::Universe;

    #[test]
    fn sierpinski_is_connected_in_every_sense() {
        let u = Universe::new(["a", "b"]).unwrap();
        let s = FiniteSpace::generate_topology(u, &[vec!["a".into()]]).unwrap();
        let r = s.connectivity_report();
        assert!(r.connected && r.hyperconnected && r.ultraconnected);
        assert!(r.disconnection.is_none());
    }

    #[test]
    fn discrete_pair_fails_everything() {
        let u = Universe::new(["a", "b"]).unwrap();
        let r = FiniteSpace::discrete(u).connectivity_report();
        assert!(!r.connected && !r.hyperconnected && !r.ultraconnected);
        assert_eq!(
            r.disconnection,
            Some([vec![PointId::from("a")], vec![PointId::from("b")]])
        );
    }

    #[test]
    fn indiscrete_is_connected() {
        let u = Universe::new(["a", "b", "c"]).unwrap();
        let r = FiniteSpace::indiscrete(u).connectivity_report();
        assert!(r.connected && r.hyperconnected && r.ultraconnected);
    }

    #[test]
    fn complete_openness() {
        let u = Universe::new(["a", "b"]).unwrap();
        let d = FiniteSpace::discrete(u.clone());
        let c = d.check_complete_openness(&[u.set(["a"]).unwrap(), u.full_set()]);
        assert!(c.completely_open && c.completely_closed);

        let s = FiniteSpace::generate_topology(u.clone(), &[vec!["a".into()]]).unwrap();
        let c = s.check_complete_openness(&[u.set(["a"]).unwrap()]);
        assert!(c.completely_open && !c.completely_closed);

        let u4 = Universe::new(["a", "b", "c", "d"]).unwrap();
        let halves = vec![u4.set(["a", "b"]).unwrap(), u4.set(["c", "d"]).unwrap()];
        let s = FiniteSpace::generated(u4, &halves);
        assert_eq!(s.opens().len(), 4);
        let c = s.check_complete_openness(&halves);
        assert!(c.completely_open && c.completely_closed);
    }
}
