use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use structspace::algebra::{
    find_isomorphism, FiniteStructure, OperationTable, PropertyKind, PropertySpec,
};
use structspace::constructions::{direct_limit, quotient, CongruenceSpec, DirectSystem};
use structspace::lattice::{h_map, verify_lattice, Poset};
use structspace::measure::{find_mu_la_partition, AtomMeasure, ExtRational};
use structspace::space::StructuredSpace;
use structspace::topology::{FiniteSpace, PointId, PointSet, Universe};

fn universe(n: usize) -> Universe {
    Universe::new((0..n).map(|i| format!("p{i}"))).unwrap()
}

fn set_of(u: &Universe, mask: u32) -> PointSet {
    PointSet::from_indices(u.len(), (0..u.len()).filter(|i| mask >> i & 1 == 1))
}

fn mask_of(s: &PointSet) -> u32 {
    s.iter().fold(0, |m, i| m | 1 << i)
}

fn fixpoint(n: usize, family: &[u32]) -> BTreeSet<u32> {
    let mut t: BTreeSet<u32> = family.iter().copied().collect();
    t.insert(0);
    t.insert((1 << n) - 1);
    loop {
        let before = t.len();
        let cur: Vec<u32> = t.iter().copied().collect();
        for &a in &cur {
            for &b in &cur {
                t.insert(a | b);
                t.insert(a & b);
            }
        }
        if t.len() == before {
            return t;
        }
    }
}

fn arb_topology() -> impl Strategy<Value = (usize, Vec<u32>)> {
    (1usize..=4).prop_flat_map(|n| (Just(n), prop::collection::vec(0u32..1 << n, 0..6)))
}

fn generated(n: usize, family: &[u32]) -> FiniteSpace {
    let u = universe(n);
    let sets: Vec<PointSet> = family.iter().map(|&m| set_of(&u, m)).collect();
    FiniteSpace::generated(u, &sets)
}

fn table_structure(points: &[String], cells: &[usize]) -> FiniteStructure {
    let n = points.len();
    let t = OperationTable::from_fn("·", n, |a, b| Some(cells[a * n + b] % n));
    FiniteStructure::new(
        points.iter().map(PointId::new).collect(),
        vec![t],
        [PropertySpec::new(PropertyKind::Closure, "·")],
        vec![],
    )
    .unwrap()
}

/// One to three closed magmas on random subsets of five points.
fn arb_space() -> impl Strategy<Value = StructuredSpace> {
    prop::collection::vec((0u32..32, prop::collection::vec(0usize..5, 25)), 1..=3).prop_filter_map(
        "carriers need two points",
        |parts| {
            let mut structures = Vec::new();
            for (k, (mask, cells)) in parts.iter().enumerate() {
                if mask.count_ones() < 2 {
                    return None;
                }
                let pts: Vec<String> = (0..5)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| format!("p{i}"))
                    .collect();
                structures.push((format!("N{k}"), table_structure(&pts, cells)));
            }
            StructuredSpace::build_from_collection(structures, &BTreeMap::new()).ok()
        },
    )
}

fn arb_poset() -> impl Strategy<Value = Vec<Vec<bool>>> {
    // a random strict order compatible with 0 < 1 < … < n-1, then closed
    (1usize..=12).prop_flat_map(|n| {
        prop::collection::vec(prop::bool::weighted(0.3), n * n).prop_map(move |bits| {
            let mut leq = vec![vec![false; n]; n];
            for i in 0..n {
                leq[i][i] = true;
                for j in i + 1..n {
                    leq[i][j] = bits[i * n + j];
                }
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if leq[i][k] && leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
            leq
        })
    })
}

fn bound(leq: &[Vec<bool>], a: usize, b: usize, upper: bool) -> Option<usize> {
    let n = leq.len();
    let rel = |x: usize, y: usize| if upper { leq[x][y] } else { leq[y][x] };
    let bounds: Vec<usize> = (0..n).filter(|&u| rel(a, u) && rel(b, u)).collect();
    bounds
        .iter()
        .copied()
        .find(|&u| bounds.iter().all(|&v| rel(u, v)))
}

proptest! {
    #[test]
    fn generation_is_the_fixpoint_closure((n, family) in arb_topology()) {
        let opens: BTreeSet<u32> = generated(n, &family).opens().iter().map(mask_of).collect();
        prop_assert_eq!(opens, fixpoint(n, &family));
    }

    #[test]
    fn generation_is_idempotent_and_opens_the_subbasis((n, family) in arb_topology()) {
        let t = generated(n, &family);
        let again = FiniteSpace::generated(t.universe().clone(), t.opens());
        prop_assert_eq!(again.opens(), t.opens());
        for &m in &family {
            prop_assert!(t.is_open(&set_of(t.universe(), m)));
        }
    }

    #[test]
    fn extension_restricts_to_the_original((n, family) in arb_topology(), extra in 1usize..3) {
        let t = generated(n, &family);
        let z: Vec<PointId> = (0..extra).map(|i| PointId::new(format!("z{i}"))).collect();
        let e = t.extension_topology(&z).unwrap();
        let restricted: BTreeSet<PointSet> = e
            .opens()
            .iter()
            .map(|o| {
                let names: Vec<PointId> =
                    e.universe().names(o).into_iter().filter(|p| t.universe().contains(p)).collect();
                t.universe().set(&names).unwrap()
            })
            .collect();
        let original: BTreeSet<PointSet> = t.opens().iter().cloned().collect();
        prop_assert_eq!(restricted, original);
    }

    #[test]
    fn stronger_connectedness_implies_connectedness((n, family) in arb_topology()) {
        let r = generated(n, &family).connectivity_report();
        prop_assert!(!r.hyperconnected || r.connected);
        prop_assert!(!r.ultraconnected || r.connected);
    }

    #[test]
    fn atoms_partition_and_build_every_open((n, family) in arb_topology()) {
        let t = generated(n, &family);
        let atoms = t.borel_atoms();
        let mut covered = 0u32;
        for a in &atoms {
            prop_assert!(!a.is_empty());
            prop_assert_eq!(covered & mask_of(a), 0);
            covered |= mask_of(a);
        }
        prop_assert_eq!(covered, (1 << n) - 1);
        for o in t.opens() {
            let rebuilt = atoms.iter().filter(|a| a.is_subset(o)).fold(0, |m, a| m | mask_of(a));
            prop_assert_eq!(rebuilt, mask_of(o));
        }
    }

    #[test]
    fn hyperconnected_open_collections_overlap(
        (n, family) in arb_topology(),
        picks in prop::collection::vec(any::<prop::sample::Index>(), 2..5),
    ) {
        let t = generated(n, &family);
        let members: BTreeSet<&PointSet> = picks
            .iter()
            .map(|i| i.get(t.opens()))
            .filter(|o| !o.is_empty())
            .collect();
        let collection: Vec<PointSet> = members.into_iter().cloned().collect();
        prop_assume!(collection.len() >= 2);
        prop_assert!(t.check_complete_openness(&collection).completely_open);
        if t.connectivity_report().hyperconnected {
            let meets = collection.iter().enumerate().any(|(i, a)| {
                collection[i + 1..].iter().any(|b| !a.is_disjoint(b))
            });
            prop_assert!(meets);
        }
    }

    #[test]
    fn structure_map_factors_through_the_assignment(s in arb_space()) {
        for p in s.universe().points() {
            let name = s.assigned(p).unwrap();
            prop_assert_eq!(s.modified_structure_map(p).unwrap(), s.structure_map(name).unwrap());
        }
    }

    #[test]
    fn full_subspace_is_the_identity(s in arb_space()) {
        let names: Vec<String> = s.names().cloned().collect();
        let sub = s.subspace(&names).unwrap();
        prop_assert_eq!(sub.universe(), s.universe());
        prop_assert_eq!(sub.catalog(), s.catalog());
    }

    #[test]
    fn built_carriers_are_open(s in arb_space()) {
        for c in s.carriers().values() {
            prop_assert!(s.space().is_open(c));
        }
    }

    #[test]
    fn singleton_congruence_copies_the_input(s in arb_space()) {
        let specs: Vec<CongruenceSpec> = s
            .neighborhoods()
            .iter()
            .map(|(name, u)| CongruenceSpec {
                neighborhood: name.clone(),
                blocks: u.carrier().iter().map(|p| vec![p.clone()]).collect(),
            })
            .collect();
        let q = quotient(&s, &specs).unwrap();
        prop_assert_eq!(q.universe().len(), s.universe().len());
        for (name, u) in s.neighborhoods() {
            let image = q.neighborhood(name).unwrap();
            prop_assert!(find_isomorphism(image, u).is_some());
        }
    }

    #[test]
    fn limit_is_no_larger_than_the_disjoint_union(
        sizes in prop::collection::vec(prop::sample::select(vec![2usize, 3, 4, 6]), 1..5),
        scale in prop::collection::vec(0usize..12, 4),
    ) {
        // chain i → i+1 with x ↦ c·x, c chosen among valid multipliers
        let k = sizes.len();
        let index: Vec<String> = (0..k).map(|i| i.to_string()).collect();
        let name = |i: usize, x: usize| PointId::new(format!("a{i}_{x}"));
        let mut step = Vec::new();
        for i in 0..k.saturating_sub(1) {
            let (a, b) = (sizes[i], sizes[i + 1]);
            let valid: Vec<usize> = (0..b).filter(|c| c * a % b == 0).collect();
            step.push(valid[scale[i] % valid.len()]);
        }
        let mut maps = BTreeMap::new();
        for i in 0..k {
            let mut f: Vec<usize> = (0..sizes[i]).collect();
            for j in i + 1..k {
                f = f.iter().map(|&x| step[j - 1] * x % sizes[j]).collect();
                let m = f.iter().enumerate().map(|(x, &y)| (name(i, x), name(j, y))).collect();
                maps.insert((index[i].clone(), index[j].clone()), m);
            }
        }
        let algebras = (0..k)
            .map(|i| {
                let n = sizes[i];
                let pts: Vec<PointId> = (0..n).map(|x| name(i, x)).collect();
                let t = OperationTable::from_fn("+", n, |a, b| Some((a + b) % n));
                let group = [
                    PropertyKind::Closure,
                    PropertyKind::Associativity,
                    PropertyKind::Identity,
                    PropertyKind::Invertibility,
                ];
                let s = FiniteStructure::new(pts, vec![t], group.map(|g| PropertySpec::new(g, "+")), vec![]).unwrap();
                (index[i].clone(), s)
            })
            .collect();
        let d = DirectSystem {
            order: (1..k).map(|i| (index[i - 1].clone(), index[i].clone())).collect(),
            index,
            algebras,
            maps,
        };
        let lim = direct_limit(&d).unwrap();
        let total: usize = sizes.iter().sum();
        prop_assert!(lim.structure.size() <= total);
        prop_assert_eq!(lim.structure.size() == total, k == 1);
    }

    #[test]
    fn infinite_member_makes_la_hold(
        sizes in prop::collection::vec(2usize..4, 1..4),
        infinite in any::<prop::sample::Index>(),
        finite in prop::collection::vec(0i64..5, 3),
    ) {
        let structures: Vec<(String, FiniteStructure)> = sizes
            .iter()
            .enumerate()
            .map(|(b, &n)| {
                let pts: Vec<String> = (0..n).map(|i| format!("b{b}_{i}")).collect();
                (format!("B{b}"), table_structure(&pts, &vec![0; n * n]))
            })
            .collect();
        let s = StructuredSpace::build_from_collection(structures, &BTreeMap::new()).unwrap();
        let top = infinite.index(sizes.len());
        let weights = (0..sizes.len())
            .map(|b| if b == top { ExtRational::Infinite } else { ExtRational::ratio(finite[b], 1) })
            .collect();
        let m = AtomMeasure::from_atom_weights(s.space(), weights).unwrap();
        let la = find_mu_la_partition(&s, &m).unwrap();
        prop_assert!(la.is_some());
        prop_assert_eq!(la.unwrap().collection.len(), sizes.len());
    }

    #[test]
    fn point_preorder_is_reflexive_and_transitive(s in arb_space()) {
        let h = h_map(&s);
        let pts = s.universe().points();
        for x in pts {
            prop_assert_eq!(h.leq(x, x), Some(true));
            for y in pts {
                for z in pts {
                    if h.leq(x, y) == Some(true) && h.leq(y, z) == Some(true) {
                        prop_assert_eq!(h.leq(x, z), Some(true));
                    }
                }
            }
        }
    }

    #[test]
    fn lattice_verdict_matches_bound_search(leq in arb_poset()) {
        let n = leq.len();
        let names: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
        let v = verify_lattice(&Poset::new(names, leq.clone()).unwrap());
        let mut expected = true;
        for a in 0..n {
            for b in 0..n {
                let (j, m) = (bound(&leq, a, b, true), bound(&leq, a, b, false));
                expected &= j.is_some() && m.is_some();
                if let (Some(jt), Some(mt)) = (&v.join_table, &v.meet_table) {
                    prop_assert_eq!(Some(jt[a][b]), j);
                    prop_assert_eq!(Some(mt[a][b]), m);
                }
            }
        }
        prop_assert_eq!(v.is_lattice, expected);
        prop_assert_eq!(v.counterexample.is_none(), expected);
    }
}
