use std::collections::HashSet;

use proptest::prelude::*;

use chainmail::category::{connectivity_homs, k_chainmail, right_adjoint_table, unit_eta};
use chainmail::enumeration::enumerate_codes;
use chainmail::sources::{
    chainmail_from_graph, chainmail_from_hypergraph, downset_lattice, powerset_lattice, Graph, Hypergraph,
};
use chainmail::{
    as_chainmail, canonical_code, d_lattice, is_isomorphic, Chainmail, CompleteLattice, ElementSet, EnumerationTask,
    Filter, Poset, RelationMode, Role,
};

/// A random poset on up to `max` elements: the transitive closure of a random
/// relation oriented from lower to higher index.
fn poset(max: usize) -> impl Strategy<Value = Poset> {
    (1..=max).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let pairs: Vec<(usize, usize)> =
                (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).filter(|&(i, j)| bits[i * n + j]).collect();
            chainmail::validate_poset(n, &pairs, RelationMode::Covers).expect("acyclic by construction")
        })
    })
}

fn permuted(max: usize) -> impl Strategy<Value = (Poset, Vec<usize>)> {
    poset(max).prop_flat_map(|p| {
        let n = p.size();
        (Just(p), Just((0..n).collect::<Vec<_>>()).prop_shuffle())
    })
}

fn graph(max_vertices: usize) -> impl Strategy<Value = Graph> {
    (1..=max_vertices).prop_flat_map(|n| {
        proptest::collection::vec(any::<bool>(), n * n).prop_map(move |bits| Graph {
            vertices: n,
            edges: (0..n).flat_map(|i| (i + 1..n).map(move |j| [i, j])).filter(|&[i, j]| bits[i * n + j]).collect(),
        })
    })
}

fn small_lattice() -> impl Strategy<Value = CompleteLattice> {
    poset(4).prop_map(|p| downset_lattice(&p).expect("down-sets form a lattice"))
}

fn subsets(n: usize) -> impl Iterator<Item = ElementSet> {
    (0u64..1 << n).map(ElementSet::from_mask)
}

fn has_lower_bound(p: &Poset, s: &ElementSet) -> bool {
    (0..p.size()).any(|l| s.iter().all(|x| p.leq(l, x)))
}

/// Down-closed and containing the join of every mail inside it, checked
/// over every subset.
fn subchainmail_by_definition(g: &Chainmail, x: &ElementSet) -> bool {
    let p = g.poset();
    p.is_down_closed(x)
        && subsets(p.size())
            .filter(|m| !m.is_empty() && m.is_subset(x) && has_lower_bound(p, m))
            .all(|m| p.join_of(&m).is_some_and(|j| x.contains(j)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn covers_regenerate_the_order(p in poset(9)) {
        let covers = p.covers();
        let q = chainmail::validate_poset(p.size(), &covers, RelationMode::Covers).unwrap();
        prop_assert_eq!(&q, &p);
        // no cover is implied by the others
        for (k, &(a, b)) in covers.iter().enumerate() {
            let rest: Vec<_> = covers.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, &c)| c).collect();
            let r = chainmail::validate_poset(p.size(), &rest, RelationMode::Covers).unwrap();
            prop_assert!(!r.leq(a, b));
        }
    }

    #[test]
    fn canonical_code_ignores_labelling((p, perm) in permuted(9)) {
        let q = p.relabel(&perm);
        prop_assert_eq!(canonical_code(&p), canonical_code(&q));
        prop_assert!(is_isomorphic(&p, &q));
        let back = canonical_code(&p).to_poset().unwrap();
        prop_assert!(is_isomorphic(&back, &p));
    }

    #[test]
    fn distinct_codes_for_non_isomorphic_duals(p in poset(6)) {
        // reversing the order keeps the code iff some relabelling maps p onto its dual
        let n = p.size();
        let dual = chainmail::Poset::from_leq(n, |i, j| p.leq(j, i)).unwrap();
        let same = canonical_code(&p) == canonical_code(&dual);
        let mut perm: Vec<usize> = (0..n).collect();
        let mut found = false;
        permutations(&mut perm, 0, &mut |s| {
            found |= (0..n).all(|i| (0..n).all(|j| p.leq(i, j) == dual.leq(s[i], s[j])));
        });
        prop_assert_eq!(same, found);
    }

    #[test]
    fn lattice_join_is_least_upper_bound(l in small_lattice()) {
        let n = l.size();
        for a in 0..n {
            for b in 0..n {
                let j = l.join(a, b);
                prop_assert!(l.leq(a, j) && l.leq(b, j));
                for u in 0..n {
                    if l.leq(a, u) && l.leq(b, u) {
                        prop_assert!(l.leq(j, u));
                    }
                }
                let m = l.meet(a, b);
                prop_assert!(l.leq(m, a) && l.leq(m, b));
            }
        }
    }

    #[test]
    fn right_adjoint_satisfies_galois_law(a in small_lattice(), b in small_lattice()) {
        prop_assume!(a.size() <= 6 && b.size() <= 6);
        for f in connectivity_homs(&a, &b, Role::ConnectivityHom) {
            let g = right_adjoint_table(&a, &b, &f);
            for x in 0..a.size() {
                for y in 0..b.size() {
                    prop_assert_eq!(b.leq(f[x], y), a.leq(x, g[y]));
                }
            }
        }
    }

    #[test]
    fn subchainmail_tests_match_definition(g in graph(3)) {
        let c = chainmail_from_graph(&g).unwrap();
        for x in subsets(c.size()) {
            let want = subchainmail_by_definition(&c, &x);
            prop_assert_eq!(c.is_subchainmail(&x), want, "set {:?}", x.to_vec());
            if c.poset().is_down_closed(&x) {
                let conds = c.subchainmail_conditions(&x);
                prop_assert!(conds.iter().all(|&b| b == want));
            }
        }
    }

    #[test]
    fn mail_joins_match_brute_force(p in poset(7)) {
        if let Ok(g) = as_chainmail(&p) {
            for a in 0..p.size() {
                for b in 0..p.size() {
                    let pair = ElementSet::from_iter([a, b]);
                    let want = if has_lower_bound(&p, &pair) { p.join_of(&pair) } else { None };
                    prop_assert_eq!(g.mail_join(a, b), want);
                }
            }
        }
    }

    #[test]
    fn connected_elements_of_d_recover_the_chainmail(g in graph(4)) {
        let c = chainmail_from_graph(&g).unwrap();
        let d = d_lattice(&c).unwrap();
        let k = k_chainmail(d.lattice()).unwrap();
        prop_assert!(is_isomorphic(k.chainmail().poset(), c.poset()));
        let eta = unit_eta(&c).unwrap();
        let t = eta.table();
        let distinct: HashSet<_> = t.iter().collect();
        prop_assert_eq!(distinct.len(), c.size());
    }

    #[test]
    fn d_lattice_counts_totally_disconnected_sets(p in poset(7)) {
        if let Ok(g) = as_chainmail(&p) {
            let oracle = subsets(p.size())
                .filter(|s| s.iter().all(|a| s.iter().all(|b| a == b || !has_lower_bound(&p, &ElementSet::from_iter([a, b])))))
                .count();
            prop_assert_eq!(d_lattice(&g).unwrap().size(), oracle);
            prop_assert_eq!(g.count_totally_disconnected_sets() as usize, oracle);
        }
    }

    #[test]
    fn enumeration_order_does_not_change_codes(seed in any::<u64>(), jobs in 1usize..4) {
        let plain = EnumerationTask::new(5, Filter::AllPosets);
        let shuffled = EnumerationTask::new(5, Filter::AllPosets).jobs(jobs).shuffled(seed);
        let a: HashSet<_> = enumerate_codes(&plain, 5).unwrap().into_iter().collect();
        let b = enumerate_codes(&shuffled, 5).unwrap();
        prop_assert_eq!(b.len(), 63);
        prop_assert_eq!(a, b.into_iter().collect::<HashSet<_>>());
    }
}

fn permutations(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}

#[test]
fn powerset_lattices_are_locally_connected_with_atoms_connected() {
    for n in 0..=5 {
        let l = powerset_lattice(n).unwrap();
        assert_eq!(l.size(), 1 << n);
        assert!(l.is_locally_connected());
        let connected: Vec<usize> = l.connected_elements().iter().filter(|&x| x != l.bottom()).collect();
        assert_eq!(connected, (0..n).map(|i| 1 << i).collect::<Vec<_>>());
        let k = k_chainmail(&l).unwrap();
        assert!(k.chainmail().poset().covers().is_empty());
    }
}

/// Singletons plus one two-point hyperedge per graph edge.
fn graph_hypergraph(g: &Graph) -> Hypergraph {
    let mut hyperedges: Vec<Vec<usize>> = (0..g.vertices).map(|v| vec![v]).collect();
    hyperedges.extend(g.edges.iter().map(|e| e.to_vec()));
    Hypergraph { vertices: g.vertices, hyperedges }
}

#[test]
fn graph_and_hypergraph_agree_on_all_small_graphs() {
    for n in 1..=4 {
        let pairs: Vec<[usize; 2]> = (0..n).flat_map(|i| (i + 1..n).map(move |j| [i, j])).collect();
        for mask in 0u32..1 << pairs.len() {
            let g = Graph {
                vertices: n,
                edges: pairs.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &e)| e).collect(),
            };
            let from_graph = chainmail_from_graph(&g).unwrap();
            let from_hyper = chainmail_from_hypergraph(&graph_hypergraph(&g)).unwrap();
            assert_eq!(from_graph.poset(), from_hyper.poset(), "{g:?}");
            assert_eq!(from_graph.poset().names(), from_hyper.poset().names());
        }
    }
}
