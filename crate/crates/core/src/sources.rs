//! Concrete chainmails and lattices: connected sets of graphs, hypergraphs,
//! finite topologies and connectivity spaces, powerset and down-set
//! lattices, the seven-element counterexample, and a search for
//! connectivity-space representations of a chainmail.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::ElementSet;
use crate::budget::{self, Budget};
use crate::canon::is_isomorphic;
use crate::chainmail::{as_chainmail, Chainmail};
use crate::error::{Error, Result, SpaceAxiom};
use crate::lattice::CompleteLattice;
use crate::poset::Poset;

/// An undirected graph on `vertices` vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    pub vertices: usize,
    pub hyperedges: Vec<Vec<usize>>,
}

/// A topology given by its open sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteTopology {
    pub points: usize,
    pub opens: Vec<Vec<usize>>,
}

/// A family of "connected" subsets containing the empty set and closed
/// under unions of families with a common point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivitySpace {
    pub points: usize,
    pub connected: Vec<Vec<usize>>,
}

fn to_mask(points: usize, members: &[usize]) -> Result<u64> {
    members.iter().try_fold(0u64, |m, &p| {
        if p >= points {
            Err(Error::IndexOutOfRange { index: p, size: points })
        } else {
            Ok(m | 1 << p)
        }
    })
}

fn from_mask(mask: u64) -> Vec<usize> {
    ElementSet::from_mask(mask).to_vec()
}

fn check_points(points: usize) -> Result<()> {
    budget::check("ground set", points, Budget::current().max_points)
}

/// Inclusion order on a family of distinct point sets, sorted by size then members.
fn inclusion_poset(mut family: Vec<u64>) -> Result<Poset> {
    budget::check("subset poset", family.len(), Budget::current().max_lattice)?;
    family.sort_by_key(|&m| (m.count_ones(), from_mask(m)));
    family.dedup();
    let p = Poset::from_leq_unchecked(family.len(), |i, j| family[i] & !family[j] == 0);
    let labels: Vec<String> = family.iter().map(|&m| format_points(m)).collect();
    p.with_labels(labels)
}

fn format_points(mask: u64) -> String {
    let names: Vec<String> = from_mask(mask).iter().map(|p| p.to_string()).collect();
    format!("{{{}}}", names.join(","))
}

fn validated(p: Poset) -> Result<Chainmail> {
    as_chainmail(&p).map_err(|e| Error::TheoremViolation(format!("builder output is not a chainmail: {e}")))
}

fn graph_connected(adj: &[u64], set: u64) -> bool {
    if set == 0 {
        return false;
    }
    let start = set.trailing_zeros() as usize;
    let mut seen = 1u64 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let fresh = adj[v] & set & !seen;
        seen |= fresh;
        frontier |= fresh;
    }
    seen == set
}

/// Nonempty connected vertex sets under inclusion.
pub fn chainmail_from_graph(g: &Graph) -> Result<Chainmail> {
    check_points(g.vertices)?;
    let mut adj = vec![0u64; g.vertices];
    for &[a, b] in &g.edges {
        to_mask(g.vertices, &[a, b])?;
        if a != b {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
    }
    let family = (1u64..1 << g.vertices).filter(|&s| graph_connected(&adj, s)).collect();
    validated(inclusion_poset(family)?)
}

/// Nonempty sets in which any two points are linked by a chain of
/// overlapping hyperedges, each contained in the set.
pub fn chainmail_from_hypergraph(h: &Hypergraph) -> Result<Chainmail> {
    check_points(h.vertices)?;
    let edges: Vec<u64> = h.hyperedges.iter().map(|e| to_mask(h.vertices, e)).collect::<Result<_>>()?;
    if edges.contains(&0) {
        return Err(Error::Malformed("hyperedges must be nonempty".into()));
    }
    let family = (1u64..1 << h.vertices).filter(|&c| hypergraph_connected(&edges, c)).collect();
    validated(inclusion_poset(family)?)
}

fn hypergraph_connected(edges: &[u64], c: u64) -> bool {
    let inside: Vec<u64> = edges.iter().copied().filter(|&e| e & !c == 0).collect();
    if inside.iter().fold(0, |acc, e| acc | e) != c {
        return false;
    }
    let mut reached = inside[0];
    let mut used = vec![false; inside.len()];
    used[0] = true;
    loop {
        let mut grew = false;
        for (k, &e) in inside.iter().enumerate() {
            if !used[k] && e & reached != 0 {
                used[k] = true;
                reached |= e;
                grew = true;
            }
        }
        if !grew {
            return reached == c;
        }
    }
}

impl FiniteTopology {
    fn open_masks(&self) -> Result<Vec<u64>> {
        check_points(self.points)?;
        let mut opens: Vec<u64> = self.opens.iter().map(|o| to_mask(self.points, o)).collect::<Result<_>>()?;
        opens.sort_unstable();
        opens.dedup();
        let full = (1u64 << self.points) - 1;
        if !opens.contains(&0) {
            return Err(Error::NotATopology("missing the empty set".into()));
        }
        if !opens.contains(&full) {
            return Err(Error::NotATopology("missing the whole space".into()));
        }
        for &a in &opens {
            for &b in &opens {
                for (op, m) in [("union", a | b), ("intersection", a & b)] {
                    if opens.binary_search(&m).is_err() {
                        return Err(Error::NotATopology(format!(
                            "{op} of {} and {} is not open",
                            format_points(a),
                            format_points(b)
                        )));
                    }
                }
            }
        }
        Ok(opens)
    }
}

/// Nonempty subsets that no pair of opens splits into two nonempty,
/// relatively disjoint pieces.
pub fn chainmail_from_topology(t: &FiniteTopology) -> Result<Chainmail> {
    let opens = t.open_masks()?;
    let separated = |c: u64| {
        opens.iter().any(|&u| opens.iter().any(|&v| c & !(u | v) == 0 && c & u != 0 && c & v != 0 && c & u & v == 0))
    };
    let family = (1u64..1 << t.points).filter(|&c| !separated(c)).collect();
    validated(inclusion_poset(family)?)
}

impl ConnectivitySpace {
    fn masks(&self) -> Result<Vec<u64>> {
        let mut family: Vec<u64> = self.connected.iter().map(|c| to_mask(self.points, c)).collect::<Result<_>>()?;
        let mut seen = std::collections::HashSet::new();
        family.retain(|m| seen.insert(*m));
        Ok(family)
    }

    /// Check (c0) and (c1). Closure under unions of overlapping pairs is
    /// equivalent to (c1) for finite families: the union of a family with a
    /// common point is reached by adding members one at a time.
    pub fn validate(&self) -> Result<()> {
        let family = self.masks()?;
        if !family.contains(&0) {
            return Err(Error::SpaceAxiomViolation { axiom: SpaceAxiom::C0, witness: vec![] });
        }
        for (i, &a) in family.iter().enumerate() {
            for &b in &family[i + 1..] {
                if a & b != 0 && !family.contains(&(a | b)) {
                    return Err(Error::SpaceAxiomViolation {
                        axiom: SpaceAxiom::C1,
                        witness: vec![from_mask(a), from_mask(b)],
                    });
                }
            }
        }
        Ok(())
    }
}

/// Nonempty members of a validated connectivity space under inclusion.
pub fn chainmail_from_connectivity_space(s: &ConnectivitySpace) -> Result<Chainmail> {
    check_points(s.points)?;
    s.validate()?;
    let family = s.masks()?.into_iter().filter(|&m| m != 0).collect();
    validated(inclusion_poset(family)?)
}

/// The Boolean lattice of subsets of an `n`-element set; element `i` is the
/// subset with bit mask `i`.
pub fn powerset_lattice(n: usize) -> Result<CompleteLattice> {
    if n >= 32 {
        return Err(Error::SizeBudgetExceeded {
            what: "powerset lattice",
            size: usize::MAX,
            cap: Budget::current().max_lattice,
        });
    }
    budget::check("powerset lattice", 1 << n, Budget::current().max_lattice)?;
    let p = Poset::from_leq_unchecked(1 << n, |i, j| i & !j == 0);
    let labels: Vec<String> = (0..1u64 << n).map(format_points).collect();
    Ok(CompleteLattice::from_lattice_poset(p.with_labels(labels)?))
}

/// Down-closed subsets of `p` under inclusion.
pub fn downset_lattice(p: &Poset) -> Result<CompleteLattice> {
    let mut ideals = p.ideals();
    budget::check("down-set lattice", ideals.len(), Budget::current().max_lattice)?;
    ideals.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.to_vec().cmp(&b.to_vec())));
    let q = Poset::from_leq_unchecked(ideals.len(), |i, j| ideals[i].is_subset(&ideals[j]));
    let labels: Vec<String> = ideals.iter().map(|s| p.format_set(s)).collect();
    Ok(CompleteLattice::from_lattice_poset(q.with_labels(labels)?))
}

/// The seven-element chainmail that is not the poset of connected sets of
/// any connectivity space. Labels are `1`..`7`.
pub fn seven_element_chainmail() -> Chainmail {
    let covers = [(1, 2), (1, 3), (2, 5), (3, 5), (3, 6), (4, 5), (4, 6), (5, 7), (6, 7)];
    let pairs: Vec<(usize, usize)> = covers.iter().map(|&(a, b)| (a - 1, b - 1)).collect();
    let p = Poset::from_covers(7, &pairs)
        .and_then(|p| p.with_labels((1..=7).map(|i| i.to_string())))
        .expect("static poset");
    as_chainmail(&p).expect("static chainmail")
}

/// Search for a connectivity space on at most `max_points` points whose
/// connected sets form a chainmail isomorphic to `g`.
///
/// Elements are assigned point sets bottom-up along a linear extension.
/// Each assignment must contain the sets of the elements below, avoid those
/// not below, and equal the union of any overlapping pair whose join it is;
/// overlapping pairs without a join are rejected. Fresh points are always
/// taken in increasing order, which removes the symmetry of relabeling
/// points. The first choice is explored in parallel and the first success in
/// choice order is returned.
pub fn search_connectivity_representation(g: &Chainmail, max_points: usize) -> Result<Option<ConnectivitySpace>> {
    budget::check("representation ground set", max_points, Budget::current().max_search_points.min(63))?;
    let p = g.poset();
    let n = p.size();
    if n == 0 {
        return Ok(Some(ConnectivitySpace { points: 0, connected: vec![vec![]] }));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&x| p.down_set(x).len());
    let search = RepSearch { g, order, max_points };
    let first_choices = search.candidates(&[], 0);
    let found = first_choices.par_iter().find_map_first(|&(s, used)| {
        let mut assigned = vec![0u64];
        assigned[0] = s;
        search.extend(&mut assigned, used)
    });
    Ok(found.map(|phi| {
        let mut sets: Vec<u64> = phi;
        sets.push(0);
        sets.sort_by_key(|&m| (m.count_ones(), from_mask(m)));
        let points = sets.iter().fold(0u64, |a, b| a | b).count_ones() as usize;
        ConnectivitySpace { points, connected: sets.into_iter().map(from_mask).collect() }
    }))
}

struct RepSearch<'a> {
    g: &'a Chainmail,
    order: Vec<usize>,
    max_points: usize,
}

impl RepSearch<'_> {
    /// Admissible sets for `order[k]` given the sets of `order[..k]`, each with
    /// the number of points in use afterwards.
    fn candidates(&self, assigned: &[u64], used: usize) -> Vec<(u64, usize)> {
        let p = self.g.poset();
        let k = assigned.len();
        let x = self.order[k];
        let mut lower = 0u64;
        for (idx, &s) in assigned.iter().enumerate() {
            if p.lt(self.order[idx], x) {
                lower |= s;
            }
        }
        let mut forced: Option<u64> = None;
        for a in 0..k {
            for b in a + 1..k {
                let (sa, sb) = (assigned[a], assigned[b]);
                if sa & sb != 0 && p.join2(self.order[a], self.order[b]) == Some(x) {
                    let u = sa | sb;
                    match forced {
                        Some(f) if f != u => return Vec::new(),
                        _ => forced = Some(u),
                    }
                }
            }
        }
        let old_mask = (1u64 << used) - 1;
        let mut out = Vec::new();
        let fresh_max = self.max_points - used;
        for fresh in 0..=fresh_max {
            let fresh_bits = ((1u64 << fresh) - 1) << used;
            for old in subsets_of(old_mask) {
                let s = old | fresh_bits;
                if s == 0 || s & lower != lower {
                    continue;
                }
                if forced.is_some_and(|f| f != s) {
                    continue;
                }
                if self.admissible(assigned, x, s) {
                    out.push((s, used + fresh));
                }
            }
        }
        out
    }

    fn admissible(&self, assigned: &[u64], x: usize, s: u64) -> bool {
        let p = self.g.poset();
        assigned.iter().enumerate().all(|(idx, &t)| {
            let y = self.order[idx];
            let below = p.lt(y, x);
            if t == s || (!below && t & !s == 0) || s & !t == 0 {
                return false;
            }
            // overlapping sets need a join to carry their union
            s & t == 0 || below || p.join2(x, y).is_some()
        })
    }

    fn extend(&self, assigned: &mut Vec<u64>, used: usize) -> Option<Vec<u64>> {
        if assigned.len() == self.order.len() {
            return self.finish(assigned);
        }
        for (s, u) in self.candidates(assigned, used) {
            assigned.push(s);
            if let Some(r) = self.extend(assigned, u) {
                return Some(r);
            }
            assigned.pop();
        }
        None
    }

    fn finish(&self, assigned: &[u64]) -> Option<Vec<u64>> {
        let mut family = assigned.to_vec();
        family.push(0);
        let points = self.max_points;
        let space = ConnectivitySpace { points, connected: family.iter().map(|&m| from_mask(m)).collect() };
        if space.validate().is_err() {
            return None;
        }
        let fam: Vec<u64> = assigned.to_vec();
        let q = Poset::from_leq_unchecked(fam.len(), |i, j| fam[i] & !fam[j] == 0);
        is_isomorphic(&q, self.g.poset()).then(|| assigned.to_vec())
    }
}

fn subsets_of(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask { None } else { Some(((cur | !mask).wrapping_add(1)) & mask) };
        Some(cur)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_code;

    fn path3() -> Graph {
        Graph { vertices: 3, edges: vec![[0, 1], [1, 2]] }
    }

    fn labels(g: &Chainmail) -> Vec<String> {
        g.poset().names()
    }

    #[test]
    fn graph_examples() {
        let g = chainmail_from_graph(&path3()).unwrap();
        assert_eq!(labels(&g), vec!["{0}", "{1}", "{2}", "{0,1}", "{1,2}", "{0,1,2}"]);
        let k3 = Graph { vertices: 3, edges: vec![[0, 1], [1, 2], [0, 2]] };
        assert_eq!(chainmail_from_graph(&k3).unwrap().size(), 7);
        let e2 = chainmail_from_graph(&Graph { vertices: 2, edges: vec![] }).unwrap();
        assert_eq!(e2.poset(), &Poset::antichain(2));
    }

    #[test]
    fn hypergraph_examples() {
        let h = Hypergraph { vertices: 3, hyperedges: vec![vec![0], vec![1], vec![2], vec![0, 1], vec![1, 2]] };
        let a = chainmail_from_hypergraph(&h).unwrap();
        let b = chainmail_from_graph(&path3()).unwrap();
        assert_eq!(labels(&a), labels(&b));
        assert_eq!(a.poset(), b.poset());
        let h = Hypergraph { vertices: 3, hyperedges: vec![vec![0], vec![1], vec![2], vec![0, 1, 2]] };
        assert_eq!(labels(&chainmail_from_hypergraph(&h).unwrap()), vec!["{0}", "{1}", "{2}", "{0,1,2}"]);
        let h = Hypergraph { vertices: 3, hyperedges: vec![] };
        assert_eq!(chainmail_from_hypergraph(&h).unwrap().size(), 0);
    }

    #[test]
    fn topology_examples() {
        let sierpinski = FiniteTopology { points: 2, opens: vec![vec![], vec![0], vec![0, 1]] };
        let g = chainmail_from_topology(&sierpinski).unwrap();
        assert_eq!(labels(&g), vec!["{0}", "{1}", "{0,1}"]);
        assert!(g.poset().lt(0, 2) && g.poset().lt(1, 2) && !g.poset().comparable(0, 1));
        let discrete = FiniteTopology { points: 2, opens: vec![vec![], vec![0], vec![1], vec![0, 1]] };
        assert_eq!(chainmail_from_topology(&discrete).unwrap().poset(), &Poset::antichain(2));
        let indiscrete = FiniteTopology { points: 2, opens: vec![vec![], vec![0, 1]] };
        assert_eq!(chainmail_from_topology(&indiscrete).unwrap().size(), 3);
        let broken = FiniteTopology { points: 2, opens: vec![vec![], vec![0]] };
        assert!(matches!(chainmail_from_topology(&broken), Err(Error::NotATopology(_))));
    }

    #[test]
    fn connectivity_space_examples() {
        let s = ConnectivitySpace { points: 2, connected: vec![vec![], vec![0], vec![1], vec![0, 1]] };
        assert_eq!(chainmail_from_connectivity_space(&s).unwrap().size(), 3);
        // p = 0, q = 1, r = 2
        let s = ConnectivitySpace { points: 3, connected: vec![vec![], vec![0], vec![2], vec![0, 1], vec![1, 2]] };
        match chainmail_from_connectivity_space(&s) {
            Err(Error::SpaceAxiomViolation { axiom: SpaceAxiom::C1, witness }) => {
                assert_eq!(witness, vec![vec![0, 1], vec![1, 2]]);
            }
            other => panic!("{other:?}"),
        }
        let s = ConnectivitySpace { points: 1, connected: vec![vec![]] };
        assert_eq!(chainmail_from_connectivity_space(&s).unwrap().size(), 0);
        let s = ConnectivitySpace { points: 1, connected: vec![vec![0]] };
        assert!(matches!(
            chainmail_from_connectivity_space(&s),
            Err(Error::SpaceAxiomViolation { axiom: SpaceAxiom::C0, .. })
        ));
    }

    #[test]
    fn lattice_builders() {
        assert_eq!(powerset_lattice(0).unwrap().size(), 1);
        assert_eq!(powerset_lattice(2).unwrap().size(), 4);
        let b3 = powerset_lattice(3).unwrap();
        assert_eq!(b3.size(), 8);
        assert!(b3.is_locally_connected());
        assert_eq!(b3.connected_elements().len(), 3);
        assert!(matches!(powerset_lattice(20), Err(Error::SizeBudgetExceeded { .. })));

        let d = downset_lattice(&Poset::antichain(2)).unwrap();
        assert_eq!(canonical_code(d.poset()), canonical_code(powerset_lattice(2).unwrap().poset()));
        let d = downset_lattice(&Poset::chain(2)).unwrap();
        assert_eq!(d.poset(), &Poset::chain(3));
        let v = Poset::from_covers(3, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(downset_lattice(&v).unwrap().size(), 5);
    }

    #[test]
    fn seven_element_chainmail_facts() {
        let g = seven_element_chainmail();
        let p = g.poset();
        let j = |a: &str, b: &str| p.join_of(&p.set_of(&[a, b]).unwrap()).map(|x| p.name(x));
        assert_eq!(j("2", "3").as_deref(), Some("5"));
        assert_eq!(j("2", "6").as_deref(), Some("7"));
        assert!(!g.is_mail(&p.set_of(&["3", "4"]).unwrap()));
    }

    #[test]
    fn representation_examples() {
        let path = chainmail_from_graph(&path3()).unwrap();
        let found = search_connectivity_representation(&path, 3).unwrap().expect("path is representable");
        let back = chainmail_from_connectivity_space(&found).unwrap();
        assert!(is_isomorphic(back.poset(), path.poset()));

        let anti = as_chainmail(&Poset::antichain(2)).unwrap();
        let found = search_connectivity_representation(&anti, 2).unwrap().unwrap();
        assert_eq!(found.points, 2);

        assert!(search_connectivity_representation(&seven_element_chainmail(), 6).unwrap().is_none());
        assert!(matches!(search_connectivity_representation(&anti, 9), Err(Error::SizeBudgetExceeded { .. })));
    }

    #[test]
    fn subset_iteration() {
        assert_eq!(subsets_of(0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(subsets_of(0b101).collect::<Vec<_>>(), vec![0, 1, 4, 5]);
    }
}
