//! Finite posets over the indices `0..size`.

use crate::bitset::ElementSet;
use crate::budget::{self, Budget};
use crate::error::{Axiom, Error, Result};

/// How the pair list handed to [`validate_poset`] is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationMode {
    /// The pairs are the complete order relation, reflexive pairs included.
    FullRelation,
    /// The pairs are strict relations whose reflexive-transitive closure is the order.
    Covers,
}

/// A validated finite partial order.
///
/// Both the down-set and up-set of every element are stored, so `x <= y`
/// is a single bit lookup. Labels are presentation only.
#[derive(Clone, Debug)]
pub struct Poset {
    down: Vec<ElementSet>,
    up: Vec<ElementSet>,
    labels: Option<Vec<String>>,
}

impl PartialEq for Poset {
    /// Structural equality of the order; labels are ignored.
    fn eq(&self, other: &Self) -> bool {
        self.down == other.down
    }
}

impl Eq for Poset {}

/// Build and check a poset from a list of order pairs.
pub fn validate_poset(size: usize, pairs: &[(usize, usize)], mode: RelationMode) -> Result<Poset> {
    budget::check("poset", size, Budget::current().max_poset)?;
    match mode {
        RelationMode::Covers => Poset::from_covers(size, pairs),
        RelationMode::FullRelation => Poset::from_relation(size, pairs),
    }
}

impl Poset {
    /// The empty poset.
    pub fn empty() -> Poset {
        Poset { down: Vec::new(), up: Vec::new(), labels: None }
    }

    pub fn chain(n: usize) -> Poset {
        Poset::from_leq_unchecked(n, |i, j| i <= j)
    }

    pub fn antichain(n: usize) -> Poset {
        Poset::from_leq_unchecked(n, |i, j| i == j)
    }

    /// Reflexive-transitive closure of strict pairs `a < b`.
    pub fn from_covers(size: usize, pairs: &[(usize, usize)]) -> Result<Poset> {
        let mut succ = vec![Vec::new(); size];
        let mut indegree = vec![0usize; size];
        for &(a, b) in pairs {
            range_check(a, size)?;
            range_check(b, size)?;
            if a == b {
                return Err(Error::CycleDetected(a));
            }
            succ[a].push(b);
            indegree[b] += 1;
        }
        let mut order = Vec::with_capacity(size);
        let mut ready: Vec<usize> = (0..size).filter(|&v| indegree[v] == 0).collect();
        while let Some(v) = ready.pop() {
            order.push(v);
            for &w in &succ[v] {
                indegree[w] -= 1;
                if indegree[w] == 0 {
                    ready.push(w);
                }
            }
        }
        if order.len() < size {
            let stuck = (0..size).find(|&v| indegree[v] > 0).unwrap_or(0);
            return Err(Error::CycleDetected(stuck));
        }
        let mut down: Vec<ElementSet> = (0..size).map(ElementSet::singleton).collect();
        for &v in &order {
            let dv = down[v].clone();
            for &w in &succ[v] {
                down[w].union_with(&dv);
            }
        }
        Ok(Poset::from_down_sets(down))
    }

    /// Check a complete relation against the three poset axioms.
    pub fn from_relation(size: usize, pairs: &[(usize, usize)]) -> Result<Poset> {
        let mut down = vec![ElementSet::new(); size];
        for &(a, b) in pairs {
            range_check(a, size)?;
            range_check(b, size)?;
            down[b].insert(a);
        }
        Poset::check_axioms(size, |i, j| down[j].contains(i))?;
        Ok(Poset::from_down_sets(down))
    }

    /// Build from an order predicate, checking the axioms.
    pub fn from_leq(size: usize, leq: impl Fn(usize, usize) -> bool) -> Result<Poset> {
        Poset::check_axioms(size, &leq)?;
        Ok(Poset::from_leq_unchecked(size, leq))
    }

    /// Build from an order predicate the caller guarantees is a partial order.
    pub(crate) fn from_leq_unchecked(size: usize, leq: impl Fn(usize, usize) -> bool) -> Poset {
        let down = (0..size).map(|j| (0..size).filter(|&i| leq(i, j)).collect()).collect();
        Poset::from_down_sets(down)
    }

    pub(crate) fn from_down_sets(down: Vec<ElementSet>) -> Poset {
        let n = down.len();
        let mut up = vec![ElementSet::new(); n];
        for (j, d) in down.iter().enumerate() {
            for i in d {
                up[i].insert(j);
            }
        }
        Poset { down, up, labels: None }
    }

    fn check_axioms(size: usize, leq: impl Fn(usize, usize) -> bool) -> Result<()> {
        if let Some(i) = (0..size).find(|&i| !leq(i, i)) {
            return Err(Error::AxiomViolation { axiom: Axiom::Reflexivity, witness: (i, i) });
        }
        for i in 0..size {
            for j in i + 1..size {
                if leq(i, j) && leq(j, i) {
                    return Err(Error::AxiomViolation { axiom: Axiom::Antisymmetry, witness: (i, j) });
                }
            }
        }
        for i in 0..size {
            for j in 0..size {
                if i == j || !leq(i, j) {
                    continue;
                }
                for k in 0..size {
                    if leq(j, k) && !leq(i, k) {
                        return Err(Error::AxiomViolation { axiom: Axiom::Transitivity, witness: (i, k) });
                    }
                }
            }
        }
        Ok(())
    }

    /// Attach display names; they must be pairwise distinct.
    pub fn with_labels<S: Into<String>>(mut self, labels: impl IntoIterator<Item = S>) -> Result<Poset> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != self.size() {
            return Err(Error::Malformed(format!("{} labels for {} elements", labels.len(), self.size())));
        }
        let mut seen = std::collections::HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn without_labels(mut self) -> Poset {
        self.labels = None;
        self
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.down.len()
    }

    pub fn is_empty(&self) -> bool {
        self.down.is_empty()
    }

    #[inline]
    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.down[j].contains(i)
    }

    #[inline]
    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.leq(i, j)
    }

    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.leq(i, j) || self.leq(j, i)
    }

    /// `{ y : y <= x }`.
    #[inline]
    pub fn down_set(&self, x: usize) -> &ElementSet {
        &self.down[x]
    }

    /// `{ y : x <= y }`.
    #[inline]
    pub fn up_set(&self, x: usize) -> &ElementSet {
        &self.up[x]
    }

    pub fn all(&self) -> ElementSet {
        ElementSet::full(self.size())
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Display name of an element: its label, or its index.
    pub fn name(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.size()).map(|i| self.name(i)).collect()
    }

    /// Index of the element with the given display name.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        match &self.labels {
            Some(l) => l.iter().position(|x| x == name),
            None => name.parse().ok().filter(|&i| i < self.size()),
        }
    }

    /// Element set from display names.
    pub fn set_of(&self, names: &[&str]) -> Result<ElementSet> {
        names.iter().map(|n| self.index_of(n).ok_or_else(|| Error::UnknownElement(n.to_string()))).collect()
    }

    /// Render a set as `{a,b,...}` using display names.
    pub fn format_set(&self, s: &ElementSet) -> String {
        let names: Vec<String> = s.iter().map(|i| self.name(i)).collect();
        format!("{{{}}}", names.join(","))
    }

    pub(crate) fn check_members(&self, s: &ElementSet) -> Result<()> {
        match s.last() {
            Some(i) if i >= self.size() => Err(Error::IndexOutOfRange { index: i, size: self.size() }),
            _ => Ok(()),
        }
    }

    /// The covering pairs (transitive reduction), sorted lexicographically.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for j in 0..self.size() {
            let mut strict = self.down[j].clone();
            strict.remove(j);
            for i in &strict {
                let mut between = self.up[i].intersection(&strict);
                between.remove(i);
                if between.is_empty() {
                    out.push((i, j));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Elements directly below `x`.
    pub fn lower_covers(&self, x: usize) -> ElementSet {
        let mut strict = self.down[x].clone();
        strict.remove(x);
        let mut out = strict.clone();
        for i in &strict {
            let mut above = self.up[i].intersection(&strict);
            above.remove(i);
            if !above.is_empty() {
                out.remove(i);
            }
        }
        out
    }

    /// Intersection of the down-sets of all members.
    pub fn lower_bounds(&self, s: &ElementSet) -> Result<ElementSet> {
        self.check_members(s)?;
        let mut it = s.iter();
        let first = it.next().ok_or(Error::EmptyInput)?;
        let mut acc = self.down[first].clone();
        for x in it {
            acc.intersect_with(&self.down[x]);
        }
        Ok(acc)
    }

    /// Intersection of the up-sets of all members; every element for the empty set.
    pub fn upper_bounds(&self, s: &ElementSet) -> ElementSet {
        let mut acc = self.all();
        for x in s {
            acc.intersect_with(&self.up[x]);
        }
        acc
    }

    /// Whether the members share a lower bound.
    pub fn has_common_lower_bound(&self, s: &ElementSet) -> bool {
        let mut it = s.iter();
        let Some(first) = it.next() else { return false };
        let mut acc = self.down[first].clone();
        for x in it {
            acc.intersect_with(&self.down[x]);
            if acc.is_empty() {
                return false;
            }
        }
        true
    }

    /// Least element of `s`, if any.
    pub fn least_of(&self, s: &ElementSet) -> Option<usize> {
        let cand = s.iter().min_by_key(|&x| self.down[x].len())?;
        s.is_subset(&self.up[cand]).then_some(cand)
    }

    /// Greatest element of `s`, if any.
    pub fn greatest_of(&self, s: &ElementSet) -> Option<usize> {
        let cand = s.iter().min_by_key(|&x| self.up[x].len())?;
        s.is_subset(&self.down[cand]).then_some(cand)
    }

    /// Least upper bound of `s`; for the empty set this is the bottom element.
    pub fn join_of(&self, s: &ElementSet) -> Option<usize> {
        if self.check_members(s).is_err() {
            return None;
        }
        self.least_of(&self.upper_bounds(s))
    }

    /// Greatest lower bound of `s`; for the empty set this is the top element.
    pub fn meet_of(&self, s: &ElementSet) -> Option<usize> {
        if self.check_members(s).is_err() {
            return None;
        }
        let lower = if s.is_empty() { self.all() } else { self.lower_bounds(s).ok()? };
        self.greatest_of(&lower)
    }

    pub fn join2(&self, a: usize, b: usize) -> Option<usize> {
        self.least_of(&self.up[a].intersection(&self.up[b]))
    }

    pub fn meet2(&self, a: usize, b: usize) -> Option<usize> {
        self.greatest_of(&self.down[a].intersection(&self.down[b]))
    }

    pub fn bottom(&self) -> Option<usize> {
        self.least_of(&self.all())
    }

    pub fn top(&self) -> Option<usize> {
        self.greatest_of(&self.all())
    }

    pub fn maximal_elements(&self) -> ElementSet {
        (0..self.size()).filter(|&i| self.up[i].len() == 1).collect()
    }

    pub fn minimal_elements(&self) -> ElementSet {
        (0..self.size()).filter(|&i| self.down[i].len() == 1).collect()
    }

    /// Down-closure of a set.
    pub fn down_closure(&self, s: &ElementSet) -> ElementSet {
        let mut acc = ElementSet::new();
        for x in s {
            acc.union_with(&self.down[x]);
        }
        acc
    }

    pub fn is_down_closed(&self, s: &ElementSet) -> bool {
        s.iter().all(|x| self.down[x].is_subset(s))
    }

    pub fn is_antichain(&self, s: &ElementSet) -> bool {
        s.iter().all(|x| self.down[x].intersection(s).len() == 1)
    }

    /// Maximal members of `s`.
    pub fn maximal_in(&self, s: &ElementSet) -> ElementSet {
        s.iter().filter(|&x| self.up[x].intersection_len(s) == 1).collect()
    }

    /// Length of the longest chain ending at each element (minimal elements have height 0).
    pub fn heights(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.size()).collect();
        order.sort_by_key(|&i| self.down[i].len());
        let mut h = vec![0; self.size()];
        for &x in &order {
            h[x] = self.lower_covers(x).iter().map(|y| h[y] + 1).max().unwrap_or(0);
        }
        h
    }

    /// Induced subposet on `s`; returns it with the map from new to old indices.
    pub fn induced(&self, s: &ElementSet) -> (Poset, Vec<usize>) {
        let old: Vec<usize> = s.to_vec();
        let mut sub = Poset::from_leq_unchecked(old.len(), |i, j| self.leq(old[i], old[j]));
        if let Some(l) = &self.labels {
            sub.labels = Some(old.iter().map(|&i| l[i].clone()).collect());
        }
        (sub, old)
    }

    /// Apply a permutation: element `i` becomes `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Poset {
        let n = self.size();
        let mut inv = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let mut q = Poset::from_leq_unchecked(n, |a, b| self.leq(inv[a], inv[b]));
        if let Some(l) = &self.labels {
            q.labels = Some((0..n).map(|a| l[inv[a]].clone()).collect());
        }
        q
    }

    /// A new poset with one extra maximal element whose strict down-set is `ideal`.
    pub(crate) fn extend_with_maximal(&self, ideal: &ElementSet) -> Poset {
        let n = self.size();
        let mut down = self.down.clone();
        let mut up = self.up.clone();
        let mut new_down = ideal.clone();
        new_down.insert(n);
        for i in ideal {
            up[i].insert(n);
        }
        down.push(new_down);
        up.push(ElementSet::singleton(n));
        Poset { down, up, labels: None }
    }

    /// Every down-closed subset, each exactly once.
    pub fn ideals(&self) -> Vec<ElementSet> {
        let mut out = Vec::new();
        let mut chosen = ElementSet::new();
        self.antichains_from(&self.all(), &mut chosen, &mut |a| out.push(self.down_closure(a)));
        out
    }

    /// Every antichain, each exactly once, built in increasing index order.
    pub fn antichains(&self) -> Vec<ElementSet> {
        let mut out = Vec::new();
        let mut chosen = ElementSet::new();
        self.antichains_from(&self.all(), &mut chosen, &mut |a| out.push(a.clone()));
        out
    }

    fn antichains_from(&self, cands: &ElementSet, chosen: &mut ElementSet, f: &mut impl FnMut(&ElementSet)) {
        f(chosen);
        for x in cands {
            let mut next = cands.above(x);
            next.difference_with(&self.down[x]);
            next.difference_with(&self.up[x]);
            chosen.insert(x);
            self.antichains_from(&next, chosen, f);
            chosen.remove(x);
        }
    }
}

fn range_check(i: usize, size: usize) -> Result<()> {
    if i >= size {
        Err(Error::IndexOutOfRange { index: i, size })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::seven_element_chainmail;

    fn seven() -> Poset {
        seven_element_chainmail().poset().clone()
    }

    fn set(p: &Poset, names: &[&str]) -> ElementSet {
        p.set_of(names).unwrap()
    }

    #[test]
    fn singleton_poset() {
        let p = validate_poset(1, &[], RelationMode::Covers).unwrap();
        assert_eq!(p.size(), 1);
        assert!(p.leq(0, 0));
    }

    #[test]
    fn antisymmetry_violation() {
        let err = validate_poset(2, &[(0, 0), (1, 1), (0, 1), (1, 0)], RelationMode::FullRelation).unwrap_err();
        assert!(matches!(err, Error::AxiomViolation { axiom: Axiom::Antisymmetry, witness: (0, 1) }));
    }

    #[test]
    fn reflexivity_and_transitivity_violations() {
        let err = validate_poset(2, &[(0, 0)], RelationMode::FullRelation).unwrap_err();
        assert!(matches!(err, Error::AxiomViolation { axiom: Axiom::Reflexivity, witness: (1, 1) }));
        let rel = [(0, 0), (1, 1), (2, 2), (0, 1), (1, 2)];
        let err = validate_poset(3, &rel, RelationMode::FullRelation).unwrap_err();
        assert!(matches!(err, Error::AxiomViolation { axiom: Axiom::Transitivity, witness: (0, 2) }));
    }

    #[test]
    fn cycles_and_ranges() {
        assert!(matches!(
            validate_poset(3, &[(0, 1), (1, 2), (2, 0)], RelationMode::Covers),
            Err(Error::CycleDetected(_))
        ));
        assert!(matches!(validate_poset(2, &[(1, 1)], RelationMode::Covers), Err(Error::CycleDetected(1))));
        assert!(matches!(
            validate_poset(2, &[(0, 5)], RelationMode::Covers),
            Err(Error::IndexOutOfRange { index: 5, size: 2 })
        ));
    }

    #[test]
    fn poset_budget() {
        assert!(matches!(validate_poset(25, &[], RelationMode::Covers), Err(Error::SizeBudgetExceeded { .. })));
    }

    #[test]
    fn seven_element_covers() {
        let p = seven();
        let named: Vec<(String, String)> = p.covers().iter().map(|&(a, b)| (p.name(a), p.name(b))).collect();
        let expected = [
            ("1", "2"),
            ("1", "3"),
            ("2", "5"),
            ("3", "5"),
            ("3", "6"),
            ("4", "5"),
            ("4", "6"),
            ("5", "7"),
            ("6", "7"),
        ];
        assert_eq!(named.len(), 9);
        for (a, b) in expected {
            assert!(named.contains(&(a.to_string(), b.to_string())), "{a}<{b}");
        }
    }

    #[test]
    fn chain_and_antichain_covers() {
        assert_eq!(Poset::chain(3).covers(), vec![(0, 1), (1, 2)]);
        assert!(Poset::antichain(3).covers().is_empty());
    }

    #[test]
    fn lower_bounds_examples() {
        let p = seven();
        assert_eq!(p.lower_bounds(&set(&p, &["2", "6"])).unwrap(), set(&p, &["1"]));
        assert!(p.lower_bounds(&set(&p, &["3", "4"])).unwrap().is_empty());
        for x in 0..p.size() {
            assert_eq!(&p.lower_bounds(&ElementSet::singleton(x)).unwrap(), p.down_set(x));
        }
        assert!(matches!(p.lower_bounds(&ElementSet::new()), Err(Error::EmptyInput)));
    }

    #[test]
    fn joins_and_meets() {
        let p = seven();
        let name = |x: Option<usize>| x.map(|i| p.name(i));
        assert_eq!(name(p.join_of(&set(&p, &["2", "3"]))), Some("5".into()));
        assert_eq!(name(p.join_of(&set(&p, &["5", "6"]))), Some("7".into()));
        assert_eq!(p.join_of(&set(&p, &["3", "4"])), None);
        assert_eq!(name(p.meet_of(&set(&p, &["2", "6"]))), Some("1".into()));
        let c = Poset::chain(3);
        assert_eq!(c.meet_of(&[1, 2].into_iter().collect()), Some(1));
        assert_eq!(c.join_of(&ElementSet::new()), Some(0));
        // powerset of {p,q}: 0 = {}, 1 = {p}, 2 = {q}, 3 = {p,q}
        let b = Poset::from_leq_unchecked(4, |i, j| i & !j == 0);
        assert_eq!(b.meet_of(&[1, 2].into_iter().collect()), Some(0));
    }

    #[test]
    fn join_is_least_upper_bound_by_scan() {
        let p = seven();
        for mask in 0u64..(1 << p.size()) {
            let s = ElementSet::from_mask(mask);
            let ub: Vec<usize> = (0..p.size()).filter(|&z| s.iter().all(|x| p.leq(x, z))).collect();
            let least = ub.iter().copied().find(|&z| ub.iter().all(|&u| p.leq(z, u)));
            assert_eq!(p.join_of(&s), least);
        }
    }

    #[test]
    fn ideals_of_v() {
        // x < a, x < b
        let v = Poset::from_covers(3, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(v.ideals().len(), 5);
        assert_eq!(Poset::chain(4).ideals().len(), 5);
        assert_eq!(Poset::antichain(4).ideals().len(), 16);
    }

    #[test]
    fn duplicate_labels_rejected() {
        assert!(matches!(Poset::chain(2).with_labels(["a", "a"]), Err(Error::DuplicateLabel(_))));
    }
}
