//! Complete lattices and connectivity inside them: separated and chained
//! sets, the four connectedness conditions, local connectivity and the
//! poset of separated sets of connected elements.

use std::ops::ControlFlow;
use std::sync::OnceLock;

use crate::bitset::ElementSet;
use crate::budget::{self, Budget};
use crate::error::{Error, MissingBound, Result};
use crate::poset::Poset;

/// Join/meet tables are precomputed up to this many elements.
const TABLE_LIMIT: usize = 1024;

/// A finite poset with all pairwise joins and meets.
#[derive(Debug)]
pub struct CompleteLattice {
    poset: Poset,
    bottom: usize,
    top: usize,
    join: Option<Vec<u32>>,
    meet: Option<Vec<u32>>,
    /// `zero_meet[s]`: nonzero `t` with `s ∧ t = 0`.
    zero_meet: Vec<ElementSet>,
    connected: OnceLock<ElementSet>,
}

impl Clone for CompleteLattice {
    fn clone(&self) -> Self {
        CompleteLattice {
            poset: self.poset.clone(),
            bottom: self.bottom,
            top: self.top,
            join: self.join.clone(),
            meet: self.meet.clone(),
            zero_meet: self.zero_meet.clone(),
            connected: self.connected.clone(),
        }
    }
}

/// Check that a poset is a complete lattice.
///
/// A finite poset is complete iff it is nonempty and every pair has a join
/// and a meet. Missing joins are reported before missing meets, and pairs
/// are scanned from the highest indices down, so the witness is a pair
/// as high in the order as the scan can find.
pub fn as_complete_lattice(p: &Poset) -> Result<CompleteLattice> {
    if p.is_empty() {
        return Err(Error::EmptyLattice);
    }
    let n = p.size();
    let pairs = || (0..n).rev().flat_map(move |j| (0..j).rev().map(move |i| (i, j)));
    if let Some(pair) = pairs().find(|&(i, j)| p.join2(i, j).is_none()) {
        return Err(Error::NotALattice { pair, missing: MissingBound::Join });
    }
    if let Some(pair) = pairs().find(|&(i, j)| p.meet2(i, j).is_none()) {
        return Err(Error::NotALattice { pair, missing: MissingBound::Meet });
    }
    Ok(CompleteLattice::from_lattice_poset(p.clone()))
}

impl CompleteLattice {
    /// Wrap a poset already known to be a lattice.
    pub(crate) fn from_lattice_poset(poset: Poset) -> CompleteLattice {
        let n = poset.size();
        let bottom = poset.bottom().expect("lattice has a bottom");
        let top = poset.top().expect("lattice has a top");
        let (join, meet) = if n <= TABLE_LIMIT {
            let mut join = vec![0u32; n * n];
            let mut meet = vec![0u32; n * n];
            for i in 0..n {
                for j in i..n {
                    let jn = poset.join2(i, j).expect("pairwise join") as u32;
                    let mt = poset.meet2(i, j).expect("pairwise meet") as u32;
                    join[i * n + j] = jn;
                    join[j * n + i] = jn;
                    meet[i * n + j] = mt;
                    meet[j * n + i] = mt;
                }
            }
            (Some(join), Some(meet))
        } else {
            (None, None)
        };
        let mut l =
            CompleteLattice { poset, bottom, top, join, meet, zero_meet: Vec::new(), connected: OnceLock::new() };
        l.zero_meet = (0..n).map(|s| (0..n).filter(|&t| t != l.bottom && l.meet(s, t) == l.bottom).collect()).collect();
        l
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn size(&self) -> usize {
        self.poset.size()
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.poset.leq(a, b)
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        match &self.join {
            Some(t) => t[a * self.size() + b] as usize,
            None => self.poset.join2(a, b).expect("lattice join"),
        }
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        match &self.meet {
            Some(t) => t[a * self.size() + b] as usize,
            None => self.poset.meet2(a, b).expect("lattice meet"),
        }
    }

    /// Join of a set; the bottom for the empty set.
    pub fn join_set(&self, s: &ElementSet) -> usize {
        s.iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    /// Meet of a set; the top for the empty set.
    pub fn meet_set(&self, s: &ElementSet) -> usize {
        s.iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    pub fn name(&self, i: usize) -> String {
        self.poset.name(i)
    }

    pub fn is_separated(&self, s: &ElementSet) -> bool {
        if s.contains(self.bottom) {
            return false;
        }
        s.iter().all(|x| s.above(x).is_subset(&self.zero_meet[x]))
    }

    /// Nonempty, and connected under the relation "meet is nonzero".
    pub fn is_chained(&self, c: &ElementSet) -> bool {
        let Some(start) = c.first() else { return false };
        let mut seen = ElementSet::singleton(start);
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for y in c {
                if !seen.contains(y) && self.meet(x, y) != self.bottom {
                    seen.insert(y);
                    stack.push(y);
                }
            }
        }
        seen.len() == c.len()
    }

    /// Visit every separated set drawn from `candidates`, with its join.
    ///
    /// Sets are built by adding members in increasing index order, keeping
    /// only candidates that meet every chosen member in the bottom.
    pub fn for_each_separated_set<F>(&self, candidates: &ElementSet, mut f: F)
    where
        F: FnMut(&ElementSet, usize) -> ControlFlow<()>,
    {
        let mut cands = candidates.clone();
        cands.remove(self.bottom);
        let mut chosen = ElementSet::new();
        let _ = self.separated_rec(&cands, &mut chosen, self.bottom, &mut f);
    }

    fn separated_rec<F>(&self, cands: &ElementSet, chosen: &mut ElementSet, join: usize, f: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&ElementSet, usize) -> ControlFlow<()>,
    {
        f(chosen, join)?;
        for s in cands {
            let mut next = cands.above(s);
            next.intersect_with(&self.zero_meet[s]);
            chosen.insert(s);
            let r = self.separated_rec(&next, chosen, self.join(join, s), f);
            chosen.remove(s);
            r?;
        }
        ControlFlow::Continue(())
    }

    /// Number of separated sets (the empty one included).
    pub fn count_separated_sets(&self) -> usize {
        let mut n = 0;
        self.for_each_separated_set(&self.poset.all(), |_, _| {
            n += 1;
            ControlFlow::Continue(())
        });
        n
    }

    /// Literal evaluation of one of the connectedness conditions at `a`.
    pub fn check_condition(&self, a: usize, which: Condition) -> bool {
        let zero = self.bottom;
        let n = self.size();
        match which {
            Condition::E1 => {
                a != zero
                    && (0..n).all(|x| {
                        (0..n).all(|y| {
                            !(self.leq(a, self.join(x, y)) && self.meet(x, y) == zero)
                                || self.leq(a, x)
                                || self.leq(a, y)
                        })
                    })
            }
            Condition::E2 => {
                a != zero
                    && (0..n).all(|x| {
                        (0..n).all(|y| !(self.meet(x, y) == zero && self.join(x, y) == a) || x == zero || y == zero)
                    })
            }
            Condition::E3 => {
                // members of a separated set joining to `a` all lie below `a`
                let mut ok = true;
                self.for_each_separated_set(self.poset.down_set(a), |s, j| {
                    if j == a && !s.contains(a) {
                        ok = false;
                        return ControlFlow::Break(());
                    }
                    ControlFlow::Continue(())
                });
                ok
            }
            Condition::E4 => {
                // a separated set with a member above `a` satisfies the condition trivially
                let cands = self.poset.all().difference(self.poset.up_set(a));
                let mut ok = true;
                self.for_each_separated_set(&cands, |_, j| {
                    if self.leq(a, j) {
                        ok = false;
                        return ControlFlow::Break(());
                    }
                    ControlFlow::Continue(())
                });
                ok
            }
        }
    }

    /// All connected elements, computed in one pass over the separated sets:
    /// an element below `⋁S` but below no member of `S` is not connected.
    pub fn connected_elements(&self) -> &ElementSet {
        self.connected.get_or_init(|| {
            let mut bad = ElementSet::new();
            let mut under: Vec<ElementSet> = vec![ElementSet::new()];
            let mut cands = self.poset.all();
            cands.remove(self.bottom);
            self.connected_rec(&cands, &mut under, self.bottom, &mut bad);
            self.poset.all().difference(&bad)
        })
    }

    fn connected_rec(&self, cands: &ElementSet, under: &mut Vec<ElementSet>, join: usize, bad: &mut ElementSet) {
        let covered = under.last().expect("stack is never empty");
        bad.union_with(&self.poset.down_set(join).difference(covered));
        for s in cands {
            let mut next = cands.above(s);
            next.intersect_with(&self.zero_meet[s]);
            let mut cov = under.last().expect("stack is never empty").clone();
            cov.union_with(self.poset.down_set(s));
            under.push(cov);
            self.connected_rec(&next, under, self.join(join, s), bad);
            under.pop();
        }
    }

    pub fn is_connected(&self, a: usize) -> bool {
        self.connected_elements().contains(a)
    }

    /// Connected elements below `x`.
    pub fn connected_below(&self, x: usize) -> ElementSet {
        self.connected_elements().intersection(self.poset.down_set(x))
    }

    /// Partition `c` into maximal chained subsets.
    pub fn chained_components(&self, c: &ElementSet) -> Vec<ElementSet> {
        let mut rest = c.clone();
        let mut out = Vec::new();
        while let Some(start) = rest.first() {
            let mut comp = ElementSet::singleton(start);
            let mut stack = vec![start];
            rest.remove(start);
            while let Some(x) = stack.pop() {
                let linked: Vec<usize> = rest.iter().filter(|&y| self.meet(x, y) != self.bottom).collect();
                for y in linked {
                    rest.remove(y);
                    comp.insert(y);
                    stack.push(y);
                }
            }
            out.push(comp);
        }
        out
    }

    /// Joins of the maximal chained components of the connected elements below `x`.
    pub fn star(&self, x: usize) -> Result<SeparatedSet> {
        let conn = self.connected_elements();
        let missing =
            self.poset.down_set(x).iter().find(|&y| y != self.bottom && !conn.intersects(self.poset.down_set(y)));
        if missing.is_some() {
            return Err(Error::NotLocallyConnectedBelow(x));
        }
        let below = self.connected_below(x);
        let joins: ElementSet = self.chained_components(&below).iter().map(|c| self.join_set(c)).collect();
        if self.join_set(&joins) != x {
            return Err(Error::NotLocallyConnectedBelow(x));
        }
        if !self.is_separated(&joins) {
            return Err(Error::TheoremViolation(format!("star of {} is not separated", self.name(x))));
        }
        Ok(SeparatedSet { members: joins })
    }

    pub fn is_locally_connected(&self) -> bool {
        (0..self.size()).all(|x| self.join_set(&self.connected_below(x)) == x)
    }

    pub fn has_connective_foundation(&self) -> bool {
        let conn = self.connected_elements();
        (0..self.size()).all(|y| y == self.bottom || conn.intersects(self.poset.down_set(y)))
    }

    /// Separated sets of connected elements, ordered by "every member of the
    /// first lies below some member of the second", with the join map.
    pub fn separation_poset(&self) -> Result<SeparationPoset> {
        let cap = Budget::current().max_lattice;
        let mut sets = Vec::new();
        let mut nu = Vec::new();
        let mut over = false;
        self.for_each_separated_set(self.connected_elements(), |s, j| {
            if sets.len() >= cap {
                over = true;
                return ControlFlow::Break(());
            }
            sets.push(s.clone());
            nu.push(j);
            ControlFlow::Continue(())
        });
        if over {
            return Err(Error::SizeBudgetExceeded { what: "separation poset", size: cap + 1, cap });
        }
        budget::check("separation poset", sets.len(), cap)?;
        let p = &self.poset;
        let below = |a: &ElementSet, b: &ElementSet| a.iter().all(|x| b.iter().any(|y| p.leq(x, y)));
        let poset = Poset::from_leq(sets.len(), |i, j| below(&sets[i], &sets[j]))?;
        let labels: Vec<String> = sets.iter().map(|s| p.format_set(s)).collect();
        let poset = poset.with_labels(labels)?;
        Ok(SeparationPoset { poset, sets, nu })
    }

    /// Classify the join map on separated sets of connected elements and check
    /// that iso, surjective and locally connected agree.
    pub fn nu_classification(&self) -> Result<NuClass> {
        let sp = self.separation_poset()?;
        let class = sp.classify(self);
        let lc = self.is_locally_connected();
        let iso = class == NuClass::Iso;
        let surj = class != NuClass::NotSurjective;
        if iso != surj || surj != lc {
            return Err(Error::TheoremViolation(format!("nu is {class:?} but locally connected = {lc}")));
        }
        Ok(class)
    }
}

/// Conditions E1..E4 on a lattice element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// Below a disjoint binary join only via one of the two parts.
    E1,
    /// Not a disjoint binary join of two nonzero elements.
    E2,
    /// Equal to the join of a separated set only as a member.
    E3,
    /// Below the join of a separated set only via one member.
    E4,
}

impl Condition {
    pub const ALL: [Condition; 4] = [Condition::E1, Condition::E2, Condition::E3, Condition::E4];
}

/// A separated subset of a lattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeparatedSet {
    members: ElementSet,
}

impl SeparatedSet {
    pub fn new(l: &CompleteLattice, members: ElementSet) -> Option<SeparatedSet> {
        l.is_separated(&members).then_some(SeparatedSet { members })
    }

    pub fn members(&self) -> &ElementSet {
        &self.members
    }

    pub fn into_members(self) -> ElementSet {
        self.members
    }
}

/// How the join map from separated sets of connected elements behaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NuClass {
    Iso,
    SurjectiveNotIso,
    NotSurjective,
}

#[derive(Debug, Clone)]
pub struct SeparationPoset {
    pub poset: Poset,
    pub sets: Vec<ElementSet>,
    /// Join of each separated set, as a lattice element.
    pub nu: Vec<usize>,
}

impl SeparationPoset {
    pub fn classify(&self, l: &CompleteLattice) -> NuClass {
        let image: ElementSet = self.nu.iter().copied().collect();
        if image.len() != l.size() {
            return NuClass::NotSurjective;
        }
        let injective = image.len() == self.nu.len();
        let n = self.sets.len();
        let reflects = (0..n).all(|i| (0..n).all(|j| !l.leq(self.nu[i], self.nu[j]) || self.poset.leq(i, j)));
        if injective && reflects {
            NuClass::Iso
        } else {
            NuClass::SurjectiveNotIso
        }
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::sources::{downset_lattice, powerset_lattice, seven_element_chainmail};

    /// bottom 0, atoms 1 2 3, top 4
    pub(crate) fn m3() -> CompleteLattice {
        let p = Poset::from_covers(5, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)]).unwrap();
        as_complete_lattice(&p).unwrap()
    }

    fn chain3() -> CompleteLattice {
        as_complete_lattice(&Poset::chain(3)).unwrap()
    }

    fn set(xs: &[usize]) -> ElementSet {
        xs.iter().copied().collect()
    }

    #[test]
    fn validation_examples() {
        let b = powerset_lattice(2).unwrap();
        assert_eq!(b.bottom(), 0);
        assert_eq!(b.size(), 4);
        let seven = seven_element_chainmail();
        match as_complete_lattice(seven.poset()) {
            Err(Error::NotALattice { pair, missing }) => {
                assert_eq!(missing, MissingBound::Join);
                assert_eq!((seven.poset().name(pair.0), seven.poset().name(pair.1)), ("3".into(), "4".into()));
            }
            other => panic!("expected NotALattice, got {other:?}"),
        }
        let m = m3();
        assert_eq!(m.join(1, 2), 4);
        assert_eq!(m.meet(1, 3), 0);
        assert!(matches!(as_complete_lattice(&Poset::empty()), Err(Error::EmptyLattice)));
    }

    #[test]
    fn separated_examples() {
        let b = powerset_lattice(2).unwrap();
        assert!(b.is_separated(&set(&[1, 2])));
        assert!(!b.is_separated(&set(&[1, 3])));
        assert!(b.is_separated(&ElementSet::new()));
        assert!(!b.is_separated(&set(&[0])));
    }

    #[test]
    fn condition_examples() {
        let m = m3();
        assert!(!m.check_condition(1, Condition::E1));
        assert!(m.check_condition(1, Condition::E2));
        assert!(m.check_condition(1, Condition::E3));
        assert!(!m.check_condition(1, Condition::E4));
        let b = powerset_lattice(2).unwrap();
        assert!(!b.check_condition(3, Condition::E2));
        assert!(b.check_condition(1, Condition::E4));
        for c in Condition::ALL {
            assert!(!b.check_condition(b.bottom(), c), "{c:?} at bottom");
        }
    }

    #[test]
    fn connected_element_examples() {
        let b = powerset_lattice(3).unwrap();
        assert_eq!(b.connected_elements(), &set(&[1, 2, 4]));
        assert!(m3().connected_elements().is_empty());
        assert_eq!(chain3().connected_elements(), &set(&[1, 2]));
    }

    #[test]
    fn connected_pass_agrees_with_literal_e4() {
        for l in [m3(), chain3(), powerset_lattice(3).unwrap()] {
            for a in 0..l.size() {
                assert_eq!(l.is_connected(a), l.check_condition(a, Condition::E4));
            }
        }
    }

    #[test]
    fn chained_examples() {
        let b = powerset_lattice(3).unwrap();
        // {p,q} = 3, {q,r} = 6, {p} = 1, {r} = 4
        assert!(b.is_chained(&set(&[3, 6])));
        assert!(!b.is_chained(&set(&[1, 4])));
        for x in 1..8 {
            assert!(b.is_chained(&set(&[x])));
        }
        assert!(!b.is_chained(&ElementSet::new()));
    }

    #[test]
    fn star_examples() {
        let b = powerset_lattice(3).unwrap();
        assert_eq!(b.star(7).unwrap().members(), &set(&[1, 2, 4]));
        assert_eq!(b.star(3).unwrap().members(), &set(&[1, 2]));
        assert!(b.star(0).unwrap().members().is_empty());
        assert!(matches!(m3().star(4), Err(Error::NotLocallyConnectedBelow(4))));
    }

    #[test]
    fn local_connectivity_examples() {
        for n in 0..4 {
            let b = powerset_lattice(n).unwrap();
            assert!(b.is_locally_connected());
            assert!(b.has_connective_foundation());
        }
        assert!(!m3().is_locally_connected());
        assert!(!m3().has_connective_foundation());
        assert!(chain3().is_locally_connected());
        let one = powerset_lattice(0).unwrap();
        assert!(one.has_connective_foundation());
    }

    #[test]
    fn separation_poset_examples() {
        let b = powerset_lattice(2).unwrap();
        let sp = b.separation_poset().unwrap();
        assert_eq!(sp.sets.len(), 4);
        assert_eq!(sp.classify(&b), NuClass::Iso);
        let m = m3();
        let sp = m.separation_poset().unwrap();
        assert_eq!(sp.sets, vec![ElementSet::new()]);
        assert_eq!(sp.classify(&m), NuClass::NotSurjective);
        let one = powerset_lattice(0).unwrap();
        assert_eq!(one.nu_classification().unwrap(), NuClass::Iso);
    }

    #[test]
    fn nu_examples() {
        assert_eq!(powerset_lattice(3).unwrap().nu_classification().unwrap(), NuClass::Iso);
        assert_eq!(m3().nu_classification().unwrap(), NuClass::NotSurjective);
        assert_eq!(chain3().nu_classification().unwrap(), NuClass::Iso);
    }

    #[test]
    fn downset_lattice_of_v_is_consistent() {
        let v = Poset::from_covers(3, &[(0, 1), (0, 2)]).unwrap();
        let l = downset_lattice(&v).unwrap();
        assert_eq!(l.size(), 5);
        l.nu_classification().unwrap();
    }
}
