//! Chainmails: posets in which every mail (nonempty set with a common lower
//! bound) has a join.

use std::collections::HashMap;

use crate::bitset::ElementSet;
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::lattice::{as_complete_lattice, CompleteLattice};
use crate::poset::Poset;

const TABLE_LIMIT: usize = 1024;
const NONE: u32 = u32::MAX;

/// A validated chainmail.
#[derive(Debug, Clone)]
pub struct Chainmail {
    poset: Poset,
    /// Join of each 2-element mail, `NONE` where the pair has no common lower bound.
    mail_join: Option<Vec<u32>>,
}

/// Check that every mail has a join.
///
/// In a finite poset it is enough to look at 2-element mails: the join of a
/// larger mail with lower bound `q` is a fold of pairwise joins, each of
/// which is again above `q`.
pub fn as_chainmail(p: &Poset) -> Result<Chainmail> {
    let n = p.size();
    let mut table = (n <= TABLE_LIMIT).then(|| vec![NONE; n * n]);
    for i in 0..n {
        for j in i..n {
            if !p.down_set(i).intersects(p.down_set(j)) {
                continue;
            }
            let jn = p.join2(i, j).ok_or(Error::NotAChainmail { pair: (i, j) })?;
            if let Some(t) = table.as_mut() {
                t[i * n + j] = jn as u32;
                t[j * n + i] = jn as u32;
            }
        }
    }
    Ok(Chainmail { poset: p.clone(), mail_join: table })
}

impl Chainmail {
    pub fn empty() -> Chainmail {
        Chainmail { poset: Poset::empty(), mail_join: Some(Vec::new()) }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn size(&self) -> usize {
        self.poset.size()
    }

    pub fn name(&self, i: usize) -> String {
        self.poset.name(i)
    }

    /// Join of `{a, b}` when it is a mail.
    #[inline]
    pub fn mail_join(&self, a: usize, b: usize) -> Option<usize> {
        match &self.mail_join {
            Some(t) => {
                let v = t[a * self.size() + b];
                (v != NONE).then_some(v as usize)
            }
            None => {
                if self.shares_lower_bound(a, b) {
                    self.poset.join2(a, b)
                } else {
                    None
                }
            }
        }
    }

    #[inline]
    pub fn shares_lower_bound(&self, a: usize, b: usize) -> bool {
        self.poset.down_set(a).intersects(self.poset.down_set(b))
    }

    /// Nonempty with a common lower bound.
    pub fn is_mail(&self, s: &ElementSet) -> bool {
        self.poset.check_members(s).is_ok() && self.poset.has_common_lower_bound(s)
    }

    /// Components of `x` in the graph linking elements that share a lower bound
    /// (the bound need not lie in `x`). Sorted by least member.
    pub fn mail_components(&self, x: &ElementSet) -> Vec<ElementSet> {
        let mut rest = x.clone();
        let mut out = Vec::new();
        while let Some(start) = rest.first() {
            rest.remove(start);
            let mut comp = ElementSet::singleton(start);
            let mut reach = self.poset.down_set(start).clone();
            loop {
                let linked: ElementSet = rest.iter().filter(|&y| self.poset.down_set(y).intersects(&reach)).collect();
                if linked.is_empty() {
                    break;
                }
                for y in &linked {
                    reach.union_with(self.poset.down_set(y));
                }
                rest.difference_with(&linked);
                comp.union_with(&linked);
            }
            out.push(comp);
        }
        out
    }

    pub fn is_mail_connected(&self, c: &ElementSet) -> bool {
        !c.is_empty() && self.mail_components(c).len() == 1
    }

    /// Join of a mail-connected set, built by joining along paths.
    ///
    /// For each member `d`, a path from a fixed root to `d` is collapsed level
    /// by level: neighbouring entries share a lower bound, so their join
    /// exists, and neighbouring joins share the entry between them. The path
    /// joins all lie above the root, so together they form a mail whose join
    /// is the join of the set. The result is checked against the least upper
    /// bound found by scanning.
    pub fn join_of_mail_connected(&self, c: &ElementSet) -> Result<usize> {
        self.poset.check_members(c)?;
        let root = c.first().ok_or(Error::NotMailConnected)?;
        let mut parent: HashMap<usize, usize> = HashMap::new();
        let mut seen = ElementSet::singleton(root);
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for y in c {
                if !seen.contains(y) && self.shares_lower_bound(x, y) {
                    seen.insert(y);
                    parent.insert(y, x);
                    queue.push_back(y);
                }
            }
        }
        if seen.len() != c.len() {
            return Err(Error::NotMailConnected);
        }
        let violation = || Error::TheoremViolation("mail join missing inside a chainmail".into());
        let mut acc = root;
        for d in c {
            let mut path = vec![d];
            while let Some(&p) = parent.get(path.last().expect("nonempty path")) {
                path.push(p);
            }
            while path.len() > 1 {
                path =
                    path.windows(2).map(|w| self.mail_join(w[0], w[1]).ok_or_else(violation)).collect::<Result<_>>()?;
            }
            acc = self.mail_join(acc, path[0]).ok_or_else(violation)?;
        }
        let scanned = self.poset.join_of(c);
        if scanned != Some(acc) {
            return Err(Error::TheoremViolation(format!(
                "path join {} disagrees with least upper bound {:?}",
                self.name(acc),
                scanned.map(|s| self.name(s))
            )));
        }
        Ok(acc)
    }

    /// No two distinct members share a lower bound.
    pub fn is_totally_disconnected(&self, s: &ElementSet) -> bool {
        self.td_witness(s).is_none()
    }

    fn td_witness(&self, s: &ElementSet) -> Option<(usize, usize)> {
        let mut covered = ElementSet::new();
        let mut owner: Vec<usize> = Vec::new();
        for x in s {
            let d = self.poset.down_set(x);
            if d.intersects(&covered) {
                let other = owner.iter().copied().find(|&o| self.shares_lower_bound(o, x)).unwrap_or(x);
                return Some((other, x));
            }
            covered.union_with(d);
            owner.push(x);
        }
        None
    }

    /// Joins of the maximal mail-connected subsets of `x`.
    pub fn x_star(&self, x: &ElementSet) -> Result<TotallyDisconnectedSet> {
        let joins =
            self.mail_components(x).iter().map(|c| self.join_of_mail_connected(c)).collect::<Result<ElementSet>>()?;
        match self.td_witness(&joins) {
            Some(pair) => Err(Error::NotTotallyDisconnected { pair }),
            None => Ok(TotallyDisconnectedSet { members: joins }),
        }
    }

    /// Down-closed and closed under joins of the mails it contains.
    ///
    /// Pairwise closure suffices: a mail inside a down-closed set has its
    /// lower bound inside too, and its join is a fold of pairwise joins.
    pub fn is_subchainmail(&self, x: &ElementSet) -> bool {
        self.poset.check_members(x).is_ok() && self.poset.is_down_closed(x) && self.closure_gap(x).is_none()
    }

    fn closure_gap(&self, x: &ElementSet) -> Option<usize> {
        for a in x {
            for b in &x.above(a) {
                if let Some(j) = self.mail_join(a, b) {
                    if !x.contains(j) {
                        return Some(j);
                    }
                }
            }
        }
        None
    }

    /// Evaluate the three equivalent characterisations of subchainmails on a
    /// down-closed set, each literally:
    /// 1. the set is the down-set of a totally disconnected set,
    /// 2. it contains the join of every mail inside it,
    /// 3. it contains the join of every mail-connected subset of it.
    ///
    /// Conditions 2 and 3 enumerate subsets, so `x` must be small.
    pub fn subchainmail_conditions(&self, x: &ElementSet) -> [bool; 3] {
        let members = x.to_vec();
        assert!(members.len() <= 20, "literal subchainmail check limited to 20 members");
        let maximal = self.poset.maximal_in(x);
        let c1 = self.is_totally_disconnected(&maximal) && self.poset.down_closure(&maximal) == *x;
        let subsets = || {
            (1u64..(1 << members.len())).map(|mask| {
                members
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| mask & (1 << k) != 0)
                    .map(|(_, &m)| m)
                    .collect::<ElementSet>()
            })
        };
        let contains_join = |s: &ElementSet| self.poset.join_of(s).is_some_and(|j| x.contains(j));
        let c2 = subsets().filter(|s| self.is_mail(s)).all(|s| contains_join(&s));
        let c3 = subsets().filter(|s| self.is_mail_connected(s)).all(|s| contains_join(&s));
        [c1, c2, c3]
    }

    /// Least subchainmail containing `x`.
    pub fn subchainmail_generated(&self, x: &ElementSet) -> Subchainmail {
        let mut cur = self.poset.down_closure(x);
        while let Some(j) = self.closure_gap(&cur) {
            cur.union_with(self.poset.down_set(j));
        }
        Subchainmail { members: cur }
    }

    /// All totally disconnected sets, sorted by size and then members.
    pub fn totally_disconnected_sets(&self) -> Result<Vec<ElementSet>> {
        let cap = Budget::current().max_lattice;
        let mut out = Vec::new();
        let mut chosen = ElementSet::new();
        self.td_rec(&self.poset.all(), &mut ElementSet::new(), &mut chosen, &mut out, cap)?;
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.to_vec().cmp(&b.to_vec())));
        Ok(out)
    }

    fn td_rec(
        &self,
        cands: &ElementSet,
        covered: &mut ElementSet,
        chosen: &mut ElementSet,
        out: &mut Vec<ElementSet>,
        cap: usize,
    ) -> Result<()> {
        if out.len() >= cap {
            return Err(Error::SizeBudgetExceeded { what: "D-lattice", size: cap + 1, cap });
        }
        out.push(chosen.clone());
        for s in cands {
            let d = self.poset.down_set(s);
            if d.intersects(covered) {
                continue;
            }
            let next = cands.above(s);
            let saved = covered.clone();
            covered.union_with(d);
            chosen.insert(s);
            self.td_rec(&next, covered, chosen, out, cap)?;
            chosen.remove(s);
            *covered = saved;
        }
        Ok(())
    }

    /// Number of totally disconnected sets, without materialising them.
    pub fn count_totally_disconnected_sets(&self) -> u64 {
        fn rec(g: &Chainmail, cands: &ElementSet, covered: &ElementSet) -> u64 {
            let mut n = 1;
            for s in cands {
                let d = g.poset.down_set(s);
                if !d.intersects(covered) {
                    n += rec(g, &cands.above(s), &covered.union(d));
                }
            }
            n
        }
        rec(self, &self.poset.all(), &ElementSet::new())
    }
}

/// A set whose members pairwise share no lower bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TotallyDisconnectedSet {
    members: ElementSet,
}

impl TotallyDisconnectedSet {
    pub fn new(g: &Chainmail, members: ElementSet) -> Result<TotallyDisconnectedSet> {
        match g.td_witness(&members) {
            Some(pair) => Err(Error::NotTotallyDisconnected { pair }),
            None => Ok(TotallyDisconnectedSet { members }),
        }
    }

    pub fn members(&self) -> &ElementSet {
        &self.members
    }

    pub fn into_members(self) -> ElementSet {
        self.members
    }
}

/// A down-closed subset closed under joins of its mails.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subchainmail {
    members: ElementSet,
}

impl Subchainmail {
    pub fn new(g: &Chainmail, members: ElementSet) -> Option<Subchainmail> {
        g.is_subchainmail(&members).then_some(Subchainmail { members })
    }

    pub fn members(&self) -> &ElementSet {
        &self.members
    }

    pub fn into_members(self) -> ElementSet {
        self.members
    }
}

/// The complete lattice of totally disconnected sets of a chainmail.
///
/// Element `i` of [`DLattice::lattice`] is the totally disconnected set
/// `sets()[i]`; index 0 is the empty set.
#[derive(Debug, Clone)]
pub struct DLattice {
    chainmail: Chainmail,
    lattice: CompleteLattice,
    sets: Vec<ElementSet>,
    downs: Vec<ElementSet>,
    index: HashMap<ElementSet, usize>,
}

/// Build the lattice of totally disconnected sets, ordered by "every member
/// of the first lies below some member of the second".
pub fn d_lattice(g: &Chainmail) -> Result<DLattice> {
    let sets = g.totally_disconnected_sets()?;
    let p = g.poset();
    let n = sets.len();
    let below = |a: &ElementSet, b: &ElementSet| a.iter().all(|x| b.iter().any(|y| p.leq(x, y)));
    let order = Poset::from_leq_unchecked(n, |i, j| below(&sets[i], &sets[j]));
    let labels: Vec<String> = sets.iter().map(|s| p.format_set(s)).collect();
    let order = order.with_labels(labels)?;
    let lattice = as_complete_lattice(&order)
        .map_err(|e| Error::TheoremViolation(format!("D-lattice is not a complete lattice: {e}")))?;
    let downs = sets.iter().map(|s| p.down_closure(s)).collect();
    let index = sets.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
    Ok(DLattice { chainmail: g.clone(), lattice, sets, downs, index })
}

impl DLattice {
    pub fn chainmail(&self) -> &Chainmail {
        &self.chainmail
    }

    pub fn lattice(&self) -> &CompleteLattice {
        &self.lattice
    }

    pub fn size(&self) -> usize {
        self.sets.len()
    }

    pub fn sets(&self) -> &[ElementSet] {
        &self.sets
    }

    pub fn td_set(&self, i: usize) -> &ElementSet {
        &self.sets[i]
    }

    /// The subchainmail (down-set) corresponding to element `i`.
    pub fn subchainmail(&self, i: usize) -> &ElementSet {
        &self.downs[i]
    }

    pub fn index_of(&self, td: &ElementSet) -> Option<usize> {
        self.index.get(td).copied()
    }

    /// Element for a subchainmail, via its set of component joins.
    pub fn index_of_subchainmail(&self, x: &ElementSet) -> Option<usize> {
        let td = self.chainmail.x_star(x).ok()?;
        self.index_of(td.members())
    }

    /// The singleton `{x}`.
    pub fn singleton(&self, x: usize) -> usize {
        self.index[&ElementSet::singleton(x)]
    }

    /// Join computed in subchainmail language: generate from the union.
    pub fn join_via_subchainmails(&self, a: usize, b: usize) -> usize {
        let u = self.downs[a].union(&self.downs[b]);
        let gen = self.chainmail.subchainmail_generated(&u);
        self.index_of_subchainmail(gen.members()).expect("generated set is a subchainmail")
    }

    /// Meet computed in subchainmail language: intersect.
    pub fn meet_via_subchainmails(&self, a: usize, b: usize) -> usize {
        let i = self.downs[a].intersection(&self.downs[b]);
        self.index_of_subchainmail(&i).expect("intersection of subchainmails is a subchainmail")
    }
}
