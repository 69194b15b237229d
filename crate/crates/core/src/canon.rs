//! Canonical forms of posets.
//!
//! Elements are split into an ordered partition that is refined until every
//! cell is equitable with respect to the strict down/up adjacency. When a
//! cell cannot be split further, each of its vertices is individualized in
//! turn and the search recurses. Every leaf of that tree is a total order of
//! the elements; the canonical code is the lexicographically largest order
//! matrix over all leaves. Two leaves with the same code yield an
//! automorphism, and automorphisms fixing the current prefix prune sibling
//! branches in the same orbit.

use std::fmt;

use crate::bitset::ElementSet;
use crate::poset::Poset;

/// Byte string identifying a poset up to isomorphism.
///
/// Layout: the size as two big-endian bytes, then the `size * size` order
/// matrix of the canonically relabeled poset, row-major, most significant
/// bit first, zero-padded to a whole byte.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Option<CanonicalCode> {
        hex::decode(s).ok().map(CanonicalCode)
    }

    /// Decode the canonical representative.
    pub fn to_poset(&self) -> Option<Poset> {
        let b = &self.0;
        if b.len() < 2 {
            return None;
        }
        let n = u16::from_be_bytes([b[0], b[1]]) as usize;
        if b.len() != 2 + (n * n).div_ceil(8) {
            return None;
        }
        let bit = |k: usize| b[2 + k / 8] & (0x80 >> (k % 8)) != 0;
        Poset::from_leq(n, |i, j| bit(i * n + j)).ok()
    }
}

impl fmt::Debug for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalCode({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub code: CanonicalCode,
    /// `relabeling[x]` is the canonical position of element `x`.
    pub relabeling: Vec<usize>,
}

pub fn canonical_form(p: &Poset) -> CanonicalForm {
    let n = p.size();
    let mut cells = vec![(0..n).collect::<Vec<_>>()];
    if n == 0 {
        cells.clear();
    }
    refine(p, &mut cells);
    let mut search = Search { p, best: None, autos: Vec::new() };
    let mut prefix = Vec::new();
    search.run(cells, &mut prefix);
    let (words, order) = search.best.expect("search visits at least one leaf");
    let mut relabeling = vec![0; n];
    for (pos, &v) in order.iter().enumerate() {
        relabeling[v] = pos;
    }
    CanonicalForm { code: encode(n, &words), relabeling }
}

pub fn canonical_code(p: &Poset) -> CanonicalCode {
    canonical_form(p).code
}

pub fn is_isomorphic(p: &Poset, q: &Poset) -> bool {
    p.size() == q.size() && canonical_code(p) == canonical_code(q)
}

/// The canonically relabeled copy of `p`.
pub fn canonical_poset(p: &Poset) -> Poset {
    p.relabel(&canonical_form(p).relabeling)
}

/// Refine an ordered partition to the coarsest equitable one below it.
///
/// Cell order is derived only from order-invariant data, so the result is
/// preserved by isomorphisms.
pub(crate) fn refine(p: &Poset, cells: &mut Vec<Vec<usize>>) {
    loop {
        let masks: Vec<ElementSet> = cells.iter().map(|c| c.iter().copied().collect()).collect();
        let mut next = Vec::with_capacity(cells.len());
        let mut changed = false;
        for cell in cells.iter() {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<u32>, usize)> = cell
                .iter()
                .map(|&v| {
                    let key = masks
                        .iter()
                        .map(|m| {
                            let d = p.down_set(v).intersection_len(m) as u32;
                            let u = p.up_set(v).intersection_len(m) as u32;
                            (d << 16) | u
                        })
                        .collect();
                    (key, v)
                })
                .collect();
            keyed.sort();
            let mut start = 0;
            for i in 1..=keyed.len() {
                if i == keyed.len() || keyed[i].0 != keyed[start].0 {
                    next.push(keyed[start..i].iter().map(|(_, v)| *v).collect());
                    start = i;
                }
            }
            if next.last().map(|c| c.len()) != Some(cell.len()) {
                changed = true;
            }
        }
        *cells = next;
        if !changed {
            return;
        }
    }
}

struct Search<'a> {
    p: &'a Poset,
    best: Option<(Vec<u64>, Vec<usize>)>,
    autos: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn run(&mut self, cells: Vec<Vec<usize>>, prefix: &mut Vec<usize>) {
        let Some(target) = cells.iter().position(|c| c.len() > 1) else {
            self.leaf(cells.into_iter().flatten().collect());
            return;
        };
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cells[target] {
            if !explored.is_empty() && self.same_orbit(prefix, &explored, v) {
                continue;
            }
            let mut next = Vec::with_capacity(cells.len() + 1);
            next.extend_from_slice(&cells[..target]);
            next.push(vec![v]);
            next.push(cells[target].iter().copied().filter(|&w| w != v).collect());
            next.extend_from_slice(&cells[target + 1..]);
            refine(self.p, &mut next);
            prefix.push(v);
            self.run(next, prefix);
            prefix.pop();
            explored.push(v);
        }
    }

    /// Whether `v` lies in the orbit of an explored vertex under the known
    /// automorphisms that fix the prefix pointwise.
    fn same_orbit(&self, prefix: &[usize], explored: &[usize], v: usize) -> bool {
        let n = self.p.size();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut any = false;
        for a in &self.autos {
            if prefix.iter().all(|&x| a[x] == x) {
                any = true;
                for (x, &ax) in a.iter().enumerate().take(n) {
                    let (rx, ry) = (find(&mut parent, x), find(&mut parent, ax));
                    if rx != ry {
                        parent[rx] = ry;
                    }
                }
            }
        }
        if !any {
            return false;
        }
        let rv = find(&mut parent, v);
        explored.iter().any(|&u| find(&mut parent, u) == rv)
    }

    fn leaf(&mut self, order: Vec<usize>) {
        let words = matrix_words(self.p, &order);
        match &self.best {
            None => self.best = Some((words, order)),
            Some((best, best_order)) => match words.cmp(best) {
                std::cmp::Ordering::Greater => self.best = Some((words, order)),
                std::cmp::Ordering::Equal => {
                    let mut auto = vec![0; order.len()];
                    for (a, b) in best_order.iter().zip(&order) {
                        auto[*a] = *b;
                    }
                    if auto.iter().enumerate().any(|(i, &x)| i != x) {
                        self.autos.push(auto);
                    }
                }
                std::cmp::Ordering::Less => {}
            },
        }
    }
}

fn matrix_words(p: &Poset, order: &[usize]) -> Vec<u64> {
    let n = order.len();
    let mut words = vec![0u64; (n * n).div_ceil(64)];
    for (i, &a) in order.iter().enumerate() {
        for (j, &b) in order.iter().enumerate() {
            if p.leq(a, b) {
                let k = i * n + j;
                words[k / 64] |= 1u64 << (63 - k % 64);
            }
        }
    }
    words
}

fn encode(n: usize, words: &[u64]) -> CanonicalCode {
    let mut bytes = Vec::with_capacity(2 + words.len() * 8);
    bytes.extend_from_slice(&(n as u16).to_be_bytes());
    let nbytes = (n * n).div_ceil(8);
    let flat: Vec<u8> = words.iter().flat_map(|w| w.to_be_bytes()).collect();
    bytes.extend_from_slice(&flat[..nbytes]);
    CanonicalCode(bytes)
}
