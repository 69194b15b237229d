//! Compact sets of element indices.

use std::fmt;

use smallvec::SmallVec;

const WORD: usize = 64;

/// A set of element indices backed by 64-bit words.
///
/// Trailing zero words are always trimmed, so two sets holding the same
/// members compare (and hash) equal regardless of how they were built.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet {
    words: SmallVec<[u64; 2]>,
}

impl ElementSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// `{0, 1, ..., n - 1}`.
    pub fn full(n: usize) -> Self {
        let mut words: SmallVec<[u64; 2]> = SmallVec::new();
        let whole = n / WORD;
        words.extend(std::iter::repeat_n(u64::MAX, whole));
        let rest = n % WORD;
        if rest != 0 {
            words.push((1u64 << rest) - 1);
        }
        Self { words }
    }

    pub fn singleton(i: usize) -> Self {
        let mut s = Self::new();
        s.insert(i);
        s
    }

    pub fn from_mask(mask: u64) -> Self {
        let mut s = Self::new();
        if mask != 0 {
            s.words.push(mask);
        }
        s
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / WORD, i % WORD);
        if self.words.len() <= w {
            self.words.resize(w + 1, 0);
        }
        let had = self.words[w] & (1 << b) != 0;
        self.words[w] |= 1 << b;
        !had
    }

    pub fn remove(&mut self, i: usize) -> bool {
        let (w, b) = (i / WORD, i % WORD);
        if w >= self.words.len() {
            return false;
        }
        let had = self.words[w] & (1 << b) != 0;
        self.words[w] &= !(1 << b);
        self.trim();
        had
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        let (w, b) = (i / WORD, i % WORD);
        w < self.words.len() && self.words[w] & (1 << b) != 0
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Smallest member.
    pub fn first(&self) -> Option<usize> {
        self.words.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    /// Largest member.
    pub fn last(&self) -> Option<usize> {
        self.words.last().map(|w| (self.words.len() - 1) * WORD + (WORD - 1 - w.leading_zeros() as usize))
    }

    /// Low 64 members as a mask; meaningful only for sets over fewer than 64 elements.
    pub fn low_mask(&self) -> u64 {
        self.words.first().copied().unwrap_or(0)
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter { words: &self.words, index: 0, current: self.words.first().copied().unwrap_or(0) }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn union_with(&mut self, other: &Self) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &Self) {
        self.words.truncate(other.words.len());
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
        self.trim();
    }

    pub fn difference_with(&mut self, other: &Self) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
        self.trim();
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn difference(&self, other: &Self) -> Self {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn intersection_len(&self, other: &Self) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.len() <= other.words.len() && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Members strictly greater than `i`.
    pub fn above(&self, i: usize) -> Self {
        let mut s = self.clone();
        let (w, b) = (i / WORD, i % WORD);
        if w >= s.words.len() {
            return Self::new();
        }
        for x in &mut s.words[..w] {
            *x = 0;
        }
        s.words[w] &= if b == WORD - 1 { 0 } else { !((2u64 << b) - 1) };
        s.trim();
        s
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let bit = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD + bit);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

impl<'a> IntoIterator for &'a ElementSet {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl FromIterator<usize> for ElementSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = Self::new();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl Extend<usize> for ElementSet {
    fn extend<T: IntoIterator<Item = usize>>(&mut self, iter: T) {
        for i in iter {
            self.insert(i);
        }
    }
}

impl fmt::Debug for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
