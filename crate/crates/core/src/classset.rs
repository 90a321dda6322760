use std::fmt;
use std::ops::{BitAnd, BitOr, Sub};

/// A set of terminal-class indices over a fixed universe size.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ClassSet {
    len: usize,
    words: Vec<u64>,
}

impl ClassSet {
    pub fn empty(len: usize) -> Self {
        ClassSet {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = Self::empty(len);
        for i in 0..len {
            s.insert(i);
        }
        s
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(len);
        for i in indices {
            s.insert(i);
        }
        s
    }

    /// Size of the universe this set ranges over.
    pub fn universe_len(&self) -> usize {
        self.len
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "class index {i} out of range {}", self.len);
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &ClassSet) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_strict_subset(&self, other: &ClassSet) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn intersects(&self, other: &ClassSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union_with(&mut self, other: &ClassSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &ClassSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &ClassSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn complement(&self) -> ClassSet {
        &ClassSet::full(self.len) - self
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |i| self.contains(*i))
    }
}

impl BitAnd for &ClassSet {
    type Output = ClassSet;
    fn bitand(self, rhs: &ClassSet) -> ClassSet {
        let mut out = self.clone();
        out.intersect_with(rhs);
        out
    }
}

impl BitOr for &ClassSet {
    type Output = ClassSet;
    fn bitor(self, rhs: &ClassSet) -> ClassSet {
        let mut out = self.clone();
        out.union_with(rhs);
        out
    }
}

impl Sub for &ClassSet {
    type Output = ClassSet;
    fn sub(self, rhs: &ClassSet) -> ClassSet {
        let mut out = self.clone();
        out.difference_with(rhs);
        out
    }
}

impl fmt::Debug for ClassSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
