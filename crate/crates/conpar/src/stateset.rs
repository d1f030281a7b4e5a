//! Sets of game states over a fixed universe.
//!
//! `StateSet` is the currency of every fixpoint computation in this crate.
//! It is a plain bitset whose universe size is pinned at construction; all
//! binary operations require both operands to share the universe.

use std::fmt;

const WORD: usize = 64;

/// Subset of the state universe `0..universe`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StateSet {
    universe: usize,
    words: Vec<u64>,
}

impl StateSet {
    /// Empty set over `universe` states.
    pub fn empty(universe: usize) -> Self {
        StateSet {
            universe,
            words: vec![0; universe.div_ceil(WORD)],
        }
    }

    /// Full set over `universe` states.
    pub fn full(universe: usize) -> Self {
        let mut s = Self::empty(universe);
        for i in 0..universe {
            s.insert(i);
        }
        s
    }

    /// Set containing exactly the given states.
    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, iter: I) -> Self {
        let mut s = Self::empty(universe);
        for i in iter {
            s.insert(i);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.universe, "state {i} outside universe {}", self.universe);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.universe);
        self.words[i / WORD] &= !(1 << (i % WORD));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    fn check(&self, other: &StateSet) {
        assert_eq!(self.universe, other.universe, "universe mismatch");
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        self.check(other);
        StateSet {
            universe: self.universe,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    pub fn intersect(&self, other: &StateSet) -> StateSet {
        self.check(other);
        StateSet {
            universe: self.universe,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        self.check(other);
        StateSet {
            universe: self.universe,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect(),
        }
    }

    /// Complement within the universe.
    pub fn complement(&self) -> StateSet {
        let mut out = StateSet {
            universe: self.universe,
            words: self.words.iter().map(|w| !w).collect(),
        };
        // Clear the padding bits above the universe boundary.
        let tail = self.universe % WORD;
        if tail != 0 {
            if let Some(last) = out.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        out
    }

    pub fn union_with(&mut self, other: &StateSet) {
        self.check(other);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.check(other);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.check(other);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    /// Member indices in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.universe).filter(move |&i| self.contains(i))
    }

    /// Raw words, for use as a hash-map key in memoization tables.
    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_algebra() {
        let mut a = StateSet::empty(130);
        a.insert(0);
        a.insert(64);
        a.insert(129);
        let b = StateSet::from_indices(130, [64, 65]);
        assert_eq!(a.len(), 3);
        assert!(a.contains(64));
        assert!(!a.contains(1));
        assert_eq!(a.intersect(&b).iter().collect::<Vec<_>>(), vec![64]);
        assert_eq!(a.union(&b).len(), 4);
        assert_eq!(a.difference(&b).len(), 2);
        assert!(b.is_subset(&a.union(&b)));
        assert!(a.intersects(&b));
    }

    #[test]
    fn complement_respects_universe() {
        let a = StateSet::from_indices(70, [3]);
        let c = a.complement();
        assert_eq!(c.len(), 69);
        assert!(!c.contains(3));
        assert_eq!(c.complement(), a);
        assert_eq!(StateSet::full(70), a.union(&c));
    }

    #[test]
    fn empty_and_full() {
        assert!(StateSet::empty(5).is_empty());
        assert_eq!(StateSet::full(5).len(), 5);
        assert!(StateSet::empty(0).is_empty());
        assert_eq!(StateSet::full(0).complement(), StateSet::empty(0));
    }
}
