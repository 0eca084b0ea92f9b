//! Canonical sets of automaton states.
//!
//! A [`StateSet`] is a bitset indexed by [`StateId`]. Trailing zero words are
//! always trimmed, so two sets with the same members compare and hash equal no
//! matter how they were built. Iteration is in ascending index order, which is
//! the declaration order of the model.

use std::fmt;

/// Index of a state in declaration order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(u32);

impl StateId {
    pub fn new(index: usize) -> Self {
        StateId(u32::try_from(index).expect("state index fits in u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Index of an event in declaration order.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EventId(u32);

impl EventId {
    pub fn new(index: usize) -> Self {
        EventId(u32::try_from(index).expect("event index fits in u32"))
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet {
    words: Vec<u64>,
}

impl StateSet {
    pub fn new() -> Self {
        StateSet { words: Vec::new() }
    }

    pub fn singleton(state: StateId) -> Self {
        let mut set = StateSet::new();
        set.insert(state);
        set
    }

    /// Every state with index below `n`.
    pub fn full(n: usize) -> Self {
        (0..n).map(StateId::new).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn contains(&self, state: StateId) -> bool {
        let (word, bit) = (state.index() / 64, state.index() % 64);
        self.words.get(word).is_some_and(|w| w & (1 << bit) != 0)
    }

    /// Returns `true` if the state was not already present.
    pub fn insert(&mut self, state: StateId) -> bool {
        let (word, bit) = (state.index() / 64, state.index() % 64);
        if self.words.len() <= word {
            self.words.resize(word + 1, 0);
        }
        let fresh = self.words[word] & (1 << bit) == 0;
        self.words[word] |= 1 << bit;
        fresh
    }

    pub fn remove(&mut self, state: StateId) -> bool {
        let (word, bit) = (state.index() / 64, state.index() % 64);
        let Some(w) = self.words.get_mut(word) else {
            return false;
        };
        let present = *w & (1 << bit) != 0;
        *w &= !(1 << bit);
        self.trim();
        present
    }

    pub fn union_with(&mut self, other: &StateSet) {
        if self.words.len() < other.words.len() {
            self.words.resize(other.words.len(), 0);
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn union(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &StateSet) -> StateSet {
        let mut out = StateSet {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        };
        out.trim();
        out
    }

    pub fn difference(&self, other: &StateSet) -> StateSet {
        let mut out = self.clone();
        for (a, b) in out.words.iter_mut().zip(&other.words) {
            *a &= !*b;
        }
        out.trim();
        out
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.words
            .iter()
            .enumerate()
            .all(|(i, w)| w & !other.words.get(i).copied().unwrap_or(0) == 0)
    }

    /// Members in ascending (declaration) order.
    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(StateId::new(i * 64 + bit))
            })
        })
    }

    fn trim(&mut self) {
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }
}

impl FromIterator<StateId> for StateSet {
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> Self {
        let mut set = StateSet::new();
        for s in iter {
            set.insert(s);
        }
        set
    }
}

impl Extend<StateId> for StateSet {
    fn extend<I: IntoIterator<Item = StateId>>(&mut self, iter: I) {
        for s in iter {
            self.insert(s);
        }
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.iter().map(|s| s.index()))
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(ids: &[usize]) -> StateSet {
        ids.iter().copied().map(StateId::new).collect()
    }

    #[test]
    fn removal_trims_so_equality_is_canonical() {
        let mut a = set(&[3, 130]);
        a.remove(StateId::new(130));
        assert_eq!(a, set(&[3]));
        let mut b = set(&[70]);
        b.remove(StateId::new(70));
        assert_eq!(b, StateSet::new());
        assert!(b.is_empty());
    }

    #[test]
    fn iteration_is_ascending() {
        let s = set(&[65, 2, 0, 200, 63]);
        let got: Vec<usize> = s.iter().map(StateId::index).collect();
        assert_eq!(got, vec![0, 2, 63, 65, 200]);
    }

    proptest! {
        #[test]
        fn set_algebra_matches_btreeset(
            a in proptest::collection::btree_set(0usize..150, 0..20),
            b in proptest::collection::btree_set(0usize..150, 0..20),
        ) {
            let sa: StateSet = a.iter().copied().map(StateId::new).collect();
            let sb: StateSet = b.iter().copied().map(StateId::new).collect();
            let as_vec = |s: &StateSet| s.iter().map(StateId::index).collect::<Vec<_>>();
            prop_assert_eq!(as_vec(&sa.union(&sb)), a.union(&b).copied().collect::<Vec<_>>());
            prop_assert_eq!(as_vec(&sa.intersection(&sb)), a.intersection(&b).copied().collect::<Vec<_>>());
            prop_assert_eq!(as_vec(&sa.difference(&sb)), a.difference(&b).copied().collect::<Vec<_>>());
            prop_assert_eq!(sa.is_subset(&sb), a.is_subset(&b));
            prop_assert_eq!(sa.intersects(&sb), !a.is_disjoint(&b));
            prop_assert_eq!(sa.len(), a.len());
            // equal members, equal value regardless of construction path
            let rebuilt: StateSet = sa.union(&sb).difference(&sb).union(&sa.intersection(&sb));
            prop_assert_eq!(rebuilt, sa);
        }
    }
}
