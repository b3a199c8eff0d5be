//! Fixed-width state sets keyed by dense state indices.
//!
//! Every set is pinned to the state count of one LTS; mixing sets from
//! systems of different sizes is a caller bug and panics in the underlying
//! bit operations.

use fixedbitset::FixedBitSet;

use crate::lts::StateId;

/// A subset of the states of a single LTS.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StateSet {
    bits: FixedBitSet,
}

impl StateSet {
    pub fn empty(universe: usize) -> Self {
        StateSet {
            bits: FixedBitSet::with_capacity(universe),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        StateSet { bits }
    }

    /// Number of states in the underlying LTS, not the member count.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, s: StateId) -> bool {
        self.bits.contains(s.0)
    }

    pub fn insert(&mut self, s: StateId) {
        self.bits.insert(s.0);
    }

    pub fn remove(&mut self, s: StateId) {
        self.bits.remove(s.0);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        !self.bits.is_disjoint(&other.bits)
    }

    pub fn union_with(&mut self, other: &StateSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &StateSet) {
        self.bits.intersect_with(&other.bits);
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.bits.ones().map(StateId)
    }
}

impl FromIterator<StateId> for StateSet {
    /// Collects into a set sized by the largest member; mostly for tests.
    /// Prefer `empty(n)` plus `insert` when the universe is known.
    fn from_iter<I: IntoIterator<Item = StateId>>(iter: I) -> Self {
        let ids: Vec<StateId> = iter.into_iter().collect();
        let universe = ids.iter().map(|s| s.0 + 1).max().unwrap_or(0);
        let mut set = StateSet::empty(universe);
        for s in ids {
            set.insert(s);
        }
        set
    }
}
