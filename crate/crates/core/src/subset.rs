use std::fmt;

use serde::de::{Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{ContractError, Result};

/// Largest number of agents a bitmask subset can address.
pub const MAX_AGENTS: usize = 63;

/// A set of agents encoded as a bitmask; agent `i` is bit `i`.
///
/// Serializes as a sorted array of agent indices.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub const fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// All agents `0..n`.
    pub fn full(n: usize) -> Self {
        assert!(n <= MAX_AGENTS, "at most {MAX_AGENTS} agents");
        Subset((1u64 << n) - 1)
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_AGENTS);
        Subset(1u64 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices.into_iter().fold(Subset::EMPTY, |s, i| s.with(i))
    }

    /// Like [`Subset::from_indices`] but rejects indices `>= n`.
    pub fn try_from_indices<I: IntoIterator<Item = usize>>(indices: I, n: usize) -> Result<Self> {
        let mut s = Subset::EMPTY;
        for i in indices {
            if i >= n || i >= MAX_AGENTS {
                return Err(ContractError::AgentOutOfRange { index: i, n });
            }
            s = s.with(i);
        }
        Ok(s)
    }

    pub const fn contains(self, i: usize) -> bool {
        i < 64 && self.0 & (1u64 << i) != 0
    }

    #[must_use]
    pub const fn with(self, i: usize) -> Self {
        Subset(self.0 | (1u64 << i))
    }

    #[must_use]
    pub const fn without(self, i: usize) -> Self {
        Subset(self.0 & !(1u64 << i))
    }

    pub const fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub const fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    #[must_use]
    pub const fn union(self, other: Subset) -> Self {
        Subset(self.0 | other.0)
    }

    #[must_use]
    pub const fn intersection(self, other: Subset) -> Self {
        Subset(self.0 & other.0)
    }

    #[must_use]
    pub const fn difference(self, other: Subset) -> Self {
        Subset(self.0 & !other.0)
    }

    /// Highest agent index plus one, or 0 for the empty set.
    pub const fn span(self) -> usize {
        64 - self.0.leading_zeros() as usize
    }

    /// Members in ascending order.
    pub fn iter(self) -> Members {
        Members(self.0)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Every subset of `self`, in ascending bitmask order.
    pub fn submasks(self) -> impl Iterator<Item = Subset> {
        let members = self.to_vec();
        let count = 1u64 << members.len();
        (0..count).map(move |k| expand(k, &members))
    }
}

/// Maps the bits of `compact` onto the agent positions listed in `members`.
pub(crate) fn expand(compact: u64, members: &[usize]) -> Subset {
    let mut bits = 0u64;
    let mut k = compact;
    while k != 0 {
        let j = k.trailing_zeros() as usize;
        bits |= 1u64 << members[j];
        k &= k - 1;
    }
    Subset(bits)
}

/// Iterator over the members of a [`Subset`].
pub struct Members(u64);

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Members {}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Subset::from_indices(iter)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.len()))?;
        for i in self.iter() {
            seq.serialize_element(&i)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct IndexVisitor;

        impl<'de> Visitor<'de> for IndexVisitor {
            type Value = Subset;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "an array of agent indices below {MAX_AGENTS}")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Subset, A::Error> {
                let mut s = Subset::EMPTY;
                while let Some(i) = seq.next_element::<usize>()? {
                    if i >= MAX_AGENTS {
                        return Err(serde::de::Error::custom(format!("agent index {i} too large")));
                    }
                    s = s.with(i);
                }
                Ok(s)
            }
        }

        deserializer.deserialize_seq(IndexVisitor)
    }
}
