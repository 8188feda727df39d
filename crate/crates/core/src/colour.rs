//! Colour-brush identities.
//!
//! A [`ColourSet`] is a non-empty set of primary colour indices `1..=64`,
//! stored as a bitmask (bit `i - 1` for colour `c_i`). Singletons are
//! primary colours; larger sets are primary blends.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub const MAX_COLOUR: u32 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ColourSet(u64);

impl ColourSet {
    /// `None` for the empty mask.
    pub fn from_mask(mask: u64) -> Option<Self> {
        (mask != 0).then_some(ColourSet(mask))
    }

    pub fn primary(index: u32) -> Self {
        assert!((1..=MAX_COLOUR).contains(&index), "colour index {index} out of range");
        ColourSet(1u64 << (index - 1))
    }

    /// Builds from arbitrary indices; `None` if empty or out of range.
    pub fn from_indices(indices: impl IntoIterator<Item = u32>) -> Option<Self> {
        let mut mask = 0u64;
        for i in indices {
            if !(1..=MAX_COLOUR).contains(&i) {
                return None;
            }
            mask |= 1u64 << (i - 1);
        }
        Self::from_mask(mask)
    }

    pub fn mask(self) -> u64 {
        self.0
    }

    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_primary(self) -> bool {
        self.len() == 1
    }

    pub fn is_blend(self) -> bool {
        self.len() >= 2
    }

    /// The arc label `l(a)`: member indices in increasing order.
    pub fn label(self) -> Vec<u32> {
        indices(self.0).collect()
    }

    /// `l_Σ(a)`, the sum of the label entries.
    pub fn label_sum(self) -> u32 {
        indices(self.0).sum()
    }
}

/// Increasing colour indices of a mask.
pub fn indices(mut mask: u64) -> impl Iterator<Item = u32> {
    std::iter::from_fn(move || {
        (mask != 0).then(|| {
            let i = mask.trailing_zeros();
            mask &= mask - 1;
            i + 1
        })
    })
}

impl Ord for ColourSet {
    /// Cardinality first, then lexicographic on the increasing index lists:
    /// `{1},{2},…,{1,2},{1,3},…,{2,3},…,{1,2,3},…`.
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| indices(self.0).cmp(indices(other.0)))
    }
}

impl PartialOrd for ColourSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ColourSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = indices(self.0).map(|i| i.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Serialize for ColourSet {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.label().serialize(s)
    }
}

impl<'de> Deserialize<'de> for ColourSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let list = Vec::<u32>::deserialize(d)?;
        ColourSet::from_indices(list)
            .ok_or_else(|| serde::de::Error::custom("colour set must be non-empty with indices 1..=64"))
    }
}

/// All non-empty subsets of `primaries`, in canonical order.
pub fn nonempty_subsets(primaries: u64) -> Vec<ColourSet> {
    let members: Vec<u64> = indices(primaries).map(|i| 1u64 << (i - 1)).collect();
    let mut out = Vec::with_capacity((1usize << members.len()) - 1);
    for pick in 1u64..(1u64 << members.len()) {
        let mask = indices(pick).fold(0, |acc, i| acc | members[i as usize - 1]);
        out.push(ColourSet(mask));
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ix: &[u32]) -> ColourSet {
        ColourSet::from_indices(ix.iter().copied()).unwrap()
    }

    #[test]
    fn canonical_order_follows_listing() {
        let got = nonempty_subsets(0b1111);
        let want = vec![
            set(&[1]),
            set(&[2]),
            set(&[3]),
            set(&[4]),
            set(&[1, 2]),
            set(&[1, 3]),
            set(&[1, 4]),
            set(&[2, 3]),
            set(&[2, 4]),
            set(&[3, 4]),
            set(&[1, 2, 3]),
            set(&[1, 2, 4]),
            set(&[1, 3, 4]),
            set(&[2, 3, 4]),
            set(&[1, 2, 3, 4]),
        ];
        assert_eq!(got, want);
    }

    #[test]
    fn labels_and_sums() {
        let s = set(&[3, 1]);
        assert_eq!(s.label(), vec![1, 3]);
        assert_eq!(s.label_sum(), 4);
        assert!(s.is_blend());
        assert!(set(&[7]).is_primary());
        assert_eq!(s.to_string(), "(1,3)");
        assert!(ColourSet::from_indices([]).is_none());
        assert!(ColourSet::from_indices([0]).is_none());
    }

    #[test]
    fn serde_uses_label_lists() {
        let s = set(&[1, 2]);
        assert_eq!(serde_json::to_string(&s).unwrap(), "[1,2]");
        assert_eq!(serde_json::from_str::<ColourSet>("[2,1]").unwrap(), s);
        assert!(serde_json::from_str::<ColourSet>("[]").is_err());
    }
}
