//! Item sets as fixed-width bit masks over a ground set `{0, .., m-1}`.
//!
//! Every set carries its universe size so that set operations can assert the
//! operands talk about the same market. The canonical order on subsets used
//! everywhere (tie-breaks, first-witness reporting, demand enumeration) is
//! ascending order of the underlying mask integer.

use std::fmt;

use crate::error::{Error, Result};

pub const MAX_UNIVERSE: u32 = 64;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemSet {
    bits: u64,
    m: u32,
}

impl ItemSet {
    pub fn empty(m: u32) -> Self {
        debug_assert!(m <= MAX_UNIVERSE);
        ItemSet { bits: 0, m }
    }

    pub fn full(m: u32) -> Self {
        debug_assert!(m <= MAX_UNIVERSE);
        let bits = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        ItemSet { bits, m }
    }

    pub fn singleton(m: u32, item: usize) -> Self {
        debug_assert!((item as u32) < m);
        ItemSet { bits: 1u64 << item, m }
    }

    pub fn from_indices(m: u32, items: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        for &i in items {
            if i as u32 >= m {
                return Err(Error::InvalidInput(format!(
                    "item {i} out of range for universe of {m}"
                )));
            }
            if bits & (1u64 << i) != 0 {
                return Err(Error::InvalidInput(format!("duplicate item {i}")));
            }
            bits |= 1u64 << i;
        }
        Ok(ItemSet { bits, m })
    }

    pub fn from_bits(m: u32, bits: u64) -> Result<Self> {
        if bits & !ItemSet::full(m).bits != 0 {
            return Err(Error::InvalidInput(format!(
                "mask {bits:#b} has bits outside universe of {m}"
            )));
        }
        Ok(ItemSet { bits, m })
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn universe(&self) -> u32 {
        self.m
    }

    pub fn len(&self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn contains(&self, item: usize) -> bool {
        (item as u32) < self.m && self.bits & (1u64 << item) != 0
    }

    pub fn insert(&self, item: usize) -> Self {
        debug_assert!((item as u32) < self.m);
        ItemSet { bits: self.bits | (1u64 << item), m: self.m }
    }

    pub fn remove(&self, item: usize) -> Self {
        ItemSet { bits: self.bits & !(1u64 << item), m: self.m }
    }

    pub fn union(&self, other: &Self) -> Self {
        debug_assert_eq!(self.m, other.m);
        ItemSet { bits: self.bits | other.bits, m: self.m }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        debug_assert_eq!(self.m, other.m);
        ItemSet { bits: self.bits & other.bits, m: self.m }
    }

    pub fn minus(&self, other: &Self) -> Self {
        debug_assert_eq!(self.m, other.m);
        ItemSet { bits: self.bits & !other.bits, m: self.m }
    }

    pub fn complement(&self) -> Self {
        ItemSet { bits: ItemSet::full(self.m).bits & !self.bits, m: self.m }
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        debug_assert_eq!(self.m, other.m);
        self.bits & !other.bits == 0
    }

    pub fn is_disjoint_from(&self, other: &Self) -> bool {
        debug_assert_eq!(self.m, other.m);
        self.bits & other.bits == 0
    }

    /// Smallest member, if any.
    pub fn first(&self) -> Option<usize> {
        if self.bits == 0 {
            None
        } else {
            Some(self.bits.trailing_zeros() as usize)
        }
    }

    /// Members in ascending order.
    pub fn iter(&self) -> Members {
        Members { bits: self.bits }
    }

    pub fn indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    /// All subsets of `self` in canonical (ascending mask) order, `∅` first.
    pub fn subsets(&self) -> Subsets {
        Subsets { of: *self, next: Some(0) }
    }
}

impl fmt::Display for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

pub struct Members {
    bits: u64,
}

impl Iterator for Members {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.bits == 0 {
            return None;
        }
        let i = self.bits.trailing_zeros() as usize;
        self.bits &= self.bits - 1;
        Some(i)
    }
}

pub struct Subsets {
    of: ItemSet,
    next: Option<u64>,
}

impl Iterator for Subsets {
    type Item = ItemSet;

    fn next(&mut self) -> Option<ItemSet> {
        let cur = self.next?;
        // Ascending sub-mask enumeration: the next subset of `mask` after `s`
        // is (s - mask) & mask in wrapping arithmetic; it wraps to 0 after the
        // full mask itself.
        let succ = cur.wrapping_sub(self.of.bits) & self.of.bits;
        self.next = if succ == 0 { None } else { Some(succ) };
        Some(ItemSet { bits: cur, m: self.of.m })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn subset_enumeration_is_ascending_and_complete() {
        let s = ItemSet::from_bits(6, 0b101_001).unwrap();
        let got: Vec<u64> = s.subsets().map(|t| t.bits()).collect();
        let want: Vec<u64> = (0..64u64).filter(|b| b & !0b101_001 == 0).collect();
        assert_eq!(want, got);
    }

    #[test]
    fn empty_set_has_one_subset() {
        let subs: Vec<_> = ItemSet::empty(4).subsets().collect();
        assert_eq!(vec![ItemSet::empty(4)], subs);
    }

    #[test]
    fn display_lists_members() {
        let s = ItemSet::from_indices(6, &[5, 0, 2]).unwrap();
        assert_eq!("{0, 2, 5}", s.to_string());
        assert_eq!(vec![0, 2, 5], s.indices());
    }

    #[test]
    fn rejects_out_of_range_and_duplicates() {
        assert!(ItemSet::from_indices(3, &[3]).is_err());
        assert!(ItemSet::from_indices(3, &[1, 1]).is_err());
        assert!(ItemSet::from_bits(3, 0b1000).is_err());
    }

    #[test]
    fn complement_and_set_algebra() {
        let s = ItemSet::from_indices(5, &[0, 3]).unwrap();
        assert_eq!(vec![1, 2, 4], s.complement().indices());
        let t = ItemSet::from_indices(5, &[3, 4]).unwrap();
        assert_eq!(vec![0, 3, 4], s.union(&t).indices());
        assert_eq!(vec![3], s.intersect(&t).indices());
        assert_eq!(vec![0], s.minus(&t).indices());
        assert!(s.intersect(&t).is_subset_of(&s));
    }

    proptest! {
        #[test]
        fn subsets_match_filter(bits in 0u64..256) {
            let s = ItemSet::from_bits(8, bits).unwrap();
            let got: Vec<u64> = s.subsets().map(|t| t.bits()).collect();
            let want: Vec<u64> = (0..256u64).filter(|b| b & !bits == 0).collect();
            prop_assert_eq!(want, got);
        }
    }
}
