//! Message subsets as bitmasks.
//!
//! Message `k` (1-based, as written in instance files) lives at bit `k - 1`.

use std::fmt;

/// Largest message count the library accepts. Every algorithm here walks
/// tables indexed by all `2^n` subsets.
pub const MAX_MESSAGES: usize = 24;

/// A subset of the messages `[1..n]`.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetMask(pub u32);

impl SubsetMask {
    pub const EMPTY: SubsetMask = SubsetMask(0);

    /// `[1..n]`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_MESSAGES);
        SubsetMask(((1u64 << n) - 1) as u32)
    }

    pub fn singleton(message: usize) -> Self {
        debug_assert!((1..=MAX_MESSAGES).contains(&message));
        SubsetMask(1 << (message - 1))
    }

    /// Builds a mask from 1-based message indices.
    pub fn from_messages<I: IntoIterator<Item = usize>>(messages: I) -> Self {
        messages.into_iter().fold(Self::EMPTY, |acc, m| acc | Self::singleton(m))
    }

    #[inline]
    pub fn bits(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, message: usize) -> bool {
        self.0 >> (message - 1) & 1 == 1
    }

    #[inline]
    pub fn contains_bit(self, bit: usize) -> bool {
        self.0 >> bit & 1 == 1
    }

    #[inline]
    pub fn is_subset_of(self, other: SubsetMask) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_disjoint(self, other: SubsetMask) -> bool {
        self.0 & other.0 == 0
    }

    #[inline]
    pub fn union(self, other: SubsetMask) -> Self {
        SubsetMask(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: SubsetMask) -> Self {
        SubsetMask(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: SubsetMask) -> Self {
        SubsetMask(self.0 & !other.0)
    }

    /// `[n] \ self`.
    #[inline]
    pub fn complement(self, n: usize) -> Self {
        Self::full(n).difference(self)
    }

    #[inline]
    pub fn with(self, message: usize) -> Self {
        self | Self::singleton(message)
    }

    #[inline]
    pub fn without(self, message: usize) -> Self {
        self.difference(Self::singleton(message))
    }

    /// True when no bit at position `n` or above is set.
    pub fn fits(self, n: usize) -> bool {
        n >= 32 || self.0 >> n == 0
    }

    /// 1-based message indices in ascending order.
    pub fn messages(self) -> Messages {
        Messages(self.0)
    }

    /// Smallest message in the set.
    pub fn first(self) -> Option<usize> {
        (self.0 != 0).then(|| self.0.trailing_zeros() as usize + 1)
    }

    /// All subsets of `self`, in increasing numeric order.
    pub fn subsets(self) -> Subsets {
        Subsets { universe: self.0, next: Some(0) }
    }

    /// Every subset of `[1..n]`.
    pub fn all(n: usize) -> impl Iterator<Item = SubsetMask> {
        (0..1u64 << n).map(|b| SubsetMask(b as u32))
    }
}

impl std::ops::BitOr for SubsetMask {
    type Output = SubsetMask;
    fn bitor(self, rhs: SubsetMask) -> SubsetMask {
        self.union(rhs)
    }
}

impl std::ops::BitAnd for SubsetMask {
    type Output = SubsetMask;
    fn bitand(self, rhs: SubsetMask) -> SubsetMask {
        self.intersection(rhs)
    }
}

impl std::ops::Sub for SubsetMask {
    type Output = SubsetMask;
    fn sub(self, rhs: SubsetMask) -> SubsetMask {
        self.difference(rhs)
    }
}

impl fmt::Debug for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Set notation, e.g. `{1,3,6}` or `{}`.
impl fmt::Display for SubsetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, m) in self.messages().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug)]
pub struct Messages(u32);

impl Iterator for Messages {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let bit = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(bit as usize + 1)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let k = self.0.count_ones() as usize;
        (k, Some(k))
    }
}

impl ExactSizeIterator for Messages {}

#[derive(Clone, Debug)]
pub struct Subsets {
    universe: u32,
    next: Option<u32>,
}

impl Iterator for Subsets {
    type Item = SubsetMask;

    fn next(&mut self) -> Option<SubsetMask> {
        let cur = self.next?;
        self.next = if cur == self.universe { None } else { Some((cur.wrapping_sub(self.universe)) & self.universe) };
        Some(SubsetMask(cur))
    }
}
