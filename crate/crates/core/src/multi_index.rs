//! Strictly increasing multi-indices, stored as bit sets.
//!
//! Coordinates are numbered from 0 internally; all text I/O uses 1-based
//! positions. Multi-indices of equal degree are ordered lexicographically on
//! their increasing index tuples; across degrees, lower degree sorts first.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{argument, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 64;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct MultiIndex(u64);

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);

    pub fn single(i: usize) -> Self {
        debug_assert!(i < MAX_DIM);
        MultiIndex(1 << i)
    }

    /// Builds from a strictly increasing list of 0-based indices.
    pub fn from_increasing(indices: &[usize]) -> Result<Self> {
        let mut bits = 0u64;
        let mut prev: Option<usize> = None;
        for &i in indices {
            if i >= MAX_DIM {
                return Err(argument(format!("index {} exceeds the supported dimension {MAX_DIM}", i + 1)));
            }
            if let Some(p) = prev {
                if i <= p {
                    let one_based: Vec<usize> = indices.iter().map(|i| i + 1).collect();
                    let mut sorted = one_based.clone();
                    sorted.sort_unstable();
                    sorted.dedup();
                    return Err(argument(format!(
                        "multi-index {one_based:?} is not strictly increasing; reorder it as {sorted:?} and adjust the sign of the coefficient (repeated indices give a zero component)"
                    )));
                }
            }
            prev = Some(i);
            bits |= 1 << i;
        }
        Ok(MultiIndex(bits))
    }

    pub fn from_bits(bits: u64) -> Self {
        MultiIndex(bits)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn degree(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn is_subset_of(self, other: MultiIndex) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: MultiIndex) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: MultiIndex) -> MultiIndex {
        MultiIndex(self.0 | other.0)
    }

    pub fn minus(self, other: MultiIndex) -> MultiIndex {
        MultiIndex(self.0 & !other.0)
    }

    pub fn with(self, i: usize) -> MultiIndex {
        MultiIndex(self.0 | 1 << i)
    }

    pub fn without(self, i: usize) -> MultiIndex {
        MultiIndex(self.0 & !(1 << i))
    }

    /// Largest index + 1, or 0 for the empty index.
    pub fn span(self) -> usize {
        MAX_DIM - self.0.leading_zeros() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Number of elements of `self` strictly below `i`.
    pub fn count_below(self, i: usize) -> usize {
        (self.0 & ((1u64 << i) - 1)).count_ones() as usize
    }

    /// Sign of the permutation sorting the concatenation `self ++ other`
    /// (both disjoint). This is the sign in `dx^I ∧ dx^J = ε dx^{I∪J}`.
    pub fn shuffle_sign(self, other: MultiIndex) -> i32 {
        debug_assert!(self.is_disjoint(other));
        let inversions: usize = self.iter().map(|i| other.count_below(i)).sum();
        if inversions.is_multiple_of(2) {
            1
        } else {
            -1
        }
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {
                let diff = self.0 ^ other.0;
                if diff == 0 {
                    Ordering::Equal
                } else if self.0 & (diff & diff.wrapping_neg()) != 0 {
                    // lowest differing index belongs to self
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            }
            ord => ord,
        }
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let one_based: Vec<usize> = self.iter().map(|i| i + 1).collect();
        write!(f, "{one_based:?}")
    }
}

/// All increasing multi-indices of the given degree over `0..n`, in lexicographic order.
pub fn combinations(n: usize, degree: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    if degree > n {
        return out;
    }
    let mut current = Vec::with_capacity(degree);
    fn rec(start: usize, n: usize, left: usize, current: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if left == 0 {
            out.push(MultiIndex::from_increasing(current).expect("generated indices are increasing"));
            return;
        }
        for i in start..=n - left {
            current.push(i);
            rec(i + 1, n, left - 1, current, out);
            current.pop();
        }
    }
    rec(0, n, degree, &mut current, &mut out);
    out
}

/// Sign of `i(e_I) dx^J` for `I ⊆ J`, where the contraction applies the
/// rightmost vector of `e_I = e_{i1} ∧ … ∧ e_{im}` first: the result is
/// `sign · dx^{J∖I}`.
pub fn contraction_sign(inner: MultiIndex, outer: MultiIndex) -> i32 {
    debug_assert!(inner.is_subset_of(outer));
    let m = inner.degree();
    let reversal = if (m * m.saturating_sub(1) / 2).is_multiple_of(2) { 1 } else { -1 };
    inner.shuffle_sign(outer.minus(inner)) * reversal
}
