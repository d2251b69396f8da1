//! Multi-indices over anticommuting generators.
//!
//! A [`MultiIndex`] is a strictly increasing tuple of generator ids, stored as a
//! 64-bit set: generator `n` (1-based) lives in bit `n - 1`. The empty set is the
//! body index, i.e. the unit `1`.

use std::fmt;

use crate::error::{Error, Result};

/// Largest generator id representable by a single-word [`MultiIndex`].
pub const MAX_GENERATORS: u32 = 64;

/// A finite set of generator ids, `1..=64`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(u64);

impl MultiIndex {
    /// The body index (no generators).
    pub const EMPTY: MultiIndex = MultiIndex(0);

    pub const fn from_bits(bits: u64) -> Self {
        MultiIndex(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    /// Single generator `i_n`.
    pub fn generator(n: u32) -> Result<Self> {
        if n == 0 || n > MAX_GENERATORS {
            return Err(Error::InvalidGenerator(n));
        }
        Ok(MultiIndex(1u64 << (n - 1)))
    }

    /// Builds an index from generator ids. Order does not matter here; use
    /// [`index_product`] when the sign of a reordering is needed.
    pub fn from_generators<I: IntoIterator<Item = u32>>(gens: I) -> Result<Self> {
        let mut bits = 0u64;
        for n in gens {
            let g = Self::generator(n)?;
            if bits & g.0 != 0 {
                return Err(Error::DuplicateGenerator(n));
            }
            bits |= g.0;
        }
        Ok(MultiIndex(bits))
    }

    /// Number of generators, `|α|`.
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, n: u32) -> bool {
        (1..=MAX_GENERATORS).contains(&n) && self.0 & (1u64 << (n - 1)) != 0
    }

    /// Largest generator id, or 0 for the body index.
    pub fn max_generator(self) -> u32 {
        64 - self.0.leading_zeros()
    }

    pub fn is_disjoint(self, other: MultiIndex) -> bool {
        self.0 & other.0 == 0
    }

    pub fn is_subset_of(self, other: MultiIndex) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn union(self, other: MultiIndex) -> MultiIndex {
        MultiIndex(self.0 | other.0)
    }

    pub fn difference(self, other: MultiIndex) -> MultiIndex {
        MultiIndex(self.0 & !other.0)
    }

    /// Ascending generator ids.
    pub fn generators(self) -> Generators {
        Generators(self.0)
    }

    /// `|α|(|α|-1)/2`, the number of transpositions that reverse `i_α`.
    pub fn reversal_count(self) -> u32 {
        let k = self.len();
        k * k.saturating_sub(1) / 2
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, n) in self.generators().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for (k, n) in self.generators().enumerate() {
            if k > 0 {
                write!(f, "·")?;
            }
            write!(f, "i{n}")?;
        }
        Ok(())
    }
}

/// Iterator over the generator ids of a [`MultiIndex`], ascending.
pub struct Generators(u64);

impl Iterator for Generators {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        if self.0 == 0 {
            return None;
        }
        let tz = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(tz + 1)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Generators {}

/// Result of multiplying two basis monomials: a signed monomial or zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SignedIndex {
    Zero,
    Term { negative: bool, index: MultiIndex },
}

impl SignedIndex {
    pub fn sign(self) -> Option<f64> {
        match self {
            SignedIndex::Zero => None,
            SignedIndex::Term { negative, .. } => Some(if negative { -1.0 } else { 1.0 }),
        }
    }

    pub fn index(self) -> Option<MultiIndex> {
        match self {
            SignedIndex::Zero => None,
            SignedIndex::Term { index, .. } => Some(index),
        }
    }
}

/// Parity of `σ(α, β)`: the number of pairs `(a, b)` with `a ∈ α`, `b ∈ β`, `a > b`.
#[inline]
pub fn swap_parity(alpha: MultiIndex, beta: MultiIndex) -> bool {
    let a = alpha.0;
    let mut b = beta.0;
    let mut count = 0u32;
    while b != 0 {
        let tz = b.trailing_zeros();
        // generators of α strictly above this generator of β
        let above = if tz >= 63 { 0 } else { a >> (tz + 1) };
        count += above.count_ones();
        b &= b - 1;
    }
    count & 1 == 1
}

/// `i_α i_β = (-1)^{σ(α,β)} i_{α∪β}`, or zero when the indices share a generator.
#[inline]
pub fn index_product(alpha: MultiIndex, beta: MultiIndex) -> SignedIndex {
    if !alpha.is_disjoint(beta) {
        return SignedIndex::Zero;
    }
    SignedIndex::Term { negative: swap_parity(alpha, beta), index: alpha.union(beta) }
}
