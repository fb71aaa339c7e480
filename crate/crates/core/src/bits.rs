//! Dense bit-vectors over a cyclic index set `{0, …, len-1}`.
//!
//! [`BitSet`] is the general word-vector form used for subsets of `Z_n` and of
//! the discrete-log space `Z_{q-1}`. [`Mask64`] is a single-word variant for the
//! inner loops of the exhaustive searches, where the modulus never exceeds 64.

use std::fmt;

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

impl BitSet {
    pub fn new(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; len.div_ceil(WORD)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = BitSet {
            len,
            words: vec![!0; len.div_ceil(WORD)],
        };
        s.trim();
        s
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, items: I) -> Self {
        let mut s = BitSet::new(len);
        for i in items {
            s.insert(i);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn insert(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    pub fn remove(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        self.words[i / WORD] &= !(1 << (i % WORD));
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.len && self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + b)
            })
        })
    }

    pub fn union_with(&mut self, other: &BitSet) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &BitSet) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &BitSet) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersects(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn is_subset(&self, other: &BitSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// `{(i + shift) mod len : i ∈ self}`.
    pub fn rotate(&self, shift: usize) -> BitSet {
        if self.len == 0 {
            return self.clone();
        }
        let shift = shift % self.len;
        if shift == 0 {
            return self.clone();
        }
        let mut out = self.shl(shift);
        out.union_with(&self.shr(self.len - shift));
        out
    }

    /// Cyclic sum set `{a + b mod len : a ∈ self, b ∈ other}`.
    pub fn cyclic_sum(&self, other: &BitSet) -> BitSet {
        assert_eq!(self.len, other.len);
        let (small, big) = if self.count() <= other.count() {
            (self, other)
        } else {
            (other, self)
        };
        let mut out = BitSet::new(self.len);
        for b in small.iter() {
            out.union_with(&big.rotate(b));
        }
        out
    }

    fn shl(&self, k: usize) -> BitSet {
        let mut out = BitSet::new(self.len);
        let (ws, bs) = (k / WORD, k % WORD);
        for i in (ws..self.words.len()).rev() {
            let mut v = self.words[i - ws] << bs;
            if bs > 0 && i > ws {
                v |= self.words[i - ws - 1] >> (WORD - bs);
            }
            out.words[i] = v;
        }
        out.trim();
        out
    }

    fn shr(&self, k: usize) -> BitSet {
        let mut out = BitSet::new(self.len);
        let (ws, bs) = (k / WORD, k % WORD);
        let n = self.words.len();
        for i in 0..n.saturating_sub(ws) {
            let mut v = self.words[i + ws] >> bs;
            if bs > 0 && i + ws + 1 < n {
                v |= self.words[i + ws + 1] << (WORD - bs);
            }
            out.words[i] = v;
        }
        out
    }

    fn trim(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitSet<{}>", self.len)?;
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Subset of `Z_w` for `w <= 64`, packed into one word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mask64 {
    width: u32,
    full: u64,
}

impl Mask64 {
    pub fn new(width: usize) -> Self {
        assert!((1..=64).contains(&width), "Mask64 width {width} out of range");
        let full = if width == 64 { !0 } else { (1u64 << width) - 1 };
        Mask64 {
            width: width as u32,
            full,
        }
    }

    pub fn width(&self) -> usize {
        self.width as usize
    }

    pub fn full(&self) -> u64 {
        self.full
    }

    /// Cyclic shift by `t` (reduced mod the width).
    #[inline]
    pub fn rot(&self, x: u64, t: usize) -> u64 {
        let t = (t % self.width as usize) as u32;
        if t == 0 {
            return x;
        }
        ((x << t) | (x >> (self.width - t))) & self.full
    }

    /// Cyclic shift by `-t`.
    #[inline]
    pub fn rot_neg(&self, x: u64, t: usize) -> u64 {
        let t = t % self.width as usize;
        self.rot(x, (self.width as usize - t) % self.width as usize)
    }

    /// `{a + b}` over all `a ∈ x`, `b ∈ y`.
    pub fn sum(&self, x: u64, y: u64) -> u64 {
        let mut out = 0;
        let mut rest = y;
        while rest != 0 {
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= self.rot(x, b);
        }
        out
    }

    /// `{a - b}` over all `a ∈ x`, `b ∈ y`.
    pub fn diff(&self, x: u64, y: u64) -> u64 {
        let mut out = 0;
        let mut rest = y;
        while rest != 0 {
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= self.rot_neg(x, b);
        }
        out
    }

    pub fn to_bitset(&self, x: u64) -> BitSet {
        BitSet::from_indices(self.width(), bits_of(x))
    }

    pub fn from_bitset(&self, b: &BitSet) -> u64 {
        assert_eq!(b.len(), self.width());
        b.iter().fold(0, |acc, i| acc | 1 << i)
    }
}

/// Iterates the set bit positions of a word, lowest first.
pub fn bits_of(mut x: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if x == 0 {
            return None;
        }
        let b = x.trailing_zeros() as usize;
        x &= x - 1;
        Some(b)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_rotate(len: usize, items: &[usize], t: usize) -> Vec<usize> {
        let mut v: Vec<usize> = items.iter().map(|&i| (i + t) % len).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    proptest! {
        #[test]
        fn rotate_matches_naive(len in 1usize..200, raw in proptest::collection::vec(0usize..1000, 0..40), t in 0usize..400) {
            let items: Vec<usize> = raw.iter().map(|&i| i % len).collect();
            let set = BitSet::from_indices(len, items.iter().copied());
            let got: Vec<usize> = set.rotate(t).iter().collect();
            prop_assert_eq!(got, naive_rotate(len, &items, t));
        }

        #[test]
        fn mask_rot_matches_bitset(width in 1usize..=64, x in any::<u64>(), t in 0usize..130) {
            let m = Mask64::new(width);
            let x = x & m.full();
            prop_assert_eq!(m.to_bitset(m.rot(x, t)), m.to_bitset(x).rotate(t));
            prop_assert_eq!(m.rot_neg(m.rot(x, t), t), x);
        }
    }

    #[test]
    fn full_and_count() {
        let s = BitSet::full(130);
        assert_eq!(s.count(), 130);
        assert!(s.contains(129));
        assert!(!s.contains(130));
        let e = BitSet::new(0);
        assert!(e.is_empty());
        assert_eq!(e.rotate(3), e);
    }

    #[test]
    fn cyclic_sum_small() {
        let a = BitSet::from_indices(5, [1, 2]);
        let b = BitSet::from_indices(5, [0, 4]);
        let s: Vec<usize> = a.cyclic_sum(&b).iter().collect();
        assert_eq!(s, vec![0, 1, 2]);
    }
}
