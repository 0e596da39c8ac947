//! Fixed-length bit vectors and symmetric bit matrices.
//!
//! These back both vertex subsets of graphs and grid-aligned subsets of
//! `[0,1]`; the word layout is little-endian (bit `i` lives in word `i / 64`
//! at position `i % 64`).

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

/// A subset of `{0, .., len-1}` stored as packed 64-bit words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitSet {
    len: usize,
    words: Vec<u64>,
}

fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

impl BitSet {
    pub fn empty(len: usize) -> Self {
        BitSet {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn full(len: usize) -> Self {
        let mut s = BitSet {
            len,
            words: vec![!0u64; words_for(len)],
        };
        s.trim();
        s
    }

    /// Set from the low `len` bits of `mask` (requires `len <= 64`).
    pub fn from_mask(len: usize, mask: u64) -> Self {
        debug_assert!(len <= 64);
        let mut s = BitSet::empty(len);
        if len > 0 {
            s.words[0] = if len == 64 { mask } else { mask & ((1u64 << len) - 1) };
        }
        s
    }

    pub fn from_indices(len: usize, idx: &[usize]) -> Self {
        let mut s = BitSet::empty(len);
        for &i in idx {
            s.insert(i);
        }
        s
    }

    /// Zero any bits past `len` in the last word.
    fn trim(&mut self) {
        let extra = self.words.len() * 64 - self.len;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= !0u64 >> extra;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn contains(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] &= !(1u64 << (i % 64));
    }

    pub fn toggle(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn union(&self, other: &BitSet) -> BitSet {
        debug_assert_eq!(self.len, other.len);
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a | b)
            .collect();
        BitSet {
            len: self.len,
            words,
        }
    }

    pub fn intersection(&self, other: &BitSet) -> BitSet {
        debug_assert_eq!(self.len, other.len);
        let words = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| a & b)
            .collect();
        BitSet {
            len: self.len,
            words,
        }
    }

    pub fn complement(&self) -> BitSet {
        let mut s = BitSet {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        s.trim();
        s
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let b = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + b)
                }
            })
        })
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// `"0101..."` with bit 0 first; the wire form used in JSON reports.
    pub fn bit_string(&self) -> String {
        let mut s = String::with_capacity(self.len);
        for i in 0..self.len {
            s.push(if self.contains(i) { '1' } else { '0' });
        }
        s
    }

    pub fn parse_bit_string(text: &str) -> Option<Self> {
        let mut s = BitSet::empty(text.len());
        for (i, ch) in text.chars().enumerate() {
            match ch {
                '1' => s.insert(i),
                '0' => {}
                _ => return None,
            }
        }
        Some(s)
    }
}

/// Symmetric 0/1 matrix with zero diagonal, one bit row per vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    wpr: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zero(n: usize) -> Self {
        let wpr = words_for(n);
        BitMatrix {
            n,
            wpr,
            words: vec![0; wpr * n],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words_per_row(&self) -> usize {
        self.wpr
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.words[i * self.wpr..(i + 1) * self.wpr]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.words[i * self.wpr + j / 64] >> (j % 64) & 1 == 1
    }

    /// Insert or remove the undirected edge `{i, j}`; `i == j` is ignored.
    pub fn set_edge(&mut self, i: usize, j: usize, present: bool) {
        if i == j {
            return;
        }
        for (a, b) in [(i, j), (j, i)] {
            let w = a * self.wpr + b / 64;
            if present {
                self.words[w] |= 1u64 << (b % 64);
            } else {
                self.words[w] &= !(1u64 << (b % 64));
            }
        }
    }

    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn edge_count(&self) -> usize {
        let total: usize = (0..self.n).map(|i| self.degree(i)).sum();
        total / 2
    }

    pub fn is_symmetric_zero_diag(&self) -> bool {
        for i in 0..self.n {
            if self.get(i, i) {
                return false;
            }
            for j in 0..i {
                if self.get(i, j) != self.get(j, i) {
                    return false;
                }
            }
        }
        true
    }
}
