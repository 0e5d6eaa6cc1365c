//! Word-packed fixed-width bit vectors.
//!
//! Bit `i` lives in word `i / 64` at position `i % 64`. Bits past `len` in the
//! last word are always zero, so word-wise equality, hashing and popcount need
//! no masking.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { words: vec![0; words_for(len)], len }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = BitVec { words: vec![!0; words_for(len)], len };
        v.trim();
        v
    }

    fn trim(&mut self) {
        let tail = self.len % WORD;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] |= 1 << (i % WORD);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] &= !(1 << (i % WORD));
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of set bits in `[start, start + width)`.
    pub fn count_ones_in(&self, start: usize, width: usize) -> usize {
        (start..start + width).filter(|&i| self.get(i)).count()
    }

    /// True iff some bit in `[start, start + width)` is set in both vectors.
    #[inline]
    pub fn intersects_in(&self, other: &BitVec, start: usize, width: usize) -> bool {
        let end = start + width;
        let mut i = start;
        while i < end {
            let w = i / WORD;
            let lo = i % WORD;
            let hi = (end - w * WORD).min(WORD);
            let mask = if hi - lo == WORD { !0 } else { ((1u64 << (hi - lo)) - 1) << lo };
            if self.words[w] & other.words[w] & mask != 0 {
                return true;
            }
            i = (w + 1) * WORD;
        }
        false
    }

    pub fn or(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.or_assign(other);
        out
    }

    pub fn or_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= *b;
        }
    }

    pub fn and_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= *b;
        }
    }

    /// Popcount of `self & other` without materializing it.
    pub fn and_count(&self, other: &BitVec) -> usize {
        assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones() as usize).sum()
    }

    /// Every set bit of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BitVec) -> bool {
        self.len == other.len && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + tz)
            })
        })
    }

    /// Parse a string of `0`/`1` characters; whitespace and `|` are ignored.
    pub fn from_bit_str(s: &str) -> Result<BitVec> {
        let digits: Vec<char> = s.chars().filter(|c| !c.is_whitespace() && *c != '|').collect();
        let mut v = BitVec::zeros(digits.len());
        for (i, c) in digits.iter().enumerate() {
            match c {
                '1' => v.set(i),
                '0' => {}
                other => return Err(Error::InvalidBit(format!("unexpected character {other:?}"))),
            }
        }
        Ok(v)
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect()
    }

    /// Hex form reading left to right like the bit string: each hex digit
    /// carries four consecutive bits, the lowest index in its most
    /// significant position. The tail is zero padded.
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.len.div_ceil(4));
        for chunk in 0..self.len.div_ceil(4) {
            let mut nibble = 0u32;
            for k in 0..4 {
                let i = chunk * 4 + k;
                nibble <<= 1;
                if i < self.len && self.get(i) {
                    nibble |= 1;
                }
            }
            out.push(char::from_digit(nibble, 16).unwrap());
        }
        out
    }

    pub fn from_hex(hex: &str, len: usize) -> Result<BitVec> {
        if hex.len() != len.div_ceil(4) {
            return Err(Error::InvalidBit(format!(
                "hex string of {} digits cannot hold exactly {len} bits",
                hex.len()
            )));
        }
        let mut v = BitVec::zeros(len);
        for (chunk, c) in hex.chars().enumerate() {
            let nibble = c.to_digit(16).ok_or_else(|| Error::InvalidBit(format!("bad hex digit {c:?}")))?;
            for k in 0..4 {
                if nibble >> (3 - k) & 1 == 1 {
                    let i = chunk * 4 + k;
                    if i >= len {
                        return Err(Error::InvalidBit("nonzero padding in hex string".into()));
                    }
                    v.set(i);
                }
            }
        }
        Ok(v)
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({})", self.to_bit_string())
    }
}
