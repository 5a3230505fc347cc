//! Packed open/closed assignment on a fixed, indexed edge set.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeConfig {
    len: usize,
    words: Vec<u64>,
}

impl EdgeConfig {
    pub fn all_closed(len: usize) -> Self {
        EdgeConfig { len, words: vec![0; len.div_ceil(64)] }
    }

    pub fn all_open(len: usize) -> Self {
        let mut c = Self::all_closed(len);
        c.words.iter_mut().for_each(|w| *w = !0);
        c.trim();
        c
    }

    /// Configuration whose edge `i` is open iff bit `i` of `bits` is set.
    pub fn from_bits(len: usize, bits: u64) -> Self {
        assert!(len <= 64, "from_bits supports at most 64 edges");
        let mut c = Self::all_closed(len);
        if len > 0 {
            c.words[0] = bits;
            c.trim();
        }
        c
    }

    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut c = Self::all_closed(len);
        for i in 0..len {
            if f(i) {
                c.set(i, true);
            }
        }
        c
    }

    fn trim(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, open: bool) {
        debug_assert!(i < self.len);
        let m = 1u64 << (i & 63);
        if open {
            self.words[i >> 6] |= m;
        } else {
            self.words[i >> 6] &= !m;
        }
    }

    pub fn count_open(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Bit pattern of a configuration with at most 64 edges.
    pub fn bits(&self) -> u64 {
        assert!(self.len <= 64, "bits() supports at most 64 edges");
        self.words.first().copied().unwrap_or(0)
    }

    /// Edgewise order: every edge open here is open in `other`.
    pub fn leq(&self, other: &EdgeConfig) -> bool {
        debug_assert_eq!(self.len, other.len);
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn iter_open(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * 64 + t)
            })
        })
    }

    /// Number of edges on which the two configurations differ.
    pub fn hamming(&self, other: &EdgeConfig) -> usize {
        self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as usize).sum()
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for EdgeConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "EdgeConfig({s})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn extremes() {
        for len in [0, 1, 63, 64, 65, 130] {
            assert_eq!(EdgeConfig::all_open(len).count_open(), len);
            assert_eq!(EdgeConfig::all_closed(len).count_open(), 0);
            assert!(EdgeConfig::all_closed(len).leq(&EdgeConfig::all_open(len)));
        }
        assert!(!EdgeConfig::all_open(3).leq(&EdgeConfig::all_closed(3)));
    }

    proptest! {
        #[test]
        fn set_get_and_iter(len in 1usize..200, ops in proptest::collection::vec((0usize..200, any::<bool>()), 0..100)) {
            let mut c = EdgeConfig::all_closed(len);
            let mut model = vec![false; len];
            for (i, v) in ops {
                let i = i % len;
                c.set(i, v);
                model[i] = v;
            }
            for (i, &m) in model.iter().enumerate() {
                prop_assert_eq!(c.get(i), m);
            }
            let open: Vec<usize> = c.iter_open().collect();
            let expect: Vec<usize> = (0..len).filter(|&i| model[i]).collect();
            prop_assert_eq!(open, expect);
        }

        #[test]
        fn bits_round_trip(bits in any::<u64>(), len in 1usize..=64) {
            let c = EdgeConfig::from_bits(len, bits);
            let mask = if len == 64 { !0 } else { (1u64 << len) - 1 };
            prop_assert_eq!(c.bits(), bits & mask);
        }
    }
}
