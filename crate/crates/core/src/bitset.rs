//! Fixed-width bitsets over `u64` words.
//!
//! The graph stores its adjacency as one flat `Vec<u64>` with `words` words per
//! row; the free functions here operate on such word slices so the clique search
//! can work on preallocated buffers without touching the allocator.

#[inline]
pub fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

#[inline]
pub fn get(words: &[u64], i: usize) -> bool {
    words[i >> 6] & (1u64 << (i & 63)) != 0
}

#[inline]
pub fn set(words: &mut [u64], i: usize) {
    words[i >> 6] |= 1u64 << (i & 63);
}

#[inline]
pub fn clear(words: &mut [u64], i: usize) {
    words[i >> 6] &= !(1u64 << (i & 63));
}

#[inline]
pub fn count(words: &[u64]) -> usize {
    words.iter().map(|w| w.count_ones() as usize).sum()
}

/// `dst = a & b`, returning the popcount of the result.
#[inline]
pub fn and_into(dst: &mut [u64], a: &[u64], b: &[u64]) -> usize {
    let mut n = 0;
    for ((d, x), y) in dst.iter_mut().zip(a).zip(b) {
        *d = x & y;
        n += d.count_ones() as usize;
    }
    n
}

/// Clears every bit with index `<= i`.
#[inline]
pub fn clear_through(words: &mut [u64], i: usize) {
    let w = i >> 6;
    for x in &mut words[..w] {
        *x = 0;
    }
    let b = i & 63;
    words[w] &= if b == 63 { 0 } else { !0u64 << (b + 1) };
}

/// Iterator over the set bits of a word slice, in increasing order.
pub struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl<'a> Ones<'a> {
    pub fn new(words: &'a [u64]) -> Self {
        Ones {
            words,
            idx: 0,
            cur: words.first().copied().unwrap_or(0),
        }
    }
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let t = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + t);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

pub fn ones(words: &[u64]) -> Ones<'_> {
    Ones::new(words)
}
