//! Packed bitmaps over `Z/n` with cyclic rotation, the workhorse behind
//! sumset and product-set enumeration.

/// Fixed-length bitmap over `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitRing {
    n: usize,
    words: Vec<u64>,
}

impl BitRing {
    pub fn new(n: usize) -> Self {
        BitRing {
            n,
            words: vec![0u64; n.div_ceil(64)],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.n);
        self.words[i / 64] |= 1u64 << (i % 64);
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.n);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&i| self.get(i))
    }

    /// `self |= rot(other, shift)` where `rot` sends bit `i` to `(i + shift) mod n`.
    ///
    /// Runs in O(n/64): the rotated image is assembled word by word from the
    /// two source words that straddle each destination word.
    pub fn or_rotated(&mut self, other: &BitRing, shift: usize) {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        if n == 0 {
            return;
        }
        let shift = shift % n;
        // Destination bit j comes from source bit (j - shift) mod n, i.e. the
        // rotated stream equals the doubled source read from offset n - shift.
        let start = n - shift;
        let nwords = self.words.len();
        let (sw, sb) = (start / 64, start % 64);
        for j in 0..nwords {
            let lo = doubled_word(&other.words, n, sw + j);
            let w = if sb == 0 {
                lo
            } else {
                let hi = doubled_word(&other.words, n, sw + j + 1);
                lo >> sb | hi << (64 - sb)
            };
            self.words[j] |= w;
        }
        // Bits at n.. in the top word are garbage from the wraparound; clear.
        let tail = n % 64;
        if tail != 0 {
            self.words[nwords - 1] &= (1u64 << tail) - 1;
        }
    }

    pub fn union_with(&mut self, other: &BitRing) {
        debug_assert_eq!(self.n, other.n);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }
}

/// Word `k` of the conceptual bitstring `src ++ src` (length `2n`), where the
/// second copy starts at bit `n`, not at a word boundary.
#[inline]
fn doubled_word(words: &[u64], n: usize, k: usize) -> u64 {
    let bit = |i: usize| -> u64 {
        if i >= 2 * n {
            return 0;
        }
        let i = if i >= n { i - n } else { i };
        words[i / 64] >> (i % 64) & 1
    };
    // Fast path: whole word inside the first copy.
    let base = k * 64;
    if base + 64 <= n {
        return words[k];
    }
    let mut w = 0u64;
    for b in 0..64 {
        w |= bit(base + b) << b;
    }
    w
}
