/// Packed fixed-length bit vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSet {
    words: Vec<u64>,
    len: usize,
}

impl BitSet {
    pub fn new(len: usize, value: bool) -> Self {
        let fill = if value { u64::MAX } else { 0 };
        let mut words = vec![fill; len.div_ceil(64)];
        if value && !len.is_multiple_of(64) {
            if let Some(last) = words.last_mut() {
                *last = (1u64 << (len % 64)) - 1;
            }
        }
        BitSet { words, len }
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
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    pub fn clear(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] &= !(1 << (i & 63));
    }

    /// Clears `start, start + step, start + 2*step, ...` below `len`.
    #[inline]
    pub fn clear_stride(&mut self, start: usize, step: usize) {
        let mut i = start;
        while i < self.len {
            self.words[i >> 6] &= !(1 << (i & 63));
            i += step;
        }
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &word)| {
            let mut w = word;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + bit)
            })
        })
    }
}

impl std::fmt::Display for BitSet {
    /// Index 0 first, as a string of `0`/`1`.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fill_and_tail() {
        let b = BitSet::new(70, true);
        assert_eq!(b.count_ones(), 70);
        assert_eq!(b.iter_ones().last(), Some(69));
        assert_eq!(BitSet::new(64, true).count_ones(), 64);
        assert_eq!(BitSet::new(0, true).count_ones(), 0);
    }

    #[test]
    fn stride_clear() {
        let mut b = BitSet::new(24, true);
        b.clear_stride(3, 11);
        assert_eq!(b.iter_ones().filter(|i| i % 11 == 3).count(), 0);
        assert_eq!(b.count_ones(), 22);
        b.set(3);
        assert!(b.get(3));
        assert_eq!(b.to_string().len(), 24);
    }
}
