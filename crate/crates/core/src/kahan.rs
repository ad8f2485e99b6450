//! Compensated summation with a fixed bucket array per worker.

/// Number of buckets each worker accumulates into.
pub const BUCKETS: usize = 10_000;

/// Kahan accumulator.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub const fn new() -> Self {
        KahanSum {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    pub fn from_parts(sum: f64, compensation: f64) -> Self {
        KahanSum { sum, compensation }
    }

    pub fn parts(&self) -> (f64, f64) {
        (self.sum, self.compensation)
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    /// Folds `other` in: its running sum, then its pending correction.
    pub fn merge(&mut self, other: &KahanSum) {
        self.add(other.sum);
        self.add(-other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum - self.compensation
    }

    pub fn is_zero(&self) -> bool {
        self.sum == 0.0 && self.compensation == 0.0
    }
}

/// Fixed-size array of [`KahanSum`]s; a term goes to the bucket chosen by the caller.
#[derive(Clone, Debug, PartialEq)]
pub struct KahanBuckets {
    buckets: Vec<KahanSum>,
}

impl Default for KahanBuckets {
    fn default() -> Self {
        KahanBuckets::new(BUCKETS)
    }
}

impl KahanBuckets {
    pub fn new(count: usize) -> Self {
        assert!(count > 0);
        KahanBuckets {
            buckets: vec![KahanSum::new(); count],
        }
    }

    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    #[inline]
    pub fn add(&mut self, slot: usize, value: f64) {
        let n = self.buckets.len();
        self.buckets[slot % n].add(value);
    }

    pub fn bucket(&self, slot: usize) -> &KahanSum {
        &self.buckets[slot]
    }

    pub fn set_bucket(&mut self, slot: usize, value: KahanSum) {
        self.buckets[slot] = value;
    }

    /// Bucket-by-bucket merge; both arrays must have the same length.
    pub fn merge(&mut self, other: &KahanBuckets) {
        assert_eq!(self.buckets.len(), other.buckets.len());
        for (a, b) in self.buckets.iter_mut().zip(&other.buckets) {
            a.merge(b);
        }
    }

    /// Buckets summed in index order.
    pub fn total(&self) -> KahanSum {
        let mut acc = KahanSum::new();
        for b in &self.buckets {
            acc.merge(b);
        }
        acc
    }

    /// `(slot, bucket)` for every non-zero bucket.
    pub fn nonzero(&self) -> impl Iterator<Item = (usize, &KahanSum)> {
        self.buckets.iter().enumerate().filter(|(_, b)| !b.is_zero())
    }
}
