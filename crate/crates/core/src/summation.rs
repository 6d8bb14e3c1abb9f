//! Compensated floating-point accumulation.
//!
//! Every real-valued sum in the crate goes through [`CompensatedSum`], fed in a
//! fixed order. Parallel reductions split the input into blocks of a fixed
//! size (independent of the worker count) and merge the block partials in
//! block order, so results are bit-identical for any number of threads.

use rayon::prelude::*;

/// Block length for [`par_sum_by`]; fixed so the reduction tree never depends
/// on the thread pool.
pub const REDUCTION_BLOCK: usize = 4096;

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another partial into this one. Order matters for bit-reproducibility.
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        acc.extend(iter);
        acc
    }
}

/// Compensated sum of an ordered sequence.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    values.into_iter().collect::<CompensatedSum>().value()
}

/// Deterministic parallel sum of `term(item)` over `items`, in slice order.
pub fn par_sum_by<T, F>(items: &[T], term: F) -> f64
where
    T: Sync,
    F: Fn(&T) -> f64 + Sync,
{
    let partials: Vec<CompensatedSum> = items
        .par_chunks(REDUCTION_BLOCK)
        .map(|block| block.iter().map(&term).collect())
        .collect();
    let mut total = CompensatedSum::new();
    for p in &partials {
        total.merge(p);
    }
    total.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms_lost_by_naive_sum() {
        let values = [1.0, 1e100, 1.0, -1e100];
        let naive: f64 = values.iter().sum();
        assert_eq!(naive, 0.0);
        assert_eq!(compensated_sum(values), 2.0);
    }

    #[test]
    fn harmonic_partial_sum() {
        let h: f64 = compensated_sum((1..=1000).map(|n| 1.0 / n as f64));
        assert!((h - 7.485_470_860_550_345).abs() < 1e-14);
    }

    #[test]
    fn parallel_sum_independent_of_pool_size() {
        let items: Vec<u64> = (1..200_000).collect();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| par_sum_by(&items, |&n| 1.0 / (n as f64).powi(2)))
        };
        let one = run(1);
        assert_eq!(one.to_bits(), run(3).to_bits());
        assert_eq!(one.to_bits(), run(8).to_bits());
    }
}
