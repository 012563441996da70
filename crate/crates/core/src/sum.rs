//! Compensated (Neumaier) summation and a reduction whose result does not
//! depend on the number of worker threads.

use rayon::prelude::*;

/// Fixed chunk length for [`par_ordered_sum`]. The partition depends only on
/// the input length, never on the thread pool.
pub const CHUNK_LEN: usize = 2048;

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

    /// Fold another accumulator into this one (order matters for bit-exactness).
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

/// Compensated sum in iteration order.
pub fn ordered_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// Compensated sum over fixed-length chunks evaluated in parallel, with the
/// per-chunk partials merged in chunk order.
pub fn par_ordered_sum(values: &[f64]) -> f64 {
    let partials: Vec<CompensatedSum> = values
        .par_chunks(CHUNK_LEN)
        .map(|chunk| chunk.iter().copied().collect())
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
    fn recovers_cancelled_terms() {
        let v = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(v.iter().sum::<f64>(), 0.0);
        assert_eq!(ordered_sum(v), 2.0);
    }

    #[test]
    fn many_small_terms() {
        let n = 1_000_000;
        let s = ordered_sum(std::iter::repeat_n(0.1, n));
        assert!((s - 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn parallel_sum_independent_of_thread_count() {
        let values: Vec<f64> = (0..50_000)
            .map(|i| ((i as f64) * 0.37).sin() * 10f64.powi(i % 17 - 8))
            .collect();
        let results: Vec<f64> = [1, 2, 3, 8]
            .iter()
            .map(|&t| {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .unwrap()
                    .install(|| par_ordered_sum(&values))
            })
            .collect();
        for r in &results {
            assert_eq!(r.to_bits(), results[0].to_bits());
        }
        assert!((results[0] - ordered_sum(values.iter().copied())).abs() < 1e-12);
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(par_ordered_sum(&[]), 0.0);
        assert_eq!(ordered_sum(std::iter::empty()), 0.0);
    }
}
