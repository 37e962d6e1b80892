//! Compensated summation.
//!
//! Every floating-point reduction in this crate runs in a fixed ascending
//! order so that results do not depend on the number of worker threads.
//! Parallel callers sum disjoint blocks independently and feed the block
//! totals through a second accumulator, again in ascending block order.

/// Kahan compensated accumulator. Error is bounded by 2 ulp per added term,
/// independent of the number of terms.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    compensation: f64,
}

/// Render a float with 17 significant digits, '.' decimal separator, no
/// grouping. 17 digits round-trip every f64, so emitted CSV/JSON values can
/// be re-read exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum
    }

    /// Sum an iterator in its own order.
    pub fn sum_iter<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc.value()
    }
}
