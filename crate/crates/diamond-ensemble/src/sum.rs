//! Compensated accumulation for the pairwise energy kernels.

/// Neumaier-compensated accumulator.
///
/// Keeps a running error term so that summing many O(N²) pair contributions
/// stays reproducible to ~1e-12 relative, independent of summation length.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct NeumaierSum {
    s: f64,
    c: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.s + v;
        if self.s.abs() >= v.abs() {
            self.c += (self.s - t) + v;
        } else {
            self.c += (v - t) + self.s;
        }
        self.s = t;
    }

    /// Folds another partial sum in, preserving both compensation terms.
    #[inline]
    pub fn merge(&mut self, other: NeumaierSum) {
        self.add(other.s);
        self.c += other.c;
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.s + self.c
    }
}

/// Compensated sum of an iterator of terms.
pub(crate) fn neumaier_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = NeumaierSum::new();
    for t in terms {
        acc.add(t);
    }
    acc.value()
}
