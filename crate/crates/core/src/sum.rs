//! Compensated (Neumaier) summation.

/// Running sum with a Neumaier compensation term.
///
/// The error of the final result is bounded independently of the number of
/// terms, up to a single rounding of the total.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for NeumaierSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        s.extend(iter);
        s
    }
}

/// Compensated sum of a slice.
pub fn compensated_sum(values: &[f64]) -> f64 {
    values.iter().copied().collect::<NeumaierSum>().value()
}

/// Euler (E,1) mean of the partial sums of `terms`: the partial sums are
/// averaged pairwise until one value is left. For an alternating series
/// Σ(−1)^k a_k with a_k a moment sequence the error decays like 2^{−n},
/// and divergent alternating series such as Σ(−1)^k k receive their Abel
/// value. Every step is a convex combination, so rounding does not grow.
pub fn euler_mean(terms: &[f64]) -> f64 {
    let mut acc = NeumaierSum::new();
    let mut partial: Vec<f64> = terms
        .iter()
        .map(|&v| {
            acc.add(v);
            acc.value()
        })
        .collect();
    while partial.len() > 1 {
        for i in 0..partial.len() - 1 {
            partial[i] = 0.5 * (partial[i] + partial[i + 1]);
        }
        partial.pop();
    }
    partial.first().copied().unwrap_or(0.0)
}
