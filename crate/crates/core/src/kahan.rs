//! Compensated (Neumaier) summation.
//!
//! Marginalization and expectation loops sum up to 2^24 terms; plain
//! accumulation can drift past the 1e-12 normalization contract, so every
//! reduction in the crate goes through this accumulator in a fixed order.

/// Running Neumaier sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated total of a slice.
pub fn total(values: &[f64]) -> f64 {
    let mut acc = KahanSum::new();
    for &v in values {
        acc.add(v);
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensates_small_terms() {
        let mut acc = KahanSum::new();
        acc.add(1.0);
        for _ in 0..10 {
            acc.add(1e-17);
        }
        assert_eq!(acc.total(), 1.0 + 1e-16);
    }

    #[test]
    fn total_matches_exact_sum() {
        let xs = vec![0.1; 10];
        assert!((total(&xs) - 1.0).abs() < 1e-15);
    }
}
