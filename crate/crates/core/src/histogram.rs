use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Counts of output lengths.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Histogram {
    pub bins: BTreeMap<u64, u64>,
    pub total: u64,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, length: u64) {
        debug_assert!(length >= 1);
        *self.bins.entry(length).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn mean(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let sum: f64 = self.bins.iter().map(|(&l, &c)| l as f64 * c as f64).sum();
        sum / self.total as f64
    }

    /// Fraction of observations with length `>= threshold`.
    pub fn tail_mass(&self, threshold: u64) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let tail: u64 = self.bins.range(threshold..).map(|(_, &c)| c).sum();
        tail as f64 / self.total as f64
    }

    /// Most frequent length; ties go to the shorter length.
    pub fn modal_length(&self) -> Option<u64> {
        self.bins
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(&l, _)| l)
    }

    /// Counts summed over `[1], [2,3], [4,7], ...`, up to the longest observed length.
    pub fn octave_counts(&self) -> Vec<u64> {
        let Some((&max, _)) = self.bins.last_key_value() else {
            return Vec::new();
        };
        let octaves = (u64::BITS - max.leading_zeros()) as usize;
        let mut counts = vec![0; octaves];
        for (&l, &c) in &self.bins {
            counts[(u64::BITS - 1 - l.leading_zeros()) as usize] += c;
        }
        counts
    }

    /// Least-squares slope of `ln(count)` against `ln(length)` over nonempty
    /// bins. `None` with fewer than two bins.
    pub fn loglog_slope(&self) -> Option<f64> {
        let points: Vec<(f64, f64)> = self
            .bins
            .iter()
            .filter(|(_, &c)| c > 0)
            .map(|(&l, &c)| ((l as f64).ln(), (c as f64).ln()))
            .collect();
        if points.len() < 2 {
            return None;
        }
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    }
}

/// Binwise sum.
pub fn merge_histograms(mut a: Histogram, b: Histogram) -> Histogram {
    if a.bins.len() < b.bins.len() {
        return merge_histograms(b, a);
    }
    for (l, c) in b.bins {
        *a.bins.entry(l).or_insert(0) += c;
    }
    a.total += b.total;
    a
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn from_pairs(pairs: &[(u64, u64)]) -> Histogram {
        let mut h = Histogram::new();
        for &(l, c) in pairs {
            for _ in 0..c {
                h.add(l);
            }
        }
        h
    }

    #[test]
    fn merge_identity() {
        let h = from_pairs(&[(1, 5), (3, 2)]);
        assert_eq!(merge_histograms(h.clone(), Histogram::new()), h);
        assert_eq!(merge_histograms(Histogram::new(), h.clone()), h);
    }

    #[test]
    fn statistics() {
        let h = from_pairs(&[(1, 6), (2, 2), (3, 1), (8, 1)]);
        assert_eq!(h.total, 10);
        assert!((h.mean() - 2.1).abs() < 1e-12);
        assert!((h.tail_mass(3) - 0.2).abs() < 1e-12);
        assert_eq!(h.modal_length(), Some(1));
        assert_eq!(h.octave_counts(), vec![6, 3, 0, 1]);
        assert!(h.loglog_slope().unwrap() < 0.0);
        assert_eq!(Histogram::new().loglog_slope(), None);
        assert!(Histogram::new().octave_counts().is_empty());
    }

    #[test]
    fn exact_power_law_slope() {
        // count = 1024 / length^2 over lengths 1, 2, 4, 8, 16, 32
        let pairs: Vec<_> = (0..6).map(|k| (1u64 << k, 1024 >> (2 * k))).collect();
        let slope = from_pairs(&pairs).loglog_slope().unwrap();
        assert!((slope + 2.0).abs() < 1e-12);
    }

    fn arb_hist() -> impl Strategy<Value = Histogram> {
        prop::collection::btree_map(1u64..200, 1u64..50, 0..20).prop_map(|bins| Histogram {
            total: bins.values().sum(),
            bins,
        })
    }

    proptest! {
        #[test]
        fn merge_commutes_and_associates(a in arb_hist(), b in arb_hist(), c in arb_hist()) {
            prop_assert_eq!(merge_histograms(a.clone(), b.clone()), merge_histograms(b.clone(), a.clone()));
            prop_assert_eq!(
                merge_histograms(merge_histograms(a.clone(), b.clone()), c.clone()),
                merge_histograms(a.clone(), merge_histograms(b.clone(), c.clone()))
            );
            prop_assert_eq!(merge_histograms(a.clone(), b.clone()).total, a.total + b.total);
        }
    }
}
