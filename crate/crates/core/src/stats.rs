//! Streaming per-node mean/variance accumulators that merge associatively.
//!
//! Ensemble reductions must not depend on how rayon splits the work, so
//! partial results are combined with the parallel variance merge (Chan et
//! al.) and always in a fixed pairwise order.

/// Moments of `count` series observed so far, element-wise over the nodes.
#[derive(Debug, Clone)]
pub(crate) struct SeriesStats {
    pub(crate) count: usize,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl SeriesStats {
    pub(crate) fn leaf(series: &[f64]) -> Self {
        Self {
            count: 1,
            mean: series.to_vec(),
            m2: vec![0.0; series.len()],
        }
    }

    pub(crate) fn merge(mut self, other: Self) -> Self {
        debug_assert_eq!(self.mean.len(), other.mean.len());
        let na = self.count as f64;
        let nb = other.count as f64;
        let n = na + nb;
        for k in 0..self.mean.len() {
            let delta = other.mean[k] - self.mean[k];
            self.mean[k] += delta * nb / n;
            self.m2[k] += other.m2[k] + delta * delta * na * nb / n;
        }
        self.count += other.count;
        self
    }

    pub(crate) fn mean(&self) -> &[f64] {
        &self.mean
    }

    /// Unbiased sample variance per node; requires count >= 2.
    pub(crate) fn sample_variance(&self) -> Vec<f64> {
        let denom = (self.count - 1) as f64;
        self.m2.iter().map(|&m2| m2 / denom).collect()
    }
}

/// Reduces leaves in a fixed binary-tree order, so the result is identical
/// for any thread count that produced the leaves.
pub(crate) fn reduce_pairwise(mut layer: Vec<SeriesStats>) -> Option<SeriesStats> {
    if layer.is_empty() {
        return None;
    }
    while layer.len() > 1 {
        let mut next = Vec::with_capacity(layer.len() / 2 + 1);
        let mut iter = layer.into_iter();
        while let Some(a) = iter.next() {
            match iter.next() {
                Some(b) => next.push(a.merge(b)),
                None => next.push(a),
            }
        }
        layer = next;
    }
    layer.pop()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(series: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
        let n = series.len() as f64;
        let len = series[0].len();
        let mut mean = vec![0.0; len];
        for s in series {
            for k in 0..len {
                mean[k] += s[k] / n;
            }
        }
        let mut var = vec![0.0; len];
        for s in series {
            for k in 0..len {
                var[k] += (s[k] - mean[k]).powi(2) / (n - 1.0);
            }
        }
        (mean, var)
    }

    #[test]
    fn pairwise_reduction_matches_the_two_pass_formulas() {
        let series: Vec<Vec<f64>> = (0..7)
            .map(|i| {
                (0..5)
                    .map(|k| ((i * 31 + k * 7) % 13) as f64 * 0.37 - 1.9)
                    .collect()
            })
            .collect();
        let (mean, var) = naive(&series);
        let stats = reduce_pairwise(series.iter().map(|s| SeriesStats::leaf(s)).collect()).unwrap();
        assert_eq!(stats.count, 7);
        for k in 0..5 {
            assert!((stats.mean()[k] - mean[k]).abs() < 1e-13);
            assert!((stats.sample_variance()[k] - var[k]).abs() < 1e-13);
        }
    }

    #[test]
    fn merge_order_is_fixed_by_the_tree_not_by_chunking() {
        let series: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, (i * i) as f64]).collect();
        let full = reduce_pairwise(series.iter().map(|s| SeriesStats::leaf(s)).collect()).unwrap();
        // Simulate two workers that each reduced half, then a final merge of
        // partials in tree order: identical bits required.
        let left = reduce_pairwise(series[..3].iter().map(|s| SeriesStats::leaf(s)).collect());
        let right = reduce_pairwise(series[3..].iter().map(|s| SeriesStats::leaf(s)).collect());
        // Not the same tree shape, so only near-equality is claimed here; the
        // bit-exact guarantee in the ensemble comes from reducing leaves, not
        // partials.
        let split = left.unwrap().merge(right.unwrap());
        for k in 0..2 {
            assert!((full.mean()[k] - split.mean()[k]).abs() < 1e-12);
            assert!((full.sample_variance()[k] - split.sample_variance()[k]).abs() < 1e-12);
        }
        assert_eq!(full.count, 6);
    }

    #[test]
    fn empty_reduction_is_none() {
        assert!(reduce_pairwise(Vec::new()).is_none());
    }
}
