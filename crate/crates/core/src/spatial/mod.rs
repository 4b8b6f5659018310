//! Range-query workloads, area-weighted answering over partitions, the MRE
//! metric, and the PrivTree and LDP-grid baselines.

mod ldp_grid;
mod privtree;
mod workload;

pub use ldp_grid::{ldp_grid_build, ldp_grid_build_per_user};
pub use privtree::{privtree_build, PrivTreeParams};
pub use workload::{
    count_in, gen_anchored_workload, gen_uniform_workload, AnchoredParams, RangeQuery, Workload, WorkloadKind,
};

use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::scheme::Partition;

/// Area-weighted estimate of the number of points in `q`. Negative leaf
/// counts are clamped to zero; zero-area leaves contribute nothing.
pub fn answer_query(partition: &Partition, q: &Rect) -> f64 {
    partition
        .leaves()
        .iter()
        .filter(|l| l.rect.area() > 0.0)
        .map(|l| {
            let overlap = l.rect.intersection_area(q);
            if overlap == 0.0 {
                0.0
            } else {
                l.count.max(0.0) * overlap / l.rect.area()
            }
        })
        .sum()
}

/// `τ = 10 · max(1, 1e-4 · N)`.
pub fn smoothing_threshold(n: usize) -> f64 {
    10.0 * (1e-4 * n as f64).max(1.0)
}

/// Mean relative error with the smoothing threshold for population `n`.
pub fn mre(estimates: &[f64], truths: &[u64], n: usize) -> Result<f64> {
    if estimates.len() != truths.len() {
        return Err(Error::LengthMismatch { left: estimates.len(), right: truths.len() });
    }
    if estimates.is_empty() {
        return Err(Error::invalid("MRE of an empty workload"));
    }
    let tau = smoothing_threshold(n);
    let total: f64 = estimates.iter().zip(truths).map(|(e, &y)| (e - y as f64).abs() / (y as f64).max(tau)).sum();
    Ok(total / estimates.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point;
    use crate::scheme::{canonical_partition, CellId};
    use proptest::prelude::*;

    fn grid2(counts: [f64; 4]) -> Partition {
        let kids = CellId::ROOT.children().unwrap();
        Partition::from_leaves(Rect::unit(), kids.iter().zip(counts).map(|(c, n)| (*c, n, true))).unwrap()
    }

    #[test]
    fn thresholds() {
        assert_eq!(smoothing_threshold(5_000), 10.0);
        assert_eq!(smoothing_threshold(100_000), 100.0);
        assert_eq!(smoothing_threshold(20_000), 20.0);
    }

    #[test]
    fn mre_basics() {
        assert_eq!(mre(&[5.0, 50.0], &[5, 50], 100).unwrap(), 0.0);
        // |15-5|/10 and |40-50|/50
        assert!((mre(&[15.0, 40.0], &[5, 50], 100).unwrap() - (1.0 + 0.2) / 2.0).abs() < 1e-15);
        assert!(matches!(mre(&[1.0], &[1, 2], 10), Err(Error::LengthMismatch { .. })));
        assert!(mre(&[], &[], 10).is_err());
    }

    #[test]
    fn answering_by_hand() {
        // Codes 0..3 are LL, LR, UL, UR, so the left half holds leaves 0 and 2.
        let p = grid2([10.0, 20.0, 30.0, 40.0]);
        assert_eq!(answer_query(&p, &Rect::new(0.0, 0.5, 0.0, 1.0).unwrap()), 40.0);
        assert_eq!(answer_query(&p, &Rect::unit()), 100.0);
        assert_eq!(answer_query(&p, &Rect::new(0.5, 1.0, 0.5, 1.0).unwrap()), 40.0);
        assert_eq!(answer_query(&p, &Rect::new(0.0, 0.25, 0.0, 0.5).unwrap()), 5.0);
        let neg = grid2([-10.0, 20.0, 30.0, 40.0]);
        assert_eq!(answer_query(&neg, &Rect::unit()), 90.0);
    }

    #[test]
    fn exact_when_queries_align_with_leaves() {
        let pts: Vec<Point> = (0..64).map(|i| Point::new((i % 8) as f64 / 8.0 + 0.01, (i / 8) as f64 / 8.0 + 0.02)).collect();
        let part = canonical_partition(&pts, &Rect::unit(), 1, 6).unwrap();
        let q = Rect::new(0.25, 0.75, 0.125, 0.5).unwrap();
        assert_eq!(answer_query(&part, &q), count_in(&pts, &q) as f64);
    }

    proptest! {
        #[test]
        fn answering_is_additive(counts in prop::array::uniform4(0.0..100.0f64), x0 in 0.0..0.4f64, x1 in 0.4..0.7f64, x2 in 0.7..1.0f64, y0 in 0.0..0.5f64, y1 in 0.5..1.0f64) {
            let p = grid2(counts);
            let a = answer_query(&p, &Rect::new(x0, x1, y0, y1).unwrap());
            let b = answer_query(&p, &Rect::new(x1, x2, y0, y1).unwrap());
            let ab = answer_query(&p, &Rect::new(x0, x2, y0, y1).unwrap());
            prop_assert!((a + b - ab).abs() < 1e-9 * (1.0 + ab));
        }

        #[test]
        fn mre_scales_linearly(truths in prop::collection::vec(200u64..1000, 1..20), c in 0.1..5.0f64) {
            let resid: Vec<f64> = truths.iter().enumerate().map(|(i, _)| (i as f64 - 3.0) * 7.0).collect();
            let est1: Vec<f64> = truths.iter().zip(&resid).map(|(&y, r)| y as f64 + r).collect();
            let estc: Vec<f64> = truths.iter().zip(&resid).map(|(&y, r)| y as f64 + c * r).collect();
            let base = mre(&est1, &truths, 10_000).unwrap();
            prop_assert!((mre(&estc, &truths, 10_000).unwrap() - c * base).abs() < 1e-9);
        }
    }
}
