//! Train/test splitting, kNN and logistic-regression classifiers, and binary
//! classification metrics.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mechanisms::RngStream;

/// Train/test split description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    pub train_fraction: f64,
    pub seed: u64,
}

impl SplitSpec {
    pub fn apply(&self, n: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        split_train_test(n, self.train_fraction, &mut RngStream::new(self.seed, 0))
    }
}

/// Shuffles `0..n` and cuts it into `round(n · train_fraction)` training
/// indices and the rest.
pub fn split_train_test(n: usize, train_fraction: f64, rng: &mut RngStream) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::invalid(format!("train fraction must lie in (0, 1), got {train_fraction}")));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let cut = (n as f64 * train_fraction).round() as usize;
    let test = idx.split_off(cut);
    Ok((idx, test))
}

fn check_labels(points: &[Point], labels: &[u8]) -> Result<()> {
    if points.len() != labels.len() {
        return Err(Error::LengthMismatch { left: points.len(), right: labels.len() });
    }
    if labels.iter().any(|&l| l > 1) {
        return Err(Error::Data("labels must be 0 or 1".into()));
    }
    Ok(())
}

/// k-nearest-neighbour vote in Euclidean distance. Weighted votes use
/// `1 / (d + 1e-12)`; ties go to label 0.
pub fn knn_predict(train: &[Point], labels: &[u8], test: &[Point], k: usize, weighted: bool) -> Result<Vec<u8>> {
    check_labels(train, labels)?;
    if train.is_empty() {
        return Err(Error::Data("kNN needs a non-empty training set".into()));
    }
    if k == 0 || k > train.len() {
        return Err(Error::invalid(format!("k = {k} must lie in 1..={}", train.len())));
    }
    Ok(test
        .par_iter()
        .map(|q| {
            // (squared distance, label), kept sorted, at most k long
            let mut best: Vec<(f64, u8)> = Vec::with_capacity(k + 1);
            for (p, &l) in train.iter().zip(labels) {
                let d2 = (p.x - q.x).powi(2) + (p.y - q.y).powi(2);
                if best.len() == k && d2 >= best[k - 1].0 {
                    continue;
                }
                let at = best.partition_point(|(d, _)| *d <= d2);
                best.insert(at, (d2, l));
                best.truncate(k);
            }
            let mut votes = [0.0f64; 2];
            for (d2, l) in best {
                votes[l as usize] += if weighted { 1.0 / (d2.sqrt() + 1e-12) } else { 1.0 };
            }
            (votes[1] > votes[0]) as u8
        })
        .collect())
}

/// Linear classifier `P(y = 1 | x) = σ(w·x + b)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogisticModel {
    pub w: [f64; 2],
    pub b: f64,
}

impl LogisticModel {
    pub fn params(&self) -> [f64; 3] {
        [self.w[0], self.w[1], self.b]
    }

    pub fn probability(&self, p: &Point) -> f64 {
        let z = self.w[0] * p.x + self.w[1] * p.y + self.b;
        1.0 / (1.0 + (-z).exp())
    }

    pub fn predict(&self, points: &[Point]) -> Vec<u8> {
        points.iter().map(|p| (self.probability(p) > 0.5) as u8).collect()
    }
}

// log(1 + e^z) without overflow
fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Mean logistic loss at parameters `[w0, w1, b]`.
pub fn logistic_loss(params: &[f64; 3], points: &[Point], labels: &[u8]) -> f64 {
    let total: f64 = points
        .iter()
        .zip(labels)
        .map(|(p, &y)| {
            let z = params[0] * p.x + params[1] * p.y + params[2];
            softplus(z) - y as f64 * z
        })
        .sum();
    total / points.len() as f64
}

/// Gradient of [`logistic_loss`].
pub fn logistic_gradient(params: &[f64; 3], points: &[Point], labels: &[u8]) -> [f64; 3] {
    let mut g = [0.0; 3];
    for (p, &y) in points.iter().zip(labels) {
        let z = params[0] * p.x + params[1] * p.y + params[2];
        let r = 1.0 / (1.0 + (-z).exp()) - y as f64;
        g[0] += r * p.x;
        g[1] += r * p.y;
        g[2] += r;
    }
    let n = points.len() as f64;
    g.map(|v| v / n)
}

/// Full-batch gradient descent from zero weights. A step that would raise
/// the loss is rejected and the learning rate halved.
pub fn logreg_fit(points: &[Point], labels: &[u8], iters: usize, lr: f64) -> Result<LogisticModel> {
    check_labels(points, labels)?;
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::invalid(format!("learning rate must be positive, got {lr}")));
    }
    let ones = labels.iter().filter(|&&l| l == 1).count();
    if ones == 0 || ones == labels.len() {
        return Err(Error::Data("logistic regression needs both classes".into()));
    }
    let mut params = [0.0; 3];
    let mut loss = logistic_loss(&params, points, labels);
    let mut lr = lr;
    for _ in 0..iters {
        let g = logistic_gradient(&params, points, labels);
        let cand = [params[0] - lr * g[0], params[1] - lr * g[1], params[2] - lr * g[2]];
        let cand_loss = logistic_loss(&cand, points, labels);
        if cand_loss <= loss {
            params = cand;
            loss = cand_loss;
        } else {
            lr *= 0.5;
            if lr < 1e-12 {
                break;
            }
        }
    }
    Ok(LogisticModel { w: [params[0], params[1]], b: params[2] })
}

/// Binary scores with 1 as the positive class.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
}

/// F1, precision and recall. Zero denominators give 0.
pub fn f1_precision_recall(pred: &[u8], truth: &[u8]) -> Result<Scores> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch { left: pred.len(), right: truth.len() });
    }
    let (mut tp, mut fp, mut fneg) = (0usize, 0usize, 0usize);
    for (&p, &t) in pred.iter().zip(truth) {
        match (p, t) {
            (1, 1) => tp += 1,
            (1, _) => fp += 1,
            (_, 1) => fneg += 1,
            _ => {}
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fneg);
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    Ok(Scores { f1, precision, recall })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn blobs(n: usize, seed: u64) -> (Vec<Point>, Vec<u8>) {
        let mut rng = RngStream::new(seed, 0);
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        for i in 0..n {
            let l = (i % 2) as u8;
            let c = if l == 0 { 0.2 } else { 0.8 };
            pts.push(Point::new(c + 0.1 * (rng.random::<f64>() - 0.5), c + 0.1 * (rng.random::<f64>() - 0.5)));
            labels.push(l);
        }
        (pts, labels)
    }

    #[test]
    fn split_partitions_indices() {
        let (train, test) = split_train_test(100, 0.7, &mut RngStream::new(1, 0)).unwrap();
        assert_eq!((train.len(), test.len()), (70, 30));
        let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
        all.sort();
        assert_eq!(all, (0..100).collect::<Vec<_>>());
        assert!(split_train_test(10, 1.0, &mut RngStream::new(1, 0)).is_err());
        let spec = SplitSpec { train_fraction: 0.7, seed: 3 };
        assert_eq!(spec.apply(50).unwrap(), spec.apply(50).unwrap());
    }

    #[test]
    fn knn_examples() {
        let train = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)];
        assert_eq!(knn_predict(&train, &[0, 1, 0], &[Point::new(1.0, 0.0)], 1, true).unwrap(), vec![1]);
        assert_eq!(knn_predict(&train, &[1, 1, 1], &[Point::new(0.3, 0.3)], 2, true).unwrap(), vec![1]);
        assert_eq!(knn_predict(&train, &[0, 0, 1], &[Point::new(0.0, 1.0), Point::new(9.0, 9.0)], 3, false).unwrap(), vec![0, 0]);
        // one vote each: tie goes to 0
        assert_eq!(knn_predict(&train[..2], &[1, 0], &[Point::new(0.5, 0.0)], 2, false).unwrap(), vec![0]);
        assert!(knn_predict(&[], &[], &[Point::new(0.0, 0.0)], 1, true).is_err());
        assert!(knn_predict(&train, &[0, 0, 1], &[], 4, true).is_err());
    }

    #[test]
    fn knn_matches_brute_force_sort() {
        let (pts, labels) = blobs(300, 2);
        let mut rng = RngStream::new(3, 0);
        let queries: Vec<Point> = (0..50).map(|_| Point::new(rng.random(), rng.random())).collect();
        let got = knn_predict(&pts, &labels, &queries, 7, true).unwrap();
        for (q, g) in queries.iter().zip(got) {
            let mut order: Vec<usize> = (0..pts.len()).collect();
            order.sort_by(|&a, &b| pts[a].distance(q).total_cmp(&pts[b].distance(q)));
            let mut votes = [0.0; 2];
            for &i in &order[..7] {
                votes[labels[i] as usize] += 1.0 / (pts[i].distance(q) + 1e-12);
            }
            assert_eq!(g, (votes[1] > votes[0]) as u8);
        }
    }

    #[test]
    fn logreg_separates_blobs() {
        let (pts, labels) = blobs(400, 4);
        let m = logreg_fit(&pts, &labels, 500, 1.0).unwrap();
        let acc = m.predict(&pts).iter().zip(&labels).filter(|(a, b)| a == b).count() as f64 / pts.len() as f64;
        assert!(acc >= 0.95, "accuracy {acc}");
        let start = logistic_loss(&[0.0; 3], &pts, &labels);
        assert!(logistic_loss(&m.params(), &pts, &labels) <= start);
    }

    #[test]
    fn logreg_edge_cases() {
        let (pts, labels) = blobs(20, 5);
        let m = logreg_fit(&pts, &labels, 0, 1.0).unwrap();
        assert_eq!(m, LogisticModel { w: [0.0, 0.0], b: 0.0 });
        assert!(m.predict(&pts).iter().all(|&p| p == 0));
        assert!(matches!(logreg_fit(&pts, &[1; 20], 10, 1.0), Err(Error::Data(_))));
    }

    #[test]
    fn gradient_check() {
        let (pts, labels) = blobs(200, 6);
        let mut rng = RngStream::new(7, 0);
        let h = 1e-5;
        for _ in 0..20 {
            let w: [f64; 3] = [rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
            let g = logistic_gradient(&w, &pts, &labels);
            for j in 0..3 {
                let (mut up, mut down) = (w, w);
                up[j] += h;
                down[j] -= h;
                let fd = (logistic_loss(&up, &pts, &labels) - logistic_loss(&down, &pts, &labels)) / (2.0 * h);
                let rel = (fd - g[j]).abs() / g[j].abs().max(1e-8);
                assert!(rel < 1e-6, "component {j}: analytic {} vs numeric {fd}", g[j]);
            }
        }
    }

    #[test]
    fn metric_examples() {
        let s = f1_precision_recall(&[1, 0, 1, 0], &[1, 0, 1, 0]).unwrap();
        assert_eq!(s, Scores { f1: 1.0, precision: 1.0, recall: 1.0 });
        let s = f1_precision_recall(&[0, 0, 0], &[1, 0, 1]).unwrap();
        assert_eq!(s, Scores { f1: 0.0, precision: 0.0, recall: 0.0 });
        let s = f1_precision_recall(&[1, 1, 0, 0], &[1, 0, 1, 0]).unwrap();
        assert_eq!(s, Scores { f1: 0.5, precision: 0.5, recall: 0.5 });
        assert!(f1_precision_recall(&[1], &[]).is_err());
    }

    proptest! {
        #[test]
        fn f1_is_permutation_invariant(pairs in prop::collection::vec((0u8..2, 0u8..2), 1..60), seed in any::<u64>()) {
            let (pred, truth): (Vec<u8>, Vec<u8>) = pairs.iter().copied().unzip();
            let mut shuffled = pairs.clone();
            shuffled.shuffle(&mut RngStream::new(seed, 0));
            let (p2, t2): (Vec<u8>, Vec<u8>) = shuffled.into_iter().unzip();
            prop_assert_eq!(f1_precision_recall(&pred, &truth).unwrap(), f1_precision_recall(&p2, &t2).unwrap());
        }
    }
}
