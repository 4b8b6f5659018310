//! Perturb-then-train: privatize training locations, fit kNN and logistic
//! regression, score on clean test points.
//!
//! cargo run --example classification

use sldp::config::{ExperimentConfig, ExperimentKind};
use sldp::experiment::{classification_dataset, classification_split, knn_scores, logreg_scores, perturb_training, Mechanism};
use sldp::geometry::Point;
use sldp::mechanisms::RngStream;

fn main() -> sldp::Result<()> {
    let mut cfg = ExperimentConfig::defaults(ExperimentKind::Classify);
    cfg.n = vec![8_000];
    let ds = classification_dataset(&cfg)?;
    let labels = ds.labels.clone().expect("labelled");
    let (train_idx, test_idx) = classification_split(&cfg, ds.len(), 0)?;
    let pick = |idx: &[usize]| -> (Vec<Point>, Vec<u8>) { idx.iter().map(|&i| (ds.points[i], labels[i])).unzip() };
    let (train, train_y) = pick(&train_idx);
    let (test, test_y) = pick(&test_idx);

    let clean = knn_scores(&cfg, &train, &train_y, &test, &test_y)?;
    println!("clean kNN F1 {:.3}", clean.f1);
    println!("{:>14} {:>5} {:>8} {:>8}", "mechanism", "eps", "knn F1", "logreg F1");
    for eps in [0.5, 2.0, 8.0] {
        for mech in Mechanism::ALL {
            let (pts, _, _) = perturb_training(mech, &train, eps, cfg.k, &cfg, &RngStream::new(4, eps.to_bits()))?;
            let knn = knn_scores(&cfg, &pts, &train_y, &test, &test_y)?;
            let lr = logreg_scores(&cfg, &pts, &train_y, &test, &test_y)?;
            println!("{:>14} {eps:>5} {:>8.3} {:>8.3}", mech.name(), knn.f1, lr.f1);
        }
    }
    Ok(())
}
