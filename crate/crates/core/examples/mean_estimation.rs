//! Mean of a bounded function under central DP, LDP and SLDP.
//!
//! cargo run --example mean_estimation

use sldp::data::Dataset;
use sldp::estimators::{dp_mean, ldp_mean, region_oscillation, sldp_mean, BoundedFunction};
use sldp::experiment::{quantile, split_budget};
use sldp::geometry::{Point, Rect};
use sldp::mechanisms::RngStream;
use sldp::protocol::{server_run, ProtocolConfig};

fn main() -> sldp::Result<()> {
    let eps = 8.0;
    let mut rng = RngStream::new(2, 0);
    let points: Vec<Point> = (0..50_000).map(|_| Point::new(rng.open01(), rng.open01())).collect();
    let data = Dataset::new(points, Rect::unit(), "uniform")?;
    let f = BoundedFunction::SquaredNorm;
    let values: Vec<f64> = data.points.iter().map(|p| f.eval(p)).collect();
    let truth = values.iter().sum::<f64>() / values.len() as f64;
    let c = f.bound(&data.domain);

    let (eps_regions, eps_release) = split_budget(eps, 0.5);
    let cfg = ProtocolConfig::new(data.domain, eps_regions, 0.05, 20, 20)?;
    let out = server_run(&data.points, &cfg, &RngStream::new(2, 1))?;
    let regions: Vec<Rect> = out.regions().iter().map(|id| id.rect(&data.domain)).collect();
    let osc: Vec<f64> = regions.iter().map(|r| region_oscillation(&f, r)).collect::<sldp::Result<_>>()?;
    println!("{} regions, median oscillation {:.4} (range C = {c})", out.partition.len(), quantile(&osc, 0.5));

    let mut errs = [Vec::new(), Vec::new(), Vec::new()];
    for t in 0..200 {
        let mut rng = RngStream::new(2, 100 + t);
        errs[0].push((dp_mean(&values, c, eps, &mut rng)? - truth).powi(2));
        errs[1].push((ldp_mean(&values, c, eps, &mut rng)? - truth).powi(2));
        errs[2].push((sldp_mean(&data.points, &regions, &f, eps_release, &mut rng)? - truth).powi(2));
    }
    for (name, e) in ["dp", "ldp", "sldp"].iter().zip(&errs) {
        println!("{name:>5}: median squared error {:.3e}", quantile(e, 0.5));
    }
    Ok(())
}
