//! Laplace, planar Laplace and reproducible noise streams.
//!
//! cargo run --example mechanisms

use sldp::geometry::Point;
use sldp::mechanisms::{sample_laplace, sample_planar_laplace, RngStream};

fn main() -> sldp::Result<()> {
    let mut rng = RngStream::new(42, 0);
    let b = 2.0;
    let xs: Vec<f64> = (0..200_000).map(|_| sample_laplace(&mut rng, b)).collect::<sldp::Result<_>>()?;
    let var = xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64;
    println!("Lap({b}): variance {var:.3} (2b^2 = {})", 2.0 * b * b);

    let eps = 0.5;
    let origin = Point::new(0.0, 0.0);
    let radii: Vec<f64> = (0..200_000)
        .map(|_| sample_planar_laplace(&mut rng, origin, eps).map(|p| p.distance(&origin)))
        .collect::<sldp::Result<_>>()?;
    let mean_r = radii.iter().sum::<f64>() / radii.len() as f64;
    println!("planar Laplace eps={eps}: mean radius {mean_r:.3} (2/eps = {})", 2.0 / eps);

    // Sub-streams are keyed by tags, so each user's noise is independent of
    // how many draws other users made.
    let root = RngStream::new(7, 1);
    let a = sample_laplace(&mut root.substream(&[3, 1]), 1.0)?;
    let b = sample_laplace(&mut root.substream(&[3, 1]), 1.0)?;
    println!("same tags, same draw: {}", a == b);
    Ok(())
}
