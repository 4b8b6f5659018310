//! One noisy run of the region-discovery protocol next to the partition it
//! estimates.
//!
//! cargo run --example protocol_run -- [eps]

use sldp::data::sample_cluster_mixture;
use sldp::mechanisms::RngStream;
use sldp::protocol::{server_run, ProtocolConfig};
use sldp::scheme::canonical_partition;

fn main() -> sldp::Result<()> {
    let eps: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(4.0);
    let data = sample_cluster_mixture(20_000, 10, 0.08, &mut RngStream::new(3, 0))?;
    let cfg = ProtocolConfig::new(data.domain, eps, 0.05, 20, 20)?;
    println!("eps = {eps}, x(delta) = {:.3}, threshold Q = {}", cfg.x_of_delta, cfg.threshold);

    let out = server_run(&data.points, &cfg, &RngStream::new(3, 1))?;
    let canon = canonical_partition(&data.points, &data.domain, 20, 20)?;
    println!("protocol: {} regions, depth {}", out.partition.len(), out.partition.max_depth());
    println!("canonical: {} regions, depth {}", canon.len(), canon.max_depth());

    let same = data.points.iter().zip(out.regions()).filter(|(p, r)| canon.locate(p).map(|c| c == *r).unwrap_or(false)).count();
    println!("users whose region equals their canonical leaf: {same} of {}", data.len());
    let rounds = out.clients.iter().map(|c| c.rounds_reported).max().unwrap_or(0);
    println!("rounds: {rounds}, reports sent: {}", out.transcript.reports().count());
    Ok(())
}
