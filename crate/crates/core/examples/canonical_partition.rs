//! The noise-free k-anonymous quadtree partition of a clustered dataset.
//!
//! cargo run --example canonical_partition

use sldp::data::sample_cluster_mixture;
use sldp::mechanisms::RngStream;
use sldp::scheme::canonical_partition;

fn main() -> sldp::Result<()> {
    let data = sample_cluster_mixture(5_000, 12, 0.1, &mut RngStream::new(1, 0))?;
    for k in [5, 20, 100] {
        let part = canonical_partition(&data.points, &data.domain, k, 12)?;
        let smallest = part.leaves().iter().map(|l| l.count).fold(f64::INFINITY, f64::min);
        println!("k = {k:>3}: {:>4} leaves, max depth {:>2}, smallest leaf {smallest}", part.len(), part.max_depth());
    }

    let part = canonical_partition(&data.points, &data.domain, 20, 12)?;
    println!("\nfirst leaves (path, rect, count):");
    for leaf in part.leaves().iter().take(6) {
        let r = leaf.rect;
        println!("  {:<8} [{:.4}, {:.4}) x [{:.4}, {:.4})  {}", leaf.id.to_string(), r.xmin, r.xmax, r.ymin, r.ymax, leaf.count);
    }
    Ok(())
}
