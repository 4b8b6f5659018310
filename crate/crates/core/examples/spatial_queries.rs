//! Range-count queries answered from SLDP, PrivTree and LDP-grid partitions.
//!
//! cargo run --example spatial_queries

use sldp::data::sample_cluster_mixture;
use sldp::geometry::Rect;
use sldp::mechanisms::RngStream;
use sldp::protocol::{server_run, ProtocolConfig};
use sldp::spatial::{answer_query, gen_anchored_workload, ldp_grid_build, mre, privtree_build, AnchoredParams};

fn main() -> sldp::Result<()> {
    let n = 20_000;
    let dom = Rect::unit();
    let data = sample_cluster_mixture(n, 5, 0.05, &mut RngStream::new(6, 0))?;
    let workload = gen_anchored_workload(&data.points, &dom, &AnchoredParams::for_population(n), &mut RngStream::new(6, 1))?;
    let truths = workload.truths()?;
    println!("{} queries, true counts {}..{}", truths.len(), truths.iter().min().unwrap(), truths.iter().max().unwrap());

    for eps in [0.5, 1.0, 2.0, 4.0] {
        let sldp = server_run(&data.points, &ProtocolConfig::new(dom, eps, 0.05, 20, 20)?, &RngStream::new(6, 2))?.partition;
        let tree = privtree_build(&data.points, &dom, eps / 2.0, eps / 2.0, 20, &mut RngStream::new(6, 3))?;
        let grid = ldp_grid_build(&data.points, &dom, 6, eps, &mut RngStream::new(6, 4))?;
        let score = |p: &sldp::scheme::Partition| {
            let est: Vec<f64> = workload.queries.iter().map(|q| answer_query(p, &q.rect)).collect();
            mre(&est, &truths, n)
        };
        println!(
            "eps {eps:>3}: sldp {:.3} ({} cells)  privtree {:.3} ({} cells)  ldp-grid {:.3}",
            score(&sldp)?,
            sldp.len(),
            score(&tree)?,
            tree.len(),
            score(&grid)?
        );
    }
    Ok(())
}
