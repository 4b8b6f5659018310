//! Per-user release of a Gaussian bump: writes the partition, clean values
//! and SLDP / LDP reports as CSV for plotting.
//!
//! cargo run --example function_release -- [out_dir]

use sldp::config::{ExperimentConfig, ExperimentKind};
use sldp::experiment::run_demo;

fn main() -> sldp::Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "demo".into());
    let mut cfg = ExperimentConfig::defaults(ExperimentKind::Demo);
    cfg.set_override("eps", "2")?;
    let demo = run_demo(&cfg)?;
    let mean_scale = |pts: &[sldp::experiment::DemoPoint]| pts.iter().map(|p| p.scale).sum::<f64>() / pts.len() as f64;
    println!(
        "{} points, {} regions; mean noise scale sldp {:.3} (release eps {}), ldp {:.3} (eps {})",
        demo.clean.len(),
        demo.partition.len(),
        mean_scale(&demo.sldp),
        demo.eps_release,
        mean_scale(&demo.ldp),
        cfg.eps[0]
    );
    demo.write(std::path::Path::new(&dir))?;
    println!("wrote {dir}/{{cells,clean,sldp,ldp}}.csv");
    Ok(())
}
