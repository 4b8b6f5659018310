//! Loads an experiment from `key = value` text and writes its rows as CSV.
//!
//! cargo run --example experiment_config

use sldp::config::{ExperimentConfig, ExperimentKind};
use sldp::experiment::{run_spatial_experiment, write_rows};

const CONFIG: &str = "
# spatial study on a small clustered population
dataset = clusters
clusters = 3
spread = 0.04
n = 4000
eps = 0.5, 2
trials = 3
workload = uniform
queries = 100
out = target/spatial_example.csv
";

fn main() -> sldp::Result<()> {
    let mut cfg = ExperimentConfig::parse(ExperimentKind::Spatial, CONFIG)?;
    cfg.set_override("seed", "11")?;
    let rows = run_spatial_experiment(&cfg)?;
    for r in rows.iter().filter(|r| r.trial == 0) {
        println!("{:>9} eps {:>3}: MRE {:.3}", r.method, r.eps, r.mre);
    }
    write_rows(&cfg.out, &rows)?;
    println!("{} rows -> {}", rows.len(), cfg.out.display());
    Ok(())
}
