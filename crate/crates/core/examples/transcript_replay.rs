//! Serializes a run's public transcript and rebuilds the released partition
//! from it alone.
//!
//! cargo run --example transcript_replay

use sldp::data::sample_truncated_gaussian;
use sldp::geometry::Rect;
use sldp::mechanisms::RngStream;
use sldp::protocol::{server_run, transcript_replay, ProtocolConfig, Transcript};

fn main() -> sldp::Result<()> {
    let data = sample_truncated_gaussian(3_000, 1.0, Rect::centered_square(3.0)?, &mut RngStream::new(8, 0))?;
    let cfg = ProtocolConfig::new(data.domain, 1.5, 0.05, 10, 10)?;
    let out = server_run(&data.points, &cfg, &RngStream::new(8, 1))?;

    let text = out.transcript.to_text();
    println!("transcript: {} lines, {} bytes; first lines:", text.lines().count(), text.len());
    for line in text.lines().take(3) {
        println!("  {}", if line.len() > 60 { &line[..60] } else { line });
    }

    let replayed = transcript_replay(&Transcript::parse(&text)?, &cfg)?;
    println!("replayed partition equals the released one: {}", replayed == out.partition);

    let stops = out.transcript.stop_rounds();
    let mut hist = std::collections::BTreeMap::new();
    for r in stops.values() {
        *hist.entry(*r).or_insert(0) += 1;
    }
    println!("last round each user reported in: {hist:?}");
    Ok(())
}
