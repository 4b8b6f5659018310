//! Drives the client and server state machines by hand over an in-memory
//! channel, the same loop `server_run` performs.
//!
//! cargo run --example client_server

use sldp::geometry::{Point, Rect};
use sldp::mechanisms::RngStream;
use sldp::protocol::{Client, ClientStep, ProtocolConfig, ServerMessage, ServerState};

fn main() -> sldp::Result<()> {
    let domain = Rect::unit();
    let cfg = ProtocolConfig::new(domain, 2.0, 0.05, 10, 6)?;
    let mut rng = RngStream::new(5, 0);
    let points: Vec<Point> = (0..4_000).map(|_| Point::new(rng.open01().powi(2), rng.open01())).collect();

    let channel = RngStream::new(5, 1);
    let mut clients = points
        .iter()
        .enumerate()
        .map(|(i, p)| Client::new(i as u32, *p, domain, cfg.eps, channel.substream(&[i as u64])))
        .collect::<sldp::Result<Vec<_>>>()?;
    let mut server = ServerState::new(cfg)?;

    loop {
        let msg = server.message().clone();
        let mut batch = Vec::new();
        for client in clients.iter_mut().filter(|c| !c.is_finished()) {
            if let ClientStep::Reports(r) = client.round(&msg)? {
                batch.extend(r);
            }
        }
        match &msg {
            ServerMessage::Frontier { round, cells } => println!("round {round}: {} cells, {} reports", cells.len(), batch.len()),
            ServerMessage::Close { round, capped } => {
                println!("round {round}: close, {} capped cells", capped.len());
                break;
            }
        }
        server.ingest(&batch)?;
    }

    let part = server.partition()?;
    println!("{} regions", part.len());
    for c in clients.iter().take(3) {
        println!("user {} at ({:.3}, {:.3}) -> region {}", c.user(), c.point().x, c.point().y, c.final_region().unwrap());
    }
    Ok(())
}
