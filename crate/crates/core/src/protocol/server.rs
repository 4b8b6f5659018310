use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::mechanisms::RngStream;
use crate::scheme::{CellId, Partition};

use super::client::{Client, ClientStep, IndicatorRecord};
use super::transcript::{Record, Transcript};
use super::{ProtocolConfig, Report, ServerMessage};

/// Server side of the refinement protocol.
///
/// The state only ever sees what travels over the channel, so the same state
/// machine drives both live runs and transcript replay.
#[derive(Debug, Clone)]
pub struct ServerState {
    config: ProtocolConfig,
    message: ServerMessage,
    leaves: Vec<(CellId, f64, bool)>,
    responders: HashMap<CellId, u64>,
}

impl ServerState {
    pub fn new(config: ProtocolConfig) -> Result<Self> {
        config.validate()?;
        let cells = CellId::ROOT.children()?.to_vec();
        Ok(ServerState {
            config,
            message: ServerMessage::Frontier { round: 1, cells },
            leaves: Vec::new(),
            responders: HashMap::new(),
        })
    }

    pub fn config(&self) -> &ProtocolConfig {
        &self.config
    }

    /// The message currently published.
    pub fn message(&self) -> &ServerMessage {
        &self.message
    }

    pub fn is_closed(&self) -> bool {
        matches!(self.message, ServerMessage::Close { .. })
    }

    /// Number of users that answered for every child of `parent`, for every
    /// parent refined so far.
    pub fn responders(&self) -> &HashMap<CellId, u64> {
        &self.responders
    }

    /// Consumes all reports of the current round and publishes the next message.
    pub fn ingest(&mut self, reports: &[Report]) -> Result<&ServerMessage> {
        let ServerMessage::Frontier { round, cells } = &self.message else {
            return Err(Error::Desync("reports received after the run closed".into()));
        };
        let round = *round;
        let position: HashMap<CellId, usize> = cells.iter().enumerate().map(|(i, c)| (*c, i)).collect();

        let mut noisy_counts = vec![0.0f64; cells.len()];
        let mut seen: HashSet<(u32, usize)> = HashSet::with_capacity(reports.len());
        let mut per_user: HashMap<(CellId, u32), u8> = HashMap::new();
        for r in reports {
            if r.round != round {
                return Err(Error::Desync(format!("report for round {} during round {round}", r.round)));
            }
            let &slot = position
                .get(&r.cell)
                .ok_or_else(|| Error::Desync(format!("report for cell {} outside the frontier", r.cell)))?;
            if !seen.insert((r.user, slot)) {
                return Err(Error::Desync(format!("user {} reported twice on {}", r.user, r.cell)));
            }
            noisy_counts[slot] += r.value;
            let parent = r.cell.parent().expect("frontier cells are never the root");
            *per_user.entry((parent, r.user)).or_default() += 1;
        }
        let mut n_parent: HashMap<CellId, u64> = HashMap::new();
        for ((parent, _), answered) in per_user {
            if answered as usize == crate::scheme::BRANCHING {
                *n_parent.entry(parent).or_default() += 1;
            }
        }

        // Parents whose children do not all clear the threshold, in frontier order.
        let mut dropped: Vec<CellId> = Vec::new();
        let mut dropped_set: HashSet<CellId> = HashSet::new();
        for (slot, cell) in cells.iter().enumerate() {
            let parent = cell.parent().expect("frontier cells are never the root");
            let n = n_parent.get(&parent).copied().unwrap_or(0);
            let needed = self.config.threshold + self.config.slack(n);
            if noisy_counts[slot] < needed && dropped_set.insert(parent) {
                dropped.push(parent);
            }
        }
        for parent in cells.iter().filter_map(|c| c.parent()) {
            if let std::collections::hash_map::Entry::Vacant(e) = self.responders.entry(parent) {
                e.insert(n_parent.get(&parent).copied().unwrap_or(0));
            }
        }
        for parent in &dropped {
            let n = n_parent.get(parent).copied().unwrap_or(0);
            self.leaves.push((*parent, n as f64, true));
        }

        let survivors: Vec<(usize, CellId)> = cells
            .iter()
            .enumerate()
            .filter(|(_, c)| !dropped_set.contains(&c.parent().expect("non-root")))
            .map(|(i, c)| (i, *c))
            .collect();

        self.message = if survivors.is_empty() {
            ServerMessage::Close { round: round + 1, capped: Vec::new() }
        } else if round as usize >= self.config.max_depth {
            let exact = self.config.eps.is_infinite();
            for (slot, cell) in &survivors {
                self.leaves.push((*cell, noisy_counts[*slot], exact));
            }
            ServerMessage::Close { round: round + 1, capped: survivors.into_iter().map(|(_, c)| c).collect() }
        } else {
            let mut next = Vec::with_capacity(4 * survivors.len());
            for (_, cell) in &survivors {
                next.extend(cell.children()?);
            }
            ServerMessage::Frontier { round: round + 1, cells: next }
        };
        Ok(&self.message)
    }

    /// The released partition. Only available once the run is closed.
    pub fn partition(&self) -> Result<Partition> {
        if !self.is_closed() {
            return Err(Error::Desync("partition requested before the run closed".into()));
        }
        Partition::from_leaves(self.config.domain, self.leaves.iter().copied())
    }
}

/// Per-user view of a run. Only available in simulation: the indicators are
/// private client state.
#[derive(Debug, Clone, PartialEq)]
pub struct ClientRecord {
    pub final_region: CellId,
    pub rounds_reported: u32,
    pub indicators: Vec<IndicatorRecord>,
}

#[derive(Debug, Clone)]
pub struct ProtocolOutcome {
    pub partition: Partition,
    pub transcript: Transcript,
    pub clients: Vec<ClientRecord>,
}

impl ProtocolOutcome {
    /// Final privacy region of each user, in pseudonym order.
    pub fn regions(&self) -> Vec<CellId> {
        self.clients.iter().map(|c| c.final_region).collect()
    }
}

/// Simulates one run over a synchronous public channel: one client per
/// point, messages delivered in pseudonym order. Client `i` draws its noise
/// from `rng.substream(&[i])`.
pub fn server_run(points: &[Point], config: &ProtocolConfig, rng: &RngStream) -> Result<ProtocolOutcome> {
    let mut server = ServerState::new(config.clone())?;
    let mut clients = points
        .iter()
        .enumerate()
        .map(|(i, p)| Client::new(i as u32, *p, config.domain, config.eps, rng.substream(&[i as u64])))
        .collect::<Result<Vec<_>>>()?;
    let mut transcript = Transcript::default();
    let mut active: Vec<usize> = (0..clients.len()).collect();

    loop {
        let msg = server.message().clone();
        transcript.push(Record::from(&msg));
        let mut batch = Vec::new();
        let mut still_active = Vec::with_capacity(active.len());
        for &i in &active {
            match clients[i].round(&msg)? {
                ClientStep::Reports(reports) => {
                    batch.extend(reports);
                    still_active.push(i);
                }
                ClientStep::Finished(_) => {}
            }
        }
        active = still_active;
        if server.is_closed() {
            break;
        }
        transcript.extend(batch.iter().copied().map(Record::Report));
        server.ingest(&batch)?;
    }

    let clients = clients
        .into_iter()
        .map(|c| ClientRecord {
            final_region: c.final_region().expect("every client finishes at close"),
            rounds_reported: c.rounds_reported(),
            indicators: c.indicator_log().to_vec(),
        })
        .collect();
    Ok(ProtocolOutcome { partition: server.partition()?, transcript, clients })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;
    use crate::scheme::canonical_partition;
    use proptest::prelude::*;

    fn noiseless(k: usize, depth: usize) -> ProtocolConfig {
        ProtocolConfig::new(Rect::unit(), f64::INFINITY, 0.05, k, depth).unwrap()
    }

    fn grid_points(per_axis: usize) -> Vec<Point> {
        let step = 1.0 / per_axis as f64;
        (0..per_axis)
            .flat_map(|i| (0..per_axis).map(move |j| Point::new((i as f64 + 0.5) * step, (j as f64 + 0.5) * step)))
            .collect()
    }

    #[test]
    fn zero_clients_give_root_only() {
        let out = server_run(&[], &noiseless(3, 5), &RngStream::new(0, 0)).unwrap();
        assert_eq!(out.partition.len(), 1);
        assert_eq!(out.partition.leaves()[0].count, 0.0);
    }

    #[test]
    fn fewer_users_than_threshold_stop_at_root() {
        let pts = grid_points(2);
        let out = server_run(&pts, &noiseless(5, 5), &RngStream::new(0, 0)).unwrap();
        assert_eq!(out.partition.len(), 1);
        assert!(out.clients.iter().all(|c| c.final_region == CellId::ROOT && c.rounds_reported == 1));
    }

    #[test]
    fn depth_cap_of_one() {
        let pts = grid_points(16);
        let out = server_run(&pts, &noiseless(1, 1), &RngStream::new(0, 0)).unwrap();
        assert_eq!(out.partition.max_depth(), 1);
        assert_eq!(out.partition.len(), 4);
        let noisy = ProtocolConfig::new(Rect::unit(), 50.0, 0.05, 1, 1).unwrap();
        let out = server_run(&pts, &noisy, &RngStream::new(0, 0)).unwrap();
        assert!(out.partition.max_depth() <= 1);
    }

    #[test]
    fn noiseless_regular_grid_matches_canonical() {
        let pts = grid_points(8);
        let out = server_run(&pts, &noiseless(1, 10), &RngStream::new(0, 0)).unwrap();
        let oracle = canonical_partition(&pts, &Rect::unit(), 1, 10).unwrap();
        assert_eq!(out.partition, oracle);
        assert_eq!(out.partition.len(), 64);
    }

    #[test]
    fn threshold_leaves_carry_exact_responder_counts() {
        let mut rng = RngStream::new(3, 0);
        use rand::Rng;
        let pts: Vec<Point> = (0..3000)
            .map(|_| {
                let (x, y): (f64, f64) = (rng.random(), rng.random());
                Point::new(x * x, y)
            })
            .collect();
        let cfg = ProtocolConfig::new(Rect::unit(), 2.0, 0.05, 10, 12).unwrap();
        let out = server_run(&pts, &cfg, &RngStream::new(4, 0)).unwrap();
        let dom = Rect::unit();
        for leaf in out.partition.leaves().iter().filter(|l| l.exact) {
            let truth = pts.iter().filter(|p| leaf.rect.contains_in(&dom, p)).count();
            assert_eq!(leaf.count as usize, truth, "leaf {}", leaf.id);
        }
        for (i, c) in out.clients.iter().enumerate() {
            assert_eq!(out.partition.locate(&pts[i]).unwrap(), c.final_region);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn noiseless_run_equals_oracle(
            raw in prop::collection::vec((0.0..=1.0f64, 0.0..=1.0f64), 0..400),
            k in 1usize..10,
            t in 1usize..8,
        ) {
            let pts: Vec<Point> = raw.into_iter().map(|(x, y)| Point::new(x, y)).collect();
            let out = server_run(&pts, &noiseless(k, t), &RngStream::new(9, 9)).unwrap();
            let oracle = canonical_partition(&pts, &Rect::unit(), k, t).unwrap();
            prop_assert_eq!(&out.partition, &oracle);
            for (i, c) in out.clients.iter().enumerate() {
                prop_assert_eq!(oracle.locate(&pts[i]).unwrap(), c.final_region);
            }
        }
    }
}
