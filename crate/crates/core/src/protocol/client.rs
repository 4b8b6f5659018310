use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};
use crate::mechanisms::{check_eps, laplace_noise, RngStream};
use crate::scheme::CellId;

use super::{Report, ServerMessage};

/// What a client did in response to one server message.
#[derive(Debug, Clone, PartialEq)]
pub enum ClientStep {
    Reports(Vec<Report>),
    /// The client left the protocol holding this privacy region.
    Finished(CellId),
}

/// The true (noise-free) indicators a client computed in one round. Kept on
/// the client only; never sent over the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndicatorRecord {
    pub round: u32,
    pub indicators: [bool; 4],
}

/// Client side of the refinement protocol for one user.
///
/// `regions[t]` is the region `U_t` held after round `t`, with `U_0` the root.
#[derive(Debug, Clone)]
pub struct Client {
    user: u32,
    point: Point,
    domain: Rect,
    eps: f64,
    stream: RngStream,
    regions: Vec<CellId>,
    log: Vec<IndicatorRecord>,
    finished: Option<CellId>,
}

impl Client {
    pub fn new(user: u32, point: Point, domain: Rect, eps: f64, stream: RngStream) -> Result<Self> {
        check_eps(eps)?;
        if !domain.contains_closed(&point) {
            return Err(Error::OutsideDomain { x: point.x, y: point.y });
        }
        Ok(Client {
            user,
            point,
            domain,
            eps,
            stream,
            regions: vec![CellId::ROOT],
            log: Vec::new(),
            finished: None,
        })
    }

    pub fn user(&self) -> u32 {
        self.user
    }

    pub fn point(&self) -> Point {
        self.point
    }

    /// Current region `U_t`.
    pub fn region(&self) -> CellId {
        *self.regions.last().expect("root is always present")
    }

    pub fn final_region(&self) -> Option<CellId> {
        self.finished
    }

    pub fn is_finished(&self) -> bool {
        self.finished.is_some()
    }

    /// Last round in which this client reported.
    pub fn rounds_reported(&self) -> u32 {
        self.log.len() as u32
    }

    pub fn indicator_log(&self) -> &[IndicatorRecord] {
        &self.log
    }

    /// Handles one server message.
    pub fn round(&mut self, msg: &ServerMessage) -> Result<ClientStep> {
        if self.finished.is_some() {
            return Err(Error::Desync(format!("user {} received a message after finishing", self.user)));
        }
        let expected = self.regions.len() as u32;
        if msg.round() != expected {
            return Err(Error::Desync(format!(
                "user {} expected round {expected}, got {}",
                self.user,
                msg.round()
            )));
        }
        match msg {
            ServerMessage::Frontier { round, cells } => self.answer(*round, cells),
            ServerMessage::Close { capped, .. } => {
                let current = self.region();
                let region = if capped.contains(&current) { current } else { self.previous_region() };
                Ok(self.finish(region))
            }
        }
    }

    fn previous_region(&self) -> CellId {
        let n = self.regions.len();
        if n >= 2 {
            self.regions[n - 2]
        } else {
            CellId::ROOT
        }
    }

    fn finish(&mut self, region: CellId) -> ClientStep {
        self.finished = Some(region);
        ClientStep::Finished(region)
    }

    fn answer(&mut self, round: u32, cells: &[CellId]) -> Result<ClientStep> {
        if let Some(bad) = cells.iter().find(|c| c.depth() != round as usize) {
            return Err(Error::Desync(format!("cell {bad} does not belong to round {round}")));
        }
        let current = self.region();
        let mine: Vec<CellId> = cells.iter().copied().filter(|c| c.parent() == Some(current)).collect();
        if mine.is_empty() {
            if round == 1 {
                return Err(Error::Desync("first frontier must cover the domain".into()));
            }
            // Our region was not refined: its parent is final.
            let region = self.previous_region();
            return Ok(self.finish(region));
        }
        if mine.len() != 4 {
            return Err(Error::Desync(format!(
                "frontier holds {} of the 4 children of {current}",
                mine.len()
            )));
        }

        let mut noise = self.stream.substream(&[round as u64]);
        let scale = 1.0 / self.eps;
        let mut indicators = [false; 4];
        let mut next = None;
        let mut reports = Vec::with_capacity(4);
        for (slot, cell) in mine.iter().enumerate() {
            let inside = cell.rect(&self.domain).contains_in(&self.domain, &self.point);
            indicators[slot] = inside;
            if inside {
                next = Some(*cell);
            }
            let value = inside as u8 as f64 + laplace_noise(&mut noise, scale);
            reports.push(Report { round, user: self.user, cell: *cell, value });
        }
        let next = next.ok_or_else(|| Error::Desync(format!("user {} fits no child of {current}", self.user)))?;
        self.regions.push(next);
        self.log.push(IndicatorRecord { round, indicators });
        Ok(ClientStep::Reports(reports))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frontier(round: u32, cells: &[&str]) -> ServerMessage {
        ServerMessage::Frontier { round, cells: cells.iter().map(|s| CellId::parse(s).unwrap()).collect() }
    }

    fn client(x: f64, y: f64, eps: f64) -> Client {
        Client::new(0, Point::new(x, y), Rect::unit(), eps, RngStream::new(1, 2)).unwrap()
    }

    #[test]
    fn noiseless_first_round() {
        let mut c = client(0.1, 0.1, f64::INFINITY);
        let ClientStep::Reports(reports) = c.round(&frontier(1, &["0", "1", "2", "3"])).unwrap() else {
            panic!("expected reports");
        };
        assert_eq!(reports.len(), 4);
        let values: Vec<f64> = reports.iter().map(|r| r.value).collect();
        assert_eq!(values, [1.0, 0.0, 0.0, 0.0]);
        assert_eq!(c.region().to_string(), "0");
    }

    #[test]
    fn returns_region_two_back_when_dropped() {
        let mut c = client(0.1, 0.1, 1.0);
        c.round(&frontier(1, &["0", "1", "2", "3"])).unwrap();
        c.round(&frontier(2, &["00", "01", "02", "03"])).unwrap();
        assert_eq!(c.region().to_string(), "00");
        // Round 3 refines some other cell only: "0" was finalized in round 2.
        let step = c.round(&frontier(3, &["100", "101", "102", "103"])).unwrap();
        assert_eq!(step, ClientStep::Finished(CellId::parse("0").unwrap()));
        assert!(c.round(&frontier(4, &[])).is_err());
    }

    #[test]
    fn close_respects_depth_cap() {
        let mut capped = client(0.1, 0.1, 1.0);
        capped.round(&frontier(1, &["0", "1", "2", "3"])).unwrap();
        let step = capped.round(&ServerMessage::Close { round: 2, capped: vec![CellId::parse("0").unwrap()] }).unwrap();
        assert_eq!(step, ClientStep::Finished(CellId::parse("0").unwrap()));

        let mut dropped = client(0.1, 0.1, 1.0);
        dropped.round(&frontier(1, &["0", "1", "2", "3"])).unwrap();
        let step = dropped.round(&ServerMessage::Close { round: 2, capped: vec![] }).unwrap();
        assert_eq!(step, ClientStep::Finished(CellId::ROOT));
    }

    #[test]
    fn desync_errors() {
        let mut c = client(0.1, 0.1, 1.0);
        assert!(matches!(c.round(&frontier(2, &["00"])), Err(Error::Desync(_))));
        assert!(matches!(c.round(&frontier(1, &["0", "1"])), Err(Error::Desync(_))));
        assert!(matches!(c.round(&frontier(1, &["00", "01", "02", "03"])), Err(Error::Desync(_))));
        assert!(matches!(c.round(&frontier(1, &["1"])), Err(Error::Desync(_))));
    }

    #[test]
    fn rejects_points_outside_domain() {
        assert!(Client::new(0, Point::new(1.5, 0.0), Rect::unit(), 1.0, RngStream::new(0, 0)).is_err());
    }
}
