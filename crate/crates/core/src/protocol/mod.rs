//! Interactive discovery of privacy regions.
//!
//! The server refines the quadtree round by round. In round `t` it broadcasts
//! the children of every active cell; each client still inside an active cell
//! answers with one Laplace-noised membership indicator per child of its
//! current region. A parent stays active only if every child's noisy count
//! clears `Q + Δ`, where `Δ` is a concentration slack that depends on the
//! number of responders in the parent. Everything the server decides is a
//! function of the public [`Transcript`], which [`transcript_replay`]
//! recomputes.

mod client;
mod server;
mod transcript;

pub use client::{Client, ClientStep, IndicatorRecord};
pub use server::{server_run, ClientRecord, ProtocolOutcome, ServerState};
pub use transcript::{transcript_replay, Record, Transcript};

use crate::error::{Error, Result};
use crate::geometry::Rect;
use crate::mechanisms::check_eps;
use crate::scheme::{CellId, DEFAULT_MAX_DEPTH, MAX_DEPTH};

/// Every privacy knob of one protocol run.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig {
    /// Domain of the quadtree scheme.
    pub domain: Rect,
    /// Budget spent on each noisy indicator. `f64::INFINITY` disables noise
    /// and collapses the slack to zero.
    pub eps: f64,
    pub delta: f64,
    /// Tail parameter `x(δ)` of the concentration slack.
    pub x_of_delta: f64,
    /// Count threshold `Q`.
    pub threshold: f64,
    /// Depth cap `T`; also the number of refinement rounds at most.
    pub max_depth: usize,
    /// Target anonymity.
    pub k: usize,
}

impl ProtocolConfig {
    /// Config with `Q = k` and `x(δ) = ln(4T/δ)`.
    pub fn new(domain: Rect, eps: f64, delta: f64, k: usize, max_depth: usize) -> Result<Self> {
        let cfg = ProtocolConfig {
            domain,
            eps,
            delta,
            x_of_delta: default_tail(delta, max_depth),
            threshold: k as f64,
            max_depth,
            k,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// `new` with `δ = 0.05` and the default depth cap.
    pub fn with_defaults(domain: Rect, eps: f64, k: usize) -> Result<Self> {
        ProtocolConfig::new(domain, eps, 0.05, k, DEFAULT_MAX_DEPTH)
    }

    pub fn with_threshold(mut self, q: f64) -> Result<Self> {
        self.threshold = q;
        self.validate()?;
        Ok(self)
    }

    pub fn with_tail(mut self, x: f64) -> Result<Self> {
        self.x_of_delta = x;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check_eps(self.eps)?;
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid(format!("delta must lie in (0, 1), got {}", self.delta)));
        }
        if !(self.x_of_delta > 0.0 && self.x_of_delta.is_finite()) {
            return Err(Error::invalid(format!("x(delta) must be positive, got {}", self.x_of_delta)));
        }
        if !(self.threshold >= 1.0 && self.threshold.is_finite()) {
            return Err(Error::invalid(format!("threshold Q must be at least 1, got {}", self.threshold)));
        }
        if self.max_depth == 0 || self.max_depth > MAX_DEPTH {
            return Err(Error::invalid(format!("depth cap must lie in 1..={MAX_DEPTH}, got {}", self.max_depth)));
        }
        if self.k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        Ok(())
    }

    /// Slack for a child whose parent had `n_parent` responders.
    pub fn slack(&self, n_parent: u64) -> f64 {
        compute_delta(self.eps, n_parent, self.x_of_delta)
    }
}

/// `x(δ) = ln(4T/δ)`: a union bound over at most `T` rounds of four child
/// comparisons each keeps the chance of an over-refined region below `δ`.
pub fn default_tail(delta: f64, max_depth: usize) -> f64 {
    (4.0 * max_depth as f64 / delta).ln()
}

/// Concentration slack `(sqrt(2 n x) + 6 x) / eps`.
pub fn compute_delta(eps: f64, n_parent: u64, x: f64) -> f64 {
    ((2.0 * n_parent as f64 * x).sqrt() + 6.0 * x) / eps
}

/// One noisy membership indicator sent by a client.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Report {
    pub round: u32,
    pub user: u32,
    pub cell: CellId,
    pub value: f64,
}

/// Messages the server publishes on the channel.
#[derive(Debug, Clone, PartialEq)]
pub enum ServerMessage {
    /// Candidate cells for round `round`: the children of every active cell.
    Frontier { round: u32, cells: Vec<CellId> },
    /// End of the run. `capped` lists the active cells finalized because the
    /// depth cap was reached; clients inside one of them keep it as region.
    Close { round: u32, capped: Vec<CellId> },
}

impl ServerMessage {
    pub fn round(&self) -> u32 {
        match self {
            ServerMessage::Frontier { round, .. } | ServerMessage::Close { round, .. } => *round,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_formula() {
        assert!((compute_delta(1.0, 100, 3.0) - (600f64.sqrt() + 18.0)).abs() < 1e-12);
        assert!((compute_delta(1.0, 100, 3.0) - 42.494_897_427_831_78).abs() < 1e-9);
        assert_eq!(compute_delta(1.0, 0, 3.0), 18.0);
        assert_eq!(compute_delta(2.0, 100, 3.0), compute_delta(1.0, 100, 3.0) / 2.0);
        assert_eq!(compute_delta(f64::INFINITY, 100, 3.0), 0.0);
    }

    #[test]
    fn config_defaults_and_validation() {
        let cfg = ProtocolConfig::new(Rect::unit(), 1.0, 0.05, 20, 20).unwrap();
        assert_eq!(cfg.threshold, 20.0);
        assert!((cfg.x_of_delta - 1600f64.ln()).abs() < 1e-12);
        assert!(ProtocolConfig::new(Rect::unit(), 0.0, 0.05, 20, 20).is_err());
        assert!(ProtocolConfig::new(Rect::unit(), 1.0, 1.0, 20, 20).is_err());
        assert!(ProtocolConfig::new(Rect::unit(), 1.0, 0.05, 20, 0).is_err());
        assert!(ProtocolConfig::new(Rect::unit(), 1.0, 0.05, 0, 5).is_err());
        assert!(cfg.clone().with_threshold(0.5).is_err());
        assert!(cfg.with_tail(-1.0).is_err());
    }
}
