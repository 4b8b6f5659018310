use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::scheme::{CellId, Partition};

use super::server::ServerState;
use super::{ProtocolConfig, Report, ServerMessage};

/// One message observed on the public channel.
#[derive(Debug, Clone, PartialEq)]
pub enum Record {
    Broadcast { round: u32, cells: Vec<CellId> },
    Report(Report),
    Close { round: u32, capped: Vec<CellId> },
}

impl From<&ServerMessage> for Record {
    fn from(msg: &ServerMessage) -> Self {
        match msg {
            ServerMessage::Frontier { round, cells } => Record::Broadcast { round: *round, cells: cells.clone() },
            ServerMessage::Close { round, capped } => Record::Close { round: *round, capped: capped.clone() },
        }
    }
}

/// Ordered, append-only log of every broadcast and report of one run.
///
/// Text form, one record per line:
///
/// ```text
/// B <round> <cell_path>...
/// R <round> <user> <cell_path> <value>
/// C <round> <cell_path>...
/// ```
///
/// `C` closes the run and lists the cells finalized by the depth cap.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transcript {
    records: Vec<Record>,
}

impl Transcript {
    pub fn push(&mut self, record: Record) {
        self.records.push(record);
    }

    pub fn extend(&mut self, records: impl IntoIterator<Item = Record>) {
        self.records.extend(records);
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn reports(&self) -> impl Iterator<Item = &Report> {
        self.records.iter().filter_map(|r| match r {
            Record::Report(rep) => Some(rep),
            _ => None,
        })
    }

    /// Last round each user reported in.
    pub fn stop_rounds(&self) -> BTreeMap<u32, u32> {
        let mut out = BTreeMap::new();
        for r in self.reports() {
            let e = out.entry(r.user).or_insert(0);
            *e = (*e).max(r.round);
        }
        out
    }

    pub fn write_text<W: Write>(&self, mut w: W) -> Result<()> {
        let mut line = String::new();
        for record in &self.records {
            line.clear();
            match record {
                Record::Broadcast { round, cells } => {
                    write!(line, "B {round}").unwrap();
                    cells.iter().for_each(|c| write!(line, " {c}").unwrap());
                }
                Record::Close { round, capped } => {
                    write!(line, "C {round}").unwrap();
                    capped.iter().for_each(|c| write!(line, " {c}").unwrap());
                }
                Record::Report(r) => write!(line, "R {} {} {} {}", r.round, r.user, r.cell, r.value).unwrap(),
            }
            line.push('\n');
            w.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_text(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut records = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let bad = |reason: String| Error::MalformedTranscript { line, reason };
            let mut fields = raw.split_whitespace();
            let Some(tag) = fields.next() else { continue };
            let round: u32 = fields
                .next()
                .ok_or_else(|| bad("missing round".into()))?
                .parse()
                .map_err(|e| bad(format!("bad round: {e}")))?;
            let cells = |fields: std::str::SplitWhitespace<'_>| {
                fields.map(|f| CellId::parse(f).map_err(|e| bad(e.to_string()))).collect::<Result<Vec<_>>>()
            };
            let record = match tag {
                "B" => Record::Broadcast { round, cells: cells(fields)? },
                "C" => Record::Close { round, capped: cells(fields)? },
                "R" => {
                    let parts: Vec<&str> = fields.collect();
                    let [user, cell, value] = parts[..] else {
                        return Err(bad(format!("report needs 3 fields after the round, got {}", parts.len())));
                    };
                    Record::Report(Report {
                        round,
                        user: user.parse().map_err(|e| bad(format!("bad user: {e}")))?,
                        cell: CellId::parse(cell).map_err(|e| bad(e.to_string()))?,
                        value: value.parse().map_err(|e| bad(format!("bad value: {e}")))?,
                    })
                }
                other => return Err(bad(format!("unknown record tag {other:?}"))),
            };
            records.push(record);
        }
        Ok(Transcript { records })
    }
}

/// Recomputes the released partition from the public transcript alone.
///
/// Every broadcast in the transcript must be exactly the one the server would
/// have published given the preceding reports.
pub fn transcript_replay(transcript: &Transcript, config: &ProtocolConfig) -> Result<Partition> {
    if transcript.is_empty() {
        return Ok(Partition::root_only(config.domain, 0.0, true));
    }
    let malformed = |idx: usize, reason: String| Error::MalformedTranscript { line: idx + 1, reason };
    let mut server = ServerState::new(config.clone())?;
    let mut batch: Vec<Report> = Vec::new();
    let mut expecting_message = true;

    for (idx, record) in transcript.records().iter().enumerate() {
        match record {
            Record::Report(r) => {
                if expecting_message || server.is_closed() {
                    return Err(malformed(idx, "report outside a round".into()));
                }
                if !matches!(server.message(), ServerMessage::Frontier { cells, round } if *round == r.round && cells.contains(&r.cell))
                {
                    return Err(malformed(idx, format!("report on cell {} was not broadcast in round {}", r.cell, r.round)));
                }
                batch.push(*r);
            }
            Record::Broadcast { .. } | Record::Close { .. } => {
                if !expecting_message {
                    server.ingest(&batch).map_err(|e| malformed(idx, e.to_string()))?;
                    batch.clear();
                }
                if server.is_closed() && !expecting_message && Record::from(server.message()) != *record {
                    return Err(malformed(idx, "close record disagrees with the replayed server".into()));
                }
                if Record::from(server.message()) != *record {
                    return Err(malformed(idx, "broadcast disagrees with the replayed server".into()));
                }
                if matches!(record, Record::Close { .. }) {
                    if idx + 1 != transcript.records().len() {
                        return Err(malformed(idx + 1, "records after close".into()));
                    }
                    return server.partition();
                }
                expecting_message = false;
            }
        }
    }
    Err(malformed(transcript.records().len(), "transcript ends without a close record".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point, Rect};
    use crate::mechanisms::RngStream;
    use crate::protocol::server_run;
    use rand::Rng;

    fn sample(n: usize, seed: u64) -> Vec<Point> {
        let mut rng = RngStream::new(seed, 0);
        (0..n)
            .map(|_| {
                let (u, v): (f64, f64) = (rng.random(), rng.random());
                Point::new(u.powi(2), 0.5 + 0.5 * (v - 0.5).powi(3) * 8.0)
            })
            .collect()
    }

    #[test]
    fn replay_matches_live_run() {
        let pts = sample(4000, 1);
        let cfg = ProtocolConfig::new(Rect::unit(), 4.0, 0.05, 8, 10).unwrap();
        let out = server_run(&pts, &cfg, &RngStream::new(2, 0)).unwrap();
        assert!(out.partition.len() > 1);
        assert_eq!(transcript_replay(&out.transcript, &cfg).unwrap(), out.partition);

        let parsed = Transcript::parse(&out.transcript.to_text()).unwrap();
        assert_eq!(parsed, out.transcript);
        assert_eq!(transcript_replay(&parsed, &cfg).unwrap(), out.partition);
    }

    #[test]
    fn stop_rounds_match_clients() {
        let pts = sample(1500, 3);
        let cfg = ProtocolConfig::new(Rect::unit(), 3.0, 0.05, 5, 8).unwrap();
        let out = server_run(&pts, &cfg, &RngStream::new(4, 0)).unwrap();
        let stops = out.transcript.stop_rounds();
        for (i, c) in out.clients.iter().enumerate() {
            assert_eq!(stops[&(i as u32)], c.rounds_reported);
        }
    }

    #[test]
    fn empty_transcript_is_root_only() {
        let cfg = ProtocolConfig::with_defaults(Rect::unit(), 1.0, 5).unwrap();
        let p = transcript_replay(&Transcript::default(), &cfg).unwrap();
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn rejects_report_for_unbroadcast_cell() {
        let cfg = ProtocolConfig::with_defaults(Rect::unit(), 1.0, 5).unwrap();
        let t = Transcript::parse("B 1 0 1 2 3\nR 1 0 00 0.5\n").unwrap();
        assert!(matches!(transcript_replay(&t, &cfg), Err(Error::MalformedTranscript { line: 2, .. })));
    }

    #[test]
    fn rejects_tampered_broadcast_and_truncation() {
        let pts = sample(500, 5);
        let cfg = ProtocolConfig::new(Rect::unit(), 8.0, 0.05, 3, 6).unwrap();
        let out = server_run(&pts, &cfg, &RngStream::new(6, 0)).unwrap();
        let text = out.transcript.to_text();
        let truncated: String = text.lines().take(text.lines().count() - 1).map(|l| format!("{l}\n")).collect();
        assert!(transcript_replay(&Transcript::parse(&truncated).unwrap(), &cfg).is_err());
        let tampered = text.replacen("B 1 0 1 2 3", "B 1 0 1 2", 1);
        assert!(transcript_replay(&Transcript::parse(&tampered).unwrap(), &cfg).is_err());
    }

    #[test]
    fn parse_errors_name_the_line() {
        assert!(matches!(Transcript::parse("B 1 0 1 2 3\nX 2\n"), Err(Error::MalformedTranscript { line: 2, .. })));
        assert!(matches!(Transcript::parse("R 1 0 0\n"), Err(Error::MalformedTranscript { line: 1, .. })));
        assert!(Transcript::parse("B 1 4\n").is_err());
    }
}
