//! The fixed quadtree partitioning scheme, leaf partitions over it, and the
//! non-private canonical partition used as ground truth.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};

/// Children per cell.
pub const BRANCHING: usize = 4;

/// Deepest addressable cell. Midpoints of `[0, 1]^2` stay exact binary
/// fractions down to this depth.
pub const MAX_DEPTH: usize = 52;

/// Default depth cap for both the protocol and the canonical partition.
pub const DEFAULT_MAX_DEPTH: usize = 20;

/// Address of a cell in the quadtree: the sequence of quadrant codes from the
/// root.
///
/// The path is packed left-aligned into a `u128`, two bits per level, so the
/// derived ordering is the lexicographic (depth-first) order of paths.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellId {
    bits: u128,
    depth: u8,
}

impl CellId {
    pub const ROOT: CellId = CellId { bits: 0, depth: 0 };

    pub fn from_path(codes: &[u8]) -> Result<Self> {
        let mut id = CellId::ROOT;
        for &c in codes {
            id = id.child(c)?;
        }
        Ok(id)
    }

    pub fn depth(&self) -> usize {
        self.depth as usize
    }

    pub fn is_root(&self) -> bool {
        self.depth == 0
    }

    /// Quadrant code chosen at `level` (0-based from the root).
    pub fn code_at(&self, level: usize) -> u8 {
        debug_assert!(level < self.depth());
        ((self.bits >> (126 - 2 * level)) & 0b11) as u8
    }

    pub fn last_code(&self) -> Option<u8> {
        (self.depth > 0).then(|| self.code_at(self.depth() - 1))
    }

    pub fn path(&self) -> Vec<u8> {
        (0..self.depth()).map(|l| self.code_at(l)).collect()
    }

    pub fn parent(&self) -> Option<CellId> {
        if self.depth == 0 {
            return None;
        }
        let level = self.depth() - 1;
        let mask = !(0b11u128 << (126 - 2 * level));
        Some(CellId { bits: self.bits & mask, depth: self.depth - 1 })
    }

    pub fn child(&self, code: u8) -> Result<CellId> {
        if code as usize >= BRANCHING {
            return Err(Error::invalid(format!("quadrant code {code} out of range")));
        }
        if self.depth() >= MAX_DEPTH {
            return Err(Error::DepthOverflow { depth: self.depth() + 1, max: MAX_DEPTH });
        }
        let shift = 126 - 2 * self.depth();
        Ok(CellId { bits: self.bits | ((code as u128) << shift), depth: self.depth + 1 })
    }

    /// The four children ordered by quadrant code.
    pub fn children(&self) -> Result<[CellId; 4]> {
        Ok([self.child(0)?, self.child(1)?, self.child(2)?, self.child(3)?])
    }

    /// True when `self` is a (non-strict) prefix of `other`.
    pub fn is_ancestor_of(&self, other: &CellId) -> bool {
        if self.depth > other.depth {
            return false;
        }
        if self.depth == 0 {
            return true;
        }
        let keep = 2 * self.depth() as u32;
        (self.bits ^ other.bits) >> (128 - keep) == 0
    }

    /// Geometry of the cell inside `domain`.
    pub fn rect(&self, domain: &Rect) -> Rect {
        (0..self.depth()).fold(*domain, |r, l| r.quadrant(self.code_at(l)))
    }

    /// Parses a quadrant-code string such as `"203"`; the empty string is the root.
    pub fn parse(s: &str) -> Result<Self> {
        let codes = s
            .bytes()
            .map(|b| match b {
                b'0'..=b'3' => Ok(b - b'0'),
                _ => Err(Error::invalid(format!("bad cell path {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        CellId::from_path(&codes)
    }
}

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in 0..self.depth() {
            write!(f, "{}", self.code_at(l))?;
        }
        Ok(())
    }
}

impl fmt::Debug for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CellId[{self}]")
    }
}

/// Rectangle of `id` inside `domain`.
pub fn cell_rect(domain: &Rect, id: CellId) -> Rect {
    id.rect(domain)
}

/// Every cell at depth `depth`, in path order.
pub fn cells_at_depth(depth: usize) -> Result<Vec<CellId>> {
    if depth > MAX_DEPTH {
        return Err(Error::DepthOverflow { depth, max: MAX_DEPTH });
    }
    let mut level = vec![CellId::ROOT];
    for _ in 0..depth {
        level = level
            .iter()
            .map(|c| c.children())
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
    }
    Ok(level)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Leaf {
    pub id: CellId,
    pub rect: Rect,
    pub count: f64,
    /// Whether `count` is an exact population count or a noisy estimate.
    pub exact: bool,
}

/// Disjoint quadtree leaves covering the domain, each with a count.
#[derive(Debug, Clone)]
pub struct Partition {
    domain: Rect,
    leaves: Vec<Leaf>,
    index: HashMap<CellId, usize>,
}

impl PartialEq for Partition {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.leaves == other.leaves
    }
}

impl Partition {
    /// Builds a partition from leaves, checking that they form a complete,
    /// non-overlapping quadtree cut. Rects are recomputed from the ids.
    pub fn from_leaves(domain: Rect, leaves: impl IntoIterator<Item = (CellId, f64, bool)>) -> Result<Self> {
        let mut leaves: Vec<Leaf> = leaves
            .into_iter()
            .map(|(id, count, exact)| Leaf { id, rect: id.rect(&domain), count, exact })
            .collect();
        leaves.sort_by_key(|l| l.id);

        // Sorted path order puts an ancestor immediately before its first
        // descendant, and a complete cut sums to exactly 4^MAX_DEPTH units.
        let mut covered: u128 = 0;
        for (i, leaf) in leaves.iter().enumerate() {
            if let Some(next) = leaves.get(i + 1) {
                if leaf.id.is_ancestor_of(&next.id) {
                    return Err(Error::invalid(format!("leaf {} overlaps leaf {}", leaf.id, next.id)));
                }
            }
            covered += 1u128 << (2 * (MAX_DEPTH - leaf.id.depth()));
        }
        if covered != 1u128 << (2 * MAX_DEPTH) {
            return Err(Error::invalid("leaves do not cover the domain"));
        }

        let index = leaves.iter().enumerate().map(|(i, l)| (l.id, i)).collect();
        Ok(Partition { domain, leaves, index })
    }

    pub fn root_only(domain: Rect, count: f64, exact: bool) -> Self {
        let leaf = Leaf { id: CellId::ROOT, rect: domain, count, exact };
        Partition { domain, leaves: vec![leaf], index: HashMap::from([(CellId::ROOT, 0)]) }
    }

    pub fn domain(&self) -> &Rect {
        &self.domain
    }

    pub fn leaves(&self) -> &[Leaf] {
        &self.leaves
    }

    pub fn len(&self) -> usize {
        self.leaves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.leaves.is_empty()
    }

    pub fn leaf(&self, id: &CellId) -> Option<&Leaf> {
        self.index.get(id).map(|&i| &self.leaves[i])
    }

    pub fn max_depth(&self) -> usize {
        self.leaves.iter().map(|l| l.id.depth()).max().unwrap_or(0)
    }

    pub fn total_count(&self) -> f64 {
        self.leaves.iter().map(|l| l.count).sum()
    }

    /// The leaf holding `p`.
    pub fn locate(&self, p: &Point) -> Result<CellId> {
        Ok(self.leaf_containing(p)?.id)
    }

    pub fn leaf_containing(&self, p: &Point) -> Result<&Leaf> {
        if !self.domain.contains_closed(p) {
            return Err(Error::OutsideDomain { x: p.x, y: p.y });
        }
        let mut id = CellId::ROOT;
        let mut rect = self.domain;
        loop {
            if let Some(&i) = self.index.get(&id) {
                return Ok(&self.leaves[i]);
            }
            let code = rect.quadrant_of(p);
            rect = rect.quadrant(code);
            id = id.child(code)?;
        }
    }

    /// Writes `cell_path,xmin,xmax,ymin,ymax,count,exact` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for leaf in &self.leaves {
            w.serialize(CellRow::from(leaf))?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the format produced by [`Partition::write_csv`].
    pub fn read_csv<R: Read>(domain: Rect, reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        let mut leaves = Vec::new();
        for row in r.deserialize::<CellRow>() {
            let row = row?;
            leaves.push((CellId::parse(&row.cell_path)?, row.count, row.exact == 1));
        }
        Partition::from_leaves(domain, leaves)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct CellRow {
    cell_path: String,
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
    count: f64,
    exact: u8,
}

impl From<&Leaf> for CellRow {
    fn from(l: &Leaf) -> Self {
        CellRow {
            cell_path: l.id.to_string(),
            xmin: l.rect.xmin,
            xmax: l.rect.xmax,
            ymin: l.rect.ymin,
            ymax: l.rect.ymax,
            count: l.count,
            exact: l.exact as u8,
        }
    }
}

/// Maximal refinement in which every performed split leaves at least `k`
/// points in each of the four children. Cells reaching `max_depth` stay leaves.
pub fn canonical_partition(points: &[Point], domain: &Rect, k: usize, max_depth: usize) -> Result<Partition> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    if max_depth > MAX_DEPTH {
        return Err(Error::DepthOverflow { depth: max_depth, max: MAX_DEPTH });
    }
    if let Some(p) = points.iter().find(|p| !domain.contains_closed(p)) {
        return Err(Error::OutsideDomain { x: p.x, y: p.y });
    }
    let mut leaves = Vec::new();
    refine(points.to_vec(), CellId::ROOT, *domain, k, max_depth, &mut leaves)?;
    Partition::from_leaves(*domain, leaves)
}

fn refine(
    points: Vec<Point>,
    id: CellId,
    rect: Rect,
    k: usize,
    max_depth: usize,
    leaves: &mut Vec<(CellId, f64, bool)>,
) -> Result<()> {
    if id.depth() < max_depth && points.len() >= BRANCHING * k {
        let mut buckets: [Vec<Point>; 4] = Default::default();
        for p in &points {
            buckets[rect.quadrant_of(p) as usize].push(*p);
        }
        if buckets.iter().all(|b| b.len() >= k) {
            for (code, bucket) in buckets.into_iter().enumerate() {
                refine(bucket, id.child(code as u8)?, rect.quadrant(code as u8), k, max_depth, leaves)?;
            }
            return Ok(());
        }
    }
    leaves.push((id, points.len() as f64, true));
    Ok(())
}
