use std::io::{Read, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};
use crate::mechanisms::RngStream;

const MAX_ATTEMPTS: usize = 1_000_000;

/// A rectangular counting query.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeQuery {
    pub rect: Rect,
    /// Number of points in the closed rectangle, when known.
    pub true_count: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum WorkloadKind {
    Anchored(AnchoredParams),
    Uniform { m: usize, size_min: f64, size_max: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Workload {
    pub queries: Vec<RangeQuery>,
    pub kind: WorkloadKind,
    pub seed: u64,
}

/// Parameters of the anchored multi-scale strategy. Sizes are fractions of
/// the domain side; selectivity bounds are inclusive point counts.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchoredParams {
    pub m: usize,
    pub size_min: f64,
    pub size_max: f64,
    pub sel_lo: u64,
    pub sel_hi: u64,
}

impl AnchoredParams {
    /// 200 queries, sides in `[1/256, 1/8]`, counts in `[20, ⌊0.05 N⌋]`.
    pub fn for_population(n: usize) -> Self {
        AnchoredParams { m: 200, size_min: 1.0 / 256.0, size_max: 1.0 / 8.0, sel_lo: 20, sel_hi: n as u64 / 20 }
    }

    fn validate(&self) -> Result<()> {
        check_sizes(self.size_min, self.size_max)?;
        if self.sel_lo > self.sel_hi {
            return Err(Error::invalid(format!("selectivity range [{}, {}] is empty", self.sel_lo, self.sel_hi)));
        }
        Ok(())
    }
}

fn check_sizes(size_min: f64, size_max: f64) -> Result<()> {
    if !(size_min > 0.0 && size_min <= size_max && size_max <= 1.0) {
        return Err(Error::invalid(format!("query sizes need 0 < {size_min} <= {size_max} <= 1")));
    }
    Ok(())
}

/// Points in the closed rectangle `q`.
pub fn count_in(points: &[Point], q: &Rect) -> u64 {
    points.iter().filter(|p| q.contains_closed(p)).count() as u64
}

/// Points sorted by x for fast repeated counting.
struct SortedPoints {
    by_x: Vec<Point>,
}

impl SortedPoints {
    fn new(points: &[Point]) -> Self {
        let mut by_x = points.to_vec();
        by_x.sort_by(|a, b| a.x.total_cmp(&b.x));
        SortedPoints { by_x }
    }

    fn count(&self, q: &Rect) -> u64 {
        let lo = self.by_x.partition_point(|p| p.x < q.xmin);
        let hi = self.by_x.partition_point(|p| p.x <= q.xmax);
        self.by_x[lo..hi].iter().filter(|p| q.ymin <= p.y && p.y <= q.ymax).count() as u64
    }
}

fn log_uniform(rng: &mut RngStream, lo: f64, hi: f64) -> f64 {
    let (a, b) = (lo.log2(), hi.log2());
    (a + (b - a) * rng.random::<f64>()).exp2()
}

/// Start of an interval of length `len` that holds `anchor` and stays within
/// `[lo, hi]`, drawn uniformly among such positions.
fn place(rng: &mut RngStream, anchor: f64, len: f64, lo: f64, hi: f64) -> f64 {
    let start_min = (anchor - len).max(lo);
    let start_max = anchor.min(hi - len);
    if start_max <= start_min {
        return start_min;
    }
    rng.random_range(start_min..=start_max)
}

/// Anchored multi-scale workload: each query is placed around a random data
/// point and kept only if its true count falls in the selectivity range.
pub fn gen_anchored_workload(points: &[Point], domain: &Rect, params: &AnchoredParams, rng: &mut RngStream) -> Result<Workload> {
    params.validate()?;
    let seed = rng.seed();
    if params.m == 0 {
        return Ok(Workload { queries: Vec::new(), kind: WorkloadKind::Anchored(params.clone()), seed });
    }
    if points.is_empty() {
        return Err(Error::InfeasibleWorkload("no points to anchor queries on".into()));
    }
    let index = SortedPoints::new(points);
    let mut queries = Vec::with_capacity(params.m);
    let mut attempts = 0usize;
    while queries.len() < params.m {
        attempts += 1;
        if attempts > MAX_ATTEMPTS {
            return Err(Error::InfeasibleWorkload(format!(
                "only {} of {} queries reached a true count in [{}, {}] after {MAX_ATTEMPTS} attempts",
                queries.len(),
                params.m,
                params.sel_lo,
                params.sel_hi
            )));
        }
        let anchor = points[rng.random_range(0..points.len())];
        let w = log_uniform(rng, params.size_min, params.size_max) * domain.width();
        let h = log_uniform(rng, params.size_min, params.size_max) * domain.height();
        let x0 = place(rng, anchor.x, w, domain.xmin, domain.xmax);
        let y0 = place(rng, anchor.y, h, domain.ymin, domain.ymax);
        let rect = Rect::new(x0, (x0 + w).min(domain.xmax), y0, (y0 + h).min(domain.ymax))?;
        let y = index.count(&rect);
        if (params.sel_lo..=params.sel_hi).contains(&y) {
            queries.push(RangeQuery { rect, true_count: Some(y) });
        }
    }
    Ok(Workload { queries, kind: WorkloadKind::Anchored(params.clone()), seed })
}

/// `m` queries with side lengths uniform in `[size_min, size_max]` (fractions
/// of the domain side), placed uniformly inside the domain. True counts are
/// filled when `points` is given.
pub fn gen_uniform_workload(
    m: usize,
    size_min: f64,
    size_max: f64,
    domain: &Rect,
    points: Option<&[Point]>,
    rng: &mut RngStream,
) -> Result<Workload> {
    check_sizes(size_min, size_max)?;
    let index = points.map(SortedPoints::new);
    let queries = (0..m)
        .map(|_| {
            let w = rng.random_range(size_min..=size_max) * domain.width();
            let h = rng.random_range(size_min..=size_max) * domain.height();
            let x0 = domain.xmin + rng.random::<f64>() * (domain.width() - w);
            let y0 = domain.ymin + rng.random::<f64>() * (domain.height() - h);
            let rect = Rect::new(x0, (x0 + w).min(domain.xmax), y0, (y0 + h).min(domain.ymax))?;
            Ok(RangeQuery { rect, true_count: index.as_ref().map(|ix| ix.count(&rect)) })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Workload { queries, kind: WorkloadKind::Uniform { m, size_min, size_max }, seed: rng.seed() })
}

#[derive(Serialize, Deserialize)]
struct QueryRow {
    xmin: f64,
    xmax: f64,
    ymin: f64,
    ymax: f64,
    true_count: Option<u64>,
}

impl Workload {
    /// True counts in query order. Fails if any is unknown.
    pub fn truths(&self) -> Result<Vec<u64>> {
        self.queries
            .iter()
            .map(|q| q.true_count.ok_or_else(|| Error::Data("workload has queries without true counts".into())))
            .collect()
    }

    /// CSV with header `xmin,xmax,ymin,ymax,true_count`; unknown counts are empty.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for q in &self.queries {
            let Rect { xmin, xmax, ymin, ymax } = q.rect;
            w.serialize(QueryRow { xmin, xmax, ymin, ymax, true_count: q.true_count })?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_queries<R: Read>(reader: R) -> Result<Vec<RangeQuery>> {
        csv::Reader::from_reader(reader)
            .deserialize::<QueryRow>()
            .map(|row| {
                let row = row?;
                Ok(RangeQuery { rect: Rect::new(row.xmin, row.xmax, row.ymin, row.ymax)?, true_count: row.true_count })
            })
            .collect()
    }
}
