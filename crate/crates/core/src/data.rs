//! Synthetic generators, CSV ingestion and dataset preprocessing.

use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use statrs::distribution::{ContinuousCDF, Normal as NormalCdf};

use crate::error::{Error, Result};
use crate::geometry::{Point, Rect};
use crate::mechanisms::RngStream;

/// Points with optional binary labels and real values, all the same length.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<Point>,
    pub labels: Option<Vec<u8>>,
    pub values: Option<Vec<f64>>,
    pub domain: Rect,
    pub provenance: String,
}

impl Dataset {
    pub fn new(points: Vec<Point>, domain: Rect, provenance: impl Into<String>) -> Result<Self> {
        if let Some(p) = points.iter().find(|p| !domain.contains_closed(p)) {
            return Err(Error::OutsideDomain { x: p.x, y: p.y });
        }
        Ok(Dataset { points, labels: None, values: None, domain, provenance: provenance.into() })
    }

    pub fn with_labels(mut self, labels: Vec<u8>) -> Result<Self> {
        if labels.len() != self.points.len() {
            return Err(Error::LengthMismatch { left: self.points.len(), right: labels.len() });
        }
        if labels.iter().any(|&l| l > 1) {
            return Err(Error::Data("labels must be 0 or 1".into()));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn with_values(mut self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.points.len() {
            return Err(Error::LengthMismatch { left: self.points.len(), right: values.len() });
        }
        self.values = Some(values);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Rows at `indices`, in that order.
    pub fn select(&self, indices: &[usize]) -> Dataset {
        Dataset {
            points: indices.iter().map(|&i| self.points[i]).collect(),
            labels: self.labels.as_ref().map(|l| indices.iter().map(|&i| l[i]).collect()),
            values: self.values.as_ref().map(|v| indices.iter().map(|&i| v[i]).collect()),
            domain: self.domain,
            provenance: self.provenance.clone(),
        }
    }

    /// CSV with header `x,y` or `x,y,label`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        write_points_csv(writer, &self.points, self.labels.as_deref())
    }
}

pub fn write_points_csv<W: Write>(writer: W, points: &[Point], labels: Option<&[u8]>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    match labels {
        Some(labels) => {
            if labels.len() != points.len() {
                return Err(Error::LengthMismatch { left: points.len(), right: labels.len() });
            }
            w.write_record(["x", "y", "label"])?;
            for (p, l) in points.iter().zip(labels) {
                w.write_record([p.x.to_string(), p.y.to_string(), l.to_string()])?;
            }
        }
        None => {
            w.write_record(["x", "y"])?;
            for p in points {
                w.write_record([p.x.to_string(), p.y.to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// `n` i.i.d. points from `N(0, σ² I)` restricted to `bx` by rejection.
pub fn sample_truncated_gaussian(n: usize, sigma: f64, bx: Rect, rng: &mut RngStream) -> Result<Dataset> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid(format!("sigma must be positive, got {sigma}")));
    }
    let std = NormalCdf::new(0.0, sigma).map_err(|e| Error::invalid(e.to_string()))?;
    let accept = (std.cdf(bx.xmax) - std.cdf(bx.xmin)) * (std.cdf(bx.ymax) - std.cdf(bx.ymin));
    if accept < 1e-6 {
        return Err(Error::invalid(format!("box keeps only {accept:.3e} of the Gaussian mass")));
    }
    let normal = Normal::new(0.0, sigma).map_err(|e| Error::invalid(e.to_string()))?;
    let mut points = Vec::with_capacity(n);
    while points.len() < n {
        let p = Point::new(normal.sample(rng), normal.sample(rng));
        if bx.contains_closed(&p) {
            points.push(p);
        }
    }
    Dataset::new(points, bx, format!("truncated-gaussian(sigma={sigma})"))
}

/// Gaussian blobs around `n_clusters` centers drawn uniformly in the unit
/// square, clipped to it. Returns the dataset and each point's cluster.
pub fn sample_cluster_mixture_with_assignments(
    n: usize,
    n_clusters: usize,
    spread: f64,
    rng: &mut RngStream,
) -> Result<(Dataset, Vec<usize>)> {
    if n_clusters == 0 {
        return Err(Error::invalid("need at least one cluster"));
    }
    if !(spread >= 0.0 && spread.is_finite()) {
        return Err(Error::invalid(format!("spread must be non-negative, got {spread}")));
    }
    let dom = Rect::unit();
    let centers: Vec<Point> = (0..n_clusters).map(|_| Point::new(rng.random(), rng.random())).collect();
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut points = Vec::with_capacity(n);
    let mut assignment = Vec::with_capacity(n);
    for _ in 0..n {
        let c = rng.random_range(0..n_clusters);
        let p = Point::new(
            centers[c].x + spread * normal.sample(rng),
            centers[c].y + spread * normal.sample(rng),
        );
        points.push(dom.clamp(&p));
        assignment.push(c);
    }
    let ds = Dataset::new(points, dom, format!("clusters(k={n_clusters},spread={spread})"))?;
    Ok((ds, assignment))
}

pub fn sample_cluster_mixture(n: usize, n_clusters: usize, spread: f64, rng: &mut RngStream) -> Result<Dataset> {
    Ok(sample_cluster_mixture_with_assignments(n, n_clusters, spread, rng)?.0)
}

/// Clustered points carrying a smooth spatial value `sin(2πx) + cos(2πy)`,
/// labelled by whether the value exceeds the median.
pub fn sample_valued_clusters(n: usize, n_clusters: usize, spread: f64, rng: &mut RngStream) -> Result<Dataset> {
    let ds = sample_cluster_mixture(n, n_clusters, spread, rng)?;
    let values: Vec<f64> = ds.points.iter().map(|p| (2.0 * PI * p.x).sin() + (2.0 * PI * p.y).cos()).collect();
    let labels = binarize_labels_by_median(&values);
    let mut ds = ds.with_values(values)?.with_labels(labels)?;
    ds.provenance = format!("valued-{}", ds.provenance);
    Ok(ds)
}

/// Column names to read from a CSV file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvColumns {
    pub x: String,
    pub y: String,
    pub label: Option<String>,
    pub value: Option<String>,
}

impl CsvColumns {
    pub fn xy(x: impl Into<String>, y: impl Into<String>) -> Self {
        CsvColumns { x: x.into(), y: y.into(), label: None, value: None }
    }
}

#[derive(Debug, Clone)]
pub struct LoadedCsv {
    pub dataset: Dataset,
    /// Rows dropped because a requested field did not parse.
    pub skipped: usize,
}

/// Reads points from a headed CSV. The domain is the points' bounding box.
/// Labels must be `0` or `1`.
pub fn load_points_csv(path: &Path, columns: &CsvColumns) -> Result<LoadedCsv> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Error::Data(format!("{}: no column named {name:?}", path.display())))
    };
    let xi = find(&columns.x)?;
    let yi = find(&columns.y)?;
    let li = columns.label.as_deref().map(find).transpose()?;
    let vi = columns.value.as_deref().map(find).transpose()?;

    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut values = Vec::new();
    let mut skipped = 0;
    for row in reader.records() {
        let row = row?;
        let num = |i: usize| row.get(i).and_then(|s| s.trim().parse::<f64>().ok()).filter(|v| v.is_finite());
        let label = match li {
            Some(i) => match row.get(i).map(str::trim) {
                Some("0") => Some(Some(0u8)),
                Some("1") => Some(Some(1u8)),
                _ => None,
            },
            None => Some(None),
        };
        let value = match vi {
            Some(i) => num(i).map(Some),
            None => Some(None),
        };
        match (num(xi), num(yi), label, value) {
            (Some(x), Some(y), Some(l), Some(v)) => {
                points.push(Point::new(x, y));
                labels.extend(l);
                values.extend(v);
            }
            _ => skipped += 1,
        }
    }
    let domain = Rect::bounding(&points).ok_or_else(|| Error::Data(format!("{}: no usable rows", path.display())))?;
    let mut dataset = Dataset::new(points, domain, path.display().to_string())?;
    if li.is_some() {
        dataset = dataset.with_labels(labels)?;
    }
    if vi.is_some() {
        dataset = dataset.with_values(values)?;
    }
    Ok(LoadedCsv { dataset, skipped })
}

/// Affine per-axis map of the bounding box onto `[0,1]²`. An axis with a
/// single coordinate value maps to 0.5.
pub fn normalize_to_unit_square(ds: &Dataset) -> Result<Dataset> {
    let bb = Rect::bounding(&ds.points).ok_or_else(|| Error::Data("cannot normalize an empty dataset".into()))?;
    let axis = |v: f64, lo: f64, hi: f64| if hi > lo { ((v - lo) / (hi - lo)).clamp(0.0, 1.0) } else { 0.5 };
    let points = ds
        .points
        .iter()
        .map(|p| Point::new(axis(p.x, bb.xmin, bb.xmax), axis(p.y, bb.ymin, bb.ymax)))
        .collect();
    Ok(Dataset { points, domain: Rect::unit(), ..ds.clone() })
}

/// `1` where the value is strictly above the median, else `0`.
pub fn binarize_labels_by_median(values: &[f64]) -> Vec<u8> {
    if values.is_empty() {
        return Vec::new();
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
    values.iter().map(|&v| (v > median) as u8).collect()
}

/// `n` rows drawn without replacement.
pub fn subsample(ds: &Dataset, n: usize, rng: &mut RngStream) -> Result<Dataset> {
    if n > ds.len() {
        return Err(Error::Data(format!("cannot draw {n} rows from a dataset of {}", ds.len())));
    }
    let picked = index::sample(rng, ds.len(), n).into_vec();
    Ok(ds.select(&picked))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncated_gaussian_moments() {
        let bx = Rect::centered_square(10.0).unwrap();
        let ds = sample_truncated_gaussian(100_000, 1.5, bx, &mut RngStream::new(1, 0)).unwrap();
        assert!(ds.points.iter().all(|p| bx.contains_closed(p)));
        for coord in [|p: &Point| p.x, |p: &Point| p.y] {
            let xs: Vec<f64> = ds.points.iter().map(coord).collect();
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            let sd = (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt();
            assert!((sd - 1.5).abs() < 0.02, "sd {sd}");
        }
        assert!(sample_truncated_gaussian(0, 1.5, bx, &mut RngStream::new(1, 0)).unwrap().is_empty());
        let far = Rect::new(50.0, 51.0, 50.0, 51.0).unwrap();
        assert!(sample_truncated_gaussian(10, 1.0, far, &mut RngStream::new(1, 0)).is_err());
    }

    #[test]
    fn cluster_mixture() {
        let (ds, assign) = sample_cluster_mixture_with_assignments(100_000, 4, 0.05, &mut RngStream::new(2, 0)).unwrap();
        assert!(ds.points.iter().all(|p| Rect::unit().contains_closed(p)));
        let n = ds.len() as f64;
        let sd = (0.25f64 * 0.75 / n).sqrt();
        for c in 0..4 {
            let share = assign.iter().filter(|&&a| a == c).count() as f64 / n;
            assert!((share - 0.25).abs() < 3.0 * sd, "share {share}");
        }
        let tight = sample_cluster_mixture(500, 1, 0.0, &mut RngStream::new(3, 0)).unwrap();
        assert!(tight.points.iter().all(|p| *p == tight.points[0]));
        assert!(sample_cluster_mixture(5, 0, 0.1, &mut RngStream::new(3, 0)).is_err());
    }

    #[test]
    fn generators_are_reproducible() {
        let a = sample_valued_clusters(1_000, 3, 0.1, &mut RngStream::new(4, 0)).unwrap();
        let b = sample_valued_clusters(1_000, 3, 0.1, &mut RngStream::new(4, 0)).unwrap();
        assert_eq!(a, b);
        let ones = a.labels.as_ref().unwrap().iter().filter(|&&l| l == 1).count();
        assert!((490..=500).contains(&ones), "{ones}");
    }

    #[test]
    fn csv_loading() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pts.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "lat,lon,label\n1.0,2.0,1\n3.0,4.0,0\n5.0,6.0,1").unwrap();
        let got = load_points_csv(&path, &CsvColumns { label: Some("label".into()), ..CsvColumns::xy("lon", "lat") }).unwrap();
        assert_eq!(got.dataset.len(), 3);
        assert_eq!(got.skipped, 0);
        assert_eq!(got.dataset.points[0], Point::new(2.0, 1.0));
        assert_eq!(got.dataset.labels, Some(vec![1, 0, 1]));

        std::fs::write(&path, "lat,lon\n1.0,2.0\nnope,4.0\n5.0,6.0\n").unwrap();
        let got = load_points_csv(&path, &CsvColumns::xy("lon", "lat")).unwrap();
        assert_eq!((got.dataset.len(), got.skipped), (2, 1));

        assert!(matches!(load_points_csv(&path, &CsvColumns::xy("x", "lat")), Err(Error::Data(_))));
        std::fs::write(&path, "lat,lon\nnope,1\n").unwrap();
        assert!(matches!(load_points_csv(&path, &CsvColumns::xy("lon", "lat")), Err(Error::Data(_))));
    }

    #[test]
    fn normalization() {
        let ds = Dataset::new(vec![Point::new(0.0, 0.0), Point::new(10.0, 20.0)], Rect::new(0.0, 10.0, 0.0, 20.0).unwrap(), "t").unwrap();
        let n = normalize_to_unit_square(&ds).unwrap();
        assert_eq!(n.points, vec![Point::new(0.0, 0.0), Point::new(1.0, 1.0)]);
        let flat = Dataset::new(vec![Point::new(1.0, 3.0), Point::new(2.0, 3.0)], Rect::new(0.0, 5.0, 0.0, 5.0).unwrap(), "t").unwrap();
        assert_eq!(normalize_to_unit_square(&flat).unwrap().points[0], Point::new(0.0, 0.5));
        let empty = Dataset::new(vec![], Rect::unit(), "t").unwrap();
        assert!(normalize_to_unit_square(&empty).is_err());

        let blob = sample_truncated_gaussian(2_000, 1.0, Rect::centered_square(3.0).unwrap(), &mut RngStream::new(5, 0)).unwrap();
        let once = normalize_to_unit_square(&blob).unwrap();
        let twice = normalize_to_unit_square(&once).unwrap();
        for (a, b) in once.points.iter().zip(&twice.points) {
            assert!((a.x - b.x).abs() < 1e-12 && (a.y - b.y).abs() < 1e-12);
        }
    }

    #[test]
    fn median_labels() {
        assert_eq!(binarize_labels_by_median(&[1.0, 2.0, 3.0]), vec![0, 0, 1]);
        assert_eq!(binarize_labels_by_median(&[4.0; 5]), vec![0; 5]);
        for n in [7usize, 8, 101, 1000] {
            let vals: Vec<f64> = (0..n).map(|i| ((i * 7919) % n) as f64).collect();
            let frac = binarize_labels_by_median(&vals).iter().map(|&l| l as f64).sum::<f64>() / n as f64;
            assert!(frac <= 0.5 && frac >= 0.5 - 1.0 / n as f64, "n {n}: {frac}");
        }
    }

    #[test]
    fn subsampling() {
        let points: Vec<Point> = (0..1_000).map(|i| Point::new(i as f64 / 1_000.0, 0.5)).collect();
        let ds = Dataset::new(points, Rect::unit(), "t").unwrap().with_labels(vec![1; 1_000]).unwrap();
        let sub = subsample(&ds, 300, &mut RngStream::new(7, 0)).unwrap();
        assert_eq!(sub.len(), 300);
        assert_eq!(sub.labels.as_ref().unwrap().len(), 300);
        let mut seen: Vec<(u64, u64)> = sub.points.iter().map(|p| (p.x.to_bits(), p.y.to_bits())).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 300);
        assert!(subsample(&ds, 1_001, &mut RngStream::new(7, 0)).is_err());
    }

    #[test]
    fn dataset_csv() {
        let ds = Dataset::new(vec![Point::new(0.25, 0.5)], Rect::unit(), "t").unwrap().with_labels(vec![1]).unwrap();
        let mut buf = Vec::new();
        ds.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,y,label\n0.25,0.5,1\n");
    }
}
