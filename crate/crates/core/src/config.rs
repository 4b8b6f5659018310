//! Experiment configuration: a plain `key = value` file with `#` comments,
//! layered over per-experiment defaults and under command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::data::CsvColumns;
use crate::error::{Error, Result};
use crate::scheme::{DEFAULT_MAX_DEPTH, MAX_DEPTH};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    Mean,
    Classify,
    Spatial,
    Demo,
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(ExperimentKind::Mean),
            "classify" => Ok(ExperimentKind::Classify),
            "spatial" => Ok(ExperimentKind::Spatial),
            "demo" => Ok(ExperimentKind::Demo),
            other => Err(Error::Config(format!("unknown experiment {other:?}"))),
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExperimentKind::Mean => "mean",
            ExperimentKind::Classify => "classify",
            ExperimentKind::Spatial => "spatial",
            ExperimentKind::Demo => "demo",
        })
    }
}

/// Where the points come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSpec {
    /// `N(0, σ²)` per axis, truncated to `[-half_width, half_width]²`.
    Gaussian { sigma: f64, half_width: f64 },
    /// Gaussian blobs in the unit square.
    Clusters { clusters: usize, spread: f64 },
    /// Blobs labelled by a smooth spatial value split at its median.
    ValuedClusters { clusters: usize, spread: f64 },
    /// Points read from a CSV file.
    Csv { path: PathBuf, columns: CsvColumns },
}

impl DatasetSpec {
    /// Short tag used in result files.
    pub fn name(&self) -> String {
        match self {
            DatasetSpec::Gaussian { .. } => "gaussian".into(),
            DatasetSpec::Clusters { .. } => "clusters".into(),
            DatasetSpec::ValuedClusters { .. } => "valued-clusters".into(),
            DatasetSpec::Csv { path, .. } => {
                path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "csv".into())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkloadStrategy {
    Anchored,
    Uniform,
}

/// Every knob of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub dataset: DatasetSpec,
    /// Population sizes. Classification uses the first entry; the demo too.
    pub n: Vec<usize>,
    /// Total privacy budgets. `inf` disables all noise.
    pub eps: Vec<f64>,
    pub delta: f64,
    pub k: usize,
    pub depth: usize,
    pub trials: usize,
    /// Share of the budget spent discovering regions; the rest goes to the
    /// release.
    pub split: f64,
    pub seed: u64,
    pub out: PathBuf,

    pub knn_k: usize,
    pub train_fraction: f64,
    pub logreg_iters: usize,
    pub k_sweep: Vec<usize>,
    pub k_sweep_runs: usize,
    pub k_sweep_eps: f64,

    /// Size of the synthetic pool that spatial trials subsample from.
    pub pool: usize,
    pub workload: WorkloadStrategy,
    pub queries: usize,
    pub size_min: f64,
    pub size_max: f64,
    pub sel_lo: u64,
    /// Upper selectivity bound as a fraction of `N`.
    pub sel_hi_frac: f64,
    pub grid_depth: usize,
    pub privtree_split: f64,

    pub bump_sigma: f64,
}

impl ExperimentConfig {
    pub fn defaults(kind: ExperimentKind) -> Self {
        let base = ExperimentConfig {
            kind,
            dataset: DatasetSpec::Gaussian { sigma: 1.5, half_width: 10.0 },
            n: vec![2_000, 16_000, 32_000, 64_000],
            eps: vec![0.5, 1.0, 2.0, 4.0, 8.0, 12.0],
            delta: 0.05,
            k: 20,
            depth: DEFAULT_MAX_DEPTH,
            trials: 60,
            split: 0.5,
            seed: 1,
            out: PathBuf::from(format!("{kind}.csv")),
            knn_k: 15,
            train_fraction: 0.7,
            logreg_iters: 300,
            k_sweep: vec![5, 10, 20, 50, 100],
            k_sweep_runs: 50,
            k_sweep_eps: 1.0,
            pool: 100_000,
            workload: WorkloadStrategy::Anchored,
            queries: 200,
            size_min: 1.0 / 256.0,
            size_max: 1.0 / 8.0,
            sel_lo: 20,
            sel_hi_frac: 0.05,
            grid_depth: 6,
            privtree_split: 0.5,
            bump_sigma: 1.0,
        };
        match kind {
            ExperimentKind::Mean => base,
            ExperimentKind::Classify => ExperimentConfig {
                dataset: DatasetSpec::ValuedClusters { clusters: 8, spread: 0.08 },
                n: vec![20_000],
                eps: vec![0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0],
                ..base
            },
            ExperimentKind::Spatial => ExperimentConfig {
                dataset: DatasetSpec::Clusters { clusters: 5, spread: 0.05 },
                n: vec![5_000, 20_000],
                eps: vec![0.5, 1.0, 2.0, 4.0],
                ..base
            },
            ExperimentKind::Demo => ExperimentConfig {
                dataset: DatasetSpec::Gaussian { sigma: 1.0, half_width: 3.0 },
                n: vec![30_000],
                eps: vec![1.0],
                trials: 1,
                out: PathBuf::from("demo"),
                ..base
            },
        }
    }

    /// Defaults for `kind`, then every `key = value` line of `text`.
    pub fn parse(kind: ExperimentKind, text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::defaults(kind);
        let mut pending = DatasetKeys::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", i + 1)))?;
            cfg.set(key.trim(), value.trim(), &mut pending)
                .map_err(|e| Error::Config(format!("line {}: {}", i + 1, strip(e))))?;
        }
        pending.apply(&mut cfg)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(kind: ExperimentKind, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        ExperimentConfig::parse(kind, &text)
    }

    /// Applies one override, e.g. from the command line.
    pub fn set_override(&mut self, key: &str, value: &str) -> Result<()> {
        let mut pending = DatasetKeys::default();
        self.set(key, value, &mut pending).map_err(|e| Error::Config(strip(e)))?;
        pending.apply(self)?;
        self.validate()
    }

    fn set(&mut self, key: &str, value: &str, pending: &mut DatasetKeys) -> Result<()> {
        match key {
            "kind" => {
                let kind: ExperimentKind = value.parse()?;
                if kind != self.kind {
                    return Err(Error::Config(format!("file is for {kind}, not {}", self.kind)));
                }
            }
            "dataset" => pending.name = Some(value.to_string()),
            "sigma" => pending.sigma = Some(num(key, value)?),
            "box" => pending.half_width = Some(num(key, value)?),
            "clusters" => pending.clusters = Some(num(key, value)?),
            "spread" => pending.spread = Some(num(key, value)?),
            "csv_path" => pending.path = Some(PathBuf::from(value)),
            "x_col" => pending.x_col = Some(value.to_string()),
            "y_col" => pending.y_col = Some(value.to_string()),
            "label_col" => pending.label_col = Some(value.to_string()),
            "value_col" => pending.value_col = Some(value.to_string()),
            "n" => self.n = list(key, value)?,
            "eps" => self.eps = list(key, value)?,
            "delta" => self.delta = num(key, value)?,
            "k" => self.k = num(key, value)?,
            "depth" => self.depth = num(key, value)?,
            "trials" => self.trials = num(key, value)?,
            "split" => self.split = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "knn_k" => self.knn_k = num(key, value)?,
            "train_fraction" => self.train_fraction = num(key, value)?,
            "logreg_iters" => self.logreg_iters = num(key, value)?,
            "k_sweep" => self.k_sweep = list(key, value)?,
            "k_sweep_runs" => self.k_sweep_runs = num(key, value)?,
            "k_sweep_eps" => self.k_sweep_eps = num(key, value)?,
            "pool" => self.pool = num(key, value)?,
            "workload" => {
                self.workload = match value {
                    "anchored" => WorkloadStrategy::Anchored,
                    "uniform" => WorkloadStrategy::Uniform,
                    other => return Err(Error::Config(format!("unknown workload {other:?}"))),
                }
            }
            "queries" => self.queries = num(key, value)?,
            "size_min" => self.size_min = num(key, value)?,
            "size_max" => self.size_max = num(key, value)?,
            "sel_lo" => self.sel_lo = num(key, value)?,
            "sel_hi_frac" => self.sel_hi_frac = num(key, value)?,
            "grid_depth" => self.grid_depth = num(key, value)?,
            "privtree_split" => self.privtree_split = num(key, value)?,
            "bump_sigma" => self.bump_sigma = num(key, value)?,
            other => return Err(Error::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.eps.is_empty() || self.eps.iter().any(|e| e.is_nan() || *e <= 0.0) {
            return bad(format!("eps values must be positive, got {:?}", self.eps));
        }
        if self.n.is_empty() || self.n.contains(&0) {
            return bad(format!("population sizes must be positive, got {:?}", self.n));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta must lie in (0, 1), got {}", self.delta));
        }
        if self.k == 0 || self.k_sweep.contains(&0) {
            return bad("k must be at least 1".into());
        }
        if self.depth == 0 || self.depth > MAX_DEPTH {
            return bad(format!("depth must lie in 1..={MAX_DEPTH}, got {}", self.depth));
        }
        if self.trials == 0 || self.k_sweep_runs == 0 {
            return bad("trials must be at least 1".into());
        }
        for (name, v) in [("split", self.split), ("train_fraction", self.train_fraction), ("privtree_split", self.privtree_split)] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {v}"));
            }
        }
        if self.k_sweep_eps.is_nan() || self.k_sweep_eps <= 0.0 {
            return bad(format!("k_sweep_eps must be positive, got {}", self.k_sweep_eps));
        }
        if self.knn_k == 0 {
            return bad("knn_k must be at least 1".into());
        }
        if !(self.size_min > 0.0 && self.size_min <= self.size_max && self.size_max <= 1.0) {
            return bad(format!("query sizes need 0 < {} <= {} <= 1", self.size_min, self.size_max));
        }
        if !(self.sel_hi_frac > 0.0 && self.sel_hi_frac <= 1.0) {
            return bad(format!("sel_hi_frac must lie in (0, 1], got {}", self.sel_hi_frac));
        }
        if self.grid_depth > 12 {
            return bad(format!("grid_depth above 12 is not supported, got {}", self.grid_depth));
        }
        if !(self.bump_sigma > 0.0 && self.bump_sigma.is_finite()) {
            return bad(format!("bump_sigma must be positive, got {}", self.bump_sigma));
        }
        match &self.dataset {
            DatasetSpec::Gaussian { sigma, half_width } if !(*sigma > 0.0 && *half_width > 0.0) => {
                bad("gaussian dataset needs positive sigma and box".into())
            }
            DatasetSpec::Clusters { clusters, spread } | DatasetSpec::ValuedClusters { clusters, spread }
                if *clusters == 0 || spread.is_nan() || *spread < 0.0 =>
            {
                bad("cluster dataset needs clusters >= 1 and spread >= 0".into())
            }
            _ => Ok(()),
        }
    }

    /// Upper selectivity bound for population `n`.
    pub fn sel_hi(&self, n: usize) -> u64 {
        (self.sel_hi_frac * n as f64).floor() as u64
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Config(msg) => msg,
        other => other.to_string(),
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|v| num(key, v.trim())).collect()
}

/// Dataset keys are collected first because their meaning depends on
/// `dataset`, which may appear anywhere in the file.
#[derive(Default)]
struct DatasetKeys {
    name: Option<String>,
    sigma: Option<f64>,
    half_width: Option<f64>,
    clusters: Option<usize>,
    spread: Option<f64>,
    path: Option<PathBuf>,
    x_col: Option<String>,
    y_col: Option<String>,
    label_col: Option<String>,
    value_col: Option<String>,
}

impl DatasetKeys {
    fn apply(self, cfg: &mut ExperimentConfig) -> Result<()> {
        let name = match self.name.as_deref() {
            Some(n) => n.to_string(),
            None => cfg.dataset.name(),
        };
        let (d_sigma, d_half, d_clusters, d_spread) = match &cfg.dataset {
            DatasetSpec::Gaussian { sigma, half_width } => (*sigma, *half_width, 5, 0.05),
            DatasetSpec::Clusters { clusters, spread } | DatasetSpec::ValuedClusters { clusters, spread } => {
                (1.5, 10.0, *clusters, *spread)
            }
            DatasetSpec::Csv { .. } => (1.5, 10.0, 5, 0.05),
        };
        cfg.dataset = match name.as_str() {
            "gaussian" => DatasetSpec::Gaussian {
                sigma: self.sigma.unwrap_or(d_sigma),
                half_width: self.half_width.unwrap_or(d_half),
            },
            "clusters" => DatasetSpec::Clusters {
                clusters: self.clusters.unwrap_or(d_clusters),
                spread: self.spread.unwrap_or(d_spread),
            },
            "valued-clusters" => DatasetSpec::ValuedClusters {
                clusters: self.clusters.unwrap_or(d_clusters),
                spread: self.spread.unwrap_or(d_spread),
            },
            _ if self.name.is_none() => return Ok(()),
            "csv" => {
                let previous = match &cfg.dataset {
                    DatasetSpec::Csv { path, columns } => Some((path.clone(), columns.clone())),
                    _ => None,
                };
                let path = self
                    .path
                    .or_else(|| previous.as_ref().map(|p| p.0.clone()))
                    .ok_or_else(|| Error::Config("dataset = csv needs csv_path".into()))?;
                let base = previous.map(|p| p.1).unwrap_or_else(|| CsvColumns::xy("x", "y"));
                let columns = CsvColumns {
                    x: self.x_col.unwrap_or(base.x),
                    y: self.y_col.unwrap_or(base.y),
                    label: self.label_col.or(base.label),
                    value: self.value_col.or(base.value),
                };
                DatasetSpec::Csv { path, columns }
            }
            other => return Err(Error::Config(format!("unknown dataset {other:?}"))),
        };
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_the_studies() {
        let mean = ExperimentConfig::defaults(ExperimentKind::Mean);
        assert_eq!(mean.eps, vec![0.5, 1.0, 2.0, 4.0, 8.0, 12.0]);
        assert_eq!((mean.trials, mean.delta), (60, 0.05));
        assert_eq!(mean.n, vec![2_000, 16_000, 32_000, 64_000]);
        let cls = ExperimentConfig::defaults(ExperimentKind::Classify);
        assert_eq!((cls.k, cls.k_sweep_runs, cls.k_sweep_eps), (20, 50, 1.0));
        let sp = ExperimentConfig::defaults(ExperimentKind::Spatial);
        assert_eq!((sp.queries, sp.trials), (200, 60));
        assert_eq!(sp.n, vec![5_000, 20_000]);
        assert_eq!(sp.sel_hi(20_000), 1_000);
        assert_eq!(ExperimentConfig::defaults(ExperimentKind::Demo).n, vec![30_000]);
        for kind in [ExperimentKind::Mean, ExperimentKind::Classify, ExperimentKind::Spatial, ExperimentKind::Demo] {
            ExperimentConfig::defaults(kind).validate().unwrap();
        }
    }

    #[test]
    fn parses_files_and_overrides() {
        let text = "# mean study\nkind = mean\neps = 1, 2 ,inf\nn=100\ntrials = 3 # few\ndataset = gaussian\nsigma = 2\n";
        let mut cfg = ExperimentConfig::parse(ExperimentKind::Mean, text).unwrap();
        assert_eq!(cfg.eps, vec![1.0, 2.0, f64::INFINITY]);
        assert_eq!((cfg.n.clone(), cfg.trials), (vec![100], 3));
        assert_eq!(cfg.dataset, DatasetSpec::Gaussian { sigma: 2.0, half_width: 10.0 });
        cfg.set_override("seed", "9").unwrap();
        assert_eq!(cfg.seed, 9);
        cfg.set_override("spread", "0.2").unwrap();
        assert_eq!(cfg.dataset, DatasetSpec::Gaussian { sigma: 2.0, half_width: 10.0 });
    }

    #[test]
    fn csv_dataset_keys() {
        let text = "x_col = lon\ndataset = csv\ncsv_path = data/pts.csv\ny_col = lat\nvalue_col = price\n";
        let cfg = ExperimentConfig::parse(ExperimentKind::Classify, text).unwrap();
        let DatasetSpec::Csv { path, columns } = &cfg.dataset else { panic!("expected csv") };
        assert_eq!(path, &PathBuf::from("data/pts.csv"));
        assert_eq!(columns, &CsvColumns { x: "lon".into(), y: "lat".into(), label: None, value: Some("price".into()) });
        assert_eq!(cfg.dataset.name(), "pts");
    }

    #[test]
    fn config_errors() {
        for text in ["eps = 0", "eps = -1", "bogus = 1", "trials = x", "split = 1.5", "no equals sign", "kind = spatial", "dataset = csv", "dataset = nope"] {
            let err = ExperimentConfig::parse(ExperimentKind::Mean, text).unwrap_err();
            assert!(matches!(err, Error::Config(_)), "{text}: {err}");
            assert_eq!(err.exit_code(), 2);
        }
    }
}
