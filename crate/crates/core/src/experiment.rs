//! Seeded, trial-parallel runners for the mean, classification and spatial
//! studies and the function-release demo.
//!
//! Every trial draws from `RngStream::new(seed, 0).substream(&[study, ...])`,
//! so rows depend only on the configuration and their own indices, and
//! output is identical whatever the thread count.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::{DatasetSpec, ExperimentConfig, WorkloadStrategy};
use crate::data::{
    binarize_labels_by_median, load_points_csv, normalize_to_unit_square, sample_cluster_mixture,
    sample_truncated_gaussian, sample_valued_clusters, subsample, Dataset,
};
use crate::error::{Error, Result};
use crate::estimators::{
    dp_mean, ldp_mean, perturb_geo, perturb_ldp, perturb_quantize, perturb_split, sldp_mean, sldp_report,
    BoundedFunction,
};
use crate::eval::{f1_precision_recall, knn_predict, logreg_fit, split_train_test, Scores};
use crate::geometry::{Point, Rect};
use crate::mechanisms::{laplace_noise, RngStream};
use crate::protocol::{server_run, ProtocolConfig};
use crate::scheme::Partition;
use crate::spatial::{
    answer_query, gen_anchored_workload, gen_uniform_workload, ldp_grid_build, mre, privtree_build,
    smoothing_threshold, AnchoredParams, Workload,
};

const MEAN: u64 = 1;
const CLASSIFY: u64 = 2;
const SPATIAL: u64 = 3;
const DEMO: u64 = 4;
/// Sub-stream tag for data fixed across a whole run.
const FIXED: u64 = u64::MAX;

fn master(cfg: &ExperimentConfig) -> RngStream {
    RngStream::new(cfg.seed, 0)
}

/// Splits `eps` into a region share and a release share.
pub fn split_budget(eps: f64, share: f64) -> (f64, f64) {
    if eps.is_infinite() {
        return (eps, eps);
    }
    let regions = eps * share;
    (regions, eps - regions)
}

/// Empirical quantile with linear interpolation; `q` in `[0, 1]`.
pub fn quantile(xs: &[f64], q: f64) -> f64 {
    let mut s = xs.to_vec();
    s.sort_by(f64::total_cmp);
    if s.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (s.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    s[lo] + (s[hi] - s[lo]) * (pos - lo as f64)
}

/// Writes serializable rows as CSV, creating parent directories.
pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn load_csv(spec: &DatasetSpec) -> Result<Option<Dataset>> {
    let DatasetSpec::Csv { path, columns } = spec else { return Ok(None) };
    let loaded = load_points_csv(path, columns)?;
    if loaded.skipped > 0 {
        eprintln!("{}: skipped {} malformed rows", path.display(), loaded.skipped);
    }
    Ok(Some(loaded.dataset))
}

/// `n` points from the configured source: fresh synthetic draws, or a
/// subsample of `fixed` for file-backed datasets.
fn population(spec: &DatasetSpec, fixed: Option<&Dataset>, n: usize, rng: &mut RngStream) -> Result<Dataset> {
    match (spec, fixed) {
        (_, Some(ds)) => subsample(ds, n, rng),
        (DatasetSpec::Gaussian { sigma, half_width }, None) => {
            sample_truncated_gaussian(n, *sigma, Rect::centered_square(*half_width)?, rng)
        }
        (DatasetSpec::Clusters { clusters, spread }, None) => sample_cluster_mixture(n, *clusters, *spread, rng),
        (DatasetSpec::ValuedClusters { clusters, spread }, None) => sample_valued_clusters(n, *clusters, *spread, rng),
        (DatasetSpec::Csv { .. }, None) => unreachable!("file datasets are loaded up front"),
    }
}

// ---------------------------------------------------------------- mean

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanRow {
    pub n: usize,
    pub eps: f64,
    pub trial: usize,
    pub method: String,
    pub estimate: f64,
    pub truth: f64,
    pub sq_error: f64,
    pub eps_regions: f64,
    pub eps_release: f64,
}

/// Squared-norm mean estimation under DP, LDP and SLDP. DP and LDP spend the
/// whole budget on the release; SLDP spends `split` of it on the regions.
pub fn run_mean_experiment(cfg: &ExperimentConfig) -> Result<Vec<MeanRow>> {
    let fixed = load_csv(&cfg.dataset)?;
    let jobs: Vec<(usize, usize)> = cfg.n.iter().flat_map(|&n| (0..cfg.trials).map(move |t| (n, t))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(n, trial)| mean_trial(cfg, fixed.as_ref(), n, trial))
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn mean_trial(cfg: &ExperimentConfig, fixed: Option<&Dataset>, n: usize, trial: usize) -> Result<Vec<MeanRow>> {
    let base = master(cfg).substream(&[MEAN, n as u64, trial as u64]);
    let data = population(&cfg.dataset, fixed, n, &mut base.substream(&[0]))?;
    let domain = data.domain;
    let f = BoundedFunction::SquaredNorm;
    let values: Vec<f64> = data.points.iter().map(|p| f.eval(p)).collect();
    let c = f.bound(&domain);
    let truth = values.iter().sum::<f64>() / n as f64;

    let mut rows = Vec::with_capacity(3 * cfg.eps.len());
    for (ei, &eps) in cfg.eps.iter().enumerate() {
        let noise = base.substream(&[1, ei as u64]);
        let (eps_r, eps_m) = split_budget(eps, cfg.split);
        let protocol = ProtocolConfig::new(domain, eps_r, cfg.delta, cfg.k, cfg.depth)?;
        let outcome = server_run(&data.points, &protocol, &noise.substream(&[2]))?;
        let regions: Vec<Rect> = outcome.regions().iter().map(|id| id.rect(&domain)).collect();
        let estimates = [
            ("dp", dp_mean(&values, c, eps, &mut noise.substream(&[0]))?, 0.0, eps),
            ("ldp", ldp_mean(&values, c, eps, &mut noise.substream(&[1]))?, 0.0, eps),
            ("sldp", sldp_mean(&data.points, &regions, &f, eps_m, &mut noise.substream(&[3]))?, eps_r, eps_m),
        ];
        for (method, estimate, eps_regions, eps_release) in estimates {
            rows.push(MeanRow {
                n,
                eps,
                trial,
                method: method.into(),
                estimate,
                truth,
                sq_error: (estimate - truth).powi(2),
                eps_regions,
                eps_release,
            });
        }
    }
    Ok(rows)
}

// ---------------------------------------------------------------- classification

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mechanism {
    SldpQuantize,
    SldpSplit,
    Ldp,
    Geo,
}

impl Mechanism {
    pub const ALL: [Mechanism; 4] = [Mechanism::SldpQuantize, Mechanism::SldpSplit, Mechanism::Ldp, Mechanism::Geo];

    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::SldpQuantize => "sldp-quantize",
            Mechanism::SldpSplit => "sldp-split",
            Mechanism::Ldp => "ldp",
            Mechanism::Geo => "geo",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassifyRow {
    pub mechanism: String,
    pub classifier: String,
    pub eps: f64,
    pub k_anon: usize,
    pub trial: usize,
    pub f1: f64,
    pub precision: f64,
    pub recall: f64,
    pub eps_regions: f64,
    pub eps_release: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassifyResults {
    /// Every mechanism at every budget, with the configured `k`.
    pub grid: Vec<ClassifyRow>,
    /// SLDP mechanisms at `k_sweep_eps` for every `k` in the sweep.
    pub k_sweep: Vec<ClassifyRow>,
}

/// The labelled dataset of the classification study, scaled to the unit
/// square. File-backed data uses its label column, or else its value column
/// split at the median.
pub fn classification_dataset(cfg: &ExperimentConfig) -> Result<Dataset> {
    let n = cfg.n[0];
    let mut rng = master(cfg).substream(&[CLASSIFY, FIXED]);
    let ds = match load_csv(&cfg.dataset)? {
        Some(ds) => {
            let ds = if ds.len() > n { subsample(&ds, n, &mut rng)? } else { ds };
            normalize_to_unit_square(&ds)?
        }
        None => population(&cfg.dataset, None, n, &mut rng)?,
    };
    match (&ds.labels, &ds.values) {
        (Some(_), _) => Ok(ds),
        (None, Some(values)) => {
            let labels = binarize_labels_by_median(values);
            ds.with_labels(labels)
        }
        (None, None) => Err(Error::Data(format!("dataset {} has no labels or values to classify", ds.provenance))),
    }
}

/// Train/test indices for one trial.
pub fn classification_split(cfg: &ExperimentConfig, n: usize, trial: usize) -> Result<(Vec<usize>, Vec<usize>)> {
    split_train_test(n, cfg.train_fraction, &mut master(cfg).substream(&[CLASSIFY, 0, trial as u64]))
}

/// Perturbs training points with one mechanism. Returns the points and the
/// budget spent on (regions, release).
pub fn perturb_training(
    mech: Mechanism,
    points: &[Point],
    eps: f64,
    k: usize,
    cfg: &ExperimentConfig,
    rng: &RngStream,
) -> Result<(Vec<Point>, f64, f64)> {
    let dom = Rect::unit();
    let partition = |eps_regions: f64| -> Result<Partition> {
        let protocol = ProtocolConfig::new(dom, eps_regions, cfg.delta, k, cfg.depth)?;
        Ok(server_run(points, &protocol, &rng.substream(&[0]))?.partition)
    };
    let mut noise = rng.substream(&[1]);
    match mech {
        Mechanism::SldpQuantize => {
            let part = partition(eps)?;
            let out = points.iter().map(|p| perturb_quantize(p, &part)).collect::<Result<_>>()?;
            Ok((out, eps, 0.0))
        }
        Mechanism::SldpSplit => {
            let (eps_r, eps_m) = split_budget(eps, cfg.split);
            let part = partition(eps_r)?;
            let out = points.iter().map(|p| perturb_split(p, &part, eps_m, &mut noise)).collect::<Result<_>>()?;
            Ok((out, eps_r, eps_m))
        }
        Mechanism::Ldp => {
            let out = points.iter().map(|p| perturb_ldp(p, &dom, eps, &mut noise)).collect::<Result<_>>()?;
            Ok((out, 0.0, eps))
        }
        Mechanism::Geo => {
            let out = points.iter().map(|p| perturb_geo(p, eps, &mut noise)).collect::<Result<_>>()?;
            Ok((out, 0.0, eps))
        }
    }
}

/// Distance-weighted kNN scores on a clean test set.
pub fn knn_scores(cfg: &ExperimentConfig, train: &[Point], labels: &[u8], test: &[Point], truth: &[u8]) -> Result<Scores> {
    let k = cfg.knn_k.min(train.len());
    f1_precision_recall(&knn_predict(train, labels, test, k, true)?, truth)
}

/// Logistic-regression scores on a clean test set.
pub fn logreg_scores(cfg: &ExperimentConfig, train: &[Point], labels: &[u8], test: &[Point], truth: &[u8]) -> Result<Scores> {
    let model = logreg_fit(train, labels, cfg.logreg_iters, 1.0)?;
    f1_precision_recall(&model.predict(test), truth)
}

#[allow(clippy::too_many_arguments)]
fn classify_job(
    cfg: &ExperimentConfig,
    ds: &Dataset,
    mech: Mechanism,
    eps: f64,
    k: usize,
    trial: usize,
    stream: &RngStream,
    with_logreg: bool,
) -> Result<Vec<ClassifyRow>> {
    let labels = ds.labels.as_ref().expect("classification data is labelled");
    let (train_idx, test_idx) = classification_split(cfg, ds.len(), trial)?;
    let train: Vec<Point> = train_idx.iter().map(|&i| ds.points[i]).collect();
    let train_labels: Vec<u8> = train_idx.iter().map(|&i| labels[i]).collect();
    let test: Vec<Point> = test_idx.iter().map(|&i| ds.points[i]).collect();
    let test_labels: Vec<u8> = test_idx.iter().map(|&i| labels[i]).collect();

    let (perturbed, eps_regions, eps_release) = perturb_training(mech, &train, eps, k, cfg, stream)?;
    let mut scored = vec![("knn", knn_scores(cfg, &perturbed, &train_labels, &test, &test_labels)?)];
    if with_logreg {
        scored.push(("logreg", logreg_scores(cfg, &perturbed, &train_labels, &test, &test_labels)?));
    }
    Ok(scored
        .into_iter()
        .map(|(classifier, s)| ClassifyRow {
            mechanism: mech.name().into(),
            classifier: classifier.into(),
            eps,
            k_anon: k,
            trial,
            f1: s.f1,
            precision: s.precision,
            recall: s.recall,
            eps_regions,
            eps_release,
        })
        .collect())
}

/// Perturb-then-train study: every mechanism and budget, then the `k` sweep
/// of the SLDP mechanisms with kNN.
pub fn run_classify_experiment(cfg: &ExperimentConfig) -> Result<ClassifyResults> {
    let ds = classification_dataset(cfg)?;
    let root = master(cfg);

    let mut jobs = Vec::new();
    for (mi, mech) in Mechanism::ALL.iter().enumerate() {
        for (ei, &eps) in cfg.eps.iter().enumerate() {
            for trial in 0..cfg.trials {
                jobs.push((*mech, eps, trial, root.substream(&[CLASSIFY, 1, mi as u64, ei as u64, trial as u64])));
            }
        }
    }
    let grid = jobs
        .par_iter()
        .map(|(mech, eps, trial, stream)| classify_job(cfg, &ds, *mech, *eps, cfg.k, *trial, stream, true))
        .collect::<Result<Vec<_>>>()?;

    let mut sweep_jobs = Vec::new();
    for &k in &cfg.k_sweep {
        for (mi, mech) in [Mechanism::SldpQuantize, Mechanism::SldpSplit].iter().enumerate() {
            for run in 0..cfg.k_sweep_runs {
                sweep_jobs.push((*mech, k, run, root.substream(&[CLASSIFY, 2, k as u64, mi as u64, run as u64])));
            }
        }
    }
    let k_sweep = sweep_jobs
        .par_iter()
        .map(|(mech, k, run, stream)| classify_job(cfg, &ds, *mech, cfg.k_sweep_eps, *k, *run, stream, false))
        .collect::<Result<Vec<_>>>()?;

    Ok(ClassifyResults { grid: grid.into_iter().flatten().collect(), k_sweep: k_sweep.into_iter().flatten().collect() })
}

/// Path of the `k`-sweep file next to the main results file.
pub fn k_sweep_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "classify".into());
    out.with_file_name(format!("{stem}_ksweep.csv"))
}

// ---------------------------------------------------------------- spatial

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpatialRow {
    pub dataset: String,
    pub method: String,
    pub eps: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub trial: usize,
    pub mre: f64,
    pub tau: f64,
    pub eps_regions: f64,
    pub eps_release: f64,
}

/// Points the spatial trials subsample from, in the unit square.
pub fn spatial_pool(cfg: &ExperimentConfig) -> Result<Dataset> {
    match load_csv(&cfg.dataset)? {
        Some(ds) => normalize_to_unit_square(&ds),
        None => {
            let size = cfg.pool.max(cfg.n.iter().copied().max().unwrap_or(0));
            population(&cfg.dataset, None, size, &mut master(cfg).substream(&[SPATIAL, FIXED]))
        }
    }
}

/// The users and the query workload of one spatial trial.
pub fn spatial_trial_inputs(cfg: &ExperimentConfig, pool: &Dataset, n: usize, trial: usize) -> Result<(Vec<Point>, Workload)> {
    let base = master(cfg).substream(&[SPATIAL, n as u64, trial as u64]);
    let sample = subsample(pool, n, &mut base.substream(&[0]))?.points;
    let mut rng = base.substream(&[1]);
    let dom = Rect::unit();
    let workload = match cfg.workload {
        WorkloadStrategy::Anchored => {
            let params = AnchoredParams {
                m: cfg.queries,
                size_min: cfg.size_min,
                size_max: cfg.size_max,
                sel_lo: cfg.sel_lo,
                sel_hi: cfg.sel_hi(n),
            };
            gen_anchored_workload(&sample, &dom, &params, &mut rng)?
        }
        WorkloadStrategy::Uniform => gen_uniform_workload(cfg.queries, cfg.size_min, cfg.size_max, &dom, Some(&sample), &mut rng)?,
    };
    Ok((sample, workload))
}

/// MRE of a partition over a workload.
pub fn workload_mre(partition: &Partition, workload: &Workload, n: usize) -> Result<f64> {
    let answers: Vec<f64> = workload.queries.iter().map(|q| answer_query(partition, &q.rect)).collect();
    mre(&answers, &workload.truths()?, n)
}

/// Range-query study: SLDP, PrivTree and the LDP grid on the same users and
/// workload per trial.
pub fn run_spatial_experiment(cfg: &ExperimentConfig) -> Result<Vec<SpatialRow>> {
    let pool = spatial_pool(cfg)?;
    if let Some(&n) = cfg.n.iter().find(|&&n| n > pool.len()) {
        return Err(Error::Data(format!("dataset has {} points, fewer than N = {n}", pool.len())));
    }
    let name = cfg.dataset.name();
    let jobs: Vec<(usize, usize)> = cfg.n.iter().flat_map(|&n| (0..cfg.trials).map(move |t| (n, t))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(n, trial)| {
            let (sample, workload) = spatial_trial_inputs(cfg, &pool, n, trial)?;
            let base = master(cfg).substream(&[SPATIAL, n as u64, trial as u64]);
            let dom = Rect::unit();
            let tau = smoothing_threshold(n);
            let mut rows = Vec::new();
            for (ei, &eps) in cfg.eps.iter().enumerate() {
                let noise = base.substream(&[2, ei as u64]);
                let protocol = ProtocolConfig::new(dom, eps, cfg.delta, cfg.k, cfg.depth)?;
                let sldp = server_run(&sample, &protocol, &noise.substream(&[0]))?.partition;
                let (eps_tree, eps_count) = split_budget(eps, cfg.privtree_split);
                let tree = privtree_build(&sample, &dom, eps_tree, eps_count, cfg.depth, &mut noise.substream(&[1]))?;
                let grid = ldp_grid_build(&sample, &dom, cfg.grid_depth, eps, &mut noise.substream(&[2]))?;
                for (method, part, eps_regions, eps_release) in
                    [("sldp", &sldp, eps, 0.0), ("privtree", &tree, eps_tree, eps_count), ("ldp-grid", &grid, 0.0, eps)]
                {
                    rows.push(SpatialRow {
                        dataset: name.clone(),
                        method: method.into(),
                        eps,
                        n,
                        trial,
                        mre: workload_mre(part, &workload, n)?,
                        tau,
                        eps_regions,
                        eps_release,
                    });
                }
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.into_iter().flatten().collect())
}

// ---------------------------------------------------------------- demo

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DemoPoint {
    pub x: f64,
    pub y: f64,
    pub value: f64,
    /// Laplace scale of the noise in `value`; 0 for clean values.
    pub scale: f64,
}

#[derive(Debug, Clone)]
pub struct DemoOutput {
    pub partition: Partition,
    pub clean: Vec<DemoPoint>,
    pub sldp: Vec<DemoPoint>,
    pub ldp: Vec<DemoPoint>,
    pub eps_regions: f64,
    pub eps_release: f64,
}

/// Gaussian-bump function release: the private partition, the clean values,
/// SLDP reports (regions and release sharing the budget) and LDP reports
/// (whole budget).
pub fn run_demo(cfg: &ExperimentConfig) -> Result<DemoOutput> {
    let n = cfg.n[0];
    let eps = cfg.eps[0];
    let base = master(cfg).substream(&[DEMO]);
    let fixed = load_csv(&cfg.dataset)?;
    let data = population(&cfg.dataset, fixed.as_ref(), n, &mut base.substream(&[0]))?;
    let domain = data.domain;
    let f = BoundedFunction::GaussianBump { sigma: cfg.bump_sigma };
    let (eps_r, eps_m) = split_budget(eps, cfg.split);
    let protocol = ProtocolConfig::new(domain, eps_r, cfg.delta, cfg.k, cfg.depth)?;
    let outcome = server_run(&data.points, &protocol, &base.substream(&[1]))?;

    let mut sldp_rng = base.substream(&[2]);
    let mut ldp_rng = base.substream(&[3]);
    let c = f.bound(&domain);
    let mut clean = Vec::with_capacity(n);
    let mut sldp = Vec::with_capacity(n);
    let mut ldp = Vec::with_capacity(n);
    for (p, region) in data.points.iter().zip(outcome.regions()) {
        let v = f.eval(p);
        clean.push(DemoPoint { x: p.x, y: p.y, value: v, scale: 0.0 });
        let (value, scale) = sldp_report(p, &region.rect(&domain), &f, eps_m, &mut sldp_rng)?;
        sldp.push(DemoPoint { x: p.x, y: p.y, value, scale });
        let scale = c / eps;
        ldp.push(DemoPoint { x: p.x, y: p.y, value: v + laplace_noise(&mut ldp_rng, scale), scale });
    }
    Ok(DemoOutput { partition: outcome.partition, clean, sldp, ldp, eps_regions: eps_r, eps_release: eps_m })
}

impl DemoOutput {
    /// Writes `cells.csv`, `clean.csv`, `sldp.csv` and `ldp.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let mut cells = fs::File::create(dir.join("cells.csv"))?;
        self.partition.write_csv(&mut cells)?;
        cells.flush()?;
        write_rows(&dir.join("clean.csv"), &self.clean)?;
        write_rows(&dir.join("sldp.csv"), &self.sldp)?;
        write_rows(&dir.join("ldp.csv"), &self.ldp)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::ExperimentKind;

    #[test]
    fn budget_split() {
        assert_eq!(split_budget(2.0, 0.5), (1.0, 1.0));
        let (a, b) = split_budget(f64::INFINITY, 0.5);
        assert!(a.is_infinite() && b.is_infinite());
        let (a, b) = split_budget(0.3, 0.3);
        assert!((a + b - 0.3).abs() < 1e-15);
    }

    #[test]
    fn quantiles() {
        assert_eq!(quantile(&[3.0, 1.0, 2.0], 0.5), 2.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.25), 1.75);
        assert!(quantile(&[], 0.5).is_nan());
    }

    #[test]
    fn mean_rows_are_deterministic_and_budgeted() {
        let mut cfg = ExperimentConfig::defaults(ExperimentKind::Mean);
        cfg.n = vec![500];
        cfg.eps = vec![1.0, 4.0];
        cfg.trials = 2;
        let a = run_mean_experiment(&cfg).unwrap();
        assert_eq!(a.len(), 2 * 2 * 3);
        assert_eq!(a, run_mean_experiment(&cfg).unwrap());
        for r in &a {
            assert!((r.eps_regions + r.eps_release - r.eps).abs() < 1e-12);
        }
        cfg.seed += 1;
        assert_ne!(a, run_mean_experiment(&cfg).unwrap());
    }

    #[test]
    fn k_sweep_file_name() {
        assert_eq!(k_sweep_path(Path::new("out/cls.csv")), PathBuf::from("out/cls_ksweep.csv"));
    }
}
