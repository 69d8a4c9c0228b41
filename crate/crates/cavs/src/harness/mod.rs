//! Monte-Carlo experiment harness: rate curves, sweeps, selector comparisons,
//! and deterministic CSV/JSON/SVG outputs.

pub mod analyze;
pub mod config;
pub mod svg;

use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rand::Rng;
use serde_json::{json, Value};

use crate::baselines::{gg_mle_select, holdout_cv_select};
use crate::dist::{draw, sample as draw_sample, stream_rng, DistributionSpec};
use crate::error::{Error, Result};
use crate::parallel::map_indices;
use crate::power::{CandidateGrid, Power};
use crate::regress::{cavs_regress, DesignMatrix};
use crate::selector::{cavs_estimate, CavsConfig, TauPolicy};
use crate::solver::SolverConfig;

pub use config::{ErrorStatistic, ExperimentConfig, ExperimentKind, TauRule};

/// One CSV output row; the schema is part of the external interface.
#[derive(Debug, Clone)]
pub struct TrialRow {
    pub experiment: String,
    pub distribution: String,
    pub n: usize,
    pub trial: usize,
    pub tau: f64,
    pub gamma_hat: Power,
    pub gamma_max: Power,
    pub theta_hat: f64,
    pub theta0: f64,
    pub abs_error: f64,
}

pub const CSV_HEADER: &str =
    "experiment,distribution,n,trial,tau,gamma_hat,gamma_max,theta_hat,theta0,abs_error";

#[derive(Debug, Clone, Copy)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

#[derive(Debug, Clone)]
pub struct CurvePoint {
    pub n: usize,
    pub error: f64,
    pub trials: usize,
}

#[derive(Debug, Clone)]
pub struct CurveSummary {
    pub label: String,
    pub points: Vec<CurvePoint>,
    pub fit: Option<SlopeFit>,
    pub failures: usize,
}

#[derive(Debug, Clone)]
pub struct HarnessReport {
    pub experiment: String,
    pub rows: Vec<TrialRow>,
    pub curves: Vec<CurveSummary>,
    pub extra: Value,
}

/// OLS of log error on log n. Needs >= 3 points with positive errors.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<SlopeFit> {
    if points.len() < 3 {
        return Err(Error::Input(format!("slope fit needs >= 3 points, got {}", points.len())));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(n, e) in points {
        if !(n > 0.0) || !(e > 0.0) {
            return Err(Error::Input(format!("slope fit needs positive points, got ({n}, {e})")));
        }
        xs.push(n.ln());
        ys.push(e.ln());
    }
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(SlopeFit { slope, intercept, r2 })
}

pub fn run(cfg: &ExperimentConfig) -> Result<HarnessReport> {
    cfg.validate()?;
    match cfg.kind {
        ExperimentKind::RateLocation | ExperimentKind::TruncSweep => run_rate_location(cfg),
        ExperimentKind::RateRegression => run_rate_regression(cfg),
        ExperimentKind::TauSweep => run_tau_sweep(cfg),
        ExperimentKind::CvDemo => run_cv_demo(cfg),
        ExperimentKind::MleCompare => run_mle_compare(cfg),
        ExperimentKind::CsvAnalyze => {
            Err(Error::Input("csv-analyze runs through harness::analyze, not run()".into()))
        }
    }
}

fn cavs_config(cfg: &ExperimentConfig, tau: f64, n: usize) -> Result<CavsConfig> {
    let grid = match &cfg.grid_spec {
        Some(spec) => Some(CandidateGrid::parse_spec(spec, n)?),
        None => None,
    };
    Ok(CavsConfig { tau_policy: TauPolicy::Fixed(tau), grid, solver: SolverConfig::default() })
}

/// Aggregates trial rows (in index order) into per-curve summaries.
fn summarize(
    label: &str,
    n_grid: &[usize],
    rows: &[TrialRow],
    failures: usize,
    statistic: ErrorStatistic,
) -> CurveSummary {
    let mut points = Vec::new();
    for &n in n_grid {
        let mut errors: Vec<f64> =
            rows.iter().filter(|r| r.n == n).map(|r| r.abs_error).collect();
        if !errors.is_empty() {
            let count = errors.len();
            let error = statistic.apply(&mut errors);
            points.push(CurvePoint { n, error, trials: count });
        }
    }
    let fit_points: Vec<(f64, f64)> =
        points.iter().map(|p| (p.n as f64, p.error)).collect();
    let fit = fit_loglog_slope(&fit_points).ok();
    CurveSummary { label: label.to_string(), points, fit, failures }
}

/// Draws a shifted sample and runs the selector; one Monte-Carlo trial.
fn location_trial(
    cfg: &ExperimentConfig,
    experiment: &str,
    dist: &DistributionSpec,
    n: usize,
    trial: usize,
) -> Result<TrialRow> {
    let tau = cfg.tau_rule.tau_for(n, cfg.n_min());
    let mut rng = stream_rng(cfg.seed, &format!("{experiment}:{}:{n}", dist.tag()), trial as u64);
    let theta0 = rng.random_range(-10.0..10.0);
    let noise = draw_sample(dist, n, &mut rng)?;
    let sample = noise.affine(1.0, theta0)?;
    let result = cavs_estimate(&sample, &cavs_config(cfg, tau, n)?)?;
    Ok(TrialRow {
        experiment: experiment.to_string(),
        distribution: dist.tag(),
        n,
        trial,
        tau,
        gamma_hat: result.gamma_hat,
        gamma_max: result.gamma_max,
        theta_hat: result.theta_hat,
        theta0,
        abs_error: (result.theta_hat - theta0).abs(),
    })
}

fn run_rate_location(cfg: &ExperimentConfig) -> Result<HarnessReport> {
    let experiment = cfg.kind.tag();
    let per_dist = cfg.n_grid.len() * cfg.trials;
    let total = cfg.distributions.len() * per_dist;
    let outcomes = map_indices(total, |idx| {
        let dist = &cfg.distributions[idx / per_dist];
        let rem = idx % per_dist;
        let n = cfg.n_grid[rem / cfg.trials];
        location_trial(cfg, experiment, dist, n, rem % cfg.trials)
    });
    collect_rate_report(cfg, experiment, outcomes)
}

fn collect_rate_report(
    cfg: &ExperimentConfig,
    experiment: &str,
    outcomes: Vec<Result<TrialRow>>,
) -> Result<HarnessReport> {
    let mut rows = Vec::new();
    let mut failures: Vec<String> = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(row) => rows.push(row),
            Err(e) => failures.push(e.to_string()),
        }
    }
    // Trials that errored are dropped from every curve; the expected-count
    // shortfall per (dist, n) cell is the per-curve failure count.
    let expected = cfg.trials * cfg.n_grid.len();
    let curves: Vec<CurveSummary> = cfg
        .distributions
        .iter()
        .map(|dist| {
            let tag = dist.tag();
            let dist_rows: Vec<TrialRow> =
                rows.iter().filter(|r| r.distribution == tag).cloned().collect();
            let missing = expected - dist_rows.len();
            summarize(&tag, &cfg.n_grid, &dist_rows, missing, cfg.statistic)
        })
        .collect();
    let extra = json!({ "failures": failures });
    Ok(HarnessReport { experiment: experiment.to_string(), rows, curves, extra })
}

/// One regression trial: intercept + (d-1) uniform covariates, noise from the
/// family, error measured through the design second-moment metric.
fn regression_trial(
    cfg: &ExperimentConfig,
    dist: &DistributionSpec,
    n: usize,
    trial: usize,
    d: usize,
) -> Result<TrialRow> {
    let experiment = cfg.kind.tag();
    let tau = cfg.tau_rule.tau_for(n, cfg.n_min());
    let mut rng = stream_rng(cfg.seed, &format!("{experiment}:{}:{n}", dist.tag()), trial as u64);
    let beta0: Vec<f64> = (0..d).map(|_| rng.random_range(-10.0..10.0)).collect();
    let mut rows_x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row = vec![1.0];
        for _ in 1..d {
            row.push(rng.random_range(-1.0..1.0));
        }
        let noise = draw(dist, &mut rng, false);
        let mean: f64 = row.iter().zip(&beta0).map(|(x, b)| x * b).sum();
        y.push(mean + noise);
        rows_x.push(row);
    }
    let dm = DesignMatrix::from_rows(&rows_x)?;
    let mut cavs_cfg = cavs_config(cfg, tau, n)?;
    if cavs_cfg.grid.is_none() {
        // Keep the regression grid modest: the large-power Newton solve is far
        // more expensive than the location closed loop.
        cavs_cfg.grid = Some(CandidateGrid::parse_spec(&format!("pow2:max={},inf", n.min(256)), n)?);
    }
    let result = cavs_regress(&dm, &y, &cavs_cfg)?;
    let diff = DVector::from_column_slice(&result.beta_hat)
        - DVector::from_column_slice(&beta0);
    let err = (dm.sigma_sqrt() * diff).norm();
    Ok(TrialRow {
        experiment: experiment.to_string(),
        distribution: dist.tag(),
        n,
        trial,
        tau,
        gamma_hat: result.gamma_hat,
        gamma_max: result.gamma_max,
        theta_hat: result.beta_hat[0],
        theta0: beta0[0],
        abs_error: err,
    })
}

fn run_rate_regression(cfg: &ExperimentConfig) -> Result<HarnessReport> {
    let d = 3;
    let per_dist = cfg.n_grid.len() * cfg.trials;
    let total = cfg.distributions.len() * per_dist;
    let outcomes = map_indices(total, |idx| {
        let dist = &cfg.distributions[idx / per_dist];
        let rem = idx % per_dist;
        let n = cfg.n_grid[rem / cfg.trials];
        regression_trial(cfg, dist, n, rem % cfg.trials, d)
    });
    collect_rate_report(cfg, cfg.kind.tag(), outcomes)
}

fn run_tau_sweep(cfg: &ExperimentConfig) -> Result<HarnessReport> {
    let experiment = cfg.kind.tag();
    let taus = [1.0, 2.0, 4.0];
    let per_dist = cfg.n_grid.len() * cfg.trials;
    let total = cfg.distributions.len() * per_dist;
    // Each trial reuses one sample across all tau levels and the mean baseline.
    let outcomes = map_indices(total, |idx| -> Result<Vec<TrialRow>> {
        let dist = &cfg.distributions[idx / per_dist];
        let rem = idx % per_dist;
        let n = cfg.n_grid[rem / cfg.trials];
        let trial = rem % cfg.trials;
        let mut rng =
            stream_rng(cfg.seed, &format!("{experiment}:{}:{n}", dist.tag()), trial as u64);
        let theta0 = rng.random_range(-10.0..10.0);
        let noise = draw_sample(dist, n, &mut rng)?;
        let sample = noise.affine(1.0, theta0)?;
        let mut out = Vec::with_capacity(taus.len() + 1);
        for tau in taus {
            let result = cavs_estimate(&sample, &cavs_config(cfg, tau, n)?)?;
            out.push(TrialRow {
                experiment: experiment.to_string(),
                distribution: dist.tag(),
                n,
                trial,
                tau,
                gamma_hat: result.gamma_hat,
                gamma_max: result.gamma_max,
                theta_hat: result.theta_hat,
                theta0,
                abs_error: (result.theta_hat - theta0).abs(),
            });
        }
        // The sample-mean baseline, recorded with tau = 0.
        out.push(TrialRow {
            experiment: experiment.to_string(),
            distribution: dist.tag(),
            n,
            trial,
            tau: 0.0,
            gamma_hat: Power::Finite(2.0),
            gamma_max: Power::Finite(2.0),
            theta_hat: sample.mean(),
            theta0,
            abs_error: (sample.mean() - theta0).abs(),
        });
        Ok(out)
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(mut r) => rows.append(&mut r),
            Err(e) => failures.push(e.to_string()),
        }
    }
    let mut curves = Vec::new();
    for dist in &cfg.distributions {
        let tag = dist.tag();
        for tau in taus {
            let subset: Vec<TrialRow> = rows
                .iter()
                .filter(|r| r.distribution == tag && r.tau == tau)
                .cloned()
                .collect();
            curves.push(summarize(
                &format!("{tag} tau={tau}"),
                &cfg.n_grid,
                &subset,
                0,
                cfg.statistic,
            ));
        }
        let subset: Vec<TrialRow> =
            rows.iter().filter(|r| r.distribution == tag && r.tau == 0.0).cloned().collect();
        curves.push(summarize(&format!("{tag} mean"), &cfg.n_grid, &subset, 0, cfg.statistic));
    }
    let extra = json!({ "failures": failures, "taus": taus });
    Ok(HarnessReport { experiment: experiment.to_string(), rows, curves, extra })
}

/// Monte-Carlo estimate of the limit probability P(|W1 - W2| < |W2|) for
/// W1, W2 iid N(0, 1/3): the chance that squared-error holdout validation
/// prefers the mean over the midrange under uniform noise, as n -> infinity.
pub fn cv_limit_reference(seed: u64, draws: usize) -> f64 {
    let mut rng = stream_rng(seed, "cv-limit", 0);
    let sd = (1.0f64 / 3.0).sqrt();
    let mut hits = 0usize;
    for _ in 0..draws {
        let w1 = draw(&DistributionSpec::Gaussian, &mut rng, false) * sd;
        let w2 = draw(&DistributionSpec::Gaussian, &mut rng, false) * sd;
        if (w1 - w2).abs() < w2.abs() {
            hits += 1;
        }
    }
    hits as f64 / draws as f64
}

fn run_cv_demo(cfg: &ExperimentConfig) -> Result<HarnessReport> {
    let experiment = cfg.kind.tag();
    let dist = &cfg.distributions[0];
    let per_n = cfg.trials;
    let total = cfg.n_grid.len() * per_n;
    let outcomes = map_indices(total, |idx| -> Result<(TrialRow, bool)> {
        let n = cfg.n_grid[idx / per_n];
        let trial = idx % per_n;
        let mut rng =
            stream_rng(cfg.seed, &format!("{experiment}:{}:{n}", dist.tag()), trial as u64);
        let theta0 = rng.random_range(-10.0..10.0);
        let train = draw_sample(dist, n, &mut rng)?.affine(1.0, theta0)?;
        let test = draw_sample(dist, n, &mut rng)?.affine(1.0, theta0)?;
        let cv_pick = holdout_cv_select(&train, &test);
        let tau = cfg.tau_rule.tau_for(n, cfg.n_min());
        let result = cavs_estimate(&train, &cavs_config(cfg, tau, n)?)?;
        let row = TrialRow {
            experiment: experiment.to_string(),
            distribution: dist.tag(),
            n,
            trial,
            tau,
            gamma_hat: result.gamma_hat,
            gamma_max: result.gamma_max,
            theta_hat: result.theta_hat,
            theta0,
            abs_error: (result.theta_hat - theta0).abs(),
        };
        Ok((row, cv_pick == Power::Finite(2.0)))
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut cv_two: Vec<(usize, bool)> = Vec::new();
    for (idx, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Ok((row, picked_two)) => {
                cv_two.push((cfg.n_grid[idx / per_n], picked_two));
                rows.push(row);
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    let mut table = Vec::new();
    for &n in &cfg.n_grid {
        let total_n = cv_two.iter().filter(|(m, _)| *m == n).count();
        let two_n = cv_two.iter().filter(|(m, p)| *m == n && *p).count();
        let ge16 = rows
            .iter()
            .filter(|r| r.n == n && r.gamma_hat >= Power::Finite(16.0))
            .count();
        table.push(json!({
            "n": n,
            "trials": total_n,
            "cv_selects_two_frequency": two_n as f64 / total_n.max(1) as f64,
            "cavs_gamma_ge16_frequency": ge16 as f64 / total_n.max(1) as f64,
        }));
    }
    let extra = json!({
        "failures": failures,
        "selection_table": table,
        "gaussian_limit_reference": cv_limit_reference(cfg.seed, 200_000),
    });
    Ok(HarnessReport { experiment: experiment.to_string(), rows, curves: vec![], extra })
}

fn power_median(mut powers: Vec<Power>) -> Power {
    powers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    powers[powers.len() / 2]
}

fn run_mle_compare(cfg: &ExperimentConfig) -> Result<HarnessReport> {
    let experiment = cfg.kind.tag();
    let per_dist = cfg.n_grid.len() * cfg.trials;
    let total = cfg.distributions.len() * per_dist;
    let outcomes = map_indices(total, |idx| -> Result<(TrialRow, Power)> {
        let dist = &cfg.distributions[idx / per_dist];
        let rem = idx % per_dist;
        let n = cfg.n_grid[rem / cfg.trials];
        let trial = rem % cfg.trials;
        let row = location_trial(cfg, experiment, dist, n, trial)?;
        // Re-draw the identical sample for the rival selector.
        let mut rng =
            stream_rng(cfg.seed, &format!("{experiment}:{}:{n}", dist.tag()), trial as u64);
        let theta0 = rng.random_range(-10.0..10.0);
        let sample = draw_sample(dist, n, &mut rng)?.affine(1.0, theta0)?;
        let grid = CandidateGrid::default_for(n);
        let profile = gg_mle_select(&sample, &grid, &SolverConfig::default())?;
        Ok((row, profile.selected))
    });
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut mle: Vec<(String, usize, usize, Power)> = Vec::new();
    for (idx, outcome) in outcomes.into_iter().enumerate() {
        let dist = &cfg.distributions[idx / per_dist];
        let rem = idx % per_dist;
        let n = cfg.n_grid[rem / cfg.trials];
        match outcome {
            Ok((row, selected)) => {
                mle.push((dist.tag(), n, rem % cfg.trials, selected));
                rows.push(row);
            }
            Err(e) => failures.push(e.to_string()),
        }
    }
    let mut table = Vec::new();
    for dist in &cfg.distributions {
        let tag = dist.tag();
        let mut per_n = Vec::new();
        for &n in &cfg.n_grid {
            let cavs_sel: Vec<Power> = rows
                .iter()
                .filter(|r| r.distribution == tag && r.n == n)
                .map(|r| r.gamma_hat)
                .collect();
            let mle_sel: Vec<Power> = mle
                .iter()
                .filter(|(t, m, _, _)| *t == tag && *m == n)
                .map(|&(_, _, _, p)| p)
                .collect();
            if cavs_sel.is_empty() {
                continue;
            }
            let mle_inf =
                mle_sel.iter().filter(|p| p.is_infinite()).count() as f64 / mle_sel.len() as f64;
            per_n.push(json!({
                "n": n,
                "cavs_gamma_median": power_median(cavs_sel).to_string(),
                "mle_gamma_median": power_median(mle_sel).to_string(),
                "mle_selects_inf_frequency": mle_inf,
            }));
        }
        // Per-seed stability of the MLE pick across the smallest and largest n.
        let stability = if cfg.n_grid.len() >= 2 {
            let (n_lo, n_hi) = (cfg.n_grid[0], *cfg.n_grid.last().unwrap());
            let mut same = 0usize;
            let mut count = 0usize;
            for trial in 0..cfg.trials {
                let lo = mle.iter().find(|(t, m, tr, _)| *t == tag && *m == n_lo && *tr == trial);
                let hi = mle.iter().find(|(t, m, tr, _)| *t == tag && *m == n_hi && *tr == trial);
                if let (Some(&(_, _, _, a)), Some(&(_, _, _, b))) = (lo, hi) {
                    count += 1;
                    if a == b && !a.is_infinite() {
                        same += 1;
                    }
                }
            }
            json!(same as f64 / count.max(1) as f64)
        } else {
            Value::Null
        };
        table.push(json!({
            "distribution": tag,
            "per_n": per_n,
            "mle_same_finite_across_n_frequency": stability,
        }));
    }
    let extra = json!({ "failures": failures, "comparison": table });
    Ok(HarnessReport { experiment: experiment.to_string(), rows, curves: vec![], extra })
}

impl HarnessReport {
    /// Renders the canonical CSV (exact header, one row per trial).
    pub fn render_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                r.experiment,
                r.distribution,
                r.n,
                r.trial,
                r.tau,
                r.gamma_hat,
                r.gamma_max,
                r.theta_hat,
                r.theta0,
                r.abs_error
            ));
        }
        out
    }

    pub fn summary_json(&self) -> Value {
        let curves: Vec<Value> = self
            .curves
            .iter()
            .map(|c| {
                let points: Vec<Value> = c
                    .points
                    .iter()
                    .map(|p| json!({ "n": p.n, "error": p.error, "trials": p.trials }))
                    .collect();
                let fit = match &c.fit {
                    Some(f) => json!({ "slope": f.slope, "intercept": f.intercept, "r2": f.r2 }),
                    None => Value::Null,
                };
                json!({ "label": c.label, "points": points, "fit": fit, "failures": c.failures })
            })
            .collect();
        json!({
            "experiment": self.experiment,
            "rows": self.rows.len(),
            "curves": curves,
            "extra": self.extra,
        })
    }

    fn svg_files(&self) -> Result<Vec<(String, String)>> {
        // One chart per distribution; multi-series experiments (tau sweep)
        // group their curves by the distribution prefix of the label.
        let mut dists: Vec<String> = Vec::new();
        for r in &self.rows {
            if !dists.contains(&r.distribution) {
                dists.push(r.distribution.clone());
            }
        }
        let mut files = Vec::new();
        for dist in dists {
            let series: Vec<svg::Series> = self
                .curves
                .iter()
                .filter(|c| c.label == dist || c.label.starts_with(&format!("{dist} ")))
                .filter(|c| !c.points.is_empty())
                .map(|c| svg::Series {
                    label: c.label.clone(),
                    points: c.points.iter().map(|p| (p.n as f64, p.error)).collect(),
                })
                .collect();
            if series.is_empty() {
                continue;
            }
            let chart = svg::render_line_chart(&format!("{} / {dist}", self.experiment), &series)?;
            files.push((format!("{}-{}.svg", self.experiment, sanitize(&dist)), chart));
        }
        Ok(files)
    }

    /// Writes CSV, summary JSON, and SVG charts; returns the paths written.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();
        let csv_path = dir.join(format!("{}.csv", self.experiment));
        std::fs::write(&csv_path, self.render_csv())?;
        written.push(csv_path);
        let json_path = dir.join(format!("{}-summary.json", self.experiment));
        let mut body = serde_json::to_string_pretty(&self.summary_json())
            .map_err(|e| Error::Numerical(format!("summary serialization failed: {e}")))?;
        body.push('\n');
        std::fs::write(&json_path, body)?;
        written.push(json_path);
        for (name, content) in self.svg_files()? {
            let path = dir.join(name);
            std::fs::write(&path, content)?;
            written.push(path);
        }
        Ok(written)
    }
}

fn sanitize(tag: &str) -> String {
    tag.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '-' }).collect()
}
