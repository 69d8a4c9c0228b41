//! CSV ingestion: run the selector on a numeric column, or the regression
//! variant with a train/test split over named feature columns.

use std::path::Path;

use rand::Rng;

use crate::dist::stream_rng;
use crate::error::{Error, Result};
use crate::power::CandidateGrid;
use crate::regress::{cavs_regress, DesignMatrix, RegressionResult};
use crate::sample::Sample;
use crate::selector::{cavs_estimate, CavsConfig, CavsResult, TauPolicy};
use crate::solver::SolverConfig;

#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub target: String,
    /// Empty -> location mode; nonempty -> regression on these columns.
    pub features: Vec<String>,
    /// Feature columns whose fitted |coefficient| is reported separately.
    pub noise_features: Vec<String>,
    pub train_size: usize,
    pub split_seed: u64,
    pub tau: f64,
    pub grid_spec: Option<String>,
}

impl AnalyzeOptions {
    pub fn location(target: &str) -> Self {
        Self {
            target: target.to_string(),
            features: vec![],
            noise_features: vec![],
            train_size: 100,
            split_seed: 1,
            tau: 1.0,
            grid_spec: None,
        }
    }
}

/// Row-level parse accounting: rows with any unparsable or missing cell in a
/// used column are dropped, never silently repaired.
#[derive(Debug, Clone, Default)]
pub struct ParseIssues {
    pub rows_dropped: usize,
    /// 1-based data-row indices of the first few dropped rows.
    pub sample_bad_rows: Vec<usize>,
}

#[derive(Debug)]
pub enum CsvAnalysis {
    Location {
        n_used: usize,
        issues: ParseIssues,
        skewness: f64,
        result: CavsResult,
    },
    Regression {
        n_used: usize,
        issues: ParseIssues,
        skewness: f64,
        train_size: usize,
        result: RegressionResult,
        test_mse: f64,
        noise_magnitudes: Vec<(String, f64)>,
    },
}

fn column_index(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::Input(format!("column {name:?} not found in CSV header")))
}

pub fn analyze_csv(path: &Path, opts: &AnalyzeOptions) -> Result<CsvAnalysis> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("bad CSV header: {e}")))?
        .clone();
    let target_idx = column_index(&headers, &opts.target)?;
    let feature_idx: Vec<usize> = opts
        .features
        .iter()
        .map(|f| column_index(&headers, f))
        .collect::<Result<_>>()?;
    for noise in &opts.noise_features {
        if !opts.features.contains(noise) {
            return Err(Error::Input(format!(
                "noise column {noise:?} is not among the feature columns"
            )));
        }
    }

    let mut y = Vec::new();
    let mut x_rows = Vec::new();
    let mut issues = ParseIssues::default();
    for (row_idx, record) in reader.records().enumerate() {
        let record = match record {
            Ok(r) => r,
            Err(_) => {
                drop_row(&mut issues, row_idx);
                continue;
            }
        };
        let cells: Option<(f64, Vec<f64>)> = (|| {
            let target = parse_cell(record.get(target_idx)?)?;
            let mut features = Vec::with_capacity(feature_idx.len());
            for &j in &feature_idx {
                features.push(parse_cell(record.get(j)?)?);
            }
            Some((target, features))
        })();
        match cells {
            Some((t, f)) => {
                y.push(t);
                x_rows.push(f);
            }
            None => drop_row(&mut issues, row_idx),
        }
    }
    if y.is_empty() {
        return Err(Error::Input("no usable data rows".into()));
    }

    let target_sample = Sample::new(y.clone())?;
    let skewness = target_sample.skewness();
    let n = y.len();
    let grid = match &opts.grid_spec {
        Some(spec) => Some(CandidateGrid::parse_spec(spec, n)?),
        None => None,
    };
    let cfg = CavsConfig {
        tau_policy: TauPolicy::Fixed(opts.tau),
        grid,
        solver: SolverConfig::default(),
    };

    if opts.features.is_empty() {
        let result = cavs_estimate(&target_sample, &cfg)?;
        return Ok(CsvAnalysis::Location { n_used: n, issues, skewness, result });
    }

    if opts.train_size == 0 || opts.train_size >= n {
        return Err(Error::Input(format!(
            "train size {} must be in [1, {})",
            opts.train_size,
            n
        )));
    }
    // Seeded shuffle, then the first train_size rows train the fit.
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = stream_rng(opts.split_seed, "csv-split", 0);
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let with_intercept = |idx: usize| -> Vec<f64> {
        let mut row = Vec::with_capacity(feature_idx.len() + 1);
        row.push(1.0);
        row.extend_from_slice(&x_rows[idx]);
        row
    };
    let train_rows: Vec<Vec<f64>> =
        order[..opts.train_size].iter().map(|&i| with_intercept(i)).collect();
    let train_y: Vec<f64> = order[..opts.train_size].iter().map(|&i| y[i]).collect();
    let dm = DesignMatrix::from_rows(&train_rows)?;
    let result = cavs_regress(&dm, &train_y, &cfg)?;

    let mut test_sse = 0.0;
    let test_count = n - opts.train_size;
    for &i in &order[opts.train_size..] {
        let row = with_intercept(i);
        let pred: f64 = row.iter().zip(&result.beta_hat).map(|(x, b)| x * b).sum();
        test_sse += (y[i] - pred) * (y[i] - pred);
    }
    let noise_magnitudes = opts
        .noise_features
        .iter()
        .map(|name| {
            let pos = opts.features.iter().position(|f| f == name).unwrap();
            (name.clone(), result.beta_hat[pos + 1].abs())
        })
        .collect();
    Ok(CsvAnalysis::Regression {
        n_used: n,
        issues,
        skewness,
        train_size: opts.train_size,
        result,
        test_mse: test_sse / test_count as f64,
        noise_magnitudes,
    })
}

fn parse_cell(cell: &str) -> Option<f64> {
    let trimmed = cell.trim();
    if trimmed.is_empty() {
        return None;
    }
    trimmed.parse::<f64>().ok().filter(|v| v.is_finite())
}

fn drop_row(issues: &mut ParseIssues, row_idx: usize) {
    issues.rows_dropped += 1;
    if issues.sample_bad_rows.len() < 10 {
        issues.sample_bad_rows.push(row_idx + 1);
    }
}
