//! Experiment configuration: kinds, tau rules, and a flat key=value file
//! format mirrored by CLI flags.

use std::path::{Path, PathBuf};

use crate::dist::DistributionSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    RateLocation,
    RateRegression,
    TruncSweep,
    TauSweep,
    CvDemo,
    MleCompare,
    CsvAnalyze,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "rate-location" => Ok(Self::RateLocation),
            "rate-regression" => Ok(Self::RateRegression),
            "trunc-sweep" => Ok(Self::TruncSweep),
            "tau-sweep" => Ok(Self::TauSweep),
            "cv-demo" => Ok(Self::CvDemo),
            "mle-compare" => Ok(Self::MleCompare),
            "csv-analyze" => Ok(Self::CsvAnalyze),
            other => Err(Error::Parse(format!("unknown experiment kind {other:?}"))),
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Self::RateLocation => "rate-location",
            Self::RateRegression => "rate-regression",
            Self::TruncSweep => "trunc-sweep",
            Self::TauSweep => "tau-sweep",
            Self::CvDemo => "cv-demo",
            Self::MleCompare => "mle-compare",
            Self::CsvAnalyze => "csv-analyze",
        }
    }
}

/// How tau scales with the sample size within one experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauRule {
    Fixed(f64),
    /// tau = sqrt(log(4n / n_min)) where n_min is the smallest grid size.
    SqrtLog4NOverMin,
}

impl TauRule {
    pub fn tau_for(&self, n: usize, n_min: usize) -> f64 {
        match self {
            TauRule::Fixed(t) => *t,
            TauRule::SqrtLog4NOverMin => (4.0 * n as f64 / n_min.max(1) as f64).ln().sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorStatistic {
    Mean,
    Median,
}

impl ErrorStatistic {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "mean" => Ok(Self::Mean),
            "median" => Ok(Self::Median),
            other => Err(Error::Parse(format!("unknown statistic {other:?}, want mean|median"))),
        }
    }

    pub fn apply(&self, values: &mut Vec<f64>) -> f64 {
        match self {
            ErrorStatistic::Mean => values.iter().sum::<f64>() / values.len() as f64,
            ErrorStatistic::Median => {
                values.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let n = values.len();
                if n % 2 == 1 {
                    values[n / 2]
                } else {
                    (values[n / 2 - 1] + values[n / 2]) / 2.0
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    pub distributions: Vec<DistributionSpec>,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub tau_rule: TauRule,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub statistic: ErrorStatistic,
    pub grid_spec: Option<String>,
    /// csv-analyze only.
    pub input_path: Option<PathBuf>,
    pub target_column: Option<String>,
    pub feature_columns: Vec<String>,
    pub noise_columns: Vec<String>,
    pub train_size: usize,
}

impl ExperimentConfig {
    /// Per-kind defaults at desk scale; override fields or use the key=value file.
    pub fn new(kind: ExperimentKind) -> Self {
        let (distributions, n_grid, trials, tau_rule) = match kind {
            ExperimentKind::RateLocation => (
                vec![
                    DistributionSpec::uniform(),
                    DistributionSpec::Semicircle,
                    DistributionSpec::Gaussian,
                ],
                vec![200, 400, 800],
                200,
                TauRule::SqrtLog4NOverMin,
            ),
            ExperimentKind::RateRegression => (
                vec![
                    DistributionSpec::uniform(),
                    DistributionSpec::Semicircle,
                    DistributionSpec::Gaussian,
                ],
                vec![200, 400, 600],
                100,
                TauRule::SqrtLog4NOverMin,
            ),
            ExperimentKind::TruncSweep => (
                [1.0, 1.5, 2.0, 2.5]
                    .iter()
                    .map(|&t| DistributionSpec::truncated_gaussian(t))
                    .collect(),
                vec![50, 100, 200, 400, 800, 1600],
                100,
                TauRule::SqrtLog4NOverMin,
            ),
            ExperimentKind::TauSweep => (
                vec![
                    DistributionSpec::Gaussian,
                    DistributionSpec::Uniform { half_width: 3f64.sqrt() },
                ],
                vec![400, 800, 1600, 3200, 6400],
                100,
                TauRule::Fixed(1.0),
            ),
            ExperimentKind::CvDemo => (
                vec![DistributionSpec::uniform()],
                vec![500, 1000, 2000],
                500,
                TauRule::Fixed(1.0),
            ),
            ExperimentKind::MleCompare => (
                vec![DistributionSpec::truncated_gaussian(2.0), DistributionSpec::uniform()],
                vec![1000, 10_000],
                20,
                TauRule::Fixed(1.0),
            ),
            ExperimentKind::CsvAnalyze => (vec![], vec![], 1, TauRule::Fixed(1.0)),
        };
        Self {
            kind,
            distributions,
            n_grid,
            trials,
            tau_rule,
            seed: 1,
            output_dir: PathBuf::from("out"),
            statistic: ErrorStatistic::Median,
            grid_spec: None,
            input_path: None,
            target_column: None,
            feature_columns: vec![],
            noise_columns: vec![],
            train_size: 100,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Input("trials must be at least 1".into()));
        }
        if self.kind != ExperimentKind::CsvAnalyze {
            if self.n_grid.is_empty() {
                return Err(Error::Input("n grid must be nonempty".into()));
            }
            for pair in self.n_grid.windows(2) {
                if pair[0] >= pair[1] {
                    return Err(Error::Input(format!(
                        "n grid must be strictly increasing: {} before {}",
                        pair[0], pair[1]
                    )));
                }
            }
            if self.n_grid[0] < 2 {
                return Err(Error::Input("sample sizes must be at least 2".into()));
            }
            if self.distributions.is_empty() {
                return Err(Error::Input("at least one distribution is required".into()));
            }
        } else {
            if self.input_path.is_none() {
                return Err(Error::Input("csv-analyze needs an input path".into()));
            }
            if self.target_column.is_none() {
                return Err(Error::Input("csv-analyze needs a target column".into()));
            }
        }
        if let TauRule::Fixed(t) = self.tau_rule {
            if !(t > 0.0) {
                return Err(Error::Input(format!("tau must be positive, got {t}")));
            }
        }
        Ok(())
    }

    pub fn n_min(&self) -> usize {
        self.n_grid.first().copied().unwrap_or(1)
    }

    /// Loads a flat key=value file; '#' starts a comment, blank lines ignored.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut kind = None;
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", idx + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if key == "experiment" {
                kind = Some(ExperimentKind::parse(value)?);
            } else {
                pairs.push((key.to_string(), value.to_string()));
            }
        }
        let kind = kind.ok_or_else(|| Error::Parse("missing experiment= key".into()))?;
        let mut cfg = Self::new(kind);
        for (key, value) in pairs {
            cfg.apply_key(&key, &value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply_key(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "distributions" => {
                self.distributions = value
                    .split(';')
                    .map(|t| DistributionSpec::parse_tag(t.trim()))
                    .collect::<Result<_>>()?;
            }
            "n" => {
                self.n_grid = value
                    .split(',')
                    .map(|v| {
                        v.trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("invalid n value {v:?}")))
                    })
                    .collect::<Result<_>>()?;
            }
            "trials" => {
                self.trials = value
                    .parse()
                    .map_err(|_| Error::Parse(format!("invalid trials {value:?}")))?;
            }
            "tau" => {
                self.tau_rule = if value == "auto" {
                    TauRule::SqrtLog4NOverMin
                } else {
                    TauRule::Fixed(
                        value.parse().map_err(|_| Error::Parse(format!("invalid tau {value:?}")))?,
                    )
                };
            }
            "seed" => {
                self.seed =
                    value.parse().map_err(|_| Error::Parse(format!("invalid seed {value:?}")))?;
            }
            "out" => self.output_dir = PathBuf::from(value),
            "statistic" => self.statistic = ErrorStatistic::parse(value)?,
            "grid" => self.grid_spec = Some(value.to_string()),
            "input" => self.input_path = Some(PathBuf::from(value)),
            "column" => self.target_column = Some(value.to_string()),
            "features" => {
                self.feature_columns = value.split(',').map(|s| s.trim().to_string()).collect();
            }
            "noise-features" => {
                self.noise_columns = value.split(',').map(|s| s.trim().to_string()).collect();
            }
            "train-size" => {
                self.train_size = value
                    .parse()
                    .map_err(|_| Error::Parse(format!("invalid train-size {value:?}")))?;
            }
            other => return Err(Error::Parse(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }
}
