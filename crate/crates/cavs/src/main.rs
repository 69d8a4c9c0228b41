//! Command-line surface: estimate / regress / simulate / compare-selectors /
//! moments / version. Exit codes: 0 success, 1 input error, 2 numerical error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use cavs::harness::analyze::{analyze_csv, AnalyzeOptions, CsvAnalysis};
use cavs::harness::{self, ExperimentConfig, ExperimentKind};
use cavs::Error;

#[derive(Parser)]
#[command(name = "cavs", disable_version_flag = true)]
/// Adaptive L-gamma location and regression estimation.
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select a loss power and estimate the center of a CSV column.
    Estimate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        column: String,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        /// Candidate grid: "pow2[:max=N][,inf]" or an explicit list "2,4,inf".
        #[arg(long)]
        grid: Option<String>,
        /// Emit JSON instead of the table.
        #[arg(long)]
        json: bool,
        /// Write the report here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Regression variant: fit coefficients over feature columns with a
    /// seeded train/test split.
    Regress {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        column: String,
        /// Comma-separated feature column names.
        #[arg(long)]
        features: String,
        /// Feature columns reported as noise checks (|coefficient|).
        #[arg(long)]
        noise: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        tau: f64,
        #[arg(long)]
        grid: Option<String>,
        #[arg(long, default_value_t = 100)]
        train_size: usize,
        #[arg(long, default_value_t = 1)]
        split_seed: u64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a Monte-Carlo experiment and write CSV/JSON/SVG outputs.
    Simulate {
        /// Flat key=value config file with an experiment= line.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Experiment kind when no config file is given.
        #[arg(long)]
        experiment: Option<String>,
        /// Config overrides as key=value (repeatable).
        #[arg(long = "set")]
        sets: Vec<String>,
    },
    /// Run the selector-comparison experiments (cv or mle).
    CompareSelectors {
        /// Which comparison: "cv" (held-out validation) or "mle".
        #[arg(long)]
        which: String,
        #[arg(long = "set")]
        sets: Vec<String>,
    },
    /// Tabulate absolute moments and asymptotic variances of a noise family.
    Moments {
        #[arg(long)]
        dist: String,
        /// Comma-separated list of powers.
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        json: bool,
    },
    /// Print the version.
    Version,
}

fn main() -> ExitCode {
    cavs::parallel::init_thread_cap();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Input(_) | Error::Parse(_) | Error::Io(_) | Error::Capability(_) => {
                    ExitCode::from(1)
                }
                Error::Convergence { .. } | Error::Numerical(_) => ExitCode::from(2),
            }
        }
    }
}

/// Fixed 6-significant-digit formatting for table output.
fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    format!("{:.*}", decimals, x)
}

fn emit(text: String, output: Option<&PathBuf>) -> Result<(), Error> {
    match output {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn location_json(analysis: &CsvAnalysis) -> Value {
    let CsvAnalysis::Location { n_used, issues, skewness, result } = analysis else {
        unreachable!("location analysis expected");
    };
    let candidates: Vec<Value> = result
        .diagnostics
        .iter()
        .map(|d| {
            json!({
                "gamma": d.power.to_string(),
                "theta": d.theta_hat,
                "vhat": d.vhat.value(),
                "interval_low": d.interval_low,
                "interval_high": d.interval_high,
                "within_gamma_max": d.within_gamma_max,
            })
        })
        .collect();
    json!({
        "n": n_used,
        "rows_dropped": issues.rows_dropped,
        "skewness": skewness,
        "tau": result.tau,
        "gamma_hat": result.gamma_hat.to_string(),
        "gamma_max": result.gamma_max.to_string(),
        "theta_hat": result.theta_hat,
        "candidates": candidates,
    })
}

fn location_table(analysis: &CsvAnalysis) -> String {
    let CsvAnalysis::Location { n_used, issues, skewness, result } = analysis else {
        unreachable!("location analysis expected");
    };
    let mut out = String::new();
    out.push_str(&format!("n         {n_used}\n"));
    out.push_str(&format!("dropped   {}\n", issues.rows_dropped));
    out.push_str(&format!("skewness  {}\n", sig6(*skewness)));
    out.push_str(&format!("tau       {}\n", sig6(result.tau)));
    out.push_str(&format!("gamma_hat {}\n", result.gamma_hat));
    out.push_str(&format!("gamma_max {}\n", result.gamma_max));
    out.push_str(&format!("theta_hat {}\n", sig6(result.theta_hat)));
    out.push('\n');
    out.push_str("gamma      theta         vhat          interval                      admitted\n");
    for d in &result.diagnostics {
        out.push_str(&format!(
            "{:<10} {:<13} {:<13} [{}, {}]  {}\n",
            d.power.to_string(),
            sig6(d.theta_hat),
            sig6(d.vhat.value()),
            sig6(d.interval_low),
            sig6(d.interval_high),
            if d.within_gamma_max { "yes" } else { "no" }
        ));
    }
    out
}

fn regression_json(analysis: &CsvAnalysis) -> Value {
    let CsvAnalysis::Regression {
        n_used,
        issues,
        skewness,
        train_size,
        result,
        test_mse,
        noise_magnitudes,
    } = analysis
    else {
        unreachable!("regression analysis expected");
    };
    let candidates: Vec<Value> = result
        .diagnostics
        .iter()
        .map(|d| {
            json!({
                "gamma": d.power.to_string(),
                "beta": d.beta,
                "vhat": d.vhat.value(),
                "half_width": d.half_width,
                "within_gamma_max": d.within_gamma_max,
            })
        })
        .collect();
    let noise: Vec<Value> =
        noise_magnitudes.iter().map(|(n, v)| json!({ "column": n, "abs_beta": v })).collect();
    json!({
        "n": n_used,
        "rows_dropped": issues.rows_dropped,
        "skewness": skewness,
        "train_size": train_size,
        "tau": result.tau,
        "gamma_hat": result.gamma_hat.to_string(),
        "gamma_max": result.gamma_max.to_string(),
        "beta_hat": result.beta_hat,
        "test_mse": test_mse,
        "noise_checks": noise,
        "candidates": candidates,
    })
}

fn regression_table(analysis: &CsvAnalysis) -> String {
    let CsvAnalysis::Regression {
        n_used,
        issues,
        skewness,
        train_size,
        result,
        test_mse,
        noise_magnitudes,
    } = analysis
    else {
        unreachable!("regression analysis expected");
    };
    let mut out = String::new();
    out.push_str(&format!("n          {n_used}\n"));
    out.push_str(&format!("dropped    {}\n", issues.rows_dropped));
    out.push_str(&format!("skewness   {}\n", sig6(*skewness)));
    out.push_str(&format!("train_size {train_size}\n"));
    out.push_str(&format!("tau        {}\n", sig6(result.tau)));
    out.push_str(&format!("gamma_hat  {}\n", result.gamma_hat));
    out.push_str(&format!("gamma_max  {}\n", result.gamma_max));
    let beta: Vec<String> = result.beta_hat.iter().map(|&b| sig6(b)).collect();
    out.push_str(&format!("beta_hat   [{}]\n", beta.join(", ")));
    out.push_str(&format!("test_mse   {}\n", sig6(*test_mse)));
    for (name, mag) in noise_magnitudes {
        out.push_str(&format!("|beta| of noise column {name}: {}\n", sig6(*mag)));
    }
    out
}

fn build_config(
    config: Option<&PathBuf>,
    experiment: Option<&str>,
    sets: &[String],
) -> Result<ExperimentConfig, Error> {
    let mut cfg = match (config, experiment) {
        (Some(path), _) => ExperimentConfig::from_file(path)?,
        (None, Some(kind)) => ExperimentConfig::new(ExperimentKind::parse(kind)?),
        (None, None) => {
            return Err(Error::Input("need either --config or --experiment".into()));
        }
    };
    for set in sets {
        let (key, value) = set
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("--set expects key=value, got {set:?}")))?;
        cfg.apply_key(key.trim(), value.trim())?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run_simulation(cfg: &ExperimentConfig) -> Result<(), Error> {
    if cfg.kind == ExperimentKind::CsvAnalyze {
        let mut opts = AnalyzeOptions::location(
            cfg.target_column.as_deref().expect("validated"),
        );
        opts.features = cfg.feature_columns.clone();
        opts.noise_features = cfg.noise_columns.clone();
        opts.train_size = cfg.train_size;
        opts.split_seed = cfg.seed;
        if let harness::TauRule::Fixed(t) = cfg.tau_rule {
            opts.tau = t;
        }
        opts.grid_spec = cfg.grid_spec.clone();
        let analysis = analyze_csv(cfg.input_path.as_deref().expect("validated"), &opts)?;
        let report = match &analysis {
            CsvAnalysis::Location { .. } => location_json(&analysis),
            CsvAnalysis::Regression { .. } => regression_json(&analysis),
        };
        println!("{}", to_pretty(&report)?);
        return Ok(());
    }
    let report = harness::run(cfg)?;
    let files = report.write(&cfg.output_dir)?;
    let summary = json!({
        "summary": report.summary_json(),
        "files": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
    });
    println!("{}", to_pretty(&summary)?);
    Ok(())
}

fn to_pretty(value: &Value) -> Result<String, Error> {
    serde_json::to_string_pretty(value)
        .map_err(|e| Error::Numerical(format!("serialization failed: {e}")))
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Estimate { input, column, tau, grid, json, output } => {
            let mut opts = AnalyzeOptions::location(&column);
            opts.tau = tau;
            opts.grid_spec = grid;
            let analysis = analyze_csv(&input, &opts)?;
            let text = if json {
                let mut s = to_pretty(&location_json(&analysis))?;
                s.push('\n');
                s
            } else {
                location_table(&analysis)
            };
            emit(text, output.as_ref())
        }
        Command::Regress {
            input,
            column,
            features,
            noise,
            tau,
            grid,
            train_size,
            split_seed,
            json,
            output,
        } => {
            let mut opts = AnalyzeOptions::location(&column);
            opts.features = features.split(',').map(|s| s.trim().to_string()).collect();
            opts.noise_features = noise
                .map(|n| n.split(',').map(|s| s.trim().to_string()).collect())
                .unwrap_or_default();
            opts.tau = tau;
            opts.grid_spec = grid;
            opts.train_size = train_size;
            opts.split_seed = split_seed;
            let analysis = analyze_csv(&input, &opts)?;
            let text = if json {
                let mut s = to_pretty(&regression_json(&analysis))?;
                s.push('\n');
                s
            } else {
                regression_table(&analysis)
            };
            emit(text, output.as_ref())
        }
        Command::Simulate { config, experiment, sets } => {
            let cfg = build_config(config.as_ref(), experiment.as_deref(), &sets)?;
            run_simulation(&cfg)
        }
        Command::CompareSelectors { which, sets } => {
            let kind = match which.as_str() {
                "cv" => "cv-demo",
                "mle" => "mle-compare",
                other => {
                    return Err(Error::Input(format!(
                        "unknown comparison {other:?}, want cv or mle"
                    )))
                }
            };
            let cfg = build_config(None, Some(kind), &sets)?;
            run_simulation(&cfg)
        }
        Command::Moments { dist, gamma, json } => {
            let spec = cavs::DistributionSpec::parse_tag(&dist)?;
            let gammas: Vec<f64> = gamma
                .split(',')
                .map(|g| {
                    g.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("invalid gamma {g:?}")))
                })
                .collect::<Result<_, Error>>()?;
            let alpha = spec.alpha();
            let mut rows = Vec::new();
            for &g in &gammas {
                let moment = cavs::avar::moment_abs(&spec, g)?;
                let scaled = alpha.map(|a| g.powf(a) * moment);
                let v = if g >= 2.0 { Some(cavs::avar::v_population(&spec, g)?) } else { None };
                rows.push((g, moment, scaled, v));
            }
            if json {
                let body: Vec<Value> = rows
                    .iter()
                    .map(|(g, m, s, v)| {
                        json!({ "gamma": g, "moment": m, "scaled_moment": s, "v": v })
                    })
                    .collect();
                println!("{}", to_pretty(&json!({ "dist": spec.tag(), "rows": body }))?);
            } else {
                println!("dist: {}", spec.tag());
                println!("gamma      E|Z|^g        g^a E|Z|^g    V(g)");
                for (g, m, s, v) in rows {
                    println!(
                        "{:<10} {:<13} {:<13} {}",
                        sig6(g),
                        sig6(m),
                        s.map(sig6).unwrap_or_else(|| "-".into()),
                        v.map(sig6).unwrap_or_else(|| "-".into()),
                    );
                }
            }
            Ok(())
        }
        Command::Version => {
            println!("cavs {}", env!("CARGO_PKG_VERSION"));
            Ok(())
        }
    }
}
