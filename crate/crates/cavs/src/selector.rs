//! Power selection by constrained minimization of the empirical asymptotic
//! variance: Lepski-style interval intersection determines the admissible
//! upper power, and the admitted power with smallest variance wins.

use crate::avar::{vhat, VhatValue};
use crate::error::{Error, Result};
use crate::parallel::map_items;
use crate::power::{CandidateGrid, Power};
use crate::sample::Sample;
use crate::solver::{lgamma_center, SolverConfig};

/// How the interval half-width multiplier is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TauPolicy {
    Fixed(f64),
    /// tau = sqrt(log n).
    SqrtLogN,
}

impl TauPolicy {
    pub fn tau_for(&self, n: usize) -> f64 {
        match self {
            TauPolicy::Fixed(t) => *t,
            TauPolicy::SqrtLogN => (n.max(2) as f64).ln().sqrt(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CavsConfig {
    pub tau_policy: TauPolicy,
    pub grid: Option<CandidateGrid>,
    pub solver: SolverConfig,
}

impl CavsConfig {
    pub fn with_tau(tau: f64) -> Self {
        Self { tau_policy: TauPolicy::Fixed(tau), grid: None, solver: SolverConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if let TauPolicy::Fixed(t) = self.tau_policy {
            if !(t > 0.0) {
                return Err(Error::Input(format!("tau must be positive, got {t}")));
            }
        }
        self.solver.validate()
    }

    fn grid_for(&self, n: usize) -> CandidateGrid {
        self.grid.clone().unwrap_or_else(|| CandidateGrid::default_for(n))
    }
}

impl Default for CavsConfig {
    fn default() -> Self {
        Self::with_tau(1.0)
    }
}

/// Per-candidate state: the center, its variance estimate, and the interval.
#[derive(Debug, Clone)]
pub struct CandidateDiagnostic {
    pub power: Power,
    pub theta_hat: f64,
    pub vhat: VhatValue,
    pub interval_low: f64,
    pub interval_high: f64,
    pub within_gamma_max: bool,
}

#[derive(Debug, Clone)]
pub struct CavsResult {
    pub theta_hat: f64,
    pub gamma_hat: Power,
    pub gamma_max: Power,
    pub tau: f64,
    pub diagnostics: Vec<CandidateDiagnostic>,
    pub sample_mean: f64,
    pub sample_variance: f64,
}

/// Half-width tau * sqrt(Vhat / n), assembled in log domain so extreme powers
/// neither overflow nor underflow.
fn half_width(v: &VhatValue, n: usize, tau: f64) -> f64 {
    if v.log_value == f64::NEG_INFINITY {
        0.0
    } else {
        (0.5 * (v.log_value - (n as f64).ln()) + tau.ln()).exp()
    }
}

/// The largest grid power whose prefix of intervals has a nonempty
/// intersection. Feasibility of prefixes is monotone (the running bounds only
/// shrink), so the answer is the last feasible prefix; a single interval is
/// always nonempty.
pub fn gamma_max(diagnostics: &[CandidateDiagnostic]) -> Result<Power> {
    if diagnostics.is_empty() {
        return Err(Error::Input("gamma_max requires at least one candidate".into()));
    }
    let mut low = f64::NEG_INFINITY;
    let mut high = f64::INFINITY;
    let mut best = diagnostics[0].power;
    for d in diagnostics {
        low = low.max(d.interval_low);
        high = high.min(d.interval_high);
        if low <= high {
            best = d.power;
        } else {
            break;
        }
    }
    Ok(best)
}

/// Runs the full selection procedure on one sample.
pub fn cavs_estimate(sample: &Sample, cfg: &CavsConfig) -> Result<CavsResult> {
    cfg.validate()?;
    let n = sample.len();
    let grid = cfg.grid_for(n);
    let tau = cfg.tau_policy.tau_for(n);

    if sample.is_constant() || n < 2 {
        // Degenerate data: every center coincides and Vhat = 0 throughout.
        let c = sample.min();
        let diagnostics: Vec<CandidateDiagnostic> = grid
            .powers()
            .iter()
            .map(|&power| CandidateDiagnostic {
                power,
                theta_hat: c,
                vhat: VhatValue { gamma: power, log_value: f64::NEG_INFINITY },
                interval_low: c,
                interval_high: c,
                within_gamma_max: true,
            })
            .collect();
        return Ok(CavsResult {
            theta_hat: c,
            gamma_hat: grid.powers()[0],
            gamma_max: grid.supremum(),
            tau,
            diagnostics,
            sample_mean: sample.mean(),
            sample_variance: sample.variance(),
        });
    }

    let mut diagnostics: Vec<CandidateDiagnostic> =
        map_items(grid.powers(), |&power| -> Result<CandidateDiagnostic> {
            let theta_hat = lgamma_center(sample, power, &cfg.solver)?;
            let v = vhat(sample, power, &cfg.solver)?;
            let hw = half_width(&v, n, tau);
            Ok(CandidateDiagnostic {
                power,
                theta_hat,
                vhat: v,
                interval_low: theta_hat - hw,
                interval_high: theta_hat + hw,
                within_gamma_max: false,
            })
        })
        .into_iter()
        .collect::<Result<_>>()?;

    let gmax = gamma_max(&diagnostics)?;
    for d in diagnostics.iter_mut() {
        d.within_gamma_max = d.power <= gmax;
    }

    // argmin Vhat over admitted powers; strict comparison keeps the smallest
    // power on ties, with -inf (Vhat = 0) below everything finite.
    let selected = diagnostics
        .iter()
        .filter(|d| d.within_gamma_max)
        .reduce(|best, d| if d.vhat.log_value < best.vhat.log_value { d } else { best })
        .expect("grid has at least one admitted power");

    Ok(CavsResult {
        theta_hat: selected.theta_hat,
        gamma_hat: selected.power,
        gamma_max: gmax,
        tau,
        diagnostics: diagnostics.clone(),
        sample_mean: sample.mean(),
        sample_variance: sample.variance(),
    })
}

/// Runs the procedure on Y and on b*Y + a with identical configuration and
/// returns both (gamma, theta) pairs. The selected power is invariant and the
/// estimate is affine-equivariant.
pub fn affine_transform_check(
    sample: &Sample,
    cfg: &CavsConfig,
    a: f64,
    b: f64,
) -> Result<(Power, f64, Power, f64)> {
    if !(b > 0.0) {
        return Err(Error::Input(format!("scale must be positive, got {b}")));
    }
    let base = cavs_estimate(sample, cfg)?;
    let transformed = cavs_estimate(&sample.affine(b, a)?, cfg)?;
    Ok((base.gamma_hat, base.theta_hat, transformed.gamma_hat, transformed.theta_hat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{sample as draw_sample, stream_rng, DistributionSpec};
    use approx::assert_relative_eq;

    fn diag(power: Power, low: f64, high: f64) -> CandidateDiagnostic {
        CandidateDiagnostic {
            power,
            theta_hat: (low + high) / 2.0,
            vhat: VhatValue { gamma: power, log_value: 0.0 },
            interval_low: low,
            interval_high: high,
            within_gamma_max: false,
        }
    }

    #[test]
    fn gamma_max_single_candidate() {
        let d = vec![diag(Power::Finite(2.0), 0.0, 1.0)];
        assert_eq!(gamma_max(&d).unwrap(), Power::Finite(2.0));
    }

    #[test]
    fn gamma_max_prefix_example() {
        // [0,2], [1,3] meet at [1,2]; [2.5,4] empties the intersection.
        let d = vec![
            diag(Power::Finite(2.0), 0.0, 2.0),
            diag(Power::Finite(4.0), 1.0, 3.0),
            diag(Power::Finite(8.0), 2.5, 4.0),
        ];
        assert_eq!(gamma_max(&d).unwrap(), Power::Finite(4.0));
    }

    #[test]
    fn gamma_max_all_overlap_reaches_infinity() {
        let d = vec![
            diag(Power::Finite(2.0), 0.0, 2.0),
            diag(Power::Finite(4.0), 0.5, 1.5),
            diag(Power::Infinity, 1.0, 1.0),
        ];
        assert_eq!(gamma_max(&d).unwrap(), Power::Infinity);
    }

    #[test]
    fn gamma_max_empty_second_prefix() {
        let d = vec![diag(Power::Finite(2.0), 0.0, 1.0), diag(Power::Finite(4.0), 2.0, 3.0)];
        assert_eq!(gamma_max(&d).unwrap(), Power::Finite(2.0));
    }

    #[test]
    fn constant_sample() {
        let s = Sample::new(vec![7.0; 10]).unwrap();
        let r = cavs_estimate(&s, &CavsConfig::default()).unwrap();
        assert_eq!(r.theta_hat, 7.0);
        assert_eq!(r.gamma_hat, Power::Finite(2.0));
    }

    #[test]
    fn uniform_selects_large_power() {
        let cfg = CavsConfig::with_tau(2.0);
        let mut hits = 0;
        let trials = 40;
        for trial in 0..trials {
            let mut rng = stream_rng(3, "sel-uniform", trial);
            let z = draw_sample(&DistributionSpec::uniform(), 500, &mut rng).unwrap();
            let s = z.affine(1.0, 4.2).unwrap();
            let r = cavs_estimate(&s, &cfg).unwrap();
            if r.gamma_hat >= Power::Finite(16.0) {
                hits += 1;
            }
        }
        assert!(hits as f64 >= 0.9 * trials as f64, "only {hits}/{trials} selected gamma >= 16");
    }

    #[test]
    fn gaussian_selects_two_modally() {
        let cfg = CavsConfig::with_tau(2.0);
        let mut two = 0;
        let trials = 100;
        for trial in 0..trials {
            let mut rng = stream_rng(4, "sel-gauss", trial);
            let z = draw_sample(&DistributionSpec::Gaussian, 500, &mut rng).unwrap();
            let r = cavs_estimate(&z, &cfg).unwrap();
            if r.gamma_hat == Power::Finite(2.0) {
                two += 1;
            }
        }
        assert!(two > trials / 2, "gamma=2 selected only {two}/{trials} times");
    }

    #[test]
    fn sure_inequality_on_random_data() {
        for trial in 0..50 {
            let mut rng = stream_rng(5, "sure", trial);
            let dist = match trial % 3 {
                0 => DistributionSpec::uniform(),
                1 => DistributionSpec::Gaussian,
                _ => DistributionSpec::Semicircle,
            };
            let n = 2 + (trial as usize * 7) % 200;
            let s = draw_sample(&dist, n, &mut rng).unwrap();
            for tau in [0.5, 1.0, 2.0] {
                let r = cavs_estimate(&s, &CavsConfig::with_tau(tau)).unwrap();
                let bound =
                    2.0 * tau * (r.sample_variance / n as f64).sqrt() + 1e-9 * s.range();
                assert!(
                    (r.theta_hat - r.sample_mean).abs() <= bound,
                    "n={n} tau={tau}: |{} - {}| > {bound}",
                    r.theta_hat,
                    r.sample_mean
                );
            }
        }
    }

    #[test]
    fn selected_variance_is_minimal_among_admitted() {
        let mut rng = stream_rng(6, "argmin", 0);
        let s = draw_sample(&DistributionSpec::Semicircle, 300, &mut rng).unwrap();
        let r = cavs_estimate(&s, &CavsConfig::default()).unwrap();
        let selected = r
            .diagnostics
            .iter()
            .find(|d| d.power == r.gamma_hat)
            .unwrap()
            .vhat
            .log_value;
        for d in &r.diagnostics {
            assert_eq!(d.within_gamma_max, d.power <= r.gamma_max);
            if d.within_gamma_max {
                assert!(selected <= d.vhat.log_value);
            }
        }
    }

    #[test]
    fn affine_invariance() {
        let mut rng = stream_rng(7, "affine", 0);
        let s = draw_sample(&DistributionSpec::uniform(), 400, &mut rng).unwrap();
        let cfg = CavsConfig::with_tau(1.0);
        for (b, a) in [(1.0, 0.0), (2.0, 5.0), (0.001, -3.0)] {
            let (g1, t1, g2, t2) = affine_transform_check(&s, &cfg, a, b).unwrap();
            assert_eq!(g1, g2, "b={b} a={a}");
            assert_relative_eq!(t2, b * t1 + a, max_relative = 1e-8, epsilon = 1e-10);
        }
    }

    #[test]
    fn asymmetry_keeps_estimate_near_mean() {
        let cfg = CavsConfig::with_tau(2.0);
        let mut ok = 0;
        let trials = 50;
        for trial in 0..trials {
            let mut rng = stream_rng(8, "asym", trial);
            let s = draw_sample(&DistributionSpec::AsymmetricMixture, 2000, &mut rng).unwrap();
            let r = cavs_estimate(&s, &cfg).unwrap();
            if r.theta_hat.abs() <= 3.0 * (r.sample_variance / 2000.0).sqrt() {
                ok += 1;
            }
        }
        assert!(ok as f64 >= 0.95 * trials as f64, "{ok}/{trials}");
    }
}
