//! L_gamma centers of univariate samples.
//!
//! The center for a finite power is found by safeguarded Newton iteration on
//! data rescaled to [-1, 1]; power sums are normalized by the largest residual
//! so that no intermediate quantity overflows even for powers of order n.

use crate::error::{Error, Result};
use crate::power::Power;
use crate::sample::Sample;

/// Tolerances and iteration limits for the Newton solvers.
#[derive(Debug, Clone, Copy)]
pub struct SolverConfig {
    /// Gradient tolerance on the rescaled problem.
    pub gradient_tolerance: f64,
    pub max_iterations: usize,
    /// Relative Hessian ridge for the regression solver.
    pub damping: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { gradient_tolerance: 1e-12, max_iterations: 200, damping: 1e-8 }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.gradient_tolerance > 0.0) {
            return Err(Error::Input("gradient_tolerance must be > 0".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Input("max_iterations must be >= 1".into()));
        }
        if !(self.damping >= 0.0) {
            return Err(Error::Input("damping must be >= 0".into()));
        }
        Ok(())
    }
}

/// Finite powers above 64n are computed as the midrange directly; the
/// remaining gap to the true center is below representable resolution.
pub(crate) const MIDRANGE_POWER_FACTOR: f64 = 64.0;

/// (max + min) / 2.
pub fn midrange(sample: &Sample) -> f64 {
    (sample.max() + sample.min()) / 2.0
}

/// argmin_theta sum |y_i - theta|^gamma for gamma in [2, inf].
pub fn lgamma_center(sample: &Sample, power: Power, cfg: &SolverConfig) -> Result<f64> {
    cfg.validate()?;
    if sample.is_constant() {
        return Ok(sample.min());
    }
    let gamma = match power {
        Power::Infinity => return Ok(midrange(sample)),
        Power::Finite(g) => g,
    };
    if gamma > MIDRANGE_POWER_FACTOR * sample.len() as f64 {
        return Ok(midrange(sample));
    }
    let scaled = Rescaled::from_sample(sample);
    let theta = newton_min(&scaled.values, gamma, cfg).map_err(|e| match e {
        Error::Convergence { iterations, last_iterate, gradient_norm, .. } => Error::Convergence {
            power,
            iterations,
            last_iterate: scaled.restore(last_iterate),
            gradient_norm,
        },
        other => other,
    })?;
    Ok(scaled.restore(theta))
}

/// log((1/n) sum |y_i - center|^p), computed by factoring out the largest
/// absolute residual. Returns -inf when all residuals vanish and p > 0.
pub fn lgamma_objective_log_mean(sample: &Sample, p: f64, center: f64) -> Result<f64> {
    if !p.is_finite() || p < 0.0 {
        return Err(Error::Input(format!("power must be finite and >= 0, got {p}")));
    }
    if !center.is_finite() {
        return Err(Error::Input("center must be finite".into()));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    Ok(log_mean_pow(sample.values(), p, center))
}

fn log_mean_pow(values: &[f64], p: f64, center: f64) -> f64 {
    let m = values.iter().map(|&v| (v - center).abs()).fold(0.0f64, f64::max);
    if m == 0.0 {
        return f64::NEG_INFINITY;
    }
    let n = values.len() as f64;
    let sum: f64 = values.iter().map(|&v| ((v - center).abs() / m).powf(p)).sum();
    p * m.ln() + (sum / n).ln()
}

/// Minimizes theta -> (1/n) sum |y_i - theta|^p and returns (theta*, log of the minimum).
///
/// p >= 1 uses safeguarded Newton (the objective is convex); p = 0 returns
/// (mean, 0); p in (0, 1) uses a bracketed scan followed by golden-section
/// refinement since the objective is nonconvex there.
pub fn min_objective_log(sample: &Sample, p: f64, cfg: &SolverConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    if !p.is_finite() || p < 0.0 {
        return Err(Error::Input(format!("power must be finite and >= 0, got {p}")));
    }
    if p == 0.0 {
        return Ok((sample.mean(), 0.0));
    }
    if sample.is_constant() {
        return Ok((sample.min(), f64::NEG_INFINITY));
    }
    let scaled = Rescaled::from_sample(sample);
    let theta_scaled = if p > MIDRANGE_POWER_FACTOR * sample.len() as f64 {
        0.0 // midrange in rescaled coordinates
    } else if p >= 1.0 {
        newton_min(&scaled.values, p, cfg).map_err(|e| match e {
            Error::Convergence { iterations, last_iterate, gradient_norm, .. } => {
                Error::Convergence {
                    power: Power::Finite(p.max(2.0)),
                    iterations,
                    last_iterate: scaled.restore(last_iterate),
                    gradient_norm,
                }
            }
            other => other,
        })?
    } else {
        scan_min(&scaled.values, p)
    };
    let log_min = log_mean_pow(&scaled.values, p, theta_scaled) + p * (scaled.half_span).ln();
    Ok((scaled.restore(theta_scaled), log_min))
}

/// Data mapped onto [-1, 1] via z = 2(y - M)/S with S the range, M the midrange.
struct Rescaled {
    values: Vec<f64>,
    half_span: f64,
    mid: f64,
}

impl Rescaled {
    fn from_sample(sample: &Sample) -> Self {
        let half_span = sample.range() / 2.0;
        let mid = midrange(sample);
        let values = sample.values().iter().map(|&v| (v - mid) / half_span).collect();
        Self { values, half_span, mid }
    }

    fn restore(&self, theta: f64) -> f64 {
        self.half_span * theta + self.mid
    }
}

/// Normalized gradient/Hessian sums at theta for power p >= 1.
///
/// With w_i = |r_i|/max|r_i|, returns (max|r_i|, sum sign(r_i) w_i^{p-1},
/// sum w_i^{p-2}). The Newton step is m * s1 / ((p-1) * s2), free of the
/// m^{p-1} factor that would overflow.
fn gradient_sums(values: &[f64], p: f64, theta: f64) -> (f64, f64, f64) {
    let m = values.iter().map(|&v| (v - theta).abs()).fold(0.0f64, f64::max);
    if m == 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let mut s1 = 0.0;
    let mut s2 = 0.0;
    for &v in values {
        let r = v - theta;
        let w = r.abs() / m;
        if w > 0.0 {
            s1 += r.signum() * w.powf(p - 1.0);
            s2 += w.powf(p - 2.0);
        } else if p == 2.0 {
            s2 += 1.0;
        } else if p < 2.0 {
            // w^{p-2} diverges at a data point; bisection takes over.
            s2 = f64::INFINITY;
        }
    }
    (m, s1, s2)
}

/// Safeguarded Newton minimization of (1/n) sum |z_i - theta|^p on values
/// already rescaled to [-1, 1]. Requires p >= 1 and at least two distinct values.
fn newton_min(values: &[f64], p: f64, cfg: &SolverConfig) -> Result<f64> {
    if p == 1.0 {
        return Ok(median(values));
    }
    let n = values.len() as f64;
    let mut lo = -1.0f64;
    let mut hi = 1.0f64;
    let mut theta = 0.0f64;
    let mut last_grad = f64::INFINITY;
    for _ in 0..cfg.max_iterations {
        let (m, s1, s2) = gradient_sums(values, p, theta);
        if m == 0.0 {
            return Ok(theta);
        }
        last_grad = s1.abs() / n;
        if last_grad <= cfg.gradient_tolerance {
            return Ok(theta);
        }
        // s1 > 0 means the objective decreases to the right of theta.
        if s1 > 0.0 {
            lo = theta;
        } else {
            hi = theta;
        }
        let step = m * s1 / ((p - 1.0) * s2);
        let candidate = theta + step;
        theta = if candidate.is_finite() && candidate > lo && candidate < hi && step != 0.0 {
            candidate
        } else {
            (lo + hi) / 2.0
        };
        if hi - lo <= 1e-15 {
            return Ok((lo + hi) / 2.0);
        }
    }
    Err(Error::Convergence {
        power: Power::Finite(p.max(2.0)),
        iterations: cfg.max_iterations,
        last_iterate: theta,
        gradient_norm: last_grad,
    })
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Minimization for p in (0, 1): 1024-point scan over the data span, local
/// golden-section refinement, and an exact check at every data point (the
/// objective has downward kinks there).
fn scan_min(values: &[f64], p: f64) -> f64 {
    const POINTS: usize = 1024;
    let f = |theta: f64| log_mean_pow(values, p, theta);
    let mut best_idx = 0;
    let mut best_val = f64::INFINITY;
    for i in 0..=POINTS {
        let theta = -1.0 + 2.0 * i as f64 / POINTS as f64;
        let val = f(theta);
        if val < best_val {
            best_val = val;
            best_idx = i;
        }
    }
    let lo = -1.0 + 2.0 * best_idx.saturating_sub(1) as f64 / POINTS as f64;
    let hi = -1.0 + 2.0 * (best_idx + 1).min(POINTS) as f64 / POINTS as f64;
    let (mut best_theta, mut best_val) = golden_section(&f, lo, hi, 1e-13);
    for &v in values {
        let val = f(v);
        if val < best_val {
            best_val = val;
            best_theta = v;
        }
    }
    best_theta
}

/// Golden-section search for the minimum of f on [a, b].
pub(crate) fn golden_section<F: Fn(f64) -> f64>(f: &F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    let mid = (a + b) / 2.0;
    (mid, f(mid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sample(values: &[f64]) -> Sample {
        Sample::new(values.to_vec()).unwrap()
    }

    /// Independent golden-section oracle on the raw (unrescaled) objective.
    fn oracle_center(values: &[f64], p: f64) -> f64 {
        let f = |theta: f64| {
            values.iter().map(|&v| (v - theta).abs().powf(p)).sum::<f64>() / values.len() as f64
        };
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        golden_section(&f, lo, hi, 1e-13).0
    }

    #[test]
    fn midrange_examples() {
        assert_eq!(midrange(&sample(&[-1.0, 1.0])), 0.0);
        assert_eq!(midrange(&sample(&[0.0, 3.0])), 1.5);
        assert_eq!(midrange(&sample(&[1.0, 2.0, 9.0])), 5.0);
    }

    #[test]
    fn center_at_two_is_mean() {
        let s = sample(&[0.0, 1.0, 2.0, 3.0, 4.0]);
        let theta = lgamma_center(&s, Power::Finite(2.0), &SolverConfig::default()).unwrap();
        assert_relative_eq!(theta, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn center_at_infinity_is_midrange() {
        let s = sample(&[1.0, 2.0, 9.0]);
        let theta = lgamma_center(&s, Power::Infinity, &SolverConfig::default()).unwrap();
        assert_eq!(theta, 5.0);
    }

    #[test]
    fn center_at_four_matches_oracle() {
        let s = sample(&[0.0, 1.0, 2.0]);
        let theta = lgamma_center(&s, Power::Finite(4.0), &SolverConfig::default()).unwrap();
        let oracle = oracle_center(s.values(), 4.0);
        // Function-value search cannot certify better than ~sqrt(machine eps).
        assert_relative_eq!(theta, oracle, epsilon = 1e-7);
        assert_relative_eq!(theta, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn huge_power_falls_back_to_midrange() {
        let s = sample(&[0.0, 1.0, 5.0]);
        let theta = lgamma_center(&s, Power::Finite(1e9), &SolverConfig::default()).unwrap();
        assert_eq!(theta, 2.5);
    }

    #[test]
    fn objective_log_mean_examples() {
        let s = sample(&[-1.0, 1.0]);
        assert_relative_eq!(lgamma_objective_log_mean(&s, 2.0, 0.0).unwrap(), 0.0);
        assert_eq!(lgamma_objective_log_mean(&s, 0.0, 0.3).unwrap(), 0.0);
        let s = sample(&[0.0, 2.0]);
        assert_relative_eq!(
            lgamma_objective_log_mean(&s, 3.0, 0.0).unwrap(),
            4.0f64.ln(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn objective_log_mean_degenerate() {
        let s = sample(&[3.0, 3.0]);
        assert_eq!(lgamma_objective_log_mean(&s, 2.0, 3.0).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn min_objective_examples() {
        let cfg = SolverConfig::default();
        let s = sample(&[-1.0, 1.0]);
        let (theta, log_min) = min_objective_log(&s, 2.0, &cfg).unwrap();
        assert_relative_eq!(theta, 0.0, epsilon = 1e-10);
        assert_relative_eq!(log_min, 0.0, epsilon = 1e-10);

        let s = sample(&[4.0; 5]);
        let (theta, log_min) = min_objective_log(&s, 3.0, &cfg).unwrap();
        assert_eq!(theta, 4.0);
        assert_eq!(log_min, f64::NEG_INFINITY);
    }

    #[test]
    fn min_objective_matches_oracle_power_four() {
        let cfg = SolverConfig::default();
        let s = sample(&[0.0, 1.0, 3.0]);
        let (theta, _) = min_objective_log(&s, 4.0, &cfg).unwrap();
        let oracle = oracle_center(s.values(), 4.0);
        assert_relative_eq!(theta, oracle, epsilon = 1e-7);
    }

    #[test]
    fn min_objective_matches_oracle_various_powers() {
        let cfg = SolverConfig::default();
        let values = [0.3, -1.2, 2.5, 0.9, -0.4, 1.7, 0.05];
        let s = sample(&values);
        for p in [1.5, 2.0, 3.0, 4.0, 7.0] {
            let (theta, _) = min_objective_log(&s, p, &cfg).unwrap();
            let oracle = oracle_center(&values, p);
            assert!(
                (theta - oracle).abs() <= 1e-7,
                "p={p}: theta={theta} oracle={oracle}"
            );
        }
    }

    #[test]
    fn min_objective_fractional_power() {
        // p in (0, 1): scan + golden section, checked against a dense oracle.
        let cfg = SolverConfig::default();
        let values = [0.0, 0.5, 0.6, 2.0];
        let s = sample(&values);
        let (theta, _) = min_objective_log(&s, 0.5, &cfg).unwrap();
        // Dense oracle over theta.
        let f = |t: f64| values.iter().map(|&v| (v - t).abs().powf(0.5)).sum::<f64>();
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=200000 {
            let t = 2.0 * i as f64 / 200000.0;
            let val = f(t);
            if val < best.0 {
                best = (val, t);
            }
        }
        assert!((theta - best.1).abs() <= 1e-4, "theta={theta} oracle={}", best.1);
        assert!(f(theta) <= best.0 + 1e-12);
    }

    #[test]
    fn equivariance() {
        let cfg = SolverConfig::default();
        let values = [0.2, -0.7, 1.9, 0.4, 1.1];
        let s = sample(&values);
        let t = s.affine(3.5, -2.0).unwrap();
        for g in [2.0, 5.0, 17.0] {
            let a = lgamma_center(&s, Power::Finite(g), &cfg).unwrap();
            let b = lgamma_center(&t, Power::Finite(g), &cfg).unwrap();
            assert_relative_eq!(b, 3.5 * a - 2.0, max_relative = 1e-8, epsilon = 1e-10);
        }
    }

    #[test]
    fn bracketing_and_monotone_approach() {
        let cfg = SolverConfig::default();
        let values = [0.1, 0.8, -0.5, 2.2, 1.4, -1.9, 0.3, 0.6];
        let s = sample(&values);
        let mid = midrange(&s);
        let n = s.len() as f64;
        let mut g = 8.0;
        while g <= 1024.0 {
            let theta = lgamma_center(&s, Power::Finite(g), &cfg).unwrap();
            assert!(theta >= s.min() && theta <= s.max());
            // Deterministic large-power bound: within range * log(n) / g of the midrange.
            let bound = 2.0 * s.range() * n.ln() / g + 1e-9 * s.range();
            assert!((theta - mid).abs() <= bound, "g={g}: |{theta} - {mid}| > {bound}");
            g *= 2.0;
        }
    }
}
