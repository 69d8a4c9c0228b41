//! L_gamma regression: coefficient fits by damped Newton, the regression
//! variance estimate, and power selection with hyperrectangle intersection.

use nalgebra::{DMatrix, DVector};

use crate::avar::VhatValue;
use crate::error::{Error, Result};
use crate::parallel::map_items;
use crate::power::{CandidateGrid, Power};
use crate::selector::CavsConfig;
use crate::solver::{SolverConfig, MIDRANGE_POWER_FACTOR};

/// A fixed design with cached second-moment matrix and its PSD square root.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    x: DMatrix<f64>,
    sigma: DMatrix<f64>,
    sigma_sqrt: DMatrix<f64>,
    min_eig: f64,
    max_eig: f64,
}

impl DesignMatrix {
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        let (n, d) = x.shape();
        if n == 0 || d == 0 {
            return Err(Error::Input("design matrix must be nonempty".into()));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("design matrix entries must be finite".into()));
        }
        let sigma = x.transpose() * &x / n as f64;
        let eigen = sigma.clone().symmetric_eigen();
        // Sigma is PSD by construction; clamp eigenvalue noise at 0.
        let clamped: Vec<f64> = eigen.eigenvalues.iter().map(|&e| e.max(0.0)).collect();
        let min_eig = clamped.iter().cloned().fold(f64::INFINITY, f64::min);
        let max_eig = clamped.iter().cloned().fold(0.0f64, f64::max);
        let sqrt_diag = DMatrix::from_diagonal(&DVector::from_iterator(
            d,
            clamped.iter().map(|e| e.sqrt()),
        ));
        let sigma_sqrt = &eigen.eigenvectors * sqrt_diag * eigen.eigenvectors.transpose();
        Ok(Self { x, sigma, sigma_sqrt, min_eig, max_eig })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Input("design matrix must be nonempty".into()));
        }
        let d = rows[0].len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Input("design matrix rows have inconsistent lengths".into()));
        }
        let x = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
        Self::new(x)
    }

    pub fn rows(&self) -> usize {
        self.x.nrows()
    }

    pub fn cols(&self) -> usize {
        self.x.ncols()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn sigma_sqrt(&self) -> &DMatrix<f64> {
        &self.sigma_sqrt
    }

    fn check_full_rank(&self) -> Result<()> {
        if self.min_eig <= 1e-10 * self.max_eig {
            return Err(Error::Input(format!(
                "design matrix is rank deficient (eigenvalue ratio {:e})",
                self.min_eig / self.max_eig
            )));
        }
        Ok(())
    }

    fn check_response(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.rows() {
            return Err(Error::Input(format!(
                "response length {} does not match design rows {}",
                y.len(),
                self.rows()
            )));
        }
        if self.rows() < self.cols() {
            return Err(Error::Input("need at least as many rows as columns".into()));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("response values must be finite".into()));
        }
        self.check_full_rank()
    }
}

fn ols(dm: &DesignMatrix, y: &[f64]) -> Result<DVector<f64>> {
    let n = dm.rows() as f64;
    let rhs = dm.x.transpose() * DVector::from_column_slice(y) / n;
    dm.sigma
        .clone()
        .cholesky()
        .map(|ch| ch.solve(&rhs))
        .ok_or_else(|| Error::Numerical("normal equations are not positive definite".into()))
}

/// log((1/n) sum |r_i|^p) with the largest residual factored out.
fn log_mean_pow_vec(r: &DVector<f64>, p: f64) -> f64 {
    let m = r.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
    if m == 0.0 {
        return f64::NEG_INFINITY;
    }
    let n = r.len() as f64;
    let sum: f64 = r.iter().map(|v| (v.abs() / m).powf(p)).sum();
    p * m.ln() + (sum / n).ln()
}

fn median_of(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

/// Minimizes beta -> (1/n) sum |y_i - x_i' beta|^p for p >= 1 by damped Newton
/// with power sums normalized by the largest residual. Returns the minimizer
/// and the log of the minimum on the original response scale.
fn min_regress_log_inner(
    dm: &DesignMatrix,
    y: &[f64],
    p: f64,
    cfg: &SolverConfig,
) -> Result<(DVector<f64>, f64)> {
    let scale = {
        let med = median_of(y);
        y.iter().map(|v| (v - med).abs()).fold(0.0f64, f64::max)
    };
    if scale == 0.0 {
        // Constant response: the quadratic fit minimizes every convex power
        // that admits a zero/constant residual profile; fall back to OLS.
        let beta = ols(dm, y)?;
        let r = DVector::from_column_slice(y) - &dm.x * &beta;
        let log_min = log_mean_pow_vec(&r, p);
        return Ok((beta, log_min));
    }
    let ys: Vec<f64> = y.iter().map(|v| v / scale).collect();
    let mut beta = ols(dm, &ys)?;

    if p == 2.0 {
        let r = DVector::from_column_slice(&ys) - &dm.x * &beta;
        let log_min = log_mean_pow_vec(&r, p) + p * scale.ln();
        return Ok((beta * scale, log_min));
    }

    // For very large powers a cold Newton start crawls (the step contraction
    // factor approaches 1), so walk a ladder of increasing powers and warm
    // start each stage from the previous minimizer.
    if p > 64.0 {
        let mut q = 32.0;
        while q < p {
            let _ = newton_descend(dm, &ys, q, &mut beta, cfg, 50);
            q = (q * 4.0).min(p);
        }
    }
    let max_iterations = cfg.max_iterations.max(500);
    let (grad_norm, converged) = newton_descend(dm, &ys, p, &mut beta, cfg, max_iterations);
    if !converged {
        return Err(Error::Convergence {
            power: Power::Finite(p.max(2.0)),
            iterations: max_iterations,
            last_iterate: beta[0] * scale,
            gradient_norm: grad_norm,
        });
    }
    let r = DVector::from_column_slice(&ys) - &dm.x * &beta;
    let log_min = log_mean_pow_vec(&r, p) + p * scale.ln();
    Ok((beta * scale, log_min))
}

/// Damped Newton descent on (1/n) sum |y_i - x_i' beta|^p with power sums
/// normalized by the largest residual and a doubling/backtracking line search.
/// Converged means: gradient below tolerance, or no representable descent
/// remains (the objective has stalled at numerical precision).
fn newton_descend(
    dm: &DesignMatrix,
    ys: &[f64],
    p: f64,
    beta: &mut DVector<f64>,
    cfg: &SolverConfig,
    max_iterations: usize,
) -> (f64, bool) {
    let n = dm.rows();
    let d = dm.cols();
    let nf = n as f64;
    let yv = DVector::from_column_slice(ys);
    let mut log_obj = log_mean_pow_vec(&(&yv - &dm.x * &*beta), p);
    let mut grad_norm = f64::INFINITY;
    let mut stalls = 0u32;
    for _ in 0..max_iterations {
        let r = &yv - &dm.x * &*beta;
        let m = r.iter().map(|v| v.abs()).fold(0.0f64, f64::max);
        if m == 0.0 {
            return (0.0, true);
        }
        let mut grad = DVector::zeros(d);
        let mut hess = DMatrix::zeros(d, d);
        for i in 0..n {
            let ri = r[i];
            let w = ri.abs() / m;
            let xi = dm.x.row(i).transpose();
            if w > 0.0 {
                grad += xi.clone() * (ri.signum() * w.powf(p - 1.0));
            }
            // w^{p-2} diverges for p < 2 at small residuals; clamp for the
            // Hessian only, the gradient stays exact.
            let wh = if p < 2.0 { w.max(1e-12) } else { w };
            if wh > 0.0 {
                hess.syger(wh.powf(p - 2.0), &xi, &xi, 1.0);
            }
        }
        grad /= nf;
        hess /= nf;
        grad_norm = grad.norm();
        if grad_norm <= cfg.gradient_tolerance {
            return (grad_norm, true);
        }
        let mut ridge = cfg.damping * hess.trace().max(1e-300) / d as f64;
        let mut accepted = false;
        for _ in 0..60 {
            let mut damped = hess.clone();
            for j in 0..d {
                damped[(j, j)] += ridge;
            }
            let step = match damped.cholesky() {
                Some(ch) => ch.solve(&grad) * (m / (p - 1.0)),
                None => {
                    ridge = (ridge * 10.0).max(1e-300);
                    continue;
                }
            };
            let eval = |t: f64| log_mean_pow_vec(&(&yv - &dm.x * (&*beta + &step * t)), p);
            let mut t_best = 1.0;
            let mut f_best = eval(1.0);
            if f_best <= log_obj {
                // The Newton step underestimates the distance when p is
                // large; extend it while the objective keeps dropping.
                let mut t = 2.0;
                while t <= 1e9 {
                    let f_t = eval(t);
                    if f_t < f_best {
                        f_best = f_t;
                        t_best = t;
                        t *= 2.0;
                    } else {
                        break;
                    }
                }
                let moved = step.norm() * t_best;
                *beta += &step * t_best;
                let improvement = log_obj - f_best;
                log_obj = f_best;
                accepted = true;
                if moved <= 1e-14 * (1.0 + beta.norm())
                    || improvement <= 1e-14 * (1.0 + log_obj.abs())
                {
                    stalls += 1;
                } else {
                    stalls = 0;
                }
                break;
            }
            ridge *= 4.0;
        }
        if !accepted || stalls >= 2 {
            // No representable descent remains at this precision.
            return (grad_norm, true);
        }
    }
    (grad_norm, false)
}

fn resolve_power(power: Power, n: usize) -> f64 {
    match power {
        Power::Finite(g) => g,
        // Chebyshev fit approximated by a large finite power; the gap to the
        // true minimax fit shrinks like range * log(n) / exponent.
        Power::Infinity => MIDRANGE_POWER_FACTOR * n as f64,
    }
}

/// argmin_beta sum |y_i - x_i' beta|^gamma.
pub fn lgamma_regress(
    dm: &DesignMatrix,
    y: &[f64],
    power: Power,
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    dm.check_response(y)?;
    let gamma = resolve_power(power, dm.rows());
    if gamma < 2.0 {
        return Err(Error::Input(format!("regression power must be >= 2, got {gamma}")));
    }
    let (beta, _) = min_regress_log_inner(dm, y, gamma, cfg)?;
    Ok(beta.iter().cloned().collect())
}

/// The regression analogue of the empirical asymptotic variance, in log domain.
pub fn vhat_regress(
    dm: &DesignMatrix,
    y: &[f64],
    power: Power,
    cfg: &SolverConfig,
) -> Result<VhatValue> {
    cfg.validate()?;
    dm.check_response(y)?;
    let gamma = match power {
        Power::Infinity => return Ok(VhatValue { gamma: power, log_value: f64::NEG_INFINITY }),
        Power::Finite(g) => g,
    };
    let p_num = 2.0 * (gamma - 1.0);
    let p_den = gamma - 2.0;
    if p_den > 0.0 && p_den < 1.0 {
        return Err(Error::Capability(format!(
            "regression variance needs denominator power 0 or >= 1, got {p_den}"
        )));
    }
    let (_, log_num) = min_regress_log_inner(dm, y, p_num, cfg)?;
    let log_den = if p_den == 0.0 {
        0.0
    } else {
        min_regress_log_inner(dm, y, p_den, cfg)?.1
    };
    let log_value = log_num - 2.0 * ((gamma - 1.0).ln() + log_den);
    Ok(VhatValue { gamma: power, log_value })
}

#[derive(Debug, Clone)]
pub struct RegressionDiagnostic {
    pub power: Power,
    pub beta: Vec<f64>,
    pub vhat: VhatValue,
    /// Coordinates of Sigma^{1/2} beta, the rectangle center.
    pub center: Vec<f64>,
    pub half_width: f64,
    pub within_gamma_max: bool,
}

#[derive(Debug, Clone)]
pub struct RegressionResult {
    pub beta_hat: Vec<f64>,
    pub gamma_hat: Power,
    pub gamma_max: Power,
    pub tau: f64,
    pub diagnostics: Vec<RegressionDiagnostic>,
}

/// Full power selection for regression: per-candidate rectangles around
/// Sigma^{1/2} beta, prefix intersection for gamma_max, argmin Vhat below it.
pub fn cavs_regress(dm: &DesignMatrix, y: &[f64], cfg: &CavsConfig) -> Result<RegressionResult> {
    cfg.validate()?;
    dm.check_response(y)?;
    let n = dm.rows();
    let d = dm.cols();
    let grid = match &cfg.grid {
        Some(g) => g.clone(),
        None => CandidateGrid::default_for(n),
    };
    let tau = cfg.tau_policy.tau_for(n);

    let mut diagnostics: Vec<RegressionDiagnostic> =
        map_items(grid.powers(), |&power| -> Result<RegressionDiagnostic> {
            let beta = lgamma_regress(dm, y, power, &cfg.solver)?;
            let v = vhat_regress(dm, y, power, &cfg.solver)?;
            let hw = if v.log_value == f64::NEG_INFINITY {
                0.0
            } else {
                (0.5 * (v.log_value - (n as f64).ln()) + tau.ln()).exp()
            };
            let center =
                dm.sigma_sqrt() * DVector::from_column_slice(&beta);
            Ok(RegressionDiagnostic {
                power,
                beta,
                vhat: v,
                center: center.iter().cloned().collect(),
                half_width: hw,
                within_gamma_max: false,
            })
        })
        .into_iter()
        .collect::<Result<_>>()?;

    // Prefix rectangle intersection: all d coordinates must keep overlapping.
    let mut low = vec![f64::NEG_INFINITY; d];
    let mut high = vec![f64::INFINITY; d];
    let mut gmax = diagnostics[0].power;
    for diag in &diagnostics {
        let mut feasible = true;
        for j in 0..d {
            low[j] = low[j].max(diag.center[j] - diag.half_width);
            high[j] = high[j].min(diag.center[j] + diag.half_width);
            if low[j] > high[j] {
                feasible = false;
            }
        }
        if feasible {
            gmax = diag.power;
        } else {
            break;
        }
    }
    for diag in diagnostics.iter_mut() {
        diag.within_gamma_max = diag.power <= gmax;
    }

    let selected = diagnostics
        .iter()
        .filter(|diag| diag.within_gamma_max)
        .reduce(|best, d| if d.vhat.log_value < best.vhat.log_value { d } else { best })
        .expect("grid has at least one admitted power");

    Ok(RegressionResult {
        beta_hat: selected.beta.clone(),
        gamma_hat: selected.power,
        gamma_max: gmax,
        tau,
        diagnostics: diagnostics.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{sample as draw_sample, stream_rng, DistributionSpec};
    use crate::selector::cavs_estimate;
    use crate::solver::lgamma_center;
    use approx::assert_relative_eq;
    use rand::Rng;

    fn intercept_only(n: usize) -> DesignMatrix {
        DesignMatrix::from_rows(&vec![vec![1.0]; n]).unwrap()
    }

    fn synthetic(n: usize, d: usize, seed: u64) -> (DesignMatrix, Vec<f64>, Vec<f64>) {
        let mut rng = stream_rng(seed, "regress-fixture", 0);
        let beta0: Vec<f64> = (0..d).map(|j| 1.0 + j as f64).collect();
        let mut rows = Vec::with_capacity(n);
        let mut y = Vec::with_capacity(n);
        for _ in 0..n {
            let mut row = vec![1.0];
            for _ in 1..d {
                row.push(rng.random::<f64>() * 2.0 - 1.0);
            }
            let noise = crate::dist::draw(&DistributionSpec::uniform(), &mut rng, false);
            let mean: f64 = row.iter().zip(&beta0).map(|(x, b)| x * b).sum();
            y.push(mean + noise);
            rows.push(row);
        }
        (DesignMatrix::from_rows(&rows).unwrap(), y, beta0)
    }

    #[test]
    fn sigma_sqrt_squares_back() {
        let (dm, _, _) = synthetic(80, 3, 1);
        let sq = dm.sigma_sqrt() * dm.sigma_sqrt();
        let diff = (&sq - dm.sigma()).norm() / dm.sigma().norm();
        assert!(diff < 1e-10, "relative Frobenius error {diff}");
        let asym = (dm.sigma() - dm.sigma().transpose()).norm();
        assert!(asym < 1e-12);
    }

    #[test]
    fn rank_deficiency_rejected() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64, 2.0 * i as f64]).collect();
        let dm = DesignMatrix::from_rows(&rows).unwrap();
        let y = vec![0.0; 10];
        assert!(lgamma_regress(&dm, &y, Power::Finite(2.0), &SolverConfig::default()).is_err());
    }

    #[test]
    fn gamma_two_is_ols() {
        let (dm, y, _) = synthetic(60, 3, 2);
        let beta = lgamma_regress(&dm, &y, Power::Finite(2.0), &SolverConfig::default()).unwrap();
        let expected = ols(&dm, &y).unwrap();
        for j in 0..3 {
            assert_relative_eq!(beta[j], expected[j], max_relative = 1e-8, epsilon = 1e-10);
        }
    }

    #[test]
    fn intercept_only_recovers_location_center() {
        let mut rng = stream_rng(3, "reduce", 0);
        let s = draw_sample(&DistributionSpec::Semicircle, 50, &mut rng).unwrap();
        let dm = intercept_only(50);
        let cfg = SolverConfig::default();
        for power in [Power::Finite(2.0), Power::Finite(8.0), Power::Finite(64.0)] {
            let beta = lgamma_regress(&dm, s.values(), power, &cfg).unwrap();
            let theta = lgamma_center(&s, power, &cfg).unwrap();
            assert!((beta[0] - theta).abs() <= 1e-9, "{power}: {} vs {theta}", beta[0]);
        }
    }

    #[test]
    fn intercept_only_vhat_matches_location() {
        let mut rng = stream_rng(4, "reduce-vhat", 0);
        let s = draw_sample(&DistributionSpec::uniform(), 80, &mut rng).unwrap();
        let dm = intercept_only(80);
        let cfg = SolverConfig::default();
        for g in [2.0, 4.0, 16.0] {
            let vr = vhat_regress(&dm, s.values(), Power::Finite(g), &cfg).unwrap();
            let vl = crate::avar::vhat(&s, Power::Finite(g), &cfg).unwrap();
            assert!(
                (vr.log_value - vl.log_value).abs() <= 1e-9,
                "g={g}: {} vs {}",
                vr.log_value,
                vl.log_value
            );
        }
    }

    #[test]
    fn vhat_infinity_is_zero() {
        let (dm, y, _) = synthetic(40, 2, 5);
        let v = vhat_regress(&dm, &y, Power::Infinity, &SolverConfig::default()).unwrap();
        assert_eq!(v.log_value, f64::NEG_INFINITY);
    }

    #[test]
    fn vhat_two_is_ols_residual_variance() {
        let (dm, y, _) = synthetic(70, 3, 6);
        let v = vhat_regress(&dm, &y, Power::Finite(2.0), &SolverConfig::default()).unwrap();
        let beta = ols(&dm, &y).unwrap();
        let r = DVector::from_column_slice(&y) - dm.matrix() * beta;
        let mse = r.iter().map(|e| e * e).sum::<f64>() / y.len() as f64;
        assert_relative_eq!(v.value(), mse, max_relative = 1e-9);
    }

    #[test]
    fn fit_matches_derivative_free_oracle() {
        // Coordinate-wise golden-section descent on the convex objective.
        let (dm, y, _) = synthetic(50, 2, 7);
        let p = 8.0;
        let objective = |beta: &[f64]| {
            let mut sum = 0.0;
            for i in 0..dm.rows() {
                let pred: f64 = (0..2).map(|j| dm.matrix()[(i, j)] * beta[j]).sum();
                sum += (y[i] - pred).abs().powf(p);
            }
            sum
        };
        let mut oracle = vec![0.0, 0.0];
        for _ in 0..600 {
            for j in 0..2 {
                let f1 = |t: f64| {
                    let mut b = oracle.clone();
                    b[j] = t;
                    objective(&b)
                };
                let (t, _) = crate::solver::golden_section(&f1, oracle[j] - 5.0, oracle[j] + 5.0, 1e-12);
                oracle[j] = t;
            }
        }
        let beta = lgamma_regress(&dm, &y, Power::Finite(p), &SolverConfig::default()).unwrap();
        for j in 0..2 {
            assert!(
                (beta[j] - oracle[j]).abs() <= 1e-6,
                "j={j}: {} vs {}",
                beta[j],
                oracle[j]
            );
        }
    }

    #[test]
    fn d1_unit_design_matches_location_selection() {
        let mut rng = stream_rng(8, "reduce-cavs", 0);
        let s = draw_sample(&DistributionSpec::uniform(), 200, &mut rng).unwrap();
        let dm = intercept_only(200);
        let cfg = CavsConfig::with_tau(1.0);
        let rr = cavs_regress(&dm, s.values(), &cfg).unwrap();
        let rl = cavs_estimate(&s, &cfg).unwrap();
        assert_eq!(rr.gamma_hat, rl.gamma_hat);
        assert!((rr.beta_hat[0] - rl.theta_hat).abs() <= 1e-8);
    }

    #[test]
    fn ols_containment() {
        let (dm, y, _) = synthetic(120, 3, 9);
        let cfg = CavsConfig::with_tau(1.0);
        let rr = cavs_regress(&dm, &y, &cfg).unwrap();
        let beta_ols = ols(&dm, &y).unwrap();
        let v2 = vhat_regress(&dm, &y, Power::Finite(2.0), &cfg.solver).unwrap();
        let diff = dm.sigma_sqrt()
            * (DVector::from_column_slice(&rr.beta_hat) - beta_ols);
        let bound = 2.0 * rr.tau * (v2.value() / 120.0).sqrt() + 1e-9;
        assert!(diff.amax() <= bound, "{} > {bound}", diff.amax());
    }

    #[test]
    fn equivariance() {
        let (dm, y, _) = synthetic(100, 3, 10);
        let cfg = CavsConfig::with_tau(1.0);
        let base = cavs_regress(&dm, &y, &cfg).unwrap();
        let b = 2.5;
        let c = [0.7, -1.1, 0.3];
        let y2: Vec<f64> = (0..100)
            .map(|i| {
                let shift: f64 = (0..3).map(|j| dm.matrix()[(i, j)] * c[j]).sum();
                b * y[i] + shift
            })
            .collect();
        let moved = cavs_regress(&dm, &y2, &cfg).unwrap();
        assert_eq!(base.gamma_hat, moved.gamma_hat);
        for j in 0..3 {
            let expected = b * base.beta_hat[j] + c[j];
            assert_relative_eq!(moved.beta_hat[j], expected, max_relative = 1e-7, epsilon = 1e-7);
        }
    }

    #[test]
    fn uniform_noise_selects_large_power_often() {
        let mut large = 0;
        let trials = 30;
        for t in 0..trials {
            let (dm, y, _) = synthetic(400, 3, 100 + t);
            let r = cavs_regress(&dm, &y, &CavsConfig::with_tau(1.0)).unwrap();
            if r.gamma_hat > Power::Finite(2.0) {
                large += 1;
            }
        }
        assert!(large as f64 >= 0.9 * trials as f64, "{large}/{trials}");
    }

    #[test]
    fn gaussian_noise_selects_two_modally() {
        let mut two = 0;
        let trials = 30;
        for t in 0..trials {
            let mut rng = stream_rng(200 + t, "regress-gauss", 0);
            let n = 200;
            let mut rows = Vec::new();
            let mut y = Vec::new();
            for _ in 0..n {
                let row = vec![1.0, rng.random::<f64>() * 2.0 - 1.0];
                let noise = crate::dist::draw(&DistributionSpec::Gaussian, &mut rng, false);
                y.push(row[0] * 2.0 - row[1] + noise);
                rows.push(row);
            }
            let dm = DesignMatrix::from_rows(&rows).unwrap();
            let r = cavs_regress(&dm, &y, &CavsConfig::with_tau(1.0)).unwrap();
            if r.gamma_hat == Power::Finite(2.0) {
                two += 1;
            }
        }
        assert!(two > trials / 2, "{two}/{trials}");
    }
}
