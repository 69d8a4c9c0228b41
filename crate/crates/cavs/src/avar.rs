//! Empirical asymptotic variance of the L_gamma center, evaluated end-to-end
//! in the log domain, plus the population counterpart for distributions with
//! analytic or quadrature-computable absolute moments.

use crate::dist::{truncated_sigma, DistributionSpec};
use crate::error::{Error, Result};
use crate::power::Power;
use crate::quadrature::integrate;
use crate::sample::Sample;
use crate::solver::{min_objective_log, SolverConfig};
use crate::special::{ln_gamma, normal_cdf, normal_pdf};

/// Log-domain value of the empirical asymptotic variance at one power.
#[derive(Debug, Clone, Copy)]
pub struct VhatValue {
    pub gamma: Power,
    /// ln V-hat; -inf encodes V-hat = 0 (the infinite power, or a constant sample).
    pub log_value: f64,
}

impl VhatValue {
    pub fn value(&self) -> f64 {
        self.log_value.exp()
    }
}

/// Empirical asymptotic variance of the center at the given power.
///
/// The numerator and denominator minimizations are carried out independently,
/// each at its own power; a constant sample yields the 0 sentinel.
pub fn vhat(sample: &Sample, power: Power, cfg: &SolverConfig) -> Result<VhatValue> {
    if sample.len() < 2 {
        return Err(Error::Input("vhat requires a sample of size >= 2".into()));
    }
    let gamma = match power {
        Power::Infinity => return Ok(VhatValue { gamma: power, log_value: f64::NEG_INFINITY }),
        Power::Finite(g) => g,
    };
    if sample.is_constant() {
        return Ok(VhatValue { gamma: power, log_value: f64::NEG_INFINITY });
    }
    let (_, log_num) = min_objective_log(sample, 2.0 * (gamma - 1.0), cfg)?;
    let (_, log_den) = min_objective_log(sample, gamma - 2.0, cfg)?;
    let log_value = log_num - 2.0 * ((gamma - 1.0).ln() + log_den);
    Ok(VhatValue { gamma: power, log_value })
}

/// Log of E|Z|^gamma for the given family.
///
/// Uniform and the boundary-power family have closed forms (the latter via a
/// Gamma ratio evaluated in log-gamma); Gaussian and generalized Gaussian use
/// the Gamma-function moment formulas; semicircle and truncated Gaussian are
/// integrated numerically with the power factored out of the integrand.
pub fn log_moment_abs(dist: &DistributionSpec, gamma: f64) -> Result<f64> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::Input(format!("moment power must be finite and >= 0, got {gamma}")));
    }
    if gamma == 0.0 {
        return Ok(0.0);
    }
    match dist {
        DistributionSpec::Uniform { half_width } => {
            Ok(gamma * half_width.ln() - (gamma + 1.0).ln())
        }
        DistributionSpec::BoundaryPower { alpha } => Ok(log_boundary_power_moment(*alpha, gamma)),
        DistributionSpec::UShape => Ok(log_boundary_power_moment(0.5, gamma)),
        DistributionSpec::Gaussian => {
            // E|Z|^g = 2^{g/2} Gamma((g+1)/2) / sqrt(pi).
            Ok(0.5 * gamma * std::f64::consts::LN_2 + ln_gamma((gamma + 1.0) / 2.0)
                - 0.5 * std::f64::consts::PI.ln())
        }
        DistributionSpec::GeneralizedGaussian { gamma0, sigma } => {
            Ok(gamma * sigma.ln() + ln_gamma((gamma + 1.0) / gamma0) - ln_gamma(1.0 / gamma0))
        }
        DistributionSpec::Semicircle => {
            // (4/pi) int_0^1 x^g sqrt(1-x^2) dx.
            let v = integrate(
                &|x: f64| x.powf(gamma) * (1.0 - x * x).max(0.0).sqrt(),
                0.0,
                1.0,
                1e-12,
                1e-300,
            )?;
            Ok((4.0 / std::f64::consts::PI).ln() + v.ln())
        }
        DistributionSpec::TruncatedGaussian { t, unit_variance } => {
            let scale = if *unit_variance { truncated_sigma(*t) } else { 1.0 };
            let b = scale * t;
            let mass = 2.0 * normal_cdf(*t) - 1.0;
            // E|Z|^g = b^g * 2 int_0^t (x s / b)^g phi(x) dx / mass, with s=scale.
            let v = integrate(
                &|x: f64| (x * scale / b).powf(gamma) * normal_pdf(x),
                0.0,
                *t,
                1e-12,
                1e-300,
            )?;
            Ok(gamma * b.ln() + (2.0 * v / mass).ln())
        }
        DistributionSpec::AsymmetricMixture => {
            // (2/3)/(g+1) + (1/3) 2^g/(g+1), factoring out 2^g.
            Ok(gamma * std::f64::consts::LN_2 - (gamma + 1.0).ln()
                + ((2.0 / 3.0) * 0.5f64.powf(gamma) + 1.0 / 3.0).ln())
        }
    }
}

fn log_boundary_power_moment(alpha: f64, gamma: f64) -> f64 {
    // E|X|^g = Gamma(alpha+1) Gamma(g+1) / Gamma(g+alpha+1).
    ln_gamma(alpha + 1.0) + ln_gamma(gamma + 1.0) - ln_gamma(gamma + alpha + 1.0)
}

/// E|Z|^gamma; +inf when the moment overflows a double.
pub fn moment_abs(dist: &DistributionSpec, gamma: f64) -> Result<f64> {
    Ok(log_moment_abs(dist, gamma)?.exp())
}

/// Independent quadrature route for compact-support moments, used to
/// cross-check the closed forms. Singular boundary-power integrands are
/// regularized by the substitution s = (1-x)^alpha.
pub fn moment_abs_quadrature(dist: &DistributionSpec, gamma: f64) -> Result<f64> {
    match dist {
        DistributionSpec::Uniform { half_width } => {
            let m = *half_width;
            let v = integrate(&|x: f64| x.powf(gamma) / m, 0.0, m, 1e-12, 1e-300)?;
            Ok(v)
        }
        DistributionSpec::BoundaryPower { alpha } => boundary_power_quadrature(*alpha, gamma),
        DistributionSpec::UShape => boundary_power_quadrature(0.5, gamma),
        DistributionSpec::Semicircle => {
            // Gamma-ratio identity: (2/pi) B((g+1)/2, 3/2).
            let log_v = (2.0 / std::f64::consts::PI).ln() + ln_gamma((gamma + 1.0) / 2.0)
                + ln_gamma(1.5)
                - ln_gamma(gamma / 2.0 + 2.0);
            Ok(log_v.exp())
        }
        other => Err(Error::Capability(format!(
            "no independent quadrature route for {}",
            other.tag()
        ))),
    }
}

fn boundary_power_quadrature(alpha: f64, gamma: f64) -> Result<f64> {
    if alpha < 1.0 {
        // int_0^1 (1 - s^{1/alpha})^g ds after substituting s = (1-x)^alpha.
        integrate(&|s: f64| (1.0 - s.powf(1.0 / alpha)).max(0.0).powf(gamma), 0.0, 1.0, 1e-10, 1e-300)
    } else {
        integrate(
            &|x: f64| alpha * x.powf(gamma) * (1.0 - x).max(0.0).powf(alpha - 1.0),
            0.0,
            1.0,
            1e-10,
            1e-300,
        )
    }
}

/// Population asymptotic variance V(gamma) from Eq.-level moments; +inf when
/// the numerator moment diverges or overflows.
pub fn v_population(dist: &DistributionSpec, gamma: f64) -> Result<f64> {
    if !(gamma > 1.0) {
        return Err(Error::Input(format!("population variance requires gamma > 1, got {gamma}")));
    }
    let log_num = log_moment_abs(dist, 2.0 * (gamma - 1.0))?;
    let log_den = log_moment_abs(dist, gamma - 2.0)?;
    Ok(v_from_log_moments(log_num, log_den, gamma))
}

/// V(gamma) from the two log moments: exp(log E|Z|^{2(g-1)} - 2[ln(g-1) + log E|Z|^{g-2}]).
pub fn v_from_log_moments(log_num: f64, log_den: f64, gamma: f64) -> f64 {
    (log_num - 2.0 * ((gamma - 1.0).ln() + log_den)).exp()
}

/// Immutable table of absolute moments for one family.
#[derive(Debug, Clone)]
pub struct MomentTable {
    dist: DistributionSpec,
    entries: Vec<(f64, f64)>,
}

impl MomentTable {
    pub fn build(dist: DistributionSpec, gammas: &[f64]) -> Result<Self> {
        let entries = gammas
            .iter()
            .map(|&g| Ok((g, moment_abs(&dist, g)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { dist, entries })
    }

    pub fn dist(&self) -> &DistributionSpec {
        &self.dist
    }

    pub fn entries(&self) -> &[(f64, f64)] {
        &self.entries
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{sample, stream_rng};
    use approx::assert_relative_eq;

    #[test]
    fn vhat_two_points() {
        let s = Sample::new(vec![-1.0, 1.0]).unwrap();
        let v = vhat(&s, Power::Finite(2.0), &SolverConfig::default()).unwrap();
        assert_relative_eq!(v.value(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn vhat_infinity_is_zero() {
        let s = Sample::new(vec![0.3, 1.0, 2.0]).unwrap();
        let v = vhat(&s, Power::Infinity, &SolverConfig::default()).unwrap();
        assert_eq!(v.log_value, f64::NEG_INFINITY);
        assert_eq!(v.value(), 0.0);
    }

    #[test]
    fn vhat_constant_sample_sentinel() {
        let s = Sample::new(vec![5.0; 4]).unwrap();
        let v = vhat(&s, Power::Finite(4.0), &SolverConfig::default()).unwrap();
        assert_eq!(v.value(), 0.0);
    }

    #[test]
    fn vhat_two_equals_biased_variance() {
        let s = Sample::new(vec![0.4, -1.3, 2.2, 0.9, 0.1]).unwrap();
        let v = vhat(&s, Power::Finite(2.0), &SolverConfig::default()).unwrap();
        assert_relative_eq!(v.value(), s.variance(), max_relative = 1e-10);
    }

    #[test]
    fn vhat_consistent_for_uniform() {
        let mut rng = stream_rng(11, "vhat-consistency", 0);
        let s = sample(&DistributionSpec::uniform(), 100_000, &mut rng).unwrap();
        for g in [2.0, 4.0, 8.0] {
            let v = vhat(&s, Power::Finite(g), &SolverConfig::default()).unwrap();
            let pop = 1.0 / (2.0 * g - 1.0);
            assert!(
                (v.value() - pop).abs() <= 0.05 * pop,
                "gamma={g}: {} vs {pop}",
                v.value()
            );
        }
    }

    #[test]
    fn vhat_scale_law() {
        let s = Sample::new(vec![0.4, -1.3, 2.2, 0.9, 0.1, 1.4, -0.6, 0.77]).unwrap();
        let t = s.affine(3.0, 7.0).unwrap();
        let cfg = SolverConfig::default();
        for g in [2.0, 4.0, 8.0] {
            let a = vhat(&s, Power::Finite(g), &cfg).unwrap().value();
            let b = vhat(&t, Power::Finite(g), &cfg).unwrap().value();
            assert_relative_eq!(b, 9.0 * a, max_relative = 1e-8);
        }
    }

    #[test]
    fn vhat_vanishes_at_large_power() {
        let s = Sample::new(vec![0.11, -0.7, 1.9, 0.42, 1.13, -1.55, 0.8, 0.29]).unwrap();
        let cfg = SolverConfig::default();
        let n = s.len() as f64;
        let small = vhat(&s, Power::Finite(2.0 * n), &cfg).unwrap();
        let base = vhat(&s, Power::Finite(2.0), &cfg).unwrap();
        assert!(small.log_value < base.log_value);
    }

    #[test]
    fn population_variance_examples() {
        let u = DistributionSpec::uniform();
        assert_relative_eq!(v_population(&u, 2.0).unwrap(), 1.0 / 3.0, max_relative = 1e-12);
        assert_relative_eq!(v_population(&u, 5.0).unwrap(), 1.0 / 9.0, max_relative = 1e-12);
    }

    #[test]
    fn moment_examples() {
        let u = DistributionSpec::uniform();
        assert_relative_eq!(moment_abs(&u, 1.0).unwrap(), 0.5, max_relative = 1e-12);
        for d in [DistributionSpec::Semicircle, DistributionSpec::UShape, u] {
            assert_relative_eq!(moment_abs(&d, 0.0).unwrap(), 1.0);
        }
        // Semicircle second moment: quadrature route vs Gamma identity.
        let q = moment_abs_quadrature(&DistributionSpec::Semicircle, 2.0).unwrap();
        let m = moment_abs(&DistributionSpec::Semicircle, 2.0).unwrap();
        assert_relative_eq!(m, q, max_relative = 1e-9);
        assert_relative_eq!(m, 0.25, max_relative = 1e-9);
    }

    #[test]
    fn gaussian_moment_matches_quadrature() {
        use crate::special::normal_pdf;
        for g in [1.0, 2.0, 5.0, 10.0] {
            let m = moment_abs(&DistributionSpec::Gaussian, g).unwrap();
            let q = integrate(&|x: f64| 2.0 * x.powf(g) * normal_pdf(x), 0.0, 40.0, 1e-12, 1e-300)
                .unwrap();
            assert_relative_eq!(m, q, max_relative = 1e-9);
        }
    }

    #[test]
    fn boundary_power_moment_envelope() {
        for alpha in [0.5, 1.0, 1.5] {
            let d = DistributionSpec::BoundaryPower { alpha };
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            let mut g: f64 = 1.0;
            while g <= 1024.0 {
                let scaled = g.powf(alpha) * moment_abs(&d, g).unwrap();
                lo = lo.min(scaled);
                hi = hi.max(scaled);
                g *= 2.0;
            }
            assert!(hi / lo <= 10.0, "alpha={alpha}: envelope ratio {}", hi / lo);
        }
    }

    #[test]
    fn rademacher_population_value() {
        // Point masses at +-1: every absolute moment is 1, so V(3) = 1/4.
        assert_relative_eq!(v_from_log_moments(0.0, 0.0, 3.0), 0.25);
    }
}
