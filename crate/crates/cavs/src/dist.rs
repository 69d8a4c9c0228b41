//! Noise families used in the experiments: seeded samplers plus analytic
//! metadata (support, variance, boundary behavior, moment exponent).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::sample::Sample;
use crate::special::{normal_cdf, normal_pdf};

/// A named noise family with fixed parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionSpec {
    /// Unif[-m, m].
    Uniform { half_width: f64 },
    /// N(0, 1).
    Gaussian,
    /// Gaussian conditioned on |W| <= t; `unit_variance` rescales by sigma_t
    /// so the result has variance 1, otherwise the support stays [-t, t].
    TruncatedGaussian { t: f64, unit_variance: bool },
    /// p(x) = (2/pi) sqrt(1 - x^2) on [-1, 1].
    Semicircle,
    /// p(x) = (1/4)(1 - |x|)^{-1/2} on [-1, 1]; the boundary-power family at alpha = 1/2.
    UShape,
    /// p(x) = (alpha/2)(1 - |x|)^{alpha - 1} on [-1, 1].
    BoundaryPower { alpha: f64 },
    /// (2/3) Unif[-1, 0] + (1/3) Unif[0, 2]; mean zero, asymmetric.
    AsymmetricMixture,
    /// Density proportional to exp(-|x/sigma|^gamma0).
    GeneralizedGaussian { gamma0: f64, sigma: f64 },
}

impl DistributionSpec {
    pub fn uniform() -> Self {
        DistributionSpec::Uniform { half_width: 1.0 }
    }

    /// Unit-variance truncated Gaussian with truncation level `t`.
    pub fn truncated_gaussian(t: f64) -> Self {
        DistributionSpec::TruncatedGaussian { t, unit_variance: true }
    }

    /// Stable string tag used in CLI flags and config files.
    pub fn tag(&self) -> String {
        match self {
            DistributionSpec::Uniform { half_width } if *half_width == 1.0 => "uniform".into(),
            DistributionSpec::Uniform { half_width } => format!("uniform:m={half_width}"),
            DistributionSpec::Gaussian => "gaussian".into(),
            DistributionSpec::TruncatedGaussian { t, unit_variance: true } => format!("tgauss:t={t}"),
            DistributionSpec::TruncatedGaussian { t, unit_variance: false } => {
                format!("tgauss-raw:t={t}")
            }
            DistributionSpec::Semicircle => "semicircle".into(),
            DistributionSpec::UShape => "ushape".into(),
            DistributionSpec::BoundaryPower { alpha } => format!("boundary-power:alpha={alpha}"),
            DistributionSpec::AsymmetricMixture => "asymmetric-mixture".into(),
            DistributionSpec::GeneralizedGaussian { gamma0, sigma } => {
                format!("ggauss:gamma={gamma0},sigma={sigma}")
            }
        }
    }

    pub fn parse_tag(tag: &str) -> Result<Self> {
        let tag = tag.trim();
        let (name, params) = match tag.split_once(':') {
            Some((n, p)) => (n, Some(p)),
            None => (tag, None),
        };
        let param = |key: &str| -> Result<f64> {
            let params =
                params.ok_or_else(|| Error::Parse(format!("{name} requires {key}=<value>")))?;
            for part in params.split(',') {
                if let Some((k, v)) = part.split_once('=') {
                    if k.trim() == key {
                        return v
                            .trim()
                            .parse()
                            .map_err(|_| Error::Parse(format!("invalid {key} in {tag:?}")));
                    }
                }
            }
            Err(Error::Parse(format!("missing {key} in {tag:?}")))
        };
        match name {
            "uniform" => {
                let m = if params.is_some() { param("m")? } else { 1.0 };
                if !(m > 0.0) {
                    return Err(Error::Parse("uniform half-width must be positive".into()));
                }
                Ok(DistributionSpec::Uniform { half_width: m })
            }
            "gaussian" => Ok(DistributionSpec::Gaussian),
            "tgauss" => {
                let t = param("t")?;
                if !(t > 0.0) {
                    return Err(Error::Parse("truncation level must be positive".into()));
                }
                Ok(DistributionSpec::TruncatedGaussian { t, unit_variance: true })
            }
            "tgauss-raw" => {
                let t = param("t")?;
                if !(t > 0.0) {
                    return Err(Error::Parse("truncation level must be positive".into()));
                }
                Ok(DistributionSpec::TruncatedGaussian { t, unit_variance: false })
            }
            "semicircle" => Ok(DistributionSpec::Semicircle),
            "ushape" => Ok(DistributionSpec::UShape),
            "boundary-power" => {
                let alpha = param("alpha")?;
                if !(alpha > 0.0 && alpha < 2.0) {
                    return Err(Error::Parse("boundary-power alpha must be in (0, 2)".into()));
                }
                Ok(DistributionSpec::BoundaryPower { alpha })
            }
            "asymmetric-mixture" => Ok(DistributionSpec::AsymmetricMixture),
            "ggauss" => {
                let gamma0 = param("gamma")?;
                let sigma = if params.map(|p| p.contains("sigma=")).unwrap_or(false) {
                    param("sigma")?
                } else {
                    1.0
                };
                if !(gamma0 > 0.0 && sigma > 0.0) {
                    return Err(Error::Parse("ggauss parameters must be positive".into()));
                }
                Ok(DistributionSpec::GeneralizedGaussian { gamma0, sigma })
            }
            other => Err(Error::Parse(format!("unknown distribution tag {other:?}"))),
        }
    }

    /// Support bounds; None for unbounded families.
    pub fn support(&self) -> Option<(f64, f64)> {
        match self {
            DistributionSpec::Uniform { half_width } => Some((-half_width, *half_width)),
            DistributionSpec::Gaussian | DistributionSpec::GeneralizedGaussian { .. } => None,
            DistributionSpec::TruncatedGaussian { t, unit_variance } => {
                let b = if *unit_variance { t * truncated_sigma(*t) } else { *t };
                Some((-b, b))
            }
            DistributionSpec::Semicircle
            | DistributionSpec::UShape
            | DistributionSpec::BoundaryPower { .. } => Some((-1.0, 1.0)),
            DistributionSpec::AsymmetricMixture => Some((-1.0, 2.0)),
        }
    }

    /// Moment exponent alpha with E|Z|^gamma of order gamma^{-alpha}, when known.
    pub fn alpha(&self) -> Option<f64> {
        match self {
            DistributionSpec::Uniform { .. } => Some(1.0),
            DistributionSpec::Semicircle => Some(1.5),
            DistributionSpec::UShape => Some(0.5),
            DistributionSpec::BoundaryPower { alpha } => Some(*alpha),
            DistributionSpec::TruncatedGaussian { .. } => Some(1.0),
            _ => None,
        }
    }

    pub fn is_symmetric(&self) -> bool {
        !matches!(self, DistributionSpec::AsymmetricMixture)
    }

    pub fn variance(&self) -> f64 {
        match self {
            DistributionSpec::Uniform { half_width } => half_width * half_width / 3.0,
            DistributionSpec::Gaussian => 1.0,
            DistributionSpec::TruncatedGaussian { unit_variance: true, .. } => 1.0,
            DistributionSpec::TruncatedGaussian { t, unit_variance: false } => {
                truncated_normal_variance(*t)
            }
            DistributionSpec::Semicircle => 0.25,
            DistributionSpec::UShape => 8.0 / 15.0,
            DistributionSpec::BoundaryPower { alpha } => 2.0 / ((alpha + 1.0) * (alpha + 2.0)),
            DistributionSpec::AsymmetricMixture => 2.0 / 3.0,
            DistributionSpec::GeneralizedGaussian { gamma0, sigma } => {
                sigma
                    * sigma
                    * (crate::special::ln_gamma(3.0 / gamma0)
                        - crate::special::ln_gamma(1.0 / gamma0))
                    .exp()
            }
        }
    }

    /// Density at the upper support endpoint; None for unbounded support,
    /// +inf where the density diverges.
    pub fn boundary_density(&self) -> Option<f64> {
        match self {
            DistributionSpec::Uniform { half_width } => Some(0.5 / half_width),
            DistributionSpec::Gaussian | DistributionSpec::GeneralizedGaussian { .. } => None,
            DistributionSpec::Semicircle => Some(0.0),
            DistributionSpec::UShape => Some(f64::INFINITY),
            DistributionSpec::BoundaryPower { alpha } => Some(if *alpha < 1.0 {
                f64::INFINITY
            } else if *alpha == 1.0 {
                0.5
            } else {
                0.0
            }),
            DistributionSpec::TruncatedGaussian { t, unit_variance } => {
                let mass = 2.0 * normal_cdf(*t) - 1.0;
                let scale = if *unit_variance { truncated_sigma(*t) } else { 1.0 };
                Some(normal_pdf(*t) / (mass * scale))
            }
            DistributionSpec::AsymmetricMixture => Some(1.0 / 6.0),
        }
    }
}

/// Variance of the standard normal conditioned on |W| <= t.
pub fn truncated_normal_variance(t: f64) -> f64 {
    let mass = 2.0 * normal_cdf(t) - 1.0;
    1.0 - 2.0 * t * normal_pdf(t) / mass
}

/// Scale sigma_t such that sigma_t * (W | |W| <= t) has unit variance.
pub fn truncated_sigma(t: f64) -> f64 {
    assert!(t > 0.0, "truncation level must be positive");
    1.0 / truncated_normal_variance(t).sqrt()
}

/// A deterministic RNG stream keyed by (seed, experiment id, trial index);
/// identical keys reproduce identical draws regardless of thread scheduling.
pub fn stream_rng(seed: u64, experiment: &str, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(experiment.as_bytes()));
    rng.set_stream(trial);
    rng
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Draws n i.i.d. values from the family.
pub fn sample<R: Rng>(dist: &DistributionSpec, n: usize, rng: &mut R) -> Result<Sample> {
    if n == 0 {
        return Err(Error::Input("sample size must be >= 1".into()));
    }
    let values = (0..n).map(|_| draw(dist, rng, false)).collect();
    Sample::new(values)
}

/// Single draw. Symmetric families are drawn as (magnitude, sign); `flip`
/// inverts the sign step so a flipped stream negates the draw exactly.
pub(crate) fn draw<R: Rng>(dist: &DistributionSpec, rng: &mut R, flip: bool) -> f64 {
    match dist {
        DistributionSpec::AsymmetricMixture => {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            if u < 2.0 / 3.0 {
                -v
            } else {
                2.0 * v
            }
        }
        symmetric => {
            let mag = magnitude(symmetric, rng);
            let positive = rng.random::<bool>() != flip;
            if positive {
                mag
            } else {
                -mag
            }
        }
    }
}

fn magnitude<R: Rng>(dist: &DistributionSpec, rng: &mut R) -> f64 {
    match dist {
        DistributionSpec::Uniform { half_width } => half_width * rng.random::<f64>(),
        DistributionSpec::Gaussian => {
            let w: f64 = StandardNormal.sample(rng);
            w.abs()
        }
        DistributionSpec::TruncatedGaussian { t, unit_variance } => {
            let scale = if *unit_variance { truncated_sigma(*t) } else { 1.0 };
            loop {
                let w: f64 = StandardNormal.sample(rng);
                if w.abs() <= *t {
                    return scale * w.abs();
                }
            }
        }
        DistributionSpec::Semicircle => loop {
            // Rejection from Unif[0,1] x Unif[0,1]; accept rate pi/4.
            let x: f64 = rng.random();
            let u: f64 = rng.random();
            if u * u <= 1.0 - x * x {
                return x;
            }
        },
        DistributionSpec::UShape => inverse_boundary_power(0.5, rng.random()),
        DistributionSpec::BoundaryPower { alpha } => inverse_boundary_power(*alpha, rng.random()),
        DistributionSpec::GeneralizedGaussian { gamma0, sigma } => {
            let g = Gamma::new(1.0 / gamma0, 1.0).expect("valid gamma shape").sample(rng);
            sigma * g.powf(1.0 / gamma0)
        }
        DistributionSpec::AsymmetricMixture => unreachable!("asymmetric family has no sign step"),
    }
}

/// Inverse CDF of |X| for the boundary-power family: F(x) = 1 - (1-x)^alpha.
fn inverse_boundary_power(alpha: f64, u: f64) -> f64 {
    1.0 - (1.0 - u).powf(1.0 / alpha)
}
