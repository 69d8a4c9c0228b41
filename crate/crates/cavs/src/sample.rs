use crate::error::{Error, Result};

/// An immutable batch of finite observations with cached summary statistics.
#[derive(Debug, Clone)]
pub struct Sample {
    values: Vec<f64>,
    min: f64,
    max: f64,
    mean: f64,
    variance: f64,
}

impl Sample {
    /// Builds a sample, rejecting empty input and non-finite values.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Input("sample must contain at least one value".into()));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Input(format!("sample contains non-finite value {bad}")));
        }
        let n = values.len() as f64;
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for &v in &values {
            min = min.min(v);
            max = max.max(v);
            sum += v;
        }
        let mean = sum / n;
        // Biased variance (divisor n), computed against the mean for stability.
        let variance = if min == max {
            0.0
        } else {
            values.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n
        };
        Ok(Self { values, min, max, mean, variance })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Biased empirical variance (divisor n).
    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn range(&self) -> f64 {
        self.max - self.min
    }

    /// True when every observation is identical.
    pub fn is_constant(&self) -> bool {
        self.min == self.max
    }

    /// Applies y -> b*y + a, returning a new sample.
    pub fn affine(&self, b: f64, a: f64) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| b * v + a).collect())
    }

    /// Empirical skewness (1/n) sum((y - mean)^3) / sigma^3; 0 for constant samples.
    pub fn skewness(&self) -> f64 {
        if self.variance == 0.0 {
            return 0.0;
        }
        let n = self.values.len() as f64;
        let m3 = self
            .values
            .iter()
            .map(|&v| {
                let d = v - self.mean;
                d * d * d
            })
            .sum::<f64>()
            / n;
        m3 / self.variance.powf(1.5)
    }
}
