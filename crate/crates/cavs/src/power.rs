use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A candidate loss power: a finite gamma >= 2 or the midrange limit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Power {
    Finite(f64),
    Infinity,
}

impl Power {
    pub fn finite(gamma: f64) -> Result<Self> {
        if !gamma.is_finite() || gamma < 2.0 {
            return Err(Error::Input(format!("finite power must be >= 2, got {gamma}")));
        }
        Ok(Power::Finite(gamma))
    }

    pub fn as_finite(&self) -> Option<f64> {
        match self {
            Power::Finite(g) => Some(*g),
            Power::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Power::Infinity)
    }
}

impl PartialOrd for Power {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Power::Infinity, Power::Infinity) => Some(Ordering::Equal),
            (Power::Infinity, Power::Finite(_)) => Some(Ordering::Greater),
            (Power::Finite(_), Power::Infinity) => Some(Ordering::Less),
            (Power::Finite(a), Power::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for Power {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Power::Finite(g) => write!(f, "{g}"),
            Power::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for Power {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "Inf" | "INF" | "infinity" => Ok(Power::Infinity),
            other => {
                let g: f64 = other
                    .parse()
                    .map_err(|_| Error::Parse(format!("invalid power {other:?}")))?;
                Power::finite(g)
            }
        }
    }
}

/// A strictly increasing set of candidate powers, optionally ending with infinity.
#[derive(Debug, Clone)]
pub struct CandidateGrid {
    powers: Vec<Power>,
}

impl CandidateGrid {
    pub fn new(powers: Vec<Power>) -> Result<Self> {
        if powers.is_empty() {
            return Err(Error::Input("candidate grid must be nonempty".into()));
        }
        for pair in powers.windows(2) {
            if pair[0].partial_cmp(&pair[1]) != Some(Ordering::Less) {
                return Err(Error::Input(format!(
                    "candidate grid must be strictly increasing: {} before {}",
                    pair[0], pair[1]
                )));
            }
        }
        if let Some(Power::Finite(g)) = powers.first() {
            if *g < 2.0 {
                return Err(Error::Input(format!("grid powers must be >= 2, got {g}")));
            }
        }
        Ok(Self { powers })
    }

    /// The default grid for sample size n: {2, 4, 8, ..., <= max(n, 2)} followed by infinity.
    pub fn default_for(n: usize) -> Self {
        let mut powers = Vec::new();
        let mut g = 2u64;
        loop {
            powers.push(Power::Finite(g as f64));
            match g.checked_mul(2) {
                Some(next) if next as usize <= n => g = next,
                _ => break,
            }
        }
        powers.push(Power::Infinity);
        Self { powers }
    }

    pub fn powers(&self) -> &[Power] {
        &self.powers
    }

    pub fn len(&self) -> usize {
        self.powers.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The supremum of the grid: largest finite power, or infinity.
    pub fn supremum(&self) -> Power {
        *self.powers.last().expect("grid is nonempty")
    }

    /// Parses a grid spec: "pow2:max=N[,inf]" or an explicit comma list like "2,4,8,inf".
    pub fn parse_spec(spec: &str, n: usize) -> Result<Self> {
        let spec = spec.trim();
        if spec == "pow2" || spec == "default" {
            return Ok(Self::default_for(n));
        }
        if let Some(rest) = spec.strip_prefix("pow2:") {
            let mut max = n as u64;
            let mut with_inf = false;
            for part in rest.split(',') {
                let part = part.trim();
                if part == "inf" {
                    with_inf = true;
                } else if let Some(v) = part.strip_prefix("max=") {
                    max = v
                        .parse()
                        .map_err(|_| Error::Parse(format!("invalid max in grid spec {spec:?}")))?;
                } else {
                    return Err(Error::Parse(format!("unknown grid spec component {part:?}")));
                }
            }
            let mut powers = Vec::new();
            let mut g = 2u64;
            while g <= max.max(2) {
                powers.push(Power::Finite(g as f64));
                match g.checked_mul(2) {
                    Some(next) => g = next,
                    None => break,
                }
            }
            if with_inf {
                powers.push(Power::Infinity);
            }
            return Self::new(powers);
        }
        let powers: Result<Vec<Power>> = spec.split(',').map(|p| p.parse()).collect();
        Self::new(powers?)
    }
}
