//! Scalar input laws. Every kind has mean 0 and variance 1.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::log_add_exp;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Distribution {
    Rademacher,
    /// Takes `-√((1-p)/p)` with probability `p` and `√(p/(1-p))` otherwise.
    Pbiased {
        p: f64,
    },
    Gaussian,
}

impl Distribution {
    pub fn pbiased(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param(format!("p must lie in (0, 1), got {p}")));
        }
        Ok(Distribution::Pbiased { p })
    }

    /// Parses `rademacher`, `gaussian` or `pbiased` (the latter needs `p`).
    pub fn from_name(name: &str, p: Option<f64>) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "rademacher" => Ok(Distribution::Rademacher),
            "gaussian" | "normal" => Ok(Distribution::Gaussian),
            "pbiased" | "p-biased" => {
                let p = p.ok_or_else(|| Error::param("pbiased needs a value for p"))?;
                Distribution::pbiased(p)
            }
            other => Err(Error::param(format!("unknown distribution `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Distribution::Rademacher => "rademacher",
            Distribution::Pbiased { .. } => "pbiased",
            Distribution::Gaussian => "gaussian",
        }
    }

    /// The two support points `(negative, positive)` of a two-point law.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            Distribution::Rademacher => Some((-1.0, 1.0)),
            Distribution::Pbiased { p } => Some((-((1.0 - p) / p).sqrt(), (p / (1.0 - p)).sqrt())),
            Distribution::Gaussian => None,
        }
    }

    /// Almost-sure bound `L` on `|x|`; `None` for the Gaussian.
    pub fn bound(&self) -> Option<f64> {
        self.support().map(|(lo, hi)| lo.abs().max(hi))
    }

    pub fn require_bound(&self) -> Result<f64> {
        self.bound()
            .ok_or_else(|| Error::UnboundedDistribution(self.to_string()))
    }

    /// `E[x^k]`.
    pub fn moment(&self, k: u32) -> f64 {
        match *self {
            Distribution::Gaussian => {
                if k % 2 == 1 {
                    0.0
                } else {
                    (1..k).step_by(2).map(f64::from).product()
                }
            }
            Distribution::Rademacher => {
                if k % 2 == 1 {
                    0.0
                } else {
                    1.0
                }
            }
            Distribution::Pbiased { p } => {
                let (lo, hi) = self.support().unwrap();
                p * lo.powi(k as i32) + (1.0 - p) * hi.powi(k as i32)
            }
        }
    }

    /// `ln E[x^k]` for even `k`, computed without forming the moment.
    pub fn log_even_moment(&self, k: u32) -> f64 {
        assert!(k.is_multiple_of(2), "log_even_moment needs an even order");
        match *self {
            Distribution::Gaussian => (1..k).step_by(2).map(|j| f64::from(j).ln()).sum(),
            Distribution::Rademacher => 0.0,
            Distribution::Pbiased { p } => {
                let (lo, hi) = self.support().unwrap();
                let k = f64::from(k);
                log_add_exp(p.ln() + k * lo.abs().ln(), (1.0 - p).ln() + k * hi.ln())
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Distribution::Gaussian => rng.sample(StandardNormal),
            Distribution::Rademacher => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Distribution::Pbiased { p } => {
                let (lo, hi) = self.support().unwrap();
                if rng.random::<f64>() < p {
                    lo
                } else {
                    hi
                }
            }
        }
    }

    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        for v in out {
            *v = self.sample(rng);
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Pbiased { p } => write!(f, "pbiased({p})"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for Distribution {
    type Err = Error;

    /// Accepts `rademacher`, `gaussian`, or `pbiased:<p>`.
    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            Some((name, p)) => {
                let p: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| Error::param(format!("bad probability in `{s}`")))?;
                Distribution::from_name(name.trim(), Some(p))
            }
            None => Distribution::from_name(s.trim(), None),
        }
    }
}
