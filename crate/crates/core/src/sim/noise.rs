//! Seeded noise generation.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::types::TimeSeries;

/// Noise distribution, always scaled to unit variance before multiplying by sigma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseDist {
    Gaussian,
    /// Student-t with the given degrees of freedom (> 2).
    StudentT(f64),
}

impl FromStr for NoiseDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "gaussian" | "normal" => Ok(NoiseDist::Gaussian),
            _ => {
                let dof = lower
                    .strip_prefix('t')
                    .and_then(|d| d.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidConfig(format!("unknown noise `{s}`")))?;
                if dof > 2.0 {
                    Ok(NoiseDist::StudentT(dof))
                } else {
                    Err(Error::BadDof(dof))
                }
            }
        }
    }
}

impl fmt::Display for NoiseDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NoiseDist::Gaussian => f.write_str("gaussian"),
            NoiseDist::StudentT(d) => write!(f, "t{d}"),
        }
    }
}

/// Seed of replication `rep` derived from a base seed.
pub fn replication_seed(seed: u64, rep: u64) -> u64 {
    seed ^ rep
}

/// `signal + sigma * noise` with a ChaCha8 stream seeded by `seed`.
pub fn add_noise(signal: &[f64], sigma: f64, dist: NoiseDist, seed: u64) -> Result<TimeSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = match dist {
        NoiseDist::Gaussian => signal
            .iter()
            .map(|f| {
                let z: f64 = StandardNormal.sample(&mut rng);
                f + sigma * z
            })
            .collect(),
        NoiseDist::StudentT(dof) => {
            if dof.is_nan() || dof <= 2.0 {
                return Err(Error::BadDof(dof));
            }
            let t = StudentT::new(dof).map_err(|_| Error::BadDof(dof))?;
            let unit = ((dof - 2.0) / dof).sqrt();
            signal
                .iter()
                .map(|f| f + sigma * unit * t.sample(&mut rng))
                .collect()
        }
    };
    TimeSeries::new(values)
}
