use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::GenIndexSet;
use crate::{Error, Result};

/// Name of the generator recorded alongside every environment.
pub const RNG_NAME: &str = "chacha8/seed_from_u64";

/// A realized random environment: `A = {j ≤ j_max : Y_j = 1}`.
///
/// Stream rule: `ChaCha8Rng::seed_from_u64(seed)` drives the draws and
/// generation `j` consumes the `j`-th `next_u64()` output. `Y_j = 1` iff the top
/// 53 bits, read as a uniform in `[0, 1)`, fall below `eta`. Environments with a
/// larger `j_max` therefore extend smaller ones with the same seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub eta: f64,
    pub seed: u64,
    pub j_max: usize,
    #[serde(default = "rng_name")]
    pub rng: String,
    #[serde(rename = "A")]
    pub a: GenIndexSet,
}

fn rng_name() -> String {
    RNG_NAME.to_string()
}

pub fn sample_environment(eta: f64, seed: u64, j_max: usize) -> Result<Environment> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Parameter(format!("eta = {eta} outside [0, 1]")));
    }
    if j_max == 0 {
        return Err(Error::Parameter("j_max must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let members = (0..j_max)
        .map(|_| {
            let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
            u < eta
        })
        .collect();
    Ok(Environment { eta, seed, j_max, rng: rng_name(), a: GenIndexSet::from_membership(members) })
}

/// `#A ∩ {J..J+j-1}` and the high-probability deviation bound around `ηj`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvironmentCounts {
    pub card_a: u64,
    pub hoeffding_bound: f64,
}

impl EnvironmentCounts {
    pub fn violated(&self, eta: f64, j: usize) -> bool {
        (self.card_a as f64 - eta * j as f64).abs() > self.hoeffding_bound
    }
}

impl Environment {
    pub fn contains(&self, l: usize) -> bool {
        self.a.contains(l)
    }

    /// Regenerates from `(eta, seed, j_max)` and compares bit for bit.
    pub fn verify(&self) -> Result<bool> {
        Ok(sample_environment(self.eta, self.seed, self.j_max)?.a == self.a)
    }

    /// Counts over `{J..J+j-1}`. The bound is `sqrt(j ln j / ε_J)` with
    /// `ε_J = (ln J)^{-1/2}`; it degenerates to 0 at `J = 1`.
    pub fn counts(&self, big_j: usize, j: usize) -> Result<EnvironmentCounts> {
        if big_j == 0 || j == 0 {
            return Err(Error::Parameter("J and j must be at least 1".into()));
        }
        let last = big_j + j - 1;
        if last > self.j_max {
            return Err(Error::Depth { requested: last as u64, available: self.j_max as u64 });
        }
        let inv_eps = (big_j as f64).ln().sqrt();
        let jf = j as f64;
        Ok(EnvironmentCounts {
            card_a: self.a.count_range(big_j, last),
            hoeffding_bound: (jf * jf.ln() * inv_eps).sqrt(),
        })
    }
}

pub fn environment_counts(env: &Environment, big_j: usize, j: usize) -> Result<EnvironmentCounts> {
    env.counts(big_j, j)
}
