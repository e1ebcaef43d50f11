//! The measures: binomial `μ_p`, switched `ν_η`, and the counterexample pair.
//! Masses are handled as log2 values throughout.

mod counterexample;
mod environment;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use counterexample::{
    build_counterexample_schedule, counterexample_tau, eps, CounterexampleMember, CounterexampleSchedule,
    Profile, Scheme, Segment, Stage,
};
pub use environment::{environment_counts, sample_environment, Environment, EnvironmentCounts, RNG_NAME};

use crate::dyadic::{digit_counts, restrict, Word};
use crate::{Error, Result};

/// log2 of a cell mass; `-inf` stands for mass zero.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct LogMass(pub f64);

impl LogMass {
    pub const ZERO: LogMass = LogMass(f64::NEG_INFINITY);

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// log2 of `m^q` under the convention `0^q = 0` for every `q`.
    pub fn pow(self, q: f64) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            q * self.0
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BinomialParams {
    p: f64,
}

impl TryFrom<f64> for BinomialParams {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Self::new(p)
    }
}

impl From<BinomialParams> for f64 {
    fn from(b: BinomialParams) -> f64 {
        b.p
    }
}

impl BinomialParams {
    pub fn new(p: f64) -> Result<Self> {
        if p > 0.0 && p < 1.0 {
            Ok(Self { p })
        } else {
            Err(Error::Parameter(format!("p = {p} outside (0, 1)")))
        }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn log2_p(&self) -> f64 {
        self.p.log2()
    }

    pub fn log2_1mp(&self) -> f64 {
        (1.0 - self.p).log2()
    }
}

pub fn log_mass_binomial(params: &BinomialParams, w: &Word) -> LogMass {
    let (n0, n1) = digit_counts(w);
    let mut v = 0.0;
    if n0 > 0 {
        v += n0 as f64 * params.log2_p();
    }
    if n1 > 0 {
        v += n1 as f64 * params.log2_1mp();
    }
    LogMass(v)
}

/// `ν_η`: generation `ℓ` uses `p1` when `ℓ ∈ A`, `p2` otherwise.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SwitchedParams {
    pub p1: BinomialParams,
    pub p2: BinomialParams,
    pub env: Arc<Environment>,
}

impl SwitchedParams {
    pub fn new(p1: f64, p2: f64, env: Arc<Environment>) -> Result<Self> {
        Ok(Self { p1: BinomialParams::new(p1)?, p2: BinomialParams::new(p2)?, env })
    }

    fn at(&self, l: usize) -> &BinomialParams {
        if self.env.contains(l) {
            &self.p1
        } else {
            &self.p2
        }
    }
}

pub fn log_mass_switched(params: &SwitchedParams, w: &Word) -> Result<LogMass> {
    if w.len() > params.env.j_max {
        return Err(Error::Depth { requested: w.len() as u64, available: params.env.j_max as u64 });
    }
    let on = restrict(w, &params.env.a)?;
    let off = restrict(w, &params.env.a.complement())?;
    Ok(LogMass(log_mass_binomial(&params.p1, &on).0 + log_mass_binomial(&params.p2, &off).0))
}

/// Any measure of the three families.
#[derive(Clone, Debug, PartialEq)]
pub enum MeasureModel {
    Binomial(BinomialParams),
    Switched(SwitchedParams),
    Counterexample(CounterexampleMember),
}

impl MeasureModel {
    pub fn binomial(p: f64) -> Result<Self> {
        Ok(Self::Binomial(BinomialParams::new(p)?))
    }

    pub fn switched(p1: f64, p2: f64, env: Arc<Environment>) -> Result<Self> {
        Ok(Self::Switched(SwitchedParams::new(p1, p2, env)?))
    }

    pub fn log_mass(&self, w: &Word) -> Result<LogMass> {
        match self {
            Self::Binomial(b) => Ok(log_mass_binomial(b, w)),
            Self::Switched(s) => log_mass_switched(s, w),
            Self::Counterexample(c) => c.log_mass(w).map(LogMass),
        }
    }

    /// Deepest generation with defined masses; `None` when unbounded.
    pub fn depth(&self) -> Option<u128> {
        match self {
            Self::Binomial(_) => None,
            Self::Switched(s) => Some(s.env.j_max as u128),
            Self::Counterexample(c) => Some(c.schedule.max_generation()),
        }
    }

    pub fn check_depth(&self, j: usize) -> Result<()> {
        match self.depth() {
            Some(d) if j as u128 > d => {
                Err(Error::Depth { requested: j as u64, available: d.min(u64::MAX as u128) as u64 })
            }
            _ => Ok(()),
        }
    }

    pub fn is_product_form(&self) -> bool {
        !matches!(self, Self::Counterexample(_))
    }

    /// log2 of the left and right factors applied at generation `l ≥ 1`.
    pub fn generation_factors(&self, l: usize) -> Result<(f64, f64)> {
        let b = match self {
            Self::Binomial(b) => b,
            Self::Switched(s) => {
                self.check_depth(l)?;
                s.at(l)
            }
            Self::Counterexample(_) => return Err(Error::NotProductForm),
        };
        Ok((b.log2_p(), b.log2_1mp()))
    }

    /// log2 masses of every cell of generation `j`, in left-to-right order.
    pub fn log_masses(&self, j: usize) -> Result<Vec<f64>> {
        self.check_depth(j)?;
        let mut cur = vec![0.0f64];
        match self {
            Self::Counterexample(c) => {
                if j % 2 == 1 {
                    return Err(Error::OddGeneration(j as u128));
                }
                for k in 1..=(j / 2) {
                    let children = c.scheme_at(k as u128)?.child_log2_masses();
                    cur = cur.iter().flat_map(|&m| children.map(|c| m + c)).collect();
                }
            }
            _ => {
                for l in 1..=j {
                    let (a, b) = self.generation_factors(l)?;
                    cur = cur.iter().flat_map(|&m| [m + a, m + b]).collect();
                }
            }
        }
        Ok(cur)
    }
}

/// JSON description of a model, rebuilt deterministically.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    Binomial { p: f64 },
    Switched { p1: f64, p2: f64, eta: f64, seed: u64, j_max: usize },
    Counterexample { n_max: u32, index: u8 },
}

impl ModelSpec {
    pub fn build(&self) -> Result<MeasureModel> {
        match *self {
            Self::Binomial { p } => MeasureModel::binomial(p),
            Self::Switched { p1, p2, eta, seed, j_max } => {
                MeasureModel::switched(p1, p2, Arc::new(sample_environment(eta, seed, j_max)?))
            }
            Self::Counterexample { n_max, index } => Ok(MeasureModel::Counterexample(CounterexampleMember::new(
                Arc::new(build_counterexample_schedule(n_max)?),
                index,
            )?)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::BivariateCaseParams;
    use crate::numeric::log2_sum_exp;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn binomial_examples() {
        let half = BinomialParams::new(0.5).unwrap();
        assert_eq!(log_mass_binomial(&half, &w("010110")).0, -6.0);
        let q = BinomialParams::new(0.25).unwrap();
        assert!((log_mass_binomial(&q, &w("01")).0 - 0.1875f64.log2()).abs() < 1e-15);
        assert_eq!(log_mass_binomial(&q, &w("")).0, 0.0);
        assert!(BinomialParams::new(1.0).is_err());
    }

    #[test]
    fn switched_degenerate_environments() {
        let word = w("0110100111");
        let b1 = BinomialParams::new(0.3).unwrap();
        let b2 = BinomialParams::new(0.8).unwrap();
        let full = Arc::new(sample_environment(1.0, 1, 10).unwrap());
        let none = Arc::new(sample_environment(0.0, 1, 10).unwrap());
        let s = SwitchedParams::new(0.3, 0.8, full).unwrap();
        assert_eq!(log_mass_switched(&s, &word).unwrap(), log_mass_binomial(&b1, &word));
        let s = SwitchedParams::new(0.3, 0.8, none).unwrap();
        assert_eq!(log_mass_switched(&s, &word).unwrap(), log_mass_binomial(&b2, &word));
        let env = Arc::new(sample_environment(0.5, 3, 10).unwrap());
        let s = SwitchedParams::new(0.3, 0.3, env.clone()).unwrap();
        let d = log_mass_switched(&s, &word).unwrap().0 - log_mass_binomial(&b1, &word).0;
        assert!(d.abs() < 1e-13);
        let s = SwitchedParams::new(0.3, 0.8, env).unwrap();
        assert!(log_mass_switched(&s, &w("01101001110")).is_err());
    }

    #[test]
    fn mass_is_conserved_at_every_generation() {
        let env = Arc::new(sample_environment(0.4, 11, 20).unwrap());
        let models = [MeasureModel::binomial(0.27).unwrap(), MeasureModel::switched(0.1, 0.7, env).unwrap()];
        for m in &models {
            for j in [1, 5, 12, 20] {
                let total = log2_sum_exp(&m.log_masses(j).unwrap());
                assert!(total.abs() < 1e-10, "j={j}: {total}");
            }
        }
        let ce = ModelSpec::Counterexample { n_max: 1, index: 2 }.build().unwrap();
        for j in [2, 8, 16] {
            assert!(log2_sum_exp(&ce.log_masses(j).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn enumerated_masses_agree_with_word_queries() {
        let env = Arc::new(sample_environment(0.5, 5, 12).unwrap());
        let m = MeasureModel::switched(0.2, 0.6, env).unwrap();
        let all = m.log_masses(9).unwrap();
        for idx in [0u64, 1, 77, 300, 511] {
            let word = Word::from_index(idx, 9);
            assert!((all[idx as usize] - m.log_mass(&word).unwrap().0).abs() < 1e-12);
        }
        let ce = ModelSpec::Counterexample { n_max: 1, index: 2 }.build().unwrap();
        let all = ce.log_masses(6).unwrap();
        for idx in [0u64, 3, 15, 63] {
            let word = Word::from_index(idx, 6);
            assert_eq!(all[idx as usize], ce.log_mass(&word).unwrap().0);
        }
    }

    #[test]
    fn model_spec_json() {
        let spec = ModelSpec::Switched { p1: 0.27, p2: 0.8, eta: 0.5, seed: 3, j_max: 100 };
        let s = serde_json::to_string(&spec).unwrap();
        assert!(s.contains(r#""kind":"switched""#));
        let back: ModelSpec = serde_json::from_str(&s).unwrap();
        assert_eq!(back.build().unwrap(), spec.build().unwrap());
    }

    fn word_strategy(max: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec(0u8..2, 0..max).prop_map(|b| Word::from_bits(b).unwrap())
    }

    proptest! {
        #[test]
        fn switched_mass_decomposes(word in word_strategy(64), seed in any::<u64>(), eta in 0.0f64..=1.0) {
            let env = Arc::new(sample_environment(eta, seed, 64).unwrap());
            let s = SwitchedParams::new(0.27, 0.8, env.clone()).unwrap();
            let direct: f64 = word
                .bits()
                .iter()
                .enumerate()
                .map(|(i, &b)| {
                    let p = if env.contains(i + 1) { 0.27f64 } else { 0.8 };
                    if b == 0 { p.log2() } else { (1.0 - p).log2() }
                })
                .sum();
            prop_assert!((log_mass_switched(&s, &word).unwrap().0 - direct).abs() < 1e-10);
        }

        // A cell with μ_{p1}-exponent α has μ_{p2}-exponent G(α).
        #[test]
        fn g_conjugates_exponents(word in word_strategy(200), mixed in any::<bool>()) {
            prop_assume!(!word.is_empty());
            let (p1, p2) = if mixed { (0.27, 0.8) } else { (0.1, 0.4) };
            let c = BivariateCaseParams::new(p1, p2, 0.5).unwrap();
            let j = word.len() as f64;
            let alpha = -log_mass_binomial(&BinomialParams::new(p1).unwrap(), &word).0 / j;
            let beta = -log_mass_binomial(&BinomialParams::new(p2).unwrap(), &word).0 / j;
            prop_assert!((beta - c.g(alpha)).abs() < 1e-12);
        }
    }
}
