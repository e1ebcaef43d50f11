use crate::cascades::MeasureModel;
use crate::numeric::log2_add;
use crate::{Error, Result};

/// Per-generation log2 factors of a product-form pair, `[(a, b, c, d)]` with
/// `(a, b)` the left/right factors of `m1` and `(c, d)` those of `m2`.
pub(crate) fn pair_factors(m1: &MeasureModel, m2: &MeasureModel, j: usize) -> Result<Vec<[f64; 4]>> {
    if !m1.is_product_form() || !m2.is_product_form() {
        return Err(Error::NotProductForm);
    }
    if j == 0 {
        return Err(Error::Parameter("generation must be at least 1".into()));
    }
    m1.check_depth(j)?;
    m2.check_depth(j)?;
    (1..=j)
        .map(|l| {
            let (a, b) = m1.generation_factors(l)?;
            let (c, d) = m2.generation_factors(l)?;
            Ok([a, b, c, d])
        })
        .collect()
}

/// `τ̃_{m1,m2,j}(q1,q2)` without windows, collapsed to a sum over generations.
pub fn tilde_tau_exact(m1: &MeasureModel, m2: &MeasureModel, j: usize, q1: f64, q2: f64) -> Result<f64> {
    let f = pair_factors(m1, m2, j)?;
    Ok(tilde_from_factors(&f, q1, q2))
}

/// Per-generation factors of a product-form pair, kept for evaluating `τ̃` at
/// many `(q1, q2)`.
#[derive(Clone, Debug)]
pub struct PairFactors {
    f: Vec<[f64; 4]>,
}

impl PairFactors {
    pub fn new(m1: &MeasureModel, m2: &MeasureModel, j: usize) -> Result<Self> {
        Ok(Self { f: pair_factors(m1, m2, j)? })
    }

    pub fn tilde_tau(&self, q1: f64, q2: f64) -> f64 {
        tilde_from_factors(&self.f, q1, q2)
    }
}

pub(crate) fn tilde_from_factors(f: &[[f64; 4]], q1: f64, q2: f64) -> f64 {
    let s: f64 = f.iter().map(|&[a, b, c, d]| log2_add(q1 * a + q2 * c, q1 * b + q2 * d)).sum();
    -s / f.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascades::{sample_environment, ModelSpec};
    use crate::closedform::{big_t, tau_binomial};
    use std::sync::Arc;

    #[test]
    fn binomial_pair_is_t() {
        let m1 = MeasureModel::binomial(0.27).unwrap();
        let m2 = MeasureModel::binomial(0.8).unwrap();
        for j in [1, 7, 30] {
            let v = tilde_tau_exact(&m1, &m2, j, 2.5, -1.5).unwrap();
            assert!((v - big_t(0.27, 0.8, 2.5, -1.5)).abs() < 1e-12);
        }
        let same = tilde_tau_exact(&m1, &m1, 9, 1.2, 0.7).unwrap();
        assert!((same - tau_binomial(0.27, 1.9).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn switched_pair_splits_over_the_environment() {
        let env = Arc::new(sample_environment(0.5, 17, 400).unwrap());
        let m1 = MeasureModel::binomial(0.27).unwrap();
        let nu = MeasureModel::switched(0.27, 0.8, env.clone()).unwrap();
        let j = 400;
        let ja = env.a.count_upto(j) as f64;
        let (q1, q2) = (-2.0, 3.0);
        let want = (ja / j as f64) * tau_binomial(0.27, q1 + q2).unwrap()
            + (1.0 - ja / j as f64) * big_t(0.27, 0.8, q1, q2);
        assert!((tilde_tau_exact(&m1, &nu, j, q1, q2).unwrap() - want).abs() < 1e-12);
        assert!(tilde_tau_exact(&m1, &nu, 401, q1, q2).is_err());
    }

    #[test]
    fn counterexample_is_refused() {
        let ce = ModelSpec::Counterexample { n_max: 1, index: 1 }.build().unwrap();
        let m = MeasureModel::binomial(0.3).unwrap();
        assert_eq!(tilde_tau_exact(&ce, &m, 4, 1.0, 1.0), Err(Error::NotProductForm));
    }
}
