use serde::{Deserialize, Serialize};
use statrs::function::factorial::ln_binomial;

use super::window::ENUMERATION_CAP;
use crate::cascades::MeasureModel;
use crate::numeric::log2_sum_exp;
use crate::{Error, Result};

/// Size of `E_μ(j, I) = {w ∈ Σ_j : log2 μ(I_w) / (-j) ∈ I}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoarseCount {
    /// Exact below 2^53, rounded above.
    pub count: f64,
    pub log2_count: f64,
    /// `log2(count) / j`; `-inf` for an empty level set.
    pub logratio: f64,
}

pub fn coarse_counts(m: &MeasureModel, j: usize, interval: (f64, f64)) -> Result<CoarseCount> {
    if j == 0 {
        return Err(Error::Parameter("generation must be at least 1".into()));
    }
    let (lo, hi) = interval;
    let tol = 1e-12;
    let inside = |h: f64| h >= lo - tol && h <= hi + tol;
    let log2_count = match m {
        MeasureModel::Binomial(b) => {
            // All words with N1 ones share the exponent; count them by C(j, N1).
            let terms: Vec<f64> = (0..=j)
                .filter(|&n1| {
                    let n0 = (j - n1) as f64;
                    let h = -(n0 * b.log2_p() + n1 as f64 * b.log2_1mp()) / j as f64;
                    inside(h)
                })
                .map(|n1| ln_binomial(j as u64, n1 as u64) / std::f64::consts::LN_2)
                .collect();
            log2_sum_exp(&terms)
        }
        _ => {
            if j > ENUMERATION_CAP {
                return Err(Error::EnumerationCap { j, cap: ENUMERATION_CAP });
            }
            let n = m
                .log_masses(j)?
                .into_iter()
                .filter(|&l| l > f64::NEG_INFINITY && inside(-l / j as f64))
                .count();
            if n == 0 {
                f64::NEG_INFINITY
            } else {
                (n as f64).log2()
            }
        }
    };
    let count = if log2_count < 53.0 { log2_count.exp2().round() } else { log2_count.exp2() };
    Ok(CoarseCount { count, log2_count, logratio: log2_count / j as f64 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascades::sample_environment;
    use std::sync::Arc;

    #[test]
    fn uniform_measure_counts_everything() {
        let u = MeasureModel::binomial(0.5).unwrap();
        let c = coarse_counts(&u, 20, (0.9, 1.1)).unwrap();
        assert_eq!(c.count, (1u64 << 20) as f64);
        assert!((c.logratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_level_set() {
        let b = MeasureModel::binomial(0.25).unwrap();
        let c = coarse_counts(&b, 30, (2.5, 3.0)).unwrap();
        assert_eq!(c.count, 0.0);
        assert_eq!(c.logratio, f64::NEG_INFINITY);
    }

    #[test]
    fn entropy_window_at_sixteen_generations() {
        // Only N0 = 4 lands in H_e ± 0.05 at j = 16, so the count is C(16, 4).
        let b = MeasureModel::binomial(0.25).unwrap();
        let r = crate::closedform::binomial_range(0.25).unwrap();
        let c = coarse_counts(&b, 16, (r.h_e - 0.05, r.h_e + 0.05)).unwrap();
        assert_eq!(c.count, 1820.0);
    }

    #[test]
    fn approaches_spectrum_sup() {
        let p = 0.25;
        let b = MeasureModel::binomial(p).unwrap();
        let r = crate::closedform::binomial_range(p).unwrap();
        let (lo, hi) = (r.h_e - 0.05, r.h_e + 0.05);
        let bp = crate::cascades::BinomialParams::new(p).unwrap();
        let sup = (0..=1000).map(|i| bp.spectrum(lo + (hi - lo) * i as f64 / 1000.0)).fold(f64::NEG_INFINITY, f64::max);
        let c = coarse_counts(&b, 4000, (lo, hi)).unwrap();
        assert!((c.logratio - sup).abs() < 0.01, "{} vs {sup}", c.logratio);
    }

    #[test]
    fn enumeration_path_agrees_with_binomial_formula() {
        let b = MeasureModel::binomial(0.3).unwrap();
        let env = Arc::new(sample_environment(1.0, 0, 20).unwrap());
        let s = MeasureModel::switched(0.3, 0.9, env).unwrap();
        for iv in [(0.6, 1.0), (1.0, 1.5), (0.0, 3.0)] {
            let a = coarse_counts(&b, 14, iv).unwrap();
            let e = coarse_counts(&s, 14, iv).unwrap();
            assert_eq!(a.count, e.count);
        }
    }
}
