//! `τ_{m1,m2,j}` with three-cell windows `3I`, by enumeration and by a
//! run-length dynamic program for product-form pairs.

use rayon::prelude::*;

use super::tilde::pair_factors;
use crate::cascades::MeasureModel;
use crate::numeric::{log2_add, log2_sum_exp_pairwise};
use crate::{Error, Result};

/// Default refusal threshold of the enumeration path (2^24 cells).
pub const ENUMERATION_CAP: usize = 24;

const CHUNK: usize = 1 << 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cells {
    /// `m(3I_w) = m(I_w⁻) + m(I_w) + m(I_w⁺)`.
    Windows,
    /// `m(I_w)` alone.
    Plain,
}

/// log2 masses of every cell (or window) of one generation for both measures,
/// ready to be raised to many `(q1, q2)`.
#[derive(Clone, Debug)]
pub struct EnumeratedSums {
    j: usize,
    w1: Vec<f64>,
    w2: Vec<f64>,
}

fn windows(m: &[f64]) -> Vec<f64> {
    let n = m.len();
    (0..n)
        .into_par_iter()
        .map(|k| {
            let mut v = m[k];
            if k > 0 {
                v = log2_add(v, m[k - 1]);
            }
            if k + 1 < n {
                v = log2_add(v, m[k + 1]);
            }
            v
        })
        .collect()
}

impl EnumeratedSums {
    pub fn new(m1: &MeasureModel, m2: &MeasureModel, j: usize, cells: Cells, cap: usize) -> Result<Self> {
        if j > cap {
            return Err(Error::EnumerationCap { j, cap });
        }
        if j == 0 {
            return Err(Error::Parameter("generation must be at least 1".into()));
        }
        let (a, b) = (m1.log_masses(j)?, m2.log_masses(j)?);
        let (w1, w2) = match cells {
            Cells::Windows => (windows(&a), windows(&b)),
            Cells::Plain => (a, b),
        };
        Ok(Self { j, w1, w2 })
    }

    /// `-(1/j) log2 Σ_w m1(·)^{q1} m2(·)^{q2}`; zero masses contribute nothing.
    pub fn tau(&self, q1: f64, q2: f64) -> f64 {
        let term = |x: f64, y: f64| {
            if x == f64::NEG_INFINITY || y == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else {
                q1 * x + q2 * y
            }
        };
        // Fixed chunk boundaries keep the reduction order independent of threads.
        let partial: Vec<f64> = self
            .w1
            .par_chunks(CHUNK)
            .zip(self.w2.par_chunks(CHUNK))
            .map(|(c1, c2)| {
                let t: Vec<f64> = c1.iter().zip(c2).map(|(&x, &y)| term(x, y)).collect();
                log2_sum_exp_pairwise(&t)
            })
            .collect();
        -log2_sum_exp_pairwise(&partial) / self.j as f64
    }
}

pub fn tau3_enumerated(m1: &MeasureModel, m2: &MeasureModel, j: usize, q1: f64, q2: f64) -> Result<f64> {
    Ok(EnumeratedSums::new(m1, m2, j, Cells::Windows, ENUMERATION_CAP)?.tau(q1, q2))
}

/// `τ̃` by enumeration; the only route for the counterexample pair.
pub fn tilde_tau_enumerated(m1: &MeasureModel, m2: &MeasureModel, j: usize, q1: f64, q2: f64) -> Result<f64> {
    Ok(EnumeratedSums::new(m1, m2, j, Cells::Plain, ENUMERATION_CAP)?.tau(q1, q2))
}

/// Exact windowed sums for product-form pairs.
///
/// Every word of length `j` either ends with `0 1^r` (or is `1^j`) or ends with
/// `1 0^s` (or is `0^j`). Within such a class both neighbor ratios
/// `m(I_w^±)/m(I_w)` are fixed, since a neighbor only flips the trailing run and
/// the letter before it. The sum therefore splits into `2j` classes, each a
/// free prefix (a product of per-generation sums) times a fixed suffix.
#[derive(Clone, Debug)]
pub struct RunLengthDp {
    /// Per generation `[a, b, c, d]` as in `tilde_tau_exact`.
    f: Vec<[f64; 4]>,
    /// Suffix sums of `λ_ℓ = a_ℓ - b_ℓ` and `c_ℓ - d_ℓ`: `lam[k] = Σ_{ℓ>k}`.
    lam1: Vec<f64>,
    lam2: Vec<f64>,
}

impl RunLengthDp {
    pub fn new(m1: &MeasureModel, m2: &MeasureModel, j: usize) -> Result<Self> {
        let f = pair_factors(m1, m2, j)?;
        let mut lam1 = vec![0.0; j + 1];
        let mut lam2 = vec![0.0; j + 1];
        for k in (0..j).rev() {
            let [a, b, c, d] = f[k];
            lam1[k] = lam1[k + 1] + (a - b);
            lam2[k] = lam2[k + 1] + (c - d);
        }
        Ok(Self { f, lam1, lam2 })
    }

    pub fn j(&self) -> usize {
        self.f.len()
    }

    pub fn tau(&self, q1: f64, q2: f64) -> f64 {
        let j = self.f.len();
        // 1-based generation ℓ lives at index ℓ-1.
        let t0 = |l: usize| q1 * self.f[l - 1][0] + q2 * self.f[l - 1][2];
        let t1 = |l: usize| q1 * self.f[l - 1][1] + q2 * self.f[l - 1][3];
        let lam = |l: usize| (self.f[l - 1][0] - self.f[l - 1][1], self.f[l - 1][2] - self.f[l - 1][3]);
        let tail = |k: usize| (self.lam1[k], self.lam2[k]);

        let mut prefix = vec![0.0; j + 1];
        let mut suf0 = vec![0.0; j + 1];
        let mut suf1 = vec![0.0; j + 1];
        for l in 1..=j {
            prefix[l] = prefix[l - 1] + log2_add(t0(l), t1(l));
        }
        for k in (0..j).rev() {
            suf0[k] = suf0[k + 1] + t0(k + 1);
            suf1[k] = suf1[k + 1] + t1(k + 1);
        }
        let window = |minus: Option<f64>, plus: Option<f64>| {
            let mut v = 0.0;
            if let Some(m) = minus {
                v = log2_add(v, m);
            }
            if let Some(p) = plus {
                v = log2_add(v, p);
            }
            v
        };
        let (lj1, lj2) = lam(j);
        let mut terms = Vec::with_capacity(2 * j);
        // Words ending in a run of r ones.
        for r in 1..=j {
            let l0 = j - r;
            let (log_s, plus) = if l0 == 0 {
                (suf1[0], None)
            } else {
                let (a1, a2) = lam(l0);
                let (s1, s2) = tail(l0);
                (prefix[l0 - 1] + t0(l0) + suf1[l0], Some((s1 - a1, s2 - a2)))
            };
            let w1 = window(Some(lj1), plus.map(|p| p.0));
            let w2 = window(Some(lj2), plus.map(|p| p.1));
            terms.push(log_s + q1 * w1 + q2 * w2);
        }
        // Words ending in a run of s zeros.
        for s in 1..=j {
            let l0 = j - s;
            let (log_s, minus) = if l0 == 0 {
                (suf0[0], None)
            } else {
                let (a1, a2) = lam(l0);
                let (s1, s2) = tail(l0);
                (prefix[l0 - 1] + t1(l0) + suf0[l0], Some((a1 - s1, a2 - s2)))
            };
            let w1 = window(minus.map(|m| m.0), Some(-lj1));
            let w2 = window(minus.map(|m| m.1), Some(-lj2));
            terms.push(log_s + q1 * w1 + q2 * w2);
        }
        -log2_sum_exp_pairwise(&terms) / j as f64
    }
}

pub fn tau3_dp(m1: &MeasureModel, m2: &MeasureModel, j: usize, q1: f64, q2: f64) -> Result<f64> {
    Ok(RunLengthDp::new(m1, m2, j)?.tau(q1, q2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascades::{sample_environment, ModelSpec};
    use std::sync::Arc;

    #[test]
    fn counting_gives_minus_one() {
        let m1 = MeasureModel::binomial(0.1).unwrap();
        let m2 = MeasureModel::binomial(0.7).unwrap();
        for j in [1, 5, 12] {
            assert!((tau3_enumerated(&m1, &m2, j, 0.0, 0.0).unwrap() + 1.0).abs() < 1e-14);
            assert!((tau3_dp(&m1, &m2, j, 0.0, 0.0).unwrap() + 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn uniform_windows_by_hand() {
        // j = 2, μ_{1/2}: windows 2/4, 3/4, 3/4, 2/4; squared and summed twice over.
        let u = MeasureModel::binomial(0.5).unwrap();
        let s: f64 = 2.0 * (0.5f64.powi(2) * 0.5f64.powi(2)) + 2.0 * (0.75f64.powi(2) * 0.75f64.powi(2));
        let want = -s.log2() / 2.0;
        assert!((tau3_enumerated(&u, &u, 2, 2.0, 2.0).unwrap() - want).abs() < 1e-14);
        // q1 = q2 = 1 sums squared windows: (2² + 3² + 3² + 2²)/16.
        let want = -((4.0 + 9.0 + 9.0 + 4.0) / 16.0f64).log2() / 2.0;
        assert!((tau3_enumerated(&u, &u, 2, 1.0, 1.0).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn enumeration_cap_is_enforced() {
        let m = MeasureModel::binomial(0.3).unwrap();
        assert!(matches!(tau3_enumerated(&m, &m, 25, 1.0, 1.0), Err(Error::EnumerationCap { j: 25, cap: 24 })));
    }

    #[test]
    fn dp_matches_enumeration_on_small_generations() {
        let env = Arc::new(sample_environment(0.5, 99, 16).unwrap());
        let pairs = [
            (MeasureModel::binomial(0.1).unwrap(), MeasureModel::switched(0.1, 0.4, env.clone()).unwrap()),
            (MeasureModel::binomial(0.27).unwrap(), MeasureModel::switched(0.27, 0.8, env).unwrap()),
            (MeasureModel::binomial(0.35).unwrap(), MeasureModel::binomial(0.9).unwrap()),
        ];
        for (m1, m2) in &pairs {
            for j in 1..=12 {
                let e = EnumeratedSums::new(m1, m2, j, Cells::Windows, ENUMERATION_CAP).unwrap();
                let dp = RunLengthDp::new(m1, m2, j).unwrap();
                for &(q1, q2) in &[(-5.0, 5.0), (2.0, 3.0), (-1.5, -2.5), (0.5, 0.0)] {
                    let (a, b) = (e.tau(q1, q2), dp.tau(q1, q2));
                    assert!((a - b).abs() <= 1e-11 * a.abs().max(1.0), "j={j} q=({q1},{q2}): {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn counterexample_cells_match_profile() {
        let s = crate::cascades::build_counterexample_schedule(1).unwrap();
        let nu1 = ModelSpec::Counterexample { n_max: 1, index: 1 }.build().unwrap();
        let nu2 = ModelSpec::Counterexample { n_max: 1, index: 2 }.build().unwrap();
        for j in [2, 10, 20] {
            for &(q1, q2) in &[(0.0, 0.0), (2.0, -1.0), (-3.0, 3.0)] {
                let e = tilde_tau_enumerated(&nu1, &nu2, j, q1, q2).unwrap();
                let p = crate::cascades::counterexample_tau(&s, j as u128, q1, q2).unwrap();
                assert!((e - p).abs() < 1e-12);
            }
        }
    }
}
