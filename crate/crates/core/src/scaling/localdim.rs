use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cascades::MeasureModel;
use crate::dyadic::Word;
use crate::numeric::log2_add;
use crate::{Error, Result};

/// An eventually periodic binary expansion, written `prefix(period)`, e.g.
/// `(0)` for `x = 0` or `1(001)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSpec {
    pub prefix: Word,
    pub period: Word,
}

impl PointSpec {
    pub fn new(prefix: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Parse("the period must be nonempty".into()));
        }
        Ok(Self { prefix, period })
    }

    /// Digit at 1-based position `l`.
    pub fn digit(&self, l: usize) -> u8 {
        let p = self.prefix.len();
        if l <= p {
            self.prefix.letter(l)
        } else {
            self.period.letter((l - p - 1) % self.period.len() + 1)
        }
    }
}

impl FromStr for PointSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (prefix, rest) = s.split_once('(').ok_or_else(|| Error::Parse(format!("expected prefix(period), got {s:?}")))?;
        let period = rest.strip_suffix(')').ok_or_else(|| Error::Parse(format!("unclosed period in {s:?}")))?;
        Self::new(prefix.parse()?, period.parse()?)
    }
}

impl fmt::Display for PointSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.prefix, self.period)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalDimTrace {
    pub point: String,
    /// `slopes[j-1] = log2 μ(Ĩ_j(x)) / (-j)` over the three-cell window.
    pub slopes: Vec<f64>,
    /// `tail_inf[j-1] = min { slopes[k-1] : ⌈j/2⌉ ≤ k ≤ j }`.
    pub tail_inf: Vec<f64>,
}

impl LocalDimTrace {
    pub fn last(&self) -> f64 {
        *self.slopes.last().expect("nonempty trace")
    }

    pub fn liminf_estimate(&self) -> f64 {
        *self.tail_inf.last().expect("nonempty trace")
    }
}

/// Slopes of the window mass along the expansion of `x`, for product-form models.
pub fn local_dim_trace(m: &MeasureModel, x: &PointSpec, j_max: usize) -> Result<LocalDimTrace> {
    if !m.is_product_form() {
        return Err(Error::NotProductForm);
    }
    if j_max == 0 {
        return Err(Error::Parameter("j_max must be at least 1".into()));
    }
    m.check_depth(j_max)?;
    // lam[k] = Σ_{ℓ≤k} (log2 f_ℓ(0) - log2 f_ℓ(1)).
    let mut lam = vec![0.0; j_max + 1];
    let mut lam_at = vec![0.0; j_max + 1];
    let mut slopes = Vec::with_capacity(j_max);
    let mut log_m = 0.0;
    let (mut last0, mut last1) = (0usize, 0usize);
    for j in 1..=j_max {
        let (a, b) = m.generation_factors(j)?;
        lam_at[j] = a - b;
        lam[j] = lam[j - 1] + lam_at[j];
        let d = x.digit(j);
        log_m += if d == 0 { a } else { b };
        let (minus, plus) = if d == 1 {
            last1 = j;
            let l0 = last0;
            let plus = (l0 > 0).then(|| -lam_at[l0] + (lam[j] - lam[l0]));
            (Some(lam_at[j]), plus)
        } else {
            last0 = j;
            let l0 = last1;
            let minus = (l0 > 0).then(|| lam_at[l0] - (lam[j] - lam[l0]));
            (minus, Some(-lam_at[j]))
        };
        let mut w = 0.0;
        for r in [minus, plus].into_iter().flatten() {
            w = log2_add(w, r);
        }
        slopes.push(-(log_m + w) / j as f64);
    }
    Ok(LocalDimTrace { point: x.to_string(), tail_inf: tail_minimum(&slopes), slopes })
}

/// Sliding minimum over `[⌈j/2⌉, j]`; both ends only move right.
fn tail_minimum(s: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(s.len());
    let mut dq: VecDeque<usize> = VecDeque::new();
    for j in 1..=s.len() {
        while dq.back().is_some_and(|&k| s[k - 1] >= s[j - 1]) {
            dq.pop_back();
        }
        dq.push_back(j);
        let start = j.div_ceil(2);
        while dq.front().is_some_and(|&k| k < start) {
            dq.pop_front();
        }
        out.push(s[dq[0] - 1]);
    }
    out
}
