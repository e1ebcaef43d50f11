use serde::{Deserialize, Serialize};

use crate::cascades::BinomialParams;
use crate::numeric::{entropy2, log2_add};
use crate::Result;

/// Exponent landmarks of `μ_p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinomialRange {
    pub h_min: f64,
    pub h_max: f64,
    /// Entropy exponent.
    pub h_e: f64,
    /// Centre of the support, where the spectrum peaks.
    pub h_s: f64,
}

impl BinomialParams {
    /// `τ_p(q) = -log2(p^q + (1-p)^q)`.
    pub fn tau(&self, q: f64) -> f64 {
        -log2_add(q * self.log2_p(), q * self.log2_1mp())
    }

    pub fn tau_deriv(&self, q: f64) -> f64 {
        let (a, b) = (q * self.log2_p(), q * self.log2_1mp());
        let l = log2_add(a, b);
        let (wa, wb) = ((a - l).exp2(), (b - l).exp2());
        -(wa * self.log2_p() + wb * self.log2_1mp())
    }

    pub fn range(&self) -> BinomialRange {
        let a = -self.log2_p();
        let b = -self.log2_1mp();
        let (h_min, h_max) = if a >= b { (b, a) } else { (a, b) };
        BinomialRange { h_min, h_max, h_e: entropy2(self.p()), h_s: 0.5 * (h_min + h_max) }
    }

    /// `D_{μ_p}(H)`, `-inf` off the support.
    pub fn spectrum(&self, h: f64) -> f64 {
        const TOL: f64 = 1e-12;
        let a = -self.log2_p();
        let b = -self.log2_1mp();
        if (a - b).abs() < 1e-15 {
            return if (h - 1.0).abs() <= TOL { 1.0 } else { f64::NEG_INFINITY };
        }
        // H = γa + (1-γ)b, γ being the frequency of the letter 0.
        let g = (h - b) / (a - b);
        if !(-TOL..=1.0 + TOL).contains(&g) {
            return f64::NEG_INFINITY;
        }
        entropy2(g.clamp(0.0, 1.0))
    }
}

pub fn tau_binomial(p: f64, q: f64) -> Result<f64> {
    Ok(BinomialParams::new(p)?.tau(q))
}

pub fn tau_binomial_deriv(p: f64, q: f64) -> Result<f64> {
    Ok(BinomialParams::new(p)?.tau_deriv(q))
}

pub fn binomial_range(p: f64) -> Result<BinomialRange> {
    Ok(BinomialParams::new(p)?.range())
}

pub fn binomial_spectrum(p: f64, h: f64) -> Result<f64> {
    Ok(BinomialParams::new(p)?.spectrum(h))
}
