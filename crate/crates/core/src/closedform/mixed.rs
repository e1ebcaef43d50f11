use serde::{Deserialize, Serialize};

use super::bivariate::{BivariateCaseParams, CaseTag};
use crate::numeric::golden_max;
use crate::Result;

const GOLDEN_TOL: f64 = 1e-10;
/// Feasible α-intervals shorter than this (negative length) are empty.
const EMPTY_TOL: f64 = 1e-14;

/// Closed interval built up from linear constraints on α.
#[derive(Clone, Copy, Debug)]
struct AlphaInterval {
    lo: f64,
    hi: f64,
}

impl AlphaInterval {
    fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    fn within(mut self, lo: f64, hi: f64) -> Self {
        self.lo = self.lo.max(lo);
        self.hi = self.hi.min(hi);
        self
    }

    /// Intersects with `{α : a·α ≥ b}`.
    fn at_least(self, a: f64, b: f64) -> Self {
        if a > 0.0 {
            self.within(b / a, f64::INFINITY)
        } else if a < 0.0 {
            self.within(f64::NEG_INFINITY, b / a)
        } else if b <= 0.0 {
            self
        } else {
            Self::new(1.0, 0.0)
        }
    }

    fn is_empty(&self) -> bool {
        self.hi - self.lo < -EMPTY_TOL
    }
}

impl BivariateCaseParams {
    fn maximize(&self, iv: AlphaInterval, beta: impl Fn(f64) -> f64) -> f64 {
        if iv.is_empty() {
            return f64::NEG_INFINITY;
        }
        let (lo, hi) = (iv.lo.min(iv.hi), iv.hi.max(iv.lo));
        let f = |a: f64| self.f_eta(a, beta(a));
        if hi - lo <= EMPTY_TOL {
            return f(0.5 * (lo + hi));
        }
        golden_max(f, lo, hi, GOLDEN_TOL).1
    }

    /// Largest `F_η` over the realizations of system (S1): `H1 = ηα + (1-η)β`
    /// and `H2 ≤ ηα + (1-η)G(β)`.
    pub fn d1(&self, h1: f64, h2: f64) -> f64 {
        let (lo, hi) = (self.range1().h_min, self.range1().h_max);
        let e = self.eta();
        let tol = 1e-12;
        if e == 0.0 {
            let ok = h1 >= lo - tol && h1 <= hi + tol && h2 <= self.g(h1) + tol;
            return if ok { self.mu1().spectrum(h1) } else { f64::NEG_INFINITY };
        }
        if e == 1.0 {
            let ok = h1 >= lo - tol && h1 <= hi + tol && h2 <= h1 + tol;
            return if ok { self.mu1().spectrum(h1) } else { f64::NEG_INFINITY };
        }
        let k = self.kappa();
        let c = self.g(0.0);
        let iv = AlphaInterval::new(lo, hi)
            .within((h1 - (1.0 - e) * hi) / e, (h1 - (1.0 - e) * lo) / e)
            .at_least(e * (1.0 - k), h2 - k * h1 - (1.0 - e) * c);
        self.maximize(iv, |a| (h1 - e * a) / (1.0 - e))
    }

    /// Largest `F_η` over the realizations of system (S2): `H2 = ηα + (1-η)G(β)`
    /// and `H1 ≤ ηα + (1-η)β`.
    pub fn d2(&self, h1: f64, h2: f64) -> f64 {
        let (lo, hi) = (self.range1().h_min, self.range1().h_max);
        let e = self.eta();
        let tol = 1e-12;
        if e == 0.0 {
            let b = self.g_inv(h2);
            let ok = b >= lo - tol && b <= hi + tol && h1 <= b + tol;
            return if ok { self.mu1().spectrum(b) } else { f64::NEG_INFINITY };
        }
        if e == 1.0 {
            let ok = h2 >= lo - tol && h2 <= hi + tol && h1 <= h2 + tol;
            return if ok { self.mu1().spectrum(h2) } else { f64::NEG_INFINITY };
        }
        let k = self.kappa();
        let c = self.g(0.0);
        // β(α) = A + Bα solves G(β) = (H2 - ηα)/(1-η).
        let big_a = (h2 / (1.0 - e) - c) / k;
        let big_b = -e / ((1.0 - e) * k);
        let iv = AlphaInterval::new(lo, hi)
            .at_least(big_b, lo - big_a)
            .at_least(-big_b, big_a - hi)
            .at_least(e + (1.0 - e) * big_b, h1 - (1.0 - e) * big_a);
        self.maximize(iv, |a| big_a + big_b * a)
    }

    /// Bivariate spectrum of `(μ_{p1}, ν_η)` in the mixed case.
    pub fn spectrum_mixed(&self, h1: f64, h2: f64) -> Result<f64> {
        let p2 = self.pentagon_p2()?;
        if !p2.contains((h1, h2), 1e-12) {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(self.d1(h1, h2).min(self.d2(h1, h2)))
    }

    /// Spectrum of `(μ_{p1}, ν_η)` for whichever case the parameters fall in.
    pub fn spectrum(&self, h1: f64, h2: f64) -> f64 {
        match self.case() {
            CaseTag::SameSide => self.spectrum_same_side(h1, h2),
            CaseTag::Mixed => self.spectrum_mixed(h1, h2),
        }
        .expect("case dispatched")
    }

    /// `D_{ν_η}(H)` through the Legendre parametrisation `q_H`.
    pub fn spectrum_nu_eta(&self, h: f64) -> NuEtaSolution {
        let (m1, m2) = (self.mu1(), self.mu2());
        let e = self.eta();
        let phi = |q: f64| e * m1.tau_deriv(q) + (1.0 - e) * m2.tau_deriv(q);
        let (hmin, hmax) = (self.h_eta_min(), self.h_eta_max());
        let end = 1e-13 * (1.0 + hmax);
        if h < hmin - end || h > hmax + end {
            return NuEtaSolution { q: f64::NAN, residual: f64::NAN, value: f64::NEG_INFINITY };
        }
        if (h - hmin).abs() <= end {
            return NuEtaSolution { q: f64::INFINITY, residual: 0.0, value: 0.0 };
        }
        if (h - hmax).abs() <= end {
            return NuEtaSolution { q: f64::NEG_INFINITY, residual: 0.0, value: 0.0 };
        }
        // φ decreases from H_{η,max} to H_{η,min}.
        let (mut lo, mut hi) = (-64.0f64, 64.0f64);
        while phi(lo) < h && lo > -1e300 {
            lo *= 2.0;
        }
        while phi(hi) > h && hi < 1e300 {
            hi *= 2.0;
        }
        let mut q = 0.5 * (lo + hi);
        for _ in 0..2000 {
            q = 0.5 * (lo + hi);
            let r = phi(q) - h;
            if r.abs() <= 1e-14 || q == lo || q == hi {
                break;
            }
            if r > 0.0 {
                lo = q;
            } else {
                hi = q;
            }
        }
        let value = e * m1.spectrum(m1.tau_deriv(q)) + (1.0 - e) * m2.spectrum(m2.tau_deriv(q));
        NuEtaSolution { q, residual: (phi(q) - h).abs(), value }
    }
}

/// Result of the `q_H` solve behind `D_{ν_η}(H)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NuEtaSolution {
    pub q: f64,
    pub residual: f64,
    pub value: f64,
}

pub fn spectrum_mixed(params: &BivariateCaseParams, h1: f64, h2: f64) -> Result<f64> {
    params.spectrum_mixed(h1, h2)
}

pub fn spectrum_nu_eta(params: &BivariateCaseParams, h: f64) -> f64 {
    params.spectrum_nu_eta(h).value
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> BivariateCaseParams {
        BivariateCaseParams::new(0.27, 0.8, 0.5).unwrap()
    }

    #[test]
    fn vanishes_at_p2_vertices() {
        for eta in [0.2, 0.5, 0.8] {
            let c = BivariateCaseParams::new(0.27, 0.8, eta).unwrap();
            for &v in &c.pentagon_p2().unwrap().vertices {
                let d = c.spectrum_mixed(v.0, v.1).unwrap();
                assert!(d.abs() < 1e-6, "eta={eta} vertex {v:?}: {d}");
            }
        }
    }

    #[test]
    fn eta_zero_specialisation() {
        let c = BivariateCaseParams::new(0.27, 0.8, 0.0).unwrap();
        let r = c.range1();
        let d = c.mu1();
        for i in 1..20 {
            for k in 1..20 {
                let h1 = r.h_min + (r.h_max - r.h_min) * i as f64 / 20.0;
                let h2 = c.range2().h_min + (c.range2().h_max - c.range2().h_min) * k as f64 / 20.0;
                let got = c.spectrum_mixed(h1, h2).unwrap();
                let inside = h1 <= c.g_inv(h2) + 1e-12;
                let want = if inside { d.spectrum(h1).min(d.spectrum(c.g_inv(h2))) } else { f64::NEG_INFINITY };
                if want.is_finite() {
                    assert!((got - want).abs() < 1e-9, "({h1},{h2}) {got} {want}");
                } else {
                    assert_eq!(got, f64::NEG_INFINITY);
                }
            }
        }
    }

    #[test]
    fn golden_section_matches_scan() {
        let c = reference();
        let p2 = c.pentagon_p2().unwrap();
        let ((x0, x1), (y0, y1)) = p2.bounding_box();
        for i in 1..8 {
            for k in 1..8 {
                let (h1, h2) = (x0 + (x1 - x0) * i as f64 / 8.0, y0 + (y1 - y0) * k as f64 / 8.0);
                if !p2.contains((h1, h2), 0.0) {
                    continue;
                }
                let e = c.eta();
                let r = c.range1();
                let feasible = |a: f64| {
                    let b = (h1 - e * a) / (1.0 - e);
                    a >= r.h_min && a <= r.h_max && b >= r.h_min && b <= r.h_max && h2 <= e * a + (1.0 - e) * c.g(b)
                };
                // The feasible set is an interval; locate its ends by bisection
                // from a coarse feasible point, then scan F across it.
                let Some(seed) = (0..=10_000)
                    .map(|s| r.h_min + (r.h_max - r.h_min) * s as f64 / 10_000.0)
                    .find(|&a| feasible(a))
                else {
                    continue;
                };
                let edge = |mut inside: f64, mut outside: f64| {
                    for _ in 0..200 {
                        let m = 0.5 * (inside + outside);
                        if feasible(m) {
                            inside = m;
                        } else {
                            outside = m;
                        }
                    }
                    inside
                };
                let lo = if feasible(r.h_min) { r.h_min } else { edge(seed, r.h_min) };
                let hi = if feasible(r.h_max) { r.h_max } else { edge(seed, r.h_max) };
                let hi = if feasible(hi) { hi } else { seed };
                let mut best = f64::NEG_INFINITY;
                for s in 0..=10_000 {
                    let a = lo + (hi - lo) * s as f64 / 10_000.0;
                    best = best.max(c.f_eta(a, (h1 - e * a) / (1.0 - e)));
                }
                let d1 = c.d1(h1, h2);
                if best.is_finite() {
                    assert!(d1 >= best - 1e-9 && d1 - best < 1e-6, "{d1} vs scan {best}");
                }
            }
        }
    }

    #[test]
    fn nu_eta_landmarks() {
        let c = reference();
        let (r1, r2) = (c.range1(), c.range2());
        let e = c.eta();
        let s = c.spectrum_nu_eta(e * r1.h_s + (1.0 - e) * r2.h_s);
        assert!((s.value - 1.0).abs() < 1e-9 && s.q.abs() < 1e-9);
        let he = e * r1.h_e + (1.0 - e) * r2.h_e;
        let s = c.spectrum_nu_eta(he);
        assert!((s.value - he).abs() < 1e-9 && (s.q - 1.0).abs() < 1e-9);
        assert!(c.spectrum_nu_eta(c.h_eta_min()).value.abs() < 1e-6);
        assert!(c.spectrum_nu_eta(c.h_eta_max()).value.abs() < 1e-6);
        assert_eq!(c.spectrum_nu_eta(c.h_eta_max() + 0.1).value, f64::NEG_INFINITY);
    }

    #[test]
    fn marginal_sup_is_nu_eta_spectrum() {
        let c = reference();
        let r = c.range1();
        for k in 1..10 {
            let h2 = c.h_eta_min() + (c.h_eta_max() - c.h_eta_min()) * k as f64 / 10.0;
            let sup = (0..=4000)
                .map(|i| r.h_min + (r.h_max - r.h_min) * i as f64 / 4000.0)
                .map(|h1| c.spectrum_mixed(h1, h2).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            let nu = c.spectrum_nu_eta(h2).value;
            assert!((sup - nu).abs() < 1e-3, "H2={h2}: {sup} vs {nu}");
        }
    }
}
