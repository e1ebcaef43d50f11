use serde::{Deserialize, Serialize};

use super::regions::{RegionKind, SupportRegion};
use super::BinomialRange;
use crate::cascades::BinomialParams;
use crate::numeric::log2_add;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseTag {
    /// `p1` and `p2` on the same side of 1/2 (κ > 0).
    SameSide,
    /// `p1` and `p2` on opposite sides of 1/2 (κ < 0).
    Mixed,
}

/// `κ`, the slope of `G`.
pub fn kappa(p1: f64, p2: f64) -> Result<f64> {
    let (b1, b2) = (BinomialParams::new(p1)?, BinomialParams::new(p2)?);
    if p1 == 0.5 {
        return Err(Error::Parameter("kappa is undefined for p1 = 1/2".into()));
    }
    Ok((-b2.log2_p() + b2.log2_1mp()) / (-b1.log2_p() + b1.log2_1mp()))
}

/// `G(H) = κ(H + log2(1-p1)) - log2(1-p2)`: the `μ_{p2}` exponent of the cells
/// whose `μ_{p1}` exponent is `H`.
pub fn g_map(p1: f64, p2: f64, h: f64) -> Result<f64> {
    let k = kappa(p1, p2)?;
    Ok(k * (h + (1.0 - p1).log2()) - (1.0 - p2).log2())
}

/// `T(q1, q2) = -log2(p1^q1 p2^q2 + (1-p1)^q1 (1-p2)^q2)`.
pub fn big_t(p1: f64, p2: f64, q1: f64, q2: f64) -> f64 {
    -log2_add(q1 * p1.log2() + q2 * p2.log2(), q1 * (1.0 - p1).log2() + q2 * (1.0 - p2).log2())
}

/// Parameters `(p1, p2, η)` of the pair `(μ_{p1}, ν_η)` with derived constants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCase", into = "RawCase")]
pub struct BivariateCaseParams {
    p1: f64,
    p2: f64,
    eta: f64,
    kappa: f64,
    g_intercept: f64,
    case: CaseTag,
    r1: BinomialRange,
    r2: BinomialRange,
}

#[derive(Serialize, Deserialize)]
struct RawCase {
    p1: f64,
    p2: f64,
    eta: f64,
}

impl TryFrom<RawCase> for BivariateCaseParams {
    type Error = Error;
    fn try_from(r: RawCase) -> Result<Self> {
        Self::new(r.p1, r.p2, r.eta)
    }
}

impl From<BivariateCaseParams> for RawCase {
    fn from(c: BivariateCaseParams) -> Self {
        RawCase { p1: c.p1, p2: c.p2, eta: c.eta }
    }
}

impl BivariateCaseParams {
    pub fn new(p1: f64, p2: f64, eta: f64) -> Result<Self> {
        let (b1, b2) = (BinomialParams::new(p1)?, BinomialParams::new(p2)?);
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::Parameter(format!("eta = {eta} outside [0, 1]")));
        }
        if p1 == 0.5 || p2 == 0.5 {
            return Err(Error::Parameter("the case split needs p1 != 1/2 and p2 != 1/2".into()));
        }
        let k = kappa(p1, p2)?;
        let case = if k > 0.0 { CaseTag::SameSide } else { CaseTag::Mixed };
        Ok(Self {
            p1,
            p2,
            eta,
            kappa: k,
            g_intercept: k * (1.0 - p1).log2() - (1.0 - p2).log2(),
            case,
            r1: b1.range(),
            r2: b2.range(),
        })
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }
    pub fn p2(&self) -> f64 {
        self.p2
    }
    pub fn eta(&self) -> f64 {
        self.eta
    }
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn case(&self) -> CaseTag {
        self.case
    }
    pub fn range1(&self) -> BinomialRange {
        self.r1
    }
    pub fn range2(&self) -> BinomialRange {
        self.r2
    }
    pub fn mu1(&self) -> BinomialParams {
        BinomialParams::new(self.p1).expect("validated")
    }
    pub fn mu2(&self) -> BinomialParams {
        BinomialParams::new(self.p2).expect("validated")
    }

    pub fn h_eta_min(&self) -> f64 {
        self.eta * self.r1.h_min + (1.0 - self.eta) * self.r2.h_min
    }

    pub fn h_eta_max(&self) -> f64 {
        self.eta * self.r1.h_max + (1.0 - self.eta) * self.r2.h_max
    }

    pub fn g(&self, h: f64) -> f64 {
        self.kappa * h + self.g_intercept
    }

    pub fn g_inv(&self, h2: f64) -> f64 {
        (h2 - self.g_intercept) / self.kappa
    }

    pub fn t(&self, q1: f64, q2: f64) -> f64 {
        big_t(self.p1, self.p2, q1, q2)
    }

    /// `T^η = η τ_{p1}(q1+q2) + (1-η) T(q1,q2)`.
    pub fn taue(&self, q1: f64, q2: f64) -> f64 {
        self.eta * self.mu1().tau(q1 + q2) + (1.0 - self.eta) * self.t(q1, q2)
    }

    /// `T̃^η = -q1 log2(1-p1) - q2 (η log2 p1 + (1-η) log2 p2)`, as displayed
    /// for `p1 < 1/2 < p2`.
    pub fn tauet(&self, q1: f64, q2: f64) -> f64 {
        -q1 * (1.0 - self.p1).log2() - q2 * (self.eta * self.p1.log2() + (1.0 - self.eta) * self.p2.log2())
    }

    /// `T̃^η` for whichever orientation the parameters have: when `p1 > 1/2`
    /// the digit flip exchanges `p` and `1-p`.
    pub fn tauet_oriented(&self, q1: f64, q2: f64) -> f64 {
        if self.p1 < 0.5 {
            self.tauet(q1, q2)
        } else {
            let e = self.eta;
            -q1 * self.p1.log2() - q2 * (e * (1.0 - self.p1).log2() + (1.0 - e) * (1.0 - self.p2).log2())
        }
    }

    /// `τ_{μ_{p1}, ν_η}`: `T^η` in the same-side case, `min(T^η, T̃^η)` otherwise.
    pub fn tau_closed(&self, q1: f64, q2: f64) -> f64 {
        match self.case {
            CaseTag::SameSide => self.taue(q1, q2),
            CaseTag::Mixed => self.taue(q1, q2).min(self.tauet_oriented(q1, q2)),
        }
    }

    pub fn m_map(&self, alpha: f64, beta: f64) -> (f64, f64) {
        let e = self.eta;
        (e * alpha + (1.0 - e) * beta, e * alpha + (1.0 - e) * self.g(beta))
    }

    /// Solves `M(α, β) = (H1, H2)`; `None` when the solution leaves the square
    /// `[H_{1,min}, H_{1,max}]²`.
    pub fn invert_m(&self, h1: f64, h2: f64) -> Result<Option<(f64, f64)>> {
        let e = self.eta;
        if e <= 0.0 || e >= 1.0 {
            return Err(Error::Degenerate(format!("M is not invertible at eta = {e}")));
        }
        if self.kappa == 1.0 {
            return Err(Error::Degenerate("M is not invertible when kappa = 1".into()));
        }
        let beta = ((h2 - h1) / (1.0 - e) - self.g_intercept) / (self.kappa - 1.0);
        let alpha = (h1 - (1.0 - e) * beta) / e;
        let (lo, hi) = (self.r1.h_min, self.r1.h_max);
        let tol = 1e-9 * (1.0 + hi);
        let inside = |x: f64| x >= lo - tol && x <= hi + tol;
        Ok((inside(alpha) && inside(beta)).then(|| (alpha.clamp(lo, hi), beta.clamp(lo, hi))))
    }

    /// `F_η(α, β) = η D_{p1}(α) + (1-η) D_{p1}(β)`.
    pub fn f_eta(&self, alpha: f64, beta: f64) -> f64 {
        let d = self.mu1();
        let (a, b) = (d.spectrum(alpha), d.spectrum(beta));
        // A zero weight must not turn an off-support coordinate into -inf.
        if self.eta == 0.0 {
            b
        } else if self.eta == 1.0 {
            a
        } else {
            self.eta * a + (1.0 - self.eta) * b
        }
    }

    /// Bivariate spectrum of `(μ_{p1}, ν_η)` in the same-side case.
    pub fn spectrum_same_side(&self, h1: f64, h2: f64) -> Result<f64> {
        self.require(CaseTag::SameSide)?;
        let d = self.mu1();
        let e = self.eta;
        let tol = 1e-12;
        if e == 1.0 {
            return Ok(if (h1 - h2).abs() <= tol { d.spectrum(h1) } else { f64::NEG_INFINITY });
        }
        if e == 0.0 {
            return Ok(if (h2 - self.g(h1)).abs() <= tol { d.spectrum(h1) } else { f64::NEG_INFINITY });
        }
        Ok(match self.invert_m(h1, h2)? {
            Some((a, b)) => self.f_eta(a, b),
            None => f64::NEG_INFINITY,
        })
    }

    /// `P_0^η = M([H_{1,min}, H_{1,max}]²)`, the support of `(T^η)^*`.
    pub fn parallelogram(&self) -> Result<SupportRegion> {
        self.require(CaseTag::SameSide)?;
        Ok(SupportRegion::from_points(RegionKind::Parallelogram, &self.square_image()))
    }

    fn square_image(&self) -> [(f64, f64); 4] {
        let (lo, hi) = (self.r1.h_min, self.r1.h_max);
        [self.m_map(lo, lo), self.m_map(hi, lo), self.m_map(hi, hi), self.m_map(lo, hi)]
    }

    /// Support of the Legendre spectrum in the mixed case.
    pub fn pentagon_p1(&self) -> Result<SupportRegion> {
        self.require(CaseTag::Mixed)?;
        let e = self.eta;
        let mut pts = self.square_image().to_vec();
        pts.push((self.r1.h_min, e * self.r1.h_max + (1.0 - e) * self.r2.h_min));
        Ok(SupportRegion::from_points(RegionKind::PentagonP1, &pts))
    }

    /// Support of the bivariate spectrum in the mixed case.
    pub fn pentagon_p2(&self) -> Result<SupportRegion> {
        self.require(CaseTag::Mixed)?;
        let e = self.eta;
        let (r1, r2) = (self.r1, self.r2);
        let pts = [
            (r1.h_min, self.h_eta_min()),
            (r1.h_min, e * r1.h_min + (1.0 - e) * r2.h_max),
            (e * r1.h_max + (1.0 - e) * r1.h_min, self.h_eta_max()),
            (r1.h_max, e * r1.h_max + (1.0 - e) * r2.h_min),
            (e * r1.h_min + (1.0 - e) * r1.h_max, self.h_eta_min()),
        ];
        Ok(SupportRegion::from_points(RegionKind::PentagonP2, &pts))
    }

    pub(crate) fn require(&self, case: CaseTag) -> Result<()> {
        if self.case == case {
            Ok(())
        } else {
            Err(Error::Case(format!("operation needs the {case:?} case, parameters are {:?}", self.case)))
        }
    }
}

pub fn taue(params: &BivariateCaseParams, q1: f64, q2: f64) -> f64 {
    params.taue(q1, q2)
}

pub fn tauet(params: &BivariateCaseParams, q1: f64, q2: f64) -> f64 {
    params.tauet(q1, q2)
}

pub fn bivariate_tau_closed(params: &BivariateCaseParams, q1: f64, q2: f64) -> f64 {
    params.tau_closed(q1, q2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kappa_examples() {
        assert!((kappa(0.3, 0.3).unwrap() - 1.0).abs() < 1e-15);
        let k = kappa(0.27, 0.8).unwrap();
        assert!((k + 2.0 / (0.73f64 / 0.27).log2()).abs() < 1e-14);
        assert!((k + 1.3937).abs() < 1e-3);
        assert!(kappa(0.5, 0.3).is_err());
        // Identity when p1 = p2.
        assert!((g_map(0.3, 0.3, 1.1).unwrap() - 1.1).abs() < 1e-14);
    }

    #[test]
    fn g_maps_endpoints_to_endpoints() {
        for &(p1, p2) in &[(0.27, 0.8), (0.1, 0.4), (0.7, 0.2), (0.6, 0.9)] {
            let c = BivariateCaseParams::new(p1, p2, 0.5).unwrap();
            let (r1, r2) = (c.range1(), c.range2());
            let ends = [c.g(r1.h_min), c.g(r1.h_max)];
            let (a, b) = if c.kappa() > 0.0 { (r2.h_min, r2.h_max) } else { (r2.h_max, r2.h_min) };
            assert!((ends[0] - a).abs() < 1e-13 && (ends[1] - b).abs() < 1e-13, "{p1} {p2}");
        }
    }

    #[test]
    fn t_family_examples() {
        let c = BivariateCaseParams::new(0.27, 0.8, 0.5).unwrap();
        for &q in &[-3.0, 0.5, 2.0] {
            assert!((c.t(q, 0.0) - c.mu1().tau(q)).abs() < 1e-13);
        }
        let c0 = BivariateCaseParams::new(0.27, 0.8, 0.0).unwrap();
        let c1 = BivariateCaseParams::new(0.27, 0.8, 1.0).unwrap();
        assert!((c0.taue(1.3, -0.4) - c0.t(1.3, -0.4)).abs() < 1e-14);
        assert!((c1.taue(1.3, -0.4) - c1.mu1().tau(0.9)).abs() < 1e-14);
        assert_eq!(c.tauet(0.0, 0.0), 0.0);
        assert!((c.tauet(1.0, 0.0) - c.range1().h_min).abs() < 1e-15);
        assert_eq!(c.case(), CaseTag::Mixed);
        assert!((c.tau_closed(0.0, 0.0) + 1.0).abs() < 1e-15);
        let s = BivariateCaseParams::new(0.1, 0.4, 0.5).unwrap();
        assert_eq!(s.tau_closed(2.0, -1.0), s.taue(2.0, -1.0));
    }

    #[test]
    fn phase_transition_curve_is_nonempty() {
        let c = BivariateCaseParams::new(0.27, 0.8, 0.5).unwrap();
        let diff = |q2: f64| c.taue(20.0, q2) - c.tauet(20.0, q2);
        let (mut lo, mut hi) = (-5.0, 5.0);
        assert!(diff(lo).signum() != diff(hi).signum());
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if diff(mid).signum() == diff(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!(diff(lo).abs() < 1e-9);
    }

    #[test]
    fn m_map_endpoints() {
        let c1 = BivariateCaseParams::new(0.1, 0.4, 1.0).unwrap();
        assert_eq!(c1.m_map(0.7, 1.9), (0.7, 0.7));
        let c0 = BivariateCaseParams::new(0.1, 0.4, 0.0).unwrap();
        assert_eq!(c0.m_map(0.7, 1.9), (1.9, c0.g(1.9)));
        assert!(c0.invert_m(1.0, 1.0).is_err());
    }

    #[test]
    fn same_side_special_points() {
        let c = BivariateCaseParams::new(0.1, 0.4, 0.5).unwrap();
        let r = c.range1();
        let (h1, h2) = c.m_map(r.h_s, r.h_s);
        assert!((c.spectrum_same_side(h1, h2).unwrap() - 1.0).abs() < 1e-9);
        let (h1, h2) = c.m_map(r.h_min, r.h_min);
        assert!(c.spectrum_same_side(h1, h2).unwrap().abs() < 1e-9);
        assert_eq!(c.spectrum_same_side(0.0, 0.0).unwrap(), f64::NEG_INFINITY);
        let mixed = BivariateCaseParams::new(0.27, 0.8, 0.5).unwrap();
        assert!(mixed.spectrum_same_side(1.0, 1.0).is_err());
        assert!(mixed.parallelogram().is_err());
        assert!(c.pentagon_p1().is_err());
    }

    #[test]
    fn parallelogram_edges_have_slopes_one_and_kappa() {
        let c = BivariateCaseParams::new(0.1, 0.4, 0.3).unwrap();
        let p = c.parallelogram().unwrap();
        assert_eq!(p.vertices.len(), 4);
        let mut slopes: Vec<f64> = (0..4)
            .map(|i| {
                let (a, b) = (p.vertices[i], p.vertices[(i + 1) % 4]);
                (b.1 - a.1) / (b.0 - a.0)
            })
            .collect();
        slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut want = [1.0, 1.0, c.kappa(), c.kappa()];
        want.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (s, w) in slopes.iter().zip(want) {
            assert!((s - w).abs() < 1e-12);
        }
        let e = c.eta();
        let (r1, r2) = (c.range1(), c.range2());
        for corner in [
            (r1.h_min, e * r1.h_min + (1.0 - e) * r2.h_min),
            (r1.h_max, e * r1.h_max + (1.0 - e) * r2.h_max),
        ] {
            assert!(p.vertices.iter().any(|v| (v.0 - corner.0).abs() < 1e-12 && (v.1 - corner.1).abs() < 1e-12));
        }
    }

    #[test]
    fn pentagons_for_reference_parameters() {
        let c = BivariateCaseParams::new(0.27, 0.8, 0.5).unwrap();
        let (p1, p2) = (c.pentagon_p1().unwrap(), c.pentagon_p2().unwrap());
        assert_eq!(p1.vertices.len(), 5);
        assert_eq!(p2.vertices.len(), 5);
        for &v in &p1.vertices {
            assert!(p2.contains(v, 1e-12));
        }
        assert!(p2.vertices.iter().any(|&v| !p1.contains(v, 1e-9)));
        assert!(p2.area() > p1.area());
    }

    #[test]
    fn p2_degenerates_at_eta_zero() {
        let c = BivariateCaseParams::new(0.27, 0.8, 0.0).unwrap();
        let p2 = c.pentagon_p2().unwrap();
        let (r1, r2) = (c.range1(), c.range2());
        // Triangle (H1min,H2min), (H1min,H2max), (H1max,H2min).
        assert_eq!(p2.vertices.len(), 3);
        let want = 0.5 * (r1.h_max - r1.h_min) * (r2.h_max - r2.h_min);
        assert!((p2.area() - want).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn invert_m_round_trips(s in 0.0f64..1.0, t in 0.0f64..1.0, eta in 0.05f64..0.95, mixed in any::<bool>()) {
            let c = if mixed {
                BivariateCaseParams::new(0.27, 0.8, eta).unwrap()
            } else {
                BivariateCaseParams::new(0.1, 0.4, eta).unwrap()
            };
            let r = c.range1();
            let (a, b) = (r.h_min + s * (r.h_max - r.h_min), r.h_min + t * (r.h_max - r.h_min));
            let (h1, h2) = c.m_map(a, b);
            let (a2, b2) = c.invert_m(h1, h2).unwrap().unwrap();
            prop_assert!((a - a2).abs() < 1e-12 && (b - b2).abs() < 1e-12);
        }

        // The digit flip maps μ_p to μ_{1-p} and preserves every scaling function.
        #[test]
        fn digit_flip_invariance(q1 in -6.0f64..6.0, q2 in -6.0f64..6.0, eta in 0.0f64..1.0) {
            for &(p1, p2) in &[(0.27, 0.8), (0.1, 0.4)] {
                let a = BivariateCaseParams::new(p1, p2, eta).unwrap();
                let b = BivariateCaseParams::new(1.0 - p1, 1.0 - p2, eta).unwrap();
                prop_assert!((a.tau_closed(q1, q2) - b.tau_closed(q1, q2)).abs() < 1e-12);
                prop_assert!((a.t(q1, q2) - b.t(q1, q2)).abs() < 1e-12);
                prop_assert!((a.g(1.0) - b.g(1.0)).abs() < 1e-12);
            }
        }
    }
}
