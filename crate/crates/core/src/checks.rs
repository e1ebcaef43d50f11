//! Numerical checks of the identities, bounds and support geometry, each
//! reporting its worst deviation. The CLI `validate` suites and the acceptance
//! target both run these.

use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascades::{build_counterexample_schedule, counterexample_tau, eps, sample_environment, MeasureModel};
use crate::closedform::{big_t, BivariateCaseParams, CaseTag, SupportRegion};
use crate::scaling::{
    legendre_2d_fn, local_dim_trace, tilde_tau_exact, Axis, Cells, EnumeratedSums, LegendreOptions, PointSpec,
    PairFactors, RunLengthDp, ENUMERATION_CAP,
};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Worst measured deviation; `null` in JSON when infinite.
    pub deviation: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn new(name: &str, deviation: f64, tolerance: f64, detail: String) -> Self {
        Self { name: name.into(), passed: deviation <= tolerance, deviation, tolerance, detail }
    }
}

/// `n × n` points spanning `[lo, hi]²`.
pub fn q_grid(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let v: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    v.iter().flat_map(|&a| v.iter().map(move |&b| (a, b))).collect()
}

/// `|a - b|` relative to `max(1, |b|)`.
fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

/// Both `-inf` counts as agreement.
fn ext_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

fn worst(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

/// `τ̃` of two binomial measures against `T`.
pub fn binomial_pair_identity(p1: f64, p2: f64, js: &[usize], grid: &[(f64, f64)]) -> Result<Check> {
    let (m1, m2) = (MeasureModel::binomial(p1)?, MeasureModel::binomial(p2)?);
    let mut dev: f64 = 0.0;
    for &j in js {
        for &(q1, q2) in grid {
            dev = dev.max(rel(tilde_tau_exact(&m1, &m2, j, q1, q2)?, big_t(p1, p2, q1, q2)));
        }
    }
    Ok(Check::new("binomial pair tilde tau equals T", dev, 1e-9, format!("p=({p1},{p2}) j={js:?} {} q", grid.len())))
}

/// `τ̃(μ_{p1}, ν_η)` against the environment-weighted mix of `τ_{p1}(q1+q2)` and `T`.
pub fn switched_identity(p1: f64, p2: f64, etas: &[f64], seeds: &[u64], j: usize, grid: &[(f64, f64)]) -> Result<Check> {
    let m1 = MeasureModel::binomial(p1)?;
    let mu = crate::cascades::BinomialParams::new(p1)?;
    let mut dev: f64 = 0.0;
    for &eta in etas {
        for &seed in seeds {
            let env = Arc::new(sample_environment(eta, seed, j)?);
            let frac = env.a.count_upto(j) as f64 / j as f64;
            let nu = MeasureModel::switched(p1, p2, env)?;
            let f = PairFactors::new(&m1, &nu, j)?;
            let d: Vec<f64> = grid
                .par_iter()
                .map(|&(q1, q2)| {
                    let want = frac * mu.tau(q1 + q2) + (1.0 - frac) * big_t(p1, p2, q1, q2);
                    rel(f.tilde_tau(q1, q2), want)
                })
                .collect();
            dev = dev.max(worst(d.into_iter()));
        }
    }
    Ok(Check::new(
        "switched pair tilde tau splits over the environment",
        dev,
        1e-9,
        format!("p=({p1},{p2}) eta={etas:?} {} seeds j={j}", seeds.len()),
    ))
}

/// Worst violations of `τ̃_{j+2} ≤ τ3_{j+2}` and `τ3_{j+2} ≤ τ̃_j`, per `j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichGap {
    pub j: usize,
    pub left: f64,
    pub left_at: (f64, f64),
    pub right: f64,
    pub right_at: (f64, f64),
}

pub fn sandwich_gaps(m1: &MeasureModel, m2: &MeasureModel, js: &[usize], grid: &[(f64, f64)]) -> Result<Vec<SandwichGap>> {
    js.iter()
        .map(|&j| {
            let tilde_j = EnumeratedSums::new(m1, m2, j, Cells::Plain, ENUMERATION_CAP)?;
            let tilde_j2 = EnumeratedSums::new(m1, m2, j + 2, Cells::Plain, ENUMERATION_CAP)?;
            let three_j2 = EnumeratedSums::new(m1, m2, j + 2, Cells::Windows, ENUMERATION_CAP)?;
            let mut g = SandwichGap { j, left: 0.0, left_at: (0.0, 0.0), right: 0.0, right_at: (0.0, 0.0) };
            for &(q1, q2) in grid {
                let (a, b, c) = (tilde_j2.tau(q1, q2), three_j2.tau(q1, q2), tilde_j.tau(q1, q2));
                if a - b > g.left {
                    g.left = a - b;
                    g.left_at = (q1, q2);
                }
                if b - c > g.right {
                    g.right = b - c;
                    g.right_at = (q1, q2);
                }
            }
            Ok(g)
        })
        .collect()
}

/// The window sandwich read literally, with no slack.
pub fn sandwich(p1: f64, p2: f64, eta: f64, seed: u64, js: &[usize], grid: &[(f64, f64)]) -> Result<(Check, Vec<SandwichGap>)> {
    let j_top = js.iter().max().copied().unwrap_or(0) + 2;
    let env = Arc::new(sample_environment(eta, seed, j_top)?);
    let (m1, nu) = (MeasureModel::binomial(p1)?, MeasureModel::switched(p1, p2, env)?);
    let gaps = sandwich_gaps(&m1, &nu, js, grid)?;
    let dev = worst(gaps.iter().map(|g| g.left.max(g.right)));
    let detail = gaps
        .iter()
        .map(|g| format!("j={}: left {:.3e} at {:?}, right {:.3e} at {:?}", g.j, g.left, g.left_at, g.right, g.right_at))
        .collect::<Vec<_>>()
        .join("; ");
    Ok((Check::new("window sandwich between tilde tau at j and j+2", dev, 1e-12, detail), gaps))
}

/// Run-length DP against enumeration of the windows.
pub fn dp_matches_enumeration(
    cases: &[(f64, f64)],
    eta: f64,
    seeds: &[u64],
    j_max: usize,
    grid: &[(f64, f64)],
) -> Result<Check> {
    let mut dev: f64 = 0.0;
    for &(p1, p2) in cases {
        for &seed in seeds {
            let env = Arc::new(sample_environment(eta, seed, j_max)?);
            let (m1, nu) = (MeasureModel::binomial(p1)?, MeasureModel::switched(p1, p2, env)?);
            for j in 1..=j_max {
                let e = EnumeratedSums::new(&m1, &nu, j, Cells::Windows, ENUMERATION_CAP)?;
                let dp = RunLengthDp::new(&m1, &nu, j)?;
                dev = dev.max(worst(grid.iter().map(|&(q1, q2)| rel(dp.tau(q1, q2), e.tau(q1, q2)))));
            }
        }
    }
    Ok(Check::new(
        "run-length DP equals window enumeration",
        dev,
        1e-9,
        format!("cases={cases:?} eta={eta} {} seeds j<={j_max} {} q", seeds.len(), grid.len()),
    ))
}

/// Distance of the windowed `τ` to `min(T^η, T̃^η)` shrinks from `j_lo` to
/// `j_hi` at every grid point, and at `j_hi` sits under `3 sqrt(ln j / j)`.
pub fn mixed_trend(p: &BivariateCaseParams, seed: u64, j_lo: usize, j_hi: usize, grid: &[(f64, f64)]) -> Result<Vec<Check>> {
    let env = Arc::new(sample_environment(p.eta(), seed, j_hi)?);
    let (m1, nu) = (MeasureModel::binomial(p.p1())?, MeasureModel::switched(p.p1(), p.p2(), env)?);
    let (lo, hi) = (RunLengthDp::new(&m1, &nu, j_lo)?, RunLengthDp::new(&m1, &nu, j_hi)?);
    let errs: Vec<(f64, f64, (f64, f64))> = grid
        .par_iter()
        .map(|&(q1, q2)| {
            let want = p.tau_closed(q1, q2);
            ((lo.tau(q1, q2) - want).abs(), (hi.tau(q1, q2) - want).abs(), (q1, q2))
        })
        .collect();
    let bad: Vec<_> = errs.iter().filter(|e| e.1 > e.0).collect();
    let increase = worst(bad.iter().map(|e| e.1 - e.0));
    let envelope = 3.0 * ((j_hi as f64).ln() / j_hi as f64).sqrt();
    let top = errs.iter().map(|e| e.1).fold(0.0, f64::max);
    let mono_detail = match bad.iter().max_by(|a, b| (a.1 - a.0).total_cmp(&(b.1 - b.0))) {
        Some(e) => format!("{} of {} points grow; worst at {:?}: {:.3e} -> {:.3e}", bad.len(), grid.len(), e.2, e.0, e.1),
        None => format!("all {} points shrink", grid.len()),
    };
    Ok(vec![
        Check::new(&format!("mixed tau error shrinks from j={j_lo} to j={j_hi}"), increase, 0.0, mono_detail),
        Check::new(&format!("mixed tau error at j={j_hi} under envelope"), top, envelope, format!("seed={seed}")),
    ])
}

/// Closed-form same-side spectrum against the numeric conjugate of `T^η`.
pub fn same_side_formalism(p: &BivariateCaseParams, q_half: f64, q_step: f64, n_h: usize) -> Result<Check> {
    let q = Axis::new(-q_half, q_half, q_step)?;
    let region = p.parallelogram()?;
    let points = region_grid(&region, n_h, 0.0);
    let got = legendre_2d_fn(&q, &q, |a, b| p.taue(a, b), &points, LegendreOptions::default())?;
    let mut dev: f64 = 0.0;
    let mut at = (0.0, 0.0);
    for (&h, &g) in points.iter().zip(&got) {
        let d = ext_diff(g, p.spectrum_same_side(h.0, h.1)?);
        if d > dev {
            dev = d;
            at = h;
        }
    }
    Ok(Check::new(
        "same-side spectrum equals Legendre transform",
        dev,
        1e-3,
        format!("{n_h}x{n_h} H grid, q box ±{q_half} step {q_step}; worst at {at:?}"),
    ))
}

/// `n × n` grid over the bounding box of `r`, padded by `pad` of its size.
fn region_grid(r: &SupportRegion, n: usize, pad: f64) -> Vec<(f64, f64)> {
    let ((x0, x1), (y0, y1)) = r.bounding_box();
    let (dx, dy) = (pad * (x1 - x0), pad * (y1 - y0));
    let xs = Axis::linspace(x0 - dx, x1 + dx, n).expect("n >= 2");
    let ys = Axis::linspace(y0 - dy, y1 + dy, n).expect("n >= 2");
    (0..n).flat_map(|i| (0..n).map(move |k| (xs.value(i), ys.value(k)))).collect()
}

/// `T*(H, G(H)) = D_{μ_{p1}}(H)` at `n` interior samples.
pub fn t_star_along_graph(p1: f64, p2: f64, n: usize, q_half: f64, q_step: f64) -> Result<Check> {
    let c = BivariateCaseParams::new(p1, p2, 0.5)?;
    let r = c.range1();
    let points: Vec<(f64, f64)> = (0..n)
        .map(|i| r.h_min + (r.h_max - r.h_min) * (i as f64 + 0.5) / n as f64)
        .map(|h| (h, c.g(h)))
        .collect();
    let q = Axis::new(-q_half, q_half, q_step)?;
    let got = legendre_2d_fn(&q, &q, |a, b| big_t(p1, p2, a, b), &points, LegendreOptions::default())?;
    let mu = c.mu1();
    let dev = worst(points.iter().zip(&got).map(|(h, &g)| ext_diff(g, mu.spectrum(h.0))));
    Ok(Check::new("conjugate of T along the graph of G", dev, 1e-4, format!("p=({p1},{p2}) {n} samples")))
}

/// Milestone and in-step bounds of the counterexample, plus the cardinality
/// bracket at the end of every stage.
pub fn counterexample_bounds(n_max: u32, qs: &[f64], samples: u128) -> Result<Check> {
    let s = build_counterexample_schedule(n_max)?;
    let grid: Vec<(f64, f64)> = qs.iter().flat_map(|&a| qs.iter().map(move |&b| (a, b))).collect();
    let full = |q1: f64, q2: f64| q1 + q2 - 1.0;
    let half2 = |q1: f64, q2: f64| q1 + q2 / 2.0 - 0.5;
    let half1 = |q1: f64, q2: f64| q1 / 2.0 + q2 - 0.5;
    // Excess of |τ - target| over the allowance, positive when a bound fails.
    let mut excess = f64::NEG_INFINITY;
    let mut failures = Vec::new();
    let mut note = |label: String, e: f64| {
        if e > 0.0 {
            failures.push(label);
        }
        excess = excess.max(e);
    };
    for st in &s.stages {
        let (n, en, prev) = (st.n, st.eps, eps(st.n - 1));
        let targets: [&dyn Fn(f64, f64) -> f64; 4] = [&half2, &full, &half1, &full];
        for (i, target) in targets.iter().enumerate() {
            let j = 2 * st.j[i];
            for &(q1, q2) in &grid {
                let e = (counterexample_tau(&s, j, q1, q2)? - target(q1, q2)).abs() - (q1.abs() + q2.abs() + 2.0) * en;
                note(format!("n={n} milestone {} q=({q1},{q2})", i + 1), e);
            }
            // In-step bracket between the previous milestone and this one.
            let start = if i == 0 { if n == 1 { 0 } else { 2 * s.stages[n as usize - 2].j[3] } } else { 2 * st.j[i - 1] };
            let lower: &dyn Fn(f64, f64) -> f64 = if i < 2 { &half2 } else { &half1 };
            for k in 1..samples {
                let g = start + ((j - start) / 2 * k / samples) * 2;
                if g == 0 {
                    continue;
                }
                for &(q1, q2) in &grid {
                    let t = counterexample_tau(&s, g, q1, q2)?;
                    let (a, b) = (lower(q1, q2), full(q1, q2));
                    let slack = (q1.abs() + q2.abs() + 2.0) * prev;
                    let e = (a.min(b) - t).max(t - a.max(b)) - slack;
                    note(format!("n={n} step {} generation {g} q=({q1},{q2})", i + 1), e);
                }
            }
        }
        let end = s.profile_at(2 * st.j[3])?;
        let g = end.generation as f64;
        let c12 = end.log2_c12 as f64;
        let e = (g * (1.0 - 2.0 * en) - c12).max(c12 - g * (1.0 + 2.0 * en));
        note(format!("n={n} cardinality"), e);
    }
    let detail = if failures.is_empty() {
        format!("n_max={n_max}, {} q, {samples} in-step samples per step", grid.len())
    } else {
        format!("{} failures, first: {}", failures.len(), failures[0])
    };
    Ok(Check { name: "counterexample milestone bounds".into(), passed: excess <= 0.0, deviation: excess, tolerance: 0.0, detail })
}

/// Numeric conjugate of the counterexample `τ`, sampled as the minimum over
/// the last stage's milestone generations.
pub fn counterexample_conjugate(n_max: u32, q_half: f64, q_step: f64, n_h: usize) -> Result<Vec<Check>> {
    let s = build_counterexample_schedule(n_max)?;
    let st = s.stages.last().ok_or_else(|| Error::Parameter("empty schedule".into()))?;
    let profiles = st.j.iter().map(|&j| s.profile_at(2 * j)).collect::<Result<Vec<_>>>()?;
    let tau = |q1: f64, q2: f64| profiles.iter().map(|p| p.tau(q1, q2)).fold(f64::INFINITY, f64::min);
    let q = Axis::new(-q_half, q_half, q_step)?;
    // Only the vertices matter for membership; the kind tag is not used.
    let triangle = SupportRegion::from_points(crate::closedform::RegionKind::Parallelogram, &[(0.5, 1.0), (1.0, 0.5), (1.0, 1.0)]);
    let band = 1e-2;
    let grid = region_grid(&SupportRegion::from_points(triangle.kind, &[(0.3, 0.3), (1.2, 1.2), (0.3, 1.2), (1.2, 0.3)]), n_h, 0.0);
    let points: Vec<(f64, f64)> = grid.into_iter().filter(|&h| triangle.margin(h).abs() > band).collect();
    let got = legendre_2d_fn(&q, &q, tau, &points, LegendreOptions::default())?;
    let mut dev: f64 = 0.0;
    for (&h, &g) in points.iter().zip(&got) {
        let want = if triangle.margin(h) > 0.0 { h.0 + h.1 - 1.0 } else { f64::NEG_INFINITY };
        dev = dev.max(ext_diff(g, want));
    }
    let far = 1e9;
    let support = [(0.5, 0.5), (0.5, far), (far, 0.5), (far, far)];
    let at = legendre_2d_fn(&q, &q, tau, &support, LegendreOptions::default())?;
    let finite = at.iter().filter(|v| v.is_finite()).count();
    Ok(vec![
        Check::new(
            "counterexample conjugate is H1+H2-1 on the triangle",
            dev,
            band,
            format!("{} H points off a {band} band, q box ±{q_half} step {q_step}", points.len()),
        ),
        Check::new(
            "spectrum support points lie outside the conjugate support",
            finite as f64,
            0.0,
            format!("values {at:?}, infinite coordinates as {far:e}"),
        ),
    ])
}

/// `P1 ⊊ P2`, then a feasibility raster of (S1) ∧ (S2) against membership in P2.
pub fn pentagons(p: &BivariateCaseParams, raster: usize, alpha_scan: usize) -> Result<Vec<Check>> {
    let (p1, p2) = (p.pentagon_p1()?, p.pentagon_p2()?);
    let outside = worst(p1.vertices.iter().map(|&v| -p2.margin(v)));
    let gap = p2.area() - p1.area();
    let contain = Check {
        name: "P1 strictly inside P2".into(),
        passed: outside <= 1e-12 && gap > 1e-9,
        deviation: outside,
        tolerance: 1e-12,
        detail: format!("area P1 {:.6}, P2 {:.6}", p1.area(), p2.area()),
    };

    let r = p.range1();
    let e = p.eta();
    let alphas: Vec<f64> = (0..=alpha_scan).map(|i| r.h_min + (r.h_max - r.h_min) * i as f64 / alpha_scan as f64).collect();
    let in_range = |b: f64| b >= r.h_min - 1e-12 && b <= r.h_max + 1e-12;
    let s1 = |h1: f64, h2: f64| {
        alphas.iter().any(|&a| {
            let b = (h1 - e * a) / (1.0 - e);
            in_range(b) && h2 <= e * a + (1.0 - e) * p.g(b)
        })
    };
    let s2 = |h1: f64, h2: f64| {
        alphas.iter().any(|&a| {
            let g = (h2 - e * a) / (1.0 - e);
            let b = p.g_inv(g);
            in_range(b) && (p.g(b) - g).abs() < 1e-9 && h1 <= e * a + (1.0 - e) * b
        })
    };
    let ((x0, x1), (y0, y1)) = p2.bounding_box();
    let (pad_x, pad_y) = (0.05 * (x1 - x0), 0.05 * (y1 - y0));
    let (cx, cy) = ((x1 - x0 + 2.0 * pad_x) / raster as f64, (y1 - y0 + 2.0 * pad_y) / raster as f64);
    let cell = cx.hypot(cy);
    let cells: Vec<(f64, f64)> = (0..raster)
        .flat_map(|i| (0..raster).map(move |k| (x0 - pad_x + (i as f64 + 0.5) * cx, y0 - pad_y + (k as f64 + 0.5) * cy)))
        .collect();
    let mismatches: Vec<f64> = cells
        .par_iter()
        .filter(|&&(h1, h2)| (s1(h1, h2) && s2(h1, h2)) != p2.contains((h1, h2), 0.0))
        .map(|&h| p2.margin(h).abs())
        .collect();
    let far = mismatches.iter().filter(|&&m| m > cell).count();
    let raster_check = Check {
        name: "P2 membership matches the (S1)∧(S2) raster".into(),
        passed: far == 0,
        deviation: worst(mismatches.iter().copied()) / cell,
        tolerance: 1.0,
        detail: format!("{raster}x{raster} raster, {} mismatches, {far} beyond one cell", mismatches.len()),
    };
    Ok(vec![contain, raster_check])
}

/// In the mixed case the spectrum and the conjugate of `τ` disagree; this check
/// passes when that disagreement is observed.
pub fn mixed_formalism_failure(p: &BivariateCaseParams, q_half: f64, q_step: f64, n_h: usize) -> Result<Check> {
    let region = p.pentagon_p2()?;
    let points = region_grid(&region, n_h, 0.0);
    let q = Axis::new(-q_half, q_half, q_step)?;
    let conj = legendre_2d_fn(&q, &q, |a, b| p.tau_closed(a, b), &points, LegendreOptions::default())?;
    let (mut dev, mut only_d, mut only_conj): (f64, usize, usize) = (0.0, 0, 0);
    for (&h, &c) in points.iter().zip(&conj) {
        let d = p.spectrum_mixed(h.0, h.1)?;
        match (d.is_finite(), c.is_finite()) {
            (true, true) => dev = dev.max((d - c).abs()),
            (true, false) => only_d += 1,
            (false, true) => only_conj += 1,
            _ => {}
        }
    }
    let p1 = p.pentagon_p1()?;
    let gap = region.area() - p1.area();
    let failed = dev > 1e-3 || only_d > 0 || only_conj > 0;
    Ok(Check {
        name: "mixed case breaks the formalism (expected)".into(),
        passed: failed,
        deviation: dev,
        tolerance: 1e-3,
        detail: format!(
            "max |D - tau*| on common support {dev:.4}; {only_d} points only in Supp D, {only_conj} only in Supp tau*; area gap {gap:.4}"
        ),
    })
}

/// `q_H` solve residual, zero ends and the unit maximum of `D_{ν_η}`.
pub fn nu_eta(p: &BivariateCaseParams, n: usize) -> Result<Vec<Check>> {
    let (lo, hi) = (p.h_eta_min(), p.h_eta_max());
    let hs: Vec<f64> = (1..n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
    let sols: Vec<_> = hs.iter().map(|&h| p.spectrum_nu_eta(h)).collect();
    let residual = worst(sols.iter().map(|s| s.residual));
    let ends = p.spectrum_nu_eta(lo).value.abs().max(p.spectrum_nu_eta(hi).value.abs());
    let e = p.eta();
    let h_s = e * p.range1().h_s + (1.0 - e) * p.range2().h_s;
    let peak = p.spectrum_nu_eta(h_s).value;
    let above = worst(sols.iter().map(|s| s.value - 1.0));
    Ok(vec![
        Check::new("nu_eta q_H residual", residual, 1e-12, format!("{} samples", hs.len())),
        Check::new("nu_eta vanishes at both ends", ends, 1e-6, format!("[{lo:.6}, {hi:.6}]")),
        Check::new(
            "nu_eta peaks at 1",
            (peak - 1.0).abs().max(above),
            1e-6,
            format!("D({h_s:.6}) = {peak:.12}, largest sample excess {above:.3e}"),
        ),
    ])
}

/// Fraction of seeds whose environment count leaves the deviation bound.
pub fn environment_bound(eta: f64, seeds: &[u64], big_j: usize, j: usize) -> Result<Check> {
    let hits = seeds
        .par_iter()
        .map(|&s| Ok(sample_environment(eta, s, big_j + j)?.counts(big_j, j)?.violated(eta, j)))
        .collect::<Result<Vec<bool>>>()?;
    let k = hits.iter().filter(|&&v| v).count();
    Ok(Check::new(
        "environment count within the deviation bound",
        k as f64 / seeds.len() as f64,
        0.05,
        format!("{k} of {} seeds violate, eta={eta} J={big_j} j={j}", seeds.len()),
    ))
}

/// Slope predicted from the digit frequencies of the period.
pub fn predicted_local_dim(p: f64, x: &PointSpec) -> f64 {
    let (n0, n1) = crate::dyadic::digit_counts(&x.period);
    let len = x.period.len() as f64;
    -(n0 as f64 * p.log2() + n1 as f64 * (1.0 - p).log2()) / len
}

pub fn local_dimensions(ps: &[f64], points: &[&str], j: usize) -> Result<Check> {
    let mut dev: f64 = 0.0;
    let mut parts = Vec::new();
    for &p in ps {
        let m = MeasureModel::binomial(p)?;
        for s in points {
            let x: PointSpec = s.parse()?;
            let got = local_dim_trace(&m, &x, j)?.last();
            let want = predicted_local_dim(p, &x);
            dev = dev.max((got - want).abs());
            parts.push(format!("p={p} {s}: {got:.5} vs {want:.5}"));
        }
    }
    Ok(Check::new(&format!("local dimension slopes at j={j}"), dev, 1e-2, parts.join("; ")))
}

/// Suite names understood by [`run_suite`].
pub const SUITES: [&str; 4] = ["identities", "counterexample", "formalism", "environment"];

/// Parameters a suite may take from the command line; `None` keeps the default.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SuiteParams {
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub eta: Option<f64>,
    pub seed: Option<u64>,
    pub n_max: Option<u32>,
}

/// Suites run on the default same-side and mixed parameter sets, or on the one
/// set given through `p1`/`p2`, choosing the checks that fit its case.
pub fn run_suite(name: &str, sp: &SuiteParams) -> Result<Vec<Check>> {
    let seed = sp.seed.unwrap_or(42);
    let eta = sp.eta.unwrap_or(0.5);
    let cases = if sp.p1.is_some() || sp.p2.is_some() {
        vec![BivariateCaseParams::new(sp.p1.unwrap_or(0.27), sp.p2.unwrap_or(0.8), eta)?]
    } else {
        vec![BivariateCaseParams::new(0.1, 0.4, eta)?, BivariateCaseParams::new(0.27, 0.8, eta)?]
    };
    let main = cases.last().expect("at least one case");
    let g21 = q_grid(-5.0, 5.0, 21);
    let g9 = q_grid(-4.0, 4.0, 9);
    let mut out = Vec::new();
    match name {
        "identities" => {
            let (p1, p2) = (main.p1(), main.p2());
            out.push(binomial_pair_identity(p1, p2, &[4, 8, 12, 16, 20], &g21)?);
            out.push(switched_identity(p1, p2, &[eta], &[seed], 1 << 12, &g21)?);
            let pairs: Vec<(f64, f64)> = cases.iter().map(|c| (c.p1(), c.p2())).collect();
            out.push(dp_matches_enumeration(&pairs, eta, &[seed], 12, &g9)?);
            out.push(t_star_along_graph(p1, p2, 50, 40.0, 0.05)?);
            out.extend(nu_eta(main, 1000)?);
            out.push(local_dimensions(&[p1, 0.3], &["(001)", "(01)", "(0)", "1(011)"], 30_000)?);
        }
        "counterexample" => {
            let n = sp.n_max.unwrap_or(3);
            out.push(counterexample_bounds(n, &[-3.0, -1.0, 0.0, 1.0, 3.0], 64)?);
            out.extend(counterexample_conjugate(n, 40.0, 0.05, 101)?);
        }
        "formalism" => {
            for c in &cases {
                match c.case() {
                    CaseTag::SameSide => out.push(same_side_formalism(c, 40.0, 0.02, 51)?),
                    CaseTag::Mixed => {
                        out.extend(pentagons(c, 100, 1000)?);
                        out.push(mixed_formalism_failure(c, 40.0, 0.05, 51)?);
                    }
                }
            }
        }
        "environment" => {
            let seeds: Vec<u64> = (0..200).map(|i| seed.wrapping_add(i)).collect();
            out.push(environment_bound(eta, &seeds, 1000, 10_000)?);
            out.extend(mixed_trend(main, seed, 1 << 8, 1 << 12, &g9)?);
        }
        other => return Err(Error::Parameter(format!("unknown suite {other:?}; expected one of {SUITES:?}"))),
    }
    Ok(out)
}
