//! Concave Legendre conjugation on grids: `f*(H) = inf_q (q·H - f(q))`.
//!
//! The 1-D transform reads the infimum off the upper concave hull of the
//! samples. The 2-D transform applies it along `q2` for every `q1` row and then
//! minimizes over rows, which is exact for grid infima.

use rayon::prelude::*;

use super::grid::{Axis, GridFunction1D, GridFunction2D};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LegendreOptions {
    /// A boundary minimizer whose objective still falls outward faster than
    /// this (per unit of q) marks the conjugate as `-inf`.
    pub divergence_slope: f64,
}

impl Default for LegendreOptions {
    fn default() -> Self {
        Self { divergence_slope: 1e-6 }
    }
}

/// Upper concave hull of `(q_i, f_i)` for the finite samples.
struct Hull {
    q: Vec<f64>,
    f: Vec<f64>,
    /// Edge slopes, strictly decreasing.
    slopes: Vec<f64>,
}

impl Hull {
    fn new(axis: &Axis, values: &[f64]) -> Result<Self> {
        let mut q: Vec<f64> = Vec::new();
        let mut f: Vec<f64> = Vec::new();
        for (i, &v) in values.iter().enumerate() {
            if v == f64::NEG_INFINITY {
                continue;
            }
            if !v.is_finite() {
                return Err(Error::Grid(format!("non-finite sample {v} at index {i}")));
            }
            let x = axis.value(i);
            while q.len() >= 2 {
                let n = q.len();
                // Drop the last point if it lies on or below the chord.
                let lhs = (f[n - 1] - f[n - 2]) * (x - q[n - 2]);
                let rhs = (v - f[n - 2]) * (q[n - 1] - q[n - 2]);
                if lhs <= rhs {
                    q.pop();
                    f.pop();
                } else {
                    break;
                }
            }
            q.push(x);
            f.push(v);
        }
        if q.is_empty() {
            return Err(Error::Grid("no finite samples to conjugate".into()));
        }
        let slopes = q.windows(2).zip(f.windows(2)).map(|(a, b)| (b[1] - b[0]) / (a[1] - a[0])).collect();
        Ok(Self { q, f, slopes })
    }

    /// `(inf_q (qH - f), diverging)`.
    fn conjugate(&self, h: f64, threshold: f64) -> (f64, bool) {
        let t = self.slopes.partition_point(|&s| s > h);
        let value = self.q[t] * h - self.f[t];
        let n = self.q.len();
        let diverging = n >= 2
            && ((t == 0 && h - self.slopes[0] > threshold) || (t == n - 1 && self.slopes[n - 2] - h > threshold));
        (value, diverging)
    }
}

pub fn legendre_1d_at(f: &GridFunction1D, hs: &[f64], opts: LegendreOptions) -> Result<Vec<f64>> {
    if f.values.is_empty() {
        return Err(Error::Grid("empty grid".into()));
    }
    let hull = Hull::new(&f.axis, &f.values)?;
    Ok(hs
        .iter()
        .map(|&h| match hull.conjugate(h, opts.divergence_slope) {
            (_, true) => f64::NEG_INFINITY,
            (v, false) => v,
        })
        .collect())
}

pub fn legendre_1d(f: &GridFunction1D, h: &Axis) -> Result<GridFunction1D> {
    let values = legendre_1d_at(f, &h.values(), LegendreOptions::default())?;
    GridFunction1D::new(*h, values)
}

/// Conjugate at arbitrary points of a function given row by row: `row(i, out)`
/// fills `out[k] = f(q1_i, q2_k)`.
pub fn legendre_2d_rows<R>(q1: &Axis, q2: &Axis, row: R, points: &[(f64, f64)], opts: LegendreOptions) -> Result<Vec<f64>>
where
    R: Fn(usize, &mut [f64]) + Sync,
{
    if q1.is_empty() || q2.is_empty() {
        return Err(Error::Grid("empty grid".into()));
    }
    let mut h2s: Vec<f64> = points.iter().map(|p| p.1).collect();
    h2s.sort_by(|a, b| a.partial_cmp(b).expect("finite H"));
    h2s.dedup();
    let slot = |h2: f64| h2s.binary_search_by(|x| x.partial_cmp(&h2).expect("finite H")).expect("collected");

    // The same infimum over the box shrunk by an eighth on every side. A value
    // that still drops between the two boxes is diverging, even when the grid
    // minimizer is not on the boundary (oblique valleys do that).
    let (cut1, cut2) = (q1.len / 8, q2.len / 8);
    let inner_axis = Axis { min: q2.value(cut2), step: q2.step, len: q2.len - 2 * cut2 };
    let drop_tol = opts.divergence_slope * (cut1 as f64 * q1.step).min(cut2 as f64 * q2.step);

    // rows[i] = (inf_{q2} (q2 H2_s - f(q1_i, q2)), divergence flag, same inf over the inner q2 range).
    let rows: Vec<(Vec<f64>, Vec<bool>, Vec<f64>)> = (0..q1.len)
        .into_par_iter()
        .map(|i| {
            let mut buf = vec![0.0; q2.len];
            row(i, &mut buf);
            let hull = Hull::new(q2, &buf)?;
            let (v, flag): (Vec<f64>, Vec<bool>) = h2s.iter().map(|&h| hull.conjugate(h, opts.divergence_slope)).unzip();
            let inner = match Hull::new(&inner_axis, &buf[cut2..q2.len - cut2]) {
                Ok(hull) => h2s.iter().map(|&h| hull.conjugate(h, f64::INFINITY).0).collect(),
                Err(_) => vec![f64::INFINITY; h2s.len()],
            };
            Ok((v, flag, inner))
        })
        .collect::<Result<_>>()?;

    let n = q1.len;
    let thr = opts.divergence_slope * q1.step;
    Ok(points
        .par_iter()
        .map(|&(h1, h2)| {
            let s = slot(h2);
            let phi = |i: usize| q1.value(i) * h1 + rows[i].0[s];
            let (mut best, mut arg) = (f64::INFINITY, 0);
            for i in 0..n {
                let v = phi(i);
                if v < best {
                    best = v;
                    arg = i;
                }
            }
            let inner_best = (cut1..n - cut1).map(|i| q1.value(i) * h1 + rows[i].2[s]).fold(f64::INFINITY, f64::min);
            let outward = n >= 2 && ((arg == 0 && phi(1) - phi(0) > thr) || (arg == n - 1 && phi(n - 2) - phi(n - 1) > thr));
            let dropping = cut1 > 0 && cut2 > 0 && inner_best - best > drop_tol;
            if outward || dropping || rows[arg].1[s] {
                f64::NEG_INFINITY
            } else {
                best
            }
        })
        .collect())
}

/// Conjugate of a closure sampled on `q1 × q2`, evaluated at `points`.
pub fn legendre_2d_fn<F>(q1: &Axis, q2: &Axis, f: F, points: &[(f64, f64)], opts: LegendreOptions) -> Result<Vec<f64>>
where
    F: Fn(f64, f64) -> f64 + Sync,
{
    legendre_2d_rows(
        q1,
        q2,
        |i, out| {
            let x = q1.value(i);
            for (k, o) in out.iter_mut().enumerate() {
                *o = f(x, q2.value(k));
            }
        },
        points,
        opts,
    )
}

pub fn legendre_2d_at(f: &GridFunction2D, points: &[(f64, f64)], opts: LegendreOptions) -> Result<Vec<f64>> {
    if f.values.is_empty() {
        return Err(Error::Grid("empty grid".into()));
    }
    let m = f.y.len;
    legendre_2d_rows(&f.x, &f.y, |i, out| out.copy_from_slice(&f.values[i * m..(i + 1) * m]), points, opts)
}

pub fn legendre_2d(f: &GridFunction2D, h1: &Axis, h2: &Axis) -> Result<GridFunction2D> {
    let points: Vec<(f64, f64)> =
        (0..h1.len).flat_map(|i| (0..h2.len).map(move |k| (h1.value(i), h2.value(k)))).collect();
    let values = legendre_2d_at(f, &points, LegendreOptions::default())?;
    GridFunction2D::new(*h1, *h2, values)
}
