//! Small numeric kernels shared by the scaling and closed-form code.

/// `log2(2^a + 2^b)`, exact for infinite arguments.
pub fn log2_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp2().ln_1p() / std::f64::consts::LN_2
}

/// `log2(Σ 2^x)` with max extraction. Empty or all `-inf` input gives `-inf`.
pub fn log2_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let s: f64 = xs.iter().map(|&x| (x - max).exp2()).sum();
    max + s.log2()
}

/// Pairwise log2-sum-exp with a fixed balanced tree, so the result does not
/// depend on how the caller chunked the work.
pub fn log2_sum_exp_pairwise(xs: &[f64]) -> f64 {
    const LEAF: usize = 256;
    if xs.len() <= LEAF {
        return log2_sum_exp(xs);
    }
    let mid = xs.len() / 2;
    log2_add(
        log2_sum_exp_pairwise(&xs[..mid]),
        log2_sum_exp_pairwise(&xs[mid..]),
    )
}

/// Binary entropy in bits; `0 log 0 = 0`.
pub fn entropy2(g: f64) -> f64 {
    let h = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    h(g) + h(1.0 - g)
}

/// Golden-section maximization of a unimodal function on `[a, b]`.
/// Returns `(argmax, max)`.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a) > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // The endpoints matter: the maximum sits on the boundary for monotone slices.
    [(a, f(a)), (b, f(b)), (c, fc), (d, fd)]
        .into_iter()
        .fold((a, f64::NEG_INFINITY), |best, cand| if cand.1 > best.1 { cand } else { best })
}
