//! Deterministic summation, quadrature and float formatting shared by the
//! experiment modules.
//!
//! Every reduction here runs in a fixed order that depends only on the input
//! length, so results are bit-stable regardless of how callers schedule work.

const PAIRWISE_BLOCK: usize = 8;

/// Pairwise sum of `term(i)` for `i in 0..len`.
pub fn pairwise_sum_with<F: Fn(usize) -> f64>(len: usize, term: F) -> f64 {
    fn rec<F: Fn(usize) -> f64>(lo: usize, hi: usize, term: &F) -> f64 {
        let n = hi - lo;
        if n <= PAIRWISE_BLOCK {
            let mut acc = 0.0;
            for i in lo..hi {
                acc += term(i);
            }
            return acc;
        }
        let mid = lo + n / 2;
        rec(lo, mid, term) + rec(mid, hi, term)
    }
    rec(0, len, &term)
}

pub fn pairwise_sum(xs: &[f64]) -> f64 {
    pairwise_sum_with(xs.len(), |i| xs[i])
}

/// Simpson estimate on `[a, b]` with the midpoint value supplied.
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_rec<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive_rec(&f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Adaptive Simpson applied independently on `panels` equal sub-intervals,
/// with the panel results combined by pairwise summation.
///
/// Splitting first keeps oscillatory integrands from fooling the initial
/// five-point error estimate.
pub fn adaptive_simpson_panels<F: Fn(f64) -> f64 + Sync>(
    f: F,
    a: f64,
    b: f64,
    panels: usize,
    tol: f64,
) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    let per_panel = tol / panels as f64;
    pairwise_sum_with(panels, |j| {
        let lo = a + h * j as f64;
        let hi = if j + 1 == panels { b } else { a + h * (j + 1) as f64 };
        adaptive_simpson(&f, lo, hi, per_panel)
    })
}

/// Composite Simpson rule with `intervals` (rounded up to even) sub-intervals.
pub fn composite_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = (intervals.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let inner = pairwise_sum_with(n - 1, |j| {
        let i = j + 1;
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        w * f(a + h * i as f64)
    });
    h / 3.0 * (f(a) + inner + f(b))
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = 0.0;
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

/// Formats a float with 17 significant digits using C's `%.17g` rules:
/// fixed notation for decimal exponents in `[-5, 17)`, scientific otherwise,
/// trailing zeros removed.
pub fn fmt_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{:.16e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..17).contains(&exp) {
        let decimals = (16 - exp) as usize;
        strip_zeros(&format!("{:.*}", decimals, x))
    } else {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{}{:02}", m, sign, exp.abs())
    }
}

fn strip_zeros(s: &str) -> String {
    if !s.contains('.') {
        return s.to_string();
    }
    let t = s.trim_end_matches('0');
    t.trim_end_matches('.').to_string()
}
