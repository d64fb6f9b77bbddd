//! Dedekind sums over the Farey pairs `F_N`: the figure traces of the
//! renormalized characteristic function, the limiting function `Phi(t)` as an
//! integral over the modular fundamental domain, and the Cauchy law check.

use std::f64::consts::PI;

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::charfn::{cauchy_law_distance, WeightedEnsemble};
use crate::error::{Error, Result};
use crate::numeric::{fmt_g17, gauss_legendre, pairwise_sum, pairwise_sum_with};
use crate::specialfn::{log_y_eta4, scaled_sum_unchecked, UpperHalfPoint};

/// Coprime pairs `(c, d)` with `1 <= d < c < N`, ordered by `c` then `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareySet {
    n: u64,
    pairs: Vec<(u64, u64)>,
}

impl FareySet {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn check_n(n: u64, min: u64) -> Result<()> {
    if n < min {
        return Err(Error::InvalidInput(format!("N = {n} must be at least {min}")));
    }
    Ok(())
}

/// Denominators `d` coprime to `c` in `1..c`.
fn coprime_residues(c: u64) -> impl Iterator<Item = u64> {
    (1..c).filter(move |d| d.gcd(&c) == 1)
}

pub fn enumerate_farey(n: u64) -> Result<FareySet> {
    check_n(n, 2)?;
    let pairs = (2..n)
        .into_par_iter()
        .map(|c| coprime_residues(c).map(|d| (c, d)).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .concat();
    Ok(FareySet { n, pairs })
}

/// `gamma_N = log(N / 4) / (2 pi)`.
pub fn vardi_gamma(n: u64) -> Result<f64> {
    check_n(n, 2)?;
    Ok((n as f64 / 4.0).ln() / (2.0 * PI))
}

/// `s(d, c)` rounded once from the exact rational `6c s / 6c`.
#[inline]
fn dedekind_value(d: u64, c: u64) -> f64 {
    scaled_sum_unchecked(d, c) as f64 / (6 * c) as f64
}

/// Which of the stated convergence windows contains `t`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceWindow {
    /// `|t| < 4 pi / 3`: a well-defined limit is claimed.
    Convergent,
    /// `4 pi / 3 <= |t| < 2 pi`: the asymptotic formula holds uniformly but the
    /// error term dominates the renormalized value.
    TheoremUniform,
    /// `|t| >= 2 pi`: no claim.
    Exploratory,
}

impl TraceWindow {
    pub fn of(t: f64) -> Self {
        let a = t.abs();
        if a < 4.0 * PI / 3.0 {
            Self::Convergent
        } else if a < 2.0 * PI {
            Self::TheoremUniform
        } else {
            Self::Exploratory
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::Convergent => "convergent",
            Self::TheoremUniform => "theorem-uniform",
            Self::Exploratory => "exploratory",
        }
    }
}

/// One point of a figure trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRow {
    pub n: u64,
    /// `exp(gamma_N |t|) Re E_N(exp(i t D_N))`.
    pub value: f64,
    /// `Im E_N(exp(i t D_N))` before renormalization; zero up to rounding.
    pub imag: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FigureTrace {
    pub t: f64,
    pub window: TraceWindow,
    pub rows: Vec<TraceRow>,
}

impl FigureTrace {
    pub fn csv_header() -> &'static str {
        "t,N,value"
    }

    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&format!("{},{},{}\n", fmt_g17(self.t), r.n, fmt_g17(r.value)));
        }
        out
    }

    pub fn value_at(&self, n: u64) -> Option<f64> {
        self.rows.iter().find(|r| r.n == n).map(|r| r.value)
    }

    /// `max - min` of the values over rows with `lo <= N <= hi`.
    pub fn amplitude(&self, lo: u64, hi: u64) -> f64 {
        let vals = self.rows.iter().filter(|r| r.n >= lo && r.n <= hi).map(|r| r.value);
        let (mn, mx) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
        mx - mn
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.rows.iter().fold(0.0, |m, r| m.max(r.imag.abs()))
    }
}

/// Per-denominator sums `sum_d cos(t s(d, c))`, `sum_d sin(t s(d, c))` for
/// every `t`, with the pair count.
struct Bucket {
    count: u64,
    re: Vec<f64>,
    im: Vec<f64>,
}

fn bucket(c: u64, ts: &[f64]) -> Bucket {
    let s: Vec<f64> = coprime_residues(c).map(|d| dedekind_value(d, c)).collect();
    let (re, im) = ts
        .iter()
        .map(|&t| {
            let re = pairwise_sum_with(s.len(), |i| (t * s[i]).cos());
            let im = pairwise_sum_with(s.len(), |i| (t * s[i]).sin());
            (re, im)
        })
        .unzip();
    Bucket { count: s.len() as u64, re, im }
}

/// Reported sizes `3, 3 + stride, ...` not exceeding `n_max`. `F_2` is
/// empty, so the first meaningful size is 3.
pub fn trace_sizes(n_max: u64, stride: u64) -> Vec<u64> {
    (3..=n_max).step_by(stride.max(1) as usize).collect()
}

/// Figure traces for several `t` at once, sharing the Dedekind sums.
///
/// Denominator buckets are computed in parallel and folded into running sums
/// in ascending `c`, so the output does not depend on the thread count.
pub fn figure_traces(ts: &[f64], n_max: u64, stride: u64) -> Result<Vec<FigureTrace>> {
    check_n(n_max, 3)?;
    if stride == 0 {
        return Err(Error::InvalidInput("stride must be at least 1".into()));
    }
    for &t in ts {
        if !(t.abs() > 0.0) || !t.is_finite() {
            return Err(Error::InvalidInput(format!("t = {t} must be finite and nonzero")));
        }
    }
    let buckets: Vec<Bucket> = (2..n_max).into_par_iter().map(|c| bucket(c, ts)).collect();
    let sizes = trace_sizes(n_max, stride);
    let mut traces: Vec<FigureTrace> = ts
        .iter()
        .map(|&t| FigureTrace { t, window: TraceWindow::of(t), rows: Vec::with_capacity(sizes.len()) })
        .collect();

    let mut count = 0u64;
    let mut re = vec![0.0; ts.len()];
    let mut im = vec![0.0; ts.len()];
    let mut next = sizes.iter().peekable();
    // after folding bucket c the running sums describe F_{c+1}
    for (c, b) in (2..n_max).zip(&buckets) {
        count += b.count;
        for j in 0..ts.len() {
            re[j] += b.re[j];
            im[j] += b.im[j];
        }
        while let Some(&&n) = next.peek() {
            if n != c + 1 {
                break;
            }
            let gamma = vardi_gamma(n)?;
            for (j, tr) in traces.iter_mut().enumerate() {
                let scale = (gamma * tr.t.abs()).exp();
                let mean_re = re[j] / count as f64;
                tr.rows.push(TraceRow { n, value: scale * mean_re, imag: im[j] / count as f64 });
            }
            next.next();
        }
    }
    Ok(traces)
}

pub fn figure_trace(t: f64, n_max: u64, stride: u64) -> Result<FigureTrace> {
    Ok(figure_traces(&[t], n_max, stride)?.remove(0))
}

/// Monte-Carlo estimate of `Phi(t)` with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiEstimate {
    pub value: f64,
    pub std_error: f64,
}

fn pole_check(t: f64) -> Result<f64> {
    let a = t.abs();
    if !a.is_finite() || a >= 4.0 * PI {
        return Err(Error::AtOrBeyondPole { t });
    }
    Ok(a)
}

/// Maps `(theta, u)` in `(-pi/6, pi/6) x (0, 1]` to a point of the standard
/// fundamental domain. Uniform `(theta, u)` is exactly the normalized
/// hyperbolic measure `(3/pi) dx dy / y^2`.
fn domain_point(theta: f64, u: f64) -> UpperHalfPoint {
    let x = theta.sin();
    let y = (1.0 - x * x).sqrt() / u;
    UpperHalfPoint::new(x, y).expect("sampler stays in the upper half-plane")
}

/// `(y |eta(z)|^4)^s`.
fn integrand(s: f64, z: UpperHalfPoint) -> f64 {
    (s * log_y_eta4(z)).exp()
}

fn phi_from_mean(a: f64, mean: f64, mean_se: f64) -> PhiEstimate {
    let pre = 1.0 / (1.0 - a / (4.0 * PI));
    let value = pre / mean;
    PhiEstimate { value, std_error: value * mean_se / mean }
}

/// `Phi(t)` by Monte-Carlo over the fundamental domain.
///
/// `samples` are split over `chunks` independent streams keyed by
/// `(seed, chunk)`; chunk totals are merged in chunk order, so the result is a
/// function of `(t, samples, seed, chunks)` only. Evaluated at `|t|`.
pub fn vardi_phi(t: f64, samples: u64, seed: u64, chunks: u64) -> Result<PhiEstimate> {
    let a = pole_check(t)?;
    if a == 0.0 {
        return Ok(PhiEstimate { value: 1.0, std_error: 0.0 });
    }
    if samples < 2 || chunks == 0 {
        return Err(Error::InvalidInput("need at least 2 samples and 1 chunk".into()));
    }
    let s = a / (2.0 * PI);
    let per = samples / chunks;
    let extra = samples % chunks;
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let n = per + u64::from(k < extra);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k);
            let mut vals = Vec::with_capacity(n as usize);
            for _ in 0..n {
                let theta = PI / 3.0 * (rng.random::<f64>() - 0.5);
                let u = 1.0 - rng.random::<f64>();
                vals.push(integrand(s, domain_point(theta, u)));
            }
            let sum = pairwise_sum(&vals);
            let sq = pairwise_sum_with(vals.len(), |i| vals[i] * vals[i]);
            (sum, sq)
        })
        .collect();
    let sum = pairwise_sum_with(partial.len(), |i| partial[i].0);
    let sq = pairwise_sum_with(partial.len(), |i| partial[i].1);
    let n = samples as f64;
    let mean = sum / n;
    let var = ((sq - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(phi_from_mean(a, mean, (var / n).sqrt()))
}

/// `Phi(t)` by tensor Gauss-Legendre quadrature in `(theta, u)`, with
/// `panels` equal panels of 16 nodes per axis. The standard error is zero.
pub fn vardi_phi_quadrature(t: f64, panels: usize) -> Result<PhiEstimate> {
    let a = pole_check(t)?;
    if a == 0.0 {
        return Ok(PhiEstimate { value: 1.0, std_error: 0.0 });
    }
    let panels = panels.max(1);
    let s = a / (2.0 * PI);
    let (x, w) = gauss_legendre(16);
    let nodes: Vec<(f64, f64)> = (0..panels)
        .flat_map(|p| {
            let lo = p as f64 / panels as f64;
            let h = 1.0 / panels as f64;
            x.iter().zip(&w).map(move |(&xi, &wi)| (lo + 0.5 * h * (xi + 1.0), 0.5 * h * wi))
        })
        .collect();
    let rows: Vec<f64> = nodes
        .par_iter()
        .map(|&(v, wv)| {
            let theta = PI / 3.0 * (v - 0.5);
            wv * pairwise_sum_with(nodes.len(), |j| {
                let (u, wu) = nodes[j];
                wu * integrand(s, domain_point(theta, u))
            })
        })
        .collect();
    Ok(phi_from_mean(a, pairwise_sum(&rows), 0.0))
}

/// KS distance between the law of `s(d, c) / (log c / 2 pi)` over `F_N` and
/// the standard Cauchy law.
pub fn vardi_law_check(n: u64) -> Result<f64> {
    check_n(n, 3)?;
    let values: Vec<f64> = (2..n)
        .into_par_iter()
        .map(|c| {
            let scale = 2.0 * PI / (c as f64).ln();
            coprime_residues(c).map(|d| dedekind_value(d, c) * scale).collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat();
    cauchy_law_distance(&WeightedEnsemble::uniform(values)?, 1.0)
}
