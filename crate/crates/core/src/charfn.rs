//! Empirical characteristic functions of atom laws and their renormalization
//! by a reference family (Gaussian, Poisson, Cauchy or none).
//!
//! A law is a finite list of weighted atoms. Its characteristic function is
//! evaluated on a [`LambdaGrid`] whose window `(-a, a)` records where the
//! renormalized quotient is meant to converge; outside that window nothing is
//! evaluated.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::{adaptive_simpson_panels, fmt_g17, gauss_legendre, pairwise_sum_with};

/// A probability law given by finitely many weighted atoms.
#[derive(Debug, Clone)]
pub struct WeightedEnsemble {
    values: Vec<f64>,
    // `None` means every atom has weight one.
    weights: Option<Vec<f64>>,
    total_weight: f64,
}

impl WeightedEnsemble {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        let (values, weights): (Vec<f64>, Vec<f64>) = atoms.into_iter().unzip();
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidInput(format!("atom weight {w} is not a finite nonnegative number")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("atom value is not finite".into()));
        }
        let total_weight = pairwise_sum_with(weights.len(), |i| weights[i]);
        if total_weight <= 0.0 {
            return Err(Error::InvalidInput("all atom weights are zero".into()));
        }
        Ok(Self { values, weights: Some(weights), total_weight })
    }

    /// Counting measure on `values` (each atom has weight one).
    pub fn uniform(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("atom value is not finite".into()));
        }
        let total_weight = values.len() as f64;
        Ok(Self { values, weights: None, total_weight })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights.as_ref().map_or(1.0, |w| w[i])
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.len()).map(|i| (self.values[i], self.weight(i)))
    }

    /// The law of `factor * X`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * factor).collect(),
            weights: self.weights.clone(),
            total_weight: self.total_weight,
        }
    }

    /// Raw moment `E[X^j]`.
    pub fn moment(&self, j: u32) -> f64 {
        pairwise_sum_with(self.len(), |i| self.weight(i) * self.values[i].powi(j as i32))
            / self.total_weight
    }

    /// `E[exp(i lambda X)]`, reduced pairwise over atoms in storage order.
    pub fn cf_at(&self, lambda: f64) -> Complex64 {
        if lambda == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        let n = self.len();
        let re = pairwise_sum_with(n, |i| self.weight(i) * (lambda * self.values[i]).cos());
        let im = pairwise_sum_with(n, |i| self.weight(i) * (lambda * self.values[i]).sin());
        Complex64::new(re / self.total_weight, im / self.total_weight)
    }

    /// `E[exp(i u X)] - 1`, computed without cancellation for small `u`.
    pub fn cf_minus_one(&self, u: f64) -> Complex64 {
        let n = self.len();
        let re = pairwise_sum_with(n, |i| {
            let h = (0.5 * u * self.values[i]).sin();
            -2.0 * self.weight(i) * h * h
        });
        let im = pairwise_sum_with(n, |i| self.weight(i) * (u * self.values[i]).sin());
        Complex64::new(re / self.total_weight, im / self.total_weight)
    }
}

/// Reference law whose characteristic function is divided out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Renormalizer {
    Gaussian { mean: f64, var: f64 },
    Poisson { gamma: f64 },
    Cauchy { gamma: f64 },
    Dirac,
}

impl Renormalizer {
    pub fn gaussian(mean: f64, var: f64) -> Result<Self> {
        if !(var >= 0.0) {
            return Err(Error::InvalidInput(format!("gaussian variance {var} < 0")));
        }
        Ok(Self::Gaussian { mean, var })
    }

    pub fn poisson(gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) {
            return Err(Error::InvalidInput(format!("poisson parameter {gamma} < 0")));
        }
        Ok(Self::Poisson { gamma })
    }

    pub fn cauchy(gamma: f64) -> Result<Self> {
        if !(gamma >= 0.0) {
            return Err(Error::InvalidInput(format!("cauchy parameter {gamma} < 0")));
        }
        Ok(Self::Cauchy { gamma })
    }

    /// Reciprocal of the reference characteristic function at `lambda`.
    pub fn multiplier(&self, lambda: f64) -> Complex64 {
        if lambda == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        match *self {
            Self::Gaussian { mean, var } => {
                Complex64::new(0.5 * var * lambda * lambda, -mean * lambda).exp()
            }
            Self::Poisson { gamma } => {
                let e = Complex64::new(0.0, lambda).exp() - 1.0;
                (-gamma * e).exp()
            }
            Self::Cauchy { gamma } => Complex64::new((gamma * lambda.abs()).exp(), 0.0),
            Self::Dirac => Complex64::new(1.0, 0.0),
        }
    }
}

/// Sorted evaluation points inside the window `(-window_a, window_a)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaGrid {
    points: Vec<f64>,
    window_a: f64,
}

impl LambdaGrid {
    pub fn new(points: Vec<f64>, window_a: f64) -> Result<Self> {
        if !(window_a > 0.0) {
            return Err(Error::InvalidInput(format!("window half-width {window_a} must be > 0")));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidInput("grid points must be strictly increasing".into()));
        }
        if let Some(p) = points.iter().find(|p| !(p.abs() < window_a)) {
            return Err(Error::OutsideRestrictedWindow { t: p.abs(), limit: window_a });
        }
        Ok(Self { points, window_a })
    }

    /// `n` equally spaced points on `[lo, hi]`, unrestricted window.
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::uniform_in_window(lo, hi, n, f64::INFINITY)
    }

    pub fn uniform_in_window(lo: f64, hi: f64, n: usize, window_a: f64) -> Result<Self> {
        let points = match n {
            0 => Vec::new(),
            1 => vec![lo],
            _ => {
                let m = (n - 1) as f64;
                let at = |i: usize| {
                    let t = i as f64 / m;
                    if i + 1 == n { hi } else { lo * (1.0 - t) + hi * t }
                };
                let mut pts: Vec<f64> = (0..n).map(at).collect();
                if lo == -hi {
                    // exact mirror so that -l lands on the grid with l
                    for i in 0..n / 2 {
                        pts[i] = -pts[n - 1 - i];
                    }
                    if n % 2 == 1 {
                        pts[n / 2] = 0.0;
                    }
                }
                pts
            }
        };
        Self::new(points, window_a)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn window_a(&self) -> f64 {
        self.window_a
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Complex values of a candidate limiting function on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CharTrace {
    pub grid: LambdaGrid,
    pub values: Vec<Complex64>,
    pub label: String,
}

impl CharTrace {
    pub fn value_at(&self, lambda: f64) -> Option<Complex64> {
        self.grid.points.iter().position(|&p| p == lambda).map(|i| self.values[i])
    }

    /// Largest `|value(-l) - conj(value(l))|` over pairs `±l` both on the grid.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, &p) in self.grid.points.iter().enumerate() {
            if p > 0.0 {
                if let Some(v) = self.value_at(-p) {
                    worst = worst.max((v - self.values[i].conj()).norm());
                }
            }
        }
        worst
    }

    pub fn csv_header() -> &'static str {
        "lambda,re,im,label"
    }

    /// Rows `lambda,re,im,label` without the header.
    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for (p, v) in self.grid.points.iter().zip(&self.values) {
            let _ = writeln!(out, "{},{},{},{}", fmt_g17(*p), fmt_g17(v.re), fmt_g17(v.im), self.label);
        }
        out
    }

    pub fn to_csv(&self) -> String {
        format!("{}\n{}", Self::csv_header(), self.csv_rows())
    }
}

pub fn empirical_cf(ens: &WeightedEnsemble, grid: &LambdaGrid) -> Result<CharTrace> {
    if ens.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let values = grid.points.par_iter().map(|&l| ens.cf_at(l)).collect();
    Ok(CharTrace { grid: grid.clone(), values, label: "empirical_cf".into() })
}

pub fn renormalizer_multiplier(r: &Renormalizer, lambda: f64) -> Complex64 {
    r.multiplier(lambda)
}

/// Empirical characteristic function times the renormalizing multiplier.
pub fn mod_star_value(
    ens: &WeightedEnsemble,
    r: &Renormalizer,
    grid: &LambdaGrid,
) -> Result<CharTrace> {
    let mut trace = empirical_cf(ens, grid)?;
    trace.label = "mod_star".into();
    if matches!(r, Renormalizer::Dirac) {
        return Ok(trace);
    }
    for (v, &l) in trace.values.iter_mut().zip(&grid.points) {
        *v *= r.multiplier(l);
    }
    Ok(trace)
}

/// Standard Cauchy distribution function.
pub fn cauchy_cdf(x: f64) -> f64 {
    0.5 + x.atan() / PI
}

/// Kolmogorov-Smirnov distance between the law of `X / scale` and the
/// standard Cauchy law.
///
/// The empirical distribution is a step function, so the supremum is attained
/// at a left or right limit at some atom; both are checked at every atom.
pub fn cauchy_law_distance(ens: &WeightedEnsemble, scale: f64) -> Result<f64> {
    if !(scale > 0.0) {
        return Err(Error::InvalidInput(format!("scale {scale} must be > 0")));
    }
    if ens.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let mut atoms: Vec<(f64, f64)> = ens.atoms().map(|(v, w)| (v / scale, w)).collect();
    atoms.par_sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
    let total = ens.total_weight();
    let mut below = 0.0;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < atoms.len() {
        let x = atoms[i].0;
        let mut mass = 0.0;
        while i < atoms.len() && atoms[i].0 == x {
            mass += atoms[i].1;
            i += 1;
        }
        let f = cauchy_cdf(x);
        let left = below / total;
        below += mass;
        let right = below / total;
        worst = worst.max((f - left).abs()).max((right - f).abs());
    }
    Ok(worst)
}

/// Default absolute tolerance for adaptive quadrature.
pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

/// Values at `xs` of the function whose Fourier transform is
/// `exp(c (i lambda)^(k+1) / (k+1)!)`.
///
/// Only even `k + 1` with a decaying exponent is integrable. The integrand is
/// real and even, so the transform reduces to a cosine integral over
/// `[0, L]`, with `L` where the integrand drops below `1e-16`.
pub fn inverse_fourier_limit(k: u32, c: f64, xs: &[f64]) -> Result<Vec<f64>> {
    inverse_fourier_limit_tol(k, c, xs, DEFAULT_QUAD_TOL)
}

pub fn inverse_fourier_limit_tol(k: u32, c: f64, xs: &[f64], tol: f64) -> Result<Vec<f64>> {
    let p = k + 1;
    let sign = if (p / 2) % 2 == 0 { 1.0 } else { -1.0 };
    if k == 0 || p % 2 != 0 || !(c * sign < 0.0) {
        return Err(Error::DivergentInverseTransform { k, c });
    }
    let fact: f64 = (1..=p).map(f64::from).product();
    let rate = c.abs() / fact;
    let cutoff = ((16.0 * std::f64::consts::LN_10) / rate).powf(1.0 / p as f64);
    let envelope = move |l: f64| (-rate * l.powi(p as i32)).exp();
    Ok(xs
        .par_iter()
        .map(|&x| {
            let panels = 16 + (cutoff * (1.0 + x.abs())).ceil() as usize;
            let integral = adaptive_simpson_panels(
                |l| envelope(l) * (l * x).cos(),
                0.0,
                cutoff,
                panels,
                tol * PI,
            );
            integral / PI
        })
        .collect())
}

/// The two laws whose Fourier transforms agree on `[-1/2, 1/2]`:
/// `A = (1 - cos x) / (pi x^2) dx` and
/// `B = delta_0 / 2 + (1 - cos(x/2)) / (pi x^2) dx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Counterexample {
    A,
    B,
}

/// Truncation radius for the counterexample transforms.
pub const COUNTEREXAMPLE_RADIUS: f64 = 40_000.0;

impl Counterexample {
    fn density(self, x: f64) -> f64 {
        // 1 - cos(w x) = 2 sin^2(w x / 2), kept in that form near 0.
        let w = match self {
            Self::A => 1.0,
            Self::B => 0.5,
        };
        if x == 0.0 {
            return w * w / (2.0 * PI);
        }
        let s = (0.5 * w * x).sin();
        2.0 * s * s / (PI * x * x)
    }

    fn atom(self) -> f64 {
        match self {
            Self::A => 0.0,
            Self::B => 0.5,
        }
    }

    pub fn closed_form(self, lambda: f64) -> f64 {
        let l = lambda.abs();
        match self {
            Self::A => (1.0 - l).max(0.0),
            Self::B => 0.5 + (0.5 - l).max(0.0),
        }
    }

    /// Bound on the mass of the density beyond `|x| > radius`.
    pub fn tail_bound(radius: f64) -> f64 {
        4.0 / (PI * radius)
    }

    /// Numeric Fourier transform on `|x| <= radius`, 16-point Gauss-Legendre
    /// on unit panels.
    pub fn fourier_with_radius(self, lambda: f64, radius: f64) -> f64 {
        let (nodes, weights) = gauss_legendre(16);
        let panels = radius.ceil() as usize;
        let h = radius / panels as f64;
        let half = pairwise_sum_with(panels, |j| {
            let mid = h * (j as f64 + 0.5);
            let mut acc = 0.0;
            for (t, w) in nodes.iter().zip(&weights) {
                let x = mid + 0.5 * h * t;
                acc += w * self.density(x) * (lambda * x).cos();
            }
            0.5 * h * acc
        });
        self.atom() + 2.0 * half
    }
}

pub fn counterexample_fourier(which: Counterexample, lambda: f64) -> f64 {
    which.fourier_with_radius(lambda, COUNTEREXAMPLE_RADIUS)
}
