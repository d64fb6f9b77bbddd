//! The density family `g_{P,sigma}`: a Gaussian differentiated by `P(D)`,
//! plus a wide Gaussian bump that keeps the whole thing nonnegative once
//! `sigma` is large enough.
//!
//! ```text
//! g(x) = sigma/(sigma+1) * ( P(D) f_sigma(x) + exp(-x^2 / 8 sigma^2) / (2 sigma^2 sqrt(2 pi)) )
//! ```
//!
//! [`find_sigma0`] certifies nonnegativity numerically: a dense grid check on
//! `|x| <= radius_factor * sigma^2` and an analytic bound beyond it.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numeric::composite_simpson;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Real polynomial with constant term exactly one, coefficients from the
/// constant term up.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    coefficients: Vec<f64>,
}

impl RealPolynomial {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.first() != Some(&1.0) {
            return Err(Error::InvalidInput("polynomial must have constant term 1".into()));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("polynomial coefficients must be finite".into()));
        }
        let mut coefficients = coefficients;
        while coefficients.len() > 1 && coefficients.last() == Some(&0.0) {
            coefficients.pop();
        }
        Ok(Self { coefficients })
    }

    pub fn one() -> Self {
        Self { coefficients: vec![1.0] }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn is_even(&self) -> bool {
        self.coefficients.iter().skip(1).step_by(2).all(|&c| c == 0.0)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coefficients.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// `P(-i lambda)`.
    pub fn at_minus_i(&self, lambda: f64) -> Complex64 {
        self.eval_complex(Complex64::new(0.0, -lambda))
    }

    /// `sup |d/dl P(-i l)|` over `|l| <= radius`, bounded by absolute
    /// coefficients.
    fn derivative_bound(&self, radius: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c.abs() * j as f64 * radius.powi(j as i32 - 1))
            .sum()
    }
}

/// Probabilists' Hermite polynomials `He_0..He_k` evaluated at `u`.
fn hermite_values(k: usize, u: f64) -> Vec<f64> {
    let mut he = Vec::with_capacity(k + 1);
    he.push(1.0);
    if k >= 1 {
        he.push(u);
    }
    for j in 1..k {
        let next = u * he[j] - j as f64 * he[j - 1];
        he.push(next);
    }
    he
}

/// Sum of absolute coefficients of `He_j`, for `j = 0..=k`.
fn hermite_abs_coefficient_sums(k: usize) -> Vec<f64> {
    let mut rows: Vec<Vec<f64>> = vec![vec![1.0], vec![0.0, 1.0]];
    for j in 1..k {
        let mut next = vec![0.0; j + 2];
        for (i, c) in rows[j].iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, c) in rows[j - 1].iter().enumerate() {
            next[i] -= j as f64 * c;
        }
        rows.push(next);
    }
    rows.truncate(k + 1);
    rows.iter().map(|r| r.iter().map(|c| c.abs()).sum()).collect()
}

/// `f_sigma^{(k)}(x)` for the centered Gaussian density of scale `sigma`.
pub fn gaussian_deriv(sigma: f64, k: usize, x: f64) -> f64 {
    let u = x / sigma;
    let he = hermite_values(k, u);
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    sign * he[k] * INV_SQRT_2PI * (-0.5 * u * u).exp() / sigma.powi(k as i32 + 1)
}

pub fn g_density(p: &RealPolynomial, sigma: f64, x: f64) -> f64 {
    let u = x / sigma;
    let k = p.degree();
    let he = hermite_values(k, u);
    let gauss = INV_SQRT_2PI * (-0.5 * u * u).exp();
    let mut pd = 0.0;
    let mut scale = 1.0 / sigma;
    for (j, c) in p.coefficients().iter().enumerate() {
        if *c != 0.0 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            pd += c * sign * he[j] * scale;
        }
        scale /= sigma;
    }
    let bump = (-x * x / (8.0 * sigma * sigma)).exp() * INV_SQRT_2PI / (2.0 * sigma * sigma);
    sigma / (sigma + 1.0) * (pd * gauss + bump)
}

/// `sigma/(sigma+1) (P(-i lambda) exp(-sigma^2 lambda^2 / 2) + exp(-2 sigma^2 lambda^2) / sigma)`.
pub fn g_fourier_closed(p: &RealPolynomial, sigma: f64, lambda: f64) -> Complex64 {
    let s2l2 = sigma * sigma * lambda * lambda;
    let pv = p.at_minus_i(lambda);
    sigma / (sigma + 1.0) * (pv * (-0.5 * s2l2).exp() + (-2.0 * s2l2).exp() / sigma)
}

/// Outcome of a nonnegativity and mass check at one `sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub sigma: f64,
    pub min_value: f64,
    pub integral: f64,
    pub grid_radius: f64,
    pub grid_points: usize,
    /// Simpson at step `h` minus Simpson at `2h`.
    pub richardson_delta: f64,
    /// Analytic bound for `|x| > grid_radius` holds.
    pub tail_certified: bool,
}

impl DensityReport {
    pub fn csv_header() -> &'static str {
        "sigma,min_value,integral,grid_radius,grid_points"
    }

    pub fn csv_row(&self) -> String {
        use crate::numeric::fmt_g17;
        format!(
            "{},{},{},{},{}",
            fmt_g17(self.sigma),
            fmt_g17(self.min_value),
            fmt_g17(self.integral),
            fmt_g17(self.grid_radius),
            self.grid_points
        )
    }

    pub fn certified(&self) -> bool {
        self.tail_certified && self.min_value >= 0.0
    }
}

/// Search settings for [`find_sigma0`].
#[derive(Debug, Clone, Copy)]
pub struct SigmaSearch {
    pub initial_sigma: f64,
    pub radius_factor: f64,
    pub points: usize,
    pub max_doublings: u32,
}

impl Default for SigmaSearch {
    fn default() -> Self {
        Self { initial_sigma: 0.125, radius_factor: 6.0, points: 20_001, max_doublings: 40 }
    }
}

/// Whether the non-constant part of `P(D) f_sigma(x)` stays below the bump
/// for every `|x| > radius`.
///
/// With `u = |x| / sigma >= 1`, `|f^{(j)}_sigma(x)| <= A_j u^j f_1(u) / sigma^{j+1}`
/// where `A_j` is the absolute coefficient sum of `He_j`. The bump wins when
/// `2 sum_j |P_j| A_j u^j sigma^{1-j} <= exp(3 u^2 / 8)`; the log of the left
/// side grows at most like `deg / u`, slower than `3u/4` once
/// `u^2 >= 4 deg / 3`, so checking the endpoint suffices.
fn tail_bound_holds(p: &RealPolynomial, sigma: f64, radius: f64) -> bool {
    // The constant term contributes +f_sigma >= 0 and needs no bound.
    if p.degree() == 0 {
        return true;
    }
    let u = radius / sigma;
    let deg = p.degree() as f64;
    if u < 1.0 || u * u < 4.0 * deg / 3.0 {
        return false;
    }
    let sums = hermite_abs_coefficient_sums(p.degree());
    let log_lhs = p
        .coefficients()
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| **c != 0.0)
        .map(|(j, c)| {
            (2.0 * c.abs() * sums[j]).ln() + j as f64 * u.ln() + (1.0 - j as f64) * sigma.ln()
        })
        .fold(f64::NEG_INFINITY, |acc, v| {
            let m = acc.max(v);
            m + ((acc - m).exp() + (v - m).exp()).ln()
        });
    log_lhs <= 0.375 * u * u
}

/// Mass of `g_{P,sigma}` by composite Simpson at step `sigma / 200` over
/// `|x| <= 20 sigma`, where the wide bump has shed all but `~1e-23` of its mass.
fn mass(p: &RealPolynomial, sigma: f64) -> (f64, f64) {
    let r = 20.0 * sigma;
    let n = 8000;
    let fine = composite_simpson(|x| g_density(p, sigma, x), -r, r, n);
    let coarse = composite_simpson(|x| g_density(p, sigma, x), -r, r, n / 2);
    (fine, fine - coarse)
}

/// Grid-plus-tail nonnegativity check and mass at a single `sigma`.
pub fn certify(p: &RealPolynomial, sigma: f64, radius_factor: f64, points: usize) -> Result<DensityReport> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidInput(format!("sigma {sigma} must be > 0")));
    }
    if points < 2 || !(radius_factor > 0.0) {
        return Err(Error::InvalidInput("need at least two grid points and a positive radius".into()));
    }
    let radius = radius_factor * sigma * sigma;
    let h = 2.0 * radius / (points - 1) as f64;
    let min_value = (0..points)
        .into_par_iter()
        .map(|i| g_density(p, sigma, -radius + h * i as f64))
        .reduce(|| f64::INFINITY, f64::min);
    let (integral, richardson_delta) = mass(p, sigma);
    Ok(DensityReport {
        sigma,
        min_value,
        integral,
        grid_radius: radius,
        grid_points: points,
        richardson_delta,
        tail_certified: tail_bound_holds(p, sigma, radius),
    })
}

/// Doubles `sigma` from `search.initial_sigma` until [`certify`] succeeds.
pub fn find_sigma0_with(p: &RealPolynomial, search: SigmaSearch) -> Result<DensityReport> {
    let mut sigma = search.initial_sigma;
    let mut best: Option<DensityReport> = None;
    for _ in 0..=search.max_doublings {
        let report = certify(p, sigma, search.radius_factor, search.points)?;
        if report.certified() {
            return Ok(report);
        }
        if best.as_ref().map_or(true, |b| report.min_value > b.min_value) {
            best = Some(report);
        }
        sigma *= 2.0;
    }
    Err(Error::SearchCapExceeded { doublings: search.max_doublings, best: best.expect("searched") })
}

pub fn find_sigma0(p: &RealPolynomial, radius_factor: f64, points: usize) -> Result<DensityReport> {
    find_sigma0_with(p, SigmaSearch { radius_factor, points, ..SigmaSearch::default() })
}

/// The renormalized transform `g_fourier_closed * exp(sigma^2 lambda^2 / 2)`
/// for a certified `(P, sigma)`.
#[derive(Debug, Clone)]
pub struct S0Element {
    p: RealPolynomial,
    sigma: f64,
    report: DensityReport,
}

impl S0Element {
    pub fn new(p: RealPolynomial, sigma: f64) -> Result<Self> {
        let defaults = SigmaSearch::default();
        let report = certify(&p, sigma, defaults.radius_factor, defaults.points)?;
        if !report.certified() {
            return Err(Error::NotCertified { sigma, min_value: report.min_value });
        }
        Ok(Self { p, sigma, report })
    }

    pub fn report(&self) -> &DensityReport {
        &self.report
    }

    /// `sigma/(sigma+1) (P(-i lambda) + exp(-3 sigma^2 lambda^2 / 2) / sigma)`.
    pub fn value(&self, lambda: f64) -> Complex64 {
        let s = self.sigma;
        let pv = self.p.at_minus_i(lambda);
        s / (s + 1.0) * (pv + (-1.5 * s * s * lambda * lambda).exp() / s)
    }

    /// Lipschitz constant of [`Self::value`] on `|lambda| <= radius`.
    pub fn lipschitz_bound(&self, radius: f64) -> f64 {
        let s = self.sigma;
        // d/dl exp(-3 s^2 l^2 / 2) / s peaks at sqrt(3) exp(-1/2).
        s / (s + 1.0) * (self.p.derivative_bound(radius) + 3f64.sqrt() * (-0.5f64).exp())
    }
}

pub fn s0_element(p: &RealPolynomial, sigma: f64, lambda: f64) -> Result<Complex64> {
    Ok(S0Element::new(p.clone(), sigma)?.value(lambda))
}

/// Numeric Fourier transform of `g_{P,sigma}` by composite Simpson at step
/// `sigma / 200` over `|x| <= 20 sigma`.
pub fn g_fourier_numeric(p: &RealPolynomial, sigma: f64, lambda: f64) -> Complex64 {
    let r = 20.0 * sigma;
    let n = 8000;
    let re = composite_simpson(|x| g_density(p, sigma, x) * (lambda * x).cos(), -r, r, n);
    let im = composite_simpson(|x| g_density(p, sigma, x) * (lambda * x).sin(), -r, r, n);
    Complex64::new(re, im)
}
