//! Moment/cumulant conversion and the i.i.d. mod-Gaussian limit.
//!
//! For a base law whose first `k` moments match the standard Gaussian, the
//! scaled sum `N^{-1/(k+1)} (X_1 + ... + X_N)` renormalized by a centered
//! Gaussian of variance `N^{(k-1)/(k+1)}` tends to
//! `exp(c_{k+1} (i lambda)^{k+1} / (k+1)!)`.

use num_complex::Complex64;
use num_traits::{FromPrimitive, Num};

use crate::charfn::{CharTrace, LambdaGrid, WeightedEnsemble};
use crate::error::{Error, Result};

/// Moments `mu[0] = 1, mu[1], ..., mu[m]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentVector<T> {
    mu: Vec<T>,
}

/// Cumulants `c[0] = c_1, ..., c[m-1] = c_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantVector<T> {
    pub c: Vec<T>,
}

impl<T: Num + Clone> MomentVector<T> {
    /// Builds from `mu_1, ..., mu_m`; `mu_0 = 1` is implied.
    pub fn from_raw(raw: Vec<T>) -> Self {
        let mut mu = Vec::with_capacity(raw.len() + 1);
        mu.push(T::one());
        mu.extend(raw);
        Self { mu }
    }

    /// Builds from a full vector including `mu[0]`, which must equal one.
    pub fn new(mu: Vec<T>) -> Result<Self> {
        if mu.first().map_or(true, |m| !m.is_one()) {
            return Err(Error::InvalidInput("mu[0] must be 1".into()));
        }
        Ok(Self { mu })
    }

    pub fn mu(&self) -> &[T] {
        &self.mu
    }

    /// `mu_1, ..., mu_m`.
    pub fn raw(&self) -> &[T] {
        &self.mu[1..]
    }
}

fn binomial_rows<T: Num + Clone + FromPrimitive>(m: usize) -> Vec<Vec<T>> {
    let mut rows: Vec<Vec<u128>> = vec![vec![1]];
    for n in 1..=m {
        let prev = &rows[n - 1];
        let mut row = vec![1u128; n + 1];
        for j in 1..n {
            row[j] = prev[j - 1] + prev[j];
        }
        rows.push(row);
    }
    rows.into_iter()
        .map(|r| r.into_iter().map(|v| T::from_u128(v).expect("binomial fits")).collect())
        .collect()
}

/// `c_n = mu_n - sum_{j=1}^{n-1} C(n-1, j-1) c_j mu_{n-j}`.
pub fn moments_to_cumulants<T: Num + Clone + FromPrimitive>(m: &MomentVector<T>) -> CumulantVector<T> {
    let len = m.mu.len() - 1;
    let binom = binomial_rows::<T>(len);
    let mut c: Vec<T> = Vec::with_capacity(len);
    for n in 1..=len {
        let mut v = m.mu[n].clone();
        for j in 1..n {
            v = v - binom[n - 1][j - 1].clone() * c[j - 1].clone() * m.mu[n - j].clone();
        }
        c.push(v);
    }
    CumulantVector { c }
}

/// Inverse of [`moments_to_cumulants`].
pub fn cumulants_to_moments<T: Num + Clone + FromPrimitive>(c: &CumulantVector<T>) -> MomentVector<T> {
    let len = c.c.len();
    let binom = binomial_rows::<T>(len);
    let mut mu: Vec<T> = vec![T::one()];
    for n in 1..=len {
        let mut v = c.c[n - 1].clone();
        for j in 1..n {
            v = v + binom[n - 1][j - 1].clone() * c.c[j - 1].clone() * mu[n - j].clone();
        }
        mu.push(v);
    }
    MomentVector { mu }
}

/// `E[Z^j]` for a standard Gaussian `Z`: zero for odd `j`, `(j-1)!!` for even.
pub fn gaussian_moment(j: u32) -> f64 {
    if j % 2 == 1 {
        return 0.0;
    }
    (1..j).step_by(2).map(f64::from).product()
}

/// Law of the summands in the i.i.d. limit theorem.
#[derive(Debug, Clone)]
pub enum BaseLaw {
    /// `P[X = 1] = P[X = -1] = 1/2`, characteristic function `cos`.
    PlusMinusOne,
    Atoms(WeightedEnsemble),
}

impl BaseLaw {
    pub fn moment(&self, j: u32) -> f64 {
        match self {
            Self::PlusMinusOne => {
                if j % 2 == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            Self::Atoms(ens) => ens.moment(j),
        }
    }

    pub fn moments(&self, m: u32) -> MomentVector<f64> {
        MomentVector::from_raw((1..=m).map(|j| self.moment(j)).collect())
    }

    /// `phi(u) - 1` without cancellation near `u = 0`.
    pub fn cf_minus_one(&self, u: f64) -> Complex64 {
        match self {
            Self::PlusMinusOne => {
                let h = (0.5 * u).sin();
                Complex64::new(-2.0 * h * h, 0.0)
            }
            Self::Atoms(ens) => ens.cf_minus_one(u),
        }
    }

    /// Checks that the first `k` moments are Gaussian to within `1e-12`,
    /// reporting the first order that is not.
    pub fn check_gaussian_moments(&self, k: u32) -> Result<()> {
        for j in 1..=k {
            let got = self.moment(j);
            let expected = gaussian_moment(j);
            if (got - expected).abs() > 1e-12 {
                return Err(Error::MomentMismatch { order: j as usize, got, expected });
            }
        }
        Ok(())
    }

    /// Cumulant `c_{k+1}`.
    pub fn cumulant(&self, order: u32) -> f64 {
        let c = moments_to_cumulants(&self.moments(order));
        c.c[order as usize - 1]
    }
}

/// Principal `log(1 + z)` accurate for small `|z|`.
fn log1p_complex(z: Complex64) -> Complex64 {
    let re = 0.5 * (2.0 * z.re + z.re * z.re + z.im * z.im).ln_1p();
    let im = z.im.atan2(1.0 + z.re);
    Complex64::new(re, im)
}

fn cum1_log(base: &BaseLaw, k: u32, n: u64, lambda: f64) -> Result<Complex64> {
    let nf = n as f64;
    let p = f64::from(k + 1);
    let u = lambda * nf.powf(-1.0 / p);
    let z = base.cf_minus_one(u);
    let phi = Complex64::new(1.0 + z.re, z.im);
    if phi.norm() == 0.0 || (phi.im == 0.0 && phi.re < 0.0) {
        return Err(Error::PrincipalLogUndefined { lambda });
    }
    let var = nf.powf((f64::from(k) - 1.0) / p);
    Ok(nf * log1p_complex(z) + 0.5 * lambda * lambda * var)
}

/// `phi(lambda N^{-1/(k+1)})^N exp(lambda^2 N^{(k-1)/(k+1)} / 2)`, formed in
/// the log domain on the principal branch.
pub fn cum1_lhs(base: &BaseLaw, k: u32, n: u64, lambda: f64) -> Result<Complex64> {
    if k < 1 || n < 1 {
        return Err(Error::InvalidInput("need k >= 1 and N >= 1".into()));
    }
    base.check_gaussian_moments(k)?;
    if lambda == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    Ok(cum1_log(base, k, n, lambda)?.exp())
}

/// [`cum1_lhs`] over a grid, following the argument of `phi` continuously
/// outward from `lambda = 0`.
///
/// The per-point principal log is only accepted when the argument of `phi`
/// moves by less than `pi / 2` between neighbouring points; a larger step
/// means the path left the principal sheet and is reported as an error.
pub fn cum1_trace(base: &BaseLaw, k: u32, n: u64, grid: &LambdaGrid) -> Result<CharTrace> {
    base.check_gaussian_moments(k)?;
    let pts = grid.points();
    let p = f64::from(k + 1);
    let arg_at = |l: f64| {
        let z = base.cf_minus_one(l * (n as f64).powf(-1.0 / p));
        z.im.atan2(1.0 + z.re)
    };
    let zero = pts.iter().position(|&l| l >= 0.0).unwrap_or(pts.len());
    let check = |range: &mut dyn Iterator<Item = usize>| -> Result<()> {
        let mut prev: Option<(f64, f64)> = None;
        for i in range {
            let l = pts[i];
            let a = arg_at(l);
            let (pl, pa) = prev.unwrap_or((0.0, 0.0));
            if (a - pa).abs() > std::f64::consts::FRAC_PI_2 {
                return Err(Error::BranchJump { from: pl, to: l });
            }
            prev = Some((l, a));
        }
        Ok(())
    };
    check(&mut (zero..pts.len()))?;
    check(&mut (0..zero).rev())?;
    let values = pts
        .iter()
        .map(|&l| cum1_lhs(base, k, n, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(CharTrace { grid: grid.clone(), values, label: "cum1_lhs".into() })
}

/// `exp(c (i lambda)^{k+1} / (k+1)!)`.
pub fn cum1_limit(k: u32, c: f64, lambda: f64) -> Complex64 {
    let p = k + 1;
    let fact: f64 = (1..=p).map(f64::from).product();
    let mag = c * lambda.powi(p as i32) / fact;
    let exponent = match p % 4 {
        0 => Complex64::new(mag, 0.0),
        1 => Complex64::new(0.0, mag),
        2 => Complex64::new(-mag, 0.0),
        _ => Complex64::new(0.0, -mag),
    };
    exponent.exp()
}
