//! Constructors for the named distribution families: binomial, Poisson,
//! negative binomial, and geometric as (possibly truncated) finite measures;
//! gamma, beta, and normal as continuous descriptors with closed-form
//! stop-loss transforms and a midpoint discretizer.
//!
//! Degenerate parameter values follow the point-mass conventions
//! `Poiss(0) = NB(0, p) = Gamma(0, b) = Beta(0, b) = d_0` and
//! `Beta(a, 0) = d_1`.

use num::bigint::BigInt;
use num::rational::BigRational;
use statrs::function::beta::beta_reg;
use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};
use thiserror::Error;

use crate::measure::{FiniteMeasure, MeasureError};
use crate::quad;
use crate::scalar::Scalar;

/// Tolerance of the density-normalization self-check run on construction of
/// every non-degenerate continuous family.
const NORMALIZATION_TOL: f64 = 1e-9;

/// Hard cap on truncation scans, expressed in standard deviations past the
/// mean; reaching it means `tail_eps` is below what binary64 can resolve.
const TRUNCATION_SIGMAS: f64 = 60.0;

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),
    #[error("tail after {scanned} atoms still exceeds tail_eps = {tail_eps}")]
    TailNotReached { scanned: usize, tail_eps: f64 },
    #[error("grid [{lo}, {hi}] excludes mass {excluded} > allowed tail {allowed}")]
    GridExcludesMass {
        lo: f64,
        hi: f64,
        excluded: f64,
        allowed: f64,
    },
    #[error("invalid discretization grid: {0}")]
    InvalidGrid(String),
    #[error("density normalization check failed: integral = {0}")]
    Normalization(f64),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Binomial law `B(n, x)` on `{0, ..., n}`, weight `C(n,k) x^k (1-x)^(n-k)`
/// at `k`. Exact regime whenever `x` is exact; atoms with zero weight are
/// omitted and the mass defect is always zero.
pub fn binomial(n: u32, x: &Scalar) -> Result<FiniteMeasure, FamilyError> {
    let zero = Scalar::zero(x.regime());
    let one = Scalar::one(x.regime());
    if x < &zero || x > &one {
        return Err(FamilyError::InvalidParameter(format!(
            "binomial success probability {x} not in [0, 1]"
        )));
    }
    let regime = x.regime();
    let y = &one - x;
    // Running binomial coefficient via the Pascal ratio C(n,k+1) = C(n,k)(n-k)/(k+1).
    let mut coef = BigRational::from_integer(BigInt::from(1));
    let mut x_pow = Scalar::one(regime);
    let mut atoms = Vec::with_capacity(n as usize + 1);
    for k in 0..=n {
        let tail = y.pow(n - k);
        let w = &(&Scalar::Exact(coef.clone()) * &x_pow) * &tail;
        atoms.push((Scalar::int_in(regime, k as i64), w));
        if k < n {
            coef *= BigRational::new(BigInt::from(n - k), BigInt::from(k + 1));
            x_pow = &x_pow * x;
        }
    }
    Ok(FiniteMeasure::from_atoms(atoms, Scalar::zero(regime))?)
}

/// Poisson law truncated to the smallest prefix `{0, ..., K}` whose omitted
/// tail is below `tail_eps`; the omitted tail is recorded as the mass
/// defect. Always float regime; `lambda = 0` yields a point mass at zero.
pub fn poisson(lambda: f64, tail_eps: f64) -> Result<FiniteMeasure, FamilyError> {
    if lambda.is_nan() || lambda < 0.0 {
        return Err(FamilyError::InvalidParameter(format!(
            "poisson rate {lambda} must be >= 0"
        )));
    }
    check_tail_eps(tail_eps)?;
    if lambda == 0.0 {
        return Ok(FiniteMeasure::dirac(Scalar::Float(0.0)));
    }
    let cap = (lambda + TRUNCATION_SIGMAS * (lambda.sqrt() + 1.0)).ceil() as usize + 8;
    truncate_pmf(
        (-lambda).exp(),
        |k, w| w * lambda / (k as f64 + 1.0),
        tail_eps,
        cap,
    )
}

/// Negative binomial law `NB(r, p)` truncated at `tail_eps`, weight
/// `Gamma(k+r)/(Gamma(r) k!) p^k (1-p)^r` at `k`. Float regime; `r = 0` or
/// `p = 0` yields a point mass at zero.
pub fn negative_binomial(r: f64, p: f64, tail_eps: f64) -> Result<FiniteMeasure, FamilyError> {
    if r.is_nan() || r < 0.0 {
        return Err(FamilyError::InvalidParameter(format!(
            "negative binomial size {r} must be >= 0"
        )));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(FamilyError::InvalidParameter(format!(
            "negative binomial probability {p} not in [0, 1)"
        )));
    }
    check_tail_eps(tail_eps)?;
    if r == 0.0 || p == 0.0 {
        return Ok(FiniteMeasure::dirac(Scalar::Float(0.0)));
    }
    let mean = r * p / (1.0 - p);
    let var = r * p / ((1.0 - p) * (1.0 - p));
    let cap = (mean + TRUNCATION_SIGMAS * (var.sqrt() + 1.0)).ceil() as usize + 8;
    // w_0 = (1-p)^r, stable for non-integer r through the log.
    truncate_pmf(
        (r * (1.0 - p).ln()).exp(),
        |k, w| w * p * (k as f64 + r) / (k as f64 + 1.0),
        tail_eps,
        cap,
    )
}

/// Geometric law on `{0, 1, ...}`, `P(k) = p (1-p)^k`, realized as
/// `NB(1, 1-p)`.
pub fn geometric(p: f64, tail_eps: f64) -> Result<FiniteMeasure, FamilyError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(FamilyError::InvalidParameter(format!(
            "geometric success probability {p} not in (0, 1]"
        )));
    }
    negative_binomial(1.0, 1.0 - p, tail_eps)
}

fn check_tail_eps(tail_eps: f64) -> Result<(), FamilyError> {
    if !(tail_eps > 0.0 && tail_eps < 1.0) {
        return Err(FamilyError::InvalidParameter(format!(
            "tail_eps {tail_eps} not in (0, 1)"
        )));
    }
    Ok(())
}

/// Shared truncation scan: iterate the pmf ratio from `w0` until the
/// retained mass exceeds `1 - tail_eps`.
fn truncate_pmf<R>(
    w0: f64,
    ratio: R,
    tail_eps: f64,
    cap: usize,
) -> Result<FiniteMeasure, FamilyError>
where
    R: Fn(usize, f64) -> f64,
{
    let mut w = w0;
    let mut cum = 0.0f64;
    let mut atoms: Vec<(Scalar, Scalar)> = Vec::new();
    for k in 0..=cap {
        atoms.push((Scalar::Float(k as f64), Scalar::Float(w)));
        cum += w;
        if 1.0 - cum < tail_eps {
            let defect = (1.0 - cum).max(0.0);
            return Ok(FiniteMeasure::from_atoms(atoms, Scalar::Float(defect))?);
        }
        w = ratio(k, w);
    }
    Err(FamilyError::TailNotReached {
        scanned: cap,
        tail_eps,
    })
}

/// Poisson CDF at integer `k` (regularized upper incomplete gamma).
pub fn poisson_cdf(lambda: f64, k: f64) -> f64 {
    if k < 0.0 {
        return 0.0;
    }
    if lambda == 0.0 {
        return 1.0;
    }
    gamma_ur(k.floor() + 1.0, lambda)
}

/// Negative binomial CDF at integer `k` (regularized incomplete beta).
pub fn negative_binomial_cdf(r: f64, p: f64, k: f64) -> f64 {
    if k < 0.0 {
        return 0.0;
    }
    if r == 0.0 || p == 0.0 {
        return 1.0;
    }
    beta_reg(r, k.floor() + 1.0, 1.0 - p)
}

/// Continuous family descriptor exposing density, CDF, mean, and the
/// closed-form stop-loss transform `t -> E(X - t)_+`.
#[derive(Clone, Debug, PartialEq)]
pub enum ContinuousFamily {
    /// Shape `alpha >= 0`, rate `beta > 0`; `alpha = 0` is a point mass at 0.
    Gamma {
        shape: f64,
        rate: f64,
    },
    /// `alpha, beta >= 0`, `alpha + beta > 0`; zero parameters degenerate to
    /// point masses at 0 and 1 respectively.
    Beta {
        alpha: f64,
        beta: f64,
    },
    Normal {
        mean: f64,
        variance: f64,
    },
}

impl ContinuousFamily {
    pub fn gamma(shape: f64, rate: f64) -> Result<Self, FamilyError> {
        if !(shape >= 0.0 && rate > 0.0) {
            return Err(FamilyError::InvalidParameter(format!(
                "gamma requires shape >= 0 and rate > 0, got ({shape}, {rate})"
            )));
        }
        let f = ContinuousFamily::Gamma { shape, rate };
        f.check_normalization()?;
        Ok(f)
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self, FamilyError> {
        if !(alpha >= 0.0 && beta >= 0.0 && alpha + beta > 0.0) {
            return Err(FamilyError::InvalidParameter(format!(
                "beta requires alpha, beta >= 0 with alpha + beta > 0, got ({alpha}, {beta})"
            )));
        }
        let f = ContinuousFamily::Beta { alpha, beta };
        f.check_normalization()?;
        Ok(f)
    }

    pub fn normal(mean: f64, variance: f64) -> Result<Self, FamilyError> {
        if variance.is_nan() || variance <= 0.0 {
            return Err(FamilyError::InvalidParameter(format!(
                "normal requires variance > 0, got {variance}"
            )));
        }
        let f = ContinuousFamily::Normal { mean, variance };
        f.check_normalization()?;
        Ok(f)
    }

    /// The location of the point mass for degenerate parameter values.
    pub fn point_mass(&self) -> Option<f64> {
        match *self {
            ContinuousFamily::Gamma { shape, .. } => (shape == 0.0).then_some(0.0),
            ContinuousFamily::Beta { alpha, beta } => {
                if alpha == 0.0 {
                    Some(0.0)
                } else if beta == 0.0 {
                    Some(1.0)
                } else {
                    None
                }
            }
            ContinuousFamily::Normal { .. } => None,
        }
    }

    /// Lebesgue density. Degenerate families return 0 everywhere (their mass
    /// is singular); interior endpoint singularities return `inf`.
    pub fn density(&self, x: f64) -> f64 {
        if self.point_mass().is_some() {
            return 0.0;
        }
        match *self {
            ContinuousFamily::Gamma { shape, rate } => {
                if x <= 0.0 {
                    if x == 0.0 && shape < 1.0 {
                        f64::INFINITY
                    } else if x == 0.0 && shape == 1.0 {
                        rate
                    } else {
                        0.0
                    }
                } else {
                    (shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - ln_gamma(shape)).exp()
                }
            }
            ContinuousFamily::Beta { alpha, beta } => {
                if !(0.0..=1.0).contains(&x) {
                    0.0
                } else if x == 0.0 || x == 1.0 {
                    let edge_shape = if x == 0.0 { alpha } else { beta };
                    match edge_shape.partial_cmp(&1.0).unwrap() {
                        std::cmp::Ordering::Less => f64::INFINITY,
                        std::cmp::Ordering::Equal => {
                            (ln_gamma(alpha + beta) - ln_gamma(alpha) - ln_gamma(beta)).exp()
                        }
                        std::cmp::Ordering::Greater => 0.0,
                    }
                } else {
                    (ln_gamma(alpha + beta) - ln_gamma(alpha) - ln_gamma(beta)
                        + (alpha - 1.0) * x.ln()
                        + (beta - 1.0) * (1.0 - x).ln())
                    .exp()
                }
            }
            ContinuousFamily::Normal { mean, variance } => {
                let z = (x - mean) * (x - mean) / variance;
                (-0.5 * z).exp() / (2.0 * std::f64::consts::PI * variance).sqrt()
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if let Some(c) = self.point_mass() {
            return if x >= c { 1.0 } else { 0.0 };
        }
        match *self {
            ContinuousFamily::Gamma { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    gamma_lr(shape, rate * x)
                }
            }
            ContinuousFamily::Beta { alpha, beta } => {
                if x <= 0.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    beta_reg(alpha, beta, x)
                }
            }
            ContinuousFamily::Normal { mean, variance } => normal_cdf((x - mean) / variance.sqrt()),
        }
    }

    pub fn mean(&self) -> f64 {
        if let Some(c) = self.point_mass() {
            return c;
        }
        match *self {
            ContinuousFamily::Gamma { shape, rate } => shape / rate,
            ContinuousFamily::Beta { alpha, beta } => alpha / (alpha + beta),
            ContinuousFamily::Normal { mean, .. } => mean,
        }
    }

    pub fn variance(&self) -> f64 {
        if self.point_mass().is_some() {
            return 0.0;
        }
        match *self {
            ContinuousFamily::Gamma { shape, rate } => shape / (rate * rate),
            ContinuousFamily::Beta { alpha, beta } => {
                let s = alpha + beta;
                alpha * beta / (s * s * (s + 1.0))
            }
            ContinuousFamily::Normal { variance, .. } => variance,
        }
    }

    /// Stop-loss transform `E(X - t)_+`, from the closed forms:
    /// normal `sigma phi(z) + (m - t)(1 - Phi(z))` with `z = (t - m)/sigma`;
    /// gamma and beta via the regularized incomplete gamma/beta identities
    /// `E[X 1_{X>t}] = mean * (1 - F_{shifted}(t))` with the first parameter
    /// shifted by one.
    pub fn stop_loss(&self, t: f64) -> f64 {
        if let Some(c) = self.point_mass() {
            return (c - t).max(0.0);
        }
        match *self {
            ContinuousFamily::Gamma { shape, rate } => {
                if t <= 0.0 {
                    return self.mean() - t;
                }
                let upper_mean = 1.0 - gamma_lr(shape + 1.0, rate * t);
                let upper_mass = 1.0 - gamma_lr(shape, rate * t);
                (shape / rate) * upper_mean - t * upper_mass
            }
            ContinuousFamily::Beta { alpha, beta } => {
                if t <= 0.0 {
                    return self.mean() - t;
                }
                if t >= 1.0 {
                    return 0.0;
                }
                let upper_mean = 1.0 - beta_reg(alpha + 1.0, beta, t);
                let upper_mass = 1.0 - beta_reg(alpha, beta, t);
                self.mean() * upper_mean - t * upper_mass
            }
            ContinuousFamily::Normal { mean, variance } => {
                let sigma = variance.sqrt();
                let z = (t - mean) / sigma;
                sigma * standard_normal_density(z) + (mean - t) * (1.0 - normal_cdf(z))
            }
        }
    }

    /// Natural window holding all but a negligible tail of the mass, used as
    /// the default discretization bounds.
    pub fn default_bounds(&self) -> (f64, f64) {
        if let Some(c) = self.point_mass() {
            return (c - 0.5, c + 0.5);
        }
        match *self {
            ContinuousFamily::Gamma { shape, rate } => {
                let mut hi = (shape / rate + 1.0) * 2.0;
                while gamma_ur(shape, rate * hi) > 1e-13 {
                    hi *= 2.0;
                }
                (0.0, hi)
            }
            ContinuousFamily::Beta { .. } => (0.0, 1.0),
            ContinuousFamily::Normal { mean, variance } => {
                let sigma = variance.sqrt();
                (mean - 8.0 * sigma, mean + 8.0 * sigma)
            }
        }
    }

    /// Midpoint discretization on `grid_n` equal cells over `[lo, hi]`: an
    /// atom at each cell midpoint weighted by the CDF increment. The mass
    /// outside `[lo, hi]` becomes the defect and must stay under
    /// `tail_budget`.
    pub fn discretize(
        &self,
        grid_n: usize,
        lo: f64,
        hi: f64,
        tail_budget: f64,
    ) -> Result<FiniteMeasure, FamilyError> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(FamilyError::InvalidGrid(format!("lo {lo} >= hi {hi}")));
        }
        if grid_n < 2 {
            return Err(FamilyError::InvalidGrid(format!(
                "grid_n {grid_n} must be >= 2"
            )));
        }
        let excluded = (1.0 - self.cdf(hi) + self.cdf(lo)).max(0.0);
        if excluded > tail_budget {
            return Err(FamilyError::GridExcludesMass {
                lo,
                hi,
                excluded,
                allowed: tail_budget,
            });
        }
        if let Some(c) = self.point_mass() {
            return Ok(FiniteMeasure::dirac(Scalar::Float(c)));
        }
        let h = (hi - lo) / grid_n as f64;
        let mut atoms = Vec::with_capacity(grid_n);
        let mut left_cdf = self.cdf(lo);
        for i in 0..grid_n {
            let right = if i + 1 == grid_n {
                hi
            } else {
                lo + (i as f64 + 1.0) * h
            };
            let right_cdf = self.cdf(right);
            let mid = lo + (i as f64 + 0.5) * h;
            atoms.push((Scalar::Float(mid), Scalar::Float(right_cdf - left_cdf)));
            left_cdf = right_cdf;
        }
        Ok(FiniteMeasure::from_atoms(atoms, Scalar::Float(excluded))?)
    }

    /// Integral of `phi` against the density, splitting at the given kinks
    /// of `phi`. Degenerate families evaluate `phi` at the point mass.
    ///
    /// Endpoint singularities of gamma and beta densities (shape parameters
    /// below 1) are removed exactly by the substitution `v = x^shape`, so
    /// the quadrature only ever sees bounded integrands.
    pub fn expect_phi<F: Fn(f64) -> f64>(&self, phi: F, kinks: &[f64]) -> f64 {
        if let Some(c) = self.point_mass() {
            return phi(c);
        }
        let tol = 1e-12;
        match *self {
            ContinuousFamily::Gamma { shape, rate } => {
                let (_, hi) = self.default_bounds();
                let ln_norm = shape * rate.ln() - ln_gamma(shape);
                let rest = |x: f64| (ln_norm - rate * x).exp() * phi(x);
                let split = first_cut(kinks, (1.0 / rate).min(1.0).min(hi));
                left_power_integral(shape, split, rest, tol)
                    + quad::tanh_sinh_split(|x| self.density(x) * phi(x), split, hi, kinks, tol)
                    + phi(hi) * gamma_ur(shape, rate * hi)
            }
            ContinuousFamily::Beta { alpha, beta } => {
                let ln_norm = ln_gamma(alpha + beta) - ln_gamma(alpha) - ln_gamma(beta);
                let left_split = first_cut(kinks, 0.5);
                let right_split = last_cut(kinks, 0.5);
                let left_rest = |x: f64| (ln_norm + (beta - 1.0) * (1.0 - x).ln()).exp() * phi(x);
                let right_rest =
                    |y: f64| (ln_norm + (alpha - 1.0) * (1.0 - y).ln()).exp() * phi(1.0 - y);
                left_power_integral(alpha, left_split, left_rest, tol)
                    + quad::tanh_sinh_split(
                        |x| self.density(x) * phi(x),
                        left_split,
                        right_split,
                        kinks,
                        tol,
                    )
                    + left_power_integral(beta, 1.0 - right_split, right_rest, tol)
            }
            ContinuousFamily::Normal { .. } => {
                let (lo, hi) = self.default_bounds();
                quad::tanh_sinh_split(|x| phi(x) * self.density(x), lo, hi, kinks, tol)
            }
        }
    }

    /// Construction-time self check: the density must integrate to 1 within
    /// `1e-9` (quadrature on the bulk plus, for gamma and normal, the
    /// analytic tail mass beyond the integration window).
    fn check_normalization(&self) -> Result<(), FamilyError> {
        if self.point_mass().is_some() {
            return Ok(());
        }
        let total = match *self {
            ContinuousFamily::Normal { mean, variance } => {
                let sigma = variance.sqrt();
                let (lo, hi) = (mean - 10.0 * sigma, mean + 10.0 * sigma);
                quad::tanh_sinh(|x| self.density(x), lo, hi, 1e-12) + 2.0 * normal_cdf(-10.0)
            }
            _ => self.expect_phi(|_| 1.0, &[]),
        };
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(FamilyError::Normalization(total));
        }
        Ok(())
    }
}

/// Smallest kink inside `(0, cap)`, or `cap` itself: the end of the
/// substituted left piece.
fn first_cut(kinks: &[f64], cap: f64) -> f64 {
    kinks
        .iter()
        .copied()
        .filter(|k| *k > 0.0 && *k < cap)
        .fold(cap, f64::min)
}

/// Largest kink inside `(cap, 1)`, or `cap` itself: the start of the
/// substituted right piece for beta laws.
fn last_cut(kinks: &[f64], cap: f64) -> f64 {
    kinks
        .iter()
        .copied()
        .filter(|k| *k > cap && *k < 1.0)
        .fold(cap, f64::max)
}

/// `int_0^s x^(a-1) rest(x) dx`. For `a < 1` the substitution `v = x^a`
/// turns the integrand into the bounded `rest(v^(1/a)) / a`.
fn left_power_integral<F: Fn(f64) -> f64>(a: f64, s: f64, rest: F, tol: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if a >= 1.0 {
        quad::tanh_sinh(|x| x.powf(a - 1.0) * rest(x), 0.0, s, tol)
    } else {
        quad::tanh_sinh(|v| rest(v.powf(1.0 / a)), 0.0, s.powf(a), tol) / a
    }
}

pub fn standard_normal_density(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}
