//! Special functions behind the closed-form trace formulas: Dedekind eta,
//! Jacobi theta_1, the real dilogarithm and the Euler-Mascheroni constant.
//!
//! Modular arguments are reduced to the standard fundamental domain before
//! any q-series is summed, so that `|q| <= exp(-pi*sqrt(3))` and only a
//! handful of terms are needed even for very long rectangles.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Returns the Euler-Mascheroni constant.
pub fn euler_gamma() -> f64 {
    EULER_GAMMA
}

/// A point of the upper half plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexModulus {
    pub re: f64,
    pub im: f64,
}

impl ComplexModulus {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(im > 0.0) || !re.is_finite() || !im.is_finite() {
            return Err(Error::domain(format!(
                "modulus must lie in the upper half plane, got {re} + {im}i"
            )));
        }
        Ok(ComplexModulus { re, im })
    }

    pub fn to_complex(self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

impl TryFrom<Complex64> for ComplexModulus {
    type Error = Error;

    fn try_from(z: Complex64) -> Result<Self> {
        ComplexModulus::new(z.re, z.im)
    }
}

/// Truncation controls for q-series and products.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesConfig {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            abs_tol: 1e-14,
            max_terms: 1_000_000,
        }
    }
}

impl SeriesConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) {
            return Err(Error::Config("abs_tol must be positive".into()));
        }
        if self.max_terms < 1 {
            return Err(Error::Config("max_terms must be at least 1".into()));
        }
        Ok(())
    }
}

/// Result of reducing a modulus into the standard fundamental domain
/// `|Re z| <= 1/2, |z| >= 1`.
///
/// `matrix = [a, b, c, d]` is the SL(2, Z) element with
/// `reduced = (a z + b) / (c z + d)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModularReduction {
    pub reduced: Complex64,
    pub matrix: [i64; 4],
    /// `eta(z) = eta_multiplier * eta(reduced)`.
    pub eta_multiplier: Complex64,
    /// `log |eta_multiplier|`, accumulated without forming the product.
    pub log_abs_multiplier: f64,
}

impl ModularReduction {
    /// The automorphy factor `c z + d` of the reduction matrix at `z`.
    pub fn automorphy(&self, z: Complex64) -> Complex64 {
        let [_, _, c, d] = self.matrix;
        z * c as f64 + d as f64
    }
}

/// Reduce `z` into the fundamental domain, tracking the SL(2, Z) matrix and
/// the eta multiplier.
pub fn reduce_modulus(z: ComplexModulus) -> ModularReduction {
    let mut tau = z.to_complex();
    let [mut a, mut b, mut c, mut d] = [1_i64, 0, 0, 1];
    let mut mult = Complex64::new(1.0, 0.0);
    let mut log_abs = 0.0;
    for _ in 0..10_000 {
        if tau.re.abs() > 0.5 {
            let k = tau.re.round();
            tau.re -= k;
            let ki = k as i64;
            a -= ki * c;
            b -= ki * d;
            // eta(t + k) = exp(i pi k / 12) eta(t)
            mult *= Complex64::from_polar(1.0, PI * k / 12.0);
        }
        if tau.norm_sqr() < 1.0 - 1e-14 {
            tau = -tau.inv();
            let (na, nb, nc, nd) = (-c, -d, a, b);
            a = na;
            b = nb;
            c = nc;
            d = nd;
            // eta(-1/t) = sqrt(-i t) eta(t)
            let s = (Complex64::new(0.0, -1.0) * tau).sqrt();
            mult *= s;
            log_abs += 0.5 * tau.norm().ln();
        } else {
            break;
        }
    }
    ModularReduction {
        reduced: tau,
        matrix: [a, b, c, d],
        eta_multiplier: mult,
        log_abs_multiplier: log_abs,
    }
}

fn terms_needed(r: f64, cfg: &SeriesConfig) -> Result<usize> {
    // tail of sum_{n > N} |log(1 - q^n)| is below r^(N+1) / (1 - r)^2
    let mut n = 1usize;
    let mut rn = r;
    while rn / ((1.0 - r) * (1.0 - r)) >= cfg.abs_tol {
        n += 1;
        rn *= r;
        if n > cfg.max_terms {
            return Err(Error::convergence(format!(
                "q-product needs more than {} terms (|q| = {r})",
                cfg.max_terms
            )));
        }
    }
    Ok(n)
}

fn eta_product(z: Complex64, cfg: &SeriesConfig) -> Result<Complex64> {
    let q = (Complex64::new(0.0, 2.0 * PI) * z).exp();
    let n = terms_needed(q.norm(), cfg)?;
    let mut prod = (Complex64::new(0.0, PI / 12.0) * z).exp();
    let mut qn = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        qn *= q;
        prod *= Complex64::new(1.0, 0.0) - qn;
    }
    Ok(prod)
}

/// Dedekind eta `q^(1/24) prod (1 - q^n)`, `q = exp(2 pi i z)`.
///
/// Arguments with `Im z < 0.5` are first mapped into the fundamental domain
/// with the weight-1/2 transformation laws.
pub fn dedekind_eta(z: ComplexModulus, cfg: &SeriesConfig) -> Result<Complex64> {
    cfg.validate()?;
    if z.im >= 0.5 {
        return eta_product(z.to_complex(), cfg);
    }
    let red = reduce_modulus(z);
    Ok(red.eta_multiplier * eta_product(red.reduced, cfg)?)
}

/// The two pieces of `log |eta(x + i y)|` for a reduced modulus: the part
/// that depends only on `y`, and the nonnegative twist part that carries
/// all dependence on `x`.
///
/// `log|1 - q^n| = log(1 - r^n) + 1/2 log1p(4 r^n sin^2(pi n x) / (1 - r^n)^2)`
/// with `r = |q|`, which keeps the x-dependence at full relative precision
/// even when it is far below one ulp of the total.
pub(crate) fn log_abs_eta_parts(x: f64, y: f64, cfg: &SeriesConfig) -> Result<(f64, f64)> {
    let r = (-2.0 * PI * y).exp();
    let n = terms_needed(r, cfg)?;
    let mut base = -PI * y / 12.0;
    let mut twist = 0.0;
    let mut rn = 1.0;
    for k in 1..=n {
        rn *= r;
        base += (-rn).ln_1p();
        let s = (PI * k as f64 * x).sin();
        twist += 0.5 * (4.0 * rn * s * s / ((1.0 - rn) * (1.0 - rn))).ln_1p();
    }
    Ok((base, twist))
}

/// `log |eta(z)|`, evaluated at the reduced modulus with the exact
/// logarithmic multiplier.
pub fn log_abs_eta(z: ComplexModulus, cfg: &SeriesConfig) -> Result<f64> {
    cfg.validate()?;
    let red = reduce_modulus(z);
    let (base, twist) = log_abs_eta_parts(red.reduced.re, red.reduced.im, cfg)?;
    Ok(red.log_abs_multiplier + base + twist)
}

/// Jacobi theta_1 with nome `q = exp(i pi z)`:
/// `2 sum_{n>=0} (-1)^n q^((n+1/2)^2) sin((2n+1) pi w)`.
pub fn jacobi_theta1(w: Complex64, z: ComplexModulus, cfg: &SeriesConfig) -> Result<Complex64> {
    cfg.validate()?;
    let tau = z.to_complex();
    let ipi_tau = Complex64::new(0.0, PI) * tau;
    // terms grow until (n + 1/2) exceeds |Im w| / Im z
    let turn = (w.im.abs() / z.im).ceil() as usize + 1;
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..cfg.max_terms {
        let e = n as f64 + 0.5;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * (ipi_tau * e * e).exp() * ((2.0 * e) * PI * w).sin();
        sum += term;
        if n > turn && term.norm() < cfg.abs_tol * sum.norm().max(1e-300) {
            return Ok(2.0 * sum);
        }
    }
    Err(Error::convergence(format!(
        "theta_1 series did not converge in {} terms",
        cfg.max_terms
    )))
}

/// Derivative `theta_1'(0 | z) = 2 pi sum (-1)^n (2n+1) q^((n+1/2)^2)`.
pub fn theta1_prime_at_zero(z: ComplexModulus, cfg: &SeriesConfig) -> Result<Complex64> {
    cfg.validate()?;
    let ipi_tau = Complex64::new(0.0, PI) * z.to_complex();
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..cfg.max_terms {
        let e = n as f64 + 0.5;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let term = sign * (2.0 * e) * (ipi_tau * e * e).exp();
        sum += term;
        if term.norm() < cfg.abs_tol * sum.norm().max(1e-300) {
            return Ok(2.0 * PI * sum);
        }
    }
    Err(Error::convergence("theta_1'(0) series did not converge"))
}

/// `log |1 - u|` without cancellation for small `u`.
fn ln_abs_one_minus(u: Complex64) -> f64 {
    0.5 * (u.norm_sqr() - 2.0 * u.re).ln_1p()
}

/// `log |theta_1(w | z)|` from the product expansion, for `z` in the
/// fundamental domain. `w` is first moved to the period cell centred at the
/// origin and the quasi-periodicity factor is added back in closed form.
///
/// Returns `-inf` at the lattice points.
pub fn log_abs_theta1(w: Complex64, z: ComplexModulus, cfg: &SeriesConfig) -> Result<f64> {
    cfg.validate()?;
    let tau = z.to_complex();
    let y = z.im;
    let k = (w.im / y).round();
    let mut w0 = w - tau * k;
    w0.re -= w0.re.round();
    // |theta_1(w0 + k tau)| = |theta_1(w0)| exp(pi k^2 y + 2 pi k Im w0)
    let shift = PI * k * k * y + 2.0 * PI * k * w0.im;

    let v = w0.im;
    let t = (-2.0 * PI * v.abs()).exp();
    let c = (2.0 * PI * w0.re).cos();
    let sin_part = PI * v.abs() - std::f64::consts::LN_2 + 0.5 * (t * t - 2.0 * t * c).ln_1p();

    let q2 = (Complex64::new(0.0, 2.0 * PI) * tau).exp();
    let n = terms_needed(q2.norm() * (2.0 * PI * v.abs()).exp(), cfg)?;
    let e_plus = (Complex64::new(0.0, 2.0 * PI) * w0).exp();
    let e_minus = e_plus.inv();
    let mut acc = 0.0;
    let mut q2n = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        q2n *= q2;
        acc += ln_abs_one_minus(q2n) + ln_abs_one_minus(q2n * e_plus) + ln_abs_one_minus(q2n * e_minus);
    }
    Ok(std::f64::consts::LN_2 - PI * y / 4.0 + sin_part + acc + shift)
}

// B_{2k} for k = 1..10
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Real dilogarithm `Li_2(x)` for `x <= 1`.
///
/// Arguments are mapped into `[-1, 1/2]` by the inversion and reflection
/// formulas; there the Bernoulli series in `u = -log(1 - x)` is summed.
pub fn dilog(x: f64) -> Result<f64> {
    const PI2_6: f64 = PI * PI / 6.0;
    if x.is_nan() || x > 1.0 {
        return Err(Error::domain(format!(
            "real dilogarithm needs x <= 1, got {x}"
        )));
    }
    if x == 1.0 {
        return Ok(PI2_6);
    }
    if x < -1.0 {
        let l = (-x).ln();
        return Ok(-PI2_6 - 0.5 * l * l - dilog_core(1.0 / x));
    }
    if x > 0.5 {
        return Ok(PI2_6 - x.ln() * (-x).ln_1p() - dilog_core(1.0 - x));
    }
    Ok(dilog_core(x))
}

fn dilog_core(x: f64) -> f64 {
    let u = -(-x).ln_1p();
    let u2 = u * u;
    let mut sum = u - 0.25 * u2;
    let mut pow = u;
    let mut fact = 1.0;
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let n = 2 * (k + 1);
        pow *= u2;
        fact *= (n as f64) * (n as f64 + 1.0);
        sum += b * pow / fact;
    }
    sum
}
