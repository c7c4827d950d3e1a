//! Closed-form spectral invariants of unit-area flat tori.
//!
//! With `z = x + iy` the reduced modulus, the regularized trace is
//!
//! ```text
//! Z~(1) = -(1/4 pi) log((2 pi)^2 y |eta(z)|^4) + (gamma - log 2) / (2 pi)
//! ```
//!
//! and `log det = log(y |eta(z)|^4)`, which is the same statement as the
//! linear trace/determinant relation below.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{classify_with_tol, lambda1, TorusClass, TorusShape};
use crate::specfun::{log_abs_eta_parts, reduce_modulus, ComplexModulus, SeriesConfig, EULER_GAMMA};

/// Flat-torus spectral summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub lambda1: f64,
    pub class: TorusClass,
    pub ztilde1: f64,
    pub logdet: f64,
    pub modulus: ComplexModulus,
}

/// Constant term shared by the trace formula.
fn trace_constant() -> f64 {
    (EULER_GAMMA - LN_2) / (2.0 * PI)
}

/// `Z~(1)` split as `(part depending on y only, twist part)`, with the twist
/// part `<= 0` carrying all dependence on `Re z` of the reduced modulus.
fn ztilde_parts(z: ComplexModulus, cfg: &SeriesConfig) -> Result<(f64, f64)> {
    cfg.validate()?;
    let red = reduce_modulus(z);
    let (x, y) = (red.reduced.re, red.reduced.im);
    let (base, twist) = log_abs_eta_parts(x, y, cfg)?;
    let head = -(4.0 * PI * PI * y).ln() / (4.0 * PI) - base / PI + trace_constant();
    Ok((head, -twist / PI))
}

fn ztilde_modulus(z: ComplexModulus, cfg: &SeriesConfig) -> Result<f64> {
    let (head, twist) = ztilde_parts(z, cfg)?;
    Ok(head + twist)
}

/// Regularized trace `Z~(1)` of the inverse Laplacian.
pub fn ztilde_flat(shape: &TorusShape) -> Result<f64> {
    ztilde_flat_with(shape, &SeriesConfig::default())
}

pub fn ztilde_flat_with(shape: &TorusShape, cfg: &SeriesConfig) -> Result<f64> {
    ztilde_modulus(shape.reduced_tau(), cfg)
}

/// `log det` of the Laplacian, obtained from `Z~(1)` through
/// `Z~(1) = -log det / (4 pi) - 2 log 2 / (2 pi) - log(pi) / (2 pi) + gamma / (2 pi)`.
pub fn logdet_flat(shape: &TorusShape) -> Result<f64> {
    logdet_flat_with(shape, &SeriesConfig::default())
}

pub fn logdet_flat_with(shape: &TorusShape, cfg: &SeriesConfig) -> Result<f64> {
    Ok(logdet_from_ztilde(ztilde_flat_with(shape, cfg)?))
}

pub fn logdet_from_ztilde(z: f64) -> f64 {
    -4.0 * PI * (z + tracedet_offset())
}

/// `2 log 2 / (2 pi) + log(pi) / (2 pi) - gamma / (2 pi)`.
pub fn tracedet_offset() -> f64 {
    (2.0 * LN_2 + PI.ln() - EULER_GAMMA) / (2.0 * PI)
}

/// Residual of the trace/determinant relation; zero up to rounding.
pub fn tracedet_residual(ztilde: f64, logdet: f64) -> f64 {
    ztilde + logdet / (4.0 * PI) + tracedet_offset()
}

pub fn spectral_report(shape: &TorusShape, cfg: &SeriesConfig, classify_tol: f64) -> Result<SpectralReport> {
    let ztilde1 = ztilde_flat_with(shape, cfg)?;
    Ok(SpectralReport {
        lambda1: lambda1(shape),
        class: classify_with_tol(shape, classify_tol),
        ztilde1,
        logdet: logdet_from_ztilde(ztilde1),
        modulus: shape.tau(),
    })
}

/// Regularized trace of the round sphere of area `4 pi`:
/// `(2 gamma - 1 - log(4 pi)) / (4 pi)`.
pub fn sphere_constant() -> f64 {
    (2.0 * EULER_GAMMA - 1.0 - (4.0 * PI).ln()) / (4.0 * PI)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistRow {
    pub x: f64,
    pub ztilde: f64,
    /// `Z~(x + iy) - Z~(iy)`, computed directly rather than by subtraction.
    pub gap: f64,
    /// Whether this entry is at most the `x = 0` entry.
    pub below_untwisted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistTable {
    pub y: f64,
    pub rows: Vec<TwistRow>,
    /// True when every twisted entry is at most the untwisted one.
    pub decreasing: bool,
}

/// Regularized trace of `x + iy` for a list of twists `x` in `[0, 1/2]`.
pub fn twist_comparison(y: f64, x_values: &[f64]) -> Result<TwistTable> {
    twist_comparison_with(y, x_values, &SeriesConfig::default())
}

pub fn twist_comparison_with(y: f64, x_values: &[f64], cfg: &SeriesConfig) -> Result<TwistTable> {
    if !(y > 1.0) || !y.is_finite() {
        return Err(Error::domain(format!("twist comparison needs y > 1, got {y}")));
    }
    if let Some(x) = x_values.iter().find(|x| !(0.0..=0.5).contains(*x)) {
        return Err(Error::domain(format!("twists must lie in [0, 1/2], got {x}")));
    }
    let base = ztilde_modulus(ComplexModulus::new(0.0, y)?, cfg)?;
    let mut rows = Vec::with_capacity(x_values.len());
    for &x in x_values {
        let (head, gap) = ztilde_parts(ComplexModulus::new(x, y)?, cfg)?;
        let ztilde = head + gap;
        rows.push(TwistRow {
            x,
            ztilde,
            gap,
            below_untwisted: ztilde <= base,
        });
    }
    let decreasing = rows.iter().all(|r| r.below_untwisted);
    Ok(TwistTable { y, rows, decreasing })
}
