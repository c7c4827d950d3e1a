//! Green's function and Robin's mass of a unit-area flat torus.
//!
//! For the lattice `(1, tau)` and a displacement `w` measured in that
//! lattice's units,
//!
//! ```text
//! G = -(1/2 pi) log |theta_1(w | tau) / eta(tau)| + (Im w)^2 / (2 Im tau)
//! ```
//!
//! The kernel is invariant under constant rescaling of the metric, so the
//! unit-area torus uses the same expression with `w = sqrt(Im tau) * d`,
//! `d` the unit-area displacement written in the reduced frame.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flat_trace::ztilde_flat_with;
use crate::lattice::{Point, TorusShape};
use crate::specfun::{log_abs_eta, log_abs_theta1, SeriesConfig, EULER_GAMMA};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreensEval {
    pub g: f64,
    /// `-(1/2 pi) log d(x, y)`.
    pub log_part: f64,
    /// Regular part `H = G - log_part`.
    pub h: f64,
    pub dist: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobinMassField {
    pub points: Vec<Point>,
    pub mass: Vec<f64>,
}

impl RobinMassField {
    /// `max - min` of the sampled mass.
    pub fn spread(&self) -> f64 {
        let hi = self.mass.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = self.mass.iter().copied().fold(f64::INFINITY, f64::min);
        hi - lo
    }
}

pub fn greens_flat(shape: &TorusShape, x: Point, y: Point) -> Result<GreensEval> {
    greens_flat_with(shape, x, y, &SeriesConfig::default())
}

pub fn greens_flat_with(shape: &TorusShape, x: Point, y: Point, cfg: &SeriesConfig) -> Result<GreensEval> {
    let d = shape.wrap_displacement(y.to_complex() - x.to_complex());
    let dist = d.norm();
    if dist == 0.0 {
        return Err(Error::domain(
            "Green's function is singular at coincident points; use robin_mass for the diagonal",
        ));
    }
    let tau = shape.reduced_tau();
    let s = tau.im.sqrt();
    let w: Complex64 = d * s;
    let lt = log_abs_theta1(w, tau, cfg)?;
    let le = log_abs_eta(tau, cfg)?;
    let g = -(lt - le) / (2.0 * PI) + w.im * w.im / (2.0 * tau.im);
    let log_part = -dist.ln() / (2.0 * PI);
    Ok(GreensEval {
        g,
        log_part,
        h: g - log_part,
        dist,
    })
}

/// Robin's mass of the unit-area torus, from the diagonal of the regular
/// part: `-(1/2 pi) log(|theta_1'(0)| / |eta|) - (1/4 pi) log(Im tau)` with
/// `theta_1'(0) = 2 pi eta^3`. Constant on a flat torus; `x` is accepted for
/// interface symmetry with the conformal case.
pub fn robin_mass(shape: &TorusShape, x: Point) -> Result<f64> {
    robin_mass_with(shape, x, &SeriesConfig::default())
}

pub fn robin_mass_with(shape: &TorusShape, _x: Point, cfg: &SeriesConfig) -> Result<f64> {
    let tau = shape.reduced_tau();
    let le = log_abs_eta(tau, cfg)?;
    Ok(-((2.0 * PI).ln() + 2.0 * le) / (2.0 * PI) - tau.im.ln() / (4.0 * PI))
}

pub fn robin_mass_field(shape: &TorusShape, points: &[Point], cfg: &SeriesConfig) -> Result<RobinMassField> {
    let mass = points
        .iter()
        .map(|&p| robin_mass_with(shape, p, cfg))
        .collect::<Result<Vec<_>>>()?;
    Ok(RobinMassField {
        points: points.to_vec(),
        mass,
    })
}

/// Robin's mass after scaling the metric by `c`: distances scale by
/// `sqrt(c)` while the kernel is unchanged, so `m_c = m + (1/4 pi) log c`.
pub fn scaled_robin_mass(mass: f64, c: f64) -> f64 {
    mass + c.ln() / (4.0 * PI)
}

/// Regularized trace after scaling the metric by `c`. From
/// `Z_c(s) = c^s Z(s)` and the residue `1/(4 pi)` at area one:
/// `Z~_c = c Z~ + (c / 4 pi) log c`.
pub fn scaled_ztilde(ztilde: f64, c: f64) -> f64 {
    c * ztilde + c * c.ln() / (4.0 * PI)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassTraceReport {
    /// `int m dV - 2 log 2 + 2 gamma` at volume `4 pi`.
    pub mass_side: f64,
    /// `Z~(1)` at volume `4 pi`.
    pub trace_side: f64,
    pub residual: f64,
}

/// Compare the integrated Robin's mass with the regularized trace, both at
/// volume `4 pi`. The mass comes from theta_1, the trace from the eta formula.
pub fn mass_trace_check(shape: &TorusShape) -> Result<f64> {
    Ok(mass_trace_report(shape, &SeriesConfig::default())?.residual)
}

pub fn mass_trace_report(shape: &TorusShape, cfg: &SeriesConfig) -> Result<MassTraceReport> {
    let c = 4.0 * PI;
    let m1 = robin_mass_from_theta(shape, cfg)?;
    let mass_side = c * scaled_robin_mass(m1, c) - 2.0 * std::f64::consts::LN_2 + 2.0 * EULER_GAMMA;
    let trace_side = scaled_ztilde(ztilde_flat_with(shape, cfg)?, c);
    Ok(MassTraceReport {
        mass_side,
        trace_side,
        residual: mass_side - trace_side,
    })
}

/// Robin's mass through `theta_1'(0)` directly rather than `2 pi eta^3`.
fn robin_mass_from_theta(shape: &TorusShape, cfg: &SeriesConfig) -> Result<f64> {
    let tau = shape.reduced_tau();
    let tp = crate::specfun::theta1_prime_at_zero(tau, cfg)?;
    let le = log_abs_eta(tau, cfg)?;
    Ok(-(tp.norm().ln() - le) / (2.0 * PI) - tau.im.ln() / (4.0 * PI))
}
