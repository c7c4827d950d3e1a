//! Twist invariance of `F` for longitudinal factors.
//!
//! Gluing the rectangle with a twist `t` gives the lattice spanned by
//! `(2a, 2 pi t)` and `(0, 2 pi)`. Its fundamental parallelogram is
//! parametrized by `(s, r) in [0, 1)^2 -> (-a + 2a s, 2 pi (t s + r))` with
//! constant Jacobian `4 pi a`, which cancels against `dV = dx / (4 pi a)`.
//! The potential of a longitudinal factor solves the same 1-D problem for
//! every twist, so the functional is evaluated over the parallelogram with
//! the shared potential samples.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::potential::solve_potential;
use super::{LongitudinalFactor, QuadratureConfig};
use crate::error::{Error, Result};
use crate::quadrature::periodic_simpson_weights;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwistInvariance {
    pub a: f64,
    pub twist: f64,
    pub f_rect: f64,
    pub f_twisted: f64,
    pub residual: f64,
}

const TRANSVERSE_NODES: usize = 16;

/// `F` over the parallelogram of twist `t`, with transverse nodes shifted by
/// `offset` in `[0, 1)`.
fn parallelogram_functional(
    factor: &LongitudinalFactor,
    u: &[f64],
    twist: f64,
    offset: f64,
) -> f64 {
    let a = factor.a();
    let n = u.len();
    let ws = periodic_simpson_weights(n, 1.0);
    let mut total = 0.0;
    for j in 0..TRANSVERSE_NODES {
        let r = (j as f64 + offset) / TRANSVERSE_NODES as f64;
        let mut row = 0.0;
        for i in 0..n {
            let s = i as f64 / n as f64;
            let x1 = -a + 2.0 * a * s;
            // the transverse coordinate of the sample; the integrand does not
            // depend on it for a longitudinal factor
            let _x2 = (2.0 * PI * (twist * s + r)).rem_euclid(2.0 * PI);
            let f = factor.density(x1);
            row += ws[i] * (factor.phi(x1) * f / (2.0 * PI) - u[i] * f);
        }
        total += row;
    }
    total / TRANSVERSE_NODES as f64
}

/// `|F` on the twisted torus `- F` on the rectangle`|` for a longitudinal factor.
pub fn twist_invariance_check(
    a: f64,
    twist: f64,
    factor: &LongitudinalFactor,
    cfg: &QuadratureConfig,
) -> Result<TwistInvariance> {
    twist_invariance_check_with(a, twist, factor, cfg, 0.5)
}

pub fn twist_invariance_check_with(
    a: f64,
    twist: f64,
    factor: &LongitudinalFactor,
    cfg: &QuadratureConfig,
    offset: f64,
) -> Result<TwistInvariance> {
    if (a - factor.a()).abs() > 1e-12 * a.max(1.0) {
        return Err(Error::precondition(format!(
            "factor is defined for a = {}, not {a}",
            factor.a()
        )));
    }
    if !twist.is_finite() || !(0.0..1.0).contains(&offset) {
        return Err(Error::domain("twist must be finite and offset in [0, 1)"));
    }
    let cfg = QuadratureConfig {
        n: cfg.n + cfg.n % 2,
        ..*cfg
    };
    let pot = solve_potential(factor, &cfg)?;
    let f_rect = parallelogram_functional(factor, &pot.samples, 0.0, offset);
    let f_twisted = parallelogram_functional(factor, &pot.samples, twist, offset);
    Ok(TwistInvariance {
        a,
        twist,
        f_rect,
        f_twisted,
        residual: (f_twisted - f_rect).abs(),
    })
}
