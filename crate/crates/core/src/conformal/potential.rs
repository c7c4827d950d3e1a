//! Mean-zero periodic solutions of `4 pi a (-u'') = s` on `[-a, a]`.
//!
//! With `r = -s / (4 pi a)` the solution is built cell by cell from the
//! antiderivatives `P(x) = int r` and `Q(x) = int (x - t) r(t) dt`, each cell
//! integral taken with Gauss-Legendre nodes so that kinks of `s` at cell
//! boundaries (the gluing seam sits on the grid) cost nothing. The slope at
//! `-a` is fixed by periodicity of `u`, the additive constant by zero mean.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{LongitudinalFactor, QuadratureConfig};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// The potential `u = Delta^{-1} (e^{2 phi})`, sampled at
/// `x_i = -a + i h`, `h = 2a / n`, `i = 0..n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Potential {
    pub a: f64,
    pub n: usize,
    pub samples: Vec<f64>,
    /// `u'` at the same nodes.
    pub derivative: Vec<f64>,
    /// `max_i |(-4 pi a) D^2 u_i - s(x_i)|`, `D^2` the centred second difference.
    pub residual: f64,
    /// `u'(a) - u'(-a)`; vanishes when the source has zero mean.
    pub flux_mismatch: f64,
}

impl Potential {
    pub fn step(&self) -> f64 {
        2.0 * self.a / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        -self.a + self.step() * i as f64
    }

    /// `int u dV` by the periodic trapezoid rule on the nodes.
    pub fn mean(&self) -> f64 {
        self.samples.iter().sum::<f64>() / self.n as f64
    }
}

/// Solve `Delta_g u = source` for mean-zero periodic `u` on `n` cells.
///
/// The residual is the centred second difference of the sampled solution,
/// assembled from the per-cell integrals rather than from the samples so
/// that it is not swamped by cancellation when `h` is small.
pub fn solve_periodic<F: Fn(f64) -> f64>(a: f64, source: F, n: usize, cell_nodes: usize) -> Potential {
    let h = 2.0 * a / n as f64;
    let k = -1.0 / (4.0 * PI * a);
    let (xi, wi) = gauss_legendre(cell_nodes);

    // per cell: int r, int (x_{i+1} - t) r, int (a - t)^2 / 2 r
    let mut i1 = vec![0.0; n];
    let mut i2 = vec![0.0; n];
    let mut i3 = 0.0;
    for c in 0..n {
        let lo = -a + h * c as f64;
        let hi = lo + h;
        let (mut s1, mut s2) = (0.0, 0.0);
        for (x, w) in xi.iter().zip(&wi) {
            let t = lo + 0.5 * h * (1.0 + x);
            let r = k * source(t);
            let ww = 0.5 * h * w;
            s1 += ww * r;
            s2 += ww * (hi - t) * r;
            i3 += ww * 0.5 * (a - t) * (a - t) * r;
        }
        i1[c] = s1;
        i2[c] = s2;
    }

    let mut p = vec![0.0; n + 1];
    let mut q = vec![0.0; n + 1];
    for c in 0..n {
        p[c + 1] = p[c] + i1[c];
        q[c + 1] = q[c] + h * p[c] + i2[c];
    }
    let p0 = -q[n] / (2.0 * a);
    let u0 = -a * p0 - i3 / (2.0 * a);
    let samples: Vec<f64> = (0..n).map(|i| u0 + p0 * h * i as f64 + q[i]).collect();
    let derivative: Vec<f64> = (0..n).map(|i| p0 + p[i]).collect();

    // D_i = u_{i+1} - u_i = h (p0 + P_i) + I2_i, so
    // D_i - D_{i-1} = h (P_i - P_{i-1}) + I2_i - I2_{i-1}
    let mut residual: f64 = 0.0;
    for i in 0..n {
        // for i = 0 the previous cell is n - 1 and P_0 - P_{n-1} = I1_{n-1} - P_n
        let (dp, prev) = if i == 0 { (i1[n - 1] - p[n], n - 1) } else { (i1[i - 1], i - 1) };
        let d2 = h * dp + i2[i] - i2[prev];
        let s = source(-a + h * i as f64);
        residual = residual.max((-4.0 * PI * a * d2 / (h * h) - s).abs());
    }
    Potential {
        a,
        n,
        samples,
        derivative,
        residual,
        flux_mismatch: p[n],
    }
}

/// The potential `Delta^{-1} (e^{2 phi})` of a unit-area factor, i.e. the
/// mean-zero solution of `Delta_g u = e^{2 phi} - 1`.
pub fn solve_potential(factor: &LongitudinalFactor, cfg: &QuadratureConfig) -> Result<Potential> {
    cfg.validate()?;
    let a = factor.a();
    let area = factor.area(cfg.n.max(256));
    if (area - 1.0).abs() > cfg.area_tol {
        return Err(Error::precondition(format!(
            "conformal factor must have unit area, got {area}"
        )));
    }
    let pot = solve_periodic(a, |x| factor.source(x), cfg.n, cfg.cell_nodes);
    let scale = 1.0
        + (0..cfg.n)
            .map(|i| factor.source(pot.node(i)).abs())
            .fold(0.0, f64::max);
    if pot.residual / scale > cfg.residual_tol {
        return Err(Error::convergence(format!(
            "potential residual {:e} exceeds tolerance {:e} at n = {}",
            pot.residual, cfg.residual_tol, cfg.n
        )));
    }
    Ok(pot)
}

/// `u(x1)` at an arbitrary point, integrating `u'' = -s / (4 pi a)` from the
/// nearest node on the left.
pub fn potential_at(factor: &LongitudinalFactor, pot: &Potential, x: f64) -> f64 {
    let a = pot.a;
    let x = super::wrap(a, x);
    let h = pot.step();
    let i = (((x + a) / h).floor() as usize).min(pot.n - 1);
    let xi = pot.node(i);
    let t = x - xi;
    if t == 0.0 {
        return pot.samples[i];
    }
    let (g, w) = gauss_legendre(16);
    let k = -1.0 / (4.0 * PI * a);
    let mut acc = 0.0;
    for (z, wz) in g.iter().zip(&w) {
        let sigma = 0.5 * t * (1.0 + z);
        acc += 0.5 * t * wz * (t - sigma) * k * factor.source(xi + sigma);
    }
    pot.samples[i] + pot.derivative[i] * t + acc
}
