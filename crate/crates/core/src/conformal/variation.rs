//! First and second variation of `F` along `e^{2 phi} = 1 + lambda psi` at
//! `lambda = 0`, where `F'' = (1/4 pi) int psi^2 dV - 2 int psi Delta^{-1} psi dV`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::functional::evaluate_functional;
use super::potential::solve_periodic;
use super::{variation_factor, Profile, QuadratureConfig};
use crate::error::{Error, Result};
use crate::lattice::TorusShape;

/// `cos * cos(2 pi xi . x) + sin * sin(2 pi xi . x)` with
/// `xi = m xi_1 + n xi_2`, `(xi_1, xi_2)` dual to the torus basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub m: i64,
    pub n: i64,
    pub cos: f64,
    pub sin: f64,
}

#[derive(Clone, Debug)]
pub enum VariationDirection {
    /// A function of `x1` on a rectangle torus.
    Longitudinal(Profile),
    /// A finite Fourier series on any torus.
    Fourier(Vec<FourierMode>),
}

const MEAN_TOL: f64 = 1e-10;

fn rect_a(shape: &TorusShape) -> Result<f64> {
    shape
        .rect_param()
        .ok_or_else(|| Error::precondition("longitudinal directions need a torus built from a rectangle"))
}

fn longitudinal_mean(a: f64, psi: &Profile, n: usize) -> Result<f64> {
    let mean = super::profile_mean(a, psi, n);
    if mean.abs() > MEAN_TOL {
        return Err(Error::precondition(format!(
            "variation direction must have zero mean, got {mean:e}"
        )));
    }
    Ok(mean)
}

/// Merge `+-xi` and check that no constant mode is present.
fn canonical_modes(modes: &[FourierMode]) -> Result<BTreeMap<(i64, i64), (f64, f64)>> {
    let mut out: BTreeMap<(i64, i64), (f64, f64)> = BTreeMap::new();
    for md in modes {
        if md.m == 0 && md.n == 0 {
            if md.cos != 0.0 {
                return Err(Error::precondition("variation direction must have zero mean"));
            }
            continue;
        }
        let flip = md.m < 0 || (md.m == 0 && md.n < 0);
        let (key, c, s) = if flip {
            ((-md.m, -md.n), md.cos, -md.sin)
        } else {
            ((md.m, md.n), md.cos, md.sin)
        };
        let e = out.entry(key).or_insert((0.0, 0.0));
        e.0 += c;
        e.1 += s;
    }
    Ok(out)
}

fn dual_eigenvalue(shape: &TorusShape, m: i64, n: i64) -> f64 {
    let [w1, w2] = shape.basis();
    let det = w1.x * w2.y - w2.x * w1.y;
    let d1 = [w2.y / det, -w2.x / det];
    let d2 = [-w1.y / det, w1.x / det];
    let x = m as f64 * d1[0] + n as f64 * d2[0];
    let y = m as f64 * d1[1] + n as f64 * d2[1];
    4.0 * PI * PI * (x * x + y * y)
}

/// `dF/dlambda` at `lambda = 0`, which is `(1/4 pi) int psi dV`. Returns the
/// computed value, zero up to rounding for admissible directions.
pub fn first_variation(shape: &TorusShape, psi: &VariationDirection, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    match psi {
        VariationDirection::Longitudinal(p) => {
            let a = rect_a(shape)?;
            Ok(longitudinal_mean(a, p, cfg.n)? / (4.0 * PI))
        }
        VariationDirection::Fourier(modes) => {
            canonical_modes(modes)?;
            Ok(0.0)
        }
    }
}

/// `d^2F/dlambda^2` at `lambda = 0`.
pub fn second_variation(shape: &TorusShape, psi: &VariationDirection, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    match psi {
        VariationDirection::Longitudinal(p) => {
            let a = rect_a(shape)?;
            longitudinal_mean(a, p, cfg.n)?;
            let v = solve_periodic(a, |x| p.eval(a, x), cfg.n, cfg.cell_nodes);
            // periodic trapezoid: spectrally accurate for smooth periodic data
            let (mut sq, mut cross) = (0.0, 0.0);
            for i in 0..cfg.n {
                let y = p.eval(a, v.node(i));
                sq += y * y;
                cross += y * v.samples[i];
            }
            let k = cfg.n as f64;
            Ok(sq / k / (4.0 * PI) - 2.0 * cross / k)
        }
        VariationDirection::Fourier(modes) => {
            let mut total = 0.0;
            for ((m, n), (c, s)) in canonical_modes(modes)? {
                let lam = dual_eigenvalue(shape, m, n);
                let norm = 0.5 * (c * c + s * s);
                total += norm / (4.0 * PI) - 2.0 * norm / lam;
            }
            Ok(total)
        }
    }
}

/// Finite-difference oracle `(F[lambda psi] - 2 F[0] + F[-lambda psi]) / lambda^2`
/// on the grid `cfg.n`, for longitudinal `psi` on the rectangle `a`.
pub fn second_variation_fd(a: f64, psi: &Profile, lambda: f64, cfg: &QuadratureConfig) -> Result<f64> {
    cfg.validate()?;
    if !(lambda > 0.0) {
        return Err(Error::domain("finite-difference step must be positive"));
    }
    let plus = variation_factor(a, psi.clone(), lambda)?;
    let minus = variation_factor(a, psi.clone(), -lambda)?;
    let fp = evaluate_functional(&plus, cfg.n, cfg.rule, cfg.cell_nodes);
    let fm = evaluate_functional(&minus, cfg.n, cfg.rule, cfg.cell_nodes);
    Ok((fp + fm) / (lambda * lambda))
}
