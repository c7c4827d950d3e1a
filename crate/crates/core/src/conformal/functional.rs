//! The conformal-change functional
//! `F[phi] = (1/2 pi) int phi e^{2 phi} dV - int (Delta^{-1} e^{2 phi}) e^{2 phi} dV`
//! and the quantities built on it.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::potential::{potential_at, solve_periodic, solve_potential};
use super::{bubble_factor, closed_form, LongitudinalFactor, QuadratureConfig, Rule};
use crate::error::{Error, Result};
use crate::flat_trace::{sphere_constant, ztilde_flat};
use crate::lattice::{make_rect_torus, TorusShape};
use crate::quadrature::{gauss_legendre, periodic_simpson_weights};

/// `F[phi]` on a single grid of `n` cells, without refinement.
///
/// Simpson uses the potential samples directly. The Gauss rule writes the
/// potential term as the energy `4 pi a int (u')^2 dV`, which needs no
/// additive constant, and evaluates `u'` inside each cell by integrating
/// `u''` from the left node.
pub fn evaluate_functional(factor: &LongitudinalFactor, n: usize, rule: Rule, cell_nodes: usize) -> f64 {
    let a = factor.a();
    let pot = solve_periodic(a, |x| factor.source(x), n, cell_nodes);
    let h = 2.0 * a / n as f64;
    match rule {
        Rule::Simpson => {
            let w = periodic_simpson_weights(n, 2.0 * a);
            let mut acc = 0.0;
            for i in 0..n {
                let x = pot.node(i);
                let f = factor.density(x);
                acc += w[i] * (factor.phi(x) * f / (2.0 * PI) - pot.samples[i] * f);
            }
            acc / (2.0 * a)
        }
        Rule::Gauss => {
            let (g, wg) = gauss_legendre(cell_nodes);
            let k = -1.0 / (4.0 * PI * a);
            let mut phi_term = 0.0;
            let mut energy = 0.0;
            for i in 0..n {
                let lo = pot.node(i);
                for (z, wz) in g.iter().zip(&wg) {
                    let t = 0.5 * h * (1.0 + z);
                    let x = lo + t;
                    let f = factor.density(x);
                    phi_term += 0.5 * h * wz * factor.phi(x) * f;
                    // u'(lo + t) = u'(lo) + int_0^t u''
                    let mut du = pot.derivative[i];
                    for (y, wy) in g.iter().zip(&wg) {
                        du += 0.5 * t * wy * k * factor.source(lo + 0.5 * t * (1.0 + y));
                    }
                    energy += 0.5 * h * wz * du * du;
                }
            }
            (phi_term / (2.0 * PI) - 4.0 * PI * a * energy) / (2.0 * a)
        }
    }
}

/// Refinement history of an adaptive functional evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    /// Richardson-extrapolated value at the finest level.
    pub value: f64,
    /// `(n, F_n)` per level.
    pub levels: Vec<(usize, f64)>,
    /// Change of the extrapolated value across the last two levels.
    pub error_estimate: f64,
}

/// `F[phi]`, refining `n -> 2n` until two successive Richardson values
/// `F_2n + (F_2n - F_n) / 15` agree to `rel_tol` (relative, floored at 1).
pub fn functional_report(factor: &LongitudinalFactor, cfg: &QuadratureConfig) -> Result<FunctionalReport> {
    // validates the configuration, the unit area and the residual at cfg.n
    solve_potential(factor, cfg)?;
    if matches!(factor.kind(), super::FactorKind::Flat) {
        return Ok(FunctionalReport {
            value: 0.0,
            levels: vec![(cfg.n, 0.0)],
            error_estimate: 0.0,
        });
    }
    let mut n = cfg.n;
    let mut levels = vec![(n, evaluate_functional(factor, n, cfg.rule, cfg.cell_nodes))];
    let mut prev: Option<f64> = None;
    loop {
        if 2 * n > cfg.max_n {
            return Err(Error::convergence(format!(
                "functional did not reach rel_tol {:e} by n = {}",
                cfg.rel_tol, n
            )));
        }
        n *= 2;
        let fine = evaluate_functional(factor, n, cfg.rule, cfg.cell_nodes);
        let coarse = levels.last().unwrap().1;
        levels.push((n, fine));
        let rich = fine + (fine - coarse) / 15.0;
        if let Some(p) = prev {
            let err = (rich - p).abs();
            if err <= cfg.rel_tol * rich.abs().max(1.0) {
                return Ok(FunctionalReport {
                    value: rich,
                    levels,
                    error_estimate: err,
                });
            }
        }
        prev = Some(rich);
    }
}

pub fn conformal_change_functional(factor: &LongitudinalFactor, cfg: &QuadratureConfig) -> Result<f64> {
    Ok(functional_report(factor, cfg)?.value)
}

fn check_matching_shape(shape: &TorusShape, factor: &LongitudinalFactor) -> Result<()> {
    match shape.rect_param() {
        Some(a) if (a - factor.a()).abs() <= 1e-12 * a.max(1.0) => Ok(()),
        Some(a) => Err(Error::precondition(format!(
            "factor is defined for a = {}, torus has a = {a}",
            factor.a()
        ))),
        None => Err(Error::precondition(
            "conformal factors need a torus built from a rectangle",
        )),
    }
}

/// `Z~_phi(1) = F[phi] + Z~(1)` of the flat rectangle torus.
pub fn ztilde_conformal(shape: &TorusShape, factor: &LongitudinalFactor, cfg: &QuadratureConfig) -> Result<f64> {
    check_matching_shape(shape, factor)?;
    Ok(conformal_change_functional(factor, cfg)? + ztilde_flat(shape)?)
}

/// `m_phi(x) - m(x) = (1/2 pi) phi(x) - 2 u(x) + int e^{2 phi} u dV` at
/// `x = (x1, x2)`; independent of `x2`.
pub fn robin_mass_change(factor: &LongitudinalFactor, x1: f64, cfg: &QuadratureConfig) -> Result<f64> {
    let pot = solve_potential(factor, cfg)?;
    let a = factor.a();
    let w = simpson_or_trapezoid(cfg, a);
    let coupling = (0..pot.n)
        .map(|i| w[i] * factor.density(pot.node(i)) * pot.samples[i])
        .sum::<f64>()
        / (2.0 * a);
    Ok(factor.phi(x1) / (2.0 * PI) - 2.0 * potential_at(factor, &pot, x1) + coupling)
}

pub(crate) fn simpson_or_trapezoid(cfg: &QuadratureConfig, a: f64) -> Vec<f64> {
    if cfg.n % 2 == 0 {
        periodic_simpson_weights(cfg.n, 2.0 * a)
    } else {
        vec![2.0 * a / cfg.n as f64; cfg.n]
    }
}

/// Everything reported for one bubble evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BubbleReport {
    pub a: f64,
    pub width: Option<f64>,
    pub f_phi: f64,
    pub ztilde_flat: f64,
    pub ztilde_bubble: f64,
    pub sphere_constant: f64,
    pub gap: f64,
    pub closed_form_f: Option<f64>,
    pub potential_residual: f64,
    pub flux_mismatch: f64,
    pub area_error: f64,
    pub error_estimate: f64,
}

pub fn bubble_report(a: f64, width: Option<f64>, cfg: &QuadratureConfig) -> Result<BubbleReport> {
    let factor = match width {
        Some(w) => super::smoothed_bubble(a, w)?,
        None => bubble_factor(a)?,
    };
    let shape = make_rect_torus(a)?;
    let pot = solve_potential(&factor, cfg)?;
    let rep = functional_report(&factor, cfg)?;
    let zf = ztilde_flat(&shape)?;
    let zb = zf + rep.value;
    let sc = sphere_constant();
    Ok(BubbleReport {
        a,
        width,
        f_phi: rep.value,
        ztilde_flat: zf,
        ztilde_bubble: zb,
        sphere_constant: sc,
        gap: zb - sc,
        closed_form_f: match width {
            None => closed_form::bubble_functional_closed_form(a).ok(),
            Some(_) => None,
        },
        potential_residual: pot.residual,
        flux_mismatch: pot.flux_mismatch,
        area_error: factor.area(cfg.n) - 1.0,
        error_estimate: rep.error_estimate,
    })
}

/// One row of the bubble sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a: f64,
    pub ztilde_flat: f64,
    pub f_phi: f64,
    pub ztilde_bubble: f64,
    pub sphere_constant: f64,
    pub gap: f64,
}

/// Bubble results for each `a`, computed in parallel and returned in input
/// order.
pub fn bubble_sweep(a_values: &[f64], cfg: &QuadratureConfig) -> Result<Vec<SweepRow>> {
    a_values
        .par_iter()
        .map(|&a| {
            let f = conformal_change_functional(&bubble_factor(a)?, cfg)?;
            let zf = ztilde_flat(&make_rect_torus(a)?)?;
            let zb = zf + f;
            let sc = sphere_constant();
            Ok(SweepRow {
                a,
                ztilde_flat: zf,
                f_phi: f,
                ztilde_bubble: zb,
                sphere_constant: sc,
                gap: zb - sc,
            })
        })
        .collect()
}
