//! Longitudinal conformal changes of the rectangle torus
//! `[-a, a] x [0, 2 pi]` with metric `g = (1 / 4 pi a) Euclidean`.
//!
//! Everything depends on `x1` only, so `dV = dx1 dx2 / (4 pi a)` integrates
//! out `x2` once: `int h dV = (1 / 2a) int_{-a}^{a} h(x1) dx1`, and the metric
//! Laplacian acts as `4 pi a (-d^2/dx1^2)`.

mod closed_form;
mod functional;
mod potential;
mod smoothing;
mod twist;
mod variation;

use std::f64::consts::{LN_2, PI};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use closed_form::bubble_functional_closed_form;
pub use functional::{
    bubble_report, conformal_change_functional, evaluate_functional, bubble_sweep,
    functional_report, robin_mass_change, ztilde_conformal, BubbleReport, FunctionalReport,
    SweepRow,
};
pub use potential::{potential_at, solve_periodic, solve_potential, Potential};
pub use smoothing::{smoothed_bubble, smoothing_convergence, SmoothingRow, SmoothingTable};
pub use twist::{twist_invariance_check, twist_invariance_check_with, TwistInvariance};
pub use variation::{
    first_variation, second_variation, second_variation_fd, FourierMode, VariationDirection,
};

/// Quadrature rule used for the 1-D integrals of the functional.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Simpson,
    Gauss,
}

impl std::str::FromStr for Rule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "simpson" => Ok(Rule::Simpson),
            "gauss" => Ok(Rule::Gauss),
            other => Err(Error::Config(format!("unknown quadrature rule {other:?}"))),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::Simpson => "simpson",
            Rule::Gauss => "gauss",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Number of grid cells on `[-a, a]`.
    pub n: usize,
    pub rule: Rule,
    /// Stopping tolerance for Richardson-extrapolated functional values.
    pub rel_tol: f64,
    /// Largest grid the adaptive functional evaluation may reach.
    pub max_n: usize,
    /// Gauss-Legendre nodes per cell for the antiderivatives.
    pub cell_nodes: usize,
    /// Bound on `max |residual| / (1 + max |source|)` for a potential solve.
    pub residual_tol: f64,
    /// Bound on `|int e^{2 phi} dV - 1|`.
    pub area_tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            n: 1 << 14,
            rule: Rule::Simpson,
            rel_tol: 1e-10,
            max_n: 1 << 22,
            cell_nodes: 8,
            residual_tol: 1e-3,
            area_tol: 1e-8,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::Config(format!("n must be at least 4, got {}", self.n)));
        }
        if self.rule == Rule::Simpson && self.n % 2 != 0 {
            return Err(Error::Config(format!("Simpson needs an even n, got {}", self.n)));
        }
        if !(self.rel_tol > 0.0) || !(self.residual_tol > 0.0) || !(self.area_tol > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        if self.cell_nodes < 2 || self.cell_nodes > 64 {
            return Err(Error::Config("cell_nodes must lie in [2, 64]".into()));
        }
        if self.max_n < self.n {
            return Err(Error::Config("max_n must be at least n".into()));
        }
        Ok(())
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn with_rule(mut self, rule: Rule) -> Self {
        self.rule = rule;
        self
    }
}

/// A function of `x1` on `[-a, a]`, extended periodically.
#[derive(Clone)]
pub enum Profile {
    /// `sqrt(2) cos(k pi x1 / a)`, unit `L^2(dV)` norm.
    Cos(u32),
    /// `sqrt(2) sin(k pi x1 / a)`, unit `L^2(dV)` norm.
    Sin(u32),
    /// Values on the uniform periodic grid `x_i = -a + 2a i / len`,
    /// linearly interpolated.
    Sampled(Arc<[f64]>),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Profile::Cos(k) => write!(f, "Cos({k})"),
            Profile::Sin(k) => write!(f, "Sin({k})"),
            Profile::Sampled(v) => write!(f, "Sampled(len = {})", v.len()),
            Profile::Custom(_) => f.write_str("Custom"),
        }
    }
}

impl Profile {
    pub fn eval(&self, a: f64, x: f64) -> f64 {
        match self {
            Profile::Cos(k) => 2f64.sqrt() * (*k as f64 * PI * x / a).cos(),
            Profile::Sin(k) => 2f64.sqrt() * (*k as f64 * PI * x / a).sin(),
            Profile::Sampled(v) => interpolate_periodic(v, a, x),
            Profile::Custom(f) => f(wrap(a, x)),
        }
    }

    /// Eigenvalue of the metric Laplacian for the trigonometric modes.
    pub fn mode_eigenvalue(&self, a: f64) -> Option<f64> {
        match self {
            Profile::Cos(k) | Profile::Sin(k) if *k > 0 => {
                Some(4.0 * PI.powi(3) * (*k as f64).powi(2) / a)
            }
            _ => None,
        }
    }
}

/// Reduce `x` into `[-a, a)`.
pub(crate) fn wrap(a: f64, x: f64) -> f64 {
    if (-a..a).contains(&x) {
        return x;
    }
    let p = 2.0 * a;
    let y = (x + a).rem_euclid(p) - a;
    if y >= a {
        -a
    } else {
        y
    }
}

fn interpolate_periodic(v: &[f64], a: f64, x: f64) -> f64 {
    let n = v.len();
    let t = (wrap(a, x) + a) / (2.0 * a) * n as f64;
    let i = (t.floor() as usize).min(n - 1);
    let frac = t - i as f64;
    v[i] * (1.0 - frac) + v[(i + 1) % n] * frac
}

/// What produced a factor.
#[derive(Clone, Debug)]
pub enum FactorKind {
    Flat,
    Bubble,
    SmoothedBubble { width: f64 },
    Variation { psi: Profile, lambda: f64 },
    Sampled,
}

#[derive(Clone, Debug)]
enum Repr {
    Flat,
    Bubble { scale: f64, log_scale: f64 },
    Smoothed(Arc<smoothing::SmoothedData>),
    Variation { psi: Profile, lambda: f64 },
    Sampled(Arc<[f64]>),
}

/// A conformal factor `e^{2 phi}` depending on `x1` only.
#[derive(Clone, Debug)]
pub struct LongitudinalFactor {
    a: f64,
    kind: FactorKind,
    repr: Repr,
}

fn check_a(a: f64) -> Result<()> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("rectangle parameter must be positive, got {a}")));
    }
    Ok(())
}

/// `log cosh x` without overflow.
pub(crate) fn log_cosh(x: f64) -> f64 {
    let y = x.abs();
    y + (-2.0 * y).exp().ln_1p() - LN_2
}

impl LongitudinalFactor {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn kind(&self) -> &FactorKind {
        &self.kind
    }

    /// `e^{2 phi(x1)}`.
    pub fn density(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Flat => 1.0,
            Repr::Bubble { scale, .. } => {
                let c = wrap(self.a, x).cosh();
                scale / (c * c)
            }
            Repr::Smoothed(d) => d.density(wrap(self.a, x)),
            Repr::Variation { psi, lambda } => 1.0 + lambda * psi.eval(self.a, x),
            Repr::Sampled(v) => interpolate_periodic(v, self.a, x),
        }
    }

    /// `phi(x1) = log(e^{2 phi}) / 2`.
    pub fn phi(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Flat => 0.0,
            Repr::Bubble { log_scale, .. } => 0.5 * log_scale - log_cosh(wrap(self.a, x)),
            Repr::Variation { psi, lambda } => 0.5 * (lambda * psi.eval(self.a, x)).ln_1p(),
            _ => 0.5 * self.density(x).ln(),
        }
    }

    /// `e^{2 phi} - 1`, formed without cancellation where possible.
    pub fn source(&self, x: f64) -> f64 {
        match &self.repr {
            Repr::Flat => 0.0,
            Repr::Variation { psi, lambda } => lambda * psi.eval(self.a, x),
            _ => self.density(x) - 1.0,
        }
    }

    /// `int e^{2 phi} dV` by composite Gauss-Legendre on `n` cells.
    pub fn area(&self, n: usize) -> f64 {
        let rule = crate::quadrature::gauss_legendre(8);
        1.0 + crate::quadrature::composite_gauss(|x| self.source(x), -self.a, self.a, n, &rule)
            / (2.0 * self.a)
    }
}

/// The flat metric, `phi = 0`.
pub fn flat_factor(a: f64) -> Result<LongitudinalFactor> {
    check_a(a)?;
    Ok(LongitudinalFactor {
        a,
        kind: FactorKind::Flat,
        repr: Repr::Flat,
    })
}

/// `e^{2 phi} = a / (tanh(a) cosh^2(x1))`, the pullback of the round sphere
/// of area one through the cylinder map, glued across `x1 = +-a`.
pub fn bubble_factor(a: f64) -> Result<LongitudinalFactor> {
    check_a(a)?;
    let scale = a / a.tanh();
    Ok(LongitudinalFactor {
        a,
        kind: FactorKind::Bubble,
        repr: Repr::Bubble {
            scale,
            log_scale: scale.ln(),
        },
    })
}

/// `e^{2 phi} = 1 + lambda psi`. Requires `int psi dV = 0` and positivity on
/// a check grid.
pub fn variation_factor(a: f64, psi: Profile, lambda: f64) -> Result<LongitudinalFactor> {
    check_a(a)?;
    if !lambda.is_finite() {
        return Err(Error::domain("lambda must be finite"));
    }
    let mean = profile_mean(a, &psi, 1 << 12);
    if mean.abs() > 1e-12 {
        return Err(Error::precondition(format!(
            "variation direction must have zero mean, got {mean:e}"
        )));
    }
    let n = 1 << 12;
    for i in 0..n {
        let x = -a + 2.0 * a * i as f64 / n as f64;
        if 1.0 + lambda * psi.eval(a, x) <= 0.0 {
            return Err(Error::domain(format!(
                "1 + lambda psi is not positive at x1 = {x}"
            )));
        }
    }
    Ok(LongitudinalFactor {
        a,
        kind: FactorKind::Variation {
            psi: psi.clone(),
            lambda,
        },
        repr: Repr::Variation { psi, lambda },
    })
}

/// A factor given by samples on the uniform periodic grid of `[-a, a)`.
pub fn sampled_factor(a: f64, values: Vec<f64>) -> Result<LongitudinalFactor> {
    check_a(a)?;
    if values.len() < 2 {
        return Err(Error::domain("a sampled factor needs at least two values"));
    }
    if let Some(v) = values.iter().find(|v| !(**v > 0.0) || !v.is_finite()) {
        return Err(Error::domain(format!("conformal factor must be positive, got {v}")));
    }
    Ok(LongitudinalFactor {
        a,
        kind: FactorKind::Sampled,
        repr: Repr::Sampled(values.into()),
    })
}

/// `int psi dV` on the rectangle, by the periodic trapezoid rule with `n`
/// nodes (exact for trigonometric modes of order below `n`).
pub(crate) fn profile_mean(a: f64, psi: &Profile, n: usize) -> f64 {
    if let Profile::Sampled(v) = psi {
        return v.iter().sum::<f64>() / v.len() as f64;
    }
    let h = 2.0 * a / n as f64;
    (0..n).map(|i| psi.eval(a, -a + h * i as f64)).sum::<f64>() / n as f64
}

/// The map from the rectangle to the unit sphere,
/// `(2 e^{x1} cos x2, 2 e^{x1} sin x2, 1 - e^{2 x1}) / (1 + e^{2 x1})`.
pub fn sphere_map(x1: f64, x2: f64) -> [f64; 3] {
    // 2 e^x / (1 + e^{2x}) = sech x, (1 - e^{2x}) / (1 + e^{2x}) = -tanh x
    let s = 1.0 / x1.cosh();
    [s * x2.cos(), s * x2.sin(), -x1.tanh()]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bubble_has_unit_area() {
        for a in [0.5, 5.0, 20.0, 100.0] {
            let f = bubble_factor(a).unwrap();
            assert!((f.area(4096) - 1.0).abs() < 1e-12, "a = {a}");
        }
    }

    #[test]
    fn bubble_value_at_origin() {
        let f = bubble_factor(5.0).unwrap();
        let expect = 5.0 / 5f64.tanh();
        assert!((f.density(0.0) - expect).abs() < 1e-12);
        assert!((f.density(0.0) - 5.00045).abs() < 1e-5);
        assert!((f.phi(0.0) - 0.5 * expect.ln()).abs() < 1e-14);
    }

    #[test]
    fn bubble_is_even_and_periodic() {
        let f = bubble_factor(7.0).unwrap();
        for i in 0..50 {
            let x = -7.0 + 14.0 * i as f64 / 50.0;
            assert!((f.phi(x) - f.phi(-x)).abs() < 1e-14);
        }
        assert!((f.phi(7.0) - f.phi(-7.0)).abs() < 1e-14);
        assert!((f.density(7.0 + 0.3) - f.density(-7.0 + 0.3)).abs() < 1e-13);
    }

    #[test]
    fn log_cosh_is_stable() {
        assert!((log_cosh(0.3) - 0.3f64.cosh().ln()).abs() < 1e-15);
        assert!((log_cosh(800.0) - (800.0 - LN_2)).abs() < 1e-12);
    }

    #[test]
    fn sphere_map_basics() {
        assert_eq!(sphere_map(0.0, 0.0), [1.0, 0.0, 0.0]);
        let p = sphere_map(20.0, 1.0);
        assert!((p[2] + 1.0).abs() < 1e-8);
        for (x1, x2) in [(0.3, 1.0), (-2.0, 4.0), (5.0, 0.1)] {
            let p = sphere_map(x1, x2);
            let r = (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt();
            assert!((r - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sphere_map_agrees_with_exponential_form() {
        let (x1, x2) = (0.7_f64, 2.1_f64);
        let e = x1.exp();
        let d = 1.0 + e * e;
        let expect = [2.0 * e * x2.cos() / d, 2.0 * e * x2.sin() / d, (1.0 - e * e) / d];
        let p = sphere_map(x1, x2);
        for i in 0..3 {
            assert!((p[i] - expect[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn variation_factor_checks() {
        assert!(variation_factor(3.0, Profile::Cos(1), 0.5).is_ok());
        assert!(matches!(
            variation_factor(3.0, Profile::Cos(1), 2.0),
            Err(Error::Domain(_))
        ));
        let biased = Profile::Custom(Arc::new(|x: f64| 1.0 + x.cos()));
        assert!(matches!(
            variation_factor(3.0, biased, 0.1),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn wrap_into_period() {
        assert_eq!(wrap(2.0, 1.0), 1.0);
        assert!((wrap(2.0, 2.5) + 1.5).abs() < 1e-15);
        assert!((wrap(2.0, -2.5) - 1.5).abs() < 1e-15);
        assert_eq!(wrap(2.0, 2.0), -2.0);
    }

    #[test]
    fn rule_parsing() {
        assert_eq!("Gauss".parse::<Rule>().unwrap(), Rule::Gauss);
        assert!("trapezoid".parse::<Rule>().is_err());
    }
}
