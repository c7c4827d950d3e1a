//! C-infinity approximations of the bubble near its Lipschitz seam.
//!
//! With `s = a - |x1|` the distance to the seam and `w` the width,
//!
//! ```text
//! f_w = (1 - chi(s)) b + chi(s) kappa (b * rho_w)
//! ```
//!
//! where `rho_w` is the standard compactly supported bump on `[-w, w]`,
//! `chi = 1` for `s <= w` and `chi = 0` for `s >= 2w`, and `kappa` restores
//! unit area. Away from the seam (`|x1| <= a - 2w`) `f_w` is the bubble.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::functional::functional_report;
use super::{bubble_factor, FactorKind, LongitudinalFactor, QuadratureConfig, Repr};
use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

const PANELS: usize = 8;
const NODES: usize = 16;

#[derive(Debug)]
pub(crate) struct SmoothedData {
    a: f64,
    width: f64,
    scale: f64,
    kappa: f64,
    bump_norm: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

/// `0` for `t <= 0`, `1` for `t >= 1`, smooth in between.
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let p = (-1.0 / t).exp();
    let q = (-1.0 / (1.0 - t)).exp();
    p / (p + q)
}

impl SmoothedData {
    fn bubble(&self, x: f64) -> f64 {
        let c = super::wrap(self.a, x).cosh();
        self.scale / (c * c)
    }

    /// Composite Gauss-Legendre over `[lo, hi]` in bump units.
    fn panel_sum<F: Fn(f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> f64 {
        let h = (hi - lo) / PANELS as f64;
        let mut acc = 0.0;
        for p in 0..PANELS {
            let mid = lo + (p as f64 + 0.5) * h;
            for (z, w) in self.nodes.iter().zip(&self.weights) {
                acc += 0.5 * h * w * f(mid + 0.5 * h * z);
            }
        }
        acc
    }

    /// `(b * rho_w)(x)`, split at the seam kink when it falls inside the window.
    fn mollified(&self, x: f64) -> f64 {
        let w = self.width;
        let g = |u: f64| bump(u) * self.bubble(x - w * u);
        // kink where x - w u = +-a
        let seam = if x >= 0.0 { (x - self.a) / w } else { (x + self.a) / w };
        let total = if seam > -1.0 && seam < 1.0 {
            self.panel_sum(-1.0, seam, g) + self.panel_sum(seam, 1.0, g)
        } else {
            self.panel_sum(-1.0, 1.0, g)
        };
        total / self.bump_norm
    }

    fn blend(&self, x: f64) -> f64 {
        let s = self.a - x.abs();
        1.0 - smooth_step((s - self.width) / self.width)
    }

    pub(crate) fn density(&self, x: f64) -> f64 {
        let s = self.a - x.abs();
        if s >= 2.0 * self.width {
            return self.bubble(x);
        }
        let chi = self.blend(x);
        (1.0 - chi) * self.bubble(x) + chi * self.kappa * self.mollified(x)
    }
}

/// The smoothed bubble of the given width, `0 < width < 1`, `2 width < a`.
pub fn smoothed_bubble(a: f64, width: f64) -> Result<LongitudinalFactor> {
    bubble_factor(a)?;
    if !(width > 0.0 && width < 1.0) {
        return Err(Error::domain(format!("smoothing width must lie in (0, 1), got {width}")));
    }
    if 2.0 * width >= a {
        return Err(Error::domain(format!(
            "smoothing width {width} is too large for a = {a}: need 2 width < a"
        )));
    }
    let (nodes, weights) = gauss_legendre(NODES);
    let mut data = SmoothedData {
        a,
        width,
        scale: a / a.tanh(),
        kappa: 1.0,
        bump_norm: 1.0,
        nodes,
        weights,
    };
    data.bump_norm = data.panel_sum(-1.0, 0.0, bump) + data.panel_sum(0.0, 1.0, bump);
    // match the area of the blended part of one side, [a - 2w, a]
    let lo = a - 2.0 * width;
    let orig = data.panel_sum(lo, a, |x| data.blend(x) * data.bubble(x));
    let moll = data.panel_sum(lo, a, |x| data.blend(x) * data.mollified(x));
    data.kappa = orig / moll;
    Ok(LongitudinalFactor {
        a,
        kind: FactorKind::SmoothedBubble { width },
        repr: Repr::Smoothed(Arc::new(data)),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingRow {
    pub width: f64,
    pub f_smoothed: f64,
    pub diff: f64,
    pub area_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingTable {
    pub a: f64,
    pub f_bubble: f64,
    pub rows: Vec<SmoothingRow>,
    /// `|F[phi_w] - F[phi]|` is nondecreasing in `w`.
    pub monotone: bool,
}

/// `|F[phi_w] - F[phi]|` for each width.
pub fn smoothing_convergence(a: f64, widths: &[f64], cfg: &QuadratureConfig) -> Result<SmoothingTable> {
    let f_bubble = functional_report(&bubble_factor(a)?, cfg)?.value;
    let mut rows = Vec::with_capacity(widths.len());
    for &w in widths {
        let f = smoothed_bubble(a, w)?;
        let fw = functional_report(&f, cfg)?.value;
        rows.push(SmoothingRow {
            width: w,
            f_smoothed: fw,
            diff: (fw - f_bubble).abs(),
            area_error: f.area(cfg.n) - 1.0,
        });
    }
    let mut sorted: Vec<&SmoothingRow> = rows.iter().collect();
    sorted.sort_by(|x, y| x.width.total_cmp(&y.width));
    let monotone = sorted.windows(2).all(|p| p[0].diff <= p[1].diff);
    Ok(SmoothingTable {
        a,
        f_bubble,
        rows,
        monotone,
    })
}
