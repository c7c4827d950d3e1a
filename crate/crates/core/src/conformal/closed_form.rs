//! Closed form of the bubble functional in terms of elementary functions and
//! `Li_2`.
//!
//! The expression, as usually printed, is
//! `coth(a) e^{2a} B / (48 a (e^{4a} - 1) pi)` with
//!
//! ```text
//! B = 48a - 64a^2 - 48a C + 16a^2 C - 24a log4 + 24a C log4
//!   + 48a Le - 48a C Le - 24a Lq + 24a C Lq + 24a S + 12a^2 S + pi^2 S
//!   + 48a Le S - 6 Li2(-e^{-2a}) S + 18 Li2(-e^{2a}) S
//! ```
//!
//! where `C = cosh 2a`, `S = sinh 2a`, `Le = log(1 + e^{2a})` and
//! `Lq = log(a (1 + e^{2a}) / (e^{2a} - 1))`. Evaluated literally it
//! overflows for `a` of a few hundred and loses digits well before that, so
//! `B` is divided by `e^{2a}` term by term and `Li2(-e^{2a})` is inverted.

use std::f64::consts::{LN_2, PI};

use crate::error::{Error, Result};
use crate::specfun::dilog;

pub fn bubble_functional_closed_form(a: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::domain(format!("rectangle parameter must be positive, got {a}")));
    }
    let ie = (-2.0 * a).exp();
    // C / e^{2a}, S / e^{2a}
    let c = 0.5 * (1.0 + ie * ie);
    let s = 0.5 * (1.0 - ie * ie);
    let l4 = 2.0 * LN_2;
    let le = 2.0 * a + ie.ln_1p();
    let lq = a.ln() + (2.0 / (2.0 * a).exp_m1()).ln_1p();
    let li_small = dilog(-ie)?;
    // Li2(-u) + Li2(-1/u) = -pi^2/6 - log(u)^2 / 2
    let li_big = -PI * PI / 6.0 - 2.0 * a * a - li_small;
    let a2 = a * a;
    let b = 48.0 * a * ie - 64.0 * a2 * ie - 48.0 * a * c + 16.0 * a2 * c
        - 24.0 * a * l4 * ie
        + 24.0 * a * c * l4
        + 48.0 * a * le * ie
        - 48.0 * a * c * le
        - 24.0 * a * lq * ie
        + 24.0 * a * c * lq
        + 24.0 * a * s
        + 12.0 * a2 * s
        + PI * PI * s
        + 48.0 * a * le * s
        - 6.0 * li_small * s
        + 18.0 * li_big * s;
    let coth = 1.0 / a.tanh();
    Ok(coth * b / (48.0 * a * PI * -(-4.0 * a).exp_m1()))
}
