//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use torustrace::{Point, TorusShape};

pub const EULER: f64 = 0.577_215_664_901_532_9;

/// Exponential integral `E1(x)` for `x > 0`.
pub fn e1(x: f64) -> f64 {
    assert!(x > 0.0);
    if x < 1.0 {
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..60 {
            term *= -x / k as f64;
            sum += term / k as f64;
        }
        -EULER - x.ln() - sum
    } else {
        // Lentz evaluation of the continued fraction
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Dual basis of the (unit-area) lattice basis.
pub fn dual_basis(shape: &TorusShape) -> [Point; 2] {
    let [w1, w2] = shape.basis();
    let det = w1.x * w2.y - w1.y * w2.x;
    [
        Point::new(w2.y / det, -w2.x / det),
        Point::new(-w1.y / det, w1.x / det),
    ]
}

/// Green's function at displacement `d` by Ewald splitting with parameter `t`:
/// the heat kernel integrated over `[t, inf)` spectrally and over `[0, t]`
/// through lattice images.
pub fn ewald_green(shape: &TorusShape, d: Point) -> f64 {
    let t = 0.01;
    let [d1, d2] = dual_basis(shape);
    let [w1, w2] = shape.basis();
    let mut spectral = 0.0;
    for m in -60i32..=60 {
        for n in -60i32..=60 {
            if m == 0 && n == 0 {
                continue;
            }
            let xi = Point::new(m as f64 * d1.x + n as f64 * d2.x, m as f64 * d1.y + n as f64 * d2.y);
            let lam = 4.0 * PI * PI * (xi.x * xi.x + xi.y * xi.y);
            spectral += (-lam * t).exp() * (2.0 * PI * (xi.x * d.x + xi.y * d.y)).cos() / lam;
        }
    }
    let mut images = 0.0;
    for m in -6i32..=6 {
        for n in -6i32..=6 {
            let lx = d.x - m as f64 * w1.x - n as f64 * w2.x;
            let ly = d.y - m as f64 * w1.y - n as f64 * w2.y;
            let r2 = lx * lx + ly * ly;
            if r2 / (4.0 * t) < 700.0 {
                images += e1(r2 / (4.0 * t)) / (4.0 * PI);
            }
        }
    }
    spectral + images - t
}

/// Eigenvalues `4 pi^2 |xi|^2 <= cutoff` by scanning every dual index in a
/// generous box, sorted.
pub fn brute_force_eigenvalues(shape: &TorusShape, cutoff: f64) -> Vec<f64> {
    let [d1, d2] = dual_basis(shape);
    // the box must contain the disc of radius sqrt(cutoff) / (2 pi)
    let r = cutoff.sqrt() / (2.0 * PI);
    let [w1, w2] = shape.basis();
    let k1 = (r * (w1.x * w1.x + w1.y * w1.y).sqrt()).ceil() as i64 + 1;
    let k2 = (r * (w2.x * w2.x + w2.y * w2.y).sqrt()).ceil() as i64 + 1;
    let mut out = Vec::new();
    for m in -k1..=k1 {
        for n in -k2..=k2 {
            if m == 0 && n == 0 {
                continue;
            }
            let x = m as f64 * d1.x + n as f64 * d2.x;
            let y = m as f64 * d1.y + n as f64 * d2.y;
            let lam = 4.0 * PI * PI * (x * x + y * y);
            if lam <= cutoff {
                out.push(lam);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

/// `eta(z)` from the pentagonal-number series
/// `q^(1/24) sum (-1)^k q^(k(3k-1)/2)` over all integers `k`.
pub fn eta_pentagonal(re: f64, im: f64) -> num_complex::Complex64 {
    use num_complex::Complex64;
    let z = Complex64::new(re, im);
    let i2pi = Complex64::new(0.0, 2.0 * PI);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in -200i64..=200 {
        let e = (k * (3 * k - 1) / 2) as f64;
        if e * im * 2.0 * PI > 745.0 {
            continue;
        }
        let s = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += (i2pi * z * e).exp() * s;
    }
    (i2pi * z / 24.0).exp() * sum
}

/// Point at lattice coordinates `(s, t)`.
pub fn lattice_point(shape: &TorusShape, s: f64, t: f64) -> Point {
    let [w1, w2] = shape.basis();
    Point::new(s * w1.x + t * w2.x, s * w1.y + t * w2.y)
}

pub fn test_shapes() -> Vec<(&'static str, TorusShape)> {
    vec![
        ("square", torustrace::make_torus(0.0, 1.0).unwrap()),
        ("hexagonal", torustrace::make_hex_torus()),
        ("twisted", torustrace::make_torus(0.23, 1.7).unwrap()),
    ]
}
