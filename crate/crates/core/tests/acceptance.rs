//! Acceptance checks: one PASS/FAIL line per criterion; exits nonzero if any
//! criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::{ewald_green, lattice_point, test_shapes};
use torustrace::conformal::{
    bubble_factor, conformal_change_functional, second_variation, second_variation_fd,
    smoothing_convergence, solve_potential, twist_invariance_check, Profile, QuadratureConfig,
    VariationDirection,
};
use torustrace::flat_trace::{sphere_constant, twist_comparison, ztilde_flat};
use torustrace::greens::{greens_flat, mass_trace_check, robin_mass_field};
use torustrace::hideseek::{trace_estimate, McConfig};
use torustrace::specfun::SeriesConfig;
use torustrace::{make_hex_torus, make_rect_torus, make_torus, Point};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn cfg() -> QuadratureConfig {
    QuadratureConfig::default().with_n(1 << 14)
}

fn hexagonal_trace() -> Outcome {
    let (z, dt) = timed(|| ztilde_flat(&make_hex_torus()).unwrap());
    outcome(
        (z + 0.2286).abs() <= 5e-4 && dt < Duration::from_secs(1),
        format!("ztilde = {z:.6}, {dt:?}"),
    )
}

fn sphere_value() -> Outcome {
    let s = sphere_constant();
    let closed = (2.0 * common::EULER - 1.0 - (4.0 * PI).ln()) / (4.0 * PI);
    outcome(
        (s + 0.18912).abs() <= 1e-5 && (s - closed).abs() < 1e-15,
        format!("sphere constant = {s:.8}"),
    )
}

fn bubbled(a: f64) -> (f64, Duration) {
    timed(|| {
        let f = conformal_change_functional(&bubble_factor(a).unwrap(), &cfg()).unwrap();
        ztilde_flat(&make_rect_torus(a).unwrap()).unwrap() + f
    })
}

fn sphere_approach() -> Outcome {
    let sc = sphere_constant();
    let runs: Vec<(f64, f64, Duration)> = [5.0, 10.0, 20.0, 40.0]
        .iter()
        .map(|&a| {
            let (z, dt) = bubbled(a);
            (a, (z - sc).abs(), dt)
        })
        .collect();
    let decreasing = runs.windows(2).all(|w| w[1].1 < w[0].1);
    let close = runs[3].1 <= 0.02;
    let fast = runs.iter().all(|r| r.2 < Duration::from_secs(5));
    let gaps: Vec<String> = runs.iter().map(|r| format!("a={}: {:.3e} ({:?})", r.0, r.1, r.2)).collect();
    outcome(decreasing && close && fast, format!("|gap| {}", gaps.join(", ")))
}

fn approach_from_below() -> Outcome {
    let sc = sphere_constant();
    let vals: Vec<(f64, f64)> = [10.0, 20.0, 40.0].iter().map(|&a| (a, bubbled(a).0)).collect();
    let pass = vals.iter().all(|v| v.1 < sc);
    let txt: Vec<String> = vals.iter().map(|v| format!("a={}: {:.6}", v.0, v.1)).collect();
    outcome(pass, format!("{} vs {sc:.6}", txt.join(", ")))
}

fn asymptotics() -> Outcome {
    let a = 100.0;
    let z = ztilde_flat(&make_rect_torus(a).unwrap()).unwrap();
    let f = conformal_change_functional(&bubble_factor(a).unwrap(), &cfg()).unwrap();
    let flat_ratio = z * 12.0 * PI / a;
    let drop_ratio = f * 12.0 * PI / (-a);
    outcome(
        (0.98..=1.02).contains(&flat_ratio) && (0.95..=1.05).contains(&drop_ratio),
        format!("ztilde*12pi/a = {flat_ratio:.4} (need [0.98, 1.02]), F*12pi/(-a) = {drop_ratio:.4} (need [0.95, 1.05])"),
    )
}

fn potential_residual() -> Outcome {
    let f = bubble_factor(6.0).unwrap();
    let r14 = solve_potential(&f, &cfg()).unwrap().residual;
    let r15 = solve_potential(&f, &cfg().with_n(1 << 15)).unwrap().residual;
    let ratio = r14 / r15;
    outcome(
        r14 <= 1e-6 && (ratio - 4.0).abs() <= 0.5,
        format!("a = 6: residual {r14:.3e} at 2^14, ratio {ratio:.3} to 2^15"),
    )
}

fn greens_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut spread: f64 = 0.0;
    for (_, shape) in test_shapes() {
        let x = Point::new(0.0, 0.0);
        for i in 0..5 {
            for j in 0..5 {
                let y = lattice_point(&shape, (i as f64 + 0.5) / 5.0, (j as f64 + 0.5) / 5.0);
                worst = worst.max((greens_flat(&shape, x, y).unwrap().g - ewald_green(&shape, y)).abs());
            }
        }
        let pts: Vec<Point> = (0..20).map(|k| lattice_point(&shape, k as f64 / 20.0, (k * 7 % 20) as f64 / 20.0)).collect();
        spread = spread.max(robin_mass_field(&shape, &pts, &SeriesConfig::default()).unwrap().spread());
    }
    outcome(
        worst <= 1e-6 && spread <= 1e-8,
        format!("max |theta - spectral| = {worst:.2e}, mass spread = {spread:.2e}"),
    )
}

fn mass_trace() -> Outcome {
    let sq = mass_trace_check(&make_torus(0.0, 1.0).unwrap()).unwrap();
    let hex = mass_trace_check(&make_hex_torus()).unwrap();
    outcome(
        sq.abs() <= 1e-6 && hex.abs() <= 1e-6,
        format!("residuals square {sq:.2e}, hexagonal {hex:.2e}"),
    )
}

fn second_variation_signs() -> Outcome {
    let square = make_rect_torus(PI).unwrap();
    let mut modes = Vec::new();
    for k in 1..=5 {
        modes.push(Profile::Cos(k));
        modes.push(Profile::Sin(k));
    }
    let square_min = modes
        .iter()
        .map(|p| second_variation(&square, &VariationDirection::Longitudinal(p.clone()), &cfg()).unwrap())
        .fold(f64::INFINITY, f64::min);
    let long = make_rect_torus(10.0).unwrap();
    let lowest = second_variation(&long, &VariationDirection::Longitudinal(Profile::Cos(1)), &cfg()).unwrap();
    let mut fd_worst: f64 = 0.0;
    for (a, shape) in [(PI, &square), (10.0, &long)] {
        let sv = second_variation(shape, &VariationDirection::Longitudinal(Profile::Cos(1)), &cfg()).unwrap();
        let fd = second_variation_fd(a, &Profile::Cos(1), 1e-3, &cfg()).unwrap();
        fd_worst = fd_worst.max(((fd - sv) / sv).abs());
    }
    outcome(
        square_min > 0.0 && lowest < 0.0 && fd_worst <= 1e-4,
        format!("square min {square_min:.4e}, rect 10 lowest {lowest:.4e}, fd rel err {fd_worst:.2e}"),
    )
}

fn twist_tests() -> Outcome {
    let mut residual: f64 = 0.0;
    for (a, t) in [(10.0, 0.3), (20.0, 0.5)] {
        let r = twist_invariance_check(a, t, &bubble_factor(a).unwrap(), &cfg()).unwrap();
        residual = residual.max(r.residual);
    }
    let xs: Vec<f64> = (0..=10).map(|i| i as f64 / 20.0).collect();
    let monotone = [5.0, 10.0, 20.0].iter().all(|&y| {
        let t = twist_comparison(y, &xs).unwrap();
        t.rows.windows(2).all(|w| w[1].ztilde <= w[0].ztilde)
    });
    outcome(
        residual <= 1e-10 && monotone,
        format!("F twist residual {residual:.2e}, trace nonincreasing in x: {monotone}"),
    )
}

fn smoothing() -> Outcome {
    let widths = [0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001];
    let t = smoothing_convergence(2.0, &widths, &QuadratureConfig::default()).unwrap();
    let last = t.rows.iter().find(|r| r.width == 0.001).unwrap().diff;
    outcome(
        t.monotone && last <= 1e-4,
        format!("a = 2, monotone {}, |dF| at width 1e-3 = {last:.2e}", t.monotone),
    )
}

fn monte_carlo() -> Outcome {
    let shape = make_rect_torus(10.0).unwrap();
    let (est, dt) = timed(|| trace_estimate(&shape, &McConfig::new(0.05, 10_000, 2024)).unwrap());
    let exact = ztilde_flat(&shape).unwrap();
    let z = (est.value - exact) / est.std_err;
    outcome(
        z.abs() <= 3.0 && dt < Duration::from_secs(60),
        format!("estimate {:.4} +- {:.4} vs {exact:.4} (z = {z:.2}), {dt:?}", est.value, est.std_err),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("hexagonal flat trace", hexagonal_trace),
        ("sphere constant", sphere_value),
        ("bubbled trace approaches the sphere", sphere_approach),
        ("approach from below", approach_from_below),
        ("flat and conformal asymptotics", asymptotics),
        ("potential residual", potential_residual),
        ("Green's oracle equivalence", greens_oracle),
        ("mass/trace identity", mass_trace),
        ("second-variation signs", second_variation_signs),
        ("twist tests", twist_tests),
        ("smoothing convergence", smoothing),
        ("Monte Carlo cross-check", monte_carlo),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} {}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, name, o.detail);
    }
    println!("acceptance: {} passed, {} failed", criteria.len() - failed, failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
