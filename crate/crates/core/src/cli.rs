//! Command-line front end. The binary is a thin wrapper around [`run`].
//!
//! Exit codes: 0 success, 1 usage, 2 domain/precondition/configuration/io,
//! 3 convergence or resource limits.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::Settings;
use crate::conformal::{
    bubble_report, bubble_sweep, second_variation, second_variation_fd, Profile, Rule,
    VariationDirection,
};
use crate::error::{Error, Result};
use crate::flat_trace::{spectral_report, twist_comparison_with, ztilde_flat_with};
use crate::greens::{greens_flat_with, mass_trace_report, robin_mass_field};
use crate::hideseek::{trace_estimate, McConfig};
use crate::lattice::{make_hex_torus, make_rect_torus, make_torus, Point, TorusShape};

#[derive(Parser, Debug)]
#[command(name = "torustrace", version, about = "Regularized trace of the inverse Laplacian on tori")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Tolerance file with one `key = value` per line.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Grid cells for the conformal quadrature.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Quadrature rule: simpson or gauss.
    #[arg(long, global = true)]
    pub rule: Option<String>,
    /// Relative tolerance for the refined functional.
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct ShapeArgs {
    /// Modulus `tau = RE + i IM`.
    #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
    pub tau: Option<Vec<f64>>,
    /// Rectangle `[-a, a] x [0, 2 pi]`.
    #[arg(long, value_name = "A", allow_negative_numbers = true)]
    pub rect: Option<f64>,
    /// Hexagonal torus.
    #[arg(long)]
    pub hex: bool,
}

impl ShapeArgs {
    fn build(&self) -> Result<TorusShape> {
        if let Some(t) = &self.tau {
            return make_torus(t[0], t[1]);
        }
        if let Some(a) = self.rect {
            return make_rect_torus(a);
        }
        Ok(make_hex_torus())
    }

    fn describe(&self) -> String {
        if let Some(t) = &self.tau {
            format!("tau={} {}", fmt12(t[0]), fmt12(t[1]))
        } else if let Some(a) = self.rect {
            format!("rect={}", fmt12(a))
        } else {
            "hex".into()
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Flat-torus spectral report.
    Flat {
        #[command(flatten)]
        shape: ShapeArgs,
    },
    /// Bubble sweep over a range of `a`, written as CSV.
    Sweep {
        #[arg(long, allow_negative_numbers = true)]
        a_min: f64,
        #[arg(long, allow_negative_numbers = true)]
        a_max: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Bubble functional and trace for one `a`.
    Bubble {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        /// Smoothing width.
        #[arg(long)]
        smooth: Option<f64>,
    },
    /// Green's function between two points (unit-area coordinates).
    Green {
        #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
        tau: Vec<f64>,
        #[arg(long, num_args = 2, value_names = ["X1", "X2"], allow_negative_numbers = true)]
        x: Vec<f64>,
        #[arg(long, num_args = 2, value_names = ["Y1", "Y2"], allow_negative_numbers = true)]
        y: Vec<f64>,
    },
    /// Robin's mass field and the mass/trace identity.
    Mass {
        #[arg(long, num_args = 2, value_names = ["RE", "IM"], allow_negative_numbers = true)]
        tau: Vec<f64>,
        /// Sample points per side of the mass grid.
        #[arg(long, default_value_t = 4)]
        grid: usize,
    },
    /// Trace of `x + iy` for several twists `x`.
    Twist {
        #[arg(long, allow_negative_numbers = true)]
        y: f64,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        x_list: Vec<f64>,
    },
    /// Second variation along a longitudinal mode of the rectangle `a`.
    Variation {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long)]
        mode: u32,
        /// Use the sine mode instead of the cosine mode.
        #[arg(long)]
        sin: bool,
        /// Step of the finite-difference check.
        #[arg(long, default_value_t = 1e-3)]
        fd_step: f64,
    },
    /// Monte Carlo hide-and-seek estimate of the trace.
    Mc {
        #[command(flatten)]
        shape: ShapeArgs,
        #[arg(long, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
    },
}

/// Provenance attached to every result.
#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: BTreeMap<String, String>,
    pub tolerances: BTreeMap<String, String>,
    pub library_version: String,
    pub timestamp: String,
}

impl RunManifest {
    fn new(command: &str, parameters: BTreeMap<String, String>, settings: &Settings) -> Self {
        RunManifest {
            command: command.to_string(),
            parameters,
            tolerances: settings.tolerances(),
            library_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        }
    }
}

/// `%.12g`-style formatting.
pub fn fmt12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let exp = x.abs().log10().floor() as i32;
    let sci = format!("{:.11e}", x);
    // rounding may bump the exponent, so read it back
    let (mant, e) = sci.split_once('e').unwrap();
    let e: i32 = e.parse().unwrap_or(exp);
    if (-5..12).contains(&e) {
        let decimals = (11 - e).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}{:02}", trim_zeros(mant.to_string()), if e < 0 { '-' } else { '+' }, e.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Domain(_) | Error::Precondition(_) | Error::Config(_) | Error::Io(_) => 2,
        Error::Convergence(_) | Error::Resource(_) => 3,
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn settings_for(cli: &Cli) -> Result<Settings> {
    let mut s = match &cli.config {
        Some(p) => Settings::from_file(p)?,
        None => Settings::default(),
    };
    if let Some(n) = cli.n {
        s.quadrature.n = n;
    }
    if let Some(r) = &cli.rule {
        s.quadrature.rule = r.parse::<Rule>()?;
    }
    if let Some(t) = cli.rel_tol {
        s.quadrature.rel_tol = t;
    }
    s.validate()?;
    Ok(s)
}

/// Text or JSON writer for one command.
struct Report<'a> {
    out: &'a mut dyn Write,
    json: bool,
    manifest: RunManifest,
    fields: Vec<(String, String)>,
}

impl<'a> Report<'a> {
    fn num(&mut self, key: &str, v: f64) {
        self.fields.push((key.into(), fmt12(v)));
    }

    fn text(&mut self, key: &str, v: impl ToString) {
        self.fields.push((key.into(), v.to_string()));
    }

    fn finish<T: Serialize>(self, result: &T) -> Result<()> {
        if self.json {
            let doc = serde_json::json!({ "manifest": self.manifest, "result": result });
            writeln!(self.out, "{}", serde_json::to_string_pretty(&doc).map_err(|e| Error::Config(e.to_string()))?)?;
        } else {
            let width = self.fields.iter().map(|f| f.0.len()).max().unwrap_or(0);
            for (k, v) in &self.fields {
                writeln!(self.out, "{k:<width$}  {v}")?;
            }
        }
        Ok(())
    }
}

fn params(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn point(v: &[f64]) -> Point {
    Point::new(v[0], v[1])
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    let settings = settings_for(cli)?;
    let q = settings.quadrature;
    match &cli.command {
        Command::Flat { shape } => {
            let sh = shape.build()?;
            let rep = spectral_report(&sh, &settings.series, settings.classify_tol)?;
            let mut r = Report {
                out,
                json: cli.json,
                manifest: RunManifest::new("flat", params(&[("shape", shape.describe())]), &settings),
                fields: vec![],
            };
            r.text("modulus", format!("{} + {}i", fmt12(rep.modulus.re), fmt12(rep.modulus.im)));
            r.num("lambda1", rep.lambda1);
            r.text("class", rep.class);
            r.num("ztilde1", rep.ztilde1);
            r.num("logdet", rep.logdet);
            r.finish(&rep)
        }
        Command::Sweep { a_min, a_max, steps, out: path } => {
            if !(*a_min > 0.0) || !(a_max >= a_min) || *steps == 0 {
                return Err(Error::domain("sweep needs 0 < a-min <= a-max and steps >= 1"));
            }
            let a_values: Vec<f64> = if *steps == 1 {
                vec![*a_min]
            } else {
                (0..*steps)
                    .map(|i| a_min + (a_max - a_min) * i as f64 / (*steps - 1) as f64)
                    .collect()
            };
            let rows = bubble_sweep(&a_values, &q)?;
            let manifest = RunManifest::new(
                "sweep",
                params(&[
                    ("a_min", fmt12(*a_min)),
                    ("a_max", fmt12(*a_max)),
                    ("steps", steps.to_string()),
                    ("out", path.display().to_string()),
                ]),
                &settings,
            );
            write_sweep_csv(path, &rows)?;
            let sidecar = manifest_path(path);
            std::fs::write(
                &sidecar,
                serde_json::to_string_pretty(&manifest).map_err(|e| Error::Config(e.to_string()))? + "\n",
            )?;
            let mut r = Report { out, json: cli.json, manifest, fields: vec![] };
            r.text("rows", rows.len());
            r.text("csv", path.display());
            r.text("manifest", sidecar.display());
            r.finish(&rows)
        }
        Command::Bubble { a, smooth } => {
            let rep = bubble_report(*a, *smooth, &q)?;
            let mut p = vec![("a", fmt12(*a))];
            if let Some(w) = smooth {
                p.push(("smooth", fmt12(*w)));
            }
            let mut r = Report { out, json: cli.json, manifest: RunManifest::new("bubble", params(&p), &settings), fields: vec![] };
            r.num("a", rep.a);
            r.num("F_phi", rep.f_phi);
            r.num("ztilde_flat", rep.ztilde_flat);
            r.num("ztilde_bubble", rep.ztilde_bubble);
            r.num("sphere_constant", rep.sphere_constant);
            r.num("gap", rep.gap);
            if let Some(c) = rep.closed_form_f {
                r.num("F_closed_form", c);
            }
            r.num("potential_residual", rep.potential_residual);
            r.num("flux_mismatch", rep.flux_mismatch);
            r.num("area_error", rep.area_error);
            r.num("refinement_error", rep.error_estimate);
            r.finish(&rep)
        }
        Command::Green { tau, x, y } => {
            let sh = make_torus(tau[0], tau[1])?;
            let g = greens_flat_with(&sh, point(x), point(y), &settings.series)?;
            let mut r = Report {
                out,
                json: cli.json,
                manifest: RunManifest::new(
                    "green",
                    params(&[
                        ("tau", format!("{} {}", fmt12(tau[0]), fmt12(tau[1]))),
                        ("x", format!("{} {}", fmt12(x[0]), fmt12(x[1]))),
                        ("y", format!("{} {}", fmt12(y[0]), fmt12(y[1]))),
                    ]),
                    &settings,
                ),
                fields: vec![],
            };
            r.num("G", g.g);
            r.num("log_part", g.log_part);
            r.num("H", g.h);
            r.num("distance", g.dist);
            r.finish(&g)
        }
        Command::Mass { tau, grid } => {
            let sh = make_torus(tau[0], tau[1])?;
            let k = (*grid).max(1);
            let [w1, w2] = sh.basis();
            let pts: Vec<Point> = (0..k * k)
                .map(|i| {
                    let (s, t) = ((i / k) as f64 / k as f64, (i % k) as f64 / k as f64);
                    Point::new(s * w1.x + t * w2.x, s * w1.y + t * w2.y)
                })
                .collect();
            let field = robin_mass_field(&sh, &pts, &settings.series)?;
            let mt = mass_trace_report(&sh, &settings.series)?;
            let mut r = Report {
                out,
                json: cli.json,
                manifest: RunManifest::new(
                    "mass",
                    params(&[("tau", format!("{} {}", fmt12(tau[0]), fmt12(tau[1]))), ("grid", k.to_string())]),
                    &settings,
                ),
                fields: vec![],
            };
            r.num("mass", field.mass[0]);
            r.num("mass_spread", field.spread());
            r.text("points", field.points.len());
            r.num("mass_side_4pi", mt.mass_side);
            r.num("trace_side_4pi", mt.trace_side);
            r.num("mass_trace_residual", mt.residual);
            #[derive(Serialize)]
            struct MassOut<'a> {
                field: &'a crate::greens::RobinMassField,
                spread: f64,
                mass_trace: crate::greens::MassTraceReport,
            }
            r.finish(&MassOut { field: &field, spread: field.spread(), mass_trace: mt })
        }
        Command::Twist { y, x_list } => {
            let tab = twist_comparison_with(*y, x_list, &settings.series)?;
            let xs: Vec<String> = x_list.iter().map(|x| fmt12(*x)).collect();
            let mut r = Report {
                out,
                json: cli.json,
                manifest: RunManifest::new("twist", params(&[("y", fmt12(*y)), ("x_list", xs.join(","))]), &settings),
                fields: vec![],
            };
            for row in &tab.rows {
                r.text(
                    &format!("x={}", fmt12(row.x)),
                    format!("ztilde={} gap={}", fmt12(row.ztilde), fmt12(row.gap)),
                );
            }
            r.text("decreasing", tab.decreasing);
            r.finish(&tab)
        }
        Command::Variation { a, mode, sin, fd_step } => {
            if *mode == 0 {
                return Err(Error::domain("mode must be at least 1"));
            }
            let shape = make_rect_torus(*a)?;
            let psi = if *sin { Profile::Sin(*mode) } else { Profile::Cos(*mode) };
            let lam = psi.mode_eigenvalue(*a).expect("trigonometric mode");
            let sv = second_variation(&shape, &VariationDirection::Longitudinal(psi.clone()), &q)?;
            let fd = second_variation_fd(*a, &psi, *fd_step, &q)?;
            let closed = 1.0 / (4.0 * std::f64::consts::PI) - 2.0 / lam;
            #[derive(Serialize)]
            struct VarOut {
                a: f64,
                mode: u32,
                sin: bool,
                eigenvalue: f64,
                second_variation: f64,
                closed_form: f64,
                finite_difference: f64,
            }
            let res = VarOut { a: *a, mode: *mode, sin: *sin, eigenvalue: lam, second_variation: sv, closed_form: closed, finite_difference: fd };
            let mut r = Report {
                out,
                json: cli.json,
                manifest: RunManifest::new(
                    "variation",
                    params(&[("a", fmt12(*a)), ("mode", mode.to_string()), ("sin", sin.to_string()), ("fd_step", fmt12(*fd_step))]),
                    &settings,
                ),
                fields: vec![],
            };
            r.num("eigenvalue", lam);
            r.num("second_variation", sv);
            r.num("closed_form", closed);
            r.num("finite_difference", fd);
            r.text("sign", if sv > 0.0 { "positive" } else if sv < 0.0 { "negative" } else { "zero" });
            r.finish(&res)
        }
        Command::Mc { shape, eps, trials, seed } => {
            let sh = shape.build()?;
            let cfg = McConfig {
                step_dt: settings.mc_step_factor * eps * eps,
                n_trials: *trials,
                epsilon: *eps,
                seed: *seed,
                max_steps: settings.mc_max_steps,
            };
            let est = trace_estimate(&sh, &cfg)?;
            let exact = ztilde_flat_with(&sh, &settings.series)?;
            let mut r = Report {
                out,
                json: cli.json,
                manifest: RunManifest::new(
                    "mc",
                    params(&[
                        ("shape", shape.describe()),
                        ("eps", fmt12(*eps)),
                        ("trials", trials.to_string()),
                        ("seed", seed.to_string()),
                    ]),
                    &settings,
                ),
                fields: vec![],
            };
            r.num("mean_hitting_time", est.hitting.mean);
            r.num("hitting_std_err", est.hitting.std_err);
            r.num("calibration_offset", est.calibration.offset);
            r.num("trace_estimate", est.value);
            r.num("trace_std_err", est.std_err);
            r.num("ztilde_flat", exact);
            r.finish(&est)
        }
    }
}

fn manifest_path(csv: &Path) -> PathBuf {
    let mut s = csv.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn write_sweep_csv(path: &Path, rows: &[crate::conformal::SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["a", "ztilde_flat", "F_phi", "ztilde_bubble", "sphere_constant", "gap"])
        .map_err(csv_err)?;
    for r in rows {
        w.write_record([
            fmt12(r.a),
            fmt12(r.ztilde_flat),
            fmt12(r.f_phi),
            fmt12(r.ztilde_bubble),
            fmt12(r.sphere_constant),
            fmt12(r.gap),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Config(format!("csv: {other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digit_formatting() {
        assert_eq!(fmt12(0.0), "0");
        assert_eq!(fmt12(-0.2286), "-0.2286");
        assert_eq!(fmt12(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt12(2.0 / 3.0 * 1e-7), "6.66666666667e-08");
        assert_eq!(fmt12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt12(40.0), "40");
        assert_eq!(fmt12(99999999999.99999), "100000000000");
    }

    #[test]
    fn usage_errors_exit_one() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["torustrace", "flat"], &mut o, &mut e), 1);
        assert_eq!(run(["torustrace", "nope"], &mut o, &mut e), 1);
    }

    #[test]
    fn domain_errors_exit_two() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["torustrace", "flat", "--tau", "0", "-1"], &mut o, &mut e), 2);
    }
}
