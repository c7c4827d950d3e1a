//! Monte Carlo hide-and-seek on a flat torus.
//!
//! A seeker diffuses with generator `Delta` (Brownian motion with variance
//! `2t` per coordinate) from a fixed point until it comes within `epsilon`
//! of a uniformly random target. For small `epsilon` the mean hitting time
//! is `m - (1/2 pi) log(epsilon)` plus a discretization bias that does not
//! depend on the torus, `m` being Robin's mass. Adding `(1/2 pi) log(epsilon)`
//! and an offset measured once on the square torus therefore estimates
//! `Z~(1)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::flat_trace::ztilde_flat;
use crate::lattice::{make_torus, TorusShape};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub step_dt: f64,
    pub n_trials: usize,
    pub epsilon: f64,
    pub seed: u64,
    /// Per-trial step cap; exceeding it is a convergence error.
    pub max_steps: u64,
}

impl McConfig {
    /// `step_dt = epsilon^2 / 100`.
    pub fn new(epsilon: f64, n_trials: usize, seed: u64) -> Self {
        McConfig {
            step_dt: epsilon * epsilon / 100.0,
            n_trials,
            epsilon,
            seed,
            max_steps: 100_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.step_dt > 0.0) || self.step_dt > self.epsilon * self.epsilon / 10.0 {
            return Err(Error::Config(format!(
                "step_dt must lie in (0, epsilon^2 / 10], got {}",
                self.step_dt
            )));
        }
        if self.n_trials < 100 {
            return Err(Error::Config(format!(
                "at least 100 trials are required, got {}",
                self.n_trials
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HitTimeEstimate {
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`.
    pub std_err: f64,
    pub n: usize,
}

/// Offset measured on the square torus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub offset: f64,
    pub std_err: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEstimate {
    pub value: f64,
    /// Hitting-time and calibration errors combined in quadrature.
    pub std_err: f64,
    pub hitting: HitTimeEstimate,
    pub calibration: Calibration,
}

// keeps calibration runs on RNG streams disjoint from the measured shape
const CALIBRATION_KEY: u64 = 0x5851_f42d_4c95_7f2d;

fn check_radius(shape: &TorusShape, eps: f64) -> Result<bool> {
    if eps >= shape.covering_radius() {
        return Ok(true);
    }
    let limit = 0.5 * shape.injectivity_radius();
    if eps >= limit {
        return Err(Error::domain(format!(
            "epsilon {eps} must be below half the injectivity radius ({limit})"
        )));
    }
    Ok(false)
}

fn one_trial(shape: &TorusShape, cfg: &McConfig, trial: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(trial);
    let [w1, w2] = shape.reduced_basis();
    let target = w1 * rng.random::<f64>() + w2 * rng.random::<f64>();
    let sigma = (2.0 * cfg.step_dt).sqrt();
    let eps2 = cfg.epsilon * cfg.epsilon;
    let mut pos = Complex64::new(0.0, 0.0);
    let mut steps = 0u64;
    loop {
        // displacements are already in the reduced frame
        let d = shape.wrap_reduced(target - pos);
        if d.norm_sqr() <= eps2 {
            return Ok(steps as f64 * cfg.step_dt);
        }
        if steps >= cfg.max_steps {
            return Err(Error::convergence(format!(
                "trial {trial} did not hit within {} steps",
                cfg.max_steps
            )));
        }
        let dx: f64 = rng.sample(StandardNormal);
        let dy: f64 = rng.sample(StandardNormal);
        pos += Complex64::new(dx, dy) * sigma;
        steps += 1;
        if steps % 1024 == 0 {
            pos = shape.wrap_reduced(pos);
        }
    }
}

/// Mean first time to reach the `epsilon`-ball of a uniform target.
pub fn simulate_hitting(shape: &TorusShape, cfg: &McConfig) -> Result<HitTimeEstimate> {
    cfg.validate()?;
    let n = cfg.n_trials;
    if check_radius(shape, cfg.epsilon)? {
        return Ok(HitTimeEstimate { mean: 0.0, std_err: 0.0, n });
    }
    let times = (0..n as u64)
        .into_par_iter()
        .map(|t| one_trial(shape, cfg, t))
        .collect::<Result<Vec<f64>>>()?;
    let mean = times.iter().sum::<f64>() / n as f64;
    let var = times.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / (n as f64 - 1.0);
    Ok(HitTimeEstimate {
        mean,
        std_err: (var / n as f64).sqrt(),
        n,
    })
}

/// Offset `Z~(square) - (mean + (1/2 pi) log epsilon)` on the square torus.
pub fn calibrate(cfg: &McConfig) -> Result<Calibration> {
    let square = make_torus(0.0, 1.0)?;
    let cal_cfg = McConfig {
        seed: cfg.seed ^ CALIBRATION_KEY,
        ..*cfg
    };
    let est = simulate_hitting(&square, &cal_cfg)?;
    Ok(Calibration {
        offset: ztilde_flat(&square)? - est.mean - cfg.epsilon.ln() / (2.0 * PI),
        std_err: est.std_err,
    })
}

/// `mean + (1/2 pi) log epsilon + offset`, the offset calibrated on the
/// square torus with the same configuration.
pub fn trace_estimate(shape: &TorusShape, cfg: &McConfig) -> Result<TraceEstimate> {
    let calibration = calibrate(cfg)?;
    trace_estimate_calibrated(shape, cfg, calibration)
}

pub fn trace_estimate_calibrated(shape: &TorusShape, cfg: &McConfig, calibration: Calibration) -> Result<TraceEstimate> {
    let hitting = simulate_hitting(shape, cfg)?;
    Ok(TraceEstimate {
        value: hitting.mean + cfg.epsilon.ln() / (2.0 * PI) + calibration.offset,
        std_err: hitting.std_err.hypot(calibration.std_err),
        hitting,
        calibration,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::make_rect_torus;

    #[test]
    fn config_guards() {
        let mut cfg = McConfig::new(0.05, 200, 1);
        assert!(cfg.validate().is_ok());
        cfg.step_dt = 0.05 * 0.05 / 5.0;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        assert!(matches!(McConfig::new(0.05, 10, 1).validate(), Err(Error::Config(_))));
    }

    #[test]
    fn covering_ball_hits_immediately() {
        let sq = make_torus(0.0, 1.0).unwrap();
        let est = simulate_hitting(&sq, &McConfig::new(0.75, 100, 3)).unwrap();
        assert_eq!(est.mean, 0.0);
    }

    #[test]
    fn large_ball_below_cover_is_rejected() {
        let sq = make_torus(0.0, 1.0).unwrap();
        assert!(matches!(
            simulate_hitting(&sq, &McConfig::new(0.4, 100, 3)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn fixed_seed_is_reproducible() {
        let r = make_rect_torus(5.0).unwrap();
        let cfg = McConfig::new(0.1, 200, 11);
        let a = simulate_hitting(&r, &cfg).unwrap();
        let b = simulate_hitting(&r, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
