//! Euler–Maruyama ensembles with exit-time stopping, and statistical tests
//! of strong/weak conservation.
//!
//! Every path draws from its own ChaCha stream `(seed, path index)`, so an
//! ensemble is bit-reproducible regardless of the thread count.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{LaurentPoly, VField};
use crate::error::{Error, Result};
use crate::ito::{Mode, SdeSystem};

/// Centre of the stopping ball `U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BallCentre {
    Origin,
    Initial,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimConfig {
    #[serde(serialize_with = "ser_state")]
    pub x0: Vec<Complex64>,
    pub step: f64,
    pub horizon: f64,
    pub paths: usize,
    pub radius: f64,
    pub centre: BallCentre,
    pub seed: u64,
    /// Store every `k`-th state of each path.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub keep_every: Option<usize>,
}

impl SimConfig {
    pub fn new(x0: Vec<Complex64>, step: f64, horizon: f64, paths: usize, seed: u64) -> Self {
        SimConfig { x0, step, horizon, paths, radius: 10.0, centre: BallCentre::Initial, seed, keep_every: None }
    }

    pub fn real(x0: &[f64], step: f64, horizon: f64, paths: usize, seed: u64) -> Self {
        Self::new(x0.iter().map(|&x| Complex64::new(x, 0.0)).collect(), step, horizon, paths, seed)
    }

    pub fn with_radius(mut self, radius: f64, centre: BallCentre) -> Self {
        self.radius = radius;
        self.centre = centre;
        self
    }

    pub fn steps(&self) -> usize {
        (self.horizon / self.step).round().max(1.0) as usize
    }

    fn validate(&self, dim: usize) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.step > 0.0 && self.step.is_finite()) {
            return bad("step size h must be positive");
        }
        if !(self.horizon >= self.step && self.horizon.is_finite()) {
            return bad("horizon T must be at least h");
        }
        if self.paths == 0 {
            return bad("path count N must be at least 1");
        }
        if self.radius.is_nan() || self.radius <= 0.0 {
            return bad("exit radius R must be positive");
        }
        if self.keep_every == Some(0) {
            return bad("keep_every must be at least 1");
        }
        if self.x0.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: self.x0.len() });
        }
        Ok(())
    }
}

fn ser_state<S: serde::Serializer>(x: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
    x.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
}

/// Polynomial with float coefficients for fast repeated evaluation.
#[derive(Clone, Debug)]
struct Compiled {
    terms: Vec<(Vec<i32>, Complex64)>,
}

impl Compiled {
    fn new(p: &LaurentPoly) -> Self {
        Compiled { terms: p.terms().map(|(e, c)| (e.as_slice().iter().map(|&k| k as i32).collect(), c.to_c64())).collect() }
    }

    /// `None` at a pole.
    fn eval(&self, x: &[Complex64]) -> Option<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = *c;
            for (&k, xi) in e.iter().zip(x) {
                match k {
                    0 => {}
                    1 => t *= xi,
                    k if k < 0 && xi.norm_sqr() == 0.0 => return None,
                    k => t *= xi.powi(k),
                }
            }
            acc += t;
        }
        Some(acc)
    }
}

fn compile_field(v: &VField) -> Vec<Compiled> {
    v.components.iter().map(Compiled::new).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PathStatus {
    Ok,
    /// A coefficient had a pole at the current state.
    Pole,
    /// The state stopped being finite.
    Overflow,
}

#[derive(Clone, Debug, Serialize)]
pub struct PathOutcome {
    /// `X_{T ∧ τ_U}`.
    #[serde(serialize_with = "ser_state")]
    pub final_state: Vec<Complex64>,
    pub exited: bool,
    /// `T ∧ τ_U`.
    pub stop_time: f64,
    pub status: PathStatus,
    pub stream: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<Vec<[f64; 2]>>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimEnsemble {
    pub config: SimConfig,
    pub paths: Vec<PathOutcome>,
}

impl SimEnsemble {
    pub fn excluded(&self) -> usize {
        self.paths.iter().filter(|p| p.status != PathStatus::Ok).count()
    }

    pub fn exited(&self) -> usize {
        self.paths.iter().filter(|p| p.exited).count()
    }
}

fn run_path(
    drift: &[Compiled],
    diff: &[Vec<Compiled>],
    cfg: &SimConfig,
    centre: &[Complex64],
    index: u64,
) -> PathOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index);
    let n = cfg.x0.len();
    let steps = cfg.steps();
    let h = cfg.step;
    let sqrt_h = h.sqrt();
    let mut x = cfg.x0.clone();
    let mut next = vec![Complex64::new(0.0, 0.0); n];
    let mut traj = cfg.keep_every.map(|_| vec![x.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>()]);
    let out = |x: Vec<Complex64>, exited, t, status, traj| PathOutcome { final_state: x, exited, stop_time: t, status, stream: index, trajectory: traj };
    for step in 1..=steps {
        for (i, fi) in drift.iter().enumerate() {
            match fi.eval(&x) {
                Some(v) => next[i] = x[i] + v * h,
                None => return out(x, false, (step - 1) as f64 * h, PathStatus::Pole, traj),
            }
        }
        for g in diff {
            let xi: f64 = StandardNormal.sample(&mut rng);
            let dw = xi * sqrt_h;
            for (i, gi) in g.iter().enumerate() {
                match gi.eval(&x) {
                    Some(v) => next[i] += v * dw,
                    None => return out(x, false, (step - 1) as f64 * h, PathStatus::Pole, traj),
                }
            }
        }
        if next.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return out(x, false, (step - 1) as f64 * h, PathStatus::Overflow, traj);
        }
        std::mem::swap(&mut x, &mut next);
        let t = step as f64 * h;
        if let (Some(tr), Some(k)) = (traj.as_mut(), cfg.keep_every) {
            if step % k == 0 {
                tr.push(x.iter().map(|z| [z.re, z.im]).collect());
            }
        }
        let dist = x.iter().zip(centre).map(|(a, c)| (a - c).norm_sqr()).sum::<f64>().sqrt();
        if dist >= cfg.radius {
            return out(x, true, t, PathStatus::Ok, traj);
        }
    }
    out(x, false, steps as f64 * h, PathStatus::Ok, traj)
}

/// `X_{k+1} = X_k + f(X_k) h + Σ_i g_i(X_k) √h ξ_{k,i}`, stopped at `T` or on
/// leaving the ball `U`.
pub fn simulate_paths(sys: &SdeSystem, cfg: &SimConfig) -> Result<SimEnsemble> {
    cfg.validate(sys.dim())?;
    let drift = compile_field(&sys.drift);
    let diff: Vec<Vec<Compiled>> = sys.diffusions.iter().map(compile_field).collect();
    let centre = match cfg.centre {
        BallCentre::Origin => vec![Complex64::new(0.0, 0.0); sys.dim()],
        BallCentre::Initial => cfg.x0.clone(),
    };
    let paths = (0..cfg.paths as u64).into_par_iter().map(|i| run_path(&drift, &diff, cfg, &centre, i)).collect();
    Ok(SimEnsemble { config: cfg.clone(), paths })
}

/// Fixed-order pairwise sum.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn pairwise_sum_c(v: &[Complex64]) -> Complex64 {
    let re: Vec<f64> = v.iter().map(|z| z.re).collect();
    let im: Vec<f64> = v.iter().map(|z| z.im).collect();
    Complex64::new(pairwise_sum(&re), pairwise_sum(&im))
}

/// Multipliers for the PASS thresholds; `None` means the default.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Allowances {
    pub c_bias: Option<f64>,
    pub c_path: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Thresholds {
    /// Weak: `3·stderr + c_bias·h`. Strong: `c_path·√h`.
    pub rule: String,
    pub constant: f64,
    pub value: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConservationReport {
    pub mode: Mode,
    pub phi_x0: [f64; 2],
    pub mean: [f64; 2],
    /// `mean − Φ(x0)`.
    pub bias: [f64; 2],
    pub delta: f64,
    pub stderr: f64,
    pub max_dev: f64,
    pub n_used: usize,
    pub n_excluded: usize,
    pub n_exited: usize,
    /// `None` when every path was excluded.
    pub pass: Option<bool>,
    pub thresholds: Thresholds,
    pub stopping_times: String,
    pub config: SimConfig,
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

/// Weak mode: `|mean Φ(X_{T∧τ}) − Φ(x0)| ≤ 3·stderr + c_bias·h`, with
/// `c_bias = 10|Φ(x0)|` by default. Strong mode: `max |Φ(X_{T∧τ}) − Φ(x0)| ≤
/// c_path·√h`, with `c_path = 10|Φ(x0)| + 1`.
pub fn conservation_test(ens: &SimEnsemble, phi: &LaurentPoly, mode: Mode, allow: Allowances) -> Result<ConservationReport> {
    let cfg = &ens.config;
    if phi.dim() != cfg.x0.len() {
        return Err(Error::DimensionMismatch { expected: cfg.x0.len(), found: phi.dim() });
    }
    let c = Compiled::new(phi);
    let phi0 = c.eval(&cfg.x0).ok_or(Error::Pole { axis: cfg.x0.iter().position(|z| z.norm_sqr() == 0.0).unwrap_or(0) })?;
    let values: Vec<Complex64> = ens
        .paths
        .iter()
        .filter(|p| p.status == PathStatus::Ok)
        .filter_map(|p| c.eval(&p.final_state))
        .filter(|z| z.re.is_finite() && z.im.is_finite())
        .collect();
    let n_used = values.len();
    let n_excluded = ens.paths.len() - n_used;
    let h = cfg.step;
    let (constant, rule) = match mode {
        Mode::Weak => (allow.c_bias.unwrap_or(10.0 * phi0.norm()), "3*stderr + c_bias*h"),
        Mode::Strong => (allow.c_path.unwrap_or(10.0 * phi0.norm() + 1.0), "c_path*sqrt(h)"),
    };
    let centre = match cfg.centre {
        BallCentre::Origin => "origin",
        BallCentre::Initial => "initial",
    };
    let stopping_times = format!("tau = T = {} and first exit from the ball of radius {} ({centre} centre)", cfg.horizon, cfg.radius);
    let mut report = ConservationReport {
        mode,
        phi_x0: pair(phi0),
        mean: [f64::NAN; 2],
        bias: [f64::NAN; 2],
        delta: f64::NAN,
        stderr: f64::NAN,
        max_dev: f64::NAN,
        n_used,
        n_excluded,
        n_exited: ens.exited(),
        pass: None,
        thresholds: Thresholds { rule: rule.into(), constant, value: f64::NAN },
        stopping_times,
        config: cfg.clone(),
    };
    if n_used == 0 {
        return Ok(report);
    }
    let mean = pairwise_sum_c(&values) / n_used as f64;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean).norm_sqr()).collect();
    let var = if n_used > 1 { pairwise_sum(&sq) / (n_used - 1) as f64 } else { 0.0 };
    let stderr = (var / n_used as f64).sqrt();
    let max_dev = values.iter().map(|v| (v - phi0).norm()).fold(0.0, f64::max);
    let delta = (mean - phi0).norm();
    let (threshold, pass) = match mode {
        Mode::Weak => {
            let t = 3.0 * stderr + constant * h;
            (t, delta <= t)
        }
        Mode::Strong => {
            let t = constant * h.sqrt();
            (t, max_dev <= t)
        }
    };
    report.mean = pair(mean);
    report.bias = pair(mean - phi0);
    report.delta = delta;
    report.stderr = stderr;
    report.max_dev = max_dev;
    report.thresholds.value = threshold;
    report.pass = Some(pass);
    Ok(report)
}
