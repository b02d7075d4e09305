//! Numerical construction of spherical t-designs.
//!
//! The objective is the total cubature residual
//!
//! ```text
//! A_t = Σ_{l=1}^{t} Σ_m ( (1/n) Σ_i Y_l^m(x_i) )²
//!     = (1/n²) Σ_{i,j} Σ_{l=1}^{t} (2l+1) P_l(x_i · x_j)
//! ```
//!
//! which vanishes exactly on t-designs. The first form is evaluated for the
//! objective itself (it has no cancellation, so it resolves values down to
//! about 1e-30); the kernel form gives a cheap analytic gradient.
//!
//! Each local run is projected gradient descent: the Euclidean gradient is
//! projected onto every point's tangent plane, the step length is found by
//! Armijo backtracking and points are renormalized after each step.
//! Multi-start runs use initial designs `random_design(n, seed + k)`; the
//! winner is the smallest residual, ties going to the lower start index, so
//! running the starts concurrently never changes the result.

use serde::{Deserialize, Serialize};

use crate::catalog::lower_bound;
use crate::error::{Error, Result};
use crate::harmonics::{basis_from_parts, basis_len, legendre_with_derivatives};
use crate::sphere::{random_design, Design};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructOptions {
    pub t: usize,
    pub n: usize,
    pub starts: usize,
    pub seed: u64,
    pub max_iters: usize,
    /// A run counts as converged once `A_t <= tol`.
    pub tol: f64,
    /// Converged runs keep descending until `A_t <= polish_tol` so the
    /// result also passes coordinate-level checks.
    pub polish_tol: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    pub initial_step: f64,
    pub min_step: f64,
    /// A run above `tol` stops when `A_t` fails to drop below
    /// `stall_ratio` times its value `stall_window` iterations earlier.
    pub stall_window: usize,
    pub stall_ratio: f64,
}

impl ConstructOptions {
    pub fn new(t: usize, n: usize) -> Self {
        Self {
            t,
            n,
            starts: 20,
            seed: 0,
            max_iters: 20_000,
            tol: 1e-10,
            polish_tol: 1e-26,
            armijo: 1e-4,
            initial_step: 1.0,
            min_step: 1e-20,
            stall_window: 1000,
            stall_ratio: 0.999,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t == 0 {
            return Err(Error::InvalidOptions("target strength must be at least 1".into()));
        }
        let bound = lower_bound(self.t);
        if self.n < bound {
            return Err(Error::BelowLowerBound { t: self.t, n: self.n, bound });
        }
        if self.starts == 0 {
            return Err(Error::InvalidOptions("starts must be at least 1".into()));
        }
        if !(self.tol > 0.0) || !(self.polish_tol >= 0.0) {
            return Err(Error::InvalidOptions("tolerances must be positive".into()));
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) || !(self.initial_step > 0.0) || !(self.min_step > 0.0) {
            return Err(Error::InvalidOptions("invalid step control parameters".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructOutcome {
    pub design: Design,
    pub residual: f64,
    pub iterations: usize,
    pub start_index: usize,
    pub converged: bool,
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

/// `A_t` from harmonic means of raw unit vectors.
pub(crate) fn objective_vectors(points: &[[f64; 3]], t: usize) -> f64 {
    let len = basis_len(t);
    let mut acc = vec![0.0; len];
    let mut buf = vec![0.0; len];
    for v in points {
        let st = v[0].hypot(v[1]);
        let phi = if st == 0.0 { 0.0 } else { v[1].atan2(v[0]) };
        basis_from_parts(t, v[2], st, phi, &mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b;
        }
    }
    let n = points.len() as f64;
    acc[1..].iter().map(|a| (a / n) * (a / n)).sum()
}

/// Total cubature residual `A_t = Σ_{l=1}^t r_l`.
pub fn objective(design: &Design, t: usize) -> f64 {
    objective_vectors(&design.vectors(), t)
}

/// The same quantity through the Legendre kernel `Σ_l (2l+1) P_l(x_i·x_j)`.
pub fn objective_kernel(design: &Design, t: usize) -> f64 {
    let v = design.vectors();
    let n = v.len();
    let (mut p, mut dp) = (Vec::new(), Vec::new());
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let s = dot(&v[i], &v[j]).clamp(-1.0, 1.0);
            legendre_with_derivatives(t, s, &mut p, &mut dp);
            total += (1..=t).map(|l| (2 * l + 1) as f64 * p[l]).sum::<f64>();
        }
    }
    total / (n * n) as f64
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Gradient of `A_t` with respect to each point, projected onto the tangent
/// plane at that point.
pub fn gradient(points: &[[f64; 3]], t: usize) -> Vec<[f64; 3]> {
    let n = points.len();
    let mut g = vec![[0.0; 3]; n];
    let (mut p, mut dp) = (Vec::new(), Vec::new());
    let scale = 2.0 / (n * n) as f64;
    for i in 0..n {
        for j in (i + 1)..n {
            let s = dot(&points[i], &points[j]).clamp(-1.0, 1.0);
            legendre_with_derivatives(t, s, &mut p, &mut dp);
            let kp: f64 = (1..=t).map(|l| (2 * l + 1) as f64 * dp[l]).sum::<f64>() * scale;
            for k in 0..3 {
                g[i][k] += kp * points[j][k];
                g[j][k] += kp * points[i][k];
            }
        }
    }
    for (gi, xi) in g.iter_mut().zip(points) {
        let r = dot(gi, xi);
        for k in 0..3 {
            gi[k] -= r * xi[k];
        }
    }
    g
}

struct RunResult {
    points: Vec<[f64; 3]>,
    residual: f64,
    iterations: usize,
}

/// One projected-gradient run from `points`.
fn descend(mut points: Vec<[f64; 3]>, t: usize, opts: &ConstructOptions) -> RunResult {
    let mut f = objective_vectors(&points, t);
    let mut step = opts.initial_step;
    let mut history = f;
    let mut iterations = 0;
    while iterations < opts.max_iters {
        if f <= opts.polish_tol {
            break;
        }
        if f > opts.tol && iterations > 0 && iterations % opts.stall_window == 0 {
            if f > opts.stall_ratio * history {
                break;
            }
            history = f;
        }
        let g = gradient(&points, t);
        let gg: f64 = g.iter().map(|v| dot(v, v)).sum();
        if gg.sqrt() <= 1e-14 {
            break;
        }
        let mut s = step * 2.0;
        let accepted = loop {
            let trial: Vec<[f64; 3]> = points
                .iter()
                .zip(&g)
                .map(|(x, gi)| normalize([x[0] - s * gi[0], x[1] - s * gi[1], x[2] - s * gi[2]]))
                .collect();
            let ft = objective_vectors(&trial, t);
            if ft <= f - opts.armijo * s * gg {
                break Some((trial, ft));
            }
            s *= 0.5;
            if s < opts.min_step {
                break None;
            }
        };
        let Some((trial, ft)) = accepted else { break };
        points = trial;
        f = ft;
        step = s;
        iterations += 1;
    }
    RunResult { points, residual: f, iterations }
}

fn outcome(run: RunResult, start_index: usize, opts: &ConstructOptions, label: String) -> Result<ConstructOutcome> {
    let design = Design::from_vectors(&run.points)?.with_label(label);
    Ok(ConstructOutcome {
        design,
        residual: run.residual,
        iterations: run.iterations,
        start_index,
        converged: run.residual <= opts.tol,
    })
}

fn run_start(opts: &ConstructOptions, k: usize) -> RunResult {
    let init = random_design(opts.n, opts.seed.wrapping_add(k as u64)).vectors();
    descend(init, opts.t, opts)
}

/// Best of `opts.starts` seeded local runs.
pub fn minimize(opts: &ConstructOptions) -> Result<ConstructOutcome> {
    opts.validate()?;
    #[cfg(feature = "parallel")]
    let runs: Vec<RunResult> = {
        use rayon::prelude::*;
        (0..opts.starts).into_par_iter().map(|k| run_start(opts, k)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let runs: Vec<RunResult> = (0..opts.starts).map(|k| run_start(opts, k)).collect();

    let (best, run) = runs
        .into_iter()
        .enumerate()
        .min_by(|a, b| a.1.residual.total_cmp(&b.1.residual).then(a.0.cmp(&b.0)))
        .expect("at least one start");
    let label = format!("constructed t={} n={} seed={} start={best}", opts.t, opts.n, opts.seed);
    outcome(run, best, opts, label)
}

/// A single local run started from `design`, targeting strength `t`.
/// Only the tolerances and step controls of `opts` are used.
pub fn refine(design: &Design, t: usize, opts: &ConstructOptions) -> Result<ConstructOutcome> {
    let local = ConstructOptions { t, n: design.len(), starts: 1, ..opts.clone() };
    local.validate()?;
    let run = descend(design.vectors(), t, &local);
    let label = match design.label() {
        Some(l) => format!("{l} (refined t={t})"),
        None => format!("refined t={t}"),
    };
    outcome(run, 0, &local, label)
}
