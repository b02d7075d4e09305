//! Built-in exact designs.
//!
//! * Platonic solids in fixed orientations.
//! * Longitude–latitude product designs: `n_θ` equally weighted polar nodes
//!   times `n_φ >= 2d+1` equally spaced azimuths. The azimuth sums kill every
//!   harmonic with `0 < |m| <= 2d`, so the design integrates degree `2d`
//!   exactly once the polar nodes satisfy the zonal moment equations
//!   `(1/n_θ) Σ_i P_{2k}(x_i) = 0` for `k = 1..=d` (odd degrees vanish by the
//!   symmetry of the nodes).

use std::f64::consts::PI;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::legendre_with_derivatives;
use crate::sphere::{Design, SpherePoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Platonic {
    Tetrahedron,
    Octahedron,
    Cube,
    Icosahedron,
    Dodecahedron,
}

impl Platonic {
    pub const ALL: [Platonic; 5] = [
        Platonic::Tetrahedron,
        Platonic::Octahedron,
        Platonic::Cube,
        Platonic::Icosahedron,
        Platonic::Dodecahedron,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Platonic::Tetrahedron => "tetrahedron",
            Platonic::Octahedron => "octahedron",
            Platonic::Cube => "cube",
            Platonic::Icosahedron => "icosahedron",
            Platonic::Dodecahedron => "dodecahedron",
        }
    }
}

impl FromStr for Platonic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Platonic::ALL
            .into_iter()
            .find(|p| p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

fn golden() -> f64 {
    (1.0 + 5f64.sqrt()) / 2.0
}

fn cube_vertices() -> Vec<[f64; 3]> {
    let mut v = Vec::with_capacity(8);
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0] {
                v.push([sx, sy, sz]);
            }
        }
    }
    v
}

/// Cyclic permutations `(a, b, c), (c, a, b), (b, c, a)` of every sign choice
/// of `(0, ±p, ±q)`.
fn cyclic_zero_family(p: f64, q: f64) -> Vec<[f64; 3]> {
    let mut v = Vec::new();
    for sp in [1.0, -1.0] {
        for sq in [1.0, -1.0] {
            let (b, c) = (sp * p, sq * q);
            v.push([0.0, b, c]);
            v.push([c, 0.0, b]);
            v.push([b, c, 0.0]);
        }
    }
    v
}

/// Vertices of a Platonic solid inscribed in the unit sphere.
///
/// Orientations: the tetrahedron takes the cube vertices `(±1,±1,±1)/√3`
/// whose sign product is `+1`; the octahedron is `±e_x, ±e_y, ±e_z`; the cube
/// is all `(±1,±1,±1)/√3`; the icosahedron is the cyclic permutations of
/// `(0, ±1, ±g)` and the dodecahedron the cube vertices together with the
/// cyclic permutations of `(0, ±1/g, ±g)`, `g` the golden ratio.
pub fn platonic(solid: Platonic) -> Design {
    let g = golden();
    let raw: Vec<[f64; 3]> = match solid {
        Platonic::Tetrahedron => cube_vertices()
            .into_iter()
            .filter(|v| v[0] * v[1] * v[2] > 0.0)
            .collect(),
        Platonic::Octahedron => vec![
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [0.0, 0.0, 1.0],
            [0.0, 0.0, -1.0],
        ],
        Platonic::Cube => cube_vertices(),
        Platonic::Icosahedron => cyclic_zero_family(1.0, g),
        Platonic::Dodecahedron => {
            let mut v = cube_vertices();
            v.extend(cyclic_zero_family(1.0 / g, g));
            v
        }
    };
    Design::from_vectors(&raw).expect("nonzero vertices").with_label(solid.name())
}

/// Minimum number of points of a spherical t-design on S².
pub fn lower_bound(t: usize) -> usize {
    if t % 2 == 0 {
        (t + 2) * (t + 2) / 4
    } else {
        (t + 1) * (t + 3) / 4
    }
}

/// One row of the order-by-order comparison between product designs and the
/// smallest known t-designs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderSettings {
    pub d: usize,
    /// Smallest known design with strength `2d`.
    pub n_2d: usize,
    /// Smallest known design with strength `2d + 1`.
    pub n_2d1: usize,
    pub n_theta: usize,
}

impl OrderSettings {
    pub fn parameters(&self) -> usize {
        (self.d + 1) * (self.d + 1)
    }

    pub fn n_phi(&self) -> usize {
        2 * self.d + 1
    }

    pub fn n_min(&self) -> usize {
        self.n_2d.min(self.n_2d1)
    }

    pub fn n_total(&self) -> usize {
        self.n_theta * self.n_phi()
    }
}

/// Published settings for model orders 1 to 7: smallest known point counts
/// for strengths `2d` and `2d+1`, and the polar node counts of the minimal
/// product designs.
pub const ORDER_SETTINGS: [OrderSettings; 7] = [
    OrderSettings { d: 1, n_2d: 4, n_2d1: 6, n_theta: 2 },
    OrderSettings { d: 2, n_2d: 14, n_2d1: 12, n_theta: 4 },
    OrderSettings { d: 3, n_2d: 26, n_2d1: 24, n_theta: 6 },
    OrderSettings { d: 4, n_2d: 36, n_2d1: 48, n_theta: 9 },
    OrderSettings { d: 5, n_2d: 60, n_2d1: 70, n_theta: 13 },
    OrderSettings { d: 6, n_2d: 84, n_2d1: 94, n_theta: 17 },
    OrderSettings { d: 7, n_2d: 108, n_2d1: 120, n_theta: 23 },
];

pub fn order_settings(d: usize) -> Option<OrderSettings> {
    ORDER_SETTINGS.iter().copied().find(|s| s.d == d)
}

/// Parameters of a longitude–latitude product design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductDesignSpec {
    d: usize,
    n_theta: usize,
    n_phi: usize,
    alpha: f64,
}

impl ProductDesignSpec {
    pub fn new(d: usize, n_theta: usize, n_phi: usize, alpha: f64) -> Result<Self> {
        if n_phi < 2 * d + 1 {
            return Err(Error::InvalidProductSpec(format!(
                "n_phi = {n_phi} is below 2d+1 = {}",
                2 * d + 1
            )));
        }
        if n_theta < d + 1 {
            return Err(Error::InvalidProductSpec(format!(
                "n_theta = {n_theta} is below d+1 = {}",
                d + 1
            )));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidProductSpec("alpha must be finite".into()));
        }
        Ok(Self { d, n_theta, n_phi, alpha })
    }

    /// The minimal setting for `d <= 7` (`n_φ = 2d+1`, tabulated `n_θ`),
    /// with `α = 0`.
    pub fn minimal(d: usize) -> Result<Self> {
        match d {
            0 => Self::new(0, 1, 1, 0.0),
            _ => {
                let s = order_settings(d).ok_or_else(|| {
                    Error::InvalidProductSpec(format!(
                        "no tabulated n_theta for d = {d}; give n_theta explicitly"
                    ))
                })?;
                Self::new(d, s.n_theta, s.n_phi(), 0.0)
            }
        }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::InvalidProductSpec("alpha must be finite".into()));
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

const NODE_TOL: f64 = 1e-28;
const NODE_MIN_GAP: f64 = 1e-8;
const NODE_RETRIES: usize = 32;
const NODE_MAX_ITERS: usize = 500;

/// Zonal moment residuals `(1/n) Σ_i P_{2k}(x_i)`, `k = 1..=d`, for a node
/// set made of `±a_j` pairs plus an optional node at zero. Also returns the
/// Jacobian with respect to the `a_j` (row-major, `d × pairs`).
fn zonal_system(d: usize, pairs: &[f64], zero: bool, n: f64) -> (Vec<f64>, Vec<f64>) {
    let t = 2 * d;
    let mut res = vec![0.0; d];
    let mut jac = vec![0.0; d * pairs.len()];
    let (mut p, mut dp) = (Vec::new(), Vec::new());
    for (j, &a) in pairs.iter().enumerate() {
        legendre_with_derivatives(t, a, &mut p, &mut dp);
        for k in 1..=d {
            res[k - 1] += 2.0 * p[2 * k] / n;
            jac[(k - 1) * pairs.len() + j] = 2.0 * dp[2 * k] / n;
        }
    }
    if zero {
        legendre_with_derivatives(t, 0.0, &mut p, &mut dp);
        for k in 1..=d {
            res[k - 1] += p[2 * k] / n;
        }
    }
    (res, jac)
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|r| r * r).sum()
}

fn nodes_admissible(pairs: &[f64], zero: bool) -> bool {
    let lo = if zero { NODE_MIN_GAP } else { NODE_MIN_GAP / 2.0 };
    pairs.iter().all(|&a| a > lo && a < 1.0 - NODE_MIN_GAP)
}

fn min_gap(sorted: &[f64]) -> f64 {
    sorted.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// Damped minimum-norm Gauss–Newton (Levenberg–Marquardt) on the zonal
/// moment equations. Steps that leave `(0, 1)` are halved.
fn solve_pairs(d: usize, start: Vec<f64>, zero: bool, n: f64) -> (Vec<f64>, f64) {
    let np = start.len();
    let mut a = start;
    let (mut r, mut jac) = zonal_system(d, &a, zero, n);
    let mut f = sum_sq(&r);
    let mut lambda = 1e-3;
    for _ in 0..NODE_MAX_ITERS {
        if f <= NODE_TOL {
            break;
        }
        // step = -Jᵀ (J Jᵀ + λ I)⁻¹ r
        let jm = nalgebra::DMatrix::from_row_slice(d, np, &jac);
        let mut jjt = &jm * jm.transpose();
        for i in 0..d {
            jjt[(i, i)] += lambda;
        }
        let Some(chol) = jjt.cholesky() else {
            lambda *= 10.0;
            continue;
        };
        let y = chol.solve(&nalgebra::DVector::from_column_slice(&r));
        let step = -(jm.transpose() * y);
        let mut s = 1.0;
        let mut accepted = false;
        while s > 1e-12 {
            let trial: Vec<f64> = a.iter().zip(step.iter()).map(|(x, dx)| x + s * dx).collect();
            if nodes_admissible(&trial, zero) {
                let (rt, jt) = zonal_system(d, &trial, zero, n);
                let ft = sum_sq(&rt);
                if ft < f {
                    a = trial;
                    r = rt;
                    jac = jt;
                    f = ft;
                    accepted = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if accepted {
            lambda = (lambda * 0.3).max(1e-15);
        } else {
            lambda *= 10.0;
            if lambda > 1e8 {
                break;
            }
        }
    }
    (a, f)
}

/// Equally weighted polar nodes (values of `cos θ`, descending) that
/// integrate the zonal harmonics `P_1..P_{2d}` exactly.
///
/// The nodes come in `±a` pairs with an extra node at `0` when `n_theta` is
/// odd. The solve starts from equispaced pair positions and falls back to
/// seeded jittered restarts. For `d >= 5` the system has more unknowns than
/// equations and any admissible interior solution is returned.
pub fn polar_nodes(d: usize, n_theta: usize) -> Result<Vec<f64>> {
    if n_theta < d + 1 || n_theta == 0 {
        return Err(Error::InvalidProductSpec(format!(
            "n_theta = {n_theta} is below d+1 = {}",
            d + 1
        )));
    }
    let zero = n_theta % 2 == 1;
    let np = n_theta / 2;
    let n = n_theta as f64;
    let base: Vec<f64> = (0..np)
        .map(|k| {
            if zero {
                (k + 1) as f64 / (np as f64 + 0.5)
            } else {
                (k as f64 + 0.5) / np as f64
            }
        })
        .map(|a| 0.95 * a)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(((d as u64) << 32) | n_theta as u64);
    let mut best = f64::INFINITY;
    for attempt in 0..NODE_RETRIES {
        let start = if attempt == 0 {
            base.clone()
        } else {
            let mut s: Vec<f64> = base
                .iter()
                .map(|&a| (a + 0.1 * (rng.random::<f64>() - 0.5)).clamp(0.01, 0.99))
                .collect();
            s.sort_by(f64::total_cmp);
            s
        };
        let (mut pairs, f) = if d == 0 { (start, 0.0) } else { solve_pairs(d, start, zero, n) };
        pairs.sort_by(f64::total_cmp);
        best = best.min(f);
        let mut all = pairs.clone();
        if zero {
            all.push(0.0);
            all.sort_by(f64::total_cmp);
        }
        if f <= NODE_TOL && nodes_admissible(&pairs, zero) && min_gap(&all) > NODE_MIN_GAP {
            let mut nodes: Vec<f64> = pairs.iter().rev().copied().collect();
            if zero {
                nodes.push(0.0);
            }
            nodes.extend(pairs.iter().map(|a| -a));
            return Ok(nodes);
        }
    }
    Err(Error::NoConvergence { d, n_theta, residual: best })
}

/// Points `(θ_i, α + 2πj/n_φ − π)`, `j = 1..=n_φ`, for every polar node,
/// node-major.
pub fn product_design(spec: &ProductDesignSpec) -> Result<Design> {
    let nodes = polar_nodes(spec.d, spec.n_theta)?;
    let mut points = Vec::with_capacity(nodes.len() * spec.n_phi);
    for &x in &nodes {
        let theta = x.clamp(-1.0, 1.0).acos();
        for j in 1..=spec.n_phi {
            let phi = spec.alpha + 2.0 * PI * j as f64 / spec.n_phi as f64 - PI;
            points.push(SpherePoint::from_angles(theta, phi)?);
        }
    }
    Ok(Design::new(points)?.with_label(format!(
        "product d={} n_theta={} n_phi={} alpha={}",
        spec.d, spec.n_theta, spec.n_phi, spec.alpha
    )))
}
