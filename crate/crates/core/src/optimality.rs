//! Information matrices, Kiefer criteria and least-squares fitting for the
//! spherical harmonic regression model of order `d`.
//!
//! With `f(x)` the basis vector of order `d`, an equally weighted design has
//! information matrix `M = (1/n) Σ_i f(x_i) f(x_i)ᵀ`. Entries of `M` are
//! design averages of products of two harmonics of degree at most `d`, so
//! every design of strength at least `2d` reproduces the uniform-measure
//! value `M = I`. All criteria below are normalized so the identity scores 1
//! and larger is better.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonics::{basis_into, basis_len, HarmonicIndex};
use crate::sphere::Design;

/// Eigenvalues below this fraction of the largest count as zero.
pub const SINGULAR_RATIO: f64 = 1e-12;

/// Identity tolerance that enables the fast fitting path.
pub const IDENTITY_FAST_PATH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct InformationMatrix {
    d: usize,
    matrix: DMatrix<f64>,
}

impl InformationMatrix {
    pub fn order(&self) -> usize {
        self.d
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Largest absolute entry of `M - I`.
    pub fn identity_deviation(&self) -> f64 {
        identity_deviation(&self.matrix)
    }
}

fn identity_deviation(m: &DMatrix<f64>) -> f64 {
    let mut dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let e = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((m[(i, j)] - e).abs());
        }
    }
    dev
}

/// Averages `f fᵀ` and `y f` over the design in one pass.
fn moments(design: &Design, d: usize, y: Option<&[f64]>) -> (DMatrix<f64>, DVector<f64>) {
    let k = basis_len(d);
    let mut m = DMatrix::<f64>::zeros(k, k);
    let mut b = DVector::<f64>::zeros(k);
    let mut f = vec![0.0; k];
    for (i, p) in design.points().iter().enumerate() {
        basis_into(d, p, &mut f);
        for r in 0..k {
            for c in r..k {
                m[(r, c)] += f[r] * f[c];
            }
        }
        if let Some(y) = y {
            for r in 0..k {
                b[r] += y[i] * f[r];
            }
        }
    }
    let n = design.len() as f64;
    for r in 0..k {
        for c in r..k {
            let v = m[(r, c)] / n;
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
    }
    b /= n;
    (m, b)
}

pub fn information_matrix(design: &Design, d: usize) -> InformationMatrix {
    let (matrix, _) = moments(design, d, None);
    InformationMatrix { d, matrix }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiValue {
    pub p: f64,
    pub value: f64,
}

/// Scalar summaries of an information matrix.
///
/// `phi` lists `Φ_p = ((1/k) Σ λ_i^{-p})^{-1/p}` for each requested `p`
/// (`p = 0` is the D-criterion, `p = ∞` the E-criterion). Because the
/// optimum is the identity with every criterion equal to 1, each value is
/// also the efficiency of the design relative to the optimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriteriaReport {
    pub d: Option<usize>,
    pub size: usize,
    pub d_criterion: f64,
    pub a_criterion: f64,
    pub e_criterion: f64,
    pub phi: Vec<PhiValue>,
    pub identity_deviation: f64,
    pub singular: bool,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

fn phi_p(eigs: &[f64], p: f64) -> f64 {
    let k = eigs.len() as f64;
    let lmin = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    if p == 0.0 {
        (eigs.iter().map(|l| l.ln()).sum::<f64>() / k).exp()
    } else if p.is_infinite() {
        lmin
    } else {
        // scaled by λ_min so large p cannot overflow
        let mean = eigs.iter().map(|l| (lmin / l).powf(p)).sum::<f64>() / k;
        lmin * mean.powf(-1.0 / p)
    }
}

/// Criteria of an arbitrary symmetric positive semidefinite matrix.
pub fn criteria_of_matrix(m: &DMatrix<f64>, p_list: &[f64]) -> Result<CriteriaReport> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::Dimension(format!(
            "criteria need a nonempty square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if let Some(p) = p_list.iter().find(|p| p.is_nan() || **p < 0.0) {
        return Err(Error::Domain(format!("Phi_p needs p >= 0, got {p}")));
    }
    let eig = SymmetricEigen::new(m.clone());
    let eigs: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let lmax = eigs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lmin = eigs.iter().copied().fold(f64::INFINITY, f64::min);
    let singular = !(lmax > 0.0) || lmin < SINGULAR_RATIO * lmax;
    let k = eigs.len() as f64;
    let (dc, ac, ec, phi) = if singular {
        (0.0, 0.0, 0.0, p_list.iter().map(|&p| PhiValue { p, value: 0.0 }).collect())
    } else {
        (
            phi_p(&eigs, 0.0),
            k / eigs.iter().map(|l| 1.0 / l).sum::<f64>(),
            lmin,
            p_list.iter().map(|&p| PhiValue { p, value: phi_p(&eigs, p) }).collect(),
        )
    };
    Ok(CriteriaReport {
        d: None,
        size: m.nrows(),
        d_criterion: dc,
        a_criterion: ac,
        e_criterion: ec,
        phi,
        identity_deviation: identity_deviation(m),
        singular,
        min_eigenvalue: lmin,
        max_eigenvalue: lmax,
    })
}

pub fn criteria(m: &InformationMatrix, p_list: &[f64]) -> Result<CriteriaReport> {
    let mut report = criteria_of_matrix(&m.matrix, p_list)?;
    report.d = Some(m.d);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResultCheck {
    pub d: usize,
    pub holds: bool,
    pub deviation: f64,
}

/// Whether the design attains the identity information matrix for order
/// `d`, which it must whenever its strength is at least `2d`.
pub fn check_result(design: &Design, d: usize, tol: f64) -> ResultCheck {
    let deviation = information_matrix(design, d).identity_deviation();
    ResultCheck { d, holds: deviation <= tol, deviation }
}

/// Regression coefficients `c_l^m` in basis order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientVector {
    d: usize,
    c: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(d: usize, c: Vec<f64>) -> Result<Self> {
        if c.len() != basis_len(d) {
            return Err(Error::Dimension(format!(
                "order {d} needs {} coefficients, got {}",
                basis_len(d),
                c.len()
            )));
        }
        Ok(Self { d, c })
    }

    /// Order implied by a coefficient count, if it is a perfect square.
    pub fn from_values(c: Vec<f64>) -> Result<Self> {
        let d = (c.len() as f64).sqrt().round() as usize;
        if d == 0 || d * d != c.len() {
            return Err(Error::Dimension(format!(
                "{} coefficients is not a square count (d+1)^2",
                c.len()
            )));
        }
        Self::new(d - 1, c)
    }

    pub fn order(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[f64] {
        &self.c
    }

    pub fn get(&self, l: usize, m: i64) -> Option<f64> {
        let idx = HarmonicIndex::new(l, m).ok()?;
        self.c.get(idx.position()).copied()
    }
}

/// Least-squares estimate `ĉ = M⁻¹ (1/n) Σ y_i f(x_i)`.
pub fn fit(design: &Design, y: &[f64], d: usize) -> Result<CoefficientVector> {
    if y.len() != design.len() {
        return Err(Error::Dimension(format!(
            "{} observations for {} design points",
            y.len(),
            design.len()
        )));
    }
    let (m, b) = moments(design, d, Some(y));
    if identity_deviation(&m) <= IDENTITY_FAST_PATH_TOL {
        return CoefficientVector::new(d, b.iter().copied().collect());
    }
    let singular = Error::Singular { d, n: design.len() };
    let eig = SymmetricEigen::new(m.clone());
    let lmax = eig.eigenvalues.max();
    let lmin = eig.eigenvalues.min();
    if !(lmax > 0.0) || lmin < SINGULAR_RATIO * lmax {
        return Err(singular);
    }
    let chol = m.cholesky().ok_or(singular)?;
    CoefficientVector::new(d, chol.solve(&b).iter().copied().collect())
}

/// Model values `Σ c_l^m Y_l^m(x_i)` at every design point.
pub fn evaluate(design: &Design, c: &CoefficientVector) -> Vec<f64> {
    let mut f = vec![0.0; basis_len(c.d)];
    design
        .points()
        .iter()
        .map(|p| {
            basis_into(c.d, p, &mut f);
            f.iter().zip(&c.c).map(|(a, b)| a * b).sum()
        })
        .collect()
}

/// Observations `y_i = Σ c_l^m Y_l^m(x_i) + σ ε_i` with standard normal
/// `ε_i` drawn in point order from a ChaCha8 stream seeded with `seed`.
pub fn simulate(design: &Design, c: &CoefficientVector, noise_sd: f64, seed: u64) -> Result<Vec<f64>> {
    if !(noise_sd >= 0.0) || !noise_sd.is_finite() {
        return Err(Error::Domain(format!("noise sd must be finite and >= 0, got {noise_sd}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(evaluate(design, c)
        .into_iter()
        .map(|v| {
            let e: f64 = StandardNormal.sample(&mut rng);
            v + noise_sd * e
        })
        .collect())
}

/// Standard normal coefficients for order `d` from a seeded stream.
pub fn random_coefficients(d: usize, seed: u64) -> CoefficientVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = (0..basis_len(d)).map(|_| StandardNormal.sample(&mut rng)).collect();
    CoefficientVector { d, c }
}
