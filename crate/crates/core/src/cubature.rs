//! Cubature exactness of equally weighted designs.
//!
//! A design is a spherical t-design when its average of every polynomial of
//! degree at most `t` equals the uniform average over the sphere. Every real
//! harmonic of degree `l >= 1` integrates to zero, so the per-degree residual
//!
//! ```text
//! r_l = Σ_m ( (1/n) Σ_i Y_l^m(x_i) )²
//! ```
//!
//! vanishes exactly when the design integrates degree-`l` polynomials
//! correctly. `r_l` is rotation invariant.
//!
//! [`monomial_check`] is an independent oracle that never touches the
//! harmonic basis: it compares design averages of `x^a y^b z^c` against the
//! closed-form sphere integral.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::harmonics::{basis_into, basis_len};
use crate::sphere::Design;

pub const DEFAULT_TOL: f64 = 1e-10;

/// Per-degree residuals and the strength they imply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthReport {
    /// `residuals[l - 1]` is `r_l` for `l = 1..=t_max`.
    pub residuals: Vec<f64>,
    pub strength: usize,
    pub tol: f64,
    pub t_max: usize,
}

impl StrengthReport {
    pub fn residual(&self, l: usize) -> Option<f64> {
        l.checked_sub(1).and_then(|i| self.residuals.get(i)).copied()
    }

    /// Sum of the residuals up to `t`, the objective minimized by the
    /// construction routines.
    pub fn total(&self, t: usize) -> f64 {
        self.residuals.iter().take(t).sum()
    }
}

/// Design averages of every harmonic with degree `<= t_max`, in basis order.
pub fn harmonic_means(design: &Design, t_max: usize) -> Vec<f64> {
    let len = basis_len(t_max);
    let mut acc = vec![0.0; len];
    let mut buf = vec![0.0; len];
    for p in design.points() {
        basis_into(t_max, p, &mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b;
        }
    }
    let n = design.len() as f64;
    acc.iter_mut().for_each(|a| *a /= n);
    acc
}

/// `r_l` for `l = 1..=t_max`.
pub fn residuals(design: &Design, t_max: usize) -> Vec<f64> {
    let means = harmonic_means(design, t_max);
    (1..=t_max)
        .map(|l| means[l * l..(l + 1) * (l + 1)].iter().map(|v| v * v).sum())
        .collect()
}

/// Largest `t <= t_max` with `r_1, …, r_t` all at most `tol`.
pub fn strength(design: &Design, t_max: usize, tol: f64) -> StrengthReport {
    let residuals = residuals(design, t_max);
    let strength = residuals.iter().take_while(|&&r| r <= tol).count();
    StrengthReport { residuals, strength, tol, t_max }
}

/// `∫ x^a y^b z^c dσ` under the normalized uniform measure on the sphere.
///
/// Zero when any exponent is odd, otherwise
/// `(a-1)!! (b-1)!! (c-1)!! / (a+b+c+1)!!`, evaluated by peeling off one
/// even power at a time so nothing overflows.
pub fn monomial_integral(a: u32, b: u32, c: u32) -> f64 {
    if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
        return 0.0;
    }
    let mut exps = [a, b, c];
    let mut value = 1.0;
    for i in 0..3 {
        while exps[i] > 0 {
            let total: u32 = exps.iter().sum();
            value *= (exps[i] - 1) as f64 / (total + 1) as f64;
            exps[i] -= 2;
        }
    }
    value
}

/// All exponent triples with `a + b + c <= t`, ordered by total degree.
pub fn exponent_triples(t: u32) -> Vec<[u32; 3]> {
    let mut out = Vec::new();
    for total in 0..=t {
        for a in (0..=total).rev() {
            for b in (0..=total - a).rev() {
                out.push([a, b, total - a - b]);
            }
        }
    }
    out
}

fn monomial_deviation(design: &Design, [a, b, c]: [u32; 3]) -> f64 {
    let n = design.len() as f64;
    let mean = design
        .points()
        .iter()
        .map(|p| p.x().powi(a as i32) * p.y().powi(b as i32) * p.z().powi(c as i32))
        .sum::<f64>()
        / n;
    (mean - monomial_integral(a, b, c)).abs()
}

/// Largest deviation between design averages and sphere integrals over
/// monomials of total degree at most `t`.
///
/// `trials` triples are drawn from a ChaCha8 stream seeded with `seed`; when
/// `trials` covers the number of distinct triples every triple is checked
/// once instead.
pub fn monomial_check(design: &Design, t: u32, trials: usize, seed: u64) -> f64 {
    let all = exponent_triples(t);
    if trials >= all.len() {
        return all.iter().map(|&e| monomial_deviation(design, e)).fold(0.0, f64::max);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| monomial_deviation(design, all[rng.random_range(0..all.len())]))
        .fold(0.0, f64::max)
}

/// Exhaustive form of [`monomial_check`].
pub fn monomial_check_all(design: &Design, t: u32) -> f64 {
    monomial_check(design, t, usize::MAX, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{platonic, Platonic};
    use crate::sphere::{random_design, random_rotation, SpherePoint};

    fn pole_pair() -> Design {
        Design::from_vectors(&[[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]).unwrap()
    }

    #[test]
    fn single_pole_residual() {
        let d = Design::from_vectors(&[[0.0, 0.0, 1.0]]).unwrap();
        let r = residuals(&d, 1);
        assert!((r[0] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn antipodal_pairs_cancel_odd_degrees() {
        let p = SpherePoint::from_angles(0.9, -2.2).unwrap();
        let d = Design::new(vec![p, p.antipode()]).unwrap();
        let r = residuals(&d, 9);
        for l in (1..=9).step_by(2) {
            assert!(r[l - 1] < 1e-30, "l={l}: {}", r[l - 1]);
        }
        assert!(residuals(&pole_pair(), 3)[0] < 1e-30);
    }

    #[test]
    fn octahedron_degree_four() {
        let r = residuals(&platonic(Platonic::Octahedron), 4);
        // mean of Y_4^0 = 3 (2 + 4*3/8)/6 = 1.75
        assert!(r[3] > 0.1);
        assert!(r[3] >= 1.75f64.powi(2) - 1e-12);
    }

    #[test]
    fn platonic_strengths() {
        let cases = [
            (Platonic::Tetrahedron, 2),
            (Platonic::Octahedron, 3),
            (Platonic::Cube, 3),
            (Platonic::Icosahedron, 5),
            (Platonic::Dodecahedron, 5),
        ];
        for (solid, s) in cases {
            let rep = strength(&platonic(solid), 8, DEFAULT_TOL);
            assert_eq!(rep.strength, s, "{solid:?}");
            assert!(rep.residual(s + 1).unwrap() > 1e-3);
        }
    }

    #[test]
    fn random_design_has_no_strength() {
        for seed in 0..5 {
            let rep = strength(&random_design(50, seed), 3, DEFAULT_TOL);
            assert_eq!(rep.strength, 0);
            assert!(rep.residuals[0] > 1e-6);
        }
    }

    #[test]
    fn strength_is_monotone_in_tol() {
        let d = platonic(Platonic::Icosahedron);
        let mut last = usize::MAX;
        for tol in [1e-2, 1e-6, 1e-10, 1e-20, 1e-40] {
            let s = strength(&d, 8, tol).strength;
            assert!(s <= last);
            last = s;
        }
    }

    #[test]
    fn monomial_integrals() {
        assert!((monomial_integral(0, 0, 2) - 1.0 / 3.0).abs() < 1e-16);
        assert!((monomial_integral(0, 0, 4) - 0.2).abs() < 1e-16);
        assert_eq!(monomial_integral(1, 0, 0), 0.0);
        assert_eq!(monomial_integral(0, 0, 0), 1.0);
        // x^2 y^2 = 1/15
        assert!((monomial_integral(2, 2, 0) - 1.0 / 15.0).abs() < 1e-16);
        assert!(monomial_integral(20, 20, 20) > 0.0);
    }

    #[test]
    fn monomial_integral_matches_quadrature() {
        // product Gauss rule in cos θ (Legendre nodes) and equispaced φ
        let n = 24;
        let (nodes, weights) = gauss_legendre(n);
        let nphi = 64;
        for [a, b, c] in exponent_triples(8) {
            let mut s = 0.0;
            for (x, w) in nodes.iter().zip(&weights) {
                let st = (1.0 - x * x).sqrt();
                for j in 0..nphi {
                    let phi = 2.0 * std::f64::consts::PI * j as f64 / nphi as f64;
                    let (sp, cp) = phi.sin_cos();
                    s += w / 2.0 / nphi as f64
                        * (st * cp).powi(a as i32)
                        * (st * sp).powi(b as i32)
                        * x.powi(c as i32);
                }
            }
            assert!((s - monomial_integral(a, b, c)).abs() < 1e-13, "{a} {b} {c}");
        }
    }

    fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 1..n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes.push(x);
            weights.push(2.0 / ((1.0 - x * x) * dp * dp));
        }
        (nodes, weights)
    }

    #[test]
    fn monomial_check_examples() {
        let ico = platonic(Platonic::Icosahedron);
        assert!(monomial_check(&ico, 5, 200, 1) < 1e-12);
        let oct = platonic(Platonic::Octahedron);
        assert!(monomial_check(&oct, 4, 200, 1) >= 0.1);
        let d = random_design(7, 3);
        let n = d.len() as f64;
        let centroid = [0, 1, 2].map(|k| d.points().iter().map(|p| p.xyz()[k]).sum::<f64>() / n);
        let expect = centroid.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        assert!((monomial_check(&d, 1, 100, 0) - expect).abs() < 1e-15);
    }

    #[test]
    fn residuals_rotation_invariant() {
        for seed in 0..5 {
            let d = random_design(30, seed);
            let rot = d.rotated(&random_rotation(seed + 100));
            for (a, b) in residuals(&d, 10).iter().zip(residuals(&rot, 10)) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn exponent_triple_count() {
        for t in 0..8u32 {
            let n = ((t + 1) * (t + 2) * (t + 3) / 6) as usize;
            assert_eq!(exponent_triples(t).len(), n);
        }
    }
}
