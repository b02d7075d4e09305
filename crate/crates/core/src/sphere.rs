//! Points on the unit sphere and equally weighted designs.
//!
//! A [`SpherePoint`] keeps both the Cartesian unit vector and the polar and
//! azimuthal angles; both are fixed at construction. Azimuths live in
//! `(-π, π]` and points on the polar axis get azimuth `0`.
//!
//! Random designs use ChaCha8 seeded through `SeedableRng::seed_from_u64`,
//! which is stable across platforms and releases of `rand_chacha`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on the polar angle before it is rejected.
const THETA_SLACK: f64 = 1e-9;

/// `|‖v‖² - 1|` below which a vector is taken as already normalized and
/// stored bit-for-bit.
const UNIT_EPS: f64 = 1e-15;

/// A direction on the unit sphere.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    xyz: [f64; 3],
    theta: f64,
    phi: f64,
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_azimuth(phi: f64) -> f64 {
    let mut w = phi.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    if w == -PI {
        w = PI;
    }
    w
}

impl SpherePoint {
    pub fn from_angles(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::Domain("angles must be finite".into()));
        }
        if theta < -THETA_SLACK || theta > PI + THETA_SLACK {
            return Err(Error::Domain(format!("polar angle {theta} outside [0, pi]")));
        }
        let theta = theta.clamp(0.0, PI);
        let phi = if theta == 0.0 || theta == PI { 0.0 } else { wrap_azimuth(phi) };
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Ok(Self { xyz: [st * cp, st * sp, ct], theta, phi })
    }

    /// Normalizes `v` and derives the angles. A vector that is already unit
    /// length to within rounding is stored unchanged.
    pub fn from_vector(v: [f64; 3]) -> Result<Self> {
        if !v.iter().all(|c| c.is_finite()) {
            return Err(Error::Domain("vector has non-finite components".into()));
        }
        let n2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if n2 == 0.0 {
            return Err(Error::ZeroVector);
        }
        let xyz = if (n2 - 1.0).abs() <= UNIT_EPS {
            v
        } else {
            let n = n2.sqrt();
            [v[0] / n, v[1] / n, v[2] / n]
        };
        let rho = xyz[0].hypot(xyz[1]);
        let theta = rho.atan2(xyz[2]);
        let phi = if rho == 0.0 { 0.0 } else { wrap_azimuth(xyz[1].atan2(xyz[0])) };
        Ok(Self { xyz, theta, phi })
    }

    pub fn x(&self) -> f64 {
        self.xyz[0]
    }

    pub fn y(&self) -> f64 {
        self.xyz[1]
    }

    pub fn z(&self) -> f64 {
        self.xyz[2]
    }

    pub fn xyz(&self) -> [f64; 3] {
        self.xyz
    }

    /// Polar angle in `[0, π]`.
    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Azimuth in `(-π, π]`.
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.xyz[0] * other.xyz[0] + self.xyz[1] * other.xyz[1] + self.xyz[2] * other.xyz[2]
    }

    pub fn antipode(&self) -> SpherePoint {
        SpherePoint::from_vector([-self.xyz[0], -self.xyz[1], -self.xyz[2]])
            .expect("antipode of a unit vector")
    }

    /// Applies a 3×3 rotation given row-major.
    pub fn rotated(&self, r: &[[f64; 3]; 3]) -> SpherePoint {
        let v = self.xyz;
        let w = [0, 1, 2].map(|i| r[i][0] * v[0] + r[i][1] * v[1] + r[i][2] * v[2]);
        SpherePoint::from_vector(w).expect("rotation of a unit vector")
    }
}

/// An equally weighted, nonempty point set on the sphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Design {
    points: Vec<SpherePoint>,
    label: Option<String>,
}

impl Design {
    pub fn new(points: Vec<SpherePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyDesign);
        }
        Ok(Self { points, label: None })
    }

    pub fn from_vectors(vectors: &[[f64; 3]]) -> Result<Self> {
        let points = vectors.iter().map(|v| SpherePoint::from_vector(*v)).collect::<Result<_>>()?;
        Self::new(points)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn points(&self) -> &[SpherePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn vectors(&self) -> Vec<[f64; 3]> {
        self.points.iter().map(SpherePoint::xyz).collect()
    }

    pub fn rotated(&self, r: &[[f64; 3]; 3]) -> Design {
        Design {
            points: self.points.iter().map(|p| p.rotated(r)).collect(),
            label: self.label.clone(),
        }
    }
}

/// `n` independent uniform points from a seeded ChaCha8 stream: two uniforms
/// `u, v` per point in order, then `θ = arccos(1 - 2u)`, `φ = 2πv - π`.
pub fn random_design(n: usize, seed: u64) -> Design {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points = (0..n.max(1))
        .map(|_| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            let theta = (1.0 - 2.0 * u).clamp(-1.0, 1.0).acos();
            SpherePoint::from_angles(theta, 2.0 * PI * v - PI).expect("angles in range")
        })
        .collect();
    Design { points, label: Some(format!("random n={n} seed={seed}")) }
}

/// A rotation matrix drawn from a seeded stream (uniform unit quaternion).
pub fn random_rotation(seed: u64) -> [[f64; 3]; 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (u1, u2, u3): (f64, f64, f64) = (rng.random(), rng.random(), rng.random());
    let a = (1.0 - u1).sqrt();
    let b = u1.sqrt();
    let (w, x, y, z) = (
        a * (2.0 * PI * u2).sin(),
        a * (2.0 * PI * u2).cos(),
        b * (2.0 * PI * u3).sin(),
        b * (2.0 * PI * u3).cos(),
    );
    [
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
        [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
        [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn assert_vec(p: &SpherePoint, e: [f64; 3]) {
        for (a, b) in p.xyz().iter().zip(e) {
            assert!((a - b).abs() < 1e-15, "{:?} vs {e:?}", p.xyz());
        }
    }

    #[test]
    fn from_angles_axes() {
        assert_vec(&SpherePoint::from_angles(0.0, 1.234).unwrap(), [0.0, 0.0, 1.0]);
        assert_vec(&SpherePoint::from_angles(FRAC_PI_2, 0.0).unwrap(), [1.0, 0.0, 0.0]);
        assert_vec(&SpherePoint::from_angles(FRAC_PI_2, FRAC_PI_2).unwrap(), [0.0, 1.0, 0.0]);
        assert_eq!(SpherePoint::from_angles(0.0, 1.234).unwrap().phi(), 0.0);
    }

    #[test]
    fn from_angles_rejects_out_of_range() {
        assert!(SpherePoint::from_angles(-1e-6, 0.0).is_err());
        assert!(SpherePoint::from_angles(PI + 1e-6, 0.0).is_err());
        assert!(SpherePoint::from_angles(PI + 1e-10, 0.0).is_ok());
        assert!(SpherePoint::from_angles(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn azimuth_wraps_into_half_open_interval() {
        let p = SpherePoint::from_angles(1.0, -PI).unwrap();
        assert_eq!(p.phi(), PI);
        let q = SpherePoint::from_angles(1.0, 3.0 * PI + 0.5).unwrap();
        assert!((q.phi() - (-PI + 0.5)).abs() < 1e-12);
    }

    #[test]
    fn from_vector_examples() {
        let p = SpherePoint::from_vector([0.0, 0.0, 2.0]).unwrap();
        assert_eq!((p.theta(), p.phi()), (0.0, 0.0));
        let q = SpherePoint::from_vector([1.0, 1.0, 0.0]).unwrap();
        assert!((q.theta() - FRAC_PI_2).abs() < 1e-15);
        assert!((q.phi() - PI / 4.0).abs() < 1e-15);
        let s = SpherePoint::from_vector([0.0, 0.0, -1.0]).unwrap();
        assert_eq!(s.theta(), PI);
        assert_eq!(s.phi(), 0.0);
        assert_eq!(SpherePoint::from_vector([0.0; 3]), Err(Error::ZeroVector));
    }

    #[test]
    fn empty_design_rejected() {
        assert_eq!(Design::new(vec![]), Err(Error::EmptyDesign));
    }

    #[test]
    fn random_design_is_deterministic() {
        assert_eq!(random_design(1, 7), random_design(1, 7));
        assert_ne!(random_design(3, 7), random_design(3, 8));
    }

    #[test]
    fn random_design_moments() {
        let d = random_design(10_000, 1);
        let n = d.len() as f64;
        let mz = d.points().iter().map(|p| p.z()).sum::<f64>() / n;
        let mz2 = d.points().iter().map(|p| p.z() * p.z()).sum::<f64>() / n;
        assert!(mz.abs() < 3.0 / 3f64.sqrt() / 100.0);
        assert!((mz2 - 1.0 / 3.0).abs() < 0.01);
        for p in d.points() {
            let [x, y, z] = p.xyz();
            assert!((x * x + y * y + z * z - 1.0).abs() < 1e-12);
            let (st, ct) = p.theta().sin_cos();
            assert!((x - st * p.phi().cos()).abs() < 1e-12);
            assert!((y - st * p.phi().sin()).abs() < 1e-12);
            assert!((z - ct).abs() < 1e-12);
        }
    }

    #[test]
    fn rotation_is_orthogonal() {
        let r = random_rotation(4);
        for i in 0..3 {
            for j in 0..3 {
                let dot: f64 = (0..3).map(|k| r[i][k] * r[j][k]).sum();
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((dot - e).abs() < 1e-14);
            }
        }
    }

    proptest! {
        #[test]
        fn angle_vector_round_trip(theta in 1e-3..(PI - 1e-3), phi in (1e-3 - PI)..(PI - 1e-3)) {
            let p = SpherePoint::from_angles(theta, phi).unwrap();
            let q = SpherePoint::from_vector(p.xyz()).unwrap();
            prop_assert!((q.theta() - theta).abs() < 1e-12);
            prop_assert!((q.phi() - phi).abs() < 1e-12);
        }
    }
}
