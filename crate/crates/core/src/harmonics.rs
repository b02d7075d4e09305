//! Associated Legendre functions and the real spherical harmonic basis.
//!
//! The basis is orthonormal under the *normalized* uniform measure on the
//! sphere (total mass one), so that `Y_0^0 = 1` and the information matrix of
//! the uniform distribution is the identity. No Condon–Shortley phase is used
//! anywhere in this module.
//!
//! For `m > 0`:
//!
//! ```text
//! Y_l^0      = sqrt(2l+1) P_l(cos θ)
//! Y_l^m      = sqrt(2(2l+1) (l-m)!/(l+m)!) P_l^m(cos θ) cos(mφ)
//! Y_l^{-m}   = sqrt(2(2l+1) (l-m)!/(l+m)!) P_l^m(cos θ) sin(-mφ)
//! ```
//!
//! The negative-order branch uses `sin(mφ)` with the signed order, exactly as
//! the model is usually written; only the sign of those basis functions
//! depends on this choice.

use crate::error::{Error, Result};
use crate::sphere::SpherePoint;

/// Highest degree accepted by the unnormalized reference path
/// [`assoc_legendre`].
pub const ASSOC_LEGENDRE_MAX_DEGREE: usize = 40;

/// Highest degree accepted by [`real_sph_harm`].
pub const SPH_HARM_MAX_DEGREE: usize = 200;

/// A degree/order pair `(l, m)` with `|m| <= l`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct HarmonicIndex {
    degree: usize,
    order: i64,
}

impl HarmonicIndex {
    pub fn new(degree: usize, order: i64) -> Result<Self> {
        if order.unsigned_abs() as usize > degree {
            return Err(Error::Domain(format!(
                "order {order} exceeds degree {degree}"
            )));
        }
        Ok(Self { degree, order })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Position of this harmonic in a [`BasisVector`].
    pub fn position(&self) -> usize {
        self.degree * self.degree + (self.order + self.degree as i64) as usize
    }

    /// Inverse of [`HarmonicIndex::position`].
    pub fn from_position(pos: usize) -> Self {
        let degree = (pos as f64).sqrt() as usize;
        // guard against sqrt rounding
        let degree = if (degree + 1) * (degree + 1) <= pos {
            degree + 1
        } else if degree * degree > pos {
            degree - 1
        } else {
            degree
        };
        let order = pos as i64 - (degree * degree) as i64 - degree as i64;
        Self { degree, order }
    }
}

/// Number of basis functions of a model of order `d`, i.e. `(d+1)^2`.
pub fn basis_len(d: usize) -> usize {
    (d + 1) * (d + 1)
}

/// All real harmonics of degree at most `d` evaluated at one point, ordered
/// `(0,0), (1,-1), (1,0), (1,1), (2,-2), …, (d,d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisVector {
    order: usize,
    values: Vec<f64>,
}

impl BasisVector {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, index: HarmonicIndex) -> Option<f64> {
        self.values.get(index.position()).copied()
    }
}

/// Unnormalized associated Legendre function `P_l^m(x)` without the
/// Condon–Shortley phase, `(1-x^2)^{m/2} d^m/dx^m P_l(x)`.
///
/// This is the reference path; it forms `(2m-1)!!` explicitly and is limited
/// to `l <= 40`. Use [`real_sph_harm`] or [`basis_vector`] for high degrees.
pub fn assoc_legendre(l: usize, m: usize, x: f64) -> Result<f64> {
    if m > l {
        return Err(Error::Domain(format!("order {m} exceeds degree {l}")));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("argument {x} outside [-1, 1]")));
    }
    if l > ASSOC_LEGENDRE_MAX_DEGREE {
        return Err(Error::Domain(format!(
            "degree {l} above the reference-path limit {ASSOC_LEGENDRE_MAX_DEGREE}"
        )));
    }
    let s = ((1.0 - x) * (1.0 + x)).sqrt();
    let mut pmm = 1.0;
    for k in 1..=m {
        pmm *= (2 * k - 1) as f64 * s;
    }
    if l == m {
        return Ok(pmm);
    }
    let mut prev = pmm;
    let mut cur = x * (2 * m + 1) as f64 * pmm;
    for ll in (m + 2)..=l {
        let next = ((2 * ll - 1) as f64 * x * cur - (ll + m - 1) as f64 * prev) / (ll - m) as f64;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Fills `out` with `Q_l^m = sqrt((2l+1)(l-m)!/(l+m)!) P_l^m(cos θ)` for all
/// `0 <= m <= l <= d`, stored at the basis position of `(l, m)`.
///
/// The recurrence runs on the normalized values directly so no factorial
/// ratio is ever formed.
fn normalized_legendre(d: usize, ct: f64, st: f64, out: &mut [f64]) {
    let mut qmm = 1.0;
    for m in 0..=d {
        if m > 0 {
            let mf = m as f64;
            qmm *= ((2.0 * mf + 1.0) / (2.0 * mf)).sqrt() * st;
        }
        out[m * m + 2 * m] = qmm;
        if m == d {
            break;
        }
        let mut prev = qmm;
        let mut cur = (2.0 * m as f64 + 3.0).sqrt() * ct * qmm;
        out[(m + 1) * (m + 1) + (m + 1) + m] = cur;
        for l in (m + 2)..=d {
            let lf = l as f64;
            let mf = m as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let lm1 = lf - 1.0;
            let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
            let next = a * (ct * cur - b * prev);
            out[l * l + l + m] = next;
            prev = cur;
            cur = next;
        }
    }
}

/// Evaluates every harmonic up to degree `d` from `cos θ`, `sin θ` and `φ`.
pub(crate) fn basis_from_parts(d: usize, ct: f64, st: f64, phi: f64, out: &mut [f64]) {
    debug_assert_eq!(out.len(), basis_len(d));
    normalized_legendre(d, ct, st, out);
    let sqrt2 = std::f64::consts::SQRT_2;
    for m in 1..=d {
        let (s, c) = (m as f64 * phi).sin_cos();
        for l in m..=d {
            let q = out[l * l + l + m] * sqrt2;
            out[l * l + l + m] = q * c;
            out[l * l + l - m] = -q * s;
        }
    }
}

/// Real spherical harmonic `Y_l^m(θ, φ)`.
pub fn real_sph_harm(l: usize, m: i64, theta: f64, phi: f64) -> Result<f64> {
    HarmonicIndex::new(l, m)?;
    if l > SPH_HARM_MAX_DEGREE {
        return Err(Error::Domain(format!(
            "degree {l} above the supported limit {SPH_HARM_MAX_DEGREE}"
        )));
    }
    if !(0.0..=std::f64::consts::PI).contains(&theta) {
        return Err(Error::Domain(format!("polar angle {theta} outside [0, pi]")));
    }
    if !phi.is_finite() {
        return Err(Error::Domain("azimuth is not finite".into()));
    }
    let ma = m.unsigned_abs() as usize;
    let (st, ct) = theta.sin_cos();
    // only the column of order |m| is needed
    let mut qmm = 1.0;
    for k in 1..=ma {
        let kf = k as f64;
        qmm *= ((2.0 * kf + 1.0) / (2.0 * kf)).sqrt() * st;
    }
    let mut q = qmm;
    if l > ma {
        let mf = ma as f64;
        let mut prev = qmm;
        let mut cur = (2.0 * mf + 3.0).sqrt() * ct * qmm;
        for ll in (ma + 2)..=l {
            let lf = ll as f64;
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let lm1 = lf - 1.0;
            let b = ((lm1 * lm1 - mf * mf) / (4.0 * lm1 * lm1 - 1.0)).sqrt();
            let next = a * (ct * cur - b * prev);
            prev = cur;
            cur = next;
        }
        q = cur;
    }
    Ok(match m {
        0 => q,
        m if m > 0 => std::f64::consts::SQRT_2 * q * (m as f64 * phi).cos(),
        m => std::f64::consts::SQRT_2 * q * (m as f64 * phi).sin(),
    })
}

/// All harmonics of degree `<= d` at `p`, in coefficient order.
pub fn basis_vector(d: usize, p: &SpherePoint) -> BasisVector {
    let mut values = vec![0.0; basis_len(d)];
    basis_into(d, p, &mut values);
    BasisVector { order: d, values }
}

/// Writes the basis at `p` into a caller-provided buffer of length `(d+1)^2`.
pub fn basis_into(d: usize, p: &SpherePoint, out: &mut [f64]) {
    let st = p.x().hypot(p.y());
    basis_from_parts(d, p.z(), st, p.phi(), out);
}

/// Legendre polynomials `P_0..=P_t` and their first derivatives at `x`.
pub fn legendre_with_derivatives(t: usize, x: f64, p: &mut Vec<f64>, dp: &mut Vec<f64>) {
    p.clear();
    dp.clear();
    p.push(1.0);
    dp.push(0.0);
    if t == 0 {
        return;
    }
    p.push(x);
    dp.push(1.0);
    for l in 1..t {
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * x * p[l] - lf * p[l - 1]) / (lf + 1.0);
        p.push(next);
        dp.push(dp[l - 1] + (2.0 * lf + 1.0) * p[l]);
    }
}
