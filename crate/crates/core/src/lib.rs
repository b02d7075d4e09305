//! Spherical t-designs as optimal exact designs for spherical harmonic
//! regression on the unit sphere.
//!
//! The crate is organised bottom-up:
//!
//! * [`harmonics`] evaluates associated Legendre functions and the real
//!   spherical harmonic basis of the regression model.
//! * [`sphere`] holds points and equally weighted designs.
//! * [`catalog`] generates Platonic solids and longitude–latitude product
//!   designs, plus the point-count lower bound for t-designs.
//! * [`cubature`] measures how far a design is from being a t-design and
//!   cross-checks with an independent monomial integration oracle.
//! * [`optimality`] builds information matrices, evaluates Kiefer Φ_p
//!   criteria and fits/simulates the regression model.
//! * [`construct`] searches for t-designs numerically.
//! * [`stereogram`] projects designs onto the equatorial plane and renders SVG.
//! * [`designio`] reads and writes point-set files.

pub mod catalog;
#[cfg(feature = "cli")]
pub mod cli;
pub mod construct;
pub mod cubature;
pub mod designio;
mod error;
pub mod harmonics;
pub mod optimality;
pub mod sphere;
pub mod stereogram;

pub use error::{Error, Result};
pub use sphere::{Design, SpherePoint};
