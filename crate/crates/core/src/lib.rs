//! Stability analysis for minimal surfaces in `R^n` given by polynomial
//! Weierstrass–Enneper data.
//!
//! The crate evaluates the second-variation functional of self-map
//! (quasiconformal precomposition) variations in closed form, assembles the
//! associated quadratic form and estimates its index, and cross-checks the
//! results with grid-based Cauchy/Beurling transforms and with the classical
//! spherical-cap eigenvalue criterion.

pub mod algebra;
pub mod error;
pub mod schwarz;
pub mod spectral;
pub mod transforms;
pub mod weierstrass;

pub use algebra::{Complex, LaurentTail, Polynomial};
pub use error::{Error, Result};
pub use spectral::{HarmonicField, QuadraticFormReport};
pub use transforms::{DiskGrid, PlaneField, PlaneGrid};
pub use weierstrass::WeierstrassData;
