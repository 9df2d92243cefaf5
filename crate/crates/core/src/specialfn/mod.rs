//! Special functions used throughout the crate: Legendre and Jacobi
//! polynomials (including the non-classical parameter range), Bessel
//! functions of real order, spherical Bessel functions, log-gamma ratios and
//! terminating hypergeometric sums.
//!
//! Everything here is a pure function of its arguments.

mod bessel;
mod gamma;
mod hyper;
mod orthopoly;

pub use bessel::{bessel_j, bessel_j_half, spherical_j, spherical_j_array};
pub(crate) use bessel::spherical_j_array_dd;
pub use gamma::{gamma_ratio, ln_gamma_shift, GammaRatio};
pub use hyper::{hyp2f1_terminating, hyp3f2_terminating, hyp3f2_terminating_general};
pub use orthopoly::{jacobi, jacobi_all, legendre, legendre_all, PolynomialParams};

/// Slack allowed on the polynomial argument before a domain error.
pub(crate) const Z_SLACK: f64 = 1e-12;
