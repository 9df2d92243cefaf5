#![no_std]
// The test harness links std, whose inherent float methods shadow the
// libm-backed trait.
#![cfg_attr(test, allow(unused_imports))]
//! Transmutation-operator numerics for the perturbed Bessel equation
//!
//! ```text
//! -u'' + (l(l+1)/x² + q(x)) u = ω² u,   x ∈ (0, b].
//! ```
//!
//! The crate builds the Fourier–Legendre coefficients `β_k(x)` of the
//! cosine kernel `R`, turns them into Fourier–Jacobi series for the
//! transmutation kernel `K(x,t)` (integer and real `l`), evaluates the
//! regular solution with an `ω`-independent error bound and solves Dirichlet
//! eigenvalue problems. A high-accuracy ODE integrator serves as the
//! independent reference for all of it.
//!
//! `no_std` with `alloc`; floating-point functions come from `libm`.

extern crate alloc;

mod math;

pub mod coeffs;
pub mod error;
pub mod kernel;
pub mod linalg;
pub mod ode;
pub mod oracle;
pub mod potential;
pub mod quadrature;
pub mod roots;
pub mod solution;
pub mod specialfn;
pub mod spectral;

pub use error::{Error, Result};
