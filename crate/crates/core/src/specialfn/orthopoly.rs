use alloc::vec::Vec;

use super::hyper::hyp2f1_terminating;
use super::Z_SLACK;
use crate::error::{Error, Result};
use crate::math::ln_gamma_signed;
use crate::math::FloatExt;

/// Degree and parameters of a Jacobi polynomial `P_n^{(α,β)}`.
///
/// `beta` is deliberately unrestricted: the real-order kernel expansion uses
/// the non-classical pair `(l + 1/2, -l - 1)`, which is not an orthogonal
/// family but obeys the same three-term recurrence.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PolynomialParams {
    pub degree: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl PolynomialParams {
    pub fn new(degree: usize, alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0) || !beta.is_finite() {
            return Err(Error::Domain {
                what: "Jacobi alpha must exceed -1",
                value: alpha,
            });
        }
        Ok(Self {
            degree,
            alpha,
            beta,
        })
    }
}

fn check_z(z: f64) -> Result<f64> {
    if !(z.abs() <= 1.0 + Z_SLACK) {
        return Err(Error::Domain {
            what: "polynomial argument outside [-1, 1]",
            value: z,
        });
    }
    Ok(z.clamp(-1.0, 1.0))
}

/// Legendre polynomial `P_n(z)` by the three-term recurrence.
pub fn legendre(n: usize, z: f64) -> Result<f64> {
    let z = check_z(z)?;
    let mut p_prev = 1.0;
    if n == 0 {
        return Ok(p_prev);
    }
    let mut p = z;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * z * p - kf * p_prev) / (kf + 1.0);
        p_prev = p;
        p = next;
    }
    Ok(p)
}

/// `P_0(z), …, P_{n_max}(z)`.
pub fn legendre_all(n_max: usize, z: f64) -> Result<Vec<f64>> {
    let z = check_z(z)?;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max >= 1 {
        out.push(z);
    }
    for k in 1..n_max {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * z * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(next);
    }
    Ok(out)
}

/// Jacobi polynomial `P_n^{(α,β)}(z)` by the standard three-term recurrence
/// (Szegő 4.5.1).
pub fn jacobi(params: PolynomialParams, z: f64) -> Result<f64> {
    let all = jacobi_all(params.degree, params.alpha, params.beta, z)?;
    Ok(all[params.degree])
}

/// `P_0^{(α,β)}(z), …, P_{n_max}^{(α,β)}(z)`.
pub fn jacobi_all(n_max: usize, alpha: f64, beta: f64, z: f64) -> Result<Vec<f64>> {
    PolynomialParams::new(n_max, alpha, beta)?;
    let z = check_z(z)?;
    let s = alpha + beta;
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(1.0);
    if n_max == 0 {
        return Ok(out);
    }
    out.push((alpha + 1.0) + 0.5 * (s + 2.0) * (z - 1.0));
    for n in 2..=n_max {
        let nf = n as f64;
        let c = 2.0 * nf + s;
        let denom = 2.0 * nf * (nf + s) * (c - 2.0);
        if denom.abs() < 1e-300 {
            // Degenerate recurrence coefficient; fall back to the explicit
            // hypergeometric form for this degree.
            out.push(jacobi_explicit(n, alpha, beta, z));
            continue;
        }
        let a1 = (c - 1.0) * (c * (c - 2.0) * z + alpha * alpha - beta * beta);
        let a2 = 2.0 * (nf + alpha - 1.0) * (nf + beta - 1.0) * c;
        out.push((a1 * out[n - 1] - a2 * out[n - 2]) / denom);
    }
    Ok(out)
}

/// `P_n^{(α,β)}(z) = (α+1)_n / n! · ₂F₁(-n, n+α+β+1; α+1; (1-z)/2)`.
fn jacobi_explicit(n: usize, alpha: f64, beta: f64, z: f64) -> f64 {
    let (lg_a, s_a) = ln_gamma_signed(alpha + 1.0 + n as f64);
    let (lg_b, s_b) = ln_gamma_signed(alpha + 1.0);
    let (lg_n, _) = ln_gamma_signed(n as f64 + 1.0);
    let pre = s_a * s_b * (lg_a - lg_b - lg_n).exp();
    pre * hyp2f1_terminating(n, n as f64 + alpha + beta + 1.0, alpha + 1.0, 0.5 * (1.0 - z))
}
