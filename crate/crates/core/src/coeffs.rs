//! Fourier–Legendre coefficients `β_k(x)` of the cosine kernel
//!
//! ```text
//! R(x, t) = Σ_k (β_k(x) / x) P_{2k}(t / x),
//! ũ(ω, x) = y(ω, x) + ∫_0^x R(x, t) cos(ωt) dt,
//! ```
//!
//! where `y` is the unperturbed regular solution. Since
//! `∫_0^x R cos(ωt) dt = Σ_k (-1)^k β_k j_{2k}(ωx)`, the `β_k(x)` are fitted by
//! least squares against direct solutions of the equation at a set of
//! collocation frequencies.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{least_squares, Matrix};
use crate::math::FloatExt;
use crate::oracle::{regular_solution_at, unperturbed_tilde, ProblemSetup};
use crate::specialfn::{legendre_all, spherical_j_array, Z_SLACK};

/// Relative singular-value cut for the collocation fit.
pub const SINGULAR_CUT: f64 = 1e-13;

/// Fitted coefficients `β_0(x), …, β_M(x)` at one point `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct BetaTable {
    pub l: f64,
    pub x: f64,
    pub beta: Vec<f64>,
    /// `‖Aβ - r‖ / ‖r‖` of the collocation fit (0 when `r = 0`).
    pub fit_residual: f64,
    /// `Σ_k β_k`, which vanishes for the exact coefficients.
    pub sum_beta: f64,
    /// Numerical rank of the design matrix.
    pub rank: usize,
    /// Number of collocation frequencies used.
    pub freq_count: usize,
}

impl BetaTable {
    /// A table from given coefficients (no fit diagnostics).
    pub fn from_coefficients(l: f64, x: f64, beta: Vec<f64>) -> Self {
        let sum_beta = beta.iter().sum();
        let rank = beta.len();
        Self {
            l,
            x,
            beta,
            fit_residual: 0.0,
            sum_beta,
            rank,
            freq_count: 0,
        }
    }

    /// Truncation degree `M` (index of the last coefficient).
    pub fn m(&self) -> usize {
        self.beta.len().saturating_sub(1)
    }

    pub fn max_abs(&self) -> f64 {
        self.beta.iter().fold(0.0, |m, b| m.max(b.abs()))
    }
}

/// First term of the composite representation,
/// `2^{l+1/2} Γ(l+3/2) ω^{-l-1/2} √x J_{l+1/2}(ωx)`.
pub fn unperturbed_term(l: f64, omega: f64, x: f64) -> Result<f64> {
    if !(omega > 0.0) || !(x > 0.0) {
        return Err(Error::Domain {
            what: "unperturbed term needs omega > 0 and x > 0",
            value: if omega > 0.0 { x } else { omega },
        });
    }
    unperturbed_tilde(l, omega, x)
}

/// Upper end of the collocation grid in units of `2M+3`: `ω_j x ≤ SPAN (2M+3)`.
///
/// The columns `j_{2k}` are orthogonal on `[0, ∞)`, but on a short window
/// their slowly decaying tails make the `Σβ_k` direction nearly singular;
/// reaching well past the first oscillation of the highest column keeps
/// the design matrix condition number in the single or low triple digits.
pub const DEFAULT_SPAN: f64 = 8.0;

/// Default number of collocation frequencies, `16(M+1)` (about one sample
/// per unit of `ωx`).
pub fn default_freq_count(m: usize) -> usize {
    16 * (m + 1)
}

/// Default truncation degree `M` for a given `l`.
///
/// For integer `l` and smooth potentials `β_k` decays geometrically, and
/// `48 + l` reaches the noise floor with room for reference truncations.
/// For other `l` the decay is algebraic (roughly `k^{-4}` for `l = 1/2`),
/// so the series needs many more terms.
pub fn default_m(l: f64) -> usize {
    if l >= 0.0 && l == l.floor() {
        48 + l as usize
    } else {
        160
    }
}

/// Collocation frequencies: `ω_j x` uniform on `[0.5, DEFAULT_SPAN·(2M+3)]`.
pub fn collocation_frequencies(x: f64, m: usize, freq_count: usize) -> Vec<f64> {
    collocation_frequencies_span(x, m, freq_count, DEFAULT_SPAN)
}

/// Collocation frequencies with `ω_j x` uniform on `[0.5, span·(2M+3)]`.
pub fn collocation_frequencies_span(x: f64, m: usize, freq_count: usize, span: f64) -> Vec<f64> {
    let lo = 0.5;
    let hi = span * (2 * m + 3) as f64;
    let n = freq_count.max(2);
    (0..n)
        .map(|j| (lo + (hi - lo) * j as f64 / (n - 1) as f64) / x)
        .collect()
}

/// Fit `β_0..β_M` at `x` from solution values `ũ(ω_j, x)`.
pub fn fit_beta(l: f64, x: f64, m: usize, omegas: &[f64], u_values: &[f64]) -> Result<BetaTable> {
    if omegas.len() != u_values.len() {
        return Err(Error::InvalidInput("frequency and sample counts differ"));
    }
    if omegas.len() < 2 * (m + 1) {
        return Err(Error::InvalidInput("freq_count must be at least 2(M+1)"));
    }
    let rows = omegas.len();
    let cols = m + 1;
    let mut a = Matrix::zeros(rows, cols);
    let mut r = Vec::with_capacity(rows);
    for (j, (&w, &u)) in omegas.iter().zip(u_values).enumerate() {
        let js = spherical_j_array(2 * m, w * x)?;
        for k in 0..cols {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            a.set(j, k, sign * js[2 * k]);
        }
        r.push(u - unperturbed_term(l, w, x)?);
    }
    let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    if r_norm == 0.0 {
        let mut t = BetaTable::from_coefficients(l, x, alloc::vec![0.0; cols]);
        t.freq_count = rows;
        return Ok(t);
    }
    let fit = least_squares(&a, &r, SINGULAR_CUT)?;
    if fit.rank < cols {
        return Err(Error::IllConditioned {
            rank: fit.rank,
            needed: cols,
        });
    }
    let sum_beta = fit.solution.iter().sum();
    Ok(BetaTable {
        l,
        x,
        beta: fit.solution,
        fit_residual: fit.residual_norm / r_norm,
        sum_beta,
        rank: fit.rank,
        freq_count: rows,
    })
}

/// `β_0(x)..β_M(x)` by collocation against the direct solver.
pub fn compute_beta(setup: &ProblemSetup, x: f64, m: usize, freq_count: usize) -> Result<BetaTable> {
    if !(x > 0.0) || x > setup.b * (1.0 + 1e-12) {
        return Err(Error::Domain {
            what: "x outside (0, b]",
            value: x,
        });
    }
    let omegas = collocation_frequencies(x, m, freq_count);
    if setup.potential.is_zero() {
        // ũ coincides with the unperturbed term; skip the solves.
        let u: Vec<f64> = omegas
            .iter()
            .map(|&w| unperturbed_term(setup.l, w, x))
            .collect::<Result<_>>()?;
        return fit_beta(setup.l, x, m, &omegas, &u);
    }
    let u: Vec<f64> = omegas
        .iter()
        .map(|&w| regular_solution_at(setup, w, x))
        .collect::<Result<_>>()?;
    fit_beta(setup.l, x, m, &omegas, &u)
}

/// `R(x, t) = Σ_k (β_k/x) P_{2k}(t/x)` for `t ∈ [0, x]`.
pub fn eval_r(table: &BetaTable, t: f64) -> Result<f64> {
    let x = table.x;
    if !(t >= -Z_SLACK * x) || t > x * (1.0 + Z_SLACK) {
        return Err(Error::Domain {
            what: "t outside [0, x]",
            value: t,
        });
    }
    let z = (t / x).clamp(-1.0, 1.0);
    let p = legendre_all(2 * table.m(), z)?;
    let mut s = crate::math::CompensatedSum::new();
    for (k, b) in table.beta.iter().enumerate().rev() {
        s.add(b * p[2 * k]);
    }
    Ok(s.value() / x)
}
