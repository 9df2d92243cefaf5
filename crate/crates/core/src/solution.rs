//! The regular solution through the recurrent integrals
//!
//! ```text
//! I_{k,m}(ω, x) = ∫_0^x t^{k+3/2} J_{k+1/2}(ωt) P_m^{(k+1/2, k+1)}(1 - 2t²/x²) dt,
//! u_N(ω, x) = √(ωx) J_{l+1/2}(ωx) + √ω Σ_{m≤N} c_m I_{l,m}(ω, x),
//! ```
//!
//! with `c_m` the integer-`l` kernel weights. `u_N` carries the
//! normalisation `u ~ (ωx)^{l+1} / (2^{l+1/2} Γ(l+3/2))` as `x → 0`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_2_PI, PI};

use crate::coeffs::BetaTable;
use crate::error::{Error, Result};
use crate::kernel::KernelSeries;
use crate::math::{ln_gamma, DoubleDouble, FloatExt};
use crate::quadrature::GaussRule;
use crate::specialfn::{bessel_j_half, jacobi_all, spherical_j_array, spherical_j_array_dd};

/// Below this `ωx` the triangle is filled by quadrature instead of the
/// recurrence, which divides by `ωx²`.
pub const SMALL_OMEGA_X: f64 = 0.1;

/// Below `ωx = DD_BASE + DD_PER_DEGREE·(l + m_max)` the recurrence runs in
/// double-double arithmetic. There the binomial terms grow like `5^m` and
/// cancel, so ordinary doubles lose up to eight digits by `m = 10`.
const DD_BASE: f64 = 30.0;
const DD_PER_DEGREE: f64 = 3.0;

/// `I_{k,m}(ω, x)` for `k = l..l+m_max`, `m = 0..m_max-(k-l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralTriangle {
    pub l: usize,
    pub m_max: usize,
    pub omega: f64,
    pub x: f64,
    /// `values[k - l][m]`.
    pub values: Vec<Vec<f64>>,
}

impl IntegralTriangle {
    /// `I_{k,m}`; `None` outside the triangle.
    pub fn get(&self, k: usize, m: usize) -> Option<f64> {
        let row = self.values.get(k.checked_sub(self.l)?)?;
        row.get(m).copied()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0))
        .exp()
        .round()
}

/// Fill the triangle of `I_{k,m}(ω, x)`.
pub fn integral_triangle(l: usize, m_max: usize, omega: f64, x: f64) -> Result<IntegralTriangle> {
    if !(omega > 0.0) || !(x > 0.0) || !omega.is_finite() || !x.is_finite() {
        return Err(Error::Domain {
            what: "integral triangle needs omega > 0 and x > 0",
            value: if omega > 0.0 { x } else { omega },
        });
    }
    let z = omega * x;
    let values = if z < SMALL_OMEGA_X {
        triangle_by_quadrature(l, m_max, omega, x)?
    } else if z < DD_BASE + DD_PER_DEGREE * (l + m_max) as f64 {
        triangle_by_recurrence_dd(l, m_max, omega, x)?
    } else {
        triangle_by_recurrence(l, m_max, omega, x)?
    };
    Ok(IntegralTriangle {
        l,
        m_max,
        omega,
        x,
        values,
    })
}

fn triangle_by_recurrence(l: usize, m_max: usize, omega: f64, x: f64) -> Result<Vec<Vec<f64>>> {
    let z = omega * x;
    // J_{k+3/2}(z) = √(2z/π) j_{k+1}(z) for k = l..l+m_max.
    let js = spherical_j_array(l + m_max + 1, z)?;
    let root = (z * FRAC_2_PI).sqrt();
    let mut values: Vec<Vec<f64>> = (0..=m_max)
        .map(|d| {
            let k = l + d;
            let anchor = x.powf(k as f64 + 1.5) * root * js[k + 1] / omega;
            let mut row = vec![0.0; m_max - d + 1];
            row[0] = anchor;
            row
        })
        .collect();
    let scale = 1.0 / (omega * x * x);
    // Row k needs row k+1 at m-1, so fill from the bottom row upwards.
    for d in (0..m_max).rev() {
        let k = l + d;
        let anchor = values[d][0];
        for m in 1..=(m_max - d) {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let first = sign * binomial(k + m + 1, m) * anchor;
            let second = (2 * m + 4 * k + 5) as f64 * scale * values[d + 1][m - 1];
            values[d][m] = first + second;
        }
    }
    Ok(values)
}

/// The recurrence in the scaled form `Ĩ_{k,m} = I_{k,m} ω / (x^{k+3/2} √(2z/π))`,
///
/// ```text
/// Ĩ_{k,0} = j_{k+1}(z),
/// Ĩ_{k,m} = (-1)^m C(k+m+1, m) j_{k+1}(z) + (2m+4k+5)/z · Ĩ_{k+1,m-1},
/// ```
///
/// carried out in double-double.
fn triangle_by_recurrence_dd(l: usize, m_max: usize, omega: f64, x: f64) -> Result<Vec<Vec<f64>>> {
    let z = omega * x;
    let zd = DoubleDouble::from_f64(z);
    let js = spherical_j_array_dd(l + m_max + 1, z)?;
    let mut scaled: Vec<Vec<DoubleDouble>> = (0..=m_max)
        .map(|d| {
            let mut row = vec![DoubleDouble::ZERO; m_max - d + 1];
            row[0] = js[l + d + 1];
            row
        })
        .collect();
    for d in (0..m_max).rev() {
        let k = l + d;
        let anchor = scaled[d][0];
        let mut binom = DoubleDouble::ONE;
        for m in 1..=(m_max - d) {
            // C(k+m+1, m) = C(k+m, m-1) (k+m+1) / m.
            binom = binom.scale((k + m + 1) as f64).div(DoubleDouble::from_f64(m as f64));
            let first = anchor.mul(binom);
            let first = if m % 2 == 0 { first } else { first.neg() };
            let second = scaled[d + 1][m - 1].scale((2 * m + 4 * k + 5) as f64).div(zd);
            scaled[d][m] = first.add(second);
        }
    }
    let root = (z * FRAC_2_PI).sqrt();
    Ok(scaled
        .iter()
        .enumerate()
        .map(|(d, row)| {
            let pre = x.powf((l + d) as f64 + 1.5) * root / omega;
            row.iter().map(|v| pre * v.to_f64()).collect()
        })
        .collect())
}

/// Gauss–Legendre quadrature of the defining integrals; the integrands are
/// smooth and nearly polynomial when `ωx` is small.
fn triangle_by_quadrature(l: usize, m_max: usize, omega: f64, x: f64) -> Result<Vec<Vec<f64>>> {
    let nodes = 2 * (l + m_max) + 24;
    let rule = GaussRule::legendre(nodes);
    let mut values: Vec<Vec<f64>> = (0..=m_max).map(|d| vec![0.0; m_max - d + 1]).collect();
    let root = (2.0 * omega / PI).sqrt();
    for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
        let t = 0.5 * x * (1.0 + u);
        let wt = 0.5 * x * w;
        let js = spherical_j_array(l + m_max, omega * t)?;
        let zeta = (1.0 - 2.0 * (t / x).powi(2)).clamp(-1.0, 1.0);
        for d in 0..=m_max {
            let k = l + d;
            // t^{k+3/2} J_{k+1/2}(ωt) = √(2ω/π) t^{k+2} j_k(ωt).
            let base = root * t.powi(k as i32 + 2) * js[k];
            let p = jacobi_all(m_max - d, k as f64 + 0.5, k as f64 + 1.0, zeta)?;
            for (m, pm) in p.iter().enumerate() {
                values[d][m] += wt * base * pm;
            }
        }
    }
    Ok(values)
}

/// `sup_{z ∈ [0, 1000]} |√z J_{l+1/2}(z)|`: a coarse scan followed by a
/// golden-section refinement around the largest sample.
pub fn c_l_estimate(l: f64) -> Result<f64> {
    let f = |z: f64| -> Result<f64> { Ok((z.sqrt() * bessel_j_half(l, z)?).abs()) };
    let step = 0.05;
    let mut best = (0.0, 0.0);
    let mut z = step;
    while z <= 1000.0 {
        let v = f(z)?;
        if v > best.1 {
            best = (z, v);
        }
        z += step;
    }
    let (mut a, mut b) = ((best.0 - step).max(0.0), (best.0 + step).min(1000.0));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..60 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d)?;
        }
    }
    Ok(best.1.max(fc).max(fd))
}

/// Evaluator of `u_N(ω, x)` at the point `x` of its coefficient table.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionEvaluator {
    pub beta: BetaTable,
    pub n: usize,
    pub l: usize,
    /// Empirical `sup |√z J_{l+1/2}(z)|`.
    pub c_l: f64,
    pub kernel: KernelSeries,
}

impl SolutionEvaluator {
    /// Requires integer `l` and `N + l + 1 ≤ M`.
    pub fn new(beta: BetaTable, n: usize) -> Result<Self> {
        let kernel = KernelSeries::integer(&beta, n)?;
        let l = beta.l as usize;
        let c_l = c_l_estimate(beta.l)?;
        Ok(Self {
            beta,
            n,
            l,
            c_l,
            kernel,
        })
    }

    pub fn x(&self) -> f64 {
        self.beta.x
    }
}

/// `u_N(ω, x)`; `x` must be the evaluator's point. `u_N(0, x) = 0`.
pub fn u_n(evaluator: &SolutionEvaluator, omega: f64, x: f64) -> Result<f64> {
    let x0 = evaluator.x();
    if (x - x0).abs() > 1e-12 * x0 {
        return Err(Error::InvalidInput("x differs from the evaluator's coefficient point"));
    }
    if !(omega >= 0.0) || !omega.is_finite() {
        return Err(Error::Domain {
            what: "omega must be non-negative",
            value: omega,
        });
    }
    if omega == 0.0 {
        return Ok(0.0);
    }
    let l = evaluator.l;
    let x = x0;
    let tri = integral_triangle(l, evaluator.n, omega, x)?;
    let lead = (omega * x).sqrt() * bessel_j_half(l as f64, omega * x)?;
    let mut s = crate::math::CompensatedSum::new();
    for (m, w) in evaluator.kernel.weights.iter().enumerate().rev() {
        s.add(w * tri.values[0][m]);
    }
    Ok(lead + omega.sqrt() * s.value())
}

/// `c_l · ε_N`, the `ω`-independent bound on `|u - u_N|`.
pub fn uniform_error_bound(evaluator: &SolutionEvaluator, x: f64, eps_n: f64) -> Result<f64> {
    if (x - evaluator.x()).abs() > 1e-12 * evaluator.x() {
        return Err(Error::InvalidInput("x differs from the evaluator's coefficient point"));
    }
    Ok(evaluator.c_l * eps_n)
}
