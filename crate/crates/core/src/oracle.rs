//! Direct numerical integration of the perturbed Bessel equation from the
//! singular endpoint. This is the independent reference every other module
//! is checked against.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{ln_gamma, CompensatedSum, FloatExt};
use crate::ode::{integrate_linear, OdeOptions};
use crate::potential::{Potential, Smoothness};
use crate::roots::{brent, sign_changes};
use crate::specialfn::bessel_j_half;

/// The equation data `(l, b, q)`.
#[derive(Clone, Debug)]
pub struct ProblemSetup {
    pub l: f64,
    pub b: f64,
    pub potential: Potential,
    pub smoothness: Smoothness,
}

impl ProblemSetup {
    pub fn new(l: f64, b: f64, potential: Potential) -> Result<Self> {
        if !(l >= -0.5) {
            return Err(Error::Domain {
                what: "l must be at least -1/2",
                value: l,
            });
        }
        if !(b > 0.0) || !b.is_finite() {
            return Err(Error::Domain {
                what: "interval length b must be positive",
                value: b,
            });
        }
        let smoothness = potential.default_smoothness();
        Ok(Self {
            l,
            b,
            potential,
            smoothness,
        })
    }

    pub fn with_smoothness(mut self, smoothness: Smoothness) -> Self {
        self.smoothness = smoothness;
        self
    }

    /// `Some(l)` when `l` is a non-negative integer.
    pub fn integer_l(&self) -> Option<usize> {
        (self.l >= 0.0 && self.l == self.l.floor()).then_some(self.l as usize)
    }

    /// `½ ∫_0^x q`, the diagonal value of the transmutation kernel.
    pub fn goursat_value(&self, x: f64) -> f64 {
        0.5 * self.potential.integral(x)
    }
}

/// Samples of the regular solution `ũ(ω, x) ~ x^{l+1}` and its derivative.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionSample {
    pub omega: f64,
    pub x_values: Vec<f64>,
    pub u_values: Vec<f64>,
    pub u_prime_values: Vec<f64>,
}

/// Relative start offset for the Frobenius initial data.
const START_FRACTION: f64 = 1e-6;

/// Integrate the regular solution normalised by `ũ ~ x^{l+1}` and report it
/// at the ascending points `x_eval ⊂ (0, b]`.
pub fn regular_solution_ode(setup: &ProblemSetup, omega: f64, x_eval: &[f64]) -> Result<SolutionSample> {
    regular_solution_ode_with(setup, omega, x_eval, &OdeOptions::default())
}

pub fn regular_solution_ode_with(
    setup: &ProblemSetup,
    omega: f64,
    x_eval: &[f64],
    opts: &OdeOptions,
) -> Result<SolutionSample> {
    if x_eval.is_empty() {
        return Err(Error::InvalidInput("no evaluation points"));
    }
    for w in x_eval.windows(2) {
        if w[1] < w[0] {
            return Err(Error::InvalidInput("evaluation points must be ascending"));
        }
    }
    if !(x_eval[0] > 0.0) || x_eval[x_eval.len() - 1] > setup.b * (1.0 + 1e-12) {
        return Err(Error::Domain {
            what: "evaluation point outside (0, b]",
            value: if x_eval[0] > 0.0 { x_eval[x_eval.len() - 1] } else { x_eval[0] },
        });
    }
    let l = setup.l;
    let x0 = (START_FRACTION * setup.b).min(0.5 * x_eval[0]).max(1e-290f64.powf(1.0 / (l + 1.0)));
    let c1 = (setup.potential.eval(0.0) - omega * omega) / (4.0 * l + 6.0);
    let u0 = x0.powf(l + 1.0) * (1.0 + c1 * x0 * x0);
    let du0 = (l + 1.0) * x0.powf(l) + c1 * (l + 3.0) * x0.powf(l + 2.0);
    let ll = l * (l + 1.0);
    let w2 = omega * omega;
    let q = &setup.potential;
    let g = |x: f64| ll / (x * x) + q.eval(x) - w2;
    let step = if opts.initial_step > 0.0 {
        opts.initial_step
    } else {
        0.02 * x0
    };
    let ys = integrate_linear(g, x0, [u0, du0], x_eval, &OdeOptions {
        initial_step: step,
        ..*opts
    })?;
    Ok(SolutionSample {
        omega,
        x_values: x_eval.to_vec(),
        u_values: ys.iter().map(|y| y[0]).collect(),
        u_prime_values: ys.iter().map(|y| y[1]).collect(),
    })
}

/// `ũ(ω, x)` at a single point.
pub fn regular_solution_at(setup: &ProblemSetup, omega: f64, x: f64) -> Result<f64> {
    Ok(regular_solution_ode(setup, omega, &[x])?.u_values[0])
}

/// `ω^{l+1} / (2^{l+1/2} Γ(l+3/2))`: converts `ũ ~ x^{l+1}` into the
/// normalisation `u ~ (ωx)^{l+1} / (2^{l+1/2} Γ(l+3/2))`.
pub fn tilde_to_unit_factor(l: f64, omega: f64) -> f64 {
    ((l + 1.0) * omega.ln() - (l + 0.5) * 2f64.ln() - ln_gamma(l + 1.5)).exp()
}

/// Closed-form regular solution for `q(x) = x²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HarmonicValue {
    pub value: f64,
    /// Estimated relative error from cancellation in the ₁F₁ series.
    pub cancellation: f64,
    /// `cancellation > 1e-8`.
    pub inaccurate: bool,
}

/// `Σ (a)_k/(b)_k z^k/k!` together with `Σ |terms|`.
fn hyp1f1(a: f64, b: f64, z: f64) -> (f64, f64) {
    let mut term = 1.0;
    let mut sum = CompensatedSum::new();
    sum.add(1.0);
    let mut abs_sum = 1.0;
    let mut k = 0.0;
    loop {
        term *= (a + k) / (b + k) * z / (k + 1.0);
        sum.add(term);
        abs_sum += term.abs();
        k += 1.0;
        if (k > a.abs() + z.abs() && term.abs() < 1e-18 * abs_sum) || k > 5000.0 {
            break;
        }
    }
    (sum.value(), abs_sum)
}

/// `u(ω, x) = x^{l+1} e^{x²/2} ₁F₁((ω²+2l+3)/4; l+3/2; -x²)`, the regular
/// solution of `-u'' + (l(l+1)/x² + x²) u = ω² u` with `u ~ x^{l+1}`.
///
/// Evaluates both the direct and the Kummer-transformed series and keeps the
/// one with less cancellation.
pub fn exact_solution_harmonic(l: f64, omega: f64, x: f64) -> HarmonicValue {
    let a = (omega * omega + 2.0 * l + 3.0) / 4.0;
    let b = l + 1.5;
    let z = x * x;
    let (direct, direct_abs) = hyp1f1(a, b, -z);
    let (kummer, kummer_abs) = hyp1f1(b - a, b, z);
    let eps = f64::EPSILON;
    let c_direct = eps * direct_abs / direct.abs().max(f64::MIN_POSITIVE);
    let c_kummer = eps * kummer_abs / kummer.abs().max(f64::MIN_POSITIVE);
    let lead = x.powf(l + 1.0);
    let (value, cancellation) = if c_kummer <= c_direct {
        (lead * (-0.5 * z).exp() * kummer, c_kummer)
    } else {
        (lead * (0.5 * z).exp() * direct, c_direct)
    };
    HarmonicValue {
        value,
        cancellation,
        inaccurate: cancellation > 1e-8,
    }
}

/// The unperturbed regular solution `Γ(l+3/2) 2^{l+1/2} ω^{-l-1/2} √x J_{l+1/2}(ωx)`.
pub fn unperturbed_tilde(l: f64, omega: f64, x: f64) -> Result<f64> {
    if omega == 0.0 {
        return Ok(x.powf(l + 1.0));
    }
    let w = omega.abs();
    let pre = (ln_gamma(l + 1.5) + (l + 0.5) * 2f64.ln() - (l + 0.5) * w.ln()).exp();
    Ok(pre * x.sqrt() * bessel_j_half(l, w * x)?)
}

/// First `count` Dirichlet eigenvalues `ũ(ω, b) = 0` by shooting with the ODE
/// integrator: scan `ω` with step `π/(4b)`, refine each bracket with Brent.
pub fn dirichlet_eigenvalues_ode(setup: &ProblemSetup, count: usize, xtol: f64) -> Result<Vec<f64>> {
    let b = setup.b;
    let step = core::f64::consts::PI / (4.0 * b);
    let f = |w: f64| regular_solution_at(setup, w, b);
    let mut roots = Vec::with_capacity(count);
    let mut lo = 1e-3 * step;
    let mut f_lo = f(lo)?;
    while roots.len() < count {
        let hi = lo + step;
        let f_hi = f(hi)?;
        if !sign_changes(&[lo, hi], &[f_lo, f_hi]).is_empty() {
            roots.push(brent(f, lo, hi, f_lo, f_hi, xtol)?);
        }
        lo = hi;
        f_lo = f_hi;
    }
    Ok(roots)
}
