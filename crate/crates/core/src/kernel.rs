//! The transmutation kernel `K(x, t)` as a truncated Fourier–Jacobi series.
//!
//! Integer `l`:
//! ```text
//! K_N(x, t) = t^{l+1} Σ_{m≤N} c_m P_m^{(l+1/2, l+1)}(1 - 2t²/x²),
//! c_m = √π / (x^{2l+3} Γ(l+3/2)) (-1)^{m+l+1} Γ(m+2l+5/2)/Γ(m+l+3/2) β_{m+l+1}(x).
//! ```
//! Real `l`:
//! ```text
//! K_N(x, t) = t^{l+1} / (x²-t²)^{l+1} Σ_{k≤N} c_k P_k^{(l+1/2, -l-1)}(1 - 2t²/x²),
//! c_k = √π / (Γ(l+3/2) x) (-1)^k k!/Γ(k-l) β_k(x).
//! ```

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::coeffs::BetaTable;
use crate::error::{Error, Result};
use crate::math::{ln_gamma, ln_gamma_signed, CompensatedSum, FloatExt};
use crate::quadrature::{adaptive, GaussRule};
use crate::specialfn::{gamma_ratio, hyp3f2_terminating, jacobi_all, Z_SLACK};

/// Default cutoff `t ≤ fraction · x` for the real-`l` series.
pub const DEFAULT_T_MAX_FRACTION: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KernelMode {
    IntegerL,
    RealL,
}

/// Truncated kernel `K_N(x, ·)` with precombined weights.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelSeries {
    pub x: f64,
    pub l: f64,
    pub mode: KernelMode,
    pub n: usize,
    /// `c_0..c_N`.
    pub weights: Vec<f64>,
    /// Real-`l` evaluation cutoff as a fraction of `x`.
    pub t_max_fraction: f64,
    /// Known diagonal value `K(x, x) = ½∫_0^x q`, used by the near-diagonal
    /// tail estimate in real-`l` mode.
    pub diagonal: Option<f64>,
}

fn is_nonneg_integer(l: f64) -> bool {
    l >= 0.0 && l == l.floor()
}

impl KernelSeries {
    /// Integer-`l` series using `β_{l+1}..β_{N+l+1}`.
    pub fn integer(table: &BetaTable, n: usize) -> Result<Self> {
        let l = table.l;
        if !is_nonneg_integer(l) {
            return Err(Error::Domain {
                what: "integer-l kernel needs a non-negative integer l",
                value: l,
            });
        }
        let li = l as usize;
        if n + li + 1 > table.m() {
            return Err(Error::InvalidInput("N + l + 1 exceeds the beta truncation M"));
        }
        let x = table.x;
        let base = 0.5 * PI.ln() - (2.0 * l + 3.0) * x.ln() - ln_gamma(l + 1.5);
        let weights = (0..=n)
            .map(|m| {
                let b = table.beta[m + li + 1];
                if b == 0.0 {
                    return 0.0;
                }
                let sign = if (m + li + 1) % 2 == 0 { 1.0 } else { -1.0 };
                sign * b.signum() * (base + gamma_ratio(m, l).value_log + b.abs().ln()).exp()
            })
            .collect();
        Ok(Self {
            x,
            l,
            mode: KernelMode::IntegerL,
            n,
            weights,
            t_max_fraction: 1.0,
            diagonal: None,
        })
    }

    /// Real-`l` series using `β_0..β_N`.
    pub fn real(table: &BetaTable, n: usize) -> Result<Self> {
        let l = table.l;
        if !(l >= -0.5) {
            return Err(Error::Domain {
                what: "l must be at least -1/2",
                value: l,
            });
        }
        if n > table.m() {
            return Err(Error::InvalidInput("N exceeds the beta truncation M"));
        }
        let x = table.x;
        let base = 0.5 * PI.ln() - ln_gamma(l + 1.5) - x.ln();
        let weights = (0..=n)
            .map(|k| {
                let b = table.beta[k];
                let (lg, sg) = ln_gamma_signed(k as f64 - l);
                if b == 0.0 || crate::math::is_gamma_pole(k as f64 - l) {
                    return 0.0;
                }
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 } * sg * b.signum();
                sign * (base + ln_gamma(k as f64 + 1.0) - lg + b.abs().ln()).exp()
            })
            .collect();
        Ok(Self {
            x,
            l,
            mode: KernelMode::RealL,
            n,
            weights,
            t_max_fraction: DEFAULT_T_MAX_FRACTION,
            diagonal: None,
        })
    }

    pub fn with_t_max_fraction(mut self, fraction: f64) -> Result<Self> {
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(Error::Domain {
                what: "t_max_fraction must lie in (0, 1]",
                value: fraction,
            });
        }
        self.t_max_fraction = fraction;
        Ok(self)
    }

    pub fn with_diagonal(mut self, value: f64) -> Self {
        self.diagonal = Some(value);
        self
    }

    /// Jacobi parameters of the series.
    fn jacobi_params(&self) -> (f64, f64) {
        match self.mode {
            KernelMode::IntegerL => (self.l + 0.5, self.l + 1.0),
            KernelMode::RealL => (self.l + 0.5, -self.l - 1.0),
        }
    }

    /// `Σ w_m P_m(z)` summed from the top degree down.
    fn series_sum(&self, weights: &[f64], t: f64) -> Result<f64> {
        let z = (1.0 - 2.0 * (t / self.x).powi(2)).clamp(-1.0, 1.0);
        let (a, b) = self.jacobi_params();
        let p = jacobi_all(weights.len().saturating_sub(1), a, b, z)?;
        let mut s = CompensatedSum::new();
        for (w, pm) in weights.iter().zip(&p).rev() {
            s.add(w * pm);
        }
        Ok(s.value())
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if !(t >= -Z_SLACK * self.x) || t > self.x * (1.0 + Z_SLACK) {
            return Err(Error::Domain {
                what: "t outside [0, x]",
                value: t,
            });
        }
        Ok(())
    }

    /// `K_N(x, t)` in either mode (real mode beyond the cutoff is an error).
    pub fn eval(&self, t: f64) -> Result<f64> {
        match self.mode {
            KernelMode::IntegerL => kernel_k_integer(self, t),
            KernelMode::RealL => kernel_k_real(self, t),
        }
    }

    /// Kernel built from weights `w` (same mode/x/l) at `t`.
    fn eval_weights(&self, w: &[f64], t: f64) -> Result<f64> {
        let t = t.clamp(0.0, self.x);
        let sum = self.series_sum(w, t)?;
        let l = self.l;
        Ok(match self.mode {
            KernelMode::IntegerL => t.powf(l + 1.0) * sum,
            KernelMode::RealL => {
                let x = self.x;
                t.powf(l + 1.0) / (x * x - t * t).powf(l + 1.0) * sum
            }
        })
    }
}

/// `K_N(x, t)` for integer `l`, `t ∈ [0, x]`.
pub fn kernel_k_integer(series: &KernelSeries, t: f64) -> Result<f64> {
    if series.mode != KernelMode::IntegerL {
        return Err(Error::InvalidInput("series is not in integer-l mode"));
    }
    series.check_t(t)?;
    series.eval_weights(&series.weights, t)
}

/// `K_N(x, t)` for real `l`, `0 ≤ t ≤ x · t_max_fraction`.
pub fn kernel_k_real(series: &KernelSeries, t: f64) -> Result<f64> {
    if series.mode != KernelMode::RealL {
        return Err(Error::InvalidInput("series is not in real-l mode"));
    }
    series.check_t(t)?;
    let limit = series.x * series.t_max_fraction;
    if t > limit * (1.0 + Z_SLACK) {
        return Err(Error::NearDiagonal { t, limit });
    }
    series.eval_weights(&series.weights, t)
}

/// `K_N(x, x)` through the endpoint values `P_m(-1) = (-1)^m C(m+l+1, m)`;
/// approaches `½∫_0^x q`.
pub fn goursat_series(series: &KernelSeries) -> Result<f64> {
    if series.mode != KernelMode::IntegerL {
        return Err(Error::InvalidInput("Goursat series needs integer-l mode"));
    }
    let l = series.l;
    let mut s = CompensatedSum::new();
    for (m, w) in series.weights.iter().enumerate().rev() {
        let mf = m as f64;
        let binom = (ln_gamma(mf + l + 2.0) - ln_gamma(mf + 1.0) - ln_gamma(l + 2.0)).exp();
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        s.add(w * sign * binom);
    }
    Ok(series.x.powf(l + 1.0) * s.value())
}

/// `∫_0^x t^α K_N(x, t) dt` in closed form via terminating ₃F₂ sums.
pub fn kernel_moment(series: &KernelSeries, alpha: f64) -> Result<f64> {
    if series.mode != KernelMode::IntegerL {
        return Err(Error::InvalidInput("moment formula needs integer-l mode"));
    }
    let l = series.l;
    if !(alpha > -l - 2.0) {
        return Err(Error::Domain {
            what: "moment exponent must exceed -l-2",
            value: alpha,
        });
    }
    let rho = 0.5 * (alpha + l);
    let mut s = CompensatedSum::new();
    for (m, w) in series.weights.iter().enumerate().rev() {
        if *w == 0.0 {
            continue;
        }
        let mf = m as f64;
        // Γ(m+l+3/2)/(m! Γ(l+3/2)) = P_m(1).
        let p_at_one = (ln_gamma(mf + l + 1.5) - ln_gamma(mf + 1.0) - ln_gamma(l + 1.5)).exp();
        s.add(w * p_at_one * hyp3f2_terminating(m, l, alpha));
    }
    Ok(series.x.powf(alpha + l + 2.0) / (2.0 * (rho + 1.0)) * s.value())
}

/// `ε_N(x) ≈ ∫ |K_ref(x,t) - K_N(x,t)| dt` over `[0, x]` (real mode: up to
/// the cutoff), with `series_ref` standing in for the exact kernel.
pub fn epsilon_n(series_n: &KernelSeries, series_ref: &KernelSeries) -> Result<f64> {
    if series_n.mode != series_ref.mode
        || (series_n.x - series_ref.x).abs() > Z_SLACK * series_n.x
        || series_n.l != series_ref.l
    {
        return Err(Error::InvalidInput("epsilon_N needs series with the same x, l and mode"));
    }
    let len = series_n.weights.len().max(series_ref.weights.len());
    let diff: Vec<f64> = (0..len)
        .map(|m| {
            series_ref.weights.get(m).copied().unwrap_or(0.0)
                - series_n.weights.get(m).copied().unwrap_or(0.0)
        })
        .collect();
    if diff.iter().all(|d| *d == 0.0) {
        return Ok(0.0);
    }
    let hi = match series_n.mode {
        KernelMode::IntegerL => series_n.x,
        KernelMode::RealL => series_n.x * series_n.t_max_fraction.min(series_ref.t_max_fraction),
    };
    let f = |t: f64| series_n.eval_weights(&diff, t).map(f64::abs).unwrap_or(f64::NAN);
    let rough = GaussRule::legendre(20).integrate_panels(0.0, hi, 32, f);
    if !rough.is_finite() {
        return Err(Error::Quadrature {
            estimate: rough,
            error: f64::INFINITY,
        });
    }
    if rough == 0.0 {
        return Ok(0.0);
    }
    adaptive(f, 0.0, hi, 1e-8 * rough)
}

/// `x^{-l} / (2^{l+1/2} Γ(l+3/2)) ∫_0^x (x²-s²)^l f(s) ds` by Gauss–Jacobi
/// rules of doubling size until two successive estimates agree.
pub fn poisson_transform<F: FnMut(f64) -> f64>(mut f: F, l: f64, x: f64) -> Result<f64> {
    if !(l > -1.0) || !(x > 0.0) {
        return Err(Error::Domain {
            what: "Poisson transform needs l > -1 and x > 0",
            value: if x > 0.0 { l } else { x },
        });
    }
    // s = x(1+u)/2: (x²-s²)^l ds = (x/2)^{l+1} (1-u)^l (x+s)^l du.
    let pref = (-l * x.ln() - (l + 0.5) * 2f64.ln() - ln_gamma(l + 1.5)
        + (l + 1.0) * (0.5 * x).ln())
    .exp();
    let mut integrate = |n: usize| -> Result<(f64, f64)> {
        let rule = GaussRule::jacobi(n, l, 0.0)?;
        let mut s = CompensatedSum::new();
        let mut mag = 0.0;
        for (&u, &w) in rule.nodes.iter().zip(&rule.weights) {
            let sv = 0.5 * x * (1.0 + u);
            let v = w * (x + sv).powf(l) * f(sv);
            s.add(v);
            mag += v.abs();
        }
        Ok((s.value(), mag))
    };
    let mut n = 32;
    let (mut prev, _) = integrate(n)?;
    while n < 4096 {
        n *= 2;
        let (cur, mag) = integrate(n)?;
        let err = (cur - prev).abs();
        if err <= 1e-14 * mag.max(f64::MIN_POSITIVE) {
            return Ok(pref * cur);
        }
        prev = cur;
        if n >= 4096 {
            return Err(Error::Quadrature {
                estimate: pref * cur,
                error: pref * err,
            });
        }
    }
    Ok(pref * prev)
}

/// Near-diagonal stand-in for the real-`l` kernel on `[t_c, x]`.
///
/// The polynomial interpolating the series at Chebyshev–Lobatto points of
/// `[t_c - w, t_c]`, `w = 4(x - t_c)`, together with the diagonal value
/// `K(x, x)` when it is known (otherwise pure extrapolation).
#[derive(Clone, Debug, PartialEq)]
pub struct TailModel {
    nodes: Vec<f64>,
    values: Vec<f64>,
    bary: Vec<f64>,
}

/// Interpolation points taken from the series window.
const TAIL_SAMPLES: usize = 7;

impl TailModel {
    pub fn new(series: &KernelSeries, t_c: f64) -> Result<Self> {
        let x = series.x;
        let width = (4.0 * (x - t_c)).min(t_c);
        let mut nodes = Vec::with_capacity(TAIL_SAMPLES + 1);
        let mut values = Vec::with_capacity(TAIL_SAMPLES + 1);
        for i in 0..TAIL_SAMPLES {
            let c = (PI * i as f64 / (TAIL_SAMPLES - 1) as f64).cos();
            let t = t_c - 0.5 * width * (1.0 - c);
            nodes.push(t);
            values.push(series.eval_weights(&series.weights, t)?);
        }
        if let Some(d) = series.diagonal {
            nodes.push(x);
            values.push(d);
        }
        let bary = (0..nodes.len())
            .map(|i| {
                1.0 / (0..nodes.len())
                    .filter(|&j| j != i)
                    .map(|j| nodes[i] - nodes[j])
                    .product::<f64>()
            })
            .collect();
        Ok(Self { nodes, values, bary })
    }

    /// Barycentric evaluation.
    pub fn eval(&self, t: f64) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for ((&n, &v), &w) in self.nodes.iter().zip(&self.values).zip(&self.bary) {
            if t == n {
                return v;
            }
            let c = w / (t - n);
            num += c * v;
            den += c;
        }
        num / den
    }
}

/// Quadrature settings for [`apply_transmutation_with`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransmutationOptions {
    /// Gauss–Legendre nodes on `[0, x]` (single panel).
    pub nodes: usize,
    /// Oscillation frequency of `y`; when `ωx > 50` the integral is split
    /// into panels of length at most `π/ω`.
    pub frequency: f64,
}

impl Default for TransmutationOptions {
    fn default() -> Self {
        Self {
            nodes: 200,
            frequency: 0.0,
        }
    }
}

/// Outcome of applying the operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transmuted {
    pub value: f64,
    /// Contribution of the near-diagonal tail estimate (real-`l` mode only).
    pub tail: f64,
}

/// `y(x) + ∫_0^x K_N(x, t) y(t) dt`.
pub fn apply_transmutation<F: FnMut(f64) -> f64>(series: &KernelSeries, y: F, x: f64) -> Result<f64> {
    Ok(apply_transmutation_with(series, y, x, &TransmutationOptions::default())?.value)
}

/// [`apply_transmutation`] with explicit quadrature options.
///
/// In real-`l` mode the series is integrated up to `t_c = x · t_max_fraction`;
/// on `[t_c, x]` the kernel is replaced by a [`TailModel`].
pub fn apply_transmutation_with<F: FnMut(f64) -> f64>(
    series: &KernelSeries,
    mut y: F,
    x: f64,
    opts: &TransmutationOptions,
) -> Result<Transmuted> {
    if (x - series.x).abs() > Z_SLACK * series.x {
        return Err(Error::InvalidInput("x differs from the kernel's x"));
    }
    let x = series.x;
    let hi = match series.mode {
        KernelMode::IntegerL => x,
        KernelMode::RealL => x * series.t_max_fraction,
    };
    let wx = opts.frequency.abs() * x;
    let (rule, panels) = if wx > 50.0 {
        let panels = (opts.frequency.abs() * hi / PI).ceil().max(1.0) as usize;
        (GaussRule::legendre(24), panels)
    } else {
        (GaussRule::legendre(opts.nodes.max(2)), 1)
    };
    let mut err = None;
    let body = rule.integrate_panels(0.0, hi, panels, |t| match series.eval_weights(&series.weights, t) {
        Ok(k) => k * y(t),
        Err(e) => {
            err = Some(e);
            0.0
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let mut tail = 0.0;
    if hi < x {
        let model = TailModel::new(series, hi)?;
        let d = x - hi;
        let tail_panels = if wx > 50.0 {
            (opts.frequency.abs() * d / PI).ceil().max(1.0) as usize
        } else {
            1
        };
        tail = GaussRule::legendre(24).integrate_panels(hi, x, tail_panels, |t| model.eval(t) * y(t));
    }
    let value = y(x) + body + tail;
    if !value.is_finite() {
        return Err(Error::Quadrature {
            estimate: value,
            error: f64::INFINITY,
        });
    }
    Ok(Transmuted { value, tail })
}
