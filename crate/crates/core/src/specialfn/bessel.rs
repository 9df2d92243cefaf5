use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_2_PI;

use crate::error::{Error, Result};
use crate::math::{ln_gamma, DoubleDouble, FloatExt};

const RESCALE_AT: f64 = 1e200;

fn check_z(z: f64) -> Result<()> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(Error::Domain {
            what: "Bessel argument must be non-negative",
            value: z,
        });
    }
    Ok(())
}

/// Start index for Miller's downward recurrence.
fn miller_start(order: f64, z: f64) -> usize {
    let top = order.max(z);
    (top + 30.0 + (40.0 * top).sqrt()).ceil() as usize
}

/// Ascending series of `j_n(z)`; used for small `z`.
fn spherical_j_series(n: usize, z: f64) -> f64 {
    // z^n / (2n+1)!!
    let mut lead = 1.0;
    for k in 1..=n {
        lead *= z / (2 * k + 1) as f64;
    }
    let y = -0.5 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        term *= y / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Spherical Bessel functions `j_0(z), …, j_{n_max}(z)`.
///
/// Forward recurrence when `z >= n_max`, otherwise Miller's normalised
/// backward recurrence from well above `max(n_max, z)`.
pub fn spherical_j_array(n_max: usize, z: f64) -> Result<Vec<f64>> {
    check_z(z)?;
    let mut out = vec![0.0; n_max + 1];
    if z == 0.0 {
        out[0] = 1.0;
        return Ok(out);
    }
    if z < 1e-3 {
        for (n, v) in out.iter_mut().enumerate() {
            *v = spherical_j_series(n, z);
        }
        return Ok(out);
    }
    let (s, c) = (z.sin(), z.cos());
    let j0 = s / z;
    let j1 = if z < 0.5 {
        spherical_j_series(1, z)
    } else {
        s / (z * z) - c / z
    };
    if z >= n_max as f64 {
        out[0] = j0;
        if n_max >= 1 {
            out[1] = j1;
        }
        for n in 1..n_max {
            out[n + 1] = (2 * n + 1) as f64 / z * out[n] - out[n - 1];
        }
        return Ok(out);
    }

    let start = miller_start(n_max as f64, z);
    let mut next = 0.0;
    let mut cur = 1.0;
    for n in (1..=start).rev() {
        if n <= n_max {
            out[n] = cur;
        }
        let prev = (2 * n + 1) as f64 / z * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > RESCALE_AT {
            cur /= RESCALE_AT;
            next /= RESCALE_AT;
            for v in out.iter_mut() {
                *v /= RESCALE_AT;
            }
        }
    }
    out[0] = cur;
    let scale = if j0.abs() >= j1.abs() || n_max == 0 {
        j0 / out[0]
    } else {
        j1 / out[1]
    };
    for v in out.iter_mut() {
        *v *= scale;
    }
    Ok(out)
}

/// `j_0(z), …, j_{n_max}(z)` in double-double arithmetic for `z > 0`, by
/// Miller's backward recurrence normalised against `j_0` or `j_1`.
pub(crate) fn spherical_j_array_dd(n_max: usize, z: f64) -> Result<Vec<DoubleDouble>> {
    check_z(z)?;
    if z == 0.0 {
        return Err(Error::Domain {
            what: "double-double spherical Bessel needs z > 0",
            value: z,
        });
    }
    let zd = DoubleDouble::from_f64(z);
    let start = miller_start(n_max as f64, z) + 40;
    let mut out = vec![DoubleDouble::ZERO; n_max.max(1) + 1];
    let mut next = DoubleDouble::ZERO;
    let mut cur = DoubleDouble::from_f64(1e-200);
    for n in (1..=start).rev() {
        if n < out.len() {
            out[n] = cur;
        }
        let prev = cur.scale((2 * n + 1) as f64).div(zd).sub(next);
        next = cur;
        cur = prev;
        if cur.hi.abs() > RESCALE_AT {
            cur = cur.scale(1.0 / RESCALE_AT);
            next = next.scale(1.0 / RESCALE_AT);
            for v in out.iter_mut() {
                *v = v.scale(1.0 / RESCALE_AT);
            }
        }
    }
    out[0] = cur;
    let (s, c) = DoubleDouble::sin_cos(z);
    let j0 = s.div(zd);
    let j1 = j0.sub(c).div(zd);
    let scale = if j0.hi.abs() >= j1.hi.abs() {
        j0.div(out[0])
    } else {
        j1.div(out[1])
    };
    for v in out.iter_mut() {
        *v = v.mul(scale);
    }
    out.truncate(n_max + 1);
    Ok(out)
}

/// Spherical Bessel function `j_n(z)` for `z >= 0`.
pub fn spherical_j(n: usize, z: f64) -> Result<f64> {
    Ok(spherical_j_array(n, z)?[n])
}

/// `J_ν(z)` by its ascending series.
fn bessel_j_series(nu: f64, z: f64) -> f64 {
    let half = 0.5 * z;
    let lead = (nu * half.ln() - ln_gamma(nu + 1.0)).exp();
    let y = -half * half;
    let mut term = 1.0;
    let mut sum = crate::math::CompensatedSum::new();
    sum.add(1.0);
    for k in 1..200 {
        let kf = k as f64;
        term *= y / (kf * (nu + kf));
        sum.add(term);
        if term.abs() < 1e-17 * sum.value().abs() {
            break;
        }
    }
    lead * sum.value()
}

/// `J_ν(z)` for real `ν >= 0` and `z >= 0`.
///
/// Small arguments use the ascending series. Otherwise Miller's backward
/// recurrence on `J_{μ+k}`, `μ = ν - ⌊ν⌋`, normalised by
/// `(z/2)^μ = Σ_k (μ+2k) Γ(μ+k)/k! · J_{μ+2k}(z)`.
pub fn bessel_j(nu: f64, z: f64) -> Result<f64> {
    check_z(z)?;
    if !(nu >= 0.0) {
        return Err(Error::Domain {
            what: "Bessel order must be non-negative",
            value: nu,
        });
    }
    if z == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    if z <= 4.0 {
        return Ok(bessel_j_series(nu, z));
    }
    let whole = nu.floor();
    let mu = nu - whole;
    let target = whole as usize;
    let start = miller_start(nu, z);

    // Normalisation weights c_k for the even-index terms, built upward.
    let n_even = start / 2 + 1;
    let mut weights = Vec::with_capacity(n_even);
    weights.push(libm::tgamma(mu + 1.0));
    let mut g = libm::tgamma(mu + 1.0);
    for k in 1..n_even {
        if k > 1 {
            g *= (mu + k as f64 - 1.0) / k as f64;
        }
        weights.push((mu + 2.0 * k as f64) * g);
    }

    let mut upper = 0.0;
    let mut cur = 1.0;
    let mut norm = 0.0;
    let mut picked = 0.0;
    // Walk k = start, start-1, …, 0 where cur = f_{μ+k}.
    let mut k = start;
    loop {
        if k == target {
            picked = cur;
        }
        if k % 2 == 0 {
            norm += weights[k / 2] * cur;
        }
        if k == 0 {
            break;
        }
        let order = mu + k as f64;
        let lower = 2.0 * order / z * cur - upper;
        upper = cur;
        cur = lower;
        k -= 1;
        if cur.abs() > RESCALE_AT {
            cur /= RESCALE_AT;
            upper /= RESCALE_AT;
            norm /= RESCALE_AT;
            picked /= RESCALE_AT;
        }
    }
    Ok(picked * (mu * (0.5 * z).ln()).exp() / norm)
}

/// `J_{l+1/2}(z)`, the Bessel function entering the regular solution of the
/// unperturbed equation. Integer `l` goes through `j_l`.
pub fn bessel_j_half(l: f64, z: f64) -> Result<f64> {
    check_z(z)?;
    if !(l >= -0.5) {
        return Err(Error::Domain {
            what: "l must be at least -1/2",
            value: l,
        });
    }
    if l >= 0.0 && l == l.floor() {
        if z == 0.0 {
            return Ok(0.0);
        }
        let j = spherical_j(l as usize, z)?;
        return Ok((z * FRAC_2_PI).sqrt() * j);
    }
    bessel_j(l + 0.5, z)
}
