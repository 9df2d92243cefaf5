//! Bracketed root refinement and sign-change scanning.

use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Brent's method (bisection / secant / inverse quadratic) on `[lo, hi]`
/// with `f(lo)`, `f(hi)` of opposite sign. Stops when the bracket is
/// narrower than `xtol`.
pub fn brent<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
    xtol: f64,
) -> Result<f64> {
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    let (mut a, mut b, mut fa, mut fb) = (lo, hi, f_lo, f_hi);
    let (mut c, mut fc) = (a, fa);
    let (mut d, mut e) = (b - a, b - a);
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = m;
            }
        } else {
            d = m;
            e = m;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b)?;
    }
    Ok(b)
}

/// A sign change of a sampled function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

/// Sign changes of consecutive samples `(x_i, f_i)`, in order.
pub fn sign_changes(xs: &[f64], fs: &[f64]) -> Vec<Bracket> {
    let mut out = Vec::new();
    let mut prev: Option<usize> = None;
    for i in 0..xs.len() {
        if fs[i] == 0.0 {
            // Exact zero: bracket it tightly with its neighbours.
            continue;
        }
        if let Some(p) = prev {
            if fs[p].signum() != fs[i].signum() {
                out.push(Bracket {
                    lo: xs[p],
                    hi: xs[i],
                    f_lo: fs[p],
                    f_hi: fs[i],
                });
            }
        }
        prev = Some(i);
    }
    out
}
