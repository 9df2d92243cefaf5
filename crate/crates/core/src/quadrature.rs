//! Gauss–Legendre and Gauss–Jacobi rules plus an adaptive Gauss–Legendre
//! integrator.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::{ln_gamma, FloatExt};

/// Nodes and weights on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// `n`-point Gauss–Legendre rule (Newton iteration on `P_n`).
    pub fn legendre(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = (n + 1) / 2;
        for i in 0..half {
            let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, z);
                for k in 1..n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf + 1.0) * z * p1 - kf * p0) / (kf + 1.0);
                    p0 = p1;
                    p1 = p2;
                }
                let p = if n == 0 { 1.0 } else { p1 };
                let pm1 = if n <= 1 { 1.0 } else { p0 };
                dp = n as f64 * (z * p - pm1) / (z * z - 1.0);
                let dz = p / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    /// `n`-point Gauss–Jacobi rule for the weight `(1-z)^a (1+z)^b`, built by
    /// the Golub–Welsch eigenvalue method.
    pub fn jacobi(n: usize, a: f64, b: f64) -> Result<Self> {
        if !(a > -1.0 && b > -1.0) {
            return Err(Error::Domain {
                what: "Gauss-Jacobi exponents must exceed -1",
                value: a.min(b),
            });
        }
        if n == 0 {
            return Ok(Self {
                nodes: Vec::new(),
                weights: Vec::new(),
            });
        }
        let s = a + b;
        let mut diag = vec![0.0; n];
        let mut off = vec![0.0; n];
        for (i, d) in diag.iter_mut().enumerate() {
            let k = i as f64;
            let c = 2.0 * k + s;
            *d = if i == 0 {
                (b - a) / (s + 2.0)
            } else {
                (b * b - a * a) / (c * (c + 2.0))
            };
        }
        for i in 1..n {
            let k = i as f64;
            let c = 2.0 * k + s;
            let v = if i == 1 {
                4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + s) * (2.0 + s) * (3.0 + s))
            } else {
                4.0 * k * (k + a) * (k + b) * (k + s) / (c * c * (c + 1.0) * (c - 1.0))
            };
            off[i] = v.sqrt();
        }
        let mu0 = ((s + 1.0) * 2f64.ln() + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
            - ln_gamma(s + 2.0))
        .exp();
        let mut first = vec![0.0; n];
        first[0] = 1.0;
        tridiagonal_ql(&mut diag, &mut off, &mut first)?;
        let mut pairs: Vec<(f64, f64)> = diag
            .iter()
            .zip(first.iter())
            .map(|(&x, &v)| (x, mu0 * v * v))
            .collect();
        pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        })
    }

    /// `Σ w_i f(z_i)`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(z))
            .sum()
    }

    /// Map the rule onto `[lo, hi]` and integrate.
    pub fn integrate_on<F: FnMut(f64) -> f64>(&self, lo: f64, hi: f64, mut f: F) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        half * self.integrate(|z| f(mid + half * z))
    }

    /// Composite rule over `panels` equal sub-intervals of `[lo, hi]`.
    pub fn integrate_panels<F: FnMut(f64) -> f64>(
        &self,
        lo: f64,
        hi: f64,
        panels: usize,
        mut f: F,
    ) -> f64 {
        let panels = panels.max(1);
        let width = (hi - lo) / panels as f64;
        (0..panels)
            .map(|p| {
                let a = lo + p as f64 * width;
                self.integrate_on(a, a + width, &mut f)
            })
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Implicit QL on a symmetric tridiagonal matrix (`off[i]` couples `i-1`
/// and `i`). On return `diag` holds eigenvalues and `first` the first
/// components of the matching normalised eigenvectors.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64], first: &mut [f64]) -> Result<()> {
    let n = diag.len();
    for i in 1..n {
        off[i - 1] = off[i];
    }
    if n > 0 {
        off[n - 1] = 0.0;
    }
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::InvalidInput("tridiagonal QL failed to converge"));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                let fz = first[i + 1];
                first[i + 1] = s * first[i] + c * fz;
                first[i] = c * first[i] - s * fz;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

/// Adaptive Gauss–Legendre integration by bisection: a panel is accepted
/// when a 20-point rule and the sum of its two halves agree to `tol`
/// (absolute, scaled by panel share).
pub fn adaptive<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let rule = GaussRule::legendre(20);
    let mut stack: Vec<(f64, f64, f64, u32)> = Vec::new();
    let whole = rule.integrate_on(lo, hi, &mut f);
    stack.push((lo, hi, whole, 0));
    let span = (hi - lo).abs().max(f64::MIN_POSITIVE);
    let mut total = 0.0;
    let mut err_total = 0.0;
    while let Some((a, b, est, depth)) = stack.pop() {
        let mid = 0.5 * (a + b);
        let left = rule.integrate_on(a, mid, &mut f);
        let right = rule.integrate_on(mid, b, &mut f);
        let err = (left + right - est).abs();
        let allowed = tol * ((b - a).abs() / span).max(1e-3);
        if err <= allowed || depth >= 40 {
            if depth >= 40 && err > allowed {
                err_total += err;
            }
            total += left + right;
        } else {
            stack.push((a, mid, left, depth + 1));
            stack.push((mid, b, right, depth + 1));
        }
    }
    if err_total > 10.0 * tol {
        return Err(Error::Quadrature {
            estimate: total,
            error: err_total,
        });
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_rule_is_exact_for_polynomials() {
        let rule = GaussRule::legendre(12);
        for deg in 0..24 {
            let got = rule.integrate(|z| z.powi(deg));
            let expect = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((got - expect).abs() < 1e-14, "deg {deg}");
        }
        assert!((rule.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_rule_integrates_beta_function() {
        // ∫ (1-z)^a (1+z)^b z^2 dz against a direct high-order Legendre sum
        // after removing the endpoint weights by substitution.
        for &(a, b) in &[(0.5, 0.0), (1.5, 2.0), (-0.5, -0.5), (0.0, 0.0), (3.0, 1.0)] {
            let rule = GaussRule::jacobi(30, a, b).unwrap();
            let mass = rule.integrate(|_| 1.0);
            let expect = ((a + b + 1.0) * 2f64.ln() + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
                - ln_gamma(a + b + 2.0))
            .exp();
            assert!((mass - expect).abs() < 1e-13 * expect, "{a} {b}");
            // First moment: ∫ w z = mass (b-a)/(a+b+2).
            let m1 = rule.integrate(|z| z);
            assert!((m1 - expect * (b - a) / (a + b + 2.0)).abs() < 1e-13);
        }
    }

    #[test]
    fn jacobi_zero_zero_matches_legendre() {
        let gj = GaussRule::jacobi(17, 0.0, 0.0).unwrap();
        let gl = GaussRule::legendre(17);
        for i in 0..17 {
            assert!((gj.nodes[i] - gl.nodes[i]).abs() < 1e-14);
            assert!((gj.weights[i] - gl.weights[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn adaptive_handles_kinks_and_oscillation() {
        let v = adaptive(|x| (x - 0.3).abs(), 0.0, 1.0, 1e-13).unwrap();
        assert!((v - (0.045 + 0.245)).abs() < 1e-12);
        let w = 200.0;
        let v = adaptive(|x| (w * x).cos(), 0.0, 3.0, 1e-13).unwrap();
        assert!((v - (w * 3.0).sin() / w).abs() < 1e-12);
    }
}
