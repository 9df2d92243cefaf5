//! Adaptive Gauss–Legendre collocation (implicit Runge–Kutta of order
//! `2s`) for the linear system `u' = v`, `v' = g(x) u`.
//!
//! The stage equations of a linear problem are a single `2s × 2s` linear
//! solve per step. Step size is controlled by step doubling.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::solve_in_place;
use crate::math::FloatExt;
use crate::quadrature::GaussRule;

/// Butcher tableau of the `s`-stage Gauss method.
#[derive(Clone, Debug)]
pub struct GaussCollocation {
    stages: usize,
    c: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl GaussCollocation {
    pub fn new(stages: usize) -> Self {
        let rule = GaussRule::legendre(stages);
        let c: Vec<f64> = rule.nodes.iter().map(|z| 0.5 * (z + 1.0)).collect();
        let b: Vec<f64> = rule.weights.iter().map(|w| 0.5 * w).collect();
        // a_ij = ∫_0^{c_i} ℓ_j(τ) dτ, integrated exactly by the same rule.
        let lagrange = |j: usize, tau: f64| {
            let mut p = 1.0;
            for (k, &ck) in c.iter().enumerate() {
                if k != j {
                    p *= (tau - ck) / (c[j] - ck);
                }
            }
            p
        };
        let mut a = vec![0.0; stages * stages];
        for i in 0..stages {
            for j in 0..stages {
                a[i * stages + j] = rule.integrate_on(0.0, c[i], |tau| lagrange(j, tau));
            }
        }
        Self { stages, c, a, b }
    }

    pub fn order(&self) -> usize {
        2 * self.stages
    }

    /// One step of size `h` from `(x, y)`.
    fn step<G: Fn(f64) -> f64>(&self, g: &G, x: f64, y: [f64; 2], h: f64) -> Result<[f64; 2]> {
        let s = self.stages;
        let n = 2 * s;
        let gs: Vec<f64> = self.c.iter().map(|&ci| g(x + ci * h)).collect();
        // Unknowns: stage slopes K_i = (k_u, k_v); K_i = A_i (y + h Σ_j a_ij K_j)
        // with A_i = [[0, 1], [g_i, 0]].
        let mut mat = vec![0.0; n * n];
        let mut rhs = vec![0.0; n];
        for i in 0..s {
            let (ru, rv) = (2 * i, 2 * i + 1);
            mat[ru * n + ru] = 1.0;
            mat[rv * n + rv] = 1.0;
            for j in 0..s {
                let ha = h * self.a[i * s + j];
                // k_u,i - h a_ij k_v,j = v
                mat[ru * n + 2 * j + 1] -= ha;
                // k_v,i - h a_ij g_i k_u,j = g_i u
                mat[rv * n + 2 * j] -= ha * gs[i];
            }
            rhs[ru] = y[1];
            rhs[rv] = gs[i] * y[0];
        }
        solve_in_place(&mut mat, &mut rhs, n)?;
        let mut out = y;
        for j in 0..s {
            out[0] += h * self.b[j] * rhs[2 * j];
            out[1] += h * self.b[j] * rhs[2 * j + 1];
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub stages: usize,
    pub rtol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            stages: 8,
            rtol: 1e-13,
            initial_step: 0.0,
            max_steps: 2_000_000,
        }
    }
}

/// Integrate `u'' = g(x) u` from `(x0, [u0, u0'])`, reporting `[u, u']` at
/// each point of the ascending slice `x_out` (all `>= x0`).
pub fn integrate_linear<G: Fn(f64) -> f64>(
    g: G,
    x0: f64,
    y0: [f64; 2],
    x_out: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<[f64; 2]>> {
    let scheme = GaussCollocation::new(opts.stages);
    let p = scheme.order() as f64;
    let richardson = 2f64.powf(p) - 1.0;
    let mut out = Vec::with_capacity(x_out.len());
    let mut x = x0;
    let mut y = y0;
    let mut h = if opts.initial_step > 0.0 {
        opts.initial_step
    } else {
        0.05 * x0.abs().max(1e-8)
    };
    let mut steps = 0usize;
    for &target in x_out {
        if target < x {
            return Err(Error::InvalidInput("ODE output points must be ascending"));
        }
        while x < target {
            steps += 1;
            if steps > opts.max_steps {
                return Err(Error::Integration { x });
            }
            let last = x + h >= target;
            let hh = if last { target - x } else { h };
            let full = scheme.step(&g, x, y, hh)?;
            let half = scheme.step(&g, x, y, 0.5 * hh)?;
            let two = scheme.step(&g, x + 0.5 * hh, half, 0.5 * hh)?;
            // Local error scale: u and u'/sqrt(|g|+1) are comparable in size.
            let sigma = 1.0 / (g(x + 0.5 * hh).abs() + 1.0).sqrt();
            let size = two[0].abs().max(two[1].abs() * sigma).max(1e-300);
            let diff = (two[0] - full[0]).abs().max((two[1] - full[1]).abs() * sigma);
            let err = diff / richardson / (opts.rtol * size);
            if err <= 1.0 {
                x = if last { target } else { x + hh };
                y = two;
                let grow = if err > 0.0 {
                    0.9 * err.powf(-1.0 / (p + 1.0))
                } else {
                    4.0
                };
                // Only adapt h from full steps; a clipped last step says little.
                if !last {
                    h = hh * grow.clamp(0.3, 4.0);
                }
            } else {
                let shrink = if err.is_finite() {
                    (0.9 * err.powf(-1.0 / (p + 1.0))).clamp(0.1, 0.9)
                } else {
                    0.1
                };
                h = hh * shrink;
                if h <= f64::EPSILON * x.abs().max(1e-300) {
                    return Err(Error::Integration { x });
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}
