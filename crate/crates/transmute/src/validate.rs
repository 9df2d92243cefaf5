//! The invariant suite behind `transmute validate`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use transmute_core::coeffs::BetaTable;
use transmute_core::error::Result as CoreResult;
use transmute_core::kernel::{
    apply_transmutation_with, goursat_series, kernel_k_integer, kernel_k_real, kernel_moment, KernelSeries,
    TransmutationOptions,
};
use transmute_core::oracle::{regular_solution_ode, tilde_to_unit_factor, ProblemSetup};
use transmute_core::quadrature::GaussRule;
use transmute_core::solution::integral_triangle;
use transmute_core::specialfn::{bessel_j_half, jacobi, PolynomialParams};
use transmute_core::spectral::{choose_n, Truncation};

/// Tolerances of the suite.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tolerances {
    pub sum_beta: f64,
    pub goursat: f64,
    pub transmutation_integer_l: f64,
    pub transmutation_real_l: f64,
    pub recurrence: f64,
    pub reduction: f64,
    pub moment: f64,
    pub moment_beta0: f64,
}

pub const TOLERANCES: Tolerances = Tolerances {
    sum_beta: 1e-7,
    goursat: 1e-3,
    transmutation_integer_l: 1e-6,
    transmutation_real_l: 1e-4,
    recurrence: 1e-9,
    reduction: 1e-8,
    moment: 1e-9,
    moment_beta0: 1e-8,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub status: Status,
    /// Measured error in the units of `tolerance`.
    pub value: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    fn measured(name: &'static str, value: f64, tolerance: f64, detail: String) -> Self {
        let status = if value <= tolerance { Status::Pass } else { Status::Fail };
        Self {
            name,
            status,
            value,
            tolerance,
            detail,
        }
    }

    fn skipped(name: &'static str, why: &str) -> Self {
        Self {
            name,
            status: Status::Skipped,
            value: 0.0,
            tolerance: 0.0,
            detail: why.into(),
        }
    }

    fn errored(name: &'static str, tolerance: f64, e: impl std::fmt::Display) -> Self {
        Self {
            name,
            status: Status::Fail,
            value: f64::INFINITY,
            tolerance,
            detail: e.to_string(),
        }
    }
}

pub struct SuiteInput<'a> {
    pub setup: &'a ProblemSetup,
    pub table: &'a BetaTable,
    pub truncation: Truncation,
    pub omegas: &'a [f64],
    pub recurrence_samples: usize,
    pub seed: u64,
}

/// Add `delta·max(1, max|β|)` to `β_{⌊l⌋+1}`.
pub fn perturb(table: &mut BetaTable, delta: f64) {
    if delta == 0.0 {
        return;
    }
    let idx = (table.l.max(0.0) as usize + 1).min(table.m());
    let scale = table.max_abs().max(1.0);
    table.beta[idx] += delta * scale;
    table.sum_beta = table.beta.iter().sum();
}

/// Run every applicable check at `x = table.x`.
pub fn run_suite(input: &SuiteInput) -> Vec<Check> {
    let integer = input.setup.integer_l().is_some();
    let series = build_series(input);
    let mut out = vec![check_sum_beta(input.table)];
    match &series {
        Ok(s) => {
            out.push(if integer {
                check_goursat(input.setup, s)
            } else {
                Check::skipped("goursat", "kernel diagonal is not evaluated for non-integer l")
            });
            out.push(check_transmutation(input, s));
            if integer {
                out.push(check_reduction(input.table, s));
                out.push(check_moments(input.table, s));
            } else {
                out.push(Check::skipped("reduction", "integer l only"));
                out.push(Check::skipped("moments", "integer l only"));
            }
        }
        Err(e) => {
            for name in ["goursat", "transmutation", "reduction", "moments"] {
                out.push(Check::errored(name, 0.0, e));
            }
        }
    }
    out.push(check_recurrence(input));
    out
}

/// The kernel series the checks run on: integer mode with the chosen `N`,
/// or real mode over all fitted coefficients with the known diagonal.
pub fn build_series(input: &SuiteInput) -> CoreResult<KernelSeries> {
    let t = input.table;
    if input.setup.integer_l().is_some() {
        let n = match input.truncation {
            Truncation::Auto => choose_n(t)?,
            Truncation::Fixed(n) => n,
        };
        KernelSeries::integer(t, n)
    } else {
        let n = match input.truncation {
            // Algebraic decay: no noise floor to stop at.
            Truncation::Auto => t.m(),
            Truncation::Fixed(n) => n,
        };
        Ok(KernelSeries::real(t, n)?.with_diagonal(input.setup.goursat_value(t.x)))
    }
}

fn check_sum_beta(t: &BetaTable) -> Check {
    let max = t.max_abs();
    let value = if max == 0.0 { 0.0 } else { t.sum_beta.abs() / max };
    Check::measured(
        "sum_beta",
        value,
        TOLERANCES.sum_beta,
        format!("|sum beta| = {:e}, max |beta| = {:e}", t.sum_beta.abs(), max),
    )
}

fn check_goursat(setup: &ProblemSetup, s: &KernelSeries) -> Check {
    let expect = setup.goursat_value(s.x);
    match goursat_series(s) {
        Ok(g) => {
            let diff = (g - expect).abs();
            let value = if expect == 0.0 { diff } else { diff / expect.abs() };
            Check::measured(
                "goursat",
                value,
                TOLERANCES.goursat,
                format!("series {g:e} vs half integral of q {expect:e} (N = {})", s.n),
            )
        }
        Err(e) => Check::errored("goursat", TOLERANCES.goursat, e),
    }
}

fn check_transmutation(input: &SuiteInput, s: &KernelSeries) -> Check {
    let setup = input.setup;
    let l = setup.l;
    let x = s.x;
    let tol = if setup.integer_l().is_some() {
        TOLERANCES.transmutation_integer_l
    } else {
        TOLERANCES.transmutation_real_l
    };
    let grid: Vec<f64> = (1..=64).map(|i| x * i as f64 / 64.0).collect();
    let per_omega: CoreResult<Vec<(f64, f64)>> = input
        .omegas
        .par_iter()
        .map(|&w| {
            let sample = regular_solution_ode(setup, w, &grid)?;
            let f = tilde_to_unit_factor(l, w);
            let scale = sample.u_values.iter().fold(0.0f64, |m, u| m.max((f * u).abs()));
            let exact = f * sample.u_values[63];
            let opts = TransmutationOptions {
                frequency: w,
                ..Default::default()
            };
            let got = apply_transmutation_with(s, |t| (w * t).sqrt() * bessel_j_half(l, w * t).unwrap_or(f64::NAN), x, &opts)?;
            Ok(((got.value - exact).abs() / scale, w))
        })
        .collect();
    match per_omega {
        Ok(v) => {
            let (worst, at) = v.iter().fold((0.0f64, 0.0), |acc, &(e, w)| if e > acc.0 { (e, w) } else { acc });
            Check::measured(
                "transmutation",
                worst,
                tol,
                format!("max error / max|u| over omegas {:?} (worst at omega = {at})", input.omegas),
            )
        }
        Err(e) => Check::errored("transmutation", tol, e),
    }
}

fn check_reduction(t: &BetaTable, s: &KernelSeries) -> Check {
    let l = t.l as usize;
    let run = || -> CoreResult<f64> {
        let real = KernelSeries::real(t, s.n + l + 1)?;
        let ts: Vec<f64> = (0..=90).map(|i| 0.01 * i as f64 * t.x).collect();
        let mut scale = 0.0f64;
        let mut worst = 0.0f64;
        for &tt in &ts {
            let a = kernel_k_integer(s, tt)?;
            let b = kernel_k_real(&real, tt)?;
            scale = scale.max(a.abs());
            worst = worst.max((a - b).abs());
        }
        Ok(if scale == 0.0 { worst } else { worst / scale })
    };
    match run() {
        Ok(v) => Check::measured(
            "reduction",
            v,
            TOLERANCES.reduction,
            "max |K_real - K_integer| / max |K| on t <= 0.9x".into(),
        ),
        Err(e) => Check::errored("reduction", TOLERANCES.reduction, e),
    }
}

fn check_moments(t: &BetaTable, s: &KernelSeries) -> Check {
    let l = t.l;
    let x = t.x;
    let rule = GaussRule::legendre(120);
    let run = || -> CoreResult<(f64, f64)> {
        let mut worst = 0.0f64;
        for alpha in [0.0, 1.0, 2.0, l + 1.0] {
            let closed = kernel_moment(s, alpha)?;
            // s = x u² tames fractional powers at the origin.
            let g = |u: f64| {
                let v = x * u * u;
                2.0 * x * u * v.powf(alpha) * kernel_k_integer(s, v).unwrap_or(f64::NAN)
            };
            let quad = rule.integrate_on(0.0, 1.0, g);
            let scale = rule.integrate_on(0.0, 1.0, |u| g(u).abs());
            if scale > 0.0 {
                worst = worst.max((closed - quad).abs() / scale);
            } else {
                worst = worst.max(closed.abs());
            }
        }
        let beta0 = if l == 0.0 {
            let m1 = kernel_moment(s, 1.0)?;
            (m1 - t.beta[0]).abs() / t.max_abs().max(f64::MIN_POSITIVE)
        } else {
            0.0
        };
        Ok((worst, beta0))
    };
    match run() {
        Ok((quad, beta0)) => {
            let pass = quad <= TOLERANCES.moment && beta0 <= TOLERANCES.moment_beta0;
            Check {
                name: "moments",
                status: if pass { Status::Pass } else { Status::Fail },
                value: quad,
                tolerance: TOLERANCES.moment,
                detail: format!(
                    "closed form vs quadrature for alpha in {{0, 1, 2, l+1}}; l = 0 first moment vs beta_0: {beta0:e} (tol {:e})",
                    TOLERANCES.moment_beta0
                ),
            }
        }
        Err(e) => Check::errored("moments", TOLERANCES.moment, e),
    }
}

/// `∫_0^x t^{k+3/2} J_{k+1/2}(ωt) P_m^{(k+1/2,k+1)}(1-2t²/x²) dt` by
/// composite Gauss–Legendre, panels no wider than half a period.
pub fn triangle_entry_quadrature(k: usize, m: usize, omega: f64, x: f64) -> f64 {
    let rule = GaussRule::legendre(40);
    let panels = ((2.0 * omega * x / PI).ceil() as usize).max(4);
    let p = PolynomialParams::new(m, k as f64 + 0.5, k as f64 + 1.0).expect("valid Jacobi parameters");
    rule.integrate_panels(0.0, x, panels, |t| {
        t.powf(k as f64 + 1.5)
            * bessel_j_half(k as f64, omega * t).unwrap_or(f64::NAN)
            * jacobi(p, 1.0 - 2.0 * (t / x).powi(2)).unwrap_or(f64::NAN)
    })
}

fn check_recurrence(input: &SuiteInput) -> Check {
    let base = input.setup.integer_l().unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(input.seed);
    let samples: Vec<(f64, f64, usize, usize)> = (0..input.recurrence_samples)
        .map(|_| {
            let z = rng.gen_range(1.0..=100.0);
            let x = rng.gen_range(0.1..=input.setup.b);
            let d = rng.gen_range(0..=5usize);
            let m = rng.gen_range(0..=10usize);
            (z / x, x, d, m)
        })
        .collect();
    let errs: CoreResult<Vec<f64>> = samples
        .par_iter()
        .map(|&(w, x, d, m)| {
            let tri = integral_triangle(base, d + m, w, x)?;
            let got = tri.get(base + d, m).unwrap_or(f64::NAN);
            let exact = triangle_entry_quadrature(base + d, m, w, x);
            Ok((got - exact).abs() / exact.abs())
        })
        .collect();
    match errs {
        Ok(v) => {
            let worst = v.iter().cloned().fold(0.0, f64::max);
            Check::measured(
                "recurrence",
                worst,
                TOLERANCES.recurrence,
                format!("{} random (omega, x, k, m), omega*x in [1, 100], m <= 10, seed {}", v.len(), input.seed),
            )
        }
        Err(e) => Check::errored("recurrence", TOLERANCES.recurrence, e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use transmute_core::potential::Potential;

    #[test]
    fn zero_potential_passes_everything() {
        let setup = ProblemSetup::new(1.0, PI, Potential::Zero).unwrap();
        let table = BetaTable::from_coefficients(1.0, PI, vec![0.0; 30]);
        let checks = run_suite(&SuiteInput {
            setup: &setup,
            table: &table,
            truncation: Truncation::Auto,
            omegas: &[1.0, 5.0],
            recurrence_samples: 20,
            seed: 3,
        });
        assert_eq!(checks.len(), 6);
        for c in &checks {
            assert_eq!(c.status, Status::Pass, "{c:?}");
        }
    }

    #[test]
    fn perturbation_touches_first_kernel_coefficient() {
        let mut t = BetaTable::from_coefficients(2.0, 1.0, vec![0.5; 10]);
        perturb(&mut t, 0.1);
        assert_eq!(t.beta[3], 0.6);
        assert!((t.sum_beta - 5.1).abs() < 1e-12);
    }
}
