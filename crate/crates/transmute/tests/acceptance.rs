//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the report is always printed. Exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use transmute::parallel::{compute_beta_par, Rayon};
use transmute_core::coeffs::{default_freq_count, default_m, BetaTable};
use transmute_core::kernel::{
    apply_transmutation_with, epsilon_n, goursat_series, kernel_k_integer, kernel_k_real, kernel_moment,
    KernelSeries, TransmutationOptions,
};
use transmute_core::oracle::{dirichlet_eigenvalues_ode, regular_solution_at, tilde_to_unit_factor, ProblemSetup};
use transmute_core::potential::Potential;
use transmute_core::solution::{integral_triangle, u_n, uniform_error_bound};
use transmute_core::specialfn::bessel_j_half;
use transmute_core::spectral::{
    choose_n, dirichlet_eigenvalues_from, evaluator_from_table, reference_truncation, Truncation,
};

/// Reference eigenvalues for `q = x²`, `l = 1`, `b = π`.
const HARMONIC_L1: [(usize, f64); 8] = [
    (1, 2.24366651120741),
    (2, 3.09030600792814),
    (5, 5.78188700721372),
    (10, 10.6472529934013),
    (20, 20.5753329357456),
    (50, 50.5305689586825),
    (100, 100.515359633269),
    (200, 200.507698855317),
];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn harmonic(l: f64) -> ProblemSetup {
    ProblemSetup::new(l, PI, Potential::Polynomial(vec![0.0, 0.0, 1.0])).unwrap()
}

fn beta(setup: &ProblemSetup, x: f64) -> BetaTable {
    let m = default_m(setup.l);
    compute_beta_par(setup, x, m, default_freq_count(m)).unwrap()
}

/// Independent reference implementations.
mod oracle {
    use std::f64::consts::PI;

    /// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration.
    pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut dp = 0.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, x);
                    for k in 2..=n {
                        let k = k as f64;
                        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-16 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    }

    pub fn integrate(rule: &[(f64, f64)], a: f64, b: f64, panels: usize, f: impl Fn(f64) -> f64) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + p as f64 * h;
                rule.iter().map(|&(x, w)| w * f(lo + 0.5 * h * (x + 1.0))).sum::<f64>() * 0.5 * h
            })
            .sum()
    }

    /// Spherical Bessel `j_k(z)`: power series below `z = k + 1`, upward
    /// recurrence above.
    pub fn spherical_j(k: usize, z: f64) -> f64 {
        if z < k as f64 + 1.0 {
            let mut lead = 1.0;
            for i in 0..k {
                lead *= z / (2 * i + 3) as f64;
            }
            let (mut term, mut sum) = (1.0, 1.0);
            for i in 1..60 {
                term *= -z * z / (2.0 * i as f64 * (2 * k + 2 * i + 1) as f64);
                sum += term;
                if term.abs() < 1e-18 * sum.abs() {
                    break;
                }
            }
            return lead * sum;
        }
        let j0 = z.sin() / z;
        if k == 0 {
            return j0;
        }
        let mut j1 = (j0 - z.cos()) / z;
        let mut jm = j0;
        for n in 1..k {
            let jn = (2 * n + 1) as f64 / z * j1 - jm;
            jm = j1;
            j1 = jn;
        }
        j1
    }

    /// Jacobi `P_m^{(a,b)}(x)` by the three-term recurrence.
    pub fn jacobi(m: usize, a: f64, b: f64, x: f64) -> f64 {
        let mut p0 = 1.0;
        if m == 0 {
            return p0;
        }
        let mut p1 = 0.5 * (a - b + (a + b + 2.0) * x);
        for n in 2..=m {
            let n = n as f64;
            let c = 2.0 * n + a + b;
            let a1 = 2.0 * n * (n + a + b) * (c - 2.0);
            let a2 = (c - 1.0) * (a * a - b * b);
            let a3 = (c - 2.0) * (c - 1.0) * c;
            let a4 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * c;
            let p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
            p0 = p1;
            p1 = p2;
        }
        p1
    }

    /// `∫_0^x t^{k+3/2} J_{k+1/2}(ωt) P_m^{(k+1/2, k+1)}(1 - 2t²/x²) dt`.
    pub fn triangle_entry(k: usize, m: usize, omega: f64, x: f64) -> f64 {
        let rule = gauss_legendre(32);
        let panels = ((omega * x / PI).ceil() as usize).max(4);
        let a = k as f64 + 0.5;
        integrate(&rule, 0.0, x, panels, |t| {
            let z = omega * t;
            // J_{k+1/2}(z) = √(2z/π) j_k(z)
            t.powf(k as f64 + 1.5) * (2.0 * z / PI).sqrt() * spherical_j(k, z) * jacobi(m, a, a + 0.5, 1.0 - 2.0 * (t / x).powi(2))
        })
    }

    /// `ũ(ω, ·) ~ x^{l+1}` for `q = x²` on `grid` (increasing, all ≥ 0.1):
    /// Frobenius series up to `x = 0.1`, classical RK4 beyond.
    pub fn harmonic_tilde(l: f64, omega: f64, grid: &[f64]) -> Vec<f64> {
        let x0: f64 = 0.1;
        // a_j j (j + 2l + 1) = -ω² a_{j-2} + a_{j-4}
        let mut a = vec![1.0, 0.0];
        for j in 2..40 {
            let prev4 = if j >= 4 { a[j - 4] } else { 0.0 };
            a.push((-omega * omega * a[j - 2] + prev4) / (j as f64 * (j as f64 + 2.0 * l + 1.0)));
        }
        let mut y = 0.0;
        let mut dy = 0.0;
        for (j, c) in a.iter().enumerate() {
            let p = j as f64 + l + 1.0;
            y += c * x0.powf(p);
            dy += c * p * x0.powf(p - 1.0);
        }
        let g = |x: f64| l * (l + 1.0) / (x * x) + x * x - omega * omega;
        let f = |x: f64, y: f64, dy: f64| (dy, g(x) * y);
        let h_max: f64 = 1e-4;
        let mut x = x0;
        let mut out = Vec::with_capacity(grid.len());
        for &target in grid {
            while x < target {
                let h = h_max.min(target - x);
                let (k1y, k1d) = f(x, y, dy);
                let (k2y, k2d) = f(x + 0.5 * h, y + 0.5 * h * k1y, dy + 0.5 * h * k1d);
                let (k3y, k3d) = f(x + 0.5 * h, y + 0.5 * h * k2y, dy + 0.5 * h * k2d);
                let (k4y, k4d) = f(x + h, y + h * k3y, dy + h * k3d);
                y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
                dy += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
                x += h;
            }
            out.push(y);
        }
        out
    }
}

fn c1_reference_eigenvalues() -> Outcome {
    let start = Instant::now();
    let setup = harmonic(1.0);
    let ev = evaluator_from_table(beta(&setup, PI), Truncation::Auto).unwrap();
    let mut report = dirichlet_eigenvalues_from(&ev, 200, &Rayon).unwrap();
    report.attach_references(&HARMONIC_L1);
    let secs = start.elapsed().as_secs_f64();
    let worst = report.max_reference_error(1..=200).unwrap();
    let compared = report.reference_errors.as_ref().unwrap().len();
    outcome(
        compared == 8 && worst <= 1e-6 && secs <= 60.0,
        format!("max |dw| = {worst:.2e} over {compared} values (tol 1e-6), {secs:.1} s (limit 60 s)"),
    )
}

fn c2_uniform_in_n() -> Outcome {
    // l = 1 against the table.
    let setup = harmonic(1.0);
    let ev = evaluator_from_table(beta(&setup, PI), Truncation::Auto).unwrap();
    let mut r1 = dirichlet_eigenvalues_from(&ev, 200, &Rayon).unwrap();
    r1.attach_references(&HARMONIC_L1);
    let (lo1, hi1) = (r1.max_reference_error(1..=10).unwrap(), r1.max_reference_error(100..=200).unwrap());

    // l = 2 against ODE shooting.
    let setup = harmonic(2.0);
    let ev = evaluator_from_table(beta(&setup, PI), Truncation::Auto).unwrap();
    let mut r2 = dirichlet_eigenvalues_from(&ev, 200, &Rayon).unwrap();
    let refs = dirichlet_eigenvalues_ode(&setup, 200, 1e-13).unwrap();
    let pairs: Vec<(usize, f64)> = refs.iter().enumerate().map(|(i, w)| (i + 1, *w)).collect();
    r2.attach_references(&pairs);
    let (lo2, hi2) = (r2.max_reference_error(1..=10).unwrap(), r2.max_reference_error(100..=200).unwrap());

    let ok = hi1 <= 10.0 * lo1 && hi2 <= 10.0 * lo2;
    outcome(
        ok,
        format!(
            "l=1: max n in [100,200] {hi1:.2e} vs 10 x max n in [1,10] {:.2e}; l=2: {hi2:.2e} vs {:.2e}",
            10.0 * lo1,
            10.0 * lo2
        ),
    )
}

/// Goursat errors stop improving once they reach the accuracy of the β fit.
const GOURSAT_NOISE_FLOOR: f64 = 1e-9;

fn c3_goursat() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for l in [0.0, 1.0, 2.0] {
        let setup = harmonic(l);
        let table = beta(&setup, PI);
        let exact = PI.powi(3) / 6.0;
        let err = |n: usize| {
            let s = KernelSeries::integer(&table, n).unwrap();
            ((goursat_series(&s).unwrap() - exact) / exact).abs()
        };
        let auto = choose_n(&table).unwrap();
        let at_auto = err(auto);
        let evens: Vec<f64> = (0..=auto).step_by(2).map(err).collect();
        let decreasing = evens
            .windows(2)
            .all(|w| w[0] <= GOURSAT_NOISE_FLOOR || w[1] < w[0]);
        ok &= at_auto <= 1e-3 && decreasing;
        parts.push(format!(
            "l={l}: N={auto} rel {at_auto:.1e}, decreasing over even N={decreasing}"
        ));
    }
    outcome(ok, format!("{} (tol 1e-3)", parts.join("; ")))
}

fn transmutation_errors(l: f64, omegas: &[f64], xs: &[f64], series_for: impl Fn(&BetaTable) -> KernelSeries) -> Vec<(f64, f64, f64)> {
    let setup = harmonic(l);
    xs.iter()
        .flat_map(|&x| {
            let table = beta(&setup, x);
            let series = series_for(&table);
            let grid: Vec<f64> = (1..=200).map(|i| 0.1 + (x - 0.1) * i as f64 / 200.0).collect();
            omegas
                .iter()
                .map(|&w| {
                    let tilde = oracle::harmonic_tilde(l, w, &grid);
                    let f = tilde_to_unit_factor(l, w);
                    let scale = tilde.iter().fold(0.0f64, |m, u| m.max((f * u).abs()));
                    let exact = f * tilde[199];
                    let opts = TransmutationOptions {
                        frequency: w,
                        ..Default::default()
                    };
                    let got = apply_transmutation_with(&series, |t| (w * t).sqrt() * bessel_j_half(l, w * t).unwrap(), x, &opts)
                        .unwrap()
                        .value;
                    (x, w, (got - exact).abs() / scale)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn c4_transmutation() -> Outcome {
    let errs = transmutation_errors(1.0, &[1.0, 5.0, 10.0], &[PI / 2.0, PI], |t| {
        KernelSeries::integer(t, choose_n(t).unwrap()).unwrap()
    });
    let worst = errs.iter().map(|e| e.2).fold(0.0, f64::max);
    outcome(
        worst <= 1e-6,
        format!("max |T[y] - u| / max|u| = {worst:.2e} over omega in {{1,5,10}}, x in {{pi/2, pi}} (tol 1e-6)"),
    )
}

fn c5_uniform_in_omega() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for l in [1.0, 2.0] {
        let setup = harmonic(l);
        let table = beta(&setup, PI);
        let m = table.m();
        let ev = evaluator_from_table(table.clone(), Truncation::Auto).unwrap();
        let n_ref = reference_truncation(ev.n, l as usize, m);
        let reference = KernelSeries::integer(&table, n_ref).unwrap();
        let eps = epsilon_n(&ev.kernel, &reference).unwrap();
        let bound = uniform_error_bound(&ev, PI, eps).unwrap();
        let omegas: Vec<f64> = (0..=398).map(|i| 1.0 + 0.5 * i as f64).collect();
        let errs: Vec<f64> = omegas
            .par_iter()
            .map(|&w| {
                let oracle = tilde_to_unit_factor(l, w) * regular_solution_at(&setup, w, PI).unwrap();
                (u_n(&ev, w, PI).unwrap() - oracle).abs()
            })
            .collect();
        let low = errs[..199].iter().cloned().fold(0.0, f64::max);
        let high = errs[199..].iter().cloned().fold(0.0, f64::max);
        let worst = low.max(high);
        ok &= worst.is_finite() && high <= low && worst <= bound;
        parts.push(format!(
            "l={l} N={}: max err w<100 {low:.1e}, w>=100 {high:.1e}, bound c_l*eps_N {bound:.1e}",
            ev.n
        ));
    }
    outcome(ok, parts.join("; "))
}

fn c6_trivial_potential() -> Outcome {
    let mut worst_beta = 0.0f64;
    let mut worst_k = 0.0f64;
    for l in [0.0, 1.0, 2.0, 0.5] {
        let setup = ProblemSetup::new(l, PI, Potential::Zero).unwrap();
        let table = beta(&setup, PI);
        worst_beta = worst_beta.max(table.max_abs());
        let ts: Vec<f64> = (0..=100).map(|i| PI * i as f64 / 100.0).collect();
        if l.fract() == 0.0 {
            let s = KernelSeries::integer(&table, table.m() - l as usize - 1).unwrap();
            for &t in &ts {
                worst_k = worst_k.max(kernel_k_integer(&s, t).unwrap().abs());
            }
        } else {
            let s = KernelSeries::real(&table, table.m()).unwrap();
            for &t in &ts[..95] {
                worst_k = worst_k.max(kernel_k_real(&s, t).unwrap().abs());
            }
        }
    }
    let setup = ProblemSetup::new(0.0, PI, Potential::Zero).unwrap();
    let ev = evaluator_from_table(beta(&setup, PI), Truncation::Auto).unwrap();
    let report = dirichlet_eigenvalues_from(&ev, 50, &Rayon).unwrap();
    let worst_w = report
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, w)| (w - (i + 1) as f64).abs())
        .fold(0.0, f64::max);
    let ok = worst_beta <= 1e-10 && worst_k <= 1e-10 && worst_w <= 1e-10 && report.eigenvalues.len() == 50;
    outcome(
        ok,
        format!("max |beta| {worst_beta:.1e}, max |K_N| {worst_k:.1e}, l=0 max |w_n - n| (n<=50) {worst_w:.1e} (tol 1e-10)"),
    )
}

fn c7_sum_beta() -> Outcome {
    let potentials: [(&str, Potential); 3] = [
        ("x^2", Potential::Polynomial(vec![0.0, 0.0, 1.0])),
        ("1+x/2-x^3/5", Potential::Polynomial(vec![1.0, 0.5, 0.0, -0.2])),
        ("cos x", Potential::Function(f64::cos)),
    ];
    let cases: Vec<(usize, f64)> = (0..3).flat_map(|i| [0.0, 1.0, 2.0, 0.5].map(|l| (i, l))).collect();
    let ratios: Vec<f64> = cases
        .iter()
        .map(|&(i, l)| {
            let setup = ProblemSetup::new(l, PI, potentials[i].1.clone()).unwrap();
            let t = beta(&setup, PI);
            t.sum_beta.abs() / t.max_abs()
        })
        .collect();
    // Gated: q = x² at every l, the other potentials at integer l. For
    // non-integer l the other potentials are reported only: β_k decays
    // algebraically there and the tail past M sets the sum.
    let (mut gated, mut gated_at, mut extra) = (0.0f64, String::new(), 0.0f64);
    for (&(i, l), &r) in cases.iter().zip(&ratios) {
        if i == 0 || l.fract() == 0.0 {
            if r > gated {
                gated = r;
                gated_at = format!("q={}, l={l}", potentials[i].0);
            }
        } else {
            extra = extra.max(r);
        }
    }
    outcome(
        gated <= 1e-7,
        format!(
            "max |sum beta| / max |beta| = {gated:.1e} at {gated_at} (tol 1e-7); other potentials at l=0.5: {extra:.1e} (reported)"
        ),
    )
}

fn c8_recurrence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let samples: Vec<(f64, f64, usize, usize)> = (0..100)
        .map(|_| {
            let z = rng.gen_range(1.0..=100.0);
            let x = rng.gen_range(0.1..=PI);
            (z / x, x, rng.gen_range(0..=7usize), rng.gen_range(0..=10usize))
        })
        .collect();
    let errs: Vec<f64> = samples
        .par_iter()
        .map(|&(w, x, k, m)| {
            let tri = integral_triangle(0, k + m, w, x).unwrap();
            let got = tri.get(k, m).unwrap();
            let exact = oracle::triangle_entry(k, m, w, x);
            (got - exact).abs() / exact.abs()
        })
        .collect();
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    outcome(
        worst <= 1e-9,
        format!("max relative error {worst:.1e} over 100 samples, omega*x in [1,100], k<=7, m<=10 (tol 1e-9)"),
    )
}

fn c9_reduction() -> Outcome {
    let setup = harmonic(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let points: Vec<(f64, f64)> = (0..50)
        .map(|_| {
            let x = rng.gen_range(0.2..=PI);
            (x, rng.gen_range(0.0..=0.9) * x)
        })
        .collect();
    // The identity is algebraic in β, so a smaller fit keeps this quick.
    let m = 30;
    let errs: Vec<f64> = points
        .par_iter()
        .map(|&(x, t)| {
            let table = compute_beta_par(&setup, x, m, default_freq_count(m)).unwrap();
            let n = m - 2;
            let int = kernel_k_integer(&KernelSeries::integer(&table, n).unwrap(), t).unwrap();
            let real = kernel_k_real(&KernelSeries::real(&table, n + 2).unwrap(), t).unwrap();
            (int - real).abs()
        })
        .collect();
    let worst = errs.iter().cloned().fold(0.0, f64::max);
    outcome(
        worst <= 1e-8,
        format!("max |K_real - K_integer| = {worst:.1e} at 50 random (x, t <= 0.9x), l=1 (tol 1e-8)"),
    )
}

fn c10_moments() -> Outcome {
    let rule = oracle::gauss_legendre(60);
    let mut worst_quad = 0.0f64;
    let mut beta0_err = 0.0f64;
    for l in [0.0, 1.0, 2.0] {
        let setup = harmonic(l);
        let table = beta(&setup, PI);
        let s = KernelSeries::integer(&table, choose_n(&table).unwrap()).unwrap();
        for alpha in [0.0, 0.5, 1.0, 2.0, 3.5] {
            let closed = kernel_moment(&s, alpha).unwrap();
            // t = x u² keeps fractional powers smooth at the origin.
            let g = |u: f64| {
                let t = PI * u * u;
                2.0 * PI * u * t.powf(alpha) * kernel_k_integer(&s, t).unwrap()
            };
            let quad = oracle::integrate(&rule, 0.0, 1.0, 8, g);
            worst_quad = worst_quad.max((closed - quad).abs() / quad.abs().max(1.0));
        }
        if l == 0.0 {
            beta0_err = (kernel_moment(&s, 1.0).unwrap() - table.beta[0]).abs();
        }
    }
    outcome(
        beta0_err <= 1e-8 && worst_quad <= 1e-9,
        format!(
            "l=0 |moment(1) - beta_0| = {beta0_err:.1e} (tol 1e-8); closed form vs quadrature {worst_quad:.1e} for l in {{0,1,2}}, alpha in {{0,0.5,1,2,3.5}} (tol 1e-9)"
        ),
    )
}

fn c11_real_l() -> Outcome {
    let setup = harmonic(0.5);
    let errs = transmutation_errors(0.5, &[1.0, 5.0], &[PI], |t| {
        KernelSeries::real(t, t.m()).unwrap().with_diagonal(setup.goursat_value(t.x))
    });
    let worst = errs.iter().map(|e| e.2).fold(0.0, f64::max);
    outcome(
        worst <= 1e-4,
        format!("l=0.5: max |T[y] - u| / max|u| = {worst:.1e} over omega in {{1,5}} (tol 1e-4)"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("1 eigenvalue table reproduction", c1_reference_eigenvalues),
        ("2 uniform accuracy in n", c2_uniform_in_n),
        ("3 Goursat condition", c3_goursat),
        ("4 transmutation property", c4_transmutation),
        ("5 uniform-in-omega solution error", c5_uniform_in_omega),
        ("6 trivial potential", c6_trivial_potential),
        ("7 sum of beta identity", c7_sum_beta),
        ("8 integral recurrence vs quadrature", c8_recurrence),
        ("9 integer reduction of the real-l kernel", c9_reduction),
        ("10 kernel moments", c10_moments),
        ("11 non-integer l kernel", c11_real_l),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            outcome(false, format!("panicked: {msg}"))
        });
        if !result.pass {
            failed += 1;
        }
        println!(
            "{} criterion {name}: {} [{:.1} s]",
            if result.pass { "PASS" } else { "FAIL" },
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
