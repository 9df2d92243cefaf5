//! Property tests for the algebraic and numerical invariants of the core.

use std::f64::consts::PI;

use proptest::prelude::*;
use transmute_core::coeffs::{eval_r, BetaTable};
use transmute_core::kernel::{
    goursat_series, kernel_k_integer, kernel_k_real, kernel_moment, poisson_transform, KernelSeries,
};
use transmute_core::potential::CubicSpline;
use transmute_core::quadrature::GaussRule;
use transmute_core::roots::{brent, sign_changes};
use transmute_core::solution::integral_triangle;
use transmute_core::spectral::choose_n;
use transmute_core::specialfn::{
    bessel_j_half, jacobi, jacobi_all, legendre, legendre_all, spherical_j_array, PolynomialParams,
};

fn lgamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Coefficients with geometric decay and arbitrary signs.
fn decaying_beta(m: usize) -> impl Strategy<Value = Vec<f64>> {
    (prop::collection::vec(-1.0f64..1.0, m + 1), 0.2f64..0.7)
        .prop_map(|(v, r)| v.iter().enumerate().map(|(k, c)| c * r.powi(k as i32)).collect())
}

fn triangle_oracle(k: usize, m: usize, omega: f64, x: f64) -> (f64, f64) {
    let rule = GaussRule::legendre(48);
    let panels = ((omega * x / PI).ceil() as usize).max(4);
    let p = PolynomialParams::new(m, k as f64 + 0.5, k as f64 + 1.0).unwrap();
    let f = |t: f64| {
        t.powf(k as f64 + 1.5)
            * bessel_j_half(k as f64, omega * t).unwrap()
            * jacobi(p, 1.0 - 2.0 * (t / x).powi(2)).unwrap()
    };
    let v = rule.integrate_panels(0.0, x, panels, f);
    let scale = rule.integrate_panels(0.0, x, panels, |t| f(t).abs());
    (v, scale)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn legendre_is_jacobi_zero_zero(n in 0usize..40, z in -1.0f64..1.0) {
        let a = legendre(n, z).unwrap();
        let b = jacobi(PolynomialParams::new(n, 0.0, 0.0).unwrap(), z).unwrap();
        prop_assert!((a - b).abs() <= 1e-12);
        prop_assert!(a.abs() <= 1.0 + 1e-12);
        prop_assert!((legendre_all(n, z).unwrap()[n] - a).abs() <= 1e-14);
    }

    #[test]
    fn jacobi_endpoint_values(n in 0usize..30, a in -0.9f64..6.0, b in -0.9f64..6.0) {
        let p = PolynomialParams::new(n, a, b).unwrap();
        let at_one = jacobi(p, 1.0).unwrap();
        let expect = (lgamma(n as f64 + a + 1.0) - lgamma(n as f64 + 1.0) - lgamma(a + 1.0)).exp();
        prop_assert!((at_one - expect).abs() <= 1e-11 * expect, "{} {}", at_one, expect);
        // Symmetry P_n^{(a,b)}(-z) = (-1)^n P_n^{(b,a)}(z).
        let q = PolynomialParams::new(n, b, a).unwrap();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let lhs = jacobi(p, -0.3).unwrap();
        let rhs = sign * jacobi(q, 0.3).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1.0));
    }

    #[test]
    fn jacobi_all_agrees_with_single(n in 0usize..25, a in 0.0f64..4.0, b in -3.5f64..4.0, z in -1.0f64..1.0) {
        let all = jacobi_all(n, a, b, z).unwrap();
        for (k, v) in all.iter().enumerate() {
            let s = jacobi(PolynomialParams::new(k, a, b).unwrap(), z).unwrap();
            prop_assert!((v - s).abs() <= 1e-12 * s.abs().max(1.0));
        }
    }

    #[test]
    fn spherical_bessel_three_term_relation(n in 1usize..40, z in 0.05f64..200.0) {
        let j = spherical_j_array(n + 1, z).unwrap();
        let lhs = j[n - 1] + j[n + 1];
        let rhs = (2 * n + 1) as f64 / z * j[n];
        let scale = j[n - 1].abs().max(j[n + 1].abs()).max(1e-300);
        prop_assert!((lhs - rhs).abs() <= 1e-11 * scale, "{} {}", lhs, rhs);
    }

    #[test]
    fn triangle_matches_quadrature(
        l in 0usize..4,
        z in 0.1f64..100.0,
        x in 0.3f64..4.0,
        d in 0usize..4,
        m in 0usize..=10,
    ) {
        let omega = z / x;
        let tri = integral_triangle(l, 10 + d, omega, x).unwrap();
        let (exact, scale) = triangle_oracle(l + d, m, omega, x);
        let got = tri.get(l + d, m).unwrap();
        prop_assert!((got - exact).abs() <= 1e-10 * exact.abs().max(1e-6 * scale), "{} {}", got, exact);
    }

    #[test]
    fn legendre_projection_round_trip(beta in decaying_beta(8), x in 0.5f64..4.0) {
        let table = BetaTable::from_coefficients(0.0, x, beta.clone());
        let rule = GaussRule::legendre(30);
        for (k, b) in beta.iter().enumerate() {
            let proj = rule.integrate_on(0.0, 1.0, |z| {
                eval_r(&table, x * z).unwrap() * legendre(2 * k, z).unwrap()
            });
            prop_assert!((x * (4 * k + 1) as f64 * proj - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn goursat_is_kernel_on_diagonal(beta in decaying_beta(24), l in 0usize..4, x in 0.5f64..4.0) {
        let table = BetaTable::from_coefficients(l as f64, x, beta);
        let k = KernelSeries::integer(&table, 20 - l).unwrap();
        let g = goursat_series(&k).unwrap();
        let d = kernel_k_integer(&k, x).unwrap();
        prop_assert!((g - d).abs() <= 1e-11 * g.abs().max(1.0));
        prop_assert_eq!(kernel_k_integer(&k, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn real_mode_reduces_to_integer_mode(
        beta in decaying_beta(24),
        l in 0usize..3,
        x in 0.5f64..4.0,
        frac in 0.0f64..0.9,
    ) {
        let table = BetaTable::from_coefficients(l as f64, x, beta);
        let ki = KernelSeries::integer(&table, 24 - l - 1).unwrap();
        let kr = KernelSeries::real(&table, 24).unwrap();
        let t = frac * x;
        let a = kernel_k_integer(&ki, t).unwrap();
        let b = kernel_k_real(&kr, t).unwrap();
        let scale = (0..=20).map(|i| kernel_k_integer(&ki, 0.045 * i as f64 * x).unwrap().abs()).fold(0.0, f64::max);
        prop_assert!((a - b).abs() <= 1e-9 * scale.max(1e-300), "{} {}", a, b);
    }

    #[test]
    fn moment_matches_quadrature(beta in decaying_beta(20), l in 0usize..3, alpha in 0.0f64..4.0) {
        let x = 1.9;
        let table = BetaTable::from_coefficients(l as f64, x, beta);
        let k = KernelSeries::integer(&table, 18 - l).unwrap();
        let rule = GaussRule::legendre(100);
        let g = |u: f64| {
            let s = x * u * u;
            2.0 * x * u * s.powf(alpha) * kernel_k_integer(&k, s).unwrap()
        };
        let quad = rule.integrate_on(0.0, 1.0, g);
        let scale = rule.integrate_on(0.0, 1.0, |u| g(u).abs());
        let closed = kernel_moment(&k, alpha).unwrap();
        prop_assert!((closed - quad).abs() <= 1e-11 * scale.max(1e-300), "{} {}", closed, quad);
    }

    #[test]
    fn poisson_of_cosine(l in -0.5f64..3.0, omega in 0.1f64..40.0, x in 0.2f64..3.0) {
        let got = poisson_transform(|s| (omega * s).cos(), l, x).unwrap();
        let expect = PI.sqrt() * libm::tgamma(l + 1.0) / (2.0 * omega.powf(l + 1.0) * libm::tgamma(l + 1.5))
            * (omega * x).sqrt()
            * bessel_j_half(l, omega * x).unwrap();
        let scale = poisson_transform(|_| 1.0, l, x).unwrap();
        prop_assert!((got - expect).abs() <= 1e-12 * scale);
    }

    #[test]
    fn brent_finds_bracketed_roots(r in -5.0f64..5.0, c in 0.1f64..3.0) {
        let f = |t: f64| Ok((t - r) * (t * t + c));
        let (lo, hi) = (r - 1.3, r + 0.7);
        let root = brent(f, lo, hi, f(lo).unwrap(), f(hi).unwrap(), 1e-13).unwrap();
        prop_assert!((root - r).abs() <= 1e-12);
    }

    #[test]
    fn sign_changes_count_sine_zeros(w in 1.0f64..20.0) {
        let xs: Vec<f64> = (0..=2000).map(|i| 0.013 + i as f64 * 0.005).collect();
        let fs: Vec<f64> = xs.iter().map(|x| (w * x).sin()).collect();
        let expect = ((w * xs[2000] / PI).floor() - (w * xs[0] / PI).floor()) as usize;
        prop_assert_eq!(sign_changes(&xs, &fs).len(), expect);
    }

    #[test]
    fn choose_n_never_stalls_on_geometric_decay(ratio in 0.05f64..0.85, m in 6usize..60, l in 0usize..3) {
        let beta: Vec<f64> = (0..=m).map(|k| ratio.powi(k as i32)).collect();
        let t = BetaTable::from_coefficients(l as f64, 1.0, beta);
        prop_assert_eq!(choose_n(&t).unwrap(), m.saturating_sub(l + 1));
    }

    #[test]
    fn spline_interpolates_and_integrates(ys in prop::collection::vec(-2.0f64..2.0, 5..20)) {
        let n = ys.len();
        let xs: Vec<f64> = (0..n).map(|i| i as f64 * 0.3).collect();
        let s = CubicSpline::new(xs.clone(), ys.clone()).unwrap();
        for (x, y) in xs.iter().zip(&ys) {
            prop_assert!((s.eval(*x) - y).abs() <= 1e-12);
        }
        let end = xs[n - 1];
        let quad = GaussRule::legendre(8).integrate_panels(0.0, end, n - 1, |x| s.eval(x));
        prop_assert!((s.integral(end) - quad).abs() <= 1e-12 * quad.abs().max(1.0));
    }
}
