use crate::math::DoubleDouble;

/// `₂F₁(-m, b; c; z)` summed term by term (terminates after `m + 1` terms).
pub fn hyp2f1_terminating(m: usize, b: f64, c: f64, z: f64) -> f64 {
    let mut term = 1.0;
    let mut acc = crate::math::CompensatedSum::new();
    acc.add(term);
    for j in 0..m {
        let jf = j as f64;
        term *= (jf - m as f64) * (b + jf) / ((c + jf) * (jf + 1.0)) * z;
        acc.add(term);
    }
    acc.value()
}

/// `₃F₂(-m, a2, a3; b1, b2; 1)` with double-double accumulation.
///
/// The terms of these sums alternate and grow like a binomial in `m`, so the
/// ratio recursion and the running sum are carried in ~32 significant digits.
pub fn hyp3f2_terminating_general(m: usize, a2: f64, a3: f64, b1: f64, b2: f64) -> f64 {
    let dd = DoubleDouble::from_f64;
    let mut term = DoubleDouble::ONE;
    let mut sum = DoubleDouble::ONE;
    for j in 0..m {
        let jf = j as f64;
        let num = dd(jf - m as f64).mul(dd(a2).add(dd(jf))).mul(dd(a3).add(dd(jf)));
        let den = dd(b1).add(dd(jf)).mul(dd(b2).add(dd(jf))).mul(dd(jf + 1.0));
        term = term.mul(num).div(den);
        sum = sum.add(term);
    }
    sum.to_f64()
}

/// `₃F₂(-m, 2l+m+5/2, (α+l)/2+1; l+3/2, (α+l)/2+2; 1)`, the factor of the
/// kernel power-moment formula.
pub fn hyp3f2_terminating(m: usize, l: f64, alpha: f64) -> f64 {
    let rho = 0.5 * (alpha + l);
    hyp3f2_terminating_general(m, 2.0 * l + m as f64 + 2.5, rho + 1.0, l + 1.5, rho + 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::GaussRule;
    use crate::specialfn::{jacobi, PolynomialParams};
    use crate::math::{gamma, FloatExt};

    #[test]
    fn empty_product_and_two_term_sum() {
        assert_eq!(hyp3f2_terminating(0, 0.7, 3.0), 1.0);
        // 1 + (-1)(7/2)(3/2) / ((3/2)(5/2)(1)) = 1 - 7/5.
        assert!((hyp3f2_terminating(1, 0.0, 1.0) + 0.4).abs() < 1e-15);
    }

    #[test]
    fn matches_gauss_jacobi_moment_integral() {
        // ∫_{-1}^{1} (1-z)^ρ P_m^{(l+1/2,l+1)}(z) dz
        //   = 2^{ρ+1}/(ρ+1) Γ(m+l+3/2)/(m! Γ(l+3/2)) ₃F₂(...)
        for &(m, l, alpha) in &[(3usize, 1.0, 2.0), (5, 0.0, 1.0), (7, 2.0, 0.5), (10, 1.0, -1.5)] {
            let rho: f64 = 0.5 * (alpha + l);
            let rule = GaussRule::jacobi(60, rho, 0.0).unwrap();
            let p = |z: f64| jacobi(PolynomialParams::new(m, l + 0.5, l + 1.0).unwrap(), z).unwrap();
            let quad = rule.integrate(p);
            let fact = (1..=m).fold(1.0, |acc, i| acc * i as f64);
            let pre = 2f64.powf(rho + 1.0) / (rho + 1.0) * gamma(m as f64 + l + 1.5) / (fact * gamma(l + 1.5));
            let closed = pre * hyp3f2_terminating(m, l, alpha);
            assert!((quad - closed).abs() < 1e-11 * quad.abs().max(1.0), "{m} {l} {alpha}: {quad} vs {closed}");
        }
    }

    #[test]
    fn hyp2f1_chu_vandermonde() {
        // ₂F₁(-m, b; c; 1) = (c-b)_m / (c)_m
        let (m, b, c) = (6usize, 2.5, 4.25);
        let poch = |x: f64| (0..m).fold(1.0, |acc, i| acc * (x + i as f64));
        let expect = poch(c - b) / poch(c);
        assert!((hyp2f1_terminating(m, b, c, 1.0) - expect).abs() < 1e-14);
    }
}
