use crate::math::{ln_gamma, FloatExt};

/// `Γ(m + 2l + 5/2) / Γ(m + l + 3/2)` carried as a logarithm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GammaRatio {
    pub value_log: f64,
    /// Always `+1` for `l >= -1/2`; kept so callers can assemble
    /// `sign * exp(value_log)` uniformly.
    pub sign: f64,
}

impl GammaRatio {
    pub fn value(&self) -> f64 {
        self.sign * self.value_log.exp()
    }
}

/// The Γ-ratio factor of the integer-l kernel series, in log form.
pub fn gamma_ratio(m: usize, l: f64) -> GammaRatio {
    GammaRatio {
        value_log: ln_gamma_shift(m as f64 + l + 1.5, l + 1.0),
        sign: 1.0,
    }
}

// Bernoulli numbers B_0..B_11 (B_1 = -1/2 convention).
const BERNOULLI: [f64; 12] = [
    1.0,
    -0.5,
    1.0 / 6.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    1.0 / 42.0,
    0.0,
    -1.0 / 30.0,
    0.0,
    5.0 / 66.0,
    0.0,
];

fn bernoulli_poly(n: usize, x: f64) -> f64 {
    let mut binom = 1.0;
    let mut acc = 0.0;
    for j in 0..=n {
        acc += binom * BERNOULLI[j] * x.powi((n - j) as i32);
        binom = binom * (n - j) as f64 / (j + 1) as f64;
    }
    acc
}

/// `ln(Γ(y + d) / Γ(y))` for `y > 0`, `d >= 0`, without forming either Γ.
///
/// The integer part of `d` is peeled off as an explicit product; the
/// fractional remainder uses the Bernoulli-polynomial asymptotic series for
/// `y >= 20` and a plain log-gamma difference below that.
pub fn ln_gamma_shift(y: f64, d: f64) -> f64 {
    let whole = d.floor();
    let frac = d - whole;
    let mut acc = 0.0;
    let mut k = 0.0;
    while k < whole {
        acc += (y + frac + k).ln();
        k += 1.0;
    }
    if frac == 0.0 {
        return acc;
    }
    let tail = if y >= 20.0 {
        let mut s = frac * y.ln();
        let mut ypow = y;
        for k in 1..=10 {
            let num = bernoulli_poly(k + 1, frac) - BERNOULLI[k + 1];
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            s += sign * num / ((k * (k + 1)) as f64 * ypow);
            ypow *= y;
        }
        s
    } else {
        ln_gamma(y + frac) - ln_gamma(y)
    };
    acc + tail
}
