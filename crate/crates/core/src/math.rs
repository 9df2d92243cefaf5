//! `libm`-backed float methods so the numerics read the same with or
//! without `std`.

#[cfg_attr(test, allow(dead_code))]
pub(crate) trait FloatExt: Sized {
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn powf(self, e: Self) -> Self;
    fn powi(self, e: i32) -> Self;
    fn floor(self) -> Self;
    fn ceil(self) -> Self;
    fn round(self) -> Self;
    fn mul_add(self, a: Self, b: Self) -> Self;
    fn hypot(self, other: Self) -> Self;
}

impl FloatExt for f64 {
    #[inline]
    fn sqrt(self) -> f64 {
        libm::sqrt(self)
    }
    #[inline]
    fn sin(self) -> f64 {
        libm::sin(self)
    }
    #[inline]
    fn cos(self) -> f64 {
        libm::cos(self)
    }
    #[inline]
    fn exp(self) -> f64 {
        libm::exp(self)
    }
    #[inline]
    fn ln(self) -> f64 {
        libm::log(self)
    }
    #[inline]
    fn powf(self, e: f64) -> f64 {
        libm::pow(self, e)
    }
    #[inline]
    fn powi(self, e: i32) -> f64 {
        libm::pow(self, e as f64)
    }
    #[inline]
    fn floor(self) -> f64 {
        libm::floor(self)
    }
    #[inline]
    fn ceil(self) -> f64 {
        libm::ceil(self)
    }
    #[inline]
    fn round(self) -> f64 {
        libm::round(self)
    }
    #[inline]
    fn mul_add(self, a: f64, b: f64) -> f64 {
        libm::fma(self, a, b)
    }
    #[inline]
    fn hypot(self, other: f64) -> f64 {
        libm::hypot(self, other)
    }
}

/// `ln Γ(x)` for `x > 0`.
#[inline]
pub(crate) fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// `ln |Γ(x)|` together with the sign of `Γ(x)`.
#[inline]
pub(crate) fn ln_gamma_signed(x: f64) -> (f64, f64) {
    let (v, s) = libm::lgamma_r(x);
    (v, if s < 0 { -1.0 } else { 1.0 })
}

#[cfg(test)]
pub(crate) fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}

/// `true` when `x` is (to rounding) a non-positive integer, i.e. a pole of Γ.
#[inline]
pub(crate) fn is_gamma_pole(x: f64) -> bool {
    x <= 0.0 && (x - libm::round(x)).abs() < 1e-12
}

/// Running sum with Neumaier compensation.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.carry += (self.sum - t) + v;
        } else {
            self.carry += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub(crate) fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

/// Unevaluated sum `hi + lo` of two doubles, used where a terminating
/// series cancels heavily.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub(crate) const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub(crate) const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub(crate) fn from_f64(v: f64) -> Self {
        Self { hi: v, lo: 0.0 }
    }

    #[inline]
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    #[inline]
    fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        (s, b - (s - a))
    }

    pub(crate) fn add(self, o: Self) -> Self {
        let (s, e) = Self::two_sum(self.hi, o.hi);
        let (t, f) = Self::two_sum(self.lo, o.lo);
        let (s, e) = Self::quick_two_sum(s, e + t);
        let (hi, lo) = Self::quick_two_sum(s, e + f);
        Self { hi, lo }
    }

    pub(crate) fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        let e = e + (self.hi * o.lo + self.lo * o.hi);
        let (hi, lo) = Self::quick_two_sum(p, e);
        Self { hi, lo }
    }

    pub(crate) fn div(self, o: Self) -> Self {
        let q1 = self.hi / o.hi;
        let r = self.add(o.mul(Self::from_f64(-q1)));
        let q2 = r.hi / o.hi;
        let r = r.add(o.mul(Self::from_f64(-q2)));
        let q3 = r.hi / o.hi;
        let (hi, lo) = Self::quick_two_sum(q1, q2);
        Self { hi, lo }.add(Self::from_f64(q3))
    }

    pub(crate) fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub(crate) fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    pub(crate) fn sub(self, o: Self) -> Self {
        self.add(o.neg())
    }

    pub(crate) fn scale(self, v: f64) -> Self {
        self.mul(Self::from_f64(v))
    }

    /// `(sin z, cos z)` to about 30 digits for moderate `|z|`.
    pub(crate) fn sin_cos(z: f64) -> (Self, Self) {
        const HALF_PI: DoubleDouble = DoubleDouble {
            hi: 1.570_796_326_794_896_6,
            lo: 6.123_233_995_736_766e-17,
        };
        let q = (z / HALF_PI.hi).round();
        let r = Self::from_f64(z).sub(HALF_PI.scale(q));
        let r2 = r.mul(r);
        // Taylor series on |r| <= π/4.
        let mut s = r;
        let mut c = Self::ONE;
        let mut ts = r;
        let mut tc = Self::ONE;
        for k in 1..30 {
            let kf = k as f64;
            ts = ts.mul(r2).div(Self::from_f64(-(2.0 * kf) * (2.0 * kf + 1.0)));
            tc = tc.mul(r2).div(Self::from_f64(-(2.0 * kf - 1.0) * (2.0 * kf)));
            s = s.add(ts);
            c = c.add(tc);
            if tc.hi.abs() < 1e-34 {
                break;
            }
        }
        match (q as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, s.neg()),
            2 => (s.neg(), c.neg()),
            _ => (c.neg(), s),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-16);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-15).abs() < 1e-30);
    }

    #[test]
    fn double_double_division_is_exact_to_32_digits() {
        let third = DoubleDouble::ONE.div(DoubleDouble::from_f64(3.0));
        let back = third.mul(DoubleDouble::from_f64(3.0)).add(DoubleDouble::from_f64(-1.0));
        assert!(back.to_f64().abs() < 1e-30);
    }

    #[test]
    fn double_double_sin_cos() {
        for &z in &[0.1, 1.0, 3.0, 7.5, 29.0, 101.3] {
            let (s, c) = DoubleDouble::sin_cos(z);
            assert!((s.to_f64() - z.sin()).abs() < 1e-15);
            assert!((c.to_f64() - z.cos()).abs() < 1e-15);
            let one = s.mul(s).add(c.mul(c)).sub(DoubleDouble::ONE);
            assert!(one.to_f64().abs() < 1e-30);
        }
        // sin(10) to 32 digits.
        let (s, _) = DoubleDouble::sin_cos(10.0);
        let want = DoubleDouble {
            hi: -0.544_021_110_889_369_8,
            lo: -3.894_989_866_822_355_7e-17,
        };
        assert!(s.sub(want).to_f64().abs() < 1e-31);
    }
}
