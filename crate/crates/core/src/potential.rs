//! Potentials `q(x)` on `[0, b]`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quadrature::GaussRule;

/// Declared continuity class of a potential. Diagnostic only.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Smoothness {
    /// `C^k`.
    Class(u32),
    /// `C^∞`.
    Smooth,
}

#[derive(Clone, Debug)]
pub enum Potential {
    Zero,
    /// Coefficients in ascending degree.
    Polynomial(Vec<f64>),
    Table(CubicSpline),
    Function(fn(f64) -> f64),
}

impl Potential {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Polynomial(c) => c.iter().rev().fold(0.0, |acc, &a| acc * x + a),
            Potential::Table(s) => s.eval(x),
            Potential::Function(f) => f(x),
        }
    }

    /// `∫_0^x q(s) ds`.
    pub fn integral(&self, x: f64) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Polynomial(c) => c
                .iter()
                .enumerate()
                .rev()
                .fold(0.0, |acc, (k, &a)| acc * x + a / (k + 1) as f64)
                * x,
            Potential::Table(s) => s.integral(x),
            Potential::Function(f) => GaussRule::legendre(64).integrate_panels(0.0, x, 8, f),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Potential::Zero => true,
            Potential::Polynomial(c) => c.iter().all(|&v| v == 0.0),
            _ => false,
        }
    }

    pub fn default_smoothness(&self) -> Smoothness {
        match self {
            Potential::Zero | Potential::Polynomial(_) => Smoothness::Smooth,
            Potential::Table(_) => Smoothness::Class(2),
            Potential::Function(_) => Smoothness::Class(0),
        }
    }
}

/// Natural cubic spline through tabulated `(x, q)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    /// Fails with [`Error::BadTableRow`] on the first row (0-based) whose
    /// abscissa is not strictly increasing or whose values are not finite.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::InvalidInput("spline needs at least two (x, q) rows"));
        }
        for i in 0..xs.len() {
            if !xs[i].is_finite() || !ys[i].is_finite() {
                return Err(Error::BadTableRow {
                    row: i,
                    reason: "non-finite value",
                });
            }
            if i > 0 && xs[i] <= xs[i - 1] {
                return Err(Error::BadTableRow {
                    row: i,
                    reason: "x not strictly increasing",
                });
            }
        }
        let n = xs.len();
        let mut second = vec![0.0; n];
        let mut u = vec![0.0; n];
        for i in 1..n - 1 {
            let sig = (xs[i] - xs[i - 1]) / (xs[i + 1] - xs[i - 1]);
            let p = sig * second[i - 1] + 2.0;
            second[i] = (sig - 1.0) / p;
            let d = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]) - (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]);
            u[i] = (6.0 * d / (xs[i + 1] - xs[i - 1]) - sig * u[i - 1]) / p;
        }
        second[n - 1] = 0.0;
        for k in (0..n - 1).rev() {
            second[k] = second[k] * second[k + 1] + u[k];
        }
        second[0] = 0.0;
        Ok(Self { xs, ys, second })
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.xs[0], self.xs[self.xs.len() - 1])
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.xs.len();
        match self.xs.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let a = (self.xs[i + 1] - x) / h;
        let b = (x - self.xs[i]) / h;
        a * self.ys[i]
            + b * self.ys[i + 1]
            + ((a * a * a - a) * self.second[i] + (b * b * b - b) * self.second[i + 1]) * h * h / 6.0
    }

    /// `∫_{x_0}^{x} s(t) dt`, exact per segment.
    pub fn integral(&self, x: f64) -> f64 {
        let rule = GaussRule::legendre(3);
        let mut acc = 0.0;
        let mut lo = self.xs[0];
        let last = self.segment(x);
        for i in 0..=last {
            let hi = if i == last { x } else { self.xs[i + 1] };
            acc += rule.integrate_on(lo, hi, |t| self.eval(t));
            lo = hi;
        }
        acc
    }
}
