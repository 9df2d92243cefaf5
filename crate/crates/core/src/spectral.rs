//! Dirichlet eigenvalues `u(ω, b) = 0` as zeros of `F(ω) = u_N(ω, b)`.
//!
//! The scan evaluates `F` on a uniform grid of step `π/(4b)`, four samples
//! per asymptotic eigenvalue gap, and refines every sign change with
//! Brent's method. Grid evaluation goes through [`GridMap`] so callers with
//! a thread pool can evaluate the samples in parallel.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::coeffs::{compute_beta, default_freq_count, default_m, BetaTable};
use crate::error::{Error, Result};
use crate::oracle::ProblemSetup;
use crate::roots::{brent, sign_changes, Bracket};
use crate::solution::{u_n, SolutionEvaluator};

/// Bracket width at which refinement stops.
pub const ROOT_XTOL: f64 = 1e-12;

/// Relative deviation of a gap from `π/b` that raises the missed-root flag.
pub const SPACING_TOLERANCE: f64 = 0.5;

/// Consecutive non-decaying steps that mark the noise floor of `β_k`.
const STALL_RUN: usize = 3;
const STALL_RATIO: f64 = 0.9;

/// Truncation order for `u_N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    /// Pick `N` from the decay of `β_k` (see [`choose_n`]).
    Auto,
    Fixed(usize),
}

/// Evaluation strategy for a batch of independent samples.
pub trait GridMap {
    fn map(&self, points: &[f64], f: &(dyn Fn(f64) -> Result<f64> + Sync)) -> Result<Vec<f64>>;
}

/// In-order serial evaluation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Serial;

impl GridMap for Serial {
    fn map(&self, points: &[f64], f: &(dyn Fn(f64) -> Result<f64> + Sync)) -> Result<Vec<f64>> {
        points.iter().map(|&p| f(p)).collect()
    }
}

/// Comparison of one eigenvalue with a supplied reference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReferenceError {
    /// 1-based eigenvalue index.
    pub n: usize,
    pub reference: f64,
    pub abs_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumReport {
    /// `ω_1 < ω_2 < …`.
    pub eigenvalues: Vec<f64>,
    /// Scan bracket `(lo, hi)` of each root, with `F(lo) F(hi) < 0`.
    pub brackets: Vec<(f64, f64)>,
    /// `|F(ω_n)|`.
    pub residuals: Vec<f64>,
    /// `max(|F(lo)|, |F(hi)|)` per bracket, the scale for the residuals.
    pub bracket_max: Vec<f64>,
    pub n_used: usize,
    pub reference_errors: Option<Vec<ReferenceError>>,
    /// 1-based indices `n` whose gap `ω_{n+1} - ω_n` is off `π/b` by more
    /// than [`SPACING_TOLERANCE`].
    pub spacing_warnings: Vec<usize>,
}

impl SpectrumReport {
    pub fn missed_root_warning(&self) -> bool {
        !self.spacing_warnings.is_empty()
    }

    /// Record `|ω_n - reference|` for 1-based `(n, reference)` pairs; pairs
    /// past the computed range are skipped.
    pub fn attach_references(&mut self, references: &[(usize, f64)]) {
        let errs = references
            .iter()
            .filter(|(n, _)| *n >= 1 && *n <= self.eigenvalues.len())
            .map(|&(n, reference)| ReferenceError {
                n,
                reference,
                abs_error: (self.eigenvalues[n - 1] - reference).abs(),
            })
            .collect();
        self.reference_errors = Some(errs);
    }

    /// Largest `|Δω_n|` over references with `n` in `range`.
    pub fn max_reference_error(&self, range: core::ops::RangeInclusive<usize>) -> Option<f64> {
        self.reference_errors
            .as_ref()?
            .iter()
            .filter(|e| range.contains(&e.n))
            .map(|e| e.abs_error)
            .reduce(f64::max)
    }
}

/// Index at which the decay of `|β_k|` stalls.
///
/// Works on the envelope `e_k = max_{j ≥ k} |β_j|`, so that isolated sign
/// changes of `β_k` do not read as a stall: the first `k` with
/// `e_{k+1}/e_k ≥ 0.9` for three consecutive steps, or `M`.
pub fn decay_stall_index(beta: &BetaTable) -> Result<usize> {
    let m = beta.m();
    if beta.beta.len() < 6 {
        return Err(Error::InvalidInput("choose_N needs M >= 5"));
    }
    let mut env: Vec<f64> = beta.beta.iter().map(|b| b.abs()).collect();
    for k in (0..m).rev() {
        env[k] = env[k].max(env[k + 1]);
    }
    let mut run = 0;
    for k in 0..m {
        let ratio = if env[k] == 0.0 { 1.0 } else { env[k + 1] / env[k] };
        if ratio >= STALL_RATIO {
            run += 1;
            if run == STALL_RUN {
                return Ok(k + 1 - STALL_RUN);
            }
        } else {
            run = 0;
        }
    }
    Ok(m)
}

/// Truncation `N` for `u_N`: the stall index minus `l + 1`, since `u_N`
/// uses `β` up to index `N + l + 1`.
pub fn choose_n(beta: &BetaTable) -> Result<usize> {
    let lift = beta.l.max(0.0) as usize + 1;
    Ok(decay_stall_index(beta)?.saturating_sub(lift))
}

/// Reference truncation `min(2N + 20, M - l - 1)` used as the proxy for the
/// exact kernel in `ε_N`.
pub fn reference_truncation(n: usize, l: usize, m: usize) -> usize {
    (2 * n + 20).min(m.saturating_sub(l + 1)).max(n)
}

/// Build a `u_N` evaluator at `x = b` with `β` from the collocation fit.
pub fn evaluator_for(setup: &ProblemSetup, truncation: Truncation) -> Result<SolutionEvaluator> {
    if setup.integer_l().is_none() {
        return Err(Error::InvalidInput("the spectral solver needs integer l"));
    }
    let m = default_m(setup.l);
    let table = compute_beta(setup, setup.b, m, default_freq_count(m))?;
    evaluator_from_table(table, truncation)
}

/// A `u_N` evaluator from a fitted table.
pub fn evaluator_from_table(table: BetaTable, truncation: Truncation) -> Result<SolutionEvaluator> {
    let n = match truncation {
        Truncation::Auto => choose_n(&table)?,
        Truncation::Fixed(n) => n,
    };
    SolutionEvaluator::new(table, n)
}

/// First `count` Dirichlet eigenvalues with `β` fitted at `x = b`.
pub fn dirichlet_eigenvalues(setup: &ProblemSetup, count: usize, truncation: Truncation) -> Result<SpectrumReport> {
    let ev = evaluator_for(setup, truncation)?;
    dirichlet_eigenvalues_from(&ev, count, &Serial)
}

/// First `count` zeros of `F(ω) = u_N(ω, b)` for a ready evaluator.
pub fn dirichlet_eigenvalues_from<G: GridMap>(ev: &SolutionEvaluator, count: usize, grid: &G) -> Result<SpectrumReport> {
    let b = ev.x();
    let f = |w: f64| u_n(ev, w, b);
    let mut report = SpectrumReport {
        eigenvalues: Vec::with_capacity(count),
        brackets: Vec::with_capacity(count),
        residuals: Vec::with_capacity(count),
        bracket_max: Vec::with_capacity(count),
        n_used: ev.n,
        reference_errors: None,
        spacing_warnings: Vec::new(),
    };
    if count == 0 {
        return Ok(report);
    }
    let step = PI / (4.0 * b);
    // F ~ ω^{l+1} near 0, so start just off the origin.
    let start = 1e-3 * step;
    let mut found: Vec<Bracket> = Vec::new();
    let mut next_j = 1usize;
    let mut last: (f64, f64) = (start, f(start)?);
    while found.len() < count {
        // Grow the scan in chunks sized by the roots still missing.
        let chunk = 4 * (count - found.len()) + 8;
        let points: Vec<f64> = (next_j..next_j + chunk).map(|j| j as f64 * step).collect();
        next_j += chunk;
        let values = grid.map(&points, &f)?;
        let mut xs = Vec::with_capacity(chunk + 1);
        let mut fs = Vec::with_capacity(chunk + 1);
        xs.push(last.0);
        fs.push(last.1);
        xs.extend_from_slice(&points);
        fs.extend_from_slice(&values);
        for br in sign_changes(&xs, &fs) {
            if found.len() < count {
                found.push(br);
            }
        }
        if let Some(i) = fs.iter().rposition(|v| *v != 0.0) {
            last = (xs[i], fs[i]);
        }
        if next_j as f64 * step > 1e6 {
            return Err(Error::InvalidInput("spectral scan ran past omega = 1e6"));
        }
    }
    let roots = grid.map(
        &(0..found.len()).map(|i| i as f64).collect::<Vec<_>>(),
        &|i| {
            let br = found[i as usize];
            brent(f, br.lo, br.hi, br.f_lo, br.f_hi, ROOT_XTOL)
        },
    )?;
    for (br, root) in found.iter().zip(roots) {
        report.eigenvalues.push(root);
        report.brackets.push((br.lo, br.hi));
        report.residuals.push(f(root)?.abs());
        report.bracket_max.push(br.f_lo.abs().max(br.f_hi.abs()));
    }
    let gap = PI / b;
    for (i, pair) in report.eigenvalues.windows(2).enumerate() {
        if ((pair[1] - pair[0]) - gap).abs() > SPACING_TOLERANCE * gap {
            report.spacing_warnings.push(i + 1);
        }
    }
    Ok(report)
}
