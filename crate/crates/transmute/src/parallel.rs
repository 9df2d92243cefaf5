//! Thread pool setup and parallel versions of the expensive core loops.
//!
//! Every parallel map collects in input order, so results do not depend on
//! the number of threads.

use anyhow::{Context, Result};
use rayon::prelude::*;
use transmute_core::coeffs::{collocation_frequencies, fit_beta, unperturbed_term, BetaTable};
use transmute_core::error::Result as CoreResult;
use transmute_core::oracle::{regular_solution_at, ProblemSetup};
use transmute_core::spectral::GridMap;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "TRANSMUTE_THREADS";

/// A pool sized by `TRANSMUTE_THREADS` (rayon's default when unset).
pub fn build_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .with_context(|| format!("{THREADS_ENV} must be a positive integer, got {v:?}"))?;
        anyhow::ensure!(n >= 1, "{THREADS_ENV} must be at least 1");
        builder = builder.num_threads(n);
    }
    Ok(builder.build()?)
}

/// [`GridMap`] over the current rayon pool.
#[derive(Clone, Copy, Debug, Default)]
pub struct Rayon;

impl GridMap for Rayon {
    fn map(&self, points: &[f64], f: &(dyn Fn(f64) -> CoreResult<f64> + Sync)) -> CoreResult<Vec<f64>> {
        points.par_iter().map(|&p| f(p)).collect()
    }
}

/// `β_0..β_M` at `x`, with the direct solves spread over the pool.
pub fn compute_beta_par(setup: &ProblemSetup, x: f64, m: usize, freq_count: usize) -> CoreResult<BetaTable> {
    if !(x > 0.0) || x > setup.b * (1.0 + 1e-12) {
        return Err(transmute_core::error::Error::Domain {
            what: "x outside (0, b]",
            value: x,
        });
    }
    let omegas = collocation_frequencies(x, m, freq_count);
    let u: Vec<f64> = if setup.potential.is_zero() {
        omegas.iter().map(|&w| unperturbed_term(setup.l, w, x)).collect::<CoreResult<_>>()?
    } else {
        omegas
            .par_iter()
            .map(|&w| regular_solution_at(setup, w, x))
            .collect::<CoreResult<_>>()?
    };
    fit_beta(setup.l, x, m, &omegas, &u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use transmute_core::coeffs::{compute_beta, default_freq_count};
    use transmute_core::potential::Potential;

    #[test]
    fn parallel_beta_matches_serial() {
        let setup = ProblemSetup::new(1.0, 2.0, Potential::Polynomial(vec![0.5, 0.0, 1.0])).unwrap();
        let a = compute_beta_par(&setup, 2.0, 12, default_freq_count(12)).unwrap();
        let b = compute_beta(&setup, 2.0, 12, default_freq_count(12)).unwrap();
        assert_eq!(a, b);
        assert!(compute_beta_par(&setup, 3.0, 12, 400).is_err());
    }

    #[test]
    fn rayon_map_preserves_order() {
        let pts: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        let out = Rayon.map(&pts, &|p| Ok(p * 2.0)).unwrap();
        assert!(out.iter().enumerate().all(|(i, v)| *v == 2.0 * i as f64));
    }
}
