//! The subcommands. Each writes its CSV and a JSON summary into the output
//! directory and returns the process exit code.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::json;
use transmute_core::coeffs::{BetaTable, SINGULAR_CUT};
use transmute_core::kernel::{kernel_k_integer, kernel_k_real, KernelMode, KernelSeries};
use transmute_core::ode::OdeOptions;
use transmute_core::oracle::dirichlet_eigenvalues_ode;
use transmute_core::spectral::{
    choose_n, dirichlet_eigenvalues_from, evaluator_from_table, Truncation, ROOT_XTOL,
    SPACING_TOLERANCE,
};

use crate::config::RunConfig;
use crate::parallel::{compute_beta_par, Rayon};
use crate::validate::{perturb, run_suite, Status, SuiteInput, TOLERANCES};

/// Exit codes.
pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;

/// Dirichlet eigenvalues for `q(x) = x²`, `l = 1`, `b = π`, computed with
/// `N = 13` by the recurrent coefficient procedure.
pub const HARMONIC_L1_EIGENVALUES: [(usize, f64); 8] = [
    (1, 2.243_666_511_207_41),
    (2, 3.090_306_007_928_14),
    (5, 5.781_887_007_213_72),
    (10, 10.647_252_993_401_3),
    (20, 20.575_332_935_745_6),
    (50, 50.530_568_958_682_5),
    (100, 100.515_359_633_269),
    (200, 200.507_698_855_317),
];

fn core<T>(r: transmute_core::error::Result<T>) -> Result<T> {
    r.map_err(|e| anyhow::anyhow!("{e}"))
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn create_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))
}

fn fit_tolerances() -> serde_json::Value {
    let ode = OdeOptions::default();
    json!({
        "singular_value_cut": SINGULAR_CUT,
        "ode_rtol": ode.rtol,
        "ode_stages": ode.stages,
    })
}

fn fit(cfg: &RunConfig, x: f64) -> Result<BetaTable> {
    let setup = cfg.setup()?;
    core(compute_beta_par(&setup, x, cfg.m_value(), cfg.freq_count_value()))
        .with_context(|| format!("beta fit at x = {x} failed"))
}

fn fit_summary(t: &BetaTable) -> serde_json::Value {
    let max = t.max_abs();
    json!({
        "x": t.x,
        "M": t.m(),
        "freq_count": t.freq_count,
        "rank": t.rank,
        "fit_residual": t.fit_residual,
        "sum_beta": t.sum_beta,
        "max_abs_beta": max,
        "sum_beta_ratio": if max == 0.0 { 0.0 } else { t.sum_beta.abs() / max },
    })
}

/// `beta.csv` with columns `x,k,beta`, and `beta.json`.
pub fn cmd_beta(cfg: &RunConfig) -> Result<u8> {
    create_out(&cfg.out)?;
    let tables: Vec<BetaTable> = cfg.beta_points().iter().map(|&x| fit(cfg, x)).collect::<Result<_>>()?;
    let path = cfg.out.join("beta.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["x", "k", "beta"])?;
    for t in &tables {
        for (k, b) in t.beta.iter().enumerate() {
            w.write_record([num(t.x), k.to_string(), num(*b)])?;
        }
    }
    w.flush()?;
    write_json(
        &cfg.out.join("beta.json"),
        &json!({
            "command": "beta",
            "config": cfg,
            "fits": tables.iter().map(fit_summary).collect::<Vec<_>>(),
            "tolerances": fit_tolerances(),
            "files": ["beta.csv"],
        }),
    )?;
    Ok(EXIT_OK)
}

/// Series used for the kernel surface at one `x`.
fn kernel_series(cfg: &RunConfig, table: &BetaTable) -> Result<KernelSeries> {
    let trunc = cfg.n.to_truncation()?;
    let series = if cfg.problem.l >= 0.0 && cfg.problem.l.fract() == 0.0 {
        let n = match trunc {
            Truncation::Auto => core(choose_n(table))?,
            Truncation::Fixed(n) => n,
        };
        core(KernelSeries::integer(table, n))?
    } else {
        let n = match trunc {
            Truncation::Auto => table.m(),
            Truncation::Fixed(n) => n,
        };
        core(core(KernelSeries::real(table, n))?.with_t_max_fraction(cfg.kernel.t_max_fraction))?
    };
    Ok(series)
}

/// `kernel.csv` with columns `x,t,K,flag`, and `kernel.json`.
///
/// `flag` is `ok`, or `near_diagonal` (with `K` empty) for non-integer `l`
/// beyond the cutoff `t_max_fraction·x`.
pub fn cmd_kernel(cfg: &RunConfig) -> Result<u8> {
    create_out(&cfg.out)?;
    let setup = cfg.setup()?;
    let path = cfg.out.join("kernel.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["x", "t", "K", "flag"])?;
    let mut summaries = Vec::new();
    for x in cfg.kernel_points() {
        let table = fit(cfg, x)?;
        let series = kernel_series(cfg, &table)?;
        let nt = cfg.kernel.t_points;
        let mut flagged = 0usize;
        let mut max_abs = 0.0f64;
        for i in 0..nt {
            let t = if i + 1 == nt { x } else { x * i as f64 / (nt - 1) as f64 };
            let value = match series.mode {
                KernelMode::IntegerL => Some(core(kernel_k_integer(&series, t))?),
                KernelMode::RealL => match kernel_k_real(&series, t) {
                    Ok(v) => Some(v),
                    Err(transmute_core::error::Error::NearDiagonal { .. }) => None,
                    Err(e) => return Err(anyhow::anyhow!("{e}")),
                },
            };
            match value {
                Some(v) => {
                    max_abs = max_abs.max(v.abs());
                    w.write_record([num(x), num(t), num(v), "ok".into()])?;
                }
                None => {
                    flagged += 1;
                    w.write_record([num(x), num(t), String::new(), "near_diagonal".into()])?;
                }
            }
        }
        summaries.push(json!({
            "x": x,
            "mode": match series.mode { KernelMode::IntegerL => "integer_l", KernelMode::RealL => "real_l" },
            "N": series.n,
            "t_points": nt,
            "flagged_rows": flagged,
            "max_abs_K": max_abs,
            "half_integral_q": setup.goursat_value(x),
            "fit": fit_summary(&table),
        }));
    }
    w.flush()?;
    write_json(
        &cfg.out.join("kernel.json"),
        &json!({
            "command": "kernel",
            "config": cfg,
            "surfaces": summaries,
            "tolerances": {
                "fit": fit_tolerances(),
                "t_max_fraction": cfg.kernel.t_max_fraction,
            },
            "files": ["kernel.csv"],
        }),
    )?;
    Ok(EXIT_OK)
}

fn read_references(spec: &str, cfg: &RunConfig) -> Result<Vec<(usize, f64)>> {
    match spec {
        "harmonic" => Ok(HARMONIC_L1_EIGENVALUES.to_vec()),
        "ode" => {
            let setup = cfg.setup()?;
            let roots = core(dirichlet_eigenvalues_ode(&setup, cfg.spectrum.count, 1e-13))?;
            Ok(roots.into_iter().enumerate().map(|(i, w)| (i + 1, w)).collect())
        }
        path => {
            let path = PathBuf::from(path);
            let mut rdr = csv::ReaderBuilder::new()
                .trim(csv::Trim::All)
                .from_path(&path)
                .with_context(|| format!("cannot open reference file {}", path.display()))?;
            let mut out = Vec::new();
            for (i, rec) in rdr.records().enumerate() {
                let row = i + 2;
                let rec = rec.with_context(|| format!("reference row {row}: unreadable"))?;
                anyhow::ensure!(rec.len() >= 2, "reference row {row}: expected columns n,omega");
                let n: usize = rec[0].parse().with_context(|| format!("reference row {row}: bad n"))?;
                let w: f64 = rec[1].parse().with_context(|| format!("reference row {row}: bad omega"))?;
                out.push((n, w));
            }
            Ok(out)
        }
    }
}

/// `spectrum.csv` with columns `n,omega,residual,reference,abs_error`, and
/// `spectrum.json`. Exit 1 on a missed-root warning when references were
/// supplied.
pub fn cmd_spectrum(cfg: &RunConfig) -> Result<u8> {
    create_out(&cfg.out)?;
    let setup = cfg.setup()?;
    anyhow::ensure!(setup.integer_l().is_some(), "the spectrum command needs integer l (got l = {})", setup.l);
    let references = cfg
        .spectrum
        .reference
        .as_deref()
        .map(|r| read_references(r, cfg))
        .transpose()?;
    let count = cfg.spectrum.count;
    let (report, table) = if count == 0 {
        (None, None)
    } else {
        let table = fit(cfg, setup.b)?;
        let ev = core(evaluator_from_table(table.clone(), cfg.n.to_truncation()?))?;
        let mut report = core(dirichlet_eigenvalues_from(&ev, count, &Rayon))?;
        if let Some(refs) = &references {
            report.attach_references(refs);
        }
        (Some(report), Some(table))
    };

    let path = cfg.out.join("spectrum.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["n", "omega", "residual", "reference", "abs_error"])?;
    if let Some(r) = &report {
        for (i, (omega, res)) in r.eigenvalues.iter().zip(&r.residuals).enumerate() {
            let n = i + 1;
            let reference = r
                .reference_errors
                .as_ref()
                .and_then(|v| v.iter().find(|e| e.n == n).copied());
            let (rf, ae) = match reference {
                Some(e) => (num(e.reference), num(e.abs_error)),
                None => (String::new(), String::new()),
            };
            w.write_record([n.to_string(), num(*omega), num(*res), rf, ae])?;
        }
    }
    w.flush()?;

    let missed = report.as_ref().is_some_and(|r| r.missed_root_warning());
    let code = if missed && references.is_some() { EXIT_FAILED } else { EXIT_OK };
    write_json(
        &cfg.out.join("spectrum.json"),
        &json!({
            "command": "spectrum",
            "config": cfg,
            "count": count,
            "N_used": report.as_ref().map(|r| r.n_used),
            "fit": table.as_ref().map(fit_summary),
            "max_residual_ratio": report.as_ref().map(|r| r
                .residuals
                .iter()
                .zip(&r.bracket_max)
                .map(|(a, b)| if *b == 0.0 { 0.0 } else { a / b })
                .fold(0.0, f64::max)),
            "max_abs_error": report.as_ref().and_then(|r| r.max_reference_error(1..=usize::MAX)),
            "missed_root_warning": missed,
            "spacing_warnings": report.as_ref().map(|r| r.spacing_warnings.clone()).unwrap_or_default(),
            "tolerances": {
                "fit": fit_tolerances(),
                "root_xtol": ROOT_XTOL,
                "spacing_tolerance": SPACING_TOLERANCE,
                "scan_step": std::f64::consts::PI / (4.0 * setup.b),
            },
            "files": ["spectrum.csv"],
            "exit_code": code,
        }),
    )?;
    if missed {
        eprintln!("warning: eigenvalue spacing deviates from pi/b; a root may have been missed");
    }
    Ok(code)
}

/// `validate.json` plus one line per check on stdout. Exit 1 if any check
/// fails.
pub fn cmd_validate(cfg: &RunConfig) -> Result<u8> {
    create_out(&cfg.out)?;
    let setup = cfg.setup()?;
    let mut table = fit(cfg, setup.b)?;
    perturb(&mut table, cfg.validate.perturb_beta);
    let checks = run_suite(&SuiteInput {
        setup: &setup,
        table: &table,
        truncation: cfg.n.to_truncation()?,
        omegas: &cfg.validate.omegas,
        recurrence_samples: cfg.validate.recurrence_samples,
        seed: cfg.seed,
    });
    let passed = checks.iter().all(|c| c.status != Status::Fail);
    let mut stdout = std::io::stdout().lock();
    for c in &checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        writeln!(stdout, "{tag} {:<14} {:e} (tol {:e}) {}", c.name, c.value, c.tolerance, c.detail)?;
    }
    write_json(
        &cfg.out.join("validate.json"),
        &json!({
            "command": "validate",
            "config": cfg,
            "passed": passed,
            "checks": checks,
            "fit": fit_summary(&table),
            "tolerances": { "checks": TOLERANCES, "fit": fit_tolerances() },
        }),
    )?;
    Ok(if passed { EXIT_OK } else { EXIT_FAILED })
}
