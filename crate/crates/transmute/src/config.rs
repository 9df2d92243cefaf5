//! Run configuration: a JSON file, optionally overridden by command-line
//! flags.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use transmute_core::oracle::ProblemSetup;
use transmute_core::potential::{CubicSpline, Potential};
use transmute_core::spectral::Truncation;

/// Potential descriptor as it appears in config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    /// Coefficients in ascending degree.
    Polynomial { coefficients: Vec<f64> },
    /// Two-column CSV `x,q` with a header row, interpolated by a natural
    /// cubic spline. Relative paths resolve against the working directory.
    Table { path: PathBuf },
}

impl PotentialSpec {
    /// Parse the flag form: `zero`, `poly:c0,c1,...` or `table:PATH`.
    pub fn parse_flag(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "zero" {
            return Ok(Self::Zero);
        }
        if let Some(rest) = s.strip_prefix("poly:") {
            let coefficients = rest
                .split(',')
                .map(|c| c.trim().parse::<f64>().with_context(|| format!("bad polynomial coefficient {c:?}")))
                .collect::<Result<Vec<_>>>()?;
            return Ok(Self::Polynomial { coefficients });
        }
        if let Some(rest) = s.strip_prefix("table:") {
            return Ok(Self::Table { path: rest.into() });
        }
        bail!("unknown potential {s:?}; expected zero, poly:c0,c1,... or table:PATH")
    }

    pub fn to_potential(&self) -> Result<Potential> {
        Ok(match self {
            Self::Zero => Potential::Zero,
            Self::Polynomial { coefficients } => {
                ensure!(
                    coefficients.iter().all(|c| c.is_finite()),
                    "polynomial coefficients must be finite"
                );
                Potential::Polynomial(coefficients.clone())
            }
            Self::Table { path } => Potential::Table(read_table(path)?),
        })
    }
}

/// Read an `x,q` table. Rows are numbered from 1, counting the header.
pub fn read_table(path: &Path) -> Result<CubicSpline> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open potential table {}", path.display()))?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 2;
        let rec = rec.with_context(|| format!("potential table row {row}: unreadable"))?;
        ensure!(rec.len() == 2, "potential table row {row}: expected 2 columns, found {}", rec.len());
        let x: f64 = rec[0]
            .parse()
            .with_context(|| format!("potential table row {row}: x = {:?} is not a number", &rec[0]))?;
        let q: f64 = rec[1]
            .parse()
            .with_context(|| format!("potential table row {row}: q = {:?} is not a number", &rec[1]))?;
        xs.push(x);
        ys.push(q);
    }
    CubicSpline::new(xs, ys).map_err(|e| match e {
        transmute_core::error::Error::BadTableRow { row, reason } => {
            anyhow::anyhow!("potential table row {}: {reason}", row + 2)
        }
        other => anyhow::anyhow!("potential table {}: {other}", path.display()),
    })
}

/// `"auto"` or a fixed truncation order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TruncationSpec {
    Fixed(usize),
    Named(String),
}

impl Default for TruncationSpec {
    fn default() -> Self {
        Self::Named("auto".into())
    }
}

impl TruncationSpec {
    pub fn parse_flag(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Self::default());
        }
        Ok(Self::Fixed(s.parse().with_context(|| format!("--N expects an integer or auto, got {s:?}"))?))
    }

    pub fn to_truncation(&self) -> Result<Truncation> {
        match self {
            Self::Fixed(n) => Ok(Truncation::Fixed(*n)),
            Self::Named(s) if s == "auto" => Ok(Truncation::Auto),
            Self::Named(s) => bail!("N must be an integer or \"auto\", got {s:?}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProblemSpec {
    pub l: f64,
    pub b: f64,
    pub potential: PotentialSpec,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        Self {
            l: 1.0,
            b: PI,
            potential: PotentialSpec::Polynomial {
                coefficients: vec![0.0, 0.0, 1.0],
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct BetaSection {
    /// Points `x` at which to fit `β`; empty means `[b]`.
    pub x_points: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KernelSection {
    /// Points `x` of the surface; empty means `[b]`.
    pub x_points: Vec<f64>,
    /// Samples of `t` on `[0, x]`, endpoints included.
    pub t_points: usize,
    /// Near-diagonal cutoff for non-integer `l`.
    pub t_max_fraction: f64,
}

impl Default for KernelSection {
    fn default() -> Self {
        Self {
            x_points: Vec::new(),
            t_points: 101,
            t_max_fraction: transmute_core::kernel::DEFAULT_T_MAX_FRACTION,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub count: usize,
    /// `harmonic`, `ode`, or the path of an `n,omega` CSV.
    pub reference: Option<String>,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        Self {
            count: 10,
            reference: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateSection {
    /// Added to `β_{l+1}` (scaled by `max(1, max|β|)`) before the checks;
    /// fault injection for the suite itself.
    pub perturb_beta: f64,
    /// Random `(ω, x, k, m)` samples for the recurrence check.
    pub recurrence_samples: usize,
    /// Frequencies for the transmutation check.
    pub omegas: Vec<f64>,
}

impl Default for ValidateSection {
    fn default() -> Self {
        Self {
            perturb_beta: 0.0,
            recurrence_samples: 100,
            omegas: vec![1.0, 5.0, 10.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    /// Truncation `M` of the `β` fit; `None` picks the default for `l`.
    #[serde(rename = "M")]
    pub m: Option<usize>,
    #[serde(rename = "N")]
    pub n: TruncationSpec,
    /// Collocation frequencies; `None` means `16(M+1)`.
    pub freq_count: Option<usize>,
    pub beta: BetaSection,
    pub kernel: KernelSection,
    pub spectrum: SpectrumSection,
    pub validate: ValidateSection,
    pub out: PathBuf,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemSpec::default(),
            m: None,
            n: TruncationSpec::default(),
            freq_count: None,
            beta: BetaSection::default(),
            kernel: KernelSection::default(),
            spectrum: SpectrumSection::default(),
            validate: ValidateSection::default(),
            out: PathBuf::from("out"),
            seed: 0,
        }
    }
}

/// Flag values that override the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub l: Option<f64>,
    pub b: Option<f64>,
    pub potential: Option<String>,
    pub count: Option<usize>,
    pub n: Option<String>,
    pub m: Option<usize>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub perturb_beta: Option<f64>,
    pub reference: Option<String>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).context("invalid config")?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        if let Some(v) = o.l {
            self.problem.l = v;
        }
        if let Some(v) = o.b {
            self.problem.b = v;
        }
        if let Some(p) = &o.potential {
            self.problem.potential = PotentialSpec::parse_flag(p)?;
        }
        if let Some(v) = o.count {
            self.spectrum.count = v;
        }
        if let Some(v) = &o.n {
            self.n = TruncationSpec::parse_flag(v)?;
        }
        if let Some(v) = o.m {
            self.m = Some(v);
        }
        if let Some(v) = &o.out {
            self.out = v.clone();
        }
        if let Some(v) = o.seed {
            self.seed = v;
        }
        if let Some(v) = o.perturb_beta {
            self.validate.perturb_beta = v;
        }
        if let Some(v) = &o.reference {
            self.spectrum.reference = Some(v.clone());
        }
        Ok(())
    }

    /// Range checks on every numeric field.
    pub fn check(&self) -> Result<()> {
        let p = &self.problem;
        ensure!(p.l.is_finite() && p.l >= -0.5, "l must be at least -1/2, got {}", p.l);
        ensure!(p.b.is_finite() && p.b > 0.0, "b must be positive, got {}", p.b);
        let m = self.m_value();
        ensure!((5..=400).contains(&m), "M must lie in [5, 400], got {m}");
        let fc = self.freq_count_value();
        ensure!(fc >= 2 * (m + 1), "freq_count must be at least 2(M+1) = {}, got {fc}", 2 * (m + 1));
        self.n.to_truncation()?;
        for &x in self.beta.x_points.iter().chain(&self.kernel.x_points) {
            ensure!(x > 0.0 && x <= p.b, "x = {x} outside (0, b]");
        }
        ensure!(self.kernel.t_points >= 2, "kernel.t_points must be at least 2");
        ensure!(
            self.kernel.t_max_fraction > 0.0 && self.kernel.t_max_fraction <= 1.0,
            "kernel.t_max_fraction must lie in (0, 1]"
        );
        ensure!(self.spectrum.count <= 100_000, "spectrum.count above 100000");
        ensure!(self.validate.perturb_beta.is_finite(), "perturb_beta must be finite");
        ensure!(
            self.validate.omegas.iter().all(|w| w.is_finite() && *w > 0.0),
            "validate.omegas must be positive"
        );
        Ok(())
    }

    pub fn m_value(&self) -> usize {
        self.m.unwrap_or_else(|| transmute_core::coeffs::default_m(self.problem.l))
    }

    pub fn freq_count_value(&self) -> usize {
        self.freq_count
            .unwrap_or_else(|| transmute_core::coeffs::default_freq_count(self.m_value()))
    }

    pub fn setup(&self) -> Result<ProblemSetup> {
        let potential = self.problem.potential.to_potential()?;
        if let Potential::Table(s) = &potential {
            let (lo, hi) = s.domain();
            ensure!(
                lo <= 0.0 && hi >= self.problem.b,
                "potential table covers [{lo}, {hi}] but must cover [0, b] = [0, {}]",
                self.problem.b
            );
        }
        ProblemSetup::new(self.problem.l, self.problem.b, potential).map_err(|e| anyhow::anyhow!("{e}"))
    }

    pub fn beta_points(&self) -> Vec<f64> {
        points_or_b(&self.beta.x_points, self.problem.b)
    }

    pub fn kernel_points(&self) -> Vec<f64> {
        points_or_b(&self.kernel.x_points, self.problem.b)
    }
}

fn points_or_b(points: &[f64], b: f64) -> Vec<f64> {
    if points.is_empty() {
        vec![b]
    } else {
        points.to_vec()
    }
}
