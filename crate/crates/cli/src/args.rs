//! Command-line grammar, config files and the merged run configuration.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use symtop::io::Format;
use symtop::spectrum::linear_grid;
use symtop::{HalfInt, TopConfig, TopKind};

/// A usage problem: bad flag value, bad config file, invalid parameters.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Parser, Debug)]
#[command(name = "symtop", version, about = "Spectra of the trigonometric and hyperbolic symmetric-top pendulum")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lowest eigenvalues over a grid of eta values.
    Spectrum(Common),
    /// Quasi-solvability conditions.
    Qs {
        #[command(subcommand)]
        action: QsAction,
    },
    /// Closed-form levels at every condition with n <= nmax.
    Algebraic(Common),
    /// Endpoint classes and per-sector normalizability.
    Classify(Common),
    /// Counting formula next to the enumerated count of distinct normalizable levels.
    Count(Common),
    /// Invariant suites.
    Verify {
        #[command(subcommand)]
        action: VerifyAction,
    },
    /// Write the four CSV datasets behind a figure.
    Figure {
        /// Figure id: 2, 3, 4, 5, 6 or 8.
        id: u32,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Worker threads; 0 uses every core.
        #[arg(long)]
        threads: Option<usize>,
    },
}

#[derive(Subcommand, Debug)]
pub enum QsAction {
    /// Table of (sector, n, eta, kappa).
    List(Common),
}

#[derive(Subcommand, Debug)]
pub enum VerifyAction {
    /// Run every suite; exits 3 if any check fails.
    All(Common),
}

/// Flags shared by the computational subcommands. Everything is optional so
/// that a config file can fill the gaps.
#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    /// Projection K on the body axis (integer or half-integer, `1/2` or `0.5`).
    #[arg(long = "K", allow_hyphen_values = true)]
    pub k: Option<String>,
    /// Projection M on the field axis.
    #[arg(long = "M", allow_hyphen_values = true)]
    pub m: Option<String>,
    /// Rotational constant (default 1).
    #[arg(long = "B", allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Asymmetry parameter (default 0).
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<f64>,
    /// Induced-dipole strength.
    #[arg(long, allow_hyphen_values = true)]
    pub zeta: Option<f64>,
    /// A value, `min:max:step`, or a comma-separated list.
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<String>,
    /// trig or hyper.
    #[arg(long)]
    pub kind: Option<String>,
    /// Angular cutoff of the trigonometric basis (default: automatic).
    #[arg(long)]
    pub jmax: Option<u32>,
    /// Size of the hyperbolic Galerkin basis (default 20).
    #[arg(long)]
    pub nbasis: Option<usize>,
    /// Largest polynomial degree for closed-form levels (default 3).
    #[arg(long)]
    pub nmax: Option<usize>,
    /// Eigenvalues per eta (default 10).
    #[arg(long)]
    pub count: Option<usize>,
    /// Report hyperbolic energies with the opposite sign.
    #[arg(long)]
    pub negate: bool,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    pub threads: Option<usize>,
    /// `key = value` file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// How η is sampled.
#[derive(Clone, Debug, PartialEq)]
pub enum EtaSpec {
    Range { min: f64, max: f64, step: f64 },
    List(Vec<f64>),
}

impl EtaSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            EtaSpec::Range { min, max, step } => linear_grid(*min, *max, *step),
            EtaSpec::List(v) => v.clone(),
        }
    }
}

/// Fully resolved parameters for one invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub top: TopConfig,
    pub eta: EtaSpec,
    pub kind: TopKind,
    pub jmax: Option<u32>,
    pub n_basis: usize,
    pub n_max: usize,
    pub count: usize,
    pub negate_hyper: bool,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub threads: usize,
}

const FILE_KEYS: [&str; 15] = [
    "K", "M", "B", "rho", "zeta", "eta", "kind", "jmax", "nbasis", "nmax", "count", "negate", "format", "out", "threads",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config_text(&text).map_err(|e| UsageError(format!("{}: {}", path.display(), e.0)))
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, UsageError> {
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim();
        if !FILE_KEYS.contains(&key) {
            return Err(UsageError(format!("line {}: unknown key '{key}'", lineno + 1)));
        }
        map.insert(key.to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn parse_f64(name: &str, s: &str) -> Result<f64, UsageError> {
    s.trim().parse::<f64>().map_err(|_| UsageError(format!("{name}: '{s}' is not a number")))
}

fn parse_typed<T: std::str::FromStr>(name: &str, s: &str) -> Result<T, UsageError> {
    s.trim().parse::<T>().map_err(|_| UsageError(format!("{name}: invalid value '{s}'")))
}

fn parse_half(name: &str, s: &str) -> Result<HalfInt, UsageError> {
    s.parse::<HalfInt>().map_err(|e| UsageError(format!("{name}: {e}")))
}

fn parse_bool(name: &str, s: &str) -> Result<bool, UsageError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(UsageError(format!("{name}: expected true or false, got '{s}'"))),
    }
}

/// `-40:40:0.5`, `1,2,3` or a single number.
pub fn parse_eta(s: &str) -> Result<EtaSpec, UsageError> {
    let s = s.trim();
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(UsageError(format!("eta range '{s}' must be min:max:step")));
        }
        let (min, max, step) = (parse_f64("eta", parts[0])?, parse_f64("eta", parts[1])?, parse_f64("eta", parts[2])?);
        if step.is_nan() || step <= 0.0 || max < min || !min.is_finite() || !max.is_finite() {
            return Err(UsageError(format!("eta range '{s}' needs min <= max and a positive step")));
        }
        return Ok(EtaSpec::Range { min, max, step });
    }
    let values = s.split(',').map(|v| parse_f64("eta", v)).collect::<Result<Vec<_>, _>>()?;
    if values.iter().any(|v| !v.is_finite()) {
        return Err(UsageError(format!("eta values must be finite, got '{s}'")));
    }
    Ok(EtaSpec::List(values))
}

impl Common {
    /// Merge flags over the config file over built-in defaults, then validate.
    pub fn resolve(&self) -> Result<RunConfig, UsageError> {
        let file = match &self.config {
            Some(p) => read_config_file(p)?,
            None => BTreeMap::new(),
        };
        let pick = |flag: Option<String>, key: &str| flag.or_else(|| file.get(key).cloned());

        let k = pick(self.k.clone(), "K").map(|s| parse_half("K", &s)).transpose()?.unwrap_or(HalfInt::ZERO);
        let m = pick(self.m.clone(), "M").map(|s| parse_half("M", &s)).transpose()?.unwrap_or(HalfInt::ZERO);
        let num = |flag: Option<f64>, key: &str, default: f64| -> Result<f64, UsageError> {
            match flag {
                Some(v) => Ok(v),
                None => file.get(key).map_or(Ok(default), |s| parse_f64(key, s)),
            }
        };
        let b = num(self.b, "B", 1.0)?;
        let rho = num(self.rho, "rho", 0.0)?;
        let zeta = num(self.zeta, "zeta", 0.0)?;
        let eta = match pick(self.eta.clone(), "eta") {
            Some(s) => parse_eta(&s)?,
            None => EtaSpec::List(vec![0.0]),
        };
        let kind = pick(self.kind.clone(), "kind")
            .map(|s| parse_typed::<TopKind>("kind", &s))
            .transpose()?
            .unwrap_or(TopKind::Trig);
        let opt = |flag: Option<usize>, key: &str| -> Result<Option<usize>, UsageError> {
            match flag {
                Some(v) => Ok(Some(v)),
                None => file.get(key).map(|s| parse_typed::<usize>(key, s)).transpose(),
            }
        };
        let jmax = match self.jmax {
            Some(v) => Some(v),
            None => file.get("jmax").map(|s| parse_typed::<u32>("jmax", s)).transpose()?,
        };
        let n_basis = opt(self.nbasis, "nbasis")?.unwrap_or(symtop::hyper::DEFAULT_N_BASIS);
        let n_max = opt(self.nmax, "nmax")?.unwrap_or(3);
        let count = opt(self.count, "count")?.unwrap_or(10);
        let threads = opt(self.threads, "threads")?.unwrap_or(0);
        let negate_hyper = self.negate || file.get("negate").map(|s| parse_bool("negate", s)).transpose()?.unwrap_or(false);
        let format = pick(self.format.clone(), "format")
            .map(|s| s.parse::<Format>().map_err(|e| UsageError(e.to_string())))
            .transpose()?;
        let out = self.out.clone().or_else(|| file.get("out").map(PathBuf::from));

        let first_eta = eta.values().first().copied().unwrap_or(0.0);
        let top = TopConfig::new(k, m, first_eta, zeta).with_b(b).with_rho(rho);
        top.validate().map_err(|e| UsageError(e.to_string()))?;
        if count == 0 {
            return Err(UsageError("count must be at least 1".into()));
        }
        if n_basis == 0 {
            return Err(UsageError("nbasis must be at least 1".into()));
        }
        Ok(RunConfig { top, eta, kind, jmax, n_basis, n_max, count, negate_hyper, format, out, threads })
    }
}
