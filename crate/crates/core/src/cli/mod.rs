//! Batch front end: configuration resolution and command dispatch.
//!
//! Configuration comes from an optional flat `key = value` file overridden
//! by command-line flags. Strings may be quoted, lists are comma-separated,
//! `#` starts a comment. Unknown keys are errors.

mod artifacts;
mod run;

pub use artifacts::{boundary_polyline, write_config_echo, BOUNDARY_HEADER};
pub use run::{run, ExitStatus};

use crate::domain::{build_grid, Domain, Grid, MaskedDomain};
use crate::error::{Error, Result};
use crate::point::Point;
use crate::solver::{InitialPoint, SolverConfig};
use clap::{Args, Parser, Subcommand};
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Keys accepted in config files, in the order they are echoed.
pub const KEYS: [&str; 13] = [
    "domain", "mask_size", "n", "mu", "lambda", "lambdas", "mus", "max_iters", "tol_patch", "tol_x",
    "x0", "out", "input",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Euler,
    Verify,
    SweepMu,
    SweepLambda,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Euler => "euler",
            Command::Verify => "verify",
            Command::SweepMu => "sweep-mu",
            Command::SweepLambda => "sweep-lambda",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    Disk,
    Mask(PathBuf),
}

impl DomainSpec {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "disk" => Ok(DomainSpec::Disk),
            _ => match s.strip_prefix("mask:") {
                Some(p) if !p.is_empty() => Ok(DomainSpec::Mask(PathBuf::from(p))),
                _ => Err(Error::config("domain", format!("expected \"disk\" or \"mask:<path>\", got {s:?}"))),
            },
        }
    }

    fn render(&self) -> String {
        match self {
            DomainSpec::Disk => "disk".into(),
            DomainSpec::Mask(p) => format!("mask:{}", p.display()),
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub domain: DomainSpec,
    /// Length of the longer mask axis in domain units.
    pub mask_size: f64,
    pub n: usize,
    pub mu: Option<f64>,
    pub lambda: Option<f64>,
    pub lambdas: Vec<f64>,
    pub mus: Vec<f64>,
    pub max_iters: usize,
    pub tol_patch: f64,
    pub tol_x: f64,
    pub x0: Option<Point>,
    pub out: PathBuf,
    pub input: Option<PathBuf>,
}

impl RunConfig {
    pub fn build_domain(&self) -> Result<Domain> {
        match &self.domain {
            DomainSpec::Disk => Ok(Domain::unit_disk()),
            DomainSpec::Mask(p) => Ok(Domain::Masked(MaskedDomain::load(p, self.mask_size)?)),
        }
    }

    pub fn build_grid(&self) -> Result<Arc<Grid>> {
        build_grid(Arc::new(self.build_domain()?), self.n)
    }

    /// Solver settings for a given `μ` (and optional `λ`).
    pub fn solver(&self, mu: f64, lambda: Option<f64>) -> SolverConfig {
        SolverConfig {
            mu,
            lambda,
            max_iters: self.max_iters,
            tol_patch: self.tol_patch,
            tol_x: self.tol_x,
            x0: self.x0.map_or(InitialPoint::ArgminRobin, InitialPoint::At),
        }
    }

    fn require_mu(&self) -> Result<f64> {
        self.mu.ok_or_else(|| Error::config("mu", "required by this command"))
    }

    /// The resolved values, one `key = value` line each, in [`KEYS`] order;
    /// unset optional keys are omitted.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let list = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
        let mut out = vec![
            ("domain", format!("\"{}\"", self.domain.render())),
            ("mask_size", self.mask_size.to_string()),
            ("n", self.n.to_string()),
        ];
        if let Some(mu) = self.mu {
            out.push(("mu", mu.to_string()));
        }
        if let Some(l) = self.lambda {
            out.push(("lambda", l.to_string()));
        }
        if !self.lambdas.is_empty() {
            out.push(("lambdas", list(&self.lambdas)));
        }
        if !self.mus.is_empty() {
            out.push(("mus", list(&self.mus)));
        }
        out.push(("max_iters", self.max_iters.to_string()));
        out.push(("tol_patch", self.tol_patch.to_string()));
        out.push(("tol_x", self.tol_x.to_string()));
        if let Some(p) = self.x0 {
            out.push(("x0", format!("{},{}", p.x, p.y)));
        }
        out.push(("out", format!("\"{}\"", self.out.display())));
        if let Some(p) = &self.input {
            out.push(("input", format!("\"{}\"", p.display())));
        }
        out
    }
}

#[derive(Debug, Parser)]
#[command(name = "patchvortex", version, about = "Steady vortex patches of the vortex-wave system")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Solve the vortex-wave problem and verify the result.
    Solve(Flags),
    /// Solve the two-level Euler problem and check its structure.
    Euler(Flags),
    /// Re-verify a solution directory written by `solve`.
    Verify(Flags),
    /// Concentration sweep over a list of μ.
    SweepMu(Flags),
    /// Desingularization sweep over a list of λ at fixed μ.
    SweepLambda(Flags),
}

impl CliCommand {
    fn split(&self) -> (Command, &Flags) {
        match self {
            CliCommand::Solve(f) => (Command::Solve, f),
            CliCommand::Euler(f) => (Command::Euler, f),
            CliCommand::Verify(f) => (Command::Verify, f),
            CliCommand::SweepMu(f) => (Command::SweepMu, f),
            CliCommand::SweepLambda(f) => (Command::SweepLambda, f),
        }
    }
}

/// Flags shared by all commands; each overrides the config-file key of the same name.
#[derive(Debug, Args, Default)]
pub struct Flags {
    /// Flat `key = value` config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// `disk` or `mask:<path>`.
    #[arg(long)]
    pub domain: Option<String>,
    /// Length of the longer mask axis (default 2).
    #[arg(long = "mask-size")]
    pub mask_size: Option<String>,
    /// Cells across the bounding box.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub mu: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    /// Comma-separated λ ladder.
    #[arg(long)]
    pub lambdas: Option<String>,
    /// Comma-separated μ ladder.
    #[arg(long)]
    pub mus: Option<String>,
    #[arg(long = "max-iters")]
    pub max_iters: Option<String>,
    #[arg(long = "tol-patch")]
    pub tol_patch: Option<String>,
    #[arg(long = "tol-x")]
    pub tol_x: Option<String>,
    /// Initial vortex position `x,y` (default: minimum of H).
    #[arg(long)]
    pub x0: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<String>,
    /// Solution directory to verify.
    #[arg(long)]
    pub input: Option<String>,
}

impl Flags {
    fn pairs(&self) -> Vec<(&'static str, &str)> {
        [
            ("domain", &self.domain),
            ("mask_size", &self.mask_size),
            ("n", &self.n),
            ("mu", &self.mu),
            ("lambda", &self.lambda),
            ("lambdas", &self.lambdas),
            ("mus", &self.mus),
            ("max_iters", &self.max_iters),
            ("tol_patch", &self.tol_patch),
            ("tol_x", &self.tol_x),
            ("x0", &self.x0),
            ("out", &self.out),
            ("input", &self.input),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_deref().map(|v| (k, v)))
        .collect()
    }
}

/// Parses the flat config format into raw string values.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::config(format!("line {}", ln + 1), format!("expected key = value, got {line:?}")))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::config(key, "unknown key"));
        }
        let value = value.trim();
        let value = value
            .strip_prefix('"')
            .and_then(|v| v.strip_suffix('"'))
            .unwrap_or(value);
        if map.insert(key.to_string(), value.to_string()).is_some() {
            return Err(Error::config(key, "key given twice"));
        }
    }
    Ok(map)
}

fn number(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::config(key, format!("expected a finite number, got {v:?}")))
}

fn count(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse::<usize>()
        .map_err(|_| Error::config(key, format!("expected a nonnegative integer, got {v:?}")))
}

fn list(key: &str, v: &str) -> Result<Vec<f64>> {
    let values = v.split(',').map(|s| number(key, s)).collect::<Result<Vec<_>>>()?;
    if values.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::config(key, "list must be strictly increasing"));
    }
    Ok(values)
}

fn point(key: &str, v: &str) -> Result<Point> {
    match v.split(',').collect::<Vec<_>>()[..] {
        [a, b] => Ok(Point::new(number(key, a)?, number(key, b)?)),
        _ => Err(Error::config(key, format!("expected \"x,y\", got {v:?}"))),
    }
}

/// Resolves a configuration from raw key/values (flags already merged over
/// the file) and validates it against the domain.
pub fn resolve(command: Command, raw: &BTreeMap<String, String>) -> Result<RunConfig> {
    if let Some(k) = raw.keys().find(|k| !KEYS.contains(&k.as_str())) {
        return Err(Error::config(k.as_str(), "unknown key"));
    }
    let get = |k: &str| raw.get(k).map(String::as_str);
    let positive = |k: &str, v: f64| {
        if v > 0.0 {
            Ok(v)
        } else {
            Err(Error::config(k, format!("must be positive, got {v}")))
        }
    };
    let cfg = RunConfig {
        command,
        domain: DomainSpec::parse(get("domain").unwrap_or("disk"))?,
        mask_size: positive("mask_size", get("mask_size").map_or(Ok(2.0), |v| number("mask_size", v))?)?,
        n: get("n").map_or(Ok(256), |v| count("n", v))?,
        mu: get("mu").map(|v| number("mu", v)).transpose()?,
        lambda: get("lambda").map(|v| number("lambda", v)).transpose()?,
        lambdas: get("lambdas").map_or(Ok(Vec::new()), |v| list("lambdas", v))?,
        mus: get("mus").map_or(Ok(Vec::new()), |v| list("mus", v))?,
        max_iters: get("max_iters").map_or(Ok(200), |v| count("max_iters", v))?,
        tol_patch: get("tol_patch").map_or(Ok(1e-12), |v| number("tol_patch", v))?,
        tol_x: get("tol_x").map_or(Ok(1e-6), |v| number("tol_x", v))?,
        x0: get("x0").map(|v| point("x0", v)).transpose()?,
        out: PathBuf::from(get("out").unwrap_or("out")),
        input: get("input").map(PathBuf::from),
    };
    validate(&cfg)?;
    Ok(cfg)
}

/// Command-specific required keys and solver validity ranges.
fn validate(cfg: &RunConfig) -> Result<()> {
    let grid = cfg.build_grid()?;
    let check = |mu: f64, lambda: Option<f64>| cfg.solver(mu, lambda).validate(&grid);
    match cfg.command {
        Command::Solve => check(cfg.require_mu()?, None),
        Command::Euler => {
            let lambda = cfg.lambda.ok_or_else(|| Error::config("lambda", "required by this command"))?;
            check(cfg.require_mu()?, Some(lambda))
        }
        Command::Verify => {
            if cfg.input.is_none() {
                return Err(Error::config("input", "required by this command"));
            }
            Ok(())
        }
        Command::SweepMu => {
            if cfg.mus.is_empty() {
                return Err(Error::config("mus", "required by this command"));
            }
            // Rows too fine for the grid are reported as unconverged, but the
            // existence hypothesis must hold for every μ.
            for &mu in &cfg.mus {
                match check(mu, None) {
                    Err(Error::Resolution(_)) | Ok(()) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(())
        }
        Command::SweepLambda => {
            let mu = cfg.require_mu()?;
            if cfg.lambdas.is_empty() {
                return Err(Error::config("lambdas", "required by this command"));
            }
            check(mu, None)?;
            for &l in &cfg.lambdas {
                match check(mu, Some(l)) {
                    Err(Error::Resolution(_)) | Ok(()) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(())
        }
    }
}

/// Merges the config file (if any) with the flags and resolves the result.
pub fn parse_config(cli: &Cli) -> Result<RunConfig> {
    let (command, flags) = cli.command.split();
    let mut raw = match &flags.config {
        Some(path) => parse_config_text(&std::fs::read_to_string(path)?)?,
        None => BTreeMap::new(),
    };
    for (k, v) in flags.pairs() {
        raw.insert(k.to_string(), v.to_string());
    }
    resolve(command, &raw)
}
