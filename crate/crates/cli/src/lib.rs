//! Job configuration, dispatch and deterministic JSON reports for the `fpaut` binary.

mod args;
mod cache;
mod commands;

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use args::Cli;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Classify,
    Atoroidal,
    Twins,
    Flare,
    Traintrack,
    Constants,
    TorusAb,
    Conjugacy,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Atoroidal => "atoroidal",
            Command::Twins => "twins",
            Command::Flare => "flare",
            Command::Traintrack => "traintrack",
            Command::Constants => "constants",
            Command::TorusAb => "torus-ab",
            Command::Conjugacy => "conjugacy",
        }
    }
}

/// Search and iteration bounds. Each command reads only the ones it needs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bounds {
    /// Syllable bound `L` for enumerated words and conjugators.
    pub max_len: Option<usize>,
    /// Power bound (`N` for atoroidal and flare, `M` for twins), or the entry
    /// bound of factor substitutions for conjugacy.
    pub max_exp: Option<usize>,
    /// Per-syllable mass bound; defaults to `max_len`.
    pub max_mass: Option<usize>,
    /// Orbit length for `classify`.
    pub max_iter: usize,
    /// Gate depth; defaults to `2 (p + k) + 4`.
    pub depth: Option<usize>,
    pub lambda_min: String,
    pub min_len: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_len: None,
            max_exp: None,
            max_mass: None,
            max_iter: 20,
            depth: None,
            lambda_min: "1.1".into(),
            min_len: 2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct JobConfig {
    pub command: Command,
    pub aut: Option<PathBuf>,
    pub aut2: Option<PathBuf>,
    pub element: Option<String>,
    pub bounds: Bounds,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub strict: bool,
}

impl JobConfig {
    pub fn new(command: Command) -> Self {
        JobConfig {
            command,
            aut: None,
            aut2: None,
            element: None,
            bounds: Bounds::default(),
            out: None,
            cache_dir: None,
            jobs: None,
            strict: false,
        }
    }

    fn validate(&self) -> Result<()> {
        let b = &self.bounds;
        let positive = [
            ("--max-len", b.max_len),
            ("--max-exp", b.max_exp),
            ("--max-mass", b.max_mass),
            ("--max-iter", Some(b.max_iter)),
            ("--depth", b.depth),
            ("--min-len", Some(b.min_len)),
            ("--jobs", self.jobs),
        ];
        for (flag, value) in positive {
            if value == Some(0) {
                bail!("{flag} must be positive");
            }
        }
        if self.aut.is_none() {
            bail!("--aut is required");
        }
        match self.command {
            Command::Classify if self.element.is_none() => bail!("classify requires --element"),
            Command::Conjugacy if self.aut2.is_none() => bail!("conjugacy requires --aut2"),
            Command::Flare
                if parse_lambda(&b.lambda_min)? <= BigRational::one() => {
                    bail!("--lambda-min must exceed 1, got {}", b.lambda_min);
                }
            _ => {}
        }
        Ok(())
    }
}

/// Parses `1.25`, `5/4` or `2` exactly.
pub fn parse_lambda(text: &str) -> Result<BigRational> {
    let bad = || anyhow::anyhow!("malformed rational {text:?}");
    if let Some((n, d)) = text.split_once('/') {
        let (n, d): (BigInt, BigInt) = (n.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?);
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) || (int.is_empty() && frac.is_empty()) {
        return Err(bad());
    }
    let digits: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
    Ok(BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32)))
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// An input file's text and digest.
pub(crate) struct Input {
    pub text: String,
    pub sha256: String,
}

fn read_input(path: &PathBuf) -> Result<Input> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let sha256 = sha256_hex(text.as_bytes());
    Ok(Input { text, sha256 })
}

pub struct RunOutput {
    pub exit_code: i32,
    /// Pretty-printed report with sorted keys.
    pub report: String,
}

/// Runs one job. Errors are configuration or input errors (exit code 2).
pub fn run(cfg: &JobConfig) -> Result<RunOutput> {
    cfg.validate()?;
    let started = Instant::now();
    let aut = read_input(cfg.aut.as_ref().expect("validated"))?;
    let aut2 = cfg.aut2.as_ref().map(read_input).transpose()?;

    let mut inputs = json!({ "aut": { "sha256": aut.sha256 } });
    if let Some(a2) = &aut2 {
        inputs["aut2"] = json!({ "sha256": a2.sha256 });
    }
    if let Some(e) = &cfg.element {
        inputs["element"] = json!(e);
    }
    let job = commands::Job::load(cfg, &aut, aut2.as_ref())?;
    let bounds = job.bounds_json();

    let key_material = json!({
        "version": VERSION,
        "command": cfg.command.name(),
        "inputs": inputs,
        "bounds": bounds,
    });
    let cache = cache::Cache::locate(cfg.cache_dir.as_deref());
    let key = sha256_hex(key_material.to_string().as_bytes());
    let (result, cached) = match cache.as_ref().and_then(|c| c.load(&key)) {
        Some(r) => (r, true),
        None => {
            let r = match cfg.jobs {
                Some(j) => rayon::ThreadPoolBuilder::new()
                    .num_threads(j)
                    .build()
                    .context("building the worker pool")?
                    .install(|| job.execute())?,
                None => job.execute()?,
            };
            if let Some(c) = &cache {
                c.store(&key, &r)?;
            }
            (r, false)
        }
    };
    let exit_code = exit_code(cfg.command, &result, cfg.strict);
    let report = json!({
        "schema": SCHEMA,
        "tool": { "name": "fpaut", "version": VERSION },
        "command": cfg.command.name(),
        "inputs": inputs,
        "bounds": bounds,
        "result": result,
        "run": {
            "cached": cached,
            "elapsed_ms": started.elapsed().as_millis() as u64,
            "jobs": cfg.jobs.unwrap_or_else(rayon::current_num_threads),
        },
    });
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    Ok(RunOutput { exit_code, report: text })
}

/// The report without its `run` section, as compared by the determinism guarantee.
pub fn canonical_part(report: &str) -> Result<String> {
    let mut v: Value = serde_json::from_str(report)?;
    v.as_object_mut().context("report is not an object")?.remove("run");
    Ok(v.to_string())
}

fn exit_code(cmd: Command, result: &Value, strict: bool) -> i32 {
    let verdict = result.get("verdict").and_then(Value::as_str).unwrap_or("");
    let failure = match cmd {
        Command::Atoroidal | Command::Twins => verdict == "witness",
        Command::Flare => verdict == "counterexamples",
        Command::Traintrack => verdict == "violated",
        _ => false,
    };
    if failure {
        1
    } else if strict && verdict == "undecided" {
        3
    } else {
        0
    }
}
