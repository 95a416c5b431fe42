use std::path::PathBuf;

use clap::Parser;

use crate::{Bounds, Command, JobConfig};

/// Exact analysis of automorphisms of free products of free abelian groups and a free group.
///
/// Exit codes: 0 success, 1 witness or violation found, 2 parse or configuration
/// error, 3 undecided under --strict.
#[derive(Debug, Parser)]
#[command(name = "fpaut", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// Automorphism file (JSON).
    #[arg(long)]
    pub aut: Option<PathBuf>,
    /// Second automorphism file, for `conjugacy`.
    #[arg(long)]
    pub aut2: Option<PathBuf>,
    /// Group element in the word grammar, for `classify`.
    #[arg(long, allow_hyphen_values = true)]
    pub element: Option<String>,
    /// Syllable bound L on enumerated words and conjugators.
    #[arg(long, visible_alias = "conj-len")]
    pub max_len: Option<usize>,
    /// Power bound (N for atoroidal and flare, M for twins); entry bound for conjugacy substitutions.
    #[arg(long)]
    pub max_exp: Option<usize>,
    /// Per-syllable exponent mass bound (default: --max-len).
    #[arg(long)]
    pub max_mass: Option<usize>,
    /// Orbit length for `classify`.
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Gate depth (default: 2(p+k)+4).
    #[arg(long)]
    pub depth: Option<usize>,
    /// Flare stretch factor, decimal or fraction.
    #[arg(long)]
    pub lambda_min: Option<String>,
    /// Minimum cyclic syllable length for `flare`.
    #[arg(long)]
    pub min_len: Option<usize>,
    /// Worker threads.
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Exit with code 3 on undecided verdicts.
    #[arg(long)]
    pub strict: bool,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Cache directory; the FPAUT_CACHE environment variable overrides it.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
}

impl Cli {
    pub fn into_config(self) -> JobConfig {
        let d = Bounds::default();
        JobConfig {
            command: self.command,
            aut: self.aut,
            aut2: self.aut2,
            element: self.element,
            bounds: Bounds {
                max_len: self.max_len,
                max_exp: self.max_exp,
                max_mass: self.max_mass,
                max_iter: self.max_iter.unwrap_or(d.max_iter),
                depth: self.depth,
                lambda_min: self.lambda_min.unwrap_or(d.lambda_min),
                min_len: self.min_len.unwrap_or(d.min_len),
            },
            out: self.out,
            cache_dir: self.cache_dir,
            jobs: self.jobs,
            strict: self.strict,
        }
    }
}
