use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mumeb_core::field::{MAX_DEGREE, MIN_DEGREE};
use mumeb_core::verify::{Mode, MAX_BRUTEFORCE_S};
use mumeb_core::{FamilyKind, Field, GaloisRing};

pub const POLY_TABLE_VAR: &str = "MUMEB_POLY_TABLE";

#[derive(Debug, Parser)]
#[command(
    name = "mumeb",
    version,
    about = "Exact construction and verification of mutually unbiased maximally entangled bases"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Emit the unitaries V_A of a family
    Build(FamilyArgs),
    /// Verify that a family yields mutually unbiased maximally entangled bases
    Verify(FamilyArgs),
    /// Search for a large trace-zero excluded subset of SL(2, F)
    Search(SearchArgs),
    /// Print the trace table and character-sum magnitudes of GR(4, 4^s)
    Tables(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Field degree, q = 2^s
    #[arg(long)]
    pub s: u32,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the output here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Cap on worker threads
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, value_enum, conflicts_with = "custom")]
    pub family: Option<FamilyArg>,
    /// JSON file with a list of [α, β, γ, δ] canonical index arrays
    #[arg(long)]
    pub custom: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Shortcut)]
    pub mode: ModeArg,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Node budget; underscores are allowed, e.g. 10_000_000
    #[arg(long, value_parser = parse_budget, default_value = "10_000_000")]
    pub budget: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Shortcut)]
    pub mode: ModeArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Pretty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Symmetric,
    Triple,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Shortcut,
    Bruteforce,
    Both,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Shortcut => Mode::Shortcut,
            ModeArg::Bruteforce => Mode::Bruteforce,
            ModeArg::Both => Mode::Both,
        }
    }
}

impl From<FamilyArg> for FamilyKind {
    fn from(f: FamilyArg) -> FamilyKind {
        match f {
            FamilyArg::Symmetric => FamilyKind::Symmetric,
            FamilyArg::Triple => FamilyKind::Triple,
        }
    }
}

pub fn parse_budget(s: &str) -> Result<u64, String> {
    let digits: String = s.chars().filter(|&c| c != '_').collect();
    if digits.is_empty() || s.starts_with('_') {
        return Err(format!("invalid budget `{s}`"));
    }
    digits
        .parse()
        .map_err(|e| format!("invalid budget `{s}`: {e}"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilySource {
    Builtin(FamilyKind),
    Custom(PathBuf),
}

/// Validated settings shared by every command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub s: u32,
    pub poly: Option<u32>,
    pub family: FamilySource,
    pub mode: Mode,
    pub budget: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
}

impl RunConfig {
    fn base(common: &CommonArgs) -> Result<RunConfig> {
        check_degree(common.s)?;
        if common.threads == Some(0) {
            bail!("--threads must be at least 1");
        }
        Ok(RunConfig {
            s: common.s,
            poly: poly_override(common.s)?,
            family: FamilySource::Builtin(FamilyKind::Triple),
            mode: Mode::Shortcut,
            budget: 0,
            out: common.out.clone(),
            format: common.format,
            threads: common.threads,
        })
    }

    pub fn from_family(args: &FamilyArgs) -> Result<RunConfig> {
        let mut cfg = RunConfig::base(&args.common)?;
        cfg.family = match (&args.custom, args.family) {
            (Some(path), _) => FamilySource::Custom(path.clone()),
            (None, Some(kind)) => FamilySource::Builtin(kind.into()),
            (None, None) => FamilySource::Builtin(FamilyKind::Triple),
        };
        cfg.mode = checked_mode(cfg.s, args.mode)?;
        Ok(cfg)
    }

    pub fn from_search(args: &SearchArgs) -> Result<RunConfig> {
        let mut cfg = RunConfig::base(&args.common)?;
        cfg.budget = args.budget;
        cfg.mode = checked_mode(cfg.s, args.mode)?;
        Ok(cfg)
    }

    pub fn from_tables(args: &CommonArgs) -> Result<RunConfig> {
        RunConfig::base(args)
    }

    pub fn field(&self) -> Result<Field> {
        Ok(Field::new(self.s, self.poly)?)
    }

    pub fn ring(&self) -> Result<(Field, GaloisRing)> {
        let field = self.field()?;
        let ring = GaloisRing::new(&field)?;
        Ok((field, ring))
    }
}

fn check_degree(s: u32) -> Result<()> {
    if !(MIN_DEGREE..=MAX_DEGREE).contains(&s) {
        return Err(mumeb_core::Error::UnsupportedDegree(s).into());
    }
    Ok(())
}

fn checked_mode(s: u32, mode: ModeArg) -> Result<Mode> {
    let mode = Mode::from(mode);
    if mode != Mode::Shortcut && s > MAX_BRUTEFORCE_S {
        return Err(mumeb_core::Error::BruteforceTooLarge(s).into());
    }
    Ok(mode)
}

fn poly_override(s: u32) -> Result<Option<u32>> {
    match std::env::var_os(POLY_TABLE_VAR) {
        Some(path) if !path.is_empty() => lookup_poly(Path::new(&path), s),
        _ => Ok(None),
    }
}

/// Reads `<s> <poly>` lines; `poly` is decimal, `0x` hex or `0b` binary with
/// bit i the coefficient of x^i. `#` starts a comment.
pub fn parse_poly_table(text: &str) -> Result<Vec<(u32, u32)>> {
    let mut rows = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(s), Some(p), None) = (parts.next(), parts.next(), parts.next()) else {
            bail!("line {}: expected `<s> <poly>`", n + 1);
        };
        let s: u32 = s
            .parse()
            .with_context(|| format!("line {}: bad degree `{s}`", n + 1))?;
        let p = parse_int(p).ok_or_else(|| anyhow!("line {}: bad polynomial `{p}`", n + 1))?;
        rows.push((s, p));
    }
    Ok(rows)
}

fn parse_int(text: &str) -> Option<u32> {
    let t = text.replace('_', "");
    if let Some(h) = t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        u32::from_str_radix(h, 16).ok()
    } else if let Some(b) = t.strip_prefix("0b").or_else(|| t.strip_prefix("0B")) {
        u32::from_str_radix(b, 2).ok()
    } else {
        t.parse().ok()
    }
}

fn lookup_poly(path: &Path, s: u32) -> Result<Option<u32>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {POLY_TABLE_VAR} file {}", path.display()))?;
    let rows = parse_poly_table(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(rows
        .into_iter()
        .rev()
        .find(|&(d, _)| d == s)
        .map(|(_, p)| p))
}
