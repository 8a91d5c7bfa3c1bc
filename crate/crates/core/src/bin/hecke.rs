use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use hecke_core::algebra::HeckeAlgebra;
use hecke_core::classify::{classify_simples, standard_length_zero};
use hecke_core::field::is_prime;
use hecke_core::fixtures::{self, Config, RunOptions, VerificationReport};
use hecke_core::functors::{is_supersingular, LeviDatum};
use hecke_core::report::Status;
use hecke_core::spectral::{ss_propagate, E2Page};
use hecke_core::weyl::GroupKind;
use hecke_core::HeckeError;

macro_rules! outln {
    ($($arg:tt)*) => { emit(&format!("{}\n", format_args!($($arg)*))) };
}

macro_rules! out {
    ($($arg:tt)*) => { emit(&format!($($arg)*)) };
}

/// Writes to stdout; a closed pipe (`hecke list | head`) ends the process quietly.
fn emit(s: &str) {
    let mut stdout = std::io::stdout().lock();
    if let Err(e) = stdout.write_all(s.as_bytes()) {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            std::process::exit(0);
        }
        panic!("writing to stdout: {e}");
    }
}

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Human,
    Structured,
}

#[derive(Parser, Debug)]
#[command(name = "hecke", version, about = "Mod-p pro-p Iwahori-Hecke algebras: fixture verification and tools")]
struct Cli {
    /// Residue characteristic.
    #[arg(long, global = true)]
    p: Option<u32>,
    /// Size of the coefficient field, a power of p.
    #[arg(long, global = true)]
    q: Option<u64>,
    /// Allow primes other than 5 and 7.
    #[arg(long, global = true)]
    any_p: bool,
    #[arg(long, global = true, value_enum, default_value = "human")]
    format: Format,
    /// Seed for randomized spot-checks.
    #[arg(long, global = true, default_value_t = 0x5eed)]
    seed: u64,
    /// Include wall-clock timings in structured reports.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify fixtures (`all` for the whole registry).
    Run {
        #[arg(required = true)]
        ids: Vec<String>,
        /// Propagate spectral pages together with their `assume` lines.
        #[arg(long)]
        assume_split: bool,
    },
    /// List registered fixtures.
    List,
    /// Print structure constants of basis products.
    DumpAlgebra {
        #[arg(long, default_value = "GL2")]
        group: String,
        #[arg(long, default_value_t = 1)]
        max_length: usize,
    },
    /// Run the propagation engine on a page file.
    SsSolve {
        page: PathBuf,
        #[arg(long)]
        assume_split: bool,
    },
    /// Enumerate simple modules with the standard length-zero action.
    Classify {
        #[arg(long)]
        group: String,
        #[arg(long)]
        dim: usize,
        #[arg(long, default_value_t = 0)]
        r: i64,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl From<HeckeError> for Failure {
    fn from(e: HeckeError) -> Failure {
        let code = match &e {
            HeckeError::InvalidArgument(_) | HeckeError::Parse { .. } | HeckeError::UnknownFixture(_) => EXIT_USAGE,
            _ => EXIT_INTERNAL,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: EXIT_USAGE, msg: msg.into() }
}

fn config(cli: &Cli) -> Result<Config, Failure> {
    let p = match (cli.p, cli.q) {
        (Some(p), _) => p,
        (None, Some(q)) => (2..=q as u32).find(|d| q % *d as u64 == 0).ok_or_else(|| usage("--q must be at least 2"))?,
        (None, None) => 5,
    };
    if !is_prime(p) || p < 5 {
        return Err(usage(format!("p = {p}: need a prime of at least 5")));
    }
    if !cli.any_p && p != 5 && p != 7 {
        return Err(usage(format!("p = {p}: only 5 and 7 are supported without --any-p")));
    }
    let mut e = 1;
    if let Some(q) = cli.q {
        let mut x = p as u64;
        while x < q {
            x *= p as u64;
            e += 1;
        }
        if x != q {
            return Err(usage(format!("q = {q} is not a power of p = {p}")));
        }
    }
    Ok(Config { p, e })
}

fn group(name: &str) -> Result<GroupKind, Failure> {
    name.parse().map_err(|e: HeckeError| usage(e.to_string()))
}

fn print_json(v: &serde_json::Value) {
    outln!("{}", serde_json::to_string_pretty(v).expect("reports serialize"));
}

fn print_human(r: &VerificationReport) {
    outln!(
        "{}  {}  ({} checks, p = {}, q = {}, {})",
        r.id,
        r.status.to_string().to_uppercase(),
        r.checks.len(),
        r.config.p,
        r.config.q,
        r.config.group
    );
    let width = r.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(0).min(72);
    for c in &r.checks {
        outln!("  {:<12} {:<width$}  {}", c.status.to_string(), c.name, c.detail);
    }
    if let Some(c) = r.checks.first() {
        outln!("  cite: {}", c.cite);
    }
}

fn run(cli: &Cli, ids: &[String], assume_split: bool) -> Result<u8, Failure> {
    let cfg = config(cli)?;
    let ids: Vec<String> = if ids.iter().any(|i| i == "all") { fixtures::fixture_ids()? } else { ids.to_vec() };
    let opts = RunOptions { seed: cli.seed, assume_split };
    let mut reports = Vec::new();
    for r in fixtures::verify_many(&ids, cfg, &opts) {
        let mut r = r?;
        if !cli.timing && cli.format == Format::Structured {
            r.elapsed_ms = None;
        }
        reports.push(r);
    }
    let status = hecke_core::report::overall(reports.iter().flat_map(|r| &r.checks));
    match cli.format {
        Format::Structured => print_json(&json!({ "status": status, "reports": reports })),
        Format::Human => {
            for r in &reports {
                print_human(r);
                if cli.timing {
                    if let Some(ms) = r.elapsed_ms {
                        outln!("  time: {ms} ms");
                    }
                }
            }
            outln!("overall: {status}");
        }
    }
    Ok(if status == Status::Fail { EXIT_FAIL } else { 0 })
}

fn list(cli: &Cli) -> Result<u8, Failure> {
    let specs = fixtures::registry()?;
    match cli.format {
        Format::Structured => print_json(&json!(specs
            .iter()
            .map(|s| json!({
                "id": s.id,
                "group": s.group.to_string(),
                "cite": s.cite,
                "params": s.params.iter().map(|p| p.name().to_string()).collect::<Vec<_>>(),
            }))
            .collect::<Vec<_>>())),
        Format::Human => {
            for s in &specs {
                let params: Vec<&str> = s.params.iter().map(|p| p.name()).collect();
                let params = if params.is_empty() { String::new() } else { format!("({})", params.join(", ")) };
                outln!("{:<24} {:<4} {}", format!("{}{params}", s.id), s.group.to_string(), s.cite);
            }
        }
    }
    Ok(0)
}

fn dump_algebra(cli: &Cli, name: &str, max_length: usize) -> Result<u8, Failure> {
    let cfg = config(cli)?;
    let alg = HeckeAlgebra::new(group(name)?, cfg.p, cfg.e)?;
    let text = alg.structure_constants(max_length);
    match cli.format {
        Format::Human => out!("{text}"),
        Format::Structured => print_json(&json!({
            "group": name,
            "p": cfg.p,
            "q": cfg.q(),
            "max_length": max_length,
            "products": text.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>(),
        })),
    }
    Ok(0)
}

fn ss_solve(cli: &Cli, path: &PathBuf, assume_split: bool) -> Result<u8, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let page = E2Page::parse(&text)?;
    let prop = ss_propagate(&page, assume_split)?;
    match cli.format {
        Format::Structured => print_json(&json!(prop)),
        Format::Human => {
            for f in &prop.facts {
                outln!("{:<24} {}", f.rule.to_string(), f.statement);
            }
            if let Some(c) = &prop.contradiction {
                outln!("contradiction at {}", c.witness);
                for g in &c.conflict {
                    outln!("  from: {g}");
                }
            }
        }
    }
    Ok(if prop.contradiction.is_some() { EXIT_FAIL } else { 0 })
}

fn classify(cli: &Cli, name: &str, dim: usize, r: i64) -> Result<u8, Failure> {
    let cfg = config(cli)?;
    let alg = HeckeAlgebra::new(group(name)?, cfg.p, cfg.e)?;
    let lz = standard_length_zero(&alg, dim, r)?;
    let found = classify_simples(&alg, dim, &lz)?;
    let datum = LeviDatum::torus(&alg)?;
    let mut rows = Vec::new();
    for m in &found {
        rows.push((is_supersingular(&datum, m)?, m.describe()));
    }
    match cli.format {
        Format::Structured => print_json(&json!({
            "group": name,
            "p": cfg.p,
            "q": cfg.q(),
            "dim": dim,
            "r": r,
            "modules": rows.iter().map(|(ss, d)| json!({ "supersingular": ss, "description": d })).collect::<Vec<_>>(),
        })),
        Format::Human => {
            outln!("{} simple module(s)", rows.len());
            for (k, (ss, d)) in rows.iter().enumerate() {
                outln!("[{k}] supersingular: {ss}");
                out!("{d}");
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { ids, assume_split } => run(&cli, ids, *assume_split),
        Command::List => list(&cli),
        Command::DumpAlgebra { group, max_length } => dump_algebra(&cli, group, *max_length),
        Command::SsSolve { page, assume_split } => ss_solve(&cli, page, *assume_split),
        Command::Classify { group, dim, r } => classify(&cli, group, *dim, *r),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("hecke: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
