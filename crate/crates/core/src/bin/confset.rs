use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use confset::cayley::DEFAULT_DOT_CAP;
use confset::config::{ConfigSet, ENUM_BUDGET};
use confset::group::DEFAULT_MAX_ORDER;
use confset::report::{cmd_analyze, cmd_cayley, cmd_punctured, cmd_verify_all, cmd_zp, AnalysisReport, Settings};
use confset::tuple::format_set;
use confset::{group_from_spec, Error};

const MAX_ORDER_ENV: &str = "CONFSET_MAX_ORDER";

#[derive(Parser)]
#[command(name = "confset", version, about = "Ordered configuration sets of finite groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for every sampled check.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Largest group order to build; accepts `N` or `B^E`. The
    /// CONFSET_MAX_ORDER environment variable takes precedence.
    #[arg(long, global = true, value_parser = parse_order, default_value_t = DEFAULT_MAX_ORDER)]
    max_order: u64,

    /// Largest graph written as DOT; bigger graphs get a JSON summary.
    #[arg(long, global = true, default_value_t = DEFAULT_DOT_CAP)]
    dot_cap: usize,

    /// Record wall-clock time per check (reports stop being reproducible).
    #[arg(long, global = true)]
    timings: bool,

    /// Output file. For `cayley` this receives the graph; otherwise the report.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Count, generation, norm certificate and Cayley components of F(G,k).
    Analyze {
        #[arg(long)]
        group: String,
        #[arg(long)]
        k: usize,
    },
    /// Dimension and claimed basis of the configuration group of Z_p.
    Zp {
        #[arg(long)]
        p: u64,
    },
    /// Cayley graph of G^k with F(G,k) as connection set.
    Cayley {
        #[arg(long)]
        group: String,
        #[arg(long)]
        k: usize,
    },
    /// Audits of the translation map F(G,k+1) -> F(G-{1},k).
    Punctured {
        #[arg(long)]
        group: String,
        #[arg(long)]
        k: usize,
    },
    /// Run the whole verification matrix.
    VerifyAll,
    /// Print F(G,k), one tuple per line.
    Enumerate {
        #[arg(long)]
        group: String,
        #[arg(long)]
        k: usize,
        /// Print F(G-{1},k) instead.
        #[arg(long)]
        punctured: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn parse_order(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let parsed = match s.split_once('^') {
        Some((b, e)) => {
            let b: u64 = b.trim().parse().map_err(|_| format!("bad base in {s:?}"))?;
            let e: u32 = e.trim().parse().map_err(|_| format!("bad exponent in {s:?}"))?;
            b.checked_pow(e).ok_or_else(|| format!("{s} overflows"))?
        }
        None => s.parse().map_err(|_| format!("expected an integer, got {s:?}"))?,
    };
    if parsed == 0 {
        return Err("max order must be positive".into());
    }
    Ok(parsed)
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn render(report: &AnalysisReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    let max_order = match std::env::var(MAX_ORDER_ENV) {
        Ok(v) => parse_order(&v).map_err(|m| Error::Precondition(format!("{MAX_ORDER_ENV}: {m}")))?,
        Err(_) => cli.max_order,
    };
    let settings = Settings {
        seed: cli.seed,
        max_order,
        dot_cap: cli.dot_cap,
        timings: cli.timings,
    };
    let out = cli.out.as_ref();
    let report = match &cli.command {
        Command::Analyze { group, k } => cmd_analyze(group, *k, &settings)?,
        Command::Zp { p } => cmd_zp(*p, &settings)?,
        Command::Punctured { group, k } => cmd_punctured(group, *k, &settings)?,
        Command::VerifyAll => cmd_verify_all(&settings)?,
        Command::Cayley { group, k } => {
            let (report, _) = cmd_cayley(group, *k, out.map(PathBuf::as_path), &settings)?;
            print!("{}", render(&report, cli.format));
            return Ok(report.exit_code() as u8);
        }
        Command::Enumerate { group, k, punctured } => {
            let g = group_from_spec(group)?;
            let set = if *punctured {
                ConfigSet::punctured(&g, *k)?
            } else {
                ConfigSet::new(&g, *k)?
            };
            let members = set.materialize(ENUM_BUDGET)?;
            emit(&format_set(&members), out)?;
            return Ok(0);
        }
    };
    emit(&render(&report, cli.format), out)?;
    Ok(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("confset: {e}");
            ExitCode::from(1)
        }
    }
}
