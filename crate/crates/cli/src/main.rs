use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use hmcert::bound::{certify, Budget, Claim, Domain, Precision};
use hmcert::exact::parse_rational;
use hmcert::expr::{Chart, NamedExpression};
use hmcert::pipeline::{self, Config, ProofReport};

#[derive(Parser)]
#[command(name = "hmcert", version, about = "Exact-arithmetic certification of profile constants")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Run `all` certificates or a single one (with its dependencies).
    Certify {
        /// `all` or a certificate id such as `C8`.
        target: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Also write the JSON report here.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Certify sup|e| <= TARGET for a serialized expression.
    Bound {
        #[arg(long)]
        expr: PathBuf,
        /// Rational target, `P/Q` or decimal.
        #[arg(long)]
        target: String,
        /// `CHART:LO:HI`, e.g. `t2:0:1` or `y:0:3`.
        #[arg(long)]
        domain: String,
        #[arg(long)]
        max_depth: Option<u32>,
        #[arg(long)]
        max_boxes: Option<u64>,
    },
    /// Run everything (or re-render a saved report) and emit the proof report.
    Report {
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Render an existing JSON report instead of recomputing.
        #[arg(long)]
        from: Option<PathBuf>,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<Config> {
    match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(Config::parse(&text)?)
        }
        None => Ok(Config::default()),
    }
}

fn parse_domain(s: &str) -> Result<Domain> {
    let parts: Vec<&str> = s.split(':').collect();
    let [chart, lo, hi] = parts[..] else { bail!("domain must be CHART:LO:HI, got {s:?}") };
    let chart = Chart::parse(chart).with_context(|| format!("unknown chart {chart:?}"))?;
    Ok(Domain::new(chart, parse_rational(lo)?, parse_rational(hi)?)?)
}

fn emit(report: &ProofReport, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Text => report.to_text(),
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Certify { target, config, report } => {
            let cfg = load_config(&config)?;
            let rep = if target.eq_ignore_ascii_case("all") {
                pipeline::run_all(&cfg)?
            } else {
                pipeline::run(&cfg, &[target.to_uppercase()])?
            };
            for c in &rep.certificates {
                println!("{:<4} {:<12} {}", c.id, format!("{:?}", c.status).to_lowercase(), c.title);
            }
            println!("{}", rep.verdict);
            if let Some(p) = report {
                std::fs::write(&p, rep.to_json()).with_context(|| format!("writing {}", p.display()))?;
            }
            Ok(pipeline::success(&rep))
        }
        Command::Bound { expr, target, domain, max_depth, max_boxes } => {
            let text = std::fs::read_to_string(&expr).with_context(|| format!("reading {}", expr.display()))?;
            let e = NamedExpression::from_json(&text)?;
            let t = pipeline::parse_target(&target).with_context(|| format!("target must be a positive rational, got {target:?}"))?;
            let d = Budget::default();
            let budget = Budget { max_depth: max_depth.unwrap_or(d.max_depth), max_boxes: max_boxes.unwrap_or(d.max_boxes) };
            let cert = certify(&e, &parse_domain(&domain)?, &Claim::sup(t), budget, Precision::default())?;
            println!("{}", cert.to_json());
            eprintln!("{}", cert.summary());
            Ok(cert.is_certified())
        }
        Command::Report { format, out, config, from } => {
            let rep = match from {
                Some(p) => ProofReport::from_json(&std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?)?,
                None => pipeline::run_all(&load_config(&config)?)?,
            };
            let text = emit(&rep, format);
            match out {
                Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
                None => println!("{text}"),
            }
            Ok(pipeline::success(&rep))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = std::env::var("HMCERT_THREADS").ok().and_then(|v| v.parse::<usize>().ok());
    let result = match threads {
        Some(n) => hmcert::bound::with_threads(n, || run(cli)),
        None => run(cli),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
