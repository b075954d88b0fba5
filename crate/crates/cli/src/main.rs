//! `gid`: run, compare and benchmark dead-state engines, generate traces,
//! and decide regex emptiness.
//!
//! Exit codes: 0 ok, 1 divergence, 2 input error, 3 timeout in `run`.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand};
use gid_core::engine::replay_with_timeout;
use gid_core::generators::{self, Family, GenSpec, Order, SuiteName, Variant};
use gid_core::harness::{self, Exec};
use gid_core::{EngineKind, Trace};
use gid_regex::{decide_emptiness, parse, Decision, Interner};

#[derive(Parser)]
#[command(name = "gid", version, about = "Incremental dead-state detection")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one engine on a trace and print its events.
    Run {
        #[arg(long, default_value = "log")]
        engine: EngineKind,
        trace: PathBuf,
        /// Prefix each event with its update index.
        #[arg(long, short)]
        verbose: bool,
        /// Seconds before giving up.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
    },
    /// Check that engines agree, on one trace or on a generated suite.
    Compare {
        #[arg(long, value_delimiter = ',', default_values_t = EngineKind::ALL)]
        engines: Vec<EngineKind>,
        #[arg(required_unless_present = "suite", conflicts_with = "suite")]
        trace: Option<PathBuf>,
        #[command(flatten)]
        select: Select,
        #[arg(long)]
        parallel: bool,
    },
    /// Time engines on a generated suite and write CSV.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = EngineKind::ALL)]
        engines: Vec<EngineKind>,
        #[command(flatten)]
        select: Select,
        /// Per-run timeout in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        /// CSV destination; standard output if absent.
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Keep benchmarks where every engine finished under 10 ms.
        #[arg(long)]
        keep_trivial: bool,
        #[arg(long)]
        parallel: bool,
    },
    /// Generate a benchmark trace.
    Gen {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value = "fwd")]
        order: Order,
        #[arg(long, default_value = "dead")]
        variant: Variant,
        #[arg(long, default_value_t = 3)]
        degree: u32,
        #[arg(long, default_value_t = 0.01)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Decide whether an extended regex matches any string.
    Regex {
        expr: String,
        #[arg(long, default_value = "log")]
        engine: EngineKind,
        /// Maximum number of derivative expansions.
        #[arg(long, default_value_t = gid_regex::DEFAULT_BUDGET)]
        budget: usize,
        /// Write the updates sent to the engine as a trace file.
        #[arg(long)]
        emit_trace: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Select {
    /// basic or random.
    #[arg(long)]
    suite: Option<SuiteName>,
    #[arg(long, value_delimiter = ',')]
    family: Vec<Family>,
    #[arg(long)]
    order: Option<Order>,
    #[arg(long)]
    variant: Option<Variant>,
    #[arg(long)]
    max_n: Option<u32>,
    #[arg(long)]
    min_n: Option<u32>,
}

impl Select {
    fn specs(&self) -> Vec<GenSpec> {
        let Some(suite) = self.suite else {
            return Vec::new();
        };
        generators::suite_specs(suite)
            .into_iter()
            .filter(|s| self.family.is_empty() || self.family.contains(&s.family))
            .filter(|s| self.order.is_none_or(|o| o == s.order))
            .filter(|s| self.variant.is_none_or(|v| v == s.variant))
            .filter(|s| self.max_n.is_none_or(|m| s.n <= m))
            .filter(|s| self.min_n.is_none_or(|m| s.n >= m))
            .collect()
    }
}

enum Failure {
    Divergence(String),
    Input(anyhow::Error),
    Timeout(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn exec(parallel: bool) -> Exec {
    if parallel {
        Exec::Parallel
    } else {
        Exec::Sequential
    }
}

fn seconds(s: f64) -> anyhow::Result<Duration> {
    Duration::try_from_secs_f64(s).map_err(|_| anyhow!("invalid timeout {s}"))
}

fn load(path: &Path) -> anyhow::Result<Trace> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let trace = Trace::parse(&text).with_context(|| format!("parsing {}", path.display()))?;
    trace.validate().with_context(|| format!("validating {}", path.display()))?;
    Ok(trace)
}

fn write_to(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).context("writing output"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Divergence(msg)) => {
            println!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Timeout(msg)) => {
            eprintln!("timeout: {msg}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<(), Failure> {
    match cmd {
        Cmd::Run {
            engine,
            trace,
            verbose,
            timeout,
        } => {
            let t = load(&trace)?;
            let mut e = engine.build();
            let r = replay_with_timeout(e.as_mut(), &t, Some(seconds(timeout)?)).map_err(|err| anyhow!("{engine}: {err}"))?;
            let mut out = BufWriter::new(io::stdout().lock());
            for ev in &r.events {
                let line = if verbose { ev.verbose() } else { ev.verdict.to_string() };
                writeln!(out, "{line}").map_err(anyhow::Error::from)?;
            }
            out.flush().map_err(anyhow::Error::from)?;
            if !r.finished {
                return Err(Failure::Timeout(format!("{} of {} updates applied", r.applied, t.len())));
            }
            Ok(())
        }
        Cmd::Compare {
            engines,
            trace,
            select,
            parallel,
        } => {
            if engines.len() < 2 {
                return Err(anyhow!("compare needs at least two engines").into());
            }
            if let Some(path) = trace {
                let t = load(&path)?;
                return match harness::compare(&t, &engines) {
                    Ok(events) => {
                        println!("ok {} events", events.len());
                        Ok(())
                    }
                    Err(e) => Err(Failure::Divergence(e.to_string())),
                };
            }
            let specs = select.specs();
            let reports = harness::check_specs(&specs, &engines, exec(parallel));
            let failures: Vec<String> = reports.iter().flat_map(|r| r.failures()).collect();
            if failures.is_empty() {
                println!("ok {} traces", reports.len());
                Ok(())
            } else {
                Err(Failure::Divergence(failures.join("\n")))
            }
        }
        Cmd::Bench {
            engines,
            select,
            timeout,
            out,
            keep_trivial,
            parallel,
        } => {
            if select.suite.is_none() {
                return Err(anyhow!("bench needs --suite").into());
            }
            let specs = select.specs();
            let mut records = harness::bench_specs(&specs, &engines, seconds(timeout)?, exec(parallel));
            if !keep_trivial {
                records = harness::drop_trivial(records);
            }
            let mut buf = Vec::new();
            harness::write_csv(&mut buf, &records).map_err(anyhow::Error::from)?;
            write_to(out.as_deref(), &String::from_utf8(buf).expect("csv is utf-8"))?;
            Ok(())
        }
        Cmd::Gen {
            family,
            n,
            order,
            variant,
            degree,
            p,
            seed,
            out,
        } => {
            let spec = GenSpec {
                family,
                n,
                order,
                variant,
                degree,
                p,
                seed,
            };
            let t = generators::generate(&spec).map_err(anyhow::Error::from)?;
            write_to(out.as_deref(), &generators::render(&spec, &t))?;
            Ok(())
        }
        Cmd::Regex {
            expr,
            engine,
            budget,
            emit_trace,
        } => {
            let mut i = Interner::new();
            let r = parse(&mut i, &expr).map_err(|e| anyhow!("regex {e}"))?;
            let mut e = engine.build();
            let o = decide_emptiness(&mut i, r, e.as_mut(), budget).map_err(anyhow::Error::from)?;
            if let Some(path) = emit_trace {
                let text = format!("# regex {expr}\n{}", o.trace.serialize());
                write_to(Some(&path), &text)?;
            }
            match o.decision {
                Decision::Live(w) => println!("LIVE \"{}\"", w.escape_default()),
                Decision::Dead => println!("DEAD"),
                Decision::BudgetExhausted(k) => println!("BUDGET {k}"),
            }
            Ok(())
        }
    }
}
