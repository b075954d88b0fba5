//! Differential comparison and timed benchmarking over traces and suites.
//!
//! Batch operations take an [`Exec`] mode. With the `parallel` feature,
//! `Exec::Parallel` spreads independent work items over a rayon pool whose
//! size can be capped with the `GID_THREADS` environment variable; results
//! always come back in input order. Without the feature every mode runs
//! sequentially.

use std::fmt;
use std::io;
use std::time::Duration;

use thiserror::Error;

use crate::engine::{replay_with_timeout, Counters, Engine, EngineKind, ReplayError};
use crate::generators::{generate, GenSpec};
use crate::oracle::oracle_events;
use crate::trace::{Event, Trace};

/// Environment variable capping the worker pool.
pub const THREADS_ENV: &str = "GID_THREADS";

/// Benchmarks where every engine finishes below this are dropped from
/// reports.
pub const TRIVIAL: Duration = Duration::from_millis(10);

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(60);

pub const CSV_HEADER: [&str; 7] = ["benchmark", "family", "engine", "updates", "events", "time_ns", "outcome"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exec {
    #[default]
    Sequential,
    Parallel,
}

/// Applies `f` to every item, keeping input order.
pub fn map_ordered<T, R, F>(items: Vec<T>, exec: Exec, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec == Exec::Parallel {
        use rayon::prelude::*;
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .unwrap_or(0);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        return pool.install(|| items.into_par_iter().map(&f).collect());
    }
    let _ = exec;
    items.into_iter().map(f).collect()
}

/// First point where two event streams disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divergence {
    /// Update index of the first differing event.
    pub index: usize,
    pub left: String,
    pub right: String,
    /// Verdicts each side emitted at `index`.
    pub left_events: Vec<Event>,
    pub right_events: Vec<Event>,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |es: &[Event]| {
            if es.is_empty() {
                "nothing".to_string()
            } else {
                es.iter().map(|e| e.verdict.to_string()).collect::<Vec<_>>().join(", ")
            }
        };
        write!(
            f,
            "update {}: {} emitted {}, {} emitted {}",
            self.index,
            self.left,
            show(&self.left_events),
            self.right,
            show(&self.right_events)
        )
    }
}

/// Compares two event streams.
pub fn first_divergence(left: (&str, &[Event]), right: (&str, &[Event])) -> Option<Divergence> {
    let (a, b) = (left.1, right.1);
    let k = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    if k == a.len() && k == b.len() {
        return None;
    }
    let index = match (a.get(k), b.get(k)) {
        (Some(x), Some(y)) => x.index.min(y.index),
        (Some(x), None) | (None, Some(x)) => x.index,
        (None, None) => unreachable!(),
    };
    let at = |es: &[Event]| es.iter().filter(|e| e.index == index).copied().collect();
    Some(Divergence {
        index,
        left: left.0.to_string(),
        right: right.0.to_string(),
        left_events: at(a),
        right_events: at(b),
    })
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum CompareError {
    #[error("{0}")]
    Divergence(Divergence),
    #[error("{engine} failed at {error}")]
    Engine { engine: String, error: ReplayError },
}

/// Runs each named engine on `trace` and checks that all event streams
/// equal the first one. Returns the common stream.
pub fn compare_engines(trace: &Trace, engines: Vec<(String, Box<dyn Engine + Send>)>) -> Result<Vec<Event>, CompareError> {
    let mut reference: Option<(String, Vec<Event>)> = None;
    for (name, mut engine) in engines {
        let events = replay_with_timeout(engine.as_mut(), trace, None)
            .map_err(|error| CompareError::Engine {
                engine: name.clone(),
                error,
            })?
            .events;
        match &reference {
            None => reference = Some((name, events)),
            Some((rn, re)) => {
                if let Some(d) = first_divergence((rn, re), (&name, &events)) {
                    return Err(CompareError::Divergence(d));
                }
            }
        }
    }
    Ok(reference.map(|r| r.1).unwrap_or_default())
}

/// [`compare_engines`] over built-in engines.
pub fn compare(trace: &Trace, kinds: &[EngineKind]) -> Result<Vec<Event>, CompareError> {
    compare_engines(trace, kinds.iter().map(|k| (k.name().to_string(), k.build())).collect())
}

/// Outcome of checking one engine on one trace against the oracle.
#[derive(Clone, Debug)]
pub struct EngineCheck {
    pub engine: EngineKind,
    pub counters: Counters,
    /// Number of events emitted.
    pub events: usize,
    pub failure: Option<String>,
    /// States that emitted more than one Live or more than one Dead event.
    pub repeated: usize,
}

#[derive(Clone, Debug)]
pub struct SpecReport {
    pub name: String,
    pub updates: usize,
    pub oracle_events: usize,
    pub checks: Vec<EngineCheck>,
}

impl SpecReport {
    pub fn failures(&self) -> impl Iterator<Item = String> + '_ {
        self.checks
            .iter()
            .filter_map(move |c| c.failure.as_ref().map(|f| format!("{} / {}: {f}", self.name, c.engine)))
    }
}

/// Checks every engine against the oracle on one trace.
pub fn check_trace(name: &str, trace: &Trace, kinds: &[EngineKind]) -> SpecReport {
    let expected = oracle_events(trace);
    let checks = kinds
        .iter()
        .map(|&k| {
            let mut e = k.build();
            match replay_with_timeout(e.as_mut(), trace, None) {
                Ok(r) => {
                    let failure = first_divergence(("oracle", &expected), (k.name(), &r.events)).map(|d| d.to_string());
                    let mut seen = std::collections::HashSet::new();
                    let repeated = r.events.iter().filter(|ev| !seen.insert(ev.verdict)).count();
                    EngineCheck {
                        engine: k,
                        counters: r.counters,
                        events: r.events.len(),
                        failure,
                        repeated,
                    }
                }
                Err(err) => EngineCheck {
                    engine: k,
                    counters: e.counters(),
                    events: 0,
                    failure: Some(err.to_string()),
                    repeated: 0,
                },
            }
        })
        .collect();
    SpecReport {
        name: name.to_string(),
        updates: trace.len(),
        oracle_events: expected.len(),
        checks,
    }
}

/// [`check_trace`] over generated specs; traces are built inside the
/// workers.
pub fn check_specs(specs: &[GenSpec], kinds: &[EngineKind], exec: Exec) -> Vec<SpecReport> {
    map_ordered(specs.to_vec(), exec, |spec| {
        let trace = generate(&spec).expect("valid spec");
        check_trace(&spec.name(), &trace, kinds)
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    Timeout,
    Error,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Ok => "ok",
            Outcome::Timeout => "timeout",
            Outcome::Error => "error",
        })
    }
}

#[derive(Clone, Debug)]
pub struct BenchRecord {
    pub benchmark: String,
    pub family: String,
    pub engine: EngineKind,
    /// Edge updates in the trace.
    pub updates: u64,
    pub events: u64,
    pub time_ns: u128,
    pub outcome: Outcome,
    pub counters: Counters,
}

/// One timed replay.
pub fn bench_one(benchmark: &str, family: &str, trace: &Trace, kind: EngineKind, timeout: Duration) -> BenchRecord {
    let mut e = kind.build();
    let (events, elapsed, outcome) = match replay_with_timeout(e.as_mut(), trace, Some(timeout)) {
        Ok(r) => (
            r.events.len() as u64,
            r.elapsed,
            if r.finished { Outcome::Ok } else { Outcome::Timeout },
        ),
        Err(_) => (0, Duration::ZERO, Outcome::Error),
    };
    BenchRecord {
        benchmark: benchmark.to_string(),
        family: family.to_string(),
        engine: kind,
        updates: trace.edge_count() as u64,
        events,
        time_ns: elapsed.as_nanos(),
        outcome,
        counters: e.counters(),
    }
}

/// Times every engine on every spec. Engines on one benchmark run back to
/// back in one worker.
pub fn bench_specs(specs: &[GenSpec], kinds: &[EngineKind], timeout: Duration, exec: Exec) -> Vec<BenchRecord> {
    map_ordered(specs.to_vec(), exec, |spec| {
        let trace = generate(&spec).expect("valid spec");
        let family = spec.family.to_string();
        kinds
            .iter()
            .map(|&k| bench_one(&spec.name(), &family, &trace, k, timeout))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Drops benchmarks on which every engine finished under [`TRIVIAL`].
pub fn drop_trivial(records: Vec<BenchRecord>) -> Vec<BenchRecord> {
    let keep: std::collections::HashSet<String> = records
        .iter()
        .filter(|r| r.outcome != Outcome::Ok || r.time_ns >= TRIVIAL.as_nanos())
        .map(|r| r.benchmark.clone())
        .collect();
    records.into_iter().filter(|r| keep.contains(&r.benchmark)).collect()
}

pub fn write_csv<W: io::Write>(out: W, records: &[BenchRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record([
            r.benchmark.clone(),
            r.family.clone(),
            r.engine.to_string(),
            r.updates.to_string(),
            r.events.to_string(),
            r.time_ns.to_string(),
            r.outcome.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
