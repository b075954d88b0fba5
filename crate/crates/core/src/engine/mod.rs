//! The engine contract and the replay driver.
//!
//! Every engine consumes raw [`Update`]s one at a time and returns the new
//! [`Verdict`]s for that update, sorted by state id. All six engines share
//! the same observable behavior; they differ only in how much work each
//! update costs.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::trace::{Event, StateId, Status, Trace, Update, Verdict};

pub mod audit;
pub(crate) mod condensed;
pub mod bfgt;
pub mod guided;
pub mod naive;
pub mod simple;

pub use audit::{replay_audited, AuditError, World};
pub use bfgt::Bfgt;
pub use guided::{FirstCut, Lazy, Log};
pub use naive::Naive;
pub use simple::Simple;

/// Work counters. All fields only grow.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    /// Edge updates received.
    pub m: u64,
    /// Distinct states seen.
    pub n: u64,
    pub uf_finds: u64,
    pub uf_unions: u64,
    pub ef_ops: u64,
    pub dfs_edge_visits: u64,
    pub jump_pushes: u64,
    pub merges: u64,
    pub dead_events: u64,
    pub live_events: u64,
    /// Successor hops taken by the first-cut cycle check.
    pub succ_walk_steps: u64,
    /// Edges inspected by backward searches (BFGT).
    pub backward_inspections: u64,
    /// Edges inspected by forward searches (Simple, BFGT).
    pub forward_inspections: u64,
    /// Full reclassifications (Naive).
    pub recomputes: u64,
}

impl Counters {
    pub const FIELDS: [&'static str; 14] = [
        "m",
        "n",
        "uf_finds",
        "uf_unions",
        "ef_ops",
        "dfs_edge_visits",
        "jump_pushes",
        "merges",
        "dead_events",
        "live_events",
        "succ_walk_steps",
        "backward_inspections",
        "forward_inspections",
        "recomputes",
    ];

    pub fn values(&self) -> [u64; 14] {
        [
            self.m,
            self.n,
            self.uf_finds,
            self.uf_unions,
            self.ef_ops,
            self.dfs_edge_visits,
            self.jump_pushes,
            self.merges,
            self.dead_events,
            self.live_events,
            self.succ_walk_steps,
            self.backward_inspections,
            self.forward_inspections,
            self.recomputes,
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("edge from {0} after it was closed")]
    EdgeAfterClose(StateId),
    #[error("terminal label on {0} after it was closed")]
    TerminalAfterClose(StateId),
    #[error("audit failed: {0}")]
    Audit(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EngineOptions {
    /// Seed for breaking union-by-rank ties pseudo-randomly.
    pub tie_seed: Option<u64>,
}

pub trait Engine {
    fn kind(&self) -> EngineKind;

    /// Applies one update and returns the verdicts it produces, ascending by
    /// state id.
    fn on_update(&mut self, update: Update) -> Result<Vec<Verdict>, EngineError>;

    /// Current status of `s`, or `None` if it has never been mentioned.
    fn status(&self, s: StateId) -> Option<Status>;

    fn counters(&self) -> Counters;

    /// Full structural audit against the ground truth in `world`.
    fn audit(&self, world: &World) -> Result<(), AuditError>;

    /// Cheap check that the edge just added is stored somewhere.
    fn audit_edge(&self, _u: StateId, _v: StateId) -> Result<(), AuditError> {
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EngineKind {
    Naive,
    Simple,
    Bfgt,
    FirstCut,
    Log,
    Lazy,
}

impl EngineKind {
    pub const ALL: [EngineKind; 6] = [
        EngineKind::Naive,
        EngineKind::Simple,
        EngineKind::Bfgt,
        EngineKind::FirstCut,
        EngineKind::Log,
        EngineKind::Lazy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EngineKind::Naive => "naive",
            EngineKind::Simple => "simple",
            EngineKind::Bfgt => "bfgt",
            EngineKind::FirstCut => "firstcut",
            EngineKind::Log => "log",
            EngineKind::Lazy => "lazy",
        }
    }

    pub fn build(self) -> Box<dyn Engine + Send> {
        self.build_with(EngineOptions::default())
    }

    pub fn build_with(self, opts: EngineOptions) -> Box<dyn Engine + Send> {
        match self {
            EngineKind::Naive => Box::new(Naive::new()),
            EngineKind::Simple => Box::new(Simple::with_options(opts)),
            EngineKind::Bfgt => Box::new(Bfgt::with_options(opts)),
            EngineKind::FirstCut => Box::new(FirstCut::with_options(opts)),
            EngineKind::Log => Box::new(Log::with_options(opts)),
            EngineKind::Lazy => Box::new(Lazy::with_options(opts)),
        }
    }
}

impl fmt::Display for EngineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown engine `{0}` (expected naive, simple, bfgt, firstcut, log or lazy)")]
pub struct UnknownEngine(pub String);

impl FromStr for EngineKind {
    type Err = UnknownEngine;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EngineKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| UnknownEngine(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("update {index}: {error}")]
pub struct ReplayError {
    pub index: usize,
    pub error: EngineError,
}

#[derive(Clone, Debug)]
pub struct Replay {
    pub events: Vec<Event>,
    pub counters: Counters,
    pub elapsed: Duration,
    /// False if the timeout fired before the trace was consumed.
    pub finished: bool,
    /// Updates applied.
    pub applied: usize,
}

/// How often the clock is consulted during a timed replay.
pub const TIMEOUT_STRIDE: usize = 1024;

pub fn replay(engine: &mut dyn Engine, trace: &Trace) -> Result<Replay, ReplayError> {
    replay_with_timeout(engine, trace, None)
}

/// Feeds `trace` to `engine`, stopping early once `timeout` has elapsed. The
/// clock is checked every [`TIMEOUT_STRIDE`] updates.
pub fn replay_with_timeout(
    engine: &mut dyn Engine,
    trace: &Trace,
    timeout: Option<Duration>,
) -> Result<Replay, ReplayError> {
    let start = Instant::now();
    let mut events = Vec::new();
    let mut finished = true;
    let mut applied = 0;
    for (index, &u) in trace.updates.iter().enumerate() {
        if let Some(limit) = timeout {
            if index % TIMEOUT_STRIDE == 0 && index > 0 && start.elapsed() > limit {
                finished = false;
                break;
            }
        }
        let verdicts = engine
            .on_update(u)
            .map_err(|error| ReplayError { index, error })?;
        events.extend(verdicts.into_iter().map(|v| Event::new(index, v)));
        applied += 1;
    }
    let elapsed = start.elapsed();
    if let Some(limit) = timeout {
        if elapsed > limit {
            finished = false;
        }
    }
    Ok(Replay {
        events,
        counters: engine.counters(),
        elapsed,
        finished,
        applied,
    })
}

/// Events of `kind` on `trace`.
pub fn run(kind: EngineKind, trace: &Trace) -> Result<Vec<Event>, ReplayError> {
    let mut e = kind.build();
    Ok(replay(e.as_mut(), trace)?.events)
}

pub(crate) fn sort_verdicts(v: &mut [Verdict]) {
    v.sort_unstable_by_key(|x| x.state());
}
