//! Incremental dead-state detection over a growing directed graph.

pub mod engine;
pub mod euler_forest;
pub mod generators;
pub mod graph_store;
pub mod harness;
pub mod oracle;
pub mod trace;
pub mod union_find;

pub use engine::{replay, run, Counters, Engine, EngineError, EngineKind, EngineOptions, Replay};
pub use oracle::{oracle_events, oracle_run};
pub use trace::{Event, StateId, Status, Trace, Update, Verdict};
