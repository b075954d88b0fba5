//! Offline classification and the ground-truth event stream.
//!
//! [`oracle_events`] replays a trace and, after every prefix that could change
//! the classification, recomputes every state's [`Status`] from scratch with
//! two reverse breadth-first searches. The result is the reference every
//! engine is compared against.
//!
//! A prefix is skipped only when the recomputation provably returns the same
//! answer: an edge into a non-live state changes nothing, and closing a state
//! that still has a non-closed or live successor cannot create dead states.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rustc_hash::FxHashMap;

use crate::trace::{Denotation, Event, StateId, Status, Trace, Update, Verdict};

/// Incrementally built denotation with terminal and closed labels.
#[derive(Clone, Debug, Default)]
pub struct Snapshot {
    index: FxHashMap<StateId, usize>,
    ids: Vec<StateId>,
    succ: Vec<Vec<usize>>,
    pred: Vec<Vec<usize>>,
    terminal: Vec<bool>,
    closed: Vec<bool>,
}

impl Snapshot {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, s: StateId) -> usize {
        if let Some(&i) = self.index.get(&s) {
            return i;
        }
        let i = self.ids.len();
        self.index.insert(s, i);
        self.ids.push(s);
        self.succ.push(Vec::new());
        self.pred.push(Vec::new());
        self.terminal.push(false);
        self.closed.push(false);
        i
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn add_edge(&mut self, u: StateId, v: StateId) -> (usize, usize) {
        let a = self.intern(u);
        let b = self.intern(v);
        self.succ[a].push(b);
        self.pred[b].push(a);
        (a, b)
    }

    pub fn set_terminal(&mut self, u: StateId) -> usize {
        let a = self.intern(u);
        self.terminal[a] = true;
        a
    }

    pub fn set_closed(&mut self, u: StateId) -> usize {
        let a = self.intern(u);
        self.closed[a] = true;
        a
    }

    fn reverse_closure(&self, seeds: impl Iterator<Item = usize>) -> Vec<bool> {
        let mut mark = vec![false; self.len()];
        let mut queue = VecDeque::new();
        for s in seeds {
            if !mark[s] {
                mark[s] = true;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            for &p in &self.pred[v] {
                if !mark[p] {
                    mark[p] = true;
                    queue.push_back(p);
                }
            }
        }
        mark
    }

    fn live_marks(&self) -> Vec<bool> {
        self.reverse_closure((0..self.len()).filter(|&i| self.terminal[i]))
    }

    /// Status of every interned state, indexed densely.
    pub fn classify(&self) -> Vec<Status> {
        let live = self.live_marks();
        let reaches_open = self.reverse_closure((0..self.len()).filter(|&i| !self.closed[i]));
        (0..self.len())
            .map(|i| {
                if live[i] {
                    Status::Live
                } else if !self.closed[i] {
                    Status::Open
                } else if reaches_open[i] {
                    Status::Unknown
                } else {
                    Status::Dead
                }
            })
            .collect()
    }

    pub fn state(&self, i: usize) -> StateId {
        self.ids[i]
    }

    pub fn index_of(&self, s: StateId) -> Option<usize> {
        self.index.get(&s).copied()
    }

    /// Successors of dense index `i`, with multiplicity.
    pub fn successors(&self, i: usize) -> &[usize] {
        &self.succ[i]
    }

    pub fn is_closed(&self, i: usize) -> bool {
        self.closed[i]
    }

    pub fn is_terminal(&self, i: usize) -> bool {
        self.terminal[i]
    }

    pub fn statuses(&self) -> BTreeMap<StateId, Status> {
        self.classify()
            .into_iter()
            .enumerate()
            .map(|(i, s)| (self.ids[i], s))
            .collect()
    }
}

/// Classifies every state of a graph given its terminal and closed labels.
///
/// A state is live if a terminal is reachable (reflexively), dead if it is not
/// live and every reachable state is closed, unknown if closed but neither,
/// and open otherwise.
pub fn classify_snapshot(
    graph: &Denotation,
    terminals: &BTreeSet<StateId>,
    closed: &BTreeSet<StateId>,
) -> BTreeMap<StateId, Status> {
    let mut snap = Snapshot::new();
    for &s in &graph.states {
        snap.intern(s);
    }
    for &(u, v) in &graph.edges {
        snap.add_edge(u, v);
    }
    for &t in terminals {
        snap.set_terminal(t);
    }
    for &c in closed {
        snap.set_closed(c);
    }
    snap.statuses()
}

/// Replays a trace and reports the final status of every state alongside the
/// events.
#[derive(Clone, Debug, Default)]
pub struct OracleRun {
    pub events: Vec<Event>,
    pub statuses: BTreeMap<StateId, Status>,
}

/// Ground-truth events: `Live(u)`/`Dead(u)` on the first prefix where `u`
/// attains that status, ascending by state id within one update.
pub fn oracle_events(trace: &Trace) -> Vec<Event> {
    oracle_run(trace).events
}

pub fn oracle_run(trace: &Trace) -> OracleRun {
    let mut snap = Snapshot::new();
    let mut status: Vec<Status> = Vec::new();
    let mut events = Vec::new();

    for (index, &update) in trace.updates.iter().enumerate() {
        let recompute = match update {
            Update::Edge(u, v) => {
                let (a, b) = snap.add_edge(u, v);
                status.resize(snap.len(), Status::Open);
                status[b] == Status::Live && status[a] != Status::Live
            }
            Update::Terminal(u) => {
                let a = snap.set_terminal(u);
                status.resize(snap.len(), Status::Open);
                status[a] != Status::Live
            }
            Update::Closed(u) => {
                let a = snap.set_closed(u);
                status.resize(snap.len(), Status::Open);
                match status[a] {
                    Status::Live | Status::Dead | Status::Unknown => false,
                    Status::Open => {
                        let escapes = snap.succ[a]
                            .iter()
                            .any(|&w| w != a && (!snap.closed[w] || status[w] == Status::Live));
                        if escapes {
                            status[a] = Status::Unknown;
                        }
                        !escapes
                    }
                }
            }
        };
        if !recompute {
            continue;
        }
        let fresh = snap.classify();
        let mut verdicts = Vec::new();
        for (i, (&old, &new)) in status.iter().zip(fresh.iter()).enumerate() {
            if old == new {
                continue;
            }
            match new {
                Status::Live => verdicts.push(Verdict::Live(snap.ids[i])),
                Status::Dead => verdicts.push(Verdict::Dead(snap.ids[i])),
                _ => {}
            }
        }
        verdicts.sort_by_key(|v| v.state());
        events.extend(verdicts.into_iter().map(|v| Event::new(index, v)));
        status = fresh;
    }

    let statuses = status
        .iter()
        .enumerate()
        .map(|(i, &s)| (snap.ids[i], s))
        .collect();
    OracleRun { events, statuses }
}
