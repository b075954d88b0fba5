//! Ground truth for structural audits, and an audited replay driver.
//!
//! A [`World`] is a recomputed view of the trace prefix: the true status of
//! every state and the strongly connected components of both the whole graph
//! and the subgraph of edges leaving closed states. Engines check their
//! internal invariants against it.

use thiserror::Error;

use rustc_hash::FxHashMap;

use super::{Engine, ReplayError};
use crate::oracle::Snapshot;
use crate::trace::{Event, StateId, Status, Trace, Update};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{invariant}: {detail}")]
pub struct AuditError {
    pub invariant: &'static str,
    pub detail: String,
}

impl AuditError {
    pub fn new(invariant: &'static str, detail: impl Into<String>) -> Self {
        AuditError {
            invariant,
            detail: detail.into(),
        }
    }
}

/// Fails with `invariant` unless `cond` holds.
pub(crate) fn ensure(cond: bool, invariant: &'static str, detail: impl FnOnce() -> String) -> Result<(), AuditError> {
    if cond {
        Ok(())
    } else {
        Err(AuditError::new(invariant, detail()))
    }
}

pub struct World {
    index: FxHashMap<StateId, usize>,
    ids: Vec<StateId>,
    edges: Vec<(StateId, StateId)>,
    status: Vec<Status>,
    closed: Vec<bool>,
    scc: Vec<u32>,
    closed_scc: Vec<u32>,
}

impl World {
    pub fn from_snapshot(snap: &Snapshot) -> Self {
        let n = snap.len();
        let ids: Vec<StateId> = (0..n).map(|i| snap.state(i)).collect();
        let index = ids.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        let closed: Vec<bool> = (0..n).map(|i| snap.is_closed(i)).collect();
        let adj: Vec<Vec<usize>> = (0..n).map(|i| snap.successors(i).to_vec()).collect();
        let closed_adj: Vec<Vec<usize>> = (0..n)
            .map(|i| if closed[i] { adj[i].clone() } else { Vec::new() })
            .collect();
        let edges = (0..n)
            .flat_map(|i| snap.successors(i).iter().map(move |&j| (i, j)))
            .map(|(i, j)| (ids[i], ids[j]))
            .collect();
        World {
            index,
            edges,
            status: snap.classify(),
            scc: tarjan(&adj),
            closed_scc: tarjan(&closed_adj),
            closed,
            ids,
        }
    }

    pub fn from_trace(trace: &Trace) -> Self {
        let mut snap = Snapshot::new();
        for u in trace {
            apply(&mut snap, *u);
        }
        World::from_snapshot(&snap)
    }

    pub fn states(&self) -> &[StateId] {
        &self.ids
    }

    /// Every edge update so far, with multiplicity.
    pub fn edges(&self) -> &[(StateId, StateId)] {
        &self.edges
    }

    fn at(&self, s: StateId) -> usize {
        self.index[&s]
    }

    pub fn contains(&self, s: StateId) -> bool {
        self.index.contains_key(&s)
    }

    pub fn status(&self, s: StateId) -> Status {
        self.status[self.at(s)]
    }

    pub fn is_closed(&self, s: StateId) -> bool {
        self.closed[self.at(s)]
    }

    /// Mutually reachable in the whole graph.
    pub fn same_scc(&self, a: StateId, b: StateId) -> bool {
        self.scc[self.at(a)] == self.scc[self.at(b)]
    }

    /// Mutually reachable using only edges that leave closed states.
    pub fn same_closed_scc(&self, a: StateId, b: StateId) -> bool {
        self.closed_scc[self.at(a)] == self.closed_scc[self.at(b)]
    }

    /// Component id in the closed-edge subgraph.
    pub fn closed_scc_id(&self, s: StateId) -> u32 {
        self.closed_scc[self.at(s)]
    }
}

pub(crate) fn apply(snap: &mut Snapshot, u: Update) {
    match u {
        Update::Edge(a, b) => {
            snap.add_edge(a, b);
        }
        Update::Terminal(a) => {
            snap.set_terminal(a);
        }
        Update::Closed(a) => {
            snap.set_closed(a);
        }
    }
}

/// Strongly connected component ids, iterative Tarjan.
pub fn tarjan(adj: &[Vec<usize>]) -> Vec<u32> {
    const UNSEEN: u32 = u32::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next = 0u32;
    let mut ncomp = 0u32;
    let mut call: Vec<(usize, usize)> = Vec::new();
    for s in 0..n {
        if index[s] != UNSEEN {
            continue;
        }
        call.push((s, 0));
        index[s] = next;
        low[s] = next;
        next += 1;
        stack.push(s);
        on_stack[s] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < adj[v].len() {
                let w = adj[v][*i];
                *i += 1;
                if index[w] == UNSEEN {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp[w] = ncomp;
                        if w == v {
                            break;
                        }
                    }
                    ncomp += 1;
                }
            }
        }
    }
    comp
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum AuditedReplayError {
    #[error(transparent)]
    Engine(#[from] ReplayError),
    #[error("after update {index}: {error}")]
    Audit { index: usize, error: AuditError },
}

/// Replays `trace`, auditing the engine as it goes.
///
/// Edge updates that produce no verdicts only get the cheap
/// [`Engine::audit_edge`] check; any other update is followed by a full
/// audit, and a final full audit runs at the end. Full audits are linear in
/// the prefix size, so running one after every plain edge insertion would
/// make dense traces quadratic.
pub fn replay_audited(engine: &mut dyn Engine, trace: &Trace) -> Result<Vec<Event>, AuditedReplayError> {
    let mut snap = Snapshot::new();
    let mut events = Vec::new();
    let mut dirty = false;
    for (index, &u) in trace.updates.iter().enumerate() {
        let verdicts = engine
            .on_update(u)
            .map_err(|error| ReplayError { index, error })?;
        apply(&mut snap, u);
        let quiet = verdicts.is_empty();
        events.extend(verdicts.into_iter().map(|v| Event::new(index, v)));
        match u {
            Update::Edge(a, b) if quiet => {
                engine
                    .audit_edge(a, b)
                    .map_err(|error| AuditedReplayError::Audit { index, error })?;
                dirty = true;
            }
            _ => {
                engine
                    .audit(&World::from_snapshot(&snap))
                    .map_err(|error| AuditedReplayError::Audit { index, error })?;
                dirty = false;
            }
        }
    }
    if dirty {
        let index = trace.len().saturating_sub(1);
        engine
            .audit(&World::from_snapshot(&snap))
            .map_err(|error| AuditedReplayError::Audit { index, error })?;
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::figure_trace;

    #[test]
    fn tarjan_finds_cycles() {
        let adj = vec![vec![1], vec![2], vec![0, 3], vec![]];
        let c = tarjan(&adj);
        assert_eq!(c[0], c[1]);
        assert_eq!(c[1], c[2]);
        assert_ne!(c[2], c[3]);
    }

    #[test]
    fn world_of_figure() {
        let w = World::from_trace(&figure_trace());
        assert_eq!(w.status(StateId(5)), Status::Dead);
        assert_eq!(w.status(StateId(4)), Status::Unknown);
        assert!(!w.same_scc(StateId(1), StateId(2)));
        assert!(w.is_closed(StateId(4)));
        assert_eq!(w.edges().len(), 4);
    }

    #[test]
    fn closed_scc_ignores_open_sources() {
        let t = Trace::new(vec![Update::edge(1, 2), Update::edge(2, 1), Update::closed(1)]);
        let w = World::from_trace(&t);
        assert!(w.same_scc(StateId(1), StateId(2)));
        assert!(!w.same_closed_scc(StateId(1), StateId(2)));
    }
}
