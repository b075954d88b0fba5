//! Condensation with an unbounded forward search per closed state.
//!
//! When `x` closes, its edges enter the condensation together and one
//! depth-first search from all their targets looks for `x`. Every class on
//! a path back to `x` lies on a new cycle and is merged. Each search can
//! visit the whole condensation, so a chain read in reverse costs quadratic
//! time.

use super::audit::{AuditError, World};
use super::condensed::{Condensed, Core, CycleSearch};
use super::{Counters, Engine, EngineError, EngineKind, EngineOptions};
use crate::graph_store::{EdgeRecord, Traversal};
use crate::trace::{StateId, Status, Update, Verdict};

#[derive(Clone, Debug, Default)]
pub(crate) struct ForwardDfs {
    seen: Traversal,
    reach: Vec<bool>,
}

impl ForwardDfs {
    /// Merges `x` with every class reachable from `roots` that reaches `x`.
    /// Without the edges out of `x` the condensation is acyclic, so the
    /// search meets no back edges.
    fn search(&mut self, c: &mut Core, x: u32, roots: &[u32]) {
        self.seen.reset(c.len());
        let mut order = Vec::new();
        for &y in roots {
            if y == x || self.seen.visited(y) {
                continue;
            }
            self.seen.visit(y);
            order.push(y);
            let mut frames = vec![(y, c.out[y as usize].head_node())];
            while let Some(frame) = frames.last_mut() {
                let (v, cur) = *frame;
                match cur {
                    Some(node) => {
                        frame.1 = c.arena.next_in(node, &c.out[v as usize]);
                        c.counters.forward_inspections += 1;
                        c.counters.dfs_edge_visits += 1;
                        let w = c.uf.find(c.arena.edge(node).dst);
                        if w == v {
                            continue;
                        }
                        if w == x {
                            self.reach[v as usize] = true;
                        } else if self.seen.visited(w) {
                            if self.reach[w as usize] {
                                self.reach[v as usize] = true;
                            }
                        } else {
                            self.seen.visit(w);
                            order.push(w);
                            frames.push((w, c.out[w as usize].head_node()));
                        }
                    }
                    None => {
                        frames.pop();
                        if self.reach[v as usize] {
                            if let Some(parent) = frames.last() {
                                self.reach[parent.0 as usize] = true;
                            }
                        }
                    }
                }
            }
        }
        let mut cycle = vec![x];
        for &v in &order {
            if self.reach[v as usize] {
                cycle.push(v);
                self.reach[v as usize] = false;
            }
        }
        if cycle.len() > 1 {
            c.merge(&cycle);
        }
    }
}

impl CycleSearch for ForwardDfs {
    fn on_state(&mut self, _d: u32) {
        self.reach.push(false);
    }

    fn insert(&mut self, c: &mut Core, x: u32, y: u32) {
        self.search(c, x, &[y]);
    }

    fn insert_closed(&mut self, c: &mut Core, edges: &[EdgeRecord]) {
        let Some(first) = edges.first() else {
            return;
        };
        let targets: Vec<u32> = edges.iter().map(|&e| c.link(e).1).collect();
        let x = c.uf.find(first.src);
        self.search(c, x, &targets);
    }

    fn audit(&self, _core: &Core) -> Result<(), AuditError> {
        Ok(())
    }
}

/// SCC condensation with a plain forward-DFS cycle check.
#[derive(Clone, Debug, Default)]
pub struct Simple {
    inner: Condensed<ForwardDfs>,
}

impl Simple {
    pub fn new() -> Self {
        Self::with_options(EngineOptions::default())
    }

    pub fn with_options(opts: EngineOptions) -> Self {
        Simple {
            inner: Condensed::new(opts),
        }
    }
}

impl Engine for Simple {
    fn kind(&self) -> EngineKind {
        EngineKind::Simple
    }

    fn on_update(&mut self, update: Update) -> Result<Vec<Verdict>, EngineError> {
        self.inner.on_update(update)
    }

    fn status(&self, s: StateId) -> Option<Status> {
        self.inner.core.status_of(s)
    }

    fn counters(&self) -> Counters {
        self.inner.core.counters()
    }

    fn audit(&self, world: &World) -> Result<(), AuditError> {
        self.inner.audit(world)
    }

    fn audit_edge(&self, u: StateId, v: StateId) -> Result<(), AuditError> {
        self.inner.core.audit_edge(u, v)
    }
}
