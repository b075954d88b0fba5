//! Full reclassification after each update.
//!
//! After every update that could change a status, both reverse closures
//! (reaches a terminal, reaches a non-closed state) are recomputed from
//! scratch with a depth-first search over backward edges, and the result is
//! diffed against the previous statuses. Updates that provably cannot change
//! anything are skipped: an edge into a non-live state, or a close of a state
//! that still has a non-closed or live successor.

use super::audit::{ensure, AuditError, World};
use super::{sort_verdicts, Counters, Engine, EngineError, EngineKind};
use crate::graph_store::Registry;
use crate::trace::{StateId, Status, Update, Verdict};

#[derive(Clone, Debug, Default)]
pub struct Naive {
    reg: Registry,
    succ: Vec<Vec<u32>>,
    pred: Vec<Vec<u32>>,
    terminal: Vec<bool>,
    status: Vec<Status>,
    counters: Counters,
}

impl Naive {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, s: StateId) -> u32 {
        let (d, fresh) = self.reg.intern(s);
        if fresh {
            self.succ.push(Vec::new());
            self.pred.push(Vec::new());
            self.terminal.push(false);
            self.status.push(Status::Open);
            self.counters.n += 1;
        }
        d
    }

    fn reverse_marks(&mut self, seed: impl Fn(&Self, usize) -> bool) -> Vec<bool> {
        let n = self.status.len();
        let mut mark = vec![false; n];
        let mut stack: Vec<u32> = (0..n).filter(|&i| seed(self, i)).map(|i| i as u32).collect();
        for &s in &stack {
            mark[s as usize] = true;
        }
        let mut visits = 0;
        while let Some(v) = stack.pop() {
            for &p in &self.pred[v as usize] {
                visits += 1;
                if !mark[p as usize] {
                    mark[p as usize] = true;
                    stack.push(p);
                }
            }
        }
        self.counters.dfs_edge_visits += visits;
        mark
    }

    fn recompute(&mut self, out: &mut Vec<Verdict>) {
        self.counters.recomputes += 1;
        let live = self.reverse_marks(|e, i| e.terminal[i]);
        let open = self.reverse_marks(|e, i| !e.reg.is_closed(i as u32));
        for i in 0..self.status.len() {
            let new = if live[i] {
                Status::Live
            } else if !self.reg.is_closed(i as u32) {
                Status::Open
            } else if open[i] {
                Status::Unknown
            } else {
                Status::Dead
            };
            if new != self.status[i] {
                let s = self.reg.external(i as u32);
                match new {
                    Status::Live => {
                        self.counters.live_events += 1;
                        out.push(Verdict::Live(s));
                    }
                    Status::Dead => {
                        self.counters.dead_events += 1;
                        out.push(Verdict::Dead(s));
                    }
                    _ => {}
                }
                self.status[i] = new;
            }
        }
    }
}

impl Engine for Naive {
    fn kind(&self) -> EngineKind {
        EngineKind::Naive
    }

    fn on_update(&mut self, update: Update) -> Result<Vec<Verdict>, EngineError> {
        let mut out = Vec::new();
        let changed = match update {
            Update::Edge(u, v) => {
                let a = self.intern(u);
                if self.reg.is_closed(a) {
                    return Err(EngineError::EdgeAfterClose(u));
                }
                let b = self.intern(v);
                self.counters.m += 1;
                self.succ[a as usize].push(b);
                self.pred[b as usize].push(a);
                self.status[b as usize] == Status::Live && self.status[a as usize] != Status::Live
            }
            Update::Terminal(u) => {
                let a = self.intern(u);
                if self.reg.is_closed(a) {
                    return Err(EngineError::TerminalAfterClose(u));
                }
                self.terminal[a as usize] = true;
                self.status[a as usize] != Status::Live
            }
            Update::Closed(u) => {
                let a = self.intern(u);
                if !self.reg.close(a) || self.status[a as usize] != Status::Open {
                    false
                } else {
                    let escapes = self.succ[a as usize].iter().any(|&w| {
                        w != a && (!self.reg.is_closed(w) || self.status[w as usize] == Status::Live)
                    });
                    if escapes {
                        self.status[a as usize] = Status::Unknown;
                    }
                    !escapes
                }
            }
        };
        if changed {
            self.recompute(&mut out);
        }
        sort_verdicts(&mut out);
        Ok(out)
    }

    fn status(&self, s: StateId) -> Option<Status> {
        self.reg.get(s).map(|d| self.status[d as usize])
    }

    fn counters(&self) -> Counters {
        self.counters
    }

    fn audit(&self, world: &World) -> Result<(), AuditError> {
        for &s in world.states() {
            let mine = self.status(s);
            ensure(mine == Some(world.status(s)), "status correctness", || {
                format!("state {s}: engine {mine:?}, truth {:?}", world.status(s))
            })?;
        }
        Ok(())
    }
}
