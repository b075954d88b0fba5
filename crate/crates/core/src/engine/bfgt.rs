//! Condensation maintained with the two-way search of Bender, Fineman,
//! Gilbert and Tarjan for sparse graphs.
//!
//! Every class carries a key `(level, index)`; keys are compared
//! lexicographically and every condensed edge `(a, b)` between distinct
//! classes satisfies `key(a) < key(b)`. Fresh indices come from a global
//! decreasing counter, so assigning one places a class at the front of its
//! level.
//!
//! Inserting `(x, y)` with `key(x) > key(y)`:
//!
//! 1. Search backward from `x` through classes on `x`'s level, inspecting at
//!    most `ceil(sqrt(m))` edges. If the budget runs out, the target level is
//!    `level(x) + 1` and the backward set shrinks to `{x}`; otherwise the
//!    target level is `level(x)` and the backward set is everything visited.
//! 2. If `y` is below the target level, raise it and search forward,
//!    raising every class reached by an edge from a higher level. Reaching
//!    the backward set means a cycle.
//! 3. On a cycle, the classes that both reach `x` and are reached from `y`
//!    inside the searched region are merged; the merged class keeps the
//!    target level. If the backward search was cut short, levels are
//!    propagated forward from it once more.
//! 4. The touched classes get fresh front indices: backward set (in old
//!    order), then the merged class, then the forward sets in topological
//!    order.

use super::audit::{ensure, AuditError, World};
use super::condensed::{Condensed, Core, CycleSearch, Dir};
use super::{Counters, Engine, EngineError, EngineKind, EngineOptions};
use crate::graph_store::Traversal;
use crate::trace::{StateId, Status, Update, Verdict};

#[derive(Clone, Debug, Default)]
pub(crate) struct TwoWay {
    level: Vec<u32>,
    index: Vec<i64>,
    fresh: i64,
    inserted: u64,
    in_b: Traversal,
    in_f: Traversal,
    reached: Traversal,
    on_cycle: Traversal,
}

impl TwoWay {
    fn key(&self, x: u32) -> (u32, i64) {
        (self.level[x as usize], self.index[x as usize])
    }

    fn next_index(&mut self) -> i64 {
        self.fresh -= 1;
        self.fresh
    }

    /// Forward level propagation from `start` (already at `level`). Classes
    /// reached through an edge into `stop` are not entered; returns whether
    /// that happened. Appends the finish order of entered classes to `post`.
    fn propagate(
        &mut self,
        c: &mut Core,
        start: u32,
        level: u32,
        stop: &dyn Fn(&Self, u32) -> bool,
        post: &mut Vec<u32>,
    ) -> bool {
        let mut hit = false;
        self.in_f.visit(start);
        let mut frames = vec![(start, c.cursor(Dir::Out, start))];
        while let Some(frame) = frames.last_mut() {
            let a = frame.0;
            let Some(b) = c.next_external(Dir::Out, a, &mut frame.1) else {
                frames.pop();
                post.push(a);
                continue;
            };
            if stop(self, b) {
                hit = true;
                continue;
            }
            if self.level[b as usize] < level {
                self.level[b as usize] = level;
                self.in_f.visit(b);
                frames.push((b, c.cursor(Dir::Out, b)));
            }
        }
        hit
    }

    /// Classes inside the searched region lying on a path from `y` to `x`.
    fn cycle_members(&mut self, c: &mut Core, x: u32, y: u32, region: &dyn Fn(&Self, u32) -> bool) -> Vec<u32> {
        let n = c.len();
        self.reached.reset(n);
        self.reached.visit(y);
        let mut stack = vec![y];
        while let Some(a) = stack.pop() {
            let mut cur = c.cursor(Dir::Out, a);
            while let Some(b) = c.next_external(Dir::Out, a, &mut cur) {
                if !self.reached.visited(b) && region(self, b) {
                    self.reached.visit(b);
                    stack.push(b);
                }
            }
        }
        self.on_cycle.reset(n);
        self.on_cycle.visit(x);
        let mut members = vec![x];
        let mut stack = vec![x];
        while let Some(a) = stack.pop() {
            let mut cur = c.cursor(Dir::In, a);
            while let Some(b) = c.next_external(Dir::In, a, &mut cur) {
                if self.reached.visited(b) && !self.on_cycle.visited(b) {
                    self.on_cycle.visit(b);
                    members.push(b);
                    stack.push(b);
                }
            }
        }
        members
    }
}

impl CycleSearch for TwoWay {
    fn on_state(&mut self, _d: u32) {
        self.level.push(1);
        let i = self.next_index();
        self.index.push(i);
    }

    fn insert(&mut self, c: &mut Core, x: u32, y: u32) {
        self.inserted += 1;
        if x == y || self.key(x) < self.key(y) {
            return;
        }
        let n = c.len();
        let l = self.level[x as usize];
        let budget = (self.inserted as f64).sqrt().ceil() as u64;

        // Backward search on x's level.
        self.in_b.reset(n);
        self.in_b.visit(x);
        let mut back = vec![x];
        let mut stack = vec![x];
        let mut complete = true;
        let mut found_y = false;
        let start = c.counters.backward_inspections;
        'search: while let Some(w) = stack.pop() {
            let mut cur = c.cursor(Dir::In, w);
            loop {
                if c.counters.backward_inspections - start >= budget {
                    complete = false;
                    break 'search;
                }
                let Some(a) = c.next_external(Dir::In, w, &mut cur) else {
                    break;
                };
                if self.level[a as usize] != l || self.in_b.visited(a) {
                    continue;
                }
                self.in_b.visit(a);
                back.push(a);
                stack.push(a);
                found_y |= a == y;
            }
        }
        let target = if complete { l } else { l + 1 };
        if !complete {
            back.clear();
        }
        let in_back = move |s: &Self, v: u32| if complete { s.in_b.visited(v) } else { v == x };

        // Forward search from y.
        self.in_f.reset(n);
        let mut fwd_post = Vec::new();
        // A hit in an incomplete search may have missed parallel paths; the
        // forward search from the raised y finds the whole cycle instead.
        let mut cycle = found_y && complete;
        if !cycle && self.level[y as usize] < target {
            self.level[y as usize] = target;
            cycle = self.propagate(c, y, target, &in_back, &mut fwd_post);
        }

        let mut order: Vec<u32> = Vec::new();
        back.sort_unstable_by_key(|&v| self.index[v as usize]);
        if cycle {
            let region = move |s: &Self, v: u32| s.in_f.visited(v) || in_back(s, v);
            let members = self.cycle_members(c, x, y, &region);
            let z = c.merge(&members);
            self.level[z as usize] = target;
            // Only x can have been raised past its successors, and only when
            // the backward search was cut short.
            let mut second = Vec::new();
            if !complete {
                self.in_f.reset(n);
                self.propagate(c, z, target, &|_, _| false, &mut second);
                second.retain(|&v| v != z);
            }
            order.extend(back.iter().copied().filter(|&v| !self.on_cycle.visited(v)));
            order.push(z);
            order.extend(second.iter().rev().copied());
            order.extend(fwd_post.iter().rev().copied().filter(|&v| !self.on_cycle.visited(v)));
        } else {
            order.extend(back.iter().copied());
            order.extend(fwd_post.iter().rev().copied());
        }
        for &v in order.iter().rev() {
            let i = self.next_index();
            self.index[v as usize] = i;
        }
    }

    fn audit(&self, c: &Core) -> Result<(), AuditError> {
        for x in 0..c.len() as u32 {
            if !c.uf.is_canonical(x) {
                continue;
            }
            for e in c.arena.iter(&c.out[x as usize]) {
                let y = c.uf.find_const(e.dst);
                if y == x {
                    continue;
                }
                ensure(self.key(x) < self.key(y), "order compatibility", || {
                    format!(
                        "edge ({}, {}) between classes with keys {:?} and {:?}",
                        c.reg.external(e.src),
                        c.reg.external(e.dst),
                        self.key(x),
                        self.key(y)
                    )
                })?;
            }
        }
        Ok(())
    }
}

/// SCC condensation maintained by the BFGT two-way search.
#[derive(Clone, Debug, Default)]
pub struct Bfgt {
    inner: Condensed<TwoWay>,
}

impl Bfgt {
    pub fn new() -> Self {
        Self::with_options(EngineOptions::default())
    }

    pub fn with_options(opts: EngineOptions) -> Self {
        Bfgt {
            inner: Condensed::new(opts),
        }
    }

    /// Current `(level, index)` key of `s`'s class.
    pub fn key(&self, s: StateId) -> Option<(u32, i64)> {
        let d = self.inner.core.reg.get(s)?;
        Some(self.inner.search.key(self.inner.core.uf.find_const(d)))
    }

    /// Canonical member of `s`'s class, as an external id.
    pub fn representative(&self, s: StateId) -> Option<StateId> {
        let c = &self.inner.core;
        let d = c.reg.get(s)?;
        Some(c.reg.external(c.uf.find_const(d)))
    }
}

impl Engine for Bfgt {
    fn kind(&self) -> EngineKind {
        EngineKind::Bfgt
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
