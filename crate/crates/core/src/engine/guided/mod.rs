//! Successor-forest engines.
//!
//! Each unknown class keeps one successor edge, and following successors
//! from any unknown class ends at an open class, which proves the class is
//! not dead. All other outgoing edges wait in the class's reserve list until
//! the successor is lost or the class is closed. Closed classes found on a
//! successor cycle are merged.
//!
//! The three engines differ only in how they decide whether a reserve edge
//! `(y, z)` would close a successor cycle, i.e. whether `z`'s tree is rooted
//! at `y`:
//!
//! * [`FirstCut`] walks successors from `z` to the root.
//! * [`Log`] asks an Euler tour forest whether `y` and `z` are connected.
//! * [`Lazy`] follows per-class jump lists that skip ahead along the chain.
//!
//! Edges are stored with their original endpoints and canonicalized when
//! read, so merging two classes only concatenates their lists.

use std::collections::VecDeque;
use std::mem;

use rustc_hash::FxHashSet;

use super::audit::{ensure, AuditError, World};
use super::{sort_verdicts, Counters, EngineError, EngineKind, EngineOptions};
use crate::graph_store::{EdgeArena, EdgeList, EdgeRecord, Registry, NIL};
use crate::trace::{StateId, Status, Update, Verdict};
use crate::union_find::UnionFind;

mod firstcut;
mod lazy;
mod log;

pub use firstcut::FirstCut;
pub use lazy::Lazy;
pub use log::Log;

pub(crate) const NO_SUCC: EdgeRecord = EdgeRecord { src: NIL, dst: NIL };

/// Cycle-check strategy plus the bookkeeping it needs.
pub(crate) trait Strategy: Default {
    const KIND: EngineKind;

    fn on_state(&mut self, _d: u32) {}

    /// Whether adding the edge from open root `y` to class `z` closes a
    /// successor cycle.
    fn check_cycle(&mut self, core: &mut Core, y: u32, z: u32) -> bool;

    fn on_succ_set(&mut self, _y: u32, _e: EdgeRecord) {}

    /// The successor `e` of class `x` was dropped, because its target died
    /// or `x` became live.
    fn on_succ_removed(&mut self, _x: u32, _e: EdgeRecord) {}

    fn on_merged(&mut self, _z: u32) {}

    fn on_live(&mut self, _x: u32) {}

    fn counters(&self, _c: &mut Counters) {}

    fn audit(&self, _core: &Core) -> Result<(), AuditError> {
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Core {
    pub reg: Registry,
    pub uf: UnionFind,
    pub arena: EdgeArena,
    pub status: Vec<Status>,
    /// Successor edge per canonical class, [`NO_SUCC`] if none. The
    /// first-cut engine only reads the target.
    pub succ: Vec<EdgeRecord>,
    pub res: Vec<EdgeList>,
    pub bck: Vec<EdgeList>,
    pub counters: Counters,
    verdicts: Vec<Verdict>,
    work: VecDeque<u32>,
}

impl Core {
    fn new(opts: EngineOptions) -> Self {
        Core {
            uf: match opts.tie_seed {
                Some(s) => UnionFind::with_tie_seed(s),
                None => UnionFind::new(),
            },
            ..Self::default()
        }
    }

    pub fn len(&self) -> usize {
        self.status.len()
    }

    pub fn find(&mut self, v: u32) -> u32 {
        self.uf.find(v)
    }

    /// Canonical class of the successor target of `x`.
    pub fn succ_class(&mut self, x: u32) -> u32 {
        let w = self.succ[x as usize].dst;
        self.uf.find(w)
    }

    fn emit(&mut self, x: u32, live: bool) {
        for m in self.uf.iter(x) {
            let s = self.reg.external(m);
            if live {
                self.counters.live_events += 1;
                self.verdicts.push(Verdict::Live(s));
            } else {
                self.counters.dead_events += 1;
                self.verdicts.push(Verdict::Dead(s));
            }
        }
    }
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Guided<S> {
    pub core: Core,
    pub strategy: S,
}

impl<S: Strategy> Guided<S> {
    pub fn new(opts: EngineOptions) -> Self {
        Guided {
            core: Core::new(opts),
            strategy: S::default(),
        }
    }

    fn intern(&mut self, s: StateId) -> u32 {
        let c = &mut self.core;
        let (d, fresh) = c.reg.intern(s);
        if fresh {
            c.uf.push();
            c.status.push(Status::Open);
            c.succ.push(NO_SUCC);
            c.res.push(EdgeList::EMPTY);
            c.bck.push(EdgeList::EMPTY);
            c.counters.n += 1;
            self.strategy.on_state(d);
        }
        d
    }

    fn set_live(&mut self, x: u32) {
        let c = &mut self.core;
        let old = mem::replace(&mut c.succ[x as usize], NO_SUCC);
        if c.status[x as usize] == Status::Unknown && old != NO_SUCC {
            self.strategy.on_succ_removed(x, old);
        }
        self.strategy.on_live(x);
        self.core.status[x as usize] = Status::Live;
        self.core.emit(x, true);
    }

    /// Marks `y` and every class reaching it through backward edges live.
    fn on_terminal(&mut self, y: u32) {
        if self.core.status[y as usize] == Status::Live {
            return;
        }
        self.set_live(y);
        let mut stack = vec![y];
        while let Some(x) = stack.pop() {
            let list = self.core.bck[x as usize];
            let mut cur = list.head_node();
            while let Some(node) = cur {
                cur = self.core.arena.next_in(node, &list);
                self.core.counters.dfs_edge_visits += 1;
                let src = self.core.arena.edge(node).src;
                let p = self.core.uf.find(src);
                if self.core.status[p as usize] != Status::Live {
                    self.set_live(p);
                    stack.push(p);
                }
            }
        }
    }

    fn on_edge(&mut self, u: u32, v: u32) {
        let c = &mut self.core;
        let x = c.uf.find(u);
        let y = c.uf.find(v);
        if c.status[y as usize] == Status::Live {
            self.on_terminal(x);
        } else if c.status[x as usize] != Status::Live {
            let e = EdgeRecord::new(u, v);
            c.arena.append(&mut c.res[x as usize], e);
            c.arena.append(&mut c.bck[y as usize], e);
        }
    }

    fn merge(&mut self, a: u32, b: u32) -> u32 {
        let c = &mut self.core;
        let (a, b) = (c.uf.find(a), c.uf.find(b));
        if a == b {
            return a;
        }
        let z = c.uf.union(a, b);
        c.counters.merges += 1;
        for lists in [&mut c.bck, &mut c.res] {
            let la = mem::take(&mut lists[a as usize]);
            let lb = mem::take(&mut lists[b as usize]);
            lists[z as usize] = c.arena.concat(la, lb);
        }
        self.strategy.on_merged(z);
        z
    }

    /// Closes `v`'s class and settles every class this affects. Recursion on
    /// predecessors that lose their successor is replaced by a FIFO queue.
    fn on_closed(&mut self, v: u32) {
        let y = self.core.uf.find(v);
        if self.core.status[y as usize] != Status::Open {
            return;
        }
        self.core.work.push_back(y);
        while let Some(item) = self.core.work.pop_front() {
            self.settle(item);
        }
    }

    fn settle(&mut self, item: u32) {
        let mut y = self.core.uf.find(item);
        if self.core.status[y as usize] != Status::Open {
            return;
        }
        loop {
            let c = &mut self.core;
            let Some(e) = c.arena.pop_front(&mut c.res[y as usize]) else {
                break;
            };
            let z = c.uf.find(e.dst);
            if z == y || c.status[z as usize] == Status::Dead {
                continue;
            }
            if self.strategy.check_cycle(&mut self.core, y, z) {
                let mut chain = Vec::new();
                let mut cur = z;
                while cur != y {
                    chain.push(cur);
                    cur = self.core.succ_class(cur);
                }
                let mut m = chain[0];
                for &next in chain[1..].iter().chain(std::iter::once(&y)) {
                    m = self.merge(m, next);
                }
                y = m;
                self.core.status[y as usize] = Status::Open;
                self.core.succ[y as usize] = NO_SUCC;
            } else {
                self.core.status[y as usize] = Status::Unknown;
                self.core.succ[y as usize] = e;
                self.strategy.on_succ_set(y, e);
                return;
            }
        }
        let c = &mut self.core;
        c.status[y as usize] = Status::Dead;
        c.emit(y, false);
        let list = c.bck[y as usize];
        let mut cur = list.head_node();
        while let Some(node) = cur {
            let c = &mut self.core;
            cur = c.arena.next_in(node, &list);
            c.counters.dfs_edge_visits += 1;
            let x = c.uf.find(c.arena.edge(node).src);
            if c.status[x as usize] == Status::Unknown && c.succ_class(x) == y {
                let old = mem::replace(&mut c.succ[x as usize], NO_SUCC);
                c.status[x as usize] = Status::Open;
                c.work.push_back(x);
                self.strategy.on_succ_removed(x, old);
            }
        }
    }

    pub fn on_update(&mut self, update: Update) -> Result<Vec<Verdict>, EngineError> {
        match update {
            Update::Edge(u, v) => {
                let a = self.intern(u);
                if self.core.reg.is_closed(a) {
                    return Err(EngineError::EdgeAfterClose(u));
                }
                let b = self.intern(v);
                self.core.counters.m += 1;
                self.on_edge(a, b);
            }
            Update::Terminal(u) => {
                let a = self.intern(u);
                if self.core.reg.is_closed(a) {
                    return Err(EngineError::TerminalAfterClose(u));
                }
                let y = self.core.uf.find(a);
                self.on_terminal(y);
            }
            Update::Closed(u) => {
                let a = self.intern(u);
                if self.core.reg.close(a) {
                    self.on_closed(a);
                }
            }
        }
        let mut out = mem::take(&mut self.core.verdicts);
        sort_verdicts(&mut out);
        Ok(out)
    }

    pub fn status(&self, s: StateId) -> Option<Status> {
        let c = &self.core;
        c.reg.get(s).map(|d| c.status[c.uf.find_const(d) as usize])
    }

    pub fn counters(&self) -> Counters {
        let uf = self.core.uf.counters();
        let mut out = Counters {
            uf_finds: uf.finds,
            uf_unions: uf.unions,
            ..self.core.counters
        };
        self.strategy.counters(&mut out);
        out
    }

    /// The five forest invariants, then the strategy's own.
    pub fn audit(&self, world: &World) -> Result<(), AuditError> {
        let c = &self.core;
        let canon = |d: u32| c.uf.find_const(d);
        for &s in world.states() {
            let d = c.reg.get(s);
            ensure(d.is_some(), "registration", || format!("state {s} unknown to engine"))?;
            let d = d.unwrap();
            let x = canon(d);
            let mine = c.status[x as usize];
            ensure(mine == world.status(s), "status correctness", || {
                format!("state {s}: engine {mine:?}, truth {:?}", world.status(s))
            })?;
            if d != x {
                let r = c.reg.external(x);
                ensure(world.same_scc(s, r) && world.is_closed(s) && world.is_closed(r), "merge equivalence", || {
                    format!("{s} and {r} share a class but are not bi-reachable and closed")
                })?;
            }
        }
        let mut reserved: FxHashSet<EdgeRecord> = FxHashSet::default();
        for x in 0..c.len() as u32 {
            if !c.uf.is_canonical(x) {
                continue;
            }
            let st = c.status[x as usize];
            let succ = c.succ[x as usize];
            match st {
                Status::Unknown => {
                    ensure(succ != NO_SUCC, "successor edges", || format!("unknown class {} has no successor", c.reg.external(x)))?;
                    let t = c.status[canon(succ.dst) as usize];
                    ensure(matches!(t, Status::Unknown | Status::Open), "successor edges", || {
                        format!("successor of {} is {t:?}", c.reg.external(x))
                    })?;
                    ensure(canon(succ.src) == x, "successor edges", || {
                        format!("successor of {} leaves another class", c.reg.external(x))
                    })?;
                }
                Status::Open => {
                    ensure(succ == NO_SUCC, "successor edges", || format!("open class {} has a successor", c.reg.external(x)))?;
                }
                _ => {}
            }
            if matches!(st, Status::Unknown | Status::Open) {
                reserved.extend(c.arena.iter(&c.res[x as usize]));
            }
        }
        // no cycles: follow successors with three-colour marking
        let mut colour = vec![0u8; c.len()];
        for x in 0..c.len() as u32 {
            if !c.uf.is_canonical(x) || colour[x as usize] != 0 {
                continue;
            }
            let mut path = Vec::new();
            let mut cur = x;
            loop {
                if colour[cur as usize] == 2 {
                    break;
                }
                ensure(colour[cur as usize] != 1, "no cycles", || {
                    format!("successor cycle through {}", c.reg.external(cur))
                })?;
                colour[cur as usize] = 1;
                path.push(cur);
                if c.status[cur as usize] != Status::Unknown {
                    break;
                }
                cur = canon(c.succ[cur as usize].dst);
            }
            for p in path {
                colour[p as usize] = 2;
            }
        }
        for &(u, v) in world.edges() {
            let (a, b) = (c.reg.get(u).unwrap(), c.reg.get(v).unwrap());
            let (x, y) = (canon(a), canon(b));
            let e = EdgeRecord::new(a, b);
            let ok = reserved.contains(&e)
                || (c.status[x as usize] == Status::Unknown && c.succ[x as usize] == e)
                || x == y
                || c.status[x as usize] == Status::Live
                || c.status[y as usize] == Status::Dead;
            ensure(ok, "edge representation", || format!("edge ({u}, {v}) is not represented"))?;
        }
        self.strategy.audit(c)
    }

    pub fn audit_edge(&self, u: StateId, v: StateId) -> Result<(), AuditError> {
        let c = &self.core;
        let (a, b) = (c.reg.get(u).unwrap(), c.reg.get(v).unwrap());
        let x = c.uf.find_const(a);
        let ok = c.status[x as usize] == Status::Live
            || c.arena.back(&c.res[x as usize]) == Some(EdgeRecord::new(a, b));
        ensure(ok, "edge representation", || format!("edge ({u}, {v}) was dropped"))
    }
}

/// Implements [`Engine`] for a wrapper around `Guided<S>`.
macro_rules! guided_engine {
    ($name:ident, $strategy:ty) => {
        impl $name {
            pub fn new() -> Self {
                Self::with_options($crate::engine::EngineOptions::default())
            }

            pub fn with_options(opts: $crate::engine::EngineOptions) -> Self {
                $name {
                    inner: $crate::engine::guided::Guided::new(opts),
                }
            }
        }

        impl Default for $name {
            fn default() -> Self {
                Self::new()
            }
        }

        impl $crate::engine::Engine for $name {
            fn kind(&self) -> $crate::engine::EngineKind {
                <$strategy as $crate::engine::guided::Strategy>::KIND
            }

            fn on_update(
                &mut self,
                update: $crate::trace::Update,
            ) -> Result<Vec<$crate::trace::Verdict>, $crate::engine::EngineError> {
                self.inner.on_update(update)
            }

            fn status(&self, s: $crate::trace::StateId) -> Option<$crate::trace::Status> {
                self.inner.status(s)
            }

            fn counters(&self) -> $crate::engine::Counters {
                self.inner.counters()
            }

            fn audit(&self, world: &$crate::engine::World) -> Result<(), $crate::engine::AuditError> {
                self.inner.audit(world)
            }

            fn audit_edge(
                &self,
                u: $crate::trace::StateId,
                v: $crate::trace::StateId,
            ) -> Result<(), $crate::engine::AuditError> {
                self.inner.audit_edge(u, v)
            }
        }
    };
}
pub(crate) use guided_engine;
