//! Shared skeleton of the SCC-condensation engines (Simple and BFGT).
//!
//! Every edge is recorded on arrival in the backward list of its target's
//! class, so live marking works immediately, and in a per-state pending list.
//! A state's pending edges enter the condensation only when it is closed, so
//! only closed states are ever merged. The cycle search that runs on each
//! inserted edge is supplied by the engine.
//!
//! A closed class is dead once every outgoing condensed edge leads to a dead
//! class or back into itself. Each class keeps a `watch` list of its
//! outgoing edges; dead or internal edges are popped from its front, and an
//! empty list means the class is dead. Deaths propagate along backward edges.

use std::mem;

use super::audit::{ensure, AuditError, World};
use super::{sort_verdicts, Counters, EngineError, EngineOptions};
use crate::graph_store::{EdgeArena, EdgeList, EdgeRecord, Registry};
use crate::trace::{StateId, Status, Update, Verdict};
use crate::union_find::UnionFind;

pub(crate) trait CycleSearch: Default {
    fn on_state(&mut self, d: u32);

    /// Called after `(x, y)` (canonical ends of a new condensed edge) has
    /// been appended to the lists. Merges any cycle it finds through
    /// [`Core::merge`].
    fn insert(&mut self, core: &mut Core, x: u32, y: u32);

    /// Adds the edges of a state that just closed, one at a time unless
    /// overridden.
    fn insert_closed(&mut self, core: &mut Core, edges: &[EdgeRecord]) {
        for &e in edges {
            let (x, y) = core.link(e);
            self.insert(core, x, y);
        }
    }

    fn audit(&self, core: &Core) -> Result<(), AuditError>;
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Core {
    pub reg: Registry,
    pub uf: UnionFind,
    pub arena: EdgeArena,
    pub status: Vec<Status>,
    pub pending: Vec<EdgeList>,
    pub bck: Vec<EdgeList>,
    pub out: Vec<EdgeList>,
    pub inn: Vec<EdgeList>,
    pub watch: Vec<EdgeList>,
    pub counters: Counters,
    pub verdicts: Vec<Verdict>,
    /// Internal edges unlinked from `out` by searches.
    pub dropped: u64,
}

/// Position in a class's `out` or `inn` list.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Cursor {
    prev: Option<u32>,
    cur: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Dir {
    Out,
    In,
}

impl Core {
    pub fn new(opts: EngineOptions) -> Self {
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

    fn intern(&mut self, s: StateId) -> (u32, bool) {
        let (d, fresh) = self.reg.intern(s);
        if fresh {
            self.uf.push();
            self.status.push(Status::Open);
            for l in [
                &mut self.pending,
                &mut self.bck,
                &mut self.out,
                &mut self.inn,
                &mut self.watch,
            ] {
                l.push(EdgeList::EMPTY);
            }
            self.counters.n += 1;
        }
        (d, fresh)
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

    pub fn cursor(&self, dir: Dir, a: u32) -> Cursor {
        let list = match dir {
            Dir::Out => self.out[a as usize],
            Dir::In => self.inn[a as usize],
        };
        Cursor {
            prev: None,
            cur: list.head_node(),
        }
    }

    /// Advances `cursor` over `a`'s list to the next edge leaving the class
    /// and returns that edge's far end. Internal edges met on the way are
    /// unlinked. Every node looked at counts as one inspection.
    pub fn next_external(&mut self, dir: Dir, a: u32, cursor: &mut Cursor) -> Option<u32> {
        while let Some(node) = cursor.cur {
            let list = match dir {
                Dir::Out => &mut self.out[a as usize],
                Dir::In => &mut self.inn[a as usize],
            };
            let next = self.arena.next_in(node, list);
            let e = self.arena.edge(node);
            let far = match dir {
                Dir::Out => {
                    self.counters.forward_inspections += 1;
                    e.dst
                }
                Dir::In => {
                    self.counters.backward_inspections += 1;
                    e.src
                }
            };
            cursor.cur = next;
            let b = self.uf.find(far);
            if b == a {
                self.arena.unlink(list, cursor.prev, node);
                if dir == Dir::Out {
                    self.dropped += 1;
                }
                continue;
            }
            cursor.prev = Some(node);
            return Some(b);
        }
        None
    }

    /// Marks `x` and every class reaching it live.
    fn mark_live(&mut self, x: u32) {
        self.status[x as usize] = Status::Live;
        self.emit(x, true);
        let mut stack = vec![x];
        while let Some(c) = stack.pop() {
            let list = self.bck[c as usize];
            for e in self.arena.iter(&list) {
                self.counters.dfs_edge_visits += 1;
                let p = self.uf.find(e.src);
                if self.status[p as usize] != Status::Live {
                    self.status[p as usize] = Status::Live;
                    stack.push(p);
                }
            }
            if c != x {
                self.emit(c, true);
            }
        }
    }

    /// Re-examines `start`, and transitively its predecessors, for death.
    fn dead_check(&mut self, start: u32) {
        let mut work = vec![start];
        while let Some(c) = work.pop() {
            let y = self.uf.find(c);
            if self.status[y as usize] != Status::Unknown {
                continue;
            }
            let mut dead = true;
            while let Some(e) = self.arena.front(&self.watch[y as usize]) {
                let t = self.uf.find(e.dst);
                if t == y || self.status[t as usize] == Status::Dead {
                    self.arena.pop_front(&mut self.watch[y as usize]);
                } else {
                    dead = false;
                    break;
                }
            }
            if !dead {
                continue;
            }
            self.status[y as usize] = Status::Dead;
            self.emit(y, false);
            let list = self.bck[y as usize];
            for e in self.arena.iter(&list) {
                self.counters.dfs_edge_visits += 1;
                let p = self.uf.find(e.src);
                if p != y && self.status[p as usize] == Status::Unknown {
                    work.push(p);
                }
            }
        }
    }

    /// Merges the classes of all `members` and returns the canonical id.
    /// Appends a closed state's edge to the condensed lists; returns its
    /// canonical ends.
    pub fn link(&mut self, e: EdgeRecord) -> (u32, u32) {
        let x = self.uf.find(e.src);
        let y = self.uf.find(e.dst);
        self.arena.append(&mut self.out[x as usize], e);
        self.arena.append(&mut self.inn[y as usize], e);
        self.arena.append(&mut self.watch[x as usize], e);
        (x, y)
    }

    pub fn merge(&mut self, members: &[u32]) -> u32 {
        let mut z = self.uf.find(members[0]);
        for &m in &members[1..] {
            let a = z;
            let b = self.uf.find(m);
            if a == b {
                continue;
            }
            debug_assert!(self.reg.is_closed(a) && self.reg.is_closed(b));
            let w = self.uf.union(a, b);
            self.counters.merges += 1;
            for lists in [
                &mut self.bck,
                &mut self.out,
                &mut self.inn,
                &mut self.watch,
            ] {
                let la = mem::take(&mut lists[a as usize]);
                let lb = mem::take(&mut lists[b as usize]);
                lists[w as usize] = self.arena.concat(la, lb);
            }
            let (sa, sb) = (self.status[a as usize], self.status[b as usize]);
            let s = if sa == Status::Live || sb == Status::Live {
                Status::Live
            } else if sa == Status::Dead || sb == Status::Dead {
                Status::Dead
            } else {
                Status::Unknown
            };
            self.status[w as usize] = s;
            z = w;
        }
        z
    }

    pub fn status_of(&self, s: StateId) -> Option<Status> {
        self.reg
            .get(s)
            .map(|d| self.status[self.uf.find_const(d) as usize])
    }

    pub fn counters(&self) -> Counters {
        let uf = self.uf.counters();
        Counters {
            uf_finds: uf.finds,
            uf_unions: uf.unions,
            ..self.counters
        }
    }

    /// Status correctness, and class partition = SCCs of the closed-edge
    /// subgraph.
    pub fn audit(&self, world: &World) -> Result<(), AuditError> {
        let mut owner: rustc_hash::FxHashMap<u32, u32> = Default::default();
        for &s in world.states() {
            let d = self.reg.get(s);
            ensure(d.is_some(), "registration", || format!("state {s} unknown to engine"))?;
            let d = d.unwrap();
            let x = self.uf.find_const(d);
            let mine = self.status[x as usize];
            ensure(mine == world.status(s), "status correctness", || {
                format!("state {s}: engine {mine:?}, truth {:?}", world.status(s))
            })?;
            let canon = self.reg.external(x);
            ensure(world.same_closed_scc(s, canon), "merge equivalence", || {
                format!("{s} and {canon} share a class but are not strongly connected")
            })?;
            if d != x {
                ensure(self.reg.is_closed(d), "merge equivalence", || format!("open state {s} merged"))?;
            }
            let id = world.closed_scc_id(s);
            let prev = *owner.entry(id).or_insert(x);
            ensure(prev == x, "partition", || {
                format!("{s} strongly connected to another class but not merged")
            })?;
        }
        let inserted: usize = (0..self.len() as u32)
            .filter(|&x| self.uf.is_canonical(x))
            .map(|x| self.arena.iter(&self.out[x as usize]).count())
            .sum();
        let expected = world
            .edges()
            .iter()
            .filter(|(u, _)| world.is_closed(*u))
            .count();
        let inserted = inserted + self.dropped as usize;
        ensure(inserted == expected, "withholding", || {
            format!("{inserted} condensed edges, {expected} edges from closed states")
        })
    }

    pub fn audit_edge(&self, u: StateId, v: StateId) -> Result<(), AuditError> {
        let (a, b) = (self.reg.get(u).unwrap(), self.reg.get(v).unwrap());
        let e = EdgeRecord::new(a, b);
        ensure(self.arena.back(&self.pending[a as usize]) == Some(e), "edge representation", || {
            format!("({u}, {v}) not pending")
        })?;
        let y = self.uf.find_const(b);
        ensure(self.arena.back(&self.bck[y as usize]) == Some(e), "edge representation", || {
            format!("({u}, {v}) missing from backward list")
        })
    }
}

#[derive(Clone, Debug, Default)]
pub(crate) struct Condensed<S> {
    pub core: Core,
    pub search: S,
}

impl<S: CycleSearch> Condensed<S> {
    pub fn new(opts: EngineOptions) -> Self {
        Condensed {
            core: Core::new(opts),
            search: S::default(),
        }
    }

    fn intern(&mut self, s: StateId) -> u32 {
        let (d, fresh) = self.core.intern(s);
        if fresh {
            self.search.on_state(d);
        }
        d
    }

    pub fn on_update(&mut self, update: Update) -> Result<Vec<Verdict>, EngineError> {
        match update {
            Update::Edge(u, v) => {
                let a = self.intern(u);
                if self.core.reg.is_closed(a) {
                    return Err(EngineError::EdgeAfterClose(u));
                }
                let b = self.intern(v);
                let c = &mut self.core;
                c.counters.m += 1;
                let e = EdgeRecord::new(a, b);
                c.arena.append(&mut c.pending[a as usize], e);
                let y = c.uf.find(b);
                c.arena.append(&mut c.bck[y as usize], e);
                let x = c.uf.find(a);
                if c.status[y as usize] == Status::Live && c.status[x as usize] != Status::Live {
                    c.mark_live(x);
                }
            }
            Update::Terminal(u) => {
                let a = self.intern(u);
                if self.core.reg.is_closed(a) {
                    return Err(EngineError::TerminalAfterClose(u));
                }
                let x = self.core.uf.find(a);
                if self.core.status[x as usize] != Status::Live {
                    self.core.mark_live(x);
                }
            }
            Update::Closed(u) => {
                let a = self.intern(u);
                if self.core.reg.close(a) {
                    if self.core.status[a as usize] == Status::Open {
                        self.core.status[a as usize] = Status::Unknown;
                    }
                    let pending = mem::take(&mut self.core.pending[a as usize]);
                    let mut edges = Vec::new();
                    let mut cur = pending.head_node();
                    while let Some(node) = cur {
                        cur = self.core.arena.next_in(node, &pending);
                        edges.push(self.core.arena.edge(node));
                    }
                    self.search.insert_closed(&mut self.core, &edges);
                    let x = self.core.uf.find(a);
                    self.core.dead_check(x);
                }
            }
        }
        let mut out = mem::take(&mut self.core.verdicts);
        sort_verdicts(&mut out);
        Ok(out)
    }

    pub fn audit(&self, world: &World) -> Result<(), AuditError> {
        self.core.audit(world)?;
        self.search.audit(&self.core)
    }
}
