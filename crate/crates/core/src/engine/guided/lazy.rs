//! Cycle check through lazily built jump lists.
//!
//! `jumps[x][i]` points about `2^i` classes ahead of `x` on its successor
//! chain. Lists grow by one entry each time a root search passes through
//! them and are cleared whenever the chain below them may have changed.
//! Entries whose target died are dropped from the end, which is the only
//! place they can sit.

use super::{guided_engine, Core, Guided, Strategy};
use crate::engine::audit::{ensure, AuditError};
use crate::engine::{Counters, EngineKind};
use crate::graph_store::EdgeRecord;
use crate::trace::Status;

#[derive(Clone, Debug, Default)]
pub(crate) struct Jumps {
    jumps: Vec<Vec<u32>>,
    pushes: u64,
    path: Vec<u32>,
}

impl Jumps {
    fn root(&mut self, core: &mut Core, start: u32) -> u32 {
        self.path.clear();
        let mut z = start;
        while core.status[z as usize] == Status::Unknown {
            if self.jumps[z as usize].is_empty() {
                let w = core.succ_class(z);
                self.jumps[z as usize].push(w);
                self.pushes += 1;
            }
            let next = loop {
                let last = *self.jumps[z as usize].last().unwrap();
                let w = core.find(last);
                if core.status[w as usize] != Status::Dead {
                    break w;
                }
                self.jumps[z as usize].pop();
            };
            self.path.push(z);
            z = next;
        }
        let mut below = z;
        for &a in self.path.iter().rev() {
            let n = self.jumps[a as usize].len();
            if let Some(&far) = self.jumps[below as usize].get(n - 1) {
                self.jumps[a as usize].push(far);
                self.pushes += 1;
            }
            below = a;
        }
        z
    }
}

impl Strategy for Jumps {
    const KIND: EngineKind = EngineKind::Lazy;

    fn on_state(&mut self, _d: u32) {
        self.jumps.push(Vec::new());
    }

    fn check_cycle(&mut self, core: &mut Core, y: u32, z: u32) -> bool {
        self.root(core, z) == y
    }

    fn on_succ_removed(&mut self, x: u32, _e: EdgeRecord) {
        self.jumps[x as usize].clear();
    }

    fn on_merged(&mut self, z: u32) {
        self.jumps[z as usize].clear();
    }

    fn on_live(&mut self, x: u32) {
        self.jumps[x as usize].clear();
    }

    fn counters(&self, c: &mut Counters) {
        c.jump_pushes = self.pushes;
    }

    fn audit(&self, core: &Core) -> Result<(), AuditError> {
        let canon = |d: u32| core.uf.find_const(d);
        for x in 0..core.len() as u32 {
            if !core.uf.is_canonical(x) || core.status[x as usize] != Status::Unknown {
                continue;
            }
            let list = &self.jumps[x as usize];
            if list.is_empty() {
                continue;
            }
            ensure(canon(list[0]) == canon(core.succ[x as usize].dst), "jump list head", || {
                format!("first jump of class {x} is not its successor")
            })?;
            // positions and cumulative sizes along the chain
            let mut chain = vec![x];
            let mut sizes = vec![core.uf.size(x) as u64];
            let mut cur = x;
            while core.status[cur as usize] == Status::Unknown {
                cur = canon(core.succ[cur as usize].dst);
                chain.push(cur);
                sizes.push(sizes.last().unwrap() + core.uf.size(cur) as u64);
            }
            let mut prev = 0usize;
            let mut dead_seen = false;
            for (i, &j) in list.iter().enumerate() {
                let c = canon(j);
                if core.status[c as usize] == Status::Dead {
                    dead_seen = true;
                    continue;
                }
                ensure(!dead_seen, "jump list dead suffix", || {
                    format!("class {x}: live jump after a dead one")
                })?;
                let pos = chain.iter().position(|&w| w == c);
                ensure(pos.is_some_and(|p| p >= prev.max(1)), "jump list order", || {
                    format!("class {x}: jump {i} is off the chain or out of order")
                })?;
                prev = pos.unwrap();
                let covered = sizes[prev] - sizes[0];
                ensure(covered >= 1u64 << i, "jump list reach", || {
                    format!("class {x}: jump {i} covers only {covered} states")
                })?;
            }
        }
        Ok(())
    }
}

/// Successor forest with lazily maintained jump pointers.
#[derive(Clone, Debug)]
pub struct Lazy {
    inner: Guided<Jumps>,
}

guided_engine!(Lazy, Jumps);
