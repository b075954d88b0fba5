//! Cycle check through an Euler tour forest.
//!
//! The forest holds, for every unknown class, its successor edge, plus the
//! former successor edges inside each merged class as a spanning tree of its
//! members. Two classes are then in the same successor tree exactly when any
//! of their members are connected.

use rustc_hash::FxHashSet;

use super::{guided_engine, Core, Guided, Strategy};
use crate::engine::audit::{ensure, AuditError};
use crate::engine::{Counters, EngineKind};
use crate::euler_forest::EulerForest;
use crate::graph_store::EdgeRecord;
use crate::trace::Status;

#[derive(Clone, Debug, Default)]
pub(crate) struct Tours {
    ef: EulerForest,
}

impl Strategy for Tours {
    const KIND: EngineKind = EngineKind::Log;

    fn on_state(&mut self, d: u32) {
        self.ef.ensure_vertex(d);
    }

    fn check_cycle(&mut self, _core: &mut Core, y: u32, z: u32) -> bool {
        self.ef.connected(y, z)
    }

    fn on_succ_set(&mut self, _y: u32, e: EdgeRecord) {
        self.ef.add(e.src, e.dst).expect("successor edge joins two trees");
    }

    fn on_succ_removed(&mut self, _x: u32, e: EdgeRecord) {
        self.ef.remove(e.src, e.dst).expect("successor edge is in the forest");
    }

    fn counters(&self, c: &mut Counters) {
        c.ef_ops = self.ef.counters().ops;
    }

    fn audit(&self, core: &Core) -> Result<(), AuditError> {
        let canon = |d: u32| core.uf.find_const(d);
        let mut succ: FxHashSet<(u32, u32)> = FxHashSet::default();
        let mut intra = vec![0u32; core.len()];
        for x in 0..core.len() as u32 {
            if core.uf.is_canonical(x) && core.status[x as usize] == Status::Unknown {
                let e = core.succ[x as usize];
                succ.insert((e.src.min(e.dst), e.src.max(e.dst)));
            }
        }
        for (u, v) in self.ef.edges() {
            let (a, b) = (canon(u), canon(v));
            if a == b {
                intra[a as usize] += 1;
                continue;
            }
            ensure(succ.remove(&(u.min(v), u.max(v))), "forest inter-class edges", || {
                format!("forest edge ({u}, {v}) is not a successor edge")
            })?;
        }
        ensure(succ.is_empty(), "forest inter-class edges", || {
            format!("{} successor edges missing from the forest", succ.len())
        })?;
        for x in 0..core.len() as u32 {
            if !core.uf.is_canonical(x) || !matches!(core.status[x as usize], Status::Unknown | Status::Open) {
                continue;
            }
            let want = core.uf.size(x) - 1;
            ensure(intra[x as usize] == want, "forest intra-class edges", || {
                format!("class {x} has {} internal forest edges, size {}", intra[x as usize], want + 1)
            })?;
        }
        self.ef.audit().map_err(|e| AuditError {
            invariant: "euler forest",
            detail: e.to_string(),
        })
    }
}

/// Successor forest with connectivity queries on Euler tours.
#[derive(Clone, Debug)]
pub struct Log {
    inner: Guided<Tours>,
}

guided_engine!(Log, Tours);
